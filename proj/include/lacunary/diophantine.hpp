#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "lacunary/bigint.hpp"
#include "lacunary/errors.hpp"
#include "lacunary/sequence.hpp"
#include "lacunary/sparse_pow2.hpp"

namespace lacunary {

// a n_k - b n_l = c over index pairs (k, l).  a, b >= 1; c may be any
// integer for the plain counters (the non-negative convention is restored by
// exchanging the roles of (k, a) and (l, b)).
struct EquationParams {
    Int a = 1;
    Int b = 1;
    Int c = 0;
};

// Ground truth: full O(N^2) scan with exact integers.
long count_naive(const std::vector<Int>& prefix, const EquationParams& eq);

// Hash join of {a n_k} against {b n_l + c}; must agree with count_naive on
// every input.
long count_fast(const std::vector<Int>& prefix, const EquationParams& eq);

// Multiset c >= 0 -> number of ordered pairs with a n_k - b n_l = c.
struct SolutionSpectrum {
    std::map<Int, long> counts;
    long prefix_length = 0;
    Int a = 1, b = 1;

    long total() const;  // == #{(k,l): a n_k >= b n_l}
};

inline constexpr long kDefaultPairBudget = 100'000'000;

SolutionSpectrum difference_spectrum(const std::vector<Int>& prefix, const Int& a,
                                     const Int& b,
                                     long pair_budget = kDefaultPairBudget);

// (c*, L*) with the largest count; ties broken by smallest c.  exclude_zero
// drops the diagonal-style c = 0 bucket.  Returns (0, 0) on an empty
// spectrum.
std::pair<Int, long> max_count(const std::vector<Int>& prefix, const Int& a,
                               const Int& b, bool exclude_zero,
                               long pair_budget = kDefaultPairBudget);

// The right-hand side with many in-block solutions when a/b = 2^r:
//   r > 0:  2^T(i) * b * m * (2^r - 1)
//   r < 0:  2^(T(i)-|r|) * b * m * (2^|r|-1), the exchanged-roles value.
Int special_rhs(int block, long label, const Int& b, long r,
                const ConstructionParams& params);
SparsePow2 special_rhs_symbolic(int block, long label, const Int& b, long r,
                                const ConstructionParams& params);

enum class DiophantineCase {
    NonPowerRatio,  // a/b not a power of two: bounded count
    CrossBlock,     // a/b = 2^r, indices in different blocks: bounded total
    SpecialRhs,     // c in the special family: structural count, exact
    GenericRhs,     // a/b = 2^r but c outside the family: O(i^2) budget
};

std::string case_name(DiophantineCase c);

// Finite-scale budgets standing in for the unquantified O(1) / O(i^2)
// constants; calibrated on the smallest blocks and asserted stable in tests.
inline constexpr double kBoundedCaseBudget = 8.0;
inline constexpr double kSporadicMultiplier = 2.0;

struct PredictedCount {
    DiophantineCase tag = DiophantineCase::GenericRhs;
    long structural = 0;       // exact count of the l = k + r family
    double sporadic_budget = 0;  // allowance on top of the structural part
    long label = 0;            // matched sub-block for SpecialRhs
    long exponent_gap = 0;     // r
};

// Classification of (a, b, c) restricted to pairs inside one block.
// Throws InvalidCase when a == b.
PredictedCount predicted_count_paper(int block, const EquationParams& eq,
                                     const ConstructionParams& params);

// Solution counting in exponent space: works when the terms themselves are
// not materializable.  c is given in the same symbolic form.
long count_symbolic(const ConstructionParams& params, long n, const Int& a,
                    const Int& b, const SparsePow2& c);

struct ProfileRow {
    long prefix_length = 0;
    Int c_star;
    long l_star = 0;
    double ratio = 0;  // L* (log N)^(1-eps) / N
};

// One row per requested prefix length: the largest count over c >= 1 and its
// normalized ratio.
std::vector<ProfileRow> profile_over_lengths(const SequenceSpec& spec, const Int& a,
                                             const Int& b,
                                             const std::vector<long>& lengths,
                                             const Rat& eps,
                                             long pair_budget = kDefaultPairBudget);

// Paper-sequence convenience: prefix lengths N(i) for i in [first_block, last_block].
std::vector<ProfileRow> profile_over_blocks(const SequenceSpec& spec, const Int& a,
                                            const Int& b, int first_block,
                                            int last_block,
                                            long pair_budget = kDefaultPairBudget);

// CSV: header line `N,a,b,c_star,L_star,ratio`, ratio with 12 significant
// digits.  The leading comment lines carry the resolved configuration.
std::string profile_csv(const std::vector<ProfileRow>& rows, const Int& a,
                        const Int& b,
                        const std::vector<std::string>& header_comments);

}  // namespace lacunary
