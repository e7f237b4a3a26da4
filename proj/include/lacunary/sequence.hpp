#pragma once

#include <functional>
#include <string>
#include <vector>

#include "lacunary/bigint.hpp"
#include "lacunary/errors.hpp"

namespace lacunary {

// Rule for the power-of-two prefactor 2^T(i) shared by all terms of block i.
//
//   DoubleExponential:  T(i) = 2^(i^4).  Faithful to the construction, but the
//                       terms stop being materializable almost immediately
//                       (already T(3) = 2^81 bits).
//   Reduced:            T(1) = N(1)+1, T(i) = T(i-1) + N(i-1) + i^2, where
//                       N(i) is the largest index of block i.  Keeps the one
//                       property counting arguments use at finite scale:
//                       every block sits far above the previous one in
//                       magnitude.  The separation is asserted, not assumed.
//   Table:              explicit strictly increasing exponents.
enum class TowerRule { DoubleExponential, Reduced, Table };

struct TowerSpec {
    TowerRule rule = TowerRule::Reduced;
    std::vector<Int> table;  // used by TowerRule::Table
};

// One sub-block of a block: indices lo..hi carry label m.
struct SubBlockRange {
    long label = 1;  // m
    Int lo, hi;
};

// Parameters of the block/sub-block/tower construction
//   block i       = { (R^i-R)/(R-1)+1 .. (R^(i+1)-R)/(R-1) },  #block i = R^i
//   sub-blocks    = M(i) = ceil(i^(1-eps)) contiguous pieces of near-equal size
//   term          = 2^T(i) * (2^k + m)   for k in sub-block m of block i.
struct ConstructionParams {
    long growth_base = 9;       // R >= 3
    Rat eps = Rat(1, 2);        // in (0,1)
    long degree = 42;           // degree d of the companion cosine polynomial
    Rat lil_constant = Rat(1);  // targeted constant K in the LIL lower bound
    TowerSpec tower;
    long max_term_bits = 1L << 24;  // cap per materialized integer

    // Throws std::invalid_argument on hard violations (R < 3, eps outside
    // (0,1), degree < 1, K <= 0, bad tower table).
    void validate() const;

    // Soft constraints.  Violations do not invalidate counting experiments,
    // so they are reported rather than thrown:
    //   R > 8/eps,   d*sqrt(eps)/4 - 2 > K*sqrt(d)/sqrt(2).
    std::vector<std::string> constraint_warnings() const;

    // M(i) = ceil(i^(1-eps)).  eps is an exact rational; the power is taken
    // in 160-bit floating point, and if the result lands within 2^-40 of an
    // integer the ceiling is recomputed from an exact integer-root
    // comparison, so M(i) is reproducible.
    long subblock_count(int block) const;

    Int block_lo(int block) const;  // (R^i - R)/(R-1) + 1
    Int block_hi(int block) const;  // (R^(i+1) - R)/(R-1); also N(i)

    // Smallest block whose range contains k.
    int block_of_index(const Int& k) const;

    // The M(i) contiguous ranges covering block i in increasing label order.
    // Sizes differ by at most one; the first (R^i mod M(i)) sub-blocks take
    // the extra element.
    std::vector<SubBlockRange> subblock_partition(int block) const;

    // Sub-block label of index k inside its block.
    long sublabel_of_index(const Int& k) const;

    // T(i) under the configured rule.  The value is an exponent and is
    // returned exactly even when 2^T(i) itself is not materializable.
    Int tower_exponent(int block) const;
};

// A term in factored form: value = 2^T(block) * (2^index + label).
struct SymbolicTerm {
    int block = 1;
    long label = 1;
    Int index;
};

struct SequenceSpec {
    enum class Kind { Geometric, ErdosFortet, Paper, Explicit };

    Kind kind = Kind::Geometric;
    long geometric_base = 2;       // q >= 2, Kind::Geometric
    ConstructionParams params;     // Kind::Paper
    std::vector<Int> explicit_terms;

    static SequenceSpec geometric(long q);
    static SequenceSpec erdos_fortet();                       // n_k = 2^k - 1
    static SequenceSpec paper(ConstructionParams p);
    static SequenceSpec explicit_list(std::vector<Int> t);

    std::string kind_name() const;
};

// (index, label, block) of term k; never materializes the term.
SymbolicTerm term_symbolic(const Int& k, const ConstructionParams& params);

// Exact value of n_k.  Throws TowerOverflow when the required bit length
// exceeds params.max_term_bits.
Int term_value(const Int& k, const SequenceSpec& spec);

// [n_1 .. n_N], strictly increasing.
std::vector<Int> sequence_prefix(long n, const SequenceSpec& spec);

// min over k of n_{k+1}/n_k as an exact rational.  Throws NotIncreasing when
// some ratio is <= 1.
Rat hadamard_min_ratio(const std::vector<Int>& prefix);

// Separation between consecutive instantiated blocks:
//   min term of block i  >  2^i * max term of block i-1.
// Checked symbolically (exponent arithmetic), so it works for any tower rule.
bool tower_separation_holds(const ConstructionParams& params, int block);

// Calls fn(block, label, index) for the first n indices in order, walking the
// partition once instead of re-deriving it per index.
void for_each_term_symbolic(const ConstructionParams& params, long n,
                            const std::function<void(int, long, long)>& fn);

}  // namespace lacunary
