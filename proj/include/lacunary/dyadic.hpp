#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "lacunary/bigint.hpp"
#include "lacunary/errors.hpp"
#include "lacunary/sequence.hpp"

namespace lacunary {

// Exact point x = numerator / 2^bits in [0,1).
struct DyadicPoint {
    Int numerator;
    long bits = 1;

    DyadicPoint() = default;
    DyadicPoint(Int num, long precision_bits);

    bool operator==(const DyadicPoint& other) const = default;
};

// Nearest dyadic point at the given precision to the rational value.
DyadicPoint dyadic_from_rational(const Rat& value, long precision_bits);

// (x.numerator mod 2^hi) / 2^hi as a double, reading one 64-bit window of
// the limb array.  This is the only place exact values are rounded.
double low_bits_unit(const Int& x, long hi);

// x as a double in [0,1).
double unit_value(const DyadicPoint& x);

// frac(2^shift * x) as a double, O(1): a window read at bit position
// bits - shift.  Matches unit_value(frac_part_mul(2^shift, x)) bit for bit.
double shifted_unit(const DyadicPoint& x, long shift);

// Exact n*x mod 1 at the same precision.  n may be negative (the result is
// the non-negative representative).
DyadicPoint frac_part_mul(const Int& n, const DyadicPoint& x);

// One cosine/sine with positive integer frequency and rational amplitude:
// amplitude * cos(2 pi frequency x)  or  ... sin(...).
struct TrigTerm {
    Rat amplitude;
    Int frequency;
    bool is_sine = false;
};

struct TrigPolySpec {
    std::vector<TrigTerm> terms;

    // f(x) = sum_{j=0}^{degree-1} cos(2 pi 2^j x)
    static TrigPolySpec cosine_powers(long degree);
    // f(x) = cos(2 pi x) + cos(4 pi x)
    static TrigPolySpec erdos_fortet();
    static TrigPolySpec single_cosine(Int frequency);

    Int max_frequency() const;
    void validate() const;  // positive frequencies
};

// sum of amplitude * trig(2 pi * frac(frequency * x)), reduction exact.
double eval_trig_poly(const TrigPolySpec& f, const DyadicPoint& x);

// Precision rule: bit length of the largest frequency in play plus 64 guard
// bits.  With reduction done on the integer product, the only rounding left
// is the final truncation of x itself.
long recommended_precision(const TrigPolySpec& f, const Int& max_term);

enum class EvalPath {
    Auto,      // windowed when the sequence supports it, exact otherwise
    Exact,     // materialized terms, exact modular reduction per frequency
    Windowed,  // O(1) window reads; needs a shift-plus-small-offset form
};

// S_N(x) = sum_{k=1}^{N} f(n_k x), Neumaier-compensated, left to right.
double lacunary_sum(const TrigPolySpec& f, const SequenceSpec& spec, long n,
                    const DyadicPoint& x, EvalPath path = EvalPath::Auto);

// Block sum over the full terms 2^T(i) (2^k + m) of block i.
double block_sum(const TrigPolySpec& f, const ConstructionParams& params,
                 int block, const DyadicPoint& x, EvalPath path = EvalPath::Auto);

// Same block with the tower prefactor removed: terms 2^k + m.  Defined for
// every block regardless of the tower rule.
double reduced_block_sum(const TrigPolySpec& f, const ConstructionParams& params,
                         int block, const DyadicPoint& x,
                         EvalPath path = EvalPath::Auto);

// All cosine/sine terms of sum_{k} f(n_k x) as one trigonometric polynomial,
// equal frequencies and phases merged with exact rational amplitudes.
TrigPolySpec expand_over_terms(const TrigPolySpec& f, const std::vector<Int>& terms);

// Integral over [0,1] of the square of the polynomial: by orthogonality,
// sum of (merged amplitude)^2 / 2 over distinct (frequency, phase) pairs.
Rat trig_poly_variance(const TrigPolySpec& expanded);

// sigma_N^2 = int_0^1 ( sum_{k<=N} f(n_k x) )^2 dx, exact.
Rat sigma_n_squared(const TrigPolySpec& f, const SequenceSpec& spec, long n);

// Reduced-block analogue, used as the exact global moment reference.
Rat reduced_block_variance(const TrigPolySpec& f, const ConstructionParams& params,
                           int block);

// Splitting of the reduced block sum with f = cosine_powers(d):
//
//   direct = main - drag - sine + error
//
//   main   d * sum_{k in block} cos(2 pi 2^k x)
//   drag   2 * sum_m [sum_j sin^2(pi 2^j m x)] [sum_{k in sub m} cos(2 pi 2^k x)]
//          (cos 2y = 1 - 2 sin^2 y brings the slow factor in with weight 2)
//   sine   sum_m [sum_j sin(2 pi 2^j m x)] [sum_{k in sub m} sin(2 pi 2^k x)]
//   error  the re-indexing leftover: at most d(d-1) cosines per sub-block,
//          so |sum_m error_m| <= d^2 * i.
struct DecompositionReport {
    double direct = 0;
    double main_term = 0;
    double drag_term = 0;
    double sine_term = 0;
    double error_term = 0;
    double error_bound = 0;  // d^2 * i
    double residual = 0;     // |direct - (main - drag - sine + error)|
    std::vector<long> error_term_counts;  // surviving cosines per sub-block
};

DecompositionReport decomposition_terms(const ConstructionParams& params,
                                        int block, const DyadicPoint& x);

// Smallest h with 1/(20 d 2^d M(i)) <= 2^-h <= 1/(10 d 2^d M(i)).
long local_window_exponent(int block, const ConstructionParams& params);

// Discretized slow factors on the cell [a/2^(R^(i-1)), (a+1)/2^(R^(i-1))):
//   s_m = sum_j sin^2(pi 2^j m a / 2^(R^(i-1)))
//   S   = ( sum_m #sub_m s_m^2 )^(1/2)
//   lambda_m = s_m / S, shared by every index of sub-block m.
struct WindowWeights {
    bool degenerate = false;  // a = 0: every s_m vanishes, lambdas undefined
    std::vector<double> s;
    std::vector<double> lambda;
    std::vector<long> sizes;
    double normalizer = 0;
    double max_lambda = 0;

    std::vector<double> per_index_lambda() const;
};

WindowWeights window_weights(const Int& a, int block, const ConstructionParams& params);

// Reusable evaluator of sum_k f(n_k x) over a fixed term list.  Building the
// term decomposition once and sharing it across sample points is what makes
// the Monte-Carlo loops cheap; evaluation itself is pure and safe to call
// from several threads.
class PreparedSum {
public:
    static PreparedSum over_prefix(TrigPolySpec f, const SequenceSpec& spec, long n);
    static PreparedSum over_block(TrigPolySpec f, const ConstructionParams& params,
                                  int block, bool reduced);

    double value(const DyadicPoint& x) const;

    // out[j] = value of the partial sum over the first lengths[j] terms;
    // lengths must be ascending and bounded by the term count.
    void cumulative(const DyadicPoint& x, const std::vector<long>& lengths,
                    std::vector<double>& out) const;

    long term_count() const;
    long recommended_bits() const;  // precision rule applied to the largest term

    struct Impl;
    PreparedSum(PreparedSum&&) noexcept;
    PreparedSum& operator=(PreparedSum&&) noexcept;
    ~PreparedSum();

private:
    PreparedSum();
    std::unique_ptr<Impl> impl_;
};

// Neumaier variant of compensated summation.
struct CompensatedSum {
    double sum = 0, comp = 0;
    void add(double x) {
        const double t = sum + x;
        if (std::fabs(sum) >= std::fabs(x))
            comp += (sum - t) + x;
        else
            comp += (x - t) + sum;
        sum = t;
    }
    double value() const { return sum + comp; }
};

}  // namespace lacunary
