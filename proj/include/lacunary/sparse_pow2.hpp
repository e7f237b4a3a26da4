#pragma once

#include <optional>
#include <vector>

#include "lacunary/bigint.hpp"

namespace lacunary {

// Exact integers of the form  sum_i coeff_i * 2^(exponent_i)  where the
// exponents themselves are big integers (the tower prefactors make them far
// too large to materialize).  Far-apart terms are kept sparse; terms whose
// binary expansions could interact are merged into one coefficient, so the
// stored form is canonical: strictly descending exponents with
//
//   exponent[t] - exponent[t+1] > bit_length(coeff[t+1]) + 2,
//
// which makes the leading term dominate the sign and makes equality a
// term-by-term comparison.
struct SparseTerm {
    Int exponent;
    Int coeff;

    bool operator==(const SparseTerm& o) const {
        return exponent == o.exponent && coeff == o.coeff;
    }
};

class SparsePow2 {
public:
    SparsePow2() = default;

    static SparsePow2 single(Int coeff, Int exponent);

    SparsePow2 operator+(const SparsePow2& o) const;
    SparsePow2 operator-(const SparsePow2& o) const;
    SparsePow2 operator*(const Int& s) const;

    bool is_zero() const { return terms_.empty(); }
    int sign() const;
    bool operator==(const SparsePow2& o) const = default;

    // value / (divisor * 2^base) as a plain integer, when the quotient is
    // exact, positive, and at most max_bits wide.
    std::optional<Int> quotient_small(const Int& divisor, const Int& base,
                                      long max_bits) const;

    const std::vector<SparseTerm>& terms() const { return terms_; }

private:
    void normalize();
    std::vector<SparseTerm> terms_;
};

}  // namespace lacunary
