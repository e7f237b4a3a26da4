#include "lacunary/sparse_pow2.hpp"

#include <algorithm>
#include <stdexcept>

namespace lacunary {

SparsePow2 SparsePow2::single(Int coeff, Int exponent) {
    SparsePow2 v;
    if (coeff != 0) v.terms_.push_back(SparseTerm{std::move(exponent), std::move(coeff)});
    v.normalize();
    return v;
}

void SparsePow2::normalize() {
    // Keep coefficients odd (their two-adic part moves into the exponent,
    // which makes the form canonical) and merge any ascending pair close
    // enough that the lower coefficient could reach into the upper term.
    // Merging can create even or zero coefficients, so iterate to a fixed
    // point; every merge removes a term, so this terminates quickly.
    bool changed = true;
    while (changed) {
        changed = false;
        std::vector<SparseTerm> cur;
        cur.reserve(terms_.size());
        for (auto& t : terms_) {
            if (t.coeff == 0) continue;
            const unsigned long v2 = mpz_scan1(t.coeff.get_mpz_t(), 0);
            if (v2 > 0) {
                mpz_fdiv_q_2exp(t.coeff.get_mpz_t(), t.coeff.get_mpz_t(), v2);
                t.exponent += v2;
            }
            cur.push_back(std::move(t));
        }
        std::sort(cur.begin(), cur.end(),
                  [](const SparseTerm& a, const SparseTerm& b) {
                      return a.exponent < b.exponent;
                  });
        std::vector<SparseTerm> out;
        for (auto& t : cur) {
            if (!out.empty()) {
                SparseTerm& prev = out.back();
                const Int gap = t.exponent - prev.exponent;
                if (gap <= bit_length(prev.coeff) + 2) {
                    Int c = t.coeff;
                    mpz_mul_2exp(c.get_mpz_t(), c.get_mpz_t(),
                                 mpz_get_ui(gap.get_mpz_t()));
                    prev.coeff += c;
                    changed = true;
                    continue;
                }
            }
            out.push_back(std::move(t));
        }
        terms_ = std::move(out);
    }
    std::reverse(terms_.begin(), terms_.end());
}

SparsePow2 SparsePow2::operator+(const SparsePow2& o) const {
    SparsePow2 v;
    v.terms_ = terms_;
    v.terms_.insert(v.terms_.end(), o.terms_.begin(), o.terms_.end());
    v.normalize();
    return v;
}

SparsePow2 SparsePow2::operator-(const SparsePow2& o) const {
    SparsePow2 v;
    v.terms_ = terms_;
    for (const auto& t : o.terms_) v.terms_.push_back(SparseTerm{t.exponent, -t.coeff});
    v.normalize();
    return v;
}

SparsePow2 SparsePow2::operator*(const Int& s) const {
    SparsePow2 v;
    if (s == 0) return v;
    v.terms_ = terms_;
    for (auto& t : v.terms_) t.coeff *= s;
    v.normalize();
    return v;
}

int SparsePow2::sign() const {
    if (terms_.empty()) return 0;
    // leading term dominates by the gap invariant
    return sgn(terms_.front().coeff);
}

std::optional<Int> SparsePow2::quotient_small(const Int& divisor, const Int& base,
                                              long max_bits) const {
    if (divisor <= 0) throw std::invalid_argument("divisor must be positive");
    if (terms_.empty()) return std::nullopt;  // zero is never a valid term value
    // coefficients are odd, so the lowest exponent is the two-adic valuation
    if (base > terms_.back().exponent) return std::nullopt;
    const Int top_width = terms_.front().exponent + bit_length(terms_.front().coeff) - base;
    if (top_width > max_bits) return std::nullopt;
    Int acc(0);
    for (const auto& t : terms_) {
        const Int sh = t.exponent - base;
        Int c = t.coeff;
        mpz_mul_2exp(c.get_mpz_t(), c.get_mpz_t(), mpz_get_ui(sh.get_mpz_t()));
        acc += c;
    }
    if (acc <= 0) return std::nullopt;
    Int q, r;
    mpz_fdiv_qr(q.get_mpz_t(), r.get_mpz_t(), acc.get_mpz_t(), divisor.get_mpz_t());
    if (r != 0) return std::nullopt;
    return q;
}

}  // namespace lacunary
