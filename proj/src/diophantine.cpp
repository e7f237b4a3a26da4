#include "lacunary/diophantine.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <unordered_map>

namespace lacunary {

long count_naive(const std::vector<Int>& prefix, const EquationParams& eq) {
    if (eq.a < 1 || eq.b < 1) throw std::invalid_argument("coefficients must be >= 1");
    const std::size_t n = prefix.size();
    std::vector<Int> lhs(n), rhs(n);
    for (std::size_t i = 0; i < n; ++i) {
        lhs[i] = eq.a * prefix[i];
        rhs[i] = eq.b * prefix[i] + eq.c;
    }
    long count = 0;
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = 0; l < n; ++l)
            if (lhs[k] == rhs[l]) ++count;
    return count;
}

long count_fast(const std::vector<Int>& prefix, const EquationParams& eq) {
    if (eq.a < 1 || eq.b < 1) throw std::invalid_argument("coefficients must be >= 1");
    std::unordered_map<Int, long, IntHash> table;
    table.reserve(prefix.size() * 2);
    for (const auto& v : prefix) ++table[eq.b * v + eq.c];
    long count = 0;
    for (const auto& v : prefix) {
        const auto it = table.find(eq.a * v);
        if (it != table.end()) count += it->second;
    }
    return count;
}

long SolutionSpectrum::total() const {
    long t = 0;
    for (const auto& [c, cnt] : counts) t += cnt;
    return t;
}

SolutionSpectrum difference_spectrum(const std::vector<Int>& prefix, const Int& a,
                                     const Int& b, long pair_budget) {
    if (a < 1 || b < 1) throw std::invalid_argument("coefficients must be >= 1");
    const long n = static_cast<long>(prefix.size());
    if (n > 0 && n > pair_budget / n)
        throw PairBudgetExceeded("prefix of length " + std::to_string(n) +
                                 " exceeds the pair budget");
    std::vector<Int> lhs(prefix.size()), rhs(prefix.size());
    for (std::size_t i = 0; i < prefix.size(); ++i) {
        lhs[i] = a * prefix[i];
        rhs[i] = b * prefix[i];
    }
    SolutionSpectrum s;
    s.prefix_length = n;
    s.a = a;
    s.b = b;
    for (std::size_t k = 0; k < prefix.size(); ++k) {
        for (std::size_t l = 0; l < prefix.size(); ++l) {
            if (lhs[k] >= rhs[l]) ++s.counts[lhs[k] - rhs[l]];
        }
    }
    return s;
}

std::pair<Int, long> max_count(const std::vector<Int>& prefix, const Int& a,
                               const Int& b, bool exclude_zero, long pair_budget) {
    const SolutionSpectrum s = difference_spectrum(prefix, a, b, pair_budget);
    Int best_c = 0;
    long best = 0;
    for (const auto& [c, cnt] : s.counts) {
        if (exclude_zero && c == 0) continue;
        if (cnt > best) {  // map iteration is ascending in c: ties keep the smallest
            best = cnt;
            best_c = c;
        }
    }
    return {best_c, best};
}

Int special_rhs(int block, long label, const Int& b, long r,
                const ConstructionParams& params) {
    if (r == 0) throw std::invalid_argument("exponent gap r must be nonzero");
    if (label < 1 || label > params.subblock_count(block))
        throw std::invalid_argument("sub-block label out of range");
    const Int texp = params.tower_exponent(block);
    const long mag = std::labs(r);
    Int coeff = b * label * (pow2(static_cast<unsigned long>(mag)) - 1);
    Int shift = r > 0 ? texp : texp - mag;
    if (shift < 0)
        throw std::invalid_argument("tower exponent smaller than |r|");
    if (shift + bit_length(coeff) > params.max_term_bits)
        throw TowerOverflow("special right-hand side exceeds the bit cap");
    mpz_mul_2exp(coeff.get_mpz_t(), coeff.get_mpz_t(),
                 mpz_get_ui(shift.get_mpz_t()));
    return coeff;
}

SparsePow2 special_rhs_symbolic(int block, long label, const Int& b, long r,
                                const ConstructionParams& params) {
    if (r == 0) throw std::invalid_argument("exponent gap r must be nonzero");
    const Int texp = params.tower_exponent(block);
    const long mag = std::labs(r);
    const Int coeff = b * label * (pow2(static_cast<unsigned long>(mag)) - 1);
    const Int shift = r > 0 ? texp : texp - mag;
    if (shift < 0) throw std::invalid_argument("tower exponent smaller than |r|");
    return SparsePow2::single(coeff, shift);
}

std::string case_name(DiophantineCase c) {
    switch (c) {
        case DiophantineCase::NonPowerRatio: return "non-power-ratio";
        case DiophantineCase::CrossBlock:    return "cross-block";
        case DiophantineCase::SpecialRhs:    return "special-rhs";
        case DiophantineCase::GenericRhs:    return "generic-rhs";
    }
    return "?";
}

namespace {

// a/b = 2^r?  Returns true and sets r when the reduced ratio is a power of
// two (in either direction).
bool power_of_two_ratio(const Int& a, const Int& b, long& r) {
    Int g;
    mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    const Int va = a / g, vb = b / g;
    if (vb == 1 && is_power_of_two(va)) {
        r = power_of_two_exponent(va);
        return true;
    }
    if (va == 1 && is_power_of_two(vb)) {
        r = -power_of_two_exponent(vb);
        return true;
    }
    return false;
}

}  // namespace

PredictedCount predicted_count_paper(int block, const EquationParams& eq,
                                     const ConstructionParams& params) {
    if (eq.a == eq.b)
        throw InvalidCase("structural prediction needs a != b");
    PredictedCount p;
    long r = 0;
    if (!power_of_two_ratio(eq.a, eq.b, r)) {
        p.tag = DiophantineCase::NonPowerRatio;
        p.sporadic_budget = kBoundedCaseBudget;
        return p;
    }
    p.exponent_gap = r;
    p.sporadic_budget = kSporadicMultiplier * static_cast<double>(block) * block;
    // c = special_rhs(block, m, b, r) for some sub-block m?
    const SparsePow2 c_sym = SparsePow2::single(eq.c, Int(0));
    const auto partition = params.subblock_partition(block);
    for (const auto& sb : partition) {
        if (c_sym == special_rhs_symbolic(block, sb.label, eq.b, r, params)) {
            p.tag = DiophantineCase::SpecialRhs;
            p.label = sb.label;
            Int sz = sb.hi - sb.lo + 1 - std::labs(r);
            if (sz < 0) sz = 0;
            p.structural = mpz_get_si(sz.get_mpz_t());
            return p;
        }
    }
    p.tag = DiophantineCase::GenericRhs;
    return p;
}

long count_symbolic(const ConstructionParams& params, long n, const Int& a,
                    const Int& b, const SparsePow2& c) {
    if (a < 1 || b < 1) throw std::invalid_argument("coefficients must be >= 1");
    struct BlockView {
        Int tower;
        std::vector<SubBlockRange> subs;
    };
    std::vector<BlockView> blocks;
    for (int i = 1; params.block_lo(i) <= n; ++i)
        blocks.push_back({params.tower_exponent(i), params.subblock_partition(i)});

    long count = 0;
    for_each_term_symbolic(params, n, [&](int i1, long m1, long k) {
        const Int t1 = blocks[static_cast<std::size_t>(i1 - 1)].tower;
        // a n_k - c, in exponent space
        const SparsePow2 t = SparsePow2::single(a, t1 + k) +
                             SparsePow2::single(a * m1, t1) - c;
        if (t.sign() <= 0) return;
        // does t equal b * 2^T(i2) * (2^l + m2) for an instantiated l <= n?
        for (const auto& blk : blocks) {
            const auto w = t.quotient_small(b, blk.tower, n + 64);
            if (!w) continue;
            for (const auto& sb : blk.subs) {
                const Int v = *w - sb.label;
                if (v < 2 || !is_power_of_two(v)) continue;
                const Int l = power_of_two_exponent(v);
                if (l >= sb.lo && l <= sb.hi && l <= n) {
                    ++count;
                    return;  // n_l strictly increasing: at most one solution per k
                }
            }
        }
    });
    return count;
}

std::vector<ProfileRow> profile_over_lengths(const SequenceSpec& spec, const Int& a,
                                             const Int& b,
                                             const std::vector<long>& lengths,
                                             const Rat& eps, long pair_budget) {
    long max_n = 0;
    for (long n : lengths) max_n = std::max(max_n, n);
    const std::vector<Int> full = sequence_prefix(max_n, spec);
    const double expo = 1.0 - eps.get_d();
    std::vector<ProfileRow> rows;
    for (long n : lengths) {
        const std::vector<Int> prefix(full.begin(), full.begin() + n);
        auto [c_star, l_star] = max_count(prefix, a, b, /*exclude_zero=*/true,
                                          pair_budget);
        ProfileRow row;
        row.prefix_length = n;
        row.c_star = c_star;
        row.l_star = l_star;
        row.ratio = static_cast<double>(l_star) *
                    std::pow(std::log(static_cast<double>(n)), expo) /
                    static_cast<double>(n);
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<ProfileRow> profile_over_blocks(const SequenceSpec& spec, const Int& a,
                                            const Int& b, int first_block,
                                            int last_block, long pair_budget) {
    if (spec.kind != SequenceSpec::Kind::Paper)
        throw std::invalid_argument("block profile needs the paper sequence");
    std::vector<long> lengths;
    for (int i = first_block; i <= last_block; ++i) {
        const Int hi = spec.params.block_hi(i);
        if (!mpz_fits_slong_p(hi.get_mpz_t()))
            throw PairBudgetExceeded("block end index too large");
        lengths.push_back(hi.get_si());
    }
    return profile_over_lengths(spec, a, b, lengths, spec.params.eps, pair_budget);
}

std::string profile_csv(const std::vector<ProfileRow>& rows, const Int& a,
                        const Int& b,
                        const std::vector<std::string>& header_comments) {
    std::ostringstream os;
    for (const auto& line : header_comments) os << "# " << line << "\n";
    os << "N,a,b,c_star,L_star,ratio\n";
    char buf[64];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%.12g", r.ratio);
        os << r.prefix_length << ',' << a << ',' << b << ',' << r.c_star << ','
           << r.l_star << ',' << buf << "\n";
    }
    return os.str();
}

}  // namespace lacunary
