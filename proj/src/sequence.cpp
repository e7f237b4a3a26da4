#include "lacunary/sequence.hpp"

#include <mpfr.h>

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace lacunary {

void ConstructionParams::validate() const {
    if (growth_base < 3)
        throw std::invalid_argument("growth base must be >= 3");
    if (eps <= 0 || eps >= 1)
        throw std::invalid_argument("eps must lie in (0,1)");
    if (degree < 1)
        throw std::invalid_argument("degree must be >= 1");
    if (lil_constant <= 0)
        throw std::invalid_argument("LIL constant must be positive");
    if (max_term_bits < 64)
        throw std::invalid_argument("term bit cap unreasonably small");
    if (tower.rule == TowerRule::Table) {
        if (tower.table.empty())
            throw std::invalid_argument("empty tower table");
        for (std::size_t i = 1; i < tower.table.size(); ++i)
            if (tower.table[i] <= tower.table[i - 1])
                throw std::invalid_argument("tower table not strictly increasing");
    }
}

std::vector<std::string> ConstructionParams::constraint_warnings() const {
    std::vector<std::string> out;
    // R > 8/eps  <=>  R*eps > 8, exact in rationals.
    if (Rat(growth_base) * eps <= 8) {
        std::ostringstream os;
        os << "growth base " << growth_base << " does not exceed 8/eps = "
           << Rat(8) / eps << "; the LIL lower-bound argument needs a larger base";
        out.push_back(os.str());
    }
    const double d = static_cast<double>(degree);
    const double e = eps.get_d();
    const double k = lil_constant.get_d();
    if (d * std::sqrt(e) / 4.0 - 2.0 <= k * std::sqrt(d) / std::sqrt(2.0)) {
        std::ostringstream os;
        os << "degree " << degree << " too small for target constant " << lil_constant
           << " at eps = " << eps;
        out.push_back(os.str());
    }
    return out;
}

namespace {

// ceil(i^(1-eps)) by exact integer comparison: the smallest t with
// t^den >= i^num, where 1-eps = num/den in lowest terms.
long subblock_count_exact(long i, const Rat& one_minus_eps) {
    Int num = one_minus_eps.get_num();
    Int den = one_minus_eps.get_den();
    Int p;
    mpz_pow_ui(p.get_mpz_t(), Int(i).get_mpz_t(), mpz_get_ui(num.get_mpz_t()));
    Int root;
    const int exact = mpz_root(root.get_mpz_t(), p.get_mpz_t(),
                               mpz_get_ui(den.get_mpz_t()));
    if (!exact) root += 1;
    return root.get_si();
}

}  // namespace

long ConstructionParams::subblock_count(int block) const {
    if (block < 1) throw std::invalid_argument("block index must be >= 1");
    if (block == 1) return 1;
    const Rat one_minus_eps = Rat(1) - eps;

    mpfr_t x, ex, r, nearest;
    mpfr_init2(x, 160);
    mpfr_init2(ex, 160);
    mpfr_init2(r, 160);
    mpfr_init2(nearest, 160);
    mpfr_set_si(x, block, MPFR_RNDN);
    mpfr_set_q(ex, one_minus_eps.get_mpq_t(), MPFR_RNDN);
    mpfr_pow(r, x, ex, MPFR_RNDN);
    mpfr_rint(nearest, r, MPFR_RNDN);
    mpfr_sub(nearest, nearest, r, MPFR_RNDN);
    mpfr_abs(nearest, nearest, MPFR_RNDN);
    const bool near_integer = mpfr_cmp_d(nearest, std::ldexp(1.0, -40)) < 0;
    long m;
    if (near_integer) {
        m = subblock_count_exact(block, one_minus_eps);
    } else {
        mpfr_ceil(r, r);
        m = mpfr_get_si(r, MPFR_RNDN);
    }
    mpfr_clears(x, ex, r, nearest, static_cast<mpfr_ptr>(nullptr));
    return m;
}

Int ConstructionParams::block_lo(int block) const {
    if (block < 1) throw std::invalid_argument("block index must be >= 1");
    Int rpow;
    mpz_ui_pow_ui(rpow.get_mpz_t(), growth_base, block);
    return (rpow - growth_base) / (growth_base - 1) + 1;
}

Int ConstructionParams::block_hi(int block) const {
    if (block < 1) throw std::invalid_argument("block index must be >= 1");
    Int rpow;
    mpz_ui_pow_ui(rpow.get_mpz_t(), growth_base, block + 1);
    return (rpow - growth_base) / (growth_base - 1);
}

int ConstructionParams::block_of_index(const Int& k) const {
    if (k < 1) throw std::invalid_argument("index must be >= 1");
    int i = 1;
    while (block_hi(i) < k) ++i;
    return i;
}

std::vector<SubBlockRange> ConstructionParams::subblock_partition(int block) const {
    const Int lo = block_lo(block);
    Int size;
    mpz_ui_pow_ui(size.get_mpz_t(), growth_base, block);  // #block = R^i
    const long m_count = subblock_count(block);
    Int base, rem;
    mpz_fdiv_qr(base.get_mpz_t(), rem.get_mpz_t(), size.get_mpz_t(),
                Int(m_count).get_mpz_t());
    std::vector<SubBlockRange> out;
    out.reserve(static_cast<std::size_t>(m_count));
    Int cursor = lo;
    for (long m = 1; m <= m_count; ++m) {
        Int sz = base + (Int(m) <= rem ? 1 : 0);
        SubBlockRange r;
        r.label = m;
        r.lo = cursor;
        r.hi = cursor + sz - 1;
        cursor = r.hi + 1;
        out.push_back(std::move(r));
    }
    return out;
}

long ConstructionParams::sublabel_of_index(const Int& k) const {
    const int i = block_of_index(k);
    for (const auto& r : subblock_partition(i))
        if (k >= r.lo && k <= r.hi) return r.label;
    throw std::logic_error("sub-block partition does not cover its block");
}

Int ConstructionParams::tower_exponent(int block) const {
    if (block < 1) throw std::invalid_argument("block index must be >= 1");
    switch (tower.rule) {
        case TowerRule::DoubleExponential: {
            // T(i) = 2^(i^4); the exponent itself can be huge, keep it exact.
            const unsigned long i4 =
                static_cast<unsigned long>(block) * block * block * block;
            return pow2(i4);
        }
        case TowerRule::Reduced: {
            Int t = block_hi(1) + 1;
            for (int i = 2; i <= block; ++i)
                t += block_hi(i - 1) + Int(i) * i;
            return t;
        }
        case TowerRule::Table: {
            if (static_cast<std::size_t>(block) > tower.table.size())
                throw std::invalid_argument("tower table shorter than requested block");
            return tower.table[static_cast<std::size_t>(block) - 1];
        }
    }
    throw std::logic_error("unreachable");
}

SequenceSpec SequenceSpec::geometric(long q) {
    if (q < 2) throw std::invalid_argument("geometric base must be >= 2");
    SequenceSpec s;
    s.kind = Kind::Geometric;
    s.geometric_base = q;
    return s;
}

SequenceSpec SequenceSpec::erdos_fortet() {
    SequenceSpec s;
    s.kind = Kind::ErdosFortet;
    return s;
}

SequenceSpec SequenceSpec::paper(ConstructionParams p) {
    p.validate();
    SequenceSpec s;
    s.kind = Kind::Paper;
    s.params = std::move(p);
    return s;
}

SequenceSpec SequenceSpec::explicit_list(std::vector<Int> t) {
    SequenceSpec s;
    s.kind = Kind::Explicit;
    s.explicit_terms = std::move(t);
    return s;
}

std::string SequenceSpec::kind_name() const {
    switch (kind) {
        case Kind::Geometric:   return "geometric";
        case Kind::ErdosFortet: return "erdos-fortet";
        case Kind::Paper:       return "paper";
        case Kind::Explicit:    return "explicit";
    }
    return "?";
}

SymbolicTerm term_symbolic(const Int& k, const ConstructionParams& params) {
    SymbolicTerm t;
    t.block = params.block_of_index(k);
    t.label = params.sublabel_of_index(k);
    t.index = k;
    return t;
}

namespace {

Int paper_term_value(const Int& k, const ConstructionParams& params) {
    const SymbolicTerm t = term_symbolic(k, params);
    const Int texp = params.tower_exponent(t.block);
    // bits needed: T(i) + k + O(1)
    const Int bits_needed = texp + t.index + 2;
    if (bits_needed > params.max_term_bits) {
        std::ostringstream os;
        os << "term " << k << " needs about " << bits_needed
           << " bits, cap is " << params.max_term_bits;
        throw TowerOverflow(os.str());
    }
    Int v = pow2(mpz_get_ui(t.index.get_mpz_t())) + t.label;
    mpz_mul_2exp(v.get_mpz_t(), v.get_mpz_t(), mpz_get_ui(texp.get_mpz_t()));
    return v;
}

}  // namespace

Int term_value(const Int& k, const SequenceSpec& spec) {
    if (k < 1) throw std::invalid_argument("index must be >= 1");
    switch (spec.kind) {
        case SequenceSpec::Kind::Geometric: {
            Int v;
            mpz_ui_pow_ui(v.get_mpz_t(), spec.geometric_base,
                          mpz_get_ui(k.get_mpz_t()));
            return v;
        }
        case SequenceSpec::Kind::ErdosFortet:
            return pow2(mpz_get_ui(k.get_mpz_t())) - 1;
        case SequenceSpec::Kind::Paper:
            return paper_term_value(k, spec.params);
        case SequenceSpec::Kind::Explicit: {
            if (k > static_cast<long>(spec.explicit_terms.size()))
                throw std::invalid_argument("index beyond explicit term list");
            return spec.explicit_terms[k.get_ui() - 1];
        }
    }
    throw std::logic_error("unreachable");
}

std::vector<Int> sequence_prefix(long n, const SequenceSpec& spec) {
    if (n < 1) throw std::invalid_argument("prefix length must be >= 1");
    std::vector<Int> out;
    out.reserve(static_cast<std::size_t>(n));
    for (long k = 1; k <= n; ++k) out.push_back(term_value(Int(k), spec));
    for (std::size_t i = 1; i < out.size(); ++i)
        if (out[i] <= out[i - 1])
            throw NotIncreasing("sequence prefix is not strictly increasing");
    return out;
}

Rat hadamard_min_ratio(const std::vector<Int>& prefix) {
    if (prefix.size() < 2)
        throw std::invalid_argument("need at least two terms");
    Rat best;
    bool have = false;
    for (std::size_t i = 1; i < prefix.size(); ++i) {
        if (prefix[i - 1] <= 0 || prefix[i] <= prefix[i - 1])
            throw NotIncreasing("ratio <= 1 at position " + std::to_string(i));
        Rat r(prefix[i], prefix[i - 1]);
        r.canonicalize();
        if (!have || r < best) {
            best = r;
            have = true;
        }
    }
    return best;
}

void for_each_term_symbolic(const ConstructionParams& params, long n,
                            const std::function<void(int, long, long)>& fn) {
    long emitted = 0;
    for (int i = 1; emitted < n; ++i) {
        for (const auto& sb : params.subblock_partition(i)) {
            if (!mpz_fits_slong_p(sb.hi.get_mpz_t()))
                throw std::invalid_argument("block bound does not fit a machine word");
            const long lo = sb.lo.get_si();
            const long hi = sb.hi.get_si();
            for (long k = lo; k <= hi && emitted < n; ++k) {
                fn(i, sb.label, k);
                ++emitted;
            }
            if (emitted >= n) break;
        }
    }
}

bool tower_separation_holds(const ConstructionParams& params, int block) {
    if (block < 2) return true;
    // min of block i:   2^T(i)   * (2^lo(i) + 1)      > 2^(T(i)+lo(i))
    // max of block i-1: 2^T(i-1) * (2^hi(i-1) + M)    < 2^(T(i-1)+hi(i-1)+1)
    // It suffices that T(i)+lo(i) >= i + T(i-1) + hi(i-1) + 1.
    const Int lhs = params.tower_exponent(block) + params.block_lo(block);
    const Int rhs = Int(block) + params.tower_exponent(block - 1) +
                    params.block_hi(block - 1) + 1;
    return lhs >= rhs;
}

}  // namespace lacunary
