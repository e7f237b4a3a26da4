#include "lacunary/dyadic.hpp"

#include <algorithm>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace lacunary {

static_assert(sizeof(mp_limb_t) == 8, "64-bit GMP limbs expected");

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kPi = 3.1415926535897932384626433832795;
}  // namespace

DyadicPoint::DyadicPoint(Int num, long precision_bits) : bits(precision_bits) {
    if (precision_bits < 1) throw std::invalid_argument("precision must be >= 1 bit");
    numerator = std::move(num);
    mpz_fdiv_r_2exp(numerator.get_mpz_t(), numerator.get_mpz_t(),
                    static_cast<mp_bitcnt_t>(bits));
}

DyadicPoint dyadic_from_rational(const Rat& value, long precision_bits) {
    Rat v = value;
    v.canonicalize();
    Int scaled_num = v.get_num();
    mpz_mul_2exp(scaled_num.get_mpz_t(), scaled_num.get_mpz_t(),
                 static_cast<mp_bitcnt_t>(precision_bits));
    // round to nearest
    Int den = v.get_den();
    Int x;
    mpz_fdiv_q(x.get_mpz_t(), Int(scaled_num + den / 2).get_mpz_t(), den.get_mpz_t());
    return DyadicPoint(std::move(x), precision_bits);
}

double low_bits_unit(const Int& x, long hi) {
    if (hi <= 0) return 0.0;
    const mpz_srcptr z = x.get_mpz_t();
    const long nlimbs = static_cast<long>(mpz_size(z));
    auto limb = [&](long w) -> std::uint64_t {
        if (w < 0 || w >= nlimbs) return 0;
        return static_cast<std::uint64_t>(mpz_getlimbn(z, static_cast<mp_size_t>(w)));
    };
    std::uint64_t w;
    if (hi >= 64) {
        const long lo = hi - 64;
        const long word = lo >> 6;
        const int sh = static_cast<int>(lo & 63);
        w = limb(word) >> sh;
        if (sh) w |= limb(word + 1) << (64 - sh);
    } else {
        const std::uint64_t mask = (1ULL << hi) - 1;
        w = (limb(0) & mask) << (64 - hi);
    }
    return std::ldexp(static_cast<double>(w), -64);
}

double unit_value(const DyadicPoint& x) { return low_bits_unit(x.numerator, x.bits); }

double shifted_unit(const DyadicPoint& x, long shift) {
    return low_bits_unit(x.numerator, x.bits - shift);
}

DyadicPoint frac_part_mul(const Int& n, const DyadicPoint& x) {
    Int t;
    if (is_power_of_two(n)) {
        // pure dyadic shift
        t = x.numerator;
        mpz_mul_2exp(t.get_mpz_t(), t.get_mpz_t(),
                     static_cast<mp_bitcnt_t>(power_of_two_exponent(n)));
    } else {
        t = n * x.numerator;
    }
    mpz_fdiv_r_2exp(t.get_mpz_t(), t.get_mpz_t(), static_cast<mp_bitcnt_t>(x.bits));
    DyadicPoint r;
    r.numerator = std::move(t);
    r.bits = x.bits;
    return r;
}

TrigPolySpec TrigPolySpec::cosine_powers(long degree) {
    if (degree < 1) throw std::invalid_argument("degree must be >= 1");
    TrigPolySpec f;
    f.terms.reserve(static_cast<std::size_t>(degree));
    for (long j = 0; j < degree; ++j)
        f.terms.push_back(TrigTerm{Rat(1), pow2(static_cast<unsigned long>(j)), false});
    return f;
}

TrigPolySpec TrigPolySpec::erdos_fortet() {
    TrigPolySpec f;
    f.terms.push_back(TrigTerm{Rat(1), Int(1), false});
    f.terms.push_back(TrigTerm{Rat(1), Int(2), false});
    return f;
}

TrigPolySpec TrigPolySpec::single_cosine(Int frequency) {
    TrigPolySpec f;
    f.terms.push_back(TrigTerm{Rat(1), std::move(frequency), false});
    return f;
}

Int TrigPolySpec::max_frequency() const {
    Int m = 0;
    for (const auto& t : terms) m = std::max(m, t.frequency);
    return m;
}

void TrigPolySpec::validate() const {
    for (const auto& t : terms)
        if (t.frequency <= 0)
            throw std::invalid_argument("trig polynomial frequencies must be positive");
}

double eval_trig_poly(const TrigPolySpec& f, const DyadicPoint& x) {
    CompensatedSum acc;
    for (const auto& t : f.terms) {
        const double u = unit_value(frac_part_mul(t.frequency, x));
        const double v = t.is_sine ? std::sin(kTwoPi * u) : std::cos(kTwoPi * u);
        acc.add(t.amplitude.get_d() * v);
    }
    return acc.value();
}

long recommended_precision(const TrigPolySpec& f, const Int& max_term) {
    return bit_length(f.max_frequency() * max_term) + 64;
}

// ---------------------------------------------------------------------------
// Term streams.  Every supported sequence term is either handed out as an
// exact integer or in shift-plus-offset form n = 2^shift + offset, which
// allows O(1) evaluation of frac(g n x) from one window read plus a
// precomputed frac(g offset x).
// ---------------------------------------------------------------------------

namespace {

struct ShiftedTerm {
    long shift = 0;
    Int offset;
};

long int_to_long(const Int& v, const char* what) {
    if (!mpz_fits_slong_p(v.get_mpz_t()))
        throw std::invalid_argument(std::string(what) + " does not fit a machine word");
    return mpz_get_si(v.get_mpz_t());
}

// Paper-block bit check shared by exact and windowed paths.
void check_paper_block_bits(const ConstructionParams& params, int block) {
    const Int need = params.tower_exponent(block) + params.block_hi(block) + 2;
    if (need > params.max_term_bits) {
        std::ostringstream os;
        os << "block " << block << " needs about " << need << " bits, cap is "
           << params.max_term_bits;
        throw TowerOverflow(os.str());
    }
}

std::optional<std::vector<ShiftedTerm>> shifted_prefix(const SequenceSpec& spec, long n) {
    std::vector<ShiftedTerm> out;
    out.reserve(static_cast<std::size_t>(n));
    switch (spec.kind) {
        case SequenceSpec::Kind::Geometric:
            if (spec.geometric_base != 2) return std::nullopt;
            for (long k = 1; k <= n; ++k) out.push_back({k, Int(0)});
            return out;
        case SequenceSpec::Kind::ErdosFortet:
            for (long k = 1; k <= n; ++k) out.push_back({k, Int(-1)});
            return out;
        case SequenceSpec::Kind::Paper: {
            const auto& p = spec.params;
            check_paper_block_bits(p, p.block_of_index(Int(n)));
            for_each_term_symbolic(p, n, [&](int i, long m, long k) {
                const long t = int_to_long(p.tower_exponent(i), "tower exponent");
                Int off(m);
                mpz_mul_2exp(off.get_mpz_t(), off.get_mpz_t(),
                             static_cast<mp_bitcnt_t>(t));
                out.push_back({t + k, std::move(off)});
            });
            return out;
        }
        case SequenceSpec::Kind::Explicit:
            return std::nullopt;
    }
    return std::nullopt;
}

struct FreqPart {
    double amp = 1;
    long exp2 = 0;  // frequency = odd * 2^exp2
    Int odd;
    double odd_d = 1;
    bool is_sine = false;
};

std::vector<FreqPart> split_parts(const TrigPolySpec& f) {
    f.validate();
    std::vector<FreqPart> parts;
    parts.reserve(f.terms.size());
    for (const auto& t : f.terms) {
        FreqPart p;
        p.amp = t.amplitude.get_d();
        p.exp2 = static_cast<long>(mpz_scan1(t.frequency.get_mpz_t(), 0));
        p.odd = t.frequency >> static_cast<unsigned long>(p.exp2);
        p.odd_d = p.odd.get_d();
        if (bit_length(p.odd) > 52)
            throw std::invalid_argument("odd frequency part too large for windowed path");
        p.is_sine = t.is_sine;
        parts.push_back(std::move(p));
    }
    return parts;
}

double sum_f_windowed(const TrigPolySpec& f, const std::vector<ShiftedTerm>& terms,
                      const DyadicPoint& x) {
    const auto parts = split_parts(f);
    // frac(g offset x) per (part, distinct offset), exact
    std::map<Int, std::vector<double>> offset_fracs;
    for (const auto& t : terms) {
        auto it = offset_fracs.find(t.offset);
        if (it != offset_fracs.end()) continue;
        std::vector<double> zs;
        zs.reserve(parts.size());
        for (const auto& p : parts) {
            if (t.offset == 0) {
                zs.push_back(0.0);
            } else {
                Int g_off = p.odd * t.offset;
                mpz_mul_2exp(g_off.get_mpz_t(), g_off.get_mpz_t(),
                             static_cast<mp_bitcnt_t>(p.exp2));
                zs.push_back(unit_value(frac_part_mul(g_off, x)));
            }
        }
        offset_fracs.emplace(t.offset, std::move(zs));
    }
    CompensatedSum acc;
    for (const auto& t : terms) {
        const auto& zs = offset_fracs.find(t.offset)->second;
        for (std::size_t j = 0; j < parts.size(); ++j) {
            const FreqPart& p = parts[j];
            double y = shifted_unit(x, t.shift + p.exp2);
            if (p.odd != 1) {
                y *= p.odd_d;
                y -= std::floor(y);
            }
            double arg = y + zs[j];
            arg -= std::floor(arg);
            const double v = p.is_sine ? std::sin(kTwoPi * arg) : std::cos(kTwoPi * arg);
            acc.add(p.amp * v);
        }
    }
    return acc.value();
}

double eval_f_at_multiple(const TrigPolySpec& f, const Int& n, const DyadicPoint& x) {
    CompensatedSum acc;
    for (const auto& t : f.terms) {
        const double u = unit_value(frac_part_mul(t.frequency * n, x));
        const double v = t.is_sine ? std::sin(kTwoPi * u) : std::cos(kTwoPi * u);
        acc.add(t.amplitude.get_d() * v);
    }
    return acc.value();
}

double sum_f_exact(const TrigPolySpec& f, const std::vector<Int>& terms,
                   const DyadicPoint& x) {
    CompensatedSum acc;
    for (const auto& n : terms) acc.add(eval_f_at_multiple(f, n, x));
    return acc.value();
}

}  // namespace

double lacunary_sum(const TrigPolySpec& f, const SequenceSpec& spec, long n,
                    const DyadicPoint& x, EvalPath path) {
    if (path != EvalPath::Exact) {
        auto shifted = shifted_prefix(spec, n);
        if (shifted) return sum_f_windowed(f, *shifted, x);
        if (path == EvalPath::Windowed)
            throw std::invalid_argument("sequence has no windowed form");
    }
    return sum_f_exact(f, sequence_prefix(n, spec), x);
}

namespace {

std::vector<ShiftedTerm> shifted_block_terms(const ConstructionParams& params,
                                             int block, bool reduced) {
    std::vector<ShiftedTerm> out;
    long tower = 0;
    if (!reduced) {
        check_paper_block_bits(params, block);
        tower = int_to_long(params.tower_exponent(block), "tower exponent");
    }
    for (const auto& sb : params.subblock_partition(block)) {
        const long lo = int_to_long(sb.lo, "sub-block bound");
        const long hi = int_to_long(sb.hi, "sub-block bound");
        for (long k = lo; k <= hi; ++k) {
            Int off(sb.label);
            if (!reduced)
                mpz_mul_2exp(off.get_mpz_t(), off.get_mpz_t(),
                             static_cast<mp_bitcnt_t>(tower));
            out.push_back({tower + k, std::move(off)});
        }
    }
    return out;
}

std::vector<Int> exact_block_terms(const ConstructionParams& params, int block,
                                   bool reduced) {
    std::vector<Int> out;
    for (const auto& st : shifted_block_terms(params, block, reduced))
        out.push_back(pow2(static_cast<unsigned long>(st.shift)) + st.offset);
    return out;
}

}  // namespace

double block_sum(const TrigPolySpec& f, const ConstructionParams& params, int block,
                 const DyadicPoint& x, EvalPath path) {
    if (path == EvalPath::Exact)
        return sum_f_exact(f, exact_block_terms(params, block, false), x);
    return sum_f_windowed(f, shifted_block_terms(params, block, false), x);
}

double reduced_block_sum(const TrigPolySpec& f, const ConstructionParams& params,
                         int block, const DyadicPoint& x, EvalPath path) {
    if (path == EvalPath::Exact)
        return sum_f_exact(f, exact_block_terms(params, block, true), x);
    return sum_f_windowed(f, shifted_block_terms(params, block, true), x);
}

struct PreparedSum::Impl {
    TrigPolySpec f;
    bool windowed = false;
    std::vector<ShiftedTerm> shifted;
    std::vector<Int> exact;
    std::vector<FreqPart> parts;
    Int max_term;

    // frac(g offset x) per f-part, for one sample point
    std::vector<double> offset_fracs(const Int& offset, const DyadicPoint& x) const {
        std::vector<double> zs(parts.size(), 0.0);
        if (offset == 0) return zs;
        for (std::size_t j = 0; j < parts.size(); ++j) {
            Int g_off = parts[j].odd * offset;
            mpz_mul_2exp(g_off.get_mpz_t(), g_off.get_mpz_t(),
                         static_cast<mp_bitcnt_t>(parts[j].exp2));
            zs[j] = unit_value(frac_part_mul(g_off, x));
        }
        return zs;
    }
};

PreparedSum::PreparedSum() : impl_(new Impl) {}
PreparedSum::PreparedSum(PreparedSum&&) noexcept = default;
PreparedSum& PreparedSum::operator=(PreparedSum&&) noexcept = default;
PreparedSum::~PreparedSum() = default;

PreparedSum PreparedSum::over_prefix(TrigPolySpec f, const SequenceSpec& spec, long n) {
    PreparedSum p;
    p.impl_->f = std::move(f);
    auto shifted = shifted_prefix(spec, n);
    if (shifted) {
        p.impl_->windowed = true;
        p.impl_->shifted = std::move(*shifted);
        p.impl_->parts = split_parts(p.impl_->f);
        const auto& last = p.impl_->shifted.back();
        p.impl_->max_term = pow2(static_cast<unsigned long>(last.shift)) + last.offset;
    } else {
        p.impl_->exact = sequence_prefix(n, spec);
        p.impl_->max_term = p.impl_->exact.back();
    }
    return p;
}

PreparedSum PreparedSum::over_block(TrigPolySpec f, const ConstructionParams& params,
                                    int block, bool reduced) {
    PreparedSum p;
    p.impl_->f = std::move(f);
    p.impl_->windowed = true;
    p.impl_->shifted = shifted_block_terms(params, block, reduced);
    p.impl_->parts = split_parts(p.impl_->f);
    const auto& last = p.impl_->shifted.back();
    p.impl_->max_term = pow2(static_cast<unsigned long>(last.shift)) + last.offset;
    return p;
}

double PreparedSum::value(const DyadicPoint& x) const {
    if (impl_->windowed) return sum_f_windowed(impl_->f, impl_->shifted, x);
    return sum_f_exact(impl_->f, impl_->exact, x);
}

void PreparedSum::cumulative(const DyadicPoint& x, const std::vector<long>& lengths,
                             std::vector<double>& out) const {
    out.assign(lengths.size(), 0.0);
    const long total = term_count();
    for (std::size_t j = 0; j < lengths.size(); ++j) {
        if (lengths[j] < 1 || lengths[j] > total)
            throw std::invalid_argument("snapshot length out of range");
        if (j > 0 && lengths[j] <= lengths[j - 1])
            throw std::invalid_argument("snapshot lengths must be ascending");
    }
    CompensatedSum acc;
    std::size_t next = 0;
    if (impl_->windowed) {
        std::map<Int, std::vector<double>> cache;
        for (long i = 0; i < total && next < lengths.size(); ++i) {
            const ShiftedTerm& t = impl_->shifted[static_cast<std::size_t>(i)];
            auto it = cache.find(t.offset);
            if (it == cache.end())
                it = cache.emplace(t.offset, impl_->offset_fracs(t.offset, x)).first;
            const auto& zs = it->second;
            for (std::size_t j = 0; j < impl_->parts.size(); ++j) {
                const FreqPart& p = impl_->parts[j];
                double y = shifted_unit(x, t.shift + p.exp2);
                if (p.odd != 1) {
                    y *= p.odd_d;
                    y -= std::floor(y);
                }
                double arg = y + zs[j];
                arg -= std::floor(arg);
                acc.add(p.amp * (p.is_sine ? std::sin(kTwoPi * arg)
                                           : std::cos(kTwoPi * arg)));
            }
            if (i + 1 == lengths[next]) out[next++] = acc.value();
        }
    } else {
        for (long i = 0; i < total && next < lengths.size(); ++i) {
            acc.add(eval_f_at_multiple(impl_->f, impl_->exact[static_cast<std::size_t>(i)], x));
            if (i + 1 == lengths[next]) out[next++] = acc.value();
        }
    }
}

long PreparedSum::term_count() const {
    return static_cast<long>(impl_->windowed ? impl_->shifted.size()
                                             : impl_->exact.size());
}

long PreparedSum::recommended_bits() const {
    return recommended_precision(impl_->f, impl_->max_term);
}

TrigPolySpec expand_over_terms(const TrigPolySpec& f, const std::vector<Int>& terms) {
    f.validate();
    std::map<Int, std::pair<Rat, Rat>> merged;  // freq -> (cos amp, sin amp)
    for (const auto& n : terms) {
        for (const auto& t : f.terms) {
            auto& slot = merged[t.frequency * n];
            (t.is_sine ? slot.second : slot.first) += t.amplitude;
        }
    }
    TrigPolySpec out;
    for (auto& [freq, amps] : merged) {
        if (amps.first != 0) out.terms.push_back(TrigTerm{amps.first, freq, false});
        if (amps.second != 0) out.terms.push_back(TrigTerm{amps.second, freq, true});
    }
    return out;
}

Rat trig_poly_variance(const TrigPolySpec& expanded) {
    std::map<Int, std::pair<Rat, Rat>> merged;
    for (const auto& t : expanded.terms) {
        auto& slot = merged[t.frequency];
        (t.is_sine ? slot.second : slot.first) += t.amplitude;
    }
    Rat var(0);
    for (const auto& [freq, amps] : merged) {
        var += amps.first * amps.first + amps.second * amps.second;
    }
    return var / 2;
}

Rat sigma_n_squared(const TrigPolySpec& f, const SequenceSpec& spec, long n) {
    return trig_poly_variance(expand_over_terms(f, sequence_prefix(n, spec)));
}

Rat reduced_block_variance(const TrigPolySpec& f, const ConstructionParams& params,
                           int block) {
    return trig_poly_variance(expand_over_terms(f, exact_block_terms(params, block, true)));
}

DecompositionReport decomposition_terms(const ConstructionParams& params, int block,
                                        const DyadicPoint& x) {
    const long d = params.degree;
    DecompositionReport rep;
    rep.error_bound = static_cast<double>(d) * static_cast<double>(d) * block;

    CompensatedSum direct, main_sum, drag, sine, err_total;
    for (const auto& sb : params.subblock_partition(block)) {
        const long lo = int_to_long(sb.lo, "sub-block bound");
        const long hi = int_to_long(sb.hi, "sub-block bound");
        const Int m(sb.label);

        // slow factors of the sub-block
        double s_sq = 0, s_sin = 0;
        for (long j = 0; j < d; ++j) {
            const Int mj = m << static_cast<unsigned long>(j);
            const double u = unit_value(frac_part_mul(mj, x));
            const double sv = std::sin(kPi * u);
            s_sq += sv * sv;
            s_sin += std::sin(kTwoPi * u);
        }

        CompensatedSum cos_part, sin_part;
        for (long k = lo; k <= hi; ++k) {
            const double u = shifted_unit(x, k);
            cos_part.add(std::cos(kTwoPi * u));
            sin_part.add(std::sin(kTwoPi * u));
            // direct sum of f(nu_k x), nu_k = 2^k + m
            const Int nu = pow2(static_cast<unsigned long>(k)) + m;
            for (long j = 0; j < d; ++j) {
                const double uu =
                    unit_value(frac_part_mul(nu << static_cast<unsigned long>(j), x));
                direct.add(std::cos(kTwoPi * uu));
            }
        }
        main_sum.add(static_cast<double>(d) * cos_part.value());
        drag.add(2.0 * s_sq * cos_part.value());
        sine.add(s_sin * sin_part.value());

        // re-indexing leftover: multiset difference of the frequency lists
        std::map<Int, long> leftover;
        for (long k = lo; k <= hi; ++k) {
            for (long j = 0; j < d; ++j) {
                leftover[pow2(static_cast<unsigned long>(k + j)) +
                         (m << static_cast<unsigned long>(j))] += 1;
                leftover[pow2(static_cast<unsigned long>(k)) +
                         (m << static_cast<unsigned long>(j))] -= 1;
            }
        }
        long count = 0;
        CompensatedSum err_m;
        for (const auto& [freq, cnt] : leftover) {
            if (cnt == 0) continue;
            count += std::labs(cnt);
            const double u = unit_value(frac_part_mul(freq, x));
            err_m.add(static_cast<double>(cnt) * std::cos(kTwoPi * u));
        }
        rep.error_term_counts.push_back(count);
        err_total.add(err_m.value());
    }

    rep.direct = direct.value();
    rep.main_term = main_sum.value();
    rep.drag_term = drag.value();
    rep.sine_term = sine.value();
    rep.error_term = err_total.value();
    rep.residual = std::fabs(rep.direct - (rep.main_term - rep.drag_term -
                                           rep.sine_term + rep.error_term));
    return rep;
}

long local_window_exponent(int block, const ConstructionParams& params) {
    const long d = params.degree;
    Int v(10 * d);
    mpz_mul_2exp(v.get_mpz_t(), v.get_mpz_t(), static_cast<mp_bitcnt_t>(d));
    v *= params.subblock_count(block);
    // smallest h with 2^h >= v; then 2^h < 2v, so both bounds hold
    return bit_length(v - 1);
}

WindowWeights window_weights(const Int& a, int block, const ConstructionParams& params) {
    const Int cell_bits_big = [&] {
        Int r;
        mpz_ui_pow_ui(r.get_mpz_t(), params.growth_base,
                      static_cast<unsigned long>(block - 1));
        return r;
    }();
    if (cell_bits_big > params.max_term_bits)
        throw TowerOverflow("window cell grid finer than the bit cap");
    const long cell_bits = int_to_long(cell_bits_big, "cell grid exponent");
    const long h = local_window_exponent(block, params);
    if (a < 0 || (cell_bits >= h && a > pow2(static_cast<unsigned long>(cell_bits - h))) ||
        (cell_bits < h && a > 0))
        throw std::invalid_argument("cell index outside the local window");

    WindowWeights w;
    const auto partition = params.subblock_partition(block);
    const DyadicPoint cell(a, cell_bits);
    for (const auto& sb : partition) {
        w.sizes.push_back(int_to_long(sb.hi - sb.lo + 1, "sub-block size"));
        double s = 0;
        for (long j = 0; j < params.degree; ++j) {
            const Int mj = Int(sb.label) << static_cast<unsigned long>(j);
            const double u = unit_value(frac_part_mul(mj, cell));
            const double sv = std::sin(kPi * u);
            s += sv * sv;
        }
        w.s.push_back(s);
    }
    if (a == 0) {
        w.degenerate = true;
        w.lambda.assign(w.s.size(), 0.0);
        return w;
    }
    double ssum = 0;
    for (std::size_t m = 0; m < w.s.size(); ++m)
        ssum += static_cast<double>(w.sizes[m]) * w.s[m] * w.s[m];
    w.normalizer = std::sqrt(ssum);
    for (double s : w.s) {
        const double l = s / w.normalizer;
        w.lambda.push_back(l);
        w.max_lambda = std::max(w.max_lambda, l);
    }
    return w;
}

std::vector<double> WindowWeights::per_index_lambda() const {
    std::vector<double> out;
    for (std::size_t m = 0; m < lambda.size(); ++m)
        out.insert(out.end(), static_cast<std::size_t>(sizes[m]), lambda[m]);
    return out;
}

}  // namespace lacunary
