#include "lacunary/stats.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"

namespace lacunary {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kSqrt2 = 1.4142135623730950488016887242097;
}  // namespace

double normal_cdf(double t) { return 0.5 * std::erfc(-t / kSqrt2); }

double kolmogorov_distance(std::vector<double> values,
                           const std::function<double(double)>& cdf) {
    if (values.empty()) throw std::invalid_argument("no sample values");
    std::sort(values.begin(), values.end());
    const double m = static_cast<double>(values.size());
    double dist = 0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double ref = cdf(values[i]);
        dist = std::max(dist, ref - static_cast<double>(i) / m);
        dist = std::max(dist, static_cast<double>(i + 1) / m - ref);
    }
    return dist;
}

std::uint64_t counter_rng_word(std::uint64_t seed, std::uint64_t stream,
                               std::uint64_t counter) {
    auto mix = [](std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xBF58476D1CE4E5B9ULL;
        z ^= z >> 27;
        z *= 0x94D049BB133111EBULL;
        z ^= z >> 31;
        return z;
    };
    std::uint64_t h = mix(seed + 0x9E3779B97F4A7C15ULL);
    h = mix(h ^ (stream + 1) * 0xD1B54A32D192ED03ULL);
    h = mix(h ^ (counter + 1) * 0x8CB92BA72F3D8DD7ULL);
    return h;
}

DyadicPoint SampleBatch::point(long index) const {
    const long words = (precision_bits + 63) / 64;
    std::vector<std::uint64_t> buf(static_cast<std::size_t>(words));
    for (long w = 0; w < words; ++w)
        buf[static_cast<std::size_t>(w)] =
            counter_rng_word(seed, static_cast<std::uint64_t>(index),
                             static_cast<std::uint64_t>(w));
    Int x;
    mpz_import(x.get_mpz_t(), buf.size(), -1, sizeof(std::uint64_t), 0, 0,
               buf.data());
    return DyadicPoint(std::move(x), precision_bits);  // reduces mod 2^P
}

void parallel_for_index(long count, int threads,
                        const std::function<void(long)>& fn) {
    if (threads <= 1 || count < 2) {
        for (long i = 0; i < count; ++i) fn(i);
        return;
    }
    const int t = std::min<long>(threads, count);
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(t));
    for (int w = 0; w < t; ++w) {
        const long lo = count * w / t;
        const long hi = count * (w + 1) / t;
        pool.emplace_back([lo, hi, &fn] {
            for (long i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

std::string ExperimentReport::to_json() const {
    nlohmann::json j;
    j["name"] = name;
    j["version"] = kArtifactVersion;
    j["seed"] = seed;
    j["params"] = params;
    j["stats"] = stats;
    j["flags"] = flags;
    return j.dump(2) + "\n";
}

ExperimentReport ExperimentReport::from_json(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    ExperimentReport r;
    r.name = j.at("name").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.params = j.at("params").get<std::map<std::string, std::string>>();
    r.stats = j.at("stats").get<std::map<std::string, double>>();
    r.flags = j.at("flags").get<std::map<std::string, bool>>();
    return r;
}

std::string samples_csv(const SampleBatch& batch, const std::vector<double>& values,
                        const std::vector<std::string>& header_comments) {
    std::ostringstream os;
    for (const auto& line : header_comments) os << "# " << line << "\n";
    os << "sample_index,x_numerator,x_precision,value\n";
    char buf[64];
    for (std::size_t i = 0; i < values.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", values[i]);
        os << i << ',' << batch.point(static_cast<long>(i)).numerator << ','
           << batch.precision_bits << ',' << buf << "\n";
    }
    return os.str();
}

ExperimentReport clt_experiment(const TrigPolySpec& f, const SequenceSpec& spec,
                                long n, long m, std::uint64_t seed, int threads,
                                std::vector<double>* samples_out) {
    if (m < 1) throw std::invalid_argument("need at least one sample");
    const PreparedSum sum = PreparedSum::over_prefix(f, spec, n);
    const Rat sigma2 = sigma_n_squared(f, spec, n);
    const double norm = std::sqrt(sigma2.get_d());
    if (norm == 0) throw std::invalid_argument("degenerate variance");

    SampleBatch batch{seed, m, sum.recommended_bits()};
    std::vector<double> values(static_cast<std::size_t>(m));
    parallel_for_index(m, threads, [&](long i) {
        values[static_cast<std::size_t>(i)] = sum.value(batch.point(i)) / norm;
    });
    const double dist = kolmogorov_distance(values, normal_cdf);

    ExperimentReport rep;
    rep.name = "clt";
    rep.seed = seed;
    rep.params["sequence"] = spec.kind_name();
    rep.params["N"] = std::to_string(n);
    rep.params["M"] = std::to_string(m);
    rep.params["precision_bits"] = std::to_string(batch.precision_bits);
    rep.stats["sigma_squared"] = sigma2.get_d();
    rep.stats["normalizer"] = norm;
    rep.stats["kolmogorov_distance"] = dist;
    if (samples_out) *samples_out = std::move(values);
    return rep;
}

double erdos_fortet_mixture_cdf(double t) {
    constexpr int kNodes = 10000;
    double acc = 0;
    for (int j = 0; j < kNodes; ++j) {
        const double u = (j + 0.5) / kNodes;
        const double scale = kSqrt2 * std::fabs(std::cos(M_PI * u));
        acc += scale == 0 ? (t >= 0 ? 1.0 : 0.0) : normal_cdf(t / scale);
    }
    return acc / kNodes;
}

GriddedCdf::GriddedCdf(const std::function<double(double)>& cdf, double lo,
                       double hi, int points)
    : lo_(lo), hi_(hi), step_((hi - lo) / (points - 1)) {
    values_.reserve(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) values_.push_back(cdf(lo + step_ * i));
}

double GriddedCdf::operator()(double t) const {
    if (t <= lo_) return values_.front();
    if (t >= hi_) return values_.back();
    const double pos = (t - lo_) / step_;
    const std::size_t i = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(i);
    return values_[i] * (1.0 - frac) + values_[i + 1] * frac;
}

ExperimentReport gaposhkin_experiment(const std::vector<double>& weights,
                                      const std::vector<long>& exponents, long m,
                                      std::uint64_t seed, int threads) {
    if (weights.empty() || weights.size() != exponents.size())
        throw std::invalid_argument("weights and exponents must align");
    double sumsq = 0, lambda_max = 0;
    long max_exp = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        sumsq += weights[i] * weights[i];
        lambda_max = std::max(lambda_max, weights[i]);
        max_exp = std::max(max_exp, exponents[i]);
    }
    if (std::fabs(sumsq - 1.0) > 1e-9)
        throw WeightsNotNormalized("sum of squared weights is " +
                                   std::to_string(sumsq));

    SampleBatch batch{seed, m, max_exp + 64};
    std::vector<double> values(static_cast<std::size_t>(m));
    parallel_for_index(m, threads, [&](long i) {
        const DyadicPoint x = batch.point(i);
        CompensatedSum acc;
        for (std::size_t k = 0; k < weights.size(); ++k) {
            const double u = shifted_unit(x, exponents[k]);
            acc.add(weights[k] * std::cos(kTwoPi * u));
        }
        values[static_cast<std::size_t>(i)] = kSqrt2 * acc.value();
    });
    const double dist = kolmogorov_distance(values, normal_cdf);

    ExperimentReport rep;
    rep.name = "gaposhkin";
    rep.seed = seed;
    rep.params["weight_count"] = std::to_string(weights.size());
    rep.params["M"] = std::to_string(m);
    rep.stats["lambda_max"] = lambda_max;
    rep.stats["kolmogorov_distance"] = dist;
    rep.stats["distance_over_lambda_quarter"] =
        dist / std::pow(lambda_max, 0.25);
    return rep;
}

LilScanResult lil_ratio_scan(const TrigPolySpec& f, const SequenceSpec& spec,
                             std::vector<long> lengths, long m, std::uint64_t seed,
                             int threads,
                             const std::optional<DyadicPoint>& fixed_point) {
    if (lengths.empty()) throw std::invalid_argument("no snapshot lengths");
    std::sort(lengths.begin(), lengths.end());
    for (long n : lengths)
        if (n < 3) throw std::invalid_argument("log log N needs N >= 3");
    const long max_n = lengths.back();
    const PreparedSum sum = PreparedSum::over_prefix(f, spec, max_n);

    const long samples = fixed_point ? 1 : m;
    SampleBatch batch{seed, samples, sum.recommended_bits()};
    std::vector<std::vector<double>> ratios(
        static_cast<std::size_t>(samples),
        std::vector<double>(lengths.size(), 0.0));
    std::vector<std::vector<double>> sums(
        static_cast<std::size_t>(samples),
        std::vector<double>(lengths.size(), 0.0));
    std::vector<Int> numerators(static_cast<std::size_t>(samples));
    parallel_for_index(samples, threads, [&](long i) {
        const DyadicPoint x = fixed_point ? *fixed_point : batch.point(i);
        numerators[static_cast<std::size_t>(i)] = x.numerator;
        std::vector<double> snap;
        sum.cumulative(x, lengths, snap);
        sums[static_cast<std::size_t>(i)] = snap;
        for (std::size_t j = 0; j < lengths.size(); ++j) {
            const double n = static_cast<double>(lengths[j]);
            ratios[static_cast<std::size_t>(i)][j] =
                std::fabs(snap[j]) / std::sqrt(2.0 * n * std::log(std::log(n)));
        }
    });

    LilScanResult res;
    res.numerators = std::move(numerators);
    res.precision_bits = fixed_point ? fixed_point->bits : batch.precision_bits;
    res.sums = std::move(sums);
    res.lengths = lengths;
    res.max_ratio.assign(lengths.size(), 0.0);
    res.mean_ratio.assign(lengths.size(), 0.0);
    for (std::size_t j = 0; j < lengths.size(); ++j) {
        double mx = 0, mean = 0;
        for (long i = 0; i < samples; ++i) {
            const double r = ratios[static_cast<std::size_t>(i)][j];
            mx = std::max(mx, r);
            mean += r;
        }
        res.max_ratio[j] = mx;
        res.mean_ratio[j] = mean / static_cast<double>(samples);
    }
    res.running_max.assign(lengths.size(), 0.0);
    double run = 0;
    for (std::size_t j = 0; j < lengths.size(); ++j) {
        run = std::max(run, res.max_ratio[j]);
        res.running_max[j] = run;
    }

    ExperimentReport rep;
    rep.name = "lil-ratio-scan";
    rep.seed = seed;
    rep.params["sequence"] = spec.kind_name();
    rep.params["M"] = std::to_string(samples);
    rep.params["N_max"] = std::to_string(max_n);
    rep.params["fixed_point"] = fixed_point ? "yes" : "no";
    rep.stats["max_ratio"] = res.running_max.back();
    rep.stats["final_mean_ratio"] = res.mean_ratio.back();
    res.report = std::move(rep);
    return res;
}

std::string LilScanResult::trace_csv(
    const std::vector<std::string>& header_comments) const {
    std::ostringstream os;
    for (const auto& line : header_comments) os << "# " << line << "\n";
    os << "x_numerator,x_precision,N,value\n";
    char buf[64];
    for (std::size_t i = 0; i < sums.size(); ++i) {
        for (std::size_t j = 0; j < lengths.size(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", sums[i][j]);
            os << numerators[i] << ',' << precision_bits << ',' << lengths[j] << ','
               << buf << "\n";
        }
    }
    return os.str();
}

double erdos_fortet_identity_residual(long n, const DyadicPoint& x) {
    // Everything is reduced exactly; with one extra bit the half-integer
    // frequencies (2^k - 3/2) become the integers 2^(k+1) - 3 over 2^(P+1).
    const DyadicPoint half(x.numerator, x.bits + 1);  // same numerator = x/2
    CompensatedSum lhs, paired;
    for (long k = 1; k <= n; ++k) {
        const Int nk = pow2(static_cast<unsigned long>(k)) - 1;
        lhs.add(std::cos(kTwoPi * unit_value(frac_part_mul(nk, x))));
        lhs.add(std::cos(kTwoPi * unit_value(frac_part_mul(2 * nk, x))));
        const Int doubled = pow2(static_cast<unsigned long>(k + 1)) - 3;
        paired.add(std::cos(kTwoPi * unit_value(frac_part_mul(doubled, half))));
    }
    const double boundary = std::cos(
        kTwoPi * unit_value(frac_part_mul(pow2(static_cast<unsigned long>(n + 1)) - 2, x)));
    const double rhs =
        2.0 * std::cos(M_PI * unit_value(x)) * paired.value() + boundary - 1.0;
    return std::fabs(lhs.value() - rhs);
}

double erdos_fortet_identity_max_residual(long n, long trials, std::uint64_t seed) {
    SampleBatch batch{seed, trials, n + 2 + 64};
    double worst = 0;
    for (long i = 0; i < trials; ++i)
        worst = std::max(worst, erdos_fortet_identity_residual(n, batch.point(i)));
    return worst;
}

double LargeValueParams::threshold() const {
    const double d = static_cast<double>(degree);
    const double e = eps.get_d();
    const double r_pow = std::pow(static_cast<double>(growth_base), block);
    return (d * std::sqrt(e) / 2.0 - 2.0) *
               std::sqrt(2.0 * r_pow * std::log(std::log(r_pow))) -
           2.0 * d * d * block - 2.0;
}

double LargeValueParams::measure_lower_bound() const {
    const double e = eps.get_d();
    const double i = static_cast<double>(block);
    return std::pow(i, -1.0 + e / 2.0) - 2.0 * std::pow(i, -2.0);
}

ExperimentReport block_large_value_probability(const ConstructionParams& params,
                                               int block, long m,
                                               std::uint64_t seed, int threads) {
    if (block < 2) throw std::invalid_argument("need block >= 2");
    const TrigPolySpec f = TrigPolySpec::cosine_powers(params.degree);
    const PreparedSum sum = PreparedSum::over_block(f, params, block, /*reduced=*/true);
    const LargeValueParams lv{block, params.degree, params.eps, params.growth_base};
    const double level = lv.threshold();

    SampleBatch batch{seed, m, sum.recommended_bits()};
    std::vector<unsigned char> hit(static_cast<std::size_t>(m), 0);
    parallel_for_index(m, threads, [&](long i) {
        hit[static_cast<std::size_t>(i)] =
            std::fabs(sum.value(batch.point(i))) >= level ? 1 : 0;
    });
    long hits = 0;
    for (unsigned char h : hit) hits += h;
    const double empirical = static_cast<double>(hits) / static_cast<double>(m);

    ExperimentReport rep;
    rep.name = "block-large-value";
    rep.seed = seed;
    rep.params["block"] = std::to_string(block);
    rep.params["degree"] = std::to_string(params.degree);
    rep.params["growth_base"] = std::to_string(params.growth_base);
    rep.params["eps"] = params.eps.get_str();
    rep.params["M"] = std::to_string(m);
    rep.stats["threshold"] = level;
    rep.stats["empirical_measure"] = empirical;
    rep.stats["asymptotic_lower_bound"] = lv.measure_lower_bound();
    rep.flags["within_unit_interval"] = empirical >= 0.0 && empirical <= 1.0;
    return rep;
}

ExperimentReport local_variance_amplification(const ConstructionParams& params,
                                              int block, long m, std::uint64_t seed,
                                              int threads) {
    const TrigPolySpec f = TrigPolySpec::cosine_powers(params.degree);
    const PreparedSum sum = PreparedSum::over_block(f, params, block, /*reduced=*/true);
    const double global = reduced_block_variance(f, params, block).get_d();
    const long h = local_window_exponent(block, params);
    const long bits = sum.recommended_bits();

    // x uniform on the window [0, 2^-h): draw bits-h low bits, read at full
    // precision
    SampleBatch low{seed, m, bits - h};
    std::vector<double> sq(static_cast<std::size_t>(m));
    parallel_for_index(m, threads, [&](long i) {
        const DyadicPoint x(low.point(i).numerator, bits);
        const double v = sum.value(x);
        sq[static_cast<std::size_t>(i)] = v * v;
    });
    CompensatedSum acc;
    for (double v : sq) acc.add(v);
    const double windowed = acc.value() / static_cast<double>(m);

    ExperimentReport rep;
    rep.name = "local-variance";
    rep.seed = seed;
    rep.params["block"] = std::to_string(block);
    rep.params["degree"] = std::to_string(params.degree);
    rep.params["growth_base"] = std::to_string(params.growth_base);
    rep.params["window_exponent"] = std::to_string(h);
    rep.params["M"] = std::to_string(m);
    rep.stats["windowed_second_moment"] = windowed;
    rep.stats["global_second_moment"] = global;
    rep.stats["amplification_ratio"] = windowed / global;
    rep.flags["gained_half_degree"] =
        windowed / global >= static_cast<double>(params.degree) / 2.0;
    return rep;
}

double block_periodicity_residual(const ConstructionParams& params, int block,
                                  long trials, std::uint64_t seed, EvalPath path,
                                  bool half_shift) {
    const TrigPolySpec f = TrigPolySpec::cosine_powers(params.degree);
    const Int texp_big = params.tower_exponent(block);
    const Int need = texp_big + params.block_hi(block) + 2;
    if (need > params.max_term_bits)
        throw TowerOverflow("periodicity check needs materializable terms");
    const long texp = mpz_get_si(texp_big.get_mpz_t());
    const long bits =
        mpz_get_si(Int(need).get_mpz_t()) + 64;

    // the period of the block sum is 2^-T(i); half_shift probes 2^-(T(i)+1)
    Int step = pow2(static_cast<unsigned long>(bits - texp - (half_shift ? 1 : 0)));
    SampleBatch batch{seed, trials, bits};
    double worst = 0;
    for (long i = 0; i < trials; ++i) {
        const DyadicPoint x = batch.point(i);
        const DyadicPoint y(x.numerator + step, bits);
        const double a = block_sum(f, params, block, x, path);
        const double b = block_sum(f, params, block, y, path);
        worst = std::max(worst, std::fabs(a - b));
    }
    return worst;
}

}  // namespace lacunary
