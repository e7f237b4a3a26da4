#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "lacunary/diophantine.hpp"
#include "lacunary/stats.hpp"

using namespace lacunary;

namespace {

// calibrated once against the measured distance/lambda^(1/4) ratios
// (0.033..0.098 across equal, single and window weights); asserted stable
constexpr double kGaposhkinBudget = 0.15;

double gauss_density(double y) {
    return std::exp(-y * y / 2.0) / std::sqrt(2.0 * M_PI);
}

double adaptive_simpson(double a, double b, double fa, double fm, double fb,
                        double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = gauss_density(lm), frm = gauss_density(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::fabs(left + right - whole) < 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson(a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
           adaptive_simpson(m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

double normal_cdf_oracle(double t) {
    const double a = -10.0;
    const double fa = gauss_density(a), fb = gauss_density(t);
    const double m = 0.5 * (a + t), fm = gauss_density(m);
    const double whole = (t - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson(a, t, fa, fm, fb, whole, 1e-13, 40);
}

ConstructionParams params_r(long r, long d) {
    ConstructionParams p;
    p.growth_base = r;
    p.eps = Rat(1, 2);
    p.degree = d;
    return p;
}

}  // namespace

TEST_CASE("normal distribution function") {
    CHECK(normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(std::fabs(normal_cdf(1.0) - 0.8413447461) < 1e-9);
    CHECK(std::fabs(normal_cdf(1.0) - normal_cdf_oracle(1.0)) < 1e-10);
    CHECK(std::fabs(normal_cdf(-2.3) - normal_cdf_oracle(-2.3)) < 1e-10);
    for (double t = -6.0; t <= 6.0; t += 0.37) {
        CHECK(normal_cdf(t) + normal_cdf(-t) == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(normal_cdf(t) <= normal_cdf(t + 0.37));
    }
}

TEST_CASE("kolmogorov distance") {
    CHECK(kolmogorov_distance(std::vector<double>(50, 0.0), normal_cdf) ==
          doctest::Approx(0.5).epsilon(1e-12));

    // exact quantiles at (i - 1/2)/M sit within 1/(2M)
    const long m = 1000;
    std::vector<double> q;
    for (long i = 1; i <= m; ++i) {
        const double target = (static_cast<double>(i) - 0.5) / static_cast<double>(m);
        double lo = -10, hi = 10;
        for (int it = 0; it < 80; ++it) {
            const double mid = 0.5 * (lo + hi);
            (normal_cdf(mid) < target ? lo : hi) = mid;
        }
        q.push_back(0.5 * (lo + hi));
    }
    CHECK(kolmogorov_distance(q, normal_cdf) <= 0.5 / static_cast<double>(m) + 1e-9);

    // order invariance
    std::vector<double> v = {0.3, -1.2, 0.7, 2.2, -0.4};
    std::vector<double> w = {2.2, 0.7, 0.3, -0.4, -1.2};
    CHECK(kolmogorov_distance(v, normal_cdf) == kolmogorov_distance(w, normal_cdf));

    // counter-rng normal draws land at Dvoretzky-Kiefer-Wolfowitz scale
    std::vector<double> draws(100000);
    for (long i = 0; i < 100000; ++i) {
        const double u1 =
            static_cast<double>(counter_rng_word(99, i, 0) >> 11) * 0x1p-53 + 0x1p-54;
        const double u2 = static_cast<double>(counter_rng_word(99, i, 1) >> 11) * 0x1p-53;
        draws[static_cast<std::size_t>(i)] =
            std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }
    CHECK(kolmogorov_distance(draws, normal_cdf) <= 0.01);
}

TEST_CASE("sample batches are reproducible and uniform-ish") {
    SampleBatch a{42, 10, 257};
    SampleBatch b{42, 10, 257};
    for (long i = 0; i < 10; ++i) {
        CHECK(a.point(i) == b.point(i));
        CHECK(a.point(i).numerator >= 0);
        CHECK(bit_length(a.point(i).numerator) <= 257);
    }
    SampleBatch c{43, 10, 257};
    CHECK(a.point(0) != c.point(0));
}

TEST_CASE("clt experiment basics") {
    const auto f1 = TrigPolySpec::cosine_powers(1);
    const auto g2 = SequenceSpec::geometric(2);
    std::vector<double> samples;
    const auto rep = clt_experiment(f1, g2, 16, 10000, 5, 1, &samples);
    CHECK(rep.stats.at("sigma_squared") == doctest::Approx(8.0));
    CHECK(rep.stats.at("kolmogorov_distance") < 0.08);
    CHECK(rep.stats.at("kolmogorov_distance") > 0.001);
    REQUIRE(samples.size() == 10000);

    // same seed: identical bytes; worker count cannot matter
    const auto again = clt_experiment(f1, g2, 16, 10000, 5, 1);
    const auto threaded = clt_experiment(f1, g2, 16, 10000, 5, 3);
    CHECK(rep.to_json() == again.to_json());
    CHECK(rep.to_json() == threaded.to_json());
    const auto other_seed = clt_experiment(f1, g2, 16, 10000, 6, 1);
    CHECK(other_seed.to_json() != rep.to_json());

    // report serialization round-trips
    CHECK(ExperimentReport::from_json(rep.to_json()) == rep);
}

TEST_CASE("erdos-fortet mixture reference") {
    CHECK(erdos_fortet_mixture_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(erdos_fortet_mixture_cdf(-6.0) < 1e-3);
    CHECK(erdos_fortet_mixture_cdf(6.0) > 1 - 1e-3);
    const GriddedCdf mix(erdos_fortet_mixture_cdf, -10, 10, 2001);
    double worst = 0;
    for (double t = -6; t <= 6; t += 0.003)
        worst = std::max(worst, std::fabs(mix(t) - normal_cdf(t)));
    // the mixture is genuinely non-normal; measured gap 0.0602
    CHECK(worst > 0.055);
    CHECK(worst < 0.065);
}

TEST_CASE("gaposhkin experiments") {
    // single weight: the law of sqrt(2) cos(2 pi x) is the arcsine law
    const auto single = gaposhkin_experiment({1.0}, {1}, 50000, 7);
    double arcsine_gap = 0;
    for (double t = -1.6; t <= 1.6; t += 1e-4) {
        const double a = t <= -std::sqrt(2.0) ? 0.0
                         : t >= std::sqrt(2.0)
                             ? 1.0
                             : 1.0 - std::acos(t / std::sqrt(2.0)) / M_PI;
        arcsine_gap = std::max(arcsine_gap, std::fabs(a - normal_cdf(t)));
    }
    CHECK(std::fabs(single.stats.at("kolmogorov_distance") - arcsine_gap) < 0.01);

    // equal weights: distance shrinks like the fourth root of the max weight
    std::vector<double> w16(16, 0.25), w64(64, 0.125);
    std::vector<long> e16, e64;
    for (long k = 1; k <= 16; ++k) e16.push_back(k);
    for (long k = 1; k <= 64; ++k) e64.push_back(k);
    const auto r16 = gaposhkin_experiment(w16, e16, 50000, 7);
    const auto r64 = gaposhkin_experiment(w64, e64, 50000, 7);
    CHECK(r16.stats.at("kolmogorov_distance") <=
          kGaposhkinBudget * std::pow(16.0, -1.0 / 8.0));
    CHECK(r64.stats.at("distance_over_lambda_quarter") <= kGaposhkinBudget);
    CHECK(r16.stats.at("distance_over_lambda_quarter") <= kGaposhkinBudget);
    CHECK(single.stats.at("distance_over_lambda_quarter") <= kGaposhkinBudget);

    // window weights from the construction, same budget
    const auto p = params_r(4, 2);
    const auto ww = window_weights(1, 3, p);
    std::vector<long> exps;
    for (const auto& sb : p.subblock_partition(3))
        for (Int k = sb.lo; k <= sb.hi; ++k) exps.push_back(mpz_get_si(k.get_mpz_t()));
    const auto rw = gaposhkin_experiment(ww.per_index_lambda(), exps, 50000, 7);
    CHECK(rw.stats.at("distance_over_lambda_quarter") <= kGaposhkinBudget);

    CHECK_THROWS_AS(gaposhkin_experiment({0.9, 0.1}, {1, 2}, 100, 1),
                    WeightsNotNormalized);
}

TEST_CASE("erdos-fortet identity") {
    // x = 0: both sides reduce to 2N
    CHECK(erdos_fortet_identity_residual(12, DyadicPoint(0, 8)) < 1e-12);
    // x = 1/2: both sides vanish
    CHECK(erdos_fortet_identity_residual(12, DyadicPoint(1, 1)) < 1e-12);
    CHECK(erdos_fortet_identity_max_residual(20, 100, 3) <= 1e-9);
}

TEST_CASE("lil ratio scan") {
    // an all-cancelling test function gives identically zero ratios
    TrigPolySpec zero;
    zero.terms.push_back(TrigTerm{Rat(0), Int(1), false});
    const auto g2 = SequenceSpec::geometric(2);
    const auto rz = lil_ratio_scan(zero, g2, {8, 64}, 20, 1);
    CHECK(rz.max_ratio[0] == 0.0);
    CHECK(rz.max_ratio[1] == 0.0);

    // running max is nondecreasing by construction
    const auto f1 = TrigPolySpec::cosine_powers(1);
    const auto r = lil_ratio_scan(f1, g2, {16, 64, 256, 1024}, 50, 2);
    for (std::size_t j = 1; j < r.running_max.size(); ++j)
        CHECK(r.running_max[j] >= r.running_max[j - 1]);
    for (double v : r.max_ratio) CHECK(std::isfinite(v));

    CHECK_THROWS_AS(lil_ratio_scan(f1, g2, {2}, 5, 1), std::invalid_argument);
}

TEST_CASE("lil ratios near the iterated-logarithm scale" * doctest::timeout(120)) {
    // one full-depth scan: 2^20 terms, 200 sample points
    const auto f1 = TrigPolySpec::cosine_powers(1);
    const auto g2 = SequenceSpec::geometric(2);
    const auto r = lil_ratio_scan(f1, g2, {1L << 20}, 200, 1);
    CHECK(r.max_ratio[0] > 0.25);
    CHECK(r.max_ratio[0] < 1.1);
    // reference constant for pure cosine sums is 1/sqrt(2) = 0.707
    CHECK(r.mean_ratio[0] > 0.1);
    CHECK(r.mean_ratio[0] < 0.71);
}

TEST_CASE("erdos-fortet lil bound at a generic point") {
    const auto fe = TrigPolySpec::erdos_fortet();
    const auto ef = SequenceSpec::erdos_fortet();
    std::vector<long> ns;
    for (long n = 1024; n <= (1L << 20); n *= 4) ns.push_back(n);
    SampleBatch b{12345, 1, (1L << 20) + 2 + 64};
    const DyadicPoint x = b.point(0);
    const auto r = lil_ratio_scan(fe, ef, ns, 1, 0, 1, x);
    const double bound = std::fabs(2.0 * std::cos(M_PI * unit_value(x))) + 0.5;
    CHECK(r.running_max.back() <= bound);
}

TEST_CASE("block large-value threshold formula") {
    const LargeValueParams lv{3, 8, Rat(1, 4), 36};
    const double r3 = std::pow(36.0, 3);
    const double expect =
        (8.0 * 0.5 / 2.0 - 2.0) * std::sqrt(2.0 * r3 * std::log(std::log(r3))) -
        2.0 * 64.0 * 3.0 - 2.0;
    CHECK(lv.threshold() == doctest::Approx(expect).epsilon(1e-12));
    CHECK(lv.measure_lower_bound() ==
          doctest::Approx(std::pow(3.0, -7.0 / 8.0) - 2.0 / 9.0).epsilon(1e-12));
}

TEST_CASE("block large-value probability monitoring") {
    const auto p = params_r(4, 4);
    const auto rep = block_large_value_probability(p, 3, 2000, 13);
    const double emp = rep.stats.at("empirical_measure");
    CHECK(emp >= 0.0);
    CHECK(emp <= 1.0);
    CHECK(rep.flags.at("within_unit_interval"));
    const auto again = block_large_value_probability(p, 3, 2000, 13, 2);
    CHECK(rep.to_json() == again.to_json());
}

TEST_CASE("local variance amplification") {
    const auto p = params_r(4, 4);
    const auto rep = local_variance_amplification(p, 3, 2000, 11);
    CHECK(rep.stats.at("global_second_moment") == doctest::Approx(131.0));
    CHECK(rep.stats.at("amplification_ratio") >= 2.0);  // d/2 with d = 4
    CHECK(rep.flags.at("gained_half_degree"));
}

TEST_CASE("block periodicity") {
    const auto p = params_r(4, 2);
    for (int i = 2; i <= 4; ++i) {
        CHECK(block_periodicity_residual(p, i, 8, 5, EvalPath::Exact) == 0.0);
        CHECK(block_periodicity_residual(p, i, 8, 5, EvalPath::Windowed) <= 1e-9);
        // shifting by half a period must break the invariance
        CHECK(block_periodicity_residual(p, i, 8, 5, EvalPath::Exact, true) > 0.1);
    }
    auto pd = params_r(9, 2);
    pd.tower.rule = TowerRule::DoubleExponential;
    CHECK(block_periodicity_residual(pd, 2, 3, 5, EvalPath::Exact) == 0.0);
    CHECK_THROWS_AS(block_periodicity_residual(pd, 3, 3, 5, EvalPath::Exact),
                    TowerOverflow);
}

TEST_CASE("sample csv dump shape") {
    SampleBatch b{1, 3, 64};
    const auto csv = samples_csv(b, {0.5, -0.25, 1.0}, {"demo = 1"});
    CHECK(csv.find("# demo = 1\n") == 0);
    CHECK(csv.find("sample_index,x_numerator,x_precision,value\n") != std::string::npos);
    CHECK(csv.find("\n0,") != std::string::npos);
}
