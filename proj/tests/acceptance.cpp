// Acceptance suite: runs every gate criterion at its stated tolerance and
// prints one pass/fail line per criterion.  Exit status is the number of
// failed criteria (0 = all green).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "lacunary/diophantine.hpp"
#include "lacunary/dyadic.hpp"
#include "lacunary/sequence.hpp"
#include "lacunary/stats.hpp"

using namespace lacunary;

namespace {

struct Gate {
    int failures = 0;

    void report(int id, const std::string& what, bool ok, const std::string& detail) {
        std::printf("[%s] criterion %2d: %s (%s)\n", ok ? "PASS" : "FAIL", id,
                    what.c_str(), detail.c_str());
        std::fflush(stdout);
        if (!ok) ++failures;
    }
};


Rat canonical_rat(long num, long den) {
    Rat r(num, den);
    r.canonicalize();
    return r;
}

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

ConstructionParams params_r(long r, long d) {
    ConstructionParams p;
    p.growth_base = r;
    p.eps = Rat(1, 2);
    p.degree = d;
    return p;
}

char buf[512];

}  // namespace

int main() {
    Gate gate;
    const auto ef_spec = SequenceSpec::erdos_fortet();
    const auto g2_spec = SequenceSpec::geometric(2);
    const auto paper4 = SequenceSpec::paper(params_r(4, 2));

    // 1: L(N,1,2,1) = N-1 on n_k = 2^k - 1, exact, under one second
    {
        const auto t0 = std::chrono::steady_clock::now();
        bool ok = true;
        for (long n : {5L, 10L, 100L, 1000L}) {
            const auto prefix = sequence_prefix(n, ef_spec);
            ok = ok && count_fast(prefix, {1, 2, 1}) == n - 1 &&
                 count_naive(prefix, {1, 2, 1}) == n - 1;
        }
        const double dt = seconds_since(t0);
        std::snprintf(buf, sizeof buf, "exact at N=5,10,100,1000; %.2fs", dt);
        gate.report(1, "Erdos-Fortet solution count N-1", ok && dt < 1.0, buf);
    }

    // 2: diagonal count L(N,a,a,0) = N
    {
        bool ok = true;
        for (long n : {1L, 10L, 137L, 1000L}) {
            const auto prefix = sequence_prefix(n, ef_spec);
            for (long a : {1L, 2L, 3L})
                ok = ok && count_fast(prefix, {Int(a), Int(a), 0}) == n &&
                     (n > 300 || count_naive(prefix, {Int(a), Int(a), 0}) == n);
        }
        gate.report(2, "diagonal count L(N,a,a,0) = N", ok, "a = 1,2,3; N up to 1000");
    }

    // 3: fast counter vs naive oracle on 200 randomized cases, N <= 2000
    {
        const auto t0 = std::chrono::steady_clock::now();
        const auto paper9 = SequenceSpec::paper(params_r(9, 2));
        long mismatches = 0;
        for (long trial = 0; trial < 200; ++trial) {
            const long n = 100 + static_cast<long>(counter_rng_word(301, trial, 0) % 1901);
            const SequenceSpec& spec = trial % 5 == 0   ? g2_spec
                                       : trial % 5 == 1 ? SequenceSpec::geometric(3)
                                       : trial % 5 == 2 ? ef_spec
                                       : trial % 5 == 3 ? paper4
                                                        : paper9;
            const auto prefix = sequence_prefix(n, spec);
            const Int a(1 + counter_rng_word(303, trial, 1) % 4);
            const Int b(1 + counter_rng_word(303, trial, 2) % 4);
            Int c;
            switch (trial % 4) {
                case 0: c = counter_rng_word(303, trial, 3) % 1000; break;
                case 1: c = 0; break;
                case 2: {
                    const std::size_t k = counter_rng_word(303, trial, 4) % prefix.size();
                    const std::size_t l = counter_rng_word(303, trial, 5) % prefix.size();
                    c = a * prefix[k] - b * prefix[l];
                    if (c < 0) c = -c;
                    break;
                }
                default: {
                    if (spec.kind == SequenceSpec::Kind::Paper) {
                        const int i = 2 + static_cast<int>(counter_rng_word(303, trial, 6) % 2);
                        const long m = 1 + static_cast<long>(counter_rng_word(303, trial, 7) %
                                                             spec.params.subblock_count(i));
                        c = special_rhs(i, m, b, 1, spec.params);
                    } else {
                        c = counter_rng_word(303, trial, 8) % 64;
                    }
                }
            }
            if (count_fast(prefix, {a, b, c}) != count_naive(prefix, {a, b, c}))
                ++mismatches;
        }
        const double dt = seconds_since(t0);
        std::snprintf(buf, sizeof buf, "%ld mismatches in 200 cases; %.1fs", mismatches, dt);
        gate.report(3, "hash counter equals the naive oracle", mismatches == 0 && dt < 30.0,
                    buf);
    }

    // 4: structural in-block counts, exact, with zero sporadic remainder
    {
        const auto t0 = std::chrono::steady_clock::now();
        const auto& p = paper4.params;
        bool ok = true;
        long remainder_at_2 = 0;
        long worst_remainder = 0;
        for (int i = 2; i <= 4; ++i) {
            std::vector<Int> block_terms;
            for (Int k = p.block_lo(i); k <= p.block_hi(i); ++k)
                block_terms.push_back(term_value(k, paper4));
            const auto partition = p.subblock_partition(i);
            for (const auto& sb : partition) {
                const Int c = special_rhs(i, sb.label, 1, 1, p);
                const long structural =
                    mpz_get_si(Int(sb.hi - sb.lo + 1 - 1).get_mpz_t());
                const long actual = count_naive(block_terms, {2, 1, c});
                const long remainder = actual - structural;
                ok = ok && remainder >= 0;
                if (i == 2) remainder_at_2 = std::max(remainder_at_2, remainder);
                worst_remainder = std::max(worst_remainder, remainder);
            }
        }
        ok = ok && worst_remainder <= 4 * remainder_at_2;
        const double dt = seconds_since(t0);
        std::snprintf(buf, sizeof buf,
                      "remainder at i=2: %ld, worst: %ld (cap 4x = %ld); %.1fs",
                      remainder_at_2, worst_remainder, 4 * remainder_at_2, dt);
        gate.report(4, "in-block count = sub-block size - 1 for i = 2,3,4",
                    ok && dt < 120.0, buf);
    }

    // 5: bounded profile for the construction; growing profile for Erdos-Fortet
    {
        const auto rows = profile_over_blocks(paper4, 2, 1, 1, 5);
        double worst = 0;
        for (const auto& r : rows) worst = std::max(worst, r.ratio);
        const bool bounded = worst <= 2.0 * rows[1].ratio;

        const auto ef_rows = profile_over_lengths(ef_spec, 1, 2, {10, 100, 1000}, Rat(1, 2));
        const double growth = ef_rows[2].ratio / ef_rows[0].ratio;
        const bool doubles = growth >= 2.0;

        std::snprintf(buf, sizeof buf,
                      "max ratio %.4f vs cap %.4f; contrast growth %.4f needs >= 2",
                      worst, 2.0 * rows[1].ratio, growth);
        gate.report(5, "normalized solution-count profile", bounded && doubles, buf);
    }

    // 6: differences of 2^k are pairwise distinct
    {
        const auto prefix = sequence_prefix(200, g2_spec);
        const auto spectrum = difference_spectrum(prefix, 1, 1);
        long worst = 0;
        for (const auto& [c, cnt] : spectrum.counts)
            if (c >= 1) worst = std::max(worst, cnt);
        std::snprintf(buf, sizeof buf, "max count over c >= 1 is %ld", worst);
        gate.report(6, "every positive difference of 2^k appears once", worst <= 1, buf);
    }

    // 7: exact identity suite
    {
        const auto t0 = std::chrono::steady_clock::now();
        const double ef_res = erdos_fortet_identity_max_residual(20, 100, 7);
        bool ok = ef_res <= 1e-9;
        double worst_res = ef_res, worst_excess = 0;
        for (long d : {1L, 2L, 4L}) {
            const auto p = params_r(4, d);
            for (int i = 1; i <= 5; ++i) {
                SampleBatch b{static_cast<std::uint64_t>(1000 * d + i), 100, 1500};
                for (long t = 0; t < 100; ++t) {
                    const auto rep = decomposition_terms(p, i, b.point(t));
                    worst_res = std::max(worst_res, rep.residual);
                    worst_excess = std::max(worst_excess,
                                            std::fabs(rep.error_term) - rep.error_bound);
                    ok = ok && rep.residual <= 1e-9 &&
                         std::fabs(rep.error_term) <= rep.error_bound + 1e-9;
                }
            }
        }
        const double dt = seconds_since(t0);
        std::snprintf(buf, sizeof buf, "worst residual %.2e, error slack %.2e; %.1fs",
                      worst_res, worst_excess, dt);
        gate.report(7, "re-pairing and block-splitting identities", ok && dt < 60.0, buf);
    }

    // 8: exact variances against the closed forms
    {
        bool ok = true;
        const auto f1 = TrigPolySpec::cosine_powers(1);
        const auto f2 = TrigPolySpec::cosine_powers(2);
        const auto fe = TrigPolySpec::erdos_fortet();
        for (long n = 1; n <= 64; ++n) {
            ok = ok && sigma_n_squared(f1, g2_spec, n) == canonical_rat(n, 2);
            ok = ok && sigma_n_squared(fe, ef_spec, n) == Rat(n);
            ok = ok && sigma_n_squared(f2, g2_spec, n) == Rat(2 * n - 1);
        }
        gate.report(8, "sigma^2 = N/2, N, 2N-1 exactly for N = 1..64", ok,
                    "frequency-multiset aggregation vs closed forms");
    }

    // 9: quantitative central limit behavior
    {
        const auto t0 = std::chrono::steady_clock::now();
        const auto f1 = TrigPolySpec::cosine_powers(1);
        const auto fe = TrigPolySpec::erdos_fortet();
        const auto r16 = clt_experiment(f1, g2_spec, 16, 50000, 1);
        const auto r64 = clt_experiment(f1, g2_spec, 64, 50000, 1);
        const double d16 = r16.stats.at("kolmogorov_distance");
        const double d64 = r64.stats.at("kolmogorov_distance");

        std::vector<double> s64, s128;
        const auto e64 = clt_experiment(fe, ef_spec, 64, 50000, 1, 1, &s64);
        const auto e128 = clt_experiment(fe, ef_spec, 128, 50000, 1, 1, &s128);
        const GriddedCdf mixture(erdos_fortet_mixture_cdf, -10, 10, 4001);
        const double mix128 =
            kolmogorov_distance(s128, [&](double t) { return mixture(t); });
        const double phi64 = e64.stats.at("kolmogorov_distance");
        const double phi128 = e128.stats.at("kolmogorov_distance");

        const bool pure_ok = d16 <= 0.06 && d64 < d16;
        const bool floor_ok = phi64 >= 0.03 && phi128 >= 0.03;
        const bool mixture_ok = mix128 <= 0.02;
        const double dt = seconds_since(t0);
        std::snprintf(buf, sizeof buf,
                      "pure: %.4f then %.4f; EF vs Phi: %.4f, %.4f; EF vs mixture at "
                      "N=128: %.4f needs <= 0.02; %.0fs",
                      d16, d64, phi64, phi128, mix128, dt);
        gate.report(9, "Berry-Esseen behavior of normalized sums",
                    pure_ok && floor_ok && mixture_ok && dt < 300.0, buf);
    }

    // 10: block sums are invariant under one-period shifts
    {
        const auto p = params_r(4, 2);
        bool ok = true;
        double worst_exact = 0, worst_win = 0;
        for (int i = 2; i <= 4; ++i) {
            const double ex = block_periodicity_residual(p, i, 8, 5, EvalPath::Exact);
            const double wi = block_periodicity_residual(p, i, 8, 5, EvalPath::Windowed);
            worst_exact = std::max(worst_exact, ex);
            worst_win = std::max(worst_win, wi);
            ok = ok && ex == 0.0 && wi <= 1e-9;
        }
        std::snprintf(buf, sizeof buf, "exact residual %.1e, windowed %.1e", worst_exact,
                      worst_win);
        gate.report(10, "period invariance of block sums, i = 2..4", ok, buf);
    }

    // 11: the local window amplifies the variance by at least d/2
    {
        const auto rep = local_variance_amplification(params_r(4, 4), 3, 10000, 11);
        const double ratio = rep.stats.at("amplification_ratio");
        std::snprintf(buf, sizeof buf, "windowed/global = %.3f needs >= 2 (global %.1f exact)",
                      ratio, rep.stats.at("global_second_moment"));
        gate.report(11, "local variance amplification at d = 4", ratio >= 2.0, buf);
    }

    // 12: Monte-Carlo outputs are byte-stable and worker-count independent
    {
        const auto f1 = TrigPolySpec::cosine_powers(1);
        const auto fe = TrigPolySpec::erdos_fortet();
        bool ok = true;
        ok = ok && clt_experiment(f1, g2_spec, 16, 50000, 1, 1).to_json() ==
                       clt_experiment(f1, g2_spec, 16, 50000, 1, 4).to_json();
        ok = ok && clt_experiment(fe, ef_spec, 128, 50000, 1, 2).to_json() ==
                       clt_experiment(fe, ef_spec, 128, 50000, 1, 3).to_json();
        ok = ok && local_variance_amplification(params_r(4, 4), 3, 10000, 11, 1).to_json() ==
                       local_variance_amplification(params_r(4, 4), 3, 10000, 11, 4).to_json();
        ok = ok && block_large_value_probability(params_r(4, 4), 3, 10000, 13, 1).to_json() ==
                       block_large_value_probability(params_r(4, 4), 3, 10000, 13, 3).to_json();
        gate.report(12, "seeded reports identical across worker counts", ok,
                    "clt, local variance, large-value measure");
    }

    std::printf("%d of 12 criteria failed\n", gate.failures);
    return gate.failures == 0 ? 0 : 1;
}
