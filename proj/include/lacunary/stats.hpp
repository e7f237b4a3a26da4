#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lacunary/bigint.hpp"
#include "lacunary/dyadic.hpp"
#include "lacunary/errors.hpp"
#include "lacunary/sequence.hpp"

namespace lacunary {

inline constexpr const char* kArtifactVersion = "0.1.0";

// Standard normal distribution function, absolute error <= 1e-10.
double normal_cdf(double t);

// sup_t |empirical cdf - reference|, evaluated at both one-sided jumps of
// every sample point.
double kolmogorov_distance(std::vector<double> values,
                           const std::function<double(double)>& cdf);

// Counter-based sample stream: word w of point i is a pure function of
// (seed, i, w), so any subset of points can be generated independently and
// the stream is identical no matter how work is split across threads.
struct SampleBatch {
    std::uint64_t seed = 0;
    long count = 0;
    long precision_bits = 64;

    // numerator uniform on [0, 2^precision_bits)
    DyadicPoint point(long index) const;
};

std::uint64_t counter_rng_word(std::uint64_t seed, std::uint64_t stream,
                               std::uint64_t counter);

// Runs fn(i) for i in [0, count); results must be written by index.  The
// split across threads cannot influence any output.
void parallel_for_index(long count, int threads,
                        const std::function<void(long)>& fn);

// Seeded, parameter-stamped record of one experiment.  Serialization is
// deterministic: ordered keys, shortest round-trip doubles, no timestamps.
struct ExperimentReport {
    std::string name;
    std::uint64_t seed = 0;
    std::map<std::string, std::string> params;
    std::map<std::string, double> stats;
    std::map<std::string, bool> flags;

    std::string to_json() const;
    static ExperimentReport from_json(const std::string& text);
    bool operator==(const ExperimentReport& o) const = default;
};

// CSV dump `sample_index,x_numerator,x_precision,value` preceded by
// `# key = value` header lines.
std::string samples_csv(const SampleBatch& batch, const std::vector<double>& values,
                        const std::vector<std::string>& header_comments);

// Monte-Carlo law of S_N(x)/sigma_N against the normal distribution.
// sigma_N comes from the exact variance, which reduces to sqrt(N/2) for a
// single cosine over distinct frequencies.
ExperimentReport clt_experiment(const TrigPolySpec& f, const SequenceSpec& spec,
                                long n, long m, std::uint64_t seed, int threads = 1,
                                std::vector<double>* samples_out = nullptr);

// Limit law of the sigma-normalized Erdos-Fortet sums: a scale mixture of
// normals with conditional deviation sqrt(2)|cos(pi u)|, u uniform.
// Midpoint quadrature with 10^4 nodes; the vanishing point of cos follows
// the convention Phi(t/0) = [t >= 0].
double erdos_fortet_mixture_cdf(double t);

// Tabulated monotone CDF for repeated distance evaluations.
class GriddedCdf {
public:
    GriddedCdf(const std::function<double(double)>& cdf, double lo, double hi,
               int points);
    double operator()(double t) const;

private:
    double lo_, hi_, step_;
    std::vector<double> values_;
};

// Kolmogorov distance of sqrt(2) sum_k lambda_k cos(2 pi 2^(e_k) x) to the
// normal law, with the distance / max(lambda)^(1/4) ratio recorded.
// Throws WeightsNotNormalized unless sum lambda^2 = 1.
ExperimentReport gaposhkin_experiment(const std::vector<double>& weights,
                                      const std::vector<long>& exponents, long m,
                                      std::uint64_t seed, int threads = 1);

// |S_N(x)| / sqrt(2 N log log N) snapshots over a list of N; finite-scale
// monitoring only.
struct LilScanResult {
    ExperimentReport report;
    std::vector<long> lengths;
    std::vector<double> max_ratio;
    std::vector<double> mean_ratio;
    std::vector<double> running_max;  // of the per-N max, nondecreasing

    // raw evaluations, one row per sample point
    std::vector<Int> numerators;
    long precision_bits = 0;
    std::vector<std::vector<double>> sums;  // S_N(x) per sample per length

    // CSV `x_numerator,x_precision,N,value`
    std::string trace_csv(const std::vector<std::string>& header_comments) const;
};

LilScanResult lil_ratio_scan(const TrigPolySpec& f, const SequenceSpec& spec,
                             std::vector<long> lengths, long m, std::uint64_t seed,
                             int threads = 1,
                             const std::optional<DyadicPoint>& fixed_point = {});

// Residual of the exact re-pairing identity for n_k = 2^k - 1 with
// f = cos(2 pi x) + cos(4 pi x):
//   sum_k f(n_k x) = 2 cos(pi x) sum_k cos(2 pi (2^k - 3/2) x)
//                    + cos(2 pi (2^(N+1) - 2) x) - 1.
// The half-integer frequency costs one extra dyadic bit.
double erdos_fortet_identity_residual(long n, const DyadicPoint& x);
double erdos_fortet_identity_max_residual(long n, long trials, std::uint64_t seed);

// Level and target measure of the large-value set of one block.
struct LargeValueParams {
    int block = 2;
    long degree = 1;
    Rat eps = Rat(1, 2);
    long growth_base = 9;

    // (d sqrt(eps)/2 - 2) sqrt(2 R^i log log R^i) - 2 d^2 i - 2
    double threshold() const;
    // i^(-1+eps/2) - 2 i^(-2); holds only asymptotically, reported not asserted
    double measure_lower_bound() const;
};

// Empirical measure of {x : |reduced block sum| >= threshold}, reported
// against the asymptotic lower bound.  Monitoring output.
ExperimentReport block_large_value_probability(const ConstructionParams& params,
                                               int block, long m,
                                               std::uint64_t seed, int threads = 1);

// Second moment of the reduced block sum over the local window
// [0, 2^-h_i] against the exact global second moment.
ExperimentReport local_variance_amplification(const ConstructionParams& params,
                                              int block, long m, std::uint64_t seed,
                                              int threads = 1);

// max over trials of |Y_i(x) - Y_i(x + 2^-T(i))|.  In exact arithmetic the
// reduced arguments coincide bit for bit, so the residual is exactly zero.
// half_shift displaces by half a period instead, as a power check.
double block_periodicity_residual(const ConstructionParams& params, int block,
                                  long trials, std::uint64_t seed,
                                  EvalPath path = EvalPath::Exact,
                                  bool half_shift = false);

}  // namespace lacunary
