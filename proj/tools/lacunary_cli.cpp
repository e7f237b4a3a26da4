// Command-line front-end for lacunary-sum experiments.
//
// One experiment per invocation; outputs are CSV or JSON files whose header
// echoes the resolved configuration, so identical invocations produce
// byte-identical files.  Exit codes: 0 success, 1 hard-assert failure
// (oracle mismatch, identity residual above tolerance), 2 usage or resource
// errors.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lacunary/diophantine.hpp"
#include "lacunary/dyadic.hpp"
#include "lacunary/sequence.hpp"
#include "lacunary/sparse_pow2.hpp"
#include "lacunary/stats.hpp"

using namespace lacunary;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

Rat parse_rational(const std::string& text) {
    if (text.find('/') != std::string::npos) {
        Rat r;
        if (mpq_set_str(r.get_mpq_t(), text.c_str(), 10) != 0)
            throw UsageError("cannot parse rational '" + text + "'");
        r.canonicalize();
        return r;
    }
    const auto dot = text.find('.');
    if (dot == std::string::npos) {
        Rat r;
        if (mpq_set_str(r.get_mpq_t(), text.c_str(), 10) != 0)
            throw UsageError("cannot parse number '" + text + "'");
        return r;
    }
    const std::string digits = text.substr(0, dot) + text.substr(dot + 1);
    const std::size_t frac_len = text.size() - dot - 1;
    Int num(digits.c_str());
    Int den(1);
    for (std::size_t i = 0; i < frac_len; ++i) den *= 10;
    Rat r(num, den);
    r.canonicalize();
    return r;
}

std::vector<long> parse_length_list(const std::string& text) {
    std::vector<long> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(std::stol(item));
    }
    if (out.empty()) throw UsageError("empty length list");
    return out;
}

std::pair<int, int> parse_block_range(const std::string& text) {
    const auto pos = text.find("..");
    if (pos == std::string::npos) {
        const int b = std::stoi(text);
        return {b, b};
    }
    return {std::stoi(text.substr(0, pos)), std::stoi(text.substr(pos + 2))};
}

// Options shared by every subcommand that needs a sequence.
struct SeqOptions {
    std::string kind = "paper";
    long q = 2;
    long growth_base = 9;
    std::string eps = "1/2";
    long degree = 42;
    std::string lil_constant = "1";
    std::string tower = "reduced";
    std::string tower_table;
    long max_bits = 1L << 24;
    std::string explicit_terms;

    void attach(CLI::App* cmd) {
        cmd->add_option("--seq", kind, "sequence family: geometric | erdos-fortet | paper | explicit")
            ->capture_default_str();
        cmd->add_option("--q", q, "geometric base")->capture_default_str();
        cmd->add_option("--R", growth_base, "block growth base")->capture_default_str();
        cmd->add_option("--eps", eps, "savings exponent, rational in (0,1)")
            ->capture_default_str();
        cmd->add_option("--d", degree, "cosine polynomial degree")->capture_default_str();
        cmd->add_option("--K", lil_constant, "target LIL constant")->capture_default_str();
        cmd->add_option("--tower", tower, "tower rule: paper | reduced | table")
            ->capture_default_str();
        cmd->add_option("--tower-table", tower_table, "comma-separated explicit tower exponents");
        cmd->add_option("--max-bits", max_bits, "bit cap per materialized term")
            ->capture_default_str();
        cmd->add_option("--terms", explicit_terms, "comma-separated terms for --seq explicit");
    }

    ConstructionParams params() const {
        ConstructionParams p;
        p.growth_base = growth_base;
        p.eps = parse_rational(eps);
        if (p.eps <= 0 || p.eps >= 1) throw UsageError("eps must lie in (0,1)");
        p.degree = degree;
        p.lil_constant = parse_rational(lil_constant);
        p.max_term_bits = max_bits;
        if (tower == "paper") {
            p.tower.rule = TowerRule::DoubleExponential;
        } else if (tower == "reduced") {
            p.tower.rule = TowerRule::Reduced;
        } else if (tower == "table") {
            p.tower.rule = TowerRule::Table;
            std::stringstream ss(tower_table);
            std::string item;
            while (std::getline(ss, item, ','))
                if (!item.empty()) p.tower.table.emplace_back(item.c_str());
        } else {
            throw UsageError("unknown tower rule '" + tower + "'");
        }
        p.validate();
        return p;
    }

    SequenceSpec spec() const {
        const Rat e = parse_rational(eps);
        if (e <= 0 || e >= 1) throw UsageError("eps must lie in (0,1)");
        if (kind == "geometric") return SequenceSpec::geometric(q);
        if (kind == "erdos-fortet") return SequenceSpec::erdos_fortet();
        if (kind == "paper") return SequenceSpec::paper(params());
        if (kind == "explicit") {
            std::vector<Int> terms;
            std::stringstream ss(explicit_terms);
            std::string item;
            while (std::getline(ss, item, ','))
                if (!item.empty()) terms.emplace_back(item.c_str());
            if (terms.empty()) throw UsageError("--seq explicit needs --terms");
            return SequenceSpec::explicit_list(std::move(terms));
        }
        throw UsageError("unknown sequence family '" + kind + "'");
    }

    void echo(std::map<std::string, std::string>& into) const {
        into["seq"] = kind;
        if (kind == "geometric") into["q"] = std::to_string(q);
        if (kind == "explicit") into["terms"] = explicit_terms;
        if (kind == "paper") {
            into["R"] = std::to_string(growth_base);
            into["eps"] = parse_rational(eps).get_str();
            into["d"] = std::to_string(degree);
            into["K"] = parse_rational(lil_constant).get_str();
            into["tower"] = tower;
            if (!tower_table.empty()) into["tower_table"] = tower_table;
            into["max_bits"] = std::to_string(max_bits);
        }
    }
};

std::string default_out_dir() {
    const char* env = std::getenv("LACUNARY_OUT_DIR");
    return env ? env : "";
}

void emit(const std::string& out_path, const std::string& content) {
    if (out_path.empty()) {
        std::cout << content;
        return;
    }
    std::string path = out_path;
    const std::string dir = default_out_dir();
    if (!dir.empty() && path.find('/') == std::string::npos)
        path = dir + "/" + path;
    std::ofstream f(path, std::ios::binary);
    if (!f) throw UsageError("cannot open output file " + path);
    f << content;
}

std::vector<std::string> comment_lines(const std::map<std::string, std::string>& kv) {
    std::vector<std::string> out;
    out.push_back(std::string("artifact_version = ") + kArtifactVersion);
    for (const auto& [k, v] : kv) out.push_back(k + " = " + v);
    return out;
}

std::string report_with_config(ExperimentReport rep,
                               const std::map<std::string, std::string>& config) {
    for (const auto& [k, v] : config) rep.params[k] = v;
    return rep.to_json();
}

// warnings on stderr keep stdout byte-stable
void print_warnings(const ConstructionParams& p) {
    for (const auto& w : p.constraint_warnings())
        std::cerr << "warning: " << w << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact and Monte-Carlo experiments on lacunary sums"};
    app.require_subcommand(1);
    app.set_config("--config", "", "read options from a key = value file");
    app.allow_config_extras(false);

    // ---- generate ----
    auto* c_gen = app.add_subcommand("generate", "emit a sequence prefix, one decimal per line");
    SeqOptions gen_seq;
    gen_seq.attach(c_gen);
    long gen_n = 10;
    std::string gen_out;
    c_gen->add_option("--N", gen_n, "prefix length")->capture_default_str();
    c_gen->add_option("--out", gen_out, "output file (default stdout)");

    // ---- count ----
    auto* c_count = app.add_subcommand("count", "number of solutions of a n_k - b n_l = c");
    SeqOptions count_seq;
    count_seq.attach(c_count);
    long count_n = 10;
    std::string count_a = "1", count_b = "1", count_c = "0";
    int count_special_i = 0;
    long count_special_m = 1;
    c_count->add_option("--N", count_n, "prefix length")->capture_default_str();
    c_count->add_option("--a", count_a)->capture_default_str();
    c_count->add_option("--b", count_b)->capture_default_str();
    c_count->add_option("--c", count_c)->capture_default_str();
    c_count->add_option("--special-i", count_special_i,
                        "use the special right-hand side of this block (0 = off)");
    c_count->add_option("--special-m", count_special_m, "sub-block label for --special-i");

    // ---- spectrum ----
    auto* c_spec = app.add_subcommand("spectrum", "all c >= 0 with their solution counts");
    SeqOptions spec_seq;
    spec_seq.attach(c_spec);
    long spec_n = 10;
    std::string spec_a = "1", spec_b = "1", spec_out;
    bool spec_exclude_zero = false;
    long spec_budget = kDefaultPairBudget;
    c_spec->add_option("--N", spec_n)->capture_default_str();
    c_spec->add_option("--a", spec_a)->capture_default_str();
    c_spec->add_option("--b", spec_b)->capture_default_str();
    c_spec->add_flag("--exclude-zero", spec_exclude_zero, "drop the c = 0 bucket");
    c_spec->add_option("--pair-budget", spec_budget)->capture_default_str();
    c_spec->add_option("--out", spec_out);

    // ---- profile ----
    auto* c_prof = app.add_subcommand("profile", "max solution count and normalized ratio per prefix length");
    SeqOptions prof_seq;
    prof_seq.attach(c_prof);
    std::string prof_a = "2", prof_b = "1", prof_blocks, prof_lengths, prof_out;
    long prof_budget = kDefaultPairBudget;
    c_prof->add_option("--a", prof_a)->capture_default_str();
    c_prof->add_option("--b", prof_b)->capture_default_str();
    c_prof->add_option("--blocks", prof_blocks, "block range lo..hi (paper sequence)");
    c_prof->add_option("--Ns", prof_lengths, "comma-separated prefix lengths");
    c_prof->add_option("--pair-budget", prof_budget)->capture_default_str();
    c_prof->add_option("--out", prof_out);

    // ---- clt ----
    auto* c_clt = app.add_subcommand("clt", "Kolmogorov distance of normalized sums to the normal law");
    SeqOptions clt_seq;
    clt_seq.attach(c_clt);
    long clt_n = 16, clt_m = 50000;
    std::uint64_t clt_seed = 0;
    int clt_threads = 1;
    std::string clt_f = "cosine", clt_out, clt_dump;
    c_clt->add_option("--N", clt_n)->capture_default_str();
    c_clt->add_option("--M", clt_m)->capture_default_str();
    c_clt->add_option("--seed", clt_seed)->capture_default_str();
    c_clt->add_option("--threads", clt_threads)->capture_default_str();
    c_clt->add_option("--f", clt_f, "test function: cosine (degree --fd) | erdos-fortet")
        ->capture_default_str();
    long clt_fd = 1;
    c_clt->add_option("--fd", clt_fd, "degree of the cosine test function")->capture_default_str();
    c_clt->add_option("--out", clt_out);
    c_clt->add_option("--dump-samples", clt_dump, "write per-sample CSV here");

    // ---- gaposhkin ----
    auto* c_gap = app.add_subcommand("gaposhkin", "weighted dyadic cosine sums against the normal law");
    std::string gap_weights = "equal";
    long gap_n = 16, gap_m = 50000, gap_a = 1;
    int gap_block = 3, gap_threads = 1;
    std::uint64_t gap_seed = 0;
    SeqOptions gap_seq;
    gap_seq.attach(c_gap);
    std::string gap_out;
    c_gap->add_option("--weights", gap_weights, "equal | single | window")->capture_default_str();
    c_gap->add_option("--N", gap_n, "weight count for equal weights")->capture_default_str();
    c_gap->add_option("--cell", gap_a, "window cell index a")->capture_default_str();
    c_gap->add_option("--i", gap_block, "block for window weights")->capture_default_str();
    c_gap->add_option("--M", gap_m)->capture_default_str();
    c_gap->add_option("--seed", gap_seed)->capture_default_str();
    c_gap->add_option("--threads", gap_threads)->capture_default_str();
    c_gap->add_option("--out", gap_out);

    // ---- lil ----
    auto* c_lil = app.add_subcommand("lil", "|S_N| / sqrt(2 N log log N) snapshots");
    SeqOptions lil_seq;
    lil_seq.attach(c_lil);
    std::string lil_lengths = "1024,16384,1048576", lil_f = "cosine", lil_x, lil_out;
    long lil_m = 200, lil_fd = 1;
    std::uint64_t lil_seed = 0;
    int lil_threads = 1;
    c_lil->add_option("--Ns", lil_lengths)->capture_default_str();
    c_lil->add_option("--M", lil_m)->capture_default_str();
    c_lil->add_option("--seed", lil_seed)->capture_default_str();
    c_lil->add_option("--threads", lil_threads)->capture_default_str();
    c_lil->add_option("--f", lil_f)->capture_default_str();
    c_lil->add_option("--fd", lil_fd)->capture_default_str();
    c_lil->add_option("--x", lil_x, "fixed evaluation point (decimal or rational)");
    c_lil->add_option("--out", lil_out);
    std::string lil_trace;
    c_lil->add_option("--trace", lil_trace, "write raw S_N evaluations as CSV here");

    // ---- decompose ----
    auto* c_dec = app.add_subcommand("decompose", "split of the reduced block sum with residual check");
    SeqOptions dec_seq;
    dec_seq.attach(c_dec);
    int dec_block = 3;
    long dec_trials = 20;
    std::uint64_t dec_seed = 0;
    std::string dec_out;
    c_dec->add_option("--i", dec_block)->capture_default_str();
    c_dec->add_option("--trials", dec_trials)->capture_default_str();
    c_dec->add_option("--seed", dec_seed)->capture_default_str();
    c_dec->add_option("--out", dec_out);

    // ---- erdos-fortet-check ----
    auto* c_ef = app.add_subcommand("erdos-fortet-check", "exact re-pairing identity residual");
    long ef_n = 20, ef_trials = 100;
    std::uint64_t ef_seed = 0;
    std::string ef_out;
    c_ef->add_option("--N", ef_n)->capture_default_str();
    c_ef->add_option("--trials", ef_trials)->capture_default_str();
    c_ef->add_option("--seed", ef_seed)->capture_default_str();
    c_ef->add_option("--out", ef_out);

    // ---- blockprob ----
    auto* c_bp = app.add_subcommand("blockprob", "large-value measure / local variance of one block");
    SeqOptions bp_seq;
    bp_seq.attach(c_bp);
    int bp_block = 3, bp_threads = 1;
    long bp_m = 10000;
    std::uint64_t bp_seed = 0;
    bool bp_amplification = false;
    std::string bp_out;
    c_bp->add_option("--i", bp_block)->capture_default_str();
    c_bp->add_option("--M", bp_m)->capture_default_str();
    c_bp->add_option("--seed", bp_seed)->capture_default_str();
    c_bp->add_option("--threads", bp_threads)->capture_default_str();
    c_bp->add_flag("--amplification", bp_amplification,
                   "report the windowed-to-global second moment ratio instead");
    c_bp->add_option("--out", bp_out);

    // ---- periodicity ----
    auto* c_per = app.add_subcommand("periodicity", "block sum invariance under one-period shifts");
    SeqOptions per_seq;
    per_seq.attach(c_per);
    int per_block = 2;
    long per_trials = 8;
    std::uint64_t per_seed = 0;
    std::string per_path = "exact", per_out;
    c_per->add_option("--i", per_block)->capture_default_str();
    c_per->add_option("--trials", per_trials)->capture_default_str();
    c_per->add_option("--seed", per_seed)->capture_default_str();
    c_per->add_option("--path", per_path, "exact | windowed")->capture_default_str();
    c_per->add_option("--out", per_out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (*c_gen) {
            const auto spec = gen_seq.spec();
            if (spec.kind == SequenceSpec::Kind::Paper) print_warnings(spec.params);
            std::map<std::string, std::string> cfg;
            gen_seq.echo(cfg);
            cfg["N"] = std::to_string(gen_n);
            std::ostringstream os;
            for (const auto& line : comment_lines(cfg)) os << "# " << line << "\n";
            for (const auto& v : sequence_prefix(gen_n, spec)) os << v << "\n";
            emit(gen_out, os.str());
            return 0;
        }

        if (*c_count) {
            const auto spec = count_seq.spec();
            const Int a(count_a.c_str()), b(count_b.c_str());
            long result = 0;
            if (count_special_i > 0 && spec.kind == SequenceSpec::Kind::Paper) {
                long r = 0;
                Int g;
                mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
                const Int va = a / g, vb = b / g;
                if (vb == 1 && is_power_of_two(va)) r = power_of_two_exponent(va);
                else if (va == 1 && is_power_of_two(vb)) r = -power_of_two_exponent(vb);
                else throw UsageError("--special-i needs a/b equal to a power of two");
                const auto c_sym = special_rhs_symbolic(count_special_i, count_special_m,
                                                        b, r, spec.params);
                result = count_symbolic(spec.params, count_n, a, b, c_sym);
                bool representable = true;
                try {
                    const auto prefix = sequence_prefix(count_n, spec);
                    const Int c_val =
                        special_rhs(count_special_i, count_special_m, b, r, spec.params);
                    if (count_n <= 2000 &&
                        count_naive(prefix, {a, b, c_val}) != result) {
                        std::cerr << "oracle mismatch between symbolic and naive counts\n";
                        return 1;
                    }
                } catch (const TowerOverflow&) {
                    representable = false;  // symbolic-only regime
                }
                (void)representable;
            } else {
                const auto prefix = sequence_prefix(count_n, spec);
                const EquationParams eq{a, b, Int(count_c.c_str())};
                result = count_fast(prefix, eq);
                if (count_n <= 2000 && count_naive(prefix, eq) != result) {
                    std::cerr << "oracle mismatch between fast and naive counts\n";
                    return 1;
                }
            }
            std::cout << result << "\n";
            return 0;
        }

        if (*c_spec) {
            const auto spec = spec_seq.spec();
            const Int a(spec_a.c_str()), b(spec_b.c_str());
            const auto prefix = sequence_prefix(spec_n, spec);
            const auto s = difference_spectrum(prefix, a, b, spec_budget);
            std::map<std::string, std::string> cfg;
            spec_seq.echo(cfg);
            cfg["N"] = std::to_string(spec_n);
            cfg["a"] = a.get_str();
            cfg["b"] = b.get_str();
            cfg["exclude_zero"] = spec_exclude_zero ? "true" : "false";
            std::ostringstream os;
            for (const auto& line : comment_lines(cfg)) os << "# " << line << "\n";
            os << "c,count\n";
            for (const auto& [c, cnt] : s.counts) {
                if (spec_exclude_zero && c == 0) continue;
                os << c << ',' << cnt << "\n";
            }
            emit(spec_out, os.str());
            return 0;
        }

        if (*c_prof) {
            const auto spec = prof_seq.spec();
            const Int a(prof_a.c_str()), b(prof_b.c_str());
            std::vector<ProfileRow> rows;
            if (!prof_blocks.empty()) {
                auto [lo, hi] = parse_block_range(prof_blocks);
                rows = profile_over_blocks(spec, a, b, lo, hi, prof_budget);
            } else if (!prof_lengths.empty()) {
                const Rat eps = spec.kind == SequenceSpec::Kind::Paper
                                    ? spec.params.eps
                                    : parse_rational(prof_seq.eps);
                rows = profile_over_lengths(spec, a, b, parse_length_list(prof_lengths),
                                            eps, prof_budget);
            } else {
                throw UsageError("profile needs --blocks or --Ns");
            }
            std::map<std::string, std::string> cfg;
            prof_seq.echo(cfg);
            if (!prof_blocks.empty()) cfg["blocks"] = prof_blocks;
            if (!prof_lengths.empty()) cfg["Ns"] = prof_lengths;
            emit(prof_out, profile_csv(rows, a, b, comment_lines(cfg)));
            return 0;
        }

        if (*c_clt) {
            const auto spec = clt_seq.spec();
            const TrigPolySpec f = clt_f == "erdos-fortet"
                                       ? TrigPolySpec::erdos_fortet()
                                       : TrigPolySpec::cosine_powers(clt_fd);
            std::vector<double> samples;
            auto rep = clt_experiment(f, spec, clt_n, clt_m, clt_seed, clt_threads,
                                      clt_dump.empty() ? nullptr : &samples);
            std::map<std::string, std::string> cfg;
            clt_seq.echo(cfg);
            cfg["f"] = clt_f;
            if (clt_f != "erdos-fortet") cfg["fd"] = std::to_string(clt_fd);
            emit(clt_out, report_with_config(std::move(rep), cfg));
            if (!clt_dump.empty()) {
                SampleBatch batch{clt_seed, clt_m,
                                  std::stol(rep.params.count("precision_bits")
                                                ? rep.params["precision_bits"]
                                                : "64")};
                emit(clt_dump, samples_csv(batch, samples, comment_lines(cfg)));
            }
            return 0;
        }

        if (*c_gap) {
            std::vector<double> weights;
            std::vector<long> exponents;
            std::map<std::string, std::string> cfg;
            cfg["weights"] = gap_weights;
            if (gap_weights == "equal") {
                weights.assign(static_cast<std::size_t>(gap_n),
                               1.0 / std::sqrt(static_cast<double>(gap_n)));
                for (long k = 1; k <= gap_n; ++k) exponents.push_back(k);
                cfg["N"] = std::to_string(gap_n);
            } else if (gap_weights == "single") {
                weights = {1.0};
                exponents = {1};
            } else if (gap_weights == "window") {
                const auto params = gap_seq.params();
                const auto ww = window_weights(gap_a, gap_block, params);
                if (ww.degenerate) throw UsageError("cell a = 0 has degenerate weights");
                weights = ww.per_index_lambda();
                for (const auto& sb : params.subblock_partition(gap_block))
                    for (Int k = sb.lo; k <= sb.hi; ++k)
                        exponents.push_back(mpz_get_si(k.get_mpz_t()));
                gap_seq.echo(cfg);
                cfg["cell"] = std::to_string(gap_a);
                cfg["i"] = std::to_string(gap_block);
            } else {
                throw UsageError("unknown weight scheme '" + gap_weights + "'");
            }
            auto rep = gaposhkin_experiment(weights, exponents, gap_m, gap_seed,
                                            gap_threads);
            emit(gap_out, report_with_config(std::move(rep), cfg));
            return 0;
        }

        if (*c_lil) {
            const auto spec = lil_seq.spec();
            const TrigPolySpec f = lil_f == "erdos-fortet"
                                       ? TrigPolySpec::erdos_fortet()
                                       : TrigPolySpec::cosine_powers(lil_fd);
            const auto lengths = parse_length_list(lil_lengths);
            std::optional<DyadicPoint> fixed;
            if (!lil_x.empty()) {
                const long bits =
                    *std::max_element(lengths.begin(), lengths.end()) + 2 + 64;
                fixed = dyadic_from_rational(parse_rational(lil_x), bits);
            }
            auto res = lil_ratio_scan(f, spec, lengths, lil_m, lil_seed, lil_threads,
                                      fixed);
            std::map<std::string, std::string> cfg;
            lil_seq.echo(cfg);
            cfg["Ns"] = lil_lengths;
            cfg["f"] = lil_f;
            if (!lil_x.empty()) cfg["x"] = lil_x;
            std::ostringstream os;
            for (const auto& line : comment_lines(cfg)) os << "# " << line << "\n";
            os << "N,max_ratio,mean_ratio,running_max\n";
            char buf[128];
            for (std::size_t j = 0; j < res.lengths.size(); ++j) {
                std::snprintf(buf, sizeof buf, "%ld,%.12g,%.12g,%.12g\n",
                              res.lengths[j], res.max_ratio[j], res.mean_ratio[j],
                              res.running_max[j]);
                os << buf;
            }
            emit(lil_out, os.str());
            if (!lil_trace.empty()) emit(lil_trace, res.trace_csv(comment_lines(cfg)));
            return 0;
        }

        if (*c_dec) {
            const auto params = dec_seq.params();
            print_warnings(params);
            const TrigPolySpec f = TrigPolySpec::cosine_powers(params.degree);
            const Int max_reduced = pow2(static_cast<unsigned long>(
                                        mpz_get_si(params.block_hi(dec_block).get_mpz_t()))) +
                                    params.subblock_count(dec_block);
            SampleBatch batch{dec_seed, dec_trials, recommended_precision(f, max_reduced)};
            double worst_residual = 0, worst_error = 0;
            for (long t = 0; t < dec_trials; ++t) {
                const auto rep = decomposition_terms(params, dec_block, batch.point(t));
                worst_residual = std::max(worst_residual, rep.residual);
                worst_error = std::max(worst_error, std::fabs(rep.error_term));
            }
            ExperimentReport rep;
            rep.name = "decompose";
            rep.seed = dec_seed;
            rep.stats["max_residual"] = worst_residual;
            rep.stats["max_error_term"] = worst_error;
            rep.stats["error_bound"] =
                static_cast<double>(params.degree) * params.degree * dec_block;
            rep.flags["residual_within_1e-9"] = worst_residual <= 1e-9;
            rep.flags["error_within_bound"] =
                worst_error <= rep.stats["error_bound"] + 1e-9;
            std::map<std::string, std::string> cfg;
            dec_seq.echo(cfg);
            cfg["i"] = std::to_string(dec_block);
            cfg["trials"] = std::to_string(dec_trials);
            emit(dec_out, report_with_config(rep, cfg));
            return rep.flags["residual_within_1e-9"] && rep.flags["error_within_bound"]
                       ? 0
                       : 1;
        }

        if (*c_ef) {
            const double worst = erdos_fortet_identity_max_residual(ef_n, ef_trials, ef_seed);
            ExperimentReport rep;
            rep.name = "erdos-fortet-check";
            rep.seed = ef_seed;
            rep.stats["max_residual"] = worst;
            rep.flags["residual_within_1e-9"] = worst <= 1e-9;
            std::map<std::string, std::string> cfg;
            cfg["N"] = std::to_string(ef_n);
            cfg["trials"] = std::to_string(ef_trials);
            emit(ef_out, report_with_config(rep, cfg));
            return worst <= 1e-9 ? 0 : 1;
        }

        if (*c_bp) {
            const auto params = bp_seq.params();
            print_warnings(params);
            auto rep = bp_amplification
                           ? local_variance_amplification(params, bp_block, bp_m,
                                                          bp_seed, bp_threads)
                           : block_large_value_probability(params, bp_block, bp_m,
                                                           bp_seed, bp_threads);
            std::map<std::string, std::string> cfg;
            bp_seq.echo(cfg);
            cfg["i"] = std::to_string(bp_block);
            emit(bp_out, report_with_config(std::move(rep), cfg));
            return 0;
        }

        if (*c_per) {
            const auto params = per_seq.params();
            const EvalPath path =
                per_path == "windowed" ? EvalPath::Windowed : EvalPath::Exact;
            const double worst =
                block_periodicity_residual(params, per_block, per_trials, per_seed, path);
            ExperimentReport rep;
            rep.name = "periodicity";
            rep.seed = per_seed;
            rep.stats["max_residual"] = worst;
            const bool ok = per_path == "windowed" ? worst <= 1e-9 : worst == 0.0;
            rep.flags["period_invariant"] = ok;
            std::map<std::string, std::string> cfg;
            per_seq.echo(cfg);
            cfg["i"] = std::to_string(per_block);
            cfg["path"] = per_path;
            emit(per_out, report_with_config(rep, cfg));
            return ok ? 0 : 1;
        }
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const PairBudgetExceeded& e) {
        std::cerr << "resource error: " << e.what() << "\n";
        return 2;
    } catch (const TowerOverflow& e) {
        std::cerr << "resource error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
