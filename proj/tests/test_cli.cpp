#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

namespace {

struct RunResult {
    int status = -1;
    std::string out;
};

RunResult run_cli(const std::string& args, const std::string& env = "") {
    const std::string cmd =
        env + " " + std::string(LACUNARY_CLI_PATH) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    RunResult r;
    char buf[4096];
    std::size_t got;
    while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, got);
    const int rc = pclose(pipe);
    r.status = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    return r;
}

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

}  // namespace

TEST_CASE("count on the classical example") {
    const auto r = run_cli("count --seq erdos-fortet --N 10 --a 1 --b 2 --c 1");
    CHECK(r.status == 0);
    CHECK(r.out == "9\n");

    const auto diag = run_cli("count --seq geometric --q 2 --N 7 --a 3 --b 3 --c 0");
    CHECK(diag.status == 0);
    CHECK(diag.out == "7\n");
}

TEST_CASE("symbolic counting beyond the bit cap") {
    const auto r = run_cli(
        "count --seq paper --R 9 --tower paper --N 819 --a 2 --b 1 "
        "--special-i 3 --special-m 1");
    CHECK(r.status == 0);
    CHECK(r.out == "364\n");
}

TEST_CASE("usage errors exit with 2") {
    CHECK(run_cli("count --seq erdos-fortet --N 10 --a 1 --b 2 --eps 1.5").status == 2);
    CHECK(run_cli("count --no-such-flag 1").status == 2);
    CHECK(run_cli("profile --seq erdos-fortet").status == 2);  // needs --blocks/--Ns
    CHECK(run_cli("").status == 2);                            // subcommand required
}

TEST_CASE("profile emits the documented CSV") {
    const std::string args =
        "profile --seq paper --R 4 --eps 1/2 --d 2 --a 2 --b 1 --blocks 1..5";
    const auto r = run_cli(args);
    CHECK(r.status == 0);
    CHECK(r.out.find("# artifact_version = ") == 0);
    CHECK(r.out.find("N,a,b,c_star,L_star,ratio\n") != std::string::npos);
    CHECK(r.out.find("4,2,1,32,3,") != std::string::npos);
    CHECK(r.out.find("20,2,1,8192,7,") != std::string::npos);
    // byte-identical reruns
    CHECK(run_cli(args).out == r.out);
}

TEST_CASE("identity check writes a report and respects the out dir") {
    const std::string dir = "/tmp/lacunary_cli_test";
    std::system(("rm -rf " + dir + " && mkdir -p " + dir).c_str());
    const auto r = run_cli(
        "erdos-fortet-check --N 20 --trials 100 --seed 7 --out ef.json",
        "LACUNARY_OUT_DIR=" + dir);
    CHECK(r.status == 0);
    const std::string body = slurp(dir + "/ef.json");
    CHECK(body.find("\"residual_within_1e-9\": true") != std::string::npos);
    CHECK(body.find("\"max_residual\"") != std::string::npos);
}

TEST_CASE("monte-carlo outputs do not depend on the worker count") {
    const std::string base =
        "clt --seq geometric --q 2 --N 16 --M 2000 --seed 5 --threads ";
    const auto one = run_cli(base + "1");
    const auto four = run_cli(base + "4");
    CHECK(one.status == 0);
    CHECK(one.out == four.out);
    CHECK(one.out.find("\"kolmogorov_distance\"") != std::string::npos);
}

TEST_CASE("config file with flag overrides") {
    const std::string dir = "/tmp/lacunary_cli_test";
    std::system(("mkdir -p " + dir).c_str());
    {
        std::ofstream cfg(dir + "/run.cfg");
        cfg << "[count]\n"
               "seq = erdos-fortet\n"
               "N = 10\n"
               "a = 1\n"
               "b = 2\n"
               "c = 1\n";
    }
    const auto r = run_cli("--config " + dir + "/run.cfg count");
    CHECK(r.status == 0);
    CHECK(r.out == "9\n");
    // command line beats the file
    const auto r5 = run_cli("--config " + dir + "/run.cfg count --N 5");
    CHECK(r5.out == "4\n");
    // unknown keys are rejected
    {
        std::ofstream cfg(dir + "/bad.cfg");
        cfg << "[count]\nno_such_key = 1\n";
    }
    CHECK(run_cli("--config " + dir + "/bad.cfg count").status == 2);
}

TEST_CASE("generate and periodicity round out the surface") {
    const auto gen = run_cli("generate --seq paper --R 9 --tower paper --N 9");
    CHECK(gen.status == 0);
    CHECK(gen.out.find("\n12\n") != std::string::npos);
    CHECK(gen.out.rfind("2052\n") == gen.out.size() - 5);

    const auto per =
        run_cli("periodicity --seq paper --R 4 --d 2 --i 3 --trials 4 --seed 5");
    CHECK(per.status == 0);
    CHECK(per.out.find("\"period_invariant\": true") != std::string::npos);

    const auto spec = run_cli("spectrum --seq geometric --q 2 --N 3 --a 1 --b 1");
    CHECK(spec.status == 0);
    CHECK(spec.out.find("c,count\n0,3\n2,1\n4,1\n6,1\n") != std::string::npos);
}
