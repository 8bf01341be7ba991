#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <cstdlib>
#include <unistd.h>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "test_util.hpp"
#include "vsb/report.hpp"
#include "vsb/trainer.hpp"

namespace fs = std::filesystem;
using vsb_test::TempDir;
using vsb_test::read_file;
using vsb_test::write_file;

static std::string g_bin;

namespace {

struct RunResult {
    int exit_code;
    std::string out;
    std::string err;
};

RunResult run_cli(const TempDir& dir, const std::string& args) {
    const std::string out_path = dir.file("__stdout.txt");
    const std::string err_path = dir.file("__stderr.txt");
    const std::string cmd = g_bin + " " + args + " > " + out_path + " 2> " + err_path;
    const int status = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = read_file(out_path);
    r.err = read_file(err_path);
    return r;
}

/// Small deterministic corpus for the CLI flows.
std::string gen_data(const TempDir& dir, const std::string& sub = "data",
                     const std::string& extra = "") {
    const std::string out = (dir.path() / sub).string();
    const auto r = run_cli(dir, "synth gen --n 40 --dim 8 --frames 5 --seed 7 --out " + out +
                                    " " + extra);
    REQUIRE(r.exit_code == 0);
    return out;
}

std::string corpus_args(const std::string& data) {
    return " --real " + data + "/real.jsonl --ai " + data + "/ai.jsonl --queries " + data +
           "/queries.jsonl --rel " + data + "/relevance.jsonl ";
}

} // namespace

TEST_CASE("synth gen writes the corpus files and a manifest") {
    TempDir dir("cli_synth");
    const auto data = gen_data(dir);
    for (const char* name : {"real.jsonl", "ai.jsonl", "queries.jsonl", "relevance.jsonl",
                             "bias_direction.json", "manifest.json"}) {
        CHECK(fs::exists(fs::path(data) / name));
    }
    const auto manifest = nlohmann::json::parse(read_file(data + "/manifest.json"));
    CHECK(manifest["command"] == "synth-gen");
    CHECK(manifest["seed"] == 7);
    CHECK(manifest.contains("version"));

    // rerun into a second directory: byte-identical corpus
    const auto data2 = gen_data(dir, "data2");
    CHECK(read_file(data + "/real.jsonl") == read_file(data2 + "/real.jsonl"));
    CHECK(read_file(data + "/ai.jsonl") == read_file(data2 + "/ai.jsonl"));
}

TEST_CASE("metrics writes reports that satisfy the delta identity") {
    TempDir dir("cli_metrics");
    const auto data = gen_data(dir);
    const std::string out = (dir.path() / "m").string();
    const auto r = run_cli(dir, "metrics" + corpus_args(data) + "--seed 11 --out " + out);
    REQUIRE(r.exit_code == 0);
    for (const char* name :
         {"bundles.csv", "deltas.csv", "deltas.json", "deltas.svg", "ranks_real.csv",
          "ranks_ai.csv", "ranks_mixed_real.csv", "ranks_mixed_ai.csv", "manifest.json"}) {
        CHECK(fs::exists(fs::path(out) / name));
    }
    const auto report = vsb::load_delta_json(out + "/deltas.json");
    CHECK(report.normalized.r1 == report.relative.r1 - report.location.r1);
    CHECK(report.normalized.mean_r == report.relative.mean_r - report.location.mean_r);

    // identical rerun -> byte-identical outputs
    const std::string out2 = (dir.path() / "m2").string();
    const auto r2 = run_cli(dir, "metrics" + corpus_args(data) + "--seed 11 --out " + out2);
    REQUIRE(r2.exit_code == 0);
    CHECK(read_file(out + "/deltas.csv") == read_file(out2 + "/deltas.csv"));
    CHECK(read_file(out + "/deltas.json") == read_file(out2 + "/deltas.json"));
    CHECK(read_file(out + "/bundles.csv") == read_file(out2 + "/bundles.csv"));

    // a different seed changes the interleaving draw
    const std::string out3 = (dir.path() / "m3").string();
    const auto r3 = run_cli(dir, "metrics" + corpus_args(data) + "--seed 12 --out " + out3);
    REQUIRE(r3.exit_code == 0);
    CHECK(read_file(out + "/deltas.json") != read_file(out3 + "/deltas.json"));
}

TEST_CASE("an empty query file exits with code 2 and names the file") {
    TempDir dir("cli_empty");
    const auto data = gen_data(dir);
    write_file(dir.file("empty.jsonl"), "");
    const auto r = run_cli(dir, "metrics --real " + data + "/real.jsonl --ai " + data +
                                    "/ai.jsonl --queries " + dir.file("empty.jsonl") +
                                    " --rel " + data + "/relevance.jsonl --out " +
                                    (dir.path() / "x").string());
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("empty.jsonl") != std::string::npos);
}

TEST_CASE("missing inputs and bad flags exit with code 2") {
    TempDir dir("cli_bad");
    const auto missing = run_cli(dir, "metrics --real nope.jsonl --ai nope.jsonl "
                                      "--queries nope.jsonl --rel nope.jsonl");
    CHECK(missing.exit_code == 2);

    const auto bad_flag = run_cli(dir, "metrics --real a --ai b --queries c --rel d "
                                       "--pool no-such-pooling");
    CHECK(bad_flag.exit_code == 2);

    const auto no_cmd = run_cli(dir, "");
    CHECK(no_cmd.exit_code == 2);
}

TEST_CASE("frame-order ablations under uniform-mean pooling warn and match") {
    TempDir dir("cli_ablate");
    const auto data = gen_data(dir);
    const std::string out_a = (dir.path() / "a").string();
    const std::string out_b = (dir.path() / "b").string();

    const auto ra = run_cli(dir, "ablate" + corpus_args(data) +
                                     "--mode shuffle-all --pool uniform-mean --seed 5 --out " +
                                     out_a);
    REQUIRE(ra.exit_code == 0);
    CHECK(ra.err.find("no-op") != std::string::npos);

    // reverse is also a no-op under mean pooling: identical deltas
    const auto rb = run_cli(dir, "ablate" + corpus_args(data) +
                                     "--mode reverse --pool uniform-mean --seed 5 --out " +
                                     out_b);
    REQUIRE(rb.exit_code == 0);
    CHECK(read_file(out_a + "/deltas.csv") == read_file(out_b + "/deltas.csv"));

    // under positional-ramp pooling the shuffle is not a no-op
    const std::string out_c = (dir.path() / "c").string();
    const std::string out_d = (dir.path() / "d").string();
    const auto rc = run_cli(dir, "ablate" + corpus_args(data) +
                                     "--mode shuffle-all --pool positional-ramp --seed 5 "
                                     "--out " + out_c);
    REQUIRE(rc.exit_code == 0);
    CHECK(rc.err.find("no-op") == std::string::npos);
    const auto rd = run_cli(dir, "ablate" + corpus_args(data) +
                                     "--mode reverse --pool positional-ramp --seed 5 --out " +
                                     out_d);
    REQUIRE(rd.exit_code == 0);
    CHECK(read_file(out_c + "/deltas.csv") != read_file(out_d + "/deltas.csv"));

    const auto rs = run_cli(dir, "ablate" + corpus_args(data) +
                                     "--mode single-frame --seed 5 --out " +
                                     (dir.path() / "s").string());
    CHECK(rs.exit_code == 0);
}

TEST_CASE("interleave consumes exported rank tables") {
    TempDir dir("cli_interleave");
    const auto data = gen_data(dir);
    const std::string m = (dir.path() / "m").string();
    REQUIRE(run_cli(dir, "metrics" + corpus_args(data) + "--out " + m).exit_code == 0);

    const std::string out = (dir.path() / "il").string();
    const auto r = run_cli(dir, "interleave --real-ranks " + m + "/ranks_real.csv" +
                                    " --ai-ranks " + m + "/ranks_ai.csv --seed 3 --seeds 4" +
                                    " --out " + out);
    REQUIRE(r.exit_code == 0);
    for (const char* name : {"interleaved_real.csv", "interleaved_ai.csv",
                             "location_delta.json", "location_delta.csv", "manifest.json"}) {
        CHECK(fs::exists(fs::path(out) / name));
    }
}

TEST_CASE("train-debias with zero epochs stores the identity projection") {
    TempDir dir("cli_train0");
    const auto data = gen_data(dir);
    const std::string out = (dir.path() / "t").string();
    const auto r = run_cli(dir, "train-debias" + corpus_args(data) +
                                    "--epochs 0 --frames 5 --out " + out);
    REQUIRE(r.exit_code == 0);
    const auto params = vsb::load_params_json(out + "/params.json");
    CHECK(params.w == vsb::ScorerParams::identity(8, params.tau).w);
    CHECK(fs::exists(fs::path(out) / "history.csv"));
    CHECK(fs::exists(fs::path(out) / "eval_before.json"));
    CHECK(fs::exists(fs::path(out) / "eval_after.json"));
}

TEST_CASE("train-debias reruns byte-identically") {
    TempDir dir("cli_train");
    const auto data = gen_data(dir);
    const std::string out_a = (dir.path() / "ta").string();
    const std::string out_b = (dir.path() / "tb").string();
    const std::string args = "train-debias" + corpus_args(data) +
                             "--epochs 3 --batch-size 8 --frames 5 --seed 9 --out ";
    REQUIRE(run_cli(dir, args + out_a).exit_code == 0);
    REQUIRE(run_cli(dir, args + out_b).exit_code == 0);
    CHECK(read_file(out_a + "/params.json") == read_file(out_b + "/params.json"));
    CHECK(read_file(out_a + "/history.csv") == read_file(out_b + "/history.csv"));
}

TEST_CASE("the pvector pipeline runs end to end") {
    TempDir dir("cli_pvector");
    const auto data = gen_data(dir);
    const std::string t = (dir.path() / "t").string();
    REQUIRE(run_cli(dir, "train-debias" + corpus_args(data) +
                             "--epochs 4 --batch-size 8 --frames 5 --rho 0.5 --out " + t)
                .exit_code == 0);

    // identical original and debiased params -> all-zero p vectors
    const std::string pz = (dir.path() / "pz").string();
    REQUIRE(run_cli(dir, "pvector extract --original " + t + "/params.json --debiased " + t +
                             "/params.json --corpus " + data + "/ai.jsonl --frames 5 --out " +
                             pz)
                .exit_code == 0);
    const auto zero_set = vsb::load_pvectors_jsonl(pz + "/pvectors.jsonl");
    for (double x : zero_set.p_avg) {
        CHECK(x == 0.0);
    }

    const std::string p = (dir.path() / "p").string();
    REQUIRE(run_cli(dir, "pvector extract --debiased " + t + "/params.json --corpus " + data +
                             "/ai.jsonl --frames 5 --out " + p)
                .exit_code == 0);
    CHECK(fs::exists(fs::path(p) / "pvectors.jsonl"));

    const std::string pr = (dir.path() / "pr").string();
    REQUIRE(run_cli(dir, "pvector extract --debiased " + t + "/params.json --corpus " + data +
                             "/ai.jsonl --frames 5 --shuffled --out " + pr)
                .exit_code == 0);
    const auto random_set = vsb::load_pvectors_jsonl(pr + "/pvectors.jsonl");
    CHECK(random_set.variant == vsb::PVariant::random);

    const std::string ap = (dir.path() / "ap").string();
    REQUIRE(run_cli(dir, "pvector apply" + corpus_args(data) + "--pvectors " + p +
                             "/pvectors.jsonl --frames 5 --out " + ap)
                .exit_code == 0);
    for (const char* name :
         {"before.json", "after.json", "shift_delta.json", "shift_delta.csv"}) {
        CHECK(fs::exists(fs::path(ap) / name));
    }

    const std::string st = (dir.path() / "st").string();
    REQUIRE(run_cli(dir, "pvector stats --pvectors " + p + "/pvectors.jsonl --corpus " + data +
                             "/ai.jsonl --frames 5 --out " + st)
                .exit_code == 0);
    for (const char* name : {"cluster_stats.json", "projection.csv", "projection.svg"}) {
        CHECK(fs::exists(fs::path(st) / name));
    }

    // report renders the scatter from the exported projection
    const auto rr = run_cli(dir, "report --scatter " + st + "/projection.csv --out " +
                                     dir.file("scatter.svg"));
    CHECK(rr.exit_code == 0);
    CHECK(fs::exists(dir.file("scatter.svg")));
}

TEST_CASE("ttest and flow subcommands write their reports") {
    TempDir dir("cli_stats");
    const auto data = gen_data(dir);
    const std::string tt = (dir.path() / "tt").string();
    REQUIRE(run_cli(dir, "ttest" + corpus_args(data) + "--frames 5 --out " + tt).exit_code ==
            0);
    const auto ttest = nlohmann::json::parse(read_file(tt + "/ttest.json"));
    CHECK(ttest.contains("t_statistic"));
    CHECK(ttest.contains("p_value"));
    CHECK(ttest["degrees_of_freedom"] == 39);

    const std::string fl = (dir.path() / "fl").string();
    REQUIRE(run_cli(dir, "flow --synth-pairs 20 --bins 16 --seed 3 --out " + fl).exit_code ==
            0);
    const auto flow = nlohmann::json::parse(read_file(fl + "/flow.json"));
    CHECK(flow["higher_count_real"].get<int>() +
              flow["higher_count_ai"].get<int>() <= 20);
    CHECK(fs::exists(fs::path(fl) / "flow.csv"));

    const auto bad = run_cli(dir, "flow --out " + (dir.path() / "fx").string());
    CHECK(bad.exit_code == 2);
}

TEST_CASE("report renders a bar chart from a delta report") {
    TempDir dir("cli_report");
    const auto data = gen_data(dir);
    const std::string m = (dir.path() / "m").string();
    REQUIRE(run_cli(dir, "metrics" + corpus_args(data) + "--out " + m).exit_code == 0);
    const auto r =
        run_cli(dir, "report --deltas " + m + "/deltas.json --out " + dir.file("chart.svg"));
    CHECK(r.exit_code == 0);
    const auto svg = read_file(dir.file("chart.svg"));
    CHECK(svg.find("<svg") != std::string::npos);

    CHECK(run_cli(dir, "report --out x.svg").exit_code == 2);
}

TEST_CASE("config files supply defaults that flags override") {
    TempDir dir("cli_config");
    const auto data = gen_data(dir);
    write_file(dir.file("run.cfg"), "[metrics]\nreal = " + data + "/real.jsonl\nai = " + data +
                                        "/ai.jsonl\nqueries = " + data +
                                        "/queries.jsonl\nrel = " + data +
                                        "/relevance.jsonl\nseed = 21\nout = " +
                                        (dir.path() / "cfg_out").string() + "\n");
    const auto r = run_cli(dir, "--config " + dir.file("run.cfg") + " metrics");
    REQUIRE(r.exit_code == 0);
    const auto manifest =
        nlohmann::json::parse(read_file((dir.path() / "cfg_out" / "manifest.json").string()));
    CHECK(manifest["seed"] == 21);
}

int main(int argc, char** argv) {
    if (argc < 2) {
        std::fprintf(stderr, "usage: test_cli <path-to-vsb-binary> [doctest args]\n");
        return 1;
    }
    g_bin = argv[1];
    doctest::Context context;
    context.applyCommandLine(argc - 1, argv + 1);
    return context.run();
}
