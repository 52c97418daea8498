// Drives the installed command-line surface through a shell, checking the
// documented subcommands and exit codes.

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "helpers.hpp"

using test_helpers::TempDir;
namespace fs = std::filesystem;

namespace {

#ifndef BASKETLAB_BIN
#error "BASKETLAB_BIN must point at the basketlab executable"
#endif

int run_cli(const std::string& args) {
    const std::string command = std::string(BASKETLAB_BIN) + " " + args +
                                " >/dev/null 2>/dev/null";
    const int status = std::system(command.c_str());
    return WEXITSTATUS(status);
}

} // namespace

TEST_SUITE("cli") {

TEST_CASE("synth-ingest-reduce-mine-validate chain succeeds") {
    TempDir dir("cli");
    const auto base = dir.path().string();
    CHECK(run_cli("synth --items 12 --baskets 600 --days 30 --seed 5 "
                  "--base-prob 0.25 --plant it1=>it6:0.9 -o " +
                  base + "/tx.csv") == 0);
    CHECK(run_cli("ingest --format wide --date-col date " + base + "/tx.csv -o " +
                  base + "/ds.bl --series " + base + "/se.bl") == 0);
    CHECK(run_cli("reduce --targets it1,it6 --policy cooccur --min-cooccur 1 " +
                  base + "/ds.bl -o " + base + "/red.bl --stats " + base +
                  "/stats.json") == 0);
    CHECK(run_cli("mine --min-conf 0.70 --min-support 0.01 --max-size 4 " + base +
                  "/red.bl -o " + base + "/rules.json") == 0);
    CHECK(run_cli("validate --holdout " + base + "/ds.bl " + base +
                  "/rules.json -o " + base + "/validated.json") == 0);
    CHECK(run_cli("cluster -k 3 --seed 9 " + base + "/se.bl -o " + base +
                  "/clusters.json") == 0);
    CHECK(run_cli("forecast --item it1 --lags 5 --horizon 4 " + base +
                  "/se.bl -o " + base + "/forecast.json") == 0);
    for (const char* artifact : {"ds.bl", "se.bl", "red.bl", "stats.json",
                                 "rules.json", "validated.json", "clusters.json",
                                 "forecast.json"})
        CHECK(fs::exists(dir.path() / artifact));

    // every mined rule carries the documented fields and clears the gate
    const auto rules = nlohmann::json::parse(
        test_helpers::read_text(base + "/rules.json"));
    for (const auto& rule : rules) {
        CHECK(rule.contains("antecedent"));
        CHECK(rule.contains("consequent"));
        CHECK(rule.contains("support_count"));
        CHECK(rule.contains("relative_support"));
        CHECK(rule.at("confidence").get<double>() >= 0.70);
    }
}

TEST_CASE("accuracy subcommand reproduces the horizon from files") {
    TempDir dir("cli");
    const auto base = dir.path().string();
    test_helpers::write_text(
        base + "/forecast.json",
        R"([{"item":"a","lag_window":7,"horizon":5,"smoothing_k":15.0,
             "predictions":[14,12,11,16,17]},
            {"item":"b","lag_window":7,"horizon":5,"smoothing_k":15.0,
             "predictions":[8,7,8,10,11]},
            {"item":"c","lag_window":7,"horizon":5,"smoothing_k":15.0,
             "predictions":[25,22,26,29,31]},
            {"item":"d","lag_window":7,"horizon":5,"smoothing_k":15.0,
             "predictions":[14,14,16,16,22]}])");
    test_helpers::write_text(base + "/actuals.csv",
                             "product,r1,r2,r3,r4,r5\n"
                             "a,14,16,16,28,33\n"
                             "b,8,4,12,9,12\n"
                             "c,26,30,22,39,64\n"
                             "d,12,17,14,32,37\n");
    CHECK(run_cli("accuracy --threshold 70 " + base + "/forecast.json " + base +
                  "/actuals.csv -o " + base + "/report.json") == 0);
    const auto report = nlohmann::json::parse(
        test_helpers::read_text(base + "/report.json"));
    CHECK(report.at("validity_horizon") == 3);
    CHECK(report.at("average").at("accuracy_pct") ==
          nlohmann::json({96, 72, 77, 68, 63}));
}

TEST_CASE("run executes a config end to end") {
    TempDir dir("cli");
    const auto base = dir.path().string();
    REQUIRE(run_cli("synth --items 14 --baskets 1200 --days 50 --seed 11 "
                    "--base-prob 0.2 --plant it0=>it5:0.85 -o " +
                    base + "/tx.csv") == 0);
    test_helpers::write_text(base + "/cfg.json", R"({
        "input": {"path": ")" + base + R"(/tx.csv"},
        "reduction": {"targets": ["it0", "it5"]},
        "mining": {"min_support": 0.01, "min_confidence": 0.7},
        "forecast": {"top_k": 3, "lag_window": 6, "horizon": 4},
        "clustering": {"k": 4, "seed": 1},
        "out_dir": ")" + base + R"(/out"})");
    CHECK(run_cli("run --config " + base + "/cfg.json") == 0);
    CHECK(fs::exists(dir.path() / "out" / "summary.txt"));
    CHECK(fs::exists(dir.path() / "out" / "manifest.json"));
}

TEST_CASE("usage problems exit with code 1") {
    CHECK(run_cli("definitely-not-a-subcommand") == 1);
    CHECK(run_cli("mine") == 1);                       // missing required input
    CHECK(run_cli("ingest --format sideways x.csv") == 1);
    TempDir dir("cli");
    test_helpers::write_text(dir.file("cfg.json"),
                             R"({"input": {"path": "x.csv"},
                                 "mining": {"min_confidence": 1.01}})");
    CHECK(run_cli("run --config " + dir.file("cfg.json")) == 1);
}

TEST_CASE("data problems exit with code 2") {
    TempDir dir("cli");
    CHECK(run_cli("ingest " + dir.file("missing.csv")) == 2);
    CHECK(run_cli("mine " + dir.file("missing.bl")) == 2);
    test_helpers::write_text(dir.file("bad.csv"),
                             "date,a\n2014-01-05,-3\n");
    CHECK(run_cli("ingest " + dir.file("bad.csv") + " -o " + dir.file("o.bl")) == 2);
}

} // TEST_SUITE
