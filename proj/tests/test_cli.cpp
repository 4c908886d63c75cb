#include <cstdlib>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "rankone/cli.hpp"
#include "rankone/errors.hpp"

using namespace rankone;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("rankone_cli_test_" + std::to_string(::getpid())) / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

std::string key_of(const std::string& text) {
    try {
        cli::parse_config(text);
    } catch (const ValidationError& e) {
        return e.key();
    }
    return "";
}

int run(const std::string& command, const std::string& config_text, const fs::path& out) {
    std::ostringstream log;
    return cli::run_command(command, cli::parse_config(config_text), out, log);
}

int run_binary(const std::string& args) {
    const std::string cmd = std::string(RANKONE_CLI) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

const char* kGeometric = R"({"family": "geometric", "depth": 6, "params": {"c": 1}})";

}  // namespace

TEST_CASE("config validation names the offending key") {
    CHECK(key_of(R"({"family": "zero", "depth": 3, "params": {"p": 2}, "colour": 1})") == "colour");
    CHECK(key_of(R"({"family": "zero", "depth": 3, "params": {"p": 2, "q": 1}})") == "params.q");
    CHECK(key_of(R"({"family": "zero", "depth": 3, "params": {"p": 0}})") == "params.p");
    CHECK(key_of(R"({"family": "zero", "depth": 3, "params": {"p": [2, -1]}})") == "params.p[1]");
    CHECK(key_of(R"({"family": "explicit", "depth": 1, "params": {"spacers": [[1], [0, -3]]}})") ==
          "params.spacers[1][1]");
    CHECK(key_of(R"({"family": "explicit", "depth": 2, "params": {"spacers": [[1], [0, 3]]}})") == "depth");
    CHECK(key_of(R"({"family": "spiral", "depth": 3, "params": {}})") == "family");
    CHECK(key_of(R"({"family": "zero", "params": {"p": 2}})") == "depth");
    CHECK(key_of(R"({"family": "zero", "depth": 3, "params": {"p": 2}, "clt": {"stage": 1, "bins": 3}})") ==
          "clt.bins");
    CHECK(key_of(R"({"family": "zero", "depth": 3, "params": {"p": 2}, "grid": {"log2_cap": 40}})") ==
          "grid.log2_cap");
    CHECK(key_of(R"({"family": "ornstein", "depth": 1, "params": {"p": 4, "t": 4, "xi": {"uniform": [-3, 3]}}})") ==
          "params.xi[0].support");
    CHECK(key_of("{\n  \"family\": \"zero\",\n  \"depth\": 3,\n  oops\n}") == "<syntax>");
    try {
        cli::parse_config("{\n  \"family\": \"zero\",\n  \"depth\": 3,\n  oops\n}");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("line 4") != std::string::npos);
    }
    CHECK(key_of(kGeometric).empty());
}

TEST_CASE("big integers arrive as decimal strings") {
    const auto c = cli::parse_config(
        R"({"family": "explicit", "depth": 1, "params": {"spacers": [["123456789012345678901234567890"], [0, 1]]}})");
    const auto& rule = std::get<ExplicitRule>(*c.family.rule);
    CHECK(rule.spacers[0][0] == BigInt("123456789012345678901234567890"));
    CHECK(key_of(R"({"family": "explicit", "depth": 1, "params": {"spacers": [["12a"], [0]]}})") ==
          "params.spacers[0][0]");
}

TEST_CASE("describe: geometric satisfies the conditions, staircase does not") {
    auto out = scratch("describe_geo");
    CHECK(run("describe", kGeometric, out) == 0);
    auto doc = nlohmann::json::parse(slurp(out / "describe.json"));
    CHECK(doc["thm21_all"] == true);
    CHECK(doc["stages"].size() == 7);
    CHECK(doc["stages"][0]["height"] == "1");
    for (const auto& s : doc["stages"]) {
        CHECK(s["thm21_i"] == true);
        CHECK(s["thm21_ii"] == true);
    }
    CHECK(fs::exists(out / "describe_stages.csv"));
    CHECK(fs::exists(out / "metadata.json"));

    out = scratch("describe_stair");
    CHECK(run("describe", R"({"family": "staircase", "depth": 6, "params": {"p": [2, 3, 4, 5]}})", out) == 0);
    doc = nlohmann::json::parse(slurp(out / "describe.json"));
    CHECK(doc["thm21_all"] == false);
    for (const auto& s : doc["stages"]) CHECK(s["thm21_i"] == (s["p"].get<int>() < 4));
}

TEST_CASE("words: ten columns give 59049 vectors, distinct") {
    const auto out = scratch("words");
    const char* cfg = R"({"family": "geometric", "depth": 12,
        "params": {"c": 1, "p_floor": 10, "p_cap": 10, "lift_columns": 3}, "words": {"csv": true}})";
    CHECK(run("words", cfg, out) == 0);
    const auto doc = nlohmann::json::parse(slurp(out / "words.json"));
    CHECK(doc["p"] == 10);
    CHECK(doc["count"] == 59049);
    CHECK(doc["distinct"] == true);
    std::ifstream csv(out / "words.csv");
    std::string header;
    std::getline(csv, header);
    CHECK(header == "word,r,eps");
}

TEST_CASE("bourgain writes a decay curve with one row per step") {
    const auto out = scratch("bourgain");
    const char* cfg = R"({"family": "geometric", "depth": 14, "params": {"c": 1},
        "grid": {"log2_cap": 18}, "bourgain": {"budget": 4, "first": 2}})";
    const int rc = run("bourgain", cfg, out);
    const auto doc = nlohmann::json::parse(slurp(out / "bourgain.json"));
    CHECK(doc["values"].size() == doc["deltas"].size());
    CHECK(doc["values"].size() == doc["grid_N"].size());
    // the search stops early once the window beyond the last pick is empty
    const std::size_t steps = doc["values"].size();
    CHECK(steps >= 1);
    CHECK(steps <= 4);
    bool monotone = true;
    for (std::size_t i = 1; i < doc["values"].size(); ++i)
        monotone = monotone && doc["values"][i].get<double>() <= doc["values"][i - 1].get<double>();
    CHECK(rc == (monotone ? 0 : 1));
    std::ifstream csv(out / "bourgain_decay.csv");
    std::string line;
    std::size_t rows = 0;
    while (std::getline(csv, line)) ++rows;
    CHECK(rows == steps + 1);
}

TEST_CASE("theta reports the violated coefficient bound with exit 1") {
    const auto out = scratch("theta");
    const char* cfg = R"({"family": "geometric", "depth": 6,
        "params": {"c": 1, "p_floor": 4, "p_cap": 4, "lift_columns": 3}, "theta": {"x": [1.0]}})";
    CHECK(run("theta", cfg, out) == 1);
    const auto doc = nlohmann::json::parse(slurp(out / "theta.json"));
    CHECK(doc["invariant_failures"][0] == "rho_bound");
    CHECK(doc["runs"][0]["sup_norm"].get<double>() <= doc["runs"][0]["sup_bound"].get<double>());
}

TEST_CASE("every estimate carries a delta or a standard error") {
    const auto out = scratch("riesz");
    const char* cfg = R"({"family": "geometric", "depth": 7, "params": {"c": 1},
        "riesz": {"selection": [2, 4], "stage": 6, "weak_frequency": 3}})";
    CHECK(run("riesz", cfg, out) == 0);
    const auto doc = nlohmann::json::parse(slurp(out / "riesz.json"));
    for (const auto& m : doc["mass"])
        if (m.contains("value")) CHECK(m.contains("convergence_delta"));
    for (const char* k : {"l1_product", "lemma23", "l1_deviation", "weak_convergence"})
        CHECK(doc[k].contains("convergence_delta"));
}

TEST_CASE("same config and seed give byte-identical reports") {
    const char* cfg = R"({"family": "ornstein", "depth": 1, "seed": 7,
        "params": {"p": 16, "t": 10, "top": 2, "xi": {"uniform": [-5, 5]}},
        "ornstein": {"samples": 200, "omega_samples": 10000, "tolerance": 1e-4}})";
    const auto a = scratch("rep_a"), b = scratch("rep_b"), c = scratch("rep_c");
    CHECK(run("ornstein", cfg, a) == 0);
    CHECK(run("ornstein", cfg, b) == 0);
    CHECK(slurp(a / "ornstein.json") == slurp(b / "ornstein.json"));
    CHECK(slurp(a / "ornstein_omega_hist.csv") == slurp(b / "ornstein_omega_hist.csv"));
    auto changed = cli::parse_config(cfg);
    cli::apply_overrides(changed, {.seed = 8});
    std::ostringstream log;
    CHECK(cli::run_command("ornstein", changed, c, log) == 0);
    CHECK(slurp(a / "ornstein.json") != slurp(c / "ornstein.json"));
    const auto doc = nlohmann::json::parse(slurp(a / "ornstein.json"));
    CHECK(doc["lemma44"].contains("stderr"));
    CHECK(doc["clt"].contains("n"));
}

TEST_CASE("exit codes of the binary") {
    const auto dir = scratch("binary");
    const auto good = dir / "good.json", bad = dir / "bad.json";
    std::ofstream(good) << kGeometric;
    std::ofstream(bad) << R"({"family": "explicit", "depth": 1, "params": {"spacers": [[1], [-2]]}})";
    CHECK(run_binary("describe --config " + good.string() + " --out " + (dir / "o").string()) == 0);
    CHECK(run_binary("describe --config " + bad.string() + " --out " + (dir / "o").string()) == 2);
    CHECK(run_binary("describe --config " + (dir / "missing.json").string()) == 2);
    CHECK(run_binary("frobnicate --config " + good.string()) == 2);
    CHECK(run_binary("riesz --config " + good.string() + " --out " + (dir / "o").string() + " --grid-cap 99") == 2);
}
