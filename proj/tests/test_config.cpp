#include "crtlab/config.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace crtlab;

namespace {

std::optional<RunConfig> parse(std::vector<const char*> args) {
    args.insert(args.begin(), "crtlab");
    return parse_config(static_cast<int>(args.size()), args.data());
}

std::string temp_file(const char* name) { return (std::filesystem::temp_directory_path() / name).string(); }

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("defaults without arguments") {
    const auto cfg = parse({});
    REQUIRE(cfg);
    CHECK(cfg->command == "verify");
    CHECK(cfg->alpha == 2.0);
    CHECK(cfg->c == 1.0);
    CHECK(cfg->seed == 0);
    CHECK(cfg->workers == 1);
    CHECK(cfg->only.empty());
}

TEST_CASE("global flags before the subcommand") {
    const auto cfg = parse({"--alpha", "1.5", "--seed", "42", "verify", "--only", "ray_knight"});
    REQUIRE(cfg);
    CHECK(cfg->alpha == 1.5);
    CHECK(cfg->seed == 42);
    CHECK(cfg->only == std::vector<std::string>{"ray_knight"});
    const SuiteParams p = suite_params(*cfg);
    CHECK(p.ray_knight.alpha == 1.5);
    CHECK(p.pointed_ball.mech.alpha() == 1.5);
}

TEST_CASE("usage errors") {
    CHECK_THROWS_AS(parse({"--alpha", "3"}), ConfigError);
    CHECK_THROWS_AS(parse({"--alpha", "abc"}), ConfigError);
    CHECK_THROWS_AS(parse({"--bogus", "1"}), ConfigError);
    CHECK_THROWS_AS(parse({"verify", "--only", "nonexistent"}), ConfigError);
    CHECK_THROWS_AS(parse({"--preset", "medium"}), ConfigError);
    CHECK_THROWS_AS(parse({"--n-lo", "8", "--n-hi", "4"}), ConfigError);
    CHECK_THROWS_AS(parse({"--config", "/nonexistent/crtlab.cfg"}), ConfigError);
    RunConfig cfg;
    CHECK_THROWS_AS(apply_config_value(cfg, "colour", "red"), ConfigError);
    CHECK_THROWS_AS(apply_config_text(cfg, "alpha 1.5"), ConfigError);
}

TEST_CASE("help returns no config") {
    std::string help;
    const char* argv[] = {"crtlab", "--help"};
    CHECK_FALSE(parse_config(2, argv, &help));
    CHECK(help.find("--alpha") != std::string::npos);
}

TEST_CASE("config files and flag precedence") {
    const auto file = temp_file("crtlab_cfg_test.cfg");
    {
        std::ofstream out(file);
        out << "# sizes\nalpha = 1.7\nseed=9; n_reps=50\ngauge=\"stable_mass:1.7:-1\"\n";
    }
    const auto cfg = parse({"--config", file.c_str(), "--seed", "3", "calibrate"});
    REQUIRE(cfg);
    CHECK(cfg->alpha == 1.7);
    CHECK(cfg->seed == 3);
    CHECK(cfg->n_reps == 50u);
    CHECK(cfg->gauge == "stable_mass:1.7:-1");
    CHECK(cfg->command == "calibrate");
    std::filesystem::remove(file);
}

TEST_CASE("echo round trip and hash") {
    const auto cfg = parse({"--alpha", "1.5", "--n-scale", "80", "--u-grid", "-1,2", "--workers", "4", "density"});
    REQUIRE(cfg);
    RunConfig again;
    apply_config_text(again, cfg->echo());
    CHECK(again.echo() == cfg->echo());
    CHECK(again.hash() == cfg->hash());
    CHECK(cfg->hash().size() == 16);
    // workers and output do not change results
    RunConfig other = *cfg;
    other.workers = 1;
    other.output = "elsewhere.csv";
    CHECK(other.hash() == cfg->hash());
    other.seed = 1;
    CHECK(other.hash() != cfg->hash());
    CHECK(cfg->echo().find("workers") == std::string::npos);
}

TEST_CASE("defaulted alpha and c leave the suite alone") {
    const auto plain = parse({});
    REQUIRE(plain);
    const SuiteParams p = suite_params(*plain);
    CHECK(p.pointed_ball.mech.alpha() == 1.5);
    CHECK(p.stable_density.mech.alpha() == 1.5);
    const auto quick = parse({"--preset", "quick", "--n-points", "33"});
    REQUIRE(quick);
    const SuiteParams q = suite_params(*quick);
    CHECK(q.pitman.n_samples < p.pitman.n_samples);
    CHECK(q.level_ball.n_points == 33);
}

TEST_CASE("emitters") {
    const auto cfg = parse({"--seed", "5", "density"});
    REQUIRE(cfg);
    const auto file = temp_file("crtlab_emit_test.csv");
    std::filesystem::remove(file);
    CHECK_THROWS(emit_csv({"point_id", "n", "ratio"}, {}, *cfg, file));
    CHECK_FALSE(std::filesystem::exists(file));
    CHECK_THROWS(emit_jsonl({}, *cfg, file));
    CHECK_FALSE(std::filesystem::exists(file));

    emit_csv({"point_id", "n", "ratio"}, {{"0", "4", "1.5"}, {"0", "5", "1.25"}}, *cfg, file);
    const std::string first = slurp(file);
    emit_csv({"point_id", "n", "ratio"}, {{"0", "4", "1.5"}, {"0", "5", "1.25"}}, *cfg, file);
    CHECK(slurp(file) == first);
    std::istringstream lines(first);
    std::string header, columns;
    std::getline(lines, header);
    std::getline(lines, columns);
    CHECK(header.rfind("# crtlab " + std::string(kToolVersion) + " config_hash=" + cfg->hash(), 0) == 0);
    CHECK(columns == "point_id,n,ratio");
    CHECK_THROWS(emit_csv({"a", "b"}, {{"1"}}, *cfg, file));

    emit_jsonl({"{\"x\":1}"}, *cfg, file);
    const std::string jl = slurp(file);
    CHECK(jl.find(cfg->hash()) != std::string::npos);
    CHECK(jl.substr(jl.size() - 8) == "{\"x\":1}\n");
    std::filesystem::remove(file);
}
