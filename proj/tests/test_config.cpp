#include "sconv/commands.hpp"
#include "sconv/config.hpp"
#include "sconv/parallel.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace sconv;
namespace fs = std::filesystem;

namespace {

std::string error_of(std::string_view text)
{
    try {
        parse_config(text, "test.json");
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

constexpr std::string_view minimal = R"({
  "seed": 3,
  "horizon": 1.0,
  "generator": {"eigenvalues": [-1.0, 0.0]},
  "marks": [{"nu": 1.0}],
  "x0": [1.0, 2.0],
  "jumps": {"base": [[0.5, 0.5]]}
})";

fs::path scratch(const std::string& name)
{
    const fs::path dir = fs::temp_directory_path() / ("sconv-test-" + name);
    fs::remove_all(dir);
    return dir;
}

}  // namespace

TEST_CASE("minimal convolution config")
{
    const ExperimentConfig cfg = parse_config(minimal, "test.json");
    CHECK(cfg.seed == 3);
    CHECK(cfg.kind == ScenarioKind::convolution);
    REQUIRE(cfg.convolution);
    CHECK(cfg.convolution->gen.dim() == 2);
    CHECK(cfg.paths == 100);
    CHECK(cfg.resolved_json.find("\"grid\"") != std::string::npos);
}

TEST_CASE("syntax errors report line and column")
{
    const std::string msg = error_of("{\n  \"seed\": 1,\n  \"paths\": ]\n}");
    CHECK(msg.find("test.json") != std::string::npos);
    CHECK(msg.find("line 3") != std::string::npos);
}

TEST_CASE("field errors name the JSON pointer")
{
    CHECK(error_of(R"({"horizon": 1})").find("/seed") != std::string::npos);
    std::string bad(minimal);
    bad.replace(bad.find("[1.0, 2.0]"), 10, "[1.0]");
    CHECK(error_of(bad).find("/x0") != std::string::npos);
    bad = std::string(minimal);
    bad.replace(bad.find("\"nu\": 1.0"), 9, "\"nu\": -1");
    CHECK(error_of(bad).find("/marks/0/nu") != std::string::npos);
    CHECK(error_of(R"({"seed": 1, "kind": "other"})").find("/kind") != std::string::npos);
    CHECK(error_of("[1, 2]").find("object") != std::string::npos);
}

TEST_CASE("overrides replace config fields")
{
    ConfigOverrides o;
    o.seed = 77;
    o.paths = 5;
    o.grid_levels = 2;
    o.workers = 3;
    o.out_dir = "somewhere";
    const ExperimentConfig cfg = parse_config(minimal, "test.json", o);
    CHECK(cfg.seed == 77);
    CHECK(cfg.paths == 5);
    CHECK(cfg.levels == 2);
    CHECK(cfg.workers == 3);
    CHECK(cfg.out_dir == fs::path("somewhere"));
}

TEST_CASE("every bundled scenario parses")
{
    for (const auto& s : bundled_scenarios()) {
        CAPTURE(s.name);
        const ExperimentConfig cfg = bundled_config(s.name);
        CHECK(cfg.scenario == s.name);
        CHECK((cfg.convolution.has_value() || cfg.equation.has_value()));
        if (cfg.equation)
            CHECK_NOTHROW(cfg.equation->validate());
    }
    CHECK_THROWS_AS(bundled_config("no-such-scenario"), ConfigError);
}

TEST_CASE("random battery scenarios stay within their ranges")
{
    for (std::uint64_t i = 0; i < 200; ++i) {
        RngStream s = derive_stream(1, i, StreamPurpose::scenario);
        const ConvolutionScenario c = random_convolution_scenario(s);
        CHECK(c.gen.dim() >= 1);
        CHECK(c.gen.dim() <= 8);
        CHECK(c.marks.size() <= 3);
        CHECK(c.horizon >= 0.5);
        CHECK(c.horizon <= 2.0);
        CHECK(c.x0.dim() == c.gen.dim());
    }
}

TEST_CASE("parallel_map keeps index order")
{
    const auto out = parallel_map(100, 4, [](std::size_t i) { return i * i; });
    for (std::size_t i = 0; i < out.size(); ++i)
        CHECK(out[i] == i * i);
    CHECK_THROWS_AS(parallel_map(10, 3, [](std::size_t i) -> int {
                        if (i == 7)
                            throw std::runtime_error("boom");
                        return 0;
                    }),
                    std::runtime_error);
}

TEST_CASE("summaries do not depend on the worker count")
{
    for (const char* name : {"zero-noise", "moment-zero", "ou-jump"}) {
        CAPTURE(name);
        std::ostringstream log;
        ConfigOverrides one{std::nullopt, 1u, std::nullopt, std::nullopt, scratch(std::string(name) + "-1")};
        ConfigOverrides many{std::nullopt, 4u, std::nullopt, std::nullopt, scratch(std::string(name) + "-4")};
        const ExperimentConfig a = bundled_config(name, one);
        const ExperimentConfig b = bundled_config(name, many);
        const Command command = a.convolution ? (std::string_view(name) == "moment-zero" ? Command::verify_moments
                                                                                       : Command::verify_pathwise)
                                              : Command::solve;
        const CommandOutcome ra = run_command(command, a, log);
        const CommandOutcome rb = run_command(command, b, log);
        CHECK(ra.exit_code == exit_code::pass);
        CHECK(ra.summary_json == rb.summary_json);
        std::ifstream file(*one.out_dir / "summary.json");
        std::stringstream disk;
        disk << file.rdbuf();
        CHECK(disk.str() == ra.summary_json);
    }
}

TEST_CASE("commands reject the wrong scenario kind")
{
    std::ostringstream log;
    ExperimentConfig cfg = bundled_config("zero-noise");
    cfg.out_dir = scratch("kind");
    CHECK_THROWS_AS(run_command(Command::solve, cfg, log), ConfigError);
    CHECK(parse_command("picard") == Command::picard);
    CHECK_FALSE(parse_command("nope").has_value());
    CHECK(command_name(Command::verify_moments) == "verify-moments");
}

TEST_CASE("solve writes path and jump tables")
{
    std::ostringstream log;
    ConfigOverrides o;
    o.out_dir = scratch("solve");
    o.paths = 3;
    const ExperimentConfig cfg = bundled_config("ou-jump", o);
    const CommandOutcome r = run_command(Command::solve, cfg, log);
    CHECK(r.exit_code == exit_code::pass);
    CHECK(fs::exists(*o.out_dir / "paths" / "path_0000.csv"));
    CHECK(fs::exists(*o.out_dir / "paths" / "jumps_0002.csv"));
    CHECK(fs::exists(*o.out_dir / "config.json"));
    CHECK(r.summary_json.find("closed_form") != std::string::npos);
}
