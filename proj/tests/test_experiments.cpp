#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "ldg/experiments.hpp"

using namespace ldg;
namespace fs = std::filesystem;

namespace {
fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("ldg-expt-" + name);
    fs::remove_all(dir);
    return dir;
}

ExperimentConfig parse(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
}

nlohmann::json without_timing(nlohmann::json env) {
    env.erase("timing");
    return env;
}
}  // namespace

TEST_CASE("config parsing") {
    const auto cfg = parse("# comment\nkind = cigar\nh = 4   # trailing\nheights = 4, 8,12\n\n");
    CHECK(cfg.kind == "cigar");
    CHECK(cfg.real("h") == 4.0);
    CHECK(cfg.list("heights") == std::vector<double>{4.0, 8.0, 12.0});
    CHECK_THROWS_AS(parse("h = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse("kind = cigar\nh 4\n"), ConfigError);
    CHECK_THROWS_AS(parse("kind = cigar\nh = 1\nh = 2\n"), ConfigError);
    auto unknown = parse("kind = warp\n");
    unknown.output_dir = "unused";
    CHECK_THROWS_AS(complete_config(unknown), ConfigError);
}

TEST_CASE("config completion and validation") {
    for (const auto& kind : experiment_kinds()) {
        auto cfg = parse("kind = " + kind + "\n");
        cfg.output_dir = "unused";
        const auto full = complete_config(cfg);
        CHECK(full.params.count("seed") == 1);
        CHECK(full.params.count("checks") == 1);
    }
    auto cfg = parse("kind = gap-2d\nbogus = 1\n");
    CHECK_THROWS_AS(complete_config(cfg), ConfigError);
    cfg = parse("kind = gap-2d\ntol = 0\n");
    CHECK_THROWS_AS(complete_config(cfg), ConfigError);
    cfg = parse("kind = gap-2d\nlambda = -1\n");
    CHECK_THROWS_AS(complete_config(cfg), ConfigError);
    cfg = parse("kind = gap-2d\nN = abc\n");
    CHECK_THROWS_AS(complete_config(cfg).real("N"), ConfigError);
}

TEST_CASE("closed-form verification envelope") {
    const auto dir = scratch("closed");
    auto cfg = parse("kind = verify-closed-forms\nN = 512\nsquare = 129\ntol_energy = 1e-2\n");
    cfg.output_dir = dir.string();
    const auto env = run_experiment(cfg, {2, "test"});
    CHECK(fs::exists(dir / "verify-closed-forms.json"));
    CHECK(env["version"] == "test");
    CHECK(env.contains("timing"));
    CHECK(!env["summary"].empty());
    for (const auto& e : env["summary"]) {
        CHECK(e.contains("name"));
        CHECK(e.contains("tolerance"));
        CHECK((e["pass"].is_null() || e["pass"].is_boolean()));
    }
}

TEST_CASE("envelopes do not depend on the worker count") {
    const auto a = scratch("det");
    auto cfg = parse("kind = gap-2d\nN = 64\nchecks = 0\n");
    cfg.output_dir = a.string();
    const auto one = without_timing(run_experiment(cfg, {1, "test"}));
    const auto four = without_timing(run_experiment(cfg, {4, "test"}));
    CHECK(one == four);
    const auto& runs = one["runs"];
    REQUIRE(runs.size() >= 2);
    CHECK(runs[0]["id"] == "run-000");

    SUBCASE("field export") {
        std::string field;
        for (const auto& p : fs::directory_iterator(a))
            if (p.path().string().find(".field.json") != std::string::npos) field = p.path().string();
        REQUIRE(!field.empty());
        const auto csv = field_csv(field);
        CHECK(csv.rfind("r,", 0) == 0);
        CHECK(std::count(csv.begin(), csv.end(), '\n') == 66);
    }

    SUBCASE("report") {
        auto coarse = cfg;
        coarse.params["N"] = "32";
        coarse.output_dir = scratch("det-coarse").string();
        run_experiment(coarse, {2, "test"});
        const auto md = render_report({(a / "gap-2d.json").string(), coarse.output_dir + "/gap-2d.json",
                                       (a / "missing.json").string()});
        CHECK(md.find("Richardson") != std::string::npos);
        CHECK(md.find("## Unavailable") != std::string::npos);
        CHECK(md.find("missing.json") != std::string::npos);
        CHECK_THROWS_AS(render_report({}), ConfigError);
    }
}
