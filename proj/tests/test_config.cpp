#include <gtest/gtest.h>

#include "bep/experiment.hpp"

using namespace bep;

namespace {

std::string message_of(const std::string& text) {
    try {
        parse_config(text, "cfg.json");
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

bool contains(const std::string& haystack, const std::string& needle) {
    return haystack.find(needle) != std::string::npos;
}

}  // namespace

TEST(Config, ShippedPresetFile) {
    const auto cfg = load_config(BEP_PRESET_DIR "/section5.json");
    EXPECT_EQ(cfg.preset, "section5");
    EXPECT_EQ(cfg.solver, SolverKind::Ipa);
    EXPECT_EQ(cfg.schedule.alpha, 0.1);
    EXPECT_EQ(cfg.schedule.lambda, (PowerRule{1.0, 1.0}));
    EXPECT_EQ(cfg.schedule.beta, (PowerRule{1.0, 1.0}));
    EXPECT_EQ(cfg.x0, (Vector(2) << 0.0, 0.5).finished());
    const auto problem = resolve_problem(cfg).problem;
    EXPECT_TRUE(problem.f.is<DifferenceBifunction>());
    EXPECT_TRUE(problem.f.as<DifferenceBifunction>().h.is<AffineSquaredPiece>());
}

TEST(Config, EveryShippedFileLoads) {
    for (const char* name : {"section5", "saddle-example", "hmp-distance", "inline-example"}) {
        EXPECT_NO_THROW(load_config(std::string(BEP_PRESET_DIR) + "/" + name + ".json")) << name;
    }
}

TEST(Config, EmptyFileIsParseError) {
    const auto msg = message_of("");
    EXPECT_TRUE(contains(msg, "parse error")) << msg;
    EXPECT_TRUE(contains(msg, "cfg.json:1:1")) << msg;
}

TEST(Config, ParseErrorReportsLineAndColumn) {
    const auto msg = message_of("{\n  \"problem\": {\"preset\": \"section5\"},\n  \"solver\": ipa\n}");
    EXPECT_TRUE(contains(msg, "cfg.json:3:")) << msg;
}

TEST(Config, AlphaOutOfRangeNamesField) {
    const auto msg = message_of(R"({"problem": {"preset": "section5"}, "schedule": {"alpha": 1.5}})");
    EXPECT_TRUE(contains(msg, "schedule.alpha")) << msg;
}

TEST(Config, UnknownFieldsRejectedWithPath) {
    auto msg = message_of(R"({"problem": {"preset": "section5"}, "schedule": {"alpah": 0.2}})");
    EXPECT_TRUE(contains(msg, "$.schedule.alpah: unknown field")) << msg;
    msg = message_of(R"({"problem": {"inline": {"f": {"kind": "difference", "h": {"kind": "zero", "dim": 2, "x": 1}},
                      "g": {"kind": "difference", "h": {"kind": "zero", "dim": 2}}, "K": {"kind": "whole_space", "dim": 2}}},
                      "start": {"x0": [0, 0]}})");
    EXPECT_TRUE(contains(msg, "$.problem.inline.f.h.x: unknown field")) << msg;
}

TEST(Config, ProblemSourceMustBeUnique) {
    EXPECT_TRUE(contains(message_of(R"({"problem": {}})"), "exactly one"));
    EXPECT_TRUE(contains(message_of(R"({"problem": {"preset": "section5", "inline": {}}})"), "exactly one"));
    EXPECT_TRUE(contains(message_of(R"({"solver": "ipa"})"), "problem"));
    EXPECT_TRUE(contains(message_of(R"({"problem": {"preset": "nope"}})"), "unknown preset"));
}

TEST(Config, ZeroIterationBudgetRejected) {
    const auto msg = message_of(R"({"problem": {"preset": "section5"}, "stopping": {"max_iterations": 0}})");
    EXPECT_TRUE(contains(msg, "stopping.max_iterations")) << msg;
}

TEST(Config, SemanticChecks) {
    EXPECT_TRUE(contains(message_of(R"({"problem": {"preset": "section5"}, "start": {"x0": [1, 2, 3]}})"), "start.x0"));
    EXPECT_TRUE(contains(message_of(R"({"problem": {"preset": "section5"}, "solver": "ppm"})"), "ppm"));
    EXPECT_TRUE(contains(message_of(R"({"problem": {"preset": "section5"}, "solver": "newton"})"), "$.solver"));
    EXPECT_TRUE(contains(message_of(R"({"problem": {"preset": "saddle-example"}, "start": {"x0": [2, 0]}})"), "in K"));
    EXPECT_TRUE(contains(message_of(R"({"problem": {"preset": "section5"}, "inner": {"tolerance": -1}})"), "inner.tolerance"));
}

TEST(Config, InvalidPieceReportsItsPath) {
    const auto msg = message_of(R"({"problem": {"inline": {
        "f": {"kind": "difference", "h": {"kind": "quadratic", "Q": [[1, 0], [0, -1]], "b": [0, 0]}},
        "g": {"kind": "difference", "h": {"kind": "zero", "dim": 2}},
        "K": {"kind": "whole_space", "dim": 2}}}, "start": {"x0": [0, 0]}})");
    EXPECT_TRUE(contains(msg, "$.problem.inline.f.h")) << msg;
    EXPECT_TRUE(contains(msg, "negative eigenvalue")) << msg;
}

TEST(Config, RoundTripPresetsAndInline) {
    for (const auto& name : preset_names()) {
        const auto cfg = preset_config(name);
        EXPECT_EQ(parse_config(serialize_config(cfg)), cfg) << name;
    }
    auto cfg = load_config(BEP_PRESET_DIR "/inline-example.json");
    cfg.schedule.lambda_override = std::vector<double>{0.5, 0.25};
    cfg.diagnostics.seed = 18446744073709551615ull;
    const auto again = parse_config(serialize_config(cfg));
    EXPECT_EQ(again, cfg);
    EXPECT_EQ(serialize_config(again), serialize_config(cfg));
    // unbounded box sides survive as null
    EXPECT_TRUE(std::isinf(again.problem->K.as<Box>().upper[0]));
}

TEST(Config, RoundTripPreservesDoublesExactly) {
    auto cfg = preset_config("section5");
    cfg.schedule.alpha = 0.1 + 0.2;
    cfg.x0[0] = 1.0 / 3.0;
    const auto again = parse_config(serialize_config(cfg));
    EXPECT_EQ(again.schedule.alpha, cfg.schedule.alpha);
    EXPECT_EQ(again.x0[0], cfg.x0[0]);
}

TEST(Config, PresetFieldsCanBeOverridden) {
    const auto cfg = parse_config(R"({"problem": {"preset": "section5"}, "schedule": {"beta": {"exponent": 2}}})");
    EXPECT_EQ(cfg.schedule.beta, (PowerRule{1.0, 2.0}));
    EXPECT_EQ(cfg.schedule.alpha, 0.1);
}

TEST(Config, MissingFileIsConfigError) {
    EXPECT_THROW(load_config("/nonexistent/config.json"), ConfigError);
}
