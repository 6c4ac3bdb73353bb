#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "bep/experiment.hpp"
#include "overloaded.hpp"

namespace bep {

using detail::overloaded;
using Json = nlohmann::ordered_json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& message) {
    throw ConfigError(path + ": " + message);
}

// Tracks which keys of an object were read so leftovers can be reported.
class ObjectReader {
public:
    ObjectReader(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) fail(path_, "expected an object");
    }

    const Json* optional(const std::string& key) {
        seen_.insert(key);
        auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }

    const Json& required(const std::string& key) {
        const Json* v = optional(key);
        if (!v) fail(path_, "missing required field '" + key + "'");
        return *v;
    }

    std::string at(const std::string& key) const { return path_ + "." + key; }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            if (!seen_.count(it.key())) fail(at(it.key()), "unknown field");
        }
    }

private:
    const Json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

double to_double(const Json& j, const std::string& path) {
    if (!j.is_number()) fail(path, "expected a number");
    return j.get<double>();
}

std::uint64_t to_count(const Json& j, const std::string& path) {
    if (!j.is_number_unsigned()) fail(path, "expected a nonnegative integer");
    return j.get<std::uint64_t>();
}

bool to_bool(const Json& j, const std::string& path) {
    if (!j.is_boolean()) fail(path, "expected true or false");
    return j.get<bool>();
}

std::string to_string_field(const Json& j, const std::string& path) {
    if (!j.is_string()) fail(path, "expected a string");
    return j.get<std::string>();
}

// null entries map to null_value (used for unbounded box sides).
Vector to_vector(const Json& j, const std::string& path, std::optional<double> null_value = {}) {
    if (!j.is_array() || j.empty()) fail(path, "expected a nonempty array of numbers");
    Vector v(static_cast<Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string p = path + "[" + std::to_string(i) + "]";
        if (j[i].is_null() && null_value) {
            v[static_cast<Index>(i)] = *null_value;
        } else {
            v[static_cast<Index>(i)] = to_double(j[i], p);
        }
    }
    return v;
}

Matrix to_matrix(const Json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) fail(path, "expected a nonempty array of rows");
    const std::size_t rows = j.size();
    const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
    if (cols == 0) fail(path + "[0]", "expected a nonempty row");
    Matrix m(static_cast<Index>(rows), static_cast<Index>(cols));
    for (std::size_t r = 0; r < rows; ++r) {
        const std::string p = path + "[" + std::to_string(r) + "]";
        if (!j[r].is_array() || j[r].size() != cols) fail(p, "rows must all have " + std::to_string(cols) + " entries");
        for (std::size_t c = 0; c < cols; ++c) {
            m(static_cast<Index>(r), static_cast<Index>(c)) =
                to_double(j[r][c], p + "[" + std::to_string(c) + "]");
        }
    }
    return m;
}

template <class F>
auto guarded(const std::string& path, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        fail(path, e.what());
    }
}

ConstraintSet parse_set(const Json& j, const std::string& path) {
    ObjectReader r(j, path);
    const std::string kind = to_string_field(r.required("kind"), r.at("kind"));
    auto set = guarded(path, [&]() -> ConstraintSet {
        if (kind == "whole_space") {
            return ConstraintSet::whole_space(static_cast<Index>(to_count(r.required("dim"), r.at("dim"))));
        }
        if (kind == "box") {
            return ConstraintSet::box(to_vector(r.required("lower"), r.at("lower"), -kInfinity),
                                      to_vector(r.required("upper"), r.at("upper"), kInfinity));
        }
        if (kind == "affine") {
            return ConstraintSet::affine(to_matrix(r.required("A"), r.at("A")),
                                         to_vector(r.required("b"), r.at("b")));
        }
        if (kind == "halfspace") {
            return ConstraintSet::halfspace(to_vector(r.required("normal"), r.at("normal")),
                                            to_double(r.required("offset"), r.at("offset")));
        }
        if (kind == "product") {
            const Json& parts = r.required("parts");
            if (!parts.is_array()) fail(r.at("parts"), "expected an array of sets");
            std::vector<ConstraintSet> sets;
            for (std::size_t i = 0; i < parts.size(); ++i) {
                sets.push_back(parse_set(parts[i], r.at("parts") + "[" + std::to_string(i) + "]"));
            }
            return ConstraintSet::product(std::move(sets));
        }
        fail(r.at("kind"), "unknown set kind '" + kind +
                               "' (expected whole_space, box, affine, halfspace or product)");
    });
    r.finish();
    return set;
}

ConvexPiece parse_piece(const Json& j, const std::string& path) {
    ObjectReader r(j, path);
    const std::string kind = to_string_field(r.required("kind"), r.at("kind"));
    auto piece = guarded(path, [&]() -> ConvexPiece {
        if (kind == "zero") {
            return ConvexPiece::zero(static_cast<Index>(to_count(r.required("dim"), r.at("dim"))));
        }
        if (kind == "quadratic") {
            const Json* c = r.optional("c");
            return ConvexPiece::quadratic(to_matrix(r.required("Q"), r.at("Q")),
                                          to_vector(r.required("b"), r.at("b")),
                                          c ? to_double(*c, r.at("c")) : 0.0);
        }
        if (kind == "affine_squared") {
            return ConvexPiece::affine_squared(to_vector(r.required("a"), r.at("a")),
                                               to_double(r.required("r"), r.at("r")),
                                               to_double(r.required("weight"), r.at("weight")));
        }
        if (kind == "half_squared_distance") {
            return ConvexPiece::half_squared_distance(parse_set(r.required("target"), r.at("target")));
        }
        if (kind == "indicator") {
            return ConvexPiece::indicator(parse_set(r.required("set"), r.at("set")));
        }
        if (kind == "sum") {
            const Json& terms = r.required("terms");
            if (!terms.is_array()) fail(r.at("terms"), "expected an array of pieces");
            std::vector<ConvexPiece> pieces;
            for (std::size_t i = 0; i < terms.size(); ++i) {
                pieces.push_back(parse_piece(terms[i], r.at("terms") + "[" + std::to_string(i) + "]"));
            }
            return ConvexPiece::sum(std::move(pieces));
        }
        fail(r.at("kind"), "unknown piece kind '" + kind +
                               "' (expected zero, quadratic, affine_squared, "
                               "half_squared_distance, indicator or sum)");
    });
    r.finish();
    return piece;
}

AffineMap parse_map(const Json& j, const std::string& path) {
    ObjectReader r(j, path);
    AffineMap m{to_matrix(r.required("matrix"), r.at("matrix")), {}};
    const Json* offset = r.optional("offset");
    m.offset = offset ? to_vector(*offset, r.at("offset")) : Vector::Zero(m.matrix.rows());
    r.finish();
    if (m.matrix.rows() != m.matrix.cols() || m.offset.size() != m.matrix.rows()) {
        fail(path, "matrix must be square and match the offset length");
    }
    return m;
}

SaddleFunction parse_saddle(const Json& j, const std::string& path) {
    ObjectReader r(j, path);
    const std::string kind = to_string_field(r.required("kind"), r.at("kind"));
    auto L = guarded(path, [&]() -> SaddleFunction {
        if (kind == "weighted_square") return SaddleFunction::weighted_square();
        if (kind == "bilinear") {
            return SaddleFunction::bilinear(to_matrix(r.required("C"), r.at("C")),
                                            to_vector(r.required("c"), r.at("c")),
                                            to_vector(r.required("d"), r.at("d")));
        }
        fail(r.at("kind"), "unknown saddle kind '" + kind + "' (expected bilinear or weighted_square)");
    });
    r.finish();
    return L;
}

BifunctionSpec parse_bifunction(const Json& j, const std::string& path) {
    ObjectReader r(j, path);
    const std::string kind = to_string_field(r.required("kind"), r.at("kind"));
    auto f = guarded(path, [&]() -> BifunctionSpec {
        if (kind == "difference") return BifunctionSpec::difference(parse_piece(r.required("h"), r.at("h")));
        if (kind == "gradient") {
            return BifunctionSpec::gradient(parse_piece(r.required("potential"), r.at("potential")),
                                            to_double(r.required("modulus"), r.at("modulus")));
        }
        if (kind == "saddle") return BifunctionSpec::saddle(parse_saddle(r.required("L"), r.at("L")));
        if (kind == "operator_pair") {
            return BifunctionSpec::operator_pair(parse_map(r.required("A"), r.at("A")),
                                                 parse_map(r.required("B"), r.at("B")));
        }
        fail(r.at("kind"), "unknown bifunction kind '" + kind +
                               "' (expected difference, gradient, saddle or operator_pair)");
    });
    r.finish();
    return f;
}

// ---- serialization -------------------------------------------------------

Json vector_json(const Vector& v) {
    Json a = Json::array();
    for (Index i = 0; i < v.size(); ++i) {
        if (std::isinf(v[i])) {
            a.push_back(nullptr);
        } else {
            a.push_back(v[i]);
        }
    }
    return a;
}

Json matrix_json(const Matrix& m) {
    Json a = Json::array();
    for (Index r = 0; r < m.rows(); ++r) a.push_back(vector_json(m.row(r).transpose()));
    return a;
}

Json set_json(const ConstraintSet& s) {
    return std::visit(
        overloaded{
            [](const WholeSpace& w) { return Json{{"kind", "whole_space"}, {"dim", w.dim}}; },
            [](const Box& b) {
                return Json{{"kind", "box"}, {"lower", vector_json(b.lower)}, {"upper", vector_json(b.upper)}};
            },
            [](const AffineSubspace& a) {
                return Json{{"kind", "affine"}, {"A", matrix_json(a.A)}, {"b", vector_json(a.b)}};
            },
            [](const Halfspace& h) {
                return Json{{"kind", "halfspace"}, {"normal", vector_json(h.normal)}, {"offset", h.offset}};
            },
            [](const ProductSet& p) {
                Json parts = Json::array();
                for (const auto& part : p.parts) parts.push_back(set_json(part));
                return Json{{"kind", "product"}, {"parts", parts}};
            },
        },
        s.kind());
}

Json piece_json(const ConvexPiece& h) {
    return std::visit(
        overloaded{
            [](const ZeroPiece& z) { return Json{{"kind", "zero"}, {"dim", z.dim}}; },
            [](const QuadraticPiece& q) {
                return Json{{"kind", "quadratic"}, {"Q", matrix_json(q.Q)}, {"b", vector_json(q.b)}, {"c", q.c}};
            },
            [](const AffineSquaredPiece& a) {
                return Json{{"kind", "affine_squared"}, {"a", vector_json(a.a)}, {"r", a.r}, {"weight", a.weight}};
            },
            [](const HalfSquaredDistancePiece& d) {
                return Json{{"kind", "half_squared_distance"}, {"target", set_json(d.target)}};
            },
            [](const IndicatorPiece& i) { return Json{{"kind", "indicator"}, {"set", set_json(i.set)}}; },
            [](const SumPiece& s) {
                Json terms = Json::array();
                for (const auto& t : s.terms) terms.push_back(piece_json(t));
                return Json{{"kind", "sum"}, {"terms", terms}};
            },
        },
        h.kind());
}

Json map_json(const AffineMap& m) {
    return Json{{"matrix", matrix_json(m.matrix)}, {"offset", vector_json(m.offset)}};
}

Json bifunction_json(const BifunctionSpec& f) {
    return std::visit(
        overloaded{
            [](const DifferenceBifunction& d) { return Json{{"kind", "difference"}, {"h", piece_json(d.h)}}; },
            [](const GradientBifunction& g) {
                return Json{{"kind", "gradient"}, {"potential", piece_json(g.potential)}, {"modulus", g.modulus}};
            },
            [](const SaddleBifunction& s) {
                Json L = std::visit(
                    overloaded{
                        [](const BilinearSaddle& b) {
                            return Json{{"kind", "bilinear"}, {"C", matrix_json(b.C)},
                                        {"c", vector_json(b.c)}, {"d", vector_json(b.d)}};
                        },
                        [](const WeightedSquareSaddle&) { return Json{{"kind", "weighted_square"}}; },
                    },
                    s.L.kind());
                return Json{{"kind", "saddle"}, {"L", L}};
            },
            [](const OperatorPairBifunction& o) {
                return Json{{"kind", "operator_pair"}, {"A", map_json(o.A)}, {"B", map_json(o.B)}};
            },
        },
        f.kind());
}

Json rule_json(const PowerRule& r) { return Json{{"scale", r.scale}, {"exponent", r.exponent}}; }

Json sequence_json(const std::optional<std::vector<double>>& seq) {
    if (!seq) return nullptr;
    return Json(*seq);
}

// ---- config sections -----------------------------------------------------

PowerRule parse_rule(const Json& j, const std::string& path, PowerRule rule) {
    ObjectReader r(j, path);
    if (const Json* v = r.optional("scale")) rule.scale = to_double(*v, r.at("scale"));
    if (const Json* v = r.optional("exponent")) rule.exponent = to_double(*v, r.at("exponent"));
    r.finish();
    return rule;
}

std::optional<std::vector<double>> parse_sequence(const Json& j, const std::string& path) {
    if (j.is_null()) return std::nullopt;
    const Vector v = to_vector(j, path);
    return std::vector<double>(v.data(), v.data() + v.size());
}

void parse_schedule(const Json& j, const std::string& path, ParameterSchedule& s) {
    ObjectReader r(j, path);
    if (const Json* v = r.optional("alpha")) s.alpha = to_double(*v, r.at("alpha"));
    if (const Json* v = r.optional("lambda")) s.lambda = parse_rule(*v, r.at("lambda"), s.lambda);
    if (const Json* v = r.optional("beta")) s.beta = parse_rule(*v, r.at("beta"), s.beta);
    if (const Json* v = r.optional("lambda_override")) s.lambda_override = parse_sequence(*v, r.at("lambda_override"));
    if (const Json* v = r.optional("beta_override")) s.beta_override = parse_sequence(*v, r.at("beta_override"));
    r.finish();
}

void parse_stopping(const Json& j, const std::string& path, StoppingRule& s) {
    ObjectReader r(j, path);
    if (const Json* v = r.optional("max_iterations")) s.max_iterations = to_count(*v, r.at("max_iterations"));
    if (const Json* v = r.optional("step_tolerance")) s.step_tolerance = to_double(*v, r.at("step_tolerance"));
    if (const Json* v = r.optional("target")) {
        s.target = v->is_null() ? std::nullopt : std::optional<Vector>(to_vector(*v, r.at("target")));
    }
    if (const Json* v = r.optional("target_tolerance")) s.target_tolerance = to_double(*v, r.at("target_tolerance"));
    r.finish();
}

void parse_inner(const Json& j, const std::string& path, InnerSolverConfig& c) {
    ObjectReader r(j, path);
    if (const Json* v = r.optional("max_iterations")) c.max_iterations = to_count(*v, r.at("max_iterations"));
    if (const Json* v = r.optional("tolerance")) c.tolerance = to_double(*v, r.at("tolerance"));
    if (const Json* v = r.optional("step_factor")) c.step_factor = to_double(*v, r.at("step_factor"));
    r.finish();
}

std::optional<Vector> optional_vector(const Json* j, const std::string& path) {
    if (!j || j->is_null()) return std::nullopt;
    return to_vector(*j, path);
}

SeriesInput parse_series(const Json& j, const std::string& path) {
    ObjectReader r(j, path);
    SeriesInput s;
    s.p = to_vector(r.required("p"), r.at("p"));
    s.q = optional_vector(r.optional("q"), r.at("q"));
    s.u = optional_vector(r.optional("u"), r.at("u"));
    s.v = optional_vector(r.optional("v"), r.at("v"));
    if (const Json* set = r.optional("set"); set && !set->is_null()) s.set = parse_set(*set, r.at("set"));
    r.finish();
    return s;
}

void parse_diagnostics(const Json& j, const std::string& path, DiagnosticsConfig& d) {
    ObjectReader r(j, path);
    if (const Json* v = r.optional("fejer")) d.fejer = to_bool(*v, r.at("fejer"));
    if (const Json* v = r.optional("series_check")) d.series_check = to_bool(*v, r.at("series_check"));
    if (const Json* v = r.optional("verify_residual")) d.verify_residual = to_bool(*v, r.at("verify_residual"));
    if (const Json* v = r.optional("vi_samples")) d.vi_samples = to_count(*v, r.at("vi_samples"));
    if (const Json* v = r.optional("seed")) d.seed = to_count(*v, r.at("seed"));
    if (const Json* v = r.optional("series_horizon")) d.series_horizon = to_count(*v, r.at("series_horizon"));
    if (const Json* v = r.optional("anchor")) d.anchor = optional_vector(v, r.at("anchor"));
    if (const Json* v = r.optional("series")) {
        d.series = v->is_null() ? std::nullopt : std::optional<SeriesInput>(parse_series(*v, r.at("series")));
    }
    r.finish();
}

void parse_output(const Json& j, const std::string& path, OutputConfig& o) {
    ObjectReader r(j, path);
    if (const Json* v = r.optional("directory")) o.directory = to_string_field(*v, r.at("directory"));
    if (const Json* v = r.optional("stem")) o.stem = to_string_field(*v, r.at("stem"));
    r.finish();
    if (o.stem.empty()) fail(r.at("stem"), "must not be empty");
}

std::pair<int, int> line_column(const std::string& text, std::size_t byte) {
    int line = 1, column = 1;
    for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            column = 1;
        } else {
            ++column;
        }
    }
    return {line, column};
}

void check_dim(const Vector& v, Index dim, const std::string& path) {
    if (v.size() != dim) {
        fail(path, "has " + std::to_string(v.size()) + " entries, expected " + std::to_string(dim));
    }
}

void validate_config(const ExperimentConfig& cfg) {
    if (cfg.preset.empty() == !cfg.problem.has_value()) {
        fail("problem", "exactly one of preset or inline must be given");
    }
    const ResolvedProblem resolved = guarded("problem", [&] { return resolve_problem(cfg); });
    const Problem& problem = resolved.problem;
    guarded("problem", [&] { problem.validate(); });
    guarded("schedule", [&] { cfg.schedule.validate(); });
    guarded("stopping", [&] { cfg.stopping.validate(); });
    guarded("inner", [&] { cfg.inner.validate(); });
    if (cfg.solver == SolverKind::Ppm && !problem.f.is_zero()) {
        fail("solver", "ppm takes a single-level problem, the lower-level bifunction must be zero");
    }
    const Index dim = problem.K.dim();
    if (cfg.x0.size() == 0) fail("start.x0", "missing starting point");
    check_dim(cfg.x0, dim, "start.x0");
    if (cfg.x1) check_dim(*cfg.x1, dim, "start.x1");
    if (cfg.stopping.target) check_dim(*cfg.stopping.target, dim, "stopping.target");
    if (cfg.diagnostics.anchor) check_dim(*cfg.diagnostics.anchor, dim, "diagnostics.anchor");
    if (distance(problem.K, cfg.x0) > 1e-9) fail("start.x0", "must lie in K");
    if (cfg.x1 && distance(problem.K, *cfg.x1) > 1e-9) fail("start.x1", "must lie in K");
    if (cfg.diagnostics.vi_samples == 0 && cfg.diagnostics.verify_residual) {
        fail("diagnostics.vi_samples", "must be positive when verify_residual is set");
    }
    if (cfg.diagnostics.series_horizon == 0) fail("diagnostics.series_horizon", "must be positive");
}

}  // namespace

// ---- presets ---------------------------------------------------------------

std::vector<std::string> preset_names() { return {"section5", "saddle-example", "hmp-distance"}; }

namespace {

Vector vec(std::initializer_list<double> values) {
    Vector v(static_cast<Index>(values.size()));
    Index i = 0;
    for (double x : values) v[i++] = x;
    return v;
}

struct Preset {
    Problem problem;
    Vector solution;
};

Preset make_preset(const std::string& name) {
    if (name == "section5") {
        // psi = 1/4 (x1 + x2 - 4)^2 is the lower level, phi = 1/4 (x1 - x2 - 2)^2 the upper.
        return {{BifunctionSpec::difference(ConvexPiece::affine_squared(vec({1, 1}), 4.0, 0.25)),
                 BifunctionSpec::difference(ConvexPiece::affine_squared(vec({1, -1}), 2.0, 0.25)),
                 ConstraintSet::whole_space(2)},
                vec({3, 1})};
    }
    if (name == "saddle-example") {
        const AffineMap identity{Matrix::Identity(1, 1), Vector::Zero(1)};
        return {{BifunctionSpec::saddle(SaddleFunction::weighted_square()),
                 BifunctionSpec::operator_pair(identity, identity),
                 ConstraintSet::product({ConstraintSet::box(vec({0}), vec({1})),
                                         ConstraintSet::box(vec({0}), vec({1}))})},
                vec({0, 0})};
    }
    if (name == "hmp-distance") {
        Matrix A(1, 2);
        A << 1, 2;
        return {{BifunctionSpec::difference(
                     ConvexPiece::half_squared_distance(ConstraintSet::affine(A, vec({2})))),
                 BifunctionSpec::gradient(
                     ConvexPiece::quadratic(Matrix::Identity(2, 2), vec({-2, -2}), 4.0), 1.0),
                 ConstraintSet::whole_space(2)},
                vec({1.2, 0.4})};
    }
    throw ConfigError("problem.preset: unknown preset '" + name +
                      "' (expected section5, saddle-example or hmp-distance)");
}

}  // namespace

ExperimentConfig preset_config(const std::string& name) {
    const Preset preset = make_preset(name);
    ExperimentConfig cfg;
    cfg.preset = name;
    cfg.solver = SolverKind::Ipa;
    cfg.schedule.alpha = 0.1;
    cfg.schedule.lambda = {1.0, 1.0};
    cfg.stopping.max_iterations = 2000;
    cfg.stopping.target = preset.solution;

    if (name == "section5") {
        cfg.schedule.beta = {1.0, 1.0};
        cfg.x0 = vec({0, 0.5});
        Matrix A(1, 2);
        A << 1, 1;
        cfg.diagnostics.series = SeriesInput{vec({1, 1}) / std::sqrt(2.0), {}, {}, {},
                                             ConstraintSet::affine(A, vec({4}))};
    } else if (name == "saddle-example") {
        cfg.schedule.beta = {1.0, 2.0};
        cfg.x0 = vec({0.5, 0.5});
        cfg.diagnostics.series = SeriesInput{vec({1}), vec({0}), vec({0}), vec({0.5}),
                                             ConstraintSet::box(vec({0, 0}), vec({0, 1}))};
    } else {
        cfg.schedule.beta = {1.0, 1.0};
        cfg.x0 = vec({0, 0});
        Matrix A(1, 2);
        A << 1, 2;
        cfg.diagnostics.series = SeriesInput{vec({1, 2}) / std::sqrt(5.0), {}, {}, {},
                                             ConstraintSet::affine(A, vec({2}))};
    }
    cfg.x1 = cfg.x0;
    return cfg;
}

ResolvedProblem resolve_problem(const ExperimentConfig& cfg) {
    if (cfg.problem) return {*cfg.problem, std::nullopt, cfg.diagnostics.series};
    Preset preset = make_preset(cfg.preset);
    return {std::move(preset.problem), std::move(preset.solution), cfg.diagnostics.series};
}

// ---- parse / serialize -----------------------------------------------------

ExperimentConfig parse_config(const std::string& text, const std::string& source) {
    Json root;
    try {
        root = Json::parse(text);
    } catch (const Json::parse_error& e) {
        const auto [line, column] = line_column(text, e.byte);
        throw ConfigError(source + ":" + std::to_string(line) + ":" + std::to_string(column) +
                          ": parse error: " + e.what());
    }
    try {
        ObjectReader r(root, "$");
        ExperimentConfig cfg;

        ObjectReader pr(r.required("problem"), r.at("problem"));
        const Json* preset = pr.optional("preset");
        const Json* inline_problem = pr.optional("inline");
        pr.finish();
        if ((preset == nullptr) == (inline_problem == nullptr)) {
            fail(r.at("problem"), "exactly one of 'preset' or 'inline' must be given");
        }
        if (preset) {
            cfg = preset_config(to_string_field(*preset, r.at("problem") + ".preset"));
        } else {
            const std::string path = r.at("problem") + ".inline";
            ObjectReader ir(*inline_problem, path);
            cfg.problem = Problem{parse_bifunction(ir.required("f"), ir.at("f")),
                                  parse_bifunction(ir.required("g"), ir.at("g")),
                                  parse_set(ir.required("K"), ir.at("K"))};
            ir.finish();
        }

        if (const Json* v = r.optional("solver")) {
            const std::string name = to_string_field(*v, r.at("solver"));
            cfg.solver = guarded(r.at("solver"), [&] { return solver_kind_from_string(name); });
        }
        if (const Json* v = r.optional("schedule")) parse_schedule(*v, r.at("schedule"), cfg.schedule);
        if (const Json* v = r.optional("start")) {
            ObjectReader sr(*v, r.at("start"));
            if (const Json* x0 = sr.optional("x0")) cfg.x0 = to_vector(*x0, sr.at("x0"));
            if (const Json* x1 = sr.optional("x1")) cfg.x1 = optional_vector(x1, sr.at("x1"));
            sr.finish();
        }
        if (const Json* v = r.optional("stopping")) parse_stopping(*v, r.at("stopping"), cfg.stopping);
        if (const Json* v = r.optional("inner")) parse_inner(*v, r.at("inner"), cfg.inner);
        if (const Json* v = r.optional("diagnostics")) parse_diagnostics(*v, r.at("diagnostics"), cfg.diagnostics);
        if (const Json* v = r.optional("output")) parse_output(*v, r.at("output"), cfg.output);
        r.finish();

        validate_config(cfg);
        return cfg;
    } catch (const ConfigError& e) {
        throw ConfigError(source + ": " + e.what());
    }
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path.string() + ": cannot open config file");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str(), path.string());
}

std::string serialize_config(const ExperimentConfig& cfg) {
    Json root;
    if (cfg.problem) {
        root["problem"] = Json{{"inline", Json{{"f", bifunction_json(cfg.problem->f)},
                                               {"g", bifunction_json(cfg.problem->g)},
                                               {"K", set_json(cfg.problem->K)}}}};
    } else {
        root["problem"] = Json{{"preset", cfg.preset}};
    }
    root["solver"] = to_string(cfg.solver);
    root["schedule"] = Json{{"alpha", cfg.schedule.alpha},
                            {"lambda", rule_json(cfg.schedule.lambda)},
                            {"beta", rule_json(cfg.schedule.beta)},
                            {"lambda_override", sequence_json(cfg.schedule.lambda_override)},
                            {"beta_override", sequence_json(cfg.schedule.beta_override)}};
    root["start"] = Json{{"x0", vector_json(cfg.x0)},
                         {"x1", cfg.x1 ? vector_json(*cfg.x1) : Json(nullptr)}};
    root["stopping"] = Json{{"max_iterations", cfg.stopping.max_iterations},
                            {"step_tolerance", cfg.stopping.step_tolerance},
                            {"target", cfg.stopping.target ? vector_json(*cfg.stopping.target) : Json(nullptr)},
                            {"target_tolerance", cfg.stopping.target_tolerance}};
    root["inner"] = Json{{"max_iterations", cfg.inner.max_iterations},
                         {"tolerance", cfg.inner.tolerance},
                         {"step_factor", cfg.inner.step_factor}};
    const auto& d = cfg.diagnostics;
    Json series = nullptr;
    if (d.series) {
        auto opt = [](const std::optional<Vector>& v) { return v ? vector_json(*v) : Json(nullptr); };
        series = Json{{"p", vector_json(d.series->p)},
                      {"q", opt(d.series->q)},
                      {"u", opt(d.series->u)},
                      {"v", opt(d.series->v)},
                      {"set", d.series->set ? set_json(*d.series->set) : Json(nullptr)}};
    }
    root["diagnostics"] = Json{{"fejer", d.fejer},
                               {"series_check", d.series_check},
                               {"verify_residual", d.verify_residual},
                               {"vi_samples", d.vi_samples},
                               {"seed", d.seed},
                               {"series_horizon", d.series_horizon},
                               {"anchor", d.anchor ? vector_json(*d.anchor) : Json(nullptr)},
                               {"series", series}};
    root["output"] = Json{{"directory", cfg.output.directory}, {"stem", cfg.output.stem}};
    return root.dump(2) + "\n";
}

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
    return serialize_config(a) == serialize_config(b);
}

}  // namespace bep
