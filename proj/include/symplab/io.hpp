#pragma once

// JSON encodings used by the command line tool, and config parsing for the
// pipelines. Numbers are written with full double precision.

#include <fstream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "cocycle.hpp"
#include "errors.hpp"
#include "experiments.hpp"
#include "generators.hpp"
#include "holonomy.hpp"
#include "linalg.hpp"
#include "lyapunov.hpp"
#include "perturbation.hpp"
#include "shift.hpp"
#include "spectral.hpp"

namespace symplab {

using Json = nlohmann::json;

class ConfigError : public Error {
public:
    using Error::Error;
};

inline Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open '" + path + "'");
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ConfigError("'" + path + "': " + e.what());
    }
}

namespace detail {

template <class T>
T get_or(const Json& j, const char* key, T fallback) {
    if (!j.contains(key) || j.at(key).is_null()) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const Json::exception& e) {
        throw ConfigError(std::string("field '") + key + "': " + e.what());
    }
}

inline const Json& require(const Json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw ConfigError(std::string("missing field '") + key + "'");
    return j.at(key);
}

} // namespace detail

// matrices: {"ell": n, "rows": [[...], ...]}, row-major

inline Json matrix_to_json(const Matrix& m) {
    Json rows = Json::array();
    for (int i = 0; i < m.rows(); ++i) {
        Json r = Json::array();
        for (int j = 0; j < m.cols(); ++j) r.push_back(m(i, j));
        rows.push_back(std::move(r));
    }
    return Json{{"ell", m.rows() / 2}, {"rows", std::move(rows)}};
}

inline Matrix matrix_from_json(const Json& j) {
    const int ell = detail::require(j, "ell").get<int>();
    const Json& rows = detail::require(j, "rows");
    const int n = 2 * ell;
    if (ell < 1 || !rows.is_array() || static_cast<int>(rows.size()) != n)
        throw DimensionError("matrix JSON: expected " + std::to_string(n) + " rows for ell = " + std::to_string(ell));
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) {
        const Json& r = rows[static_cast<std::size_t>(i)];
        if (!r.is_array() || static_cast<int>(r.size()) != n)
            throw DimensionError("matrix JSON: row " + std::to_string(i) + " must have " + std::to_string(n) + " entries");
        for (int c = 0; c < n; ++c) m(i, c) = r[static_cast<std::size_t>(c)].get<double>();
    }
    return m;
}

inline SympMatrix symp_from_json(const Json& j, double tol = tol::symp) { return SympMatrix(matrix_from_json(j), tol); }

// points: {"left": "word", "core": "word", "right": "word", "origin": int}
// A bare string "w" is read as the periodic point with word w.

inline Json point_to_json(const SymbolicPoint& x) {
    return Json{{"left", word_string(x.left())},
                {"core", word_string(x.core())},
                {"right", word_string(x.right())},
                {"origin", x.origin()}};
}

inline SymbolicPoint point_from_json(const Json& j) {
    if (j.is_string()) return periodic_point(j.get<std::string>()).point();
    return SymbolicPoint(parse_word(detail::require(j, "left").get<std::string>()),
                         parse_word(detail::get_or<std::string>(j, "core", "")),
                         parse_word(detail::require(j, "right").get<std::string>()),
                         detail::get_or<long>(j, "origin", 0));
}

// generators: {"k", "ell", "depth", "nu", "entries": [{"window": "010", "matrix": {...}}, ...]}

inline Json generator_to_json(const CocycleGenerator& a) {
    Json entries = Json::array();
    for (std::size_t c = 0; c < a.table().size(); ++c)
        entries.push_back(Json{{"window", word_string(CocycleGenerator::decode(c, a.k(), a.depth()))},
                               {"matrix", matrix_to_json(a.at(c).matrix())}});
    return Json{{"k", a.k()}, {"ell", a.ell()}, {"depth", a.depth()}, {"nu", a.nu()}, {"entries", std::move(entries)}};
}

inline CocycleGenerator generator_table_from_json(const Json& j) {
    const int k = detail::require(j, "k").get<int>();
    const int ell = detail::require(j, "ell").get<int>();
    const int depth = detail::require(j, "depth").get<int>();
    const double nu = detail::get_or(j, "nu", 1.0);
    const std::size_t n = CocycleGenerator::window_count(k, depth);
    std::vector<std::optional<SympMatrix>> slots(n);
    const Json& entries = detail::require(j, "entries");
    std::optional<SympMatrix> fallback;
    if (j.contains("default")) fallback = symp_from_json(j.at("default"));
    CocycleGenerator probe = CocycleGenerator::constant(k, SympMatrix::identity(ell), depth, nu);
    for (const Json& e : entries) {
        const Word w = parse_word(detail::require(e, "window").get<std::string>());
        const std::size_t code = probe.encode(w);
        if (slots[code]) throw ConfigError("generator JSON: window '" + word_string(w) + "' given twice");
        SympMatrix m = symp_from_json(detail::require(e, "matrix"));
        if (m.ell() != ell) throw DimensionError("generator JSON: window '" + word_string(w) + "' has wrong dimension");
        slots[code] = std::move(m);
    }
    std::vector<SympMatrix> table;
    table.reserve(n);
    for (std::size_t c = 0; c < n; ++c) {
        if (slots[c]) {
            table.push_back(*slots[c]);
        } else if (fallback) {
            table.push_back(*fallback);
        } else {
            throw ConfigError("generator JSON: no entry for window '" +
                              word_string(CocycleGenerator::decode(c, k, depth)) + "' and no default");
        }
    }
    return CocycleGenerator(k, ell, depth, nu, std::move(table));
}

inline ShiftSpace space_from_json(const Json& j) {
    if (j.is_null()) return ShiftSpace::make(2);
    return ShiftSpace::make(detail::get_or(j, "k", 2), detail::get_or(j, "lambda", 0.5),
                            detail::get_or(j, "weights", std::vector<double>{}));
}

inline Json space_to_json(const ShiftSpace& s) { return Json{{"k", s.k}, {"lambda", s.lambda}, {"weights", s.weights}}; }

/// Generator from a config block. "type" selects the family:
/// table (default when "entries" is present), diagonal_demo, rotation, random, holder.
inline CocycleGenerator generator_from_json(const Json& j, const ShiftSpace& space) {
    const std::string type = detail::get_or<std::string>(j, "type", j.contains("entries") ? "table" : "");
    CocycleGenerator a = [&]() {
        if (type == "table") return generator_table_from_json(j);
        const int k = detail::get_or(j, "k", space.k);
        const double nu = detail::get_or(j, "nu", 1.0);
        if (type == "diagonal_demo") {
            DiagonalDemoParams prm;
            prm.alpha = detail::require(j, "alpha").get<std::vector<double>>();
            prm.beta = detail::get_or(j, "beta", std::vector<double>(prm.alpha.size(), 0.0));
            const int ell = static_cast<int>(prm.alpha.size());
            if (j.contains("mixer")) {
                const Json& m = j.at("mixer");
                prm.mixer = m.contains("rows") ? matrix_from_json(m)
                                               : random_symplectic(detail::get_or<std::uint64_t>(m, "seed", 0), ell,
                                                                   detail::get_or(m, "scale", 0.3))
                                                     .matrix();
            } else {
                prm.mixer = Matrix::Identity(2 * ell, 2 * ell);
            }
            return diagonal_demo_generator(k, nu, space.weights, prm);
        }
        const int ell = detail::get_or(j, "ell", 1);
        const int depth = detail::get_or(j, "depth", 0);
        const auto seed = detail::get_or<std::uint64_t>(j, "seed", 0);
        if (type == "rotation") return rotation_generator(k, ell, depth, nu, seed, detail::get_or(j, "max_angle", std::numbers::pi));
        if (type == "random") return random_generator(k, ell, depth, nu, seed, detail::get_or(j, "scale", 0.5));
        if (type == "holder")
            return holder_generator(k, ell, depth, nu, space.lambda, seed, detail::get_or(j, "base_scale", 0.5),
                                    detail::get_or(j, "tail_scale", 0.2));
        throw ConfigError("unknown generator type '" + type + "'");
    }();
    if (a.k() != space.k) throw ConfigError("generator alphabet does not match the shift space");
    return a;
}

/// Shared config layout: {"name", "space", "generator", "p", "q", ...}. Missing fields keep
/// the defaults of BreakZeroConfig.
inline BreakZeroConfig break_zero_config_from_json(const Json& j) {
    BreakZeroConfig c;
    c.name = detail::get_or<std::string>(j, "name", c.name);
    c.space = space_from_json(j.contains("space") ? j.at("space") : Json());
    c.a = generator_from_json(detail::require(j, "generator"), c.space);
    c.p = periodic_point(detail::get_or<std::string>(j, "p", word_string(c.p.word)));
    c.q = periodic_point(detail::get_or<std::string>(j, "q", word_string(c.q.word)));
    c.cyl_depth = detail::get_or(j, "cyl_depth", c.cyl_depth);
    c.eta = detail::get_or(j, "eta", c.eta);
    c.epsilon = detail::get_or(j, "epsilon", c.epsilon);
    c.segments = detail::get_or(j, "segments", c.segments);
    c.segment_length = detail::get_or(j, "segment_length", c.segment_length);
    c.seed = detail::get_or<std::uint64_t>(j, "seed", c.seed);
    if (j.contains("oracle_word") && !j.at("oracle_word").is_null())
        c.oracle_word = parse_word(j.at("oracle_word").get<std::string>());
    c.oracle_max_period = detail::get_or(j, "oracle_max_period", c.oracle_max_period);
    c.oracle_zero_tol = detail::get_or(j, "oracle_zero_tol", c.oracle_zero_tol);
    c.obstruction_margin = detail::get_or(j, "obstruction_margin", c.obstruction_margin);
    c.qr_factor = detail::get_or(j, "qr_factor", c.qr_factor);
    c.scan_max_period = detail::get_or(j, "scan_max_period", c.scan_max_period);
    c.scan_theta = detail::get_or(j, "scan_theta", c.scan_theta);
    if (j.contains("holonomy")) {
        const Json& h = j.at("holonomy");
        c.holonomy.tol = detail::get_or(h, "tol", c.holonomy.tol);
        c.holonomy.n_max = detail::get_or(h, "n_max", c.holonomy.n_max);
        c.holonomy.exploit_exact = detail::get_or(h, "exploit_exact", c.holonomy.exploit_exact);
    }
    if (c.segments < 1 || c.segment_length < 1) throw ConfigError("segments and segment_length must be >= 1");
    if (!(c.epsilon > 0.0)) throw ConfigError("epsilon must be > 0");
    return c;
}

inline Json complex_to_json(const Complex& z) { return Json::array({z.real(), z.imag()}); }

inline Json spectrum_to_json(const LyapunovSpectrum& s) {
    return Json{{"exponents", s.exponents}, {"n_used", s.n_used}, {"pairing_defect", s.pairing_defect},
                {"sum_defect", s.sum_defect}};
}

inline Json holonomy_to_json(const Holonomy& h) {
    return Json{{"side", to_string(h.side)},
                {"depth_used", h.depth_used},
                {"cauchy_gap", h.cauchy_gap},
                {"exact", h.exact},
                {"matrix", matrix_to_json(h.map.matrix())}};
}

inline Json classification_to_json(const SympMatrix& m) {
    Json ev = Json::array();
    for (const auto& z : symplectic_eigenvalues(m.matrix())) ev.push_back(complex_to_json(z));
    Json quads = Json::array();
    for (const auto& q : quadruple_structure(m)) {
        Json members = Json::array();
        for (const auto& z : q.members) members.push_back(complex_to_json(z));
        quads.push_back(std::move(members));
    }
    const SpectralType t = classify(m);
    return Json{{"type", to_string(t)}, {"generic", is_generic(t)}, {"eigenvalues", std::move(ev)},
                {"quadruples", std::move(quads)}};
}

inline Json breaking_to_json(const BreakingReport& b, double eta, int cyl_depth, double holder_distance) {
    return Json{{"hu_equal", b.hu_equal},
                {"hu_depth", b.hu_depth},
                {"obstruction", b.obstruction},
                {"obstruction_margin", b.margin},
                {"obstruction_ok", b.obstruction_ok},
                {"eta", eta},
                {"cyl_depth", cyl_depth},
                {"holder_distance", holder_distance}};
}

inline Json config_to_json(const BreakZeroConfig& c) {
    Json j{{"name", c.name},
           {"space", space_to_json(c.space)},
           {"generator", Json{{"k", c.a.k()}, {"ell", c.a.ell()}, {"depth", c.a.depth()}, {"nu", c.a.nu()}}},
           {"p", word_string(c.p.word)},
           {"q", word_string(c.q.word)},
           {"cyl_depth", c.cyl_depth},
           {"eta", c.eta},
           {"epsilon", c.epsilon},
           {"segments", c.segments},
           {"segment_length", c.segment_length},
           {"seed", c.seed},
           {"oracle_max_period", c.oracle_max_period},
           {"qr_factor", c.qr_factor}};
    if (c.oracle_word) j["oracle_word"] = word_string(*c.oracle_word);
    return j;
}

inline Json experiment_to_json(const ExperimentReport& r) {
    Json scan = Json::array();
    for (const auto& e : r.dominated_b)
        scan.push_back(Json{{"word", word_string(e.word)}, {"top", e.spectrum.top()}, {"real_simple", e.real_simple}});
    return Json{
        {"config", config_to_json(r.config)},
        {"noise_floor", Json{{"floor", r.floor_a.floor}, {"segment_tops", r.floor_a.segment_tops}}},
        {"spectrum_a", spectrum_to_json(r.spectrum_a)},
        {"spectrum_b", spectrum_to_json(r.spectrum_b)},
        {"holder_distance", r.holder.total()},
        {"holder_bound", r.holder_bound},
        {"eta_budget", r.eta_budget},
        {"breaking", breaking_to_json(r.breaking, r.config.eta, r.config.cyl_depth, r.holder.total())},
        {"oracle", Json{{"word", word_string(r.oracle.word)},
                        {"top_a", r.oracle.top_a},
                        {"top_b", r.oracle.top_b},
                        {"candidates", r.oracle.candidates}}},
        {"dominated_b", std::move(scan)},
        {"flags", Json{{"zero_ok", r.flags.zero_ok},
                       {"holder_ok", r.flags.holder_ok},
                       {"hu_equal", r.flags.hu_equal},
                       {"obstruction_ok", r.flags.obstruction_ok},
                       {"oracle_positive", r.flags.oracle_positive},
                       {"qr_positive", r.flags.qr_positive},
                       {"pass", r.flags.all()}}},
        {"wall_seconds", r.wall_seconds}};
}

} // namespace symplab
