// symplab command line: spectra, classification, holonomies, and the
// zero-exponent breaking experiment on JSON configs.
//
// Exit codes: 0 pass, 2 a checked property failed, 1 error.

#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "symplab/symplab.hpp"

using namespace symplab;

namespace {

constexpr int kPass = 0;
constexpr int kError = 1;
constexpr int kPropertyFailure = 2;

/// Accepts a file path or inline JSON text.
Json load_json_arg(const std::string& arg) {
    const auto first = arg.find_first_not_of(" \t\n");
    if (first != std::string::npos && (arg[first] == '{' || arg[first] == '"' || arg[first] == '[')) {
        try {
            return Json::parse(arg);
        } catch (const Json::parse_error& e) {
            throw ConfigError(std::string("inline JSON: ") + e.what());
        }
    }
    return read_json_file(arg);
}

void write_json(const Json& j, const std::string& out) {
    if (out.empty() || out == "-") {
        std::cout << j.dump(2) << "\n";
        return;
    }
    std::ofstream f(out);
    if (!f) throw ConfigError("cannot write '" + out + "'");
    f << j.dump(2) << "\n";
}

struct Common {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
};

BreakZeroConfig load_config(const Common& c) {
    BreakZeroConfig cfg = break_zero_config_from_json(load_json_arg(c.config));
    cfg.seed = c.seed.value_or(0);
    return cfg;
}

int run_spectrum(const Common& c, long n, double tol) {
    const Json j = load_json_arg(c.config);
    const ShiftSpace space = space_from_json(j.contains("space") ? j.at("space") : Json());
    const CocycleGenerator a = generator_from_json(detail::require(j, "generator"), space);
    if (n <= 0) n = j.contains("spectrum") ? detail::get_or(j.at("spectrum"), "n", 100000L) : 100000L;
    const auto codes = sample_orbit_codes(a, space, c.seed.value_or(0), n);
    const auto s = qr_spectrum_codes(a, codes);
    if (c.out.empty() || c.out == "-") {
        write_spectrum_csv(std::cout, s);
    } else {
        std::ofstream f(c.out);
        if (!f) throw ConfigError("cannot write '" + c.out + "'");
        write_spectrum_csv(f, s);
    }
    const bool ok = s.pairing_defect <= tol && s.sum_defect <= tol;
    std::cerr << "top exponent " << s.top() << ", pairing defect " << s.pairing_defect << ", sum defect "
              << s.sum_defect << (ok ? "" : " (above tolerance)") << "\n";
    return ok ? kPass : kPropertyFailure;
}

int run_classify(const std::string& matrix, const std::string& out) {
    const SympMatrix m = symp_from_json(load_json_arg(matrix));
    write_json(classification_to_json(m), out);
    return kPass;
}

int run_holonomy(const Common& c, const std::string& from, const std::string& to, const std::string& side) {
    const BreakZeroConfig cfg = load_config(c);
    const SymbolicPoint x = point_from_json(load_json_arg(from));
    const SymbolicPoint y = point_from_json(load_json_arg(to));
    try {
        const Holonomy h = holonomy(cfg.a, x, y, parse_side(side), cfg.holonomy);
        write_json(holonomy_to_json(h), c.out);
    } catch (const NotConverged& e) {
        std::cerr << "holonomy did not converge: " << e.what() << "\n";
        return kPropertyFailure;
    }
    return kPass;
}

int run_break_zero(const Common& c, int openness, std::uint64_t openness_seed) {
    const BreakZeroConfig cfg = load_config(c);
    const ExperimentReport r = break_zero_experiment(cfg);
    Json j = experiment_to_json(r);
    bool ok = r.flags.all();
    if (openness > 0) {
        Json samples = Json::array();
        for (const auto& s : openness_probe(cfg, r, openness, openness_seed)) {
            samples.push_back(Json{{"seed", s.seed},
                                   {"distance", s.distance},
                                   {"qr_top", s.qr_top},
                                   {"oracle_top", s.oracle_top},
                                   {"pass", s.pass}});
            ok = ok && s.pass;
        }
        j["openness"] = std::move(samples);
    }
    write_json(j, c.out);
    std::cerr << cfg.name << ": lambda_1(A) " << r.spectrum_a.top() << " (floor " << r.floor_a.floor
              << "), lambda_1(B) " << r.spectrum_b.top() << ", oracle " << r.oracle.top_b << ", obstruction "
              << r.breaking.obstruction << (ok ? "  PASS" : "  FAIL") << "\n";
    return ok ? kPass : kPropertyFailure;
}

int run_scan(const Common& c, int max_period, long blocks, std::optional<double> theta) {
    const BreakZeroConfig cfg = load_config(c);
    Json out = Json::array();
    for (const auto& e : dominated_periodic_scan(cfg.a, max_period, blocks, theta.value_or(cfg.scan_theta))) {
        const auto ps = periodic_spectrum(cfg.a, periodic_point(e.word));
        out.push_back(Json{{"word", word_string(e.word)},
                           {"exponents", e.spectrum.exponents},
                           {"real_simple", e.real_simple},
                           {"slack", e.slack},
                           {"type", to_string(classify(SympMatrix(ps.product, tol::drift)))}});
    }
    write_json(out, c.out);
    return kPass;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Numerical laboratory for symplectic cocycles over the full shift"};
    app.require_subcommand(1);

    Common common;
    auto add_common = [&](CLI::App* sub, bool needs_config = true) {
        auto* opt = sub->add_option("--config", common.config, "config JSON (file or inline)");
        if (needs_config) opt->required();
        sub->add_option("--out", common.out, "output file, '-' for stdout");
        sub->add_option("--seed", common.seed, "random seed (default 0)");
    };

    auto* spectrum = app.add_subcommand("spectrum", "QR Lyapunov spectrum along a sampled orbit, as CSV");
    add_common(spectrum);
    long n = 0;
    double tol = 5e-3;
    spectrum->add_option("--n", n, "orbit length (default: config spectrum.n or 1e5)");
    spectrum->add_option("--tol", tol, "bound on pairing and sum defects");

    auto* classify_cmd = app.add_subcommand("classify", "spectral type of a symplectic matrix");
    std::string matrix;
    classify_cmd->add_option("--matrix", matrix, "matrix JSON (file or inline)")->required();
    classify_cmd->add_option("--out", common.out, "output file, '-' for stdout");

    auto* holo = app.add_subcommand("holonomy", "stable or unstable holonomy between two points");
    add_common(holo);
    std::string from, to, side = "s";
    holo->add_option("--from", from, "point JSON")->required();
    holo->add_option("--to", to, "point JSON")->required();
    holo->add_option("--side", side, "s or u")->check(CLI::IsMember({"s", "u"}));

    auto* brk = app.add_subcommand("break-zero", "zero-exponent breaking experiment");
    add_common(brk);
    int openness = 0;
    std::uint64_t openness_seed = 100;
    brk->add_option("--openness", openness, "number of nearby generators to probe");
    brk->add_option("--openness-seed", openness_seed, "first seed of the openness probe");

    auto* scan = app.add_subcommand("scan-periodic", "dominated periodic points with exact spectra");
    add_common(scan);
    int max_period = 8;
    long blocks = 1;
    std::optional<double> theta;
    scan->add_option("--max-period", max_period, "longest word (at most 12)");
    scan->add_option("--blocks", blocks, "domination block length in periods");
    scan->add_option("--theta", theta, "domination rate (default: config scan_theta)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kPass : kError;
    }

    try {
        if (*spectrum) return run_spectrum(common, n, tol);
        if (*classify_cmd) return run_classify(matrix, common.out);
        if (*holo) return run_holonomy(common, from, to, side);
        if (*brk) return run_break_zero(common, openness, openness_seed);
        if (*scan) return run_scan(common, max_period, blocks, theta);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kError;
    }
    return kError;
}
