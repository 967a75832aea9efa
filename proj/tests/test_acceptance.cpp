// Prints one PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>

#include <Eigen/Eigenvalues>

#include "symplab/symplab.hpp"

using namespace symplab;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

Outcome integrity() {
    const auto t0 = Clock::now();
    double worst = 0.0;
    for (std::uint64_t s = 0; s < 1000; ++s)
        worst = std::max(worst, symplectic_defect(random_symplectic(s, 1 + static_cast<int>(s % 3), 1.0).matrix()));
    const auto space = ShiftSpace::make(2);
    const auto a = holder_generator(2, 2, 2, 1.0, space.lambda, 3, 0.08, 0.02);
    const double margin = fiber_bunching_margin(a, space);
    const Matrix prod = iterate(a, sample_point(space, 1, 10000), 10000).matrix();
    const double drift = scaled_defect(prod);
    const double t = seconds_since(t0);
    return {worst <= 1e-9 && margin < 1.0 && drift <= 1e-6 && t < 10.0,
            fmt("max defect %.2e over 1000 draws, 1e4-factor scaled defect %.2e (bunching margin %.2f), %.1f s", worst,
                drift, margin, t)};
}

Outcome pairing() {
    const auto t0 = Clock::now();
    const auto space = ShiftSpace::make(2);
    const auto a = holder_generator(2, 2, 2, 1.0, space.lambda, 31, 0.15, 0.0375);
    const double margin = fiber_bunching_margin(a, space);
    const auto s = qr_spectrum_codes(a, sample_orbit_codes(a, space, 7, 100000));
    const double t = seconds_since(t0);
    return {margin < 1.0 && s.pairing_defect <= 5e-3 && s.sum_defect <= 5e-3 && t < 30.0,
            fmt("exponents %.4f %.4f %.4f %.4f, pairing %.2e, sum %.2e (bunching margin %.2f), %.1f s",
                s.exponents[0], s.exponents[1], s.exponents[2], s.exponents[3], s.pairing_defect, s.sum_defect,
                margin, t)};
}

Outcome periodic_oracle_check() {
    const Word word = parse_word("00101");
    const auto p = periodic_point(word);
    double qr_gap = 0.0, eig_gap = 0.0;
    int used = 0;
    for (std::uint64_t seed = 0; used < 10 && seed < 200; ++seed) {
        const auto a = random_generator(2, 2, 1, 1.0, seed, 0.6);
        const auto ps = periodic_spectrum(a, p);
        if (!ps.real_simple) continue;
        const auto& ex = ps.spectrum.exponents;
        if (ex[0] - ex[1] < 0.05 || ex[1] < 0.05) continue; // QR rate is set by the gaps
        ++used;
        const auto q = qr_spectrum(a, p.point(), 1000L * static_cast<long>(p.period()));
        Eigen::EigenSolver<Eigen::MatrixXd> es(ps.product);
        std::vector<double> direct;
        for (int i = 0; i < 4; ++i)
            direct.push_back(std::log(std::abs(es.eigenvalues()(i))) / static_cast<double>(p.period()));
        std::sort(direct.rbegin(), direct.rend());
        for (std::size_t i = 0; i < 4; ++i) {
            qr_gap = std::max(qr_gap, std::abs(q.exponents[i] - ex[i]));
            eig_gap = std::max(eig_gap, std::abs(direct[i] - ex[i]));
        }
    }
    return {used == 10 && qr_gap <= 1e-2 && eig_gap <= 1e-10,
            fmt("%d generators on %s: QR at 1e3 periods within %.2e, eigen within %.2e", used,
                word_string(word).c_str(), qr_gap, eig_gap)};
}

SymbolicPoint from_core(const Word& core, long origin) { return SymbolicPoint(Word{0}, core, Word{0}, origin); }

/// Geometric rate of the nonzero Cauchy increments, by least squares on their logs.
double fitted_ratio(const std::vector<double>& inc) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (std::size_t i = 0; i < inc.size(); ++i) {
        if (!(inc[i] > 0.0)) continue;
        const double x = static_cast<double>(i), y = std::log(inc[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    if (n < 3) return 0.0;
    return std::exp((n * sxy - sx * sy) / (n * sxx - sx * sx));
}

Outcome holonomy_laws() {
    const auto space = ShiftSpace::make(2);
    const int depth = 8;
    const auto a = holder_generator(2, 2, depth, 1.0, space.lambda, 12, 0.15, 0.05);
    const double margin = fiber_bunching_margin(a, space);
    double worst = 0.0, worst_ratio = 0.0;
    HolonomyOptions cauchy;
    cauchy.exploit_exact = false;
    cauchy.tol = 1e-13;
    Rng rng(77);
    for (std::uint64_t s = 0; s < 100; ++s) {
        const SymbolicPoint base = sample_point(space, 1000 + s, 16);
        const SymbolicPoint y = bracket(base, sample_point(space, 2000 + s, 16), space, 2.0);
        const SymbolicPoint z = bracket(base, sample_point(space, 3000 + s, 16), space, 2.0);
        const auto r = holonomy_properties_check(a, space, base, y, z, Side::Unstable);
        worst = std::max({worst, r.identity_residual, r.composition_residual, r.equivariance_residual});

        // stable pair with last disagreement at index 0: increments decay from step 1 to the exact depth
        Word cx = base.slice(-20, 40), cy = cx;
        for (std::size_t i = 0; i <= 20; ++i) cy[i] = static_cast<Symbol>(rng.next() & 1U);
        cy[20] = static_cast<Symbol>(1 - cx[20]);
        const auto h = stable_holonomy(a, from_core(cx, -20), from_core(cy, -20), cauchy);
        worst_ratio = std::max(worst_ratio, fitted_ratio(h.increments));
    }
    return {margin <= 0.9 && worst <= 1e-8 && worst_ratio <= margin + 0.1,
            fmt("100 triples: max law residual %.2e; Cauchy ratio %.3f vs bunching margin %.3f", worst, worst_ratio,
                margin)};
}

Outcome oseledets() {
    int found = 0;
    double cross = 0.0;
    bool classes = true;
    const auto form = standard_form(2);
    const auto words = lyndon_words(2, 5);
    for (std::uint64_t seed = 0; found < 50 && seed < 1000; ++seed) {
        const auto a = random_generator(2, 2, 1, 1.0, 500 + seed, 0.7);
        const auto p = periodic_point(words[seed % words.size()]);
        const auto ps = periodic_spectrum(a, p);
        if (!ps.real_simple) continue;
        ++found;
        const auto o = oseledets_pairing(a, p);
        for (auto c : o.plane_class) classes = classes && c == SubspaceClass::Symplectic;
        classes = classes && o.plane_class.size() == 2 && o.expanding_class == SubspaceClass::Lagrangian;
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = i + 1; j < 4; ++j)
                if (o.partner[i] != static_cast<int>(j))
                    cross = std::max(cross, std::abs(omega(o.vectors[i].normalized(), o.vectors[j].normalized(), form)));
    }
    return {found == 50 && classes && cross <= 1e-8,
            fmt("%d simple real products: classes %s, max cross omega %.2e", found, classes ? "ok" : "wrong", cross)};
}

Outcome classification() {
    Rng rng(2024);
    const double pi = std::numbers::pi;
    auto angle = [&] { return rng.uniform(0.05, pi - 0.05) * (rng.uniform(0.0, 1.0) < 0.5 ? -1.0 : 1.0); };
    int mismatches = 0;
    double ev_gap = 0.0;
    const std::vector<SpectralType> types{SpectralType::ComplexSaddle, SpectralType::SaddleCenter,
                                          SpectralType::GenericCenter, SpectralType::DegeneratedCenter};
    for (auto type : types)
        for (int i = 0; i < 100; ++i) {
            std::vector<double> p;
            switch (type) {
            case SpectralType::ComplexSaddle: {
                const double r = rng.uniform(1.1, 3.0) * (rng.uniform(0.0, 1.0) < 0.5 ? 1.0 : 1.0 / 3.2), t = angle();
                p = {r * std::cos(t), r * std::sin(t)};
                break;
            }
            case SpectralType::SaddleCenter: {
                const double t = angle(), c = rng.uniform(1.1, 4.0) * (rng.uniform(0.0, 1.0) < 0.5 ? -1.0 : 1.0);
                p = {std::cos(t), std::sin(t), rng.uniform(0.0, 1.0) < 0.5 ? c : 1.0 / c};
                break;
            }
            case SpectralType::GenericCenter: {
                double t = angle(), u = angle();
                while (std::abs(std::cos(t) - std::cos(u)) < 0.05) u = angle();
                p = {std::cos(t), std::sin(t), std::cos(u), std::sin(u)};
                break;
            }
            default: {
                const double t = angle();
                p = {std::cos(t), std::sin(t)};
            }
            }
            const auto m = canonical_matrix(type, p);
            if (classify_sp4(m) != type) ++mismatches;
            const auto ev = symplectic_eigenvalues(m.matrix());
            for (const auto& z : canonical_eigenvalues(type, p)) {
                double best = std::numeric_limits<double>::infinity();
                for (const auto& e : ev) best = std::min(best, std::abs(e - z));
                ev_gap = std::max(ev_gap, best);
            }
        }
    return {mismatches == 0 && ev_gap <= 1e-10,
            fmt("400 draws: %d type mismatches, eigenvalues within %.2e", mismatches, ev_gap)};
}

struct DemoRun {
    BreakZeroConfig cfg;
    ExperimentReport report;
    double seconds = 0.0;
};

DemoRun run_demo() {
    const auto t0 = Clock::now();
    DemoRun d{break_zero_config_from_json(read_json_file(SYMPLAB_DEMO_CONFIG)), {}, 0.0};
    d.report = break_zero_experiment(d.cfg);
    d.seconds = seconds_since(t0);
    return d;
}

Outcome breaking(const DemoRun& d) {
    const auto& r = d.report;
    return {r.flags.hu_equal && r.breaking.obstruction > 0.01 && r.holder.total() <= d.cfg.epsilon,
            fmt("H^u bitwise equal: %s, obstruction %.4f, holder distance %.3f <= %.3f", r.flags.hu_equal ? "yes" : "no",
                r.breaking.obstruction, r.holder.total(), d.cfg.epsilon)};
}

Outcome zero_breaks(const DemoRun& d) {
    const auto& r = d.report;
    const double floor = r.floor_a.floor;
    const bool ok = std::abs(r.spectrum_a.top()) <= floor && r.oracle.top_b > 0.0 &&
                    r.spectrum_b.top() > 5.0 * floor && d.seconds < 120.0;
    return {ok, fmt("lambda_1(A) %.5f, floor %.5f, oracle lambda_1(B) %.4f on %s, QR lambda_1(B) %.4f, %.1f s",
                    r.spectrum_a.top(), floor, r.oracle.top_b, word_string(r.oracle.word).c_str(), r.spectrum_b.top(),
                    d.seconds)};
}

Outcome openness(const DemoRun& d) {
    const auto samples = openness_probe(d.cfg, d.report, 10, 100);
    int passed = 0;
    double far = 0.0, low_qr = std::numeric_limits<double>::infinity();
    for (const auto& s : samples) {
        if (s.pass && s.distance <= d.cfg.eta / 10.0) ++passed;
        far = std::max(far, s.distance);
        low_qr = std::min(low_qr, s.qr_top);
    }
    return {passed == 10, fmt("%d/10 nearby generators pass, max distance %.4f <= %.4f, min QR lambda_1 %.4f", passed,
                              far, d.cfg.eta / 10.0, low_qr)};
}

} // namespace

int main() {
    int failures = 0;
    auto report = [&](int n, const std::function<Outcome()>& f) {
        Outcome o;
        try {
            o = f();
        } catch (const std::exception& e) {
            o = {false, std::string("error: ") + e.what()};
        }
        if (!o.pass) ++failures;
        std::printf("criterion %d: %s  %s\n", n, o.pass ? "PASS" : "FAIL", o.detail.c_str());
        std::fflush(stdout);
    };
    report(1, integrity);
    report(2, pairing);
    report(3, periodic_oracle_check);
    report(4, holonomy_laws);
    report(5, oseledets);
    report(6, classification);

    std::optional<DemoRun> demo;
    std::string demo_error;
    try {
        demo = run_demo();
    } catch (const std::exception& e) {
        demo_error = e.what();
    }
    auto with_demo = [&](Outcome (*f)(const DemoRun&)) {
        return [&, f]() -> Outcome {
            if (!demo) return {false, "demo run failed: " + demo_error};
            return f(*demo);
        };
    };
    report(7, with_demo(breaking));
    report(8, with_demo(zero_breaks));
    report(9, with_demo(openness));
    return failures == 0 ? 0 : 1;
}
