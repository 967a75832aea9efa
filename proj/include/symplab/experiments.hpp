#pragma once

// End-to-end pipelines: heteroclinic obstruction, the zero-exponent breaking
// experiment, dominated periodic scans, and the openness probe.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cocycle.hpp"
#include "errors.hpp"
#include "holonomy.hpp"
#include "linalg.hpp"
#include "lyapunov.hpp"
#include "perturbation.hpp"
#include "shift.hpp"
#include "spectral.hpp"

namespace symplab {

/// Largest generator depth the orbit sampler leaves room for.
inline constexpr int kMaxSampleDepth = 12;

/// Finite convex combination of Dirac masses on the projective space.
struct AtomicMeasure {
    std::vector<ProjectivePoint> atoms;
    std::vector<double> weights;

    static AtomicMeasure make(std::vector<ProjectivePoint> atoms, std::vector<double> weights) {
        if (atoms.size() != weights.size() || atoms.empty()) throw DomainError("AtomicMeasure: one weight per atom");
        double total = 0.0;
        for (double w : weights) {
            if (!(w >= 0.0)) throw DomainError("AtomicMeasure: weights must be >= 0");
            total += w;
        }
        if (std::abs(total - 1.0) > 1e-12) throw DomainError("AtomicMeasure: weights must sum to 1");
        for (std::size_t i = 0; i < atoms.size(); ++i)
            for (std::size_t j = i + 1; j < atoms.size(); ++j)
                if (projective_distance(atoms[i], atoms[j]) < 1e-9) throw DomainError("AtomicMeasure: atoms must be distinct");
        return AtomicMeasure{std::move(atoms), std::move(weights)};
    }

    AtomicMeasure push_forward(const Matrix& h) const {
        AtomicMeasure m = *this;
        for (auto& a : m.atoms) a = projective_act(h, a);
        return m;
    }
};

/// Equal-weight measure on the eigendirections at a periodic point (invariant under A^pi).
inline AtomicMeasure periodic_atomic_measure(const CocycleGenerator& a, const PeriodicPoint& p) {
    const auto ps = periodic_spectrum(a, p);
    if (!ps.real_simple) throw DegenerateError("periodic_atomic_measure: spectrum at p is not real and simple");
    std::vector<ProjectivePoint> atoms;
    for (const auto& v : ps.eigenvectors) atoms.push_back(ProjectivePoint::from(v));
    const std::vector<double> w(atoms.size(), 1.0 / static_cast<double>(atoms.size()));
    return AtomicMeasure::make(std::move(atoms), w);
}

struct ObstructionReport {
    SymbolicPoint z;
    AtomMatching atoms;
    double obstruction = 0.0;
    Holonomy hs; // p -> z
    Holonomy hu; // q -> z
};

/// Transports the eigendirections at p (stable side) and at q (unstable side) to the
/// heteroclinic point z and returns their projective distances. If the disintegration
/// were holonomy invariant, both families would be atoms of the same measure at z.
inline ObstructionReport obstruction_experiment(const CocycleGenerator& a, const PeriodicPoint& p,
                                                const PeriodicPoint& q, const HolonomyOptions& opt = {}) {
    const auto sp = periodic_spectrum(a, p), sq = periodic_spectrum(a, q);
    if (!sp.real_simple || !sq.real_simple)
        throw DegenerateError("obstruction_experiment: spectra at p and q must be real and simple");
    const SymbolicPoint z = heteroclinic_point(p, q);
    ObstructionReport r{z, {}, 0.0, stable_holonomy(a, p.point(), z, opt), unstable_holonomy(a, q.point(), z, opt)};
    r.atoms = match_atoms(r.hs.map.matrix(), sp.eigenvectors, r.hu.map.matrix(), sq.eigenvectors);
    r.obstruction = r.atoms.min_distance;
    return r;
}

/// Primitive words up to rotation (Lyndon words) of length 1..max_period over k symbols.
inline std::vector<Word> lyndon_words(int k, int max_period) {
    std::vector<Word> out;
    if (max_period < 1) return out;
    // Duval's algorithm
    Word w{0};
    w.reserve(static_cast<std::size_t>(max_period));
    while (!w.empty()) {
        out.push_back(w);
        const std::size_t m = w.size();
        while (w.size() < static_cast<std::size_t>(max_period)) w.push_back(w[w.size() - m]);
        while (!w.empty() && w.back() == k - 1) w.pop_back();
        if (!w.empty()) ++w.back();
    }
    return out;
}

struct ScanEntry {
    Word word;
    LyapunovSpectrum spectrum;
    bool real_simple = false;
    double slack = 0.0; // domination slack, <= 0 on pass
};

/// Periodic points p (one per orbit) with p in D_A(N pi, theta), i.e. the block
/// product over N periods satisfies the domination bound.
inline std::vector<ScanEntry> dominated_periodic_scan(const CocycleGenerator& a, int max_period, long n_blocks,
                                                      double theta) {
    if (max_period < 1 || max_period > 12) throw DomainError("dominated_periodic_scan: max_period must lie in [1, 12]");
    std::vector<ScanEntry> out;
    for (const auto& w : lyndon_words(a.k(), max_period)) {
        const auto p = periodic_point(w);
        const auto dom = domination_check(a, p.point(), n_blocks * static_cast<long>(p.period()), theta, 2);
        if (!dom.pass) continue;
        const auto ps = periodic_spectrum(a, p);
        out.push_back({w, ps.spectrum, ps.real_simple, dom.worst_slack});
    }
    return out;
}

/// Iid Bernoulli orbit segment [-length/2, length - length/2). The sampled point depends only on
/// (space, seed, length), so generators of different depths read the same orbit.
inline SymbolicPoint sample_orbit(const ShiftSpace& space, std::uint64_t seed, long length) {
    if (length < 1) throw DomainError("sample_orbit: length must be >= 1");
    return sample_point(space, seed, length / 2 + kMaxSampleDepth + 1);
}

/// Window codes of `a` along the segment sampled by sample_orbit.
inline std::vector<std::size_t> orbit_codes(const CocycleGenerator& a, const SymbolicPoint& x, long length) {
    if (a.depth() > kMaxSampleDepth) throw DomainError("orbit_codes: generator depth exceeds the sampling margin");
    return a.codes(x, -(length / 2), length);
}

inline std::vector<std::size_t> sample_orbit_codes(const CocycleGenerator& a, const ShiftSpace& space,
                                                   std::uint64_t seed, long length) {
    return orbit_codes(a, sample_orbit(space, seed, length), length);
}

struct NoiseFloor {
    double top_full = 0.0; // lambda_1 over the whole orbit
    std::vector<double> segment_tops;
    double floor = 0.0; // 3 max |segment top|
};

inline NoiseFloor noise_floor(const CocycleGenerator& a, std::span<const std::size_t> codes, int segments) {
    if (segments < 1 || codes.size() < static_cast<std::size_t>(segments))
        throw DomainError("noise_floor: need at least one step per segment");
    NoiseFloor nf;
    QrAccumulator full(a);
    const std::size_t len = codes.size() / static_cast<std::size_t>(segments);
    for (int s = 0; s < segments; ++s) {
        QrAccumulator seg(a);
        for (std::size_t i = static_cast<std::size_t>(s) * len; i < static_cast<std::size_t>(s + 1) * len; ++i) {
            seg.push(codes[i]);
            full.push(codes[i]);
        }
        nf.segment_tops.push_back(seg.result().top());
    }
    nf.top_full = full.result().top();
    for (double t : nf.segment_tops) nf.floor = std::max(nf.floor, 3.0 * std::abs(t));
    return nf;
}

struct BreakZeroConfig {
    std::string name = "break-zero";
    ShiftSpace space = ShiftSpace::make(2);
    CocycleGenerator a = CocycleGenerator::constant(2, SympMatrix::identity(1));
    PeriodicPoint p = periodic_point("0");
    PeriodicPoint q = periodic_point("1");
    int cyl_depth = 2;
    double eta = 0.1;
    double epsilon = 1.0; // declared Hölder budget for |A - B|_{0,nu}
    int segments = 10;
    long segment_length = 100000;
    std::uint64_t seed = 0;
    std::optional<Word> oracle_word; // searched among words visiting the cylinder when absent
    int oracle_max_period = 20;
    double oracle_zero_tol = 1e-9;
    double obstruction_margin = 0.01;
    double qr_factor = 5.0;
    int scan_max_period = 6;
    double scan_theta = 0.5;
    HolonomyOptions holonomy{};
};

struct PerturbedCocycle {
    SymbolicPoint z;
    SymbolicPoint site;
    LocalizedCocycle s;
    CocycleGenerator b;
    HolderNorm holder;
    double holder_bound = 0.0;
};

/// Rotation at f^{pi_1}(z) in the eigenplanes at p transported by h^s_{A,p,site}, composed into A.
inline PerturbedCocycle build_breaking_perturbation(const BreakZeroConfig& cfg) {
    const SymbolicPoint z = heteroclinic_point(cfg.p, cfg.q);
    const long pi1 = static_cast<long>(cfg.p.period());
    const SymbolicPoint site = shift(z, pi1);
    const Matrix p0 = periodic_symplectic_eigenbasis(cfg.a, cfg.p);
    const Holonomy hs = stable_holonomy(cfg.a, cfg.p.point(), site, cfg.holonomy);
    const Matrix basis = hs.map.matrix() * p0;
    std::vector<Guard> guards{{cfg.p.point(), std::nullopt, "p"}, {cfg.q.point(), std::nullopt, "q"}, {z, pi1, "z"}};
    auto s = localized_rotation_cocycle(cfg.a, site, cfg.cyl_depth, cfg.eta, basis, guards);
    auto b = compose(cfg.a, s.generator);
    const auto hn = holder_distance(cfg.a, b, cfg.space);
    const double bound = localized_holder_bound(cfg.a, s, cfg.space);
    return PerturbedCocycle{z, site, std::move(s), std::move(b), hn, bound};
}

/// Does the orbit of the periodic word pass through the depth-c cylinder around site?
inline bool visits_cylinder(const PeriodicPoint& w, const SymbolicPoint& site, int c) {
    const Word target = site.slice(-c, c + 1);
    const SymbolicPoint x = w.point();
    for (long j = 0; j < static_cast<long>(w.period()); ++j)
        if (x.slice(j - c, j + c + 1) == target) return true;
    return false;
}

struct OracleResult {
    Word word;
    double top_a = 0.0;
    double top_b = 0.0;
    long candidates = 0; // cylinder-visiting words on which A has zero top exponent
};

/// Exact periodic oracle: the configured word, or among the words whose orbit passes
/// through the cylinder and on which A has zero top exponent, the one where B has the
/// largest top exponent. A single pass through the cylinder gives B^pi conjugate to
/// S A^pi, so for commuting zero-drift A the useful words pass at least twice.
inline OracleResult periodic_oracle(const BreakZeroConfig& cfg, const PerturbedCocycle& pc) {
    if (cfg.oracle_word) {
        const auto p = periodic_point(*cfg.oracle_word);
        return {*cfg.oracle_word, periodic_spectrum(cfg.a, p).spectrum.top(), periodic_spectrum(pc.b, p).spectrum.top(), 1};
    }
    OracleResult best;
    bool have = false;
    for (const auto& w : lyndon_words(cfg.a.k(), cfg.oracle_max_period)) {
        const auto p = periodic_point(w);
        if (!visits_cylinder(p, pc.site, cfg.cyl_depth)) continue;
        const double ta = periodic_spectrum(cfg.a, p).spectrum.top();
        if (ta > cfg.oracle_zero_tol) continue;
        ++best.candidates;
        const double tb = periodic_spectrum(pc.b, p).spectrum.top();
        if (!have || tb > best.top_b) {
            best.word = w;
            best.top_a = ta;
            best.top_b = tb;
            have = true;
        }
    }
    if (!have) throw DomainError("periodic_oracle: no word through the cylinder has zero exponent for A");
    return best;
}

struct ExperimentFlags {
    bool zero_ok = false;        // |lambda_1(A)| <= noise floor
    bool holder_ok = false;      // |A - B|_{0,nu} <= epsilon
    bool hu_equal = false;
    bool obstruction_ok = false;
    bool oracle_positive = false; // exact periodic lambda_1(B) > 0 on the oracle word
    bool qr_positive = false;     // lambda_1(B) > qr_factor * noise floor

    bool all() const { return zero_ok && holder_ok && hu_equal && obstruction_ok && oracle_positive && qr_positive; }
};

struct ExperimentReport {
    BreakZeroConfig config;
    NoiseFloor floor_a;
    LyapunovSpectrum spectrum_a;
    LyapunovSpectrum spectrum_b;
    HolderNorm holder;
    double holder_bound = 0.0;
    double eta_budget = 0.0;
    BreakingReport breaking;
    OracleResult oracle;
    std::vector<ScanEntry> dominated_b;
    ExperimentFlags flags;
    double wall_seconds = 0.0;
};

namespace detail {

template <class F>
auto stage(const char* name, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError(name, e.what());
    }
}

} // namespace detail

/// The positivity tests on a perturbed generator, given the unperturbed noise floor.
inline void evaluate_positivity(const BreakZeroConfig& cfg, const CocycleGenerator& b, const PerturbedCocycle& pc,
                                const SymbolicPoint& orbit, long length, ExperimentReport& r) {
    r.spectrum_b = detail::stage("spectrum", [&] { return qr_spectrum_codes(b, orbit_codes(b, orbit, length)); });
    PerturbedCocycle view{pc.z, pc.site, pc.s, b, pc.holder, pc.holder_bound};
    r.oracle = detail::stage("oracle", [&] { return periodic_oracle(cfg, view); });
    r.flags.oracle_positive = r.oracle.top_b > cfg.oracle_zero_tol;
    r.flags.qr_positive = r.spectrum_b.top() > cfg.qr_factor * r.floor_a.floor;
}

inline ExperimentReport break_zero_experiment(const BreakZeroConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    ExperimentReport r;
    r.config = cfg;
    const long total = static_cast<long>(cfg.segments) * cfg.segment_length;
    const SymbolicPoint orbit = detail::stage("baseline", [&] { return sample_orbit(cfg.space, cfg.seed, total); });
    const auto codes = detail::stage("baseline", [&] { return orbit_codes(cfg.a, orbit, total); });
    r.floor_a = detail::stage("baseline", [&] { return noise_floor(cfg.a, codes, cfg.segments); });
    r.spectrum_a = detail::stage("baseline", [&] { return qr_spectrum_codes(cfg.a, codes); });
    r.flags.zero_ok = std::abs(r.spectrum_a.top()) <= r.floor_a.floor;

    const auto pc = detail::stage("perturb", [&] { return build_breaking_perturbation(cfg); });
    r.holder = pc.holder;
    r.holder_bound = pc.holder_bound;
    r.eta_budget = eta_budget(cfg.a, cfg.cyl_depth, cfg.epsilon, pc.s.basis, cfg.space);
    r.flags.holder_ok = pc.holder.total() <= cfg.epsilon;

    r.breaking = detail::stage("breaking",
                               [&] { return breaking_check(cfg.a, pc.b, cfg.p, cfg.q, pc.z, cfg.obstruction_margin, cfg.holonomy); });
    r.flags.hu_equal = r.breaking.hu_equal;
    r.flags.obstruction_ok = r.breaking.obstruction_ok;

    evaluate_positivity(cfg, pc.b, pc, orbit, total, r);
    if (cfg.scan_max_period > 0)
        r.dominated_b = detail::stage("scan", [&] {
            return dominated_periodic_scan(pc.b, cfg.scan_max_period, 1, cfg.scan_theta);
        });
    r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

/// B'(w) = B(w) exp(Omega S_w) for seeded symmetric S_w, with the scale halved until
/// |B - B'|_{0,nu} <= target.
inline CocycleGenerator random_nearby_generator(const CocycleGenerator& b, const ShiftSpace& space, std::uint64_t seed,
                                                double target, double initial_scale = 0.1) {
    if (!(target > 0.0)) throw DomainError("random_nearby_generator: target must be > 0");
    Rng rng(seed);
    std::vector<Matrix> dirs;
    for (std::size_t c = 0; c < b.table().size(); ++c) dirs.push_back(random_symmetric(rng, b.ell(), 1.0));
    for (double scale = initial_scale; scale > 1e-12; scale *= 0.5) {
        std::vector<SympMatrix> table;
        for (std::size_t c = 0; c < b.table().size(); ++c)
            table.emplace_back(b.at(c).matrix() * symplectic_exp(scale * dirs[c]).matrix());
        CocycleGenerator out(b.k(), b.ell(), b.depth(), b.nu(), std::move(table));
        if (holder_distance(b, out, space).total() <= target) return out;
    }
    throw NotConverged("random_nearby_generator: could not reach the target distance");
}

struct OpennessSample {
    std::uint64_t seed = 0;
    double distance = 0.0;
    double qr_top = 0.0;
    double oracle_top = 0.0;
    bool pass = false;
};

/// Reruns the positivity tests of the breaking experiment on generators near B.
inline std::vector<OpennessSample> openness_probe(const BreakZeroConfig& cfg, const ExperimentReport& base, int samples,
                                                  std::uint64_t seed) {
    const auto pc = build_breaking_perturbation(cfg);
    const long total = static_cast<long>(cfg.segments) * cfg.segment_length;
    const SymbolicPoint orbit = sample_orbit(cfg.space, cfg.seed, total);
    std::vector<OpennessSample> out;
    for (int i = 0; i < samples; ++i) {
        OpennessSample s;
        s.seed = seed + static_cast<std::uint64_t>(i);
        const auto b2 = random_nearby_generator(pc.b, cfg.space, s.seed, cfg.eta / 10.0);
        s.distance = holder_distance(pc.b, b2, cfg.space).total();
        ExperimentReport r = base;
        BreakZeroConfig c2 = cfg;
        c2.oracle_word = base.oracle.word;
        evaluate_positivity(c2, b2, pc, orbit, total, r);
        s.qr_top = r.spectrum_b.top();
        s.oracle_top = r.oracle.top_b;
        s.pass = base.flags.zero_ok && r.flags.oracle_positive && r.flags.qr_positive;
        out.push_back(s);
    }
    return out;
}

} // namespace symplab
