#pragma once

// Perturbation toolbox: rotation families, the diagonal spectrum-splitting
// matrices, cylinder-localized rotations, and the breaking verification.
//
// On the shift, the ball around the perturbed point becomes the cylinder of
// its depth-c window and the bump collapses to the indicator of that cylinder.
// The indicator is nu-Hölder with quotient lambda^{-c nu}, which is what the
// Hölder bound below uses.

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "cocycle.hpp"
#include "errors.hpp"
#include "holonomy.hpp"
#include "linalg.hpp"
#include "lyapunov.hpp"
#include "shift.hpp"

namespace symplab {

namespace detail {

inline double glue(double s) { return s > 0.0 ? std::exp(-1.0 / s) : 0.0; }

} // namespace detail

/// C-infinity smooth step: 1 on [0, delta/2], 0 on [delta, inf), strictly decreasing between.
struct BumpProfile {
    double delta = 1.0;

    double operator()(double t) const {
        if (!(delta > 0.0)) throw DomainError("bump: delta must be > 0");
        if (t < 0.0) throw DomainError("bump: t must be >= 0");
        if (t <= 0.5 * delta) return 1.0;
        if (t >= delta) return 0.0;
        const double s = (t - 0.5 * delta) / (0.5 * delta);
        const double a = detail::glue(s), b = detail::glue(1.0 - s);
        return b / (a + b);
    }
};

inline double bump(double t, double delta) { return BumpProfile{delta}(t); }

enum class RotationKind { Plane2, ComplexSaddle4 };

/// Plane2: rotation by t*eps in the plane (e_i, e_i^), planes = {i}.
/// ComplexSaddle4: rotation by t*eps in both (e_i, e_j) and (e_i^, e_j^), planes = {i, j};
/// for l = 2 and planes {0, 1} this is the block-diagonal complex saddle rotation.
inline SympMatrix rotation_Rt(RotationKind kind, int ell, double t, double eps, const std::vector<int>& planes) {
    standard_form(ell);
    const double angle = t * eps;
    auto valid = [&](int i) { return i >= 0 && i < ell; };
    if (kind == RotationKind::Plane2) {
        if (planes.size() != 1 || !valid(planes[0])) throw DomainError("rotation_Rt: plane2 needs one plane index");
        return SympMatrix(plane_rotation(ell, planes[0], angle));
    }
    if (planes.size() != 2 || !valid(planes[0]) || !valid(planes[1]) || planes[0] == planes[1])
        throw DomainError("rotation_Rt: complex_saddle4 needs two distinct plane indices");
    const int i = planes[0], j = planes[1];
    const double c = std::cos(angle), s = std::sin(angle);
    Matrix r = Matrix::Identity(2 * ell, 2 * ell);
    for (int off : {0, ell}) {
        r(i + off, i + off) = c;
        r(i + off, j + off) = -s;
        r(j + off, i + off) = s;
        r(j + off, j + off) = c;
    }
    return SympMatrix(r);
}

enum class PerturbationCase { SaddleCenterI, HyperbolicII, HyperbolicIV };

inline PerturbationCase parse_perturbation_case(const std::string& s) {
    if (s == "saddle_center_i") return PerturbationCase::SaddleCenterI;
    if (s == "hyperbolic_ii") return PerturbationCase::HyperbolicII;
    if (s == "hyperbolic_iv") return PerturbationCase::HyperbolicIV;
    throw DomainError("unknown perturbation case '" + s + "'");
}

/// saddle_center_i: diag(1, 1+eta, 1, 1/(1+eta)); hyperbolic_ii: diag(1-eta, 1+eta, 1/(1-eta), 1/(1+eta));
/// hyperbolic_iv: diag(1-eta, 1/(1-eta)).
inline SympMatrix canonical_perturbation(PerturbationCase c, double eta) {
    Matrix m;
    switch (c) {
    case PerturbationCase::SaddleCenterI:
        if (eta == -1.0) throw DomainError("canonical_perturbation: eta = -1 is singular");
        m = Matrix::Identity(4, 4);
        m(1, 1) = 1.0 + eta;
        m(3, 3) = 1.0 / (1.0 + eta);
        break;
    case PerturbationCase::HyperbolicII:
        if (eta == -1.0 || eta == 1.0) throw DomainError("canonical_perturbation: eta = +-1 is singular");
        m = Matrix::Zero(4, 4);
        m.diagonal() << 1.0 - eta, 1.0 + eta, 1.0 / (1.0 - eta), 1.0 / (1.0 + eta);
        break;
    case PerturbationCase::HyperbolicIV:
        if (eta == 1.0) throw DomainError("canonical_perturbation: eta = 1 is singular");
        m = Matrix::Zero(2, 2);
        m.diagonal() << 1.0 - eta, 1.0 / (1.0 - eta);
        break;
    }
    return SympMatrix(m);
}

/// An orbit the perturbation cylinder must avoid, except possibly at one index.
struct Guard {
    SymbolicPoint point;
    std::optional<long> allowed_index;
    std::string label;
};

struct SeparationCertificate {
    std::string cylinder_window;
    long windows_checked = 0;
    /// (label, index) pairs where a guard orbit visits the cylinder; only allowed visits appear.
    std::vector<std::pair<std::string, long>> visits;
};

namespace detail {

/// Every distinct depth-c window along the orbit of an eventually periodic point
/// appears for some index in the returned range.
inline std::pair<long, long> window_range(const SymbolicPoint& x, int c) {
    return {x.origin() - c - static_cast<long>(x.left().size()), x.end() + c + static_cast<long>(x.right().size())};
}

} // namespace detail

/// Checks that the depth-c cylinder around `site` meets the guard orbits only at their allowed indices.
inline SeparationCertificate certify_separation(const SymbolicPoint& site, int cyl_depth,
                                                const std::vector<Guard>& guards) {
    SeparationCertificate cert;
    const Word target = site.slice(-cyl_depth, cyl_depth + 1);
    cert.cylinder_window = word_string(target);
    for (const auto& g : guards) {
        auto [lo, hi] = detail::window_range(g.point, cyl_depth);
        if (g.allowed_index) {
            lo = std::min(lo, *g.allowed_index);
            hi = std::max(hi, *g.allowed_index + 1);
        }
        for (long j = lo; j < hi; ++j) {
            ++cert.windows_checked;
            if (g.point.slice(j - cyl_depth, j + cyl_depth + 1) != target) continue;
            if (g.allowed_index && *g.allowed_index == j) {
                cert.visits.emplace_back(g.label, j);
                continue;
            }
            throw SeparationFailure("cylinder [" + cert.cylinder_window + "] of depth " + std::to_string(cyl_depth) +
                                    " meets the orbit of " + g.label + " at index " + std::to_string(j) +
                                    "; increase cyl_depth");
        }
    }
    return cert;
}

struct LocalizedCocycle {
    CocycleGenerator generator; // S: rotation on the cylinder, identity elsewhere
    SymbolicPoint site;
    int cyl_depth = 0;
    double eta = 0.0;
    Matrix basis; // symplectic basis (e_1..e_l, e_1^..e_l^) at the site
    Matrix rotation; // basis * R(eta) * basis^{-1}
    SeparationCertificate certificate;
};

/// Rotation by eta in every plane (e_i, e_i^) of `basis`, oriented so that
/// S e_i = cos(eta) e_i - sin(eta) e_i^, S e_i^ = sin(eta) e_i + cos(eta) e_i^.
inline Matrix basis_rotation(const Matrix& basis, double eta) {
    const int ell = ell_of(basis);
    Matrix r = Matrix::Identity(2 * ell, 2 * ell);
    for (int i = 0; i < ell; ++i) r = plane_rotation(ell, i, -eta) * r;
    return basis * r * symplectic_inverse(basis);
}

inline LocalizedCocycle localized_rotation_cocycle(const CocycleGenerator& a, const SymbolicPoint& site, int cyl_depth,
                                                   double eta, const Matrix& basis, const std::vector<Guard>& guards) {
    if (cyl_depth < a.depth())
        throw DomainError("localized_rotation_cocycle: cyl_depth must be >= the generator depth " +
                          std::to_string(a.depth()));
    if (basis.rows() != a.dim() || basis.cols() != a.dim())
        throw DimensionError("localized_rotation_cocycle: basis has wrong dimension");
    const SympMatrix p(basis, tol::form); // basis must be symplectic
    auto cert = certify_separation(site, cyl_depth, guards);
    const Matrix rot = basis_rotation(p.matrix(), eta);
    const Word target = site.slice(-cyl_depth, cyl_depth + 1);
    const Matrix id = Matrix::Identity(a.dim(), a.dim());
    auto s = CocycleGenerator::from_function(a.k(), a.ell(), cyl_depth, a.nu(),
                                             [&](const Word& w) { return w == target ? rot : id; });
    return LocalizedCocycle{std::move(s), site, cyl_depth, eta, p.matrix(), rot, std::move(cert)};
}

/// B(y) = A(y) S(y), at the larger of the two depths.
inline CocycleGenerator compose(const CocycleGenerator& a, const CocycleGenerator& s) {
    detail::require_compatible(a, s, "compose");
    const int depth = std::max(a.depth(), s.depth());
    const auto pa = a.padded(depth), ps = s.padded(depth);
    std::vector<SympMatrix> table;
    table.reserve(pa.table().size());
    for (std::size_t c = 0; c < pa.table().size(); ++c) {
        const Matrix& sm = ps.at(c).matrix();
        // keep off-support entries bitwise equal to A
        if (sm == Matrix::Identity(a.dim(), a.dim()))
            table.push_back(pa.at(c));
        else
            table.emplace_back(pa.at(c).matrix() * sm);
    }
    return CocycleGenerator(a.k(), a.ell(), depth, a.nu(), std::move(table));
}

/// Upper bound |A|_cyl (1 + lambda^{-c nu}) |S - I| for holder_distance(A, A S).
inline double localized_holder_bound(const CocycleGenerator& a, const LocalizedCocycle& s, const ShiftSpace& space) {
    const auto pa = a.padded(std::max(a.depth(), s.cyl_depth));
    const auto ps = s.generator.padded(pa.depth());
    double anorm = 0.0;
    const Matrix id = Matrix::Identity(a.dim(), a.dim());
    for (std::size_t c = 0; c < pa.table().size(); ++c)
        if (ps.at(c).matrix() != id) anorm = std::max(anorm, spectral_norm(pa.at(c).matrix()));
    return anorm * (1.0 + std::pow(space.lambda, -s.cyl_depth * a.nu())) * spectral_norm(s.rotation - id);
}

/// Largest eta for which the bound above stays <= eps, using |R(eta) - I| <= eta and |S - I| <= cond(P) eta.
inline double eta_budget(const CocycleGenerator& a, int cyl_depth, double eps, const Matrix& basis,
                         const ShiftSpace& space) {
    const double cond = spectral_norm(basis) * spectral_norm(symplectic_inverse(basis));
    return eps / (a.sup_norm() * cond * (1.0 + std::pow(space.lambda, -cyl_depth * a.nu())));
}

/// Symplectic eigenbasis at p: columns (u_1..u_l, u_1^..u_l^) with u_i expanding (descending
/// exponents) and omega(u_i, u_i^) = 1. Requires a real simple spectrum.
inline Matrix periodic_symplectic_eigenbasis(const CocycleGenerator& a, const PeriodicPoint& p) {
    const auto o = oseledets_pairing(a, p);
    const int ell = a.ell();
    std::vector<std::size_t> order(o.vectors.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return o.exponents[x] > o.exponents[y]; });
    Matrix basis(2 * ell, 2 * ell);
    for (int i = 0; i < ell; ++i) {
        const std::size_t e = order[static_cast<std::size_t>(i)];
        const auto f = static_cast<std::size_t>(o.partner[e]);
        if (!(o.exponents[e] > o.exponents[f])) throw DegenerateError("periodic_symplectic_eigenbasis: spectrum not split");
        const double w = omega(o.vectors[e], o.vectors[f], standard_form(ell));
        basis.col(i) = o.vectors[e];
        basis.col(ell + i) = o.vectors[f] / w;
    }
    return basis;
}

/// Obstruction data: distances between the two families of atoms at z.
struct AtomMatching {
    std::vector<Vector> from_p; // h^s_{p,z}(v_i)
    std::vector<Vector> from_q; // h^u_{q,z}(w_j)
    Eigen::MatrixXd distance;   // d_P(from_p[i], from_q[j])
    double min_distance = 0.0;
};

inline AtomMatching match_atoms(const Matrix& hs, const std::vector<Vector>& v, const Matrix& hu,
                                const std::vector<Vector>& w) {
    AtomMatching m;
    for (const auto& x : v) m.from_p.push_back((hs * x).normalized());
    for (const auto& x : w) m.from_q.push_back((hu * x).normalized());
    m.distance.resize(static_cast<Eigen::Index>(v.size()), static_cast<Eigen::Index>(w.size()));
    for (std::size_t i = 0; i < v.size(); ++i)
        for (std::size_t j = 0; j < w.size(); ++j)
            m.distance(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                projective_distance(m.from_p[i], m.from_q[j]);
    m.min_distance = m.distance.size() ? m.distance.minCoeff() : 0.0;
    return m;
}

struct BreakingReport {
    bool hu_equal = false;
    long hu_depth = 0;
    double obstruction = 0.0;
    double margin = 0.0;
    bool obstruction_ok = false;
    AtomMatching atoms;
    Holonomy hs_b; // h^s_{B,p,z}
    Holonomy hu_b; // h^u_{B,q,z}
};

/// (a) truncated H^u_{q,z} for A and B agree bitwise; (b) atoms transported from p and q to z are separated.
inline BreakingReport breaking_check(const CocycleGenerator& a, const CocycleGenerator& b, const PeriodicPoint& p,
                                     const PeriodicPoint& q, const SymbolicPoint& z, double margin = 0.01,
                                     const HolonomyOptions& opt = {}) {
    BreakingReport r;
    r.margin = margin;
    // same depth on both sides, so the truncations use bitwise identical factors off the support
    const int depth = std::max(a.depth(), b.depth());
    const Holonomy hu_a = unstable_holonomy(a.padded(depth), q.point(), z, opt);
    r.hu_b = unstable_holonomy(b.padded(depth), q.point(), z, opt);
    r.hu_depth = r.hu_b.depth_used;
    r.hu_equal = hu_a.depth_used == r.hu_b.depth_used && hu_a.map.matrix() == r.hu_b.map.matrix();

    const auto sp = periodic_spectrum(b, p), sq = periodic_spectrum(b, q);
    if (!sp.real_simple || !sq.real_simple) throw DegenerateError("breaking_check: spectra at p and q must be real and simple");
    r.hs_b = stable_holonomy(b, p.point(), z, opt);
    r.atoms = match_atoms(r.hs_b.map.matrix(), sp.eigenvectors, r.hu_b.map.matrix(), sq.eigenvectors);
    r.obstruction = r.atoms.min_distance;
    r.obstruction_ok = r.obstruction > margin;
    return r;
}

} // namespace symplab
