#pragma once

// Stable and unstable holonomies of locally constant cocycles.
//
//   H^s_{x,y} = lim_n A^n(y)^{-1} A^n(x)          (futures of x, y agree)
//   H^u_{x,y} = lim_n A^n(f^{-n} y) A^{-n}(x)     (pasts of x, y agree)
//
// For a depth-m generator the factors of x and y coincide as soon as the
// shifted windows stop covering a disagreeing coordinate, so the limits are
// reached after finitely many steps. That step is computed up front; when it
// is within n_max the result is the exact limit and the Cauchy gap is 0.

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cocycle.hpp"
#include "errors.hpp"
#include "linalg.hpp"
#include "shift.hpp"

namespace symplab {

enum class Side { Stable, Unstable };

inline std::string to_string(Side s) { return s == Side::Stable ? "s" : "u"; }

inline Side parse_side(const std::string& s) {
    if (s == "s" || s == "stable") return Side::Stable;
    if (s == "u" || s == "unstable") return Side::Unstable;
    throw DomainError("side must be 's' or 'u', got '" + s + "'");
}

struct HolonomyOptions {
    double tol = 1e-10;
    long n_max = 200;
    bool exploit_exact = true;
};

struct Holonomy {
    SympMatrix map;
    SymbolicPoint from_point;
    SymbolicPoint to_point;
    Side side = Side::Stable;
    long depth_used = 0;
    double cauchy_gap = 0.0;
    /// True when depth_used reached the step after which the truncations are constant.
    bool exact = false;
    /// Norms of H_{n} - H_{n-1} for n = 1 .. depth_used.
    std::vector<double> increments;
};

namespace detail {

/// Step after which the truncations no longer change, or 0 if x == y.
inline long exact_depth(const CocycleGenerator& a, const SymbolicPoint& x, const SymbolicPoint& y, Side side) {
    const long m = a.depth();
    if (side == Side::Stable) {
        const auto d = last_disagreement(x, y);
        return d ? std::max(0L, *d + m + 1) : 0L;
    }
    const auto r = first_disagreement(x, y);
    return r ? std::max(0L, m - *r) : 0L;
}

inline double increment_norm(const Matrix& a, const Matrix& b) { return spectral_norm(a - b); }

} // namespace detail

/// Holonomy from the fiber over x to the fiber over y along the given leaf.
inline Holonomy holonomy(const CocycleGenerator& a, const SymbolicPoint& x, const SymbolicPoint& y, Side side,
                         const HolonomyOptions& opt = {}) {
    if (opt.n_max < 1 || !(opt.tol > 0.0)) throw DomainError("holonomy: need n_max >= 1 and tol > 0");
    const long n_exact = detail::exact_depth(a, x, y, side); // throws NotOnLeaf
    const int dim = a.dim();

    Holonomy h{SympMatrix::identity(a.ell()), x, y, side, 0, 0.0, false, {}};
    if (n_exact == 0) {
        h.exact = true;
        return h;
    }
    const bool stop_exact = opt.exploit_exact && n_exact <= opt.n_max;
    const long limit = stop_exact ? n_exact : opt.n_max;

    // forward: X_n = A^n(x); backward: X_n = A^n(f^{-n} x) built by right multiplication
    const auto cx = side == Side::Stable ? a.codes(x, 0, limit) : a.codes(x, -limit, limit);
    const auto cy = side == Side::Stable ? a.codes(y, 0, limit) : a.codes(y, -limit, limit);
    Matrix xs = Matrix::Identity(dim, dim), ys = xs, prev = xs, cur = xs;
    for (long n = 1; n <= limit; ++n) {
        if (side == Side::Stable) {
            xs = a.at(cx[static_cast<std::size_t>(n - 1)]).matrix() * xs;
            ys = a.at(cy[static_cast<std::size_t>(n - 1)]).matrix() * ys;
            cur = symplectic_inverse(ys) * xs;
        } else {
            xs = xs * a.at(cx[static_cast<std::size_t>(limit - n)]).matrix();
            ys = ys * a.at(cy[static_cast<std::size_t>(limit - n)]).matrix();
            cur = ys * symplectic_inverse(xs);
        }
        if (!cur.allFinite()) throw NotConverged("holonomy: truncation overflowed at n = " + std::to_string(n));
        const double inc = detail::increment_norm(cur, prev);
        h.increments.push_back(inc);
        h.depth_used = n;
        prev = cur;
        if (!stop_exact && inc < opt.tol) break;
    }
    if (stop_exact) {
        h.exact = true;
        h.cauchy_gap = 0.0;
    } else {
        h.cauchy_gap = h.increments.back();
        if (!(h.cauchy_gap < opt.tol)) {
            std::ostringstream msg;
            msg << "holonomy: Cauchy gap " << h.cauchy_gap << " still above tol " << opt.tol << " after "
                << h.depth_used << " steps";
            throw NotConverged(msg.str());
        }
    }
    detail::check_drift(cur, "holonomy");
    h.map = SympMatrix(cur, tol::drift);
    return h;
}

inline Holonomy stable_holonomy(const CocycleGenerator& a, const SymbolicPoint& x, const SymbolicPoint& y,
                                const HolonomyOptions& opt = {}) {
    return holonomy(a, x, y, Side::Stable, opt);
}

inline Holonomy unstable_holonomy(const CocycleGenerator& a, const SymbolicPoint& x, const SymbolicPoint& y,
                                  const HolonomyOptions& opt = {}) {
    return holonomy(a, x, y, Side::Unstable, opt);
}

struct ProjectivePoint {
    Vector v; // unit, v ~ -v

    static ProjectivePoint from(const Vector& u) {
        const double n = u.norm();
        if (!(n > 0.0)) throw DegenerateError("ProjectivePoint: zero vector");
        return ProjectivePoint{u / n};
    }
};

inline double projective_distance(const Vector& u, const Vector& v) {
    const Vector a = u / u.norm(), b = v / v.norm();
    return std::min((a - b).norm(), (a + b).norm());
}

inline double projective_distance(const ProjectivePoint& u, const ProjectivePoint& v) {
    return projective_distance(u.v, v.v);
}

inline ProjectivePoint projective_act(const Matrix& h, const ProjectivePoint& p) {
    return ProjectivePoint::from(h * p.v);
}

inline ProjectivePoint projective_act(const Holonomy& h, const ProjectivePoint& p) {
    return projective_act(h.map.matrix(), p);
}

struct HolonomyPropertiesReport {
    double identity_residual = 0.0;      // |H_{x,x} - I|
    double composition_residual = 0.0;   // |H_{x,z} - H_{y,z} H_{x,y}| / max(1, |H_{x,z}|)
    double equivariance_residual = 0.0;  // max_j |H_{f^j y, f^j z} - A^j(z) H_{y,z} A^j(y)^{-1}| / max(1, ..)
    double lipschitz_constant = 0.0;     // |H_{x,y} - I| / d(x,y)
    double max_cauchy_gap = 0.0;

    bool pass(double tol) const {
        return identity_residual <= tol && composition_residual <= tol && equivariance_residual <= tol;
    }
};

/// Checks the holonomy laws for three points on one leaf of the given side.
inline HolonomyPropertiesReport holonomy_properties_check(const CocycleGenerator& a, const ShiftSpace& space,
                                                          const SymbolicPoint& x, const SymbolicPoint& y,
                                                          const SymbolicPoint& z, Side side = Side::Unstable,
                                                          const HolonomyOptions& opt = {}) {
    HolonomyPropertiesReport r;
    const int dim = a.dim();
    const Matrix id = Matrix::Identity(dim, dim);
    auto track = [&](const Holonomy& h) {
        r.max_cauchy_gap = std::max(r.max_cauchy_gap, h.cauchy_gap);
        return h.map.matrix();
    };
    r.identity_residual = spectral_norm(track(holonomy(a, x, x, side, opt)) - id);

    const Matrix hxy = track(holonomy(a, x, y, side, opt));
    const Matrix hyz = track(holonomy(a, y, z, side, opt));
    const Matrix hxz = track(holonomy(a, x, z, side, opt));
    r.composition_residual = spectral_norm(hxz - hyz * hxy) / std::max(1.0, spectral_norm(hxz));

    for (long j = -3; j <= 3; ++j) {
        const Matrix lhs = track(holonomy(a, shift(y, j), shift(z, j), side, opt));
        const Matrix rhs = iterate(a, z, j).matrix() * hyz * symplectic_inverse(iterate(a, y, j).matrix());
        r.equivariance_residual =
            std::max(r.equivariance_residual, spectral_norm(lhs - rhs) / std::max(1.0, spectral_norm(lhs)));
    }
    const double d = dist(x, y, space);
    if (d > 0.0) r.lipschitz_constant = spectral_norm(hxy - id) / d;
    return r;
}

} // namespace symplab
