#pragma once

// Spectral types of symplectic matrices and the canonical sp(4) representatives.
//
// For M in sp(4) the characteristic polynomial is palindromic,
//   x^4 - t1 x^3 + t2 x^2 - t1 x + 1,   t1 = tr M,  t2 = (t1^2 - tr M^2) / 2,
// and y = x + 1/x solves y^2 - t1 y + (t2 - 2) = 0. Each root y accounts for a
// pair {sigma, 1/sigma}: |y| < 2 puts the pair on the unit circle, |y| > 2 makes
// it real off the circle, and a non-real y gives a complex quadruple. The
// classifier works from (t1, t2) alone, independently of any eigensolver.

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "errors.hpp"
#include "linalg.hpp"
#include "lyapunov.hpp"

namespace symplab {

enum class SpectralType { RealSimple, ComplexSaddle, SaddleCenter, GenericCenter, DegeneratedCenter, Parabolic, Other };

inline std::string to_string(SpectralType t) {
    switch (t) {
    case SpectralType::RealSimple: return "RealSimple";
    case SpectralType::ComplexSaddle: return "ComplexSaddle";
    case SpectralType::SaddleCenter: return "SaddleCenter";
    case SpectralType::GenericCenter: return "GenericCenter";
    case SpectralType::DegeneratedCenter: return "DegeneratedCenter";
    case SpectralType::Parabolic: return "Parabolic";
    case SpectralType::Other: return "Other";
    }
    return "?";
}

inline SpectralType parse_spectral_type(const std::string& s) {
    for (auto t : {SpectralType::RealSimple, SpectralType::ComplexSaddle, SpectralType::SaddleCenter,
                   SpectralType::GenericCenter, SpectralType::DegeneratedCenter, SpectralType::Parabolic,
                   SpectralType::Other})
        if (to_string(t) == s) return t;
    throw DomainError("unknown spectral type '" + s + "'");
}

/// The degenerated center is detected but lies outside the generic setting.
inline bool is_generic(SpectralType t) { return t != SpectralType::DegeneratedCenter; }

using Complex = std::complex<double>;

struct Quadruple {
    Complex representative;
    std::vector<Complex> members; // distinct values of {sigma, conj, 1/sigma, 1/conj}, one entry each
};

/// Eigenvalues of a symplectic matrix, each contracting one recomputed from the inverse.
inline std::vector<Complex> symplectic_eigenvalues(const Matrix& m) {
    std::vector<Complex> out;
    for (const auto& p : detail::symplectic_eigenpairs(m)) out.push_back(p.value);
    return out;
}

/// Groups the eigenvalues of M into orbits {sigma, conj sigma, 1/sigma, 1/conj sigma}.
/// A repeated eigenvalue gives repeated orbits.
inline std::vector<Quadruple> quadruple_structure(const SympMatrix& m, double eps = tol::eig) {
    auto ev = symplectic_eigenvalues(m.matrix());
    const double scale = std::max(1.0, spectral_norm(m.matrix()));
    const double match = eps * scale;
    std::vector<bool> used(ev.size(), false);
    std::vector<Quadruple> out;

    auto close = [&](Complex a, Complex b) { return std::abs(a - b) <= match * std::max(1.0, std::abs(a)); };
    // representatives: outside or on the unit circle, upper half plane first
    std::vector<std::size_t> order(ev.size());
    for (std::size_t i = 0; i < ev.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const double ma = std::abs(ev[a]), mb = std::abs(ev[b]);
        if (std::abs(ma - mb) > match) return ma > mb;
        return ev[a].imag() > ev[b].imag();
    });
    for (std::size_t idx : order) {
        if (used[idx]) continue;
        const Complex s = ev[idx];
        Quadruple q;
        q.representative = s;
        std::vector<Complex> cands{s, std::conj(s), 1.0 / s, 1.0 / std::conj(s)};
        for (const Complex c : cands) {
            bool dup = false;
            for (const Complex e : q.members) dup = dup || close(c, e);
            if (dup) continue;
            bool found = false;
            for (std::size_t j = 0; j < ev.size() && !found; ++j) {
                if (used[j] || !close(ev[j], c)) continue;
                used[j] = true;
                found = true;
                q.members.push_back(ev[j]);
            }
            if (!found)
                throw DegenerateError("quadruple_structure: eigenvalue orbit of " + std::to_string(s.real()) + "+" +
                                      std::to_string(s.imag()) + "i is incomplete");
        }
        out.push_back(std::move(q));
    }
    return out;
}

namespace detail {

inline void require_ell(const Matrix& m, int ell, const char* where) {
    if (ell_of(m) != ell) throw DimensionError(std::string(where) + ": expected a " + std::to_string(2 * ell) + "x" +
                                               std::to_string(2 * ell) + " matrix");
}

enum class PairKind { Unit, Real, Boundary };

/// Classifies the pair {sigma, 1/sigma} with sigma + 1/sigma = y (y real).
inline PairKind pair_kind(double y, double eps_unit) {
    const double ay = std::abs(y);
    if (ay < 2.0) return 2.0 - ay <= 1e-14 * 2.0 ? PairKind::Boundary : PairKind::Unit;
    // real pair: |sigma| = (|y| + sqrt(y^2 - 4)) / 2 >= 1
    const double sigma = 0.5 * (ay + std::sqrt(std::max(0.0, ay * ay - 4.0)));
    return sigma - 1.0 <= eps_unit ? PairKind::Boundary : PairKind::Real;
}

} // namespace detail

struct Sp4Invariants {
    double t1 = 0.0, t2 = 0.0;
    double discriminant = 0.0; // of y^2 - t1 y + (t2 - 2)
};

inline Sp4Invariants sp4_invariants(const Matrix& m) {
    Sp4Invariants v;
    v.t1 = m.trace();
    v.t2 = 0.5 * (v.t1 * v.t1 - (m * m).trace());
    v.discriminant = v.t1 * v.t1 - 4.0 * (v.t2 - 2.0);
    return v;
}

/// The four eigenvalues of M in sp(4) from the palindromic characteristic polynomial.
inline std::vector<Complex> sp4_eigenvalues_from_charpoly(const Matrix& m) {
    detail::require_ell(m, 2, "sp4_eigenvalues_from_charpoly");
    const auto v = sp4_invariants(m);
    const Complex sd = std::sqrt(Complex(v.discriminant, 0.0));
    std::vector<Complex> out;
    for (const Complex y : {0.5 * (v.t1 + sd), 0.5 * (v.t1 - sd)}) {
        const Complex r = std::sqrt(y * y - 4.0);
        Complex s = 0.5 * (y + r);
        if (std::abs(s) < 1.0) s = 0.5 * (y - r);
        out.push_back(s);
        out.push_back(1.0 / s);
    }
    return out;
}

inline SpectralType classify_sp4(const SympMatrix& m, double eps_unit = tol::unit) {
    detail::require_ell(m.matrix(), 2, "classify_sp4");
    const auto v = sp4_invariants(m.matrix());
    const double scale = std::max({1.0, std::abs(v.t1), std::abs(v.t2)});
    const double d_tol = 1e-10 * scale * scale;

    if (v.discriminant < -d_tol) {
        // non-real y: a quadruple off the unit circle, unless it sits within eps_unit of it
        const Complex y = 0.5 * (v.t1 + Complex(0.0, std::sqrt(-v.discriminant)));
        const Complex r = std::sqrt(y * y - 4.0);
        const double mod = std::max(std::abs(0.5 * (y + r)), std::abs(0.5 * (y - r)));
        if (mod - 1.0 > eps_unit) return SpectralType::ComplexSaddle;
        return SpectralType::DegeneratedCenter;
    }
    const double sd = std::sqrt(std::max(0.0, v.discriminant));
    const double y1 = 0.5 * (v.t1 + sd), y2 = 0.5 * (v.t1 - sd);
    const bool equal = std::abs(v.discriminant) <= d_tol;
    const auto k1 = detail::pair_kind(y1, eps_unit), k2 = detail::pair_kind(y2, eps_unit);
    using detail::PairKind;
    if (k1 == PairKind::Boundary || k2 == PairKind::Boundary) return SpectralType::Parabolic;
    if (k1 == PairKind::Unit && k2 == PairKind::Unit) return equal ? SpectralType::DegeneratedCenter : SpectralType::GenericCenter;
    if (k1 != k2) return SpectralType::SaddleCenter;
    // both real pairs: distinct moduli unless |y1| = |y2|
    if (equal || std::abs(std::abs(y1) - std::abs(y2)) <= 1e-10 * scale) return SpectralType::Other;
    return SpectralType::RealSimple;
}

inline SpectralType classify_sp2(const SympMatrix& m, double eps_unit = tol::unit) {
    detail::require_ell(m.matrix(), 1, "classify_sp2");
    switch (detail::pair_kind(m.matrix().trace(), eps_unit)) {
    case detail::PairKind::Unit: return SpectralType::GenericCenter;
    case detail::PairKind::Real: return SpectralType::RealSimple;
    case detail::PairKind::Boundary: return SpectralType::Parabolic;
    }
    return SpectralType::Other;
}

/// True iff all eigenvalues are real with pairwise distinct moduli.
inline bool is_simple_real(const SympMatrix& m, double eps = tol::eig) {
    if (m.ell() == 1) return classify_sp2(m) == SpectralType::RealSimple;
    if (m.ell() == 2) return classify_sp4(m) == SpectralType::RealSimple;
    return detail::real_simple_values(symplectic_eigenvalues(m.matrix()), eps);
}

/// sp2 / sp4 classification; larger dimensions only separate RealSimple from Other.
inline SpectralType classify(const SympMatrix& m) {
    if (m.ell() == 1) return classify_sp2(m);
    if (m.ell() == 2) return classify_sp4(m);
    return is_simple_real(m) ? SpectralType::RealSimple : SpectralType::Other;
}

/// Max over eigenvalues of |p(sigma)| / (1 + sum |coefficients| |sigma|^k), p the characteristic polynomial.
inline double charpoly_residual(const Matrix& m, const std::vector<Complex>& eigenvalues) {
    // Faddeev-LeVerrier coefficients, adequate at these sizes
    const auto n = m.rows();
    std::vector<double> c(static_cast<std::size_t>(n + 1), 0.0);
    c[0] = 1.0;
    Matrix mk = Matrix::Identity(n, n);
    Matrix prod;
    for (Eigen::Index k = 1; k <= n; ++k) {
        prod = m * mk;
        c[static_cast<std::size_t>(k)] = -prod.trace() / static_cast<double>(k);
        mk = prod + c[static_cast<std::size_t>(k)] * Matrix::Identity(n, n);
    }
    double worst = 0.0;
    for (const Complex s : eigenvalues) {
        Complex acc = 0.0;
        double mag = 0.0;
        for (std::size_t k = 0; k <= static_cast<std::size_t>(n); ++k) {
            acc = acc * s + c[k];
            mag = mag * std::abs(s) + std::abs(c[k]);
        }
        worst = std::max(worst, std::abs(acc) / (1.0 + mag));
    }
    return worst;
}

/// The canonical sp(4) representatives, in the basis (e1, e2, e1^, e2^).
///   ComplexSaddle      params (a, b):       b != 0, a^2 + b^2 != 1
///   SaddleCenter       params (a, b, c):    a^2 + b^2 = 1, b != 0, c != 0, |c| != 1
///   GenericCenter      params (a, b, c, d): a^2 + b^2 = c^2 + d^2 = 1, b, d != 0, (a, |b|) != (c, |d|)
///   DegeneratedCenter  params (a, b):       a^2 + b^2 = 1, b != 0
inline SympMatrix canonical_matrix(SpectralType type, const std::vector<double>& params) {
    constexpr double kTol = 1e-12;
    auto need = [&](std::size_t n) {
        if (params.size() != n)
            throw DomainError("canonical_matrix: " + to_string(type) + " takes " + std::to_string(n) + " parameters");
    };
    auto check = [&](bool ok, const char* what) {
        if (!ok) throw DomainError(std::string("canonical_matrix: constraint violated: ") + what);
    };
    Matrix m = Matrix::Zero(4, 4);
    switch (type) {
    case SpectralType::ComplexSaddle: {
        need(2);
        const double a = params[0], b = params[1], r = a * a + b * b;
        check(b != 0.0, "b != 0");
        check(std::abs(r - 1.0) > kTol, "a^2 + b^2 != 1");
        m << a, -b, 0, 0, b, a, 0, 0, 0, 0, a / r, -b / r, 0, 0, b / r, a / r;
        break;
    }
    case SpectralType::SaddleCenter: {
        need(3);
        const double a = params[0], b = params[1], c = params[2];
        check(std::abs(a * a + b * b - 1.0) <= kTol, "a^2 + b^2 = 1");
        check(b != 0.0 && c != 0.0, "b, c != 0");
        check(std::abs(std::abs(c) - 1.0) > kTol, "|c| != 1");
        m << a, 0, -b, 0, 0, c, 0, 0, b, 0, a, 0, 0, 0, 0, 1.0 / c;
        break;
    }
    case SpectralType::GenericCenter: {
        need(4);
        const double a = params[0], b = params[1], c = params[2], d = params[3];
        check(std::abs(a * a + b * b - 1.0) <= kTol && std::abs(c * c + d * d - 1.0) <= kTol,
              "a^2 + b^2 = c^2 + d^2 = 1");
        check(b != 0.0 && d != 0.0, "b, d != 0");
        check(std::abs(a - c) > kTol, "the two eigenvalue pairs differ");
        m << a, 0, -b, 0, 0, c, 0, -d, b, 0, a, 0, 0, d, 0, c;
        break;
    }
    case SpectralType::DegeneratedCenter: {
        need(2);
        const double a = params[0], b = params[1];
        check(std::abs(a * a + b * b - 1.0) <= kTol, "a^2 + b^2 = 1");
        check(b != 0.0, "b != 0");
        m << a, 0, -b, 0, 0, a, 0, -b, b, 0, a, 0, 0, b, 0, a;
        break;
    }
    default:
        throw DomainError("canonical_matrix: no table entry for " + to_string(type));
    }
    return SympMatrix(m);
}

/// The eigenvalues listed in the table for the given parameters.
inline std::vector<Complex> canonical_eigenvalues(SpectralType type, const std::vector<double>& p) {
    switch (type) {
    case SpectralType::ComplexSaddle: {
        const double r = p[0] * p[0] + p[1] * p[1];
        return {{p[0], p[1]}, {p[0], -p[1]}, {p[0] / r, p[1] / r}, {p[0] / r, -p[1] / r}};
    }
    case SpectralType::SaddleCenter: return {{p[0], p[1]}, {p[0], -p[1]}, {p[2], 0.0}, {1.0 / p[2], 0.0}};
    case SpectralType::GenericCenter: return {{p[0], p[1]}, {p[0], -p[1]}, {p[2], p[3]}, {p[2], -p[3]}};
    case SpectralType::DegeneratedCenter: return {{p[0], p[1]}, {p[0], -p[1]}, {p[0], p[1]}, {p[0], -p[1]}};
    default: throw DomainError("canonical_eigenvalues: no table entry for " + to_string(type));
    }
}

} // namespace symplab
