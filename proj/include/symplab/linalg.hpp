#pragma once

// Symplectic linear algebra on R^{2l}, l <= 4.
//
// Conventions: the group test uses J = [[0, -I], [I, 0]]; the bilinear form
// uses Omega = -J, so that omega(e_i, e_{l+i}) = +1. Both describe the same
// group, since A^T J A = J iff A^T Omega A = Omega.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"
#include "rng.hpp"

namespace symplab {

inline constexpr int kMaxEll = 4;
inline constexpr int kMaxDim = 2 * kMaxEll;

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, kMaxDim, kMaxDim>;
using Vector = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;

/// Tolerances shared across modules.
namespace tol {
inline constexpr double symp = 1e-9;   // symplectic defect accepted at construction
inline constexpr double form = 1e-8;   // zero tests on omega values
inline constexpr double drift = 1e-6;  // scaled defect accepted on long products
inline constexpr double unit = 1e-8;   // |sigma| == 1 decisions
inline constexpr double eig = 1e-8;    // eigenvalue matching
} // namespace tol

struct StandardForm {
    int ell = 1;
    Matrix J;
    Matrix Omega;

    int dim() const { return 2 * ell; }
};

inline StandardForm standard_form(int ell) {
    if (ell < 1 || ell > kMaxEll)
        throw DomainError("standard_form: ell must lie in [1, " + std::to_string(kMaxEll) + "], got " +
                          std::to_string(ell));
    StandardForm f;
    f.ell = ell;
    f.J = Matrix::Zero(2 * ell, 2 * ell);
    f.J.topRightCorner(ell, ell) = -Matrix::Identity(ell, ell);
    f.J.bottomLeftCorner(ell, ell) = Matrix::Identity(ell, ell);
    f.Omega = -f.J;
    return f;
}

inline int ell_of(const Matrix& m) {
    if (m.rows() != m.cols() || m.rows() % 2 != 0 || m.rows() < 2 || m.rows() > kMaxDim)
        throw DimensionError("expected a square 2l x 2l matrix with l <= " + std::to_string(kMaxEll) + ", got " +
                             std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
    return static_cast<int>(m.rows() / 2);
}

inline double omega(const Vector& u, const Vector& v, const StandardForm& form) {
    if (u.size() != form.dim() || v.size() != form.dim())
        throw DimensionError("omega: vectors must have dimension " + std::to_string(form.dim()));
    return u.dot(form.Omega * v);
}

/// Max-abs entry of M^T J M - J.
inline double symplectic_defect(const Matrix& m, const StandardForm& form) {
    if (m.rows() != form.dim() || m.cols() != form.dim())
        throw DimensionError("symplectic_defect: dimension mismatch");
    return (m.transpose() * form.J * m - form.J).cwiseAbs().maxCoeff();
}

inline double symplectic_defect(const Matrix& m) { return symplectic_defect(m, standard_form(ell_of(m))); }

inline double spectral_norm(const Matrix& m) {
    if (m.size() == 0) return 0.0;
    if (m.rows() == 2 && m.cols() == 2) {
        // closed form: largest singular value of a 2x2
        const double a = m(0, 0), b = m(0, 1), c = m(1, 0), d = m(1, 1);
        const double s1 = a * a + b * b + c * c + d * d;
        const double det = a * d - b * c;
        const double disc = std::sqrt(std::max(0.0, s1 * s1 - 4.0 * det * det));
        return std::sqrt(0.5 * (s1 + disc));
    }
    Eigen::JacobiSVD<Matrix> svd(m);
    return svd.singularValues()(0);
}

/// Defect divided by max(1, ||M||^2): the backward-error view of the defect,
/// which stays meaningful for long products whose entries grow exponentially.
inline double scaled_defect(const Matrix& m) {
    const double n = spectral_norm(m);
    return symplectic_defect(m) / std::max(1.0, n * n);
}

/// Exact inverse of a symplectic matrix: M^{-1} = -J M^T J.
inline Matrix symplectic_inverse(const Matrix& m) {
    const StandardForm f = standard_form(ell_of(m));
    return -f.J * m.transpose() * f.J;
}

/// Matrix exponential by scaling and squaring of a truncated Taylor series.
inline Matrix expm(const Matrix& a) {
    const double norm1 = a.cwiseAbs().colwise().sum().maxCoeff();
    int squarings = 0;
    if (norm1 > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm1 / 0.5)));
    const Matrix x = a / std::ldexp(1.0, squarings);
    Matrix result = Matrix::Identity(a.rows(), a.cols());
    Matrix term = result;
    bool converged = false;
    for (int k = 1; k <= 40; ++k) {
        term = (term * x) / static_cast<double>(k);
        result += term;
        if (term.cwiseAbs().maxCoeff() <= 1e-18 * result.cwiseAbs().maxCoeff()) {
            converged = true;
            break;
        }
    }
    if (!converged) throw NotConverged("expm: Taylor series did not converge within 40 terms");
    for (int i = 0; i < squarings; ++i) result = result * result;
    return result;
}

/// A 2l x 2l matrix certified symplectic at construction.
///
/// The cached defect is the absolute max-abs entry of M^T J M - J. The
/// acceptance test is on the scaled defect, which coincides with it for
/// matrices of norm <= 1 and stays meaningful for long products.
class SympMatrix {
public:
    SympMatrix() : SympMatrix(Matrix::Identity(2, 2)) {}

    explicit SympMatrix(Matrix m, double tolerance = tol::symp) : m_(std::move(m)) {
        ell_ = ell_of(m_);
        if (!m_.allFinite()) throw SymplecticError("SympMatrix: non-finite entries");
        defect_ = symplectic_defect(m_);
        const double n = spectral_norm(m_);
        if (defect_ / std::max(1.0, n * n) > tolerance)
        {
            std::ostringstream msg;
            msg << "SympMatrix: scaled symplectic defect " << defect_ / std::max(1.0, n * n) << " exceeds tolerance "
                << tolerance;
            throw SymplecticError(msg.str());
        }
    }

    static SympMatrix identity(int ell) { return SympMatrix(Matrix::Identity(2 * ell, 2 * ell)); }

    const Matrix& matrix() const { return m_; }
    int ell() const { return ell_; }
    int dim() const { return 2 * ell_; }
    double defect() const { return defect_; }
    double operator()(int i, int j) const { return m_(i, j); }

    SympMatrix inverse() const { return SympMatrix(symplectic_inverse(m_), tol::drift); }

    /// Product, checked against the drift bound rather than the construction bound.
    friend SympMatrix operator*(const SympMatrix& a, const SympMatrix& b) {
        if (a.ell_ != b.ell_) throw DimensionError("SympMatrix product: dimension mismatch");
        return SympMatrix(a.m_ * b.m_, tol::drift);
    }

    friend bool operator==(const SympMatrix& a, const SympMatrix& b) {
        return a.m_.rows() == b.m_.rows() && a.m_ == b.m_;
    }

private:
    Matrix m_;
    int ell_ = 1;
    double defect_ = 0.0;
};

enum class SubspaceClass { Symplectic, Isotropic, Lagrangian, Mixed };

inline std::string to_string(SubspaceClass c) {
    switch (c) {
    case SubspaceClass::Symplectic: return "Symplectic";
    case SubspaceClass::Isotropic: return "Isotropic";
    case SubspaceClass::Lagrangian: return "Lagrangian";
    case SubspaceClass::Mixed: return "Mixed";
    }
    return "?";
}

namespace detail {

inline Eigen::MatrixXd stack_columns(const std::vector<Vector>& basis, int dim) {
    Eigen::MatrixXd b(dim, static_cast<Eigen::Index>(basis.size()));
    for (std::size_t a = 0; a < basis.size(); ++a) {
        if (basis[a].size() != dim) throw DimensionError("basis vector has wrong dimension");
        b.col(static_cast<Eigen::Index>(a)) = basis[a];
    }
    return b;
}

} // namespace detail

/// Classifies span(basis) by its omega Gram matrix, computed on unit vectors.
inline SubspaceClass classify_subspace(const std::vector<Vector>& basis, const StandardForm& form,
                                       double eps_form = tol::form) {
    const int dim = form.dim();
    if (basis.empty()) return SubspaceClass::Isotropic;
    if (static_cast<int>(basis.size()) > dim) throw DegenerateError("classify_subspace: too many vectors");
    Eigen::MatrixXd b = detail::stack_columns(basis, dim);
    for (Eigen::Index a = 0; a < b.cols(); ++a) {
        const double n = b.col(a).norm();
        if (n == 0.0) throw DegenerateError("classify_subspace: zero vector in basis");
        b.col(a) /= n;
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(b);
    const auto& sv = svd.singularValues();
    if (sv(sv.size() - 1) <= 1e-10 * sv(0)) throw DegenerateError("classify_subspace: linearly dependent basis");

    const Eigen::MatrixXd omega_full = form.Omega;
    const Eigen::MatrixXd gram = b.transpose() * omega_full * b;
    const auto count = static_cast<int>(basis.size());
    if (gram.cwiseAbs().maxCoeff() <= eps_form)
        return count == form.ell ? SubspaceClass::Lagrangian : SubspaceClass::Isotropic;
    if (count % 2 == 0) {
        Eigen::JacobiSVD<Eigen::MatrixXd> gsvd(gram);
        const auto& gs = gsvd.singularValues();
        if (gs(gs.size() - 1) > eps_form) return SubspaceClass::Symplectic;
    }
    return SubspaceClass::Mixed;
}

/// Extends `partial` to a symplectic basis by symplectic Gram-Schmidt.
///
/// Returns P with columns (e_1..e_l, f_1..f_l), omega(e_i, f_j) = delta_ij and
/// all other pairings zero, i.e. P^T Omega P = Omega. span(partial) is contained
/// in the span of the pairs built from it.
inline Matrix complete_symplectic_basis(const std::vector<Vector>& partial, const StandardForm& form,
                                        double eps_form = tol::form) {
    const int dim = form.dim();
    const int ell = form.ell;
    if (static_cast<int>(partial.size()) > dim) throw DegenerateError("complete_symplectic_basis: too many vectors");

    struct Candidate {
        Vector v;
        bool from_input;
    };
    std::vector<Candidate> queue;
    for (const auto& p : partial) {
        if (p.size() != dim) throw DimensionError("complete_symplectic_basis: wrong vector dimension");
        queue.push_back({p, true});
    }
    for (int i = 0; i < dim; ++i) queue.push_back({Vector::Unit(dim, i), false});

    std::vector<Vector> es, fs;
    auto project = [&](Vector u) {
        for (std::size_t k = 0; k < es.size(); ++k) {
            const double a = omega(u, fs[k], form);
            const double b = omega(u, es[k], form);
            u = u - a * es[k] + b * fs[k];
        }
        return u;
    };

    constexpr double kZero = 1e-10;
    std::size_t head = 0;
    while (static_cast<int>(es.size()) < ell && head < queue.size()) {
        Candidate c = queue[head++];
        const double scale = c.v.norm();
        Vector e = project(c.v);
        if (scale == 0.0 || e.norm() <= kZero * scale) {
            if (c.from_input) throw DegenerateError("complete_symplectic_basis: input vectors are dependent");
            continue;
        }
        e /= e.norm();
        bool paired = false;
        for (std::size_t j = head; j < queue.size(); ++j) {
            Vector f = project(queue[j].v);
            const double w = omega(e, f, form);
            if (std::abs(w) > 1e-6 * std::max(1.0, f.norm())) {
                es.push_back(e);
                fs.push_back(f / w);
                queue.erase(queue.begin() + static_cast<std::ptrdiff_t>(j));
                paired = true;
                break;
            }
        }
        if (!paired) throw DegenerateError("complete_symplectic_basis: no symplectic partner found");
    }
    if (static_cast<int>(es.size()) != ell) throw DegenerateError("complete_symplectic_basis: basis not extendable");
    for (std::size_t j = head; j < queue.size(); ++j)
        if (queue[j].from_input && project(queue[j].v).norm() > 1e-8 * std::max(1.0, queue[j].v.norm()))
            throw DegenerateError("complete_symplectic_basis: input not contained in the constructed span");

    Matrix p(dim, dim);
    for (int i = 0; i < ell; ++i) {
        p.col(i) = es[static_cast<std::size_t>(i)];
        p.col(ell + i) = fs[static_cast<std::size_t>(i)];
    }
    const double gram_err = (p.transpose() * form.Omega * p - form.Omega).cwiseAbs().maxCoeff();
    if (gram_err > eps_form)
        throw DegenerateError("complete_symplectic_basis: Gram verification failed, error " + std::to_string(gram_err));
    return p;
}

/// exp(Omega S) for symmetric S; Hamiltonian generators exponentiate into the group.
inline SympMatrix symplectic_exp(const Matrix& symmetric) {
    const int ell = ell_of(symmetric);
    if ((symmetric - symmetric.transpose()).cwiseAbs().maxCoeff() > 1e-14 * std::max(1.0, symmetric.cwiseAbs().maxCoeff()))
        throw DomainError("symplectic_exp: generator must be symmetric");
    return SympMatrix(expm(standard_form(ell).Omega * symmetric));
}

inline Matrix random_symmetric(Rng& rng, int ell, double scale) {
    const int dim = 2 * ell;
    Matrix s(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = i; j < dim; ++j) {
            const double v = rng.uniform(-scale, scale);
            s(i, j) = v;
            s(j, i) = v;
        }
    return s;
}

/// exp(Omega S) for a seeded random symmetric S with entries in [-scale, scale].
inline SympMatrix random_symplectic(Rng& rng, int ell, double scale) {
    if (!(scale >= 0.0)) throw DomainError("random_symplectic: scale must be non-negative");
    standard_form(ell); // validates ell
    return symplectic_exp(random_symmetric(rng, ell, scale));
}

inline SympMatrix random_symplectic(std::uint64_t seed, int ell, double scale) {
    Rng rng(seed);
    return random_symplectic(rng, ell, scale);
}

/// Rotation by angle t in the coordinate plane (e_i, e_{l+i}).
inline Matrix plane_rotation(int ell, int i, double t) {
    Matrix r = Matrix::Identity(2 * ell, 2 * ell);
    const double c = std::cos(t), s = std::sin(t);
    r(i, i) = c;
    r(i, ell + i) = -s;
    r(ell + i, i) = s;
    r(ell + i, ell + i) = c;
    return r;
}

} // namespace symplab
