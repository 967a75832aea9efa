#pragma once

// Locally constant symplectic cocycles over the full shift.
//
// A generator of depth m assigns a symplectic matrix to every window
// (x_{-m}, ..., x_m). Windows are encoded base k with x_{-m} as the most
// significant digit, so the window string "010" reads x_{-1} x_0 x_1.

#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"
#include "linalg.hpp"
#include "shift.hpp"

namespace symplab {

class CocycleGenerator {
public:
    using Builder = std::function<Matrix(const Word&)>;

    CocycleGenerator(int k, int ell, int depth, double nu, std::vector<SympMatrix> table)
        : k_(k), ell_(ell), depth_(depth), nu_(nu), table_(std::move(table)) {
        if (k < 2 || k > 10) throw DomainError("CocycleGenerator: alphabet size must lie in [2, 10]");
        standard_form(ell);
        if (depth < 0) throw DomainError("CocycleGenerator: depth must be >= 0");
        if (!(nu > 0.0 && nu <= 1.0)) throw DomainError("CocycleGenerator: Hölder exponent must lie in (0, 1]");
        if (table_.size() != window_count(k, depth))
            throw DomainError("CocycleGenerator: table must hold exactly k^(2m+1) = " +
                              std::to_string(window_count(k, depth)) + " entries");
        for (const auto& e : table_)
            if (e.ell() != ell) throw DimensionError("CocycleGenerator: table entry has wrong dimension");
    }

    /// Fills the table by evaluating `build` on every window.
    static CocycleGenerator from_function(int k, int ell, int depth, double nu, const Builder& build) {
        const std::size_t n = window_count(k, depth);
        std::vector<SympMatrix> table;
        table.reserve(n);
        for (std::size_t code = 0; code < n; ++code) table.emplace_back(build(decode(code, k, depth)));
        return CocycleGenerator(k, ell, depth, nu, std::move(table));
    }

    static CocycleGenerator constant(int k, const SympMatrix& m, int depth = 0, double nu = 1.0) {
        return CocycleGenerator(k, m.ell(), depth, nu, std::vector<SympMatrix>(window_count(k, depth), m));
    }

    static std::size_t window_count(int k, int depth) {
        std::size_t n = 1;
        for (int i = 0; i < 2 * depth + 1; ++i) {
            if (n > (std::size_t{1} << 24) / static_cast<std::size_t>(k))
                throw DomainError("CocycleGenerator: window table too large");
            n *= static_cast<std::size_t>(k);
        }
        return n;
    }

    static Word decode(std::size_t code, int k, int depth) {
        Word w(static_cast<std::size_t>(2 * depth + 1));
        for (std::size_t i = w.size(); i-- > 0;) {
            w[i] = static_cast<Symbol>(code % static_cast<std::size_t>(k));
            code /= static_cast<std::size_t>(k);
        }
        return w;
    }

    std::size_t encode(const Word& w) const {
        if (w.size() != static_cast<std::size_t>(2 * depth_ + 1))
            throw DomainError("window has length " + std::to_string(w.size()) + ", expected " + std::to_string(2 * depth_ + 1));
        std::size_t code = 0;
        for (Symbol c : w) {
            if (c >= k_) throw DomainError("window symbol out of range");
            code = code * static_cast<std::size_t>(k_) + c;
        }
        return code;
    }

    /// Window code of the point f^j(x).
    std::size_t code_at(const SymbolicPoint& x, long j) const {
        std::size_t code = 0;
        for (long i = j - depth_; i <= j + depth_; ++i) {
            const Symbol c = x[i];
            if (c >= k_) throw DomainError("point symbol out of range for this alphabet");
            code = code * static_cast<std::size_t>(k_) + c;
        }
        return code;
    }

    /// Codes of f^j(x) for j in [j0, j0 + n), computed with a rolling window.
    std::vector<std::size_t> codes(const SymbolicPoint& x, long j0, long n) const {
        std::vector<std::size_t> out;
        if (n <= 0) return out;
        out.reserve(static_cast<std::size_t>(n));
        const std::size_t top = window_count(k_, depth_) / static_cast<std::size_t>(k_);
        std::size_t code = code_at(x, j0);
        out.push_back(code);
        for (long j = j0 + 1; j < j0 + n; ++j) {
            const Symbol c = x[j + depth_];
            if (c >= k_) throw DomainError("point symbol out of range for this alphabet");
            code = (code % top) * static_cast<std::size_t>(k_) + c;
            out.push_back(code);
        }
        return out;
    }

    const SympMatrix& at(std::size_t code) const { return table_.at(code); }
    const SympMatrix& at(const Word& window) const { return table_.at(encode(window)); }

    int k() const { return k_; }
    int ell() const { return ell_; }
    int dim() const { return 2 * ell_; }
    int depth() const { return depth_; }
    double nu() const { return nu_; }
    const std::vector<SympMatrix>& table() const { return table_; }

    /// Same cocycle described with windows of a larger depth.
    CocycleGenerator padded(int depth) const {
        if (depth < depth_) throw DomainError("padded: cannot reduce depth");
        if (depth == depth_) return *this;
        const int cut = depth - depth_;
        return from_function(k_, ell_, depth, nu_, [&](const Word& w) {
            return at(Word(w.begin() + cut, w.end() - cut)).matrix();
        });
    }

    double sup_norm() const {
        double s = 0.0;
        for (const auto& e : table_) s = std::max(s, spectral_norm(e.matrix()));
        return s;
    }

private:
    int k_ = 2;
    int ell_ = 1;
    int depth_ = 0;
    double nu_ = 1.0;
    std::vector<SympMatrix> table_;
};

inline SympMatrix evaluate(const CocycleGenerator& a, const SymbolicPoint& x) { return a.at(a.code_at(x, 0)); }

namespace detail {

inline void check_drift(const Matrix& m, const char* where) {
    if (!m.allFinite()) throw DriftError(std::string(where) + ": non-finite product");
    const double d = scaled_defect(m);
    if (d > tol::drift)
        throw DriftError(std::string(where) + ": scaled symplectic defect " + std::to_string(d) + " exceeds drift bound");
}

} // namespace detail

/// A^n(x) = A(f^{n-1}x) ... A(fx) A(x); A^0 = I; A^{-n}(x) = (A^n(f^{-n}x))^{-1}.
inline SympMatrix iterate(const CocycleGenerator& a, const SymbolicPoint& x, long n) {
    const int dim = a.dim();
    Matrix prod = Matrix::Identity(dim, dim);
    if (n == 0) return SympMatrix(prod);
    const long steps = n > 0 ? n : -n;
    const long start = n > 0 ? 0 : n;
    for (std::size_t code : a.codes(x, start, steps)) prod = a.at(code).matrix() * prod;
    if (n < 0) prod = symplectic_inverse(prod);
    detail::check_drift(prod, "iterate");
    return SympMatrix(prod, tol::drift);
}

/// Hölder-type seminorm data for the difference of two generators.
struct HolderNorm {
    double sup_norm = 0.0;
    double holder_quotient = 0.0;
    double nu = 1.0;

    double total() const { return sup_norm + holder_quotient; }
};

namespace detail {

/// First offset |i| at which two windows (centered, same depth) differ.
inline int first_offset(const Word& a, const Word& b, int depth) {
    for (int j = 0; j <= depth; ++j)
        if (a[static_cast<std::size_t>(depth - j)] != b[static_cast<std::size_t>(depth - j)] ||
            a[static_cast<std::size_t>(depth + j)] != b[static_cast<std::size_t>(depth + j)])
            return j;
    return -1;
}

/// sup |F| + sup_{pairs} |F(w) - F(w')| / lambda^{j nu}, with j the first offset
/// where the windows differ. Exact for functions constant on depth-m cylinders,
/// since every pair of points in those cylinders sits at distance exactly lambda^j.
inline HolderNorm holder_norm_of(const std::vector<Matrix>& values, int k, int depth, double nu, double lambda) {
    HolderNorm h;
    h.nu = nu;
    std::vector<Word> windows;
    windows.reserve(values.size());
    for (std::size_t c = 0; c < values.size(); ++c) {
        windows.push_back(CocycleGenerator::decode(c, k, depth));
        h.sup_norm = std::max(h.sup_norm, spectral_norm(values[c]));
    }
    std::vector<double> weight(static_cast<std::size_t>(depth + 1));
    for (int j = 0; j <= depth; ++j) weight[static_cast<std::size_t>(j)] = std::pow(lambda, -nu * j);
    for (std::size_t a = 0; a < values.size(); ++a)
        for (std::size_t b = a + 1; b < values.size(); ++b) {
            const int j = first_offset(windows[a], windows[b], depth);
            const Matrix diff = values[a] - values[b];
            if (diff.cwiseAbs().maxCoeff() == 0.0) continue;
            h.holder_quotient = std::max(h.holder_quotient, spectral_norm(diff) * weight[static_cast<std::size_t>(j)]);
        }
    return h;
}

inline void require_compatible(const CocycleGenerator& a, const CocycleGenerator& b, const char* where) {
    if (a.k() != b.k() || a.ell() != b.ell() || a.nu() != b.nu())
        throw DomainError(std::string(where) + ": generators have incompatible (k, ell, nu)");
}

} // namespace detail

/// ||A - B||_{0,nu} on the shift, computed exactly over window pairs.
inline HolderNorm holder_distance(const CocycleGenerator& a, const CocycleGenerator& b, const ShiftSpace& space) {
    detail::require_compatible(a, b, "holder_distance");
    const int depth = std::max(a.depth(), b.depth());
    const CocycleGenerator pa = a.padded(depth), pb = b.padded(depth);
    std::vector<Matrix> diff;
    diff.reserve(pa.table().size());
    for (std::size_t c = 0; c < pa.table().size(); ++c) diff.push_back(pa.at(c).matrix() - pb.at(c).matrix());
    return detail::holder_norm_of(diff, a.k(), depth, a.nu(), space.lambda);
}

inline HolderNorm holder_norm(const CocycleGenerator& a, const ShiftSpace& space) {
    std::vector<Matrix> values;
    for (const auto& e : a.table()) values.push_back(e.matrix());
    return detail::holder_norm_of(values, a.k(), a.depth(), a.nu(), space.lambda);
}

/// max over windows of ||A(w)|| ||A(w)^{-1}|| lambda^nu; < 1 means fiber-bunched.
inline double fiber_bunching_margin(const CocycleGenerator& a, const ShiftSpace& space) {
    double worst = 0.0;
    for (const auto& e : a.table())
        worst = std::max(worst, spectral_norm(e.matrix()) * spectral_norm(symplectic_inverse(e.matrix())));
    return worst * std::pow(space.lambda, a.nu());
}

struct DominationResult {
    bool pass = true;
    int first_failing_k = 0; // 0 when every k passed
    /// max over k of (sum of log block factors) - k N theta; <= 0 on pass.
    double worst_slack = -std::numeric_limits<double>::infinity();
};

/// Tests prod_{j<k} ||A^N(f^{jN}x)|| ||A^N(f^{jN}x)^{-1}|| <= e^{kN theta} for k = 1..k_max.
inline DominationResult domination_check(const CocycleGenerator& a, const SymbolicPoint& x, long block, double theta,
                                         int k_max) {
    if (block < 1 || !(theta > 0.0) || k_max < 1)
        throw DomainError("domination_check: need N >= 1, theta > 0, k_max >= 1");
    DominationResult r;
    double log_sum = 0.0;
    for (int kk = 1; kk <= k_max; ++kk) {
        const SymbolicPoint start = shift(x, (kk - 1) * block);
        const Matrix m = iterate(a, start, block).matrix();
        log_sum += std::log(spectral_norm(m)) + std::log(spectral_norm(symplectic_inverse(m)));
        const double slack = log_sum - static_cast<double>(kk) * static_cast<double>(block) * theta;
        r.worst_slack = std::max(r.worst_slack, slack);
        if (slack > 1e-12 && r.pass) {
            r.pass = false;
            r.first_failing_k = kk;
        }
    }
    return r;
}

} // namespace symplab
