#pragma once

// Lyapunov spectra: QR estimation along orbits, exact spectra at periodic
// points, and the symplectic pairing of Oseledets directions.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <ostream>
#include <span>
#include <vector>

#include <Eigen/Eigenvalues>

#include "cocycle.hpp"
#include "errors.hpp"
#include "linalg.hpp"
#include "shift.hpp"

namespace symplab {

inline double pairing_defect(std::span<const double> exponents) {
    double d = 0.0;
    const std::size_t n = exponents.size();
    for (std::size_t i = 0; i < n; ++i) d = std::max(d, std::abs(exponents[i] + exponents[n - 1 - i]));
    return d;
}

inline double sum_defect(std::span<const double> exponents) {
    return std::abs(std::accumulate(exponents.begin(), exponents.end(), 0.0));
}

struct LyapunovSpectrum {
    std::vector<double> exponents; // descending
    long n_used = 0;
    double pairing_defect = 0.0;
    double sum_defect = 0.0;

    double top() const { return exponents.front(); }

    static LyapunovSpectrum from(std::vector<double> raw, long n_used) {
        // ties keep the original column order
        std::vector<std::size_t> order(raw.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return raw[a] > raw[b]; });
        LyapunovSpectrum s;
        for (std::size_t i : order) s.exponents.push_back(raw[i]);
        s.n_used = n_used;
        s.pairing_defect = symplab::pairing_defect(s.exponents);
        s.sum_defect = symplab::sum_defect(s.exponents);
        return s;
    }
};

/// Default cadence: renormalize every step when some factor has norm >= 4, else every 8 steps.
inline int default_renorm_every(const CocycleGenerator& a) { return a.sup_norm() >= 4.0 ? 1 : 8; }

namespace detail {

/// Householder QR of `frame` in place, with R's diagonal made positive. Adds log R_ii to acc.
inline void qr_step(Matrix& frame, std::vector<double>& acc) {
    const Eigen::Index n = frame.rows();
    Eigen::HouseholderQR<Matrix> qr(frame);
    Matrix q = qr.householderQ() * Matrix::Identity(n, n);
    const Matrix& r = qr.matrixQR();
    for (Eigen::Index i = 0; i < n; ++i) {
        const double rii = r(i, i);
        if (rii < 0.0) q.col(i) = -q.col(i);
        acc[static_cast<std::size_t>(i)] += std::log(std::abs(rii));
    }
    frame = q;
}

} // namespace detail

/// Streaming QR (Benettin) estimator: feed window codes one at a time.
class QrAccumulator {
public:
    explicit QrAccumulator(const CocycleGenerator& a, int renorm_every = 0)
        : a_(&a), renorm_(renorm_every > 0 ? renorm_every : default_renorm_every(a)),
          frame_(Matrix::Identity(a.dim(), a.dim())), acc_(static_cast<std::size_t>(a.dim()), 0.0) {}

    void push(std::size_t code) {
        frame_ = a_->at(code).matrix() * frame_;
        ++n_;
        if (++since_ == renorm_) renormalize();
    }

    long steps() const { return n_; }

    LyapunovSpectrum result() {
        if (n_ == 0) throw DomainError("qr_spectrum: need n >= 1");
        if (since_ > 0) renormalize();
        std::vector<double> ex = acc_;
        for (double& v : ex) v /= static_cast<double>(n_);
        return LyapunovSpectrum::from(std::move(ex), n_);
    }

private:
    void renormalize() {
        if (!frame_.allFinite())
            throw NotConverged("qr_spectrum: non-finite frame; renorm_every = " + std::to_string(renorm_) +
                               " is too large");
        detail::qr_step(frame_, acc_);
        since_ = 0;
    }

    const CocycleGenerator* a_;
    int renorm_;
    Matrix frame_;
    std::vector<double> acc_;
    long n_ = 0;
    int since_ = 0;
};

/// QR estimate over the given sequence of window codes.
inline LyapunovSpectrum qr_spectrum_codes(const CocycleGenerator& a, std::span<const std::size_t> codes,
                                          int renorm_every = 0) {
    QrAccumulator acc(a, renorm_every);
    for (std::size_t c : codes) acc.push(c);
    return acc.result();
}

/// QR estimate along the forward orbit x, fx, ..., f^{n-1}x.
inline LyapunovSpectrum qr_spectrum(const CocycleGenerator& a, const SymbolicPoint& x, long n, int renorm_every = 0) {
    if (n < 1) throw DomainError("qr_spectrum: need n >= 1");
    const auto codes = a.codes(x, 0, n);
    return qr_spectrum_codes(a, codes, renorm_every);
}

struct PeriodicSpectrum {
    LyapunovSpectrum spectrum;
    Matrix product; // A^pi(p)
    std::vector<std::complex<double>> eigenvalues; // ordered by descending modulus
    bool real_simple = false;
    /// Unit eigenvectors aligned with `eigenvalues`; filled only when real_simple.
    std::vector<Vector> eigenvectors;
};

namespace detail {

struct EigenPair {
    std::complex<double> value;
    Eigen::VectorXcd vector;
};

/// Eigenpairs of M. Contracting eigenvalues are recomputed from M^{-1}, whose
/// eigensolver resolves them with relative rather than absolute accuracy.
inline std::vector<EigenPair> symplectic_eigenpairs(const Matrix& m) {
    const Eigen::MatrixXd md = m;
    const Eigen::MatrixXd mi = symplectic_inverse(m);
    Eigen::EigenSolver<Eigen::MatrixXd> fwd(md), bwd(mi);
    if (fwd.info() != Eigen::Success || bwd.info() != Eigen::Success)
        throw DegenerateError("eigensolver failed");
    const auto n = md.rows();
    std::vector<EigenPair> out;
    std::vector<bool> used(static_cast<std::size_t>(n), false);
    for (Eigen::Index i = 0; i < n; ++i) {
        const std::complex<double> s = fwd.eigenvalues()(i);
        if (std::abs(s) >= 1.0) {
            out.push_back({s, fwd.eigenvectors().col(i)});
            continue;
        }
        // nearest unused eigenvalue of M^{-1} to 1/s
        Eigen::Index best = -1;
        double best_d = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (used[static_cast<std::size_t>(j)]) continue;
            const double d = std::abs(bwd.eigenvalues()(j) - 1.0 / s);
            if (best < 0 || d < best_d) {
                best = j;
                best_d = d;
            }
        }
        if (best < 0 || std::abs(bwd.eigenvalues()(best)) < 1.0) {
            out.push_back({s, fwd.eigenvectors().col(i)});
            continue;
        }
        used[static_cast<std::size_t>(best)] = true;
        out.push_back({1.0 / bwd.eigenvalues()(best), bwd.eigenvectors().col(best)});
    }
    // ordering: modulus descending, then argument descending, then solver index
    std::stable_sort(out.begin(), out.end(), [](const EigenPair& a, const EigenPair& b) {
        const double ma = std::abs(a.value), mb = std::abs(b.value);
        if (ma != mb) return ma > mb;
        return std::arg(a.value) > std::arg(b.value);
    });
    return out;
}

inline bool real_simple_values(const std::vector<std::complex<double>>& ev, double eps) {
    for (const auto& s : ev)
        if (std::abs(s.imag()) > eps * std::max(1.0, std::abs(s))) return false;
    for (std::size_t i = 0; i + 1 < ev.size(); ++i) {
        const double a = std::abs(ev[i]), b = std::abs(ev[i + 1]);
        if (std::abs(a - b) <= eps * std::max({1.0, a, b})) return false;
    }
    return true;
}

inline Vector real_unit(const Eigen::VectorXcd& v) {
    // rotate the complex phase so the largest entry is real, then drop the imaginary part
    Eigen::Index k = 0;
    v.cwiseAbs().maxCoeff(&k);
    const std::complex<double> phase = std::abs(v(k)) > 0.0 ? v(k) / std::abs(v(k)) : 1.0;
    Vector r = (v / phase).real();
    return r / r.norm();
}

} // namespace detail

/// Eigenvalues of A^pi(p) and exponents (1/pi) log|sigma|.
inline PeriodicSpectrum periodic_spectrum(const CocycleGenerator& a, const PeriodicPoint& p) {
    const long pi = static_cast<long>(p.period());
    PeriodicSpectrum out;
    out.product = iterate(a, p.point(), pi).matrix();
    const auto pairs = detail::symplectic_eigenpairs(out.product);
    const double scale = std::max(1.0, spectral_norm(out.product));
    std::vector<double> raw;
    for (const auto& e : pairs) {
        out.eigenvalues.push_back(e.value);
        raw.push_back(std::log(std::abs(e.value)) / static_cast<double>(pi));
        const Eigen::VectorXcd res = out.product.cast<std::complex<double>>() * e.vector - e.value * e.vector;
        if (res.norm() > 1e-8 * scale * e.vector.norm())
            throw DegenerateError("periodic_spectrum: eigenpair residual too large");
    }
    out.spectrum = LyapunovSpectrum::from(std::move(raw), pi);
    out.real_simple = detail::real_simple_values(out.eigenvalues, tol::eig);
    if (out.real_simple)
        for (const auto& e : pairs) out.eigenvectors.push_back(detail::real_unit(e.vector));
    return out;
}

struct OseledetsApprox {
    /// Invariant directions, one per exponent; partner vectors are scaled so omega(v_i, v_partner) = 1 for i < partner.
    std::vector<Vector> vectors;
    std::vector<double> exponents;
    std::vector<int> partner;
    std::vector<SubspaceClass> plane_class; // one per matched plane, in order of the smaller index
    SubspaceClass expanding_class = SubspaceClass::Isotropic;
    int expanding_count = 0;
    /// Largest |omega| between unit directions that are not partners.
    double max_cross = 0.0;
};

/// Matches invariant directions at a periodic point into symplectic planes.
///
/// Real simple spectra use the eigenvectors; a conjugate pair on the unit circle
/// contributes the real and imaginary parts of its eigenvector.
inline OseledetsApprox oseledets_pairing(const CocycleGenerator& a, const PeriodicPoint& p,
                                         double eps_form = tol::form) {
    const auto ps = periodic_spectrum(a, p);
    const auto pairs = detail::symplectic_eigenpairs(ps.product);
    const StandardForm form = standard_form(a.ell());
    const double pi = static_cast<double>(p.period());

    OseledetsApprox o;
    std::vector<bool> taken(pairs.size(), false);
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        if (taken[i]) continue;
        const auto s = pairs[i].value;
        const double rate = std::log(std::abs(s)) / pi;
        if (std::abs(s.imag()) <= tol::eig * std::max(1.0, std::abs(s))) {
            o.vectors.push_back(detail::real_unit(pairs[i].vector));
            o.exponents.push_back(rate);
            continue;
        }
        if (std::abs(std::abs(s) - 1.0) > tol::unit)
            throw DegenerateError("oseledets_pairing: complex eigenvalue off the unit circle");
        std::size_t j = i + 1;
        while (j < pairs.size() && (taken[j] || std::abs(pairs[j].value - std::conj(s)) > 1e-6)) ++j;
        if (j == pairs.size()) throw DegenerateError("oseledets_pairing: conjugate eigenvalue not found");
        taken[j] = true;
        const Eigen::VectorXcd& v = pairs[i].vector;
        Vector re = v.real(), im = v.imag();
        o.vectors.push_back(re / re.norm());
        o.vectors.push_back(im / im.norm());
        o.exponents.push_back(rate);
        o.exponents.push_back(rate);
    }

    const std::size_t n = o.vectors.size();
    if (static_cast<int>(n) != form.dim()) throw DegenerateError("oseledets_pairing: wrong number of directions");
    Eigen::MatrixXd w(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            w(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = omega(o.vectors[i], o.vectors[j], form);

    // greedy matching on |omega|
    o.partner.assign(n, -1);
    for (std::size_t round = 0; round < n / 2; ++round) {
        double best = -1.0;
        std::size_t bi = 0, bj = 0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) {
                if (o.partner[i] >= 0 || o.partner[j] >= 0) continue;
                const double v = std::abs(w(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
                if (v > best) {
                    best = v;
                    bi = i;
                    bj = j;
                }
            }
        if (best <= eps_form) throw DegenerateError("oseledets_pairing: no admissible matching");
        o.partner[bi] = static_cast<int>(bj);
        o.partner[bj] = static_cast<int>(bi);
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (o.partner[i] != static_cast<int>(j))
                o.max_cross = std::max(o.max_cross, std::abs(w(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))));

    for (std::size_t i = 0; i < n; ++i) {
        const auto j = static_cast<std::size_t>(o.partner[i]);
        if (j < i) continue;
        o.plane_class.push_back(classify_subspace({o.vectors[i], o.vectors[j]}, form, eps_form));
        o.vectors[j] /= omega(o.vectors[i], o.vectors[j], form);
    }

    std::vector<Vector> expanding;
    for (std::size_t i = 0; i < n; ++i)
        if (o.exponents[i] > 1e-12) expanding.push_back(o.vectors[i]);
    o.expanding_count = static_cast<int>(expanding.size());
    if (!expanding.empty()) o.expanding_class = classify_subspace(expanding, form, eps_form);
    return o;
}

struct OmegaDecayReport {
    double expected_rate = 0.0; // lambda_i + lambda_j
    double fitted_rate = 0.0;   // slope of log(|A^n u_i| |A^n u_j|)
    double fitted_C = 0.0;      // max_n of the bound sequence divided by e^{(lambda_i+lambda_j+2 eps) n}
    double eps = 0.0;
    double omega_initial = 0.0;
    double omega_max = 0.0; // max_n |omega(A^n u_i, A^n u_j)|
    bool bound_holds = false;
};

/// Along the orbit of p: |omega(A^n u_i, A^n u_j)| <= |A^n u_i| |A^n u_j| <= C e^{(lambda_i+lambda_j+2 eps) n}.
/// Since omega is invariant, the left side is constant; the decaying bound forces it to vanish.
inline OmegaDecayReport omega_decay_check(const CocycleGenerator& a, const PeriodicPoint& p, int i, int j, long n_max,
                                          double eps = -1.0) {
    const auto ps = periodic_spectrum(a, p);
    if (!ps.real_simple) throw DegenerateError("omega_decay_check: spectrum at p is not real and simple");
    const int dim = a.dim();
    if (i < 0 || j < 0 || i >= dim || j >= dim || i == j) throw DomainError("omega_decay_check: bad direction indices");
    if (n_max < 2) throw DomainError("omega_decay_check: n_max must be >= 2");
    const double pi = static_cast<double>(p.period());
    const double li = std::log(std::abs(ps.eigenvalues[static_cast<std::size_t>(i)].real())) / pi;
    const double lj = std::log(std::abs(ps.eigenvalues[static_cast<std::size_t>(j)].real())) / pi;

    OmegaDecayReport r;
    r.expected_rate = li + lj;
    if (!(r.expected_rate < 0.0)) throw DomainError("omega_decay_check: requires lambda_i + lambda_j < 0");
    r.eps = eps > 0.0 ? eps : std::max(1e-3, 0.05 * std::abs(r.expected_rate));

    const StandardForm form = standard_form(a.ell());
    Vector u = ps.eigenvectors[static_cast<std::size_t>(i)];
    Vector v = ps.eigenvectors[static_cast<std::size_t>(j)];
    r.omega_initial = omega(u, v, form);
    r.omega_max = std::abs(r.omega_initial);

    // log(|A^n u| |A^n v|), tracked in log form to survive long orbits
    std::vector<double> logs{0.0};
    double lu = 0.0, lv = 0.0;
    const SymbolicPoint x = p.point();
    const auto codes = a.codes(x, 0, n_max);
    for (std::size_t code : codes) {
        const Matrix& m = a.at(code).matrix();
        Vector nu = m * u, nv = m * v;
        const double su = nu.norm(), sv = nv.norm();
        // omega of the unnormalized images equals omega(u, v) * |u| |v| before rescaling
        r.omega_max = std::max(r.omega_max, std::abs(omega(nu, nv, form)) * std::exp(lu + lv));
        lu += std::log(su);
        lv += std::log(sv);
        u = nu / su;
        v = nv / sv;
        logs.push_back(lu + lv);
    }
    // least-squares slope over the second half, past the transient
    const std::size_t from = logs.size() / 2;
    double sn = 0, sy = 0, snn = 0, sny = 0, cnt = 0;
    for (std::size_t n = from; n < logs.size(); ++n) {
        const double t = static_cast<double>(n);
        sn += t;
        sy += logs[n];
        snn += t * t;
        sny += t * logs[n];
        cnt += 1.0;
    }
    r.fitted_rate = (cnt * sny - sn * sy) / (cnt * snn - sn * sn);
    double logc = -std::numeric_limits<double>::infinity();
    for (std::size_t n = 0; n < logs.size(); ++n)
        logc = std::max(logc, logs[n] - (r.expected_rate + 2.0 * r.eps) * static_cast<double>(n));
    r.fitted_C = std::exp(logc);
    r.bound_holds = true;
    for (std::size_t n = 0; n < logs.size(); ++n)
        if (std::abs(r.omega_initial) > 1e-12 + r.fitted_C * std::exp((r.expected_rate + 2.0 * r.eps) * static_cast<double>(n)))
            r.bound_holds = false;
    return r;
}

inline void write_spectrum_csv(std::ostream& os, const LyapunovSpectrum& s) {
    os << "index,exponent,n_used,pairing_defect,sum_defect\n";
    os.precision(17);
    for (std::size_t i = 0; i < s.exponents.size(); ++i)
        os << i << ',' << s.exponents[i] << ',' << s.n_used << ',' << s.pairing_defect << ',' << s.sum_defect << '\n';
}

} // namespace symplab
