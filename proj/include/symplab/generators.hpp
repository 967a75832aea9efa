#pragma once

// Seeded families of locally constant generators used by tests, demos and the CLI.

#include <cmath>
#include <numbers>
#include <vector>

#include "cocycle.hpp"
#include "errors.hpp"
#include "linalg.hpp"
#include "rng.hpp"
#include "shift.hpp"

namespace symplab {

/// Orthogonal symplectic values: each window gets an independent rotation in every plane (e_i, e_{l+i}).
/// All exponents are 0 since the range is compact.
inline CocycleGenerator rotation_generator(int k, int ell, int depth, double nu, std::uint64_t seed,
                                           double max_angle = std::numbers::pi) {
    Rng rng(seed);
    return CocycleGenerator::from_function(k, ell, depth, nu, [&](const Word&) {
        Matrix r = Matrix::Identity(2 * ell, 2 * ell);
        for (int i = 0; i < ell; ++i) r = plane_rotation(ell, i, rng.uniform(-max_angle, max_angle)) * r;
        return r;
    });
}

/// Independent random symplectic matrix exp(Omega S) per window, S entries in [-scale, scale].
inline CocycleGenerator random_generator(int k, int ell, int depth, double nu, std::uint64_t seed, double scale) {
    Rng rng(seed);
    return CocycleGenerator::from_function(k, ell, depth, nu,
                                           [&](const Word&) { return random_symplectic(rng, ell, scale).matrix(); });
}

/// A(w) = A_0(w_0) prod_{0 < |i| <= m} exp(Omega S_{i, w_i} c lambda^{nu |i|}).
///
/// Dependence on coordinate i decays like lambda^{nu |i|}, so the Hölder quotient
/// stays bounded as the depth grows; the family models a genuinely Hölder cocycle.
inline CocycleGenerator holder_generator(int k, int ell, int depth, double nu, double lambda, std::uint64_t seed,
                                         double base_scale, double tail_scale) {
    Rng rng(seed);
    std::vector<Matrix> base;
    for (int s = 0; s < k; ++s) base.push_back(random_symplectic(rng, ell, base_scale).matrix());
    // tails[i][s]: symmetric generator for coordinate offset i (index 0 .. 2m, centre unused)
    std::vector<std::vector<Matrix>> tails(static_cast<std::size_t>(2 * depth + 1));
    for (int i = 0; i <= 2 * depth; ++i) {
        if (i == depth) continue;
        const double w = tail_scale * std::pow(lambda, nu * std::abs(i - depth));
        for (int s = 0; s < k; ++s) tails[static_cast<std::size_t>(i)].push_back(random_symmetric(rng, ell, w));
    }
    std::vector<std::vector<Matrix>> tail_exp(tails.size());
    for (std::size_t i = 0; i < tails.size(); ++i)
        for (const auto& s : tails[i]) tail_exp[i].push_back(symplectic_exp(s).matrix());
    return CocycleGenerator::from_function(k, ell, depth, nu, [&](const Word& w) {
        Matrix m = base[w[static_cast<std::size_t>(depth)]];
        for (std::size_t i = 0; i < w.size(); ++i) {
            if (static_cast<int>(i) == depth) continue;
            m = m * tail_exp[i][w[i]];
        }
        return m;
    });
}

struct DiagonalDemoParams {
    std::vector<double> alpha; // one per plane
    std::vector<double> beta;  // one per plane
    Matrix mixer;              // symplectic change of basis P
};

/// A(w) = P diag(e^{g_1}, .., e^{g_l}, e^{-g_1}, .., e^{-g_l}) P^{-1}, depth 1, with
/// g_i(w) = alpha_i c(w_0) + beta_i (w_{-1} - w_1) and c(s) = 2 (E s - s) / (k - 1).
///
/// The factors commute and sum g_i along an orbit is alpha_i times a centred
/// Birkhoff sum plus a telescoping boundary term, so every exponent vanishes
/// for the Bernoulli measure given by `weights`.
inline CocycleGenerator diagonal_demo_generator(int k, double nu, const std::vector<double>& weights,
                                                const DiagonalDemoParams& prm) {
    const int ell = static_cast<int>(prm.alpha.size());
    if (ell < 1 || prm.beta.size() != prm.alpha.size())
        throw DomainError("diagonal_demo_generator: alpha and beta need one entry per plane");
    if (static_cast<int>(weights.size()) != k) throw DomainError("diagonal_demo_generator: need one weight per symbol");
    if (prm.mixer.rows() != 2 * ell) throw DimensionError("diagonal_demo_generator: mixer has wrong dimension");
    const SympMatrix p(prm.mixer);
    const Matrix pinv = symplectic_inverse(p.matrix());
    double mean = 0.0;
    for (int s = 0; s < k; ++s) mean += s * weights[static_cast<std::size_t>(s)];
    return CocycleGenerator::from_function(k, ell, 1, nu, [&](const Word& w) {
        const double c = 2.0 * (mean - w[1]) / (k - 1);
        Matrix d = Matrix::Zero(2 * ell, 2 * ell);
        for (int i = 0; i < ell; ++i) {
            const double g = prm.alpha[static_cast<std::size_t>(i)] * c +
                             prm.beta[static_cast<std::size_t>(i)] * (static_cast<double>(w[0]) - static_cast<double>(w[2]));
            d(i, i) = std::exp(g);
            d(ell + i, ell + i) = std::exp(-g);
        }
        return Matrix(p.matrix() * d * pinv);
    });
}

} // namespace symplab
