// Steps through the zero-exponent breaking experiment on the diagonal demo cocycle,
// printing each intermediate quantity instead of the final report.

#include <cstdio>

#include "symplab/experiments.hpp"
#include "symplab/generators.hpp"

using namespace symplab;

int main() {
    BreakZeroConfig cfg;
    cfg.a = diagonal_demo_generator(2, 1.0, cfg.space.weights, DiagonalDemoParams{{0.8}, {0.1}, Matrix::Identity(2, 2)});
    cfg.eta = 0.1;
    cfg.segment_length = 200000;

    const auto sp = periodic_spectrum(cfg.a, cfg.p), sq = periodic_spectrum(cfg.a, cfg.q);
    std::printf("periodic exponents: p = %s: %+.3f, q = %s: %+.3f\n", word_string(cfg.p.word).c_str(),
                sp.spectrum.top(), word_string(cfg.q.word).c_str(), sq.spectrum.top());

    const auto before = obstruction_experiment(cfg.a, cfg.p, cfg.q);
    std::printf("obstruction for A: %.2e (holonomies carry the atoms at p onto those at q)\n", before.obstruction);

    const auto pc = build_breaking_perturbation(cfg);
    std::printf("rotation by %.2f on the cylinder [%s], depth %d\n", cfg.eta,
                pc.s.certificate.cylinder_window.c_str(), pc.s.cyl_depth);
    std::printf("holder distance %.3f (bound %.3f)\n", pc.holder.total(), pc.holder_bound);

    const auto br = breaking_check(cfg.a, pc.b, cfg.p, cfg.q, pc.z);
    std::printf("unstable holonomy unchanged: %s; obstruction for B: %.4f\n", br.hu_equal ? "yes" : "no",
                br.obstruction);

    const auto oracle = periodic_oracle(cfg, pc);
    std::printf("periodic word %s: lambda_1(A) = %.1e, lambda_1(B) = %.4f (%ld candidates)\n",
                word_string(oracle.word).c_str(), oracle.top_a, oracle.top_b, oracle.candidates);

    const long n = static_cast<long>(cfg.segments) * cfg.segment_length;
    const auto orbit = sample_orbit(cfg.space, cfg.seed, n);
    const auto ca = orbit_codes(cfg.a, orbit, n), cb = orbit_codes(pc.b, orbit, n);
    const auto floor = noise_floor(cfg.a, ca, cfg.segments);
    std::printf("QR along a typical orbit (n = %ld): lambda_1(A) = %.5f (noise floor %.5f), lambda_1(B) = %.4f\n", n,
                floor.top_full, floor.floor, qr_spectrum_codes(pc.b, cb).top());
}
