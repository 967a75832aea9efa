#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "symplab/cocycle.hpp"
#include "symplab/generators.hpp"
#include "symplab/lyapunov.hpp"

using namespace symplab;

namespace {

Matrix mat2(double a, double b, double c, double d) {
    Matrix m(2, 2);
    m << a, b, c, d;
    return m;
}

/// Symplectic 4x4 acting by h1 on the plane (e1, e1^) and by h2 on (e2, e2^).
Matrix block_sp4(const Matrix& h1, const Matrix& h2) {
    Matrix m = Matrix::Zero(4, 4);
    const Matrix* h[2] = {&h1, &h2};
    for (int i = 0; i < 2; ++i) {
        m(i, i) = (*h[i])(0, 0);
        m(i, 2 + i) = (*h[i])(0, 1);
        m(2 + i, i) = (*h[i])(1, 0);
        m(2 + i, 2 + i) = (*h[i])(1, 1);
    }
    return m;
}

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

} // namespace

TEST(Generator, WindowCodesRoundTrip) {
    const auto a = CocycleGenerator::constant(3, SympMatrix::identity(1), 1);
    for (std::size_t c = 0; c < a.table().size(); ++c) EXPECT_EQ(a.encode(CocycleGenerator::decode(c, 3, 1)), c);
    // x_{-m} is the most significant digit
    EXPECT_EQ(a.encode(parse_word("100")), 9u);
    EXPECT_EQ(a.encode(parse_word("001")), 1u);
}

TEST(Generator, RollingCodesMatchDirect) {
    const auto a = random_generator(2, 1, 2, 1.0, 3, 0.4);
    const SymbolicPoint x = sample_point(ShiftSpace::make(2), 11, 40);
    const auto codes = a.codes(x, -10, 25);
    for (long j = 0; j < 25; ++j) EXPECT_EQ(codes[static_cast<std::size_t>(j)], a.code_at(x, -10 + j));
}

TEST(Generator, RejectsBadShapes) {
    EXPECT_THROW(CocycleGenerator(2, 1, 1, 1.0, std::vector<SympMatrix>(3, SympMatrix::identity(1))), DomainError);
    EXPECT_THROW(CocycleGenerator::constant(2, SympMatrix::identity(1), 0, 0.0), DomainError);
    const auto a = CocycleGenerator::constant(2, SympMatrix::identity(1), 1);
    EXPECT_THROW(a.encode(parse_word("01")), DomainError);
    EXPECT_THROW(a.encode(parse_word("021")), DomainError);
}

TEST(Iterate, HandExpandedPeriodTwo) {
    const Matrix t0 = mat2(2, 1, 1, 1), t1 = mat2(1, 0, 3, 1);
    const CocycleGenerator a(2, 1, 0, 1.0, {SympMatrix(t0), SympMatrix(t1)});
    const SymbolicPoint x = periodic_point("01").point();
    // A^3(x) = A(f^2 x) A(f x) A(x) = t0 t1 t0
    EXPECT_LE(max_abs(iterate(a, x, 3).matrix() - t0 * t1 * t0), 1e-14);
    EXPECT_EQ(iterate(a, x, 0).matrix(), Matrix::Identity(2, 2));
    // A^{-1}(x) = A(f^{-1} x)^{-1} = t1^{-1}
    EXPECT_LE(max_abs(iterate(a, x, -1).matrix() - t1.inverse()), 1e-14);
}

TEST(Iterate, CocycleLaw) {
    const auto a = random_generator(2, 2, 1, 1.0, 5, 0.3);
    const SymbolicPoint x = sample_point(ShiftSpace::make(2), 2, 30);
    for (long m : {-4L, 0L, 3L})
        for (long n : {-5L, 2L, 6L}) {
            const Matrix lhs = iterate(a, x, m + n).matrix();
            const Matrix rhs = iterate(a, shift(x, n), m).matrix() * iterate(a, x, n).matrix();
            EXPECT_LE(max_abs(lhs - rhs) / std::max(1.0, max_abs(lhs)), 1e-12) << m << " " << n;
        }
}

TEST(Generator, PaddingKeepsValues) {
    const auto a = random_generator(2, 1, 1, 1.0, 8, 0.5);
    const auto b = a.padded(3);
    EXPECT_EQ(b.depth(), 3);
    for (std::uint64_t s = 0; s < 20; ++s) {
        const SymbolicPoint x = sample_point(ShiftSpace::make(2), s, 6);
        EXPECT_EQ(evaluate(a, x).matrix(), evaluate(b, x).matrix());
    }
    EXPECT_THROW(b.padded(2), DomainError);
}

TEST(Holder, ConstantDifferenceHasNoQuotient) {
    const auto space = ShiftSpace::make(2);
    const auto a = CocycleGenerator::constant(2, SympMatrix(mat2(2, 0, 0, 0.5)));
    const auto b = CocycleGenerator::constant(2, SympMatrix::identity(1));
    const auto h = holder_distance(a, b, space);
    EXPECT_NEAR(h.sup_norm, 1.0, 1e-12);
    EXPECT_EQ(h.holder_quotient, 0.0);
}

TEST(Holder, SingleWindowBump) {
    // A and B differ by D on the window 000 only. Pairs (000, w) first differ either
    // at the centre (distance 1) or at offset 1 (distance lambda), so the quotient is
    // |D| / lambda = 2 |D| and the norm 3 |D|.
    const auto space = ShiftSpace::make(2);
    const auto a = CocycleGenerator::constant(2, SympMatrix::identity(1), 1);
    const Matrix r = plane_rotation(1, 0, 0.3);
    const auto b = CocycleGenerator::from_function(2, 1, 1, 1.0, [&](const Word& w) {
        return w == parse_word("000") ? r : Matrix(Matrix::Identity(2, 2));
    });
    const double d = spectral_norm(r - Matrix::Identity(2, 2));
    const auto h = holder_distance(a, b, space);
    EXPECT_NEAR(h.sup_norm, d, 1e-14);
    EXPECT_NEAR(h.holder_quotient, 2.0 * d, 1e-14);
    EXPECT_NEAR(h.total(), 3.0 * d, 1e-14);
    EXPECT_EQ(holder_distance(a, a, space).total(), 0.0);
}

TEST(Holder, TailDecayKeepsQuotientBounded) {
    const auto space = ShiftSpace::make(2);
    double prev = 0.0;
    for (int depth = 1; depth <= 4; ++depth) {
        const auto a = holder_generator(2, 1, depth, 1.0, space.lambda, 21, 0.3, 0.2);
        const double q = holder_norm(a, space).holder_quotient;
        EXPECT_LT(q, 10.0);
        if (depth > 1) {
            EXPECT_LT(q, 2.0 * prev + 1.0);
        }
        prev = q;
    }
}

TEST(FiberBunching, Margins) {
    const auto space = ShiftSpace::make(2);
    EXPECT_NEAR(fiber_bunching_margin(rotation_generator(2, 2, 1, 1.0, 4), space), 0.5, 1e-12);
    const auto d = CocycleGenerator::constant(2, SympMatrix(mat2(2, 0, 0, 0.5)));
    EXPECT_NEAR(fiber_bunching_margin(d, space), 2.0, 1e-12);
}

TEST(Domination, RotationsPassDiagonalFails) {
    const SymbolicPoint x = periodic_point("01").point();
    EXPECT_TRUE(domination_check(rotation_generator(2, 1, 0, 1.0, 9), x, 4, 0.01, 3).pass);
    const auto d = CocycleGenerator::constant(2, SympMatrix(mat2(2, 0, 0, 0.5)));
    const auto r = domination_check(d, x, 1, 0.1, 3);
    EXPECT_FALSE(r.pass);
    EXPECT_EQ(r.first_failing_k, 1);
    // log 4 - 0.1 per block
    EXPECT_NEAR(r.worst_slack, 3 * (std::log(4.0) - 0.1), 1e-12);
}

TEST(DiagonalDemo, PeriodicExponentsFollowTheBirkhoffSum) {
    const auto space = ShiftSpace::make(2);
    DiagonalDemoParams prm{{0.7}, {0.2}, random_symplectic(3, 1, 0.3).matrix()};
    const auto a = diagonal_demo_generator(2, 1.0, space.weights, prm);
    // balanced words have zero exponents; the fixed point "0" has exponent alpha
    EXPECT_LE(std::abs(periodic_spectrum(a, periodic_point("0011")).spectrum.top()), 1e-12);
    EXPECT_LE(std::abs(periodic_spectrum(a, periodic_point("010110")).spectrum.top()), 1e-12);
    EXPECT_NEAR(periodic_spectrum(a, periodic_point("0")).spectrum.top(), 0.7, 1e-12);
    EXPECT_NEAR(periodic_spectrum(a, periodic_point("001")).spectrum.top(), 0.7 / 3.0, 1e-12);
}

TEST(Spectrum, DefectHelpers) {
    const std::vector<double> ex{0.5, 0.1, -0.1, -0.5};
    EXPECT_EQ(pairing_defect(ex), 0.0);
    EXPECT_EQ(sum_defect(ex), 0.0);
    const std::vector<double> bad{0.5, 0.2, -0.1, -0.5};
    EXPECT_NEAR(pairing_defect(bad), 0.1, 1e-15);
    EXPECT_NEAR(sum_defect(bad), 0.1, 1e-15);
}

TEST(Qr, ConstantDiagonalExact) {
    const double s = 0.8;
    const auto a = CocycleGenerator::constant(2, SympMatrix(block_sp4(mat2(std::exp(s), 0, 0, std::exp(-s)),
                                                                      mat2(std::exp(0.3), 0, 0, std::exp(-0.3)))));
    const auto r = qr_spectrum(a, periodic_point("0").point(), 500);
    ASSERT_EQ(r.exponents.size(), 4u);
    EXPECT_NEAR(r.exponents[0], s, 1e-12);
    EXPECT_NEAR(r.exponents[1], 0.3, 1e-12);
    EXPECT_NEAR(r.exponents[2], -0.3, 1e-12);
    EXPECT_NEAR(r.exponents[3], -s, 1e-12);
    EXPECT_EQ(r.n_used, 500);
}

TEST(Qr, RotationsGiveZero) {
    const auto a = rotation_generator(3, 2, 1, 1.0, 17);
    const auto r = qr_spectrum(a, sample_point(ShiftSpace::make(3), 1, 3000), 5000);
    for (double e : r.exponents) EXPECT_LE(std::abs(e), 1e-12);
}

TEST(Qr, CadenceAndStreamingAgree) {
    const auto a = random_generator(2, 2, 1, 1.0, 6, 0.4);
    const SymbolicPoint x = sample_point(ShiftSpace::make(2), 4, 3000);
    const auto r1 = qr_spectrum(a, x, 4000, 1);
    const auto r8 = qr_spectrum(a, x, 4000, 8);
    for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(r1.exponents[i], r8.exponents[i], 1e-9);
    QrAccumulator acc(a, 8);
    for (std::size_t c : a.codes(x, 0, 4000)) acc.push(c);
    EXPECT_EQ(acc.steps(), 4000);
    const auto rs = acc.result();
    for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(rs.exponents[i], r8.exponents[i]);
}

TEST(Qr, RandomSp4PairsUp) {
    const auto space = ShiftSpace::make(2);
    const auto a = holder_generator(2, 2, 1, 1.0, space.lambda, 31, 0.4, 0.1);
    const auto r = qr_spectrum(a, sample_point(space, 7, 20000), 30000);
    EXPECT_GT(r.top(), 0.01);
    EXPECT_LE(r.pairing_defect, 2e-2);
    EXPECT_LE(r.sum_defect, 1e-9);
}

TEST(Periodic, MatchesDirectEigenvalues) {
    const auto a = random_generator(2, 2, 1, 1.0, 12, 0.6);
    const auto p = periodic_point("00101");
    const auto ps = periodic_spectrum(a, p);
    EXPECT_LE(max_abs(ps.product - iterate(a, p.point(), 5).matrix()), 0.0);
    Eigen::EigenSolver<Eigen::MatrixXd> es(ps.product);
    std::vector<double> direct;
    for (int i = 0; i < 4; ++i) direct.push_back(std::log(std::abs(es.eigenvalues()(i))) / 5.0);
    std::sort(direct.rbegin(), direct.rend());
    for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(ps.spectrum.exponents[i], direct[i], 1e-10);
    EXPECT_LE(ps.spectrum.pairing_defect, 1e-10);
}

TEST(Periodic, QrAlongTheOrbitConverges) {
    const CocycleGenerator a(2, 1, 0, 1.0, {SympMatrix(mat2(2, 1, 1, 1)), SympMatrix(mat2(1, 1, 0, 1))});
    const auto p = periodic_point("011"); // product [[4,3],[1,1]], trace 5
    const auto ps = periodic_spectrum(a, p);
    ASSERT_TRUE(ps.real_simple);
    const auto q = qr_spectrum(a, p.point(), 3000);
    EXPECT_NEAR(q.top(), ps.spectrum.top(), 1e-2);
}

TEST(Oseledets, DiagonalPlane) {
    const auto a = CocycleGenerator::constant(2, SympMatrix(mat2(2, 0, 0, 0.5)));
    const auto o = oseledets_pairing(a, periodic_point("0"));
    ASSERT_EQ(o.vectors.size(), 2u);
    EXPECT_EQ(o.partner[0], 1);
    EXPECT_EQ(o.plane_class[0], SubspaceClass::Symplectic);
    EXPECT_NEAR(omega(o.vectors[0], o.vectors[1], standard_form(1)), 1.0, 1e-14);
    EXPECT_EQ(o.expanding_class, SubspaceClass::Lagrangian);
}

TEST(Oseledets, TwoHyperbolicBlocks) {
    const auto a = CocycleGenerator::constant(2, SympMatrix(block_sp4(mat2(2, 1, 1, 1), mat2(3, 1, 2, 1))));
    const auto o = oseledets_pairing(a, periodic_point("0"));
    ASSERT_EQ(o.plane_class.size(), 2u);
    for (auto c : o.plane_class) EXPECT_EQ(c, SubspaceClass::Symplectic);
    EXPECT_LE(o.max_cross, 1e-10);
    EXPECT_EQ(o.expanding_count, 2);
    EXPECT_EQ(o.expanding_class, SubspaceClass::Lagrangian);
    const auto form = standard_form(2);
    for (std::size_t i = 0; i < 4; ++i)
        if (o.partner[i] > static_cast<int>(i)) {
            EXPECT_NEAR(omega(o.vectors[i], o.vectors[static_cast<std::size_t>(o.partner[i])], form), 1.0, 1e-12);
        }
}

TEST(OmegaDecay, NonPartnersVanishAndDecay) {
    const auto a = CocycleGenerator::constant(2, SympMatrix(block_sp4(mat2(2, 1, 1, 1), mat2(3, 1, 2, 1))));
    // eigenvalues by modulus: 2+sqrt3, (3+sqrt5)/2, their inverses; index 1 and 3 sit in different planes
    const auto r = omega_decay_check(a, periodic_point("0"), 1, 3, 60);
    const double expected = std::log((3 + std::sqrt(5.0)) / 2) - std::log(2 + std::sqrt(3.0));
    EXPECT_NEAR(r.expected_rate, expected, 1e-12);
    EXPECT_LE(std::abs(r.omega_initial), 1e-12);
    EXPECT_TRUE(r.bound_holds);
    EXPECT_NEAR(r.fitted_rate, expected, 0.1 * std::abs(expected));
    EXPECT_THROW(omega_decay_check(a, periodic_point("0"), 0, 1, 60), DomainError); // both expanding
}

TEST(SpectrumCsv, Header) {
    std::ostringstream os;
    write_spectrum_csv(os, LyapunovSpectrum::from({0.1, -0.1}, 10));
    EXPECT_EQ(os.str().substr(0, os.str().find('\n')), "index,exponent,n_used,pairing_defect,sum_defect");
    EXPECT_NE(os.str().find("\n1,-0.1"), std::string::npos);
}
