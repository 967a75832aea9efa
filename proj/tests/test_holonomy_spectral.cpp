#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "symplab/generators.hpp"
#include "symplab/holonomy.hpp"
#include "symplab/spectral.hpp"

using namespace symplab;

namespace {

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

SymbolicPoint pt(const char* left, const char* core, const char* right, long origin) {
    return SymbolicPoint(parse_word(left), parse_word(core), parse_word(right), origin);
}

SympMatrix diag4(double a, double b) {
    Matrix m = Matrix::Zero(4, 4);
    m.diagonal() << a, b, 1.0 / a, 1.0 / b;
    return SympMatrix(m);
}

bool contains(const std::vector<Complex>& ev, Complex z, double tol) {
    for (const auto& e : ev)
        if (std::abs(e - z) <= tol) return true;
    return false;
}

} // namespace

// holonomies

TEST(Holonomy, IdentityOnTheDiagonal) {
    const auto a = random_generator(2, 2, 1, 1.0, 3, 0.3);
    const SymbolicPoint x = sample_point(ShiftSpace::make(2), 5, 10);
    for (Side s : {Side::Stable, Side::Unstable}) {
        const auto h = holonomy(a, x, x, s);
        EXPECT_EQ(h.map.matrix(), Matrix::Identity(4, 4));
        EXPECT_TRUE(h.exact);
    }
}

TEST(Holonomy, ConstantGeneratorIsTrivial) {
    const auto a = CocycleGenerator::constant(2, random_symplectic(4, 2, 0.5));
    const auto x = pt("0", "0110", "1", -2), y = pt("1", "0011", "1", -2);
    const auto h = stable_holonomy(a, x, y);
    EXPECT_LE(max_abs(h.map.matrix() - Matrix::Identity(4, 4)), 1e-12);
}

TEST(Holonomy, NotOnLeaf) {
    const auto a = random_generator(2, 1, 1, 1.0, 3, 0.3);
    const SymbolicPoint p = periodic_point("0").point(), q = periodic_point("1").point();
    EXPECT_THROW(stable_holonomy(a, p, q), NotOnLeaf);
    EXPECT_THROW(unstable_holonomy(a, p, q), NotOnLeaf);
}

TEST(Holonomy, StableMatchesDirectLimit) {
    const auto a = random_generator(2, 2, 1, 1.0, 7, 0.4);
    // futures agree from index 4 on; last disagreement d = 3, depth m = 1
    const auto x = pt("1", "0010110", "0", -2), y = pt("0", "1101100", "0", -2);
    ASSERT_EQ(*last_disagreement(x, y), 3);
    const auto h = stable_holonomy(a, x, y);
    EXPECT_TRUE(h.exact);
    EXPECT_EQ(h.depth_used, 3 + 1 + 1);
    EXPECT_EQ(h.cauchy_gap, 0.0);
    for (long n : {5L, 9L, 20L}) {
        const Matrix direct = symplectic_inverse(iterate(a, y, n).matrix()) * iterate(a, x, n).matrix();
        EXPECT_LE(max_abs(direct - h.map.matrix()) / std::max(1.0, max_abs(direct)), 1e-10) << n;
    }
    EXPECT_LE(symplectic_defect(h.map.matrix()), 1e-9);
}

TEST(Holonomy, UnstableMatchesDirectLimit) {
    const auto a = random_generator(2, 1, 2, 1.0, 8, 0.4);
    // pasts agree up to index -3; first disagreement r = -2, so n0 = m - r = 4
    const auto x = pt("01", "1011", "0", -2), y = pt("01", "0101", "0", -2);
    ASSERT_EQ(*first_disagreement(x, y), -2);
    const auto h = unstable_holonomy(a, x, y);
    EXPECT_EQ(h.depth_used, 4);
    for (long n : {4L, 10L}) {
        const Matrix direct = iterate(a, shift(y, -n), n).matrix() * iterate(a, x, -n).matrix();
        EXPECT_LE(max_abs(direct - h.map.matrix()) / std::max(1.0, max_abs(direct)), 1e-10) << n;
    }
}

TEST(Holonomy, CauchyModeAgreesWithExact) {
    const auto space = ShiftSpace::make(2);
    const auto a = holder_generator(2, 1, 1, 1.0, space.lambda, 2, 0.1, 0.05);
    const auto x = pt("0", "110", "1", 0), y = pt("1", "011", "1", 0);
    HolonomyOptions opt;
    opt.exploit_exact = false;
    opt.tol = 1e-12;
    const auto exact = stable_holonomy(a, x, y);
    const auto cauchy = stable_holonomy(a, x, y, opt);
    EXPECT_FALSE(cauchy.exact);
    EXPECT_LT(cauchy.cauchy_gap, 1e-12);
    EXPECT_GE(cauchy.depth_used, exact.depth_used);
    EXPECT_LE(max_abs(cauchy.map.matrix() - exact.map.matrix()), 1e-10);
}

TEST(Holonomy, NotConvergedWithoutExactStop) {
    const auto a = random_generator(2, 1, 1, 1.0, 8, 0.4);
    const auto x = pt("0", "0000000011", "1", 0), y = pt("1", "1100110011", "1", 0);
    HolonomyOptions opt;
    opt.exploit_exact = false;
    opt.n_max = 3;
    EXPECT_THROW(stable_holonomy(a, x, y, opt), NotConverged);
}

TEST(Holonomy, LawsOnSeededTriples) {
    const auto space = ShiftSpace::make(2);
    const auto a = holder_generator(2, 2, 1, 1.0, space.lambda, 12, 0.15, 0.05);
    ASSERT_LT(fiber_bunching_margin(a, space), 0.9);
    for (std::uint64_t s = 0; s < 5; ++s) {
        // three points sharing the past up to index 0
        const SymbolicPoint base = sample_point(space, 100 + s, 12);
        const SymbolicPoint y = bracket(base, sample_point(space, 200 + s, 12), space, 2.0);
        const SymbolicPoint z = bracket(base, sample_point(space, 300 + s, 12), space, 2.0);
        const auto r = holonomy_properties_check(a, space, base, y, z, Side::Unstable);
        EXPECT_TRUE(r.pass(1e-8)) << r.identity_residual << " " << r.composition_residual << " "
                                  << r.equivariance_residual;
    }
}

TEST(Projective, Distance) {
    Vector u(2), v(2);
    u << 1, 0;
    v << 0, 1;
    EXPECT_EQ(projective_distance(u, -u), 0.0);
    EXPECT_NEAR(projective_distance(u, v), std::sqrt(2.0), 1e-15);
    const auto p = projective_act(Matrix(2.0 * Matrix::Identity(2, 2)), ProjectivePoint::from(3.0 * u));
    EXPECT_NEAR(projective_distance(p, ProjectivePoint::from(u)), 0.0, 1e-15);
    EXPECT_THROW(ProjectivePoint::from(Vector::Zero(2)), DegenerateError);
}

// spectral classification

TEST(Spectral, ComplexSaddleOrbitFromTheTable) {
    const auto m = canonical_matrix(SpectralType::ComplexSaddle, {1.0, 1.0});
    const auto ev = symplectic_eigenvalues(m.matrix());
    for (Complex z : {Complex(1, 1), Complex(1, -1), Complex(0.5, 0.5), Complex(0.5, -0.5)})
        EXPECT_TRUE(contains(ev, z, 1e-12)) << z;
    const auto q = quadruple_structure(m);
    ASSERT_EQ(q.size(), 1u);
    EXPECT_EQ(q[0].members.size(), 4u);
    EXPECT_EQ(classify_sp4(m), SpectralType::ComplexSaddle);
}

TEST(Spectral, TableRows) {
    const double t = 0.7;
    EXPECT_EQ(classify_sp4(canonical_matrix(SpectralType::SaddleCenter, {std::cos(t), std::sin(t), 2.0})),
              SpectralType::SaddleCenter);
    EXPECT_EQ(classify_sp4(canonical_matrix(SpectralType::GenericCenter, {std::cos(t), std::sin(t), std::cos(2.1),
                                                                           std::sin(2.1)})),
              SpectralType::GenericCenter);
    const auto dc = classify_sp4(canonical_matrix(SpectralType::DegeneratedCenter, {std::cos(t), std::sin(t)}));
    EXPECT_EQ(dc, SpectralType::DegeneratedCenter);
    EXPECT_FALSE(is_generic(dc));
    EXPECT_EQ(classify_sp4(diag4(3.0, 2.0)), SpectralType::RealSimple);
    EXPECT_EQ(classify_sp4(diag4(2.0, 2.0)), SpectralType::Other);
    EXPECT_EQ(classify_sp4(SympMatrix::identity(2)), SpectralType::Parabolic);
}

TEST(Spectral, TableEigenvalues) {
    const std::vector<std::pair<SpectralType, std::vector<double>>> cases{
        {SpectralType::ComplexSaddle, {0.3, 1.7}},
        {SpectralType::SaddleCenter, {std::cos(1.1), std::sin(1.1), -0.4}},
        {SpectralType::GenericCenter, {std::cos(0.4), std::sin(0.4), std::cos(2.5), -std::sin(2.5)}},
        {SpectralType::DegeneratedCenter, {std::cos(2.0), std::sin(2.0)}}};
    for (const auto& [type, p] : cases) {
        const auto m = canonical_matrix(type, p);
        const auto ev = symplectic_eigenvalues(m.matrix());
        for (const auto& z : canonical_eigenvalues(type, p)) EXPECT_TRUE(contains(ev, z, 1e-10)) << to_string(type);
        EXPECT_LE(charpoly_residual(m.matrix(), ev), 1e-12);
    }
}

TEST(Spectral, CharpolyRootsMatchTheEigensolver) {
    for (std::uint64_t s = 0; s < 20; ++s) {
        const auto m = random_symplectic(s, 2, 0.8);
        const auto direct = symplectic_eigenvalues(m.matrix());
        for (const auto& z : sp4_eigenvalues_from_charpoly(m.matrix()))
            EXPECT_TRUE(contains(direct, z, 1e-8 * std::max(1.0, std::abs(z)))) << s;
    }
}

TEST(Spectral, TypeIsConjugationInvariant) {
    const auto m = canonical_matrix(SpectralType::SaddleCenter, {std::cos(0.3), std::sin(0.3), 1.8});
    for (std::uint64_t s = 0; s < 10; ++s) {
        const Matrix p = random_symplectic(s + 50, 2, 0.4).matrix();
        const SympMatrix c(p * m.matrix() * symplectic_inverse(p), 1e-8);
        EXPECT_EQ(classify(c), SpectralType::SaddleCenter);
    }
}

TEST(Spectral, Sp2) {
    EXPECT_EQ(classify_sp2(SympMatrix(plane_rotation(1, 0, 0.4))), SpectralType::GenericCenter);
    Matrix d(2, 2), j(2, 2);
    d << 2, 0, 0, 0.5;
    j << 1, 1, 0, 1;
    EXPECT_EQ(classify_sp2(SympMatrix(d)), SpectralType::RealSimple);
    EXPECT_EQ(classify_sp2(SympMatrix(j)), SpectralType::Parabolic);
    EXPECT_EQ(classify_sp2(SympMatrix(Matrix(-Matrix::Identity(2, 2)))), SpectralType::Parabolic);
}

TEST(Spectral, QuadruplesOfRealAndCenterSpectra) {
    const auto r = quadruple_structure(diag4(3.0, 2.0));
    ASSERT_EQ(r.size(), 2u);
    for (const auto& q : r) EXPECT_EQ(q.members.size(), 2u);
    const auto g = quadruple_structure(
        canonical_matrix(SpectralType::GenericCenter, {std::cos(0.5), std::sin(0.5), std::cos(1.5), std::sin(1.5)}));
    ASSERT_EQ(g.size(), 2u);
    for (const auto& q : g) EXPECT_EQ(q.members.size(), 2u);
    EXPECT_TRUE(is_simple_real(diag4(3.0, 2.0)));
    EXPECT_FALSE(is_simple_real(diag4(2.0, 2.0)));
}

TEST(Spectral, CanonicalMatrixConstraints) {
    EXPECT_THROW(canonical_matrix(SpectralType::ComplexSaddle, {0.6, 0.8}), DomainError);
    EXPECT_THROW(canonical_matrix(SpectralType::ComplexSaddle, {1.0}), DomainError);
    EXPECT_THROW(canonical_matrix(SpectralType::SaddleCenter, {0.6, 0.8, 1.0}), DomainError);
    EXPECT_THROW(canonical_matrix(SpectralType::SaddleCenter, {0.5, 0.5, 2.0}), DomainError);
    EXPECT_THROW(canonical_matrix(SpectralType::GenericCenter, {0.6, 0.8, 0.6, -0.8}), DomainError);
    EXPECT_THROW(canonical_matrix(SpectralType::RealSimple, {}), DomainError);
    EXPECT_EQ(parse_spectral_type("SaddleCenter"), SpectralType::SaddleCenter);
    EXPECT_THROW(parse_spectral_type("saddle"), DomainError);
}
