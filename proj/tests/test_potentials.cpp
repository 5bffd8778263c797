#include <gtest/gtest.h>

#include <random>

#include "sinhgordon/lax_flows.hpp"
#include "sinhgordon/potentials.hpp"

using namespace sg;

namespace {

// a1, a2 from det zeta(l) = l a(l): fit the monic quartic through 5 samples
std::pair<cd, cd> fit_quartic(const Potential& p) {
    Eigen::Matrix<cd, 5, 5> V;
    Eigen::Matrix<cd, 5, 1> y;
    const cd ls[5] = {0.3, cd(0.1, 0.9), cd(-1.2, 0.4), cd(0.7, -0.8), 1.5};
    for (int k = 0; k < 5; ++k) {
        cd pw = 1.0;
        for (int j = 0; j < 5; ++j, pw *= ls[k]) V(k, j) = pw;
        y(k) = eval_zeta(p, ls[k]).determinant() / ls[k];
    }
    const Eigen::Matrix<cd, 5, 1> c = V.fullPivLu().solve(y);
    return {c(3), c(2)};
}

bool has_root(const SpectralQuartic& q, cd z, int mult, double tol = 1e-9) {
    for (const auto& r : q.roots)
        if (std::abs(r.value - z) < tol && r.mult == mult) return true;
    return false;
}

} // namespace

TEST(Potentials, GammaMustBePositive) {
    EXPECT_THROW(Potential(0.0, 0.0, 0.0), DomainError);
    EXPECT_THROW(Potential(0.0, 0.0, -1.0), DomainError);
}

TEST(Potentials, ZetaVanishesAtCliffordRoot) {
    EXPECT_LT(eval_zeta(Potential(0.0, 0.0, 1.0), I).norm(), 1e-15);
}

TEST(Potentials, AntiHermitianOnCircle) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-2, 2);
    for (int s = 0; s < 5; ++s) {
        const Potential p(cd(u(rng), u(rng)), cd(u(rng), u(rng)), 0.3 + std::abs(u(rng)));
        for (int k = 0; k < 32; ++k) {
            const cd l = std::polar(1.0, 2 * pi * k / 32.0);
            const Mat2 z = eval_zeta(p, l);
            EXPECT_LE((z + l * l * l * z.adjoint()).norm(), 1e-12 * z.norm());
        }
    }
}

TEST(Potentials, CoefficientsAgainstDeterminantFit) {
    struct Case { Potential p; cd a1; double a2; };
    const Case cases[] = {{Potential(0.0, 0.0, 1.0), 0.0, 2.0},
                          {Potential(0.0, 0.0, 2.0), 0.0, 4.25},
                          {Potential(1.0, I, 1.0), -1.0, 5.0}};
    for (const auto& c : cases) {
        const auto q = spectral_poly(c.p);
        EXPECT_NEAR(std::abs(q.a1 - c.a1), 0.0, 1e-14);
        EXPECT_NEAR(q.a2, c.a2, 1e-14);
        const auto [f1, f2] = fit_quartic(c.p);
        EXPECT_NEAR(std::abs(f1 - q.a1), 0.0, 1e-10);
        EXPECT_NEAR(std::abs(f2 - q.a2), 0.0, 1e-10);
    }
}

TEST(Potentials, DeterminantIdentityRandom) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    const Potential p(cd(0.3, -0.7), cd(1.1, 0.2), 0.8);
    const auto q = spectral_poly(p);
    for (int k = 0; k < 100; ++k) {
        const cd l(u(rng), u(rng));
        const cd lhs = eval_zeta(p, l).determinant(), rhs = l * q.eval(l);
        EXPECT_LE(std::abs(lhs - rhs), 1e-12 * (1 + std::pow(std::abs(l), 4)));
    }
}

TEST(Potentials, ReverseSymmetry) {
    SpectralQuartic q;
    q.a1 = cd(0.4, -1.3);
    q.a2 = 3.7;
    for (const cd l : {cd(0.3, 0.2), cd(-1.4, 0.9), cd(2.0, -0.5)}) {
        const cd lhs = std::pow(l, 4) * std::conj(q.eval(1.0 / std::conj(l)));
        EXPECT_LE(std::abs(lhs - q.eval(l)), 1e-12 * std::abs(q.eval(l)));
    }
}

TEST(Classify, Clifford) {
    const auto q = classify(spectral_poly(Potential(0.0, 0.0, 1.0)));
    EXPECT_EQ(q.cls, Stratum::M23);
    EXPECT_TRUE(has_root(q, I, 2));
    EXPECT_TRUE(has_root(q, -I, 2));
}

TEST(Classify, TwoDoubleRootsOffCircle) {
    const auto q = classify(quartic_from_roots({-2.0, -2.0, -0.5, -0.5}));
    EXPECT_EQ(q.cls, Stratum::M25);
    EXPECT_TRUE(has_root(q, -2.0, 2, 1e-6));
    EXPECT_TRUE(has_root(q, -0.5, 2, 1e-6));
}

TEST(Classify, Biquadratic) {
    SpectralQuartic q;
    q.a2 = 4.25;
    q = classify(q);
    EXPECT_EQ(q.cls, Stratum::M21);
    // closed form: l^2 = (-4.25 +- sqrt(4.25^2 - 4)) / 2 = -1/4, -4
    for (const cd z : {0.5 * I, -0.5 * I, 2.0 * I, -2.0 * I}) EXPECT_TRUE(has_root(q, z, 1, 1e-12));
}

TEST(Classify, GenusOneAndQuadruple) {
    EXPECT_EQ(classify(quartic_from_roots({0.5, 2.0, 1.0, 1.0})).cls, Stratum::M22);
    // positivity of l^-2 a on the circle leaves only +-1 for a quadruple root
    EXPECT_EQ(classify(quartic_from_roots({-1.0, -1.0, -1.0, -1.0}), 1e-8).cls, Stratum::M24);
    EXPECT_THROW(classify(quartic_from_roots({I, I, I, I})), MembershipError);
}

TEST(Classify, RootPairing) {
    const cd a = std::polar(0.6, 2.1), b = std::polar(0.3, -2.1);
    const auto q = classify(quartic_from_roots({a, 1.0 / std::conj(a), b, 1.0 / std::conj(b)}));
    ASSERT_EQ(q.cls, Stratum::M21);
    for (const auto& r : q.roots) {
        double best = 1e9;
        for (const auto& s : q.roots) best = std::min(best, std::abs(r.value * std::conj(s.value) - 1.0));
        EXPECT_LE(best, 1e-12);
    }
}

TEST(Classify, NotInM2) {
    SpectralQuartic q;
    q.a1 = 1.0;
    q.a2 = -10.0;
    // l^-2 a(l) at l = 1 equals 1 + 1 - 10 + 1 + 1 < 0
    EXPECT_LT(q.circle_value(0.0), 0.0);
    EXPECT_THROW(classify(q), MembershipError);
}

TEST(Classify, StableBelowTolerance) {
    // a perturbation of the coefficients well below tol keeps the class
    SpectralQuartic q;
    q.a2 = 2.0 + 1e-10;
    EXPECT_EQ(classify(q, 1e-8).cls, Stratum::M23);
}

TEST(FixedPoint, Clifford) {
    const auto p = fixed_point_potential(classify(spectral_poly(Potential(0.0, 0.0, 1.0))));
    EXPECT_NEAR(std::abs(p.alpha), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(p.beta), 0.0, 1e-9);
    EXPECT_NEAR(p.gamma, 1.0, 0.0);
}

TEST(FixedPoint, SixthRootOfUnity) {
    const cd l1 = std::polar(1.0, pi / 3);
    const auto q = classify(quartic_from_roots({l1, l1, std::conj(l1), std::conj(l1)}));
    const auto p = fixed_point_potential(q);
    EXPECT_NEAR(std::abs(p.beta - 1.0), 0.0, 1e-9);
    EXPECT_NEAR(p.gamma, 1.0, 0.0);
    const auto [x, y] = lax_vector_fields(p);
    EXPECT_LT(std::abs(x.dalpha) + std::abs(x.dbeta) + std::abs(x.dgamma), 1e-8);
    EXPECT_LT(std::abs(y.dalpha) + std::abs(y.dbeta) + std::abs(y.dgamma), 1e-8);
}

TEST(FixedPoint, RejectsOtherClasses) {
    SpectralQuartic q;
    q.a2 = 4.25;
    EXPECT_THROW(fixed_point_potential(classify(q)), ClassError);
}

TEST(OffDiagonal, BiquadraticHasFour) {
    SpectralQuartic q;
    q.a2 = 4.25;
    q = classify(q);
    const auto ps = off_diagonal_points(q);
    ASSERT_EQ(ps.size(), 4u);
    for (const auto& p : ps) {
        EXPECT_EQ(p.alpha, cd(0.0));
        EXPECT_GT(p.gamma, 0.0);
        const auto s = spectral_poly(p);
        EXPECT_NEAR(std::abs(s.a1 - q.a1), 0.0, 1e-12);
        EXPECT_NEAR(s.a2, q.a2, 1e-12);
        EXPECT_GT(std::abs(offdiag_resultant(p)), 1e-6);
    }
}

TEST(OffDiagonal, GenericCurve) {
    const cd a = std::polar(0.6, 2.1), b = std::polar(0.3, -2.1);
    const auto q = classify(quartic_from_roots({a, 1.0 / std::conj(a), b, 1.0 / std::conj(b)}));
    const auto ps = off_diagonal_points(q);
    ASSERT_EQ(ps.size(), 4u);
    for (const auto& p : ps) {
        for (int k = 0; k < 5; ++k) {
            const cd l = std::polar(0.7 + 0.3 * k, 0.9 * k);
            EXPECT_LE(std::abs(eval_zeta(p, l).determinant() - l * q.eval(l)), 1e-10 * (1 + std::norm(l) * std::norm(l)));
        }
    }
    EXPECT_THROW(off_diagonal_points(classify(spectral_poly(Potential(0.0, 0.0, 1.0)))), ClassError);
}
