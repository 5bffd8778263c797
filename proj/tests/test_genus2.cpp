#include <gtest/gtest.h>

#include "sinhgordon/genus1_spectral.hpp"
#include "sinhgordon/genus2_spectral.hpp"

using namespace sg;

namespace {

HyperCurve biquadratic() {
    SpectralQuartic q;
    q.a2 = 4.25;
    return HyperCurve(q);
}

} // namespace

TEST(Genus2, CurveNeedsSimpleRoots) {
    EXPECT_THROW(HyperCurve(spectral_poly(Potential(0.0, 0.0, 1.0))), ClassError);
    EXPECT_THROW(HyperCurve::from_inner_roots(0.5, 0.5), ClassError);
    EXPECT_THROW(HyperCurve::from_inner_roots(0.5, 1.5), DomainError);
}

TEST(Genus2, InnerRootsAndMirrors) {
    const auto c = biquadratic();
    for (int i = 0; i < 2; ++i) {
        EXPECT_NEAR(std::abs(c.alpha[i]), 0.5, 1e-12);
        EXPECT_LT(std::abs(c.eval_a(c.alpha[i])), 1e-12);
        EXPECT_LT(std::abs(c.eval_a(c.mirror(i))), 1e-10);
    }
}

TEST(Genus2, BranchTrackingIsContinuous) {
    const auto c = biquadratic();
    std::vector<cd> pts;
    for (int k = 0; k <= 64; ++k) pts.push_back(std::polar(1.0, 2 * pi * k / 64.0));
    const auto nu = nu_on_contour(c, pts);
    ASSERT_EQ(nu.size(), pts.size());
    for (size_t k = 0; k < pts.size(); ++k) EXPECT_LT(std::abs(nu[k] * nu[k] - c.nu_squared(pts[k])), 1e-12);
    for (size_t k = 1; k < pts.size(); ++k) EXPECT_LT(std::abs(nu[k] - nu[k - 1]), 0.5 * std::abs(nu[k - 1]) + 1e-12);
}

TEST(Genus2, BiquadraticLatticeIsSquare) {
    // l -> -l, nu -> i nu is an automorphism of order four: the lattice is invariant under rotation by i
    const auto L = period_lattice(biquadratic());
    EXPECT_LT(std::abs(I * L.omega1 - L.omega2) * std::abs(-I * L.omega1 - L.omega2), 1e-18 + 1e-10 * std::norm(L.omega1));
    EXPECT_LT(std::abs(L.tau().tau - I), 1e-10);
    EXPECT_LT(L.bperiod_residual, 1e-10);
    EXPECT_LT(L.real_defect, 1e-12);
}

TEST(Genus2, HomologousContoursAgree) {
    const auto c = biquadratic();
    CycleLayout deformed;
    deformed.bend_B = {0.2, -0.2};
    deformed.bend_A = {0.1, -0.1};
    const auto a = period_lattice(c), b = period_lattice(c, deformed);
    EXPECT_LT(lattice_distance(a.omega1, a.omega2, b.omega1, b.omega2), 1e-10);
    EXPECT_LT(std::abs(std::abs(a.omega1) - std::abs(b.omega1)), 1e-10);
}

TEST(Genus2, QuadratureDoubling) {
    const auto c = HyperCurve::from_inner_roots(std::polar(0.6, 2.1), std::polar(0.3, -2.1));
    const auto a = period_lattice(c, {}, 1e-10);
    const auto b = detail::lattice_at(c, a.layout, 2 * a.n);
    EXPECT_LT(std::abs(a.omega1 - b.omega1) + std::abs(a.omega2 - b.omega2), 1e-9 * std::abs(a.omega1));
    EXPECT_LT(a.bperiod_residual, 1e-9);
}

TEST(Genus2, MuSignsAtRoots) {
    const auto c = biquadratic();
    const auto L = period_lattice(c);
    const auto s = mu_at_roots(c, L, L.omega1 + L.omega2);
    for (int k = 0; k < 4; ++k) EXPECT_EQ(s.sign[k], -1);
    EXPECT_LT(s.defect, 1e-10);
    const auto t = mu_at_roots(c, L, L.omega1);
    EXPECT_EQ(t.sign[0], -t.sign[1]);
    EXPECT_EQ(t.sign[0], t.sign[2]);
    EXPECT_EQ(t.sign[1], t.sign[3]);
    EXPECT_THROW(mu_at_roots(c, L, 0.5 * L.omega1), DomainError);
}

TEST(Genus2, NearGenusOneBoundary) {
    // a pair of roots merging on the circle at 1 gives the genus-one lattice at t -> -omega
    const double r = 0.5, e = 1e-3;
    const auto c = HyperCurve(quartic_from_roots({0.5, 2.0, 1.0 - e, 1.0 / (1.0 - e)}));
    const auto L = period_lattice(c);
    const Genus1Data g(r, -EllipticKernel(r).omega * (1 - 1e-9));
    EXPECT_LT(lattice_distance(L.omega1, L.omega2, g.Omega1, g.Omega2), 1e-3);
    const double scale = std::max(std::abs(g.Omega1), std::abs(g.Omega2));
    EXPECT_NEAR(std::max(std::abs(L.omega1), std::abs(L.omega2)), scale, 1e-3 * scale);
}

TEST(Genus2, TwoDoubleRootsOffCircleGrowLogarithmically) {
    // inner roots 0.5 e^{+-i eps} merge into a double root off the circle
    std::vector<double> len;
    for (double e : {1e-3, 1e-4, 1e-5}) {
        const cd u = std::exp(I * e);
        const auto L = period_lattice(HyperCurve::from_inner_roots(0.5 / u, 0.5 * u), {}, 1e-9);
        len.push_back(std::max(std::abs(L.omega1), std::abs(L.omega2)));
    }
    const double d1 = len[1] - len[0], d2 = len[2] - len[1];
    EXPECT_GT(d1, 1.0);
    EXPECT_NEAR(d1 / d2, 1.0, 0.01);
}

TEST(Genus2, QuadrupleRootOnCircleBlowsUp) {
    const double e = 1e-3;
    const auto c = HyperCurve::from_inner_roots((1 - e) * std::exp(-I * e), (1 - e) * std::exp(I * e));
    const auto L = period_lattice(c, {}, 1e-9);
    EXPECT_GT(std::max(std::abs(L.omega1), std::abs(L.omega2)), 1e3);
}
