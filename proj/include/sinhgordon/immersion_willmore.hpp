#pragma once

#include <array>
#include <vector>

#include "genus1_spectral.hpp"
#include "lax_flows.hpp"
#include "modular_lattice.hpp"
#include "parallel.hpp"

namespace sg {

struct ClosingPoint {
    cd z;                  // position in the z-plane of the curve
    cd log_mu1, log_mu2;
    cd mu_hat1, mu_hat2;   // eigenvalues for the generators omega1 + omega2, omega2 - omega1
};

struct ClosingData {
    std::array<ClosingPoint, 4> points;
    cd lambda1, lambda3;   // spectral values of p1 and p3 (p2, p4 are their eta-images)
    Vec2 chi1, chi3;
    Potential zeta0;
    cd omega_hat1, omega_hat2;
    double eigen_residual = 0.0;
    double mu_defect = 0.0;  // max |mu - expected| over points and generators
};

namespace detail {
inline Vec2 kernel_vector(const Mat2& m) {
    Eigen::JacobiSVD<Mat2> svd(m, Eigen::ComputeFullV);
    Vec2 v = svd.matrixV().col(1);
    // first component real and positive when it is not negligible
    const int k = std::abs(v(0)) > 1e-8 ? 0 : 1;
    v *= std::conj(v(k)) / std::abs(v(k));
    return v;
}
} // namespace detail

// Closing points (z+, -z+, omega, omega + omega') of the genus-one family,
// the initial potential and the eigenlines used to build the immersion.
inline ClosingData closing_points_g1(const Genus1Data& d, double tol = 1e-6) {
    const auto& K = d.kernel;
    ClosingData c;
    const cd e = std::exp(I * d.phi);
    c.zeta0 = lift_genus1_potential(genus1_initial_state(d.r), d.phi);
    c.lambda1 = e * e;
    c.lambda3 = 1.0 / (e * e * d.r);
    c.omega_hat1 = d.Omega1 + d.Omega2;
    c.omega_hat2 = d.Omega2 - d.Omega1;

    const cd ev1 = I * std::pow(e, -3.0) * d.nu_hat_plus;
    const Mat2 Z1 = eval_dzeta(c.zeta0, c.lambda1) - ev1 * Mat2::Identity();
    c.chi1 = detail::kernel_vector(Z1);
    // chi1 = gamma(0)^{1/2} in its first component
    if (std::abs(c.chi1(0)) > 1e-8) c.chi1 *= std::sqrt(c.zeta0.gamma) / std::abs(c.chi1(0));
    const Mat2 Z3 = eval_zeta(c.zeta0, c.lambda3);
    // At r = 1, lambda3 is a double point and zeta0(lambda3) = 0; keep the r -> 1
    // limit of the eigenline, which is (1, 0) since the lower-left entry vanishes
    // at lambda3 for every r < 1.
    c.chi3 = Z3.norm() < 1e-9 ? Vec2(1.0, 0.0) : detail::kernel_vector(Z3);
    c.eigen_residual = std::max((Z1 * c.chi1).norm(), (Z3 * c.chi3).norm());

    const std::array<cd, 4> zs = {d.z_plus, -d.z_plus, cd(K.omega), K.omega + K.omega_p};
    const std::array<std::pair<double, double>, 4> expected = {{{-1, 1}, {-1, 1}, {1, -1}, {1, -1}}};
    for (int i = 0; i < 4; ++i) {
        ClosingPoint& p = c.points[i];
        p.z = zs[i];
        if (i >= 2 && K.degenerate()) {
            // omega = +inf: limits of ln mu1 and ln mu2 along the real axis
            p.log_mu1 = 0.0;
            p.log_mu2 = pi * I;
        } else {
            p.log_mu1 = log_mu1(d, p.z);
            p.log_mu2 = log_mu2(d, p.z);
        }
        p.mu_hat1 = std::exp(p.log_mu1 + p.log_mu2);
        p.mu_hat2 = std::exp(p.log_mu2 - p.log_mu1);
        c.mu_defect = std::max({c.mu_defect, std::abs(std::exp(p.log_mu1) - expected[i].first),
                                std::abs(std::exp(p.log_mu2) - expected[i].second), std::abs(p.mu_hat1 + 1.0),
                                std::abs(p.mu_hat2 + 1.0)});
    }
    if (c.mu_defect > tol)
        throw ClosingViolationError("closing condition violated by " + std::to_string(c.mu_defect));
    return c;
}

// f with its first derivatives and the left normal N and Hopf field Q(d/dx)
// at one point, from the frames there.
struct ImmersionSample {
    Mat2 f, fx, fy;
    Mat2 N, Nx, Ny;
    Mat2 Q;
    double gamma = 0.0;
};

class Genus1Immersion {
public:
    explicit Genus1Immersion(const Genus1Data& d, double tol = 1e-11) : data_(d), closing_(closing_points_g1(d)), tol_(tol) {}

    const ClosingData& closing() const { return closing_; }
    const Genus1Data& data() const { return data_; }
    std::vector<cd> lambdas() const { return {closing_.lambda1, closing_.lambda3}; }
    double tol() const { return tol_; }

    FlowState origin() const { return {closing_.zeta0, {Mat2::Identity(), Mat2::Identity()}}; }
    FlowState state_at(cd z) const { return advance(origin(), lambdas(), z, tol_); }
    FlowState shift(const FlowState& s, cd dz) const { return advance(s, lambdas(), dz, tol_); }

    ImmersionSample sample(const FlowState& s) const {
        const auto& p = s.p;
        const cd l1 = closing_.lambda1, l3 = closing_.lambda3;
        const Vec2 psi1 = s.frames[0].inverse() * closing_.chi1;
        const Vec2 psi3 = s.frames[1].inverse() * closing_.chi3;
        const Mat2 P = quat_from_column(psi1), R = quat_from_column(psi3);
        if (std::abs(P.determinant()) < 1e-10) throw DegenerateFrameError("(psi1, psi2) is not invertible");
        const Mat2 Pi = P.inverse();
        const Mat2 Px = quat_from_column(-lax_U(p, l1) * psi1), Py = quat_from_column(-lax_V(p, l1) * psi1);
        const Mat2 Rx = quat_from_column(-lax_U(p, l3) * psi3), Ry = quat_from_column(-lax_V(p, l3) * psi3);
        ImmersionSample o;
        o.gamma = p.gamma;
        o.f = Pi * R;
        o.fx = Pi * (Rx - Px * o.f);
        o.fy = Pi * (Ry - Py * o.f);
        Mat2 Ii;
        Ii << I, 0.0, 0.0, -I;
        o.N = Pi * Ii * P;
        const Mat2 Ax = Pi * Px, Ay = Pi * Py;
        o.Nx = o.N * Ax - Ax * o.N;
        o.Ny = o.N * Ay - Ay * o.N;
        Mat2 G;
        G << 0.0, -p.gamma, p.gamma, 0.0;
        o.Q = Pi * G * P;
        return o;
    }

    Mat2 f_at(cd z) const { return sample(state_at(z)).f; }

private:
    Genus1Data data_;
    ClosingData closing_;
    double tol_;
};

struct ImmersionGrid {
    cd e1, e2;
    int nx = 0, ny = 0;
    std::vector<Mat2> f, N;
    std::vector<double> gamma, Q_norm_sq;
    std::vector<double> conformality;  // per node, from the analytic derivatives
    std::vector<double> hopf_defect;   // |Q - (N N_x - N_y)/4| per node
    double quaternion_defect = 0.0;    // deviation from the form [[a, -conj b], [b, conj a]]
    cd node(int i, int j) const { return double(i) * e1 + double(j) * e2; }
    size_t idx(int i, int j) const { return size_t(j) * nx + i; }
};

inline double conformality_from(const Mat2& fx, const Mat2& fy) {
    const double nx = std::sqrt(quat_norm2(fx)), ny = std::sqrt(quat_norm2(fy));
    return (std::abs(nx - ny) * nx + std::abs(quat_dot(fx, fy))) / (nx * nx);
}

inline double quaternion_form_defect(const Mat2& q) {
    return std::max(std::abs(q(1, 1) - std::conj(q(0, 0))), std::abs(q(0, 1) + std::conj(q(1, 0))));
}

// Grid over the fundamental parallelogram of the Gamma-hat lattice.
inline ImmersionGrid immersion_grid(const Genus1Immersion& im, int nx, int ny, unsigned jobs = 1) {
    if (nx < 2 || ny < 2) throw GridTooSmallError("need at least 2x2 nodes");
    ImmersionGrid g;
    g.e1 = im.closing().omega_hat1 / double(nx);
    g.e2 = im.closing().omega_hat2 / double(ny);
    g.nx = nx;
    g.ny = ny;
    const FrameGrid fg = integrate_frame(im.closing().zeta0, g.e1, g.e2, nx, ny, im.lambdas(), im.tol(), jobs);
    const size_t n = size_t(nx) * ny;
    g.f.resize(n);
    g.N.resize(n);
    g.gamma.resize(n);
    g.Q_norm_sq.resize(n);
    g.conformality.resize(n);
    g.hopf_defect.resize(n);
    for (size_t k = 0; k < n; ++k) {
        const ImmersionSample s = im.sample(fg.nodes[k]);
        g.f[k] = s.f;
        g.N[k] = s.N;
        g.gamma[k] = s.gamma;
        g.Q_norm_sq[k] = s.Q.determinant().real();
        g.conformality[k] = conformality_from(s.fx, s.fy);
        g.hopf_defect[k] = (s.Q - 0.25 * (s.N * s.Nx - s.Ny)).norm();
        g.quaternion_defect = std::max(g.quaternion_defect, quaternion_form_defect(s.f));
    }
    return g;
}

// Finite-difference conformality defect at z: central differences of f with
// spacing h along x and y; second order in h.
inline double conformality_defect(const Genus1Immersion& im, cd z, double h) {
    const FlowState s = im.state_at(z);
    auto f = [&](cd dz) { return im.sample(im.shift(s, dz)).f; };
    const Mat2 fx = (f(h) - f(-h)) / (2.0 * h);
    const Mat2 fy = (f(I * h) - f(-I * h)) / (2.0 * h);
    return conformality_from(fx, fy);
}

// max |f(z + omega_hat_j) - f(z)| over the given base points
inline double periodicity_defect(const Genus1Immersion& im, const std::vector<cd>& base) {
    double d = 0.0;
    for (const cd& z : base) {
        const FlowState s = im.state_at(z);
        const Mat2 f0 = im.sample(s).f;
        for (const cd& w : {im.closing().omega_hat1, im.closing().omega_hat2})
            d = std::max(d, (im.sample(im.shift(s, w)).f - f0).norm());
    }
    return d;
}

// ---- Willmore energy -------------------------------------------------------

inline double willmore_explicit_g1(const Genus1Data& d) {
    const auto& K = d.kernel;
    const cd w = 8.0 * pi * (K.omega_p * K.e3 + K.eta_p) / d.D;
    if (std::abs(w.imag()) > 1e-8 * std::abs(w)) throw IllConditionedError("explicit Willmore value is not real");
    return w.real();
}

// the same value through the Weierstrass functions at z+
inline double willmore_explicit_wp_form(const Genus1Data& d) {
    const auto& K = d.kernel;
    return (16.0 * pi * (K.omega_p * K.e3 + K.eta_p) * (K.e3 - K.wp(d.z_plus)) / K.wp_prime(d.z_plus)).real();
}

struct ResidueFit {
    double w = 0.0;
    double imag_part = 0.0;
    double residual = 0.0;  // fit residual, or relative disagreement of two contours
    double radius = 0.0;    // largest sample distance from omega'
};

namespace detail {
// coefficients W_i of nu in ln mu_i = -Omega_i / nu + W_i nu + O(nu^3) at z = omega',
// as (1/2 pi i) \oint (d ln mu_i / dz) / nu dz on a circle of radius rho
inline std::pair<cd, cd> residue_coeffs(const Genus1Data& d, double rho, int n) {
    const cd z0 = d.kernel.omega_p;
    cd w1 = 0.0, w2 = 0.0;
    for (int k = 0; k < n; ++k) {
        const cd u = std::polar(1.0, 2.0 * pi * (k + 0.5) / n);
        const cd z = z0 + rho * u;
        const cd dz = I * rho * u;  // dz / dtheta
        const cd nu = d.nu_of(z);
        w1 += dlog_mu1_dz(d, z) / nu * dz;
        w2 += dlog_mu2_dz(d, z) / nu * dz;
    }
    const cd s = 1.0 / (2.0 * pi * I) * (2.0 * pi / n);
    return {w1 * s, w2 * s};
}
} // namespace detail

// Contour variant: the same coefficients from residues on two circles.
inline ResidueFit willmore_residue_contour(const Genus1Data& d, int n_nodes = 256) {
    if (n_nodes < 16) throw DomainError("need at least 16 contour nodes");
    const auto& K = d.kernel;
    // nearest other zeros of nu: the half periods omega, omega + omega' and z+
    double gap = std::min(std::abs(K.omega_p), std::abs(d.z_plus - K.omega_p));
    if (!K.degenerate()) gap = std::min(gap, K.omega);
    ResidueFit out;
    out.radius = 0.4 * gap;
    auto value = [&](double rho) {
        const auto [w1, w2] = detail::residue_coeffs(d, rho, n_nodes);
        return 4.0 * I * (w2 * d.Omega1 - w1 * d.Omega2);
    };
    const cd w = value(out.radius), w_alt = value(0.6 * out.radius);
    out.residual = std::abs(w - w_alt) / std::abs(w);
    if (out.residual > 1e-8) throw FitResidualError("residue contour disagreement " + std::to_string(out.residual));
    out.w = w.real();
    out.imag_part = w.imag();
    if (std::abs(w.imag()) > 1e-8 * std::abs(w)) throw FitResidualError("residue value is not real");
    return out;
}

// W = 4i (W2 Omega1 - W1 Omega2), with W_i from a least-squares fit of
// ln mu_i + Omega_i / nu against (nu, nu^3) near lambda = 0.
inline ResidueFit willmore_residue(const Genus1Data& d, int n_samples = 16, double fit_tol = 1e-8) {
    if (n_samples < 8) throw DomainError("need at least 8 samples");
    const cd z0 = d.kernel.omega_p;
    // nu is odd in s = z - omega'; its slope fixes the sample radii
    const double h = 1e-6;
    const double slope = std::abs(d.nu_of(z0 + h) - d.nu_of(z0 - h)) / (2.0 * h);
    Eigen::MatrixXcd A(n_samples, 2);
    Eigen::VectorXcd y1(n_samples), y2(n_samples);
    for (int j = 0; j < n_samples; ++j) {
        // |nu| in [1e-3, 3e-3]: the unfitted nu^5 term already reaches ~1e-8 at 1e-2
        const double target = 1e-3 * std::pow(3.0, double(j) / (n_samples - 1));
        const cd z = z0 + std::polar(target / slope, 2.0 * pi * (j + 0.37) / n_samples);
        const cd nu = d.nu_of(z);
        A(j, 0) = nu;
        A(j, 1) = nu * nu * nu;
        y1(j) = log_mu1(d, z) + d.Omega1 / nu;
        y2(j) = log_mu2(d, z) + d.Omega2 / nu;
    }
    const auto qr = A.colPivHouseholderQr();
    const Eigen::VectorXcd c1 = qr.solve(y1), c2 = qr.solve(y2);
    ResidueFit out;
    out.radius = 3e-3 / slope;
    out.residual = std::max((A * c1 - y1).cwiseAbs().maxCoeff(), (A * c2 - y2).cwiseAbs().maxCoeff());
    if (out.residual > fit_tol) throw FitResidualError("residue fit residual " + std::to_string(out.residual));
    const cd w = 4.0 * I * (c2(0) * d.Omega1 - c1(0) * d.Omega2);
    out.w = w.real();
    out.imag_part = w.imag();
    if (std::abs(w.imag()) > 1e-8 * std::abs(w)) throw FitResidualError("residue value is not real");
    return out;
}

struct DirectWillmore {
    double w_hat = 0.0;    // 4 gamma^2 over the Gamma-hat cell
    double w_tilde = 0.0;  // 8 gamma^2 over the Gamma-tilde cell
    double rel_diff = 0.0;
};

// Periodic trapezoid rule on n x n grids of both cells; gamma from the flow.
inline DirectWillmore willmore_direct(const Genus1Data& d, int n = 64, double tol = 1e-11, unsigned jobs = 1) {
    if (n < 4) throw GridTooSmallError("need n >= 4");
    const Potential p0 = lift_genus1_potential(genus1_initial_state(d.r), d.phi);
    auto cell = [&](cd w1, cd w2, double weight) {
        const cd e1 = w1 / double(n), e2 = w2 / double(n);
        const Trajectory t = integrate_grid(p0, e1, e2, n, n, tol, jobs);
        double s = 0.0;
        for (const auto& p : t.states) s += p.gamma * p.gamma;
        return weight * s * std::abs((std::conj(e1) * e2).imag());
    };
    DirectWillmore out;
    out.w_hat = cell(d.Omega1 + d.Omega2, d.Omega2 - d.Omega1, 4.0);
    out.w_tilde = cell(d.Omega1, d.Omega2, 8.0);
    out.rel_diff = std::abs(out.w_hat - out.w_tilde) / std::abs(out.w_tilde);
    return out;
}

struct WillmoreReport {
    double w_explicit = 0.0, w_residue = 0.0, w_direct = 0.0;
    double explicit_vs_residue = 0.0, direct_vs_explicit = 0.0;
};

inline WillmoreReport willmore_report(const Genus1Data& d, int n_direct = 64, unsigned jobs = 1) {
    WillmoreReport r;
    r.w_explicit = willmore_explicit_g1(d);
    r.w_residue = willmore_residue(d).w;
    r.w_direct = willmore_direct(d, n_direct, 1e-11, jobs).w_hat;
    r.explicit_vs_residue = std::abs(r.w_explicit - r.w_residue) / r.w_explicit;
    r.direct_vs_explicit = std::abs(r.w_direct - r.w_explicit) / r.w_explicit;
    return r;
}

// ---- figure tables ------------------------------------------------------

struct Fig3Row { double r, t, re_tau, im_tau; };
struct Fig4Row { double r, t, re_tau_hat, im_tau_hat, willmore; };

// t-samples in (-omega, omega) at cell midpoints; [-3, 3] when omega is infinite
inline std::vector<double> t_samples(double r, int n) {
    if (n < 1) throw GridTooSmallError("need at least one t sample");
    EllipticKernel K(r);
    const double half = K.degenerate() ? 3.0 : K.omega;
    std::vector<double> ts;
    for (int k = 0; k < n; ++k) {
        if (K.degenerate())
            ts.push_back(n == 1 ? 0.0 : -half + 2.0 * half * k / (n - 1));
        else
            ts.push_back(-half + (k + 0.5) * 2.0 * half / n);
    }
    return ts;
}

inline std::vector<Fig3Row> figure3_data(const std::vector<double>& rs, int n_t, unsigned jobs = 1) {
    std::vector<std::pair<double, double>> pts;
    for (double r : rs)
        for (double t : t_samples(r, n_t)) pts.push_back({r, t});
    std::vector<Fig3Row> rows(pts.size());
    parallel_for(pts.size(), jobs, [&](size_t i) {
        const Genus1Data d(pts[i].first, pts[i].second);
        const cd tt = tau_tilde(d);
        rows[i] = {d.r, d.t, tt.real(), tt.imag()};
    });
    return rows;
}

inline std::vector<Fig4Row> figure4_data(const std::vector<double>& rs, int n_t, unsigned jobs = 1) {
    std::vector<std::pair<double, double>> pts;
    for (double r : rs)
        for (double t : t_samples(r, n_t)) pts.push_back({r, t});
    std::vector<Fig4Row> rows(pts.size());
    parallel_for(pts.size(), jobs, [&](size_t i) {
        const Genus1Data d(pts[i].first, pts[i].second);
        const cd th = tau_hat(tau_tilde(d));
        rows[i] = {d.r, d.t, th.real(), th.imag(), willmore_explicit_g1(d)};
    });
    return rows;
}

} // namespace sg
