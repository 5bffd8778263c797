#pragma once

#include <array>
#include <utility>
#include <vector>

#include "lax_flows.hpp"
#include "potentials.hpp"
#include "weierstrass.hpp"

namespace sg {

// Genus-one spectral data on the fixed-point component z+ = omega'/2 + t.
// The spectral parameter of the flow frame is lambda = -exp(-2 i phi) lhat.
struct Genus1Data {
    double r = 1.0, t = 0.0, phi = 0.0;
    EllipticKernel kernel{1.0};
    cd z_plus, lambda_hat_plus, nu_hat_plus;
    cd D, N;          // denominators of ln mu1 and the ln mu2 correction
    double R1 = 0.0;  // real generator of the lattice in the lhat chart
    cd R2;
    cd Omega1, Omega2; // lattice generators in the flow plane

    Genus1Data(double r_, double t_) : r(r_), t(t_), kernel(r_) {
        const auto& K = kernel;
        if (!std::isfinite(t) || (!K.degenerate() && std::abs(t) >= K.omega))
            throw DomainError("t must lie in (-omega, omega)");
        z_plus = 0.5 * K.omega_p + t;
        lambda_hat_plus = K.e3 - K.wp(z_plus);
        nu_hat_plus = 0.5 * K.wp_prime(z_plus);
        phi = (std::arg(lambda_hat_plus) + pi) / 4.0;
        const cd zp = K.wzeta(z_plus), zm = K.wzeta(z_plus - K.omega_p);
        D = zp - zm - K.eta_p;
        N = K.omega_p * (zp + zm + K.eta_p) - 2.0 * K.eta_p * z_plus;
        R1 = (-pi * I / D).real();
        R2 = K.omega_p + N / D;
        const cd rot = I * std::exp(-I * phi);
        Omega1 = rot * R1;
        Omega2 = rot * R2;
    }

    cd lambda_hat(cd z) const { return kernel.e3 - kernel.wp(z); }
    cd nu_hat(cd z) const { return 0.5 * kernel.wp_prime(z); }
    cd lambda_of_hat(cd lh) const { return -std::exp(-2.0 * I * phi) * lh; }
    cd nu_of(cd z) const {
        return I * std::exp(-3.0 * I * phi) * nu_hat(z) * (lambda_of_hat(lambda_hat(z)) - std::exp(2.0 * I * phi));
    }

    double invariant_defect() const {
        const cd l = lambda_hat_plus;
        return std::max(std::abs(std::abs(l) - 1.0),
                        std::abs(nu_hat_plus * nu_hat_plus + l * (l + r) * (l + 1.0 / r)));
    }
};

// Genus1Data at prescribed angle phi in (0, pi/2); phi increases with t.
inline Genus1Data genus1_from_phi(double r, double phi) {
    if (!(phi > 0.0 && phi < 0.5 * pi)) throw DomainError("phi must lie in (0, pi/2)");
    EllipticKernel K(r);
    double lo = K.degenerate() ? -40.0 : -K.omega * (1.0 - 1e-15);
    double hi = -lo;
    for (int i = 0; i < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++i) {
        const double mid = 0.5 * (lo + hi);
        (Genus1Data(r, mid).phi < phi ? lo : hi) = mid;
    }
    return Genus1Data(r, 0.5 * (lo + hi));
}

inline SpectralQuartic quartic_from_rphi(double r, double phi) {
    if (!(r > 0.0 && r <= 1.0)) throw DomainError("r must lie in (0,1]");
    const cd e = std::exp(2.0 * I * phi);
    return classify(quartic_from_roots({r / e, 1.0 / (r * e), e, e}));
}

inline cd log_mu1(const Genus1Data& d, cd z) {
    const auto& K = d.kernel;
    return pi * I * (K.wzeta(z) - K.wzeta(z - K.omega_p) - K.eta_p) / d.D;
}

inline cd log_mu2(const Genus1Data& d, cd z) {
    const auto& K = d.kernel;
    const cd v = K.omega_p * (K.wzeta(z) + K.wzeta(z - K.omega_p) + K.eta_p) - 2.0 * K.eta_p * z;
    return v - d.N / (pi * I) * log_mu1(d, z);
}

inline cd dlog_mu1_dz(const Genus1Data& d, cd z) {
    const auto& K = d.kernel;
    return pi * I * (K.wp(z - K.omega_p) - K.wp(z)) / d.D;
}

inline cd dlog_mu2_dz(const Genus1Data& d, cd z) {
    const auto& K = d.kernel;
    return -K.omega_p * (K.wp(z) + K.wp(z - K.omega_p)) - 2.0 * K.eta_p - d.N / (pi * I) * dlog_mu1_dz(d, z);
}

inline cd tau_tilde(const Genus1Data& d) {
    const auto& K = d.kernel;
    return (2.0 * K.eta_p * d.z_plus - 2.0 * K.omega_p * K.wzeta(d.z_plus)) / (pi * I);
}

// (Re tau, Im tau) from the separate closed forms for the two parts
inline std::pair<double, double> tau_tilde_split(const Genus1Data& d) {
    const auto& K = d.kernel;
    const cd zp = K.wzeta(d.z_plus), zm = K.wzeta(d.z_plus - K.omega_p);
    const cd re = (2.0 * K.eta_p * d.z_plus - K.omega_p * (zp + zm + K.eta_p)) / (pi * I);
    const cd im = K.omega_p * d.nu_hat_plus / (pi * d.lambda_hat_plus);
    return {re.real(), im.real()};
}

struct Jacobian {
    Eigen::Matrix2d m;     // rows (Re, Im), columns (phi, r)
    double det_matrix = 0.0;
    double det_formula = 0.0;
};

inline Jacobian jacobian_T(const Genus1Data& d) {
    const auto& K = d.kernel;
    const double r = d.r;
    if (r >= 1.0) throw DomainError("the Jacobian is only defined for r < 1");
    const cd l = d.lambda_hat_plus, nu = d.nu_hat_plus, w = K.omega_p;
    const cd c = w * K.e3 + K.eta_p;
    const cd wr = K.domega_p_dr();
    const cd dre_dl = (w * (l + 1.0 / l) - 2.0 * c) / (2.0 * pi * I * nu);
    const cd dim_dl = w * (1.0 / l - l) / (2.0 * pi * nu);
    const cd dre_dr = 2.0 * wr * (l * l - 1.0) / (2.0 * pi * I * nu);
    const cd dim_dr = (w * (1.0 / (r * r) - 1.0) * l - 2.0 * wr * (l + r) * (l + 1.0 / r)) / (2.0 * pi * nu);
    Jacobian J;
    J.m << (4.0 * I * l * dre_dl).real(), dre_dr.real(),
           (4.0 * I * l * dim_dl).real(), dim_dr.real();
    J.det_matrix = J.m.determinant();
    J.det_formula = (4.0 * (c * c - w * w) / (pi * pi * (1.0 - r * r))).real();
    return J;
}

// Newton solve of e3 - wp(z) = lhat starting from z0
inline cd z_of_lambda_hat(const Genus1Data& d, cd lh, cd z0, int max_iter = 50) {
    const auto& K = d.kernel;
    cd z = z0;
    for (int i = 0; i < max_iter; ++i) {
        const cd f = K.wp(z) - (K.e3 - lh);
        const cd dz = f / K.wp_prime(z);
        z -= dz;
        if (std::abs(dz) < 1e-15 * std::max(1.0, std::abs(z))) return z;
    }
    throw PathIntegrationError("Newton inversion of lambda_hat did not converge");
}

struct BHatFit {
    std::array<cd, 4> b1{}, b2{}; // ascending coefficients in lhat
    double residual = 0.0;        // relative max residual of the two fits
    double condition = 0.0;       // of the scaled sample Vandermonde matrix
    std::vector<cd> samples;      // lhat sample points
};

// Fits b_i(lhat) = 2 nu_hat d ln mu_i / d ln lhat = -lhat d ln mu_i / dz as cubics.
inline BHatFit recover_b_hats(const Genus1Data& d, int n_samples = 8) {
    if (n_samples < 6) throw DomainError("need at least 6 samples");
    BHatFit out;
    std::vector<cd> zs;
    // continuation along the ray through lhat+, radius factor 0.6 .. 1.8
    const double f_lo = 0.6, f_hi = 1.8;
    std::vector<double> fac;
    for (int k = 0; k < n_samples; ++k) fac.push_back(f_lo + (f_hi - f_lo) * k / (n_samples - 1));
    for (double f : fac) {
        cd z = d.z_plus;
        const int steps = 1 + int(std::abs(f - 1.0) / 0.01);
        for (int s = 1; s <= steps; ++s) {
            const double g = 1.0 + (f - 1.0) * s / steps;
            z = z_of_lambda_hat(d, d.lambda_hat_plus * g, z);
        }
        zs.push_back(z);
        out.samples.push_back(d.lambda_hat_plus * f);
    }
    const int n = n_samples;
    Eigen::MatrixXcd V(n, 4);
    Eigen::VectorXcd y1(n), y2(n);
    for (int k = 0; k < n; ++k) {
        const cd lh = out.samples[k];
        cd p = 1.0;
        for (int j = 0; j < 4; ++j, p *= lh) V(k, j) = p;
        y1(k) = -lh * dlog_mu1_dz(d, zs[k]);
        y2(k) = -lh * dlog_mu2_dz(d, zs[k]);
    }
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(V, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    out.condition = sv(0) / sv(sv.size() - 1);
    if (out.condition > 1e12) throw IllConditionedError("sample Vandermonde condition " + std::to_string(out.condition));
    const Eigen::VectorXcd c1 = svd.solve(y1), c2 = svd.solve(y2);
    for (int j = 0; j < 4; ++j) {
        out.b1[j] = c1(j);
        out.b2[j] = c2(j);
    }
    const double s1 = y1.cwiseAbs().maxCoeff(), s2 = y2.cwiseAbs().maxCoeff();
    out.residual = std::max((V * c1 - y1).cwiseAbs().maxCoeff() / s1, (V * c2 - y2).cwiseAbs().maxCoeff() / s2);
    return out;
}

inline cd eval_poly(const std::array<cd, 4>& c, cd x) {
    return ((c[3] * x + c[2]) * x + c[1]) * x + c[0];
}

// Potential in the plane from a genus-one state rotated by phi.
inline Potential lift_genus1_potential(const Genus1State& s, double phi) {
    const cd e = std::exp(I * phi);
    return Potential(-s.alpha_hat * e, s.beta_hat * e * e + 1.0 / (s.beta_hat * e * e), s.beta_hat);
}

// Initial genus-one state of the family with parameter r (alpha_hat = 0).
inline Genus1State genus1_initial_state(double r) {
    if (!(r > 0.0 && r <= 1.0)) throw DomainError("r must lie in (0,1]");
    return {0.0, 1.0 / std::sqrt(r)};
}

// Unit direction in the (x,y) plane along which the genus-one flow runs.
inline cd genus1_flow_direction(double phi) { return std::exp(-I * phi); }

} // namespace sg
