#pragma once

#include <array>

#include "common.hpp"

namespace sg {

// tau in the closed fundamental domain with canonical boundary points
// (Re tau = +1/2 on the vertical edges, Re tau >= 0 on the unit arc).
// `unimodular` maps the input pair (omega2, omega1) to generators whose
// ratio is tau; its determinant is -1 when the input pair was negatively
// oriented.
struct ReducedTau {
    cd tau;
    std::array<std::array<long, 2>, 2> unimodular{{{1, 0}, {0, 1}}};
    long det() const { return unimodular[0][0] * unimodular[1][1] - unimodular[0][1] * unimodular[1][0]; }
};

namespace detail {
inline void left_mul(std::array<std::array<long, 2>, 2>& m, long a, long b, long c, long d) {
    const auto o = m;
    m[0][0] = a * o[0][0] + b * o[1][0];
    m[0][1] = a * o[0][1] + b * o[1][1];
    m[1][0] = c * o[0][0] + d * o[1][0];
    m[1][1] = c * o[0][1] + d * o[1][1];
}
} // namespace detail

inline ReducedTau reduce_tau(cd tau) {
    if (!(std::abs(tau.imag()) >= 1e-12 * std::max(1.0, std::abs(tau))) || !std::isfinite(std::abs(tau)))
        throw DegenerateLatticeError("generators are (nearly) real-linearly dependent");
    ReducedTau out;
    if (tau.imag() < 0) {
        tau = -tau;
        detail::left_mul(out.unimodular, -1, 0, 0, 1);
    }
    constexpr double eps = 1e-12;
    for (int it = 0; it < 10000; ++it) {
        const double m = std::round(tau.real());
        if (m != 0.0) {
            tau -= m;
            detail::left_mul(out.unimodular, 1, -long(m), 0, 1);
        }
        if (std::abs(tau) < 1.0 - eps) {
            tau = -1.0 / tau;
            detail::left_mul(out.unimodular, 0, -1, 1, 0);
        } else {
            break;
        }
    }
    if (tau.real() < -0.5 + eps) {
        tau += 1.0;
        detail::left_mul(out.unimodular, 1, 1, 0, 1);
    }
    if (std::abs(std::abs(tau) - 1.0) <= eps && tau.real() < 0.0) {
        tau = -1.0 / tau;
        detail::left_mul(out.unimodular, 0, -1, 1, 0);
    }
    out.tau = tau;
    return out;
}

inline ReducedTau reduce(cd omega1, cd omega2) {
    if (omega1 == 0.0) throw DegenerateLatticeError("zero generator");
    return reduce_tau(omega2 / omega1);
}

inline cd tau_hat(cd tt) {
    cd th;
    if (tt.real() < 0.0) {
        if (std::abs(tt + 1.0) < 1e-14) throw PoleError("tau_tilde = -1");
        th = (tt - 1.0) / (tt + 1.0);
    } else {
        if (std::abs(tt - 1.0) < 1e-14) throw PoleError("tau_tilde = 1");
        th = (1.0 + tt) / (1.0 - tt);
    }
    return reduce_tau(th).tau;
}

// distance of reduced moduli, minimized over boundary identifications
inline double tau_distance(cd a, cd b) {
    const cd ta = reduce_tau(a).tau, tb = reduce_tau(b).tau;
    double d = std::abs(ta - tb);
    for (const cd& c : {tb + 1.0, tb - 1.0}) d = std::min(d, std::abs(ta - c));
    // S identifies points of the unit arc only
    if (std::abs(std::abs(tb) - 1.0) < 1e-6) d = std::min(d, std::abs(ta + 1.0 / tb));
    return d;
}

inline double lattice_distance(cd a1, cd a2, cd b1, cd b2) {
    return tau_distance(reduce(a1, a2).tau, reduce(b1, b2).tau);
}

} // namespace sg
