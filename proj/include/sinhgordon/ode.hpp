#pragma once

#include <algorithm>
#include <cmath>
#include <functional>

#include <Eigen/Dense>

#include "common.hpp"

namespace sg {

struct OdeOptions {
    double rtol = 1e-10;
    double atol = 1e-12;
    double h0 = 0.0;         // 0 picks a starting step from the problem
    double hmin = 1e-14;
    long max_steps = 2000000;
};

struct OdeStats {
    long accepted = 0;
    long rejected = 0;
    double last_h = 0.0;
};

// Dormand-Prince 5(4), FSAL, PI step control. Integrates y from t0 to t1
// (either direction). `accept` may veto a trial state (step is halved);
// `project` is applied to every accepted state.
class DormandPrince {
public:
    using Vec = Eigen::VectorXd;
    using Rhs = std::function<void(double, const Vec&, Vec&)>;
    using Accept = std::function<bool(const Vec&)>;
    using Project = std::function<void(Vec&)>;

    explicit DormandPrince(OdeOptions o = {}) : opt_(o) {}

    OdeStats integrate(const Rhs& f, Vec& y, double t0, double t1,
                       const Accept& accept = nullptr, const Project& project = nullptr) const {
        OdeStats st;
        const double span = t1 - t0;
        if (span == 0.0) return st;
        const double dir = span > 0 ? 1.0 : -1.0;
        const long n = y.size();
        Vec k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), yt(n), y5(n), err(n);

        f(t0, y, k1);
        double h = opt_.h0 > 0 ? opt_.h0 : initial_step(f, t0, y, k1, dir);
        h = std::min(h, std::abs(span));
        double t = t0, err_prev = 1e-4;

        while (dir * (t1 - t) > 0) {
            if (st.accepted + st.rejected > opt_.max_steps)
                throw StepCollapseError("step budget exhausted");
            const bool last = h >= std::abs(t1 - t) * (1.0 - 1e-12);
            if (last) h = std::abs(t1 - t);
            const double hs = dir * h;

            yt = y + hs * (a21 * k1);
            f(t + c2 * hs, yt, k2);
            yt = y + hs * (a31 * k1 + a32 * k2);
            f(t + c3 * hs, yt, k3);
            yt = y + hs * (a41 * k1 + a42 * k2 + a43 * k3);
            f(t + c4 * hs, yt, k4);
            yt = y + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
            f(t + c5 * hs, yt, k5);
            yt = y + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
            f(t + hs, yt, k6);
            y5 = y + hs * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
            f(t + hs, y5, k7);
            err = hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

            double en = 0.0;
            for (long i = 0; i < n; ++i) {
                const double sc = opt_.atol + opt_.rtol * std::max(std::abs(y(i)), std::abs(y5(i)));
                en += sqr(err(i) / sc);
            }
            en = std::sqrt(en / double(n));
            const bool finite = std::isfinite(en);
            const bool ok = finite && en <= 1.0 && (!accept || accept(y5));

            if (ok) {
                t = last ? t1 : t + hs;
                y = y5;
                if (project) {
                    project(y);
                    f(t, y, k1);
                } else {
                    k1 = k7;
                }
                ++st.accepted;
                st.last_h = h;
                const double fac = 0.9 * std::pow(std::max(en, 1e-10), -0.7 / 5.0) *
                                   std::pow(err_prev, 0.4 / 5.0);
                h *= std::clamp(fac, 0.2, 5.0);
                err_prev = std::max(en, 1e-4);
            } else {
                ++st.rejected;
                const double fac = finite && en <= 1.0 ? 0.5
                                 : finite ? std::max(0.2, 0.9 * std::pow(en, -0.2)) : 0.1;
                h *= fac;
            }
            if (h < opt_.hmin && dir * (t1 - t) > opt_.hmin)
                throw StepCollapseError("step size fell below " + std::to_string(opt_.hmin));
        }
        return st;
    }

private:
    double initial_step(const Rhs& f, double t0, const Vec& y, const Vec& f0, double dir) const {
        const long n = y.size();
        double d0 = 0, d1 = 0;
        for (long i = 0; i < n; ++i) {
            const double sc = opt_.atol + opt_.rtol * std::abs(y(i));
            d0 += sqr(y(i) / sc);
            d1 += sqr(f0(i) / sc);
        }
        d0 = std::sqrt(d0 / n);
        d1 = std::sqrt(d1 / n);
        double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
        Vec y1 = y + dir * h0 * f0, f1(n);
        f(t0 + dir * h0, y1, f1);
        double d2 = 0;
        for (long i = 0; i < n; ++i) {
            const double sc = opt_.atol + opt_.rtol * std::abs(y(i));
            d2 += sqr((f1(i) - f0(i)) / sc);
        }
        d2 = std::sqrt(d2 / n) / h0;
        const double h1 = std::max(d1, d2) <= 1e-15 ? std::max(1e-6, h0 * 1e-3)
                                                     : std::pow(0.01 / std::max(d1, d2), 0.2);
        return std::min(100.0 * h0, h1);
    }

    OdeOptions opt_;

    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    // b - b*, error estimate weights
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
};

} // namespace sg
