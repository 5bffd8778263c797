#pragma once

#include <limits>
#include <vector>

#include "common.hpp"

namespace sg {

inline double agm(double a, double b) {
    for (int i = 0; i < 64; ++i) {
        const double an = 0.5 * (a + b), bn = std::sqrt(a * b);
        a = an;
        b = bn;
        if (std::abs(a - b) <= 1e-16 * a) break;
    }
    return 0.5 * (a + b);
}

namespace detail {

// Weierstrass functions of the rectangular lattice with real half period w1
// and imaginary half period w3 (w3 may be i*inf), by the q-expansions in the
// nome q = exp(i pi w3 / w1). Arguments are expected in the central cell.
class RectLattice {
public:
    RectLattice() = default;
    RectLattice(double w1, double w3_imag) : w1_(w1), w3_(0.0, w3_imag) {
        q_ = std::isfinite(w3_imag) ? std::exp(-pi * w3_imag / w1) : 0.0;
        double s = 0.0;
        if (q_ > 0.0) {
            // terms decay only like n^2 q^n at the edge |Im z| = |w3| of the cell
            const int n_max = int(std::ceil(std::log(1e-20) / std::log(q_))) + 4;
            for (int n = 1; n <= n_max; ++n) {
                const double q2n = std::pow(q_, 2 * n);
                c_.push_back(q2n / (1.0 - q2n));
                s += n * c_.back();
            }
        }
        eta1_ = pi * pi / (12.0 * w1) * (1.0 - 24.0 * s);
    }

    double w1() const { return w1_; }
    double eta1() const { return eta1_; }
    // zeta(w3) from the Legendre relation eta1 w3 - eta3 w1 = pi i / 2
    cd eta3() const { return (eta1_ * w3_ - 0.5 * pi * I) / w1_; }

    cd zeta(cd z) const {
        const cd v = pi * z / (2.0 * w1_);
        cd s = 0.0;
        for (size_t n = 1; n <= c_.size(); ++n) s += c_[n - 1] * std::sin(2.0 * double(n) * v);
        return eta1_ * z / w1_ + pi / (2.0 * w1_) / std::tan(v) + 2.0 * pi / w1_ * s;
    }
    cd wp(cd z) const {
        const cd v = pi * z / (2.0 * w1_);
        cd s = 0.0;
        for (size_t n = 1; n <= c_.size(); ++n)
            s += double(n) * c_[n - 1] * std::cos(2.0 * double(n) * v);
        const cd sv = std::sin(v);
        return -eta1_ / w1_ + sqr(pi / (2.0 * w1_)) / (sv * sv) - 2.0 * pi * pi / (w1_ * w1_) * s;
    }
    cd wp_prime(cd z) const {
        const cd v = pi * z / (2.0 * w1_);
        cd s = 0.0;
        for (size_t n = 1; n <= c_.size(); ++n)
            s += double(n * n) * c_[n - 1] * std::sin(2.0 * double(n) * v);
        const cd sv = std::sin(v);
        const double k = pi / (2.0 * w1_);
        return -2.0 * k * k * k * std::cos(v) / (sv * sv * sv) + 2.0 * std::pow(pi / w1_, 3) * s;
    }

private:
    double w1_ = 1.0;
    cd w3_{};
    double q_ = 0.0;
    double eta1_ = 0.0;
    std::vector<double> c_;
};

} // namespace detail

// Weierstrass data of the curve nu^2 = -l (l + r)(l + 1/r) with l = e3 - wp.
// The real half period omega is +inf at r = 1, where the functions reduce to
// their hyperbolic limits (the expansions terminate at q = 0).
class EllipticKernel {
public:
    double r = 1.0;
    double e1 = 0, e2 = 0, e3 = 0;
    double g2 = 0, g3 = 0;
    double omega = 0;      // real half period, +inf at r = 1
    cd omega_p{};          // imaginary half period
    cd eta{};              // zeta(omega)
    cd eta_p{};            // zeta(omega_p)

    explicit EllipticKernel(double r_) : r(r_) {
        if (!(r_ > 0.0 && r_ <= 1.0)) throw DomainError("r must lie in (0,1]");
        const double s = r + 1.0 / r;
        e3 = -s / 3.0;
        e2 = (2.0 * r - 1.0 / r) / 3.0;
        e1 = (2.0 / r - r) / 3.0;
        g2 = 4.0 / 3.0 * s * s - 4.0;
        g3 = 8.0 / 27.0 * s * s * s - 4.0 / 3.0 * s;
        const double rt13 = std::sqrt(e1 - e3), rt23 = std::sqrt(e2 - e3);
        omega_p = cd(0.0, pi / (2.0 * agm(rt13, rt23)));
        omega = r < 1.0 ? pi / (2.0 * agm(rt13, std::sqrt(e1 - e2))) : std::numeric_limits<double>::infinity();
        swapped_ = !(omega <= omega_p.imag());
        if (swapped_) {
            // evaluate on the rotated lattice -i*L, whose real half period is |omega_p|
            lat_ = detail::RectLattice(omega_p.imag(), omega);
            eta_p = -I * lat_.eta1();
            eta = std::isfinite(omega) ? I * lat_.eta3() : cd(-std::numeric_limits<double>::infinity(), 0.0);
        } else {
            lat_ = detail::RectLattice(omega, omega_p.imag());
            eta = lat_.eta1();
            eta_p = lat_.eta3();
        }
    }

    bool degenerate() const { return !std::isfinite(omega); }

    cd wp(cd z) const {
        const cd z0 = reduce(z).z0;
        return swapped_ ? -lat_.wp(-I * z0) : lat_.wp(z0);
    }
    cd wp_prime(cd z) const {
        const cd z0 = reduce(z).z0;
        return swapped_ ? I * lat_.wp_prime(-I * z0) : lat_.wp_prime(z0);
    }
    cd wzeta(cd z) const {
        const auto rd = reduce(z);
        const cd base = swapped_ ? -I * lat_.zeta(-I * rd.z0) : lat_.zeta(rd.z0);
        cd shift = 2.0 * rd.n * eta_p;
        if (rd.m != 0.0) shift += 2.0 * rd.m * eta;
        return base + shift;
    }

    // d omega_p / d r
    cd domega_p_dr() const {
        if (r >= 1.0) throw DomainError("d omega'/dr is singular at r = 1");
        return (2.0 * eta_p - omega_p * e3) / (2.0 * (1.0 - r * r));
    }

    double legendre_defect() const {
        if (degenerate()) return 0.0;
        return std::abs(eta * omega_p - eta_p * omega - 0.5 * pi * I);
    }

private:
    struct Reduced { cd z0; double m, n; };
    Reduced reduce(cd z) const {
        const double n = std::round(z.imag() / (2.0 * omega_p.imag()));
        const double m = degenerate() ? 0.0 : std::round(z.real() / (2.0 * omega));
        cd z0 = z - 2.0 * n * omega_p;
        if (m != 0.0) z0 -= 2.0 * m * omega;
        if (std::abs(z0) < 1e-8) throw PoleError("argument on the period lattice");
        return {z0, m, n};
    }

    bool swapped_ = false;
    detail::RectLattice lat_;
};

} // namespace sg
