#pragma once

#include <algorithm>
#include <array>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "common.hpp"

namespace sg {

// zeta(lambda) = [[A, B], [C, -A]] with
//   A = alpha l - conj(alpha) l^2,  B = -1/gamma + beta l - gamma l^2,
//   C = gamma l - conj(beta) l^2 + l^3/gamma
struct Potential {
    cd alpha{};
    cd beta{};
    double gamma = 1.0;

    Potential() = default;
    Potential(cd a, cd b, double g) : alpha(a), beta(b), gamma(g) {
        if (!(g > 0.0) || !std::isfinite(g))
            throw DomainError("gamma must be a positive finite real");
    }
};

inline Mat2 eval_zeta(const Potential& p, cd l) {
    const cd A = p.alpha * l - std::conj(p.alpha) * l * l;
    Mat2 z;
    z << A, -1.0 / p.gamma + p.beta * l - p.gamma * l * l,
        p.gamma * l - std::conj(p.beta) * l * l + l * l * l / p.gamma, -A;
    return z;
}

// d zeta / d lambda
inline Mat2 eval_dzeta(const Potential& p, cd l) {
    const cd A = p.alpha - 2.0 * std::conj(p.alpha) * l;
    Mat2 z;
    z << A, p.beta - 2.0 * p.gamma * l,
        p.gamma - 2.0 * std::conj(p.beta) * l + 3.0 * l * l / p.gamma, -A;
    return z;
}

enum class Stratum { M21, M22, M23, M24, M25 };

inline std::string stratum_name(Stratum s) {
    switch (s) {
    case Stratum::M21: return "M2_1";
    case Stratum::M22: return "M2_2";
    case Stratum::M23: return "M2_3";
    case Stratum::M24: return "M2_4";
    case Stratum::M25: return "M2_5";
    }
    return "?";
}

struct Root {
    cd value;
    int mult = 1;
};

// a(l) = l^4 + a1 l^3 + a2 l^2 + conj(a1) l + 1
struct SpectralQuartic {
    cd a1{};
    double a2 = 2.0;
    std::vector<Root> roots;   // filled by classify
    Stratum cls = Stratum::M21;
    bool classified = false;

    // ascending coefficients
    std::array<cd, 5> coeffs() const { return {1.0, std::conj(a1), a2, a1, 1.0}; }

    cd eval(cd l) const {
        return (((l + a1) * l + a2) * l + std::conj(a1)) * l + 1.0;
    }
    cd deriv(cd l) const {
        return ((4.0 * l + 3.0 * a1) * l + 2.0 * a2) * l + std::conj(a1);
    }
    // l^-2 a(l) on the unit circle, real by the reality symmetry
    double circle_value(double theta) const {
        return 2.0 * std::cos(2.0 * theta) + 2.0 * std::real(a1 * std::polar(1.0, theta)) + a2;
    }
    // distinct root values with multiplicity expanded
    std::vector<cd> root_list() const {
        std::vector<cd> out;
        for (const auto& r : roots)
            for (int k = 0; k < r.mult; ++k) out.push_back(r.value);
        return out;
    }
};

inline SpectralQuartic spectral_poly(const Potential& p) {
    SpectralQuartic q;
    const cd ab = std::conj(p.alpha);
    q.a1 = -ab * ab - p.beta / p.gamma - std::conj(p.beta) * p.gamma;
    q.a2 = 2.0 * std::norm(p.alpha) + std::norm(p.beta) + p.gamma * p.gamma +
           1.0 / (p.gamma * p.gamma);
    return q;
}

// Quartic with the given four roots (with repetition). Throws MembershipError
// when the roots do not produce the required reality structure.
inline SpectralQuartic quartic_from_roots(const std::vector<cd>& r, double tol = 1e-9) {
    if (r.size() != 4) throw DomainError("quartic needs four roots");
    std::array<cd, 5> c{1.0, 0.0, 0.0, 0.0, 0.0};   // descending build
    for (const cd& x : r) {
        for (int k = 4; k >= 1; --k) c[k] = c[k] - x * c[k - 1];
    }
    // c = [1, c1, c2, c3, c4] descending: l^4 + c1 l^3 + c2 l^2 + c3 l + c4
    if (std::abs(c[4] - 1.0) > tol || std::abs(c[3] - std::conj(c[1])) > tol ||
        std::abs(c[2].imag()) > tol)
        throw MembershipError("roots violate a(0)=1 or the reality symmetry");
    SpectralQuartic q;
    q.a1 = 0.5 * (c[1] + std::conj(c[3]));
    q.a2 = c[2].real();
    return q;
}

namespace detail {

inline std::vector<cd> quartic_roots_raw(const SpectralQuartic& q) {
    const auto c = q.coeffs();
    Eigen::Matrix4cd comp = Eigen::Matrix4cd::Zero();
    for (int i = 1; i < 4; ++i) comp(i, i - 1) = 1.0;
    for (int i = 0; i < 4; ++i) comp(i, 3) = -c[i];
    Eigen::ComplexEigenSolver<Eigen::Matrix4cd> es(comp, false);
    std::vector<cd> roots;
    for (int i = 0; i < 4; ++i) {
        // no Newton polish: near a multiple root it would move some members
        // of a cluster and not others, which shifts the cluster mean
        roots.push_back(es.eigenvalues()(i));
    }
    return roots;
}

// all set partitions of {0,1,2,3} as restricted growth strings
inline std::vector<std::array<int, 4>> partitions4() {
    std::vector<std::array<int, 4>> out;
    for (int b = 0; b <= 1; ++b)
        for (int c = 0; c <= std::max(b, 0) + 1; ++c)
            for (int d = 0; d <= std::max({b, c}) + 1; ++d)
                out.push_back({0, b, c, d});
    return out;
}

inline std::array<cd, 5> poly_from(const std::vector<cd>& r) {
    std::array<cd, 5> c{1.0, 0.0, 0.0, 0.0, 0.0};
    for (const cd& x : r)
        for (int k = 4; k >= 1; --k) c[k] = c[k] - x * c[k - 1];
    return c;
}

} // namespace detail

// Minimum of l^-2 a(l) over the unit circle: 256-point scan, then golden
// section refinement around every local minimum of the scan.
inline double circle_minimum(const SpectralQuartic& q, double* where = nullptr) {
    constexpr int n = 256;
    const double h = 2.0 * pi / n;
    std::array<double, n> v{};
    for (int k = 0; k < n; ++k) v[k] = q.circle_value(k * h);
    double best = std::numeric_limits<double>::infinity(), arg = 0.0;
    for (int k = 0; k < n; ++k) {
        const double prev = v[(k + n - 1) % n], next = v[(k + 1) % n];
        if (v[k] > prev || v[k] > next) continue;
        double a = (k - 1) * h, b = (k + 1) * h;
        const double g = 0.5 * (std::sqrt(5.0) - 1.0);
        double x1 = b - g * (b - a), x2 = a + g * (b - a);
        double f1 = q.circle_value(x1), f2 = q.circle_value(x2);
        for (int it = 0; it < 80 && b - a > 1e-14; ++it) {
            if (f1 < f2) { b = x2; x2 = x1; f2 = f1; x1 = b - g * (b - a); f1 = q.circle_value(x1); }
            else { a = x1; x1 = x2; f1 = f2; x2 = a + g * (b - a); f2 = q.circle_value(x2); }
        }
        const double x = 0.5 * (a + b), fx = q.circle_value(x);
        if (fx < best) { best = fx; arg = x; }
    }
    if (where) *where = arg;
    return best;
}

inline bool in_M2(const SpectralQuartic& q, double tol = 1e-10) {
    const double scale = 2.0 + 2.0 * std::abs(q.a1) + std::abs(q.a2);
    return circle_minimum(q) >= -tol * scale;
}

// Root clustering works in coefficient space: a cluster is accepted when
// replacing its members by their mean changes the coefficients by at most tol
// (relative). A double root perturbed by d moves the coefficients by ~d^2, so
// this is robust where a distance threshold on the roots is not.
inline SpectralQuartic classify(SpectralQuartic q, double tol = 1e-8) {
    if (!in_M2(q)) throw MembershipError("l^-2 a(l) < 0 somewhere on the unit circle");

    const auto raw = detail::quartic_roots_raw(q);
    const auto c0 = q.coeffs();
    double cnorm = 0.0;
    for (const auto& x : c0) cnorm += std::norm(x);
    cnorm = std::sqrt(cnorm);

    struct Cand { int nclusters; double err; std::vector<Root> roots; };
    std::vector<Cand> cands;
    for (const auto& part : detail::partitions4()) {
        const int m = *std::max_element(part.begin(), part.end()) + 1;
        std::vector<Root> cl(m, Root{0.0, 0});
        for (int i = 0; i < 4; ++i) { cl[part[i]].value += raw[i]; cl[part[i]].mult += 1; }
        std::vector<cd> merged;
        for (auto& r : cl) {
            r.value /= double(r.mult);
            for (int k = 0; k < r.mult; ++k) merged.push_back(r.value);
        }
        const auto c = detail::poly_from(merged);
        double e = 0.0;
        for (int k = 0; k <= 4; ++k) e += std::norm(c[k] - c0[4 - k]);
        cands.push_back({m, std::sqrt(e) / cnorm, cl});
    }
    // coarsest partition inside tol; ties go to the smaller backward error
    const Cand* best = nullptr;
    for (const auto& c : cands) {
        if (c.err > tol) continue;
        if (!best || c.nclusters < best->nclusters ||
            (c.nclusters == best->nclusters && c.err < best->err))
            best = &c;
    }
    if (!best) throw AmbiguousRootError("no root clustering within tolerance");
    for (const auto& c : cands) {
        if (c.nclusters < best->nclusters && c.err > tol && c.err <= 10.0 * tol)
            throw AmbiguousRootError("root clustering unstable at tol " + std::to_string(tol));
    }

    std::vector<Root> roots = best->roots;
    const double circ_tol = std::max(100.0 * tol, 1e-12);
    auto on_circle = [&](cd z) { return std::abs(std::abs(z) - 1.0) <= circ_tol; };

    int n_simple = 0, n_double_on = 0, n_double_off = 0, n_quad = 0;
    for (const auto& r : roots) {
        if (r.mult == 1) ++n_simple;
        else if (r.mult == 2) (on_circle(r.value) ? n_double_on : n_double_off)++;
        else if (r.mult == 4 && on_circle(r.value)) ++n_quad;
        else throw AmbiguousRootError("root multiplicity pattern incompatible with the reality symmetry");
    }
    if (n_simple == 4) q.cls = Stratum::M21;
    else if (n_simple == 2 && n_double_on == 1) q.cls = Stratum::M22;
    else if (n_double_on == 2) q.cls = Stratum::M23;
    else if (n_quad == 1) q.cls = Stratum::M24;
    else if (n_double_off == 2) q.cls = Stratum::M25;
    else throw AmbiguousRootError("root multiplicity pattern incompatible with the reality symmetry");

    // enforce the pairing l <-> 1/conj(l)
    std::vector<Root> out;
    std::vector<bool> used(roots.size(), false);
    for (size_t i = 0; i < roots.size(); ++i) {
        if (used[i]) continue;
        const cd z = roots[i].value;
        if (on_circle(z)) {
            out.push_back({z / std::abs(z), roots[i].mult});
            used[i] = true;
            continue;
        }
        size_t j = roots.size();
        double bestd = std::numeric_limits<double>::infinity();
        for (size_t k = 0; k < roots.size(); ++k) {
            if (k == i || used[k] || roots[k].mult != roots[i].mult) continue;
            const double d = std::abs(z * std::conj(roots[k].value) - 1.0);
            if (d < bestd) { bestd = d; j = k; }
        }
        if (j == roots.size()) throw AmbiguousRootError("unpaired root");
        cd inner = std::abs(z) < 1.0 ? z : roots[j].value;
        const cd outer = std::abs(z) < 1.0 ? roots[j].value : z;
        inner = 0.5 * (inner + 1.0 / std::conj(outer));
        out.push_back({inner, roots[i].mult});
        out.push_back({1.0 / std::conj(inner), roots[i].mult});
        used[i] = used[j] = true;
    }
    q.roots = out;
    q.classified = true;
    return q;
}

inline Potential fixed_point_potential(const SpectralQuartic& q) {
    if (!q.classified || (q.cls != Stratum::M23 && q.cls != Stratum::M24))
        throw ClassError("fixed point exists only for M2_3 and M2_4");
    // any root on the circle works: the other one is its conjugate
    const cd l1 = q.roots.front().value;
    return Potential(0.0, 2.0 * l1.real(), 1.0);
}

// Sylvester resultant of B and C for alpha = 0, up to a nonzero factor
inline double offdiag_resultant(const Potential& p) {
    const cd b = p.beta;
    const double g = p.gamma;
    return std::real(b * b + std::conj(b * b)) - std::norm(b) * (g * g + 1.0 / (g * g)) +
           std::pow(g, 4) + std::pow(g, -4) - 2.0;
}

// The four potentials with alpha = 0 in I(a) for a in M2_1: the roots of B are
// one root out of each pair {a_i, 1/conj(a_i)}.
inline std::vector<Potential> off_diagonal_points(const SpectralQuartic& q) {
    if (!q.classified || q.cls != Stratum::M21)
        throw ClassError("off-diagonal points are enumerated for M2_1 only");
    std::vector<cd> inner;
    for (const auto& r : q.roots)
        if (std::abs(r.value) < 1.0) inner.push_back(r.value);
    std::vector<Potential> out;
    for (int m = 0; m < 4; ++m) {
        const cd r1 = (m & 1) ? 1.0 / std::conj(inner[0]) : inner[0];
        const cd r2 = (m & 2) ? 1.0 / std::conj(inner[1]) : inner[1];
        const cd prod = r1 * r2;
        if (prod.real() <= 0.0 || std::abs(prod.imag()) > 1e-9 * std::abs(prod)) continue;
        const double g = 1.0 / std::sqrt(prod.real());
        out.emplace_back(0.0, g * (r1 + r2), g);
    }
    if (out.size() != 4) throw ClassError("expected four off-diagonal potentials");
    return out;
}

} // namespace sg
