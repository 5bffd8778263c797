#pragma once

#include <algorithm>
#include <array>
#include <limits>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "modular_lattice.hpp"
#include "potentials.hpp"

namespace sg {

// The curve nu^2 = -lambda a(lambda) for a quartic with four simple roots
// off the unit circle. alpha[0], alpha[1] are the roots inside the disc,
// ordered by (arg, modulus).
struct HyperCurve {
    SpectralQuartic quartic;
    std::array<cd, 5> a{};  // ascending coefficients of a
    std::array<cd, 2> alpha{};

    explicit HyperCurve(const SpectralQuartic& q, double tol = 1e-8) {
        quartic = q.classified ? q : classify(q, tol);
        if (quartic.cls != Stratum::M21) throw ClassError("genus-two curve needs class M2_1, got " + stratum_name(quartic.cls));
        a = quartic.coeffs();
        std::vector<cd> in;
        for (const cd& r : quartic.root_list())
            if (std::abs(r) < 1.0) in.push_back(r);
        if (in.size() != 2) throw ClassError("expected two roots inside the unit disc");
        std::sort(in.begin(), in.end(), [](cd x, cd y) {
            return std::arg(x) != std::arg(y) ? std::arg(x) < std::arg(y) : std::abs(x) < std::abs(y);
        });
        alpha = {in[0], in[1]};
    }

    // from exactly known inner roots, bypassing numerical root clustering
    static HyperCurve from_inner_roots(cd a0, cd a1) {
        if (!(std::abs(a0) < 1.0 && std::abs(a1) < 1.0)) throw DomainError("inner roots must lie in the open unit disc");
        if (a0 == a1 || a0 == 0.0 || a1 == 0.0) throw ClassError("inner roots must be distinct and nonzero");
        SpectralQuartic q = quartic_from_roots({a0, a1, 1.0 / std::conj(a0), 1.0 / std::conj(a1)});
        q.cls = Stratum::M21;
        q.classified = true;
        q.roots = {{a0, 1}, {a1, 1}, {1.0 / std::conj(a0), 1}, {1.0 / std::conj(a1), 1}};
        return HyperCurve(q);
    }

    cd mirror(int i) const { return 1.0 / std::conj(alpha[i]); }
    std::array<cd, 5> branch_points() const { return {0.0, alpha[0], alpha[1], mirror(0), mirror(1)}; }

    cd eval_a(cd l) const { return (((a[4] * l + a[3]) * l + a[2]) * l + a[1]) * l + a[0]; }
    cd nu_squared(cd l) const { return -l * eval_a(l); }
    // -w a~(w) with a~(w) = w^4 a(1/w), the curve in the chart w = 1/lambda
    cd nu_squared_inv(cd w) const { return -w * ((((a[0] * w + a[1]) * w + a[2]) * w + a[3]) * w + a[4]); }
};

// Branch-tracked nu along a polyline. Consecutive samples are subdivided until
// |d nu| < |nu| / 2, so the continuation never jumps sheets.
inline std::vector<cd> nu_on_contour(const HyperCurve& c, const std::vector<cd>& pts, cd nu0 = cd(0, 0)) {
    if (pts.empty()) return {};
    const auto bp = c.branch_points();
    for (const cd& p : pts)
        for (const cd& b : bp)
            if (std::abs(p - b) < 1e-6) throw BranchCollisionError("contour passes within 1e-6 of a branch point");
    std::vector<cd> out;
    cd nu = std::sqrt(c.nu_squared(pts[0]));
    if (nu0 != 0.0 && std::abs(nu0 + nu) < std::abs(nu0 - nu)) nu = -nu;
    out.push_back(nu);
    for (size_t k = 1; k < pts.size(); ++k) {
        int sub = 1;
        for (;;) {
            cd v = nu;
            bool ok = true;
            for (int s = 1; s <= sub && ok; ++s) {
                const cd l = pts[k - 1] + (pts[k] - pts[k - 1]) * (double(s) / sub);
                cd w = std::sqrt(c.nu_squared(l));
                if (std::abs(w - v) > std::abs(w + v)) w = -w;
                if (std::abs(w - v) >= 0.5 * std::max(std::abs(v), std::abs(w))) ok = false;
                v = w;
            }
            if (ok) {
                nu = v;
                break;
            }
            sub *= 2;
            if (sub > (1 << 20)) throw BranchCollisionError("branch tracking failed to resolve a step");
        }
        out.push_back(nu);
    }
    return out;
}

namespace detail {

// Parabolic arc from p0 to p1 bulging by bend*|d| to the left of the chord.
struct Slit {
    cd p0, p1;
    double bend = 0.0;
    double gap0 = 1.0, gap1 = 1.0;  // relative distance to the nearest other branch point
    std::vector<cd> others;         // remaining branch points of the chart
    cd mid() const { return 0.5 * (p0 + p1); }
    cd half() const { return 0.5 * (p1 - p0); }
    cd at(double u) const { return mid() + half() * u + I * bend * half() * (1.0 - u * u); }
    cd tangent(double u) const { return half() - 2.0 * I * bend * half() * u; }
};

inline double slit_clearance(const Slit& s, const std::vector<cd>& others) {
    double d = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= 400; ++k) {
        const cd p = s.at(-1.0 + k / 200.0);
        for (const cd& b : others) d = std::min(d, std::abs(p - b));
    }
    return d / std::abs(s.half());
}

// Distance from the slit to branch points whose nearest slit point is interior
// (closeness to an endpoint is a property of the curve, handled by grading).
inline double interior_clearance(const Slit& s) {
    double d = std::numeric_limits<double>::infinity();
    for (const cd& z : s.others) {
        double best = std::numeric_limits<double>::infinity();
        int arg = 0;
        for (int k = 0; k <= 2000; ++k) {
            const double e = std::abs(s.at(-1.0 + k / 1000.0) - z);
            if (e < best) { best = e; arg = k; }
        }
        if (arg != 0 && arg != 2000) d = std::min(d, best);
    }
    return d;
}

// Does the region between the chord and the arc contain one of `others`?
inline bool lens_contains(const Slit& s, const std::vector<cd>& others) {
    for (const cd& b : others) {
        const cd q = (b - s.mid()) / s.half();
        if (std::abs(q.real()) >= 1.0 || std::abs(q.imag()) < 1e-9) continue;
        const double h = s.bend * (1.0 - q.real() * q.real());
        if ((q.imag() > 0 && q.imag() < h) || (q.imag() < 0 && q.imag() > h)) return true;
    }
    return false;
}

inline double choose_bend(cd p0, cd p1, const std::vector<cd>& others) {
    static const double cand[] = {0.0, 0.1, -0.1, 0.2, -0.2, 0.3, -0.3, 0.5, -0.5, 0.7, -0.7};
    double best = 0.0, best_score = -1.0;
    for (double b : cand) {
        Slit s;
        s.p0 = p0;
        s.p1 = p1;
        s.bend = b;
        if (lens_contains(s, others)) continue;
        const double sc = slit_clearance(s, others);
        if (sc >= 0.25) return b;
        if (sc > best_score) {
            best_score = sc;
            best = b;
        }
    }
    return best;
}

// Nodes in theta, where u = -cos(theta), for a slit whose endpoints have
// other branch points at relative distances gap0, gap1. Panels are graded
// geometrically toward each end down to a tenth of the induced scale
// sqrt(gap), then split into `n` pieces carrying 20-point Gauss rules.
inline void theta_rule(double gap0, double gap1, int n, std::vector<double>& th, std::vector<double>& wt) {
    using GL = boost::math::quadrature::gauss<double, 20>;
    static const auto nodes = [] {
        std::vector<std::pair<double, double>> v;
        const auto& x = GL::abscissa();
        const auto& w = GL::weights();
        for (size_t i = 0; i < x.size(); ++i) {
            v.push_back({x[i], w[i]});
            if (x[i] != 0.0) v.push_back({-x[i], w[i]});
        }
        std::sort(v.begin(), v.end());
        return v;
    }();
    auto grade = [](double gap) {
        std::vector<double> b;
        const double stop = 0.1 * std::sqrt(std::max(gap, 1e-300));
        for (double t = 0.5 * pi; t > stop && b.size() < 60; t *= 0.5) b.push_back(t);
        return b;
    };
    std::vector<double> br{0.0};
    auto g0 = grade(gap0);
    for (auto it = g0.rbegin(); it != g0.rend(); ++it) br.push_back(*it);
    for (double t : grade(gap1)) br.push_back(pi - t);
    br.push_back(pi);
    std::sort(br.begin(), br.end());
    br.erase(std::unique(br.begin(), br.end(), [](double x, double y) { return std::abs(x - y) < 1e-15; }), br.end());
    th.clear();
    wt.clear();
    for (size_t p = 0; p + 1 < br.size(); ++p)
        for (int q = 0; q < n; ++q) {
            const double a = br[p] + (br[p + 1] - br[p]) * q / n;
            const double b = br[p] + (br[p + 1] - br[p]) * (q + 1) / n;
            for (const auto& [x, w] : nodes) {
                th.push_back(0.5 * (a + b) + 0.5 * (b - a) * x);
                wt.push_back(0.5 * (b - a) * w);
            }
        }
}

// int_slit F(l) / sqrt(R(l)) dl for R = -(l - p0)(l - p1) prod(l - z) over
// the other branch points z. With u = -cos(theta) the endpoint singularities
// disappear; R / (1 - u^2) is formed from the factors, so nothing cancels
// near the ends. The square root is continued node to node.
template <class F>
cd slit_integral(const Slit& s, const F& f, int n) {
    std::vector<double> th, wt;
    theta_rule(s.gap0, s.gap1, n, th, wt);
    const cd h = s.half();
    const double b = s.bend;
    cd sum = 0.0, prev = 0.0;
    for (size_t k = 0; k < th.size(); ++k) {
        const double u = -std::cos(th[k]);
        const cd l = s.at(u);
        cd q = (1.0 + I * b * (1.0 - u)) * (1.0 - I * b * (1.0 + u));
        for (const cd& z : s.others) q *= (l - z);
        cd sq = h * std::sqrt(q);
        if (k > 0 && std::abs(sq - prev) > std::abs(sq + prev)) sq = -sq;
        prev = sq;
        sum += wt[k] * f(l) * s.tangent(u) / sq;
    }
    return sum;
}

inline double endpoint_gap(cd p, cd half, const std::vector<cd>& others) {
    double d = std::numeric_limits<double>::infinity();
    for (const cd& b : others) d = std::min(d, std::abs(b - p));
    return d / std::abs(half);
}

// ascending coefficients and b(0) of the real basis of b: Re w, Im w, beta1, beta2
inline std::array<cd, 4> b_basis(int k, cd& om) {
    switch (k) {
    case 0: om = 1.0; return {1.0, 0.0, 0.0, -1.0};
    case 1: om = I; return {I, 0.0, 0.0, I};
    case 2: om = 0.0; return {0.0, 1.0, -1.0, 0.0};
    default: om = 0.0; return {0.0, I, I, 0.0};
    }
}

inline cd horner(const cd* c, int deg, cd x) {
    cd v = c[deg];
    for (int j = deg - 1; j >= 0; --j) v = v * x + c[j];
    return v;
}

} // namespace detail

// Bends of the four slits; NaN entries are chosen automatically.
struct CycleLayout {
    std::array<double, 2> bend_A{std::nan(""), std::nan("")};
    std::array<double, 2> bend_B{std::nan(""), std::nan("")};
};

// Cycle integrals of the four real basis polynomials of b.
struct G2Integrals {
    Eigen::Matrix<cd, 2, 4> A, B;
    CycleLayout layout;  // resolved bends
    int n = 0;
};

namespace detail {
// Slits A1, A2, B1 (lambda chart) and B2 (chart w = 1/lambda) with bends resolved.
inline std::array<Slit, 4> make_slits(const HyperCurve& c, CycleLayout& lay) {
    const std::array<cd, 5> bl = c.branch_points();
    const std::array<cd, 5> bw = {0.0, 1.0 / c.alpha[0], 1.0 / c.alpha[1], std::conj(c.alpha[0]), std::conj(c.alpha[1])};
    auto make = [](cd p0, cd p1, const std::array<cd, 5>& bp, double& bend) {
        Slit s;
        s.p0 = p0;
        s.p1 = p1;
        for (const cd& z : bp)
            if (std::abs(z - p0) > 1e-300 && std::abs(z - p1) > 1e-300) s.others.push_back(z);
        if (s.others.size() != 3) throw BranchCollisionError("slit endpoints coincide with other branch points");
        if (std::isnan(bend)) bend = choose_bend(p0, p1, s.others);
        s.bend = bend;
        s.gap0 = endpoint_gap(p0, s.half(), s.others);
        s.gap1 = endpoint_gap(p1, s.half(), s.others);
        if (std::min(s.gap0, s.gap1) * std::abs(s.half()) < 1e-14)
            throw BranchCollisionError("branch points coincide");
        if (interior_clearance(s) < 1e-6) throw BranchCollisionError("slit passes within 1e-6 of a branch point");
        return s;
    };
    return {make(c.alpha[0], c.mirror(0), bl, lay.bend_A[0]), make(c.alpha[1], c.mirror(1), bl, lay.bend_A[1]),
            make(0.0, c.alpha[0], bl, lay.bend_B[0]), make(0.0, std::conj(c.alpha[1]), bw, lay.bend_B[1])};
}
} // namespace detail

inline CycleLayout resolve_layout(const HyperCurve& c, CycleLayout lay) {
    detail::make_slits(c, lay);
    return lay;
}

// `n` is the refinement level: every graded panel is split into n pieces.
inline G2Integrals cycle_integrals(const HyperCurve& c, const CycleLayout& layout_in, int n) {
    G2Integrals out;
    out.n = n;
    out.layout = layout_in;
    const auto sl = detail::make_slits(c, out.layout);
    const auto& a = c.a;
    std::array<cd, 4> da{};
    for (int j = 1; j <= 4; ++j) da[j - 1] = double(j) * a[j];

    for (int k = 0; k < 4; ++k) {
        cd om;
        const auto b = detail::b_basis(k, om);
        for (int i = 0; i < 2; ++i)
            out.A(i, k) = 2.0 * detail::slit_integral(sl[i], [&](cd l) { return detail::horner(b.data(), 3, l) / (2.0 * l); }, n);
        // (b - om a + om l a') / l, a polynomial of degree 3
        std::array<cd, 4> g{};
        for (int j = 1; j < 5; ++j) {
            const cd bj = j < 4 ? b[j] : 0.0;
            g[j - 1] = bj - om * a[j] + om * da[j - 1];
        }
        out.B(0, k) = 2.0 * detail::slit_integral(sl[2], [&](cd l) { return 0.5 * detail::horner(g.data(), 3, l); }, n);
        // chart w = 1/lambda: N(l) = b l - conj(om)(3a - l a'), reversed to degree 3
        std::array<cd, 4> nt{};
        for (int j = 0; j < 4; ++j) {
            const cd lb = j >= 1 ? b[j - 1] : 0.0;
            const cd lap = j >= 1 ? da[j - 1] : 0.0;
            nt[3 - j] = lb - std::conj(om) * (3.0 * a[j] - lap);
        }
        out.B(1, k) = 2.0 * detail::slit_integral(sl[3], [&](cd w) { return -0.5 * detail::horner(nt.data(), 3, w); }, n);
    }
    return out;
}

// b = om - conj(om) l^3 + beta1 (l - l^2) + i beta2 (l + l^2) with vanishing A-periods
struct BOmega {
    cd omega;
    double beta1 = 0.0, beta2 = 0.0;
    double a_residual = 0.0;     // max |A-period| of the solution
    double a_imag_defect = 0.0;  // relative imaginary part of the rotated A-periods
    double condition = 0.0;
    std::array<cd, 4> coeffs() const {
        return {omega, cd(beta1, beta2), cd(-beta1, beta2), -std::conj(omega)};
    }
    cd eval(cd l) const {
        const auto c = coeffs();
        return detail::horner(c.data(), 3, l);
    }
    Eigen::Vector4d real_coords() const { return {omega.real(), omega.imag(), beta1, beta2}; }
};

inline BOmega solve_b_omega(const G2Integrals& in, cd omega) {
    Eigen::Matrix<double, 2, 4> M;
    double imdef = 0.0;
    for (int i = 0; i < 2; ++i) {
        int jmax = 0;
        for (int j = 1; j < 4; ++j)
            if (std::abs(in.A(i, j)) > std::abs(in.A(i, jmax))) jmax = j;
        const cd rot = std::exp(-I * std::arg(in.A(i, jmax)));
        const double scale = std::abs(in.A(i, jmax));
        for (int j = 0; j < 4; ++j) {
            const cd v = in.A(i, j) * rot;
            M(i, j) = v.real();
            imdef = std::max(imdef, std::abs(v.imag()) / scale);
        }
    }
    if (imdef > 1e-6) throw PathIntegrationError("A-periods are not real up to a common phase");
    const Eigen::Matrix2d S = M.rightCols<2>();
    const double det = S.determinant();
    if (std::abs(det) < 1e-12 * std::max(1.0, S.cwiseAbs().maxCoeff() * S.cwiseAbs().maxCoeff()))
        throw SingularSystemError("A-period system is singular");
    const Eigen::Vector2d rhs = -(M.col(0) * omega.real() + M.col(1) * omega.imag());
    const Eigen::Vector2d beta = S.partialPivLu().solve(rhs);
    BOmega b;
    b.omega = omega;
    b.beta1 = beta(0);
    b.beta2 = beta(1);
    b.a_imag_defect = imdef;
    const Eigen::JacobiSVD<Eigen::Matrix2d> svd(S);
    b.condition = svd.singularValues()(0) / svd.singularValues()(1);
    b.a_residual = (in.A * b.real_coords().cast<cd>()).cwiseAbs().maxCoeff();
    return b;
}

inline Eigen::Vector2cd b_periods(const G2Integrals& in, const BOmega& b) {
    return in.B * b.real_coords().cast<cd>();
}

struct BPeriodMap {
    Eigen::Matrix2d m;          // columns: B-periods / i of b_1 and b_i
    double real_defect = 0.0;   // max |Re| / max |.| over the B-periods
};

inline BPeriodMap b_period_map(const G2Integrals& in) {
    BPeriodMap out;
    const Eigen::Vector2cd p1 = b_periods(in, solve_b_omega(in, 1.0));
    const Eigen::Vector2cd p2 = b_periods(in, solve_b_omega(in, I));
    out.m << p1(0).imag(), p2(0).imag(), p1(1).imag(), p2(1).imag();
    const double sc = std::max(p1.cwiseAbs().maxCoeff(), p2.cwiseAbs().maxCoeff());
    out.real_defect = std::max({std::abs(p1(0).real()), std::abs(p1(1).real()), std::abs(p2(0).real()),
                                std::abs(p2(1).real())}) / sc;
    if (std::abs(out.m.determinant()) < 1e-12 * out.m.cwiseAbs().maxCoeff() * out.m.cwiseAbs().maxCoeff())
        throw SingularSystemError("B-period map is not invertible");
    return out;
}

struct PeriodLatticeG2 {
    cd omega1, omega2;
    Eigen::Matrix2d bperiod_matrix;
    double bperiod_residual = 0.0;  // |B-periods of omega_j - 2 pi i e_j|
    double real_defect = 0.0;
    double self_convergence = 0.0;  // generator change under the last doubling
    int n = 0;
    CycleLayout layout;
    ReducedTau tau() const { return reduce(omega1, omega2); }
};

namespace detail {
inline PeriodLatticeG2 lattice_at(const HyperCurve& c, const CycleLayout& lay, int n) {
    const G2Integrals in = cycle_integrals(c, lay, n);
    const BPeriodMap bm = b_period_map(in);
    PeriodLatticeG2 L;
    L.bperiod_matrix = bm.m;
    L.real_defect = bm.real_defect;
    const Eigen::Matrix2d inv = bm.m.inverse();
    L.omega1 = cd(2.0 * pi * inv(0, 0), 2.0 * pi * inv(1, 0));
    L.omega2 = cd(2.0 * pi * inv(0, 1), 2.0 * pi * inv(1, 1));
    const Eigen::Vector2cd q1 = b_periods(in, solve_b_omega(in, L.omega1));
    const Eigen::Vector2cd q2 = b_periods(in, solve_b_omega(in, L.omega2));
    L.bperiod_residual = std::max({std::abs(q1(0) - 2.0 * pi * I), std::abs(q1(1)), std::abs(q2(0)),
                                   std::abs(q2(1) - 2.0 * pi * I)});
    L.n = n;
    L.layout = in.layout;
    return L;
}
} // namespace detail

// Generators by doubling the quadrature size until they agree to `tol`
// relative to the lattice scale.
inline PeriodLatticeG2 period_lattice(const HyperCurve& c, const CycleLayout& lay = {}, double tol = 1e-10,
                                      int n0 = 1, int n_max = 64) {
    PeriodLatticeG2 prev = detail::lattice_at(c, lay, n0);
    for (int n = 2 * n0; n <= n_max; n *= 2) {
        PeriodLatticeG2 cur = detail::lattice_at(c, lay, n);
        const double scale = std::max(std::abs(cur.omega1), std::abs(cur.omega2));
        cur.self_convergence = std::max(std::abs(cur.omega1 - prev.omega1), std::abs(cur.omega2 - prev.omega2)) / scale;
        if (cur.self_convergence <= tol) return cur;
        prev = cur;
    }
    throw PathIntegrationError("period quadrature did not converge; relative change " +
                               std::to_string(prev.self_convergence));
}

struct RootSigns {
    std::array<cd, 4> roots{};     // alpha1, alpha2, mirror1, mirror2
    std::array<int, 4> sign{};
    double defect = 0.0;           // max |ln mu - i pi k|
};

// Sign of mu_omega at the four roots: ln mu vanishes to leading order at
// lambda = 0 (resp. infinity), so its value at a root is half the B-type
// integral from there.
inline RootSigns mu_at_roots(const HyperCurve& c, const PeriodLatticeG2& L, cd omega, double tol = 1e-6) {
    const Eigen::Vector2d mn = L.bperiod_matrix * Eigen::Vector2d(omega.real(), omega.imag()) / (2.0 * pi);
    for (int i = 0; i < 2; ++i)
        if (std::abs(mn(i) - std::round(mn(i))) > tol) throw DomainError("omega is not in the period lattice");
    const G2Integrals in = cycle_integrals(c, L.layout, L.n);
    const BOmega b = solve_b_omega(in, omega);
    const Eigen::Vector2cd bp = b_periods(in, b);
    RootSigns out;
    out.roots = {c.alpha[0], c.alpha[1], c.mirror(0), c.mirror(1)};
    for (int i = 0; i < 2; ++i) {
        const cd lm = 0.5 * bp(i);
        const double k = std::round(lm.imag() / pi);
        out.defect = std::max(out.defect, std::abs(lm - I * pi * k));
        const int s = (long(k) % 2 == 0) ? 1 : -1;
        // mu is unchanged across an A-slit because the A-period vanishes
        out.defect = std::max(out.defect, std::abs((in.A.row(i) * b.real_coords().cast<cd>()).value()));
        out.sign[i == 0 ? 0 : 3] = s;
        out.sign[i == 0 ? 2 : 1] = s;
    }
    if (out.defect > 1e-4) throw PathIntegrationError("ln mu at a root is not in i pi Z");
    return out;
}

} // namespace sg
