#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "ode.hpp"
#include "parallel.hpp"
#include "potentials.hpp"

namespace sg {

struct Tangent {
    cd dalpha{};
    cd dbeta{};
    double dgamma = 0.0;
};

// U and V of the frame equation dF = F (U dx + V dy)
inline Mat2 lax_U(const Potential& p, cd l) {
    const double g = p.gamma;
    const cd d = 0.5 * (p.alpha - std::conj(p.alpha));
    Mat2 u;
    u << d, -1.0 / (g * l) - g, g + l / g, -d;
    return u;
}

inline Mat2 lax_V(const Potential& p, cd l) {
    const double g = p.gamma;
    const cd s = 0.5 * (p.alpha + std::conj(p.alpha));
    Mat2 v;
    v << s, -1.0 / (g * l) + g, g - l / g, -s;
    return I * v;
}

// First variation of zeta(l) along a tangent vector.
inline Mat2 zeta_variation(const Potential& p, const Tangent& t, cd l) {
    const double g = p.gamma;
    const cd A = t.dalpha * l - std::conj(t.dalpha) * l * l;
    Mat2 z;
    z << A, t.dgamma / (g * g) + t.dbeta * l - t.dgamma * l * l,
        t.dgamma * l - std::conj(t.dbeta) * l * l - t.dgamma / (g * g) * l * l * l, -A;
    return z;
}

// ([zeta, U], [zeta, V]) written as tangent vectors to P2. Closed forms from
// expanding the commutators; the tests compare them against the matrices.
inline std::pair<Tangent, Tangent> lax_vector_fields(const Potential& p) {
    const double ar = p.alpha.real(), ai = p.alpha.imag();
    const double br = p.beta.real(), bi = p.beta.imag();
    const double g = p.gamma, gi = 1.0 / g;
    Tangent x, y;
    x.dalpha = cd(g * g - gi * gi + br * (g - gi), bi * (g + gi));
    x.dbeta = cd(2 * ai * bi - 2 * ar * g + 2 * ar * gi, -2 * ai * br - 2 * ai * g - 2 * ai * gi);
    x.dgamma = -2 * ar * g;
    y.dalpha = cd(-bi * (g + gi), br * (g - gi) - (g * g - gi * gi));
    y.dbeta = cd(-2 * ai * g + 2 * ai * gi + 2 * ar * bi, -2 * ar * br + 2 * ar * g + 2 * ar * gi);
    y.dgamma = 2 * ai * g;
    return {x, y};
}

namespace detail {

constexpr int kPotDim = 5;

inline Potential unpack_potential(const Eigen::VectorXd& y) {
    Potential p;
    p.alpha = cd(y(0), y(1));
    p.beta = cd(y(2), y(3));
    p.gamma = y(4);
    return p;
}

inline void pack_potential(const Potential& p, Eigen::VectorXd& y) {
    y(0) = p.alpha.real();
    y(1) = p.alpha.imag();
    y(2) = p.beta.real();
    y(3) = p.beta.imag();
    y(4) = p.gamma;
}

inline Mat2 unpack_frame(const Eigen::VectorXd& y, int k) {
    const int o = kPotDim + 8 * k;
    Mat2 F;
    F << cd(y(o), y(o + 1)), cd(y(o + 2), y(o + 3)), cd(y(o + 4), y(o + 5)), cd(y(o + 6), y(o + 7));
    return F;
}

inline void pack_frame(const Mat2& F, Eigen::VectorXd& y, int k) {
    const int o = kPotDim + 8 * k;
    const cd v[4] = {F(0, 0), F(0, 1), F(1, 0), F(1, 1)};
    for (int i = 0; i < 4; ++i) {
        y(o + 2 * i) = v[i].real();
        y(o + 2 * i + 1) = v[i].imag();
    }
}

// Right-hand side of the flow along the direction (dx, dy), with frames for
// each spectral parameter in `lams` riding along.
struct FlowRhs {
    double dx, dy;
    std::vector<cd> lams;
    void operator()(double, const Eigen::VectorXd& y, Eigen::VectorXd& dy_out) const {
        const Potential p = unpack_potential(y);
        if (!(p.gamma > 0)) {
            dy_out.setConstant(std::numeric_limits<double>::quiet_NaN());
            return;
        }
        const auto [tx, ty] = lax_vector_fields(p);
        const cd da = dx * tx.dalpha + dy * ty.dalpha;
        const cd db = dx * tx.dbeta + dy * ty.dbeta;
        dy_out(0) = da.real();
        dy_out(1) = da.imag();
        dy_out(2) = db.real();
        dy_out(3) = db.imag();
        dy_out(4) = dx * tx.dgamma + dy * ty.dgamma;
        for (size_t k = 0; k < lams.size(); ++k) {
            const Mat2 F = unpack_frame(y, int(k));
            const Mat2 dF = F * (dx * lax_U(p, lams[k]) + dy * lax_V(p, lams[k]));
            pack_frame(dF, dy_out, int(k));
        }
    }
};

inline void renormalize_frames(Eigen::VectorXd& y, size_t nlam) {
    for (size_t k = 0; k < nlam; ++k) {
        Mat2 F = unpack_frame(y, int(k));
        F /= std::sqrt(F.determinant());
        pack_frame(F, y, int(k));
    }
}

} // namespace detail

struct FlowState {
    Potential p;
    std::vector<Mat2> frames;   // one per spectral parameter
};

struct FlowReport {
    double drift = 0.0;        // max |da1| + |da2| over accepted steps
    long steps = 0;
    long rejected = 0;
};

// Straight-line integration of potential and frames from the state `s` over
// the displacement dz in the (x, y) plane.
inline FlowState advance(const FlowState& s, const std::vector<cd>& lams, cd dz, double tol,
                         FlowReport* rep = nullptr) {
    const size_t nl = lams.size();
    Eigen::VectorXd y(detail::kPotDim + 8 * nl);
    detail::pack_potential(s.p, y);
    for (size_t k = 0; k < nl; ++k)
        detail::pack_frame(k < s.frames.size() ? s.frames[k] : Mat2::Identity(), y, int(k));
    if (dz == 0.0) {
        FlowState out = s;
        out.frames.resize(nl, Mat2::Identity());
        return out;
    }
    const SpectralQuartic q0 = spectral_poly(s.p);
    detail::FlowRhs rhs{dz.real(), dz.imag(), lams};
    OdeOptions o;
    o.rtol = tol;
    o.atol = tol * 1e-2;
    DormandPrince dp(o);
    double drift = 0.0;
    auto accept = [](const Eigen::VectorXd& v) { return v(4) > 0.0; };
    auto project = [&](Eigen::VectorXd& v) {
        if (nl) detail::renormalize_frames(v, nl);
        const auto q = spectral_poly(detail::unpack_potential(v));
        drift = std::max(drift, std::abs(q.a1 - q0.a1) + std::abs(q.a2 - q0.a2));
    };
    const auto st = dp.integrate(rhs, y, 0.0, 1.0, accept, project);
    if (rep) {
        rep->drift = std::max(rep->drift, drift);
        rep->steps += st.accepted;
        rep->rejected += st.rejected;
    }
    FlowState out;
    out.p = detail::unpack_potential(y);
    for (size_t k = 0; k < nl; ++k) out.frames.push_back(detail::unpack_frame(y, int(k)));
    return out;
}

struct FlowPath {
    std::vector<cd> points;         // waypoints, starting with 0
    std::vector<Potential> states;
    double drift = 0.0;             // relative to the initial potential
    long steps = 0;
};

// Integrate along a polyline through the waypoints (first leg starts at 0).
inline FlowPath integrate_flow(const Potential& p0, const std::vector<cd>& path, double tol = 1e-10) {
    FlowPath out;
    out.points.push_back(0.0);
    out.states.push_back(p0);
    const auto q0 = spectral_poly(p0);
    FlowState s{p0, {}};
    cd at = 0.0;
    FlowReport rep;
    for (const cd& w : path) {
        FlowReport leg;
        s = advance(s, {}, w - at, tol, &leg);
        const auto q = spectral_poly(s.p);
        rep.drift = std::max({rep.drift, leg.drift, std::abs(q.a1 - q0.a1) + std::abs(q.a2 - q0.a2)});
        rep.steps += leg.steps;
        at = w;
        out.points.push_back(w);
        out.states.push_back(s.p);
    }
    out.drift = rep.drift;
    out.steps = rep.steps;
    return out;
}

// Nodes z = i*e1 + j*e2, 0 <= i < nx, 0 <= j < ny, stored row-major (j*nx+i).
struct Trajectory {
    cd e1{}, e2{};
    int nx = 0, ny = 0;
    std::vector<Potential> states;
    std::vector<double> drift;      // per node |da1| + |da2|
    const Potential& at(int i, int j) const { return states[size_t(j) * nx + i]; }
    cd node(int i, int j) const { return double(i) * e1 + double(j) * e2; }
};

struct FrameGrid {
    cd e1{}, e2{};
    int nx = 0, ny = 0;
    std::vector<cd> lambda_samples;
    std::vector<FlowState> nodes;
    const FlowState& at(int i, int j) const { return nodes[size_t(j) * nx + i]; }
};

namespace detail {

// March along the first row, then up every column.
inline std::vector<FlowState> march_grid(const Potential& p0, const std::vector<cd>& lams, cd e1,
                                         cd e2, int nx, int ny, double tol, unsigned jobs = 1) {
    std::vector<FlowState> nodes(size_t(nx) * ny);
    FlowState s{p0, std::vector<Mat2>(lams.size(), Mat2::Identity())};
    for (int i = 0; i < nx; ++i) {
        if (i > 0) s = advance(s, lams, e1, tol);
        nodes[i] = s;
    }
    parallel_for(size_t(nx), jobs, [&](size_t i) {
        FlowState c = nodes[i];
        for (int j = 1; j < ny; ++j) {
            c = advance(c, lams, e2, tol);
            nodes[size_t(j) * nx + i] = c;
        }
    });
    return nodes;
}

} // namespace detail

inline Trajectory integrate_grid(const Potential& p0, cd e1, cd e2, int nx, int ny, double tol = 1e-10,
                                 unsigned jobs = 1) {
    Trajectory t;
    t.e1 = e1;
    t.e2 = e2;
    t.nx = nx;
    t.ny = ny;
    const auto q0 = spectral_poly(p0);
    for (auto& n : detail::march_grid(p0, {}, e1, e2, nx, ny, tol, jobs)) {
        const auto q = spectral_poly(n.p);
        t.states.push_back(n.p);
        t.drift.push_back(std::abs(q.a1 - q0.a1) + std::abs(q.a2 - q0.a2));
    }
    return t;
}

inline FrameGrid integrate_frame(const Potential& p0, cd e1, cd e2, int nx, int ny,
                                 const std::vector<cd>& lambda_samples, double tol = 1e-10, unsigned jobs = 1) {
    FrameGrid g;
    g.e1 = e1;
    g.e2 = e2;
    g.nx = nx;
    g.ny = ny;
    g.lambda_samples = lambda_samples;
    g.nodes = detail::march_grid(p0, lambda_samples, e1, e2, nx, ny, tol, jobs);
    return g;
}

// default spectral samples: 16 points on the unit circle
inline std::vector<cd> circle_samples(int n = 16) {
    std::vector<cd> out;
    for (int k = 0; k < n; ++k) out.push_back(std::polar(1.0, 2.0 * pi * (k + 0.5) / n));
    return out;
}

// max over interior nodes of |Lap_w u + 2 sinh(2u)|, u = ln gamma, in the
// coordinate w = 2z (with this Lax pair, Lap_z u + 8 sinh(2u) = 0)
inline double sinh_gordon_residual(const Trajectory& t) {
    if (t.nx < 3 || t.ny < 3) throw GridTooSmallError("need at least 3x3 nodes");
    if (std::abs(t.e1.imag()) > 1e-14 * std::abs(t.e1) || std::abs(t.e2.real()) > 1e-14 * std::abs(t.e2))
        throw DomainError("residual needs an axis-aligned grid");
    const double hx = t.e1.real(), hy = t.e2.imag();
    auto u = [&](int i, int j) { return std::log(t.at(i, j).gamma); };
    double res = 0.0;
    for (int j = 1; j + 1 < t.ny; ++j)
        for (int i = 1; i + 1 < t.nx; ++i) {
            const double lap = (u(i + 1, j) - 2 * u(i, j) + u(i - 1, j)) / (hx * hx) +
                               (u(i, j + 1) - 2 * u(i, j) + u(i, j - 1)) / (hy * hy);
            res = std::max(res, std::abs(0.25 * lap + 2.0 * std::sinh(2.0 * u(i, j))));
        }
    return res;
}

// Reduced genus-one flow in the y-hat direction.
struct Genus1State {
    double alpha_hat = 0.0;
    double beta_hat = 1.0;
    double a1_hat() const { return sqr(alpha_hat) + sqr(beta_hat) + 1.0 / sqr(beta_hat); }
};

namespace detail {
inline void genus1_rhs(double, const Eigen::VectorXd& y, Eigen::VectorXd& d) {
    d(0) = 2.0 * (1.0 / (y(1) * y(1)) - y(1) * y(1));
    d(1) = 2.0 * y(0) * y(1);
}

inline Genus1State genus1_step(const Genus1State& s, double dy, double tol) {
    Eigen::VectorXd y(2);
    y << s.alpha_hat, s.beta_hat;
    OdeOptions o;
    o.rtol = tol;
    o.atol = tol * 1e-2;
    DormandPrince(o).integrate(genus1_rhs, y, 0.0, dy, [](const Eigen::VectorXd& v) { return v(1) > 0; });
    return {y(0), y(1)};
}
} // namespace detail

// states at n+1 equally spaced points of [0, y_span]
inline std::vector<Genus1State> genus1_flow(const Genus1State& s0, double y_span, double tol = 1e-10,
                                            int n = 100) {
    if (!(s0.beta_hat > 0)) throw DomainError("beta_hat must be positive");
    std::vector<Genus1State> out{s0};
    Genus1State s = s0;
    for (int k = 0; k < n; ++k) {
        s = detail::genus1_step(s, y_span / n, tol);
        out.push_back(s);
    }
    return out;
}

// Period of the closed orbit through s0, from two consecutive upward zero
// crossings of alpha_hat. Empty at the fixed point.
inline std::optional<double> genus1_period(const Genus1State& s0, double tol = 1e-12, double max_span = 100.0) {
    if (!(s0.beta_hat > 0)) throw DomainError("beta_hat must be positive");
    if (std::abs(s0.alpha_hat) < 1e-14 && std::abs(s0.beta_hat - 1.0) < 1e-14) return std::nullopt;
    const double h = 0.02;
    std::vector<double> crossings;
    Genus1State s = s0;
    double y = 0.0;
    while (y < max_span && crossings.size() < 2) {
        const Genus1State n = detail::genus1_step(s, h, tol);
        if (s.alpha_hat < 0 && n.alpha_hat >= 0) {
            double lo = 0.0, hi = h;
            for (int it = 0; it < 60 && hi - lo > 1e-15; ++it) {
                const double mid = 0.5 * (lo + hi);
                (detail::genus1_step(s, mid, tol).alpha_hat < 0 ? lo : hi) = mid;
            }
            crossings.push_back(y + 0.5 * (lo + hi));
        }
        s = n;
        y += h;
    }
    if (crossings.size() < 2) return std::nullopt;
    return crossings[1] - crossings[0];
}

} // namespace sg
