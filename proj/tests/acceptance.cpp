// Acceptance run: one PASS/FAIL line per criterion with the measured values.
// Exit status is nonzero when a criterion fails that is not a documented
// deviation (see KNOWN below).

#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <thread>

#include "sinhgordon/sinhgordon.hpp"

using namespace sg;

namespace {

// criteria whose failure is understood and recorded in the decisions ledger
const std::set<int> KNOWN = {6, 9};

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... a) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, a...);
    return buf;
}

unsigned jobs() { return std::max(1u, std::thread::hardware_concurrency()); }

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

const double W0 = 2 * pi * pi;

Outcome c1() {
    const Genus1Data d(1.0, 0.0);
    const double we = willmore_explicit_g1(d), wr = willmore_residue(d).w;
    const double wd = willmore_direct(d, 256, 1e-11, jobs()).w_hat;
    const double th = std::abs(tau_hat(tau_tilde(d)) - I);
    const bool ok = rel(we, W0) <= 1e-10 && rel(wr, W0) <= 1e-6 && rel(wd, W0) <= 1e-3 && th <= 1e-10;
    return {ok, fmt("explicit %.1e residue %.1e direct %.1e |tau_hat-i| %.1e", rel(we, W0), rel(wr, W0), rel(wd, W0), th)};
}

Outcome c2() {
    double dt = 0, dw = 0, dc = 0;
    for (double t : {-1.0, -0.5, 0.0, 0.5, 1.0}) {
        const Genus1Data d(1.0, t);
        const cd tt = tau_tilde(d);
        const double th = std::tanh(t);
        dt = std::max(dt, std::abs(tt - (I - th) / (1.0 - I * th)));
        dc = std::max(dc, std::abs(std::abs(tt) - 1.0));
        const double w = W0 * (2 * sqr(std::cosh(t)) - 1);
        dw = std::max(dw, rel(willmore_explicit_g1(d), w));
    }
    return {dt <= 1e-9 && dw <= 1e-8 && dc <= 1e-12, fmt("tau %.1e W rel %.1e | |tau|-1 | %.1e", dt, dw, dc)};
}

Outcome c3() {
    const Potential p0(0.0, 0.0, 2.0);
    // rays to |z| = 5 cover the disc; each leg stays within the |path| <= 10 contract
    double drift = 0;
    for (int k = 0; k < 16; ++k) drift = std::max(drift, integrate_flow(p0, {std::polar(5.0, 2 * pi * k / 16.0)}, 1e-10).drift);
    const auto a = integrate_flow(p0, {3.0, cd(3.0, 4.0)}, 1e-10).states.back();
    const auto b = integrate_flow(p0, {cd(0.0, 4.0), cd(3.0, 4.0)}, 1e-10).states.back();
    const double comm = std::abs(a.alpha - b.alpha) + std::abs(a.beta - b.beta) + std::abs(a.gamma - b.gamma);
    return {drift <= 1e-9 && comm <= 1e-8, fmt("drift %.1e commutativity %.1e", drift, comm)};
}

Outcome c4() {
    const Genus1Data d(0.6, 0.2);
    const Potential p0 = lift_genus1_potential(genus1_initial_state(d.r), d.phi);
    auto res = [&](double h) {
        const int n = int(std::lround(0.4 / h));
        return sinh_gordon_residual(integrate_grid(p0, h, cd(0, h), n + 1, n + 1, 1e-13, jobs()));
    };
    const double a = res(0.04), b = res(0.02);
    return {a / b >= 3.8 && a / b <= 4.2, fmt("residual %.2e -> %.2e ratio %.3f", a, b, a / b)};
}

Outcome c5() {
    double leg = 0, prod = 0, dw = 0;
    for (double r : {0.3, 0.5, 0.8}) {
        const EllipticKernel K(r);
        leg = std::max(leg, K.legendre_defect());
        prod = std::max(prod, std::abs((K.e1 - K.e3) * (K.e2 - K.e3) - 1.0));
        const double h = 1e-6;
        const cd fd = (EllipticKernel(r + h).omega_p - EllipticKernel(r - h).omega_p) / (2 * h);
        dw = std::max(dw, std::abs(fd - K.domega_p_dr()) / std::abs(K.domega_p_dr()));
    }
    return {leg <= 1e-10 && prod <= 1e-12 && dw <= 1e-6, fmt("legendre %.1e product %.1e domega'/dr rel %.1e", leg, prod, dw)};
}

Outcome c6() {
    double agree = 0, mag = 0, dmax = -1e300, dmin = 1e300;
    for (int i = 0; i < 10; ++i) {
        const double r = 0.1 + 0.85 * i / 9.0;
        const double om = EllipticKernel(r).omega;
        for (int j = 0; j < 10; ++j) {
            const double t = -0.9 * om + 1.8 * om * j / 9.0;
            const auto J = jacobian_T(Genus1Data(r, t));
            agree = std::max(agree, rel(J.det_matrix, J.det_formula));
            mag = std::max(mag, rel(std::abs(J.det_matrix), std::abs(J.det_formula)));
            dmax = std::max(dmax, J.det_matrix);
            dmin = std::min(dmin, J.det_matrix);
        }
    }
    return {agree <= 1e-8 && dmax < 0.0,
            fmt("formula vs matrix %.1e (magnitudes %.1e); matrix det in [%.3g, %.3g], expected negative", agree, mag,
                dmin, dmax)};
}

Outcome c7() {
    const double e = 1e-3;
    const HyperCurve c(quartic_from_roots({0.5, 2.0, 1.0 - e, 1.0 / (1.0 - e)}));
    const auto L = period_lattice(c);
    const Genus1Data g(0.5, -EllipticKernel(0.5).omega * (1 - 1e-9));
    const double dist = lattice_distance(L.omega1, L.omega2, g.Omega1, g.Omega2);
    return {dist <= 1e-2, fmt("lattice distance %.2e", dist)};
}

Outcome c8() {
    double ares = 0, bre = 0, lin = 0, conv = 0;
    for (const auto& c : {HyperCurve::from_inner_roots(0.5 * I, -0.5 * I),
                          HyperCurve::from_inner_roots(std::polar(0.6, 2.1), std::polar(0.3, -2.1)),
                          HyperCurve::from_inner_roots(std::polar(0.8, -1.0), std::polar(0.45, 1.0))}) {
        const auto L = period_lattice(c, {}, 1e-10);
        const auto in = cycle_integrals(c, L.layout, L.n);
        const auto in2 = cycle_integrals(c, L.layout, 2 * L.n);
        const auto b1 = b_periods(in, solve_b_omega(in, 1.0)), bi = b_periods(in, solve_b_omega(in, I));
        const double sc = std::max(b1.cwiseAbs().maxCoeff(), bi.cwiseAbs().maxCoeff());
        for (const cd w : {cd(1.0), I, L.omega1, L.omega2, cd(0.3, -1.7)}) {
            const auto b = solve_b_omega(in, w);
            ares = std::max(ares, b.a_residual);
            const auto bp = b_periods(in, b);
            bre = std::max(bre, bp.real().cwiseAbs().maxCoeff() / std::max(bp.cwiseAbs().maxCoeff(), 1e-300));
            lin = std::max(lin, (bp - (w.real() * b1 + w.imag() * bi)).cwiseAbs().maxCoeff() / sc);
            const auto bp2 = b_periods(in2, solve_b_omega(in2, w));
            conv = std::max(conv, (bp2 - bp).cwiseAbs().maxCoeff() / sc);
        }
    }
    return {ares <= 1e-9 && bre <= 1e-8 && lin <= 1e-9 && conv <= 1e-8,
            fmt("A-residual %.1e B real part %.1e linearity %.1e doubling %.1e", ares, bre, lin, conv)};
}

std::vector<std::pair<double, double>> random_samples(unsigned seed, int n) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<std::pair<double, double>> out;
    for (int k = 0; k < n; ++k) {
        const double r = 0.25 + 0.7 * u(rng);
        const double om = EllipticKernel(r).omega;
        out.push_back({r, 0.8 * om * (2 * u(rng) - 1)});
    }
    return out;
}

Outcome c9() {
    double mu = 0, per = 0, conf = 0;
    const auto samples = random_samples(20261019, 10);
    std::vector<double> cs(samples.size()), ps(samples.size()), ms(samples.size());
    parallel_for(samples.size(), jobs(), [&](size_t k) {
        const Genus1Immersion im(Genus1Data(samples[k].first, samples[k].second));
        ms[k] = im.closing().mu_defect;
        ps[k] = periodicity_defect(im, {0.0, cd(0.3, 0.2)});
        cs[k] = conformality_defect(im, cd(0.17, -0.11), 0.01);
    });
    for (size_t k = 0; k < samples.size(); ++k) {
        mu = std::max(mu, ms[k]);
        per = std::max(per, ps[k]);
        conf = std::max(conf, cs[k]);
    }
    return {mu <= 1e-8 && per <= 1e-5 && conf <= 1e-4,
            fmt("mu %.1e periodicity %.1e conformality(h=0.01) %.2e", mu, per, conf)};
}

Outcome c10() {
    const auto samples = random_samples(7, 10);
    std::vector<WillmoreReport> rep(samples.size());
    for (size_t k = 0; k < samples.size(); ++k)
        rep[k] = willmore_report(Genus1Data(samples[k].first, samples[k].second), 64, jobs());
    double er = 0, de = 0;
    for (const auto& r : rep) {
        er = std::max(er, r.explicit_vs_residue);
        de = std::max(de, r.direct_vs_explicit);
    }
    return {er <= 1e-6 && de <= 1e-3, fmt("explicit/residue %.1e direct/explicit %.1e", er, de)};
}

Outcome c11() {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-2, 2);
    std::uniform_int_distribution<int> pick(0, 2), len(1, 12);
    double worst = 0;
    for (int k = 0; k < 100; ++k) {
        const cd w1(u(rng), u(rng)), w2(u(rng), u(rng));
        if (std::abs((w2 / w1).imag()) < 1e-3) continue;
        // random word in S, T, T^-1 acting on (w2, w1)
        long a = 1, b = 0, c = 0, d = 1;
        for (int s = len(rng); s > 0; --s) {
            const int g = pick(rng);
            long na, nb, nc, nd;
            if (g == 0) { na = -c; nb = -d; nc = a; nd = b; }
            else if (g == 1) { na = a + c; nb = b + d; nc = c; nd = d; }
            else { na = a - c; nb = b - d; nc = c; nd = d; }
            a = na; b = nb; c = nc; d = nd;
        }
        const cd v2 = double(a) * w2 + double(b) * w1, v1 = double(c) * w2 + double(d) * w1;
        const cd t0 = reduce(w1, w2).tau, t1 = reduce(v1, v2).tau;
        worst = std::max(worst, std::min(std::abs(t0 - t1), tau_distance(t0, t1)));
    }
    double branch = 0;
    for (double y : {0.3, 0.8, 1.5, 4.0}) {
        const double dlt = 1e-9;
        branch = std::max(branch, tau_distance(tau_hat(cd(-dlt, y)), tau_hat(cd(dlt, y))));
    }
    return {worst <= 1e-12 && branch <= 1e-6, fmt("regeneration %.1e branch jump %.1e", worst, branch)};
}

Outcome figures() {
    const auto rows = figure4_data({0.3, 0.5, 0.7, 0.9, 1.0}, 21, jobs());
    double sym = 0;
    bool min_at_0 = true;
    for (size_t b = 0; b < rows.size(); b += 21)
        for (size_t k = 0; k < 21; ++k) {
            sym = std::max(sym, rel(rows[b + k].willmore, rows[b + 20 - k].willmore));
            if (rows[b].r == 1.0) min_at_0 = min_at_0 && rows[b + k].willmore >= rows[b + 10].willmore;
        }
    // strictly monotone in r, either direction
    std::vector<double> im;
    for (double r : {0.3, 0.5, 0.7, 0.9}) im.push_back(tau_tilde(Genus1Data(r, 0.0)).imag());
    bool up = true, down = true;
    for (size_t k = 1; k < im.size(); ++k) {
        up = up && im[k] > im[k - 1];
        down = down && im[k] < im[k - 1];
    }
    const bool mono = up || down;
    return {sym <= 1e-10 && min_at_0 && mono,
            fmt("W(t)=W(-t) %.1e min at t=0 %s Im tau(t=0) monotone %s", sym, min_at_0 ? "yes" : "no", mono ? "yes" : "no")};
}

} // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> crit = {
        {"1", c1}, {"2", c2}, {"3", c3}, {"4", c4}, {"5", c5}, {"6", c6},
        {"7", c7}, {"8", c8}, {"9", c9}, {"10", c10}, {"11", c11}, {"figures", figures}};
    const std::map<std::string, double> budget = {{"1", 10.0}, {"3", 5.0}, {"7", 60.0}};
    int unexpected = 0;
    for (const auto& [name, fn] : crit) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (auto it = budget.find(name); it != budget.end() && sec > it->second) {
            o.pass = false;
            o.detail += fmt(" (over %.0f s budget)", it->second);
        }
        const bool known = !o.pass && name != "figures" && KNOWN.count(std::stoi(name));
        std::printf("%s criterion %s: %s [%.2f s]%s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str(), sec,
                    known ? " (documented deviation)" : "");
        std::fflush(stdout);
        if (!o.pass && !known) ++unexpected;
    }
    return unexpected ? 1 : 0;
}
