// sgtool: command-line front end for the sinh-Gordon spectral library.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "sinhgordon/json_io.hpp"
#include "sinhgordon/sinhgordon.hpp"

using namespace sg;

namespace {

struct Config {
    std::string cmd;
    std::optional<double> r, t, phi, gamma, a2;
    std::vector<double> alpha, beta, a1, to;
    std::string r_list = "0.3,0.5,0.7,0.9,1.0";
    int t_steps = 41;
    int grid = 0;
    double tol = 1e-10;
    unsigned jobs = 1;
    std::string out;
    std::string format = "json";
};

json config_json(const Config& c) {
    json j{{"command", c.cmd}, {"tol", c.tol}, {"jobs", c.jobs}, {"format", c.format}};
    if (c.r) j["r"] = *c.r;
    if (c.t) j["t"] = *c.t;
    if (c.phi) j["phi"] = *c.phi;
    if (c.gamma) j["gamma"] = *c.gamma;
    if (!c.alpha.empty()) j["alpha"] = c.alpha;
    if (!c.beta.empty()) j["beta"] = c.beta;
    if (!c.a1.empty()) j["a1"] = c.a1;
    if (c.a2) j["a2"] = *c.a2;
    if (!c.to.empty()) j["to"] = c.to;
    if (c.grid) j["grid"] = c.grid;
    if (c.cmd == "figure3" || c.cmd == "figure4") {
        j["r_list"] = c.r_list;
        j["t_steps"] = c.t_steps;
    }
    if (!c.out.empty()) j["out"] = c.out;
    return j;
}

cd complex_arg(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    return {v[0], v.size() > 1 ? v[1] : 0.0};
}

bool has_potential(const Config& c) { return c.gamma.has_value() || !c.alpha.empty() || !c.beta.empty(); }
bool has_quartic(const Config& c) { return !c.a1.empty() || c.a2.has_value(); }

Potential potential_of(const Config& c) {
    if (!c.gamma) throw DomainError("--gamma is required with --alpha/--beta");
    return Potential(complex_arg(c.alpha), complex_arg(c.beta), *c.gamma);
}

SpectralQuartic quartic_of(const Config& c) {
    if (has_potential(c)) return spectral_poly(potential_of(c));
    if (!c.a2) throw DomainError("--a2 is required with --a1");
    SpectralQuartic q;
    q.a1 = complex_arg(c.a1);
    q.a2 = *c.a2;
    return q;
}

Genus1Data genus1_of(const Config& c) {
    if (!c.r) throw DomainError("--r is required");
    if (c.t && c.phi) throw DomainError("give either --t or --phi");
    if (c.phi) return genus1_from_phi(*c.r, *c.phi);
    return Genus1Data(*c.r, c.t.value_or(0.0));
}

// (r, phi) of a genus-one quartic with its double root in the upper half plane
Genus1Data genus1_of_quartic(const SpectralQuartic& q) {
    cd dbl = 0.0, simple = 0.0;
    for (const auto& rt : q.roots) {
        if (rt.mult == 2 && std::abs(std::abs(rt.value) - 1.0) < 1e-8) dbl = rt.value;
        if (rt.mult == 1 && std::abs(rt.value) < 1.0) simple = rt.value;
    }
    if (dbl == 0.0) throw DomainError("no double root on the unit circle");
    const double phi = 0.5 * std::arg(dbl);
    const double r = q.cls == Stratum::M23 ? 1.0 : std::abs(simple);
    return genus1_from_phi(r, phi);
}

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> v;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        std::size_t used = 0;
        double x = 0.0;
        try {
            x = std::stod(tok, &used);
        } catch (const std::exception&) {
            throw DomainError("bad number in list: " + tok);
        }
        if (used != tok.size()) throw DomainError("bad number in list: " + tok);
        v.push_back(x);
    }
    if (v.empty()) throw DomainError("empty list");
    return v;
}

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void emit(const Config& c, const std::string& text) {
    if (c.out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(c.out, std::ios::binary);
    if (!f) throw DomainError("cannot open " + c.out);
    f << text;
}

void emit_json(const Config& c, json result) {
    result["config"] = config_json(c);
    emit(c, result.dump(2) + "\n");
}

// CSV: config comment, header row, rows with 17 significant digits
std::string csv(const Config& c, const std::vector<std::string>& cols, const std::vector<std::vector<double>>& rows) {
    std::string s = "# " + config_json(c).dump() + "\n";
    for (size_t k = 0; k < cols.size(); ++k) s += (k ? "," : "") + cols[k];
    s += "\n";
    for (const auto& row : rows) {
        for (size_t k = 0; k < row.size(); ++k) s += (k ? "," : "") + fmt17(row[k]);
        s += "\n";
    }
    return s;
}

int cmd_classify(const Config& c) {
    if (!has_potential(c) && !has_quartic(c)) throw DomainError("give a potential or a quartic");
    const SpectralQuartic q = classify(quartic_of(c), 1e-8);
    json j = to_json(q);
    if (has_potential(c)) j["potential"] = to_json(potential_of(c));
    j["circle_minimum"] = circle_minimum(q);
    emit_json(c, j);
    return 0;
}

int cmd_flow(const Config& c) {
    if (c.to.size() != 2) throw DomainError("--to X Y is required");
    const Potential p0 = potential_of(c);
    const cd end(c.to[0], c.to[1]);
    const int n = std::max(1, c.grid);
    std::vector<cd> path;
    for (int k = 1; k <= n; ++k) path.push_back(end * (double(k) / n));
    const FlowPath fp = integrate_flow(p0, path, c.tol);
    if (c.format == "csv") {
        std::vector<std::vector<double>> rows;
        for (size_t k = 0; k < fp.points.size(); ++k) {
            const auto& p = fp.states[k];
            rows.push_back({fp.points[k].real(), fp.points[k].imag(), p.alpha.real(), p.alpha.imag(), p.beta.real(),
                            p.beta.imag(), p.gamma});
        }
        emit(c, csv(c, {"x", "y", "re_alpha", "im_alpha", "re_beta", "im_beta", "gamma"}, rows));
        return 0;
    }
    emit_json(c, {{"start", to_json(p0)}, {"end", to_json(fp.states.back())}, {"drift", fp.drift}, {"steps", fp.steps}});
    return 0;
}

int cmd_lattice(const Config& c) {
    const SpectralQuartic q = classify(quartic_of(c), 1e-8);
    if (q.cls == Stratum::M22 || q.cls == Stratum::M23) {
        const Genus1Data d = genus1_of_quartic(q);
        emit_json(c, {{"class", stratum_name(q.cls)},
                      {"omega1", cjson(d.Omega1)},
                      {"omega2", cjson(d.Omega2)},
                      {"r", d.r},
                      {"t", d.t},
                      {"phi", d.phi},
                      {"tau", to_json(reduce(d.Omega1, d.Omega2))}});
        return 0;
    }
    const HyperCurve h(q);
    const PeriodLatticeG2 L = period_lattice(h, {}, std::min(1e-8, c.tol * 100.0));
    json j = to_json(L);
    j["tau"] = to_json(L.tau());
    emit_json(c, j);
    return 0;
}

int cmd_tau(const Config& c) {
    cd tt;
    json j;
    if (c.r) {
        const Genus1Data d = genus1_of(c);
        tt = tau_tilde(d);
        j["r"] = d.r;
        j["t"] = d.t;
        j["phi"] = d.phi;
    } else {
        const SpectralQuartic q = classify(quartic_of(c), 1e-8);
        j["class"] = stratum_name(q.cls);
        if (q.cls == Stratum::M22 || q.cls == Stratum::M23) {
            tt = tau_tilde(genus1_of_quartic(q));
        } else {
            const PeriodLatticeG2 L = period_lattice(HyperCurve(q), {}, std::min(1e-8, c.tol * 100.0));
            tt = L.omega2 / L.omega1;  // the index-two sublattice needs the raw generators
            j["bperiod_residual"] = L.bperiod_residual;
        }
    }
    j["tau_tilde"] = cjson(tt);
    j["tau_tilde_reduced"] = cjson(reduce_tau(tt).tau);
    j["tau_hat"] = cjson(tau_hat(tt));
    emit_json(c, j);
    return 0;
}

int cmd_willmore(const Config& c) {
    const Genus1Data d = genus1_of(c);
    const int n = c.grid > 0 ? c.grid : 64;
    const WillmoreReport w = willmore_report(d, n, c.jobs);
    json j = to_json(w);
    j["r"] = d.r;
    j["t"] = d.t;
    j["tolerances"] = {{"explicit_vs_residue", 1e-6}, {"direct_vs_explicit", 1e-3}};
    j["within_tolerance"] = w.explicit_vs_residue <= 1e-6 && w.direct_vs_explicit <= 1e-3;
    emit_json(c, j);
    return 0;
}

int cmd_figure(const Config& c, int which) {
    const auto rs = parse_list(c.r_list);
    for (double r : rs)
        if (!(r > 0.0 && r <= 1.0)) throw DomainError("r must lie in (0,1]");
    if (c.t_steps < 1) throw DomainError("--t-steps must be positive");
    std::vector<std::vector<double>> rows;
    std::vector<std::string> cols;
    if (which == 3) {
        cols = {"r", "t", "re_tau_tilde", "im_tau_tilde"};
        for (const auto& row : figure3_data(rs, c.t_steps, c.jobs)) rows.push_back({row.r, row.t, row.re_tau, row.im_tau});
    } else {
        cols = {"r", "t", "re_tau_hat", "im_tau_hat", "willmore"};
        for (const auto& row : figure4_data(rs, c.t_steps, c.jobs))
            rows.push_back({row.r, row.t, row.re_tau_hat, row.im_tau_hat, row.willmore});
    }
    if (c.format == "csv") {
        emit(c, csv(c, cols, rows));
        return 0;
    }
    json arr = json::array();
    for (const auto& row : rows) {
        json o;
        for (size_t k = 0; k < cols.size(); ++k) o[cols[k]] = row[k];
        arr.push_back(o);
    }
    emit_json(c, {{"rows", arr}});
    return 0;
}

int cmd_immersion_export(const Config& c) {
    if (c.out.empty()) throw DomainError("--out PATH is required for the mesh");
    const Genus1Data d = genus1_of(c);
    const int n = c.grid > 0 ? c.grid : 32;
    const Genus1Immersion im(d, std::min(c.tol, 1e-11));
    const ImmersionGrid g = immersion_grid(im, n, n, c.jobs);
    std::ostringstream os;
    os << "# " << config_json(c).dump() << "\n";
    os << "# vertices carry the four real coordinates of f\n";
    for (const Mat2& f : g.f)
        os << "v " << fmt17(f(0, 0).real()) << ' ' << fmt17(f(0, 0).imag()) << ' ' << fmt17(f(1, 0).real()) << ' '
           << fmt17(f(1, 0).imag()) << "\n";
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            auto v = [&](int a, int b) { return g.idx(a % n, b % n) + 1; };
            os << "f " << v(i, j) << ' ' << v(i + 1, j) << ' ' << v(i + 1, j + 1) << ' ' << v(i, j + 1) << "\n";
        }
    emit(c, os.str());
    double conf = 0.0, hopf = 0.0;
    for (size_t k = 0; k < g.f.size(); ++k) {
        conf = std::max(conf, g.conformality[k]);
        hopf = std::max(hopf, g.hopf_defect[k]);
    }
    const json j{{"vertices", g.f.size()},
                 {"faces", size_t(n) * n},
                 {"conformality_defect", conf},
                 {"hopf_defect", hopf},
                 {"quaternion_defect", g.quaternion_defect},
                 {"closing_defect", im.closing().mu_defect},
                 {"periodicity_defect", periodicity_defect(im, {0.0})},
                 {"config", config_json(c)}};
    std::cout << j.dump(2) << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"sinh-Gordon spectral data, lattices and Willmore energies"};
    app.require_subcommand(1);
    Config c;

    auto add_common = [&](CLI::App* s) {
        s->add_option("--tol", c.tol, "integration tolerance")->check(CLI::PositiveNumber);
        s->add_option("--jobs", c.jobs, "worker threads (0 = all cores)");
        s->add_option("--out", c.out, "output path (default stdout)");
        s->add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
        s->add_option("--grid", c.grid, "grid size")->check(CLI::NonNegativeNumber);
    };
    auto add_potential = [&](CLI::App* s) {
        s->add_option("--alpha", c.alpha, "alpha as RE IM")->expected(1, 2);
        s->add_option("--beta", c.beta, "beta as RE IM")->expected(1, 2);
        s->add_option("--gamma", c.gamma, "gamma > 0");
    };
    auto add_quartic = [&](CLI::App* s) {
        s->add_option("--a1", c.a1, "a1 as RE [IM]")->expected(1, 2);
        s->add_option("--a2", c.a2, "a2 (real)");
    };
    auto add_genus1 = [&](CLI::App* s) {
        s->add_option("--r", c.r, "r in (0,1]");
        s->add_option("--t", c.t, "t in (-omega, omega)");
        s->add_option("--phi", c.phi, "phi in (0, pi/2)");
    };

    auto* classify_cmd = app.add_subcommand("classify", "spectral quartic and stratum");
    add_potential(classify_cmd);
    add_quartic(classify_cmd);
    add_common(classify_cmd);

    auto* flow_cmd = app.add_subcommand("flow", "integrate the Lax flows");
    add_potential(flow_cmd);
    flow_cmd->add_option("--to", c.to, "end point X Y")->expected(2);
    add_common(flow_cmd);

    auto* lattice_cmd = app.add_subcommand("lattice", "period lattice");
    add_potential(lattice_cmd);
    add_quartic(lattice_cmd);
    add_common(lattice_cmd);

    auto* tau_cmd = app.add_subcommand("tau", "conformal classes tau_tilde and tau_hat");
    add_genus1(tau_cmd);
    add_potential(tau_cmd);
    add_quartic(tau_cmd);
    add_common(tau_cmd);

    auto* willmore_cmd = app.add_subcommand("willmore", "Willmore energy by three routes");
    add_genus1(willmore_cmd);
    add_common(willmore_cmd);

    for (const char* name : {"figure3", "figure4"}) {
        auto* f = app.add_subcommand(name, std::string(name) + " data table");
        f->add_option("--r-list", c.r_list, "comma separated r values");
        f->add_option("--t-steps", c.t_steps, "t samples per r");
        add_common(f);
    }

    auto* export_cmd = app.add_subcommand("immersion-export", "OBJ mesh of the immersion");
    add_genus1(export_cmd);
    add_common(export_cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }
    c.cmd = app.get_subcommands().front()->get_name();

    try {
        if (c.cmd == "classify") return cmd_classify(c);
        if (c.cmd == "flow") return cmd_flow(c);
        if (c.cmd == "lattice") return cmd_lattice(c);
        if (c.cmd == "tau") return cmd_tau(c);
        if (c.cmd == "willmore") return cmd_willmore(c);
        if (c.cmd == "figure3") return cmd_figure(c, 3);
        if (c.cmd == "figure4") return cmd_figure(c, 4);
        if (c.cmd == "immersion-export") return cmd_immersion_export(c);
    } catch (const Error& e) {
        std::cerr << e.what() << "\n";
        return e.kind() == ErrorKind::domain ? 2 : 3;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    }
    return 2;
}
