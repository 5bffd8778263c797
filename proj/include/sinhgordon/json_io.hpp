#pragma once

// JSON views of the library types. Needs nlohmann/json (vendor/json.hpp).

#include <json.hpp>

#include "genus2_spectral.hpp"
#include "immersion_willmore.hpp"
#include "modular_lattice.hpp"
#include "potentials.hpp"

namespace sg {

using json = nlohmann::json;

// + 0.0 drops negative zeros
inline json cjson(cd z) { return json::array({z.real() + 0.0, z.imag() + 0.0}); }

inline cd cd_from_json(const json& j) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    return {j.at(0).get<double>(), j.at(1).get<double>()};
}

inline json to_json(const Potential& p) {
    return {{"alpha", cjson(p.alpha)}, {"beta", cjson(p.beta)}, {"gamma", p.gamma}};
}

inline Potential potential_from_json(const json& j) {
    return Potential(cd_from_json(j.at("alpha")), cd_from_json(j.at("beta")), j.at("gamma").get<double>());
}

inline json to_json(const SpectralQuartic& q) {
    json j{{"a1", cjson(q.a1)}, {"a2", q.a2}};
    if (q.classified) {
        j["class"] = stratum_name(q.cls);
        json roots = json::array();
        for (const auto& r : q.roots) roots.push_back({r.value.real(), r.value.imag(), r.mult});
        j["roots"] = roots;
    }
    return j;
}

inline json to_json(const PeriodLatticeG2& L) {
    return {{"class", "M2_1"},
            {"omega1", cjson(L.omega1)},
            {"omega2", cjson(L.omega2)},
            {"bperiod_residual", L.bperiod_residual},
            {"real_defect", L.real_defect},
            {"self_convergence", L.self_convergence},
            {"nodes_per_panel", L.n}};
}

inline json to_json(const ReducedTau& t) {
    return {{"tau", cjson(t.tau)},
            {"unimodular", {{t.unimodular[0][0], t.unimodular[0][1]}, {t.unimodular[1][0], t.unimodular[1][1]}}},
            {"det", t.det()}};
}

inline json to_json(const WillmoreReport& w) {
    return {{"w_explicit", w.w_explicit},
            {"w_residue", w.w_residue},
            {"w_direct", w.w_direct},
            {"agreement", {{"explicit_vs_residue", w.explicit_vs_residue}, {"direct_vs_explicit", w.direct_vs_explicit}}}};
}

} // namespace sg
