#pragma once

// Run configuration: JSON parsing with field-level validation,
// serialization, and mesh construction from the geometry selection.

#include "axibem/assembly.hpp"
#include "axibem/geometry.hpp"

#include <json.hpp>

#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace axibem {

class ConfigError : public std::runtime_error {
  public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct CylinderTubeGeom {
    double a1, a2, l;
};
struct ConicalTubeGeom {
    double a1, a2, a3, a4, l;
};
struct SphericalShellGeom {
    double a1, a2;
};
using GeometrySpec = std::variant<CylinderTubeGeom, ConicalTubeGeom, SphericalShellGeom>;

struct Material {
    double sigma = 0.0;  // S/m
    double mu_r = 1.0;
};

struct RunConfig {
    GeometrySpec geometry{CylinderTubeGeom{0.009, 0.011, 0.024}};
    Material material{};
    CoilSpec coil{};
    std::vector<double> frequencies;  // Hz
    int n_s = 80;
    int order = 1;
    QuadratureConfig quadrature{};
    std::optional<double> L0;  // henry; computed from the coil when absent
    std::string note;
};

inline std::vector<double> default_frequency_grid() {
    std::vector<double> f(20);
    for (int i = 0; i < 20; ++i) f[i] = std::pow(10.0, 2.0 + 3.0 * i / 19.0);
    return f;
}

namespace detail {

using nlohmann::json;

inline double require_number(const json& j, const std::string& path, const char* key) {
    if (!j.contains(key))
        throw ConfigError(path + "." + key + ": missing required field");
    if (!j[key].is_number())
        throw ConfigError(path + "." + key + ": expected a number");
    return j[key].get<double>();
}

inline int require_int(const json& j, const std::string& path, const char* key) {
    if (!j.contains(key))
        throw ConfigError(path + "." + key + ": missing required field");
    if (!j[key].is_number_integer())
        throw ConfigError(path + "." + key + ": expected an integer");
    return j[key].get<int>();
}

inline void reject_unknown(const json& j, const std::string& path,
                           std::initializer_list<const char*> known) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : known)
            if (it.key() == k) ok = true;
        if (!ok) throw ConfigError(path + "." + it.key() + ": unknown field");
    }
}

}  // namespace detail

inline RunConfig parse_config(const std::string& text) {
    using nlohmann::json;
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config: top level must be an object");
    detail::reject_unknown(j, "config",
                           {"geometry", "material", "coil", "frequencies", "n_s", "order",
                            "quadrature", "L0", "note"});
    RunConfig cfg;

    if (!j.contains("geometry") || !j["geometry"].is_object())
        throw ConfigError("config.geometry: missing or not an object");
    const json& jg = j["geometry"];
    if (!jg.contains("type") || !jg["type"].is_string())
        throw ConfigError("config.geometry.type: missing or not a string");
    const std::string type = jg["type"].get<std::string>();
    if (type == "cylinder_tube") {
        detail::reject_unknown(jg, "config.geometry", {"type", "a1", "a2", "l"});
        CylinderTubeGeom g{detail::require_number(jg, "config.geometry", "a1"),
                           detail::require_number(jg, "config.geometry", "a2"),
                           detail::require_number(jg, "config.geometry", "l")};
        if (!(0 < g.a1 && g.a1 < g.a2 && g.l > 0))
            throw ConfigError("config.geometry: need 0 < a1 < a2 and l > 0");
        cfg.geometry = g;
    } else if (type == "conical_tube") {
        detail::reject_unknown(jg, "config.geometry", {"type", "a1", "a2", "a3", "a4", "l"});
        ConicalTubeGeom g{detail::require_number(jg, "config.geometry", "a1"),
                          detail::require_number(jg, "config.geometry", "a2"),
                          detail::require_number(jg, "config.geometry", "a3"),
                          detail::require_number(jg, "config.geometry", "a4"),
                          detail::require_number(jg, "config.geometry", "l")};
        if (!(0 < g.a1 && g.a1 < g.a2 && 0 < g.a3 && g.a3 < g.a4 && g.l > 0))
            throw ConfigError("config.geometry: need 0 < a1 < a2, 0 < a3 < a4, l > 0");
        cfg.geometry = g;
    } else if (type == "spherical_shell") {
        detail::reject_unknown(jg, "config.geometry", {"type", "a1", "a2"});
        SphericalShellGeom g{detail::require_number(jg, "config.geometry", "a1"),
                             detail::require_number(jg, "config.geometry", "a2")};
        if (!(0 < g.a1 && g.a1 < g.a2))
            throw ConfigError("config.geometry: need 0 < a1 < a2");
        cfg.geometry = g;
    } else {
        throw ConfigError("config.geometry.type: unknown geometry '" + type + "'");
    }

    if (!j.contains("material") || !j["material"].is_object())
        throw ConfigError("config.material: missing or not an object");
    const json& jm = j["material"];
    detail::reject_unknown(jm, "config.material", {"sigma", "mu_r"});
    cfg.material.sigma = detail::require_number(jm, "config.material", "sigma");
    cfg.material.mu_r = detail::require_number(jm, "config.material", "mu_r");
    if (cfg.material.sigma < 0) throw ConfigError("config.material.sigma: must be >= 0");
    if (!(cfg.material.mu_r > 0)) throw ConfigError("config.material.mu_r: must be > 0");

    if (!j.contains("coil") || !j["coil"].is_object())
        throw ConfigError("config.coil: missing or not an object");
    const json& jc = j["coil"];
    detail::reject_unknown(jc, "config.coil", {"r1", "r2", "h", "turns", "z0", "current"});
    cfg.coil.r1 = detail::require_number(jc, "config.coil", "r1");
    cfg.coil.r2 = detail::require_number(jc, "config.coil", "r2");
    cfg.coil.h = detail::require_number(jc, "config.coil", "h");
    cfg.coil.turns = detail::require_int(jc, "config.coil", "turns");
    cfg.coil.z0 = detail::require_number(jc, "config.coil", "z0");
    cfg.coil.current = jc.contains("current")
                           ? detail::require_number(jc, "config.coil", "current")
                           : 1.0;
    try {
        cfg.coil.validate();
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config.coil: ") + e.what());
    }

    if (j.contains("frequencies")) {
        if (!j["frequencies"].is_array() || j["frequencies"].empty())
            throw ConfigError("config.frequencies: expected a non-empty array");
        for (const auto& v : j["frequencies"]) {
            if (!v.is_number() || !(v.get<double>() > 0))
                throw ConfigError("config.frequencies: entries must be positive numbers");
            cfg.frequencies.push_back(v.get<double>());
        }
    } else {
        cfg.frequencies = default_frequency_grid();
    }

    cfg.n_s = j.contains("n_s") ? detail::require_int(j, "config", "n_s") : 80;
    if (cfg.n_s < 4) throw ConfigError("config.n_s: must be >= 4");
    cfg.order = j.contains("order") ? detail::require_int(j, "config", "order") : 1;
    if (cfg.order != 1 && cfg.order != 2) throw ConfigError("config.order: must be 1 or 2");

    if (j.contains("quadrature")) {
        const json& jq = j["quadrature"];
        if (!jq.is_object()) throw ConfigError("config.quadrature: expected an object");
        detail::reject_unknown(jq, "config.quadrature",
                               {"n_singular", "n_regular", "n_near_cell", "graded_p"});
        if (jq.contains("n_singular"))
            cfg.quadrature.n_singular = detail::require_int(jq, "config.quadrature", "n_singular");
        if (jq.contains("n_regular"))
            cfg.quadrature.n_regular = detail::require_int(jq, "config.quadrature", "n_regular");
        if (jq.contains("n_near_cell"))
            cfg.quadrature.n_near_cell = detail::require_int(jq, "config.quadrature", "n_near_cell");
        if (jq.contains("graded_p"))
            cfg.quadrature.graded_p = detail::require_number(jq, "config.quadrature", "graded_p");
        try {
            cfg.quadrature.validate();
        } catch (const std::exception& e) {
            throw ConfigError(std::string("config.quadrature: ") + e.what());
        }
    }

    if (j.contains("L0")) {
        const double v = detail::require_number(j, "config", "L0");
        if (!(v > 0)) throw ConfigError("config.L0: must be positive");
        cfg.L0 = v;
    }
    if (j.contains("note")) {
        if (!j["note"].is_string()) throw ConfigError("config.note: expected a string");
        cfg.note = j["note"].get<std::string>();
    }
    return cfg;
}

inline std::string serialize_config(const RunConfig& cfg) {
    using nlohmann::json;
    json j;
    if (std::holds_alternative<CylinderTubeGeom>(cfg.geometry)) {
        const auto& g = std::get<CylinderTubeGeom>(cfg.geometry);
        j["geometry"] = {{"type", "cylinder_tube"}, {"a1", g.a1}, {"a2", g.a2}, {"l", g.l}};
    } else if (std::holds_alternative<ConicalTubeGeom>(cfg.geometry)) {
        const auto& g = std::get<ConicalTubeGeom>(cfg.geometry);
        j["geometry"] = {{"type", "conical_tube"}, {"a1", g.a1}, {"a2", g.a2},
                         {"a3", g.a3},            {"a4", g.a4}, {"l", g.l}};
    } else {
        const auto& g = std::get<SphericalShellGeom>(cfg.geometry);
        j["geometry"] = {{"type", "spherical_shell"}, {"a1", g.a1}, {"a2", g.a2}};
    }
    j["material"] = {{"sigma", cfg.material.sigma}, {"mu_r", cfg.material.mu_r}};
    j["coil"] = {{"r1", cfg.coil.r1}, {"r2", cfg.coil.r2},   {"h", cfg.coil.h},
                 {"turns", cfg.coil.turns}, {"z0", cfg.coil.z0}, {"current", cfg.coil.current}};
    j["frequencies"] = cfg.frequencies;
    j["n_s"] = cfg.n_s;
    j["order"] = cfg.order;
    j["quadrature"] = {{"n_singular", cfg.quadrature.n_singular},
                       {"n_regular", cfg.quadrature.n_regular},
                       {"n_near_cell", cfg.quadrature.n_near_cell},
                       {"graded_p", cfg.quadrature.graded_p}};
    if (cfg.L0) j["L0"] = *cfg.L0;
    if (!cfg.note.empty()) j["note"] = cfg.note;
    return j.dump(2);
}

inline MeridianMesh build_mesh(const RunConfig& cfg, int n_s, int order) {
    if (std::holds_alternative<CylinderTubeGeom>(cfg.geometry)) {
        const auto& g = std::get<CylinderTubeGeom>(cfg.geometry);
        return build_cylinder_tube(g.a1, g.a2, g.l, n_s, order);
    }
    if (std::holds_alternative<ConicalTubeGeom>(cfg.geometry)) {
        const auto& g = std::get<ConicalTubeGeom>(cfg.geometry);
        return build_conical_tube(g.a1, g.a2, g.a3, g.a4, g.l, n_s, order);
    }
    const auto& g = std::get<SphericalShellGeom>(cfg.geometry);
    return build_spherical_shell(g.a1, g.a2, n_s, order);
}

inline MeridianMesh build_mesh(const RunConfig& cfg) {
    return build_mesh(cfg, cfg.n_s, cfg.order);
}

}  // namespace axibem
