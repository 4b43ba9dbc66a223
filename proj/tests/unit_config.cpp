#include "axibem/config.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <string>

using namespace axibem;

namespace {

const std::string tube_json = R"({
  "geometry": {"type": "cylinder_tube", "a1": 0.009, "a2": 0.011, "l": 0.024},
  "material": {"sigma": 1.37e6, "mu_r": 1.021},
  "coil": {"r1": 0.007, "r2": 0.0085, "h": 0.002, "turns": 500, "z0": 0.005},
  "frequencies": [100, 1000, 10000],
  "n_s": 40,
  "order": 1,
  "L0": 4.7405622e-3,
  "note": "example"
})";

}  // namespace

TEST_CASE("config parsing and round trip", "[config]") {
    const RunConfig cfg = parse_config(tube_json);
    CHECK(std::get<CylinderTubeGeom>(cfg.geometry).a2 == 0.011);
    CHECK(cfg.material.mu_r == 1.021);
    CHECK(cfg.coil.turns == 500);
    CHECK(cfg.coil.current == 1.0);
    CHECK(cfg.frequencies.size() == 3);
    CHECK(cfg.L0.has_value());

    const RunConfig again = parse_config(serialize_config(cfg));
    CHECK(std::get<CylinderTubeGeom>(again.geometry).a1 ==
          std::get<CylinderTubeGeom>(cfg.geometry).a1);
    CHECK(again.material.sigma == cfg.material.sigma);
    CHECK(again.coil.z0 == cfg.coil.z0);
    CHECK(again.frequencies == cfg.frequencies);
    CHECK(again.n_s == cfg.n_s);
    CHECK(again.order == cfg.order);
    CHECK(again.quadrature.n_singular == cfg.quadrature.n_singular);
    CHECK(again.L0 == cfg.L0);
}

TEST_CASE("default frequency grid", "[config]") {
    const std::string no_freq = R"({
      "geometry": {"type": "spherical_shell", "a1": 0.011, "a2": 0.012},
      "material": {"sigma": 2.9e6, "mu_r": 1.0},
      "coil": {"r1": 0.007, "r2": 0.0085, "h": 0.002, "turns": 500, "z0": 0.0045}
    })";
    const RunConfig cfg = parse_config(no_freq);
    REQUIRE(cfg.frequencies.size() == 20);
    CHECK(cfg.frequencies.front() == Catch::Approx(100.0));
    CHECK(cfg.frequencies.back() == Catch::Approx(1e5));
    CHECK(cfg.n_s == 80);
    CHECK(cfg.order == 1);
    CHECK_FALSE(cfg.L0.has_value());
}

TEST_CASE("config validation messages carry the field", "[config]") {
    auto expect_error = [](const std::string& text, const std::string& needle) {
        try {
            parse_config(text);
            FAIL("expected ConfigError for " + needle);
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).find(needle) != std::string::npos);
        }
    };
    expect_error("not json", "not valid JSON");
    expect_error(R"({"material": {}, "coil": {}})", "config.geometry");
    expect_error(R"({"geometry": {"type": "torus"}, "material": {}, "coil": {}})",
                 "unknown geometry");
    expect_error(R"({"geometry": {"type": "cylinder_tube", "a1": 1, "a2": 2},
                     "material": {}, "coil": {}})",
                 "config.geometry.l");
    expect_error(R"({"geometry": {"type": "cylinder_tube", "a1": 2, "a2": 1, "l": 1},
                     "material": {}, "coil": {}})",
                 "need 0 < a1 < a2");

    const std::string base = R"({
      "geometry": {"type": "cylinder_tube", "a1": 0.009, "a2": 0.011, "l": 0.024},
      "material": {"sigma": %S%, "mu_r": %M%},
      "coil": {"r1": 0.007, "r2": %R2%, "h": 0.002, "turns": 500, "z0": 0}%EXTRA%
    })";
    auto fill = [&](const std::string& s, const std::string& m, const std::string& r2,
                    const std::string& extra) {
        std::string t = base;
        t.replace(t.find("%S%"), 3, s);
        t.replace(t.find("%M%"), 3, m);
        t.replace(t.find("%R2%"), 4, r2);
        t.replace(t.find("%EXTRA%"), 7, extra);
        return t;
    };
    expect_error(fill("-1", "1.0", "0.0085", ""), "config.material.sigma");
    expect_error(fill("1e6", "0", "0.0085", ""), "config.material.mu_r");
    expect_error(fill("1e6", "1.0", "0.004", ""), "config.coil");
    expect_error(fill("1e6", "1.0", "0.0085", R"(, "frequencies": [])"), "config.frequencies");
    expect_error(fill("1e6", "1.0", "0.0085", R"(, "frequencies": [0])"), "config.frequencies");
    expect_error(fill("1e6", "1.0", "0.0085", R"(, "order": 3)"), "config.order");
    expect_error(fill("1e6", "1.0", "0.0085", R"(, "n_s": 2)"), "config.n_s");
    expect_error(fill("1e6", "1.0", "0.0085", R"(, "bogus": 1)"), "config.bogus");
    expect_error(fill("1e6", "1.0", "0.0085", R"(, "quadrature": {"n_singular": 500})"),
                 "config.quadrature");
}

TEST_CASE("mesh construction from config", "[config]") {
    const RunConfig cfg = parse_config(tube_json);
    const MeridianMesh mesh = build_mesh(cfg);
    CHECK(mesh.n_elements() == 40);
    const MeridianMesh p2 = build_mesh(cfg, 16, 2);
    CHECK(p2.n_elements() == 16);
    CHECK(p2.order == 2);
}
