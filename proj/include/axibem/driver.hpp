#pragma once

// Run drivers behind the command-line tool: frequency sweeps,
// mesh-convergence studies against an internal fine-P2 reference, and
// the numerical self-test. CSV output is full-precision so runs can be
// diffed for regressions.

#include "axibem/config.hpp"
#include "axibem/detail/adaptive.hpp"
#include "axibem/solver.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

namespace axibem {

struct SweepRow {
    SweepResult result;
    double residual = 0.0;
    bool ok = false;
    std::string error;
};

namespace detail {

inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct StaticParts {
    MeridianMesh mesh;
    Eigen::MatrixXd M;
    Eigen::MatrixXcd V, K;
    Eigen::VectorXcd f;
    double L0 = 0.0;
};

inline StaticParts assemble_static(const RunConfig& cfg, int n_s, int order, int threads) {
    StaticParts sp;
    sp.mesh = build_mesh(cfg, n_s, order);
    sp.M = assemble_mass(sp.mesh, cfg.quadrature);
    AssemblyRequest req;
    req.V = true;
    req.K = true;
    auto ops = assemble_operators(sp.mesh, req, cfg.quadrature, threads);
    sp.V = std::move(ops.V);
    sp.K = std::move(ops.K);
    sp.f = assemble_rhs(sp.mesh, cfg.coil, cfg.quadrature);
    sp.L0 = cfg.L0 ? *cfg.L0 : self_inductance(cfg.coil, 64);
    return sp;
}

inline SweepRow solve_frequency(const RunConfig& cfg, const StaticParts& sp, double freq,
                                int threads) {
    SweepRow row;
    row.result.frequency = freq;
    try {
        const double omega = 2.0 * pi * freq;
        const Wavenumber k =
            Wavenumber::from_frequency(freq, cfg.material.mu_r, cfg.material.sigma);
        AssemblyRequest req;
        req.k = k;
        req.Vk = true;
        req.Kk = true;
        req.Vs = cfg.material.mu_r != 1.0;
        auto ops = assemble_operators(sp.mesh, req, cfg.quadrature, threads);
        const BlockSystem sys = build_block_system(sp.M, sp.V, sp.K, ops.Vk, ops.Kk,
                                                   ops.Vs, cfg.material.mu_r, sp.f);
        const DenseSolution sol = solve_dense(sys);
        row.residual = sol.residual;
        row.result.delta_z = impedance_change(sp.mesh, cfg.coil, sol.u1, sol.q1,
                                              cfg.quadrature.n_regular, omega,
                                              cfg.quadrature.n_rho_coil);
        const auto [dr, dx] = normalize(row.result.delta_z, omega, sp.L0);
        row.result.dR_over_X0 = dr;
        row.result.dX_over_X0 = dx;
        row.ok = true;
    } catch (const std::exception& e) {
        row.ok = false;
        row.error = e.what();
        row.residual = std::nan("");
        row.result.delta_z = {std::nan(""), std::nan("")};
        row.result.dR_over_X0 = row.result.dX_over_X0 = std::nan("");
    }
    return row;
}

}  // namespace detail

// Frequency sweep: static operators are assembled once, each frequency
// adds its Helmholtz operators, solve and reciprocity integral.
// Frequencies are dispatched to a small worker pool; rows come back in
// input order. Solver failures mark their row and do not abort.
inline std::vector<SweepRow> run_sweep(const RunConfig& cfg, int threads = 1) {
    if (threads < 1) threads = 1;
    const int nf = static_cast<int>(cfg.frequencies.size());
    const int outer = std::max(1, std::min(threads, nf));
    const int inner = std::max(1, threads / outer);
    const detail::StaticParts sp = detail::assemble_static(cfg, cfg.n_s, cfg.order, threads);
    std::vector<SweepRow> rows(nf);
    std::atomic<int> next{0};
    auto work = [&] {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= nf) return;
            rows[i] = detail::solve_frequency(cfg, sp, cfg.frequencies[i], inner);
        }
    };
    if (outer == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < outer; ++t) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }
    return rows;
}

inline void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
    os << "frequency_hz,dR_re_ohm,dX_im_ohm,dR_over_X0,dX_over_X0,residual\n";
    for (const auto& row : rows) {
        os << detail::fmt17(row.result.frequency) << ','
           << detail::fmt17(row.result.delta_z.real()) << ','
           << detail::fmt17(row.result.delta_z.imag()) << ','
           << detail::fmt17(row.result.dR_over_X0) << ','
           << detail::fmt17(row.result.dX_over_X0) << ','
           << detail::fmt17(row.residual) << '\n';
    }
}

struct ConvergenceLevel {
    int n_s = 0;
    int order = 1;
    std::vector<SweepResult> per_frequency;
    double eps_R = 0.0, eps_X = 0.0;       // l2 relative errors vs the reference
    double rate_R = std::nan("");          // observed order vs previous level
    double rate_X = std::nan("");
    double wall_s = 0.0;
};

struct ConvergenceReport {
    std::vector<ConvergenceLevel> levels;
    std::vector<SweepResult> reference;  // finest P2 run
    int reference_n_s = 0;
};

// Mesh-convergence study: each level runs the configured sweep; the
// reference is a quadratic-element run at twice the finest level.
inline ConvergenceReport run_convergence(const RunConfig& cfg, std::vector<int> levels,
                                         int threads = 1) {
    if (levels.size() < 1) throw std::invalid_argument("run_convergence: no levels");
    std::sort(levels.begin(), levels.end());
    ConvergenceReport rep;
    rep.reference_n_s = 2 * levels.back();

    auto run_at = [&](int n_s, int order) {
        RunConfig c = cfg;
        c.n_s = n_s;
        c.order = order;
        std::vector<SweepResult> out;
        for (const auto& row : run_sweep(c, threads)) {
            if (!row.ok)
                throw std::runtime_error("convergence level n_s=" + std::to_string(n_s) +
                                         " failed: " + row.error);
            out.push_back(row.result);
        }
        return out;
    };
    rep.reference = run_at(rep.reference_n_s, 2);

    auto l2 = [](const std::vector<double>& v) {
        double s = 0.0;
        for (double x : v) s += x * x;
        return std::sqrt(s);
    };
    for (int n_s : levels) {
        ConvergenceLevel lvl;
        lvl.n_s = n_s;
        lvl.order = cfg.order;
        const auto t0 = std::chrono::steady_clock::now();
        lvl.per_frequency = run_at(n_s, cfg.order);
        lvl.wall_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::vector<double> dR, dX, rR, rX;
        for (size_t i = 0; i < rep.reference.size(); ++i) {
            dR.push_back(lvl.per_frequency[i].dR_over_X0 - rep.reference[i].dR_over_X0);
            dX.push_back(lvl.per_frequency[i].dX_over_X0 - rep.reference[i].dX_over_X0);
            rR.push_back(rep.reference[i].dR_over_X0);
            rX.push_back(rep.reference[i].dX_over_X0);
        }
        lvl.eps_R = l2(dR) / l2(rR);
        lvl.eps_X = l2(dX) / l2(rX);
        if (!rep.levels.empty()) {
            const auto& prev = rep.levels.back();
            const double span = std::log2(static_cast<double>(lvl.n_s) / prev.n_s);
            lvl.rate_R = std::log2(prev.eps_R / lvl.eps_R) / span;
            lvl.rate_X = std::log2(prev.eps_X / lvl.eps_X) / span;
        }
        rep.levels.push_back(std::move(lvl));
    }
    return rep;
}

inline void write_convergence_csv(std::ostream& os, const ConvergenceReport& rep) {
    os << "# reference: n_s=" << rep.reference_n_s << " order=2\n";
    os << "n_s,order,dZ_re_f0_ohm,dZ_im_f0_ohm,eps_R,eps_X,rate_R,rate_X,wall_s\n";
    for (const auto& lvl : rep.levels) {
        os << lvl.n_s << ',' << lvl.order << ','
           << detail::fmt17(lvl.per_frequency.front().delta_z.real()) << ','
           << detail::fmt17(lvl.per_frequency.front().delta_z.imag()) << ','
           << detail::fmt17(lvl.eps_R) << ',' << detail::fmt17(lvl.eps_X) << ','
           << detail::fmt17(lvl.rate_R) << ',' << detail::fmt17(lvl.rate_X) << ','
           << detail::fmt17(lvl.wall_s) << '\n';
    }
}

namespace detail {

struct SelfTest {
    std::ostream& os;
    int failures = 0;

    void check(const std::string& name, double measured, double bound) {
        const bool pass = std::isfinite(measured) && measured <= bound;
        os << (pass ? "PASS  " : "FAIL  ") << name << "  (measured " << measured
           << ", bound " << bound << ")\n";
        if (!pass) ++failures;
    }
};

}  // namespace detail

// Numerical self-test: the Cauchy-integral table, rule sanity, model
// integrals of the pair transforms, kernel checks against adaptive
// angular quadrature, coil-field identities, and the endpoint
// stability ratio of the clustered rule. Returns 0 when everything
// passes.
inline int run_selftest(std::ostream& os) {
    detail::SelfTest t{os};

    // Cauchy principal-value benchmark: nodes cluster as v = w^3
    {
        auto f = [](double xi, double eta) {
            return xi * xi * xi * (1.0 - eta * eta * eta) / (eta - xi);
        };
        const double exact = -11.0 / 24.0;
        const int sizes[] = {4, 6, 8, 10, 12, 16, 20, 24, 32};
        for (int n : sizes) {
            const double err =
                std::abs(duffy_coincident(f, gauss_legendre_01(n), 3.0, 1.0) - exact);
            if (n == 4) {
                t.check("cauchy benchmark n=4 |err-1.70068e-5|/1.70068e-5",
                        std::abs(err - 1.70068027e-5) / 1.70068027e-5, 0.10);
            } else {
                t.check("cauchy benchmark n=" + std::to_string(n), err,
                        n == 6 ? 1e-15 : 1e-14);
            }
        }
    }
    // rule sanity (extended-precision accumulation isolates the rule
    // error from the summation order)
    {
        const QuadRule q = gauss_legendre_01(16);
        long double s = -1.0L, mono = -1.0L / 16.0L;
        for (int i = 0; i < q.size(); ++i) {
            s += q.weights[i];
            mono += (long double)q.weights[i] * std::pow((long double)q.nodes[i], 15);
        }
        t.check("rule n=16 weight sum", std::abs((double)s), 1e-14);
        t.check("rule n=16 t^15 moment", std::abs((double)mono), 1e-15);
    }
    // model integrals
    {
        const QuadRule q16 = gauss_legendre_01(16);
        const QuadRule q24 = gauss_legendre_01(24);
        auto fsym = [](double xi, double eta) {
            return (1.0 + xi * eta + xi * xi * eta * eta) / (xi - eta);
        };
        t.check("pv symmetric-F null", std::abs(duffy_coincident(fsym, q16)), 1e-13);
        auto flog = [](double xi, double eta) { return std::log(std::abs(xi - eta)); };
        t.check("log coincident -3/2",
                std::abs(duffy_coincident(flog, q24, 6.0, 6.0) + 1.5), 1e-12);
        auto ftc = [](double xi, double eta) { return 1.0 / ((1.0 - xi) + eta); };
        auto ftl = [](double xi, double eta) { return std::log((1.0 - xi) + eta); };
        const double l2v = 2.0 * std::log(2.0);
        t.check("touching cauchy 2ln2", std::abs(duffy_touching(ftc, q16) - l2v), 1e-11);
        t.check("touching log 2ln2-3/2",
                std::abs(duffy_touching(ftl, q16) - (l2v - 1.5)), 1e-11);
    }
    // special functions
    {
        const auto [K, E] = complete_elliptic(0.5);
        t.check("K(0.5)", std::abs(K - 1.8540746773013719), 1e-14);
        t.check("E(0.5)", std::abs(E - 1.3506438810476755), 1e-14);
        double worst = 0.0;
        for (int i = 1; i <= 20; ++i) {
            const double m = i / 21.0;
            const auto a = complete_elliptic(m);
            const auto b = complete_elliptic(1.0 - m);
            worst = std::max(worst, std::abs(a.E * b.K + b.E * a.K - a.K * b.K - 0.5 * pi));
        }
        t.check("legendre relation", worst, 1e-13);
        const auto zs = bessel_j0_zeros(4);
        double wz = 0.0;
        for (double z : zs) wz = std::max(wz, std::abs(bessel_j(0, z)));
        t.check("bessel j0 zero residuals", wz, 1e-12);
        t.check("heuman endpoint", std::abs(heuman_lambda(0.5 * pi, 0.4) - 1.0), 1e-12);
    }
    // kernels vs adaptive angular quadrature
    {
        const MeridianPoint pts[][2] = {{{0.012, 0.003}, {0.009, -0.002}},
                                        {{0.02, 0.0}, {0.011, 0.004}},
                                        {{0.008, -0.005}, {0.015, 0.006}}};
        const Wavenumber kw{complexd(50.0, -50.0)};
        double worst_l = 0.0, worst_h = 0.0;
        for (const auto& p : pts) {
            const auto& x = p[0];
            const auto& y = p[1];
            auto Rphi = [&](double phi) {
                const double s = std::sin(0.5 * phi);
                return std::sqrt((x.r - y.r) * (x.r - y.r) + (x.z - y.z) * (x.z - y.z) +
                                 4.0 * x.r * y.r * s * s);
            };
            const double oracle_l = detail::adaptive_integrate(
                                        [&](double phi) { return std::cos(phi) / Rphi(phi); },
                                        0.0, pi, 1e-13) /
                                    (2.0 * pi);
            worst_l = std::max(worst_l,
                               std::abs(laplace_kernel(x, y) - oracle_l) / std::abs(oracle_l));
            const complexd oracle_h =
                detail::adaptive_integrate(
                    [&](double phi) {
                        return std::exp(complexd(0.0, -1.0) * kw.k * Rphi(phi)) *
                               std::cos(phi) / Rphi(phi);
                    },
                    0.0, pi, 1e-13) /
                (2.0 * pi);
            const complexd got = helmholtz_kernel(x, y, kw, default_n_phi(kw, x, y));
            worst_h = std::max(worst_h, std::abs(got - oracle_h) / std::abs(oracle_h));
        }
        t.check("laplace kernel vs angular oracle", worst_l, 1e-11);
        t.check("helmholtz kernel vs angular oracle", worst_h, 1e-9);
    }
    // coil-field identities
    {
        CoilSpec coil{0.007, 0.0085, 0.002, 500, 0.0, 1.0};
        const double hh = 1e-6;
        double worst = 0.0;
        const MeridianPoint probe_pts[] = {{0.005, 0.004}, {0.012, -0.003}, {0.0078, 0.0031}};
        for (const auto& p : probe_pts) {
            const double dAdz = (source_potential(coil, {p.r, p.z + hh}) -
                                 source_potential(coil, {p.r, p.z - hh})) /
                                (2.0 * hh);
            worst = std::max(worst, std::abs(dAdz + source_br(coil, p)));
            const double drA = ((p.r + hh) * source_potential(coil, {p.r + hh, p.z}) -
                                (p.r - hh) * source_potential(coil, {p.r - hh, p.z})) /
                               (2.0 * hh * p.r);
            worst = std::max(worst, std::abs(drA - source_bz(coil, p)));
        }
        t.check("coil field-potential identities (FD)", worst, 1e-6);
        double bworst = 0.0;
        for (double r : {0.004, 0.0078, 0.011}) {
            const double am = source_potential(coil, {r, coil.z0 + coil.h - 1e-12});
            const double ap = source_potential(coil, {r, coil.z0 + coil.h + 1e-12});
            bworst = std::max(bworst, std::abs(am - ap) / std::abs(ap));
        }
        t.check("coil branch continuity at |zeta| = h", bworst, 1e-8);
    }
    // endpoint stability of the clustered rule
    {
        const auto zs = bessel_j0_zeros(1);
        const double j01 = zs[0];
        const double target = 8.0 / (j01 * j01 * std::pow(bessel_j(1, j01), 2));
        double worst = 0.0;
        for (int n : {10, 20, 40, 80}) {
            const QuadRule q = gauss_legendre_01(n);
            // weights on [0,1] carry a factor 1/2 relative to [-1,1]
            const double ratio = 2.0 * q.weights[0] / q.nodes[0];
            worst = std::max(worst, std::abs(ratio / target - 1.0));
        }
        t.check("endpoint weight/node ratio vs bessel constant", worst, 0.02);
    }

    os << (t.failures == 0 ? "SELFTEST PASS" : "SELFTEST FAIL") << " (" << t.failures
       << " failures)\n";
    return t.failures == 0 ? 0 : 1;
}

}  // namespace axibem
