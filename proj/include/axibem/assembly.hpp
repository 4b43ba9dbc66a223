#pragma once

// Galerkin assembly of the discrete boundary operators: mass matrix,
// single- and double-layer operators for the Laplace and Helmholtz
// kernels, the permeability coupling matrix, the excitation vector,
// and the 2N x 2N block system coupling the air- and conductor-side
// boundary fields.
//
// Element pairs are dispatched by configuration: coincident and
// touching pairs run through the Duffy transforms (only the static
// kernel parts are singular; the smooth Helmholtz remainders use the
// plain tensor rule), close separated pairs use dyadic eta-refinement,
// the rest plain tensor quadrature. All requested operators are filled
// in one sweep over pairs so kernel evaluations are shared.
//
// Pair contributions are accumulated into per-element row buffers and
// reduced in fixed element order, so parallel and serial assembly are
// bitwise identical.

#include "axibem/coilfield.hpp"
#include "axibem/geometry.hpp"
#include "axibem/kernels.hpp"
#include "axibem/quadrature.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <thread>
#include <vector>

namespace axibem {

struct QuadratureConfig {
    int n_singular = 16;          // rule size for coincident/touching transforms
    int n_regular = 12;           // tensor rule for separated pairs and 1D integrals
    int n_near_cell = 20;         // rule per near-singular cell
    double graded_p = 5.0;        // coincident clustering exponent (both directions)
    double near_threshold = 1.0;  // separated-regular if dist >= threshold * max chord
    int near_depth_cap = 6;
    int n_rho_coil = 24;          // radial rule of the coil source integrals

    void validate() const {
        if (n_singular < 2 || n_singular > 128 || n_regular < 2 || n_regular > 128 ||
            n_near_cell < 2 || n_near_cell > 128)
            throw std::domain_error("QuadratureConfig: rule sizes must be in [2,128]");
        if (!(graded_p >= 1.0)) throw std::domain_error("QuadratureConfig: graded_p < 1");
        if (near_depth_cap < 1 || near_depth_cap > 8)
            throw std::domain_error("QuadratureConfig: near_depth_cap must be in [1,8]");
    }
};

struct AssemblyRequest {
    bool V = false;   // Laplace single layer
    bool K = false;   // Laplace double layer
    bool Vk = false;  // Helmholtz single layer
    bool Kk = false;  // Helmholtz double layer
    bool Vs = false;  // permeability coupling (no r_y weight)
    Wavenumber k{};
};

struct OperatorBlocks {
    Eigen::MatrixXcd V, K, Vk, Kk, Vs;
};

struct BlockSystem {
    Eigen::MatrixXcd matrix;  // 2N x 2N, rows: exterior BIE then interior BIE
    Eigen::VectorXcd rhs;     // (f, 0)
    int n = 0;                // number of global basis functions N
};

namespace detail {

struct GeomCache {
    // node coordinates per element for fast repeated evaluation
    struct Elem {
        int order;
        MeridianPoint a, b, m;
        std::array<int, 3> gids;
    };
    std::vector<Elem> elems;

    explicit GeomCache(const MeridianMesh& mesh) {
        elems.reserve(mesh.n_elements());
        for (const auto& el : mesh.elements) {
            Elem e;
            e.order = el.order;
            e.a = mesh.nodes[el.nodes[0]];
            e.b = mesh.nodes[el.nodes[1]];
            e.m = el.order == 2 ? mesh.nodes[el.nodes[2]] : MeridianPoint{};
            e.gids = el.nodes;
            elems.push_back(e);
        }
    }

    struct Frame {
        MeridianPoint p;
        double nr, nz, jac;
        std::array<double, 3> sh;
    };

    Frame eval(int e, double t) const {
        const Elem& el = elems[e];
        Frame f;
        double dr, dz;
        if (el.order == 1) {
            f.sh = {1.0 - t, t, 0.0};
            f.p = {el.a.r + t * (el.b.r - el.a.r), el.a.z + t * (el.b.z - el.a.z)};
            dr = el.b.r - el.a.r;
            dz = el.b.z - el.a.z;
        } else {
            const double ns = 1.0 - 3.0 * t + 2.0 * t * t;
            const double ne = 2.0 * t * t - t;
            const double nm = 4.0 * t * (1.0 - t);
            f.sh = {ns, ne, nm};
            f.p = {ns * el.a.r + ne * el.b.r + nm * el.m.r,
                   ns * el.a.z + ne * el.b.z + nm * el.m.z};
            const double dns = 4.0 * t - 3.0, dne = 4.0 * t - 1.0, dnm = 4.0 - 8.0 * t;
            dr = dns * el.a.r + dne * el.b.r + dnm * el.m.r;
            dz = dns * el.a.z + dne * el.b.z + dnm * el.m.z;
        }
        f.jac = std::hypot(dr, dz);
        f.nr = dz / f.jac;
        f.nz = -dr / f.jac;
        return f;
    }
};

// Local pair accumulator, one 3x3 block per operator.
struct LocalBlocks {
    std::array<std::array<complexd, 3>, 3> V{}, K{}, Vk{}, Kk{}, Vs{};
    void clear() {
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) V[a][b] = K[a][b] = Vk[a][b] = Kk[a][b] = Vs[a][b] = 0.0;
    }
};

enum class KernelRoute { StaticOnly, SmoothOnly, Full };

// Accumulate one quadrature point of pair (e,f) into the local blocks.
inline void accumulate_point(const GeomCache& gc, int e, int f, double xi, double eta,
                             double w, const AssemblyRequest& req, KernelRoute route,
                             LocalBlocks& out, int nloc) {
    const auto gx = gc.eval(e, xi);
    const auto gy = gc.eval(f, eta);
    const double bf = w * gx.jac * gy.jac;
    const double rx = gx.p.r, ry = gy.p.r;

    const bool want_static = route != KernelRoute::SmoothOnly;
    const bool want_smooth =
        route != KernelRoute::StaticOnly && !req.k.is_static() && (req.Vk || req.Kk || req.Vs);
    const bool need_g = req.V || req.Vk || req.Vs;
    const bool need_gn = req.K || req.Kk;

    double G = 0.0, Gn = 0.0;
    if (want_static) {
        if (need_g) G = laplace_kernel(gx.p, gy.p);
        if (need_gn) {
            const auto [dr, dz] = laplace_kernel_grad(gx.p, gy.p);
            Gn = dr * gy.nr + dz * gy.nz;
        }
    }
    complexd Gs = 0.0, Gsn = 0.0;
    if (want_smooth) {
        const Wavenumber kk{req.k};
        const int nphi = default_n_phi(kk, gx.p, gy.p);
        const auto sp = helmholtz_smooth_parts(gx.p, gy.p, req.k.k, nphi,
                                               req.Vk || req.Vs, req.Kk);
        Gs = sp.val;
        Gsn = sp.dr * gy.nr + sp.dz * gy.nz;
    }

    const complexd wV = (G + Gs) * (ry * rx * bf);
    const complexd wK = (Gn + Gsn) * (ry * rx * bf);
    const complexd wVstat = G * (ry * rx * bf);
    const complexd wKstat = Gn * (ry * rx * bf);
    const complexd wVs = (G + Gs) * (gy.nr * rx * bf);

    for (int a = 0; a < nloc; ++a) {
        for (int b = 0; b < nloc; ++b) {
            const double s = gx.sh[a] * gy.sh[b];
            if (req.V) out.V[a][b] += wVstat * s;
            if (req.K) out.K[a][b] += wKstat * s;
            if (req.Vk) out.Vk[a][b] += wV * s;
            if (req.Kk) out.Kk[a][b] += wK * s;
            if (req.Vs) out.Vs[a][b] += wVs * s;
        }
    }
}

struct PairWorkspace {
    std::vector<DuoNode> duos;
    std::vector<CellNode> cells;
};

// Nearest parameter pair on a coarse grid, for the eta refinement.
inline std::pair<double, double> nearest_params(const GeomCache& gc, int e, int f) {
    double best = std::numeric_limits<double>::infinity();
    double bx = 0.5, be = 0.5;
    for (int i = 0; i <= 8; ++i)
        for (int j = 0; j <= 8; ++j) {
            const auto px = gc.eval(e, i / 8.0).p;
            const auto py = gc.eval(f, j / 8.0).p;
            const double d = std::hypot(px.r - py.r, px.z - py.z);
            if (d < best) {
                best = d;
                bx = i / 8.0;
                be = j / 8.0;
            }
        }
    return {bx, be};
}

inline void process_pair(const MeridianMesh& mesh, const GeomCache& gc, int e, int f,
                         const AssemblyRequest& req, const QuadratureConfig& cfg,
                         const QuadRule& rule_sing, const QuadRule& rule_reg,
                         const QuadRule& rule_near, PairWorkspace& ws, LocalBlocks& out) {
    const int nloc = mesh.nodes_per_element();
    out.clear();
    const PairConfig pc = classify_pair(mesh, e, f);
    const bool smooth_wanted = !req.k.is_static() && (req.Vk || req.Kk || req.Vs);

    if (pc.kind == PairKind::Coincident) {
        coincident_duos(rule_sing, cfg.graded_p, cfg.graded_p, ws.duos);
        for (const auto& d : ws.duos) {
            accumulate_point(gc, e, f, d.xi1, d.eta1, d.w, req, KernelRoute::StaticOnly, out, nloc);
            accumulate_point(gc, e, f, d.xi2, d.eta2, d.w, req, KernelRoute::StaticOnly, out, nloc);
        }
        if (smooth_wanted) {
            tensor_cells(rule_reg, ws.cells);
            for (const auto& c : ws.cells)
                accumulate_point(gc, e, f, c.xi, c.eta, c.w, req, KernelRoute::SmoothOnly, out, nloc);
        }
        return;
    }
    if (pc.kind == PairKind::Touching) {
        touching_duos(rule_sing, pc.corner_xi, pc.corner_eta, ws.duos);
        for (const auto& d : ws.duos) {
            accumulate_point(gc, e, f, d.xi1, d.eta1, d.w, req, KernelRoute::StaticOnly, out, nloc);
            accumulate_point(gc, e, f, d.xi2, d.eta2, d.w, req, KernelRoute::StaticOnly, out, nloc);
        }
        if (smooth_wanted) {
            tensor_cells(rule_reg, ws.cells);
            for (const auto& c : ws.cells)
                accumulate_point(gc, e, f, c.xi, c.eta, c.w, req, KernelRoute::SmoothOnly, out, nloc);
        }
        return;
    }
    // separated
    if (pc.distance_ratio >= cfg.near_threshold) {
        tensor_cells(rule_reg, ws.cells);
    } else {
        const auto [xs, es] = nearest_params(gc, e, f);
        (void)xs;
        int depth = static_cast<int>(std::ceil(std::log2(1.0 / pc.distance_ratio)));
        depth = std::max(1, std::min(cfg.near_depth_cap, depth));
        near_cells(rule_near, es, depth, ws.cells);
    }
    for (const auto& c : ws.cells)
        accumulate_point(gc, e, f, c.xi, c.eta, c.w, req, KernelRoute::Full, out, nloc);
}

}  // namespace detail

// Assemble all requested boundary operators in one sweep over element
// pairs. Deterministic for any thread count.
inline OperatorBlocks assemble_operators(const MeridianMesh& mesh, const AssemblyRequest& req,
                                         const QuadratureConfig& cfg = {}, int n_threads = 1) {
    cfg.validate();
    const int N = mesh.n_nodes();
    const int ne = mesh.n_elements();
    const int nloc = mesh.nodes_per_element();
    const detail::GeomCache gc(mesh);
    const QuadRule rule_sing = gauss_legendre_01(cfg.n_singular);
    const QuadRule rule_reg = gauss_legendre_01(cfg.n_regular);
    const QuadRule rule_near = gauss_legendre_01(cfg.n_near_cell);

    const int ops = 5;
    // per-element row buffers: rows e*nloc+a, columns = global dofs
    std::array<Eigen::MatrixXcd, 5> buf;
    const bool want[5] = {req.V, req.K, req.Vk, req.Kk, req.Vs};
    for (int o = 0; o < ops; ++o)
        if (want[o]) buf[o] = Eigen::MatrixXcd::Zero(ne * nloc, N);

    if (n_threads < 1) n_threads = 1;
    auto worker = [&](int e_begin, int e_end) {
        detail::PairWorkspace ws;
        detail::LocalBlocks lb;
        for (int e = e_begin; e < e_end; ++e) {
            for (int f = 0; f < ne; ++f) {
                detail::process_pair(mesh, gc, e, f, req, cfg, rule_sing, rule_reg,
                                     rule_near, ws, lb);
                for (int a = 0; a < nloc; ++a) {
                    const int row = e * nloc + a;
                    for (int b = 0; b < nloc; ++b) {
                        const int col = gc.elems[f].gids[b];
                        if (req.V) buf[0](row, col) += lb.V[a][b];
                        if (req.K) buf[1](row, col) += lb.K[a][b];
                        if (req.Vk) buf[2](row, col) += lb.Vk[a][b];
                        if (req.Kk) buf[3](row, col) += lb.Kk[a][b];
                        if (req.Vs) buf[4](row, col) += lb.Vs[a][b];
                    }
                }
            }
        }
    };
    if (n_threads == 1 || ne < 2 * n_threads) {
        worker(0, ne);
    } else {
        std::vector<std::thread> pool;
        const int chunk = (ne + n_threads - 1) / n_threads;
        for (int t = 0; t < n_threads; ++t) {
            const int b = t * chunk, e = std::min(ne, b + chunk);
            if (b < e) pool.emplace_back(worker, b, e);
        }
        for (auto& th : pool) th.join();
    }

    OperatorBlocks out;
    Eigen::MatrixXcd* mats[5] = {&out.V, &out.K, &out.Vk, &out.Kk, &out.Vs};
    for (int o = 0; o < ops; ++o) {
        if (!want[o]) continue;
        *mats[o] = Eigen::MatrixXcd::Zero(N, N);
        for (int e = 0; e < ne; ++e)
            for (int a = 0; a < nloc; ++a)
                mats[o]->row(gc.elems[e].gids[a]) += buf[o].row(e * nloc + a);
    }
    return out;
}

// M_ij = 1/2 int phi_i phi_j r ds, symmetric positive semidefinite.
inline Eigen::MatrixXd assemble_mass(const MeridianMesh& mesh,
                                     const QuadratureConfig& cfg = {}) {
    cfg.validate();
    const int N = mesh.n_nodes();
    const int nloc = mesh.nodes_per_element();
    const QuadRule q = gauss_legendre_01(cfg.n_regular);
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(N, N);
    for (int e = 0; e < mesh.n_elements(); ++e) {
        for (int i = 0; i < q.size(); ++i) {
            const auto g = eval_element(mesh, e, q.nodes[i]);
            const double w = 0.5 * q.weights[i] * g.jacobian * g.point.r;
            for (int a = 0; a < nloc; ++a)
                for (int b = 0; b < nloc; ++b)
                    M(mesh.elements[e].nodes[a], mesh.elements[e].nodes[b]) +=
                        w * g.shapes[a] * g.shapes[b];
        }
    }
    // enforce exact symmetry of the accumulated products
    return 0.5 * (M + M.transpose());
}

// Single-layer operator; k = 0 selects the Laplace kernel.
inline Eigen::MatrixXcd assemble_single_layer(const MeridianMesh& mesh,
                                              const Wavenumber& k = {},
                                              const QuadratureConfig& cfg = {},
                                              int n_threads = 1) {
    AssemblyRequest req;
    req.k = k;
    if (k.is_static())
        req.V = true;
    else
        req.Vk = true;
    auto blocks = assemble_operators(mesh, req, cfg, n_threads);
    return k.is_static() ? std::move(blocks.V) : std::move(blocks.Vk);
}

// Double-layer operator (normal derivative at the source point).
inline Eigen::MatrixXcd assemble_double_layer(const MeridianMesh& mesh,
                                              const Wavenumber& k = {},
                                              const QuadratureConfig& cfg = {},
                                              int n_threads = 1) {
    AssemblyRequest req;
    req.k = k;
    if (k.is_static())
        req.K = true;
    else
        req.Kk = true;
    auto blocks = assemble_operators(mesh, req, cfg, n_threads);
    return k.is_static() ? std::move(blocks.K) : std::move(blocks.Kk);
}

// Coupling matrix V_s: integrand phi_i n_r(y) G_k phi_j with the
// x-side r weight only.
inline Eigen::MatrixXcd assemble_vs(const MeridianMesh& mesh, const Wavenumber& k,
                                    const QuadratureConfig& cfg = {}, int n_threads = 1) {
    AssemblyRequest req;
    req.k = k;
    req.Vs = true;
    return std::move(assemble_operators(mesh, req, cfg, n_threads).Vs);
}

// Excitation vector f_i = int phi_i u^(e) r ds.
inline Eigen::VectorXcd assemble_rhs(const MeridianMesh& mesh, const CoilSpec& coil,
                                     const QuadratureConfig& cfg = {}) {
    cfg.validate();
    coil.validate();
    const int nloc = mesh.nodes_per_element();
    const QuadRule q = gauss_legendre_01(cfg.n_regular);
    Eigen::VectorXcd f = Eigen::VectorXcd::Zero(mesh.n_nodes());
    for (int e = 0; e < mesh.n_elements(); ++e) {
        for (int i = 0; i < q.size(); ++i) {
            const auto g = eval_element(mesh, e, q.nodes[i]);
            const double ue = source_potential(coil, g.point, cfg.n_rho_coil);
            const double w = q.weights[i] * g.jacobian * g.point.r * ue;
            for (int a = 0; a < nloc; ++a)
                f(mesh.elements[e].nodes[a]) += w * g.shapes[a];
        }
    }
    return f;
}

// The coupled 2N x 2N system acting on (u1, q1):
//   [ M - K                     V        ] [u1]   [f]
//   [ M + Kk - (mu_r-1) Vs   -mu_r Vk    ] [q1] = [0]
// An empty Vs is accepted as zero (it only enters scaled by mu_r - 1).
inline BlockSystem build_block_system(const Eigen::MatrixXd& M, const Eigen::MatrixXcd& V,
                                      const Eigen::MatrixXcd& K, const Eigen::MatrixXcd& Vk,
                                      const Eigen::MatrixXcd& Kk, const Eigen::MatrixXcd& Vs,
                                      double mu_r, const Eigen::VectorXcd& f) {
    const int N = static_cast<int>(M.rows());
    auto check = [&](const Eigen::MatrixXcd& A, const char* name) {
        if (A.rows() != N || A.cols() != N)
            throw std::invalid_argument(std::string("build_block_system: bad size of ") + name);
    };
    if (M.cols() != N) throw std::invalid_argument("build_block_system: M not square");
    check(V, "V");
    check(K, "K");
    check(Vk, "Vk");
    check(Kk, "Kk");
    const bool have_vs = Vs.size() != 0;
    if (have_vs) check(Vs, "Vs");
    if (!have_vs && mu_r != 1.0)
        throw std::invalid_argument("build_block_system: Vs required when mu_r != 1");
    if (f.size() != N) throw std::invalid_argument("build_block_system: bad rhs size");

    BlockSystem sys;
    sys.n = N;
    sys.matrix.resize(2 * N, 2 * N);
    const Eigen::MatrixXcd Mc = M.cast<complexd>();
    sys.matrix.topLeftCorner(N, N) = Mc - K;
    sys.matrix.topRightCorner(N, N) = V;
    sys.matrix.bottomLeftCorner(N, N) = Mc + Kk;
    if (have_vs && mu_r != 1.0)
        sys.matrix.bottomLeftCorner(N, N) -= (mu_r - 1.0) * Vs;
    sys.matrix.bottomRightCorner(N, N) = -mu_r * Vk;
    sys.rhs = Eigen::VectorXcd::Zero(2 * N);
    sys.rhs.head(N) = f;
    if (!sys.matrix.allFinite() || !sys.rhs.allFinite())
        throw std::runtime_error("build_block_system: non-finite entries after assembly");
    return sys;
}

}  // namespace axibem
