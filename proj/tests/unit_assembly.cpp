#include "axibem/assembly.hpp"

#include "support/pair_oracle.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

using namespace axibem;

namespace {

MeridianMesh straight_mesh(std::initializer_list<MeridianPoint> pts) {
    MeridianMesh mesh;
    mesh.order = 1;
    mesh.nodes = pts;
    for (int i = 0; i + 1 < static_cast<int>(mesh.nodes.size()); ++i) {
        Element el;
        el.order = 1;
        el.nodes = {i, i + 1, -1};
        mesh.elements.push_back(el);
    }
    return mesh;
}

double max_abs(const Eigen::MatrixXcd& A) { return A.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("mass matrix", "[assembly]") {
    SECTION("single straight element at constant radius") {
        const double R = 0.75, L = 0.2;
        const MeridianMesh mesh = straight_mesh({{R, 0.0}, {R, L}});
        const Eigen::MatrixXd M = assemble_mass(mesh);
        const double s = 0.5 * R * L;
        CHECK(M(0, 0) == Catch::Approx(s / 3.0).epsilon(1e-14));
        CHECK(M(0, 1) == Catch::Approx(s / 6.0).epsilon(1e-14));
        CHECK(M(1, 0) == Catch::Approx(s / 6.0).epsilon(1e-14));
        CHECK(M(1, 1) == Catch::Approx(s / 3.0).epsilon(1e-14));
    }
    const MeridianMesh tube = build_cylinder_tube(0.009, 0.011, 0.024, 16, 2);
    const Eigen::MatrixXd M = assemble_mass(tube);
    SECTION("exact symmetry") { CHECK((M - M.transpose()).cwiseAbs().maxCoeff() == 0.0); }
    SECTION("positive semidefinite") {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
        CHECK(es.eigenvalues().minCoeff() >= -1e-14 * M.norm());
    }
    SECTION("row sums integrate the partition of unity") {
        const QuadRule q = gauss_legendre_01(12);
        Eigen::VectorXd expect = Eigen::VectorXd::Zero(tube.n_nodes());
        for (int e = 0; e < tube.n_elements(); ++e)
            for (int i = 0; i < q.size(); ++i) {
                const auto g = eval_element(tube, e, q.nodes[i]);
                for (int a = 0; a < 3; ++a)
                    expect(tube.elements[e].nodes[a]) +=
                        0.5 * q.weights[i] * g.jacobian * g.point.r * g.shapes[a];
            }
        CHECK((M.rowwise().sum() - expect).cwiseAbs().maxCoeff() < 1e-15);
    }
}

TEST_CASE("operator symmetries and limits", "[assembly]") {
    const MeridianMesh tube = build_cylinder_tube(0.009, 0.011, 0.024, 12, 1);
    const Wavenumber k = Wavenumber::from_frequency(1000.0, 1.0, 1.37e6);
    AssemblyRequest req;
    req.V = req.K = req.Vk = req.Kk = req.Vs = true;
    req.k = k;
    const auto ops = assemble_operators(tube, req, {}, 1);
    SECTION("single-layer symmetry") {
        CHECK(max_abs(ops.V - ops.V.transpose()) <= 1e-12 * max_abs(ops.V));
        CHECK(max_abs(ops.Vk - ops.Vk.transpose()) <= 1e-12 * max_abs(ops.Vk));
    }
    SECTION("V entries are real") {
        CHECK(ops.V.imag().cwiseAbs().maxCoeff() == 0.0);
    }
    SECTION("static Helmholtz assembly equals the Laplace one") {
        const Eigen::MatrixXcd Vk0 = assemble_single_layer(tube, Wavenumber{});
        const Eigen::MatrixXcd V = ops.V;
        CHECK(max_abs(Vk0 - V) <= 1e-12 * max_abs(V));
        AssemblyRequest r2;
        r2.Kk = true;
        r2.k = Wavenumber{};
        const auto k0 = assemble_operators(tube, r2, {}, 1);
        CHECK(max_abs(k0.Kk - ops.K) <= 1e-12 * max_abs(ops.K));
    }
    SECTION("entrywise k -> 0 limit") {
        const double tiny = 1e-6 / std::sqrt(2.0);
        AssemblyRequest r3;
        r3.Vk = r3.Kk = true;
        r3.k = Wavenumber{complexd(tiny, -tiny)};
        const auto small = assemble_operators(tube, r3, {}, 1);
        CHECK(max_abs(small.Vk - ops.V) <= 1e-10);
        CHECK(max_abs(small.Kk - ops.K) <= 1e-10);
    }
}

TEST_CASE("coupling matrix structure", "[assembly]") {
    SECTION("vanishes when the contour has no radial normal component") {
        // radial segment at constant z: normals are purely axial
        const MeridianMesh flat =
            straight_mesh({{0.005, 0.0}, {0.010, 0.0}, {0.015, 0.0}});
        const Eigen::MatrixXcd Vs =
            assemble_vs(flat, Wavenumber::from_frequency(1000.0, 1.0, 1e6));
        CHECK(max_abs(Vs) == 0.0);
    }
}

TEST_CASE("coincident double layer is stable under rule refinement", "[assembly]") {
    const MeridianMesh seg = straight_mesh({{0.01, 0.0}, {0.01, 0.005}});
    QuadratureConfig c16, c24;
    c16.n_singular = 16;
    c24.n_singular = 24;
    const Eigen::MatrixXcd K16 = assemble_double_layer(seg, Wavenumber{}, c16);
    const Eigen::MatrixXcd K24 = assemble_double_layer(seg, Wavenumber{}, c24);
    CHECK(max_abs(K16 - K24) < 1e-10);
}

TEST_CASE("two-element mesh against the brute-force oracle", "[assembly]") {
    // one coincident pair, touching pairs in both orientations
    const MeridianMesh seg =
        straight_mesh({{0.010, 0.0}, {0.0105, 0.004}, {0.010, 0.008}});
    const Wavenumber k = Wavenumber::from_frequency(5000.0, 1.0, 1.37e6);
    AssemblyRequest req;
    req.V = req.K = req.Vk = req.Kk = req.Vs = true;
    req.k = k;
    const auto ops = assemble_operators(seg, req, {}, 1);

    oracle::PairOracle po{seg, k, 1e-2};
    struct Case {
        oracle::PairOp op;
        const Eigen::MatrixXcd* got;
        double tol;
    };
    const Case cases[] = {{oracle::PairOp::V, &ops.V, 1e-9},
                          {oracle::PairOp::K, &ops.K, 1e-8},
                          {oracle::PairOp::Vk, &ops.Vk, 1e-8},
                          {oracle::PairOp::Kk, &ops.Kk, 1e-8},
                          {oracle::PairOp::Vs, &ops.Vs, 1e-8}};
    for (const auto& c : cases) {
        po.tol = 1e-10 * max_abs(*c.got);
        const Eigen::MatrixXcd want = po.matrix(c.op);
        const double floor = 1e-3 * max_abs(want);
        for (int i = 0; i < want.rows(); ++i)
            for (int j = 0; j < want.cols(); ++j) {
                const double scale = std::max(std::abs(want(i, j)), floor);
                CHECK(std::abs((*c.got)(i, j) - want(i, j)) <= c.tol * scale);
            }
    }
}

TEST_CASE("excitation vector", "[assembly]") {
    const CoilSpec coil{0.007, 0.0085, 0.002, 500, 0.0, 1.0};
    SECTION("mirror symmetry for a centered coil") {
        const MeridianMesh tube = build_cylinder_tube(0.009, 0.011, 0.024, 16, 1);
        const Eigen::VectorXcd f = assemble_rhs(tube, coil);
        for (int i = 0; i < tube.n_nodes(); ++i) {
            const auto& p = tube.nodes[i];
            for (int j = 0; j < tube.n_nodes(); ++j) {
                const auto& q = tube.nodes[j];
                if (q.r == p.r && q.z == -p.z)
                    CHECK(std::abs(f(i) - f(j)) <= 1e-12 * std::abs(f(i)));
            }
        }
    }
    SECTION("single element against 1D adaptive quadrature") {
        const MeridianMesh seg = straight_mesh({{0.012, -0.001}, {0.0125, 0.003}});
        const Eigen::VectorXcd f = assemble_rhs(seg, coil);
        for (int a = 0; a < 2; ++a) {
            const double want = oracle::adaptive_simpson(
                [&](double t) {
                    const auto g = eval_element(seg, 0, t);
                    return g.shapes[a] * source_potential(coil, g.point) * g.point.r *
                           g.jacobian;
                },
                0.0, 1.0, 1e-16);
            CHECK(std::abs(f(a).real() - want) <= 1e-10 * std::abs(want));
        }
    }
    SECTION("axis entries shrink under refinement") {
        const CoilSpec inner_coil{0.007, 0.0085, 0.002, 500, 0.0045, 1.0};
        auto axis_mag = [&](int n_s) {
            const MeridianMesh shell = build_spherical_shell(0.011, 0.012, n_s, 1);
            const Eigen::VectorXcd f = assemble_rhs(shell, inner_coil);
            double worst = 0.0, overall = 0.0;
            for (int i = 0; i < shell.n_nodes(); ++i) {
                overall = std::max(overall, std::abs(f(i)));
                if (shell.nodes[i].r == 0.0) worst = std::max(worst, std::abs(f(i)));
            }
            return std::pair{worst, overall};
        };
        const auto [a16, o16] = axis_mag(16);
        const auto [a32, o32] = axis_mag(32);
        CHECK(a16 < 0.05 * o16);
        CHECK(a32 < a16);
    }
}

TEST_CASE("block system layout", "[assembly]") {
    const int N = 2;
    const Eigen::MatrixXd M = Eigen::MatrixXd::Identity(N, N) * 2.0;
    const Eigen::MatrixXcd V = Eigen::MatrixXcd::Constant(N, N, complexd(3, 0));
    const Eigen::MatrixXcd K = Eigen::MatrixXcd::Constant(N, N, complexd(0, 1));
    const Eigen::MatrixXcd Vk = Eigen::MatrixXcd::Constant(N, N, complexd(5, 0));
    const Eigen::MatrixXcd Kk = Eigen::MatrixXcd::Constant(N, N, complexd(0, 7));
    const Eigen::MatrixXcd Vs = Eigen::MatrixXcd::Constant(N, N, complexd(11, 0));
    const Eigen::VectorXcd f = Eigen::VectorXcd::Constant(N, complexd(13, 0));

    SECTION("general permeability") {
        const double mu_r = 1.5;
        const BlockSystem sys = build_block_system(M, V, K, Vk, Kk, Vs, mu_r, f);
        CHECK(sys.matrix(0, 0) == complexd(2, -1));
        CHECK(sys.matrix(0, N) == complexd(3, 0));
        CHECK(sys.matrix(N, 0) == complexd(2.0 - 0.5 * 11.0, 7));
        CHECK(sys.matrix(N, N) == complexd(-1.5 * 5.0, 0));
        CHECK(sys.rhs(0) == complexd(13, 0));
        CHECK(sys.rhs(N) == complexd(0, 0));
    }
    SECTION("unit permeability ignores the coupling matrix") {
        const BlockSystem a = build_block_system(M, V, K, Vk, Kk, Vs, 1.0, f);
        const BlockSystem b =
            build_block_system(M, V, K, Vk, Kk, Eigen::MatrixXcd(), 1.0, f);
        CHECK((a.matrix - b.matrix).cwiseAbs().maxCoeff() == 0.0);
        CHECK(a.matrix(N, 0) == complexd(2, 7));
    }
    SECTION("missing coupling matrix with contrast is an error") {
        CHECK_THROWS_AS(build_block_system(M, V, K, Vk, Kk, Eigen::MatrixXcd(), 1.2, f),
                        std::invalid_argument);
    }
    SECTION("dimension mismatch") {
        CHECK_THROWS_AS(build_block_system(M, V, K, Vk, Eigen::MatrixXcd::Zero(3, 3), Vs,
                                           1.0, f),
                        std::invalid_argument);
    }
}

TEST_CASE("parallel assembly is bitwise deterministic", "[assembly]") {
    const MeridianMesh shell = build_spherical_shell(0.011, 0.012, 24, 2);
    const Wavenumber k = Wavenumber::from_frequency(2000.0, 1.0, 2.9e6);
    AssemblyRequest req;
    req.V = req.K = req.Vk = req.Kk = true;
    req.k = k;
    const auto serial = assemble_operators(shell, req, {}, 1);
    const auto parallel = assemble_operators(shell, req, {}, 4);
    CHECK((serial.V - parallel.V).cwiseAbs().maxCoeff() == 0.0);
    CHECK((serial.K - parallel.K).cwiseAbs().maxCoeff() == 0.0);
    CHECK((serial.Vk - parallel.Vk).cwiseAbs().maxCoeff() == 0.0);
    CHECK((serial.Kk - parallel.Kk).cwiseAbs().maxCoeff() == 0.0);
    const auto serial2 = assemble_operators(shell, req, {}, 1);
    CHECK((serial.Vk - serial2.Vk).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("single-layer coercivity away from the axis", "[assembly]") {
    const MeridianMesh shell = build_spherical_shell(0.011, 0.012, 16, 1);
    const Eigen::MatrixXcd V = assemble_single_layer(shell);
    std::vector<int> keep;
    for (int i = 0; i < shell.n_nodes(); ++i)
        if (shell.nodes[i].r > 0.0) keep.push_back(i);
    Eigen::MatrixXd Vr(keep.size(), keep.size());
    for (size_t i = 0; i < keep.size(); ++i)
        for (size_t j = 0; j < keep.size(); ++j) Vr(i, j) = V(keep[i], keep[j]).real();
    const Eigen::MatrixXd Vsym = 0.5 * (Vr + Vr.transpose());
    Eigen::LLT<Eigen::MatrixXd> llt(Vsym);
    CHECK(llt.info() == Eigen::Success);
}
