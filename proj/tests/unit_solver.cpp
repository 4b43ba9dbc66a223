#include "axibem/solver.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

using namespace axibem;

TEST_CASE("dense solve", "[solver]") {
    SECTION("identity system returns the rhs") {
        BlockSystem sys;
        sys.n = 3;
        sys.matrix = Eigen::MatrixXcd::Identity(6, 6);
        sys.rhs = Eigen::VectorXcd::LinSpaced(6, 1.0, 6.0);
        const auto sol = solve_dense(sys);
        CHECK((sol.u1 - sys.rhs.head(3)).norm() == 0.0);
        CHECK((sol.q1 - sys.rhs.tail(3)).norm() == 0.0);
        CHECK(sol.residual < 1e-14);
    }
    SECTION("2x2 complex system with a known inverse") {
        BlockSystem sys;
        sys.n = 1;
        sys.matrix.resize(2, 2);
        sys.matrix << complexd(1, 0), complexd(0, 1), complexd(0, -1), complexd(2, 0);
        // det = 2 - (-i)(i) = 1, inverse = [[2, -i], [i, 1]]
        sys.rhs.resize(2);
        sys.rhs << complexd(1, 1), complexd(0, 2);
        const auto sol = solve_dense(sys);
        const complexd u = 2.0 * sys.rhs(0) - complexd(0, 1) * sys.rhs(1);
        const complexd q = complexd(0, 1) * sys.rhs(0) + sys.rhs(1);
        CHECK(std::abs(sol.u1(0) - u) < 1e-14);
        CHECK(std::abs(sol.q1(0) - q) < 1e-14);
    }
    SECTION("random well-conditioned system") {
        std::mt19937 rng(71);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        BlockSystem sys;
        sys.n = 25;
        sys.matrix.resize(50, 50);
        for (int i = 0; i < 50; ++i)
            for (int j = 0; j < 50; ++j) sys.matrix(i, j) = complexd(u(rng), u(rng));
        sys.matrix += 50.0 * Eigen::MatrixXcd::Identity(50, 50);
        sys.rhs.resize(50);
        for (int i = 0; i < 50; ++i) sys.rhs(i) = complexd(u(rng), u(rng));
        CHECK(solve_dense(sys).residual < 1e-12);
    }
    SECTION("singular matrix raises with a condition estimate") {
        BlockSystem sys;
        sys.n = 1;
        sys.matrix = Eigen::MatrixXcd::Zero(2, 2);
        sys.matrix(0, 0) = 1.0;
        sys.rhs = Eigen::VectorXcd::Ones(2);
        CHECK_THROWS_AS(solve_dense(sys), SolveError);
    }
}

TEST_CASE("impedance normalization", "[solver]") {
    SECTION("purely reactive change") {
        const double omega = 2 * pi * 1000.0, L0 = 4.7405622e-3;
        const auto [dr, dx] = normalize(complexd(0.0, omega * L0), omega, L0);
        CHECK(dr == 0.0);
        CHECK(dx == Catch::Approx(1.0).epsilon(1e-15));
    }
    SECTION("zero change") {
        const auto [dr, dx] = normalize(complexd(0, 0), 1.0, 1.0);
        CHECK(dr == 0.0);
        CHECK(dx == 0.0);
    }
    SECTION("arithmetic") {
        const double omega = 2 * pi * 1000.0, L0 = 4.7405622e-3;
        const auto [dr, dx] = normalize(complexd(1.0, 2.0), omega, L0);
        CHECK(dr == Catch::Approx(1.0 / (omega * L0)).epsilon(1e-15));
        CHECK(dx == Catch::Approx(2.0 / (omega * L0)).epsilon(1e-15));
    }
    SECTION("domain errors") {
        CHECK_THROWS_AS(normalize(complexd(1, 1), 0.0, 1.0), std::domain_error);
        CHECK_THROWS_AS(normalize(complexd(1, 1), 1.0, -1.0), std::domain_error);
    }
}

TEST_CASE("reciprocity integral", "[solver]") {
    const MeridianMesh mesh = build_cylinder_tube(0.009, 0.011, 0.024, 16, 1);
    const CoilSpec coil{0.007, 0.0085, 0.002, 500, 0.0, 1.0};
    SECTION("zero fields give zero impedance change") {
        const Eigen::VectorXcd zero = Eigen::VectorXcd::Zero(mesh.n_nodes());
        CHECK(impedance_change(mesh, coil, zero, zero, 12, 2 * pi * 1000.0) ==
              complexd(0.0, 0.0));
    }
    SECTION("quadrature refinement on a solved case") {
        const double f = 2000.0, omega = 2 * pi * f;
        const Wavenumber k = Wavenumber::from_frequency(f, 1.0, 1.37e6);
        AssemblyRequest req;
        req.V = req.K = req.Vk = req.Kk = true;
        req.k = k;
        const auto ops = assemble_operators(mesh, req, {}, 1);
        const auto M = assemble_mass(mesh);
        const auto rhs = assemble_rhs(mesh, coil);
        const auto sys =
            build_block_system(M, ops.V, ops.K, ops.Vk, ops.Kk, Eigen::MatrixXcd(), 1.0, rhs);
        const auto sol = solve_dense(sys);
        const complexd z8 = impedance_change(mesh, coil, sol.u1, sol.q1, 8, omega);
        const complexd z16 = impedance_change(mesh, coil, sol.u1, sol.q1, 16, omega);
        CHECK(std::abs(z8 - z16) <= 1e-9 * std::abs(z16));
        // eddy currents add loss and reduce inductance
        CHECK(z16.real() > 0.0);
        CHECK(z16.imag() < 0.0);
    }
    SECTION("size validation") {
        const Eigen::VectorXcd bad = Eigen::VectorXcd::Zero(3);
        CHECK_THROWS_AS(impedance_change(mesh, coil, bad, bad, 12, 1.0),
                        std::invalid_argument);
    }
}
