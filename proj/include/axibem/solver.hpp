#pragma once

// Dense solve of the block system and impedance post-processing via
// the reciprocity integral.

#include "axibem/assembly.hpp"

#include <Eigen/Dense>

#include <complex>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace axibem {

struct SweepResult {
    double frequency = 0.0;           // Hz
    complexd delta_z{0.0, 0.0};       // impedance change [ohm]
    double dR_over_X0 = 0.0;          // Re(dZ) / (omega L0)
    double dX_over_X0 = 0.0;          // Im(dZ) / (omega L0)
};

struct DenseSolution {
    Eigen::VectorXcd u1, q1;
    double residual = 0.0;  // ||A x - b|| / ||b||
};

class SolveError : public std::runtime_error {
  public:
    explicit SolveError(const std::string& what) : std::runtime_error(what) {}
};

// LU with partial pivoting; reports the relative residual and refuses
// solutions from singular-to-working-precision matrices.
inline DenseSolution solve_dense(const BlockSystem& sys) {
    const int n2 = static_cast<int>(sys.matrix.rows());
    if (n2 != sys.matrix.cols() || n2 != sys.rhs.size() || n2 != 2 * sys.n)
        throw std::invalid_argument("solve_dense: inconsistent system dimensions");
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(sys.matrix);
    const Eigen::VectorXcd x = lu.solve(sys.rhs);
    const double bnorm = sys.rhs.norm();
    const double res = bnorm > 0.0 ? (sys.matrix * x - sys.rhs).norm() / bnorm : 0.0;
    if (!x.allFinite() || res > 1e-6) {
        std::ostringstream msg;
        msg << "solve_dense: system is singular to working precision (rcond ~ "
            << lu.rcond() << ", residual " << res << ")";
        throw SolveError(msg.str());
    }
    DenseSolution out;
    out.u1 = x.head(sys.n);
    out.q1 = x.tail(sys.n);
    out.residual = res;
    return out;
}

// Impedance change by the reciprocity integral: the solved boundary
// fields are paired with the analytic source potential and its normal
// derivative at the quadrature points of every element.
inline complexd impedance_change(const MeridianMesh& mesh, const CoilSpec& coil,
                                 const Eigen::VectorXcd& u1, const Eigen::VectorXcd& q1,
                                 int n_q, double omega, int n_rho = 24) {
    if (n_q < 8) throw std::domain_error("impedance_change: n_q must be >= 8");
    if (u1.size() != mesh.n_nodes() || q1.size() != mesh.n_nodes())
        throw std::invalid_argument("impedance_change: solution size mismatch");
    const QuadRule q = gauss_legendre_01(n_q);
    const int nloc = mesh.nodes_per_element();
    complexd acc = 0.0;
    for (int e = 0; e < mesh.n_elements(); ++e) {
        const auto& ids = mesh.elements[e].nodes;
        for (int i = 0; i < q.size(); ++i) {
            const auto g = eval_element(mesh, e, q.nodes[i]);
            complexd uh = 0.0, qh = 0.0;
            for (int a = 0; a < nloc; ++a) {
                uh += g.shapes[a] * u1(ids[a]);
                qh += g.shapes[a] * q1(ids[a]);
            }
            const double ue = source_potential(coil, g.point, n_rho);
            const double qe = source_normal_derivative(coil, g.point, g.n_r, g.n_z, n_rho);
            acc += (ue * qh - uh * qe) * (g.point.r * g.jacobian * q.weights[i]);
        }
    }
    const double mu0 = 4.0e-7 * pi;
    const double amp = coil.current;
    return -complexd(0.0, 2.0 * pi * omega) / (mu0 * amp * amp) * acc;
}

// (Re dZ / X0, Im dZ / X0) with X0 = omega L0.
inline std::pair<double, double> normalize(complexd delta_z, double omega, double L0) {
    if (!(omega > 0.0)) throw std::domain_error("normalize: omega must be positive");
    if (!(L0 > 0.0)) throw std::domain_error("normalize: L0 must be positive");
    const double X0 = omega * L0;
    return {delta_z.real() / X0, delta_z.imag() / X0};
}

}  // namespace axibem
