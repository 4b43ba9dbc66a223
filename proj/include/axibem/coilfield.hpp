#pragma once

// Analytic source fields of a cylindrical coil with rectangular cross
// section [r1,r2] x [z0-h, z0+h] and N turns: azimuthal vector
// potential, flux-density components, the normal derivative entering
// the reciprocity integral, on-axis limits, and the self-inductance by
// the energy method.

#include "axibem/kernels.hpp"
#include "axibem/quadrature.hpp"
#include "axibem/specfun.hpp"

#include <cmath>
#include <stdexcept>

namespace axibem {

struct CoilSpec {
    double r1 = 0.0;      // inner radius [m]
    double r2 = 0.0;      // outer radius [m]
    double h = 0.0;       // half-height [m]
    int turns = 1;        // N
    double z0 = 0.0;      // center height [m]
    double current = 1.0; // amplitude [A]

    void validate() const {
        if (!(0.0 < r1 && r1 < r2)) throw std::domain_error("CoilSpec: need 0 < r1 < r2");
        if (!(h > 0.0)) throw std::domain_error("CoilSpec: need h > 0");
        if (turns < 1) throw std::domain_error("CoilSpec: need N >= 1");
    }
};

namespace detail {

inline constexpr double mu0 = 4.0e-7 * pi;

struct RingEll {
    double alpha;   // parameter of the ring pair (rho, r) at offset zeta
    double alphac;  // accurate complement
    double K, E;
    double lambda0; // Heuman Lambda of (beta, alpha)
    double beta;
};

inline RingEll ring_ell(double rho, double r, double zeta) {
    RingEll e;
    const double sp = rho + r, sm = rho - r;
    const double S = sp * sp + zeta * zeta;
    e.alpha = 4.0 * rho * r / S;
    e.alphac = (sm * sm + zeta * zeta) / S;
    if (e.alphac == 0.0)
        throw std::domain_error("coil field evaluated on the winding filament");
    if (e.alpha > 0.5) {
        const auto p = complete_elliptic_mc(e.alphac);
        e.K = p.K;
        e.E = p.E;
    } else {
        const auto p = complete_elliptic(e.alpha);
        e.K = p.K;
        e.E = p.E;
    }
    e.beta = std::asin(zeta / std::sqrt(sm * sm + zeta * zeta));
    // Lambda0(beta, alpha) composed from the incomplete integrals of
    // the complementary parameter
    if (e.alpha == 0.0) {
        e.lambda0 = std::sin(e.beta);
    } else {
        const auto [Fi, Ei] = incomplete_elliptic(e.beta, e.alphac);
        e.lambda0 = 2.0 / pi * (e.E * Fi + e.K * Ei - e.K * Fi);
    }
    return e;
}

// Integrand f1 of the vector potential: int_0^inf J1(l r)J1(l rho) e^{-zeta l}/l dl.
inline double coil_f1(double rho, double r, double zeta) {
    const auto e = ring_ell(rho, r, zeta);
    const double sa = std::sqrt(e.alpha);
    double v = zeta / (pi * std::sqrt(rho * r)) *
               (e.E / sa - (2.0 * rho * rho + 2.0 * r * r + zeta * zeta) * sa * e.K /
                               (4.0 * rho * r));
    if (r < rho)
        v += 0.5 * ((rho * rho - r * r) / (2.0 * rho * r) * e.lambda0 + r / rho);
    else if (r > rho)
        v += 0.5 * ((r * r - rho * rho) / (2.0 * rho * r) * e.lambda0 + rho / r);
    else
        v += 0.5;  // common one-sided limit
    return v;
}

// Integrand f2 of B_z: int_0^inf J0(l r)J1(l rho) e^{-zeta l} dl.
inline double coil_f2(double rho, double r, double zeta) {
    const auto e = ring_ell(rho, r, zeta);
    const double t = zeta * std::sqrt(e.alpha) * e.K / (2.0 * pi * std::sqrt(rho * r));
    double v;
    if (r < rho)
        v = 1.0 - t - 0.5 * e.lambda0;
    else if (r > rho)
        v = -t + 0.5 * e.lambda0;
    else
        v = 0.5 - t;
    return v / rho;
}

// Integrand f3 of B_r: int_0^inf J1(l r)J1(l rho) e^{-zeta l} dl.
inline double coil_f3(double rho, double r, double zeta) {
    const auto e = ring_ell(rho, r, zeta);
    // (2-alpha)K - 2E = 2(K-E) - alpha K, with the stable difference
    const double kme = (e.alpha > 0.01) ? (e.K - e.E) : elliptic_k_minus_e(e.alpha);
    return (2.0 * kme - e.alpha * e.K) / (pi * std::sqrt(e.alpha * rho * r));
}

inline double coil_g1(double r, double r1, double r2) {
    if (r <= r1) return (r2 - r1) * r;
    if (r < r2) return -2.0 / 3.0 * r * r + r2 * r - r1 * r1 * r1 / (3.0 * r);
    return (r2 * r2 * r2 - r1 * r1 * r1) / (3.0 * r);
}

inline double coil_g2(double r, double r1, double r2) {
    if (r <= r1) return 2.0 * (r2 - r1);
    if (r < r2) return 2.0 * (r2 - r);
    return 0.0;
}

// Radial quadrature over [r1,r2], split at rho = r when r falls inside
// the winding window (the integrands have a kink across rho = r).
template <class G>
inline double rho_integral(const CoilSpec& c, double r, int n_rho, G&& g) {
    const QuadRule q = gauss_legendre_01(n_rho);
    auto panel = [&](double a, double b) {
        double acc = 0.0;
        for (int i = 0; i < q.size(); ++i) {
            const double rho = a + (b - a) * q.nodes[i];
            acc += (b - a) * q.weights[i] * rho * g(rho);
        }
        return acc;
    };
    if (r > c.r1 && r < c.r2) return panel(c.r1, r) + panel(r, c.r2);
    return panel(c.r1, c.r2);
}

inline double coil_prefactor(const CoilSpec& c) {
    return mu0 * c.turns * c.current / (4.0 * c.h * (c.r2 - c.r1));
}

}  // namespace detail

// Azimuthal source potential A_phi of the coil at p; zero on the axis.
inline double source_potential(const CoilSpec& coil, const MeridianPoint& p,
                               int n_rho = 24) {
    coil.validate();
    if (n_rho < 8) throw std::domain_error("source_potential: n_rho must be >= 8");
    if (p.r == 0.0) return 0.0;
    const double zeta = p.z - coil.z0, h = coil.h, r = p.r;
    double val;
    if (zeta <= -h) {
        val = detail::rho_integral(coil, r, n_rho, [&](double rho) {
            return detail::coil_f1(rho, r, -h - zeta) - detail::coil_f1(rho, r, h - zeta);
        });
    } else if (zeta >= h) {
        val = detail::rho_integral(coil, r, n_rho, [&](double rho) {
            return detail::coil_f1(rho, r, zeta - h) - detail::coil_f1(rho, r, zeta + h);
        });
    } else {
        val = detail::coil_g1(r, coil.r1, coil.r2) -
              detail::rho_integral(coil, r, n_rho, [&](double rho) {
                  return detail::coil_f1(rho, r, zeta + h) + detail::coil_f1(rho, r, h - zeta);
              });
    }
    return detail::coil_prefactor(coil) * val;
}

// Axial flux density B_z; the axis value has a closed form.
inline double source_bz(const CoilSpec& coil, const MeridianPoint& p, int n_rho = 24) {
    coil.validate();
    if (n_rho < 8) throw std::domain_error("source_bz: n_rho must be >= 8");
    const double zeta = p.z - coil.z0, h = coil.h, r = p.r;
    if (r == 0.0) {
        auto seg = [&](double zz) {
            return zz * std::log((coil.r2 + std::sqrt(coil.r2 * coil.r2 + zz * zz)) /
                                 (coil.r1 + std::sqrt(coil.r1 * coil.r1 + zz * zz)));
        };
        return detail::coil_prefactor(coil) * (seg(zeta + h) - seg(zeta - h));
    }
    double val;
    if (zeta <= -h) {
        val = detail::rho_integral(coil, r, n_rho, [&](double rho) {
            return detail::coil_f2(rho, r, -h - zeta) - detail::coil_f2(rho, r, h - zeta);
        });
    } else if (zeta >= h) {
        val = detail::rho_integral(coil, r, n_rho, [&](double rho) {
            return detail::coil_f2(rho, r, zeta - h) - detail::coil_f2(rho, r, zeta + h);
        });
    } else {
        val = detail::coil_g2(r, coil.r1, coil.r2) -
              detail::rho_integral(coil, r, n_rho, [&](double rho) {
                  return detail::coil_f2(rho, r, zeta + h) + detail::coil_f2(rho, r, h - zeta);
              });
    }
    return detail::coil_prefactor(coil) * val;
}

// Radial flux density B_r; odd in zeta and zero on the axis.
inline double source_br(const CoilSpec& coil, const MeridianPoint& p, int n_rho = 24) {
    coil.validate();
    if (n_rho < 8) throw std::domain_error("source_br: n_rho must be >= 8");
    const double zeta = p.z - coil.z0, h = coil.h, r = p.r;
    if (r == 0.0) return 0.0;
    const double val = detail::rho_integral(coil, r, n_rho, [&](double rho) {
        return detail::coil_f3(rho, r, std::abs(h - zeta)) -
               detail::coil_f3(rho, r, std::abs(h + zeta));
    });
    return detail::coil_prefactor(coil) * val;
}

// n . grad A_phi = n_r (B_z - A_phi/r) + n_z (-B_r); on the axis
// d/dr A_phi = B_z/2.
inline double source_normal_derivative(const CoilSpec& coil, const MeridianPoint& p,
                                       double n_r, double n_z, int n_rho = 24) {
    if (p.r == 0.0) return n_r * 0.5 * source_bz(coil, p, n_rho);
    const double dAdr = source_bz(coil, p, n_rho) - source_potential(coil, p, n_rho) / p.r;
    const double dAdz = -source_br(coil, p, n_rho);
    return n_r * dAdr + n_z * dAdz;
}

// Self-inductance by the energy method with uniform current density:
// L = (2 pi N / (2h (r2-r1) I)) * integral of A_phi r dr dz over the
// coil cross section; independent of the drive amplitude.
inline double self_inductance(const CoilSpec& coil, int n_quad = 48) {
    coil.validate();
    if (n_quad < 16) throw std::domain_error("self_inductance: n_quad must be >= 16");
    const QuadRule q = gauss_legendre_01(n_quad);
    const double wr = coil.r2 - coil.r1, wz = 2.0 * coil.h;
    double acc = 0.0;
    for (int i = 0; i < q.size(); ++i) {
        const double r = coil.r1 + wr * q.nodes[i];
        for (int j = 0; j < q.size(); ++j) {
            const double z = coil.z0 - coil.h + wz * q.nodes[j];
            acc += q.weights[i] * q.weights[j] * source_potential(coil, {r, z}) * r;
        }
    }
    acc *= wr * wz;
    return 2.0 * pi * coil.turns * acc / (2.0 * coil.h * (coil.r2 - coil.r1) * coil.current);
}

}  // namespace axibem
