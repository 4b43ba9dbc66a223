#pragma once

// Axisymmetric Laplace and Helmholtz kernels of a ring source, with
// their source-point derivatives and all axis limits. The Laplace
// kernel is closed-form in complete elliptic integrals; the Helmholtz
// kernel is evaluated by singularity extraction: a smooth angular
// integral plus the Laplace part.

#include "axibem/quadrature.hpp"
#include "axibem/specfun.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

namespace axibem {

using complexd = std::complex<double>;

struct MeridianPoint {
    double r = 0.0;
    double z = 0.0;
};

// Complex wavenumber k = sqrt(-i omega mu0 mu_r sigma), branch with
// Re(k) > 0; k = 0 gives the static limit.
struct Wavenumber {
    complexd k{0.0, 0.0};

    static Wavenumber from_frequency(double freq_hz, double mu_r, double sigma) {
        const double mu0 = 4.0e-7 * pi;
        const double omega = 2.0 * pi * freq_hz;
        const double mag = std::sqrt(omega * mu0 * mu_r * sigma);
        // sqrt(-i) = (1 - i)/sqrt(2)
        return {complexd(mag / std::sqrt(2.0), -mag / std::sqrt(2.0))};
    }
    bool is_static() const { return k == complexd(0.0, 0.0); }
};

namespace detail {

struct RingGeom {
    double S;    // (r+r')^2 + dz^2
    double m;    // 4 r r' / S
    double mc;   // ((r-r')^2 + dz^2)/S, the accurate complement of m
    double dz;   // z - z'
};

inline RingGeom ring_geom(const MeridianPoint& x, const MeridianPoint& y) {
    const double dz = x.z - y.z;
    const double sp = x.r + y.r;
    const double sm = x.r - y.r;
    const double S = sp * sp + dz * dz;
    if (S == 0.0) throw std::domain_error("kernel: both points at the origin");
    return {S, 4.0 * x.r * y.r / S, (sm * sm + dz * dz) / S, dz};
}

// K, E of m = 1 - mc from the accurate complement; valid for mc in (0,1].
inline EllipticPair complete_elliptic_mc(double mc) {
    const double rf = carlson_rf(0.0, mc, 1.0);
    const double rd = carlson_rd(0.0, mc, 1.0);
    return {rf, rf - (1.0 - mc) / 3.0 * rd};
}

// (1-m/2)K - E and (1-m)K + (m/2-1)E, stable across the whole range:
// series near m=0, complement-based evaluation near m=1.
struct KernelCombos {
    double B1;  // (1-m/2)K(m) - E(m)
    double G2;  // (1-m)K(m) + (m/2-1)E(m)
};

inline KernelCombos kernel_combos(double m, double mc) {
    if (m > 0.5) {
        const auto [K, E] = complete_elliptic_mc(mc);
        return {0.5 * (1.0 + mc) * K - E, mc * K - 0.5 * (1.0 + mc) * E};
    }
    return {elliptic_km_minus_e(m), elliptic_g2(m)};
}

// Cached Gauss-Legendre data for the angular integrals, with
// precomputed cos(phi) and sin^2(phi/2) on phi = pi*t.
struct AngularRule {
    std::vector<double> w, cphi, s2half;
};

inline const AngularRule& angular_rule(int n) {
    static const std::vector<AngularRule> cache = [] {
        std::vector<AngularRule> all(257);
        for (int n = 8; n <= 256; ++n) {
            QuadRule q = gauss_legendre_01(std::min(n, 128));
            if (n > 128) {
                // composite of two half-panels keeps the node count
                QuadRule h = gauss_legendre_01(n / 2);
                q.nodes.clear();
                q.weights.clear();
                for (double t : h.nodes) q.nodes.push_back(0.5 * t);
                for (double t : h.nodes) q.nodes.push_back(0.5 + 0.5 * t);
                for (double w : h.weights) q.weights.push_back(0.5 * w);
                for (double w : h.weights) q.weights.push_back(0.5 * w);
            }
            AngularRule& a = all[n];
            const int sz = static_cast<int>(q.nodes.size());
            a.w.resize(sz);
            a.cphi.resize(sz);
            a.s2half.resize(sz);
            for (int i = 0; i < sz; ++i) {
                const double phi = pi * q.nodes[i];
                a.w[i] = q.weights[i];
                a.cphi[i] = std::cos(phi);
                const double s = std::sin(0.5 * phi);
                a.s2half[i] = s * s;
            }
        }
        return all;
    }();
    if (n < 8) n = 8;
    if (n > 256) n = 256;
    return cache[n];
}

// exp(z) - 1 without cancellation for small |z|.
inline complexd cexpm1(const complexd& z) {
    if (std::abs(z) > 0.5) return std::exp(z) - 1.0;
    complexd term = z, sum = z;
    for (int n = 2; n <= 24; ++n) {
        term *= z / static_cast<double>(n);
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
}

// 1 - (1 + z) exp(-z), stable for small |z|.
inline complexd one_minus_1pz_expmz(const complexd& z) {
    if (std::abs(z) > 0.5) return 1.0 - (1.0 + z) * std::exp(-z);
    // sum_{n>=2} (-1)^n (n-1) z^n / n!
    complexd sum = 0.0;
    complexd zn = z;  // z^1/1!
    double invfact = 1.0;
    for (int n = 2; n <= 26; ++n) {
        zn *= z;
        invfact /= n;
        const double sgn = (n % 2 == 0) ? 1.0 : -1.0;
        const complexd term = sgn * (n - 1.0) * invfact * zn;
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum) + 1e-300) break;
    }
    return sum;
}

struct SmoothParts {
    complexd val{0.0, 0.0};
    complexd dr{0.0, 0.0};
    complexd dz{0.0, 0.0};
};

// Fused evaluation of the smooth Helmholtz remainders (value and/or
// gradient) sharing one angular sweep; assembly's hot path.
template <class Point>
inline SmoothParts helmholtz_smooth_parts(const Point& x, const Point& y, complexd k,
                                          int n_phi, bool want_val, bool want_grad) {
    SmoothParts out;
    if (x.r == 0.0) return out;
    if (k == complexd(0.0, 0.0)) return out;
    if (y.r == 0.0) {
        if (want_grad) {
            const double dz = x.z - y.z;
            const double chi = std::sqrt(x.r * x.r + dz * dz);
            const complexd ikchi = complexd(0.0, 1.0) * k * chi;
            out.dr = x.r / (4.0 * chi * chi * chi) *
                     ((1.0 + ikchi) * std::exp(-ikchi) - 1.0);
        }
        return out;
    }
    const double dzv = x.z - y.z;
    const double sm = x.r - y.r;
    const double base = sm * sm + dzv * dzv;
    const double four_rr = 4.0 * x.r * y.r;
    const auto& a = angular_rule(n_phi);
    const complexd ik = complexd(0.0, 1.0) * k;
    complexd acc = 0.0, acc_r = 0.0, acc_z = 0.0;
    for (size_t i = 0; i < a.w.size(); ++i) {
        const double R = std::sqrt(base + four_rr * a.s2half[i]);
        const complexd z = ik * R;
        const double wc = a.w[i] * a.cphi[i];
        if (std::abs(z) > 0.5) {
            const complexd E = std::exp(-z);
            if (want_val) acc += wc * (E - 1.0) / R;
            if (want_grad) {
                const complexd t = (1.0 - (1.0 + z) * E) / (R * R * R);
                acc_r += wc * (y.r - x.r * a.cphi[i]) * t;
                acc_z += wc * dzv * t;
            }
        } else {
            if (want_val) acc += wc * cexpm1(-z) / R;
            if (want_grad) {
                const complexd t = one_minus_1pz_expmz(z) / (R * R * R);
                acc_r += wc * (y.r - x.r * a.cphi[i]) * t;
                acc_z += wc * dzv * t;
            }
        }
    }
    out.val = 0.5 * acc;
    out.dr = 0.5 * acc_r;
    out.dz = -0.5 * acc_z;
    return out;
}

}  // namespace detail

// m = 4 r r' / ((r+r')^2 + (z-z')^2)
inline double modulus_m(const MeridianPoint& x, const MeridianPoint& y) {
    return detail::ring_geom(x, y).m;
}

// Axisymmetric Laplace kernel; zero on the axis, singular-evaluation
// error at coincident points with r > 0 (singular kernels are only
// integrated through the pair transforms, never point-sampled there).
inline double laplace_kernel(const MeridianPoint& x, const MeridianPoint& y) {
    if (x.r == 0.0 || y.r == 0.0) {
        detail::ring_geom(x, y);  // origin check
        return 0.0;
    }
    const auto g = detail::ring_geom(x, y);
    if (g.mc == 0.0) throw std::domain_error("laplace_kernel: coincident points");
    const auto c = detail::kernel_combos(g.m, g.mc);
    return std::sqrt(g.S) * c.B1 / (2.0 * pi * x.r * y.r);
}

// (d/dr', d/dz') of the Laplace kernel; r'=0 evaluates the closed-form
// axis limit r/(4 chi^3).
inline std::pair<double, double> laplace_kernel_grad(const MeridianPoint& x,
                                                     const MeridianPoint& y) {
    if (x.r == 0.0) {
        detail::ring_geom(x, y);
        return {0.0, 0.0};
    }
    if (y.r == 0.0) {
        const double dz = x.z - y.z;
        const double chi = std::sqrt(x.r * x.r + dz * dz);
        return {x.r / (4.0 * chi * chi * chi), 0.0};
    }
    const auto g = detail::ring_geom(x, y);
    if (g.mc == 0.0) throw std::domain_error("laplace_kernel_grad: coincident points");
    const auto c = detail::kernel_combos(g.m, g.mc);
    const double rr = x.r * y.r;
    const double sqS = std::sqrt(g.S);
    const double dr = -(c.B1 * g.S + ((x.r - y.r) * (x.r + y.r) + g.dz * g.dz) * c.G2 / g.mc)
                      / (4.0 * pi * x.r * y.r * y.r * sqS);
    const double dzv = -g.dz * c.G2 / (2.0 * pi * g.mc * rr * sqS);
    return {dr, dzv};
}

// Angular-resolution default for the oscillatory Helmholtz integrands.
inline int default_n_phi(const Wavenumber& k, const MeridianPoint& x,
                         const MeridianPoint& y) {
    const double scale = x.r + y.r + std::abs(x.z - y.z);
    const int n = static_cast<int>(std::ceil(10.0 * std::abs(k.k) * scale));
    return std::min(256, std::max(24, n));
}

// Smooth remainder of the Helmholtz kernel under singularity
// extraction: the angular integral of (exp(-ikR)-1)/R, which stays
// bounded as the points coincide. The full kernel is this plus the
// Laplace kernel.
inline complexd helmholtz_smooth(const MeridianPoint& x, const MeridianPoint& y,
                                 const Wavenumber& k, int n_phi) {
    if (n_phi < 8) throw std::domain_error("helmholtz_smooth: n_phi must be >= 8");
    detail::ring_geom(x, y);  // origin check
    return detail::helmholtz_smooth_parts(x, y, k.k, n_phi, true, false).val;
}

// Smooth remainder of the Helmholtz kernel derivatives (the static
// parts are the Laplace derivatives).
inline std::pair<complexd, complexd> helmholtz_smooth_grad(const MeridianPoint& x,
                                                           const MeridianPoint& y,
                                                           const Wavenumber& k, int n_phi) {
    if (n_phi < 8) throw std::domain_error("helmholtz_smooth_grad: n_phi must be >= 8");
    detail::ring_geom(x, y);
    const auto p = detail::helmholtz_smooth_parts(x, y, k.k, n_phi, false, true);
    return {p.dr, p.dz};
}

// Axisymmetric Helmholtz kernel: smooth remainder plus the Laplace
// kernel; equals the Laplace kernel exactly at k = 0.
inline complexd helmholtz_kernel(const MeridianPoint& x, const MeridianPoint& y,
                                 const Wavenumber& k, int n_phi) {
    if (x.r == 0.0 || y.r == 0.0) {
        detail::ring_geom(x, y);
        return 0.0;
    }
    if (detail::ring_geom(x, y).mc == 0.0)
        throw std::domain_error("helmholtz_kernel: coincident points");
    return helmholtz_smooth(x, y, k, n_phi) + laplace_kernel(x, y);
}

// (d/dr', d/dz') of the Helmholtz kernel; the r'=0 limit is
// (r/(4 chi^3)) (1 + ik chi) exp(-ik chi).
inline std::pair<complexd, complexd> helmholtz_kernel_grad(const MeridianPoint& x,
                                                           const MeridianPoint& y,
                                                           const Wavenumber& k, int n_phi) {
    if (x.r == 0.0) {
        detail::ring_geom(x, y);
        return {0.0, 0.0};
    }
    if (y.r != 0.0 && detail::ring_geom(x, y).mc == 0.0)
        throw std::domain_error("helmholtz_kernel_grad: coincident points");
    const auto [sr, sz] = helmholtz_smooth_grad(x, y, k, n_phi);
    const auto [lr, lz] = laplace_kernel_grad(x, y);
    return {sr + lr, sz + lz};
}

}  // namespace axibem
