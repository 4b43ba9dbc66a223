#pragma once

// Special functions backing the axisymmetric kernels and coil source
// fields: complete/incomplete elliptic integrals (Carlson symmetric
// forms, parameter convention m = modulus^2), the Heuman Lambda
// function, Bessel J0/J1 and the positive zeros of J0.

#include <cmath>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

namespace axibem {

inline constexpr double pi = 3.14159265358979323846;

struct EllipticPair {
    double K;  // complete elliptic integral of the first kind, K(m)
    double E;  // second kind, E(m)
};

namespace detail {

// Carlson symmetric integral R_F(x,y,z) by the duplication algorithm.
inline double carlson_rf(double x, double y, double z) {
    const double errtol = 1.0e-10;
    double mu, dx, dy, dz;
    do {
        const double sx = std::sqrt(x), sy = std::sqrt(y), sz = std::sqrt(z);
        const double lam = sx * (sy + sz) + sy * sz;
        x = 0.25 * (x + lam);
        y = 0.25 * (y + lam);
        z = 0.25 * (z + lam);
        mu = (x + y + z) / 3.0;
        dx = (mu - x) / mu;
        dy = (mu - y) / mu;
        dz = (mu - z) / mu;
    } while (std::abs(dx) > errtol || std::abs(dy) > errtol || std::abs(dz) > errtol);
    const double e2 = dx * dy - dz * dz;
    const double e3 = dx * dy * dz;
    return (1.0 + (e2 / 24.0 - 0.1 - 3.0 * e3 / 44.0) * e2 + e3 / 14.0) / std::sqrt(mu);
}

// Carlson symmetric integral R_D(x,y,z).
inline double carlson_rd(double x, double y, double z) {
    const double errtol = 1.0e-10;
    double sum = 0.0, fac = 1.0;
    double mu, dx, dy, dz;
    do {
        const double sx = std::sqrt(x), sy = std::sqrt(y), sz = std::sqrt(z);
        const double lam = sx * (sy + sz) + sy * sz;
        sum += fac / (sz * (z + lam));
        fac *= 0.25;
        x = 0.25 * (x + lam);
        y = 0.25 * (y + lam);
        z = 0.25 * (z + lam);
        mu = (x + y + 3.0 * z) / 5.0;
        dx = (mu - x) / mu;
        dy = (mu - y) / mu;
        dz = (mu - z) / mu;
    } while (std::abs(dx) > errtol || std::abs(dy) > errtol || std::abs(dz) > errtol);
    const double ea = dx * dy;
    const double eb = dz * dz;
    const double ec = ea - eb;
    const double ed = ea - 6.0 * eb;
    const double ee = ed + ec + ec;
    const double s = ed * (-3.0 / 14.0 + 9.0 / 88.0 * ed - 4.5 / 26.0 * dz * ee)
                   + dz * (ee / 6.0 + dz * (-9.0 / 22.0 * ec + 3.0 / 26.0 * dz * ea));
    return 3.0 * sum + fac * (1.0 + s) / (mu * std::sqrt(mu));
}

// Coefficients c_k = [(2k-1)!!/(2k)!!]^2 of the hypergeometric series
// of K(m); used for cancellation-free small-m combinations.
inline double series_ck(int k, double prev) {
    const double r = (2.0 * k - 1.0) / (2.0 * k);
    return prev * r * r;
}

}  // namespace detail

// K(m), E(m) in the parameter convention, m in [0,1).
inline EllipticPair complete_elliptic(double m) {
    if (!(m >= 0.0 && m < 1.0))
        throw std::domain_error("complete_elliptic: parameter m outside [0,1)");
    const double mc = 1.0 - m;
    const double rf = detail::carlson_rf(0.0, mc, 1.0);
    const double rd = detail::carlson_rd(0.0, mc, 1.0);
    return {rf, rf - m / 3.0 * rd};
}

// (1 - m/2) K(m) - E(m); behaves like (pi/32) m^2 for small m, where the
// direct difference of K and E loses all significant digits.
inline double elliptic_km_minus_e(double m) {
    if (m > 0.01) {
        const auto [K, E] = complete_elliptic(m);
        return (1.0 - 0.5 * m) * K - E;
    }
    // series (pi/2) sum_{k>=2} [c_k*2k/(2k-1) - c_{k-1}/2] m^k
    double ckm1 = 0.25;  // c_1
    double sum = 0.0, mk = m * m;
    for (int k = 2; k <= 14; ++k) {
        const double ckk = detail::series_ck(k, ckm1);
        const double bk = ckk * (2.0 * k) / (2.0 * k - 1.0) - 0.5 * ckm1;
        sum += bk * mk;
        mk *= m;
        ckm1 = ckk;
        if (std::abs(bk * mk) < 1e-20 * std::abs(sum)) break;
    }
    return 0.5 * pi * sum;
}

// K(m) - E(m); ~ (pi/4) m for small m.
inline double elliptic_k_minus_e(double m) {
    if (m > 0.01) {
        const auto [K, E] = complete_elliptic(m);
        return K - E;
    }
    double ck = 1.0, sum = 0.0, mk = 1.0;
    for (int k = 1; k <= 14; ++k) {
        ck = detail::series_ck(k, ck);
        mk *= m;
        const double dk = ck * (2.0 * k) / (2.0 * k - 1.0);
        sum += dk * mk;
        if (std::abs(dk * mk) < 1e-20 * std::abs(sum)) break;
    }
    return 0.5 * pi * sum;
}

// (1-m) K(m) + (m/2 - 1) E(m); ~ -(3 pi/32) m^2 for small m.
inline double elliptic_g2(double m) {
    if (m > 0.01) {
        const auto [K, E] = complete_elliptic(m);
        return (1.0 - m) * K + (0.5 * m - 1.0) * E;
    }
    double ckm1 = 0.25;  // c_1
    double sum = 0.0, mk = m * m;
    for (int k = 2; k <= 14; ++k) {
        const double ckk = detail::series_ck(k, ckm1);
        const double gk = ckk * (2.0 * k) / (2.0 * k - 1.0)
                        - ckm1 * (4.0 * k - 5.0) / (4.0 * k - 6.0);
        sum += gk * mk;
        mk *= m;
        ckm1 = ckk;
        if (std::abs(gk * mk) < 1e-20 * std::abs(sum)) break;
    }
    return 0.5 * pi * sum;
}

// Incomplete elliptic integrals F(beta|p), E(beta|p) in the parameter
// convention; `mprime` is the parameter of the integrals themselves
// (the complementary parameter alpha' = 1 - alpha in the Heuman Lambda
// composition). Both are odd in beta.
inline std::pair<double, double> incomplete_elliptic(double beta, double mprime) {
    if (!(std::abs(beta) <= pi / 2.0 + 1e-15))
        throw std::domain_error("incomplete_elliptic: |beta| must be <= pi/2");
    if (!(mprime >= 0.0 && mprime <= 1.0))
        throw std::domain_error("incomplete_elliptic: parameter outside [0,1]");
    const double s = std::sin(beta), c = std::cos(beta);
    const double s2 = s * s, c2 = c * c;
    const double q = 1.0 - mprime * s2;
    if (q <= 0.0 && c2 <= 0.0) {
        // mprime = 1, beta = +-pi/2: F diverges, E(beta|1) = sin(beta)
        const double inf = std::numeric_limits<double>::infinity();
        return {s > 0 ? inf : -inf, s};
    }
    const double rf = detail::carlson_rf(c2, q, 1.0);
    const double rd = detail::carlson_rd(c2, q, 1.0);
    return {s * rf, s * rf - mprime / 3.0 * s2 * s * rd};
}

// Heuman Lambda function Lambda0(beta, alpha), alpha in [0,1).
inline double heuman_lambda(double beta, double alpha) {
    if (!(alpha >= 0.0 && alpha < 1.0))
        throw std::domain_error("heuman_lambda: alpha outside [0,1)");
    if (alpha == 0.0) return std::sin(beta);
    const auto [K, E] = complete_elliptic(alpha);
    const auto [Fi, Ei] = incomplete_elliptic(beta, 1.0 - alpha);
    return 2.0 / pi * (E * Fi + K * Ei - K * Fi);
}

namespace detail {

// Ascending series; accurate to ~1e-14 absolute for |x| <= 9.
inline double bessel_j_series(int order, double x) {
    const double q = 0.25 * x * x;
    double term = (order == 0) ? 1.0 : 0.5 * x;
    double sum = term;
    for (int k = 1; k <= 40; ++k) {
        term *= -q / (k * (k + order));
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum) + 1e-300) break;
    }
    return sum;
}

// Miller backward recurrence with even-order normalization; uniformly
// accurate for moderate-to-large |x|.
inline void bessel_j01_miller(double x, double& j0, double& j1) {
    const int start = static_cast<int>(1.3 * x) + 60;
    double bp = 0.0, bc = 1e-300;
    double norm = 0.0, b0 = 0.0, b1 = 0.0;
    for (int k = start; k >= 1; --k) {
        const double bm = (2.0 * k / x) * bc - bp;
        bp = bc;
        bc = bm;
        if (k - 1 == 1) b1 = bc;
        if ((k - 1) % 2 == 0 && k - 1 > 0) norm += 2.0 * bc;
        if (std::abs(bc) > 1e290) {
            bp *= 1e-290;
            bc *= 1e-290;
            norm *= 1e-290;
            b1 *= 1e-290;
        }
    }
    b0 = bc;
    norm += b0;
    j0 = b0 / norm;
    j1 = b1 / norm;
}

}  // namespace detail

// Bessel function J0 or J1 of real argument.
inline double bessel_j(int order, double x) {
    if (order != 0 && order != 1)
        throw std::domain_error("bessel_j: order must be 0 or 1");
    const double ax = std::abs(x);
    double j;
    if (ax < 9.0) {
        j = detail::bessel_j_series(order, ax);
    } else {
        double j0, j1;
        detail::bessel_j01_miller(ax, j0, j1);
        j = (order == 0) ? j0 : j1;
    }
    if (order == 1 && x < 0.0) j = -j;
    return j;
}

// Ascending positive zeros of J0, refined by Newton iteration from the
// McMahon asymptotic estimates; each satisfies |J0(z)| <= 1e-12.
inline std::vector<double> bessel_j0_zeros(int count) {
    if (count < 1) throw std::domain_error("bessel_j0_zeros: count must be >= 1");
    std::vector<double> zeros;
    zeros.reserve(count);
    for (int k = 1; k <= count; ++k) {
        const double b = (k - 0.25) * pi;
        double z = b + 1.0 / (8.0 * b);  // McMahon estimate, Newton polishes
        for (int it = 0; it < 20; ++it) {
            const double f = bessel_j(0, z);
            const double df = -bessel_j(1, z);
            const double dz = f / df;
            z -= dz;
            if (std::abs(dz) < 1e-15 * z) break;
        }
        zeros.push_back(z);
    }
    return zeros;
}

}  // namespace axibem
