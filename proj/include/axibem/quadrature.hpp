#pragma once

// Gauss-Legendre rules on [0,1] and the regularizing coordinate
// transforms for singular element-pair integrals of 2D Galerkin BEM:
// coincident pairs (log or Cauchy singularity on the diagonal) and
// touching pairs (singularity at a shared corner of the parameter
// square), plus dyadic refinement for near-singular separated pairs.

#include <cmath>
#include <limits>
#include <stdexcept>
#include <type_traits>
#include <vector>

namespace axibem {

struct QuadRule {
    std::vector<double> nodes;    // strictly inside (0,1), ascending
    std::vector<double> weights;  // positive, summing to 1
    int size() const { return static_cast<int>(nodes.size()); }
};

namespace detail {

// Newton iteration on the Legendre recurrence; no range cap, callers
// go through gauss_legendre_01 for the public contract.
inline QuadRule legendre_rule_unchecked(int n) {
    QuadRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double z = std::cos(3.14159265358979323846 * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        // converge, then two fixed polish steps to land the root at
        // rounding level
        int polish = 2;
        for (int it = 0; it < 100; ++it) {
            double p1 = 1.0, p2 = 0.0;
            for (int j = 1; j <= n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
            }
            pp = n * (z * p1 - p2) / (z * z - 1.0);
            const double dz = p1 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-14 && --polish < 0) break;
        }
        const double w = 2.0 / ((1.0 - z * z) * pp * pp);
        rule.nodes[i] = 0.5 * (1.0 - z);
        rule.nodes[n - 1 - i] = 0.5 * (1.0 + z);
        rule.weights[i] = 0.5 * w;
        rule.weights[n - 1 - i] = 0.5 * w;
    }
    return rule;
}

// A pair of mapped quadrature points sharing one weight. The two
// points are the images of the same (u,v) node under the two triangle
// mappings; summing their integrand values before accumulation is
// what cancels the Cauchy singularity.
struct DuoNode {
    double xi1, eta1, xi2, eta2, w;
};

struct CellNode {
    double xi, eta, w;
};

// Coincident pair: diagonal split, Duffy mapping with Jacobian (1-u),
// clustering substitutions v = t^p_v toward the singular edge and
// (1-u) = s^p_u toward the opposite Jacobian endpoint.
inline void coincident_duos(const QuadRule& rule, double p_v, double p_u,
                            std::vector<DuoNode>& out) {
    out.clear();
    const int n = rule.size();
    out.reserve(static_cast<size_t>(n) * n);
    for (int i = 0; i < n; ++i) {
        const double s = rule.nodes[i];
        const double one_minus_u = std::pow(1.0 - s, p_u);
        const double u = 1.0 - one_minus_u;
        const double ju = p_u * std::pow(1.0 - s, p_u - 1.0);
        for (int j = 0; j < n; ++j) {
            const double t = rule.nodes[j];
            const double v = std::pow(t, p_v);
            const double jv = p_v * std::pow(t, p_v - 1.0);
            const double eta = u + one_minus_u * v;
            // under strong grading the offset can round away entirely;
            // the true contribution of such a node is below noise
            if (eta == u) continue;
            const double w = rule.weights[i] * rule.weights[j] * ju * jv * one_minus_u;
            out.push_back({u, eta, eta, u, w});
        }
    }
}

// Touching pair with the shared point at parameter corner (cx, ceta).
// Both triangles of the anti-diagonal split touch the singular corner,
// so each is collapsed onto it by its own vertex Duffy mapping
// (Jacobian u); the fixed substitution u = s^3 removes the remaining
// u*ln(u) endpoint behavior of weakly singular kernels.
inline void touching_duos(const QuadRule& rule, int cxi, int ceta,
                          std::vector<DuoNode>& out) {
    out.clear();
    const double p = 3.0;
    const int n = rule.size();
    out.reserve(static_cast<size_t>(n) * n);
    auto rx = [&](double xi) { return cxi == 1 ? xi : 1.0 - xi; };
    auto re = [&](double eta) { return ceta == 0 ? eta : 1.0 - eta; };
    for (int i = 0; i < n; ++i) {
        const double s = rule.nodes[i];
        const double u = std::pow(s, p);
        const double jac = p * std::pow(s, p - 1.0) * u;
        for (int j = 0; j < n; ++j) {
            const double w = rule.nodes[j];
            const double wt = rule.weights[i] * rule.weights[j] * jac;
            out.push_back({rx(1.0 - u), re(u * w), rx(1.0 - u * (1.0 - w)), re(u), wt});
        }
    }
}

inline void tensor_cells(const QuadRule& rule, std::vector<CellNode>& out) {
    out.clear();
    const int n = rule.size();
    out.reserve(static_cast<size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            out.push_back({rule.nodes[i], rule.nodes[j],
                           rule.weights[i] * rule.weights[j]});
}

// Dyadic subdivision of the eta interval toward eta_star, tensor rule
// per cell.
inline void near_cells(const QuadRule& rule, double eta_star, int depth,
                       std::vector<CellNode>& out) {
    out.clear();
    struct Cell {
        double lo, hi;
    };
    std::vector<Cell> cells;
    double lo = 0.0, hi = 1.0;
    for (int d = 0; d < depth; ++d) {
        const double mid = 0.5 * (lo + hi);
        if (eta_star <= mid) {
            cells.push_back({mid, hi});
            hi = mid;
        } else {
            cells.push_back({lo, mid});
            lo = mid;
        }
    }
    cells.push_back({lo, hi});
    const int n = rule.size();
    out.reserve(cells.size() * n * n);
    for (const auto& c : cells) {
        const double len = c.hi - c.lo;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                out.push_back({rule.nodes[i], c.lo + len * rule.nodes[j],
                               rule.weights[i] * (rule.weights[j] * len)});
    }
}

}  // namespace detail

// n-point Gauss-Legendre rule mapped to [0,1]; deterministic.
inline QuadRule gauss_legendre_01(int n) {
    if (n < 1 || n > 128)
        throw std::domain_error("gauss_legendre_01: n must be in [1,128]");
    return detail::legendre_rule_unchecked(n);
}

// Orientation of the shared geometric point of a touching pair, given
// as the (xi, eta) parameter corner of the unit square.
struct TouchingCorner {
    int xi;   // 0 or 1
    int eta;  // 0 or 1
};

enum class PairKind { Coincident, Touching, Separated };

// Configuration of an element pair: the two singular cases, or
// Separated with the min-distance / max-chord ratio that drives the
// near-singular refinement.
struct PairConfig {
    PairKind kind = PairKind::Separated;
    int corner_xi = 1, corner_eta = 0;  // touching orientation
    double distance_ratio = std::numeric_limits<double>::infinity();
};

// Coincident-pair integral of the full product integrand F (kernel,
// shapes, Jacobians and r-weights included). Cauchy kernels are
// regularized by the pairwise summation; graded_p / graded_u cluster
// nodes for logarithmic kernels.
template <class F>
auto duffy_coincident(F&& f, const QuadRule& rule, double graded_p = 1.0,
                      double graded_u = 1.0) {
    using R = std::invoke_result_t<F&, double, double>;
    if (!(graded_p >= 1.0) || !(graded_u >= 1.0))
        throw std::domain_error("duffy_coincident: grading exponents must be >= 1");
    std::vector<detail::DuoNode> duos;
    detail::coincident_duos(rule, graded_p, graded_u, duos);
    R acc{};
    for (const auto& d : duos) acc += d.w * (f(d.xi1, d.eta1) + f(d.xi2, d.eta2));
    return acc;
}

// Touching-pair integral; the shared geometric point sits at the given
// parameter corner.
template <class F>
auto duffy_touching(F&& f, const QuadRule& rule, TouchingCorner corner = {1, 0}) {
    using R = std::invoke_result_t<F&, double, double>;
    if ((corner.xi != 0 && corner.xi != 1) || (corner.eta != 0 && corner.eta != 1))
        throw std::domain_error("duffy_touching: corner components must be 0 or 1");
    std::vector<detail::DuoNode> duos;
    detail::touching_duos(rule, corner.xi, corner.eta, duos);
    R acc{};
    for (const auto& d : duos) acc += d.w * (f(d.xi1, d.eta1) + f(d.xi2, d.eta2));
    return acc;
}

// Plain tensor-product rule for well-separated smooth pairs.
template <class F>
auto integrate_regular_pair(F&& f, const QuadRule& rule) {
    using R = std::invoke_result_t<F&, double, double>;
    std::vector<detail::CellNode> cells;
    detail::tensor_cells(rule, cells);
    R acc{};
    for (const auto& c : cells) acc += c.w * f(c.xi, c.eta);
    return acc;
}

// Near-singular separated pairs: the eta interval is subdivided
// dyadically toward eta_star, with the plain tensor rule on each cell.
template <class F>
auto near_singular_value(F&& f, const QuadRule& rule, double xi_star, double eta_star,
                         int depth) {
    using R = std::invoke_result_t<F&, double, double>;
    (void)xi_star;  // the peak location along xi needs no subdivision
    if (depth < 0 || depth > 8)
        throw std::domain_error("near_singular_value: depth must be in [0,8]");
    std::vector<detail::CellNode> cells;
    detail::near_cells(rule, eta_star, depth, cells);
    R acc{};
    for (const auto& c : cells) acc += c.w * f(c.xi, c.eta);
    return acc;
}

}  // namespace axibem
