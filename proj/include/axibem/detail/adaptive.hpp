#pragma once

// Adaptive Gauss-Kronrod (G7,K15) quadrature on an interval, used by
// the self-test checks. Works for real- and complex-valued integrands.

#include <cmath>
#include <complex>
#include <type_traits>

namespace axibem::detail {

// 15-point Kronrod extension of the 7-point Gauss rule on [-1,1].
inline constexpr double gk_x[15] = {
    -0.991455371120813, -0.949107912342759, -0.864864423359769, -0.741531185599394,
    -0.586087235467691, -0.405845151377397, -0.207784955007898, 0.0,
    0.207784955007898,  0.405845151377397,  0.586087235467691,  0.741531185599394,
    0.864864423359769,  0.949107912342759,  0.991455371120813};
inline constexpr double gk_wk[15] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728,
    0.204432940075298, 0.190350578064785, 0.169004726639267, 0.140653259715525,
    0.104790010322250, 0.063092092629979, 0.022935322010529};
inline constexpr double gk_wg[7] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469,
    0.381830050505119, 0.279705391489277, 0.129484966168870};

template <class F>
auto gk15(F&& f, double a, double b) {
    using R = std::invoke_result_t<F&, double>;
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    R ik{}, ig{};
    for (int i = 0; i < 15; ++i) {
        const R v = f(c + h * gk_x[i]);
        ik += gk_wk[i] * v;
        if (i % 2 == 1) ig += gk_wg[i / 2] * v;
    }
    struct Out {
        R value;
        double err;
    };
    return Out{h * ik, std::abs(h * (ik - ig))};
}

namespace impl {
template <class F, class R>
R adapt_rec(F& f, double a, double b, double rel_tol, double abs_tol, int depth,
            const R& whole_scale) {
    auto est = gk15(f, a, b);
    if (est.err <= rel_tol * std::max(std::abs(est.value), std::abs(whole_scale)) + abs_tol ||
        depth <= 0 || b - a < 4e-16 * (std::abs(a) + std::abs(b)))
        return est.value;
    const double c = 0.5 * (a + b);
    return adapt_rec(f, a, c, rel_tol, 0.5 * abs_tol, depth - 1, whole_scale) +
           adapt_rec(f, c, b, rel_tol, 0.5 * abs_tol, depth - 1, whole_scale);
}
}  // namespace impl

// Refines until the local Kronrod error estimate drops below
// rel_tol * (global scale) + abs_tol on every subinterval.
template <class F>
auto adaptive_integrate(F&& f, double a, double b, double rel_tol = 1e-12,
                        double abs_tol = 1e-300, int depth = 40) {
    using R = std::invoke_result_t<F&, double>;
    const R scale = gk15(f, a, b).value;
    return impl::adapt_rec<F, R>(f, a, b, rel_tol, abs_tol, depth, scale);
}

}  // namespace axibem::detail
