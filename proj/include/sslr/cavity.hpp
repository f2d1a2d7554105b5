#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ray_matrix.hpp"

namespace sslr {

/// Asymmetric SSLR layout. RR1 (lens focal f1, mirror spacing l1) sits at the
/// transmitter, RR2 (f2, l2) at the receiver, and d separates the two outer
/// focal (IO) planes. Axial coordinates measured from mirror M1 (z = 0):
/// lens L1 at l1, gain medium at the IO plane l1 + f1, lens L2 at
/// l1 + f1 + d + f2, mirror M2 one l2 further.
struct CavityGeometry {
    double l1 = 0.0; ///< M1 to L1 spacing [m]
    double f1 = 0.0; ///< L1 focal length [m]
    double l2 = 0.0; ///< M2 to L2 spacing [m]
    double f2 = 0.0; ///< L2 focal length [m]
    double d = 0.0;  ///< IO-plane separation [m]

    double z_l1() const { return l1; }
    double z_g() const { return l1 + f1; }
    double z_l2() const { return l1 + f1 + d + f2; }
    double z_m2() const { return l1 + f1 + d + f2 + l2; }

    bool valid() const {
        return l1 > 0.0 && f1 > 0.0 && l2 > 0.0 && f2 > 0.0 && d >= 0.0 &&
               std::isfinite(l1 + f1 + l2 + f2 + d);
    }

    CavityGeometry at_distance(double dist) const {
        CavityGeometry g = *this;
        g.d = dist;
        return g;
    }
};

/// Stability classification of a geometry. With the single-pass matrix
/// [[A,B],[C,D]], the equivalent-mirror parameters are g1* = A, g2* = D and
/// the characteristic length L* = B; the resonator is stable iff the product
/// g1*·g2* lies strictly inside (0, 1).
struct StabilityReport {
    double g1_star = 0.0;
    double g2_star = 0.0;
    double l_star = 0.0; ///< B element of the single-pass matrix [m]
    double product = 0.0;
    bool stable = false;
};

inline void require_valid(const CavityGeometry& g) {
    if (!g.valid())
        throw std::invalid_argument("CavityGeometry: lengths must be positive and finite");
}

/// Single pass M1 -> M2 through both lenses and the free-space gap.
inline Mat2 sslr_single_pass(const CavityGeometry& g) {
    require_valid(g);
    return compose({free_space(g.l1), thin_lens(g.f1), free_space(g.f1),
                    free_space(g.d), free_space(g.f2), thin_lens(g.f2),
                    free_space(g.l2)});
}

/// Closed forms of the single-pass matrix elements.
inline Mat2 sslr_single_pass_closed(const CavityGeometry& g) {
    require_valid(g);
    const double f1 = g.f1, f2 = g.f2, l1 = g.l1, l2 = g.l2, d = g.d;
    const double a = -f2 / f1 - d / f1 + d * l2 / (f1 * f2);
    const double b = f1 + f2 - l2 * (f1 + d) / f2 - l1 * (f2 + d) / f1 +
                     d * l1 * l2 / (f1 * f2) + d;
    const double c = d / (f1 * f2);
    const double dd = -f1 / f2 - d / f2 + d * l1 / (f1 * f2);
    return {a, b, c, dd};
}

/// Stability product in its factored closed form. Exactly quadratic in d,
/// with p(0) = 1 for every geometry (zero separation is always marginal).
inline double stability_product(const CavityGeometry& g) {
    const double u1 = g.f1 * g.f1 + g.d * g.f1 - g.d * g.l1;
    const double u2 = g.f2 * g.f2 + g.d * g.f2 - g.d * g.l2;
    return u1 * u2 / (g.f1 * g.f1 * g.f2 * g.f2);
}

inline StabilityReport stability(const CavityGeometry& g) {
    const Mat2 m = sslr_single_pass_closed(g);
    StabilityReport rep;
    rep.g1_star = m.a;
    rep.g2_star = m.d;
    rep.l_star = m.b;
    rep.product = stability_product(g);
    rep.stable = rep.product > 0.0 && rep.product < 1.0;
    return rep;
}

namespace detail {

/// Marginal-endpoint allowance: the stability product equals 1 identically at
/// d = 0 for any FTCR pair, so requiring the strict condition at a range that
/// starts at zero separation would reject every geometry. A probe at d = 0 is
/// accepted when the product sits at 1 within this slack and treated as the
/// open end of the interval.
inline constexpr double marginal_tol = 1e-9;

inline bool probe_ok(const CavityGeometry& g, double dist, double d_min) {
    const double p = stability_product(g.at_distance(dist));
    if (p > 0.0 && p < 1.0)
        return true;
    return dist == d_min && d_min == 0.0 && std::fabs(p - 1.0) < marginal_tol;
}

} // namespace detail

/// True iff the geometry (with its d field ignored) keeps 0 < g1*·g2* < 1 at
/// every distance in [d_min, d_max]. Samples 601 equally spaced probes, then
/// refines by bisection wherever the product or (product - 1) changes sign
/// between neighbours; because the product is an exact quadratic in d, its
/// interior extremum is also checked directly.
inline bool stable_over_range(const CavityGeometry& g, double d_min, double d_max) {
    if (!(d_min <= d_max) || d_min < 0.0)
        throw std::invalid_argument("stable_over_range: need 0 <= d_min <= d_max");
    require_valid(g.at_distance(d_max));
    if (d_min == d_max)
        return stability(g.at_distance(d_min)).stable;

    constexpr int n_probe = 601;
    const double step = (d_max - d_min) / (n_probe - 1);
    double prev_p = 0.0;
    bool prev_marginal = false;
    for (int i = 0; i < n_probe; ++i) {
        const double dist = (i == n_probe - 1) ? d_max : d_min + i * step;
        const double p = stability_product(g.at_distance(dist));
        if (!detail::probe_ok(g, dist, d_min))
            return false;
        const bool marginal = dist == d_min && d_min == 0.0 &&
                              std::fabs(p - 1.0) < detail::marginal_tol;
        if (i > 0 && !prev_marginal) {
            // Refine when p or p-1 changes sign across the gap; a failed probe
            // at a refined point means the open condition breaks inside it.
            // The sub-interval leaving the marginal d = 0 point needs no
            // refinement here: the quadratic vertex check below covers it.
            const bool cross0 = (p > 0.0) != (prev_p > 0.0);
            const bool cross1 = (p > 1.0) != (prev_p > 1.0);
            if (cross0 || cross1) {
                double lo = dist - step, hi = dist;
                for (int it = 0; it < 60; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    if (!detail::probe_ok(g, mid, d_min))
                        return false;
                    const double pm = stability_product(g.at_distance(mid));
                    const bool same_side = cross0 ? ((pm > 0.0) == (prev_p > 0.0))
                                                  : ((pm > 1.0) == (prev_p > 1.0));
                    (same_side ? lo : hi) = mid;
                }
            }
        }
        prev_p = p;
        prev_marginal = marginal;
    }

    // Vertex check: the product expands to p(d) = 1 + qb·d + qa·d² with
    // qa = d1·d2/(f1²f2²), qb = -(d1/f1² + d2/f2²), d1 = l1-f1, d2 = l2-f2.
    // Checking its one interior extremum makes the scan exact; a coarse grid
    // alone could miss a narrow excursion above 1 or below 0.
    const double f1 = g.f1, f2 = g.f2;
    const double d1 = g.l1 - g.f1, d2 = g.l2 - g.f2;
    const double qa = d1 * d2 / (f1 * f1 * f2 * f2);
    const double qb = -(d1 / (f1 * f1) + d2 / (f2 * f2));
    if (qa != 0.0) {
        const double d_v = -qb / (2.0 * qa);
        if (d_v > d_min && d_v < d_max && !detail::probe_ok(g, d_v, d_min))
            return false;
    }
    return true;
}

} // namespace sslr
