#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <utility>
#include <vector>

#include "cavity.hpp"
#include "constants.hpp"

namespace sslr {

using Complex = std::complex<double>;

/// TEM00 mode radii sampled along the cavity axis.
struct BeamProfile {
    CavityGeometry geometry;
    double lambda = 0.0;
    std::vector<std::pair<double, double>> samples; ///< (z [m], w00 [m])
};

namespace detail {

inline Complex lens_transform(const Complex& q, double f) {
    return q / (-q / f + 1.0);
}

} // namespace detail

/// Self-consistent q at the M1 plane, q(0) = j|L*|·sqrt(g2*/(g1*(1-g1*g2*))).
inline Complex q_initial(const CavityGeometry& g) {
    const StabilityReport s = stability(g);
    const double denom = s.g1_star * (1.0 - s.product);
    if (!s.stable || denom == 0.0 || s.g2_star / denom <= 0.0)
        throw std::domain_error("q_initial: resonator unstable at this distance");
    return Complex(0.0, std::fabs(s.l_star) * std::sqrt(s.g2_star / denom));
}

/// Complex beam parameter at axial position z, following the piecewise
/// definition: free-space advance from q(0), with the lens transform
/// q -> q/(-q/f + 1) applied when crossing L1 and L2. At an element plane
/// the pre-lens value is returned.
inline Complex q_at(const CavityGeometry& g, double z) {
    require_valid(g);
    if (z < 0.0 || z > g.z_m2())
        throw std::out_of_range("q_at: z outside [0, z_M2]");
    Complex q = q_initial(g);
    if (z <= g.z_l1())
        return q + z;
    q = detail::lens_transform(q + g.z_l1(), g.f1);
    if (z <= g.z_l2())
        return q + (z - g.z_l1());
    q = detail::lens_transform(q + (g.z_l2() - g.z_l1()), g.f2);
    return q + (z - g.z_l2());
}

/// TEM00 mode radius w00(z) = sqrt(-lambda / (pi * Im[1/q(z)])).
inline double w00_at(const CavityGeometry& g, double lambda, double z) {
    if (lambda <= 0.0)
        throw std::invalid_argument("w00_at: wavelength must be positive");
    const Complex q = q_at(g, z);
    const double im_inv = std::imag(1.0 / q);
    if (im_inv >= 0.0)
        throw std::domain_error("w00_at: non-physical beam (Im[1/q] >= 0)");
    return std::sqrt(-lambda / (constants::pi * im_inv));
}

/// Beam radius scaled by the propagation factor a_g / w00(z_g), so the beam
/// fills the gain aperture exactly: w(z_g) = a_g.
inline double w_at(const CavityGeometry& g, double lambda, double a_g, double z) {
    if (a_g <= 0.0)
        throw std::invalid_argument("w_at: aperture radius must be positive");
    return a_g / w00_at(g, lambda, g.z_g()) * w00_at(g, lambda, z);
}

/// Samples w00 on a uniform grid over [0, z_M2]. The element planes z_L1,
/// z_g, z_L2 are inserted as exact sample points so the slope breaks at the
/// lenses land on samples rather than between them.
inline BeamProfile profile(const CavityGeometry& g, double lambda, int n_samples) {
    if (n_samples < 2)
        throw std::invalid_argument("profile: need at least two samples");
    require_valid(g);
    const double z_end = g.z_m2();
    std::vector<double> zs;
    zs.reserve(static_cast<std::size_t>(n_samples) + 3);
    for (int i = 0; i < n_samples; ++i)
        zs.push_back(z_end * i / (n_samples - 1));
    for (double plane : {g.z_l1(), g.z_g(), g.z_l2()})
        zs.push_back(plane);
    std::sort(zs.begin(), zs.end());
    zs.erase(std::unique(zs.begin(), zs.end()), zs.end());

    BeamProfile p{g, lambda, {}};
    p.samples.reserve(zs.size());
    for (double z : zs)
        p.samples.emplace_back(z, w00_at(g, lambda, z));
    return p;
}

} // namespace sslr
