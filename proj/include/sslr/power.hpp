#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "beam.hpp"
#include "cavity.hpp"
#include "constants.hpp"

namespace sslr {

using constants::pi;

/// Gain and SHG material data.
struct MaterialTable {
    double i_s = 1.1976e7;    ///< saturation intensity [W/m^2]
    double lambda = 1064e-9;  ///< fundamental wavelength [m]
    double eta_c = 0.439;     ///< combined pumping efficiency
    double d_eff = 4.7e-12;   ///< effective nonlinear coefficient [m/V]
    double n0 = 2.23;         ///< SHG crystal refractive index
};

/// Per-surface transmissivities and mirror reflectivities. The nu / 2nu
/// superscripts distinguish coatings at the fundamental and second-harmonic
/// frequencies.
struct LossTable {
    double gamma_l1 = 0.99;
    double gamma_l2 = 0.99;
    double gamma_l3 = 0.99;
    double gamma_l4 = 0.99;
    double gamma_shg = 0.99;    ///< SHG crystal transmissivity, SHG process aside
    double gamma_m2_2nu = 0.99; ///< M2 transmissivity at 2nu
    double gamma_m3_nu = 0.99;  ///< M3 transmissivity at nu
    double gamma_det = 0.995;
    double gamma_pv = 0.995;
    double gamma_g = 0.9851;     ///< gain medium transmissivity
    double gamma_g_eom = 0.9752; ///< gain medium + EOM pass on the IT chain
    double r_m1 = 0.995;
    double r_m3_2nu = 0.995; ///< M3 reflectivity at 2nu
    double alpha = 1e-4;     ///< air extinction [1/m]
};

/// Receiver-side functional design parameters.
struct FunctionalParams {
    double a_g = 1.5e-3;    ///< gain aperture radius [m]
    double r_m2_nu = 0.8;   ///< output mirror reflectivity at nu
    double l_s = 0.75e-3;   ///< SHG medium thickness [m]
};

/// Everything the circulation solve produces for one operating point.
struct PowerBreakdown {
    double p4 = 0.0;       ///< leftward traveling power [W]
    double p2 = 0.0;       ///< rightward traveling power [W]
    double eta_shg = 0.0;
    double r1 = 0.0;       ///< equivalent reflectivity, transmitter side
    double r2 = 0.0;       ///< equivalent reflectivity, receiver side
    double gamma_diff = 0.0;
    double eta_slop = 0.0;
    double p_th = 0.0;     ///< threshold input power [W]
    double p_recv_pt = 0.0;
    double p_recv_it = 0.0;
    double eta_trans = 0.0;
    double p_in = 0.0;
    double r_m2_nu = 0.0;  ///< copied from the functional parameters
    bool shg_clamped = false;      ///< an iterate proposed eta_SHG >= 1
    bool shg_model_warning = false; ///< converged eta_SHG >= 0.999
};

/// Raised when the coupled circulation solve exhausts its budget.
struct CirculationError : std::runtime_error {
    double residual;
    explicit CirculationError(double res)
        : std::runtime_error("solve_circulation: no fixed point within budget, residual " +
                             std::to_string(res) + " W"),
          residual(res) {}
};

/// Fundamental-mode survival of one round trip through an aperture of radius
/// a_g when the local mode radius is w00_g.
inline double diffraction_coeff(double a_g, double w00_g) {
    if (a_g <= 0.0 || w00_g <= 0.0)
        throw std::invalid_argument("diffraction_coeff: radii must be positive");
    const double r = a_g / w00_g;
    return 1.0 - std::exp(-2.0 * r * r);
}

/// Equivalent reflectivities seen by the circulating field. Each
/// retroreflection bounces off its mirror once and crosses its lens twice,
/// so R_RR1 = R_M1 * gamma_L1^2 and R_RR2 = R_M2_nu * gamma_L2^2; the air is
/// crossed twice per round trip, hence gamma_air squared inside R2.
inline std::pair<double, double> equivalent_reflectivities(const FunctionalParams& m,
                                                           const LossTable& loss,
                                                           double eta_shg,
                                                           double gamma_diff, double d) {
    const double r_rr1 = loss.r_m1 * loss.gamma_l1 * loss.gamma_l1;
    const double r_rr2 = m.r_m2_nu * loss.gamma_l2 * loss.gamma_l2;
    const double gamma_air = std::exp(-loss.alpha * d);
    const double one_minus = 1.0 - eta_shg;
    const double r1 = one_minus * one_minus * loss.gamma_shg * loss.gamma_shg * r_rr1;
    const double r2 = loss.gamma_g * loss.gamma_g * gamma_air * gamma_air * r_rr2 * gamma_diff;
    return {r1, r2};
}

/// Rigrod circulating power for frozen reflectivities, clamped at zero.
inline double rigrod_p4(double p_in, double a_g, const MaterialTable& mat, double r1,
                        double r2) {
    if (r1 <= 0.0 || r2 <= 0.0)
        return 0.0;
    const double sat = pi * a_g * a_g * mat.i_s;
    const double root_ratio = std::sqrt(r1 / r2);
    const double root_prod = std::sqrt(r1 * r2);
    const double p4 = sat / ((1.0 + root_ratio) * (1.0 - root_prod)) *
                      (mat.eta_c * p_in / sat - std::log(1.0 / root_prod));
    return p4 > 0.0 ? p4 : 0.0;
}

/// Slope efficiency and threshold power of the affine form
/// P4 = eta_slop * (P_in - P_th), algebraically identical to the Rigrod
/// expression at frozen R1, R2.
inline std::pair<double, double> slope_threshold(const FunctionalParams& m,
                                                 const MaterialTable& mat, double r1,
                                                 double r2) {
    if (r1 <= 0.0 || r2 <= 0.0 || r1 * r2 >= 1.0)
        throw std::domain_error("slope_threshold: need 0 < R1*R2 < 1");
    const double sat = pi * m.a_g * m.a_g * mat.i_s;
    const double root_ratio = std::sqrt(r1 / r2);
    const double root_prod = std::sqrt(r1 * r2);
    const double eta_slop =
        mat.eta_c / ((1.0 + root_ratio) * (1.0 - root_prod));
    const double p_th = sat / mat.eta_c * std::log(1.0 / root_prod);
    return {eta_slop, p_th};
}

/// SHG conversion coupling k_shg = 8 pi^2 d_eff^2 l_s^2 / (eps0 c lambda^2 n0^3),
/// so that eta_SHG = k_shg * 2 P4 / (pi w(0)^2).
inline double shg_coupling(const MaterialTable& mat, double l_s) {
    const double num = 8.0 * pi * pi * mat.d_eff * mat.d_eff * l_s * l_s;
    const double den = constants::eps0 * constants::c0 * mat.lambda * mat.lambda *
                       mat.n0 * mat.n0 * mat.n0;
    return num / den;
}

/// Received optical powers on the two branches. The power-transfer beam
/// leaves through M2 at nu and passes L2, air, M3, L3, PV entry; the
/// information-transfer beam is the SHG output collected from both traveling
/// directions (factor 2), crossing the gain/EOM region, L1, air, and the
/// 2nu-coated M2 and M3 surfaces onto the detector.
inline std::pair<double, double> received_powers(const PowerBreakdown& pb,
                                                 const LossTable& loss, double d) {
    const double gamma_air = std::exp(-loss.alpha * d);
    const double gamma_m2_nu = 1.0 - pb.r_m2_nu;
    const double p_pt = loss.gamma_pv * loss.gamma_l3 * loss.gamma_m3_nu * gamma_m2_nu *
                        loss.gamma_l2 * gamma_air * pb.p2;
    const double p_it = 2.0 * pb.eta_shg * loss.gamma_det * loss.gamma_l4 *
                        loss.r_m3_2nu * loss.gamma_m2_2nu * loss.gamma_l2 * gamma_air *
                        loss.gamma_g_eom * loss.gamma_l1 * pb.p4;
    return {p_pt, p_it};
}

namespace detail {

struct CirculationContext {
    double p_in = 0.0;
    double k_shg = 0.0;
    double w0_sq = 0.0; ///< w(0)^2, beam cross-section at the SHG plane
    double gamma_diff = 0.0;
    double d = 0.0;
    const FunctionalParams* m = nullptr;
    const MaterialTable* mat = nullptr;
    const LossTable* loss = nullptr;
    mutable bool clamped = false;

    double eta_of(double p4) const {
        double eta = k_shg * 2.0 * p4 / (pi * w0_sq);
        if (eta >= 1.0) {
            clamped = true;
            eta = 1.0 - 1e-12;
        }
        return eta < 0.0 ? 0.0 : eta;
    }

    double p4_of_eta(double eta) const {
        const auto [r1, r2] = equivalent_reflectivities(*m, *loss, eta, gamma_diff, d);
        return rigrod_p4(p_in, m->a_g, *mat, r1, r2);
    }

    /// One application of the substituted scalar map F(P4).
    double map(double p4) const { return p4_of_eta(eta_of(p4)); }
};

} // namespace detail

/// Solves the coupled four-equation circulation system for a self-consistent
/// (P4, eta_SHG) pair. Damped fixed-point iteration (factor 0.5) starting
/// from the decoupled l_s = 0 closed form; on oscillation or a spent budget
/// it falls back to bisection on the scalar residual P4 - F(P4), which is
/// strictly increasing because F decreases in P4. The bisection bracket top
/// starts at eta_c * P_in and doubles until the residual turns positive; the
/// circulating power of a low-loss cavity legitimately exceeds the absorbed
/// pump power, so a fixed top would miss such roots.
inline PowerBreakdown solve_circulation(double p_in, const CavityGeometry& g,
                                        const FunctionalParams& m,
                                        const MaterialTable& mat, const LossTable& loss) {
    if (p_in < 0.0)
        throw std::invalid_argument("solve_circulation: P_in must be nonnegative");

    const double w00_g = w00_at(g, mat.lambda, g.z_g());
    const double w0 = m.a_g / w00_g * w00_at(g, mat.lambda, 0.0);

    detail::CirculationContext ctx;
    ctx.p_in = p_in;
    ctx.k_shg = shg_coupling(mat, m.l_s);
    ctx.w0_sq = w0 * w0;
    ctx.gamma_diff = diffraction_coeff(m.a_g, w00_g);
    ctx.d = g.d;
    ctx.m = &m;
    ctx.mat = &mat;
    ctx.loss = &loss;

    double p4 = ctx.p4_of_eta(0.0);
    double residual = std::fabs(ctx.map(p4) - p4);
    bool need_fallback = false;
    double prev_residual = residual;
    int worse_streak = 0;
    for (int it = 0; it < 200 && residual >= 1e-9; ++it) {
        const double next = p4 + 0.5 * (ctx.map(p4) - p4);
        p4 = next;
        residual = std::fabs(ctx.map(p4) - p4);
        if (!std::isfinite(residual)) {
            need_fallback = true;
            break;
        }
        worse_streak = residual > prev_residual ? worse_streak + 1 : 0;
        prev_residual = residual;
        if (worse_streak >= 3) { // oscillating or diverging
            need_fallback = true;
            break;
        }
    }
    if (residual >= 1e-9)
        need_fallback = true;

    if (need_fallback) {
        double lo = 0.0, hi = mat.eta_c * p_in;
        if (hi <= 0.0)
            hi = 1.0;
        int guard = 0;
        while (ctx.map(hi) - hi > 0.0 && guard++ < 64)
            hi *= 2.0;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (mid - ctx.map(mid) < 0.0)
                lo = mid;
            else
                hi = mid;
        }
        p4 = 0.5 * (lo + hi);
        residual = std::fabs(ctx.map(p4) - p4);
        if (!(residual < 1e-9))
            throw CirculationError(residual);
    }

    PowerBreakdown pb;
    pb.p4 = p4;
    pb.eta_shg = ctx.eta_of(p4);
    const auto [r1, r2] = equivalent_reflectivities(m, loss, pb.eta_shg, ctx.gamma_diff, g.d);
    pb.r1 = r1;
    pb.r2 = r2;
    pb.gamma_diff = ctx.gamma_diff;
    pb.p2 = (pb.p4 > 0.0 && r2 > 0.0) ? std::sqrt(r1 / r2) * pb.p4 : 0.0;
    if (r1 > 0.0 && r2 > 0.0 && r1 * r2 < 1.0) {
        const auto [eta_slop, p_th] = slope_threshold(m, mat, r1, r2);
        pb.eta_slop = eta_slop;
        pb.p_th = p_th;
    }
    pb.p_in = p_in;
    pb.r_m2_nu = m.r_m2_nu;
    pb.shg_clamped = ctx.clamped;
    pb.shg_model_warning = pb.eta_shg >= 0.999;
    const auto [p_pt, p_it] = received_powers(pb, loss, g.d);
    pb.p_recv_pt = p_pt;
    pb.p_recv_it = p_it;
    pb.eta_trans = p_in > 0.0 ? (p_pt + p_it) / p_in : 0.0;
    return pb;
}

} // namespace sslr
