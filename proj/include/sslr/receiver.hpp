#pragma once

#include <cmath>
#include <stdexcept>

#include "constants.hpp"

namespace sslr {

/// Single-diode PV cell model parameters.
struct PVParams {
    double rho = 0.6;      ///< responsivity [A/W]
    double i0 = 0.32e-6;   ///< reverse saturation current [A]
    double r_sh = 53.82;   ///< shunt resistance [ohm]
    double r_s = 0.037;    ///< series resistance [ohm]
    double n = 1.48;       ///< diode ideality factor
    double n_s = 1.0;      ///< cells in series
    double t = 298.0;      ///< temperature [K]

    double v_t() const { return constants::k_boltzmann * t / constants::q_electron; }
};

/// Photodetector front-end parameters for the information branch.
struct PDParams {
    double gamma = 0.4;    ///< responsivity [A/W]
    double i_bk = 5100e-6; ///< background radiation current [A]
    double b = 800e6;      ///< bandwidth [Hz]
    double r_il = 1e4;     ///< load resistance [ohm]
    double t = 298.0;      ///< temperature [K]
};

/// One point on the PV output curve, parametrized by the diode voltage V_d.
struct PVOperatingPoint {
    double v_chg = 0.0;
    double i_chg = 0.0;
    double v_d = 0.0;
    double p_chg = 0.0;
    double r_pl = 0.0; ///< equivalent load V_chg / I_chg [ohm]
};

/// Evaluates the single-diode equations at a given diode voltage. Points with
/// negative current are legal here; the MPPT search excludes them.
inline PVOperatingPoint iv_curve_point(double p_opt, double v_d, const PVParams& pv) {
    if (p_opt < 0.0 || v_d < 0.0)
        throw std::invalid_argument("iv_curve_point: need P_opt >= 0 and V_d >= 0");
    const double i_d = pv.i0 * std::expm1(v_d / (pv.n_s * pv.n * pv.v_t()));
    PVOperatingPoint op;
    op.v_d = v_d;
    op.i_chg = pv.rho * p_opt - i_d - v_d / pv.r_sh;
    op.v_chg = v_d - op.i_chg * pv.r_s;
    op.p_chg = op.v_chg * op.i_chg;
    op.r_pl = op.i_chg != 0.0 ? op.v_chg / op.i_chg : 0.0;
    return op;
}

namespace detail {

/// Diode voltage at which I_chg crosses zero, found by bisection. The
/// analytic bound n_s*n*V_T*ln(rho P/I0 + 1) already gives I_chg <= 0, so it
/// brackets the root together with V_d = 0.
inline double open_circuit_vd(double p_opt, const PVParams& pv) {
    if (p_opt <= 0.0)
        return 0.0;
    double lo = 0.0;
    double hi = pv.n_s * pv.n * pv.v_t() * std::log1p(pv.rho * p_opt / pv.i0);
    for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        (iv_curve_point(p_opt, mid, pv).i_chg > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace detail

/// Maximum-power operating point over the V_d-parametrized curve restricted
/// to nonnegative current. Golden-section search on [0, V_oc_d] to 1e-6 V,
/// guarded by a coarse grid: if the grid beats the golden result the curve is
/// not unimodal for these parameters and a dense-grid scan takes over.
inline PVOperatingPoint mppt(double p_opt, const PVParams& pv) {
    if (p_opt < 0.0)
        throw std::invalid_argument("mppt: P_opt must be nonnegative");
    if (p_opt == 0.0)
        return {};
    const double v_oc = detail::open_circuit_vd(p_opt, pv);
    const auto value = [&](double v_d) { return iv_curve_point(p_opt, v_d, pv).p_chg; };

    const double inv_phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = 0.0, b = v_oc;
    double x1 = b - inv_phi * (b - a), x2 = a + inv_phi * (b - a);
    double f1 = value(x1), f2 = value(x2);
    while (b - a > 1e-6) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = value(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = value(x1);
        }
    }
    double best_vd = 0.5 * (a + b);
    double best = value(best_vd);

    // Unimodality guard: a multi-modal curve would let a coarse scan find a
    // better lobe than the golden section; fall back to a dense grid then.
    constexpr int n_coarse = 32;
    double grid_best = -1.0, grid_vd = 0.0;
    for (int i = 0; i <= n_coarse; ++i) {
        const double v = v_oc * i / n_coarse;
        const double p = value(v);
        if (p > grid_best) {
            grid_best = p;
            grid_vd = v;
        }
    }
    if (grid_best > best * (1.0 + 1e-6)) {
        constexpr int n_dense = 20000;
        best = grid_best;
        best_vd = grid_vd;
        for (int i = 0; i <= n_dense; ++i) {
            const double v = v_oc * i / n_dense;
            const double p = value(v);
            if (p > best) {
                best = p;
                best_vd = v;
            }
        }
    }

    PVOperatingPoint op = iv_curve_point(p_opt, best_vd, pv);
    if (op.i_chg < 0.0)
        return iv_curve_point(p_opt, 0.0, pv); // degenerate curve, keep I >= 0
    return op;
}

/// Receiver noise variance: shot noise of signal plus background, plus the
/// thermal term of the load.
inline double noise_variance(double p_recv_it, const PDParams& pd) {
    if (p_recv_it < 0.0)
        throw std::invalid_argument("noise_variance: power must be nonnegative");
    return 2.0 * constants::q_electron * (pd.gamma * p_recv_it + pd.i_bk) * pd.b +
           4.0 * constants::k_boltzmann * pd.t * pd.b / pd.r_il;
}

/// Intensity-modulation achievable rate, 0.5*log2(1 + (gamma P)^2/(2 pi e sigma^2)).
inline double achievable_rate(double p_recv_it, const PDParams& pd) {
    const double sigma_sq = noise_variance(p_recv_it, pd);
    const double signal = pd.gamma * p_recv_it;
    const double snr =
        signal * signal / (2.0 * constants::pi * constants::euler_e * sigma_sq);
    return 0.5 * std::log2(1.0 + snr);
}

} // namespace sslr
