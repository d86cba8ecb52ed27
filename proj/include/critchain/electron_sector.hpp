#pragma once
// critchain -- half-filled electron sector on a 1D tight-binding ring.
//
// The photon modules only ever need two numbers from the electrons: the
// kinetic expectation T_bar and the current expectation J_bar, either for a
// filled momentum window centered at s (ground-state data) or for the
// pump/loss steady occupation n(k) = 1/(eta (1 + sin k) + 1) (driven data).
// Both come in a Continuum (closed-form) and a Discrete (grid-sum) flavor.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "critchain/errors.hpp"
#include "critchain/model.hpp"

namespace critchain {

/// Which evaluation of the band sums to use.
enum class Form { Continuum, Discrete };

/// Momentum grid k_j = -pi + 2 pi (j+1)/L, j = 0..L-1, i.e. k in (-pi, pi].
struct MomentumGrid {
    std::vector<double> k;
    static MomentumGrid make(int n_sites) {
        if (n_sites < 1) throw RangeError("MomentumGrid: n_sites must be >= 1");
        MomentumGrid g;
        g.k.resize(static_cast<std::size_t>(n_sites));
        for (int j = 0; j < n_sites; ++j) {
            g.k[static_cast<std::size_t>(j)] =
                -kPi + 2.0 * kPi * (j + 1) / static_cast<double>(n_sites);
        }
        return g;
    }
};

/// Kinetic/current expectations together with the window center they refer to.
struct ElectronSummary {
    double t_bar = 0.0;
    double j_bar = 0.0;
    double s_center = 0.0;
    Form mode = Form::Continuum;
};

namespace detail {
/// Signed distance of k from the window center s, wrapped into [-pi, pi].
inline double wrap_delta(double k, double s) { return std::remainder(k - s, 2.0 * kPi); }
}  // namespace detail

/// Expectations of the half-filled Fermi window centered at momentum s:
/// the occupied modes are those with k in (s - pi/2, s + pi/2) on the ring.
///
/// Continuum: T_bar = 2 t_hop L cos(s)/pi, J_bar = 2 t_hop L sin(s)/pi.
/// Discrete:  sums of 2 t_hop cos(k) and 2 t_hop sin(k) over the occupied grid
/// modes -- the same sign convention as the continuum closed forms, so the two
/// forms agree up to O(1/L).  Modes landing exactly on a window edge are
/// included from the lower edge first until exactly L/2 modes are occupied;
/// if half filling still cannot be met, HalfFillingError is thrown.
inline ElectronSummary fs_expectations(const SystemParams& p, double s, Form form) {
    ElectronSummary out;
    out.s_center = s;
    out.mode = form;
    if (form == Form::Continuum) {
        out.t_bar = 2.0 * p.t_hop * p.n_sites * std::cos(s) / kPi;
        out.j_bar = 2.0 * p.t_hop * p.n_sites * std::sin(s) / kPi;
        return out;
    }
    const int L = p.n_sites;
    if (L < 2 || L % 2 != 0) {
        throw HalfFillingError("fs_expectations: discrete form requires even n_sites >= 2");
    }
    const MomentumGrid grid = MomentumGrid::make(L);
    constexpr double kEdgeTol = 1e-9;
    const double half = kPi / 2.0;
    std::vector<double> occupied;
    std::vector<double> low_edge, high_edge;
    occupied.reserve(static_cast<std::size_t>(L / 2 + 2));
    for (double k : grid.k) {
        const double d = detail::wrap_delta(k, s);
        if (std::abs(d + half) <= kEdgeTol) {
            low_edge.push_back(k);
        } else if (std::abs(d - half) <= kEdgeTol) {
            high_edge.push_back(k);
        } else if (std::abs(d) < half) {
            occupied.push_back(k);
        }
    }
    const std::size_t need = static_cast<std::size_t>(L / 2);
    if (occupied.size() > need) {
        throw HalfFillingError("fs_expectations: window holds more than L/2 modes");
    }
    for (const auto* edge : {&low_edge, &high_edge}) {
        for (double k : *edge) {
            if (occupied.size() < need) occupied.push_back(k);
        }
    }
    if (occupied.size() != need) {
        throw HalfFillingError("fs_expectations: cannot reach half filling in the window");
    }
    double tb = 0.0, jb = 0.0;
    for (double k : occupied) {
        tb += 2.0 * p.t_hop * std::cos(k);
        jb += 2.0 * p.t_hop * std::sin(k);
    }
    out.t_bar = tb;
    out.j_bar = jb;
    return out;
}

/// Steady occupation of mode k under pump gamma_pump and loss kappa_el:
/// n(k) = 1 / (eta (1 + sin k) + 1) with eta = kappa_el/gamma_pump.
inline double steady_occupation(const SystemParams& p, double k) {
    const double eta = effective_eta(p);
    return 1.0 / (eta * (1.0 + std::sin(k)) + 1.0);
}

/// Band expectations in the pump/loss steady state.
/// Continuum: T_bar = 0 exactly, J_bar = L t_hop f(eta).
/// Discrete: full-grid sums of 2 t_hop cos(k) n(k) and 2 t_hop sin(k) n(k)
/// (spectrally accurate for the smooth periodic occupation, and T_bar cancels
/// pairwise under k -> pi - k).
inline ElectronSummary steady_expectations(const SystemParams& p, Form form) {
    ElectronSummary out;
    out.s_center = std::nan("");
    out.mode = form;
    if (form == Form::Continuum) {
        out.t_bar = 0.0;
        out.j_bar = p.n_sites * p.t_hop * band_asymmetry(effective_eta(p));
        return out;
    }
    const MomentumGrid grid = MomentumGrid::make(p.n_sites);
    double tb = 0.0, jb = 0.0;
    for (double k : grid.k) {
        const double n = steady_occupation(p, k);
        tb += 2.0 * p.t_hop * std::cos(k) * n;
        jb += 2.0 * p.t_hop * std::sin(k) * n;
    }
    out.t_bar = tb;
    out.j_bar = jb;
    return out;
}

/// Relaxation of one mode's occupation from n0 toward the steady value:
/// dn/dt = -4 kappa_el (1 + sin k) n + 4 gamma_pump (1 - n), i.e.
/// n(t) = n_inf + (n0 - n_inf) exp(-r t) with rate
/// r = 4 kappa_el (1 + sin k) + 4 gamma_pump and n_inf = 4 gamma_pump / r.
inline double relax_occupation(const SystemParams& p, double k, double n0, double t) {
    if (p.kappa_el <= 0.0 && p.gamma_pump <= 0.0) {
        throw RangeError("relax_occupation: need kappa_el > 0 or gamma_pump > 0");
    }
    if (t < 0.0) throw RangeError("relax_occupation: t must be >= 0");
    const double r = 4.0 * p.kappa_el * (1.0 + std::sin(k)) + 4.0 * p.gamma_pump;
    if (r <= 0.0) return n0;  // dark mode: sin k = -1 with no pump
    const double n_inf = 4.0 * p.gamma_pump / r;
    return n_inf + (n0 - n_inf) * std::exp(-r * t);
}

/// The eta maximizing |f(eta)| (equivalently |J_bar(inf)| and the drive
/// strength) located by golden-section search on [0.1, 50] to 1e-6.
inline double optimal_eta(const SystemParams& /*p*/) {
    double a = 0.1, b = 50.0;
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = std::abs(band_asymmetry(c));
    double fd = std::abs(band_asymmetry(d));
    while (b - a > 1e-7) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = std::abs(band_asymmetry(c));
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = std::abs(band_asymmetry(d));
        }
    }
    return 0.5 * (a + b);
}

}  // namespace critchain
