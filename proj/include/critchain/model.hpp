#pragma once
// critchain -- system parameters, derived constants, and regime validation.
//
// Conventions used throughout the library:
//   x = (a + a^dag)/sqrt(2),  p = i(a^dag - a)/sqrt(2), vacuum covariance
//   diag(1/2, 1/2).  The dissipator is L[O] rho = 2 O rho O^dag - rho O^dag O
//   - O^dag O rho with rate kappa, so first moments decay at kappa and
//   covariances relax at 2 kappa.

#include <cmath>
#include <string>

#include "critchain/errors.hpp"

namespace critchain {

inline constexpr double kPi = 3.14159265358979323846;

/// Which dissipation channel (if any) shapes the photon state.
enum class Regime {
    Lossless,    // closed cavity, squeezed ground state
    CavityLoss,  // photon loss at kappa_ph, Gaussian mixed steady state
    ChainLoss,   // pumped/damped electrons drive a displaced photon steady state
};

inline const char* to_string(Regime r) {
    switch (r) {
        case Regime::Lossless: return "lossless";
        case Regime::CavityLoss: return "cavity";
        case Regime::ChainLoss: return "chain";
    }
    return "?";
}

/// All knobs of the model.  t_hop is the estimand everywhere.
struct SystemParams {
    double omega0 = 1.0;      // photon frequency
    double t_hop = 1.0;       // hopping strength (estimand)
    double g = 0.88;          // light-matter coupling
    int n_sites = 400;        // chain length L (half filling assumed)
    double kappa_ph = 0.1;    // photon loss rate
    double kappa_el = 0.0;    // electron loss rate (ChainLoss)
    double gamma_pump = 0.0;  // electron pump rate (ChainLoss)
    double eta = 2.41;        // kappa_el / gamma_pump; <=0 means "derive from rates"
};

/// Process-wide fault injection used by the self-check command: each scale
/// multiplies one hard-coded constant of the engine so that an intentional 1%
/// perturbation must be caught by the oracle comparison.  All scales default
/// to 1 (no fault).
struct FaultInjection {
    double sigma_lin_scale = 1.0;      // vacuum plateau of the covariance flow
    double steady_cavity_scale = 1.0;  // closed-form cavity steady covariance
    double lambda_scale = 1.0;         // drive strength Lambda
    static FaultInjection& instance() {
        static FaultInjection f;
        return f;
    }
};

/// Band asymmetry factor f(eta) entering the drive strength:
/// f(eta) = 2/eta - 2(1+eta)/(eta sqrt(1+2 eta)),  eta > 0.
/// f < 0 for all finite eta > 0 and |f| is maximal at eta = 1 + sqrt(2).
inline double band_asymmetry(double eta) {
    if (!(eta > 0.0)) throw RangeError("band_asymmetry: eta must be > 0");
    return 2.0 / eta - 2.0 * (1.0 + eta) / (eta * std::sqrt(1.0 + 2.0 * eta));
}

/// Critical coupling g_c = sqrt(pi omega0 / (4 t_hop)).
inline double critical_coupling(const SystemParams& p) {
    if (!(p.omega0 > 0.0)) throw RangeError("critical_coupling: omega0 must be > 0");
    if (!(p.t_hop > 0.0)) throw RangeError("critical_coupling: t_hop must be > 0");
    return std::sqrt(kPi * p.omega0 / (4.0 * p.t_hop));
}

/// Effective pump/loss ratio.  If both rates are given it is their quotient;
/// if eta is also set explicitly the two sources must agree to 1e-12 relative.
inline double effective_eta(const SystemParams& p) {
    const bool rates = p.kappa_el > 0.0 && p.gamma_pump > 0.0;
    const bool direct = p.eta > 0.0;
    if (rates) {
        const double from_rates = p.kappa_el / p.gamma_pump;
        if (direct && std::abs(from_rates - p.eta) > 1e-12 * std::abs(from_rates)) {
            throw RangeError("effective_eta: eta and kappa_el/gamma_pump disagree");
        }
        return from_rates;
    }
    if (direct) return p.eta;
    throw RangeError("effective_eta: need eta > 0 or both kappa_el and gamma_pump > 0");
}

/// Drive strength Lambda = sqrt(2 L) g t_hop f(eta).  Homogeneous of degree 1
/// in t_hop and degree 1/2 in L.  Negative for all eta > 0 (f < 0).
/// (Fault injection applies on the engine side only; see gaussian_engine.)
inline double drive_strength(const SystemParams& p) {
    if (p.n_sites <= 0) throw RangeError("drive_strength: n_sites must be > 0");
    if (!(p.g >= 0.0)) throw RangeError("drive_strength: g must be >= 0");
    return std::sqrt(2.0 * p.n_sites) * p.g * p.t_hop * band_asymmetry(effective_eta(p));
}

/// Constants derived from SystemParams that every module keeps recomputing.
struct DerivedConstants {
    double X;             // 4 t_hop / (omega0 pi);  X g_crit^2 = 1
    double A;             // kappa_ph^2 + omega0^2
    double g_crit;        // critical coupling
    double lambda_drive;  // Lambda (NaN when eta is unresolvable)
};

inline DerivedConstants derived(const SystemParams& p) {
    DerivedConstants d{};
    if (!(p.omega0 > 0.0)) throw RangeError("derived: omega0 must be > 0");
    if (!(p.t_hop > 0.0)) throw RangeError("derived: t_hop must be > 0");
    d.X = 4.0 * p.t_hop / (p.omega0 * kPi);
    d.A = p.kappa_ph * p.kappa_ph + p.omega0 * p.omega0;
    d.g_crit = critical_coupling(p);
    try {
        d.lambda_drive = drive_strength(p);
    } catch (const RangeError&) {
        d.lambda_drive = std::nan("");
    }
    return d;
}

/// Coupling measured against criticality: u = (g/g_c)^2 = X g^2.
inline double coupling_ratio_sq(const SystemParams& p) {
    return derived(p).X * p.g * p.g;
}

/// S = g^2 omega0^2 X; the cavity steady state exists iff A > S.
inline double drive_scale_S(const SystemParams& p) {
    return p.g * p.g * p.omega0 * p.omega0 * derived(p).X;
}

/// Validates a parameter set for the given regime.  Throws RangeError for
/// domain violations and UnstableRegime when no stable state exists:
///   Lossless:   g < g_crit  (exactly; the boundary point is excluded)
///   CavityLoss: kappa_ph > 0 and A > S  (the loss widens the stable window)
///   ChainLoss:  kappa_ph > 0, even n_sites >= 2, resolvable eta
inline void validate_params(const SystemParams& p, Regime regime) {
    if (!(p.omega0 > 0.0)) throw RangeError("validate_params: omega0 must be > 0");
    if (!(p.t_hop > 0.0)) throw RangeError("validate_params: t_hop must be > 0");
    if (!(p.g >= 0.0)) throw RangeError("validate_params: g must be >= 0");
    if (p.kappa_ph < 0.0) throw RangeError("validate_params: kappa_ph must be >= 0");
    if (p.kappa_el < 0.0) throw RangeError("validate_params: kappa_el must be >= 0");
    if (p.gamma_pump < 0.0) throw RangeError("validate_params: gamma_pump must be >= 0");
    switch (regime) {
        case Regime::Lossless: {
            if (!(p.g < critical_coupling(p))) {
                throw UnstableRegime("validate_params: lossless regime requires g < g_crit");
            }
            break;
        }
        case Regime::CavityLoss: {
            if (!(p.kappa_ph > 0.0)) {
                throw RangeError("validate_params: cavity regime requires kappa_ph > 0");
            }
            const DerivedConstants d = derived(p);
            if (!(d.A > drive_scale_S(p))) {
                throw UnstableRegime(
                    "validate_params: cavity regime requires kappa_ph^2 + omega0^2 > "
                    "g^2 omega0^2 X");
            }
            break;
        }
        case Regime::ChainLoss: {
            if (!(p.kappa_ph > 0.0)) {
                throw RangeError("validate_params: chain regime requires kappa_ph > 0");
            }
            if (p.n_sites < 2 || p.n_sites % 2 != 0) {
                throw HalfFillingError(
                    "validate_params: chain regime requires even n_sites >= 2");
            }
            effective_eta(p);  // throws RangeError when unresolvable/inconsistent
            break;
        }
    }
}

}  // namespace critchain
