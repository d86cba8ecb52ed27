#pragma once
// critchain -- Gaussian photon-sector engine.
//
// The photon state in every regime of interest is Gaussian, so it is carried
// as a displacement vector d = (<x>, <p>) and a symmetric covariance matrix
// sigma (vacuum = diag(1/2, 1/2)).  First moments obey
//     d' = B d + c - kappa d
// and the covariance obeys the linear flow
//     sigma' = B sigma + sigma B^T - 2 kappa (sigma - sigma_lin),
// whose fixed points are available in closed form for both lossy regimes.

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "critchain/errors.hpp"
#include "critchain/model.hpp"

namespace critchain {

/// Set to true to use the alternative damping convention in which the
/// displacement decays at 2 kappa instead of kappa.  The default (false)
/// matches the first-moment equations of the dissipator used throughout.
inline constexpr bool kDisplacementDecayTwoKappa = false;

struct GaussianState {
    Eigen::Vector2d d = Eigen::Vector2d::Zero();
    Eigen::Matrix2d sigma = 0.5 * Eigen::Matrix2d::Identity();
};

/// Right-hand-side data of the Gaussian flow.
struct DriftSpec {
    Eigen::Matrix2d B = Eigen::Matrix2d::Zero();
    Eigen::Vector2d c = Eigen::Vector2d::Zero();
    double kappa = 0.0;
    Eigen::Matrix2d sigma_lin = 0.5 * Eigen::Matrix2d::Identity();
};

/// Drift data for each regime:
///   Lossless/CavityLoss: B = [[0, omega0], [omega0 (X g^2 - 1), 0]], c = 0
///   ChainLoss:           B = [[0, omega0], [-omega0, 0]], c = (0, -Lambda)
inline DriftSpec drift_for(const SystemParams& p, Regime regime) {
    validate_params(p, regime);
    const DerivedConstants dc = derived(p);
    DriftSpec spec;
    spec.sigma_lin =
        0.5 * FaultInjection::instance().sigma_lin_scale * Eigen::Matrix2d::Identity();
    switch (regime) {
        case Regime::Lossless:
        case Regime::CavityLoss:
            spec.B << 0.0, p.omega0, p.omega0 * (dc.X * p.g * p.g - 1.0), 0.0;
            spec.kappa = (regime == Regime::CavityLoss) ? p.kappa_ph : 0.0;
            break;
        case Regime::ChainLoss:
            spec.B << 0.0, p.omega0, -p.omega0, 0.0;
            spec.c << 0.0, -drive_strength(p) * FaultInjection::instance().lambda_scale;
            spec.kappa = p.kappa_ph;
            break;
    }
    return spec;
}

struct Trajectory {
    std::vector<double> times;
    std::vector<GaussianState> states;
};

namespace detail {

inline void gaussian_rhs(const DriftSpec& s, const GaussianState& st, GaussianState& out) {
    const double kd = kDisplacementDecayTwoKappa ? 2.0 * s.kappa : s.kappa;
    out.d = s.B * st.d + s.c - kd * st.d;
    Eigen::Matrix2d m = s.B * st.sigma + st.sigma * s.B.transpose() -
                        2.0 * s.kappa * (st.sigma - s.sigma_lin);
    out.sigma = 0.5 * (m + m.transpose());
}

inline GaussianState rk4_step(const DriftSpec& spec, const GaussianState& st, double dt) {
    GaussianState k1, k2, k3, k4, tmp;
    gaussian_rhs(spec, st, k1);
    tmp.d = st.d + 0.5 * dt * k1.d;
    tmp.sigma = st.sigma + 0.5 * dt * k1.sigma;
    gaussian_rhs(spec, tmp, k2);
    tmp.d = st.d + 0.5 * dt * k2.d;
    tmp.sigma = st.sigma + 0.5 * dt * k2.sigma;
    gaussian_rhs(spec, tmp, k3);
    tmp.d = st.d + dt * k3.d;
    tmp.sigma = st.sigma + dt * k3.sigma;
    gaussian_rhs(spec, tmp, k4);
    GaussianState next;
    next.d = st.d + dt / 6.0 * (k1.d + 2.0 * k2.d + 2.0 * k3.d + k4.d);
    Eigen::Matrix2d m =
        st.sigma + dt / 6.0 * (k1.sigma + 2.0 * k2.sigma + 2.0 * k3.sigma + k4.sigma);
    next.sigma = 0.5 * (m + m.transpose());
    return next;
}

inline void check_physical(const GaussianState& st) {
    const double tr = st.sigma.trace();
    const double det = st.sigma.determinant();
    const double disc = std::sqrt(std::max(0.0, tr * tr - 4.0 * det));
    const double min_eig = 0.5 * (tr - disc);
    if (!(min_eig >= 1e-12)) {
        throw StabilityError("evolve: covariance eigenvalue fell below 1e-12");
    }
}

inline double default_dt(const DriftSpec& spec) {
    const double omega0 = spec.B(0, 1);
    return 0.005 * std::min(1.0 / omega0, 1.0 / std::max(spec.kappa, 1e-6));
}

}  // namespace detail

/// Classical RK4 on the Gaussian flow.  dt <= 0 selects the default step
/// 0.005 * min(1/omega0, 1/max(kappa, 1e-6)).  The final partial step is
/// shortened so the trajectory contains t = 0 and t = t_final exactly.
/// Covariances are symmetrized after every update, and StabilityError is
/// thrown as soon as an eigenvalue of sigma drops below 1e-12.
inline Trajectory evolve(const GaussianState& initial, const DriftSpec& spec,
                         double t_final, double dt = 0.0) {
    if (t_final < 0.0) throw RangeError("evolve: t_final must be >= 0");
    if (dt <= 0.0) dt = detail::default_dt(spec);
    Trajectory traj;
    detail::check_physical(initial);
    traj.times.push_back(0.0);
    traj.states.push_back(initial);
    GaussianState st = initial;
    double t = 0.0;
    while (t < t_final) {
        const double step = std::min(dt, t_final - t);
        st = detail::rk4_step(spec, st, step);
        detail::check_physical(st);
        t += step;
        traj.times.push_back(t);
        traj.states.push_back(st);
    }
    if (traj.times.back() != t_final) {
        traj.times.back() = t_final;
    }
    return traj;
}

/// Same stepper, returning only the state at t_final (no trajectory storage).
inline GaussianState evolve_final(const GaussianState& initial, const DriftSpec& spec,
                                  double t_final, double dt = 0.0) {
    if (t_final < 0.0) throw RangeError("evolve: t_final must be >= 0");
    if (dt <= 0.0) dt = detail::default_dt(spec);
    GaussianState st = initial;
    detail::check_physical(st);
    double t = 0.0;
    while (t < t_final) {
        const double step = std::min(dt, t_final - t);
        st = detail::rk4_step(spec, st, step);
        detail::check_physical(st);
        t += step;
    }
    return st;
}

/// Closed-form steady covariance of the lossy cavity (d = 0):
/// with S = g^2 omega0^2 X and A = kappa^2 + omega0^2,
///   sigma_xx = (2A - S) / (4 (A - S))
///   sigma_xp = S kappa / (4 omega0 (A - S))
///   sigma_pp = (2A - 3S + S^2/omega0^2) / (4 (A - S))
/// Exact fixed point of the covariance flow; throws UnstableRegime at A <= S.
inline GaussianState steady_state_cavity(const SystemParams& p) {
    validate_params(p, Regime::CavityLoss);
    const double S = drive_scale_S(p);
    const double A = derived(p).A;
    const double den = 4.0 * (A - S);
    GaussianState st;
    st.d.setZero();
    st.sigma(0, 0) = (2.0 * A - S) / den;
    st.sigma(0, 1) = S * p.kappa_ph / (den * p.omega0);
    st.sigma(1, 0) = st.sigma(0, 1);
    st.sigma(1, 1) = (2.0 * A - 3.0 * S + S * S / (p.omega0 * p.omega0)) / den;
    st.sigma *= FaultInjection::instance().steady_cavity_scale;
    return st;
}

/// Steady state of the driven-damped oscillator (chain regime):
/// d = (-Lambda omega0 / A, -Lambda kappa_ph / A) and sigma = diag(1/2, 1/2).
/// The displaced vacuum closes the full first/second-moment system exactly
/// (the drive is linear in x, so it displaces but never heats).
inline GaussianState steady_state_chain(const SystemParams& p) {
    validate_params(p, Regime::ChainLoss);
    const double lam = drive_strength(p) * FaultInjection::instance().lambda_scale;
    const double A = derived(p).A;
    GaussianState st;
    st.d << -lam * p.omega0 / A, -lam * p.kappa_ph / A;
    st.sigma = 0.5 * Eigen::Matrix2d::Identity();
    return st;
}

/// Ground state of the closed (lossless) cavity: squeezed vacuum with
/// Var(x) = w^{-1/2}/2 and Var(p) = w^{+1/2}/2, w = 1 - (g/g_crit)^2.
/// The x quadrature is anti-squeezed.  Throws UnstableRegime at g >= g_crit.
inline GaussianState ground_state_lossless(const SystemParams& p) {
    validate_params(p, Regime::Lossless);
    const double w = 1.0 - coupling_ratio_sq(p);
    GaussianState st;
    st.d.setZero();
    st.sigma.setZero();
    st.sigma(0, 0) = 0.5 / std::sqrt(w);
    st.sigma(1, 1) = 0.5 * std::sqrt(w);
    return st;
}

struct Marginal {
    double mean = 0.0;
    double var = 0.0;
};

/// Homodyne marginal of the quadrature x_phi = cos(phi) x + sin(phi) p.
inline Marginal marginal(const GaussianState& st, double phi) {
    const Eigen::Vector2d c(std::cos(phi), std::sin(phi));
    Marginal m;
    m.mean = c.dot(st.d);
    m.var = c.dot(st.sigma * c);
    if (!(m.var > 0.0)) throw StabilityError("marginal: non-positive variance");
    return m;
}

/// Wigner function W(x,p) = exp(-(v-d)^T sigma^{-1} (v-d)/2) / (2 pi sqrt(det sigma)).
inline double wigner(const GaussianState& st, double x, double p) {
    const double det = st.sigma.determinant();
    if (!(det > 0.0)) throw StabilityError("wigner: covariance not positive definite");
    const Eigen::Vector2d v(x - st.d(0), p - st.d(1));
    const double quad = v.dot(st.sigma.inverse() * v);
    return std::exp(-0.5 * quad) / (2.0 * kPi * std::sqrt(det));
}

}  // namespace critchain
