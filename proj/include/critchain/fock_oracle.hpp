#pragma once
// critchain -- truncated Fock-space oracle.
//
// Everything the Gaussian engine claims is independently recomputable here by
// brute force in a truncated number basis: exact diagonalization of the full
// and truncated photon Hamiltonians, steady states of the dissipative model
// from a direct linear solve of the vectorized generator, quantum Fisher
// information via the symmetric logarithmic derivative, and homodyne
// distributions integrated on an explicit quadrature grid.  This module is
// deliberately slow and simple; the engine must match it, never the reverse.

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "critchain/electron_sector.hpp"
#include "critchain/errors.hpp"
#include "critchain/gaussian_engine.hpp"
#include "critchain/model.hpp"

namespace critchain {

using FockOperator = Eigen::MatrixXcd;

/// Density matrix in the truncated number basis with its construction gate:
/// the occupation beyond 0.9 n_max must carry less than 1e-8 of the weight.
struct FockDensity {
    Eigen::MatrixXcd rho;
    int n_max() const { return static_cast<int>(rho.rows()) - 1; }
};

namespace fock {

/// Default truncation: 60 levels, raised to 80 within 5% of the critical
/// coupling where the state spreads.
inline int default_n_max(const SystemParams& p) {
    const double gc = critical_coupling(p);
    return (std::abs(p.g - gc) < 0.05 * gc) ? 80 : 60;
}

/// Default finite-difference step in t_hop.
inline double default_step(const SystemParams& p) {
    return 1e-5 * std::max(1.0, std::abs(p.t_hop));
}

inline Eigen::MatrixXd ladder(int n_max) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n_max + 1, n_max + 1);
    for (int n = 1; n <= n_max; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    return a;
}

/// x = (a + a^dag)/sqrt(2) as a real symmetric matrix.
inline Eigen::MatrixXd quadrature_x(int n_max) {
    const Eigen::MatrixXd a = ladder(n_max);
    return (a + a.transpose()) / std::sqrt(2.0);
}

/// p = i(a^dag - a)/sqrt(2).
inline Eigen::MatrixXcd quadrature_p(int n_max) {
    const Eigen::MatrixXd a = ladder(n_max);
    return std::complex<double>(0.0, 1.0) * (a.transpose() - a) / std::sqrt(2.0);
}

inline void enforce_tail_gate(const FockDensity& st, const char* who) {
    const int d = static_cast<int>(st.rho.rows());
    const int start = static_cast<int>(0.9 * (d - 1)) + 1;
    double tail = 0.0;
    for (int n = start; n < d; ++n) tail += std::real(st.rho(n, n));
    if (!(tail < 1e-8)) {
        throw TruncationError(std::string(who) + ": occupation tail beyond 0.9 n_max is " +
                                  std::to_string(tail),
                              tail, 0.0);
    }
}

}  // namespace fock

/// cos and sin of lambda (a + a^dag) with lambda = g / sqrt(L), via exact
/// eigendecomposition of the quadrature.  Away from the truncation edge these
/// obey cos^2 + sin^2 = 1 and <0|cos|0> = exp(-lambda^2/2).
struct QuadratureFunctions {
    Eigen::MatrixXd cos_m;
    Eigen::MatrixXd sin_m;
    double lambda = 0.0;
};

inline QuadratureFunctions build_quadrature_functions(const SystemParams& p, int n_max) {
    if (n_max < 1) throw RangeError("build_quadrature_functions: n_max must be >= 1");
    if (p.n_sites < 1) throw RangeError("build_quadrature_functions: n_sites must be >= 1");
    const double lambda = p.g / std::sqrt(static_cast<double>(p.n_sites));
    const Eigen::MatrixXd a = fock::ladder(n_max);
    const Eigen::MatrixXd q = a + a.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(q);
    const Eigen::VectorXd ev = es.eigenvalues();
    const Eigen::MatrixXd& v = es.eigenvectors();
    QuadratureFunctions out;
    out.lambda = lambda;
    out.cos_m = v * (lambda * ev.array()).cos().matrix().asDiagonal() * v.transpose();
    out.sin_m = v * (lambda * ev.array()).sin().matrix().asDiagonal() * v.transpose();
    return out;
}

namespace fock {

inline std::vector<double> full_spectrum_at(const SystemParams& p, double s, int n_max) {
    const QuadratureFunctions qf = build_quadrature_functions(p, n_max);
    // Band-sum convention: the occupied-window kinetic sum enters with weight
    // -2 t_hop cos k (so T = -2 t_hop L cos(s)/pi), the current sum with
    // +2 t_hop sin k.  With these signs the ground energy over s is minimized
    // at s = 0, which is the property this spectrum exhibits; note the kinetic
    // sign is opposite to the closed-form convention of fs_expectations.
    const ElectronSummary fs = fs_expectations(p, s, Form::Continuum);
    const double t_lit = -fs.t_bar;
    const double j_lit = fs.j_bar;
    const int d = n_max + 1;
    const Eigen::MatrixXd a = ladder(n_max);
    Eigen::MatrixXd h = t_lit * qf.cos_m + j_lit * qf.sin_m +
                        p.omega0 * (a.transpose() * a + 0.5 * Eigen::MatrixXd::Identity(d, d));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    return std::vector<double>(es.eigenvalues().data(), es.eigenvalues().data() + d);
}

}  // namespace fock

/// Spectrum of H = T cos(lambda(a+a^dag)) + J sin(lambda(a+a^dag))
/// + omega0 (a^dag a + 1/2) for the half-filled window centered at s, with
/// (T, J) the literal band sums (see fock::full_spectrum_at).  The result is
/// gated by a truncation ladder: if the ground energy moves by 1e-8 or more
/// between n_max and n_max+20, TruncationError is thrown carrying both values
/// and the n_max spectrum so sweeps can mark the row and continue.
inline std::vector<double> full_hamiltonian_spectrum(const SystemParams& p, double s,
                                                     int n_max = 80) {
    std::vector<double> spec = fock::full_spectrum_at(p, s, n_max);
    const std::vector<double> spec_up = fock::full_spectrum_at(p, s, n_max + 20);
    if (!(std::abs(spec[0] - spec_up[0]) < 1e-8)) {
        throw TruncationError("full_hamiltonian_spectrum: ground energy not converged in n_max",
                              spec[0], spec_up[0], spec);
    }
    return spec;
}

/// Spectrum + effective-frequency metadata of the expanded (quadratic)
/// Hamiltonian H = T + (g/sqrt L) J (a+a^dag) - (g^2/2L) T (a+a^dag)^2
/// + omega0 (a^dag a + 1/2) with (T, J) = fs_expectations (closed-form signs).
/// The harmonic frequency is v_eff = omega0 sqrt(1 - 2 g^2 T / (L omega0));
/// when the radicand is <= 0 the quadratic theory has no ground state and
/// no_ground_state is set (the truncated matrix spectrum is still returned).
struct TruncatedSpectrum {
    std::vector<double> eigenvalues;
    double v_eff = 0.0;
    bool no_ground_state = false;
};

inline TruncatedSpectrum truncated_hamiltonian_spectrum(const SystemParams& p, double s,
                                                        int n_max = 80) {
    const ElectronSummary fs = fs_expectations(p, s, Form::Continuum);
    const double L = static_cast<double>(p.n_sites);
    const int d = n_max + 1;
    const Eigen::MatrixXd a = fock::ladder(n_max);
    const Eigen::MatrixXd q = a + a.transpose();
    Eigen::MatrixXd h = fs.t_bar * Eigen::MatrixXd::Identity(d, d) +
                        (p.g / std::sqrt(L)) * fs.j_bar * q -
                        0.5 * (p.g * p.g / L) * fs.t_bar * q * q +
                        p.omega0 * (a.transpose() * a + 0.5 * Eigen::MatrixXd::Identity(d, d));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    TruncatedSpectrum out;
    out.eigenvalues.assign(es.eigenvalues().data(), es.eigenvalues().data() + d);
    const double radicand = 1.0 - 2.0 * p.g * p.g * fs.t_bar / (L * p.omega0);
    if (radicand > 0.0) {
        out.v_eff = p.omega0 * std::sqrt(radicand);
    } else {
        out.v_eff = std::nan("");
        out.no_ground_state = true;
    }
    return out;
}

/// Squeezed-vacuum ground state of the quadratic photon theory at s = 0,
/// built from the even-number series  c_{2n} ~ (-tanh xi)^n sqrt((2n)!)/(2^n n!)
/// with |xi| = |ln w| / 4, w = 1 - (g/g_crit)^2.  The sign of xi (i.e. which
/// quadrature is squeezed) is resolved by evaluating the quadratic Hamiltonian
/// on both candidates and keeping the lower energy; the x quadrature ends up
/// anti-squeezed.  Throws RangeError at g >= g_crit, TruncationError when the
/// weight tail gate fails.
inline FockDensity squeezed_vacuum_state(const SystemParams& p, int n_max = 0) {
    if (n_max <= 0) n_max = fock::default_n_max(p);
    const double gc = critical_coupling(p);
    if (!(p.g < gc)) throw RangeError("squeezed_vacuum_state: requires g < g_crit");
    const double w = 1.0 - coupling_ratio_sq(p);
    const double xi = 0.25 * std::log(w);
    const int d = n_max + 1;
    const double u = coupling_ratio_sq(p);
    const Eigen::MatrixXd a = fock::ladder(n_max);
    const Eigen::MatrixXd q = a + a.transpose();
    const Eigen::MatrixXd h_quad =
        p.omega0 * (a.transpose() * a + 0.5 * Eigen::MatrixXd::Identity(d, d)) -
        0.25 * u * p.omega0 * q * q;
    Eigen::VectorXd best;
    double best_energy = std::numeric_limits<double>::infinity();
    for (const double cand : {xi, -xi}) {
        Eigen::VectorXd c = Eigen::VectorXd::Zero(d);
        const double t = -std::tanh(cand);
        for (int n = 0; 2 * n <= n_max; ++n) {
            const double log_mag = 0.5 * std::lgamma(2.0 * n + 1.0) - n * std::log(2.0) -
                                   std::lgamma(n + 1.0) + n * std::log(std::abs(t) + 1e-300);
            const double sign = (t < 0.0 && n % 2 == 1) ? -1.0 : 1.0;
            c(2 * n) = sign * std::exp(log_mag);
        }
        c.normalize();
        const double energy = c.dot(h_quad * c);
        if (energy < best_energy) {
            best_energy = energy;
            best = c;
        }
    }
    FockDensity st;
    st.rho = (best * best.transpose()).cast<std::complex<double>>();
    fock::enforce_tail_gate(st, "squeezed_vacuum_state");
    return st;
}

namespace fock {

/// Photon Hamiltonian of the requested dissipative regime (real symmetric).
inline Eigen::MatrixXd regime_hamiltonian(const SystemParams& p, Regime regime, int n_max) {
    const int d = n_max + 1;
    const Eigen::MatrixXd a = ladder(n_max);
    const Eigen::MatrixXd num =
        a.transpose() * a + 0.5 * Eigen::MatrixXd::Identity(d, d);
    switch (regime) {
        case Regime::Lossless:
        case Regime::CavityLoss: {
            const double u = coupling_ratio_sq(p);
            const Eigen::MatrixXd q = a + a.transpose();
            return p.omega0 * num - 0.25 * u * p.omega0 * q * q;
        }
        case Regime::ChainLoss: {
            const double lam = drive_strength(p);
            return p.omega0 * num + lam * quadrature_x(n_max);
        }
    }
    throw RangeError("regime_hamiltonian: unknown regime");
}

}  // namespace fock

/// Steady state of  rho' = -i[H, rho] + kappa (2 a rho a^dag - rho a^dag a
/// - a^dag a rho)  from a direct LU solve of the vectorized generator with the
/// first row replaced by the trace constraint.  The generator is assembled
/// sparse (it is banded); the solve itself is exact and deterministic.
/// Throws SingularLiouvillian when kappa_ph <= 0 or the factorization fails,
/// TruncationError when the solution carries weight at the truncation edge.
inline FockDensity lindblad_steady_state(const SystemParams& p, Regime regime,
                                         int n_max = 0) {
    if (n_max <= 0) n_max = fock::default_n_max(p);
    if (regime == Regime::Lossless || !(p.kappa_ph > 0.0)) {
        throw SingularLiouvillian(
            "lindblad_steady_state: requires a dissipative regime with kappa_ph > 0");
    }
    validate_params(p, regime);
    const int d = n_max + 1;
    const int dim = d * d;
    const Eigen::MatrixXd h = fock::regime_hamiltonian(p, regime, n_max);
    const double kap = p.kappa_ph;
    using Cplx = std::complex<double>;
    std::vector<Eigen::Triplet<Cplx>> trip;
    trip.reserve(static_cast<std::size_t>(dim) * 8);
    const Cplx mi(0.0, -1.0);
    // -i (I (x) H): column-stacked index (i + j d) couples via H rows.
    // H is banded (|i-m| <= 2), so iterate the band only.
    auto vec_idx = [d](int i, int j) { return i + j * d; };
    for (int j = 0; j < d; ++j) {
        for (int i = 0; i < d; ++i) {
            const int lo = std::max(0, i - 2), hi = std::min(d - 1, i + 2);
            for (int m = lo; m <= hi; ++m) {
                if (h(i, m) != 0.0) {
                    trip.emplace_back(vec_idx(i, j), vec_idx(m, j), mi * h(i, m));
                }
            }
            const int lo2 = std::max(0, j - 2), hi2 = std::min(d - 1, j + 2);
            for (int n = lo2; n <= hi2; ++n) {
                if (h(n, j) != 0.0) {
                    trip.emplace_back(vec_idx(i, j), vec_idx(i, n), -mi * h(n, j));
                }
            }
        }
    }
    // Dissipator: 2k a rho a^dag - k {a^dag a, rho}.
    for (int m = 1; m < d; ++m) {
        for (int n = 1; n < d; ++n) {
            trip.emplace_back(vec_idx(m - 1, n - 1), vec_idx(m, n),
                              Cplx(2.0 * kap * std::sqrt(double(m) * double(n)), 0.0));
        }
    }
    for (int j = 0; j < d; ++j) {
        for (int i = 0; i < d; ++i) {
            trip.emplace_back(vec_idx(i, j), vec_idx(i, j), Cplx(-kap * (i + j), 0.0));
        }
    }
    Eigen::SparseMatrix<Cplx> gen(dim, dim);
    gen.setFromTriplets(trip.begin(), trip.end());
    // Replace the row of element (0,0) with the trace constraint.
    gen.prune([](int row, int, const Cplx&) { return row != 0; });
    for (int i = 0; i < d; ++i) {
        gen.coeffRef(0, vec_idx(i, i)) = Cplx(1.0, 0.0);
    }
    gen.makeCompressed();
    Eigen::SparseLU<Eigen::SparseMatrix<Cplx>> lu;
    lu.analyzePattern(gen);
    lu.factorize(gen);
    if (lu.info() != Eigen::Success) {
        throw SingularLiouvillian("lindblad_steady_state: generator factorization failed");
    }
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(dim);
    rhs(0) = Cplx(1.0, 0.0);
    const Eigen::VectorXcd sol = lu.solve(rhs);
    if (lu.info() != Eigen::Success) {
        throw SingularLiouvillian("lindblad_steady_state: solve failed");
    }
    FockDensity st;
    st.rho = Eigen::Map<const Eigen::MatrixXcd>(sol.data(), d, d);
    st.rho = 0.5 * (st.rho + st.rho.adjoint()).eval();
    const double tr = st.rho.trace().real();
    if (!(std::abs(tr - 1.0) < 1e-8)) {
        throw SingularLiouvillian("lindblad_steady_state: trace constraint violated");
    }
    st.rho /= tr;
    fock::enforce_tail_gate(st, "lindblad_steady_state");
    return st;
}

/// First and (symmetrized) second moments of a Fock density as a GaussianState.
inline GaussianState moments(const FockDensity& st) {
    const int n_max = st.n_max();
    const Eigen::MatrixXcd x = fock::quadrature_x(n_max).cast<std::complex<double>>();
    const Eigen::MatrixXcd pp = fock::quadrature_p(n_max);
    GaussianState g;
    const double mx = (st.rho * x).trace().real();
    const double mp = (st.rho * pp).trace().real();
    const double xx = (st.rho * x * x).trace().real();
    const double pq = (st.rho * pp * pp).trace().real();
    const double xp = 0.5 * ((st.rho * (x * pp + pp * x)).trace().real());
    g.d << mx, mp;
    g.sigma(0, 0) = xx - mx * mx;
    g.sigma(1, 1) = pq - mp * mp;
    g.sigma(0, 1) = xp - mx * mp;
    g.sigma(1, 0) = g.sigma(0, 1);
    return g;
}

namespace fock {

/// State source for a regime: pure ground state (Lossless) or dissipative
/// steady state (CavityLoss / ChainLoss), at the given t_hop override.
inline FockDensity state_at(const SystemParams& p, Regime regime, double t_hop, int n_max) {
    SystemParams q = p;
    q.t_hop = t_hop;
    if (regime == Regime::Lossless) return squeezed_vacuum_state(q, n_max);
    return lindblad_steady_state(q, regime, n_max);
}

/// QFI of rho(t_hop) from the symmetric logarithmic derivative in the
/// eigenbasis of rho:  F = sum_{ij} 2 |<i| drho |j>|^2 / (l_i + l_j) over
/// pairs with l_i + l_j > 1e-12.
inline double sld_value(const FockDensity& rho0, const Eigen::MatrixXcd& drho) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho0.rho);
    const Eigen::VectorXd lam = es.eigenvalues();
    const Eigen::MatrixXcd dv = es.eigenvectors().adjoint() * drho * es.eigenvectors();
    const int d = static_cast<int>(lam.size());
    double f = 0.0;
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            const double s = lam(i) + lam(j);
            if (s > 1e-12) f += 2.0 * std::norm(dv(i, j)) / s;
        }
    }
    return f;
}

}  // namespace fock

/// Oracle QFI with respect to t_hop: central finite differences of the regime
/// state at steps h and h/2; the two values must agree to 1e-3 relative or
/// StepError is thrown.  Returns the h/2 value.
inline double qfi_sld(const SystemParams& p, Regime regime, int n_max = 0, double h = 0.0) {
    if (n_max <= 0) n_max = fock::default_n_max(p);
    if (h <= 0.0) h = fock::default_step(p);
    const FockDensity rho0 = fock::state_at(p, regime, p.t_hop, n_max);
    double value[2];
    for (int pass = 0; pass < 2; ++pass) {
        const double step = (pass == 0) ? h : 0.5 * h;
        const FockDensity rp = fock::state_at(p, regime, p.t_hop + step, n_max);
        const FockDensity rm = fock::state_at(p, regime, p.t_hop - step, n_max);
        const Eigen::MatrixXcd drho = (rp.rho - rm.rho) / (2.0 * step);
        value[pass] = fock::sld_value(rho0, drho);
    }
    if (!(std::abs(value[0] - value[1]) <= 1e-3 * std::abs(value[1]))) {
        throw StepError("qfi_sld: h and h/2 estimates disagree beyond 1e-3", value[0],
                        value[1]);
    }
    return value[1];
}

/// Homodyne distribution of the quadrature x_phi = cos(phi) x + sin(phi) p on
/// an explicit grid:  p_phi(x) = <x| U rho U^dag |x> with U = exp(-i phi n),
/// the rotation chosen so that the mean equals cos(phi)<x> + sin(phi)<p>.
/// Number-basis wavefunctions come from the stable Hermite recurrence.
/// Values are clamped at 0; GridError if the grid captures less than
/// 1 - 1e-4 of the mass.
inline std::vector<double> homodyne_pdf(const FockDensity& st, double phi,
                                        const std::vector<double>& x_grid) {
    if (x_grid.size() < 2) throw GridError("homodyne_pdf: need at least two grid points", 0.0);
    const int d = static_cast<int>(st.rho.rows());
    const int nx = static_cast<int>(x_grid.size());
    // Rotated density rho'_{mn} = e^{-i phi m} rho_{mn} e^{+i phi n}.
    Eigen::MatrixXcd rot(d, d);
    for (int m = 0; m < d; ++m) {
        for (int n = 0; n < d; ++n) {
            rot(m, n) = std::polar(1.0, phi * (n - m)) * st.rho(m, n);
        }
    }
    Eigen::MatrixXd phi_basis(d, nx);
    for (int ix = 0; ix < nx; ++ix) {
        const double x = x_grid[static_cast<std::size_t>(ix)];
        phi_basis(0, ix) = std::pow(kPi, -0.25) * std::exp(-0.5 * x * x);
        if (d > 1) phi_basis(1, ix) = x * std::sqrt(2.0) * phi_basis(0, ix);
        for (int n = 1; n + 1 < d; ++n) {
            phi_basis(n + 1, ix) = x * std::sqrt(2.0 / (n + 1)) * phi_basis(n, ix) -
                                   std::sqrt(n / (n + 1.0)) * phi_basis(n - 1, ix);
        }
    }
    const Eigen::MatrixXd weights = rot.real();
    const Eigen::MatrixXd mixed = weights * phi_basis;  // d x nx
    std::vector<double> pdf(static_cast<std::size_t>(nx));
    for (int ix = 0; ix < nx; ++ix) {
        pdf[static_cast<std::size_t>(ix)] =
            std::max(0.0, phi_basis.col(ix).dot(mixed.col(ix)));
    }
    double mass = 0.0;
    for (int ix = 0; ix + 1 < nx; ++ix) {
        mass += 0.5 *
                (pdf[static_cast<std::size_t>(ix)] + pdf[static_cast<std::size_t>(ix) + 1]) *
                (x_grid[static_cast<std::size_t>(ix) + 1] - x_grid[static_cast<std::size_t>(ix)]);
    }
    if (!(mass >= 1.0 - 1e-4)) {
        throw GridError("homodyne_pdf: grid captures less than 1 - 1e-4 of the mass", mass);
    }
    return pdf;
}

namespace fock {

/// Grid spanning mean +- 9 sigma of the rotated quadrature -- wide enough for
/// machine-precision trapezoid mass, narrow enough that the density never
/// underflows into floating-point noise.
inline std::vector<double> adaptive_grid(const FockDensity& st, double phi, int n_points) {
    const GaussianState m = moments(st);
    const double mean = std::cos(phi) * m.d(0) + std::sin(phi) * m.d(1);
    const Eigen::Vector2d c(std::cos(phi), std::sin(phi));
    const double sd = std::sqrt(c.dot(m.sigma * c));
    std::vector<double> grid(static_cast<std::size_t>(n_points));
    for (int i = 0; i < n_points; ++i) {
        grid[static_cast<std::size_t>(i)] =
            mean - 9.0 * sd + 18.0 * sd * i / static_cast<double>(n_points - 1);
    }
    return grid;
}

}  // namespace fock

/// Oracle classical Fisher information of the homodyne outcome x_phi for
/// t_hop, by finite differences of the distribution on a shared grid
/// (mean +- 9 sigma of the central state, or a caller-supplied grid).
/// Densities are floored at 1e-300 inside the integrand.  Steps h and h/2
/// must agree to 1e-3 relative or StepError is thrown; returns the h/2 value.
inline double cfi_numeric(const SystemParams& p, Regime regime, double phi, int n_max = 0,
                          double h = 0.0, const std::vector<double>& x_grid = {},
                          int n_points = 4001) {
    if (n_max <= 0) n_max = fock::default_n_max(p);
    if (h <= 0.0) h = fock::default_step(p);
    const FockDensity rho0 = fock::state_at(p, regime, p.t_hop, n_max);
    const std::vector<double> grid =
        x_grid.empty() ? fock::adaptive_grid(rho0, phi, n_points) : x_grid;
    const std::vector<double> p0 = homodyne_pdf(rho0, phi, grid);
    double value[2];
    for (int pass = 0; pass < 2; ++pass) {
        const double step = (pass == 0) ? h : 0.5 * h;
        const std::vector<double> pp =
            homodyne_pdf(fock::state_at(p, regime, p.t_hop + step, n_max), phi, grid);
        const std::vector<double> pm =
            homodyne_pdf(fock::state_at(p, regime, p.t_hop - step, n_max), phi, grid);
        std::vector<double> integrand(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double dp = (pp[i] - pm[i]) / (2.0 * step);
            integrand[i] = dp * dp / std::max(p0[i], 1e-300);
        }
        double acc = 0.0;
        for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
            acc += 0.5 * (integrand[i] + integrand[i + 1]) * (grid[i + 1] - grid[i]);
        }
        value[pass] = acc;
    }
    if (!(std::abs(value[0] - value[1]) <= 1e-3 * std::abs(value[1]))) {
        throw StepError("cfi_numeric: h and h/2 estimates disagree beyond 1e-3", value[0],
                        value[1]);
    }
    return value[1];
}

}  // namespace critchain
