#pragma once
// critchain -- error taxonomy shared by all modules.
//
// Every failure mode the library can diagnose maps to one concrete exception
// type so callers (CLI, tests) can branch on the *kind* of failure without
// string matching.  All types derive from std::runtime_error and carry a
// human-readable message; a few carry extra payload needed to keep going
// (e.g. TruncationError keeps the spectrum that failed its ladder check).

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace critchain {

/// Parameter outside its admissible domain (negative rate, g out of range, ...).
struct RangeError : std::runtime_error {
    explicit RangeError(const std::string& what) : std::runtime_error(what) {}
};

/// Parameter set has no stable / normalizable state in the requested regime.
struct UnstableRegime : std::runtime_error {
    explicit UnstableRegime(const std::string& what) : std::runtime_error(what) {}
};

/// Half filling cannot be realized on the requested momentum grid.
struct HalfFillingError : std::runtime_error {
    explicit HalfFillingError(const std::string& what) : std::runtime_error(what) {}
};

/// A Fock-space result failed its truncation ladder check (value at n_max vs
/// n_max+20 moved more than the gate).  Carries both values and, when the
/// producer has one, the spectrum computed at n_max so callers may keep the
/// flagged row and continue.
struct TruncationError : std::runtime_error {
    double value_at_n;
    double value_at_n_plus;
    std::vector<double> spectrum_at_n;  // may be empty
    TruncationError(const std::string& what, double at_n, double at_n_plus,
                    std::vector<double> spectrum = {})
        : std::runtime_error(what),
          value_at_n(at_n),
          value_at_n_plus(at_n_plus),
          spectrum_at_n(std::move(spectrum)) {}
};

/// The constrained steady-state linear system is singular (e.g. no dissipation).
struct SingularLiouvillian : std::runtime_error {
    explicit SingularLiouvillian(const std::string& what) : std::runtime_error(what) {}
};

/// A finite-difference step check (h vs h/2) disagreed beyond its gate.
struct StepError : std::runtime_error {
    double value_h;
    double value_h_half;
    StepError(const std::string& what, double vh, double vh2)
        : std::runtime_error(what), value_h(vh), value_h_half(vh2) {}
};

/// A quadrature grid failed to capture the required probability mass.
struct GridError : std::runtime_error {
    double mass;
    GridError(const std::string& what, double captured_mass)
        : std::runtime_error(what), mass(captured_mass) {}
};

/// The mixed-state fidelity formula was evaluated at (or too close to) one of
/// its purity poles, where its denominators vanish.
struct PurityPole : std::runtime_error {
    explicit PurityPole(const std::string& what) : std::runtime_error(what) {}
};

/// Time evolution produced a non-physical covariance (eigenvalue below gate).
struct StabilityError : std::runtime_error {
    explicit StabilityError(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed CLI/config input.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace critchain
