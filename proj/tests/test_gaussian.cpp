#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "critchain/gaussian_engine.hpp"

using namespace critchain;
using Catch::Approx;

namespace {
SystemParams cavity_point() {
    SystemParams p;
    p.g = 0.5;
    p.kappa_ph = 0.1;
    return p;
}
}  // namespace

TEST_CASE("cavity steady covariance matches its pinned values") {
    const GaussianState st = steady_state_cavity(cavity_point());
    REQUIRE(st.d.norm() == 0.0);
    REQUIRE(st.sigma(0, 0) == Approx(0.61504786602616157).epsilon(1e-14));
    REQUIRE(st.sigma(0, 1) == Approx(0.011504786602616154).epsilon(1e-14));
    REQUIRE(st.sigma(1, 1) == Approx(0.421573007114314).epsilon(1e-14));
    REQUIRE(st.sigma.determinant() == Approx(0.2591552182851189).epsilon(1e-13));
}

TEST_CASE("cavity steady covariance is an exact fixed point of the flow") {
    for (double g : {0.2, 0.5, 0.85}) {
        for (double kap : {0.05, 0.1, 0.6}) {
            SystemParams p;
            p.g = g;
            p.kappa_ph = kap;
            const GaussianState st = steady_state_cavity(p);
            const DriftSpec spec = drift_for(p, Regime::CavityLoss);
            const Eigen::Matrix2d res = spec.B * st.sigma + st.sigma * spec.B.transpose() -
                                        2.0 * spec.kappa * (st.sigma - spec.sigma_lin);
            REQUIRE(res.norm() < 1e-12);
        }
    }
}

TEST_CASE("cavity steady state refuses the unstable window") {
    SystemParams p;
    p.kappa_ph = 0.1;
    p.g = critical_coupling(p) * std::sqrt(1.0 + p.kappa_ph * p.kappa_ph) * 1.001;
    REQUIRE_THROWS_AS(steady_state_cavity(p), UnstableRegime);
}

TEST_CASE("evolve relaxes the vacuum onto the closed-form steady state") {
    const SystemParams p = cavity_point();
    const GaussianState target = steady_state_cavity(p);
    GaussianState vac;
    const DriftSpec spec = drift_for(p, Regime::CavityLoss);
    const GaussianState end = evolve_final(vac, spec, 50.0 / p.kappa_ph);
    REQUIRE((end.sigma - target.sigma).norm() < 1e-8);
    REQUIRE(end.d.norm() < 1e-12);
}

TEST_CASE("trajectory brackets [0, t_final] exactly and matches evolve_final") {
    const SystemParams p = cavity_point();
    const DriftSpec spec = drift_for(p, Regime::CavityLoss);
    GaussianState vac;
    const double t_final = 0.0503;  // forces a shortened last step
    const Trajectory traj = evolve(vac, spec, t_final);
    REQUIRE(traj.times.front() == 0.0);
    REQUIRE(traj.times.back() == t_final);
    REQUIRE(traj.times.size() == traj.states.size());
    const GaussianState end = evolve_final(vac, spec, t_final);
    REQUIRE((traj.states.back().sigma - end.sigma).norm() < 1e-14);
}

TEST_CASE("displacement decays at kappa (not 2 kappa) in the chosen convention") {
    SystemParams p;
    p.g = 0.0;  // pure rotation + damping
    p.kappa_ph = 0.25;
    const DriftSpec spec = drift_for(p, Regime::CavityLoss);
    GaussianState st;
    st.d << 1.3, -0.4;
    const double T = 4.0;
    const GaussianState end = evolve_final(st, spec, T);
    REQUIRE(end.d.norm() == Approx(st.d.norm() * std::exp(-spec.kappa * T)).epsilon(1e-8));
}

TEST_CASE("evolve rejects non-physical covariances") {
    const DriftSpec spec = drift_for(cavity_point(), Regime::CavityLoss);
    GaussianState bad;
    bad.sigma << 1.0, 0.0, 0.0, -1.0;
    REQUIRE_THROWS_AS(evolve_final(bad, spec, 1.0), StabilityError);
}

TEST_CASE("chain steady state is the displaced vacuum with pinned displacement") {
    SystemParams p;  // defaults: L=400, g=0.88, eta=2.41, kappa=0.1
    const GaussianState st = steady_state_chain(p);
    REQUIRE(st.d(0) == Approx(8.4563851723221308).epsilon(1e-12));
    REQUIRE(st.d(1) == Approx(0.84563851723221306).epsilon(1e-12));
    REQUIRE((st.sigma - 0.5 * Eigen::Matrix2d::Identity()).norm() == 0.0);

    SystemParams small = p;
    small.n_sites = 8;
    const GaussianState st8 = steady_state_chain(small);
    REQUIRE(st8.d(0) == Approx(1.19591345993487).epsilon(1e-12));
    REQUIRE(st8.d(1) == Approx(0.11959134599348699).epsilon(1e-12));
}

TEST_CASE("chain steady state is a fixed point of displacement and covariance flow") {
    SystemParams p;
    const GaussianState st = steady_state_chain(p);
    const DriftSpec spec = drift_for(p, Regime::ChainLoss);
    const Eigen::Vector2d d_res = spec.B * st.d + spec.c - spec.kappa * st.d;
    REQUIRE(d_res.norm() < 1e-10);
    const Eigen::Matrix2d s_res = spec.B * st.sigma + st.sigma * spec.B.transpose() -
                                  2.0 * spec.kappa * (st.sigma - spec.sigma_lin);
    REQUIRE(s_res.norm() < 1e-14);
    // And the integrator agrees: starting from vacuum the displaced vacuum is
    // reached.  Displacement closes at rate kappa_ph, so crossing 1e-8 from a
    // starting distance of ~8.5 needs t well past ln(8.5e8)/kappa ~ 206.
    GaussianState vac;
    const GaussianState end = evolve_final(vac, spec, 300.0);
    REQUIRE((end.d - st.d).norm() < 1e-8);
    REQUIRE((end.sigma - st.sigma).norm() < 1e-12);
}

TEST_CASE("lossless ground state: minimum-uncertainty squeezed vacuum") {
    SystemParams p;
    p.g = 0.5;
    const GaussianState st = ground_state_lossless(p);
    const double w = 1.0 - coupling_ratio_sq(p);
    REQUIRE(st.sigma(0, 0) == Approx(0.5 / std::sqrt(w)).epsilon(1e-14));
    REQUIRE(st.sigma(1, 1) == Approx(0.5 * std::sqrt(w)).epsilon(1e-14));
    REQUIRE(st.sigma(0, 0) * st.sigma(1, 1) == Approx(0.25).epsilon(1e-14));
    REQUIRE(st.sigma(0, 0) > st.sigma(1, 1));  // x is anti-squeezed
    p.g = critical_coupling(p);
    REQUIRE_THROWS_AS(ground_state_lossless(p), UnstableRegime);
}

TEST_CASE("homodyne marginal projects mean and variance") {
    GaussianState st;
    st.d << 1.0, -2.0;
    st.sigma << 0.7, 0.1, 0.1, 0.5;
    const double phi = 0.3;
    const Marginal m = marginal(st, phi);
    const double c = std::cos(phi), s = std::sin(phi);
    REQUIRE(m.mean == Approx(c * 1.0 + s * -2.0).epsilon(1e-14));
    REQUIRE(m.var ==
            Approx(c * c * 0.7 + 2.0 * c * s * 0.1 + s * s * 0.5).epsilon(1e-14));
}

TEST_CASE("wigner function peaks at the displacement with height 1/(2 pi sqrt(det))") {
    const GaussianState st = steady_state_chain(SystemParams{});
    const double peak = wigner(st, st.d(0), st.d(1));
    REQUIRE(peak ==
            Approx(1.0 / (2.0 * kPi * std::sqrt(st.sigma.determinant()))).epsilon(1e-13));
    REQUIRE(wigner(st, st.d(0) + 1.0, st.d(1)) < peak);
}
