#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "critchain/electron_sector.hpp"

using namespace critchain;
using Catch::Approx;

TEST_CASE("momentum grid spans (-pi, pi] with L points") {
    const MomentumGrid g = MomentumGrid::make(8);
    REQUIRE(g.k.size() == 8);
    REQUIRE(g.k.front() == Approx(-kPi + kPi / 4.0).epsilon(1e-15));
    REQUIRE(g.k.back() == Approx(kPi).epsilon(1e-15));
}

TEST_CASE("filled-window expectations: continuum closed forms") {
    SystemParams p;
    p.n_sites = 400;
    const ElectronSummary e = fs_expectations(p, 0.7, Form::Continuum);
    REQUIRE(e.t_bar == Approx(194.76546366646966).epsilon(1e-13));
    REQUIRE(e.j_bar == Approx(164.04868696177144).epsilon(1e-13));
}

TEST_CASE("filled-window expectations: discrete grid sums at L=400") {
    SystemParams p;
    p.n_sites = 400;
    SECTION("s = 0: both edges on the grid, lower edge breaks the tie") {
        const ElectronSummary e = fs_expectations(p, 0.0, Form::Discrete);
        REQUIRE(e.t_bar == Approx(254.6426729377443).epsilon(1e-13));
        // The k = -pi/2 edge mode is taken, contributing 2 sin(-pi/2) = -2.
        REQUIRE(e.j_bar == Approx(-2.0).margin(1e-10));
    }
    SECTION("s = 0.7: no edge modes") {
        const ElectronSummary e = fs_expectations(p, 0.7, Form::Discrete);
        REQUIRE(e.t_bar == Approx(194.93070369485866).epsilon(1e-13));
        REQUIRE(e.j_bar == Approx(163.85637502979927).epsilon(1e-13));
    }
    SECTION("s = pi/2: edge at k=0 contributes +2 to t_bar") {
        const ElectronSummary e = fs_expectations(p, kPi / 2.0, Form::Discrete);
        REQUIRE(e.t_bar == Approx(2.0).margin(1e-10));
        REQUIRE(e.j_bar == Approx(254.64267293774432).epsilon(1e-13));
    }
}

TEST_CASE("discrete window at L=50 has no edge modes and vanishing current") {
    SystemParams p;
    p.n_sites = 50;
    const ElectronSummary e = fs_expectations(p, 0.0, Form::Discrete);
    REQUIRE(e.t_bar == Approx(31.85194221981731).epsilon(1e-13));
    REQUIRE(std::abs(e.j_bar) < 1e-12);
}

TEST_CASE("discrete window converges to the continuum as L grows") {
    SystemParams p400;
    p400.n_sites = 400;
    SystemParams p800;
    p800.n_sites = 800;
    const double gap400 = std::abs(fs_expectations(p400, 0.3, Form::Discrete).t_bar -
                                   fs_expectations(p400, 0.3, Form::Continuum).t_bar) /
                          400.0;
    const double gap800 = std::abs(fs_expectations(p800, 0.3, Form::Discrete).t_bar -
                                   fs_expectations(p800, 0.3, Form::Continuum).t_bar) /
                          800.0;
    REQUIRE(gap800 < gap400);
}

TEST_CASE("discrete window needs an even number of sites") {
    SystemParams p;
    p.n_sites = 401;
    REQUIRE_THROWS_AS(fs_expectations(p, 0.0, Form::Discrete), HalfFillingError);
}

TEST_CASE("steady occupation and swept expectations") {
    SystemParams p;
    p.n_sites = 400;
    p.eta = 2.41;
    SECTION("n(k) = 1/(eta (1 + sin k) + 1)") {
        REQUIRE(steady_occupation(p, 0.0) == Approx(1.0 / 3.41).epsilon(1e-14));
        REQUIRE(steady_occupation(p, -kPi / 2.0) == Approx(1.0).epsilon(1e-12));
    }
    SECTION("continuum: T vanishes, J = L t f(eta)") {
        const ElectronSummary e = steady_expectations(p, Form::Continuum);
        REQUIRE(e.t_bar == 0.0);
        REQUIRE(e.j_bar == Approx(-137.25824937888848).epsilon(1e-13));
    }
    SECTION("discrete matches the continuum to spectral accuracy") {
        const ElectronSummary e = steady_expectations(p, Form::Discrete);
        REQUIRE(std::abs(e.t_bar) < 1e-12);
        REQUIRE(e.j_bar == Approx(-137.25824937888848).epsilon(1e-12));
    }
}

TEST_CASE("occupation relaxation solves its rate equation") {
    SystemParams p;
    p.kappa_el = 0.482;
    p.gamma_pump = 0.2;
    const double k = 0.37;
    const double r = 4.0 * p.kappa_el * (1.0 + std::sin(k)) + 4.0 * p.gamma_pump;
    const double n_inf = 4.0 * p.gamma_pump / r;
    SECTION("endpoints") {
        REQUIRE(relax_occupation(p, k, 0.9, 0.0) == Approx(0.9).epsilon(1e-14));
        REQUIRE(relax_occupation(p, k, 0.9, 1e3) == Approx(n_inf).margin(1e-12));
    }
    SECTION("finite-difference residual of dn/dt = -4 k_el (1+sin k) n + 4 G (1-n)") {
        const double t = 0.8, h = 1e-6;
        const double lhs =
            (relax_occupation(p, k, 0.9, t + h) - relax_occupation(p, k, 0.9, t - h)) /
            (2.0 * h);
        const double n = relax_occupation(p, k, 0.9, t);
        const double rhs = -4.0 * p.kappa_el * (1.0 + std::sin(k)) * n +
                           4.0 * p.gamma_pump * (1.0 - n);
        REQUIRE(lhs == Approx(rhs).epsilon(1e-6));
    }
    SECTION("dark mode with no pump keeps its occupation") {
        SystemParams q;
        q.kappa_el = 0.5;
        q.gamma_pump = 0.0;
        REQUIRE(relax_occupation(q, -kPi / 2.0, 0.33, 5.0) == Approx(0.33).epsilon(1e-9));
    }
    SECTION("domain errors") {
        SystemParams q;
        REQUIRE_THROWS_AS(relax_occupation(q, 0.0, 0.5, 1.0), RangeError);
        REQUIRE_THROWS_AS(relax_occupation(p, 0.0, 0.5, -1.0), RangeError);
    }
}

TEST_CASE("optimal eta lands on 1 + sqrt(2)") {
    SystemParams p;
    REQUIRE(optimal_eta(p) == Approx(1.0 + std::sqrt(2.0)).margin(1e-5));
}
