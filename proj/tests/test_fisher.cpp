#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "critchain/fisher.hpp"

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

TEST_CASE("state derivative of the cavity steady state matches pinned values") {
    const StateDerivative der = state_derivative(cavity_point(), Regime::CavityLoss);
    REQUIRE(der.sigma_dot(0, 0) == Approx(0.16799191).epsilon(1e-6));
    REQUIRE(der.sigma_dot(0, 1) == Approx(0.01679919).epsilon(1e-6));
    REQUIRE(der.sigma_dot(1, 1) == Approx(-0.07789755).epsilon(1e-6));
    REQUIRE(der.d_dot.norm() == 0.0);
}

TEST_CASE("state derivative step gate trips for an absurd step") {
    REQUIRE_THROWS_AS(state_derivative(cavity_point(), Regime::CavityLoss, 0.4), StepError);
}

TEST_CASE("all three normalization readings land on their pinned values") {
    const SystemParams p = cavity_point();
    const GaussianState st = steady_state_cavity(p);
    const StateDerivative der = state_derivative(p, Regime::CavityLoss);
    const fisher_detail::Variants v = fisher_detail::all_variants(st, der);
    REQUIRE(v.half == Approx(0.005944911190061174).epsilon(1e-8));
    REQUIRE(v.quarter == Approx(-2.07023127101921).epsilon(1e-8));
    REQUIRE(v.consistent == Approx(0.08067194815898746).epsilon(1e-8));
}

TEST_CASE("arbitration against the oracle selects the consistent reading") {
    REQUIRE(fisher_detail::arbitrated_variant() == 2);
    const FisherResult r = qfi_engine(cavity_point(), Regime::CavityLoss);
    REQUIRE(r.meta.at("arbitrated_variant") == 2.0);
    REQUIRE(r.value == Approx(r.meta.at("variant_consistent")).epsilon(1e-14));
    REQUIRE(r.value == Approx(0.08067194815898746).epsilon(1e-8));
    REQUIRE(r.meta.count("variant_half") == 1);
    REQUIRE(r.meta.count("variant_quarter") == 1);
}

TEST_CASE("engine QFI: lossless pure state") {
    SystemParams p;
    p.g = 0.5;
    const FisherResult r = qfi_engine(p, Regime::Lossless);
    REQUIRE(r.value == Approx(0.027254378072211802).epsilon(1e-9));
    REQUIRE(r.meta.count("xi_dot") == 1);
}

TEST_CASE("engine QFI: driven chain displaced vacuum") {
    SystemParams p;  // L=400 defaults
    const FisherResult r = qfi_engine(p, Regime::ChainLoss);
    REQUIRE(r.value == Approx(144.4511093689926).epsilon(1e-8));
}

TEST_CASE("closed-form QFI values are transcribed faithfully") {
    SystemParams p;
    p.g = 0.5;
    REQUIRE(qfi_closed(p, Regime::Lossless).value ==
            Approx(0.006813594518978072).epsilon(1e-12));
    REQUIRE(qfi_closed(SystemParams{}, Regime::ChainLoss).value ==
            Approx(145.017005880893).epsilon(1e-12));
}

TEST_CASE("engine homodyne CFI values") {
    SystemParams p;
    p.g = 0.5;
    REQUIRE(cfi_homodyne(p, Regime::Lossless, 0.25 * kPi).value ==
            Approx(0.0009764378111742695).epsilon(1e-8));
    const SystemParams c = cavity_point();
    REQUIRE(cfi_homodyne(c, Regime::CavityLoss, 0.0).value ==
            Approx(0.03730172517852741).epsilon(1e-8));
    REQUIRE(cfi_homodyne(c, Regime::CavityLoss, kPi / 3.0).value ==
            Approx(7.645930751772176e-06).epsilon(1e-6));
    REQUIRE(cfi_homodyne(SystemParams{}, Regime::ChainLoss, 0.0).value ==
            Approx(143.0209003653392).epsilon(1e-8));
    REQUIRE(cfi_homodyne(SystemParams{}, Regime::ChainLoss, 0.25 * kPi).value ==
            Approx(86.52764472103023).epsilon(1e-8));
}

TEST_CASE("closed-form homodyne CFI values are transcribed faithfully") {
    SystemParams p;
    p.g = 0.5;
    REQUIRE(cfi_closed(p, Regime::Lossless, 0.25 * kPi).value ==
            Approx(0.011672681935484487).epsilon(1e-12));
    REQUIRE(cfi_closed(p, Regime::Lossless, 0.0).value == Approx(1.0).epsilon(1e-12));
    REQUIRE(cfi_closed(SystemParams{}, Regime::ChainLoss, 0.0).value ==
            Approx(143.0209003653392).epsilon(1e-12));
    REQUIRE(cfi_closed(SystemParams{}, Regime::ChainLoss, 0.25 * kPi).value ==
            Approx(2.27272228637793).epsilon(1e-12));
}

TEST_CASE("lossless homodyne at phi = 0 and pi/2 saturates the QFI") {
    for (double g : {0.1, 0.4, 0.7, 0.85}) {
        SystemParams p;
        p.g = g;
        const double qfi = qfi_engine(p, Regime::Lossless).value;
        for (double phi : {0.0, 0.5 * kPi}) {
            const double r = ratio(p, Regime::Lossless, phi);
            REQUIRE(r == Approx(1.0).margin(1e-9));
        }
        const double mid = ratio(p, Regime::Lossless, 0.25 * kPi);
        REQUIRE(mid < 1.0);
        REQUIRE(qfi > 0.0);
    }
}

TEST_CASE("chain ratio at phi = 0 matches CFI/QFI of the pinned values") {
    const double r = ratio(SystemParams{}, Regime::ChainLoss, 0.0);
    REQUIRE(r == Approx(143.0209003653392 / 144.4511093689926).epsilon(1e-9));
}

TEST_CASE("CFI never exceeds QFI on the engine path") {
    std::mt19937 rng(12345);
    std::uniform_real_distribution<double> uphi(0.0, kPi);
    std::uniform_real_distribution<double> ug(0.05, 0.8);
    std::uniform_real_distribution<double> ukap(0.05, 0.9);
    for (int i = 0; i < 60; ++i) {
        SystemParams p;
        p.g = ug(rng);
        p.kappa_ph = ukap(rng);
        const Regime reg = static_cast<Regime>(i % 3);
        const double qfi = qfi_engine(p, reg).value;
        const double cfi = cfi_homodyne(p, reg, uphi(rng)).value;
        REQUIRE(cfi <= qfi + 1e-9 + 1e-9 * std::abs(qfi));
    }
}

TEST_CASE("ratio returns NaN when the QFI vanishes") {
    SystemParams p;
    p.g = 0.0;  // no drive: Lambda = 0, flat chain state
    const double r = ratio(p, Regime::ChainLoss, 0.3);
    REQUIRE(std::isnan(r));
}

TEST_CASE("the mixed-state formula refuses pure states (purity pole)") {
    SystemParams p;
    p.g = 0.5;
    const GaussianState pure = ground_state_lossless(p);
    StateDerivative der;
    der.sigma_dot << 0.1, 0.0, 0.0, -0.1;
    REQUIRE_THROWS_AS(qfi_gaussian(pure, der), PurityPole);
}

TEST_CASE("closed forms validate their regime before evaluating") {
    SystemParams p;
    p.g = 2.0;  // beyond critical
    REQUIRE_THROWS_AS(qfi_closed(p, Regime::Lossless), UnstableRegime);
    p.kappa_ph = 0.1;
    REQUIRE_THROWS_AS(qfi_closed(p, Regime::CavityLoss), UnstableRegime);
}

TEST_CASE("Cramer-Rao bound") {
    REQUIRE(cr_bound(4.0, 25.0) == Approx(0.01).epsilon(1e-14));
    REQUIRE_THROWS_AS(cr_bound(1.0, 0.0), RangeError);
    REQUIRE_THROWS_AS(cr_bound(-1.0, 10.0), RangeError);
}

TEST_CASE("oracle wrappers tag their path") {
    const FisherResult q = qfi_oracle(cavity_point(), Regime::CavityLoss, 40);
    REQUIRE(q.path == Path::Oracle);
    REQUIRE(q.value == Approx(0.08067194815898746).epsilon(1e-4));
}
