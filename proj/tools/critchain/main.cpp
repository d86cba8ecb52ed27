// critchain -- command-line driver for the sweep and check commands.

#include <cstdlib>
#include <exception>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "critchain/errors.hpp"
#include "critchain/model.hpp"
#include "critchain/sweep.hpp"

namespace {

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        if (!cell.empty()) out.push_back(std::stod(cell));
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"critchain: hopping-strength metrology of a cavity-coupled chain"};
    app.require_subcommand(1);

    critchain::sweep::Options opts;
    if (const char* env = std::getenv("CRITCHAIN_JOBS")) {
        opts.jobs = std::max(1, std::atoi(env));
    }

    std::string phi_list;
    std::string fault;
    app.set_config("--config");
    app.add_option("--out", opts.out_dir, "output directory")->capture_default_str();
    app.add_flag("--svg,!--no-svg", opts.svg, "write SVG previews next to the CSVs");
    app.add_flag("--oracle,!--no-oracle", opts.oracle,
                 "add Fock-oracle columns where the command offers them");
    app.add_option("--jobs", opts.jobs, "worker threads (default: env CRITCHAIN_JOBS or 1)");
    app.add_option("--nmax", opts.n_max, "Fock-space cutoff override for oracle columns");
    app.add_option("--omega0", opts.base.omega0, "cavity frequency");
    app.add_option("--thop", opts.base.t_hop, "hopping strength");
    app.add_option("--g", opts.base.g, "light-matter coupling");
    app.add_option("--kappa-ph", opts.base.kappa_ph, "photon loss rate");
    app.add_option("--eta", opts.base.eta, "pump asymmetry");
    app.add_option("--sites", opts.base.n_sites, "chain length (even)");
    app.add_option("--phi", phi_list, "comma-separated homodyne angles");
    app.add_option("--inject-fault", fault,
                   "scale one engine quantity by 1.01 (sigma-lin | steady-cavity | lambda)")
        ->check(CLI::IsMember({"sigma-lin", "steady-cavity", "lambda"}));

    // Global options remain usable after the subcommand name
    // (e.g. `critchain sweep --jobs 8`).
    auto sub = [&app](const char* name, const char* help) {
        auto* s = app.add_subcommand(name, help);
        s->fallthrough();
        return s;
    };
    auto* fig2 = sub("fig2", "ground-state scan over the window center");
    auto* fig3 = sub("fig3", "lossless information vs coupling");
    auto* fig4 = sub("fig4", "lossy-cavity QFI map over (g, kappa)");
    auto* fig5 = sub("fig5", "lossy-cavity information vs coupling");
    auto* fig6 = sub("fig6", "lossy-cavity ratio vs kappa");
    auto* fig7 = sub("fig7", "driven-chain QFI tables");
    auto* fig8 = sub("fig8", "driven-chain ratio tables");
    auto* sweep_cmd = sub("sweep", "generic (g, kappa, phi) sweep");
    auto* check_cmd = sub("check", "engine vs oracle cross-validation");

    std::string regime_name = "lossless";
    std::string g_list;
    std::string kappa_list;
    sweep_cmd->add_option("--regime", regime_name, "lossless | cavity | chain")
        ->check(CLI::IsMember({"lossless", "cavity", "chain"}));
    sweep_cmd->add_option("--gs", g_list, "comma-separated couplings");
    sweep_cmd->add_option("--kappas", kappa_list, "comma-separated loss rates");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    if (!phi_list.empty()) opts.phis = parse_list(phi_list);
    auto& inject = critchain::FaultInjection::instance();
    if (fault == "sigma-lin") inject.sigma_lin_scale = 1.01;
    if (fault == "steady-cavity") inject.steady_cavity_scale = 1.01;
    if (fault == "lambda") inject.lambda_scale = 1.01;

    try {
        if (fig2->parsed()) return critchain::sweep::cmd_fig2(opts);
        if (fig3->parsed()) return critchain::sweep::cmd_fig3(opts);
        if (fig4->parsed()) return critchain::sweep::cmd_fig4(opts);
        if (fig5->parsed()) return critchain::sweep::cmd_fig5(opts);
        if (fig6->parsed()) return critchain::sweep::cmd_fig6(opts);
        if (fig7->parsed()) return critchain::sweep::cmd_fig7(opts);
        if (fig8->parsed()) return critchain::sweep::cmd_fig8(opts);
        if (sweep_cmd->parsed()) {
            critchain::Regime regime = critchain::Regime::Lossless;
            if (regime_name == "cavity") regime = critchain::Regime::CavityLoss;
            if (regime_name == "chain") regime = critchain::Regime::ChainLoss;
            return critchain::sweep::cmd_sweep(opts, regime, parse_list(g_list),
                                               parse_list(kappa_list), opts.phis);
        }
        if (check_cmd->parsed()) return critchain::sweep::cmd_check(opts);
    } catch (const std::exception& e) {
        std::cerr << "critchain: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
