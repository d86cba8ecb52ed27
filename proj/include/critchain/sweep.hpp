#pragma once
// critchain -- figure sweeps, the generic parameter sweep, and the self-check.
//
// Every command writes CSV (and optionally SVG) into an output directory and
// returns a process exit code.  Parallel sweeps are deterministic: each row
// is rendered to its own string by index, buffered, and written in index
// order, so the bytes are identical for any --jobs value.

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <functional>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "critchain/csv.hpp"
#include "critchain/electron_sector.hpp"
#include "critchain/errors.hpp"
#include "critchain/fisher.hpp"
#include "critchain/fock_oracle.hpp"
#include "critchain/gaussian_engine.hpp"
#include "critchain/model.hpp"
#include "critchain/svg.hpp"

namespace critchain::sweep {

struct Options {
    std::string out_dir = ".";
    bool svg = true;
    bool oracle = false;  // include Fock-oracle columns where offered
    int jobs = 1;
    int n_max = 0;                // 0 = per-command default
    std::vector<double> phis;     // empty = per-command default
    SystemParams base;            // shared physics defaults
};

namespace detail {

inline std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        v[static_cast<std::size_t>(i)] =
            (n == 1) ? lo : lo + (hi - lo) * i / static_cast<double>(n - 1);
    }
    return v;
}

inline std::vector<double> geomspace(double lo, double hi, int n) {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        v[static_cast<std::size_t>(i)] =
            (n == 1) ? lo : lo * std::pow(hi / lo, i / static_cast<double>(n - 1));
    }
    return v;
}

inline std::vector<double> default_phis(const Options& o) {
    if (!o.phis.empty()) return o.phis;
    return {0.0, 0.25 * kPi, 0.4 * kPi, 0.5 * kPi, 0.6 * kPi, 0.8 * kPi};
}

/// Deterministic parallel map: rows[i] = fn(i), any scheduling.
inline std::vector<std::string> run_rows(std::size_t n, int jobs,
                                         const std::function<std::string(std::size_t)>& fn) {
    std::vector<std::string> rows(n);
    jobs = std::max(1, jobs);
    if (jobs == 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) rows[i] = fn(i);
        return rows;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    const int workers = std::min<int>(jobs, static_cast<int>(n));
    pool.reserve(static_cast<std::size_t>(workers));
    for (int t = 0; t < workers; ++t) {
        pool.emplace_back([&] {
            while (true) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n) break;
                try {
                    rows[i] = fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
    return rows;
}

inline std::string out_path(const Options& o, const std::string& name) {
    std::filesystem::create_directories(o.out_dir);
    return (std::filesystem::path(o.out_dir) / name).string();
}

inline void meta_common(csv::Writer& w, const SystemParams& p) {
    w.metadata("omega0", p.omega0);
    w.metadata("t_hop", p.t_hop);
    w.metadata("g", p.g);
    w.metadata("kappa_ph", p.kappa_ph);
    w.metadata("eta", p.eta);
    w.metadata("n_sites", p.n_sites);
}

/// Resolve the shared-cache arbitration before any worker threads spawn so
/// row content cannot depend on scheduling.
inline void prewarm_arbitration() { fisher_detail::arbitrated_variant(); }

}  // namespace detail

/// Ground-state scan over the window center s for several couplings:
/// exact spectrum of the full photon Hamiltonian next to the quadratic
/// (truncated) one.  Rows that fail the truncation ladder are marked TRUNC
/// (keeping the n_max value); quadratic rows without a ground state are
/// marked NOGROUND.  The run always continues.
inline int cmd_fig2(const Options& opts) {
    const int n_max = opts.n_max > 0 ? opts.n_max : 80;
    const std::vector<double> gs = {0.2, 0.5, 0.88, 1.2};
    const std::vector<double> ss = detail::linspace(-0.5 * kPi, 0.5 * kPi, 201);
    const std::size_t n = gs.size() * ss.size();
    auto fn = [&](std::size_t idx) {
        const double g = gs[idx / ss.size()];
        const double s = ss[idx % ss.size()];
        SystemParams p = opts.base;
        p.g = g;
        std::string flag = "OK";
        double e0_full;
        try {
            e0_full = full_hamiltonian_spectrum(p, s, n_max)[0];
        } catch (const TruncationError& e) {
            e0_full = e.spectrum_at_n.empty() ? e.value_at_n : e.spectrum_at_n[0];
            flag = "TRUNC";
        }
        const TruncatedSpectrum trunc = truncated_hamiltonian_spectrum(p, s, n_max);
        if (trunc.no_ground_state) {
            flag = (flag == "OK") ? "NOGROUND" : flag + ",NOGROUND";
        }
        return csv::join({csv::fmt(g), csv::fmt(s), csv::fmt(e0_full),
                          csv::fmt(trunc.eigenvalues[0]), csv::fmt(trunc.v_eff), flag});
    };
    const std::vector<std::string> rows = detail::run_rows(n, opts.jobs, fn);
    csv::Writer w;
    detail::meta_common(w, opts.base);
    w.metadata("command", std::string("fig2"));
    w.metadata("n_max", n_max);
    w.header({"g", "s", "e0_full", "e0_trunc", "v_eff", "flag"});
    w.rows(rows);
    w.write(detail::out_path(opts, "fig2.csv"));
    if (opts.svg) {
        std::vector<svg::Series> series;
        for (std::size_t gi = 0; gi < gs.size(); ++gi) {
            svg::Series srs;
            srs.label = "g=" + std::to_string(gs[gi]).substr(0, 4);
            for (std::size_t si = 0; si < ss.size(); ++si) {
                std::istringstream is(rows[gi * ss.size() + si]);
                std::string cell;
                std::vector<std::string> cells;
                while (std::getline(is, cell, ',')) cells.push_back(cell);
                srs.x.push_back(ss[si]);
                srs.y.push_back(std::stod(cells[2]));
            }
            series.push_back(std::move(srs));
        }
        svg::write_line_plot(detail::out_path(opts, "fig2.svg"), series,
                             "ground energy vs window center", "s", "E0");
    }
    return 0;
}

namespace detail {

/// Shared body of the lossless (fig3) and lossy-cavity (fig5) g sweeps.
inline int fig_g_sweep(const Options& opts, Regime regime, const std::string& name) {
    SystemParams base = opts.base;
    const double gc = critical_coupling(base);
    const std::vector<double> gs = linspace(0.05, 0.99 * gc, 100);
    const std::vector<double> phis = default_phis(opts);
    if (regime == Regime::CavityLoss) prewarm_arbitration();
    const std::size_t n = gs.size() * phis.size();
    auto fn = [&](std::size_t idx) {
        SystemParams p = base;
        p.g = gs[idx / phis.size()];
        const double phi = phis[idx % phis.size()];
        const double qfi_e = qfi_engine(p, regime).value;
        const double cfi_e = cfi_homodyne(p, regime, phi).value;
        const double qfi_c = qfi_closed(p, regime).value;
        const double cfi_c = cfi_closed(p, regime, phi).value;
        std::vector<std::string> cells = {
            csv::fmt(p.g),          csv::fmt(phi),          csv::fmt(qfi_e),
            csv::fmt(cfi_e),        csv::fmt(cfi_e / qfi_e), csv::fmt(qfi_c),
            csv::fmt(cfi_c),        csv::fmt(cfi_c / qfi_c)};
        if (opts.oracle) {
            const int n_ora = opts.n_max > 0 ? opts.n_max : fock::default_n_max(p);
            cells.push_back(csv::fmt(qfi_sld(p, regime, n_ora)));
            cells.push_back(csv::fmt(cfi_numeric(p, regime, phi, n_ora)));
        }
        return csv::join(cells);
    };
    const std::vector<std::string> rows = run_rows(n, opts.jobs, fn);
    csv::Writer w;
    meta_common(w, base);
    w.metadata("command", name);
    w.metadata("regime", std::string(to_string(regime)));
    std::vector<std::string> header = {"g",          "phi",        "qfi_engine",
                                       "cfi_engine", "ratio_engine", "qfi_closed",
                                       "cfi_closed", "ratio_closed"};
    if (opts.oracle) {
        header.push_back("qfi_oracle");
        header.push_back("cfi_oracle");
    }
    w.header(header);
    w.rows(rows);
    w.write(out_path(opts, name + ".csv"));
    if (opts.svg) {
        std::vector<svg::Series> series(phis.size());
        for (std::size_t pi = 0; pi < phis.size(); ++pi) {
            series[pi].label = "phi=" + std::to_string(phis[pi]).substr(0, 5);
        }
        for (std::size_t idx = 0; idx < n; ++idx) {
            std::istringstream is(rows[idx]);
            std::string cell;
            std::vector<std::string> cells;
            while (std::getline(is, cell, ',')) cells.push_back(cell);
            series[idx % phis.size()].x.push_back(std::stod(cells[0]));
            series[idx % phis.size()].y.push_back(std::stod(cells[4]));
        }
        svg::write_line_plot(out_path(opts, name + ".svg"), series, name + ": CFI/QFI vs g",
                             "g", "ratio");
    }
    return 0;
}

}  // namespace detail

/// Lossless regime: information vs coupling for a set of homodyne angles.
inline int cmd_fig3(const Options& opts) {
    return detail::fig_g_sweep(opts, Regime::Lossless, "fig3");
}

/// Lossy cavity: log10 QFI over the (g, kappa) plane (engine and printed
/// closed form); unstable cells are flagged UNSTABLE and left NaN.
inline int cmd_fig4(const Options& opts) {
    SystemParams base = opts.base;
    const std::vector<double> gs = detail::linspace(0.05, 1.2, 101);
    const std::vector<double> kappas = detail::linspace(0.02, 1.0, 101);
    detail::prewarm_arbitration();
    const std::size_t n = gs.size() * kappas.size();
    auto fn = [&](std::size_t idx) {
        SystemParams p = base;
        p.g = gs[idx / kappas.size()];
        p.kappa_ph = kappas[idx % kappas.size()];
        double lq_e = std::nan(""), lq_c = std::nan("");
        std::string flag = "OK";
        try {
            validate_params(p, Regime::CavityLoss);
            lq_e = std::log10(qfi_engine(p, Regime::CavityLoss).value);
            lq_c = std::log10(qfi_closed(p, Regime::CavityLoss).value);
        } catch (const UnstableRegime&) {
            flag = "UNSTABLE";
        }
        return csv::join(
            {csv::fmt(p.g), csv::fmt(p.kappa_ph), csv::fmt(lq_e), csv::fmt(lq_c), flag});
    };
    const std::vector<std::string> rows = detail::run_rows(n, opts.jobs, fn);
    csv::Writer w;
    detail::meta_common(w, base);
    w.metadata("command", std::string("fig4"));
    w.header({"g", "kappa_ph", "log10_qfi_engine", "log10_qfi_closed", "flag"});
    w.rows(rows);
    w.write(detail::out_path(opts, "fig4.csv"));
    if (opts.svg) {
        std::vector<std::vector<double>> grid(kappas.size(),
                                              std::vector<double>(gs.size(), std::nan("")));
        for (std::size_t idx = 0; idx < n; ++idx) {
            std::istringstream is(rows[idx]);
            std::string cell;
            std::vector<std::string> cells;
            while (std::getline(is, cell, ',')) cells.push_back(cell);
            grid[idx % kappas.size()][idx / kappas.size()] = std::stod(cells[2]);
        }
        svg::write_heatmap(detail::out_path(opts, "fig4.svg"), grid, "log10 QFI", "g",
                           "kappa_ph");
    }
    return 0;
}

/// Lossy cavity: information vs coupling at fixed kappa for several angles.
inline int cmd_fig5(const Options& opts) {
    return detail::fig_g_sweep(opts, Regime::CavityLoss, "fig5");
}

/// Lossy cavity: ratio vs kappa at phi = 0 (engine next to printed forms).
inline int cmd_fig6(const Options& opts) {
    SystemParams base = opts.base;
    const std::vector<double> kappas = detail::linspace(0.01, 1.2, 120);
    detail::prewarm_arbitration();
    auto fn = [&](std::size_t idx) {
        SystemParams p = base;
        p.kappa_ph = kappas[idx];
        double qe = std::nan(""), ce = std::nan(""), qc = std::nan(""), cc = std::nan("");
        std::string flag = "OK";
        try {
            validate_params(p, Regime::CavityLoss);
            qe = qfi_engine(p, Regime::CavityLoss).value;
            ce = cfi_homodyne(p, Regime::CavityLoss, 0.0).value;
            qc = qfi_closed(p, Regime::CavityLoss).value;
            cc = cfi_closed(p, Regime::CavityLoss, 0.0).value;
        } catch (const UnstableRegime&) {
            flag = "UNSTABLE";
        }
        return csv::join({csv::fmt(p.kappa_ph), csv::fmt(qe), csv::fmt(ce),
                          csv::fmt(ce / qe), csv::fmt(qc), csv::fmt(cc), csv::fmt(cc / qc),
                          flag});
    };
    const std::vector<std::string> rows = detail::run_rows(kappas.size(), opts.jobs, fn);
    csv::Writer w;
    detail::meta_common(w, base);
    w.metadata("command", std::string("fig6"));
    w.header({"kappa_ph", "qfi_engine", "cfi_engine", "ratio_engine", "qfi_closed",
              "cfi_closed", "ratio_closed", "flag"});
    w.rows(rows);
    w.write(detail::out_path(opts, "fig6.csv"));
    if (opts.svg) {
        svg::Series s_e, s_c;
        s_e.label = "engine";
        s_c.label = "closed";
        for (std::size_t i = 0; i < rows.size(); ++i) {
            std::istringstream is(rows[i]);
            std::string cell;
            std::vector<std::string> cells;
            while (std::getline(is, cell, ',')) cells.push_back(cell);
            s_e.x.push_back(kappas[i]);
            s_e.y.push_back(std::stod(cells[3]));
            s_c.x.push_back(kappas[i]);
            s_c.y.push_back(std::stod(cells[6]));
        }
        svg::write_line_plot(detail::out_path(opts, "fig6.svg"), {s_e, s_c},
                             "ratio vs kappa (phi=0)", "kappa_ph", "ratio");
    }
    return 0;
}

/// Driven chain: (a) QFI over (eta, kappa); (b) QFI(eta) slices; (c) |J(inf)|
/// vs eta; (d) QFI vs chain length.  Four CSV sub-tables.
inline int cmd_fig7(const Options& opts) {
    SystemParams base = opts.base;
    const std::vector<double> etas = detail::geomspace(0.3, 30.0, 201);
    {  // (a)
        const std::vector<double> kappas = detail::linspace(0.05, 0.6, 12);
        const std::size_t n = etas.size() * kappas.size();
        auto fn = [&](std::size_t idx) {
            SystemParams p = base;
            p.eta = etas[idx / kappas.size()];
            p.kappa_ph = kappas[idx % kappas.size()];
            return csv::join({csv::fmt(p.eta), csv::fmt(p.kappa_ph),
                              csv::fmt(qfi_engine(p, Regime::ChainLoss).value)});
        };
        const std::vector<std::string> rows = detail::run_rows(n, opts.jobs, fn);
        csv::Writer w;
        detail::meta_common(w, base);
        w.metadata("command", std::string("fig7a"));
        w.header({"eta", "kappa_ph", "qfi_engine"});
        w.rows(rows);
        w.write(detail::out_path(opts, "fig7a.csv"));
        if (opts.svg) {
            std::vector<std::vector<double>> grid(kappas.size(),
                                                  std::vector<double>(etas.size()));
            for (std::size_t idx = 0; idx < n; ++idx) {
                std::istringstream is(rows[idx]);
                std::string cell;
                std::vector<std::string> cells;
                while (std::getline(is, cell, ',')) cells.push_back(cell);
                grid[idx % kappas.size()][idx / kappas.size()] = std::stod(cells[2]);
            }
            svg::write_heatmap(detail::out_path(opts, "fig7a.svg"), grid, "QFI(eta, kappa)",
                               "eta (log grid)", "kappa_ph");
        }
    }
    {  // (b)
        const std::vector<double> kappas = {0.1, 0.3, 0.5};
        const std::size_t n = kappas.size() * etas.size();
        auto fn = [&](std::size_t idx) {
            SystemParams p = base;
            p.kappa_ph = kappas[idx / etas.size()];
            p.eta = etas[idx % etas.size()];
            return csv::join({csv::fmt(p.kappa_ph), csv::fmt(p.eta),
                              csv::fmt(qfi_engine(p, Regime::ChainLoss).value),
                              csv::fmt(qfi_closed(p, Regime::ChainLoss).value)});
        };
        const std::vector<std::string> rows = detail::run_rows(n, opts.jobs, fn);
        csv::Writer w;
        detail::meta_common(w, base);
        w.metadata("command", std::string("fig7b"));
        w.header({"kappa_ph", "eta", "qfi_engine", "qfi_closed"});
        w.rows(rows);
        w.write(detail::out_path(opts, "fig7b.csv"));
    }
    {  // (c)
        auto fn = [&](std::size_t idx) {
            SystemParams p = base;
            p.eta = etas[idx];
            const ElectronSummary es = steady_expectations(p, Form::Continuum);
            return csv::join({csv::fmt(p.eta), csv::fmt(band_asymmetry(p.eta)),
                              csv::fmt(std::abs(es.j_bar))});
        };
        const std::vector<std::string> rows = detail::run_rows(etas.size(), opts.jobs, fn);
        csv::Writer w;
        detail::meta_common(w, base);
        w.metadata("command", std::string("fig7c"));
        w.header({"eta", "f_eta", "abs_j_inf"});
        w.rows(rows);
        w.write(detail::out_path(opts, "fig7c.csv"));
    }
    {  // (d)
        std::vector<int> lengths;
        for (int L = 100; L <= 1600; L += 100) lengths.push_back(L);
        auto fn = [&](std::size_t idx) {
            SystemParams p = base;
            p.n_sites = lengths[idx];
            return csv::join({std::to_string(p.n_sites),
                              csv::fmt(qfi_engine(p, Regime::ChainLoss).value),
                              csv::fmt(qfi_closed(p, Regime::ChainLoss).value)});
        };
        const std::vector<std::string> rows = detail::run_rows(lengths.size(), opts.jobs, fn);
        csv::Writer w;
        detail::meta_common(w, base);
        w.metadata("command", std::string("fig7d"));
        w.header({"n_sites", "qfi_engine", "qfi_closed"});
        w.rows(rows);
        w.write(detail::out_path(opts, "fig7d.csv"));
    }
    return 0;
}

/// Driven chain: (a) ratio over (phi, kappa); (b) ratio vs kappa at phi=0;
/// (c) ratio vs chain length at phi=0.  Engine and closed columns.
inline int cmd_fig8(const Options& opts) {
    SystemParams base = opts.base;
    {  // (a)
        const std::vector<double> kappas = {0.1, 0.3, 0.6, 0.9, 1.1};
        const std::vector<double> phis =
            opts.phis.empty() ? detail::linspace(0.0, kPi, 181) : opts.phis;
        const std::size_t n = kappas.size() * phis.size();
        auto fn = [&](std::size_t idx) {
            SystemParams p = base;
            p.kappa_ph = kappas[idx / phis.size()];
            const double phi = phis[idx % phis.size()];
            return csv::join({csv::fmt(p.kappa_ph), csv::fmt(phi),
                              csv::fmt(ratio(p, Regime::ChainLoss, phi, Path::GaussianFormula)),
                              csv::fmt(ratio(p, Regime::ChainLoss, phi, Path::ClosedForm))});
        };
        const std::vector<std::string> rows = detail::run_rows(n, opts.jobs, fn);
        csv::Writer w;
        detail::meta_common(w, base);
        w.metadata("command", std::string("fig8a"));
        w.header({"kappa_ph", "phi", "ratio_engine", "ratio_closed"});
        w.rows(rows);
        w.write(detail::out_path(opts, "fig8a.csv"));
        if (opts.svg) {
            std::vector<svg::Series> series(kappas.size());
            for (std::size_t ki = 0; ki < kappas.size(); ++ki) {
                series[ki].label = "kappa=" + std::to_string(kappas[ki]).substr(0, 4);
                for (std::size_t pi = 0; pi < phis.size(); ++pi) {
                    std::istringstream is(rows[ki * phis.size() + pi]);
                    std::string cell;
                    std::vector<std::string> cells;
                    while (std::getline(is, cell, ',')) cells.push_back(cell);
                    series[ki].x.push_back(phis[pi]);
                    series[ki].y.push_back(std::stod(cells[2]));
                }
            }
            svg::write_line_plot(detail::out_path(opts, "fig8a.svg"), series,
                                 "ratio vs phi (engine)", "phi", "ratio");
        }
    }
    {  // (b)
        const std::vector<double> kappas = detail::linspace(0.05, 1.2, 116);
        auto fn = [&](std::size_t idx) {
            SystemParams p = base;
            p.kappa_ph = kappas[idx];
            return csv::join({csv::fmt(p.kappa_ph),
                              csv::fmt(ratio(p, Regime::ChainLoss, 0.0, Path::GaussianFormula)),
                              csv::fmt(ratio(p, Regime::ChainLoss, 0.0, Path::ClosedForm))});
        };
        const std::vector<std::string> rows = detail::run_rows(kappas.size(), opts.jobs, fn);
        csv::Writer w;
        detail::meta_common(w, base);
        w.metadata("command", std::string("fig8b"));
        w.header({"kappa_ph", "ratio_engine", "ratio_closed"});
        w.rows(rows);
        w.write(detail::out_path(opts, "fig8b.csv"));
    }
    {  // (c)
        std::vector<int> lengths;
        for (double L : detail::geomspace(100.0, 1e6, 21)) {
            int even = 2 * static_cast<int>(std::llround(L / 2.0));
            lengths.push_back(even);
        }
        auto fn = [&](std::size_t idx) {
            SystemParams p = base;
            p.n_sites = lengths[idx];
            return csv::join({std::to_string(p.n_sites),
                              csv::fmt(ratio(p, Regime::ChainLoss, 0.0, Path::GaussianFormula)),
                              csv::fmt(ratio(p, Regime::ChainLoss, 0.0, Path::ClosedForm))});
        };
        const std::vector<std::string> rows = detail::run_rows(lengths.size(), opts.jobs, fn);
        csv::Writer w;
        detail::meta_common(w, base);
        w.metadata("command", std::string("fig8c"));
        w.header({"n_sites", "ratio_engine", "ratio_closed"});
        w.rows(rows);
        w.write(detail::out_path(opts, "fig8c.csv"));
    }
    return 0;
}

/// Generic deterministic sweep in lexicographic (g, kappa_ph, phi) order.
/// Defaults reproduce the lossless saturation grid: 100 couplings in
/// (0.05, 0.99 g_crit) at phi in {0, pi/4, pi/2}.
inline int cmd_sweep(const Options& opts, Regime regime, std::vector<double> gs = {},
                     std::vector<double> kappas = {}, std::vector<double> phis = {}) {
    SystemParams base = opts.base;
    if (gs.empty()) {
        const double gc = critical_coupling(base);
        gs = detail::linspace(0.05, 0.99 * gc, 100);
    }
    if (kappas.empty()) kappas = {base.kappa_ph};
    if (phis.empty()) {
        phis = opts.phis.empty() ? std::vector<double>{0.0, 0.25 * kPi, 0.5 * kPi}
                                 : opts.phis;
    }
    if (regime == Regime::CavityLoss) detail::prewarm_arbitration();
    const std::size_t n = gs.size() * kappas.size() * phis.size();
    auto fn = [&](std::size_t idx) {
        const std::size_t gi = idx / (kappas.size() * phis.size());
        const std::size_t ki = (idx / phis.size()) % kappas.size();
        const std::size_t pi_ = idx % phis.size();
        SystemParams p = base;
        p.g = gs[gi];
        p.kappa_ph = kappas[ki];
        const double phi = phis[pi_];
        double qe = std::nan(""), ce = std::nan(""), qc = std::nan(""), cc = std::nan("");
        std::string flag = "OK";
        try {
            validate_params(p, regime);
            qe = qfi_engine(p, regime).value;
            ce = cfi_homodyne(p, regime, phi).value;
            qc = qfi_closed(p, regime).value;
            cc = cfi_closed(p, regime, phi).value;
        } catch (const UnstableRegime&) {
            flag = "UNSTABLE";
        }
        return csv::join({std::string(to_string(regime)), csv::fmt(p.g),
                          csv::fmt(p.kappa_ph), csv::fmt(phi), csv::fmt(qe), csv::fmt(ce),
                          csv::fmt(ce / qe), csv::fmt(qc), csv::fmt(cc), flag});
    };
    const std::vector<std::string> rows = detail::run_rows(n, opts.jobs, fn);
    csv::Writer w;
    detail::meta_common(w, base);
    w.metadata("command", std::string("sweep"));
    w.metadata("regime", std::string(to_string(regime)));
    w.header({"regime", "g", "kappa_ph", "phi", "qfi_engine", "cfi_engine", "ratio_engine",
              "qfi_closed", "cfi_closed", "flag"});
    w.rows(rows);
    w.write(detail::out_path(opts, "sweep.csv"));
    return 0;
}

namespace detail {

struct CheckReport {
    std::ostringstream log;
    double worst = 0.0;
    int gated = 0;

    void gate(const std::string& name, double value, double reference) {
        const double denom = std::max(std::abs(reference), 1e-12);
        const double rel = std::abs(value - reference) / denom;
        worst = std::max(worst, rel);
        ++gated;
        log << "  [" << (rel <= 1e-4 ? "ok" : "FAIL") << "] " << name << ": engine "
            << csv::fmt(value) << " vs oracle " << csv::fmt(reference) << " (rel "
            << csv::fmt(rel) << ")\n";
    }

    void note(const std::string& line) { log << "  " << line << '\n'; }
};

}  // namespace detail

/// Cross-validation battery: engine moments / QFI / CFI against the Fock
/// oracle at canonical points of every regime, plus report-only comparisons
/// of the printed closed forms.  Exit 0 when every gated comparison is within
/// 1e-4 relative; exit 2 otherwise.
inline int cmd_check(const Options& opts) {
    detail::prewarm_arbitration();
    detail::CheckReport rep;

    {  // Lossless, g = 0.5
        SystemParams p = opts.base;
        p.g = 0.5;
        p.kappa_ph = 0.0;
        rep.log << "lossless (g=0.5):\n";
        const int n_max = 60;
        const GaussianState eng = ground_state_lossless(p);
        const GaussianState ora = moments(squeezed_vacuum_state(p, n_max));
        rep.gate("sigma_xx", eng.sigma(0, 0), ora.sigma(0, 0));
        rep.gate("sigma_pp", eng.sigma(1, 1), ora.sigma(1, 1));
        rep.gate("qfi", qfi_engine(p, Regime::Lossless).value,
                 qfi_sld(p, Regime::Lossless, n_max));
        for (double phi : {0.0, kPi / 3.0}) {
            rep.gate("cfi(phi=" + std::to_string(phi).substr(0, 4) + ")",
                     cfi_homodyne(p, Regime::Lossless, phi).value,
                     cfi_numeric(p, Regime::Lossless, phi, n_max));
        }
        rep.note("closed-form qfi / engine qfi = " +
                 csv::fmt(qfi_closed(p, Regime::Lossless).value /
                          qfi_engine(p, Regime::Lossless).value));
    }

    struct CavityPoint {
        double g, kappa;
    };
    for (const CavityPoint pt : {CavityPoint{0.5, 0.1}, CavityPoint{0.3, 0.25}}) {
        SystemParams p = opts.base;
        p.g = pt.g;
        p.kappa_ph = pt.kappa;
        rep.log << "cavity (g=" << pt.g << ", kappa=" << pt.kappa << "):\n";
        const int n_max = 40;
        const GaussianState closed = steady_state_cavity(p);
        const GaussianState ora = moments(lindblad_steady_state(p, Regime::CavityLoss, n_max));
        rep.gate("sigma_xx", closed.sigma(0, 0), ora.sigma(0, 0));
        rep.gate("sigma_xp", closed.sigma(0, 1), ora.sigma(0, 1));
        rep.gate("sigma_pp", closed.sigma(1, 1), ora.sigma(1, 1));
        GaussianState vac;
        const GaussianState evolved =
            evolve_final(vac, drift_for(p, Regime::CavityLoss), 30.0 / p.kappa_ph);
        rep.gate("evolved sigma_xx", evolved.sigma(0, 0), ora.sigma(0, 0));
        rep.gate("evolved sigma_pp", evolved.sigma(1, 1), ora.sigma(1, 1));
        rep.gate("qfi", qfi_engine(p, Regime::CavityLoss).value,
                 qfi_sld(p, Regime::CavityLoss, n_max));
        for (double phi : {0.0, kPi / 3.0}) {
            rep.gate("cfi(phi=" + std::to_string(phi).substr(0, 4) + ")",
                     cfi_homodyne(p, Regime::CavityLoss, phi).value,
                     cfi_numeric(p, Regime::CavityLoss, phi, n_max));
        }
        rep.note("closed-form qfi / engine qfi = " +
                 csv::fmt(qfi_closed(p, Regime::CavityLoss).value /
                          qfi_engine(p, Regime::CavityLoss).value));
    }

    {  // Chain, small L so the oracle is exact-diagonalization cheap
        SystemParams p = opts.base;
        p.n_sites = 8;
        rep.log << "chain (L=8, g=" << p.g << ", eta=" << p.eta << ", kappa=" << p.kappa_ph
                << "):\n";
        const int n_max = 44;
        const GaussianState closed = steady_state_chain(p);
        const GaussianState ora = moments(lindblad_steady_state(p, Regime::ChainLoss, n_max));
        rep.gate("d_x", closed.d(0), ora.d(0));
        rep.gate("d_p", closed.d(1), ora.d(1));
        rep.gate("sigma_xx", closed.sigma(0, 0), ora.sigma(0, 0));
        rep.gate("sigma_pp", closed.sigma(1, 1), ora.sigma(1, 1));
        rep.gate("qfi", qfi_engine(p, Regime::ChainLoss).value,
                 qfi_sld(p, Regime::ChainLoss, n_max));
        rep.gate("cfi(phi=pi/4)", cfi_homodyne(p, Regime::ChainLoss, 0.25 * kPi).value,
                 cfi_numeric(p, Regime::ChainLoss, 0.25 * kPi, n_max));
        rep.note("closed-form qfi / engine qfi = " +
                 csv::fmt(qfi_closed(p, Regime::ChainLoss).value /
                          qfi_engine(p, Regime::ChainLoss).value));
    }

    {  // Report-only: arbitration outcome and stability threshold
        const SystemParams p = fisher_detail::arbitration_point();
        const FisherResult r = qfi_engine(p, Regime::CavityLoss);
        rep.note("arbitrated variant index = " +
                 std::to_string(static_cast<int>(r.meta.at("arbitrated_variant"))));
        for (const char* key : {"variant_half", "variant_quarter", "variant_consistent"}) {
            if (r.meta.count(key)) rep.note(std::string(key) + " = " + csv::fmt(r.meta.at(key)));
        }
        SystemParams q = opts.base;
        q.kappa_ph = 0.3;
        const double bound =
            critical_coupling(q) * std::sqrt(1.0 + q.kappa_ph * q.kappa_ph / (q.omega0 * q.omega0));
        rep.note("cavity stability bound at kappa=0.3: g < " + csv::fmt(bound));
    }

    const bool pass = rep.worst <= 1e-4;
    std::cout << "critchain check: " << rep.gated << " gated comparisons, worst rel dev "
              << csv::fmt(rep.worst) << "\n"
              << rep.log.str() << (pass ? "CHECK PASS\n" : "CHECK FAIL\n");
    return pass ? 0 : 2;
}

}  // namespace critchain::sweep
