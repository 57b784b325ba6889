#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "catmap/experiments.hpp"

namespace {

void add_common_options(CLI::App* cmd, catmap::ExperimentConfig& cfg) {
    cmd->set_config("--config");
    cmd->add_option("--matrix", cfg.matrix, "map entries a11 a12 a21 a22")->expected(4);
    cmd->add_option("--n-start", cfg.n_start, "first N of the sweep");
    cmd->add_option("--n-stop", cfg.n_stop, "last N of the sweep");
    cmd->add_option("--n-step", cfg.n_step, "N increment");
    cmd->add_option("--window-lo", cfg.window_lo);
    cmd->add_option("--window-hi", cfg.window_hi);
    cmd->add_option("--k1", [&cfg](const std::vector<std::string>& v) {
        cfg.k1x = std::stod(v[0]); cfg.k1y = std::stod(v[1]); cfg.k1r = std::stod(v[2]);
        return true;
    }, "K1 ball: x y r")->expected(3);
    cmd->add_option("--k2", [&cfg](const std::vector<std::string>& v) {
        cfg.k2x = std::stod(v[0]); cfg.k2y = std::stod(v[1]); cfg.k2r = std::stod(v[2]);
        return true;
    }, "K2 ball: x y r")->expected(3);
    cmd->add_option("--supp-r", cfg.supp_r, "partition support radius around K2");
    cmd->add_option("--schedule-t", cfg.T, "word block length T");
    cmd->add_option("--delta", cfg.delta, "control threshold");
    cmd->add_option("--rho", cfg.rho, "schedule exponent");
    cmd->add_option("--fup-family", cfg.fup_family, "set family, e.g. cantor:3:02");
    cmd->add_option("--fup-k-min", cfg.fup_k_min);
    cmd->add_option("--fup-k-max", cfg.fup_k_max);
    cmd->add_option("--mode-max", cfg.mode_max, "max frequency sup-norm");
    cmd->add_option("--power-max", cfg.power_max, "max map power");
    cmd->add_option("--l-max", cfg.L_max, "symbol frequency cutoff");
    cmd->add_option("--wigner-n", cfg.wigner_n);
    cmd->add_option("--wigner-lmax", cfg.wigner_lmax);
    cmd->add_option("--porosity-level", cfg.porosity_level);
    cmd->add_option("--basis-mode", cfg.basis_mode, "deterministic | randomized-degenerate");
    cmd->add_option("--out", cfg.out_dir, "output directory");
    cmd->add_option("--seed", cfg.seed, "RNG seed");
    cmd->add_option("--timestamp", cfg.timestamp, "optional timestamp header for CSV outputs");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"quantized cat map laboratory"};
    app.require_subcommand(1);

    if (const char* threads = std::getenv("CATMAP_THREADS"))
        Eigen::setNbThreads(std::atoi(threads));

    catmap::ExperimentConfig cfg;
    std::string report_dir;
    for (const std::string name :
         {"spectrum", "deloc", "wigner", "egorov", "words", "fup", "porosity", "qe"}) {
        CLI::App* cmd = app.add_subcommand(name, name + " experiment");
        add_common_options(cmd, cfg);
        cmd->callback([&cfg, name] { cfg.experiment = name; });
    }
    CLI::App* report = app.add_subcommand("report", "consolidate run summaries");
    report->add_option("dir", report_dir, "results directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (report->parsed())
            catmap::run_report(report_dir);
        else
            catmap::run_experiment(cfg);
    } catch (const catmap::ConfigError& e) {
        std::cerr << "{\"error\":\"config\",\"message\":\"" << e.what() << "\"}\n";
        return 2;
    } catch (const catmap::MissingResults& e) {
        std::cerr << "{\"error\":\"missing-results\",\"message\":\"" << e.what() << "\"}\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "{\"error\":\"numerical\",\"message\":\"" << e.what() << "\"}\n";
        return 3;
    }
    return 0;
}
