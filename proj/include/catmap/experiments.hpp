#ifndef CATMAP_EXPERIMENTS_HPP
#define CATMAP_EXPERIMENTS_HPP

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "catmap/classical.hpp"
#include "catmap/errors.hpp"
#include "catmap/fup.hpp"
#include "catmap/io.hpp"
#include "catmap/observables.hpp"
#include "catmap/propagator.hpp"
#include "catmap/quantize.hpp"
#include "catmap/stats.hpp"
#include "catmap/words.hpp"

namespace catmap {

struct ExperimentConfig {
    std::string experiment;
    std::vector<std::int64_t> matrix{2, 1, 3, 2};  // row-major
    std::int64_t n_start = 101, n_stop = 301, n_step = 2;
    double window_lo = 0.3, window_hi = 0.7;
    // standard partition geometry
    double k1x = 0.2, k1y = 0.2, k1r = 0.12;
    double k2x = 0.7, k2y = 0.7, k2r = 0.12;
    double supp_r = 0.45;
    std::int64_t T = 2;
    double delta = 0.5, rho = 0.5;
    std::string fup_family = "cantor:3:02";
    std::int64_t fup_k_min = 3, fup_k_max = 6;
    std::int64_t mode_max = 4, power_max = 2;
    std::int64_t L_max = 48;
    std::int64_t wigner_n = 101, wigner_lmax = 8;
    std::int64_t porosity_level = 6;
    std::string basis_mode = "deterministic";
    std::string out_dir = ".";
    std::uint64_t seed = 0;
    std::string timestamp;  // empty keeps outputs byte-stable
};

inline nlohmann::json config_to_json(const ExperimentConfig& c) {
    return {{"experiment", c.experiment}, {"matrix", c.matrix},
            {"n_start", c.n_start},       {"n_stop", c.n_stop},
            {"n_step", c.n_step},         {"window_lo", c.window_lo},
            {"window_hi", c.window_hi},   {"k1", {c.k1x, c.k1y, c.k1r}},
            {"k2", {c.k2x, c.k2y, c.k2r}},{"supp_r", c.supp_r},
            {"T", c.T},                   {"delta", c.delta},
            {"rho", c.rho},               {"fup_family", c.fup_family},
            {"fup_k_min", c.fup_k_min},   {"fup_k_max", c.fup_k_max},
            {"mode_max", c.mode_max},     {"power_max", c.power_max},
            {"L_max", c.L_max},           {"wigner_n", c.wigner_n},
            {"wigner_lmax", c.wigner_lmax},{"porosity_level", c.porosity_level},
            {"basis_mode", c.basis_mode}, {"seed", c.seed}};
}

namespace detail {

inline void validate_config(const ExperimentConfig& c) {
    if (c.matrix.size() != 4) throw ConfigError("matrix needs 4 entries");
    if (!(c.window_lo >= 0 && c.window_lo < c.window_hi && c.window_hi <= 1))
        throw ConfigError("window must satisfy 0 <= lo < hi <= 1");
    if (c.n_start < 1 || c.n_stop < c.n_start || c.n_step < 1)
        throw ConfigError("bad N range");
    if (c.T < 1 || c.delta <= 0 || c.delta >= 1) throw ConfigError("bad schedule");
    if (c.basis_mode != "deterministic" && c.basis_mode != "randomized-degenerate")
        throw ConfigError("basis_mode must be deterministic or randomized-degenerate");
}

inline HyperbolicMap config_map(const ExperimentConfig& c) {
    try {
        return validate_map({c.matrix[0], c.matrix[1], c.matrix[2], c.matrix[3]});
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
}

/// Odd N values in [n_start, n_stop] honoring the step.
inline std::vector<std::int64_t> config_n_list(const ExperimentConfig& c) {
    std::vector<std::int64_t> out;
    for (std::int64_t n = c.n_start; n <= c.n_stop; n += c.n_step)
        if (n % 2 == 1) out.push_back(n);
    if (out.empty()) throw ConfigError("N range contains no odd values");
    return out;
}

inline PartitionPair config_partition(const ExperimentConfig& c) {
    try {
        return build_partition({{c.k1x, c.k1y}, c.k1r}, {{c.k2x, c.k2y}, c.k2r},
                               {{c.k2x, c.k2y}, c.supp_r}, c.L_max);
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
}

struct RunFiles {
    CsvWriter csv;
    std::string hash;
    std::filesystem::path dir;

    RunFiles(const ExperimentConfig& c, const std::string& name)
        : csv(make_path(c, name + "_results.csv"),
              hash_hex(config_to_json(c).dump()), c.timestamp),
          hash(hash_hex(config_to_json(c).dump())),
          dir(c.out_dir) {
        std::ofstream echo(dir / (name + "_config.json"));
        nlohmann::json j = config_to_json(c);
        j["config_hash"] = hash;
        echo << j.dump(2) << "\n";
    }

    static std::string make_path(const ExperimentConfig& c, const std::string& file) {
        std::filesystem::create_directories(c.out_dir);
        return (std::filesystem::path(c.out_dir) / file).string();
    }

    void summary(const std::string& name, nlohmann::json j) const {
        j["config_hash"] = hash;
        std::ofstream out(dir / (name + "_summary.json"));
        out << j.dump(2) << "\n";
    }
};

/// Smooth plateau equal to 1 on B((1/2,1/2), 0.1), supported in
/// B((1/2,1/2), 0.3); the fixed probe symbol for the lower-bound
/// constants.
inline TorusSymbol standard_bump(std::int64_t L_max = 24) {
    const std::int64_t M = std::max<std::int64_t>(4 * L_max + 4, 256);
    Eigen::MatrixXd f(M, M);
    for (std::int64_t i = 0; i < M; ++i)
        for (std::int64_t j = 0; j < M; ++j) {
            const double d = torus_dist({static_cast<double>(i) / M, static_cast<double>(j) / M},
                                        {0.5, 0.5});
            f(i, j) = 1.0 - smoothstep((d - 0.1) / 0.2);
        }
    return sample_symbol(f, L_max);
}

inline CantorSet config_cantor(const ExperimentConfig& c, std::int64_t level) {
    // family syntax cantor:<base>:<digits>, e.g. cantor:3:02
    if (c.fup_family.rfind("cantor:", 0) != 0) throw ConfigError("unknown fup family");
    const std::string rest = c.fup_family.substr(7);
    const auto colon = rest.find(':');
    if (colon == std::string::npos) throw ConfigError("fup family needs cantor:<base>:<digits>");
    std::int64_t base = 0;
    try {
        base = std::stoll(rest.substr(0, colon));
    } catch (...) {
        throw ConfigError("bad fup base");
    }
    std::vector<std::int64_t> digits;
    for (const char ch : rest.substr(colon + 1)) {
        if (ch < '0' || ch > '9') throw ConfigError("bad fup digit");
        digits.push_back(ch - '0');
    }
    try {
        return cantor_set(base, digits, level);
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
}

} // namespace detail

// ---------------------------------------------------------------------------
// Experiment runners
// ---------------------------------------------------------------------------

inline void run_spectrum(const ExperimentConfig& c) {
    const HyperbolicMap map = detail::config_map(c);
    const auto N_list = detail::config_n_list(c);
    detail::RunFiles files(c, "spectrum");
    files.csv.row({"N", "j", "eig_re", "eig_im"});
    double worst_unitarity = 0;
    nlohmann::json clusters = nlohmann::json::array();
    for (const std::int64_t N : N_list) {
        const QuantumCatMap qcm = build_cat_matrix(map, HilbertSpec(N));
        worst_unitarity = std::max(worst_unitarity, qcm.unitarity);
        const SpectralData sd =
            eigendecompose(qcm, c.basis_mode == "randomized-degenerate", c.seed);
        for (std::int64_t j = 0; j < N; ++j)
            files.csv.row({fmt(N), fmt(j), fmt(sd.eigenvalues(j).real()),
                           fmt(sd.eigenvalues(j).imag())});
        clusters.push_back({{"N", N}, {"clusters", sd.clusters.size()}});
    }
    files.summary("spectrum", {{"worst_unitarity", worst_unitarity}, {"clusters", clusters}});
}

inline void run_deloc(const ExperimentConfig& c) {
    const HyperbolicMap map = detail::config_map(c);
    const auto N_list = detail::config_n_list(c);
    detail::RunFiles files(c, "deloc");
    files.csv.row({"N", "min_mass", "c1_proxy"});
    const TorusSymbol bump = detail::standard_bump();
    const auto rows = deloc_scan(map, c.window_lo, c.window_hi, N_list, bump,
                                 c.basis_mode == "randomized-degenerate", c.seed);
    std::vector<double> minima;
    for (const auto& r : rows) {
        files.csv.row({fmt(r.N), fmt(r.min_mass), fmt(r.c1_proxy)});
        minima.push_back(r.min_mass);
    }
    nlohmann::json summary = {
        {"global_min_mass", *std::min_element(minima.begin(), minima.end())}};
    if (minima.size() >= 3) summary["mann_kendall_z"] = mann_kendall_z(minima);
    files.summary("deloc", summary);
}

inline void run_wigner(const ExperimentConfig& c) {
    const HyperbolicMap map = detail::config_map(c);
    if (c.wigner_n % 2 == 0) throw ConfigError("wigner N must be odd");
    detail::RunFiles files(c, "wigner");
    files.csv.row({"l1", "l2", "re", "im"});
    const QuantumCatMap qcm = build_cat_matrix(map, HilbertSpec(c.wigner_n));
    const SpectralData sd = eigendecompose(qcm);
    const StateVector phi = sd.state(0);
    const WignerData w = wigner_data(phi, c.wigner_lmax);
    for (const auto& [l, v] : w.coefficients)
        files.csv.row({fmt(l.first), fmt(l.second), fmt(v.real()), fmt(v.imag())});
    files.summary("wigner", {{"N", c.wigner_n},
                             {"l_max", c.wigner_lmax},
                             {"norm_sq", w.coefficients.at({0, 0}).real()}});
}

inline void run_egorov(const ExperimentConfig& c) {
    const HyperbolicMap map = detail::config_map(c);
    const auto N_list = detail::config_n_list(c);
    detail::RunFiles files(c, "egorov");
    files.csv.row({"N", "power", "max_defect"});
    double worst = 0;
    for (const std::int64_t N : N_list) {
        const HilbertSpec spec(N);
        const QuantumCatMap qcm = build_cat_matrix(map, spec);
        MatrixXcd m_pow = qcm.matrix;
        for (std::int64_t p = 1; p <= c.power_max; ++p) {
            double defect = 0;
            for (std::int64_t l1 = -c.mode_max; l1 <= c.mode_max; ++l1) {
                for (std::int64_t l2 = -c.mode_max; l2 <= c.mode_max; ++l2) {
                    const TorusSymbol a = TorusSymbol::mode(l1, l2, 1.0);
                    defect = std::max(defect, egorov_defect_frob(
                                                  m_pow, a, compose_with_map(a, map, p), spec));
                }
            }
            files.csv.row({fmt(N), fmt(p), fmt(defect)});
            worst = std::max(worst, defect);
            if (p < c.power_max) m_pow = qcm.matrix * m_pow;
        }
    }
    files.summary("egorov", {{"max_defect", worst}});
    if (worst > 1e-6) throw NumericalFailure("egorov defect above tolerance");
}

inline void run_words(const ExperimentConfig& c) {
    const HyperbolicMap map = detail::config_map(c);
    const auto N_list = detail::config_n_list(c);
    const PartitionPair partition = detail::config_partition(c);
    const WordSchedule schedule = make_schedule(c.T, c.rho, c.delta);
    detail::RunFiles files(c, "words");
    files.csv.row({"N", "all2_norm", "z_sum_norm"});
    const ClassNormScan scan = class_norm_scan(partition, map, schedule, N_list, 0, c.seed);
    for (const auto& r : scan.rows)
        files.csv.row({fmt(r.N), fmt(r.all2_norm), fmt(r.z_sum_norm)});
    const double ladel_delta = (3.0 * scan.beta_hat / 16.0) * (3.0 * scan.beta_hat / 16.0);
    files.summary("words", {{"beta_hat", scan.beta_hat},
                            {"r_squared", scan.r_squared},
                            {"T", schedule.T},
                            {"delta", schedule.delta},
                            {"ladel_consistent_delta", ladel_delta}});
}

inline void run_fup(const ExperimentConfig& c) {
    detail::RunFiles files(c, "fup");
    files.csv.row({"N", "size_x", "size_y", "norm"});
    std::vector<std::pair<std::int64_t, double>> results;
    for (std::int64_t k = c.fup_k_min; k <= c.fup_k_max; ++k) {
        const CantorSet cs = detail::config_cantor(c, k);
        std::int64_t N = 1;
        for (std::int64_t i = 0; i < k; ++i) N *= cs.base;
        const double norm = dft_localization_norm(cs.residues, cs.residues, N);
        files.csv.row({fmt(N), fmt(static_cast<std::int64_t>(cs.residues.size())),
                       fmt(static_cast<std::int64_t>(cs.residues.size())), fmt(norm)});
        results.push_back({N, norm});
    }
    nlohmann::json summary;
    if (results.size() >= 3) {
        const FupResult fit = fit_beta(results);
        summary["beta_hat"] = fit.beta_hat;
        summary["r_squared"] = fit.r_squared;
    }
    files.summary("fup", summary);
}

inline void run_porosity(const ExperimentConfig& c) {
    detail::RunFiles files(c, "porosity");
    files.csv.row({"level", "max_nu"});
    double scale_floor = 1;
    nlohmann::json rows = nlohmann::json::array();
    for (std::int64_t level = 1; level <= c.porosity_level; ++level) {
        const CantorSet cs = detail::config_cantor(c, level);
        double tau0 = 1;
        for (std::int64_t i = 0; i < level; ++i) tau0 /= static_cast<double>(cs.base);
        const double nu = max_porosity(cs.intervals, tau0, 1.0);
        files.csv.row({fmt(level), fmt(nu)});
        rows.push_back({{"level", level}, {"max_nu", nu}, {"tau0", tau0}});
        scale_floor = tau0;
    }
    files.summary("porosity", {{"rows", rows}, {"scale_floor", scale_floor}});
}

inline void run_qe(const ExperimentConfig& c) {
    const HyperbolicMap map = detail::config_map(c);
    const auto N_list = detail::config_n_list(c);
    detail::RunFiles files(c, "qe");
    files.csv.row({"N", "variance"});
    const TorusSymbol a = TorusSymbol::cosine(0, 1);  // cos(2 pi y)
    std::vector<double> x, y;
    for (const std::int64_t N : N_list) {
        const double var = qe_variance(map, a, HilbertSpec(N));
        files.csv.row({fmt(N), fmt(var)});
        if (var > 0) {
            x.push_back(std::log(static_cast<double>(N)));
            y.push_back(std::log(var));
        }
    }
    nlohmann::json summary;
    if (x.size() >= 2) {
        const OlsFit fit = ols_fit(x, y);
        summary["log_slope"] = fit.slope;
        summary["r_squared"] = fit.r_squared;
    }
    files.summary("qe", summary);
}

inline void run_report(const std::string& results_dir) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(results_dir)) throw MissingResults("no such directory");
    nlohmann::json merged;
    std::vector<std::pair<std::int64_t, double>> pooled_fup;
    std::vector<fs::path> entries;
    for (const auto& e : fs::directory_iterator(results_dir))
        if (e.path().filename().string().ends_with("_summary.json")) entries.push_back(e.path());
    std::sort(entries.begin(), entries.end());
    for (const auto& p : entries) {
        std::ifstream in(p);
        nlohmann::json j;
        in >> j;
        merged[p.filename().string()] = j;
    }
    if (merged.empty()) throw MissingResults("no run summaries found");
    // pool fup scans for a combined regression
    for (const auto& e : fs::directory_iterator(results_dir)) {
        if (!e.path().filename().string().ends_with("fup_results.csv")) continue;
        std::ifstream in(e.path());
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == '#' || line.rfind("N,", 0) == 0) continue;
            std::istringstream ss(line);
            std::string n, sx, sy, norm;
            std::getline(ss, n, ',');
            std::getline(ss, sx, ',');
            std::getline(ss, sy, ',');
            std::getline(ss, norm, ',');
            pooled_fup.push_back({std::stoll(n), std::stod(norm)});
        }
    }
    if (pooled_fup.size() >= 3) {
        const FupResult fit = fit_beta(pooled_fup);
        merged["pooled_fup"] = {{"beta_hat", fit.beta_hat}, {"r_squared", fit.r_squared}};
    }
    std::ofstream js(fs::path(results_dir) / "report.json");
    js << merged.dump(2) << "\n";
    std::ofstream md(fs::path(results_dir) / "report.md");
    md << "# run report\n\n";
    for (const auto& [k, v] : merged.items()) md << "## " << k << "\n\n```json\n" << v.dump(2) << "\n```\n\n";
}

inline void run_experiment(const ExperimentConfig& c) {
    detail::validate_config(c);
    if (c.experiment == "spectrum") run_spectrum(c);
    else if (c.experiment == "deloc") run_deloc(c);
    else if (c.experiment == "wigner") run_wigner(c);
    else if (c.experiment == "egorov") run_egorov(c);
    else if (c.experiment == "words") run_words(c);
    else if (c.experiment == "fup") run_fup(c);
    else if (c.experiment == "porosity") run_porosity(c);
    else if (c.experiment == "qe") run_qe(c);
    else throw ConfigError("unknown experiment " + c.experiment);
}

} // namespace catmap

#endif
