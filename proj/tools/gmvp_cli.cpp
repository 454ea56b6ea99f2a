// Command-line front end: run portfolio-weight tests on CSV return panels,
// evaluate power functions, and drive the simulation experiments.
//
// Exit codes: test command: 0 = no rejection, 1 = rejection, 2 = error.
// Batch commands (power, simulate): 0 = success, 2 = error.

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "gmvp/csv_io.hpp"
#include "gmvp/distributions.hpp"
#include "gmvp/errors.hpp"
#include "gmvp/experiments.hpp"
#include "gmvp/manifest.hpp"
#include "gmvp/model_core.hpp"
#include "gmvp/samplers.hpp"
#include "gmvp/tests_dense.hpp"
#include "gmvp/tests_singular.hpp"
#include "gmvp/version.hpp"
#include "json.hpp"

namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;
namespace fs = std::filesystem;

constexpr int kExitAccept = 0;
constexpr int kExitReject = 1;
constexpr int kExitError = 2;

std::uint64_t fresh_seed() {
    std::random_device rd;
    return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

gmvp::ReturnsMatrix load_returns(const std::string& path) {
    const gmvp::csv::Table table = gmvp::csv::read_table(path);
    return gmvp::ReturnsMatrix(table.values);
}

gmvp::PortfolioWeights load_weights(const std::string& path, Index p) {
    const gmvp::csv::Table table = gmvp::csv::read_table(path);
    if (table.values.rows() != 1 || table.values.cols() != p) {
        throw gmvp::InputError(path + ": expected one row of " + std::to_string(p) +
                               " weights");
    }
    VectorXd w = table.values.row(0).transpose();
    const double sum = w.sum();
    if (std::abs(sum - 1.0) > 1e-6) {
        throw gmvp::InputError(path + ": weights sum to " + std::to_string(sum) +
                               ", must be 1 within 1e-6");
    }
    w /= sum;  // renormalize to the library's exact-sum contract
    return gmvp::PortfolioWeights(std::move(w));
}

std::vector<Index> parse_selection(const std::string& spec, Index p) {
    std::vector<Index> cols;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const long v = std::stol(item);
        if (v < 1 || v > p) {
            throw gmvp::InputError("--select: index " + item + " outside 1.." +
                                   std::to_string(p));
        }
        cols.push_back(static_cast<Index>(v - 1));
    }
    if (cols.empty()) throw gmvp::InputError("--select: empty list");
    return cols;
}

void print_outcome(const gmvp::TestOutcome& out, const std::string& method,
                   const std::string& reference) {
    std::printf("method:        %s\n", method.c_str());
    std::printf("reference:     %s\n", reference.c_str());
    std::printf("statistic:     %.10g\n", out.statistic);
    std::printf("standardized:  %.10g\n", out.standardized);
    std::printf("p_value:       %.10g\n", out.p_value);
    std::printf("alpha:         %g\n", out.alpha);
    std::printf("c_n:           %.10g\n", out.c_n);
    std::printf("effect:        %.10g\n", out.effect_estimate);
    std::printf("decision:      %s\n", out.reject ? "reject" : "no rejection");
}

void write_outcome_json(const std::string& path, const gmvp::TestOutcome& out,
                        const std::string& method, const std::string& reference,
                        const std::map<std::string, std::string>& config) {
    nlohmann::ordered_json doc;
    doc["method"] = method;
    doc["reference"] = reference;
    doc["statistic"] = out.statistic;
    doc["standardized"] = out.standardized;
    doc["p_value"] = out.p_value;
    doc["reject"] = out.reject;
    doc["alpha"] = out.alpha;
    doc["effect_estimate"] = out.effect_estimate;
    doc["c_n"] = out.c_n;
    nlohmann::ordered_json cfg;
    for (const auto& [k, v] : config) cfg[k] = v;
    doc["config"] = cfg;
    doc["artifact_version"] = gmvp::kVersion;
    std::ofstream f(path, std::ios::binary);
    if (!f) throw gmvp::InputError("cannot write " + path);
    f << doc.dump(2) << "\n";
}

// ---------------------------------------------------------------- test ---

int run_test_command(const std::string& input_path, const std::string& weights_path,
                     const std::string& method, const std::string& mode, double alpha,
                     std::optional<Index> rank, const std::string& select,
                     const std::string& json_path) {
    const gmvp::ReturnsMatrix returns = load_returns(input_path);
    const Index n = returns.n();
    const Index p = returns.p();
    const gmvp::PortfolioWeights r = load_weights(weights_path, p);

    if (p >= n && !rank.has_value()) {
        throw gmvp::InputError(
            "p >= n: the sample covariance is singular; rerun with --rank to take "
            "the singular (Moore-Penrose) path");
    }
    const bool singular_route = rank.has_value() && (*rank < p || p >= n);

    std::map<std::string, std::string> config{
        {"input", input_path}, {"weights", weights_path},   {"method", method},
        {"mode", mode},        {"alpha", std::to_string(alpha)},
    };
    if (rank) config["rank"] = std::to_string(*rank);
    if (!select.empty()) config["select"] = select;

    gmvp::TestOutcome out;
    std::string reference;
    if (method == "shrinkage" && mode == "exact") {
        throw gmvp::UnsupportedError(
            "the shrinkage test has no exact reference; use --mode asymptotic");
    }
    if (!singular_route) {
        if (method == "mahalanobis") {
            const gmvp::ReferenceDist dist_mode =
                mode == "exact" ? gmvp::ReferenceDist::FExact
                                : gmvp::ReferenceDist::NormalAsymptotic;
            out = gmvp::mahalanobis_test(returns, r, alpha, dist_mode);
            reference = mode == "exact" ? "f-exact" : "normal-asymptotic";
        } else {
            out = gmvp::shrinkage_test(returns, r, alpha);
            reference = "normal-asymptotic";
        }
    } else {
        const Index q = *rank;
        if (mode == "exact") {
            throw gmvp::UnsupportedError(
                "exact mode is not available on the singular path");
        }
        if (method == "mahalanobis") {
            gmvp::SingularTestConfig tc;
            tc.q = q;
            tc.alpha = alpha;
            tc.warn = [](const std::string& m) {
                std::fprintf(stderr, "warning: %s\n", m.c_str());
            };
            VectorXd r_star;
            if (!select.empty()) {
                const std::vector<Index> cols = parse_selection(select, p);
                tc.l = MatrixXd::Zero(static_cast<Index>(cols.size()), p);
                r_star.resize(static_cast<Index>(cols.size()));
                for (std::size_t i = 0; i < cols.size(); ++i) {
                    tc.l(static_cast<Index>(i), cols[i]) = 1.0;
                    r_star(static_cast<Index>(i)) = r.weights(cols[i]);
                }
            } else {
                const Index k = std::min<Index>(q - 1, p - 1);
                tc.l = gmvp::selection_matrix(p, 0, k);
                r_star = r.weights.head(k);
            }
            out = gmvp::mahalanobis_test_singular(returns, tc, r_star);
            reference = "normal-asymptotic (singular)";
        } else {
            out = gmvp::shrinkage_test_singular(
                returns, r, q, alpha, [](const std::string& m) {
                    std::fprintf(stderr, "warning: %s\n", m.c_str());
                });
            reference = "normal-asymptotic (singular)";
        }
    }

    print_outcome(out, method, reference);
    if (!json_path.empty()) write_outcome_json(json_path, out, method, reference, config);
    return out.reject ? kExitReject : kExitAccept;
}

// --------------------------------------------------------------- power ---

int run_power_command(const std::string& test_name, const std::string& mode,
                      std::vector<double> grid, double grid_max, Index grid_points,
                      Index p, Index n, Index q, Index k, double alpha, Index b,
                      std::optional<std::uint64_t> seed_opt,
                      const std::string& out_path) {
    if (grid.empty()) {
        if (grid_points < 2) throw gmvp::InputError("--grid-points must be >= 2");
        for (Index i = 0; i < grid_points; ++i) {
            grid.push_back(grid_max * static_cast<double>(i) /
                           static_cast<double>(grid_points - 1));
        }
    }
    const std::uint64_t seed = seed_opt.value_or(fresh_seed());
    std::vector<std::vector<std::string>> rows;
    const bool empirical = mode == "empirical";
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double effect = grid[i];
        double value = 0.0;
        std::string se_cell;
        if (test_name == "mahalanobis") {
            if (mode == "exact") {
                value = gmvp::power_mahalanobis_exact(effect, p, n, alpha);
            } else if (mode == "asymptotic") {
                value = gmvp::power_mahalanobis_asymptotic(effect, p, n, alpha);
            } else {
                const gmvp::Estimate est = gmvp::empirical_power_stochastic(
                    effect, p, n, alpha, b, {seed, static_cast<std::uint64_t>(i)});
                value = est.value;
                se_cell = gmvp::csv::format_double(est.std_error);
            }
        } else if (test_name == "shrinkage") {
            if (mode != "asymptotic") {
                throw gmvp::UnsupportedError(
                    "shrinkage power is asymptotic-only; use mode=asymptotic");
            }
            value = gmvp::power_shrinkage_asymptotic(effect, p, n, alpha);
        } else if (test_name == "mahalanobis-singular") {
            const Index kk = k > 0 ? k : q - 1;
            if (mode == "asymptotic") {
                value = gmvp::power_singular_asymptotic(effect, q, kk, n, alpha);
            } else if (mode == "empirical") {
                gmvp::Rng rng(seed, static_cast<std::uint64_t>(i));
                const double c_t = static_cast<double>(q) / static_cast<double>(n);
                const double b_t = static_cast<double>(kk) / static_cast<double>(n);
                const double null_sd =
                    std::sqrt(2.0 * (1.0 - c_t + b_t) / (1.0 - c_t));
                const double z = gmvp::dist::normal_quantile(1.0 - alpha);
                long long hits = 0;
                for (Index rep = 0; rep < b; ++rep) {
                    const double t =
                        gmvp::sample_tn_singular_stochastic(effect, q, kk, n, rng);
                    if (std::sqrt(static_cast<double>(kk)) * (t - 1.0) / null_sd > z) {
                        ++hits;
                    }
                }
                value = static_cast<double>(hits) / static_cast<double>(b);
                se_cell = gmvp::csv::format_double(
                    std::sqrt(value * (1.0 - value) / static_cast<double>(b)));
            } else {
                throw gmvp::UnsupportedError(
                    "exact mode is not available for the singular test");
            }
        } else if (test_name == "shrinkage-singular") {
            if (mode != "asymptotic") {
                throw gmvp::UnsupportedError(
                    "shrinkage power is asymptotic-only; use mode=asymptotic");
            }
            value = gmvp::power_shrinkage_singular(effect, q, n, alpha);
        } else {
            throw gmvp::InputError("unknown test: " + test_name);
        }
        rows.push_back({gmvp::csv::format_double(effect),
                        gmvp::csv::format_double(value), se_cell, mode});
    }
    gmvp::csv::write_cells(out_path, {"effect", "value", "std_error", "mode"}, rows);
    gmvp::RunManifest manifest;
    manifest.command = "power";
    manifest.config = {{"test", test_name},
                       {"mode", mode},
                       {"p", std::to_string(p)},
                       {"n", std::to_string(n)},
                       {"q", std::to_string(q)},
                       {"k", std::to_string(k)},
                       {"alpha", gmvp::csv::format_double(alpha)},
                       {"B", std::to_string(b)},
                       {"grid_points", std::to_string(grid.size())}};
    manifest.master_seed = seed;
    manifest.artifact_version = gmvp::kVersion;
    manifest.timestamp = gmvp::iso8601_utc_now();
    manifest.write(out_path + ".manifest.json");
    if (empirical) {
        std::printf("wrote %s (B=%lld, seed=%llu)\n", out_path.c_str(),
                    static_cast<long long>(b), static_cast<unsigned long long>(seed));
    } else {
        std::printf("wrote %s\n", out_path.c_str());
    }
    return kExitAccept;
}

// ------------------------------------------------------------- simulate ---

struct SimulateConfig {
    gmvp::ExperimentConfig experiment;
    std::string kind = "power";
    std::map<std::string, std::string> echo;
    bool seed_given = false;
};

std::vector<int> parse_kappa_grid(const std::string& text) {
    std::vector<int> grid;
    if (text.find(':') != std::string::npos) {
        const auto pos = text.find(':');
        const int lo = std::stoi(text.substr(0, pos));
        const int hi = std::stoi(text.substr(pos + 1));
        for (int v = lo; v <= hi; ++v) grid.push_back(v);
    } else {
        std::stringstream ss(text);
        std::string item;
        while (std::getline(ss, item, ',')) grid.push_back(std::stoi(item));
    }
    return grid;
}

// Key-value pairs from a plain "key = value" config or from the "config"
// object of a previously written manifest (so a manifest is itself a valid
// --config argument and reproduces the run).
std::vector<std::pair<std::string, std::string>> read_config_pairs(
    const std::string& path, std::vector<std::string>& bad_keys) {
    std::ifstream in(path);
    if (!in) throw gmvp::InputError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    std::vector<std::pair<std::string, std::string>> pairs;
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        const auto doc = nlohmann::json::parse(text);
        if (!doc.contains("config") || !doc["config"].is_object()) {
            throw gmvp::ConfigError(path + ": manifest lacks a config object");
        }
        for (const auto& [key, value] : doc["config"].items()) {
            pairs.emplace_back(key, value.get<std::string>());
        }
        return pairs;
    }
    std::istringstream stream(text);
    std::string line;
    int line_no = 0;
    while (std::getline(stream, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            bad_keys.push_back("line " + std::to_string(line_no) + " (no '=')");
            continue;
        }
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            const auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        pairs.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return pairs;
}

SimulateConfig parse_simulate_config(const std::string& path) {
    SimulateConfig out;
    gmvp::ExperimentConfig& e = out.experiment;
    std::vector<std::string> bad_keys;
    auto trim = [](std::string s) {
        const auto a = s.find_first_not_of(" \t\r");
        const auto b = s.find_last_not_of(" \t\r");
        return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    for (const auto& [key, value] : read_config_pairs(path, bad_keys)) {
        try {
            if (key == "kind") {
                if (value != "power" && value != "roc") throw std::runtime_error("");
                out.kind = value;
            } else if (key == "tests") {
                std::stringstream ss(value);
                std::string item;
                while (std::getline(ss, item, ',')) {
                    const std::string name = trim(item);
                    const auto kind = gmvp::test_kind_from_name(name);
                    if (!kind) throw std::runtime_error("");
                    e.tests.push_back(*kind);
                }
            } else if (key == "p") {
                e.p = std::stol(value);
            } else if (key == "q") {
                e.q = std::stol(value);
            } else if (key == "n") {
                e.n = std::stol(value);
            } else if (key == "m_fraction") {
                e.m_fraction = std::stod(value);
            } else if (key == "kappa_grid") {
                e.kappa_grid = parse_kappa_grid(value);
            } else if (key == "kappa") {
                e.kappa = std::stoi(value);
            } else if (key == "alpha") {
                e.alpha = std::stod(value);
            } else if (key == "B") {
                e.replications = std::stol(value);
            } else if (key == "seed") {
                e.seed = std::stoull(value);
                out.seed_given = true;
            } else if (key == "k") {
                e.k = std::stol(value);
            } else if (key == "threads") {
                e.threads = std::stoi(value);
            } else if (key == "allow_misspecified_dense") {
                if (value != "true" && value != "false") throw std::runtime_error("");
                e.allow_misspecified_dense = value == "true";
            } else if (key == "thresholds") {
                std::stringstream ss(value);
                std::string item;
                while (std::getline(ss, item, ',')) {
                    e.thresholds.push_back(std::stod(item));
                }
            } else {
                bad_keys.push_back(key);
                continue;
            }
        } catch (const std::exception&) {
            bad_keys.push_back(key);
            continue;
        }
        out.echo[key] = value;
    }
    if (e.q == 0) {
        e.q = e.p;
        out.echo["q"] = std::to_string(e.p);
    }
    if (!bad_keys.empty()) {
        std::string msg = "invalid config keys:";
        for (const auto& k : bad_keys) msg += " " + k;
        throw gmvp::ConfigError(msg);
    }
    return out;
}

std::vector<std::vector<std::string>> curve_rows(const gmvp::CurveResult& curve) {
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < curve.grid.size(); ++i) {
        rows.push_back({gmvp::csv::format_double(curve.grid[i]),
                        gmvp::csv::format_double(curve.estimates[i]),
                        gmvp::csv::format_double(curve.std_errors[i]),
                        std::to_string(curve.replications)});
    }
    return rows;
}

int run_simulate_command(const std::string& config_path, const std::string& out_dir,
                         std::optional<std::uint64_t> seed_override,
                         int threads_override) {
    SimulateConfig config = parse_simulate_config(config_path);
    if (seed_override) {
        config.experiment.seed = *seed_override;
        config.seed_given = true;
        config.echo["seed"] = std::to_string(*seed_override);
    }
    if (!config.seed_given) {
        config.experiment.seed = fresh_seed();
        config.echo["seed"] = std::to_string(config.experiment.seed);
    }
    if (threads_override > 0) {
        config.experiment.threads = threads_override;
        config.echo["threads"] = std::to_string(threads_override);
    }
    fs::create_directories(out_dir);
    const std::vector<std::string> header = {"kappa_or_threshold", "estimate",
                                             "std_error", "B"};
    if (config.kind == "power") {
        const auto curves = gmvp::run_power_experiment(config.experiment);
        for (const auto& [kind, curve] : curves) {
            const std::string path =
                (fs::path(out_dir) /
                 ("power__" + std::string(gmvp::test_kind_name(kind)) + ".csv"))
                    .string();
            gmvp::csv::write_cells(path, header, curve_rows(curve));
            std::printf("wrote %s\n", path.c_str());
        }
    } else {
        const auto curves = gmvp::run_roc_experiment(config.experiment);
        for (const auto& [kind, roc] : curves) {
            gmvp::CurveResult fpr{roc.thresholds, roc.fpr, roc.fpr_se,
                                  roc.replications, gmvp::CurveKind::Roc};
            gmvp::CurveResult tpr{roc.thresholds, roc.tpr, roc.tpr_se,
                                  roc.replications, gmvp::CurveKind::Roc};
            const std::string base =
                (fs::path(out_dir) /
                 ("roc__" + std::string(gmvp::test_kind_name(kind))))
                    .string();
            gmvp::csv::write_cells(base + "__fpr.csv", header, curve_rows(fpr));
            gmvp::csv::write_cells(base + "__tpr.csv", header, curve_rows(tpr));
            std::printf("wrote %s__fpr.csv and %s__tpr.csv\n", base.c_str(),
                        base.c_str());
        }
    }
    gmvp::RunManifest manifest;
    manifest.command = "simulate " + config_path;
    manifest.config = config.echo;
    manifest.master_seed = config.experiment.seed;
    manifest.artifact_version = gmvp::kVersion;
    manifest.timestamp = gmvp::iso8601_utc_now();
    manifest.write((fs::path(out_dir) / "manifest.json").string());
    return kExitAccept;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"High-dimensional tests for global-minimum-variance portfolio weights"};
    app.require_subcommand(1);

    auto* test_cmd = app.add_subcommand(
        "test", "Test hypothesized GMVP weights against a returns panel");
    std::string input_path, weights_path, json_path, select;
    std::string method = "mahalanobis";
    std::string test_mode = "asymptotic";
    double alpha = 0.05;
    long long rank_flag = -1;
    test_cmd->add_option("--input", input_path, "CSV panel, n rows x p columns, header")
        ->required();
    test_cmd->add_option("--weights", weights_path,
                         "CSV with one row of p hypothesized weights")
        ->required();
    test_cmd->add_option("--method", method, "mahalanobis | shrinkage")
        ->check(CLI::IsMember({"mahalanobis", "shrinkage"}));
    test_cmd->add_option("--mode", test_mode, "exact | asymptotic")
        ->check(CLI::IsMember({"exact", "asymptotic"}));
    test_cmd->add_option("--alpha", alpha, "significance level");
    test_cmd->add_option("--rank", rank_flag,
                         "known rank q; routes to the singular path when q < p or "
                         "p >= n");
    test_cmd->add_option("--select", select,
                         "1-based asset indices forming the tested subvector "
                         "(singular Mahalanobis)");
    test_cmd->add_option("--json", json_path, "write the outcome as JSON");

    auto* power_cmd = app.add_subcommand("power", "Evaluate a power function on a grid");
    std::string power_test = "mahalanobis";
    std::string power_mode = "asymptotic";
    std::string grid_spec, power_out = "power.csv";
    double grid_max = 1.0;
    long long grid_points = 21, power_p = 0, power_n = 0, power_q = 0, power_k = -1;
    long long power_b = 10000;
    double power_alpha = 0.05;
    long long power_seed = -1;
    power_cmd->add_option("--test", power_test,
                          "mahalanobis | shrinkage | mahalanobis-singular | "
                          "shrinkage-singular")
        ->check(CLI::IsMember({"mahalanobis", "shrinkage", "mahalanobis-singular",
                               "shrinkage-singular"}));
    power_cmd->add_option("--mode", power_mode, "exact | asymptotic | empirical")
        ->check(CLI::IsMember({"exact", "asymptotic", "empirical"}));
    power_cmd->add_option("--grid", grid_spec, "comma list of effect values");
    power_cmd->add_option("--grid-max", grid_max, "grid upper end (with --grid-points)");
    power_cmd->add_option("--grid-points", grid_points, "grid size (with --grid-max)");
    power_cmd->add_option("--p", power_p, "number of assets")->required();
    power_cmd->add_option("--n", power_n, "number of observations")->required();
    power_cmd->add_option("--q", power_q, "rank (singular tests)");
    power_cmd->add_option("--k", power_k, "tested subvector size (singular Mahalanobis)");
    power_cmd->add_option("--alpha", power_alpha, "significance level");
    power_cmd->add_option("--B", power_b, "replications (empirical mode)");
    power_cmd->add_option("--seed", power_seed, "master seed (empirical mode)");
    power_cmd->add_option("--out", power_out, "output CSV path");

    auto* sim_cmd = app.add_subcommand(
        "simulate", "Run a power or ROC experiment from a config file");
    std::string config_path, out_dir = ".";
    long long sim_seed = -1;
    int sim_threads = 0;
    sim_cmd->add_option("--config", config_path, "key = value config file")->required();
    sim_cmd->add_option("--out-dir", out_dir, "output directory");
    sim_cmd->add_option("--seed", sim_seed, "override the config seed");
    sim_cmd->add_option("--threads", sim_threads, "worker count (0 = auto)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (test_cmd->parsed()) {
            std::optional<Index> rank;
            if (rank_flag >= 0) rank = static_cast<Index>(rank_flag);
            return run_test_command(input_path, weights_path, method, test_mode, alpha,
                                    rank, select, json_path);
        }
        if (power_cmd->parsed()) {
            std::vector<double> grid;
            if (!grid_spec.empty()) {
                std::stringstream ss(grid_spec);
                std::string item;
                while (std::getline(ss, item, ',')) grid.push_back(std::stod(item));
            }
            std::optional<std::uint64_t> seed;
            if (power_seed >= 0) seed = static_cast<std::uint64_t>(power_seed);
            return run_power_command(power_test, power_mode, grid, grid_max,
                                     static_cast<Index>(grid_points),
                                     static_cast<Index>(power_p),
                                     static_cast<Index>(power_n),
                                     static_cast<Index>(power_q),
                                     static_cast<Index>(power_k), power_alpha,
                                     static_cast<Index>(power_b), seed, power_out);
        }
        std::optional<std::uint64_t> seed;
        if (sim_seed >= 0) seed = static_cast<std::uint64_t>(sim_seed);
        return run_simulate_command(config_path, out_dir, seed, sim_threads);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitError;
    }
}
