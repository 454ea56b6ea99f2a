#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gmvp/rng.hpp"
#include "gmvp/scenario.hpp"

namespace gmvp {

enum class TestKind {
    MahalanobisExact,       // dense, F-quantile decision
    MahalanobisAsymptotic,  // dense, normal decision
    Shrinkage,              // dense shrinkage-intensity test
    MahalanobisSingular,    // rank-aware Mahalanobis test
    ShrinkageSingular       // rank-aware shrinkage test
};

const char* test_kind_name(TestKind kind);
std::optional<TestKind> test_kind_from_name(const std::string& name);
bool test_kind_is_dense(TestKind kind);

enum class CurveKind { Power, Roc };

struct CurveResult {
    std::vector<double> grid;      // kappa values (power) or thresholds (roc)
    std::vector<double> estimates; // in [0, 1]
    std::vector<double> std_errors;
    Index replications = 0;
    CurveKind kind = CurveKind::Power;
};

// Paired ROC sweep: FPR from null-hypothesis replications, TPR from
// alternative replications, per nominal-level threshold.
struct RocCurves {
    std::vector<double> thresholds;
    std::vector<double> fpr, fpr_se;
    std::vector<double> tpr, tpr_se;
    Index replications = 0;
};

struct ExperimentConfig {
    std::vector<TestKind> tests;
    Index p = 0;
    Index q = 0;  // data-generating rank; q = p for the nonsingular case
    Index n = 0;
    double m_fraction = 0.2;
    std::vector<int> kappa_grid;  // power experiments
    int kappa = 4;                // roc experiments (a = 1 + 0.1 kappa)
    std::vector<double> thresholds;  // roc; default 0.01..0.99 by 0.01
    double alpha = 0.05;
    Index replications = 10000;
    std::uint64_t seed = 0;
    Index k = -1;  // selection size of the singular Mahalanobis test; -1 = q - 1
    int threads = 0;  // 0 = auto; GMVP_TEST_THREADS caps either way
    // Dense tests on a rank-deficient scenario (q < p) are a deliberate
    // misspecification study; they must be requested explicitly.
    bool allow_misspecified_dense = false;
};

// Power curves over the kappa grid. Data are drawn from the contaminated
// covariance; the hypothesized weights are the GMVP of the uncontaminated
// one, so kappa = 0 is an exact size row. One dataset per replication is
// shared across all requested tests. Results are bit-identical for a fixed
// (seed, config) regardless of the worker count.
std::vector<std::pair<TestKind, CurveResult>> run_power_experiment(
    const ExperimentConfig& config);

// ROC sweep at the configured kappa: p-values are collected under the null
// and alternative data laws and thresholded on a nominal-level grid.
std::vector<std::pair<TestKind, RocCurves>> run_roc_experiment(
    const ExperimentConfig& config);

// Empirical check of the joint CLT of the two normalized forms
// D = b'S_hat b / b'Sb - 1 and E = 1'S_hat^{-1}1 / 1'S^{-1}1 - 1/(1 - c_n).
struct MomentReport {
    double var_d = 0.0;
    double var_e = 0.0;
    double cov_de = 0.0;
    double target_var_d = 0.0;
    double target_var_e = 0.0;
    double target_cov = 0.0;
    Index replications = 0;
};

MomentReport dn_en_diagnostic(const CovarianceModel& sigma, const PortfolioWeights& b,
                              Index n, Index replications, RngStream stream);

// Worker count resolution: request 0 = hardware concurrency, capped by the
// GMVP_TEST_THREADS environment variable when set to a positive value.
int resolve_threads(int requested);

}  // namespace gmvp
