#include "gmvp/experiments.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>

#include "gmvp/distributions.hpp"
#include "gmvp/errors.hpp"
#include "gmvp/kernels/kernels.hpp"
#include "gmvp/linalg.hpp"
#include "gmvp/samplers.hpp"

namespace gmvp {

namespace {

double as_d(Index v) { return static_cast<double>(v); }

struct KindName {
    TestKind kind;
    const char* name;
};

constexpr KindName kKindNames[] = {
    {TestKind::MahalanobisExact, "mahalanobis-exact"},
    {TestKind::MahalanobisAsymptotic, "mahalanobis"},
    {TestKind::Shrinkage, "shrinkage"},
    {TestKind::MahalanobisSingular, "mahalanobis-singular"},
    {TestKind::ShrinkageSingular, "shrinkage-singular"},
};

void validate_config(const ExperimentConfig& config) {
    if (config.tests.empty()) throw ConfigError("experiment: no tests requested");
    if (config.p < 2) throw ConfigError("experiment: p must be >= 2");
    if (config.q < 1 || config.q > config.p) {
        throw ConfigError("experiment: need 1 <= q <= p");
    }
    if (config.n <= config.q) throw ConfigError("experiment: need n > q");
    if (!(config.alpha > 0.0 && config.alpha < 1.0)) {
        throw ConfigError("experiment: alpha outside (0,1)");
    }
    if (config.replications < 1) throw ConfigError("experiment: B must be >= 1");
    if (!(config.m_fraction > 0.0 && config.m_fraction <= 1.0)) {
        throw ConfigError("experiment: m_fraction outside (0,1]");
    }
    const Index k = config.k < 0 ? config.q - 1 : config.k;
    for (TestKind kind : config.tests) {
        if (test_kind_is_dense(kind)) {
            if (config.n <= config.p) {
                throw ConfigError("experiment: dense tests require n > p");
            }
            if (config.q < config.p && !config.allow_misspecified_dense) {
                throw ConfigError(
                    "experiment: dense test on a rank-deficient scenario (q < p); "
                    "set allow_misspecified_dense to run it as a misspecification "
                    "study");
            }
        }
        if (kind == TestKind::MahalanobisSingular && (k < 1 || k > config.q - 1)) {
            throw ConfigError("experiment: singular Mahalanobis needs 1 <= k <= q - 1");
        }
    }
}

// Scenario quantities shared by every replication of one curve point.
struct PointPrecomp {
    VectorXd u;       // Lambda^{-1/2} Theta' 1, for 1'S_hat^+ 1
    VectorXd v;       // Lambda^{1/2} Theta' r, for r'S_hat r
    MatrixXd a_l;     // L Theta Lambda^{-1/2} (k x q), singular Mahalanobis
    VectorXd r_star;  // L r
    double f_crit = 0.0;
};

struct TestContext {
    std::vector<TestKind> tests;
    Index p, q, n, k;
    double alpha;
    double z_crit;
    // Null standardization constants.
    double dense_null_sd;     // sqrt(2/(1 - p/n))
    double dense_scale;       // sqrt(p - 1)
    double shrink_null_sd;    // sqrt(2(1-c)/c), c = p/n
    double sing_null_sd;      // sqrt(2(1-c~+b~)/(1-c~))
    double sing_scale;        // sqrt(k)
    double shrink_sing_null_sd;  // sqrt(2(1-c~)/c~)
};

TestContext make_context(const ExperimentConfig& config) {
    TestContext ctx;
    ctx.tests = config.tests;
    ctx.p = config.p;
    ctx.q = config.q;
    ctx.n = config.n;
    ctx.k = config.k < 0 ? config.q - 1 : config.k;
    ctx.alpha = config.alpha;
    ctx.z_crit = dist::normal_quantile(1.0 - config.alpha);
    const double c_n = as_d(config.p) / as_d(config.n);
    const double c_t = as_d(config.q) / as_d(config.n);
    const double b_t = as_d(std::max<Index>(ctx.k, 1)) / as_d(config.n);
    // Dense constants are only meaningful (and only used) when n > p.
    ctx.dense_null_sd = c_n < 1.0 ? std::sqrt(2.0 / (1.0 - c_n)) : 0.0;
    ctx.dense_scale = std::sqrt(as_d(config.p - 1));
    ctx.shrink_null_sd = c_n < 1.0 ? std::sqrt(2.0 * (1.0 - c_n) / c_n) : 0.0;
    ctx.sing_null_sd = std::sqrt(2.0 * (1.0 - c_t + b_t) / (1.0 - c_t));
    ctx.sing_scale = std::sqrt(as_d(std::max<Index>(ctx.k, 1)));
    ctx.shrink_sing_null_sd = std::sqrt(2.0 * (1.0 - c_t) / c_t);
    return ctx;
}

bool needs_singular_mahalanobis(const std::vector<TestKind>& tests) {
    for (TestKind kind : tests) {
        if (kind == TestKind::MahalanobisSingular) return true;
    }
    return false;
}

// GMVP of the scenario covariance through its factor basis.
VectorXd basis_gmvp(const ScenarioBasis& basis) {
    const VectorXd t = basis.theta.transpose() * VectorXd::Ones(basis.p);
    const VectorXd scaled = t.cwiseQuotient(basis.lambdas);
    const double denom = t.dot(scaled);
    if (!(std::abs(denom) > 0.0)) {
        throw DegenerateError("experiment: scenario GMVP is degenerate");
    }
    return basis.theta * scaled / denom;
}

PointPrecomp make_precomp(const ScenarioBasis& basis, const VectorXd& lambdas,
                          const VectorXd& r, const TestContext& ctx) {
    PointPrecomp pre;
    const VectorXd root = lambdas.cwiseSqrt();
    const VectorXd root_inv = root.cwiseInverse();
    pre.u = root_inv.asDiagonal() * (basis.theta.transpose() * VectorXd::Ones(basis.p));
    pre.v = root.asDiagonal() * (basis.theta.transpose() * r);
    if (needs_singular_mahalanobis(ctx.tests)) {
        const MatrixXd theta_k = basis.theta.topRows(ctx.k);  // L Theta, L = [I_k 0]
        pre.a_l = theta_k * root_inv.asDiagonal();
        pre.r_star = r.head(ctx.k);
    }
    for (TestKind kind : ctx.tests) {
        if (kind == TestKind::MahalanobisExact) {
            pre.f_crit = dist::f_quantile(1.0 - ctx.alpha, as_d(ctx.p - 1),
                                          as_d(ctx.n - ctx.p));
        }
    }
    return pre;
}

// One replication: draw the factor panel, reduce to the sufficient
// statistics, and return one p-value per requested test.
void replicate(const TestContext& ctx, const PointPrecomp& pre, Rng& rng,
               double* p_values) {
    const Index n = ctx.n;
    const Index q = ctx.q;
    MatrixXd z(n, q);
    for (Index j = 0; j < q; ++j) {
        double* col = z.data() + j * n;
        for (Index i = 0; i < n; ++i) col[i] = rng.normal();
        const double mean = kernels::active_ops().sum(col, static_cast<std::size_t>(n)) /
                            as_d(n);
        for (Index i = 0; i < n; ++i) col[i] -= mean;
    }
    MatrixXd c = linalg::gram(z);
    c *= 1.0 / as_d(n - 1);
    const double target_quad = linalg::quad_form(c, pre.v);  // r'S_hat r
    if (!linalg::cholesky_upper_inplace(c)) {
        throw DegenerateError("experiment: factor Gram matrix is singular");
    }
    const VectorXd y_u = linalg::solve_transposed_upper(c, pre.u);
    const double ones_quad = y_u.squaredNorm();  // 1'S_hat^+ 1

    double t_singular = 0.0;
    if (needs_singular_mahalanobis(ctx.tests)) {
        const Index k = ctx.k;
        MatrixXd y_a(q, k);
        for (Index j = 0; j < k; ++j) {
            y_a.col(j) = linalg::solve_transposed_upper(c, pre.a_l.row(j).transpose());
        }
        const VectorXd g = y_a.transpose() * y_u;  // L S^+ 1
        MatrixXd q_star = linalg::gram(y_a);
        q_star.noalias() -= (g * g.transpose()) / ones_quad;
        const VectorXd diff = g / ones_quad - pre.r_star;
        if (!linalg::cholesky_upper_inplace(q_star)) {
            throw DegenerateError("experiment: Q~* is numerically singular");
        }
        const double quad = linalg::inv_quad_form(q_star, diff);
        t_singular = as_d(ctx.n - q) / as_d(k) * ones_quad * quad;
    }

    const double c_n = as_d(ctx.p) / as_d(ctx.n);
    const double c_t = as_d(ctx.q) / as_d(ctx.n);
    for (std::size_t ti = 0; ti < ctx.tests.size(); ++ti) {
        switch (ctx.tests[ti]) {
            case TestKind::MahalanobisExact: {
                const double t = as_d(ctx.n - ctx.p) / as_d(ctx.p - 1) *
                                 (ones_quad * target_quad - 1.0);
                p_values[ti] =
                    1.0 - dist::f_cdf(t, as_d(ctx.p - 1), as_d(ctx.n - ctx.p));
                break;
            }
            case TestKind::MahalanobisAsymptotic: {
                const double t = as_d(ctx.n - ctx.p) / as_d(ctx.p - 1) *
                                 (ones_quad * target_quad - 1.0);
                const double zscore = ctx.dense_scale * (t - 1.0) / ctx.dense_null_sd;
                p_values[ti] = 1.0 - dist::normal_cdf(zscore);
                break;
            }
            case TestKind::Shrinkage: {
                const double r_hat = (1.0 - c_n) * ones_quad * target_quad - 1.0;
                const double alpha_hat =
                    (1.0 - c_n) * r_hat / (c_n + (1.0 - c_n) * r_hat);
                const double s = std::sqrt(as_d(ctx.n)) * alpha_hat;
                p_values[ti] = 1.0 - dist::normal_cdf(s / ctx.shrink_null_sd);
                break;
            }
            case TestKind::MahalanobisSingular: {
                const double zscore =
                    ctx.sing_scale * (t_singular - 1.0) / ctx.sing_null_sd;
                p_values[ti] = 1.0 - dist::normal_cdf(zscore);
                break;
            }
            case TestKind::ShrinkageSingular: {
                const double r_hat = (1.0 - c_t) * ones_quad * target_quad - 1.0;
                const double alpha_hat =
                    (1.0 - c_t) * r_hat / (c_t + (1.0 - c_t) * r_hat);
                const double s = std::sqrt(as_d(ctx.n)) * alpha_hat;
                p_values[ti] = 1.0 - dist::normal_cdf(s / ctx.shrink_sing_null_sd);
                break;
            }
        }
    }
}

void parallel_replications(Index count, int threads,
                           const std::function<void(Index)>& body) {
    const int workers = std::min<int>(threads, static_cast<int>(count));
    if (workers <= 1) {
        for (Index i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<Index> next(0);
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&]() {
            try {
                for (;;) {
                    const Index i = next.fetch_add(1);
                    if (i >= count) return;
                    body(i);
                }
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

// p-values for all replications of one curve point; row b holds the
// replication with stream id point_offset + b.
std::vector<double> point_p_values(const TestContext& ctx, const PointPrecomp& pre,
                                   std::uint64_t seed, std::uint64_t point_offset,
                                   Index b, int threads) {
    const std::size_t n_tests = ctx.tests.size();
    std::vector<double> p_values(static_cast<std::size_t>(b) * n_tests);
    parallel_replications(b, threads, [&](Index rep) {
        Rng rng(seed, point_offset + static_cast<std::uint64_t>(rep));
        replicate(ctx, pre, rng,
                  p_values.data() + static_cast<std::size_t>(rep) * n_tests);
    });
    return p_values;
}

Estimate binomial_estimate(long long hits, Index b) {
    const double est = static_cast<double>(hits) / as_d(b);
    return Estimate{est, std::sqrt(est * (1.0 - est) / as_d(b))};
}

}  // namespace

const char* test_kind_name(TestKind kind) {
    for (const auto& entry : kKindNames) {
        if (entry.kind == kind) return entry.name;
    }
    return "unknown";
}

std::optional<TestKind> test_kind_from_name(const std::string& name) {
    for (const auto& entry : kKindNames) {
        if (name == entry.name) return entry.kind;
    }
    return std::nullopt;
}

bool test_kind_is_dense(TestKind kind) {
    return kind == TestKind::MahalanobisExact ||
           kind == TestKind::MahalanobisAsymptotic || kind == TestKind::Shrinkage;
}

int resolve_threads(int requested) {
    int threads = requested > 0 ? requested
                                : static_cast<int>(std::thread::hardware_concurrency());
    if (threads < 1) threads = 1;
    if (const char* env = std::getenv("GMVP_TEST_THREADS")) {
        const int cap = std::atoi(env);
        if (cap > 0 && threads > cap) threads = cap;
    }
    return threads;
}

std::vector<std::pair<TestKind, CurveResult>> run_power_experiment(
    const ExperimentConfig& config) {
    validate_config(config);
    if (config.kappa_grid.empty()) throw ConfigError("experiment: empty kappa grid");
    for (int kappa : config.kappa_grid) {
        if (kappa < 0) throw ConfigError("experiment: kappa must be >= 0");
    }
    const TestContext ctx = make_context(config);
    const int threads = resolve_threads(config.threads);
    const ScenarioBasis basis = scenario_basis(config.p, config.q, config.seed);
    const VectorXd r = basis_gmvp(basis);
    const Index m = scenario_m(config.q, config.m_fraction);
    const Index b = config.replications;
    const std::size_t n_tests = ctx.tests.size();

    std::vector<std::vector<long long>> hits(
        n_tests, std::vector<long long>(config.kappa_grid.size(), 0));
    for (std::size_t ki = 0; ki < config.kappa_grid.size(); ++ki) {
        const VectorXd lambdas =
            contaminated_eigenvalues(basis.lambdas, m, config.kappa_grid[ki]);
        const PointPrecomp pre = make_precomp(basis, lambdas, r, ctx);
        const std::vector<double> p_values =
            point_p_values(ctx, pre, config.seed,
                           static_cast<std::uint64_t>(ki) * static_cast<std::uint64_t>(b),
                           b, threads);
        for (Index rep = 0; rep < b; ++rep) {
            const double* row = p_values.data() + static_cast<std::size_t>(rep) * n_tests;
            for (std::size_t ti = 0; ti < n_tests; ++ti) {
                if (row[ti] < config.alpha) ++hits[ti][ki];
            }
        }
    }

    std::vector<std::pair<TestKind, CurveResult>> out;
    for (std::size_t ti = 0; ti < n_tests; ++ti) {
        CurveResult curve;
        curve.kind = CurveKind::Power;
        curve.replications = b;
        for (std::size_t ki = 0; ki < config.kappa_grid.size(); ++ki) {
            const Estimate est = binomial_estimate(hits[ti][ki], b);
            curve.grid.push_back(static_cast<double>(config.kappa_grid[ki]));
            curve.estimates.push_back(est.value);
            curve.std_errors.push_back(est.std_error);
        }
        out.emplace_back(ctx.tests[ti], std::move(curve));
    }
    return out;
}

std::vector<std::pair<TestKind, RocCurves>> run_roc_experiment(
    const ExperimentConfig& config) {
    validate_config(config);
    if (config.kappa < 1) throw ConfigError("experiment: roc needs kappa >= 1");
    std::vector<double> thresholds = config.thresholds;
    if (thresholds.empty()) {
        for (int i = 1; i <= 99; ++i) thresholds.push_back(0.01 * i);
    }
    for (double t : thresholds) {
        if (!(t > 0.0 && t < 1.0)) throw ConfigError("experiment: thresholds in (0,1)");
    }
    const TestContext ctx = make_context(config);
    const int threads = resolve_threads(config.threads);
    const ScenarioBasis basis = scenario_basis(config.p, config.q, config.seed);
    const VectorXd r = basis_gmvp(basis);
    const Index m = scenario_m(config.q, config.m_fraction);
    const Index b = config.replications;
    const std::size_t n_tests = ctx.tests.size();

    const PointPrecomp pre_null = make_precomp(basis, basis.lambdas, r, ctx);
    const VectorXd lambdas_alt =
        contaminated_eigenvalues(basis.lambdas, m, config.kappa);
    const PointPrecomp pre_alt = make_precomp(basis, lambdas_alt, r, ctx);

    const std::vector<double> p_null =
        point_p_values(ctx, pre_null, config.seed, 0, b, threads);
    const std::vector<double> p_alt = point_p_values(
        ctx, pre_alt, config.seed, static_cast<std::uint64_t>(b), b, threads);

    std::vector<std::pair<TestKind, RocCurves>> out;
    for (std::size_t ti = 0; ti < n_tests; ++ti) {
        RocCurves roc;
        roc.replications = b;
        roc.thresholds = thresholds;
        for (double tau : thresholds) {
            long long fp = 0;
            long long tp = 0;
            for (Index rep = 0; rep < b; ++rep) {
                if (p_null[static_cast<std::size_t>(rep) * n_tests + ti] < tau) ++fp;
                if (p_alt[static_cast<std::size_t>(rep) * n_tests + ti] < tau) ++tp;
            }
            const Estimate fpr = binomial_estimate(fp, b);
            const Estimate tpr = binomial_estimate(tp, b);
            roc.fpr.push_back(fpr.value);
            roc.fpr_se.push_back(fpr.std_error);
            roc.tpr.push_back(tpr.value);
            roc.tpr_se.push_back(tpr.std_error);
        }
        out.emplace_back(ctx.tests[ti], std::move(roc));
    }
    return out;
}

MomentReport dn_en_diagnostic(const CovarianceModel& sigma, const PortfolioWeights& b,
                              Index n, Index replications, RngStream stream) {
    const Index p = sigma.dim();
    if (n <= p) throw InputError("dn_en_diagnostic: requires n > p");
    if (sigma.rank() != p) throw InputError("dn_en_diagnostic: requires full rank");
    if (b.weights.size() != p) throw InputError("dn_en_diagnostic: size mismatch");
    const double c_n = as_d(p) / as_d(n);

    const VectorXd root = sigma.eigenvalues().cwiseSqrt();
    const VectorXd u =
        root.cwiseInverse().asDiagonal() *
        (sigma.eigenvectors().transpose() * VectorXd::Ones(p));
    const VectorXd v = root.asDiagonal() * (sigma.eigenvectors().transpose() * b.weights);
    const double ones_quad_pop = u.squaredNorm();   // 1'S^{-1}1
    const double target_quad_pop = v.squaredNorm(); // b'Sb

    const double root_n = std::sqrt(as_d(n));
    std::vector<double> d_vals(static_cast<std::size_t>(replications));
    std::vector<double> e_vals(static_cast<std::size_t>(replications));
    const int threads = resolve_threads(0);
    parallel_replications(replications, threads, [&](Index rep) {
        Rng rng(stream.master_seed,
                stream.stream_id + static_cast<std::uint64_t>(rep));
        MatrixXd z(n, p);
        for (Index j = 0; j < p; ++j) {
            double* col = z.data() + j * n;
            for (Index i = 0; i < n; ++i) col[i] = rng.normal();
            const double mean =
                kernels::active_ops().sum(col, static_cast<std::size_t>(n)) / as_d(n);
            for (Index i = 0; i < n; ++i) col[i] -= mean;
        }
        MatrixXd c = linalg::gram(z);
        c *= 1.0 / as_d(n - 1);
        const double bsb = linalg::quad_form(c, v);
        if (!linalg::cholesky_upper_inplace(c)) {
            throw DegenerateError("dn_en_diagnostic: singular sample covariance");
        }
        const double s11 = linalg::inv_quad_form(c, u);
        d_vals[static_cast<std::size_t>(rep)] =
            root_n * (bsb / target_quad_pop - 1.0);
        e_vals[static_cast<std::size_t>(rep)] =
            root_n * (s11 / ones_quad_pop - 1.0 / (1.0 - c_n));
    });

    double mean_d = 0.0;
    double mean_e = 0.0;
    for (Index i = 0; i < replications; ++i) {
        mean_d += d_vals[static_cast<std::size_t>(i)];
        mean_e += e_vals[static_cast<std::size_t>(i)];
    }
    mean_d /= as_d(replications);
    mean_e /= as_d(replications);
    double var_d = 0.0;
    double var_e = 0.0;
    double cov = 0.0;
    for (Index i = 0; i < replications; ++i) {
        const double dd = d_vals[static_cast<std::size_t>(i)] - mean_d;
        const double ee = e_vals[static_cast<std::size_t>(i)] - mean_e;
        var_d += dd * dd;
        var_e += ee * ee;
        cov += dd * ee;
    }
    const double denom = as_d(replications - 1);
    MomentReport report;
    report.var_d = var_d / denom;
    report.var_e = var_e / denom;
    report.cov_de = cov / denom;
    const double xy2 = 1.0 / (target_quad_pop * ones_quad_pop);
    report.target_var_d = 2.0;
    report.target_var_e = 2.0 / std::pow(1.0 - c_n, 3);
    report.target_cov = -2.0 * xy2 / (1.0 - c_n);
    report.replications = replications;
    return report;
}

}  // namespace gmvp
