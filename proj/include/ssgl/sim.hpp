#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ssgl/grouped_design.hpp"
#include "ssgl/rng.hpp"

namespace ssgl {

/// A generated grouped-regression instance. For spline scenarios `X` holds
/// the raw covariates and `group_sizes` is empty; for linear scenarios `X`
/// holds the expanded design columns and `group_sizes` describes its blocks.
struct SimDataset {
    Matrix X;
    Vector y;
    Vector f;                                ///< E[Y|X] on the generated rows
    std::vector<int> group_sizes;
    std::vector<int> truth_groups;           ///< 0-based support set
    std::vector<int> truth_coords;           ///< 0-based nonzero coordinates
    Vector beta;                             ///< linear scenarios only
    std::vector<std::pair<int, int>> truth_pairs; ///< interaction scenario
};

/// X ~ U(0,1)^p iid; E[Y|X] = 5 sin(pi x1) + 2.5 (x3^2 - 0.5) + e^{x4} + 3 x5,
/// noise variance 1, support {x1, x3, x4, x5}.
SimDataset gen_sparse_gam(long n, long p, Rng& rng);

/// 25 U(0,1) covariates, E[Y|X] = 2.5 sin(pi x1 x2) + 2 cos(pi(x3+x5))
/// + 2(x6-0.5) + 2.5 x7; true interaction pairs (x1,x2) and (x3,x5).
SimDataset gen_interaction(long n, long p, Rng& rng);

/// Base covariates ~ N(0, AR1(rho)); one (linear, squared) group per base
/// covariate; first seven coefficients (0, 0.5, 0.25, 0.1, 0, 0, 0.7).
SimDataset gen_coverage(long n, long G, double rho, Rng& rng);

/// Standard normal covariates; E[Y|X] = sum_{j<=20} 0.2 x_j + 0.2 x_j^2 with
/// (linear, squared) groups; 20-group support.
SimDataset gen_dense(long n, long p_cov, Rng& rng);

/// E[Y|X] = 0.5 x1 + 0.3 x2 + 0.6 x10^2 - 0.2 x20 with (linear, squared)
/// groups, G = n of them; support groups {1, 2, 10, 20}.
SimDataset gen_sigma_check(long n, long G, Rng& rng);

/// G groups of three standard normal columns; the final four groups carry
/// N(0, 0.4^2) coefficients redrawn per call.
SimDataset gen_many_groups(long n, long G, Rng& rng);

/// Two-column groups of standard normal covariates with the last four groups
/// active; used for wall-clock scaling runs.
SimDataset gen_timing(long n, long G, Rng& rng);

struct SelectionScore {
    long tp = 0, fp = 0, fn = 0;
    double precision = 1.0; ///< defined as 1 when TP+FP = 0
    double recall = 1.0;    ///< defined as 1 when TP+FN = 0
};

SelectionScore score_selection(const std::vector<int>& selected,
                               const std::vector<int>& truth);

/// Per-replicate metrics; aggregation happens in the runner.
struct ReplicateMetrics {
    double mse = 0.0;
    double precision = 1.0;
    double recall = 1.0;
    double sigma2_hat = 0.0;
    double theta_hat = 0.0;
    double lambda0 = 0.0;
    int df = 0;
    long selected = 0;
    double seconds = 0.0;
};

struct CoverageCounts {
    long covered_important = 0, total_important = 0;
    long covered_null = 0, total_null = 0;
};

struct SimScenario {
    std::string name;            ///< sparse_gam, interaction, coverage, dense,
                                 ///< sigma_check, many_groups, timing
    long n = 100;
    long p = 300;                ///< covariates (spline scenarios)
    long G = 100;                ///< groups (linear scenarios)
    double rho = 0.0;
    int replicates = 50;
    std::uint64_t seed = 1;
    std::vector<double> ladder;  ///< empty -> {1..100}
    std::vector<int> dfs = {3};  ///< CV df grid for spline scenarios
    int d_star = 2;
    int K = 10;
    double alpha = 0.05;
    bool tune_by_cv = true;      ///< false: take the ladder-final fit
    std::string method = "ssgl"; ///< or "grouplasso" (lambda0 = lambda1 baseline)
    int threads = 1;
};

struct SimReport {
    SimScenario scenario;
    std::vector<ReplicateMetrics> replicate;
    double mean_mse = 0.0, mean_precision = 0.0, mean_recall = 0.0;
    double mean_sigma2 = 0.0, sd_sigma2 = 0.0;
    CoverageCounts coverage;
    double coverage_important = 0.0, coverage_null = 0.0;
    /// interaction scenario: selection frequency per pair index
    std::vector<std::pair<int, int>> pair_ids;
    std::vector<double> pair_frequency;
    /// timing scenario: (p, median seconds per sweep)
    std::vector<std::pair<long, double>> sweep_seconds;
};

SimReport run_scenario(const SimScenario& scenario);

} // namespace ssgl
