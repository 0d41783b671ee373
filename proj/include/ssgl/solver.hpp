#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ssgl/grouped_design.hpp"
#include "ssgl/penalty.hpp"

namespace ssgl {

/// Solver hyperparameters. Negative sentinels mean "derive the default":
/// b < 0 uses the number of penalized groups, eps < 0 uses 1e-6 * sqrt(p).
struct SsglConfig {
    std::vector<double> lambda0_ladder = default_ladder();
    double lambda1 = 1.0;
    double a = 1.0;
    double b = -1.0;
    /// M: group updates between theta/sigma2/threshold refreshes. Effectively
    /// min(M, G) so that fits with fewer than M groups still refresh once per
    /// sweep.
    int update_stride = 10;
    double eps = -1.0;             ///< convergence tolerance on ||beta_k - beta_{k-1}||_2
    long max_iter = 10000;
    long sigma_freeze_iters = 100; ///< ladder gate for enabling sigma2 updates
    /// Comparator mode: each ladder value lambda0 is fit with spike = slab =
    /// lambda0 (plain group lasso at penalty lambda0 * sqrt(m_g)) and the
    /// variance frozen at 1, so sigma2*lambda* reduces to the usual penalty.
    bool group_lasso_mode = false;

    static std::vector<double> default_ladder();
    void validate() const;
    double resolved_eps(long p) const;
};

/// Mutable state carried across warm-started fits.
struct SsglState {
    Vector beta;                      ///< orthonormal scale
    double theta = 0.5;
    double sigma2 = 1.0;
    std::vector<double> thresholds;   ///< per size-class selection threshold cache
    long q_hat = 0;                   ///< nonzero penalized groups
    bool initialized = false;
};

/// Output of one converged (or max-iter truncated) fit.
struct SsglFit {
    Vector beta_ortho;
    Vector beta_original;
    double intercept = 0.0;
    std::vector<int> selected_groups; ///< indices g with ||beta_g|| > 0
    double sigma2 = 0.0;
    double theta = 0.0;
    long iterations = 0;
    bool converged = false;
    bool sigma_clamped = false;       ///< residual variance hit the 1e-12 floor
    int generalized_dimension = 0;
    double lambda0 = 0.0;

    bool is_selected(int g) const;
};

struct SsglPath {
    std::vector<SsglFit> fits;
    std::vector<std::string> errors; ///< parallel to fits; empty string = ok
    int final_index = -1;            ///< last successful ladder entry

    const SsglFit& final_fit() const;
};

/// z_g = X_g^T (y - sum_{l != g} X_l beta_l), computed as X_g^T r + n beta_g
/// which is valid because X_g^T X_g = n I on the orthonormalized design.
Vector partial_residual(const GroupedDesign& design, const Vector& residual,
                        const Vector& beta, int g);

/// Blockwise update: (1/n)(1 - sigma2*lam_star/||z||)_+ z, gated by
/// ||z|| > threshold for penalized groups. Pass penalized=false to skip the
/// gate (pure-slab update used for adjustment covariates).
Vector group_update(const Vector& z, double n, double sigma2, double lam_star,
                    double threshold, bool penalized);

/// Posterior mean of the mixing weight given q_hat active groups.
double update_theta(long q_hat, double a, double b, long num_groups);

struct Sigma2Update {
    double value = 0.0;
    bool clamped = false; ///< true when the raw value fell below 1e-12
};

/// sigma2 = ||r||^2 / (n + 2), clamped at 1e-12 with a warning flag.
Sigma2Update update_sigma2(double residual_sq_norm, long n);

/// Mode of a scaled inverse chi-squared prior with nu = 3 whose 90th
/// percentile equals var(y): 0.2 * var(y) * chi2_{3,0.10}.
/// Throws DegenerateVariance when var(y) = 0.
double init_sigma2(const Vector& y);

/// -||y - X beta||^2/(2 sigma2) - (n+2) log(sigma) + pen(beta | theta),
/// where the penalty term applies the group-size scaling of lambda0 and the
/// pure-slab -lambda1*||beta_g|| contribution for unpenalized groups.
double log_posterior(const GroupedDesign& design, const Vector& beta,
                     double sigma2, double theta, double lambda0, double lambda1);

/// Count of penalized groups whose norm exceeds the spike/slab intersection
/// threshold at (lambda0 * scale_g, lambda1, theta). Group sizes for which
/// the scaled lambda0 does not exceed lambda1 fall back to the plain
/// nonzero indicator.
int generalized_dimensionality(const Vector& beta, const std::vector<GroupSpec>& groups,
                               double lambda0, double lambda1, double theta);

/// One block coordinate ascent run at a fixed spike value. `state` supplies
/// the warm start when initialized and receives the final state. When
/// update_sigma is false the variance stays frozen at its incoming value.
SsglFit fit_single(const PreparedDesign& prep, const SsglConfig& config,
                   double lambda0, SsglState* state = nullptr,
                   bool update_sigma = true);

/// Warm-started sweep over the increasing lambda0 ladder. Variance updates
/// stay frozen until the first ladder entry that converges in fewer than
/// sigma_freeze_iters iterations and are enabled from the next entry on,
/// permanently. Per-entry failures are recorded and the ladder continues.
SsglPath fit_path(const PreparedDesign& prep, const SsglConfig& config);

/// Median seconds per full group sweep at the given spike value; used by the
/// complexity scaling check. Runs the same inner loop as fit_single without
/// the convergence test.
double benchmark_sweep_seconds(const PreparedDesign& prep, const SsglConfig& config,
                               double lambda0, int sweeps);

} // namespace ssgl
