#include "ssgl/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "ssgl/stats.hpp"

namespace ssgl {

std::vector<double> SsglConfig::default_ladder() {
    std::vector<double> ladder(100);
    std::iota(ladder.begin(), ladder.end(), 1.0);
    return ladder;
}

void SsglConfig::validate() const {
    if (lambda0_ladder.empty()) throw InvalidArgument("lambda0 ladder is empty");
    double prev = 0.0;
    for (double v : lambda0_ladder) {
        if (!(v > prev)) throw InvalidArgument("lambda0 ladder must be strictly increasing and positive");
        prev = v;
    }
    if (!(lambda1 > 0.0)) throw InvalidArgument("lambda1 must be positive");
    if (!group_lasso_mode && lambda1 > lambda0_ladder.front()) {
        throw InvalidArgument("lambda1 must not exceed the smallest ladder value");
    }
    if (update_stride < 1) throw InvalidArgument("update stride M must be >= 1");
    if (!(a > 0.0)) throw InvalidArgument("a must be positive");
    if (max_iter < 1) throw InvalidArgument("max_iter must be >= 1");
}

double SsglConfig::resolved_eps(long p) const {
    if (eps >= 0.0) return eps;
    return 1e-6 * std::sqrt(static_cast<double>(p));
}

bool SsglFit::is_selected(int g) const {
    return std::binary_search(selected_groups.begin(), selected_groups.end(), g);
}

const SsglFit& SsglPath::final_fit() const {
    if (final_index < 0) throw Error("path contains no successful fit");
    return fits[final_index];
}

Vector partial_residual(const GroupedDesign& design, const Vector& residual,
                        const Vector& beta, int g) {
    const int m = design.groups[g].size;
    const long off = design.offset(g);
    Vector z = design.group_block(g).transpose() * residual;
    z += design.n() * beta.segment(off, m);
    return z;
}

Vector group_update(const Vector& z, double n, double sigma2, double lam_star,
                    double threshold, bool penalized) {
    const double norm_z = z.norm();
    if (norm_z <= 0.0) return Vector::Zero(z.size());
    if (penalized && !(norm_z > threshold)) return Vector::Zero(z.size());
    const double shrink = 1.0 - sigma2 * lam_star / norm_z;
    if (shrink <= 0.0) return Vector::Zero(z.size());
    return (shrink / n) * z;
}

double update_theta(long q_hat, double a, double b, long num_groups) {
    return (a + static_cast<double>(q_hat)) / (a + b + static_cast<double>(num_groups));
}

Sigma2Update update_sigma2(double residual_sq_norm, long n) {
    Sigma2Update out;
    out.value = residual_sq_norm / static_cast<double>(n + 2);
    if (out.value < 1e-12) {
        out.value = 1e-12;
        out.clamped = true;
    }
    return out;
}

double init_sigma2(const Vector& y) {
    const long n = y.size();
    if (n < 2) throw InvalidArgument("init_sigma2 needs at least two observations");
    const double mean = y.mean();
    const double var = (y.array() - mean).square().sum() / static_cast<double>(n - 1);
    if (!(var > 0.0)) throw DegenerateVariance("response variance is zero");
    // tau2 solves P(sigma2 <= var) = 0.9 under Scaled-Inv-Chi2(nu=3, tau2);
    // the mode is 3 tau2 / 5.
    const double tau2 = var * chi2_3_quantile(0.10) / 3.0;
    return 0.6 * tau2;
}

double log_posterior(const GroupedDesign& design, const Vector& beta,
                     double sigma2, double theta, double lambda0, double lambda1) {
    const long n = design.n();
    const Vector r = design.y - design.X * beta;
    double value = -r.squaredNorm() / (2.0 * sigma2) -
                   (static_cast<double>(n) + 2.0) * 0.5 * std::log(sigma2);
    for (int g = 0; g < design.num_groups(); ++g) {
        const auto& spec = design.groups[g];
        const double norm = beta.segment(design.offset(g), spec.size).norm();
        if (!spec.penalized) {
            value += -lambda1 * norm;
            continue;
        }
        PenaltyParams params;
        params.lambda0 = lambda0 * spec.scale;
        params.lambda1 = lambda1;
        params.theta = theta;
        params.sigma2 = sigma2;
        params.n = static_cast<double>(n);
        params.m = spec.size;
        value += pen_separable_group(norm, params);
    }
    return value;
}

int generalized_dimensionality(const Vector& beta, const std::vector<GroupSpec>& groups,
                               double lambda0, double lambda1, double theta) {
    int count = 0;
    long off = 0;
    for (const auto& spec : groups) {
        const double norm = beta.segment(off, spec.size).norm();
        off += spec.size;
        if (!spec.penalized) continue;
        const double scaled = lambda0 * spec.scale;
        if (scaled > lambda1) {
            PenaltyParams params;
            params.lambda0 = scaled;
            params.lambda1 = lambda1;
            params.theta = theta;
            params.m = spec.size;
            if (norm > omega_threshold(params)) ++count;
        } else if (norm > 0.0) {
            ++count;
        }
    }
    return count;
}

namespace {

// Distinct (size, scale) combinations sharing one threshold value.
struct SizeClass {
    int m;
    double scale;
};

struct Engine {
    const PreparedDesign& prep;
    const SsglConfig& config;
    double lambda0;
    bool update_sigma;

    const GroupedDesign& design;
    long n, p;
    int G;
    long G_pen = 0;
    double b_eff;
    std::vector<SizeClass> classes;
    std::vector<int> class_of; // -1 for unpenalized groups

    Vector beta;
    Vector residual;
    double theta = 0.5;
    double sigma2 = 1.0;
    std::vector<double> thresholds;
    long q_hat = 0;
    long active_coefs = 0; ///< coefficients in nonzero groups, any penalization
    long update_counter = 0;
    long stride = 10; ///< min(M, G) so small problems still refresh each sweep
    bool sigma_clamped = false;

    Engine(const PreparedDesign& prep_, const SsglConfig& config_, double lambda0_,
           SsglState* state, bool update_sigma_)
        : prep(prep_), config(config_), lambda0(lambda0_), update_sigma(update_sigma_),
          design(prep_.design), n(design.n()), p(design.p()),
          G(design.num_groups()) {
        config.validate();
        if (!design.orthonormalized) {
            throw InvalidArgument("solver requires an orthonormalized design");
        }

        class_of.resize(G, -1);
        for (int g = 0; g < G; ++g) {
            const auto& spec = design.groups[g];
            if (!spec.penalized) continue;
            ++G_pen;
            int idx = -1;
            for (std::size_t c = 0; c < classes.size(); ++c) {
                if (classes[c].m == spec.size && classes[c].scale == spec.scale) {
                    idx = static_cast<int>(c);
                    break;
                }
            }
            if (idx < 0) {
                classes.push_back({spec.size, spec.scale});
                idx = static_cast<int>(classes.size()) - 1;
            }
            class_of[g] = idx;
        }
        b_eff = config.b >= 0.0 ? config.b : static_cast<double>(G_pen);
        stride = std::min<long>(config.update_stride, std::max(G, 1));

        if (state != nullptr && state->initialized) {
            if (state->beta.size() != p) {
                throw DimensionMismatch("warm-start state has wrong dimension");
            }
            beta = state->beta;
            theta = state->theta;
            sigma2 = state->sigma2;
            if (state->thresholds.size() == classes.size()) {
                thresholds = state->thresholds;
            } else {
                thresholds.assign(classes.size(), 0.0);
                refresh_thresholds();
            }
        } else {
            beta = Vector::Zero(p);
            theta = 0.5;
            sigma2 = config.group_lasso_mode ? 1.0 : init_sigma2(design.y);
            thresholds.assign(classes.size(), 0.0);
            refresh_thresholds();
        }
        // the plain group lasso has no carried threshold; recompute at this lambda
        if (config.group_lasso_mode) refresh_thresholds();
        residual = design.y - design.X * beta;
        q_hat = 0;
        active_coefs = 0;
        for (int g = 0; g < G; ++g) {
            if (beta.segment(design.offset(g), design.groups[g].size).isZero(0.0)) continue;
            active_coefs += design.groups[g].size;
            if (class_of[g] >= 0) ++q_hat;
        }
    }

    PenaltyParams params_for(int cls) const {
        PenaltyParams params;
        params.lambda0 = lambda0 * classes[cls].scale;
        params.lambda1 = config.group_lasso_mode ? params.lambda0 : config.lambda1;
        params.theta = theta;
        params.sigma2 = sigma2;
        params.n = static_cast<double>(n);
        params.m = classes[cls].m;
        return params;
    }

    void refresh_thresholds() {
        for (std::size_t c = 0; c < classes.size(); ++c) {
            thresholds[c] = solver_threshold(params_for(static_cast<int>(c)));
        }
    }

    void refresh_shared() {
        theta = update_theta(q_hat, config.a, b_eff, G_pen);
        // ||r||^2/(n+2) only estimates the variance while the residual keeps
        // real degrees of freedom; near saturation it collapses toward the
        // absorbing sigma2 = 0 mode. Freeze the update unless at least half
        // the observations remain as residual df.
        if (update_sigma && 2 * active_coefs <= n) {
            const auto s = update_sigma2(residual.squaredNorm(), n);
            sigma2 = s.value;
            sigma_clamped = sigma_clamped || s.clamped;
        }
        refresh_thresholds();
    }

    // One pass over all groups; returns ||beta_new - beta_old||_2^2.
    double sweep() {
        double diff2 = 0.0;
        Vector z;
        for (int g = 0; g < G; ++g) {
            const int m = design.groups[g].size;
            const long off = design.offset(g);
            auto beta_g = beta.segment(off, m);
            const bool was_zero = beta_g.isZero(0.0);

            z.noalias() = design.X.block(0, off, n, m).transpose() * residual;
            if (!was_zero) z += static_cast<double>(n) * beta_g;

            const double norm_z = z.norm();
            const int cls = class_of[g];
            double shrink = 0.0;
            if (norm_z > 0.0) {
                if (cls >= 0) {
                    if (norm_z > thresholds[cls]) {
                        auto params = params_for(cls);
                        const double lam = lambda_star(beta_g.norm(), params);
                        shrink = std::max(1.0 - sigma2 * lam / norm_z, 0.0);
                    }
                } else {
                    shrink = std::max(1.0 - sigma2 * config.lambda1 / norm_z, 0.0);
                }
            }

            const bool now_zero = (shrink <= 0.0);
            if (!(was_zero && now_zero)) {
                Vector delta = (shrink / static_cast<double>(n)) * z - beta_g;
                const double d2 = delta.squaredNorm();
                if (d2 > 0.0) {
                    residual.noalias() -= design.X.block(0, off, n, m) * delta;
                    beta_g += delta;
                    diff2 += d2;
                }
                if (was_zero != now_zero) {
                    active_coefs += now_zero ? -m : m;
                    if (cls >= 0) q_hat += now_zero ? -1 : 1;
                }
            }

            if (++update_counter % stride == 0) refresh_shared();
        }
        return diff2;
    }
};

} // namespace

SsglFit fit_single(const PreparedDesign& prep, const SsglConfig& config,
                   double lambda0, SsglState* state, bool update_sigma) {
    Engine engine(prep, config, lambda0, state, update_sigma);
    const double eps = config.resolved_eps(engine.p);

    long k = 0;
    bool converged = false;
    while (k < config.max_iter) {
        ++k;
        const double diff = std::sqrt(engine.sweep());
        if (diff <= eps) {
            converged = true;
            break;
        }
    }

    SsglFit fit;
    fit.beta_ortho = engine.beta;
    fit.beta_original =
        back_transform(engine.beta, prep.design.groups, prep.transforms);
    fit.intercept = intercept_for(prep, fit.beta_original);
    for (int g = 0; g < engine.G; ++g) {
        const auto seg = engine.beta.segment(prep.design.offset(g), prep.design.groups[g].size);
        if (!seg.isZero(0.0)) fit.selected_groups.push_back(g);
    }
    fit.sigma2 = engine.sigma2;
    fit.theta = engine.theta;
    fit.iterations = k;
    fit.converged = converged;
    fit.sigma_clamped = engine.sigma_clamped;
    fit.lambda0 = lambda0;
    fit.generalized_dimension =
        config.group_lasso_mode
            ? static_cast<int>(engine.q_hat)
            : generalized_dimensionality(engine.beta, prep.design.groups, lambda0,
                                         config.lambda1, engine.theta);

    if (state != nullptr) {
        state->beta = engine.beta;
        state->theta = engine.theta;
        state->sigma2 = engine.sigma2;
        state->thresholds = engine.thresholds;
        state->q_hat = engine.q_hat;
        state->initialized = true;
    }
    return fit;
}

SsglPath fit_path(const PreparedDesign& prep, const SsglConfig& config) {
    config.validate();
    SsglPath path;
    SsglState state;
    // Iteration counters start at zero, so the gate "previous entry converged
    // in < sigma_freeze_iters iterations" holds vacuously at the first entry;
    // a slow entry freezes the variance for the ones after it until some
    // entry converges fast, and that lift is permanent.
    bool sigma_on = true;
    bool sigma_lifted = false;
    for (double lambda0 : config.lambda0_ladder) {
        try {
            SsglFit fit = fit_single(prep, config, lambda0, &state,
                                     sigma_on && !config.group_lasso_mode);
            if (fit.converged && fit.iterations < config.sigma_freeze_iters) {
                sigma_lifted = true;
            }
            sigma_on = sigma_lifted;
            path.fits.push_back(std::move(fit));
            path.errors.emplace_back();
            path.final_index = static_cast<int>(path.fits.size()) - 1;
        } catch (const std::exception& e) {
            path.fits.emplace_back();
            path.fits.back().lambda0 = lambda0;
            path.errors.emplace_back(e.what());
        }
    }
    return path;
}

double benchmark_sweep_seconds(const PreparedDesign& prep, const SsglConfig& config,
                               double lambda0, int sweeps) {
    Engine engine(prep, config, lambda0, nullptr, true);
    engine.sweep(); // warm-up pass touches all memory once
    using clock = std::chrono::steady_clock;
    std::vector<double> times;
    times.reserve(sweeps);
    for (int i = 0; i < sweeps; ++i) {
        const auto t0 = clock::now();
        engine.sweep();
        const auto t1 = clock::now();
        times.push_back(std::chrono::duration<double>(t1 - t0).count());
    }
    std::nth_element(times.begin(), times.begin() + times.size() / 2, times.end());
    return times[times.size() / 2];
}

} // namespace ssgl
