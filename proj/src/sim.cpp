#include "ssgl/sim.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <set>

#include "ssgl/basis.hpp"
#include "ssgl/debias.hpp"
#include "ssgl/model_selection.hpp"
#include "ssgl/parallel.hpp"
#include "ssgl/solver.hpp"

namespace ssgl {

namespace {

constexpr double kPi = 3.141592653589793238462643383280;

Matrix uniform_matrix(long n, long p, Rng& rng) {
    Matrix X(n, p);
    for (long i = 0; i < n; ++i) {
        for (long j = 0; j < p; ++j) X(i, j) = rng.uniform();
    }
    return X;
}

Matrix normal_matrix(long n, long p, Rng& rng) {
    Matrix X(n, p);
    for (long i = 0; i < n; ++i) {
        for (long j = 0; j < p; ++j) X(i, j) = rng.normal();
    }
    return X;
}

void add_noise(SimDataset& data, Rng& rng) {
    data.y = data.f;
    for (long i = 0; i < data.y.size(); ++i) data.y(i) += rng.normal();
}

// (z, z^2) column pair per base covariate
Matrix linear_squared_design(const Matrix& Z) {
    Matrix X(Z.rows(), 2 * Z.cols());
    for (long j = 0; j < Z.cols(); ++j) {
        X.col(2 * j) = Z.col(j);
        X.col(2 * j + 1) = Z.col(j).array().square();
    }
    return X;
}

} // namespace

SimDataset gen_sparse_gam(long n, long p, Rng& rng) {
    SimDataset data;
    data.X = uniform_matrix(n, p, rng);
    data.f = Vector(n);
    for (long i = 0; i < n; ++i) {
        const auto x = data.X.row(i);
        data.f(i) = 5.0 * std::sin(kPi * x(0)) + 2.5 * (x(2) * x(2) - 0.5) +
                    std::exp(x(3)) + 3.0 * x(4);
    }
    data.truth_groups = {0, 2, 3, 4};
    add_noise(data, rng);
    return data;
}

SimDataset gen_interaction(long n, long p, Rng& rng) {
    if (p < 7) throw InvalidArgument("interaction scenario needs p >= 7");
    SimDataset data;
    data.X = uniform_matrix(n, p, rng);
    data.f = Vector(n);
    for (long i = 0; i < n; ++i) {
        const auto x = data.X.row(i);
        data.f(i) = 2.5 * std::sin(kPi * x(0) * x(1)) + 2.0 * std::cos(kPi * (x(2) + x(4))) +
                    2.0 * (x(5) - 0.5) + 2.5 * x(6);
    }
    data.truth_pairs = {{0, 1}, {2, 4}};
    data.truth_groups = {0, 1, 2, 4, 5, 6};
    add_noise(data, rng);
    return data;
}

SimDataset gen_coverage(long n, long G, double rho, Rng& rng) {
    SimDataset data;
    Matrix Z(n, G);
    const double innov = std::sqrt(1.0 - rho * rho);
    for (long i = 0; i < n; ++i) {
        Z(i, 0) = rng.normal();
        for (long j = 1; j < G; ++j) Z(i, j) = rho * Z(i, j - 1) + innov * rng.normal();
    }
    data.X = linear_squared_design(Z);
    data.group_sizes.assign(G, 2);
    data.beta = Vector::Zero(2 * G);
    const double head[7] = {0.0, 0.5, 0.25, 0.1, 0.0, 0.0, 0.7};
    for (int j = 0; j < 7; ++j) data.beta(j) = head[j];
    for (int j = 0; j < 7; ++j) {
        if (head[j] != 0.0) data.truth_coords.push_back(j);
    }
    std::set<int> groups;
    for (int j : data.truth_coords) groups.insert(j / 2);
    data.truth_groups.assign(groups.begin(), groups.end());
    data.f = data.X * data.beta;
    add_noise(data, rng);
    return data;
}

SimDataset gen_dense(long n, long p_cov, Rng& rng) {
    SimDataset data;
    Matrix Z = normal_matrix(n, p_cov, rng);
    data.X = linear_squared_design(Z);
    data.group_sizes.assign(p_cov, 2);
    data.beta = Vector::Zero(2 * p_cov);
    const long active = std::min<long>(20, p_cov);
    for (long j = 0; j < active; ++j) {
        data.beta(2 * j) = 0.2;
        data.beta(2 * j + 1) = 0.2;
        data.truth_groups.push_back(static_cast<int>(j));
        data.truth_coords.push_back(static_cast<int>(2 * j));
        data.truth_coords.push_back(static_cast<int>(2 * j + 1));
    }
    data.f = data.X * data.beta;
    add_noise(data, rng);
    return data;
}

SimDataset gen_sigma_check(long n, long G, Rng& rng) {
    if (G < 20) throw InvalidArgument("sigma_check scenario needs G >= 20");
    SimDataset data;
    Matrix Z = normal_matrix(n, G, rng);
    data.X = linear_squared_design(Z);
    data.group_sizes.assign(G, 2);
    data.beta = Vector::Zero(2 * G);
    data.beta(0) = 0.5;   // x1
    data.beta(2) = 0.3;   // x2
    data.beta(19) = 0.6;  // x10 squared
    data.beta(38) = -0.2; // x20
    data.truth_groups = {0, 1, 9, 19};
    data.truth_coords = {0, 2, 19, 38};
    data.f = data.X * data.beta;
    add_noise(data, rng);
    return data;
}

namespace {

SimDataset tail_active_groups(long n, long G, int m, Rng& rng) {
    SimDataset data;
    data.X = normal_matrix(n, G * m, rng);
    data.group_sizes.assign(G, m);
    data.beta = Vector::Zero(G * m);
    const long first_active = std::max<long>(G - 4, 0);
    for (long g = first_active; g < G; ++g) {
        data.truth_groups.push_back(static_cast<int>(g));
        for (int k = 0; k < m; ++k) {
            data.beta(g * m + k) = rng.normal(0.0, 0.4);
            data.truth_coords.push_back(static_cast<int>(g * m + k));
        }
    }
    data.f = data.X * data.beta;
    add_noise(data, rng);
    return data;
}

} // namespace

SimDataset gen_many_groups(long n, long G, Rng& rng) {
    return tail_active_groups(n, G, 3, rng);
}

SimDataset gen_timing(long n, long G, Rng& rng) {
    return tail_active_groups(n, G, 2, rng);
}

SelectionScore score_selection(const std::vector<int>& selected,
                               const std::vector<int>& truth) {
    const std::set<int> truth_set(truth.begin(), truth.end());
    SelectionScore score;
    for (int g : selected) {
        if (truth_set.count(g)) ++score.tp;
        else ++score.fp;
    }
    score.fn = static_cast<long>(truth_set.size()) - score.tp;
    // precision defined as 1 on an empty selection; recall as 1 on empty truth
    score.precision = (score.tp + score.fp) > 0
                          ? static_cast<double>(score.tp) / (score.tp + score.fp)
                          : 1.0;
    score.recall = (score.tp + score.fn) > 0
                       ? static_cast<double>(score.tp) / (score.tp + score.fn)
                       : 1.0;
    return score;
}

namespace {

struct ScenarioKind {
    enum Value { SparseGam, Interaction, Coverage, Dense, SigmaCheck, ManyGroups, Timing };
};

int parse_scenario(const std::string& name) {
    if (name == "sparse_gam") return ScenarioKind::SparseGam;
    if (name == "interaction") return ScenarioKind::Interaction;
    if (name == "coverage") return ScenarioKind::Coverage;
    if (name == "dense") return ScenarioKind::Dense;
    if (name == "sigma_check") return ScenarioKind::SigmaCheck;
    if (name == "many_groups") return ScenarioKind::ManyGroups;
    if (name == "timing") return ScenarioKind::Timing;
    throw InvalidArgument("unknown scenario '" + name + "'");
}

SsglConfig config_for(const SimScenario& sc) {
    SsglConfig config;
    if (!sc.ladder.empty()) config.lambda0_ladder = sc.ladder;
    config.group_lasso_mode = (sc.method == "grouplasso");
    return config;
}

std::vector<double> ladder_up_to(const std::vector<double>& ladder, double lambda0) {
    std::vector<double> out;
    for (double v : ladder) {
        if (v <= lambda0) out.push_back(v);
    }
    if (out.empty() || out.back() != lambda0) out.push_back(lambda0);
    return out;
}

SimDataset generate(int kind, const SimScenario& sc, Rng& rng) {
    switch (kind) {
        case ScenarioKind::SparseGam: return gen_sparse_gam(sc.n, sc.p, rng);
        case ScenarioKind::Interaction: return gen_interaction(sc.n, sc.p, rng);
        case ScenarioKind::Coverage: return gen_coverage(sc.n, sc.G, sc.rho, rng);
        case ScenarioKind::Dense: return gen_dense(sc.n, sc.p, rng);
        case ScenarioKind::SigmaCheck: return gen_sigma_check(sc.n, sc.G, rng);
        case ScenarioKind::ManyGroups: return gen_many_groups(sc.n, sc.G, rng);
        default: return gen_timing(sc.n, sc.G, rng);
    }
}

} // namespace

SimReport run_scenario(const SimScenario& sc) {
    const int kind = parse_scenario(sc.name);
    SimReport report;
    report.scenario = sc;
    const SsglConfig base_config = config_for(sc);
    Rng root(sc.seed);

    if (kind == ScenarioKind::Timing) {
        // wall clock per sweep across the group-count grid; n is fixed
        std::vector<long> grid;
        if (sc.G > 0) {
            for (long g = 100; g <= sc.G; g += 100) grid.push_back(g);
        } else {
            grid = {500, 1000, 2000};
        }
        for (long G : grid) {
            Rng rng = root.split(static_cast<std::uint64_t>(G));
            SimDataset data = gen_timing(sc.n, G, rng);
            GroupedDesign design =
                make_design(data.y, data.X, data.group_sizes);
            PreparedDesign prep = prepare(design);
            const double sec = benchmark_sweep_seconds(prep, base_config, 20.0, 15);
            report.sweep_seconds.emplace_back(prep.design.p(), sec);
        }
        return report;
    }

    const bool spline_scenario =
        kind == ScenarioKind::SparseGam || kind == ScenarioKind::Interaction;
    report.replicate.resize(sc.replicates);
    std::vector<CoverageCounts> coverage(sc.replicates);
    std::vector<std::vector<int>> selected_pairs(sc.replicates);

    parallel_for(sc.replicates, sc.threads, [&](std::size_t r) {
        Rng rng = root.split(r);
        const auto t0 = std::chrono::steady_clock::now();
        SimDataset data = generate(kind, sc, rng);
        const std::uint64_t cv_seed = rng.next_u64();
        ReplicateMetrics metrics;

        if (spline_scenario) {
            const bool inter = kind == ScenarioKind::Interaction;
            InteractionSpec ispec;
            ispec.d_star = sc.d_star;

            double lambda0 = base_config.lambda0_ladder.back();
            int df = sc.dfs.front();
            if (sc.tune_by_cv) {
                CvBuilder builder = inter ? interaction_builder(ispec) : gam_builder();
                CvResult cv = kfold_cv(data.X, data.y, builder, sc.dfs, base_config,
                                       sc.K, cv_seed, 1);
                lambda0 = cv.chosen_lambda0;
                df = cv.chosen_df;
            }
            SsglConfig config = base_config;
            config.lambda0_ladder = ladder_up_to(base_config.lambda0_ladder, lambda0);
            BasisSpec spec;
            spec.df = df;
            GamModel model = inter ? build_gam_design(data.X, data.y, spec, ispec)
                                   : build_main_design(data.X, data.y, spec);
            SsglPath path = fit_path(model.prep, config);
            const SsglFit& fit = path.final_fit();

            const long p_cov = data.X.cols();
            std::vector<int> main_selected, pair_selected;
            for (int g : fit.selected_groups) {
                if (g < p_cov) main_selected.push_back(g);
                else pair_selected.push_back(g - static_cast<int>(p_cov));
            }
            if (inter) {
                selected_pairs[r] = pair_selected;
                std::vector<int> truth_idx;
                for (const auto& pr : data.truth_pairs) {
                    const auto it = std::find(model.pairs.begin(), model.pairs.end(), pr);
                    truth_idx.push_back(static_cast<int>(it - model.pairs.begin()));
                }
                const auto score = score_selection(pair_selected, truth_idx);
                metrics.precision = score.precision;
                metrics.recall = score.recall;
            } else {
                const auto score = score_selection(main_selected, data.truth_groups);
                metrics.precision = score.precision;
                metrics.recall = score.recall;
            }

            SimDataset test = generate(kind, sc, rng);
            const Vector pred = predict(model, fit, test.X);
            metrics.mse = (pred - test.f).squaredNorm() / static_cast<double>(test.f.size());
            metrics.sigma2_hat = fit.sigma2;
            metrics.theta_hat = fit.theta;
            metrics.lambda0 = lambda0;
            metrics.df = df;
            metrics.selected = static_cast<long>(fit.selected_groups.size());
        } else {
            double lambda0 = base_config.lambda0_ladder.back();
            if (sc.tune_by_cv) {
                CvResult cv = kfold_cv(data.X, data.y, linear_builder(data.group_sizes),
                                       {0}, base_config, sc.K, cv_seed, 1);
                lambda0 = cv.chosen_lambda0;
            }
            SsglConfig config = base_config;
            config.lambda0_ladder = ladder_up_to(base_config.lambda0_ladder, lambda0);
            GroupedDesign design = make_design(data.y, data.X, data.group_sizes);
            PreparedDesign prep = prepare(design);
            SsglPath path = fit_path(prep, config);
            const SsglFit& fit = path.final_fit();

            const auto score = score_selection(fit.selected_groups, data.truth_groups);
            metrics.precision = score.precision;
            metrics.recall = score.recall;

            SimDataset test = generate(kind, sc, rng);
            const Vector pred =
                (test.X * fit.beta_original).array() + fit.intercept;
            metrics.mse = (pred - test.f).squaredNorm() / static_cast<double>(test.f.size());
            metrics.sigma2_hat = fit.sigma2;
            metrics.theta_hat = fit.theta;
            metrics.lambda0 = lambda0;
            metrics.selected = static_cast<long>(fit.selected_groups.size());

            if (kind == ScenarioKind::Coverage) {
                const DebiasInference inf = run_debias(prep, fit, sc.alpha);
                CoverageCounts& counts = coverage[r];
                const std::set<int> important(data.truth_coords.begin(),
                                              data.truth_coords.end());
                for (long j = 0; j < data.beta.size(); ++j) {
                    const bool inside = inf.original.ci_lower(j) <= data.beta(j) &&
                                        data.beta(j) <= inf.original.ci_upper(j);
                    if (important.count(static_cast<int>(j))) {
                        ++counts.total_important;
                        if (inside) ++counts.covered_important;
                    } else {
                        ++counts.total_null;
                        if (inside) ++counts.covered_null;
                    }
                }
            }
        }

        const auto t1 = std::chrono::steady_clock::now();
        metrics.seconds = std::chrono::duration<double>(t1 - t0).count();
        report.replicate[r] = metrics;
    });

    const double R = static_cast<double>(sc.replicates);
    for (const auto& m : report.replicate) {
        report.mean_mse += m.mse / R;
        report.mean_precision += m.precision / R;
        report.mean_recall += m.recall / R;
        report.mean_sigma2 += m.sigma2_hat / R;
    }
    double var_sigma2 = 0.0;
    for (const auto& m : report.replicate) {
        var_sigma2 += (m.sigma2_hat - report.mean_sigma2) * (m.sigma2_hat - report.mean_sigma2);
    }
    report.sd_sigma2 = sc.replicates > 1 ? std::sqrt(var_sigma2 / (R - 1.0)) : 0.0;

    for (const auto& counts : coverage) {
        report.coverage.covered_important += counts.covered_important;
        report.coverage.total_important += counts.total_important;
        report.coverage.covered_null += counts.covered_null;
        report.coverage.total_null += counts.total_null;
    }
    if (report.coverage.total_important > 0) {
        report.coverage_important = static_cast<double>(report.coverage.covered_important) /
                                    report.coverage.total_important;
    }
    if (report.coverage.total_null > 0) {
        report.coverage_null =
            static_cast<double>(report.coverage.covered_null) / report.coverage.total_null;
    }

    if (kind == ScenarioKind::Interaction) {
        for (int k = 0; k < sc.p; ++k) {
            for (int l = k + 1; l < sc.p; ++l) report.pair_ids.emplace_back(k, l);
        }
        report.pair_frequency.assign(report.pair_ids.size(), 0.0);
        for (const auto& sel : selected_pairs) {
            for (int idx : sel) report.pair_frequency[idx] += 1.0 / R;
        }
    }
    return report;
}

} // namespace ssgl
