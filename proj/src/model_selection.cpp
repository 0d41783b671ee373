#include "ssgl/model_selection.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <limits>
#include <memory>
#include <numeric>

#include "ssgl/parallel.hpp"
#include "ssgl/rng.hpp"

namespace ssgl {

namespace {

std::uint64_t fnv1a(const double* data, std::size_t count, std::uint64_t h) {
    const unsigned char* bytes = reinterpret_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < count * sizeof(double); ++i) {
        h ^= bytes[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t hash_training_stats(const PreparedDesign& prep,
                                  const std::vector<const FittedBasis*>& bases) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    h = fnv1a(&prep.y_mean, 1, h);
    h = fnv1a(prep.col_means.data(), prep.col_means.size(), h);
    for (const auto* basis : bases) {
        h = fnv1a(&basis->lo, 1, h);
        h = fnv1a(&basis->hi, 1, h);
        if (!basis->interior_knots.empty()) {
            h = fnv1a(basis->interior_knots.data(), basis->interior_knots.size(), h);
        }
    }
    return h;
}

Matrix take_rows(const Matrix& X, const std::vector<long>& rows) {
    Matrix out(static_cast<long>(rows.size()), X.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) out.row(i) = X.row(rows[i]);
    return out;
}

Vector take_rows(const Vector& y, const std::vector<long>& rows) {
    Vector out(static_cast<long>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) out(i) = y(rows[i]);
    return out;
}

} // namespace

double CvResult::error_at(int df, double lambda0) const {
    const auto di = std::find(dfs.begin(), dfs.end(), df);
    const auto li = std::find(lambda0s.begin(), lambda0s.end(), lambda0);
    if (di == dfs.end() || li == lambda0s.end()) {
        throw InvalidArgument("cell not in the CV grid");
    }
    return mean_error(di - dfs.begin(), li - lambda0s.begin());
}

CvResult kfold_cv(const Matrix& X, const Vector& y, const CvBuilder& builder,
                  const std::vector<int>& dfs, const SsglConfig& config,
                  int K, std::uint64_t seed, int threads) {
    const long n = X.rows();
    if (K < 2 || n < K) throw InvalidArgument("need 2 <= K <= n");
    if (dfs.empty()) throw InvalidArgument("df candidate set is empty");

    // duplicates in the requested ladder are fit once
    SsglConfig fit_config = config;
    std::vector<long> ladder_index(config.lambda0_ladder.size());
    {
        fit_config.lambda0_ladder.clear();
        double prev = -1.0;
        for (std::size_t i = 0; i < config.lambda0_ladder.size(); ++i) {
            const double v = config.lambda0_ladder[i];
            if (v < prev) throw InvalidArgument("lambda0 ladder must be nondecreasing");
            if (v != prev) fit_config.lambda0_ladder.push_back(v);
            ladder_index[i] = static_cast<long>(fit_config.lambda0_ladder.size()) - 1;
            prev = v;
        }
    }
    fit_config.validate();

    CvResult result;
    result.lambda0s = config.lambda0_ladder;
    result.dfs = dfs;
    const long L = static_cast<long>(result.lambda0s.size());
    const long D = static_cast<long>(dfs.size());

    // seeded shuffle, then round-robin: fold sizes differ by at most one
    std::vector<long> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed);
    for (long i = n - 1; i > 0; --i) {
        std::swap(order[i], order[rng.below(static_cast<std::uint64_t>(i + 1))]);
    }
    result.fold_assignment.assign(n, 0);
    for (long i = 0; i < n; ++i) {
        result.fold_assignment[order[i]] = static_cast<int>(i % K);
    }

    struct Cell {
        Matrix errors;  // D x L held-out MSE, NaN when invalid
        std::uint64_t stat_hash = 0;
        std::vector<std::string> warnings;
    };
    std::vector<Cell> per_fold_df(static_cast<std::size_t>(K) * D);

    parallel_for(static_cast<std::size_t>(K) * D, threads, [&](std::size_t job) {
        const int fold = static_cast<int>(job / D);
        const int dfi = static_cast<int>(job % D);
        std::vector<long> train_rows, test_rows;
        for (long i = 0; i < n; ++i) {
            (result.fold_assignment[i] == fold ? test_rows : train_rows).push_back(i);
        }
        Cell cell;
        cell.errors = Matrix::Constant(1, L, std::numeric_limits<double>::quiet_NaN());
        try {
            CvModel model = builder(take_rows(X, train_rows), take_rows(y, train_rows),
                                    dfs[dfi]);
            cell.stat_hash = model.stat_hash;
            const Matrix X_test = take_rows(X, test_rows);
            const Vector y_test = take_rows(y, test_rows);
            SsglPath path = fit_path(model.prep, fit_config);
            for (long l = 0; l < L; ++l) {
                const long fl = ladder_index[l];
                if (!path.errors[fl].empty()) {
                    cell.warnings.push_back("fold " + std::to_string(fold) + " df " +
                                            std::to_string(dfs[dfi]) + " lambda0 " +
                                            std::to_string(result.lambda0s[l]) + ": " +
                                            path.errors[fl]);
                    continue;
                }
                const Vector pred = model.predict(path.fits[fl], X_test);
                cell.errors(0, l) = (y_test - pred).squaredNorm() /
                                    static_cast<double>(y_test.size());
            }
        } catch (const std::exception& e) {
            cell.warnings.push_back("fold " + std::to_string(fold) + " df " +
                                    std::to_string(dfs[dfi]) + " excluded: " + e.what());
        }
        per_fold_df[job] = std::move(cell);
    });

    result.mean_error = Matrix::Constant(D, L, std::numeric_limits<double>::quiet_NaN());
    result.se = Matrix::Constant(D, L, std::numeric_limits<double>::quiet_NaN());
    result.valid_folds = Eigen::MatrixXi::Zero(D, L);
    result.fold_stat_hashes.assign(static_cast<std::size_t>(K) * D, 0);
    for (int fold = 0; fold < K; ++fold) {
        for (long dfi = 0; dfi < D; ++dfi) {
            const auto& cell = per_fold_df[static_cast<std::size_t>(fold) * D + dfi];
            result.fold_stat_hashes[static_cast<std::size_t>(fold) * D + dfi] = cell.stat_hash;
            result.warnings.insert(result.warnings.end(), cell.warnings.begin(),
                                   cell.warnings.end());
        }
    }
    for (long dfi = 0; dfi < D; ++dfi) {
        for (long l = 0; l < L; ++l) {
            double sum = 0.0, sum_sq = 0.0;
            int valid = 0;
            for (int fold = 0; fold < K; ++fold) {
                const double e =
                    per_fold_df[static_cast<std::size_t>(fold) * D + dfi].errors(0, l);
                if (std::isfinite(e)) {
                    sum += e;
                    sum_sq += e * e;
                    ++valid;
                }
            }
            result.valid_folds(dfi, l) = valid;
            if (valid > 0) {
                const double mean = sum / valid;
                result.mean_error(dfi, l) = mean;
                if (valid > 1) {
                    const double var = (sum_sq - valid * mean * mean) / (valid - 1);
                    result.se(dfi, l) = std::sqrt(std::max(var, 0.0) / valid);
                } else {
                    result.se(dfi, l) = 0.0;
                }
            }
        }
    }

    try {
        const auto [lambda0, df] = select_model(result, SelectionRule::MinError);
        result.chosen_lambda0 = lambda0;
        result.chosen_df = df;
    } catch (const Error& e) {
        result.chosen_lambda0 = std::numeric_limits<double>::quiet_NaN();
        result.warnings.emplace_back(e.what());
    }
    return result;
}

std::pair<double, int> select_model(const CvResult& cv, SelectionRule rule) {
    const long D = static_cast<long>(cv.dfs.size());
    const long L = static_cast<long>(cv.lambda0s.size());
    long best_d = -1, best_l = -1;
    double best = std::numeric_limits<double>::infinity();
    for (long d = 0; d < D; ++d) {
        for (long l = 0; l < L; ++l) {
            const double e = cv.mean_error(d, l);
            if (!std::isfinite(e)) continue;
            // ties break toward larger lambda0, then smaller df
            const bool better =
                e < best ||
                (e == best && (cv.lambda0s[l] > cv.lambda0s[best_l] ||
                               (cv.lambda0s[l] == cv.lambda0s[best_l] &&
                                cv.dfs[d] < cv.dfs[best_d])));
            if (better) {
                best = e;
                best_d = d;
                best_l = l;
            }
        }
    }
    if (best_d < 0) throw Error("no valid cell in the CV grid");
    if (rule == SelectionRule::MinError) {
        return {cv.lambda0s[best_l], cv.dfs[best_d]};
    }

    const double cutoff = best + cv.se(best_d, best_l);
    long pick_d = best_d, pick_l = best_l;
    for (long d = 0; d < D; ++d) {
        for (long l = 0; l < L; ++l) {
            const double e = cv.mean_error(d, l);
            if (!std::isfinite(e) || e > cutoff) continue;
            if (cv.lambda0s[l] > cv.lambda0s[pick_l] ||
                (cv.lambda0s[l] == cv.lambda0s[pick_l] && cv.dfs[d] < cv.dfs[pick_d])) {
                pick_d = d;
                pick_l = l;
            }
        }
    }
    return {cv.lambda0s[pick_l], cv.dfs[pick_d]};
}

std::string format_cv_cell(double mean, double se) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3f (%.3f)", mean, se);
    return buf;
}

CvBuilder linear_builder(const std::vector<int>& group_sizes,
                         std::vector<std::string> ids, std::vector<bool> penalized) {
    return [group_sizes, ids, penalized](const Matrix& X_train, const Vector& y_train,
                                         int /*df*/) {
        CvModel model;
        GroupedDesign design = make_design(y_train, X_train, group_sizes, ids, penalized);
        model.prep = prepare(design);
        model.stat_hash = hash_training_stats(model.prep, {});
        model.predict = [](const SsglFit& fit, const Matrix& rows) {
            return Vector((rows * fit.beta_original).array() + fit.intercept);
        };
        return model;
    };
}

CvBuilder gam_builder(BasisKind kind, std::vector<std::string> names) {
    return [kind, names](const Matrix& X_train, const Vector& y_train, int df) {
        BasisSpec spec;
        spec.df = df;
        spec.kind = kind;
        auto model_ptr = std::make_shared<GamModel>(
            build_main_design(X_train, y_train, spec, names));
        CvModel model;
        model.prep = model_ptr->prep;
        std::vector<const FittedBasis*> bases;
        for (const auto& b : model_ptr->main_bases) bases.push_back(&b);
        model.stat_hash = hash_training_stats(model.prep, bases);
        model.predict = [model_ptr](const SsglFit& fit, const Matrix& rows) {
            return predict(*model_ptr, fit, rows);
        };
        return model;
    };
}

CvBuilder interaction_builder(const InteractionSpec& ispec, BasisKind kind,
                              std::vector<std::string> names) {
    return [ispec, kind, names](const Matrix& X_train, const Vector& y_train, int df) {
        BasisSpec spec;
        spec.df = df;
        spec.kind = kind;
        auto model_ptr = std::make_shared<GamModel>(
            build_gam_design(X_train, y_train, spec, ispec, names));
        CvModel model;
        model.prep = model_ptr->prep;
        std::vector<const FittedBasis*> bases;
        for (const auto& b : model_ptr->main_bases) bases.push_back(&b);
        for (const auto& b : model_ptr->inter_bases) bases.push_back(&b);
        model.stat_hash = hash_training_stats(model.prep, bases);
        model.predict = [model_ptr](const SsglFit& fit, const Matrix& rows) {
            return predict(*model_ptr, fit, rows);
        };
        return model;
    };
}

} // namespace ssgl
