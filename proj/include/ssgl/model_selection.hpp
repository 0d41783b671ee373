#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "ssgl/basis.hpp"
#include "ssgl/grouped_design.hpp"
#include "ssgl/solver.hpp"

namespace ssgl {

/// A model rebuilt on training rows only: the design to fit plus a predictor
/// for held-out rows and a checksum over the training-only statistics
/// (centering means, knots) used to assert the absence of leakage.
struct CvModel {
    PreparedDesign prep;
    std::function<Vector(const SsglFit&, const Matrix& X_rows)> predict;
    std::uint64_t stat_hash = 0;
};

/// Builds a CvModel from training rows at a given df. Linear problems ignore
/// df; spline problems rebuild knots from the training rows.
using CvBuilder = std::function<CvModel(const Matrix& X_train, const Vector& y_train, int df)>;

struct CvResult {
    std::vector<double> lambda0s;
    std::vector<int> dfs;
    Matrix mean_error;                      ///< dfs.size() x lambda0s.size()
    Matrix se;                              ///< standard error across folds
    Eigen::MatrixXi valid_folds;            ///< folds contributing per cell
    std::vector<int> fold_assignment;       ///< per-row fold index
    std::vector<std::uint64_t> fold_stat_hashes; ///< (fold, df) row-major
    std::vector<std::string> warnings;
    double chosen_lambda0 = 0.0;
    int chosen_df = 0;

    double error_at(int df, double lambda0) const;
};

enum class SelectionRule { MinError, OneStandardError };

/// K-fold cross-validation over the (lambda0, df) grid. Each fold rebuilds
/// centering/knots/orthonormalization from its training rows only and fits
/// the warm-started path once per df. Folds are seeded and differ in size by
/// at most one row; K = n gives leave-one-out. Duplicate ladder entries are
/// fit once and reported per requested column. Cells whose design is
/// degenerate in some fold are scored on the remaining folds with a warning;
/// cells valid in no fold are excluded from selection.
CvResult kfold_cv(const Matrix& X, const Vector& y, const CvBuilder& builder,
                  const std::vector<int>& dfs, const SsglConfig& config,
                  int K = 10, std::uint64_t seed = 1, int threads = 1);

/// "0.012 (0.003)" mean-and-spread cell used in CV reports.
std::string format_cv_cell(double mean, double se);

/// MinError picks the grid minimum; OneStandardError picks the sparsest
/// (largest) lambda0 whose error is within one standard error of the
/// minimum. Ties break toward larger lambda0, then smaller df.
std::pair<double, int> select_model(const CvResult& cv,
                                    SelectionRule rule = SelectionRule::MinError);

/// Builder for plain grouped linear designs (df ignored).
CvBuilder linear_builder(const std::vector<int>& group_sizes,
                         std::vector<std::string> ids = {},
                         std::vector<bool> penalized = {});

/// Builder for spline main-effect designs; df comes from the CV grid.
CvBuilder gam_builder(BasisKind kind = BasisKind::NaturalCubic,
                      std::vector<std::string> names = {});

/// Builder for main + interaction designs at fixed d_star; df is the main
/// effect basis size from the CV grid.
CvBuilder interaction_builder(const InteractionSpec& ispec,
                              BasisKind kind = BasisKind::NaturalCubic,
                              std::vector<std::string> names = {});

} // namespace ssgl
