#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ssgl/grouped_design.hpp"
#include "ssgl/solver.hpp"

namespace ssgl {

enum class BasisKind { NaturalCubic, BSpline };

/// Per-covariate spline description. `df` counts the columns actually
/// emitted (after the natural constraint and intercept removal).
struct BasisSpec {
    int df = 3;
    BasisKind kind = BasisKind::NaturalCubic;
};

/// Interaction block description. Each pair (k,l) contributes a group of
/// d_star^2 tensor-product columns (2*d_star + d_star^2 when hierarchy
/// augmentation is on). An empty `pairs` list means all k < l.
struct InteractionSpec {
    int d_star = 2;
    std::vector<std::pair<int, int>> pairs;
    bool hierarchy = false;
};

/// A basis whose knots have been pinned to data: interior knots at equally
/// spaced quantiles, boundary knots at the observed min/max. Evaluation
/// anywhere inside the boundary reproduces training columns bit-identically;
/// outside, columns are extended linearly from the boundary.
struct FittedBasis {
    BasisKind kind = BasisKind::NaturalCubic;
    int df = 0;
    double lo = 0.0;
    double hi = 1.0;
    std::vector<double> interior_knots;
    /// (K+4) x df map from raw clamped cubic B-spline values to output
    /// columns (natural constraint + intercept-column drop baked in).
    Matrix transform;
};

/// Raw clamped cubic B-spline basis on the given knots, K+4 columns,
/// evaluated by the Cox-de Boor recurrence. Columns form a partition of
/// unity on [lo, hi]. Exposed for the unconstrained-basis path and tests.
Matrix bspline_raw(const Vector& x, double lo, double hi,
                   const std::vector<double>& interior_knots);

/// Chooses knots from data and builds the constraint transform.
/// Throws TooFewDistinctValues when x has fewer than df+1 distinct values
/// or the quantile knots collide.
FittedBasis fit_basis(const Vector& x, const BasisSpec& spec);

/// n x df basis matrix. Points outside [lo, hi] are extended linearly from
/// the boundary; `extrapolated` (when given) reports whether that happened.
Matrix eval_basis(const FittedBasis& basis, const Vector& x,
                  bool* extrapolated = nullptr);

/// fit_basis + eval_basis on the same data.
Matrix spline_basis(const Vector& x, const BasisSpec& spec);

/// A fitted additive-model design: per-covariate spline groups, optional
/// tensor-product interaction groups residualized against their parent main
/// effects, and everything required to rebuild columns for new data.
struct GamModel {
    std::vector<std::string> names;
    BasisSpec main_spec;
    InteractionSpec ispec;
    bool has_interactions = false;

    std::vector<FittedBasis> main_bases;         ///< one per covariate
    std::vector<FittedBasis> inter_bases;        ///< d_star-sized, per covariate
    std::vector<std::pair<int, int>> pairs;      ///< lexicographic (k,l)
    /// Least-squares coefficients of each pair's tensor block on
    /// [ortho main_k, ortho main_l, 1]; reproduces the residualization.
    std::vector<Matrix> resid_coefs;

    PreparedDesign prep;                         ///< centered + orthonormalized

    int num_covariates() const { return static_cast<int>(main_bases.size()); }
};

/// Main-effects design: one group of df columns per covariate, centered and
/// orthonormalized. Group ids carry the covariate names. Pass an empty y to
/// build the design matrices only.
GamModel build_main_design(const Matrix& X_raw, const Vector& y, const BasisSpec& spec,
                           std::vector<std::string> names = {});

/// Main effects plus interaction groups. Each pair's n x d_star^2 tensor
/// block is replaced by its residual against [main_k, main_l, intercept]
/// before orthonormalization, keeping interactions identifiable. With
/// ispec.hierarchy the pair group instead carries
/// [basis_k, basis_l, residualized tensor] so selecting it brings the main
/// effect columns along.
GamModel build_gam_design(const Matrix& X_raw, const Vector& y, const BasisSpec& spec,
                          const InteractionSpec& ispec,
                          std::vector<std::string> names = {});

/// Reproduces the raw (pre-centering) design columns for new covariate rows.
Matrix raw_design_columns(const GamModel& model, const Matrix& X_new,
                          bool* extrapolated = nullptr);

/// Full prediction: intercept + raw columns . beta_original.
Vector predict(const GamModel& model, const SsglFit& fit, const Matrix& X_new);

struct EffectCurve {
    Vector grid;
    Vector effect;
    bool extrapolated = false;
};

/// Centered component effect of one covariate evaluated on a grid.
EffectCurve predict_effect(const GamModel& model, const SsglFit& fit,
                           int covariate, const Vector& grid);

} // namespace ssgl
