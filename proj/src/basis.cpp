#include "ssgl/basis.hpp"

#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <set>

namespace ssgl {

namespace {

std::vector<double> clamped_knots(double lo, double hi,
                                  const std::vector<double>& interior) {
    std::vector<double> t;
    t.reserve(interior.size() + 8);
    for (int i = 0; i < 4; ++i) t.push_back(lo);
    t.insert(t.end(), interior.begin(), interior.end());
    for (int i = 0; i < 4; ++i) t.push_back(hi);
    return t;
}

// All order-`order` B-spline values at x into `out`, sized t.size() - order.
// Cox-de Boor recurrence with the 0/0 -> 0 convention; x must lie inside
// [t.front(), t.back()]. The right boundary belongs to the last nonempty span.
void cox_de_boor(const std::vector<double>& t, double x, int order,
                 std::vector<double>& out) {
    const int nk = static_cast<int>(t.size());
    std::vector<double> cur(nk - 1, 0.0);
    int span = -1;
    for (int j = nk - 2; j >= 0; --j) {
        if (t[j] < t[j + 1] && x >= t[j] && x <= t[j + 1]) {
            span = j;
            if (x < t[j + 1] || x == t.back()) break;
        }
    }
    if (span >= 0) cur[span] = 1.0;
    for (int r = 2; r <= order; ++r) {
        std::vector<double> next(nk - r, 0.0);
        for (int j = 0; j + r < nk; ++j) {
            double v = 0.0;
            const double d1 = t[j + r - 1] - t[j];
            if (d1 > 0.0) v += (x - t[j]) / d1 * cur[j];
            const double d2 = t[j + r] - t[j + 1];
            if (d2 > 0.0) v += (t[j + r] - x) / d2 * cur[j + 1];
            next[j] = v;
        }
        cur.swap(next);
    }
    out = cur;
}

// Value, first and second derivative rows of all cubic B-splines at x.
void cubic_rows(const std::vector<double>& t, double x, std::vector<double>& val,
                std::vector<double>& d1, std::vector<double>& d2) {
    const int nb = static_cast<int>(t.size()) - 4;
    std::vector<double> n2, n3;
    cox_de_boor(t, x, 2, n2);
    cox_de_boor(t, x, 3, n3);
    cox_de_boor(t, x, 4, val);

    auto ratio = [&](const std::vector<double>& lower, int j, int span) {
        const double d = t[j + span] - t[j];
        return d > 0.0 ? lower[j] / d : 0.0;
    };

    d1.assign(nb, 0.0);
    d2.assign(nb, 0.0);
    std::vector<double> n3d(nb + 1, 0.0);
    for (int j = 0; j < nb + 1; ++j) {
        n3d[j] = 2.0 * (ratio(n2, j, 2) - ratio(n2, j + 1, 2));
    }
    for (int j = 0; j < nb; ++j) {
        d1[j] = 3.0 * (ratio(n3, j, 3) - ratio(n3, j + 1, 3));
        const double a = t[j + 3] - t[j];
        const double b = t[j + 4] - t[j + 1];
        d2[j] = 3.0 * ((a > 0.0 ? n3d[j] / a : 0.0) - (b > 0.0 ? n3d[j + 1] / b : 0.0));
    }
}

// type-7 quantile of sorted values
double quantile_sorted(const std::vector<double>& sorted, double q) {
    const double h = (static_cast<double>(sorted.size()) - 1.0) * q;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

} // namespace

Matrix bspline_raw(const Vector& x, double lo, double hi,
                   const std::vector<double>& interior_knots) {
    const auto t = clamped_knots(lo, hi, interior_knots);
    const int nb = static_cast<int>(t.size()) - 4;
    Matrix out(x.size(), nb);
    std::vector<double> val;
    for (long i = 0; i < x.size(); ++i) {
        const double xi = std::clamp(x(i), lo, hi);
        cox_de_boor(t, xi, 4, val);
        for (int j = 0; j < nb; ++j) out(i, j) = val[j];
    }
    return out;
}

FittedBasis fit_basis(const Vector& x, const BasisSpec& spec) {
    if (spec.df < 1) throw InvalidArgument("basis df must be >= 1");
    if (spec.kind == BasisKind::BSpline && spec.df < 3) {
        throw InvalidArgument("unconstrained cubic B-spline basis needs df >= 3");
    }
    std::vector<double> sorted(x.data(), x.data() + x.size());
    std::sort(sorted.begin(), sorted.end());
    long distinct = sorted.empty() ? 0 : 1;
    for (std::size_t i = 1; i < sorted.size(); ++i) {
        if (sorted[i] != sorted[i - 1]) ++distinct;
    }
    if (distinct < spec.df + 1) {
        throw TooFewDistinctValues("need at least df+1 = " + std::to_string(spec.df + 1) +
                                   " distinct values, found " + std::to_string(distinct));
    }

    FittedBasis fb;
    fb.kind = spec.kind;
    fb.df = spec.df;
    fb.lo = sorted.front();
    fb.hi = sorted.back();

    const int n_interior =
        spec.kind == BasisKind::NaturalCubic ? spec.df - 1 : spec.df - 3;
    for (int i = 1; i <= n_interior; ++i) {
        fb.interior_knots.push_back(
            quantile_sorted(sorted, static_cast<double>(i) / (n_interior + 1)));
    }
    double prev = fb.lo;
    for (double k : fb.interior_knots) {
        if (!(k > prev)) throw TooFewDistinctValues("quantile knots collide");
        prev = k;
    }
    if (!(fb.hi > prev)) throw TooFewDistinctValues("quantile knots collide");

    const auto t = clamped_knots(fb.lo, fb.hi, fb.interior_knots);
    const int nb = static_cast<int>(t.size()) - 4;

    if (spec.kind == BasisKind::BSpline) {
        // drop the first column; the rest plus an intercept span the space
        fb.transform = Matrix::Zero(nb, spec.df);
        fb.transform.bottomRows(nb - 1) = Matrix::Identity(nb - 1, nb - 1);
        return fb;
    }

    // natural constraint: zero second derivative at both boundaries
    std::vector<double> val, d1, d2lo, d2hi;
    cubic_rows(t, fb.lo, val, d1, d2lo);
    cubic_rows(t, fb.hi, val, d1, d2hi);
    Matrix constraint(nb, 2);
    for (int j = 0; j < nb; ++j) {
        constraint(j, 0) = d2lo[j];
        constraint(j, 1) = d2hi[j];
    }
    Eigen::HouseholderQR<Matrix> qr(constraint);
    Matrix Q = qr.householderQ();            // nb x nb
    Matrix null_space = Q.rightCols(nb - 2); // spans the natural spline space
    fb.transform = null_space.rightCols(spec.df); // drop one column: intercept handled by centering
    return fb;
}

Matrix eval_basis(const FittedBasis& fb, const Vector& x, bool* extrapolated) {
    const auto t = clamped_knots(fb.lo, fb.hi, fb.interior_knots);
    const int nb = static_cast<int>(t.size()) - 4;
    Matrix out(x.size(), fb.df);
    bool extra = false;

    std::vector<double> val, d1, d2;
    Eigen::RowVectorXd row(nb), drow(nb);
    for (long i = 0; i < x.size(); ++i) {
        const double xi = x(i);
        double boundary = xi;
        if (xi < fb.lo) { boundary = fb.lo; extra = true; }
        if (xi > fb.hi) { boundary = fb.hi; extra = true; }
        cubic_rows(t, boundary, val, d1, d2);
        for (int j = 0; j < nb; ++j) row(j) = val[j];
        if (boundary != xi) {
            for (int j = 0; j < nb; ++j) drow(j) = d1[j];
            out.row(i) = (row + (xi - boundary) * drow) * fb.transform;
        } else {
            out.row(i) = row * fb.transform;
        }
    }
    if (extrapolated != nullptr) *extrapolated = extra;
    return out;
}

Matrix spline_basis(const Vector& x, const BasisSpec& spec) {
    return eval_basis(fit_basis(x, spec), x);
}

namespace {

std::vector<std::string> default_names(long p, std::vector<std::string> names) {
    if (names.empty()) {
        for (long j = 0; j < p; ++j) names.push_back("x" + std::to_string(j + 1));
    }
    if (static_cast<long>(names.size()) != p) {
        throw DimensionMismatch("covariate name count mismatch");
    }
    return names;
}

GamModel build_impl(const Matrix& X_raw, const Vector& y, const BasisSpec& spec,
                    const InteractionSpec& ispec, bool with_interactions,
                    std::vector<std::string> names) {
    const long n = X_raw.rows();
    const long p_cov = X_raw.cols();
    Vector response = y.size() == 0 ? Vector::Zero(n) : y;
    if (response.size() != n) throw DimensionMismatch("response length mismatch");

    GamModel model;
    model.names = default_names(p_cov, std::move(names));
    model.main_spec = spec;
    model.ispec = ispec;
    model.has_interactions = with_interactions;

    Matrix main_cols(n, p_cov * spec.df);
    std::vector<int> sizes;
    std::vector<std::string> ids;
    for (long j = 0; j < p_cov; ++j) {
        model.main_bases.push_back(fit_basis(X_raw.col(j), spec));
        main_cols.block(0, j * spec.df, n, spec.df) =
            eval_basis(model.main_bases.back(), X_raw.col(j));
        sizes.push_back(spec.df);
        ids.push_back(model.names[j]);
    }

    if (!with_interactions) {
        model.ispec.pairs.clear();
        GroupedDesign design = make_design(response, std::move(main_cols), sizes, ids);
        model.prep = prepare(design);
        return model;
    }

    if (ispec.d_star < 1) throw InvalidArgument("d_star must be >= 1");
    model.pairs = ispec.pairs;
    if (model.pairs.empty()) {
        for (int k = 0; k < p_cov; ++k) {
            for (int l = k + 1; l < p_cov; ++l) model.pairs.emplace_back(k, l);
        }
    } else {
        for (auto& [k, l] : model.pairs) {
            if (k > l) std::swap(k, l);
            if (k < 0 || l >= p_cov || k == l) throw InvalidArgument("bad interaction pair");
        }
        std::sort(model.pairs.begin(), model.pairs.end());
    }

    BasisSpec inter_spec = spec;
    inter_spec.df = ispec.d_star;
    model.inter_bases.reserve(p_cov);
    std::vector<Matrix> inter_eval(p_cov);
    for (long j = 0; j < p_cov; ++j) {
        model.inter_bases.push_back(fit_basis(X_raw.col(j), inter_spec));
        inter_eval[j] = eval_basis(model.inter_bases.back(), X_raw.col(j));
    }

    // interactions must end up orthogonal to the main blocks as fitted
    GroupedDesign main_design = make_design(response, main_cols, sizes, ids);
    PreparedDesign main_prep = prepare(main_design);

    const int ds = ispec.d_star;
    const int tensor_width = ds * ds;
    const int group_width = ispec.hierarchy ? 2 * ds + tensor_width : tensor_width;
    Matrix inter_cols(n, static_cast<long>(model.pairs.size()) * group_width);

    model.resid_coefs.reserve(model.pairs.size());
    long col = 0;
    for (const auto& [k, l] : model.pairs) {
        Matrix tensor(n, tensor_width);
        for (int s = 0; s < ds; ++s) {
            for (int r = 0; r < ds; ++r) {
                tensor.col(s * ds + r) =
                    inter_eval[k].col(s).cwiseProduct(inter_eval[l].col(r));
            }
        }
        Matrix A(n, 2 * spec.df + 1);
        A.leftCols(spec.df) = main_prep.design.group_block(k);
        A.middleCols(spec.df, spec.df) = main_prep.design.group_block(l);
        A.col(2 * spec.df).setOnes();
        Matrix coef = A.colPivHouseholderQr().solve(tensor);
        model.resid_coefs.push_back(coef);
        Matrix resid = tensor - A * coef;

        if (ispec.hierarchy) {
            inter_cols.block(0, col, n, ds) = inter_eval[k];
            inter_cols.block(0, col + ds, n, ds) = inter_eval[l];
            inter_cols.block(0, col + 2 * ds, n, tensor_width) = resid;
        } else {
            inter_cols.block(0, col, n, tensor_width) = resid;
        }
        sizes.push_back(group_width);
        ids.push_back(model.names[k] + ":" + model.names[l]);
        col += group_width;
    }

    Matrix all_cols(n, main_cols.cols() + inter_cols.cols());
    all_cols.leftCols(main_cols.cols()) = main_cols;
    all_cols.rightCols(inter_cols.cols()) = inter_cols;
    GroupedDesign design = make_design(response, std::move(all_cols), sizes, ids);
    model.prep = prepare(design);
    return model;
}

} // namespace

GamModel build_main_design(const Matrix& X_raw, const Vector& y, const BasisSpec& spec,
                           std::vector<std::string> names) {
    return build_impl(X_raw, y, spec, InteractionSpec{}, false, std::move(names));
}

GamModel build_gam_design(const Matrix& X_raw, const Vector& y, const BasisSpec& spec,
                          const InteractionSpec& ispec,
                          std::vector<std::string> names) {
    return build_impl(X_raw, y, spec, ispec, true, std::move(names));
}

Matrix raw_design_columns(const GamModel& model, const Matrix& X_new,
                          bool* extrapolated) {
    const long n = X_new.rows();
    if (X_new.cols() != model.num_covariates()) {
        throw DimensionMismatch("covariate count mismatch");
    }
    const int df = model.main_spec.df;
    bool extra = false;

    Matrix out(n, model.prep.design.p());
    std::vector<Matrix> main_eval(model.num_covariates());
    for (int j = 0; j < model.num_covariates(); ++j) {
        bool e = false;
        main_eval[j] = eval_basis(model.main_bases[j], X_new.col(j), &e);
        extra = extra || e;
        out.block(0, static_cast<long>(j) * df, n, df) = main_eval[j];
    }

    if (model.has_interactions) {
        const int ds = model.ispec.d_star;
        const int tensor_width = ds * ds;
        const int group_width =
            model.ispec.hierarchy ? 2 * ds + tensor_width : tensor_width;
        std::vector<Matrix> inter_eval(model.num_covariates());
        std::set<int> used;
        for (const auto& [k, l] : model.pairs) {
            used.insert(k);
            used.insert(l);
        }
        for (int j : used) {
            bool e = false;
            inter_eval[j] = eval_basis(model.inter_bases[j], X_new.col(j), &e);
            extra = extra || e;
        }
        long col = static_cast<long>(model.num_covariates()) * df;
        for (std::size_t pi = 0; pi < model.pairs.size(); ++pi) {
            const auto [k, l] = model.pairs[pi];
            Matrix tensor(n, tensor_width);
            for (int s = 0; s < ds; ++s) {
                for (int r = 0; r < ds; ++r) {
                    tensor.col(s * ds + r) =
                        inter_eval[k].col(s).cwiseProduct(inter_eval[l].col(r));
                }
            }
            // reproduce the training-time projection target (ortho main blocks)
            Matrix A(n, 2 * df + 1);
            A.leftCols(df) =
                (main_eval[k].rowwise() -
                 model.prep.col_means.segment(static_cast<long>(k) * df, df).transpose()) *
                model.prep.transforms[k].T;
            A.middleCols(df, df) =
                (main_eval[l].rowwise() -
                 model.prep.col_means.segment(static_cast<long>(l) * df, df).transpose()) *
                model.prep.transforms[l].T;
            A.col(2 * df).setOnes();
            Matrix resid = tensor - A * model.resid_coefs[pi];
            if (model.ispec.hierarchy) {
                out.block(0, col, n, ds) = inter_eval[k];
                out.block(0, col + ds, n, ds) = inter_eval[l];
                out.block(0, col + 2 * ds, n, tensor_width) = resid;
            } else {
                out.block(0, col, n, tensor_width) = resid;
            }
            col += group_width;
        }
    }
    if (extrapolated != nullptr) *extrapolated = extra;
    return out;
}

Vector predict(const GamModel& model, const SsglFit& fit, const Matrix& X_new) {
    const Matrix cols = raw_design_columns(model, X_new);
    return (cols * fit.beta_original).array() + fit.intercept;
}

EffectCurve predict_effect(const GamModel& model, const SsglFit& fit,
                           int covariate, const Vector& grid) {
    if (covariate < 0 || covariate >= model.num_covariates()) {
        throw InvalidArgument("covariate index out of range");
    }
    const int df = model.main_spec.df;
    EffectCurve curve;
    curve.grid = grid;
    Matrix basis = eval_basis(model.main_bases[covariate], grid, &curve.extrapolated);
    basis.rowwise() -=
        model.prep.col_means.segment(static_cast<long>(covariate) * df, df).transpose();
    curve.effect = basis * fit.beta_original.segment(static_cast<long>(covariate) * df, df);
    return curve;
}

} // namespace ssgl
