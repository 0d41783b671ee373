#include "ssgl/grouped_design.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <cmath>
#include <utility>

namespace ssgl {

void GroupedDesign::finalize() {
    long total = 0;
    offsets_.clear();
    offsets_.reserve(groups.size());
    for (const auto& g : groups) {
        if (g.size < 1) throw InvalidArgument("group '" + g.id + "' has size < 1");
        offsets_.push_back(total);
        total += g.size;
    }
    if (total != X.cols()) {
        throw DimensionMismatch("group sizes sum to " + std::to_string(total) +
                                " but X has " + std::to_string(X.cols()) + " columns");
    }
    if (y.size() != X.rows()) {
        throw DimensionMismatch("y has length " + std::to_string(y.size()) +
                                " but X has " + std::to_string(X.rows()) + " rows");
    }
}

GroupedDesign make_design(Vector y, Matrix X, const std::vector<int>& sizes,
                          std::vector<std::string> ids, std::vector<bool> penalized) {
    GroupedDesign d;
    d.y = std::move(y);
    d.X = std::move(X);
    d.groups.reserve(sizes.size());
    for (std::size_t g = 0; g < sizes.size(); ++g) {
        GroupSpec spec;
        spec.size = sizes[g];
        spec.id = g < ids.size() ? ids[g] : "g" + std::to_string(g + 1);
        spec.penalized = g < penalized.size() ? static_cast<bool>(penalized[g]) : true;
        spec.scale = std::sqrt(static_cast<double>(sizes[g]));
        d.groups.push_back(std::move(spec));
    }
    d.finalize();
    return d;
}

GroupedDesign center(const GroupedDesign& design) {
    GroupedDesign out = design;
    out.y_mean = design.y.mean();
    out.y = design.y.array() - out.y_mean;
    out.col_means = design.X.colwise().mean();
    out.X = design.X.rowwise() - out.col_means.transpose();
    out.centered = true;
    out.finalize();
    return out;
}

std::pair<GroupedDesign, std::vector<OrthoTransform>>
orthonormalize(const GroupedDesign& design) {
    const long n = design.n();
    const double sqrt_n = std::sqrt(static_cast<double>(n));

    GroupedDesign out = design;
    std::vector<OrthoTransform> transforms;
    transforms.reserve(design.groups.size());

    for (int g = 0; g < design.num_groups(); ++g) {
        const int m = design.groups[g].size;
        if (n <= m) throw SampleTooSmall(design.groups[g].id, n, m);

        const auto block = design.group_block(g);
        Eigen::HouseholderQR<Matrix> qr(block);
        Matrix Q = qr.householderQ() * Matrix::Identity(n, m);
        Matrix R = qr.matrixQR().topRows(m).triangularView<Eigen::Upper>();

        // fix signs so a block already satisfying X^T X = nI gets T = I
        for (int j = 0; j < m; ++j) {
            if (R(j, j) < 0.0) {
                R.row(j) = -R.row(j);
                Q.col(j) = -Q.col(j);
            }
        }

        // rank decided on singular values of R (same as those of the block)
        Eigen::JacobiSVD<Matrix> svd(R);
        const auto& sv = svd.singularValues();
        int rank = 0;
        for (int j = 0; j < m; ++j) {
            if (sv(j) >= 1e-10 * sv(0)) ++rank;
        }
        if (rank < m) throw RankDeficientGroup(design.groups[g].id, rank, m);

        OrthoTransform t;
        t.rank = rank;
        // X_ortho = sqrt(n) Q = X R^{-1} sqrt(n)
        t.T = sqrt_n * R.triangularView<Eigen::Upper>().solve(Matrix::Identity(m, m));
        t.T_inv = R / sqrt_n;
        out.X.block(0, design.offset(g), n, m) = sqrt_n * Q;
        transforms.push_back(std::move(t));
    }
    out.orthonormalized = true;
    out.finalize();
    return {std::move(out), std::move(transforms)};
}

Vector back_transform(const Vector& beta_ortho, const std::vector<GroupSpec>& groups,
                      const std::vector<OrthoTransform>& transforms) {
    if (groups.size() != transforms.size()) {
        throw DimensionMismatch("groups/transforms count mismatch");
    }
    long p = 0;
    for (const auto& g : groups) p += g.size;
    if (beta_ortho.size() != p) {
        throw DimensionMismatch("coefficient vector length " +
                                std::to_string(beta_ortho.size()) + " != p = " +
                                std::to_string(p));
    }
    Vector out(p);
    long off = 0;
    for (std::size_t g = 0; g < groups.size(); ++g) {
        const int m = groups[g].size;
        const auto seg = beta_ortho.segment(off, m);
        if (seg.isZero(0.0)) {
            out.segment(off, m).setZero();
        } else {
            out.segment(off, m) = transforms[g].T * seg;
        }
        off += m;
    }
    return out;
}

Vector forward_transform(const Vector& beta_original, const std::vector<GroupSpec>& groups,
                         const std::vector<OrthoTransform>& transforms) {
    if (groups.size() != transforms.size()) {
        throw DimensionMismatch("groups/transforms count mismatch");
    }
    long p = 0;
    for (const auto& g : groups) p += g.size;
    if (beta_original.size() != p) {
        throw DimensionMismatch("coefficient vector length mismatch");
    }
    Vector out(p);
    long off = 0;
    for (std::size_t g = 0; g < groups.size(); ++g) {
        const int m = groups[g].size;
        out.segment(off, m) = transforms[g].T_inv * beta_original.segment(off, m);
        off += m;
    }
    return out;
}

PreparedDesign prepare(const GroupedDesign& raw) {
    PreparedDesign prep;
    GroupedDesign centered_design = center(raw);
    prep.y_mean = centered_design.y_mean;
    prep.col_means = centered_design.col_means;
    auto [ortho, transforms] = orthonormalize(centered_design);
    prep.design = std::move(ortho);
    prep.transforms = std::move(transforms);
    return prep;
}

double intercept_for(const PreparedDesign& prep, const Vector& beta_original) {
    return prep.y_mean - prep.col_means.dot(beta_original);
}

} // namespace ssgl
