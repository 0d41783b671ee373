#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "ssgl/errors.hpp"

namespace ssgl {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// One block of columns treated as a unit by the prior.
struct GroupSpec {
    std::string id;
    int size = 1;          ///< m_g, width of the group's column block
    bool penalized = true; ///< unpenalized groups are fit pure-slab (no spike)
    /// Spike-rate multiplier; defaults to sqrt(m_g) so groups of different
    /// sizes receive comparable penalization.
    double scale = 1.0;
};

/// Per-group change of basis T_g with X_g^{ortho} = X_g T_g.
struct OrthoTransform {
    Matrix T;         ///< m_g x m_g, invertible
    Matrix T_inv;     ///< cached inverse (maps original-scale coefficients forward)
    int rank = 0;     ///< numerical rank found during factorization
};

/// Response plus a column-blocked design matrix with group metadata.
///
/// Blocks are stored contiguously in `X` in group order. Centering keeps the
/// removed means so predictions on the original scale can be reconstructed.
/// Instances are immutable once built and safe to share across threads.
struct GroupedDesign {
    Vector y;
    Matrix X;
    std::vector<GroupSpec> groups;

    double y_mean = 0.0;
    Vector col_means;       ///< empty until center() has run
    bool centered = false;
    bool orthonormalized = false;

    long n() const { return X.rows(); }
    long p() const { return X.cols(); }
    int num_groups() const { return static_cast<int>(groups.size()); }

    /// Start column of group g's block.
    long group_offset(int g) const {
        long off = 0;
        for (int i = 0; i < g; ++i) off += groups[i].size;
        return off;
    }

    Eigen::Block<const Matrix> group_block(int g) const {
        return X.block(0, offsets_[g], X.rows(), groups[g].size);
    }

    /// Validates the partition invariant and caches block offsets.
    void finalize();

    long offset(int g) const { return offsets_[g]; }

private:
    std::vector<long> offsets_;
};

/// Builds a design from raw inputs. `sizes` must sum to X.cols(); ids default
/// to g1, g2, ... and scale defaults to sqrt(m_g).
GroupedDesign make_design(Vector y, Matrix X, const std::vector<int>& sizes,
                          std::vector<std::string> ids = {},
                          std::vector<bool> penalized = {});

/// Removes the column means of X and the mean of y, recording both.
GroupedDesign center(const GroupedDesign& design);

/// Orthonormalizes every group block so that X_g^T X_g = n I, via per-group
/// thin QR with the R factor's diagonal made positive (an already-conforming
/// block therefore maps to the identity transform). Throws RankDeficientGroup
/// when a block's smallest singular value is below 1e-10 times its largest,
/// and SampleTooSmall when n <= m_g.
std::pair<GroupedDesign, std::vector<OrthoTransform>>
orthonormalize(const GroupedDesign& design);

/// Maps coefficients found on the orthonormalized scale back to the original
/// column scale; fitted values are invariant and zero groups stay zero.
Vector back_transform(const Vector& beta_ortho, const std::vector<GroupSpec>& groups,
                      const std::vector<OrthoTransform>& transforms);

/// Inverse of back_transform (original-scale coefficients -> ortho scale).
Vector forward_transform(const Vector& beta_original, const std::vector<GroupSpec>& groups,
                         const std::vector<OrthoTransform>& transforms);

/// A design ready for the solver: centered, orthonormalized, with everything
/// needed to express results on the original scale again.
struct PreparedDesign {
    GroupedDesign design;                   ///< centered + orthonormalized
    std::vector<OrthoTransform> transforms;
    double y_mean = 0.0;
    Vector col_means;
};

PreparedDesign prepare(const GroupedDesign& raw);

/// intercept = y_mean - col_means . beta_original
double intercept_for(const PreparedDesign& prep, const Vector& beta_original);

} // namespace ssgl
