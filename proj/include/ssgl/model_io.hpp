#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "ssgl/basis.hpp"
#include "ssgl/grouped_design.hpp"
#include "ssgl/solver.hpp"

namespace ssgl {

/// Everything a saved model needs to reproduce predictions: the chosen fit,
/// group metadata, centering statistics and transforms, and (for spline
/// models) the fitted bases. Design matrices are not stored.
struct ModelArtifact {
    int schema_version = 1;
    std::string kind;         ///< "linear" | "gam" | "gam_interactions"
    std::uint64_t seed = 0;
    std::string config_hash;

    SsglFit fit;
    std::vector<GroupSpec> groups;
    /// CSV column names the model consumes, in design order (covariate names
    /// for spline models).
    std::vector<std::string> feature_columns;
    double y_mean = 0.0;
    Vector col_means;
    std::vector<OrthoTransform> transforms;

    /// per-ladder-entry summary
    struct TraceEntry {
        double lambda0 = 0.0;
        long iterations = 0;
        bool converged = false;
        long selected = 0;
        double sigma2 = 0.0;
        double theta = 0.0;
    };
    std::vector<TraceEntry> trace;

    std::optional<GamModel> gam; ///< with an empty design matrix stub

    /// intercept + rows . beta_original (linear kind only)
    Vector predict_linear(const Matrix& rows) const;
};

std::uint64_t fnv1a_hash(const std::string& text);

/// `config_echo_json` is the already-serialized run configuration, embedded
/// verbatim into the artifact for provenance.
void save_model(const std::string& path, const ModelArtifact& artifact,
                const std::string& config_echo_json);
ModelArtifact load_model(const std::string& path);

ModelArtifact::TraceEntry trace_entry(const SsglFit& fit);

} // namespace ssgl
