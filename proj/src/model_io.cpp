#include "ssgl/model_io.hpp"

#include <fstream>

#include <json.hpp>

namespace ssgl {

using nlohmann::json;

namespace {

json vec_to_json(const Vector& v) {
    json out = json::array();
    for (long i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

Vector vec_from_json(const json& j) {
    Vector v(static_cast<long>(j.size()));
    for (long i = 0; i < v.size(); ++i) v(i) = j[i].get<double>();
    return v;
}

json mat_to_json(const Matrix& m) {
    json out = json::array();
    for (long i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (long j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        out.push_back(std::move(row));
    }
    return out;
}

Matrix mat_from_json(const json& j) {
    const long rows = static_cast<long>(j.size());
    const long cols = rows > 0 ? static_cast<long>(j[0].size()) : 0;
    Matrix m(rows, cols);
    for (long i = 0; i < rows; ++i) {
        for (long c = 0; c < cols; ++c) m(i, c) = j[i][c].get<double>();
    }
    return m;
}

json basis_to_json(const FittedBasis& b) {
    return json{{"kind", b.kind == BasisKind::NaturalCubic ? "natural" : "bspline"},
                {"df", b.df},
                {"lo", b.lo},
                {"hi", b.hi},
                {"interior_knots", b.interior_knots},
                {"transform", mat_to_json(b.transform)}};
}

FittedBasis basis_from_json(const json& j) {
    FittedBasis b;
    b.kind = j.at("kind") == "natural" ? BasisKind::NaturalCubic : BasisKind::BSpline;
    b.df = j.at("df").get<int>();
    b.lo = j.at("lo").get<double>();
    b.hi = j.at("hi").get<double>();
    b.interior_knots = j.at("interior_knots").get<std::vector<double>>();
    b.transform = mat_from_json(j.at("transform"));
    return b;
}

json fit_to_json(const SsglFit& fit) {
    return json{{"lambda0", fit.lambda0},
                {"intercept", fit.intercept},
                {"sigma2", fit.sigma2},
                {"theta", fit.theta},
                {"iterations", fit.iterations},
                {"converged", fit.converged},
                {"sigma_clamped", fit.sigma_clamped},
                {"generalized_dimension", fit.generalized_dimension},
                {"selected_groups", fit.selected_groups},
                {"beta_original", vec_to_json(fit.beta_original)},
                {"beta_ortho", vec_to_json(fit.beta_ortho)}};
}

SsglFit fit_from_json(const json& j) {
    SsglFit fit;
    fit.lambda0 = j.at("lambda0").get<double>();
    fit.intercept = j.at("intercept").get<double>();
    fit.sigma2 = j.at("sigma2").get<double>();
    fit.theta = j.at("theta").get<double>();
    fit.iterations = j.at("iterations").get<long>();
    fit.converged = j.at("converged").get<bool>();
    fit.sigma_clamped = j.at("sigma_clamped").get<bool>();
    fit.generalized_dimension = j.at("generalized_dimension").get<int>();
    fit.selected_groups = j.at("selected_groups").get<std::vector<int>>();
    fit.beta_original = vec_from_json(j.at("beta_original"));
    fit.beta_ortho = vec_from_json(j.at("beta_ortho"));
    return fit;
}

} // namespace

std::uint64_t fnv1a_hash(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

Vector ModelArtifact::predict_linear(const Matrix& rows) const {
    if (rows.cols() != fit.beta_original.size()) {
        throw DimensionMismatch("predict: column count mismatch");
    }
    return (rows * fit.beta_original).array() + fit.intercept;
}

ModelArtifact::TraceEntry trace_entry(const SsglFit& fit) {
    ModelArtifact::TraceEntry e;
    e.lambda0 = fit.lambda0;
    e.iterations = fit.iterations;
    e.converged = fit.converged;
    e.selected = static_cast<long>(fit.selected_groups.size());
    e.sigma2 = fit.sigma2;
    e.theta = fit.theta;
    return e;
}

void save_model(const std::string& path, const ModelArtifact& artifact,
                const std::string& config_echo_json) {
    json j;
    j["schema_version"] = artifact.schema_version;
    j["kind"] = artifact.kind;
    j["seed"] = artifact.seed;
    j["config"] = config_echo_json.empty() ? json::object() : json::parse(config_echo_json);
    j["config_hash"] = artifact.config_hash;
    j["fit"] = fit_to_json(artifact.fit);
    j["y_mean"] = artifact.y_mean;
    j["col_means"] = vec_to_json(artifact.col_means);
    j["feature_columns"] = artifact.feature_columns;

    json groups = json::array();
    for (const auto& g : artifact.groups) {
        groups.push_back(json{{"id", g.id},
                              {"size", g.size},
                              {"penalized", g.penalized},
                              {"scale", g.scale}});
    }
    j["groups"] = std::move(groups);

    json transforms = json::array();
    for (const auto& t : artifact.transforms) transforms.push_back(mat_to_json(t.T));
    j["transforms"] = std::move(transforms);

    json trace = json::array();
    for (const auto& e : artifact.trace) {
        trace.push_back(json{{"lambda0", e.lambda0},
                             {"iterations", e.iterations},
                             {"converged", e.converged},
                             {"selected", e.selected},
                             {"sigma2", e.sigma2},
                             {"theta", e.theta}});
    }
    j["ladder_trace"] = std::move(trace);

    if (artifact.gam.has_value()) {
        const GamModel& g = *artifact.gam;
        json gj;
        gj["names"] = g.names;
        gj["main_df"] = g.main_spec.df;
        gj["main_kind"] = g.main_spec.kind == BasisKind::NaturalCubic ? "natural" : "bspline";
        gj["has_interactions"] = g.has_interactions;
        gj["d_star"] = g.ispec.d_star;
        gj["hierarchy"] = g.ispec.hierarchy;
        json pairs = json::array();
        for (const auto& [k, l] : g.pairs) pairs.push_back(json::array({k, l}));
        gj["pairs"] = std::move(pairs);
        json mains = json::array();
        for (const auto& b : g.main_bases) mains.push_back(basis_to_json(b));
        gj["main_bases"] = std::move(mains);
        json inters = json::array();
        for (const auto& b : g.inter_bases) inters.push_back(basis_to_json(b));
        gj["inter_bases"] = std::move(inters);
        json coefs = json::array();
        for (const auto& m : g.resid_coefs) coefs.push_back(mat_to_json(m));
        gj["resid_coefs"] = std::move(coefs);
        j["gam"] = std::move(gj);
    }

    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    out << j.dump(1) << "\n";
}

ModelArtifact load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw Error("bad model file " + path + ": " + e.what());
    }

    ModelArtifact artifact;
    artifact.schema_version = j.at("schema_version").get<int>();
    if (artifact.schema_version != 1) {
        throw Error("unsupported model schema version " +
                    std::to_string(artifact.schema_version));
    }
    artifact.kind = j.at("kind").get<std::string>();
    artifact.seed = j.at("seed").get<std::uint64_t>();
    artifact.config_hash = j.at("config_hash").get<std::string>();
    artifact.fit = fit_from_json(j.at("fit"));
    artifact.y_mean = j.at("y_mean").get<double>();
    artifact.col_means = vec_from_json(j.at("col_means"));
    artifact.feature_columns = j.at("feature_columns").get<std::vector<std::string>>();

    for (const auto& gj : j.at("groups")) {
        GroupSpec g;
        g.id = gj.at("id").get<std::string>();
        g.size = gj.at("size").get<int>();
        g.penalized = gj.at("penalized").get<bool>();
        g.scale = gj.at("scale").get<double>();
        artifact.groups.push_back(std::move(g));
    }
    for (const auto& tj : j.at("transforms")) {
        OrthoTransform t;
        t.T = mat_from_json(tj);
        t.T_inv = t.T.inverse();
        t.rank = static_cast<int>(t.T.rows());
        artifact.transforms.push_back(std::move(t));
    }
    for (const auto& ej : j.at("ladder_trace")) {
        ModelArtifact::TraceEntry e;
        e.lambda0 = ej.at("lambda0").get<double>();
        e.iterations = ej.at("iterations").get<long>();
        e.converged = ej.at("converged").get<bool>();
        e.selected = ej.at("selected").get<long>();
        e.sigma2 = ej.at("sigma2").get<double>();
        e.theta = ej.at("theta").get<double>();
        artifact.trace.push_back(e);
    }

    if (j.contains("gam")) {
        const json& gj = j.at("gam");
        GamModel g;
        g.names = gj.at("names").get<std::vector<std::string>>();
        g.main_spec.df = gj.at("main_df").get<int>();
        g.main_spec.kind =
            gj.at("main_kind") == "natural" ? BasisKind::NaturalCubic : BasisKind::BSpline;
        g.has_interactions = gj.at("has_interactions").get<bool>();
        g.ispec.d_star = gj.at("d_star").get<int>();
        g.ispec.hierarchy = gj.at("hierarchy").get<bool>();
        for (const auto& pj : gj.at("pairs")) {
            g.pairs.emplace_back(pj[0].get<int>(), pj[1].get<int>());
        }
        for (const auto& bj : gj.at("main_bases")) g.main_bases.push_back(basis_from_json(bj));
        for (const auto& bj : gj.at("inter_bases")) g.inter_bases.push_back(basis_from_json(bj));
        for (const auto& mj : gj.at("resid_coefs")) g.resid_coefs.push_back(mat_from_json(mj));

        // stub design carrying shape and group metadata only
        long p = 0;
        std::vector<int> sizes;
        std::vector<std::string> ids;
        std::vector<bool> penalized;
        for (const auto& spec : artifact.groups) {
            p += spec.size;
            sizes.push_back(spec.size);
            ids.push_back(spec.id);
            penalized.push_back(spec.penalized);
        }
        g.prep.design = make_design(Vector::Zero(0), Matrix::Zero(0, p), sizes, ids, penalized);
        g.prep.design.groups = artifact.groups;
        g.prep.col_means = artifact.col_means;
        g.prep.y_mean = artifact.y_mean;
        g.prep.transforms = artifact.transforms;
        artifact.gam = std::move(g);
    }
    return artifact;
}

} // namespace ssgl
