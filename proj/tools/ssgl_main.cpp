#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numeric>
#include <set>

#include "ssgl/basis.hpp"
#include "ssgl/csv.hpp"
#include "ssgl/debias.hpp"
#include "ssgl/model_io.hpp"
#include "ssgl/model_selection.hpp"
#include "ssgl/sim.hpp"
#include "ssgl/solver.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace ssgl;

namespace {

struct RunConfig {
    std::string command;
    std::string data_path;
    std::string response = "y";
    std::string group_map_path;
    std::string model_path;
    std::string out_dir = ".";
    double ladder_max = 100.0;
    std::vector<double> ladder;           // explicit override
    double lambda1 = 1.0;
    std::vector<int> dfs = {2, 3, 4};
    int d_star = 2;
    bool hierarchy = false;
    int folds = 10;
    double alpha = 0.05;
    double lambda_j = -1.0;
    std::uint64_t seed = 1;
    bool use_cv = true;
    bool one_se = false;
    std::vector<std::string> unpenalized;
    int threads = 1;
    // simulate
    std::string scenario;
    long n = 100, p = 300, G = 100;
    double rho = 0.0;
    int replicates = 50;
    std::string method = "ssgl";

    std::vector<double> resolved_ladder() const {
        if (!ladder.empty()) return ladder;
        std::vector<double> out(static_cast<std::size_t>(ladder_max));
        std::iota(out.begin(), out.end(), 1.0);
        return out;
    }

    int resolved_threads() const {
        if (const char* env = std::getenv("SSGL_THREADS")) {
            return std::max(1, std::atoi(env));
        }
        return std::max(1, threads);
    }

    json echo() const {
        json j;
        j["command"] = command;
        j["data"] = data_path;
        j["response"] = response;
        j["group_map"] = group_map_path;
        j["model"] = model_path;
        j["out"] = out_dir;
        j["ladder"] = resolved_ladder();
        j["lambda1"] = lambda1;
        j["dfs"] = dfs;
        j["d_star"] = d_star;
        j["hierarchy"] = hierarchy;
        j["folds"] = folds;
        j["alpha"] = alpha;
        j["lambda_j"] = lambda_j;
        j["seed"] = seed;
        j["cv"] = use_cv;
        j["one_se"] = one_se;
        j["unpenalized"] = unpenalized;
        j["scenario"] = scenario;
        j["n"] = n;
        j["p"] = p;
        j["G"] = G;
        j["rho"] = rho;
        j["replicates"] = replicates;
        j["method"] = method;
        return j;
    }
};

struct LoadedData {
    Matrix X;
    Vector y;
    std::vector<std::string> feature_names;
};

LoadedData load_data(const RunConfig& rc, bool need_response = true) {
    CsvTable table = read_numeric_csv(rc.data_path);
    LoadedData data;
    long response_col = -1;
    if (need_response) response_col = table.column(rc.response);
    const long n = table.values.rows();
    const long p = table.values.cols() - (need_response ? 1 : 0);
    if (p < 1) throw InvalidArgument("no feature columns in " + rc.data_path);
    data.X = Matrix(n, p);
    long c = 0;
    for (long j = 0; j < table.values.cols(); ++j) {
        if (j == response_col) continue;
        data.feature_names.push_back(table.header[j]);
        data.X.col(c++) = table.values.col(j);
    }
    if (need_response) data.y = table.values.col(response_col);
    return data;
}

struct GroupLayout {
    std::vector<int> sizes;
    std::vector<std::string> ids;
    std::vector<bool> penalized;
};

// group assignment via the sidecar JSON map column-name -> group-id; columns
// without an entry form their own group
GroupLayout resolve_groups(const RunConfig& rc, const std::vector<std::string>& columns) {
    std::map<std::string, std::string> assignment;
    if (!rc.group_map_path.empty()) {
        std::ifstream in(rc.group_map_path);
        if (!in) throw InvalidArgument("cannot open group map " + rc.group_map_path);
        json j;
        try {
            in >> j;
        } catch (const json::exception& e) {
            throw InvalidArgument("bad group map: " + std::string(e.what()));
        }
        for (auto it = j.begin(); it != j.end(); ++it) {
            assignment[it.key()] = it.value().get<std::string>();
        }
    }
    GroupLayout layout;
    std::map<std::string, std::size_t> index;
    for (const auto& col : columns) {
        const auto it = assignment.find(col);
        const std::string id = it != assignment.end() ? it->second : col;
        const auto found = index.find(id);
        if (found == index.end()) {
            index[id] = layout.ids.size();
            layout.ids.push_back(id);
            layout.sizes.push_back(1);
        } else {
            if (found->second != layout.ids.size() - 1) {
                throw InvalidArgument("group '" + id + "' has non-contiguous columns");
            }
            layout.sizes.back() += 1;
        }
    }
    const std::set<std::string> unpen(rc.unpenalized.begin(), rc.unpenalized.end());
    for (const auto& id : layout.ids) {
        layout.penalized.push_back(unpen.find(id) == unpen.end());
    }
    return layout;
}

std::string hash_hex(const json& echo) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a_hash(echo.dump())));
    return buf;
}

std::vector<std::string> provenance(const RunConfig& rc) {
    return {"config_hash=" + hash_hex(rc.echo()), "seed=" + std::to_string(rc.seed)};
}

fs::path ensure_out(const RunConfig& rc) {
    fs::path dir(rc.out_dir);
    fs::create_directories(dir);
    return dir;
}

SsglConfig solver_config(const RunConfig& rc) {
    SsglConfig config;
    config.lambda0_ladder = rc.resolved_ladder();
    config.lambda1 = rc.lambda1;
    config.group_lasso_mode = rc.method == "grouplasso";
    return config;
}

void write_cv_outputs(const fs::path& dir, const RunConfig& rc, const CvResult& cv,
                      double lambda0, int df) {
    Matrix grid(static_cast<long>(cv.dfs.size() * cv.lambda0s.size()), 5);
    long r = 0;
    for (std::size_t d = 0; d < cv.dfs.size(); ++d) {
        for (std::size_t l = 0; l < cv.lambda0s.size(); ++l) {
            grid(r, 0) = cv.dfs[d];
            grid(r, 1) = cv.lambda0s[l];
            grid(r, 2) = cv.mean_error(d, l);
            grid(r, 3) = cv.se(d, l);
            grid(r, 4) = cv.valid_folds(d, l);
            ++r;
        }
    }
    write_csv((dir / "cv_grid.csv").string(), {"df", "lambda0", "mean_error", "se", "folds"},
              grid, provenance(rc));

    json sel;
    sel["config"] = rc.echo();
    sel["config_hash"] = hash_hex(rc.echo());
    sel["seed"] = rc.seed;
    sel["rule"] = rc.one_se ? "one_standard_error" : "min_error";
    sel["lambda0"] = lambda0;
    sel["df"] = df;
    const auto di = std::find(cv.dfs.begin(), cv.dfs.end(), df);
    const auto li = std::find(cv.lambda0s.begin(), cv.lambda0s.end(), lambda0);
    if (di != cv.dfs.end() && li != cv.lambda0s.end()) {
        const long dd = di - cv.dfs.begin(), ll = li - cv.lambda0s.begin();
        sel["cv_error"] = cv.mean_error(dd, ll);
        sel["cv_se"] = cv.se(dd, ll);
        sel["cv_error_formatted"] = format_cv_cell(cv.mean_error(dd, ll), cv.se(dd, ll));
    }
    sel["warnings"] = cv.warnings;
    std::ofstream out(dir / "selection.json");
    out << sel.dump(1) << "\n";
}

ModelArtifact make_artifact(const RunConfig& rc, const std::string& kind,
                            const PreparedDesign& prep, const SsglPath& path,
                            std::vector<std::string> feature_columns) {
    ModelArtifact artifact;
    artifact.kind = kind;
    artifact.seed = rc.seed;
    artifact.config_hash = hash_hex(rc.echo());
    artifact.fit = path.final_fit();
    artifact.groups = prep.design.groups;
    artifact.y_mean = prep.y_mean;
    artifact.col_means = prep.col_means;
    artifact.transforms = prep.transforms;
    artifact.feature_columns = std::move(feature_columns);
    for (const auto& fit : path.fits) artifact.trace.push_back(trace_entry(fit));
    return artifact;
}

std::vector<double> ladder_up_to(const std::vector<double>& ladder, double lambda0) {
    std::vector<double> out;
    for (double v : ladder) {
        if (v <= lambda0) out.push_back(v);
    }
    if (out.empty() || out.back() != lambda0) out.push_back(lambda0);
    return out;
}

int cmd_fit(const RunConfig& rc) {
    const auto dir = ensure_out(rc);
    LoadedData data = load_data(rc);
    GroupLayout layout = resolve_groups(rc, data.feature_names);
    SsglConfig config = solver_config(rc);

    double lambda0 = config.lambda0_ladder.back();
    if (rc.use_cv) {
        CvResult cv = kfold_cv(data.X, data.y,
                               linear_builder(layout.sizes, layout.ids, layout.penalized),
                               {0}, config, rc.folds, rc.seed, rc.resolved_threads());
        lambda0 = select_model(cv, rc.one_se ? SelectionRule::OneStandardError
                                             : SelectionRule::MinError)
                      .first;
        write_cv_outputs(dir, rc, cv, lambda0, 0);
    }

    GroupedDesign design =
        make_design(data.y, data.X, layout.sizes, layout.ids, layout.penalized);
    PreparedDesign prep = prepare(design);
    SsglConfig final_config = config;
    final_config.lambda0_ladder = ladder_up_to(config.lambda0_ladder, lambda0);
    SsglPath path = fit_path(prep, final_config);

    ModelArtifact artifact = make_artifact(rc, "linear", prep, path, data.feature_names);
    save_model((dir / "model.json").string(), artifact, rc.echo().dump());
    std::cout << "selected " << path.final_fit().selected_groups.size() << " of "
              << prep.design.num_groups() << " groups at lambda0=" << lambda0 << "\n";
    return 0;
}

int cmd_cv(const RunConfig& rc) {
    const auto dir = ensure_out(rc);
    LoadedData data = load_data(rc);
    GroupLayout layout = resolve_groups(rc, data.feature_names);
    SsglConfig config = solver_config(rc);
    CvResult cv = kfold_cv(data.X, data.y,
                           linear_builder(layout.sizes, layout.ids, layout.penalized), {0},
                           config, rc.folds, rc.seed, rc.resolved_threads());
    const auto [lambda0, df] = select_model(
        cv, rc.one_se ? SelectionRule::OneStandardError : SelectionRule::MinError);
    write_cv_outputs(dir, rc, cv, lambda0, df);
    std::cout << "chosen lambda0=" << lambda0 << "\n";
    return 0;
}

void write_curves(const fs::path& dir, const RunConfig& rc, const GamModel& model,
                  const SsglFit& fit) {
    const int grid_size = 100;
    std::vector<std::array<double, 3>> rows;
    for (int g : fit.selected_groups) {
        if (g >= model.num_covariates()) continue;
        const auto& basis = model.main_bases[g];
        Vector grid(grid_size);
        for (int i = 0; i < grid_size; ++i) {
            grid(i) = basis.lo + (basis.hi - basis.lo) * i / (grid_size - 1.0);
        }
        EffectCurve curve = predict_effect(model, fit, g, grid);
        for (int i = 0; i < grid_size; ++i) {
            rows.push_back({static_cast<double>(g + 1), grid(i), curve.effect(i)});
        }
    }
    Matrix table(static_cast<long>(rows.size()), 3);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        table(i, 0) = rows[i][0];
        table(i, 1) = rows[i][1];
        table(i, 2) = rows[i][2];
    }
    write_csv((dir / "curves.csv").string(), {"covariate", "value", "effect"}, table,
              provenance(rc));
}

int cmd_gam(const RunConfig& rc, bool interactions) {
    const auto dir = ensure_out(rc);
    LoadedData data = load_data(rc);
    SsglConfig config = solver_config(rc);

    InteractionSpec ispec;
    ispec.d_star = rc.d_star;
    ispec.hierarchy = rc.hierarchy;

    double lambda0 = config.lambda0_ladder.back();
    int df = rc.dfs.front();
    if (rc.use_cv) {
        CvBuilder builder = interactions
                                ? interaction_builder(ispec, BasisKind::NaturalCubic,
                                                      data.feature_names)
                                : gam_builder(BasisKind::NaturalCubic, data.feature_names);
        CvResult cv = kfold_cv(data.X, data.y, builder, rc.dfs, config, rc.folds, rc.seed,
                               rc.resolved_threads());
        std::tie(lambda0, df) = select_model(
            cv, rc.one_se ? SelectionRule::OneStandardError : SelectionRule::MinError);
        write_cv_outputs(dir, rc, cv, lambda0, df);
    }

    BasisSpec spec;
    spec.df = df;
    GamModel model = interactions
                         ? build_gam_design(data.X, data.y, spec, ispec, data.feature_names)
                         : build_main_design(data.X, data.y, spec, data.feature_names);
    SsglConfig final_config = config;
    final_config.lambda0_ladder = ladder_up_to(config.lambda0_ladder, lambda0);
    SsglPath path = fit_path(model.prep, final_config);
    const SsglFit& fit = path.final_fit();

    ModelArtifact artifact = make_artifact(rc, interactions ? "gam_interactions" : "gam",
                                           model.prep, path, data.feature_names);
    artifact.gam = model;
    save_model((dir / "model.json").string(), artifact, rc.echo().dump());
    write_curves(dir, rc, model, fit);

    if (interactions) {
        std::vector<std::array<double, 3>> rows;
        for (int g : fit.selected_groups) {
            if (g < model.num_covariates()) continue;
            const auto [k, l] = model.pairs[g - model.num_covariates()];
            const double norm = fit.beta_original
                                    .segment(model.prep.design.offset(g),
                                             model.prep.design.groups[g].size)
                                    .norm();
            rows.push_back({static_cast<double>(k + 1), static_cast<double>(l + 1), norm});
        }
        Matrix table(static_cast<long>(rows.size()), 3);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            table(i, 0) = rows[i][0];
            table(i, 1) = rows[i][1];
            table(i, 2) = rows[i][2];
        }
        write_csv((dir / "selected_pairs.csv").string(), {"k", "l", "group_norm"}, table,
                  provenance(rc));
    }

    std::cout << "selected " << fit.selected_groups.size() << " groups at lambda0="
              << lambda0 << " df=" << df << "\n";
    return 0;
}

// rebuild the prepared design the saved model was fit on
PreparedDesign rebuild_design(const ModelArtifact& artifact, const LoadedData& data) {
    std::vector<int> sizes;
    std::vector<std::string> ids;
    std::vector<bool> penalized;
    for (const auto& g : artifact.groups) {
        sizes.push_back(g.size);
        ids.push_back(g.id);
        penalized.push_back(g.penalized);
    }
    if (artifact.gam.has_value()) {
        Matrix cols = raw_design_columns(*artifact.gam, data.X);
        return prepare(make_design(data.y, cols, sizes, ids, penalized));
    }
    return prepare(make_design(data.y, data.X, sizes, ids, penalized));
}

int cmd_debias(const RunConfig& rc) {
    const auto dir = ensure_out(rc);
    ModelArtifact artifact = load_model(rc.model_path);
    LoadedData data = load_data(rc);
    if (data.feature_names != artifact.feature_columns) {
        throw InvalidArgument("data columns do not match the saved model");
    }
    PreparedDesign prep = rebuild_design(artifact, data);
    DebiasInference inf = run_debias(prep, artifact.fit, rc.alpha, rc.lambda_j);

    const long p = prep.design.p();
    Matrix table(p, 7);
    std::vector<std::string> group_of(p);
    for (int g = 0; g < prep.design.num_groups(); ++g) {
        for (int k = 0; k < prep.design.groups[g].size; ++k) {
            group_of[prep.design.offset(g) + k] = prep.design.groups[g].id;
        }
    }
    json rows = json::array();
    for (long j = 0; j < p; ++j) {
        table(j, 0) = static_cast<double>(j + 1);
        table(j, 1) = artifact.fit.beta_original(j);
        table(j, 2) = inf.original.beta_d(j);
        table(j, 3) = inf.original.se(j);
        table(j, 4) = inf.original.ci_lower(j);
        table(j, 5) = inf.original.ci_upper(j);
        table(j, 6) = inf.nodewise.lambdas(j);
        rows.push_back(json{{"coordinate", j + 1},
                            {"group", group_of[j]},
                            {"estimate", artifact.fit.beta_original(j)},
                            {"debiased", inf.original.beta_d(j)},
                            {"se", inf.original.se(j)},
                            {"lower", inf.original.ci_lower(j)},
                            {"upper", inf.original.ci_upper(j)}});
    }
    write_csv((dir / "ci_table.csv").string(),
              {"coordinate", "estimate", "debiased", "se", "lower", "upper", "lambda_j"},
              table, provenance(rc));
    json out;
    out["config"] = rc.echo();
    out["config_hash"] = hash_hex(rc.echo());
    out["seed"] = rc.seed;
    out["alpha"] = rc.alpha;
    out["sigma2"] = artifact.fit.sigma2;
    out["rows"] = std::move(rows);
    std::ofstream jf(dir / "ci_table.json");
    jf << out.dump(1) << "\n";
    std::cout << "wrote intervals for " << p << " coordinates\n";
    return 0;
}

int cmd_predict(const RunConfig& rc) {
    const auto dir = ensure_out(rc);
    ModelArtifact artifact = load_model(rc.model_path);
    CsvTable table = read_numeric_csv(rc.data_path);

    // accept files with or without the response column
    std::vector<long> feature_cols;
    for (const auto& name : artifact.feature_columns) {
        feature_cols.push_back(table.column(name));
    }
    Matrix X(table.values.rows(), static_cast<long>(feature_cols.size()));
    for (std::size_t j = 0; j < feature_cols.size(); ++j) {
        X.col(j) = table.values.col(feature_cols[j]);
    }

    Vector pred = artifact.gam.has_value()
                      ? predict(*artifact.gam, artifact.fit, X)
                      : artifact.predict_linear(X);
    Matrix out(pred.size(), 2);
    for (long i = 0; i < pred.size(); ++i) {
        out(i, 0) = static_cast<double>(i + 1);
        out(i, 1) = pred(i);
    }
    write_csv((dir / "predictions.csv").string(), {"row", "prediction"}, out,
              provenance(rc));
    std::cout << "wrote " << pred.size() << " predictions\n";
    return 0;
}

int cmd_simulate(const RunConfig& rc) {
    const auto dir = ensure_out(rc);
    SimScenario sc;
    sc.name = rc.scenario;
    sc.n = rc.n;
    sc.p = rc.p;
    sc.G = rc.G;
    sc.rho = rc.rho;
    sc.replicates = rc.replicates;
    sc.seed = rc.seed;
    sc.ladder = rc.resolved_ladder();
    sc.dfs = rc.dfs;
    sc.d_star = rc.d_star;
    sc.K = rc.folds;
    sc.alpha = rc.alpha;
    sc.tune_by_cv = rc.use_cv;
    sc.method = rc.method;
    sc.threads = rc.resolved_threads();
    SimReport report = run_scenario(sc);

    json j;
    j["config"] = rc.echo();
    j["config_hash"] = hash_hex(rc.echo());
    j["seed"] = rc.seed;
    j["scenario"] = sc.name;
    j["replicates"] = sc.replicates;
    j["mean_mse"] = report.mean_mse;
    j["mean_precision"] = report.mean_precision;
    j["mean_recall"] = report.mean_recall;
    j["mean_sigma2"] = report.mean_sigma2;
    j["sd_sigma2"] = report.sd_sigma2;
    j["precision_convention"] = "precision = 1 when no group is selected";
    if (report.coverage.total_important + report.coverage.total_null > 0) {
        j["coverage_important"] = report.coverage_important;
        j["coverage_null"] = report.coverage_null;
    }
    std::ofstream jf(dir / "report.json");
    jf << j.dump(1) << "\n";

    if (sc.name == "timing") {
        Matrix table(static_cast<long>(report.sweep_seconds.size()), 2);
        for (std::size_t i = 0; i < report.sweep_seconds.size(); ++i) {
            table(i, 0) = static_cast<double>(report.sweep_seconds[i].first);
            table(i, 1) = report.sweep_seconds[i].second;
        }
        write_csv((dir / "timing.csv").string(), {"p", "seconds_per_sweep"}, table,
                  provenance(rc));
    } else {
        Matrix table(static_cast<long>(report.replicate.size()), 8);
        for (std::size_t i = 0; i < report.replicate.size(); ++i) {
            const auto& m = report.replicate[i];
            table(i, 0) = static_cast<double>(i);
            table(i, 1) = m.mse;
            table(i, 2) = m.precision;
            table(i, 3) = m.recall;
            table(i, 4) = m.sigma2_hat;
            table(i, 5) = m.lambda0;
            table(i, 6) = static_cast<double>(m.selected);
            table(i, 7) = m.seconds;
        }
        write_csv((dir / "replicates.csv").string(),
                  {"replicate", "mse", "precision", "recall", "sigma2", "lambda0",
                   "selected", "seconds"},
                  table, provenance(rc));
    }
    if (!report.pair_ids.empty()) {
        Matrix table(static_cast<long>(report.pair_ids.size()), 3);
        for (std::size_t i = 0; i < report.pair_ids.size(); ++i) {
            table(i, 0) = report.pair_ids[i].first + 1;
            table(i, 1) = report.pair_ids[i].second + 1;
            table(i, 2) = report.pair_frequency[i];
        }
        write_csv((dir / "pair_frequency.csv").string(), {"k", "l", "frequency"}, table,
                  provenance(rc));
    }
    std::cout << "scenario " << sc.name << ": mean mse " << report.mean_mse << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spike-and-slab group lasso: fitting, selection, inference, simulation"};
    app.require_subcommand(1);

    RunConfig rc;
    const auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--ladder-max", rc.ladder_max, "largest spike value; ladder is 1..max");
        cmd->add_option("--ladder", rc.ladder, "explicit lambda0 ladder")->delimiter(',');
        cmd->add_option("--lambda1", rc.lambda1, "slab rate");
        cmd->add_option("--seed", rc.seed, "random seed");
        cmd->add_option("--out", rc.out_dir, "output directory");
        cmd->add_option("--threads", rc.threads, "worker threads (env SSGL_THREADS overrides)");
    };
    const auto add_data = [&](CLI::App* cmd) {
        cmd->add_option("--data", rc.data_path, "input CSV")->required();
        cmd->add_option("--response", rc.response, "response column name");
    };
    const auto add_cv = [&](CLI::App* cmd) {
        cmd->add_option("--k", rc.folds, "cross-validation folds");
        cmd->add_flag("--one-se", rc.one_se, "one-standard-error selection rule");
        cmd->add_flag("!--no-cv", rc.use_cv, "tune lambda0 by cross-validation");
    };

    auto* fit = app.add_subcommand("fit", "fit a grouped linear model");
    add_common(fit);
    add_data(fit);
    add_cv(fit);
    fit->add_option("--groups", rc.group_map_path, "JSON map column -> group id");
    fit->add_option("--unpenalized", rc.unpenalized, "group ids fit without the spike")
        ->delimiter(',');

    auto* cv = app.add_subcommand("cv", "cross-validation table for a grouped linear model");
    add_common(cv);
    add_data(cv);
    add_cv(cv);
    cv->add_option("--groups", rc.group_map_path, "JSON map column -> group id");
    cv->add_option("--unpenalized", rc.unpenalized, "group ids fit without the spike")
        ->delimiter(',');

    auto* gam = app.add_subcommand("gam", "sparse additive model with spline main effects");
    add_common(gam);
    add_data(gam);
    add_cv(gam);
    gam->add_option("--df", rc.dfs, "spline df candidates")->delimiter(',');

    auto* interact = app.add_subcommand("interact", "additive model with pair interactions");
    add_common(interact);
    add_data(interact);
    add_cv(interact);
    interact->add_option("--df", rc.dfs, "main-effect spline df candidates")->delimiter(',');
    interact->add_option("--d-star", rc.d_star, "interaction basis size per covariate");
    interact->add_flag("--hierarchy", rc.hierarchy, "augment pair groups with main effects");

    auto* debias_cmd = app.add_subcommand("debias", "pointwise confidence intervals");
    add_common(debias_cmd);
    add_data(debias_cmd);
    debias_cmd->add_option("--model", rc.model_path, "saved model.json")->required();
    debias_cmd->add_option("--alpha", rc.alpha, "interval miscoverage level");
    debias_cmd->add_option("--lambda-j", rc.lambda_j,
                           "nodewise penalty (default sqrt(log p / n))");

    auto* predict_cmd = app.add_subcommand("predict", "predictions from a saved model");
    add_common(predict_cmd);
    predict_cmd->add_option("--data", rc.data_path, "input CSV")->required();
    predict_cmd->add_option("--model", rc.model_path, "saved model.json")->required();

    auto* simulate = app.add_subcommand("simulate", "run a benchmark scenario");
    add_common(simulate);
    add_cv(simulate);
    simulate->add_option("--scenario", rc.scenario,
                         "sparse_gam|interaction|coverage|dense|sigma_check|many_groups|timing")
        ->required();
    simulate->add_option("--n", rc.n, "sample size");
    simulate->add_option("--p", rc.p, "covariates (spline scenarios)");
    simulate->add_option("--g", rc.G, "groups (linear scenarios)");
    simulate->add_option("--rho", rc.rho, "AR(1) correlation");
    simulate->add_option("--replicates", rc.replicates, "replicate count");
    simulate->add_option("--df", rc.dfs, "spline df candidates")->delimiter(',');
    simulate->add_option("--d-star", rc.d_star, "interaction basis size");
    simulate->add_option("--alpha", rc.alpha, "interval level (coverage scenario)");
    simulate->add_option("--method", rc.method, "ssgl|grouplasso");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        rc.command = app.get_subcommands().front()->get_name();
        if (fit->parsed()) return cmd_fit(rc);
        if (cv->parsed()) return cmd_cv(rc);
        if (gam->parsed()) return cmd_gam(rc, false);
        if (interact->parsed()) return cmd_gam(rc, true);
        if (debias_cmd->parsed()) return cmd_debias(rc);
        if (predict_cmd->parsed()) return cmd_predict(rc);
        if (simulate->parsed()) return cmd_simulate(rc);
        return 2;
    } catch (const CsvError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const InvalidArgument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
