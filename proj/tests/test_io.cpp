#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "ssgl/basis.hpp"
#include "ssgl/csv.hpp"
#include "ssgl/model_io.hpp"
#include "ssgl/rng.hpp"
#include "ssgl/solver.hpp"

using namespace ssgl;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name) : path("/tmp/ssgl_test_" + name) {}
    ~TempFile() { std::remove(path.c_str()); }
};

} // namespace

TEST_SUITE("io") {

TEST_CASE("csv round trip with 17 significant digits") {
    TempFile tmp("roundtrip.csv");
    Matrix values(3, 2);
    values << 1.0 / 3.0, -2.7182818284590452, 1e-300, 12345.678901234567, 0.0, -0.5;
    write_csv(tmp.path, {"a", "b"}, values, {"seed=7"});
    CsvTable table = read_numeric_csv(tmp.path);
    CHECK(table.header == std::vector<std::string>{"a", "b"});
    CHECK((table.values.array() == values.array()).all());
    CHECK(table.column("b") == 1);
    CHECK_THROWS_AS(table.column("c"), Error);
}

TEST_CASE("rfc 4180 quoting") {
    TempFile tmp("quoted.csv");
    {
        std::ofstream out(tmp.path);
        out << "\"a,1\",\"b\"\"q\"\n1,2\r\n3,4\n";
    }
    CsvTable table = read_numeric_csv(tmp.path);
    CHECK(table.header[0] == "a,1");
    CHECK(table.header[1] == "b\"q");
    CHECK(table.values(0, 1) == 2.0);
    CHECK(table.values(1, 0) == 3.0);
}

TEST_CASE("malformed csv reports the row number") {
    TempFile tmp("bad.csv");
    {
        std::ofstream out(tmp.path);
        out << "a,b\n1,2\n3,oops\n";
    }
    try {
        read_numeric_csv(tmp.path);
        FAIL("expected CsvError");
    } catch (const CsvError& e) {
        CHECK(e.row_number == 3);
        CHECK(std::string(e.what()).find("oops") != std::string::npos);
    }

    TempFile tmp2("ragged.csv");
    {
        std::ofstream out(tmp2.path);
        out << "a,b\n1,2\n3\n";
    }
    try {
        read_numeric_csv(tmp2.path);
        FAIL("expected CsvError");
    } catch (const CsvError& e) {
        CHECK(e.row_number == 3);
    }
}

TEST_CASE("linear model artifact round trips predictions") {
    Rng rng(1);
    const long n = 60;
    Matrix X(n, 4);
    for (long i = 0; i < n; ++i) {
        for (int j = 0; j < 4; ++j) X(i, j) = rng.normal();
    }
    Vector y = X.col(0) - 0.5 * X.col(2);
    for (long i = 0; i < n; ++i) y(i) += rng.normal(0.0, 0.3);

    GroupedDesign design = make_design(y, X, {2, 2});
    PreparedDesign prep = prepare(design);
    SsglConfig config;
    config.lambda0_ladder = {1, 10};
    SsglFit fit = fit_path(prep, config).final_fit();

    ModelArtifact artifact;
    artifact.kind = "linear";
    artifact.seed = 99;
    artifact.config_hash = "abc";
    artifact.fit = fit;
    artifact.groups = prep.design.groups;
    artifact.y_mean = prep.y_mean;
    artifact.col_means = prep.col_means;
    artifact.transforms = prep.transforms;
    artifact.trace.push_back(trace_entry(fit));

    TempFile tmp("model.json");
    save_model(tmp.path, artifact, R"({"command":"fit"})");
    ModelArtifact loaded = load_model(tmp.path);
    CHECK(loaded.kind == "linear");
    CHECK(loaded.seed == 99);
    CHECK(loaded.trace.size() == 1);
    CHECK((loaded.fit.beta_original.array() == fit.beta_original.array()).all());

    Vector direct = artifact.predict_linear(X);
    Vector reloaded = loaded.predict_linear(X);
    CHECK((direct - reloaded).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("gam model artifact round trips predictions") {
    Rng rng(2);
    const long n = 70;
    Matrix X(n, 3);
    for (long i = 0; i < n; ++i) {
        for (int j = 0; j < 3; ++j) X(i, j) = rng.uniform();
    }
    Vector y(n);
    for (long i = 0; i < n; ++i) y(i) = std::sin(5.0 * X(i, 0)) + rng.normal(0.0, 0.2);

    BasisSpec spec;
    spec.df = 3;
    InteractionSpec ispec;
    ispec.d_star = 2;
    GamModel model = build_gam_design(X, y, spec, ispec);
    SsglConfig config;
    config.lambda0_ladder = {1, 10};
    SsglFit fit = fit_path(model.prep, config).final_fit();

    ModelArtifact artifact;
    artifact.kind = "gam_interactions";
    artifact.fit = fit;
    artifact.groups = model.prep.design.groups;
    artifact.y_mean = model.prep.y_mean;
    artifact.col_means = model.prep.col_means;
    artifact.transforms = model.prep.transforms;
    artifact.gam = model;

    TempFile tmp("gam_model.json");
    save_model(tmp.path, artifact, "{}");
    ModelArtifact loaded = load_model(tmp.path);
    REQUIRE(loaded.gam.has_value());

    Matrix X_new(5, 3);
    for (long i = 0; i < 5; ++i) {
        for (int j = 0; j < 3; ++j) X_new(i, j) = rng.uniform();
    }
    Vector direct = predict(model, fit, X_new);
    Vector reloaded = predict(*loaded.gam, loaded.fit, X_new);
    CHECK((direct - reloaded).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("config hash is stable and content sensitive") {
    CHECK(fnv1a_hash("abc") == fnv1a_hash("abc"));
    CHECK(fnv1a_hash("abc") != fnv1a_hash("abd"));
}

} // TEST_SUITE
