#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "riskreg/csv.hpp"
#include "riskreg/error.hpp"
#include "riskreg/pipeline.hpp"
#include "riskreg/report.hpp"
#include "riskreg/rng.hpp"
#include "riskreg/simulate.hpp"

using namespace riskreg;

namespace {

std::filesystem::path temp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("riskreg_test_" + name);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path);
    out << text;
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

EncodingPlan xy_plan() {
    EncodingPlan plan;
    plan.outcome = "y";
    plan.predictors.push_back({"x", Treatment::Passthrough, std::nullopt});
    return plan;
}

// Cohort with a dummy whose carriers never see the event.
RawTable separated_table() {
    const std::size_t n = 50;
    std::vector<double> y(n), expo(n), z(n);
    Rng rng(81);
    for (std::size_t i = 0; i < n; ++i) {
        expo[i] = i < 10 ? 1.0 : 0.0;
        z[i] = rng.next_normal();
        y[i] = i >= 10 && i % 2 == 0 ? 1.0 : 0.0;
    }
    RawTable t;
    t.add_binary("y", std::move(y));
    t.add_binary("exposure", std::move(expo));
    t.add_continuous("z", std::move(z));
    return t;
}

RunConfig separated_config() {
    RunConfig cfg;
    cfg.plan.outcome = "y";
    cfg.plan.predictors.push_back({"exposure", Treatment::Binary, std::nullopt});
    cfg.plan.predictors.push_back({"z", Treatment::Passthrough, std::nullopt});
    cfg.family = FamilyKind::PoissonLog;
    cfg.seed = 4;
    return cfg;
}

}  // namespace

TEST_CASE("load_csv: clean parse, typed columns, quoted fields") {
    const auto path = temp_file("clean.csv");
    write_text(path,
               "y,x,grp\n"
               "0,1.5,\"a,b\"\n"
               "1,-2.25,\"say \"\"hi\"\"\"\n"
               "1,0.5,c\n");
    EncodingPlan plan = xy_plan();
    plan.predictors.push_back({"grp", Treatment::Categorical, std::nullopt});
    const CsvLoadResult loaded = load_csv(path.string(), plan);
    CHECK(loaded.table.n() == 3);
    CHECK(loaded.dropped_rows == 0);
    CHECK(loaded.table.require("x").numeric[1] == -2.25);
    CHECK(loaded.table.require("grp").labels[0] == "a,b");
    CHECK(loaded.table.require("grp").labels[1] == "say \"hi\"");
}

TEST_CASE("load_csv: listwise deletion with a reported count") {
    const auto path = temp_file("missing.csv");
    write_text(path,
               "y,x,unused\n"
               "0,1.0,9\n"
               "1,,9\n"
               "1,NA,\n"
               "0,2.0,\n");
    const CsvLoadResult loaded = load_csv(path.string(), xy_plan());
    CHECK(loaded.table.n() == 2);  // missing values in an unused column are fine
    CHECK(loaded.dropped_rows == 2);
}

TEST_CASE("load_csv: validation errors name the offending cell") {
    const auto path = temp_file("bad_outcome.csv");
    write_text(path, "y,x\n0,1\n2,3\n");
    CHECK_THROWS_WITH_AS(load_csv(path.string(), xy_plan()),
                         doctest::Contains("not 0/1"), Error);

    const auto path2 = temp_file("bad_number.csv");
    write_text(path2, "y,x\n0,1\n1,abc\n");
    CHECK_THROWS_WITH_AS(load_csv(path2.string(), xy_plan()),
                         doctest::Contains("abc"), Error);

    const auto path3 = temp_file("no_col.csv");
    write_text(path3, "y,w\n0,1\n1,2\n");
    CHECK_THROWS_WITH_AS(load_csv(path3.string(), xy_plan()),
                         doctest::Contains("missing column 'x'"), Error);

    CHECK_THROWS_AS(load_csv("/nonexistent/nowhere.csv", xy_plan()), Error);
}

TEST_CASE("write_csv round-trips through load_csv") {
    RawTable t;
    t.add_binary("y", {0, 1, 1});
    t.add_continuous("x", {1.25, -3.5, 0.0625});
    t.add_categorical("grp", {"a", "b,c", "d\"e"});
    const auto path = temp_file("roundtrip.csv");
    write_csv(t, path.string());

    EncodingPlan plan = xy_plan();
    plan.predictors.push_back({"grp", Treatment::Categorical, std::nullopt});
    const CsvLoadResult loaded = load_csv(path.string(), plan);
    CHECK(loaded.table.n() == 3);
    CHECK(loaded.table.require("x").numeric == t.require("x").numeric);
    CHECK(loaded.table.require("grp").labels == t.require("grp").labels);
}

TEST_CASE("simulate_cohort: law of large numbers on the event rate") {
    SimSpec spec;
    spec.family = Family::poisson_log();
    spec.beta = Eigen::VectorXd::Constant(1, std::log(0.4));
    const RawTable t = simulate_cohort(100000, spec, 42);
    const auto& y = t.require("y").numeric;
    double rate = 0.0;
    for (double v : y) rate += v;
    rate /= static_cast<double>(y.size());
    CHECK(rate == doctest::Approx(0.4).epsilon(0.01 / 0.4));
}

TEST_CASE("simulate_cohort: determinism and the risk-model guard") {
    SimSpec spec;
    spec.family = Family::poisson_log();
    spec.beta.resize(2);
    spec.beta << std::log(0.3), 0.4;
    spec.predictors.push_back({"x", PredictorSim::Kind::Normal, 0.0, 1.0, 0.5});

    const RawTable a = simulate_cohort(500, spec, 7);
    const RawTable b = simulate_cohort(500, spec, 7);
    CHECK(a.require("y").numeric == b.require("y").numeric);
    CHECK(a.require("x").numeric == b.require("x").numeric);
    const RawTable c = simulate_cohort(500, spec, 8);
    CHECK(a.require("y").numeric != c.require("y").numeric);

    // mean above 1 at some generated row is rejected
    SimSpec bad = spec;
    bad.beta << std::log(1.2), 0.0;
    CHECK_THROWS_WITH_AS(simulate_cohort(10, bad, 1),
                         doctest::Contains("outside (0, 1)"), Error);
}

TEST_CASE("run_fit_command: quasi-ML with Wald intervals and diagnostics") {
    SimSpec spec;
    spec.family = Family::poisson_log();
    spec.beta.resize(2);
    spec.beta << std::log(0.35), -0.4;
    spec.predictors.push_back({"exposure", PredictorSim::Kind::Bernoulli, 0.0, 1.0, 0.5});
    const RawTable table = simulate_cohort(400, spec, 19);

    RunConfig cfg;
    cfg.plan.outcome = "y";
    cfg.plan.predictors.push_back({"exposure", Treatment::Binary, std::nullopt});
    cfg.family = FamilyKind::PoissonLog;
    cfg.mode.penalty = Penalty::None;
    cfg.seed = 3;
    const AnalysisReport report = run_fit_command(cfg, table);

    CHECK(report.method == "quasi-ML");
    CHECK(report.ci_method == "wald");
    CHECK(report.converged);
    REQUIRE(report.terms.size() == 1);
    CHECK(report.terms[0].measure == "RR");
    CHECK(report.terms[0].estimate ==
          doctest::Approx(std::exp(report.terms[0].beta)).epsilon(1e-12));
    REQUIRE(report.terms[0].est_lower.has_value());
    CHECK(*report.terms[0].est_lower < report.terms[0].estimate);
    CHECK(*report.terms[0].est_upper > report.terms[0].estimate);
    CHECK(report.intercept.measure == "baseline");
    CHECK(report.n == 400);
    CHECK(report.diagnostics.p == 1);
}

TEST_CASE("run_fit_command: separated data fails unpenalized, ridge succeeds") {
    const RawTable table = separated_table();

    RunConfig cfg = separated_config();
    cfg.mode.penalty = Penalty::None;
    try {
        run_fit_command(cfg, table);
        FAIL("expected non-convergence");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Numeric);
        CHECK(e.module() == "quasi_glm");
        CHECK(std::string(e.what()).find("possible separation") != std::string::npos);
    }

    RunConfig ridge = separated_config();
    ridge.mode.penalty = Penalty::Ridge;
    ridge.cv_folds = 5;
    const AnalysisReport report = run_fit_command(ridge, table);
    CHECK(report.converged);
    CHECK(report.method == "ridge");
    for (const auto& t : report.terms) CHECK(std::isfinite(t.beta));
    REQUIRE(report.diagnostics.separated.size() == 1);
    CHECK(report.diagnostics.separated[0].term == "exposure");
}

TEST_CASE("run_fit_command: byte-identical reports for identical config and seed") {
    const RawTable table = separated_table();
    RunConfig cfg = separated_config();
    cfg.mode.penalty = Penalty::Lasso;
    cfg.cv_folds = 5;
    cfg.run_bootstrap = true;
    cfg.bootstrap_replicates = 25;

    const std::string a = report_to_json(run_fit_command(cfg, table));
    const std::string b = report_to_json(run_fit_command(cfg, table));
    CHECK(a == b);
    CHECK(a.find("bootstrap") != std::string::npos);

    cfg.seed = 5;
    const std::string c = report_to_json(run_fit_command(cfg, table));
    CHECK(a != c);
}

TEST_CASE("run_fit_command: penalty invariants") {
    RunConfig cfg = separated_config();
    cfg.mode.penalty = Penalty::Ridge;
    cfg.mode.alpha = 0.7;  // overridden by the ridge invariant
    cfg.mode.lambda = 0.1;
    const AnalysisReport report = run_fit_command(cfg, separated_table());
    CHECK(*report.alpha == 0.0);
    CHECK(*report.lambda == 0.1);

    RunConfig lasso = separated_config();
    lasso.mode.penalty = Penalty::Lasso;
    lasso.mode.alpha = 0.2;
    lasso.mode.lambda = 0.05;
    const AnalysisReport lr = run_fit_command(lasso, separated_table());
    CHECK(*lr.alpha == 1.0);

    RunConfig none = separated_config();
    none.mode.penalty = Penalty::None;
    none.mode.lambda = 99.0;  // ignored
    none.plan.predictors.pop_back();  // drop z; exposure alone is not separated
    none.plan.predictors.push_back({"z", Treatment::Passthrough, std::nullopt});
    CHECK_FALSE(none.mode.penalty == Penalty::Ridge);
}

TEST_CASE("forest data: header, transform, and exact round-trip") {
    AnalysisReport report;
    report.method = "lasso";
    report.family = "poisson-log";
    TermReport t;
    t.term = "exposure";
    t.measure = "RR";
    t.beta = std::log(2.0);
    t.estimate = std::exp(t.beta);
    t.beta_lower = std::log(1.2);
    t.beta_upper = std::log(3.0);
    t.est_lower = 1.2;
    t.est_upper = 3.0;
    report.terms.push_back(t);
    TermReport bare;
    bare.term = "age";
    bare.measure = "RR";
    bare.beta = 0.25;
    bare.estimate = std::exp(0.25);
    report.terms.push_back(bare);

    const std::string data = forest_data(report);
    std::stringstream ss(data);
    std::string line;
    std::getline(ss, line);
    CHECK(line == "term\tmeasure\testimate\tlower\tupper\tmethod");
    std::getline(ss, line);
    CHECK(line == "exposure\tRR\t2\t1.2\t3\tlasso");
    std::getline(ss, line);
    // empty CI fields
    CHECK(line.find("age\tRR\t") == 0);
    CHECK(line.find("\t\t\tlasso") != std::string::npos);

    // parsing the emitted number recovers the estimate exactly
    const std::string est = line.substr(line.find("RR\t") + 3);
    const double parsed = std::strtod(est.c_str(), nullptr);
    CHECK(parsed == bare.estimate);
}

TEST_CASE("forest data: one row per encoded term") {
    const RawTable table = separated_table();
    RunConfig cfg = separated_config();
    cfg.mode.penalty = Penalty::Ridge;
    cfg.mode.lambda = 0.2;
    const AnalysisReport report = run_fit_command(cfg, table);
    const std::string data = forest_data(report);
    const auto rows = static_cast<std::size_t>(
        std::count(data.begin(), data.end(), '\n'));
    CHECK(rows == report.terms.size() + 1);
    CHECK(report.terms.size() == 2);
}

TEST_CASE("report json: structure and provenance") {
    const RawTable table = separated_table();
    RunConfig cfg = separated_config();
    cfg.mode.penalty = Penalty::ElasticNet;
    cfg.mode.alpha = 0.5;
    cfg.mode.lambda = 0.1;
    cfg.seed = 77;
    const AnalysisReport report = run_fit_command(cfg, table);
    const std::string json = report_to_json(report);
    CHECK(json.find("\"name\": \"riskreg\"") != std::string::npos);
    CHECK(json.find("\"seed\": 77") != std::string::npos);
    CHECK(json.find("\"method\": \"elastic-net\"") != std::string::npos);
    CHECK(json.find("\"epv_printed\"") != std::string::npos);

    const auto path = temp_file("report.json");
    write_report(report, path.string());
    CHECK(read_text(path) == json);
}

TEST_CASE("error_block_json is machine readable") {
    const std::string block = error_block_json("quasi_glm", "numeric", "did not converge");
    CHECK(block.find("\"module\": \"quasi_glm\"") != std::string::npos);
    CHECK(block.find("\"kind\": \"numeric\"") != std::string::npos);
}

TEST_CASE("run_diagnose_command and run_cv_command emit JSON") {
    const RawTable table = separated_table();
    const auto path = temp_file("diag_input.csv");
    write_csv(table, path.string());

    RunConfig cfg = separated_config();
    cfg.input_path = path.string();
    const std::string diag = run_diagnose_command(cfg);
    CHECK(diag.find("\"separated_terms\"") != std::string::npos);
    CHECK(diag.find("exposure") != std::string::npos);

    cfg.mode.penalty = Penalty::Lasso;
    cfg.cv_folds = 5;
    const std::string cv = run_cv_command(cfg);
    CHECK(cv.find("\"lambda_min\"") != std::string::npos);
    CHECK(cv.find("\"mean_loss\"") != std::string::npos);

    RunConfig bad = separated_config();
    bad.input_path = path.string();
    bad.mode.penalty = Penalty::None;
    CHECK_THROWS_AS(run_cv_command(bad), Error);
}
