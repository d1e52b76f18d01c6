#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "riskreg/csv.hpp"
#include "riskreg/error.hpp"
#include "riskreg/pipeline.hpp"
#include "riskreg/report.hpp"
#include "riskreg/simulate.hpp"

namespace {

using namespace riskreg;

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

FamilyKind parse_family(const std::string& s) {
    if (s == "poisson-log") return FamilyKind::PoissonLog;
    if (s == "gaussian-identity") return FamilyKind::GaussianIdentity;
    if (s == "binomial-logit") return FamilyKind::BinomialLogit;
    fail_validation("cli_reporting", "unknown family '" + s + "'");
}

Penalty parse_penalty(const std::string& s) {
    if (s == "none") return Penalty::None;
    if (s == "ridge") return Penalty::Ridge;
    if (s == "lasso") return Penalty::Lasso;
    if (s == "elastic-net") return Penalty::ElasticNet;
    fail_validation("cli_reporting", "unknown penalty '" + s + "'");
}

struct CliModelFlags {
    std::string input, outcome;
    std::string continuous, binary, categorical;
    std::vector<std::string> references;
    std::string family = "poisson-log";
    std::string penalty = "none";
    std::string alpha = "cv";
    std::string lambda = "cv";
    int folds = 10;
    bool stratified = false;
    int lambda_count = 100;
    int boot_b = 1000;
    double level = 0.95;
    bool no_reselect_lambda = false;
    bool reselect_alpha = false;
    std::uint64_t seed = 0;
    std::size_t threads = 0;
    std::string report_path, forest_path;
    std::string config_path;
};

void add_model_flags(CLI::App* cmd, CliModelFlags& f) {
    cmd->add_option("--input", f.input, "input CSV path");
    cmd->add_option("--outcome", f.outcome, "binary outcome column");
    cmd->add_option("--continuous", f.continuous, "comma-separated continuous predictors");
    cmd->add_option("--binary", f.binary, "comma-separated binary 0/1 predictors");
    cmd->add_option("--categorical", f.categorical, "comma-separated categorical predictors");
    cmd->add_option("--reference", f.references,
                    "reference level as column=level (repeatable)");
    cmd->add_option("--family", f.family,
                    "poisson-log | gaussian-identity | binomial-logit");
    cmd->add_option("--penalty", f.penalty, "none | ridge | lasso | elastic-net");
    cmd->add_option("--alpha", f.alpha, "elastic-net weight in [0,1], or 'cv'");
    cmd->add_option("--lambda", f.lambda, "penalty strength >= 0, or 'cv'");
    cmd->add_option("--folds", f.folds, "cross-validation folds");
    cmd->add_flag("--stratified", f.stratified, "stratify CV folds on the outcome");
    cmd->add_option("--lambda-count", f.lambda_count, "lambda path length");
    cmd->add_option("--seed", f.seed, "random seed");
    cmd->add_option("--threads", f.threads,
                    "worker threads (default: RISKREG_THREADS or hardware)");
    cmd->add_option("--report", f.report_path, "report JSON output path");
    cmd->add_option("--forest", f.forest_path, "forest-plot TSV output path");
    cmd->add_option("--config", f.config_path,
                    "key=value config file with the same keys; flags take precedence");
}

// key=value file using the flag names without the leading dashes; '#' starts
// a comment. Command-line flags win over file entries.
void apply_config_file(const CLI::App* cmd, CliModelFlags& f) {
    if (f.config_path.empty()) return;
    std::ifstream in(f.config_path);
    if (!in)
        fail_validation("cli_reporting", "cannot open config file '" + f.config_path + "'");

    auto given = [&](const std::string& flag) { return cmd->count(flag) > 0; };
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        const auto last = line.find_last_not_of(" \t\r");
        line = line.substr(first, last - first + 1);
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            fail_validation("cli_reporting", "config line " + std::to_string(line_no) +
                                                 " is not key=value: '" + line + "'");
        const std::string key = line.substr(0, eq);
        const std::string value = line.substr(eq + 1);

        if (key == "input") { if (!given("--input")) f.input = value; }
        else if (key == "outcome") { if (!given("--outcome")) f.outcome = value; }
        else if (key == "continuous") { if (!given("--continuous")) f.continuous = value; }
        else if (key == "binary") { if (!given("--binary")) f.binary = value; }
        else if (key == "categorical") { if (!given("--categorical")) f.categorical = value; }
        else if (key == "reference") { if (!given("--reference")) f.references.push_back(value); }
        else if (key == "family") { if (!given("--family")) f.family = value; }
        else if (key == "penalty") { if (!given("--penalty")) f.penalty = value; }
        else if (key == "alpha") { if (!given("--alpha")) f.alpha = value; }
        else if (key == "lambda") { if (!given("--lambda")) f.lambda = value; }
        else if (key == "folds") { if (!given("--folds")) f.folds = std::stoi(value); }
        else if (key == "stratified") { if (!given("--stratified")) f.stratified = value == "true" || value == "1"; }
        else if (key == "lambda-count") { if (!given("--lambda-count")) f.lambda_count = std::stoi(value); }
        else if (key == "replicates") { if (!given("--replicates")) f.boot_b = std::stoi(value); }
        else if (key == "level") { if (!given("--level")) f.level = std::stod(value); }
        else if (key == "seed") { if (!given("--seed")) f.seed = std::stoull(value); }
        else if (key == "threads") { if (!given("--threads")) f.threads = std::stoull(value); }
        else if (key == "report") { if (!given("--report")) f.report_path = value; }
        else if (key == "forest") { if (!given("--forest")) f.forest_path = value; }
        else {
            fail_validation("cli_reporting", "unknown config key '" + key + "'");
        }
    }
}

void require_inputs(const CliModelFlags& f) {
    if (f.input.empty()) fail_validation("cli_reporting", "--input is required");
    if (f.outcome.empty()) fail_validation("cli_reporting", "--outcome is required");
}

RunConfig to_config(const CliModelFlags& f) {
    RunConfig cfg;
    cfg.input_path = f.input;
    cfg.plan.outcome = f.outcome;
    for (const auto& c : split_list(f.continuous))
        cfg.plan.predictors.push_back({c, Treatment::Passthrough, std::nullopt});
    for (const auto& c : split_list(f.binary))
        cfg.plan.predictors.push_back({c, Treatment::Binary, std::nullopt});
    for (const auto& c : split_list(f.categorical))
        cfg.plan.predictors.push_back({c, Treatment::Categorical, std::nullopt});
    for (const auto& r : f.references) {
        const auto eq = r.find('=');
        if (eq == std::string::npos)
            fail_validation("cli_reporting", "--reference expects column=level, got '" + r + "'");
        const std::string col = r.substr(0, eq);
        bool found = false;
        for (auto& spec : cfg.plan.predictors) {
            if (spec.column == col && spec.treatment == Treatment::Categorical) {
                spec.reference = r.substr(eq + 1);
                found = true;
            }
        }
        if (!found)
            fail_validation("cli_reporting",
                            "--reference names unknown categorical column '" + col + "'");
    }

    cfg.family = parse_family(f.family);
    cfg.mode.penalty = parse_penalty(f.penalty);
    if (f.alpha != "cv") cfg.mode.alpha = std::stod(f.alpha);
    if (f.lambda != "cv") cfg.mode.lambda = std::stod(f.lambda);
    cfg.cv_folds = f.folds;
    cfg.stratified = f.stratified;
    cfg.lambda_count = f.lambda_count;
    cfg.bootstrap_replicates = f.boot_b;
    cfg.level = f.level;
    cfg.reselect_lambda = !f.no_reselect_lambda;
    cfg.reselect_alpha = f.reselect_alpha;
    cfg.seed = f.seed;
    cfg.workers = f.threads;
    cfg.report_path = f.report_path;
    cfg.forest_path = f.forest_path;
    return cfg;
}

void write_outputs(const AnalysisReport& report, const RunConfig& cfg) {
    const std::string json = report_to_json(report);
    if (!cfg.report_path.empty())
        write_report(report, cfg.report_path);
    else
        std::cout << json;
    if (!cfg.forest_path.empty()) emit_forest_data(report, cfg.forest_path);
}

struct SimFlags {
    std::size_t n = 100;
    std::uint64_t seed = 0;
    std::string out;
    std::string family = "poisson-log";
    double intercept = 0.0;
    std::vector<std::string> normal_specs;     // name,beta[,mean[,sd]]
    std::vector<std::string> bernoulli_specs;  // name,beta[,p]
};

int run_simulate(const SimFlags& f) {
    SimSpec spec;
    spec.family = Family{parse_family(f.family)};
    std::vector<double> betas{f.intercept};
    auto parse_fields = [](const std::string& s) { return split_list(s); };
    for (const auto& s : f.normal_specs) {
        const auto fields = parse_fields(s);
        if (fields.size() < 2)
            fail_validation("cli_reporting", "--normal expects name,beta[,mean[,sd]]");
        PredictorSim p;
        p.name = fields[0];
        p.kind = PredictorSim::Kind::Normal;
        betas.push_back(std::stod(fields[1]));
        if (fields.size() > 2) p.mean = std::stod(fields[2]);
        if (fields.size() > 3) p.sd = std::stod(fields[3]);
        spec.predictors.push_back(p);
    }
    for (const auto& s : f.bernoulli_specs) {
        const auto fields = parse_fields(s);
        if (fields.size() < 2)
            fail_validation("cli_reporting", "--bernoulli expects name,beta[,p]");
        PredictorSim p;
        p.name = fields[0];
        p.kind = PredictorSim::Kind::Bernoulli;
        betas.push_back(std::stod(fields[1]));
        if (fields.size() > 2) p.prob = std::stod(fields[2]);
        spec.predictors.push_back(p);
    }
    spec.beta = Eigen::Map<Eigen::VectorXd>(betas.data(), static_cast<Eigen::Index>(betas.size()));

    const RawTable table = simulate_cohort(f.n, spec, f.seed);
    if (f.out.empty())
        fail_validation("cli_reporting", "simulate requires --out");
    write_csv(table, f.out);
    std::cout << "wrote " << table.n() << " rows to " << f.out << "\n";
    return 0;
}

int dispatch(CLI::App& app, CliModelFlags& flags, const SimFlags& sim) {
    if (app.got_subcommand("simulate")) return run_simulate(sim);

    const char* active = nullptr;
    for (const char* name : {"fit", "boot", "cv", "diagnose"})
        if (app.got_subcommand(name)) active = name;
    if (!active) {
        std::cerr << app.help();
        return 2;
    }
    apply_config_file(app.get_subcommand(active), flags);
    require_inputs(flags);

    const std::string command = active;
    if (command == "fit" || command == "boot") {
        RunConfig cfg = to_config(flags);
        cfg.run_bootstrap = command == "boot";
        const AnalysisReport report = run_fit_command(cfg);
        write_outputs(report, cfg);
        return 0;
    }

    RunConfig cfg = to_config(flags);
    std::string json;
    if (command == "cv") {
        json = run_cv_command(cfg);
    } else {
        cfg.mode.penalty = Penalty::None;
        json = run_diagnose_command(cfg);
    }
    if (!cfg.report_path.empty()) {
        std::ofstream out(cfg.report_path);
        out << json;
    } else {
        std::cout << json;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"regularized risk-ratio / risk-difference regression for binary cohort data"};
    app.require_subcommand(1);

    CliModelFlags flags;
    SimFlags sim;

    auto* fit = app.add_subcommand("fit", "fit one model and report estimates");
    add_model_flags(fit, flags);

    auto* cv = app.add_subcommand("cv", "cross-validation curve for the tuning parameters");
    add_model_flags(cv, flags);

    auto* boot = app.add_subcommand("boot", "fit plus bootstrap percentile intervals");
    add_model_flags(boot, flags);
    boot->add_option("--replicates", flags.boot_b, "bootstrap replicates");
    boot->add_option("--level", flags.level, "confidence level");
    boot->add_flag("--no-reselect-lambda", flags.no_reselect_lambda,
                   "reuse the full-data lambda in every replicate");
    boot->add_flag("--reselect-alpha", flags.reselect_alpha,
                   "re-run the alpha grid search in every replicate");

    auto* diagnose = app.add_subcommand("diagnose", "EPV, VIF, and separation scan");
    add_model_flags(diagnose, flags);

    auto* simulate = app.add_subcommand("simulate", "write a synthetic cohort CSV");
    simulate->add_option("--n", sim.n, "rows to generate")->required();
    simulate->add_option("--seed", sim.seed, "random seed");
    simulate->add_option("--out", sim.out, "output CSV path")->required();
    simulate->add_option("--family", sim.family, "true model family");
    simulate->add_option("--intercept", sim.intercept, "true intercept");
    simulate->add_option("--normal", sim.normal_specs,
                         "normal predictor as name,beta[,mean[,sd]] (repeatable)");
    simulate->add_option("--bernoulli", sim.bernoulli_specs,
                         "bernoulli predictor as name,beta[,p] (repeatable)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        return dispatch(app, flags, sim);
    } catch (const riskreg::Error& e) {
        const std::string kind =
            e.kind() == riskreg::ErrorKind::Validation ? "validation" : "numeric";
        const std::string block = riskreg::error_block_json(e.module(), kind, e.what());
        std::cout << block;
        if (!flags.report_path.empty()) {
            std::ofstream out(flags.report_path);
            out << block;
        }
        return e.kind() == riskreg::ErrorKind::Validation ? 2 : 3;
    } catch (const std::exception& e) {
        std::cout << riskreg::error_block_json("riskreg", "numeric", e.what());
        return 3;
    }
}
