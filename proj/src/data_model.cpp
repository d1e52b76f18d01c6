#include "riskreg/data_model.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "riskreg/error.hpp"

namespace riskreg {

namespace {
constexpr const char* kModule = "data_model";

bool is_zero_one(double v) { return v == 0.0 || v == 1.0; }

void check_lengths(const RawTable& table) {
    if (table.columns.empty()) return;
    const std::size_t n = table.columns.front().size();
    for (const auto& col : table.columns) {
        if (col.size() != n)
            fail_validation(kModule, "column '" + col.name + "' has length " +
                                         std::to_string(col.size()) + ", expected " +
                                         std::to_string(n));
    }
}
}  // namespace

const Column* RawTable::find(const std::string& name) const {
    for (const auto& col : columns)
        if (col.name == name) return &col;
    return nullptr;
}

const Column& RawTable::require(const std::string& name) const {
    const Column* col = find(name);
    if (!col) fail_validation(kModule, "unknown column '" + name + "'");
    return *col;
}

void RawTable::add_continuous(std::string name, std::vector<double> values) {
    columns.push_back(Column{std::move(name), ColumnType::Continuous, std::move(values), {}});
}

void RawTable::add_binary(std::string name, std::vector<double> values) {
    columns.push_back(Column{std::move(name), ColumnType::Binary, std::move(values), {}});
}

void RawTable::add_categorical(std::string name, std::vector<std::string> values) {
    columns.push_back(Column{std::move(name), ColumnType::Categorical, {}, std::move(values)});
}

std::vector<std::string> DesignMatrix::term_names() const {
    std::vector<std::string> names;
    names.reserve(terms.size());
    for (const auto& t : terms) names.push_back(t.term);
    return names;
}

DesignMatrix DesignMatrix::rows(const std::vector<std::size_t>& idx) const {
    DesignMatrix out;
    out.terms = terms;
    out.X.resize(static_cast<Eigen::Index>(idx.size()), X.cols());
    out.y.resize(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t i = 0; i < idx.size(); ++i) {
        out.X.row(static_cast<Eigen::Index>(i)) = X.row(static_cast<Eigen::Index>(idx[i]));
        out.y(static_cast<Eigen::Index>(i)) = y(static_cast<Eigen::Index>(idx[i]));
    }
    return out;
}

Standardizer Standardizer::identity(std::size_t p) {
    Standardizer s;
    s.mean = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p));
    s.scale = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(p));
    return s;
}

Eigen::MatrixXd Standardizer::apply(const Eigen::MatrixXd& X) const {
    Eigen::MatrixXd out = X;
    for (Eigen::Index j = 0; j < X.cols(); ++j)
        out.col(j) = (X.col(j).array() - mean(j)) / scale(j);
    return out;
}

Eigen::MatrixXd Standardizer::invert(const Eigen::MatrixXd& Xstd) const {
    Eigen::MatrixXd out = Xstd;
    for (Eigen::Index j = 0; j < Xstd.cols(); ++j)
        out.col(j) = Xstd.col(j).array() * scale(j) + mean(j);
    return out;
}

DesignMatrix encode(const RawTable& table, const EncodingPlan& plan) {
    check_lengths(table);
    const std::size_t n = table.n();
    if (n == 0) fail_validation(kModule, "empty table");

    const Column& outcome = table.require(plan.outcome);
    if (outcome.type == ColumnType::Categorical)
        fail_validation(kModule, "outcome column '" + plan.outcome + "' must be numeric 0/1");
    bool has_zero = false, has_one = false;
    for (double v : outcome.numeric) {
        if (!is_zero_one(v))
            fail_validation(kModule, "outcome column '" + plan.outcome +
                                         "' contains a value other than 0/1");
        (v == 1.0 ? has_one : has_zero) = true;
    }
    if (!has_zero || !has_one)
        fail_validation(kModule, "outcome column '" + plan.outcome +
                                     "' must contain both 0 and 1");

    struct PendingTerm {
        TermInfo info;
        const Column* col;
        std::string level;  // for dummies
    };
    std::vector<PendingTerm> pending;

    for (const auto& spec : plan.predictors) {
        const Column& col = table.require(spec.column);
        switch (spec.treatment) {
            case Treatment::Passthrough: {
                if (col.type == ColumnType::Categorical)
                    fail_validation(kModule, "categorical column '" + col.name +
                                                 "' cannot pass through unencoded");
                pending.push_back({TermInfo{col.name, col.name, "", TermKind::Continuous},
                                   &col, ""});
                break;
            }
            case Treatment::Binary: {
                if (col.type == ColumnType::Categorical)
                    fail_validation(kModule, "column '" + col.name +
                                                 "' is categorical, not binary 0/1");
                for (double v : col.numeric)
                    if (!is_zero_one(v))
                        fail_validation(kModule, "binary column '" + col.name +
                                                     "' contains a value other than 0/1");
                pending.push_back({TermInfo{col.name, col.name, "", TermKind::Binary},
                                   &col, ""});
                break;
            }
            case Treatment::Categorical: {
                if (col.type != ColumnType::Categorical)
                    fail_validation(kModule, "column '" + col.name +
                                                 "' is not typed categorical");
                std::map<std::string, std::size_t> counts;
                for (const auto& lab : col.labels) ++counts[lab];
                if (counts.size() < 2)
                    fail_validation(kModule, "categorical column '" + col.name +
                                                 "' has a single level");
                std::string reference;
                if (spec.reference) {
                    if (!counts.count(*spec.reference))
                        fail_validation(kModule, "reference level '" + *spec.reference +
                                                     "' not observed in column '" +
                                                     col.name + "'");
                    reference = *spec.reference;
                } else {
                    // Most frequent level; std::map order breaks count ties
                    // toward the lexicographically smallest.
                    std::size_t best = 0;
                    for (const auto& [lab, cnt] : counts)
                        if (cnt > best) { best = cnt; reference = lab; }
                }
                for (const auto& [lab, cnt] : counts) {
                    if (lab == reference) continue;
                    pending.push_back({TermInfo{col.name + "=" + lab, col.name, lab,
                                                TermKind::Dummy},
                                       &col, lab});
                }
                break;
            }
        }
    }

    if (pending.empty()) fail_validation(kModule, "encoding produced no predictor columns");

    std::set<std::string> seen;
    for (const auto& t : pending)
        if (!seen.insert(t.info.term).second)
            fail_validation(kModule, "duplicate term name '" + t.info.term + "'");

    DesignMatrix dm;
    dm.X.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(pending.size()));
    dm.y.resize(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i)
        dm.y(static_cast<Eigen::Index>(i)) = outcome.numeric[i];

    for (std::size_t j = 0; j < pending.size(); ++j) {
        const auto& t = pending[j];
        auto xj = dm.X.col(static_cast<Eigen::Index>(j));
        if (t.info.kind == TermKind::Dummy) {
            for (std::size_t i = 0; i < n; ++i)
                xj(static_cast<Eigen::Index>(i)) = t.col->labels[i] == t.level ? 1.0 : 0.0;
        } else {
            for (std::size_t i = 0; i < n; ++i)
                xj(static_cast<Eigen::Index>(i)) = t.col->numeric[i];
        }
        dm.terms.push_back(t.info);
    }
    return dm;
}

std::pair<Eigen::MatrixXd, Standardizer> standardize(const DesignMatrix& dm) {
    const Eigen::Index n = dm.X.rows();
    const Eigen::Index p = dm.X.cols();
    if (p < 1) fail_validation(kModule, "design matrix has no columns");

    Standardizer std_;
    std_.mean.resize(p);
    std_.scale.resize(p);
    for (Eigen::Index j = 0; j < p; ++j) {
        const double m = dm.X.col(j).mean();
        const double var = (dm.X.col(j).array() - m).square().sum() / static_cast<double>(n);
        if (!(var > 0.0))
            fail_validation(kModule, "constant column '" + dm.terms[static_cast<std::size_t>(j)].term +
                                         "' cannot be standardized");
        std_.mean(j) = m;
        std_.scale(j) = std::sqrt(var);
    }
    return {std_.apply(dm.X), std_};
}

Eigen::VectorXd destandardize(const Eigen::VectorXd& beta_std, const Standardizer& std_) {
    const Eigen::Index p = std_.mean.size();
    if (beta_std.size() != p + 1)
        fail_validation(kModule, "coefficient vector length " + std::to_string(beta_std.size()) +
                                     " does not match p+1 = " + std::to_string(p + 1));
    Eigen::VectorXd beta(p + 1);
    double intercept = beta_std(0);
    for (Eigen::Index j = 0; j < p; ++j) {
        beta(j + 1) = beta_std(j + 1) / std_.scale(j);
        intercept -= beta_std(j + 1) * std_.mean(j) / std_.scale(j);
    }
    beta(0) = intercept;
    return beta;
}

Eigen::MatrixXd with_intercept(const Eigen::MatrixXd& X) {
    Eigen::MatrixXd out(X.rows(), X.cols() + 1);
    out.col(0).setOnes();
    out.rightCols(X.cols()) = X;
    return out;
}

}  // namespace riskreg
