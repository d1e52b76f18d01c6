#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace riskreg {

enum class ColumnType { Continuous, Binary, Categorical };

struct Column {
    std::string name;
    ColumnType type = ColumnType::Continuous;
    std::vector<double> numeric;        // Continuous / Binary
    std::vector<std::string> labels;    // Categorical

    std::size_t size() const {
        return type == ColumnType::Categorical ? labels.size() : numeric.size();
    }
};

// Raw cohort table: typed columns of equal length. The outcome column is
// designated by the EncodingPlan, not by the table itself.
struct RawTable {
    std::vector<Column> columns;

    std::size_t n() const { return columns.empty() ? 0 : columns.front().size(); }
    const Column* find(const std::string& name) const;
    const Column& require(const std::string& name) const;

    void add_continuous(std::string name, std::vector<double> values);
    void add_binary(std::string name, std::vector<double> values);
    void add_categorical(std::string name, std::vector<std::string> values);
};

enum class Treatment { Passthrough, Binary, Categorical };

struct PredictorSpec {
    std::string column;
    Treatment treatment = Treatment::Passthrough;
    // Reference level for categorical predictors. Empty: most frequent level
    // (ties broken toward the lexicographically smallest).
    std::optional<std::string> reference;
};

struct EncodingPlan {
    std::string outcome;
    std::vector<PredictorSpec> predictors;
};

enum class TermKind { Continuous, Binary, Dummy };

struct TermInfo {
    std::string term;     // unique column name in the encoded design
    std::string source;   // originating table column
    std::string level;    // dummy level, empty otherwise
    TermKind kind = TermKind::Continuous;

    bool is_indicator() const { return kind != TermKind::Continuous; }
};

// Encoded design: n x p numeric predictor matrix (no intercept column),
// binary outcome, and per-column provenance.
struct DesignMatrix {
    Eigen::MatrixXd X;
    Eigen::VectorXd y;
    std::vector<TermInfo> terms;

    std::size_t n() const { return static_cast<std::size_t>(X.rows()); }
    std::size_t p() const { return static_cast<std::size_t>(X.cols()); }
    std::size_t events() const { return static_cast<std::size_t>(y.sum() + 0.5); }
    std::vector<std::string> term_names() const;

    // Row subset (duplicates allowed); used by cross-validation splits and
    // bootstrap resamples.
    DesignMatrix rows(const std::vector<std::size_t>& idx) const;
};

// Per-column centering/scaling with scale = population standard deviation
// (divide by n). Sample sd would differ by sqrt(n/(n-1)) and silently shift
// the lambda parameterization.
struct Standardizer {
    Eigen::VectorXd mean;
    Eigen::VectorXd scale;

    static Standardizer identity(std::size_t p);
    Eigen::MatrixXd apply(const Eigen::MatrixXd& X) const;
    Eigen::MatrixXd invert(const Eigen::MatrixXd& Xstd) const;
};

DesignMatrix encode(const RawTable& table, const EncodingPlan& plan);

std::pair<Eigen::MatrixXd, Standardizer> standardize(const DesignMatrix& dm);

// Maps coefficients (intercept first) fitted on the standardized scale back
// to the original scale; the linear predictor is identical on both scales.
Eigen::VectorXd destandardize(const Eigen::VectorXd& beta_std, const Standardizer& std);

// [1 | X] convenience for the intercept-bearing model matrix.
Eigen::MatrixXd with_intercept(const Eigen::MatrixXd& X);

}  // namespace riskreg
