#include "riskreg/csv.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "riskreg/error.hpp"

namespace riskreg {

namespace {
constexpr const char* kModule = "cli_reporting";

std::vector<std::string> split_csv_line(const std::string& line, std::size_t line_no) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    if (quoted)
        fail_validation(kModule, "unterminated quote on line " + std::to_string(line_no));
    fields.push_back(cur);
    return fields;
}

bool is_missing(const std::string& s) { return s.empty() || s == "NA"; }

double parse_number(const std::string& s, std::size_t row, const std::string& column) {
    double value = 0.0;
    const char* begin = s.data();
    const char* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end)
        fail_validation(kModule, "unparseable numeric value '" + s + "' in column '" + column +
                                     "', data row " + std::to_string(row));
    return value;
}
}  // namespace

CsvLoadResult load_csv(const std::string& path, const EncodingPlan& plan) {
    std::ifstream in(path);
    if (!in) fail_validation(kModule, "cannot open input file '" + path + "'");

    std::string header_line;
    if (!std::getline(in, header_line))
        fail_validation(kModule, "input file '" + path + "' is empty");
    const auto header = split_csv_line(header_line, 1);

    std::map<std::string, std::size_t> col_index;
    for (std::size_t j = 0; j < header.size(); ++j) col_index[header[j]] = j;

    struct Used {
        std::string name;
        std::size_t index;
        ColumnType type;
    };
    std::vector<Used> used;
    auto require_col = [&](const std::string& name, ColumnType type) {
        auto it = col_index.find(name);
        if (it == col_index.end())
            fail_validation(kModule, "missing column '" + name + "' in '" + path + "'");
        used.push_back({name, it->second, type});
    };
    require_col(plan.outcome, ColumnType::Binary);
    for (const auto& spec : plan.predictors)
        require_col(spec.column, spec.treatment == Treatment::Categorical
                                     ? ColumnType::Categorical
                                     : (spec.treatment == Treatment::Binary
                                            ? ColumnType::Binary
                                            : ColumnType::Continuous));

    std::vector<std::vector<std::string>> kept;
    std::size_t dropped = 0;
    std::string line;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() && in.eof()) break;
        auto fields = split_csv_line(line, line_no);
        bool missing = false;
        for (const auto& u : used) {
            if (u.index >= fields.size() || is_missing(fields[u.index])) {
                missing = true;
                break;
            }
        }
        if (missing) {
            ++dropped;
            continue;
        }
        kept.push_back(std::move(fields));
    }

    CsvLoadResult result;
    result.dropped_rows = dropped;
    for (const auto& u : used) {
        Column col;
        col.name = u.name;
        col.type = u.type;
        for (std::size_t r = 0; r < kept.size(); ++r) {
            const std::string& cell = kept[r][u.index];
            if (u.type == ColumnType::Categorical) {
                col.labels.push_back(cell);
            } else {
                const double v = parse_number(cell, r + 1, u.name);
                if (u.name == plan.outcome && v != 0.0 && v != 1.0)
                    fail_validation(kModule, "outcome value '" + cell + "' in column '" +
                                                 u.name + "', data row " +
                                                 std::to_string(r + 1) + " is not 0/1");
                col.numeric.push_back(v);
            }
        }
        result.table.columns.push_back(std::move(col));
    }
    if (result.table.n() == 0)
        fail_validation(kModule, "no usable rows in '" + path + "'");
    return result;
}

void write_csv(const RawTable& table, const std::string& path) {
    std::ofstream out(path);
    if (!out) fail_validation(kModule, "cannot write '" + path + "'");

    auto quote = [](const std::string& s) {
        if (s.find_first_of(",\"\n") == std::string::npos) return s;
        std::string q = "\"";
        for (char c : s) {
            if (c == '"') q += "\"\"";
            else q += c;
        }
        return q + "\"";
    };

    for (std::size_t j = 0; j < table.columns.size(); ++j)
        out << (j ? "," : "") << quote(table.columns[j].name);
    out << "\n";
    const std::size_t n = table.n();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < table.columns.size(); ++j) {
            if (j) out << ",";
            const Column& col = table.columns[j];
            if (col.type == ColumnType::Categorical) {
                out << quote(col.labels[i]);
            } else {
                std::ostringstream num;
                num.precision(17);
                num << col.numeric[i];
                out << num.str();
            }
        }
        out << "\n";
    }
    if (!out) fail_validation(kModule, "write failed for '" + path + "'");
}

}  // namespace riskreg
