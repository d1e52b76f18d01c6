#pragma once

#include <string>
#include <vector>

#include "riskreg/data_model.hpp"

namespace riskreg {

struct CsvLoadResult {
    RawTable table;
    std::size_t dropped_rows = 0;  // listwise deletions over the used columns
};

// Reads a UTF-8, comma-delimited file with a header row; quoted fields with
// doubled-quote escapes are accepted. Only the outcome and the planned
// predictor columns are materialized, typed per the plan. A row missing any
// used value (empty cell or NA) is dropped and counted.
CsvLoadResult load_csv(const std::string& path, const EncodingPlan& plan);

void write_csv(const RawTable& table, const std::string& path);

}  // namespace riskreg
