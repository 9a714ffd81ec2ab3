#pragma once

#include <string>

#include "ssglm/types.hpp"

namespace ssglm {

// Reads a rectangular numeric CSV with a header row. `response_column` names
// the y column; the remaining columns become the design in header order.
// Non-numeric or non-finite cells, ragged rows, and a missing response
// column raise DataError naming the offending row/column.
Dataset ingest_csv(const std::string& path, const std::string& response_column, bool intercept);

}  // namespace ssglm
