// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "ftcost/errors.hpp"

namespace ftcost {

enum class OutputFormat { Table, Csv, Json };

OutputFormat output_format_from_string(const std::string& text);

// Doubles for table output: 4 significant digits, locale-independent.
std::string format_sig(double value, int digits = 4);

// Shortest round-trip rendering, identical to the JSON serialization of the
// same value so csv and json outputs carry the same numeric text.
std::string format_full(double value);

// Fixed-width table with a header row and left-aligned columns.
std::string render_table(const std::vector<std::string>& header,
                         const std::vector<std::vector<std::string>>& rows);

std::string render_csv_row(const std::vector<std::string>& fields);

}  // namespace ftcost
