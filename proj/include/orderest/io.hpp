#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "orderest/matrix.hpp"
#include "orderest/ordinal.hpp"

namespace orderest::io {

// Count CSV: header `group,c1,...,cJ`, one row per group. An optional last
// column `n` declares the group size and is checked against the row sum.
struct CountTable {
  std::vector<std::string> groups;
  OrdinalCounts counts;
};

CountTable read_counts_csv(std::istream& in);
CountTable read_counts_file(const std::string& path);
void write_counts_csv(std::ostream& out, const CountTable& table);

// Record CSV: header `group,subject,var,category`, 0-based categories. Groups
// and variables keep their order of first appearance. A variable's category
// count is max(category) + 1 unless overridden by min_categories.
struct RecordTable {
  std::vector<std::string> groups;
  std::vector<std::string> variables;
  MultiResponseDataset data;
};

RecordTable read_records_csv(std::istream& in, std::size_t min_categories = 0);
RecordTable read_records_file(const std::string& path, std::size_t min_categories = 0);
void write_records_csv(std::ostream& out, const RecordTable& table);

// Either format, chosen by the header.
bool is_record_csv(const std::string& path);

// Plain numeric CSV, no header. Blank lines and lines starting with '#' are skipped.
Matrix read_matrix_csv(std::istream& in);
Matrix read_matrix_file(const std::string& path);

}  // namespace orderest::io
