#include "orderest/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "orderest/error.hpp"

namespace orderest::io {

namespace {

struct Field {
  std::string text;
  std::size_t column;  // 1-based character offset within the line
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<Field> split_csv(const std::string& line) {
  std::vector<Field> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    const std::string raw = line.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    const auto lead = raw.find_first_not_of(" \t");
    out.push_back({trim(raw), start + 1 + (lead == std::string::npos ? 0 : lead)});
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

bool skippable(const std::string& line) {
  const std::string t = trim(line);
  return t.empty() || t.front() == '#';
}

// Reads non-skippable lines, stripping a UTF-8 byte order mark on the first.
class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  bool next(std::string& line) {
    while (std::getline(in_, line)) {
      ++number_;
      if (number_ == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!skippable(line)) return true;
    }
    return false;
  }

  std::size_t line() const { return number_; }

 private:
  std::istream& in_;
  std::size_t number_ = 0;
};

long long parse_count(const Field& f, std::size_t line) {
  long long v = 0;
  const char* b = f.text.data();
  const char* e = b + f.text.size();
  auto [ptr, ec] = std::from_chars(b, e, v);
  if (f.text.empty() || ec != std::errc() || ptr != e)
    throw ParseError("expected an integer, got '" + f.text + "'", line, f.column);
  if (v < 0) throw ParseError("counts must be nonnegative", line, f.column);
  return v;
}

double parse_real(const Field& f, std::size_t line) {
  double v = 0.0;
  const char* b = f.text.data();
  const char* e = b + f.text.size();
  auto [ptr, ec] = std::from_chars(b, e, v);
  if (f.text.empty() || ec != std::errc() || ptr != e)
    throw ParseError("expected a number, got '" + f.text + "'", line, f.column);
  if (!std::isfinite(v)) throw ParseError("value is not finite", line, f.column);
  return v;
}

std::ifstream open(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  return in;
}

template <class T>
std::size_t index_of(std::vector<T>& names, const T& name) {
  const auto it = std::find(names.begin(), names.end(), name);
  if (it != names.end()) return static_cast<std::size_t>(it - names.begin());
  names.push_back(name);
  return names.size() - 1;
}

}  // namespace

CountTable read_counts_csv(std::istream& in) {
  LineReader reader(in);
  std::string line;
  if (!reader.next(line)) throw ParseError("empty count file", reader.line(), 1);
  auto header = split_csv(line);
  if (header.size() < 3 || header[0].text != "group")
    throw ParseError("count header must be group,c1,...,cJ", reader.line(), 1);
  const bool declared = header.back().text == "n";
  const std::size_t cats = header.size() - 1 - (declared ? 1 : 0);
  if (cats < 2) throw ParseError("need at least two categories", reader.line(), 1);

  std::vector<std::string> groups;
  std::vector<std::vector<long long>> rows;
  std::vector<long long> sizes;
  while (reader.next(line)) {
    const auto fields = split_csv(line);
    if (fields.size() != header.size())
      throw ParseError("expected " + std::to_string(header.size()) + " fields, got " +
                           std::to_string(fields.size()),
                       reader.line(), fields.back().column);
    if (fields[0].text.empty()) throw ParseError("empty group label", reader.line(), fields[0].column);
    if (std::find(groups.begin(), groups.end(), fields[0].text) != groups.end())
      throw ParseError("duplicate group '" + fields[0].text + "'", reader.line(), fields[0].column);
    groups.push_back(fields[0].text);
    std::vector<long long> row;
    long long total = 0;
    for (std::size_t j = 1; j <= cats; ++j) {
      row.push_back(parse_count(fields[j], reader.line()));
      total += row.back();
    }
    if (declared) {
      const long long n = parse_count(fields.back(), reader.line());
      if (n != total)
        throw ParseError("row sums to " + std::to_string(total) + " but declares n = " + std::to_string(n),
                         reader.line(), fields.back().column);
      sizes.push_back(n);
    }
    rows.push_back(std::move(row));
  }
  if (rows.size() < 2) throw ParseError("need at least two groups", reader.line(), 1);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    long long total = 0;
    for (long long c : rows[i]) total += c;
    if (total == 0) throw ParseError("group '" + groups[i] + "' has no subjects", 0, 0);
  }
  return {std::move(groups), OrdinalCounts(std::move(rows))};
}

CountTable read_counts_file(const std::string& path) {
  auto in = open(path);
  return read_counts_csv(in);
}

void write_counts_csv(std::ostream& out, const CountTable& table) {
  out << "group";
  for (std::size_t j = 0; j < table.counts.categories(); ++j) out << ",c" << j + 1;
  out << '\n';
  for (std::size_t i = 0; i < table.counts.groups(); ++i) {
    out << table.groups.at(i);
    for (std::size_t j = 0; j < table.counts.categories(); ++j) out << ',' << table.counts.count(i, j);
    out << '\n';
  }
}

RecordTable read_records_csv(std::istream& in, std::size_t min_categories) {
  LineReader reader(in);
  std::string line;
  if (!reader.next(line)) throw ParseError("empty record file", reader.line(), 1);
  const auto header = split_csv(line);
  const std::vector<std::string> expected{"group", "subject", "var", "category"};
  if (header.size() != expected.size())
    throw ParseError("record header must be group,subject,var,category", reader.line(), 1);
  for (std::size_t k = 0; k < expected.size(); ++k)
    if (header[k].text != expected[k])
      throw ParseError("expected column '" + expected[k] + "'", reader.line(), header[k].column);

  std::vector<std::string> groups;
  std::vector<std::string> variables;
  // per group: subject labels in first-appearance order, and their values
  std::vector<std::vector<std::string>> subjects;
  std::vector<std::vector<std::map<std::size_t, int>>> values;
  std::vector<int> max_category;

  while (reader.next(line)) {
    const auto f = split_csv(line);
    if (f.size() != 4)
      throw ParseError("expected 4 fields, got " + std::to_string(f.size()), reader.line(), f.back().column);
    for (const auto& field : f)
      if (field.text.empty()) throw ParseError("empty field", reader.line(), field.column);
    const std::size_t g = index_of(groups, f[0].text);
    if (g == subjects.size()) {
      subjects.emplace_back();
      values.emplace_back();
    }
    const std::size_t s = index_of(subjects[g], f[1].text);
    if (s == values[g].size()) values[g].emplace_back();
    const std::size_t v = index_of(variables, f[2].text);
    if (v == max_category.size()) max_category.push_back(0);
    const long long c = parse_count(f[3], reader.line());
    if (c > 1000000) throw ParseError("category label too large", reader.line(), f[3].column);
    if (!values[g][s].emplace(v, static_cast<int>(c)).second)
      throw ParseError("duplicate entry for subject '" + f[1].text + "' variable '" + f[2].text + "'",
                       reader.line(), f[1].column);
    max_category[v] = std::max(max_category[v], static_cast<int>(c));
  }
  if (groups.size() < 2) throw ParseError("need at least two groups", reader.line(), 1);

  std::vector<std::size_t> categories;
  for (int m : max_category)
    categories.push_back(std::max(static_cast<std::size_t>(m) + 1, std::max<std::size_t>(min_categories, 2)));
  std::vector<std::vector<MultiResponseDataset::Record>> records(groups.size());
  for (std::size_t g = 0; g < groups.size(); ++g) {
    for (std::size_t s = 0; s < values[g].size(); ++s) {
      if (values[g][s].size() != variables.size())
        throw ParseError("subject '" + subjects[g][s] + "' in group '" + groups[g] +
                             "' is missing a variable",
                         0, 0);
      MultiResponseDataset::Record r(variables.size());
      for (const auto& [v, c] : values[g][s]) r[v] = c;
      records[g].push_back(std::move(r));
    }
  }
  return {std::move(groups), std::move(variables), MultiResponseDataset(std::move(categories), std::move(records))};
}

RecordTable read_records_file(const std::string& path, std::size_t min_categories) {
  auto in = open(path);
  return read_records_csv(in, min_categories);
}

void write_records_csv(std::ostream& out, const RecordTable& table) {
  out << "group,subject,var,category\n";
  std::size_t subject = 0;
  for (std::size_t g = 0; g < table.data.groups(); ++g) {
    for (const auto& r : table.data.records(g)) {
      ++subject;
      for (std::size_t v = 0; v < table.data.variables(); ++v)
        out << table.groups.at(g) << ",s" << subject << ',' << table.variables.at(v) << ',' << r[v] << '\n';
    }
  }
}

bool is_record_csv(const std::string& path) {
  auto in = open(path);
  LineReader reader(in);
  std::string line;
  if (!reader.next(line)) return false;
  const auto header = split_csv(line);
  return header.size() > 1 && header[1].text == "subject";
}

Matrix read_matrix_csv(std::istream& in) {
  LineReader reader(in);
  std::string line;
  std::vector<std::vector<double>> rows;
  while (reader.next(line)) {
    const auto fields = split_csv(line);
    if (!rows.empty() && fields.size() != rows.front().size())
      throw ParseError("expected " + std::to_string(rows.front().size()) + " values, got " +
                           std::to_string(fields.size()),
                       reader.line(), fields.back().column);
    std::vector<double> row;
    for (const auto& f : fields) row.push_back(parse_real(f, reader.line()));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError("empty matrix file", reader.line(), 1);
  return Matrix::from_rows(rows);
}

Matrix read_matrix_file(const std::string& path) {
  auto in = open(path);
  return read_matrix_csv(in);
}

}  // namespace orderest::io
