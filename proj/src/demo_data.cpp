#include "orderest/demo_data.hpp"

#include <cmath>

#include "orderest/error.hpp"

namespace orderest::demo {

namespace {
constexpr std::size_t kSubjects = 10;
}

const std::vector<std::string>& genotypes() {
  static const std::vector<std::string> g{"COX-1-d", "WT", "COX-2-d"};
  return g;
}

const std::vector<std::string>& variables() {
  static const std::vector<std::string> v{"microblister",     "ulceration", "epidermal_necrosis",
                                          "acute_inflammation", "hemorrhage", "dermal_necrosis"};
  return v;
}

const std::vector<std::string>& levels() {
  static const std::vector<std::string> l{"unremarkable", "minimal", "mild", "moderate", "marked"};
  return l;
}

const std::vector<std::vector<std::vector<double>>>& cumulative_table() {
  static const std::vector<std::vector<std::vector<double>>> t{
      {{0, 0.2, 1, 1, 1}, {0, 0.5, 0.9, 1, 1}, {0.3, 0.8, 1, 1, 1}},
      {{0.4, 0.5, 0.8, 0.9, 1}, {0.8, 0.9, 1, 1, 1}, {1, 1, 1, 1, 1}},
      {{0, 0, 0, 0.3, 1}, {0, 0, 0.1, 0.8, 1}, {0.1, 0.2, 0.7, 0.8, 1}},
      {{0, 0, 0.5, 1, 1}, {0, 0, 0.6, 1, 1}, {0.1, 0.5, 1, 1, 1}},
      {{0, 0.1, 0.9, 1, 1}, {0, 0, 1, 1, 1}, {0.1, 0.4, 1, 1, 1}},
      {{0, 0.1, 0.8, 1, 1}, {0, 0.1, 0.9, 1, 1}, {0.2, 0.4, 1, 1, 1}},
  };
  return t;
}

OrdinalCounts counts(std::size_t variable) {
  if (variable >= variables().size()) throw IndexError("demo variable out of range");
  std::vector<std::vector<long long>> rows;
  for (const auto& cum : cumulative_table()[variable]) {
    std::vector<long long> row;
    long long prev = 0;
    for (double c : cum) {
      const auto total = static_cast<long long>(std::lround(c * kSubjects));
      row.push_back(total - prev);
      prev = total;
    }
    rows.push_back(std::move(row));
  }
  return OrdinalCounts(std::move(rows));
}

MultiResponseDataset dataset() {
  const std::size_t nv = variables().size();
  std::vector<std::vector<MultiResponseDataset::Record>> groups(genotypes().size());
  for (std::size_t g = 0; g < groups.size(); ++g) groups[g].assign(kSubjects, MultiResponseDataset::Record(nv));
  for (std::size_t v = 0; v < nv; ++v) {
    const OrdinalCounts c = counts(v);
    for (std::size_t g = 0; g < c.groups(); ++g) {
      std::size_t k = 0;
      for (std::size_t j = 0; j < c.categories(); ++j)
        for (long long m = 0; m < c.count(g, j); ++m) groups[g][k++][v] = static_cast<int>(j);
    }
  }
  return MultiResponseDataset(std::vector<std::size_t>(nv, levels().size()), std::move(groups));
}

const std::vector<double>& published_p_values() {
  static const std::vector<double> p{0.0310, 0.0077, 0.0034, 0.0247, 0.1181, 0.5170};
  return p;
}

}  // namespace orderest::demo
