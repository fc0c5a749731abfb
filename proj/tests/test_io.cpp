#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "orderest/demo_data.hpp"
#include "orderest/error.hpp"
#include "orderest/io.hpp"

using namespace orderest;

namespace {

template <class F>
orderest::ParseError parse_failure(F&& f) {
  try {
    f();
  } catch (const orderest::ParseError& e) {
    return e;
  }
  ADD_FAILURE() << "no ParseError";
  return orderest::ParseError("none");
}

}  // namespace

TEST(CountCsv, Reads) {
  std::istringstream in("group,c1,c2,c3\nA,1,2,3\nB,0,5,1\n");
  const auto t = io::read_counts_csv(in);
  EXPECT_EQ(t.groups, (std::vector<std::string>{"A", "B"}));
  EXPECT_EQ(t.counts, OrdinalCounts({{1, 2, 3}, {0, 5, 1}}));
}

TEST(CountCsv, DeclaredSizes) {
  std::istringstream ok("group,c1,c2,n\nA,1,2,3\nB,2,1,3\n");
  EXPECT_NO_THROW(io::read_counts_csv(ok));
  std::istringstream bad("group,c1,c2,n\nA,1,2,3\nB,2,1,4\n");
  const auto e = parse_failure([&] { io::read_counts_csv(bad); });
  EXPECT_EQ(e.line(), 3u);
  EXPECT_EQ(e.column(), 7u);
}

TEST(CountCsv, ErrorsCarryPosition) {
  std::istringstream neg("group,c1,c2\nA,1,x\n");
  auto e = parse_failure([&] { io::read_counts_csv(neg); });
  EXPECT_EQ(e.line(), 2u);
  EXPECT_EQ(e.column(), 5u);
  std::istringstream ragged("group,c1,c2\nA,1\n");
  e = parse_failure([&] { io::read_counts_csv(ragged); });
  EXPECT_EQ(e.line(), 2u);
  std::istringstream header("grp,c1,c2\nA,1,2\n");
  EXPECT_THROW(io::read_counts_csv(header), orderest::ParseError);
  std::istringstream one("group,c1,c2\nA,1,2\n");
  EXPECT_THROW(io::read_counts_csv(one), orderest::ParseError);
}

TEST(CountCsv, RoundTrip) {
  std::mt19937_64 g(1);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t I = 2 + g() % 4, J = 2 + g() % 6;
    std::vector<std::vector<long long>> rows(I, std::vector<long long>(J));
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < I; ++i) {
      labels.push_back("g" + std::to_string(i));
      for (auto& x : rows[i]) x = static_cast<long long>(g() % 20);
      rows[i][0] += 1;
    }
    const io::CountTable t{labels, OrdinalCounts(rows)};
    std::stringstream buf;
    io::write_counts_csv(buf, t);
    const auto back = io::read_counts_csv(buf);
    EXPECT_EQ(back.groups, t.groups);
    EXPECT_EQ(back.counts, t.counts);
  }
}

TEST(RecordCsv, ReadsAndRoundTrips) {
  const auto d = demo::dataset();
  const io::RecordTable t{demo::genotypes(), demo::variables(), d};
  std::stringstream buf;
  io::write_records_csv(buf, t);
  // Unobserved top categories cannot be recovered from records alone.
  const auto back = io::read_records_csv(buf, 5);
  EXPECT_EQ(back.groups, t.groups);
  EXPECT_EQ(back.variables, t.variables);
  for (std::size_t v = 0; v < d.variables(); ++v) EXPECT_EQ(back.data.counts(v), d.counts(v));
}

TEST(RecordCsv, Errors) {
  std::istringstream dup("group,subject,var,category\nA,s1,x,0\nA,s1,x,1\nB,s2,x,0\n");
  auto e = parse_failure([&] { io::read_records_csv(dup); });
  EXPECT_EQ(e.line(), 3u);
  std::istringstream missing("group,subject,var,category\nA,s1,x,0\nA,s1,y,1\nB,s2,x,0\n");
  EXPECT_THROW(io::read_records_csv(missing), orderest::ParseError);
  std::istringstream neg("group,subject,var,category\nA,s1,x,-1\nB,s2,x,0\n");
  e = parse_failure([&] { io::read_records_csv(neg); });
  EXPECT_EQ(e.column(), 8u);
}

TEST(RecordCsv, CategoryCount) {
  std::istringstream in("group,subject,var,category\nA,1,x,0\nB,2,x,1\n");
  EXPECT_EQ(io::read_records_csv(in).data.categories(0), 2u);
  std::istringstream in5("group,subject,var,category\nA,1,x,0\nB,2,x,1\n");
  EXPECT_EQ(io::read_records_csv(in5, 5).data.categories(0), 5u);
}

TEST(MatrixCsv, Reads) {
  std::istringstream in("# comment\n0,2\n\n2, 1.5\n");
  EXPECT_EQ(io::read_matrix_csv(in), (Matrix{{0, 2}, {2, 1.5}}));
  std::istringstream bad("1,2\n3\n");
  EXPECT_EQ(parse_failure([&] { io::read_matrix_csv(bad); }).line(), 2u);
  std::istringstream nan("1,nan\n");
  EXPECT_THROW(io::read_matrix_csv(nan), orderest::ParseError);
}
