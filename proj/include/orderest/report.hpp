#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "orderest/matrix_estimator.hpp"
#include "orderest/ordinal.hpp"
#include "orderest/sim.hpp"

namespace orderest::report {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;
std::string version();

// Non-finite values become the strings "inf", "-inf" and "nan".
Json number(double x);
Json matrix(const Matrix& m);

// {spec, version, command, seed, config} opening every report.
Json header(const std::string& command, std::uint64_t seed, Json config);

Json estimate(const MatrixEstimate& e, const MatrixOrderSpec& spec, double feasibility_tol);

// Contributions resolved against the spec for their chain.
Json test_result(const TestResult& r, const MatrixOrderSpec& spec);

Json estimation_sim(const EstimationSimReport& r);
Json power_sim(const PowerSimReport& r);

// Aligned table with the columns I, J, restricted bias, unrestricted bias,
// quadratic and quartic loss reduction.
std::string estimation_table(const std::vector<EstimationSimReport>& rows);

// scenario,groups,categories,n,method,rate,se for plotting rejection rates.
std::string power_csv(const std::vector<PowerSimReport>& rows);

// Two-space indent, trailing newline.
std::string dump(const Json& j);

}  // namespace orderest::report
