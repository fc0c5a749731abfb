#pragma once

#include <optional>
#include <vector>

#include "orderest/matrix.hpp"
#include "orderest/order_graph.hpp"
#include "orderest/vector_projector.hpp"

namespace orderest {

struct Rank1Certificate {
  std::vector<double> u;  // length I
  std::vector<double> v;  // length J, entries(i, j) = u[i] * v[j]
};

// Returns (u, v) when every 2x2 minor of W vanishes to relative 1e-12.
std::optional<Rank1Certificate> check_rank1(const Matrix& w);

// Strictly positive weights. The rank-1 certificate is computed on construction.
class WeightMatrix {
 public:
  explicit WeightMatrix(Matrix entries);
  static WeightMatrix ones(std::size_t rows, std::size_t cols);

  const Matrix& entries() const { return entries_; }
  std::size_t rows() const { return entries_.rows(); }
  std::size_t cols() const { return entries_.cols(); }
  const std::optional<Rank1Certificate>& rank1_certificate() const { return certificate_; }

 private:
  Matrix entries_;
  std::optional<Rank1Certificate> certificate_;
};

// One restriction shared by every row (over J indices) and one shared by every
// column (over I indices).
class MatrixOrderSpec {
 public:
  MatrixOrderSpec(std::size_t rows, std::size_t cols, OrderRestriction row_restriction,
                  OrderRestriction col_restriction);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  const OrderRestriction& row_restriction() const { return row_restriction_; }
  const OrderRestriction& col_restriction() const { return col_restriction_; }

  // The spec for the transposed problem.
  MatrixOrderSpec transposed() const;

 private:
  std::size_t rows_;
  std::size_t cols_;
  OrderRestriction row_restriction_;
  OrderRestriction col_restriction_;
};

// Column j of the result is hp_estimate(column j of x, column j of w_c, c).
Matrix column_operator(const Matrix& x, const WeightMatrix& w_c, const OrderRestriction& c,
                       const HpOptions& options = {});

// Row i of the result is hp_estimate(row i of x, row i of w_r, r).
Matrix row_operator(const Matrix& x, const WeightMatrix& w_r, const OrderRestriction& r,
                    const HpOptions& options = {});

// True when both rows and columns of x satisfy the spec within tol.
bool in_parameter_space(const Matrix& x, const MatrixOrderSpec& spec, double tol);

struct EstimateOptions {
  double tol = 1e-10;
  int max_cycles = 1000;
  double feasibility_tol = 1e-9;
  HpOptions hp{};
};

struct MatrixEstimate {
  Matrix theta_tilde_1;  // limit of (row . col)^q
  Matrix theta_tilde_2;  // limit of (col . row)^q
  Matrix final;          // (theta_tilde_1 + theta_tilde_2) / 2
  int iterations_1 = 0;
  int iterations_2 = 0;
  bool converged = false;
  // Sup-norm change over the last cycle of each direction.
  double final_delta_1 = 0.0;
  double final_delta_2 = 0.0;
};

// Both weight matrices carry a rank-1 certificate, so one column and one row
// operation reach the parameter space.
bool one_cycle_applicable(const MatrixOrderSpec& spec, const WeightMatrix& w_r,
                          const WeightMatrix& w_c);

// Alternating column/row estimation in both orders followed by the average.
// A direction stops at the first cycle whose result lies in the parameter
// space (the operators act as the identity there) or whose sup-norm change is
// below tol. Hitting max_cycles yields converged == false with the partial
// limits; the result is then not guaranteed to be feasible.
MatrixEstimate estimate(const Matrix& theta_hat, const MatrixOrderSpec& spec, const WeightMatrix& w_r,
                        const WeightMatrix& w_c, const EstimateOptions& options = {});

}  // namespace orderest
