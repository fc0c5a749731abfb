#include "orderest/matrix_estimator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "orderest/error.hpp"

namespace orderest {

namespace {

constexpr double kRank1Tolerance = 1e-12;

std::string shape(std::size_t r, std::size_t c) { return std::to_string(r) + "x" + std::to_string(c); }

void require_shape(const Matrix& m, std::size_t rows, std::size_t cols, const char* what) {
  if (m.rows() != rows || m.cols() != cols) {
    throw DimensionError(std::string(what) + " is " + shape(m.rows(), m.cols()) + ", expected " +
                         shape(rows, cols));
  }
}

}  // namespace

std::optional<Rank1Certificate> check_rank1(const Matrix& w) {
  if (w.rows() == 0 || w.cols() == 0) return std::nullopt;
  const double pivot = w(0, 0);
  if (!(pivot > 0.0)) return std::nullopt;
  for (std::size_t i = 0; i < w.rows(); ++i) {
    for (std::size_t j = 0; j < w.cols(); ++j) {
      const double a = w(i, j) * pivot;
      const double b = w(i, 0) * w(0, j);
      if (std::abs(a - b) > kRank1Tolerance * std::max(std::abs(a), std::abs(b))) return std::nullopt;
    }
  }
  Rank1Certificate cert;
  cert.u = w.col(0);
  cert.v.resize(w.cols());
  for (std::size_t j = 0; j < w.cols(); ++j) cert.v[j] = w(0, j) / pivot;
  for (std::size_t i = 0; i < w.rows(); ++i) {
    for (std::size_t j = 0; j < w.cols(); ++j) {
      const double rec = cert.u[i] * cert.v[j];
      if (std::abs(rec - w(i, j)) >= kRank1Tolerance * std::abs(w(i, j))) return std::nullopt;
    }
  }
  return cert;
}

WeightMatrix::WeightMatrix(Matrix entries) : entries_(std::move(entries)) {
  for (std::size_t i = 0; i < entries_.rows(); ++i) {
    for (std::size_t j = 0; j < entries_.cols(); ++j) {
      const double v = entries_(i, j);
      if (!(v > 0.0) || !std::isfinite(v)) {
        throw DomainError("weight (" + std::to_string(i) + ", " + std::to_string(j) +
                          ") must be positive and finite");
      }
    }
  }
  certificate_ = check_rank1(entries_);
}

WeightMatrix WeightMatrix::ones(std::size_t rows, std::size_t cols) {
  return WeightMatrix(Matrix(rows, cols, 1.0));
}

MatrixOrderSpec::MatrixOrderSpec(std::size_t rows, std::size_t cols, OrderRestriction row_restriction,
                                 OrderRestriction col_restriction)
    : rows_(rows),
      cols_(cols),
      row_restriction_(std::move(row_restriction)),
      col_restriction_(std::move(col_restriction)) {
  if (row_restriction_.size() != cols_) {
    throw DimensionError("row restriction covers " + std::to_string(row_restriction_.size()) +
                         " elements but rows have " + std::to_string(cols_));
  }
  if (col_restriction_.size() != rows_) {
    throw DimensionError("column restriction covers " + std::to_string(col_restriction_.size()) +
                         " elements but columns have " + std::to_string(rows_));
  }
}

MatrixOrderSpec MatrixOrderSpec::transposed() const {
  return MatrixOrderSpec(cols_, rows_, col_restriction_, row_restriction_);
}

Matrix column_operator(const Matrix& x, const WeightMatrix& w_c, const OrderRestriction& c,
                       const HpOptions& options) {
  require_shape(w_c.entries(), x.rows(), x.cols(), "column weight matrix");
  if (c.size() != x.rows()) throw DimensionError("column restriction size does not match row count");
  if (c.is_trivial()) return x;
  Matrix out = x;
  for (std::size_t j = 0; j < x.cols(); ++j) {
    auto res = hp_estimate(WeightedVector(x.col(j), w_c.entries().col(j)), c, options);
    out.set_col(j, res.values);
  }
  return out;
}

Matrix row_operator(const Matrix& x, const WeightMatrix& w_r, const OrderRestriction& r,
                    const HpOptions& options) {
  require_shape(w_r.entries(), x.rows(), x.cols(), "row weight matrix");
  if (r.size() != x.cols()) throw DimensionError("row restriction size does not match column count");
  if (r.is_trivial()) return x;
  Matrix out = x;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const auto xr = x.row(i);
    const auto wr = w_r.entries().row(i);
    auto res = hp_estimate(WeightedVector({xr.begin(), xr.end()}, {wr.begin(), wr.end()}), r, options);
    std::copy(res.values.begin(), res.values.end(), out.row(i).begin());
  }
  return out;
}

bool in_parameter_space(const Matrix& x, const MatrixOrderSpec& spec, double tol) {
  require_shape(x, spec.rows(), spec.cols(), "matrix");
  for (std::size_t i = 0; i < x.rows(); ++i) {
    if (verify_feasible(x.row(i), spec.row_restriction(), tol)) return false;
  }
  for (std::size_t j = 0; j < x.cols(); ++j) {
    if (verify_feasible(x.col(j), spec.col_restriction(), tol)) return false;
  }
  return true;
}

bool one_cycle_applicable(const MatrixOrderSpec& spec, const WeightMatrix& w_r, const WeightMatrix& w_c) {
  require_shape(w_r.entries(), spec.rows(), spec.cols(), "row weight matrix");
  require_shape(w_c.entries(), spec.rows(), spec.cols(), "column weight matrix");
  return w_r.rank1_certificate().has_value() && w_c.rank1_certificate().has_value();
}

namespace {

struct Limit {
  Matrix value;
  int iterations = 0;
  bool converged = false;
  double last_delta = 0.0;
};

template <class Cycle>
Limit iterate(const Matrix& start, const MatrixOrderSpec& spec, const EstimateOptions& options, Cycle cycle) {
  Limit out{start, 0, false, 0.0};
  for (int q = 1; q <= options.max_cycles; ++q) {
    Matrix next = cycle(out.value);
    out.last_delta = sup_distance(next, out.value);
    out.value = std::move(next);
    out.iterations = q;
    if (in_parameter_space(out.value, spec, options.feasibility_tol) || out.last_delta < options.tol) {
      out.converged = true;
      break;
    }
  }
  return out;
}

}  // namespace

MatrixEstimate estimate(const Matrix& theta_hat, const MatrixOrderSpec& spec, const WeightMatrix& w_r,
                        const WeightMatrix& w_c, const EstimateOptions& options) {
  require_shape(theta_hat, spec.rows(), spec.cols(), "theta_hat");
  require_shape(w_r.entries(), spec.rows(), spec.cols(), "row weight matrix");
  require_shape(w_c.entries(), spec.rows(), spec.cols(), "column weight matrix");
  for (double v : theta_hat.data()) {
    if (!std::isfinite(v)) throw DomainError("theta_hat contains a non-finite entry");
  }
  if (options.max_cycles < 1) throw DomainError("max_cycles must be >= 1");

  const auto& r = spec.row_restriction();
  const auto& c = spec.col_restriction();
  auto col_then_row = [&](const Matrix& x) {
    return row_operator(column_operator(x, w_c, c, options.hp), w_r, r, options.hp);
  };
  auto row_then_col = [&](const Matrix& x) {
    return column_operator(row_operator(x, w_r, r, options.hp), w_c, c, options.hp);
  };

  Limit first = iterate(theta_hat, spec, options, col_then_row);
  Limit second = iterate(theta_hat, spec, options, row_then_col);

  MatrixEstimate est;
  est.final = Matrix(spec.rows(), spec.cols());
  for (std::size_t i = 0; i < spec.rows(); ++i)
    for (std::size_t j = 0; j < spec.cols(); ++j)
      est.final(i, j) = 0.5 * (first.value(i, j) + second.value(i, j));
  est.theta_tilde_1 = std::move(first.value);
  est.theta_tilde_2 = std::move(second.value);
  est.iterations_1 = first.iterations;
  est.iterations_2 = second.iterations;
  est.converged = first.converged && second.converged;
  est.final_delta_1 = first.last_delta;
  est.final_delta_2 = second.last_delta;
  return est;
}

}  // namespace orderest
