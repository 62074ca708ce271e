#pragma once

// Dense bounded-variable primal simplex.
//
//   minimize c'x  subject to  A x (<=|=|>=) b,  lower <= x <= upper
//
// Every row receives a slack column; rows whose slack cannot absorb the
// initial residual receive an artificial column, driven to zero in phase 1.
// Pricing is Dantzig's rule, falling back to Bland's rule after a run of
// degenerate pivots.

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

namespace facloc::simplex {

enum class Relation : std::uint8_t { LessEqual, Equal, GreaterEqual };

enum class Status { Optimal, Infeasible, Unbounded, IterationLimit };

template <typename Scalar>
struct Options {
  Scalar optimality_tolerance = Scalar(1e-9);
  Scalar pivot_tolerance = Scalar(1e-9);
  Scalar feasibility_tolerance = Scalar(1e-8);
  int max_iterations = 200000;
  /// Consecutive degenerate pivots tolerated before switching to Bland's rule.
  int degenerate_run_limit = 50;
};

template <typename Scalar>
struct Result {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  Status status = Status::Infeasible;
  Vector x;
  Scalar objective = Scalar(0);
  int iterations = 0;
};

template <typename Scalar>
class BoundedSimplex {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  BoundedSimplex(const Matrix& A, const Vector& b, const std::vector<Relation>& relations, const Vector& c,
                 const Vector& lower, const Vector& upper, Options<Scalar> options = {})
      : opts_(options), m_(A.rows()), n_(A.cols()), b_(b) {
    build(A, relations, c, lower, upper);
  }

  Result<Scalar> solve() {
    Result<Scalar> result;
    if (num_artificial_ > 0) {
      Vector phase1 = Vector::Zero(cols_);
      phase1.tail(num_artificial_).setOnes();
      const Status s = iterate(phase1, result.iterations);
      if (s == Status::IterationLimit) {
        result.status = s;
        return result;
      }
      const Scalar infeasibility = x_.tail(num_artificial_).sum();
      if (infeasibility > opts_.feasibility_tolerance * (Scalar(1) + b_.cwiseAbs().maxCoeff())) {
        result.status = Status::Infeasible;
        return result;
      }
      // Artificials may stay basic at zero but can never grow again.
      for (Eigen::Index a = cols_ - num_artificial_; a < cols_; ++a) {
        lower_(a) = Scalar(0);
        upper_(a) = Scalar(0);
        x_(a) = Scalar(0);
      }
    }
    const Status s = iterate(cost_, result.iterations);
    result.status = s;
    if (s != Status::Optimal) return result;
    recompute_basic_values();
    result.x = x_.head(n_);
    result.objective = cost_.head(n_).dot(result.x);
    return result;
  }

 private:
  void build(const Matrix& A, const std::vector<Relation>& rel, const Vector& c, const Vector& lower,
             const Vector& upper) {
    constexpr Scalar inf = std::numeric_limits<Scalar>::infinity();
    Vector x0(n_);
    for (Eigen::Index j = 0; j < n_; ++j) {
      if (std::isfinite(static_cast<double>(lower(j))))
        x0(j) = lower(j);
      else if (std::isfinite(static_cast<double>(upper(j))))
        x0(j) = upper(j);
      else
        x0(j) = Scalar(0);
    }
    const Vector residual = b_ - A * x0;

    std::vector<Eigen::Index> needs_artificial;
    for (Eigen::Index i = 0; i < m_; ++i) {
      const Scalar r = residual(i);
      const bool slack_ok = (rel[i] == Relation::LessEqual && r >= Scalar(0)) ||
                            (rel[i] == Relation::GreaterEqual && r <= Scalar(0)) ||
                            (rel[i] == Relation::Equal && r == Scalar(0));
      if (!slack_ok) needs_artificial.push_back(i);
    }
    num_artificial_ = static_cast<Eigen::Index>(needs_artificial.size());
    cols_ = n_ + m_ + num_artificial_;

    full_ = Matrix::Zero(m_, cols_);
    full_.leftCols(n_) = A;
    full_.block(0, n_, m_, m_).setIdentity();
    lower_.resize(cols_);
    upper_.resize(cols_);
    x_ = Vector::Zero(cols_);
    lower_.head(n_) = lower;
    upper_.head(n_) = upper;
    x_.head(n_) = x0;
    for (Eigen::Index i = 0; i < m_; ++i) {
      switch (rel[i]) {
        case Relation::LessEqual: lower_(n_ + i) = Scalar(0), upper_(n_ + i) = inf; break;
        case Relation::GreaterEqual: lower_(n_ + i) = -inf, upper_(n_ + i) = Scalar(0); break;
        case Relation::Equal: lower_(n_ + i) = Scalar(0), upper_(n_ + i) = Scalar(0); break;
      }
    }

    basis_.resize(m_);
    for (Eigen::Index i = 0; i < m_; ++i) {
      basis_[i] = n_ + i;
      x_(n_ + i) = residual(i);
    }
    for (Eigen::Index a = 0; a < num_artificial_; ++a) {
      const Eigen::Index row = needs_artificial[a];
      const Eigen::Index col = n_ + m_ + a;
      const Scalar sign = residual(row) >= Scalar(0) ? Scalar(1) : Scalar(-1);
      full_(row, col) = sign;
      lower_(col) = Scalar(0);
      upper_(col) = inf;
      x_(n_ + row) = Scalar(0);
      x_(col) = sign * residual(row);
      basis_[row] = col;
    }

    // Tableau = B^-1 [A I art]; B is diagonal with entries +-1 here.
    tableau_ = full_;
    for (Eigen::Index a = 0; a < num_artificial_; ++a) {
      const Eigen::Index row = needs_artificial[a];
      tableau_.row(row) *= full_(row, n_ + m_ + a);
    }
    in_basis_.assign(cols_, -1);
    for (Eigen::Index i = 0; i < m_; ++i) in_basis_[basis_[i]] = i;

    cost_ = Vector::Zero(cols_);
    cost_.head(n_) = c;
  }

  Status iterate(const Vector& cost, int& iterations) {
    Vector cb(m_);
    for (Eigen::Index i = 0; i < m_; ++i) cb(i) = cost(basis_[i]);
    Vector reduced = cost - tableau_.transpose() * cb;
    int degenerate_run = 0;

    while (true) {
      if (iterations >= opts_.max_iterations) return Status::IterationLimit;
      const bool bland = degenerate_run >= opts_.degenerate_run_limit;

      Eigen::Index enter = -1;
      int direction = 0;
      Scalar best = Scalar(0);
      for (Eigen::Index j = 0; j < cols_; ++j) {
        if (in_basis_[j] >= 0 || lower_(j) == upper_(j)) continue;
        const Scalar dj = reduced(j);
        int dir = 0;
        if (dj < -opts_.optimality_tolerance && x_(j) < upper_(j))
          dir = 1;
        else if (dj > opts_.optimality_tolerance && x_(j) > lower_(j))
          dir = -1;
        if (dir == 0) continue;
        if (bland) {
          enter = j, direction = dir;
          break;
        }
        if (std::abs(dj) > best) best = std::abs(dj), enter = j, direction = dir;
      }
      if (enter < 0) return Status::Optimal;

      constexpr Scalar inf = std::numeric_limits<Scalar>::infinity();
      Scalar step = upper_(enter) - lower_(enter);  // bound flip
      Eigen::Index leave = -1;
      Scalar leave_pivot = Scalar(0);
      for (Eigen::Index i = 0; i < m_; ++i) {
        const Scalar alpha = tableau_(i, enter) * Scalar(direction);
        const Eigen::Index bv = basis_[i];
        Scalar limit = inf;
        if (alpha > opts_.pivot_tolerance) {
          if (lower_(bv) > -inf) limit = std::max(Scalar(0), (x_(bv) - lower_(bv)) / alpha);
        } else if (alpha < -opts_.pivot_tolerance) {
          if (upper_(bv) < inf) limit = std::max(Scalar(0), (upper_(bv) - x_(bv)) / -alpha);
        } else {
          continue;
        }
        bool take = limit < step;
        if (!take && limit == step && leave >= 0) {
          take = bland ? bv < basis_[leave] : std::abs(alpha) > std::abs(leave_pivot);
        }
        if (take) step = limit, leave = i, leave_pivot = alpha;
      }
      if (!(step < inf)) return Status::Unbounded;

      ++iterations;
      degenerate_run = step <= Scalar(1e-12) ? degenerate_run + 1 : 0;
      const Scalar delta = step * Scalar(direction);
      x_(enter) += delta;
      for (Eigen::Index i = 0; i < m_; ++i) x_(basis_[i]) -= tableau_(i, enter) * delta;

      if (leave < 0) {
        // Entering variable moved to its opposite bound.
        x_(enter) = direction > 0 ? upper_(enter) : lower_(enter);
        continue;
      }
      const Eigen::Index out = basis_[leave];
      x_(out) = leave_pivot > Scalar(0) ? lower_(out) : upper_(out);
      pivot(leave, enter, reduced);
    }
  }

  void pivot(Eigen::Index row, Eigen::Index col, Vector& reduced) {
    const Scalar p = tableau_(row, col);
    tableau_.row(row) /= p;
    Vector column = tableau_.col(col);
    column(row) = Scalar(0);
    tableau_.noalias() -= column * tableau_.row(row);
    reduced -= reduced(col) * tableau_.row(row).transpose();
    in_basis_[basis_[row]] = -1;
    basis_[row] = col;
    in_basis_[col] = row;
  }

  // Basic values from the original system, removing drift accumulated by
  // the incremental updates.
  void recompute_basic_values() {
    Matrix basis_cols(m_, m_);
    Vector rhs = b_;
    for (Eigen::Index j = 0; j < cols_; ++j)
      if (in_basis_[j] < 0) rhs -= full_.col(j) * x_(j);
    for (Eigen::Index i = 0; i < m_; ++i) basis_cols.col(i) = full_.col(basis_[i]);
    if (m_ == 0) return;
    const Vector xb = basis_cols.partialPivLu().solve(rhs);
    for (Eigen::Index i = 0; i < m_; ++i) {
      const Eigen::Index bv = basis_[i];
      x_(bv) = std::min(std::max(xb(i), lower_(bv)), upper_(bv));
    }
  }

  Options<Scalar> opts_;
  Eigen::Index m_ = 0;
  Eigen::Index n_ = 0;
  Eigen::Index cols_ = 0;
  Eigen::Index num_artificial_ = 0;
  Vector b_;
  Matrix full_;
  Matrix tableau_;
  Vector lower_, upper_, x_, cost_;
  std::vector<Eigen::Index> basis_;
  std::vector<Eigen::Index> in_basis_;
};

/// Convenience wrapper around BoundedSimplex.
template <typename Scalar>
Result<Scalar> minimize(const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& A,
                        const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& b, const std::vector<Relation>& relations,
                        const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& c,
                        const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& lower,
                        const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& upper, Options<Scalar> options = {}) {
  return BoundedSimplex<Scalar>(A, b, relations, c, lower, upper, options).solve();
}

}  // namespace facloc::simplex
