#include "uavmec/convex/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

namespace uavmec::convex {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// x_j = offset + pos_sign * z[pos] - z[neg]  (neg < 0 when unused)
struct VarMap {
  double offset = 0.0;
  int pos = -1;
  double pos_sign = 1.0;
  int neg = -1;
};

enum class RowKind { LessEq, Eq };

struct Row {
  std::vector<double> coef;  // over the z columns (structural only)
  double rhs = 0.0;
  RowKind kind = RowKind::LessEq;
};

enum class Outcome { Optimal, Unbounded, IterLimit };

class Tableau {
 public:
  Tableau(int rows, int cols) : t_(rows, cols + 1), basis_(rows, -1) { t_.setZero(); }

  double& at(int r, int c) { return t_(r, c); }
  double rhs(int r) const { return t_(r, t_.cols() - 1); }
  double& rhs(int r) { return t_(r, t_.cols() - 1); }
  int rows() const { return static_cast<int>(t_.rows()); }
  int cols() const { return static_cast<int>(t_.cols()) - 1; }
  std::vector<int>& basis() { return basis_; }

  void pivot(int r, int c, Eigen::VectorXd& obj) {
    const double p = t_(r, c);
    t_.row(r) /= p;
    for (int i = 0; i < rows(); ++i) {
      if (i == r) continue;
      const double f = t_(i, c);
      if (f != 0.0) t_.row(i) -= f * t_.row(r);
    }
    const double f = obj(c);
    if (f != 0.0) obj -= f * t_.row(r).transpose();
    basis_[r] = c;
  }

  // Minimizes the cost row `obj` (reduced costs, last entry = -value) over
  // columns [0, allowed_cols).
  Outcome run(Eigen::VectorXd& obj, int allowed_cols, const LpOptions& opt, int& pivots) {
    bool bland = false;
    int degenerate_streak = 0;
    while (true) {
      int enter = -1;
      double best = -opt.pivot_tol;
      for (int j = 0; j < allowed_cols; ++j) {
        if (obj(j) < best) {
          enter = j;
          if (bland) break;
          best = obj(j);
        }
      }
      if (enter < 0) return Outcome::Optimal;

      int leave = -1;
      double best_ratio = kInf;
      for (int i = 0; i < rows(); ++i) {
        const double a = t_(i, enter);
        if (a <= opt.pivot_tol) continue;
        const double ratio = rhs(i) / a;
        if (ratio < best_ratio - 1e-12 ||
            (ratio <= best_ratio + 1e-12 && leave >= 0 && basis_[i] < basis_[leave])) {
          if (ratio < best_ratio) best_ratio = ratio;
          leave = i;
        }
      }
      if (leave < 0) return Outcome::Unbounded;
      if (++pivots > opt.max_pivots) return Outcome::IterLimit;

      degenerate_streak = best_ratio <= opt.pivot_tol ? degenerate_streak + 1 : 0;
      if (degenerate_streak >= opt.degenerate_streak_for_bland) bland = true;
      pivot(leave, enter, obj);
      for (int i = 0; i < rows(); ++i)
        if (rhs(i) < 0.0 && rhs(i) > -opt.pivot_tol) rhs(i) = 0.0;
    }
  }

 private:
  Eigen::MatrixXd t_;
  std::vector<int> basis_;
};

void check_shapes(const LinearProgram& lp) {
  const auto n = lp.objective.size();
  auto fail = [](const char* what) { throw LpShapeError(std::string("solve_lp: ") + what); };
  if (lp.lower.size() != n || lp.upper.size() != n) fail("bounds must match the objective size");
  if (lp.ineq.rows() > 0 && lp.ineq.cols() != n) fail("inequality matrix has wrong column count");
  if (lp.ineq.rows() != lp.ineq_rhs.size()) fail("inequality rhs has wrong size");
  if (lp.eq.rows() > 0 && lp.eq.cols() != n) fail("equality matrix has wrong column count");
  if (lp.eq.rows() != lp.eq_rhs.size()) fail("equality rhs has wrong size");
}

}  // namespace

LinearProgram LinearProgram::with_dimension(int n) {
  LinearProgram lp;
  lp.objective = Eigen::VectorXd::Zero(n);
  lp.ineq.resize(0, n);
  lp.ineq_rhs.resize(0);
  lp.eq.resize(0, n);
  lp.eq_rhs.resize(0);
  lp.lower = Eigen::VectorXd::Zero(n);
  lp.upper = Eigen::VectorXd::Constant(n, kInf);
  return lp;
}

SolveStatus solve_lp(const LinearProgram& lp, const LpOptions& opt) {
  check_shapes(lp);
  const int n = lp.dimension();
  SolveStatus result;

  // Shift/split variables so every structural column is >= 0.
  std::vector<VarMap> vars(static_cast<std::size_t>(n));
  std::vector<std::pair<int, double>> bound_rows;  // z[col] <= width
  int nstruct = 0;
  for (int j = 0; j < n; ++j) {
    const double lo = lp.lower(j), hi = lp.upper(j);
    if (lo > hi) {
      result.code = SolveCode::Infeasible;
      return result;
    }
    VarMap& v = vars[j];
    if (std::isfinite(lo)) {
      v.offset = lo;
      v.pos = nstruct++;
      if (std::isfinite(hi)) bound_rows.emplace_back(v.pos, hi - lo);
    } else if (std::isfinite(hi)) {
      v.offset = hi;
      v.pos = nstruct++;
      v.pos_sign = -1.0;
    } else {
      v.pos = nstruct++;
      v.neg = nstruct++;
    }
  }

  auto map_row = [&](const Eigen::RowVectorXd& a, double b, RowKind kind) {
    Row r;
    r.coef.assign(static_cast<std::size_t>(nstruct), 0.0);
    double shift = 0.0;
    for (int j = 0; j < n; ++j) {
      const double aj = a(j);
      if (aj == 0.0) continue;
      const VarMap& v = vars[j];
      shift += aj * v.offset;
      r.coef[v.pos] += aj * v.pos_sign;
      if (v.neg >= 0) r.coef[v.neg] -= aj;
    }
    r.rhs = b - shift;
    r.kind = kind;
    return r;
  };

  std::vector<Row> rows;
  for (int i = 0; i < lp.ineq.rows(); ++i)
    rows.push_back(map_row(lp.ineq.row(i), lp.ineq_rhs(i), RowKind::LessEq));
  for (const auto& [col, width] : bound_rows) {
    Row r;
    r.coef.assign(static_cast<std::size_t>(nstruct), 0.0);
    r.coef[col] = 1.0;
    r.rhs = width;
    rows.push_back(std::move(r));
  }
  for (int i = 0; i < lp.eq.rows(); ++i)
    rows.push_back(map_row(lp.eq.row(i), lp.eq_rhs(i), RowKind::Eq));

  const int m = static_cast<int>(rows.size());
  int nslack = 0;
  for (const Row& r : rows) nslack += r.kind == RowKind::LessEq;
  const int nz = nstruct + nslack;

  // K z = h with h >= 0; artificials where no slack can start basic.
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(m, nz);
  Eigen::VectorXd h(m);
  std::vector<int> start_basic(static_cast<std::size_t>(m), -1);
  int slack = nstruct;
  for (int i = 0; i < m; ++i) {
    const Row& r = rows[i];
    for (int j = 0; j < nstruct; ++j) K(i, j) = r.coef[j];
    h(i) = r.rhs;
    int s = -1;
    if (r.kind == RowKind::LessEq) {
      s = slack++;
      K(i, s) = 1.0;
    }
    if (h(i) < 0.0) {
      K.row(i) *= -1.0;
      h(i) = -h(i);
    } else if (s >= 0) {
      start_basic[i] = s;
    }
  }
  int nart = 0;
  for (int b : start_basic) nart += b < 0;
  const int ncols = nz + nart;

  Tableau tab(m, ncols);
  Eigen::VectorXd phase1 = Eigen::VectorXd::Zero(ncols + 1);
  int art = nz;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < nz; ++j) tab.at(i, j) = K(i, j);
    tab.rhs(i) = h(i);
    if (start_basic[i] >= 0) {
      tab.basis()[i] = start_basic[i];
    } else {
      tab.at(i, art) = 1.0;
      tab.basis()[i] = art;
      phase1(art) = 1.0;
      ++art;
    }
  }
  for (int i = 0; i < m; ++i) {
    if (tab.basis()[i] >= nz) {
      for (int j = 0; j <= ncols; ++j) phase1(j) -= (j == ncols ? tab.rhs(i) : tab.at(i, j));
    }
  }

  int pivots = 0;
  if (nart > 0) {
    const Outcome o = tab.run(phase1, ncols, opt, pivots);
    result.iterations = pivots;
    if (o == Outcome::IterLimit) {
      result.code = SolveCode::IterLimit;
      return result;
    }
    const double scale = 1.0 + h.cwiseAbs().maxCoeff();
    if (-phase1(ncols) > opt.tol * scale) {
      result.code = SolveCode::Infeasible;
      return result;
    }
    // Drive zero-level artificials out of the basis where possible.
    for (int i = 0; i < m; ++i) {
      if (tab.basis()[i] < nz) continue;
      for (int j = 0; j < nz; ++j) {
        if (std::abs(tab.at(i, j)) > 1e-9) {
          tab.pivot(i, j, phase1);
          break;
        }
      }
    }
  }

  // Phase 2 cost row over z.
  Eigen::VectorXd cz = Eigen::VectorXd::Zero(ncols);
  double const_obj = 0.0;
  for (int j = 0; j < n; ++j) {
    const VarMap& v = vars[j];
    const double c = lp.objective(j);
    const_obj += c * v.offset;
    cz(v.pos) += c * v.pos_sign;
    if (v.neg >= 0) cz(v.neg) -= c;
  }
  Eigen::VectorXd obj = Eigen::VectorXd::Zero(ncols + 1);
  obj.head(ncols) = cz;
  for (int i = 0; i < m; ++i) {
    const int b = tab.basis()[i];
    const double cb = cz(b);
    if (cb == 0.0) continue;
    for (int j = 0; j < ncols; ++j) obj(j) -= cb * tab.at(i, j);
    obj(ncols) -= cb * tab.rhs(i);
  }
  const Outcome o = tab.run(obj, nz, opt, pivots);
  result.iterations = pivots;
  if (o == Outcome::Unbounded) {
    result.code = SolveCode::Unbounded;
    return result;
  }
  if (o == Outcome::IterLimit) {
    result.code = SolveCode::IterLimit;
    return result;
  }

  Eigen::VectorXd z = Eigen::VectorXd::Zero(ncols);
  for (int i = 0; i < m; ++i) z(tab.basis()[i]) = std::max(0.0, tab.rhs(i));
  result.x.resize(n);
  for (int j = 0; j < n; ++j) {
    const VarMap& v = vars[j];
    double xj = v.offset + v.pos_sign * z(v.pos);
    if (v.neg >= 0) xj -= z(v.neg);
    result.x(j) = xj;
  }
  result.objective = lp.objective.dot(result.x);

  // Dual certificate from the final basis: B' y = c_B.
  Eigen::MatrixXd Kfull = Eigen::MatrixXd::Zero(m, ncols);
  Kfull.leftCols(nz) = K;
  art = nz;
  for (int i = 0; i < m; ++i)
    if (start_basic[i] < 0) Kfull(i, art++) = 1.0;
  double dual_obj = const_obj;
  double dual_infeas = 0.0;
  if (m > 0) {
    Eigen::MatrixXd B(m, m);
    Eigen::VectorXd cb(m);
    for (int i = 0; i < m; ++i) {
      B.col(i) = Kfull.col(tab.basis()[i]);
      cb(i) = cz(tab.basis()[i]);
    }
    const Eigen::VectorXd y = B.transpose().fullPivLu().solve(cb);
    const Eigen::VectorXd reduced = cz.head(nz) - K.transpose() * y;
    dual_infeas = std::max(0.0, -reduced.minCoeff());
    dual_obj += h.dot(y);
  } else {
    dual_infeas = std::max(0.0, -cz.head(nz).minCoeff());
  }
  const double primal_infeas = m > 0 ? (K * z.head(nz) - h).cwiseAbs().maxCoeff() : 0.0;
  result.dual_objective = dual_obj;
  const double gap = std::abs(result.objective - dual_obj);
  result.kkt_residual = std::max({gap, dual_infeas, primal_infeas});
  const double scale = 1.0 + std::abs(result.objective);
  result.code = result.kkt_residual <= opt.tol * scale ? SolveCode::Optimal
                                                             : SolveCode::NumericalFailure;
  return result;
}

}  // namespace uavmec::convex
