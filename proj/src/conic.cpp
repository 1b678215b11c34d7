// SPDX-License-Identifier: Apache-2.0

#include "jbas/conic.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <ostream>

#include "conic_internal.hpp"

namespace jbas::conic {

const char* to_string(ConeKind k) {
  switch (k) {
    case ConeKind::zero: return "zero";
    case ConeKind::nonnegative: return "nonnegative";
    case ConeKind::second_order: return "second_order";
    case ConeKind::rotated_second_order: return "rotated_second_order";
    case ConeKind::exponential: return "exponential";
  }
  return "unknown";
}

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::unbounded: return "unbounded";
    case SolveStatus::numerical_failure: return "numerical_failure";
    case SolveStatus::iteration_limit: return "iteration_limit";
  }
  return "unknown";
}

LinExpr LinExpr::var(int index, double coef) {
  LinExpr e;
  e.terms.emplace_back(index, coef);
  return e;
}

LinExpr& LinExpr::add(int index, double coef) {
  terms.emplace_back(index, coef);
  return *this;
}

LinExpr& LinExpr::operator+=(const LinExpr& o) {
  terms.insert(terms.end(), o.terms.begin(), o.terms.end());
  constant += o.constant;
  return *this;
}

LinExpr& LinExpr::operator-=(const LinExpr& o) {
  for (const auto& [i, c] : o.terms) terms.emplace_back(i, -c);
  constant -= o.constant;
  return *this;
}

LinExpr& LinExpr::operator*=(double s) {
  for (auto& t : terms) t.second *= s;
  constant *= s;
  return *this;
}

double LinExpr::eval(const Eigen::VectorXd& x) const {
  double v = constant;
  for (const auto& [i, c] : terms) v += c * x[i];
  return v;
}

LinExpr operator+(LinExpr a, const LinExpr& b) { return a += b; }
LinExpr operator-(LinExpr a, const LinExpr& b) { return a -= b; }
LinExpr operator*(double s, LinExpr a) { return a *= s; }
LinExpr operator-(LinExpr a) { return a *= -1.0; }

int ConicProgram::add_var(std::string name) {
  const int idx = num_vars++;
  Eigen::VectorXd grown = Eigen::VectorXd::Zero(num_vars);
  if (objective.size() > 0) grown.head(objective.size()) = objective;
  objective = std::move(grown);
  if (name.empty()) name = "x" + std::to_string(idx);
  var_names.push_back(std::move(name));
  return idx;
}

int ConicProgram::add_vars(int count, const std::string& prefix) {
  const int first = num_vars;
  for (int i = 0; i < count; ++i) add_var(prefix + "[" + std::to_string(i) + "]");
  return first;
}

void ConicProgram::add(ConeKind kind, std::vector<LinExpr> rows, std::string label) {
  constraints.push_back({kind, std::move(rows), std::move(label)});
}

void ConicProgram::add_rotated(const LinExpr& y2, const LinExpr& y3, const std::vector<LinExpr>& y1,
                               std::string label) {
  std::vector<LinExpr> rows{y2, y3};
  rows.insert(rows.end(), y1.begin(), y1.end());
  add(ConeKind::rotated_second_order, std::move(rows), std::move(label));
}

void ConicProgram::add_soc(const LinExpr& t, const std::vector<LinExpr>& u, std::string label) {
  std::vector<LinExpr> rows{t};
  rows.insert(rows.end(), u.begin(), u.end());
  add(ConeKind::second_order, std::move(rows), std::move(label));
}

int ConicProgram::count(ConeKind k) const {
  return static_cast<int>(
      std::count_if(constraints.begin(), constraints.end(), [k](const ConeMembership& c) { return c.kind == k; }));
}

double ConicProgram::objective_value(const Eigen::VectorXd& x) const { return objective.dot(x); }

std::vector<std::string> validate(const ConicProgram& p) {
  std::vector<std::string> defects;
  if (p.num_vars < 1) defects.emplace_back("program has no variables");
  if (p.objective.size() != p.num_vars) {
    defects.emplace_back("objective length " + std::to_string(p.objective.size()) + " differs from variable count " +
                         std::to_string(p.num_vars));
  } else if (p.num_vars > 0 && p.objective.cwiseAbs().maxCoeff() == 0.0) {
    defects.emplace_back("objective is identically zero");
  } else if (!p.objective.allFinite()) {
    defects.emplace_back("objective has non-finite coefficients");
  }
  for (std::size_t ci = 0; ci < p.constraints.size(); ++ci) {
    const auto& c = p.constraints[ci];
    const std::string where = "constraint " + std::to_string(ci) + (c.label.empty() ? "" : " (" + c.label + ")");
    const int dim = static_cast<int>(c.rows.size());
    if (dim == 0) defects.push_back(where + ": no rows");
    if (c.kind == ConeKind::second_order && dim < 2) defects.push_back(where + ": second-order cone needs dimension >= 2");
    if (c.kind == ConeKind::rotated_second_order && dim < 3)
      defects.push_back(where + ": rotated cone needs dimension >= 3");
    if (c.kind == ConeKind::exponential && dim != 3) defects.push_back(where + ": exponential cone has dimension 3");
    for (const auto& row : c.rows) {
      if (!std::isfinite(row.constant)) defects.push_back(where + ": non-finite constant");
      for (const auto& [i, v] : row.terms) {
        if (i < 0 || i >= p.num_vars) {
          defects.push_back(where + ": variable index " + std::to_string(i) + " out of range");
        } else if (!std::isfinite(v)) {
          defects.push_back(where + ": non-finite coefficient");
        }
      }
    }
  }
  return defects;
}

bool in_soc(const Eigen::VectorXd& y, double tol) {
  if (y.size() < 1) return false;
  return y.tail(y.size() - 1).norm() <= y[0] + tol;
}

bool in_rotated_soc(double y2, double y3, const Eigen::VectorXd& y1, double tol) {
  return y2 >= -tol && y3 >= -tol && y1.squaredNorm() <= y2 * y3 + tol;
}

Eigen::VectorXd rotated_to_soc(double y2, double y3, const Eigen::VectorXd& y1) {
  Eigen::VectorXd u(y1.size() + 2);
  u[0] = 0.5 * (y2 + y3);
  u[1] = 0.5 * (y2 - y3);
  u.tail(y1.size()) = y1;
  return u;
}

double violation(const ConeMembership& c, const Eigen::VectorXd& x) {
  Eigen::VectorXd y(c.rows.size());
  for (std::size_t j = 0; j < c.rows.size(); ++j) y[j] = c.rows[j].eval(x);
  switch (c.kind) {
    case ConeKind::zero: return y.cwiseAbs().maxCoeff();
    case ConeKind::nonnegative: return std::max(0.0, -y.minCoeff());
    case ConeKind::second_order: return std::max(0.0, y.tail(y.size() - 1).norm() - y[0]);
    case ConeKind::rotated_second_order: {
      const Eigen::VectorXd u = rotated_to_soc(y[0], y[1], y.tail(y.size() - 2));
      return std::max(0.0, u.tail(u.size() - 1).norm() - u[0]);
    }
    case ConeKind::exponential: {
      const double u = y[0], v = y[1], w = y[2];
      if (v <= 0.0) {
        // Closure: v = 0 admits u <= 0, w >= 0.
        return std::max({0.0, -v, (v == 0.0 ? std::max(u, -w) : std::abs(v))});
      }
      return std::max(0.0, v * std::exp(u / v) - w);
    }
  }
  return 0.0;
}

double max_violation(const ConicProgram& p, const Eigen::VectorXd& x) {
  double worst = 0.0;
  for (const auto& c : p.constraints) worst = std::max(worst, violation(c, x));
  return worst;
}

bool supports_exponential(Backend b) { return b != Backend::interior_point; }

ConicSolution solve(const ConicProgram& p, const SolverSettings& settings) {
  const auto t0 = std::chrono::steady_clock::now();
  ConicSolution out;
  if (!validate(p).empty()) {
    out.status = SolveStatus::numerical_failure;
    out.x = Eigen::VectorXd::Zero(std::max(0, p.num_vars));
    return out;
  }
  const detail::StandardForm sf = detail::compile(p);
  Backend backend = settings.backend;
  if (backend == Backend::automatic) backend = sf.has_exp() ? Backend::barrier : Backend::interior_point;
  if (backend == Backend::interior_point && sf.has_exp()) {
    out.status = SolveStatus::numerical_failure;
    out.x = Eigen::VectorXd::Zero(p.num_vars);
  } else if (backend == Backend::interior_point) {
    out = detail::solve_hsd(sf, settings);
  } else {
    out = detail::solve_barrier(sf, settings);
  }
  out.objective = p.objective.dot(out.x);
  out.solve_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

void dump_triplets(const ConicProgram& p, std::ostream& os) {
  os.precision(17);
  os << "conic-program v1\n";
  os << "vars " << p.num_vars << "\n";
  int nnz = 0;
  for (int i = 0; i < p.objective.size(); ++i) nnz += p.objective[i] != 0.0;
  os << "objective " << nnz << "\n";
  for (int i = 0; i < p.objective.size(); ++i)
    if (p.objective[i] != 0.0) os << i << " " << p.objective[i] << "\n";
  for (std::size_t ci = 0; ci < p.constraints.size(); ++ci) {
    const auto& c = p.constraints[ci];
    os << "cone " << ci << " " << to_string(c.kind) << " " << c.rows.size() << " "
       << (c.label.empty() ? "-" : c.label) << "\n";
    for (std::size_t r = 0; r < c.rows.size(); ++r) {
      std::map<int, double> merged;
      for (const auto& [i, v] : c.rows[r].terms) merged[i] += v;
      for (const auto& [i, v] : merged)
        if (v != 0.0) os << "  coef " << r << " " << i << " " << v << "\n";
      if (c.rows[r].constant != 0.0) os << "  const " << r << " " << c.rows[r].constant << "\n";
    }
  }
}

namespace detail {

namespace {

// Merges duplicate terms of the rows into a dense block over the touched columns.
Block make_block(BlockKind kind, const std::vector<LinExpr>& rows) {
  Block blk;
  blk.kind = kind;
  blk.dim = static_cast<int>(rows.size());
  for (const auto& r : rows)
    for (const auto& t : r.terms) blk.cols.push_back(t.first);
  std::sort(blk.cols.begin(), blk.cols.end());
  blk.cols.erase(std::unique(blk.cols.begin(), blk.cols.end()), blk.cols.end());
  blk.G = Eigen::MatrixXd::Zero(blk.dim, static_cast<int>(blk.cols.size()));
  blk.h.resize(blk.dim);
  for (int j = 0; j < blk.dim; ++j) {
    blk.h[j] = rows[j].constant;
    for (const auto& [i, v] : rows[j].terms) {
      const auto pos = std::lower_bound(blk.cols.begin(), blk.cols.end(), i) - blk.cols.begin();
      blk.G(j, pos) -= v;  // s = h - G x  with s = rows(x)
    }
  }
  return blk;
}

}  // namespace

StandardForm compile(const ConicProgram& p) {
  StandardForm sf;
  sf.n = p.num_vars;
  sf.c = -p.objective;

  std::vector<LinExpr> lp_rows;
  std::vector<LinExpr> eq_rows;
  std::vector<Block> socs;
  std::vector<Block> exps;
  for (const auto& c : p.constraints) {
    switch (c.kind) {
      case ConeKind::zero: eq_rows.insert(eq_rows.end(), c.rows.begin(), c.rows.end()); break;
      case ConeKind::nonnegative: lp_rows.insert(lp_rows.end(), c.rows.begin(), c.rows.end()); break;
      case ConeKind::second_order: socs.push_back(make_block(BlockKind::soc, c.rows)); break;
      case ConeKind::rotated_second_order: {
        std::vector<LinExpr> rows;
        rows.push_back(0.5 * (c.rows[0] + c.rows[1]));
        rows.push_back(0.5 * (c.rows[0] - c.rows[1]));
        rows.insert(rows.end(), c.rows.begin() + 2, c.rows.end());
        socs.push_back(make_block(BlockKind::soc, rows));
        break;
      }
      case ConeKind::exponential: exps.push_back(make_block(BlockKind::exp, c.rows)); break;
    }
  }
  // One lp block per row keeps the per-block column sets short.
  for (const auto& r : lp_rows) sf.blocks.push_back(make_block(BlockKind::lp, {r}));
  for (auto& b : socs) sf.blocks.push_back(std::move(b));
  for (auto& b : exps) sf.blocks.push_back(std::move(b));
  int off = 0;
  for (auto& b : sf.blocks) {
    b.offset = off;
    off += b.dim;
  }
  sf.m = off;

  sf.A = Eigen::MatrixXd::Zero(static_cast<int>(eq_rows.size()), sf.n);
  sf.b.resize(static_cast<int>(eq_rows.size()));
  for (std::size_t r = 0; r < eq_rows.size(); ++r) {
    for (const auto& [i, v] : eq_rows[r].terms) sf.A(static_cast<int>(r), i) += v;
    sf.b[static_cast<int>(r)] = -eq_rows[r].constant;
  }
  return sf;
}

Eigen::VectorXd StandardForm::G_times(const Eigen::VectorXd& x) const {
  Eigen::VectorXd out(m);
  for (const auto& blk : blocks) {
    Eigen::VectorXd xs(static_cast<int>(blk.cols.size()));
    for (std::size_t j = 0; j < blk.cols.size(); ++j) xs[static_cast<int>(j)] = x[blk.cols[j]];
    out.segment(blk.offset, blk.dim) = blk.G * xs;
  }
  return out;
}

Eigen::VectorXd StandardForm::GT_times(const Eigen::VectorXd& z) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  for (const auto& blk : blocks) {
    const Eigen::VectorXd t = blk.G.transpose() * z.segment(blk.offset, blk.dim);
    for (std::size_t j = 0; j < blk.cols.size(); ++j) out[blk.cols[j]] += t[static_cast<int>(j)];
  }
  return out;
}

Eigen::VectorXd StandardForm::h_full() const {
  Eigen::VectorXd out(m);
  for (const auto& blk : blocks) out.segment(blk.offset, blk.dim) = blk.h;
  return out;
}

bool StandardForm::has_exp() const {
  return std::any_of(blocks.begin(), blocks.end(), [](const Block& b) { return b.kind == BlockKind::exp; });
}

}  // namespace detail

}  // namespace jbas::conic
