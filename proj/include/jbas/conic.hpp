// SPDX-License-Identifier: Apache-2.0
//
// Conic program intermediate representation plus the solvers behind it.
//
// A program maximizes a linear objective over variables x subject to a list
// of cone memberships. Each membership lists affine rows y_j(x); the vector y
// must lie in the named cone:
//
//   zero                 y = 0
//   nonnegative          y >= 0 componentwise
//   second_order         y_0 >= ||y_{1:}||
//   rotated_second_order rows ordered [y2, y3, y1...]:  ||y1||^2 <= y2 * y3, y2, y3 >= 0
//   exponential          rows (u, v, w):  v * exp(u / v) <= w, v > 0
//
// The LP/SOC solver is a homogeneous self-dual primal-dual interior-point
// method with Nesterov-Todd scaling and Mehrotra correction. Programs with
// exponential memberships go to a primal log-barrier path-following method.

#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace jbas::conic {

enum class ConeKind { zero, nonnegative, second_order, rotated_second_order, exponential };

const char* to_string(ConeKind k);

/// Sparse affine expression sum_i coef_i * x_{var_i} + constant.
struct LinExpr {
  std::vector<std::pair<int, double>> terms;
  double constant = 0.0;

  LinExpr() = default;
  LinExpr(double c) : constant(c) {}  // NOLINT(google-explicit-constructor)

  static LinExpr var(int index, double coef = 1.0);

  LinExpr& add(int index, double coef);
  LinExpr& operator+=(const LinExpr& o);
  LinExpr& operator-=(const LinExpr& o);
  LinExpr& operator*=(double s);

  double eval(const Eigen::VectorXd& x) const;
};

LinExpr operator+(LinExpr a, const LinExpr& b);
LinExpr operator-(LinExpr a, const LinExpr& b);
LinExpr operator*(double s, LinExpr a);
LinExpr operator-(LinExpr a);

struct ConeMembership {
  ConeKind kind = ConeKind::nonnegative;
  std::vector<LinExpr> rows;
  std::string label;
};

struct ConicProgram {
  int num_vars = 0;
  Eigen::VectorXd objective;  // maximized
  std::vector<ConeMembership> constraints;
  std::vector<std::string> var_names;

  /// Appends a variable with zero objective weight and returns its index.
  int add_var(std::string name = {});
  int add_vars(int count, const std::string& prefix);
  void add(ConeKind kind, std::vector<LinExpr> rows, std::string label = {});
  void add_nonneg(const LinExpr& e, std::string label = {}) { add(ConeKind::nonnegative, {e}, std::move(label)); }
  void add_equal(const LinExpr& e, std::string label = {}) { add(ConeKind::zero, {e}, std::move(label)); }
  /// ||y1||^2 <= y2 * y3 with y2, y3 >= 0.
  void add_rotated(const LinExpr& y2, const LinExpr& y3, const std::vector<LinExpr>& y1, std::string label = {});
  /// ||u|| <= t.
  void add_soc(const LinExpr& t, const std::vector<LinExpr>& u, std::string label = {});

  int count(ConeKind k) const;
  bool has_exponential() const { return count(ConeKind::exponential) > 0; }
  double objective_value(const Eigen::VectorXd& x) const;
};

enum class SolveStatus { optimal, infeasible, unbounded, numerical_failure, iteration_limit };

const char* to_string(SolveStatus s);

enum class Backend {
  automatic,  // interior-point for LP/SOC, barrier when exponential cones appear
  interior_point,
  barrier,
};

struct SolverSettings {
  double tol_feas = 1e-8;
  double tol_gap = 1e-8;
  int max_iter = 100;
  Backend backend = Backend::automatic;
};

struct ConicSolution {
  SolveStatus status = SolveStatus::numerical_failure;
  Eigen::VectorXd x;
  double objective = 0.0;
  double solve_ms = 0.0;
  int iterations = 0;
  double primal_residual = 0.0;
  double gap = 0.0;

  bool ok() const { return status == SolveStatus::optimal; }
};

/// Structural defects; empty means the program is well formed.
std::vector<std::string> validate(const ConicProgram& p);

ConicSolution solve(const ConicProgram& p, const SolverSettings& settings = {});

/// True iff the backend can represent exponential memberships.
bool supports_exponential(Backend b);

/// Largest violation of any membership at x, measured in the cone's own
/// units (distance below the cone for SOC, negative part for LP, etc.).
double max_violation(const ConicProgram& p, const Eigen::VectorXd& x);
/// Violation of a single membership at x.
double violation(const ConeMembership& c, const Eigen::VectorXd& x);

/// Point-membership tests used by property checks.
bool in_soc(const Eigen::VectorXd& y, double tol = 0.0);
bool in_rotated_soc(double y2, double y3, const Eigen::VectorXd& y1, double tol = 0.0);
/// The rotated cone rewritten as ||(y1, (y2 - y3)/2)|| <= (y2 + y3)/2.
Eigen::VectorXd rotated_to_soc(double y2, double y3, const Eigen::VectorXd& y1);

/// Sparse triplet text dump. Layout:
///   conic-program v1
///   vars <n>
///   objective <nnz>            then lines "<col> <value>"
///   cone <idx> <kind> <dim> <label>
///     coef <row> <col> <value>  (row within the cone)
///     const <row> <value>
void dump_triplets(const ConicProgram& p, std::ostream& os);

}  // namespace jbas::conic
