// SPDX-License-Identifier: Apache-2.0
//
// Standard-form compilation shared by the two conic solvers:
//   minimize c'x  subject to  s = h - G x in K,  A x = b
// with K a product of nonnegative orthants, second-order cones, and
// exponential cones. Each block keeps only the columns it touches.

#pragma once

#include <vector>

#include <Eigen/Dense>

#include "jbas/conic.hpp"

namespace jbas::conic::detail {

enum class BlockKind { lp, soc, exp };

struct Block {
  BlockKind kind = BlockKind::lp;
  int offset = 0;
  int dim = 0;
  std::vector<int> cols;
  Eigen::MatrixXd G;  // dim x cols.size()
  Eigen::VectorXd h;  // dim
};

struct StandardForm {
  int n = 0;
  int m = 0;  // total cone dimension
  Eigen::VectorXd c;
  std::vector<Block> blocks;
  Eigen::MatrixXd A;
  Eigen::VectorXd b;

  Eigen::VectorXd G_times(const Eigen::VectorXd& x) const;
  Eigen::VectorXd GT_times(const Eigen::VectorXd& z) const;
  Eigen::VectorXd h_full() const;
  bool has_exp() const;
};

StandardForm compile(const ConicProgram& p);

ConicSolution solve_hsd(const StandardForm& sf, const SolverSettings& settings);
ConicSolution solve_barrier(const StandardForm& sf, const SolverSettings& settings);

}  // namespace jbas::conic::detail
