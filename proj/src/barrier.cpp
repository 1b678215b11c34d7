// SPDX-License-Identifier: Apache-2.0
//
// Primal log-barrier path following. Slower than the self-dual method but
// handles exponential cones, and serves as an independent second solver.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include <Eigen/LU>

#include "conic_internal.hpp"

namespace jbas::conic::detail {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kInf = std::numeric_limits<double>::infinity();

struct BarrierEval {
  double value = 0.0;
  VectorXd grad;
  MatrixXd hess;
};

int block_degree(const Block& blk) {
  switch (blk.kind) {
    case BlockKind::lp: return blk.dim;
    case BlockKind::soc: return 2;
    case BlockKind::exp: return 3;
  }
  return 0;
}

// Interior direction used to shift slacks during phase one.
VectorXd block_center(const Block& blk) {
  VectorXd e = VectorXd::Zero(blk.dim);
  switch (blk.kind) {
    case BlockKind::lp: e.setOnes(); break;
    case BlockKind::soc: e[0] = 1.0; break;
    case BlockKind::exp: e << -1.0, 1.0, 1.0; break;
  }
  return e;
}

// Barrier value, gradient and Hessian in slack space; nullopt outside the domain.
std::optional<BarrierEval> barrier(const Block& blk, const VectorXd& s) {
  BarrierEval ev;
  const int d = blk.dim;
  switch (blk.kind) {
    case BlockKind::lp: {
      if ((s.array() <= 0.0).any()) return std::nullopt;
      ev.value = -s.array().log().sum();
      ev.grad = -s.cwiseInverse();
      ev.hess = s.array().square().inverse().matrix().asDiagonal();
      return ev;
    }
    case BlockKind::soc: {
      const double tail = s.tail(d - 1).norm();
      const double det = (s[0] - tail) * (s[0] + tail);
      if (!(s[0] > tail) || !(det > 0.0)) return std::nullopt;
      VectorXd Js = s;
      Js.tail(d - 1) *= -1.0;
      ev.value = -std::log(det);
      ev.grad = -2.0 * Js / det;
      MatrixXd J = MatrixXd::Identity(d, d);
      J.diagonal().tail(d - 1).setConstant(-1.0);
      ev.hess = -2.0 * J / det + 4.0 * Js * Js.transpose() / (det * det);
      return ev;
    }
    case BlockKind::exp: {
      const double u = s[0], v = s[1], w = s[2];
      if (!(v > 0.0) || !(w > 0.0)) return std::nullopt;
      const double lg = std::log(w / v);
      const double psi = v * lg - u;
      if (!(psi > 0.0)) return std::nullopt;
      const VectorXd dpsi = (VectorXd(3) << -1.0, lg - 1.0, v / w).finished();
      MatrixXd d2psi = MatrixXd::Zero(3, 3);
      d2psi(1, 1) = -1.0 / v;
      d2psi(1, 2) = d2psi(2, 1) = 1.0 / w;
      d2psi(2, 2) = -v / (w * w);
      ev.value = -std::log(psi) - std::log(v) - std::log(w);
      ev.grad = -dpsi / psi;
      ev.grad[1] -= 1.0 / v;
      ev.grad[2] -= 1.0 / w;
      ev.hess = dpsi * dpsi.transpose() / (psi * psi) - d2psi / psi;
      ev.hess(1, 1) += 1.0 / (v * v);
      ev.hess(2, 2) += 1.0 / (w * w);
      return ev;
    }
  }
  return std::nullopt;
}

VectorXd gather(const Block& blk, const VectorXd& x) {
  VectorXd xs(static_cast<int>(blk.cols.size()));
  for (std::size_t j = 0; j < blk.cols.size(); ++j) xs[static_cast<int>(j)] = x[blk.cols[j]];
  return xs;
}

// minimize t c'x + sum_k F_k(h_k - G_k x) s.t. A x = b, from a strictly feasible x.
class BarrierProblem {
 public:
  BarrierProblem(const std::vector<Block>& blocks, int n, VectorXd c, MatrixXd A)
      : blocks_(blocks), n_(n), c_(std::move(c)), A_(std::move(A)) {
    for (const auto& blk : blocks_) nu_ += block_degree(blk);
  }

  int degree() const { return nu_; }
  const VectorXd& cost() const { return c_; }

  std::optional<double> value(const VectorXd& x, double t) const {
    double v = t * c_.dot(x);
    for (const auto& blk : blocks_) {
      const auto ev = barrier(blk, blk.h - blk.G * gather(blk, x));
      if (!ev) return std::nullopt;
      v += ev->value;
    }
    return v;
  }

  // Newton step; returns the decrement squared, or nullopt on failure.
  std::optional<double> newton(const VectorXd& x, double t, VectorXd& dx) const {
    VectorXd g = t * c_;
    MatrixXd H = MatrixXd::Zero(n_, n_);
    for (const auto& blk : blocks_) {
      const auto ev = barrier(blk, blk.h - blk.G * gather(blk, x));
      if (!ev) return std::nullopt;
      const VectorXd gx = -blk.G.transpose() * ev->grad;
      const MatrixXd Hx = blk.G.transpose() * ev->hess * blk.G;
      for (std::size_t a = 0; a < blk.cols.size(); ++a) {
        g[blk.cols[a]] += gx[static_cast<int>(a)];
        for (std::size_t b = 0; b < blk.cols.size(); ++b)
          H(blk.cols[a], blk.cols[b]) += Hx(static_cast<int>(a), static_cast<int>(b));
      }
    }
    const double reg = 1e-12 * std::max(1.0, H.diagonal().cwiseAbs().maxCoeff());
    const int p = static_cast<int>(A_.rows());
    MatrixXd K = MatrixXd::Zero(n_ + p, n_ + p);
    K.topLeftCorner(n_, n_) = H;
    K.topLeftCorner(n_, n_).diagonal().array() += reg;
    if (p > 0) {
      K.topRightCorner(n_, p) = A_.transpose();
      K.bottomLeftCorner(p, n_) = A_;
    }
    VectorXd rhs = VectorXd::Zero(n_ + p);
    rhs.head(n_) = -g;
    Eigen::PartialPivLU<MatrixXd> lu(K);
    VectorXd sol = lu.solve(rhs);
    sol += lu.solve(rhs - K * sol);
    dx = sol.head(n_);
    if (!dx.allFinite()) return std::nullopt;
    return std::max(0.0, -g.dot(dx));
  }

  // Centering by damped Newton. Returns false if no progress is possible.
  bool center(VectorXd& x, double t, int max_steps) const {
    for (int k = 0; k < max_steps; ++k) {
      VectorXd dx;
      const auto dec = newton(x, t, dx);
      if (!dec) return false;
      if (*dec * 0.5 <= 1e-11) return true;
      const auto f0 = value(x, t);
      if (!f0) return false;
      double step = 1.0;
      bool moved = false;
      while (step > 1e-14) {
        const VectorXd xn = x + step * dx;
        const auto f1 = value(xn, t);
        if (f1 && *f1 <= *f0 - 0.01 * step * *dec) {
          x = xn;
          moved = true;
          break;
        }
        step *= 0.5;
      }
      if (!moved) return *dec * 0.5 <= 1e-7;
    }
    return true;
  }

 private:
  const std::vector<Block>& blocks_;
  int n_;
  VectorXd c_;
  MatrixXd A_;
  int nu_ = 0;
};

bool interior(const std::vector<Block>& blocks, const VectorXd& x) {
  return std::all_of(blocks.begin(), blocks.end(),
                     [&](const Block& blk) { return barrier(blk, blk.h - blk.G * gather(blk, x)).has_value(); });
}

}  // namespace

ConicSolution solve_barrier(const StandardForm& sf, const SolverSettings& settings) {
  ConicSolution out;
  const int n = sf.n;
  const int p = static_cast<int>(sf.A.rows());
  out.x = VectorXd::Zero(n);

  VectorXd x0 = VectorXd::Zero(n);
  if (p > 0) x0 = sf.A.completeOrthogonalDecomposition().solve(sf.b);
  if (p > 0 && (sf.A * x0 - sf.b).norm() > 1e-9 * std::max(1.0, sf.b.norm())) {
    out.status = SolveStatus::infeasible;
    return out;
  }

  // Phase one: minimize sigma with slacks shifted by sigma * center, sigma >= -1.
  VectorXd x = x0;
  int iterations = 0;
  if (!interior(sf.blocks, x)) {
    std::vector<Block> blocks = sf.blocks;
    for (auto& blk : blocks) {
      blk.cols.push_back(n);
      blk.G.conservativeResize(Eigen::NoChange, blk.G.cols() + 1);
      blk.G.col(blk.G.cols() - 1) = -block_center(blk);
    }
    Block floor;
    floor.kind = BlockKind::lp;
    floor.dim = 1;
    floor.cols = {n};
    floor.G = MatrixXd::Constant(1, 1, -1.0);
    floor.h = VectorXd::Constant(1, 1.0);
    blocks.push_back(floor);

    VectorXd c1 = VectorXd::Zero(n + 1);
    c1[n] = 1.0;
    MatrixXd A1 = MatrixXd::Zero(p, n + 1);
    if (p > 0) A1.leftCols(n) = sf.A;
    BarrierProblem phase1(blocks, n + 1, c1, A1);

    VectorXd xs(n + 1);
    xs.head(n) = x;
    double sigma = 1.0;
    for (;;) {
      xs[n] = sigma;
      if (interior(blocks, xs)) break;
      sigma *= 2.0;
      if (sigma > 1e300) {
        out.status = SolveStatus::numerical_failure;
        return out;
      }
    }
    double t = 1.0;
    bool found = false;
    for (int outer = 0; outer < 60; ++outer) {
      ++iterations;
      phase1.center(xs, t, 100);
      if (xs[n] < 0.0) {
        found = true;
        break;
      }
      if (phase1.degree() / t < 1e-10) break;
      t *= 10.0;
    }
    if (!found) {
      out.status = SolveStatus::infeasible;
      out.iterations = iterations;
      return out;
    }
    x = xs.head(n);
  }

  BarrierProblem phase2(sf.blocks, n, sf.c, sf.A);
  double t = 1.0;
  const int max_outer = std::max(settings.max_iter, 40);
  for (int outer = 0; outer < max_outer; ++outer) {
    ++iterations;
    if (!phase2.center(x, t, 200)) {
      out.status = SolveStatus::numerical_failure;
      out.x = x;
      out.iterations = iterations;
      return out;
    }
    if (!x.allFinite() || x.norm() > 1e12) {
      out.status = SolveStatus::unbounded;
      out.x = x;
      out.iterations = iterations;
      return out;
    }
    const double gap = phase2.degree() / t;
    out.gap = gap;
    if (gap <= settings.tol_gap * std::max(1.0, std::abs(sf.c.dot(x)))) {
      out.status = SolveStatus::optimal;
      out.x = x;
      out.iterations = iterations;
      return out;
    }
    t *= 10.0;
  }
  out.status = SolveStatus::iteration_limit;
  out.x = x;
  out.iterations = iterations;
  return out;
}

}  // namespace jbas::conic::detail
