// SPDX-License-Identifier: Apache-2.0
//
// Homogeneous self-dual embedding, Nesterov-Todd scaling, Mehrotra
// predictor-corrector. Blocks are nonnegative rows or second-order cones.

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/QR>

#include "conic_internal.hpp"

namespace jbas::conic::detail {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kInf = std::numeric_limits<double>::infinity();

// Nesterov-Todd scaling for one block. lp blocks use the diagonal `d`,
// soc blocks the dense symmetric W and its inverse.
struct BlockScaling {
  VectorXd d;
  MatrixXd W;
  MatrixXd Winv;
};

class Scaling {
 public:
  explicit Scaling(const StandardForm& sf) : sf_(sf), blocks_(sf.blocks.size()) {}

  void set_identity() {
    for (std::size_t k = 0; k < blocks_.size(); ++k) {
      const auto& blk = sf_.blocks[k];
      if (blk.kind == BlockKind::lp) {
        blocks_[k].d = VectorXd::Ones(blk.dim);
      } else {
        blocks_[k].W = MatrixXd::Identity(blk.dim, blk.dim);
        blocks_[k].Winv = blocks_[k].W;
      }
    }
  }

  // Returns false when s or z has left the cone interior numerically.
  bool compute(const VectorXd& s, const VectorXd& z) {
    for (std::size_t k = 0; k < blocks_.size(); ++k) {
      const auto& blk = sf_.blocks[k];
      const VectorXd sk = s.segment(blk.offset, blk.dim);
      const VectorXd zk = z.segment(blk.offset, blk.dim);
      if (blk.kind == BlockKind::lp) {
        if ((sk.array() <= 0.0).any() || (zk.array() <= 0.0).any()) return false;
        blocks_[k].d = (sk.array() / zk.array()).sqrt();
        continue;
      }
      const double s_tail = sk.tail(blk.dim - 1).norm();
      const double z_tail = zk.tail(blk.dim - 1).norm();
      const double s_det = (sk[0] - s_tail) * (sk[0] + s_tail);
      const double z_det = (zk[0] - z_tail) * (zk[0] + z_tail);
      if (!(sk[0] > s_tail) || !(zk[0] > z_tail) || !(s_det > 0.0) || !(z_det > 0.0)) return false;
      const double s_nrm = std::sqrt(s_det);
      const double z_nrm = std::sqrt(z_det);
      const double beta = std::sqrt(s_nrm / z_nrm);
      const VectorXd sb = sk / s_nrm;
      const VectorXd zb = zk / z_nrm;
      const double gamma = std::sqrt(0.5 * (1.0 + sb.dot(zb)));
      VectorXd Jz = zb;
      Jz.tail(blk.dim - 1) *= -1.0;
      // Scaling point w (w'Jw = 1); W is beta times the square root of 2ww' - J.
      const VectorXd w = (sb + Jz) / (2.0 * gamma);
      VectorXd v = w;
      v[0] += 1.0;
      v /= std::sqrt(2.0 * (w[0] + 1.0));
      VectorXd Jv = v;
      Jv.tail(blk.dim - 1) *= -1.0;
      MatrixXd J = MatrixXd::Identity(blk.dim, blk.dim);
      J.diagonal().tail(blk.dim - 1).setConstant(-1.0);
      blocks_[k].W = beta * (2.0 * v * v.transpose() - J);
      blocks_[k].Winv = (2.0 * Jv * Jv.transpose() - J) / beta;
    }
    return true;
  }

  VectorXd apply_W(const VectorXd& v) const { return apply(v, false); }
  VectorXd apply_Winv(const VectorXd& v) const { return apply(v, true); }

  // Rows of W^{-1} G for block k over the block's compact columns.
  MatrixXd scaled_G(std::size_t k) const {
    const auto& blk = sf_.blocks[k];
    if (blk.kind == BlockKind::lp) return blocks_[k].d.cwiseInverse().asDiagonal() * blk.G;
    return blocks_[k].Winv * blk.G;
  }

 private:
  VectorXd apply(const VectorXd& v, bool inverse) const {
    VectorXd out(v.size());
    for (std::size_t k = 0; k < blocks_.size(); ++k) {
      const auto& blk = sf_.blocks[k];
      const auto seg = v.segment(blk.offset, blk.dim);
      if (blk.kind == BlockKind::lp) {
        out.segment(blk.offset, blk.dim) =
            inverse ? VectorXd(seg.array() / blocks_[k].d.array()) : VectorXd(seg.array() * blocks_[k].d.array());
      } else {
        out.segment(blk.offset, blk.dim) = (inverse ? blocks_[k].Winv : blocks_[k].W) * seg;
      }
    }
    return out;
  }

  const StandardForm& sf_;
  std::vector<BlockScaling> blocks_;
};

// Jordan product u o v.
VectorXd circ(const StandardForm& sf, const VectorXd& u, const VectorXd& v) {
  VectorXd out(u.size());
  for (const auto& blk : sf.blocks) {
    const auto uk = u.segment(blk.offset, blk.dim);
    const auto vk = v.segment(blk.offset, blk.dim);
    if (blk.kind == BlockKind::lp) {
      out.segment(blk.offset, blk.dim) = uk.cwiseProduct(vk);
    } else {
      out[blk.offset] = uk.dot(vk);
      out.segment(blk.offset + 1, blk.dim - 1) = uk[0] * vk.tail(blk.dim - 1) + vk[0] * uk.tail(blk.dim - 1);
    }
  }
  return out;
}

// Solves lambda o x = v for x.
VectorXd circ_solve(const StandardForm& sf, const VectorXd& lam, const VectorXd& v) {
  VectorXd out(v.size());
  for (const auto& blk : sf.blocks) {
    const auto lk = lam.segment(blk.offset, blk.dim);
    const auto vk = v.segment(blk.offset, blk.dim);
    if (blk.kind == BlockKind::lp) {
      out.segment(blk.offset, blk.dim) = vk.cwiseQuotient(lk);
    } else {
      const double l0 = lk[0];
      const auto l1 = lk.tail(blk.dim - 1);
      const double det = (l0 - l1.norm()) * (l0 + l1.norm());
      const double x0 = (l0 * vk[0] - l1.dot(vk.tail(blk.dim - 1))) / det;
      out[blk.offset] = x0;
      out.segment(blk.offset + 1, blk.dim - 1) = (vk.tail(blk.dim - 1) - x0 * l1) / l0;
    }
  }
  return out;
}

VectorXd identity(const StandardForm& sf) {
  VectorXd e = VectorXd::Zero(sf.m);
  for (const auto& blk : sf.blocks) {
    if (blk.kind == BlockKind::lp) {
      e.segment(blk.offset, blk.dim).setOnes();
    } else {
      e[blk.offset] = 1.0;
    }
  }
  return e;
}

int degree(const StandardForm& sf) {
  int nu = 0;
  for (const auto& blk : sf.blocks) nu += blk.kind == BlockKind::lp ? blk.dim : 1;
  return nu;
}

// Largest t with u + t * e in the cone boundary, i.e. -min eigenvalue of u.
double min_eigen(const StandardForm& sf, const VectorXd& u) {
  double worst = kInf;
  for (const auto& blk : sf.blocks) {
    const auto uk = u.segment(blk.offset, blk.dim);
    if (blk.kind == BlockKind::lp) {
      worst = std::min(worst, uk.minCoeff());
    } else {
      worst = std::min(worst, uk[0] - uk.tail(blk.dim - 1).norm());
    }
  }
  return worst;
}

// Largest step alpha with u + alpha * d in the cone; u must be interior.
double max_step(const StandardForm& sf, const VectorXd& u, const VectorXd& d) {
  double alpha = kInf;
  for (const auto& blk : sf.blocks) {
    const auto uk = u.segment(blk.offset, blk.dim);
    const auto dk = d.segment(blk.offset, blk.dim);
    if (blk.kind == BlockKind::lp) {
      for (int i = 0; i < blk.dim; ++i)
        if (dk[i] < 0.0) alpha = std::min(alpha, -uk[i] / dk[i]);
      continue;
    }
    const double ut = uk.tail(blk.dim - 1).norm();
    const double det = (uk[0] - ut) * (uk[0] + ut);
    const double scale = std::sqrt(std::max(det, 0.0));
    if (!(scale > 0.0)) return 0.0;
    const VectorXd un = uk / scale;
    const VectorXd dn = dk / scale;
    // f(a) = a2 a^2 + 2 b1 a + 1, roots mark the cone boundary.
    const double a2 = dn[0] * dn[0] - dn.tail(blk.dim - 1).squaredNorm();
    const double b1 = un[0] * dn[0] - un.tail(blk.dim - 1).dot(dn.tail(blk.dim - 1));
    double root = kInf;
    if (std::abs(a2) < 1e-300) {
      if (b1 < 0.0) root = -0.5 / b1;
    } else {
      const double disc = b1 * b1 - a2;
      if (disc >= 0.0) {
        const double q = -(b1 + std::copysign(std::sqrt(disc), b1));
        for (double r : {q / a2, (q != 0.0 ? 1.0 / q : kInf)})
          if (r > 0.0) root = std::min(root, r);
      }
    }
    alpha = std::min(alpha, root);
  }
  return alpha;
}

// Solves [0 A' G'; A 0 0; G 0 -W'W] [x; y; z] = [bx; by; bz] in the scaled
// variable zt = W z, where the third block row reads W^{-1} G x - zt = W^{-1} bz.
// Refinement runs on the scaled system, which stays well conditioned as the
// scaling degenerates near the solution.
class KktSolver {
 public:
  KktSolver(const StandardForm& sf, const Scaling& sc) : sf_(sf), sc_(sc) {
    const int n = sf_.n;
    if (sf_.A.rows() == 0) {
      Z_ = MatrixXd::Identity(n, n);
      return;
    }
    // Null space of A from a pivoted QR of A'; x = x_p + Z u parametrizes Ax = b.
    Eigen::ColPivHouseholderQR<MatrixXd> qr(sf_.A.transpose());
    qr.setThreshold(1e-12);
    const int r = static_cast<int>(qr.rank());
    const MatrixXd Q = qr.householderQ();
    Z_ = Q.rightCols(n - r);
    a_cod_.compute(sf_.A);
    at_cod_.compute(sf_.A.transpose());
  }

  // Orthogonal factorization of W^{-1} G Z; avoids forming the squared normal matrix.
  bool factor() {
    M_.resize(sf_.blocks.size());
    for (std::size_t k = 0; k < sf_.blocks.size(); ++k) M_[k] = sc_.scaled_G(k);
    MatrixXd MZ(sf_.m, Z_.cols());
    for (int j = 0; j < Z_.cols(); ++j) MZ.col(j) = apply_M(Z_.col(j));
    qr_.compute(MZ);
    if (Z_.cols() == 0) return true;
    const auto& R = qr_.matrixQR();
    const double r0 = std::abs(R(0, 0));
    const double rl = std::abs(R(Z_.cols() - 1, Z_.cols() - 1));
    return std::isfinite(r0) && rl > 1e-300 && MZ.rows() >= MZ.cols();
  }

  // Returns z and the scaled zt = W z.
  void solve(const VectorXd& bx, const VectorXd& by, const VectorXd& bz, VectorXd& x, VectorXd& y, VectorXd& z,
             VectorXd& zt) const {
    solve_scaled(bx, by, sc_.apply_Winv(bz), x, y, z, zt);
  }

  // Same system with the third right-hand side given as W^{-1} bz.
  void solve_scaled(const VectorXd& bx, const VectorXd& by, const VectorXd& bzs, VectorXd& x, VectorXd& y,
                    VectorXd& z, VectorXd& zt) const {
    solve_once(bx, by, bzs, x, y, zt);
    const double bnorm = std::max({1.0, bx.lpNorm<Eigen::Infinity>(), by.size() ? by.lpNorm<Eigen::Infinity>() : 0.0,
                                   bzs.lpNorm<Eigen::Infinity>()});
    double last = kInf;
    for (int it = 0; it < 5; ++it) {
      VectorXd rx, ry, rz;
      residual(bx, by, bzs, x, y, zt, rx, ry, rz);
      const double rnorm = std::max(
          {rx.lpNorm<Eigen::Infinity>(), ry.size() ? ry.lpNorm<Eigen::Infinity>() : 0.0, rz.lpNorm<Eigen::Infinity>()});
      if (rnorm <= 1e-15 * bnorm || rnorm >= 0.5 * last) break;
      last = rnorm;
      VectorXd cx, cy, cz;
      solve_once(rx, ry, rz, cx, cy, cz);
      x += cx;
      y += cy;
      zt += cz;
    }
    z = sc_.apply_Winv(zt);
  }

 private:
  VectorXd apply_M(const VectorXd& x) const {
    VectorXd out(sf_.m);
    for (std::size_t k = 0; k < sf_.blocks.size(); ++k) {
      const auto& blk = sf_.blocks[k];
      VectorXd xs(static_cast<int>(blk.cols.size()));
      for (std::size_t j = 0; j < blk.cols.size(); ++j) xs[static_cast<int>(j)] = x[blk.cols[j]];
      out.segment(blk.offset, blk.dim) = M_[k] * xs;
    }
    return out;
  }

  VectorXd apply_MT(const VectorXd& z) const {
    VectorXd out = VectorXd::Zero(sf_.n);
    for (std::size_t k = 0; k < sf_.blocks.size(); ++k) {
      const auto& blk = sf_.blocks[k];
      const VectorXd v = M_[k].transpose() * z.segment(blk.offset, blk.dim);
      for (std::size_t j = 0; j < blk.cols.size(); ++j) out[blk.cols[j]] += v[static_cast<int>(j)];
    }
    return out;
  }

  void solve_once(const VectorXd& bx, const VectorXd& by, const VectorXd& bzs, VectorXd& x, VectorXd& y,
                  VectorXd& zt) const {
    const int k = static_cast<int>(Z_.cols());
    VectorXd xp = VectorXd::Zero(sf_.n);
    if (sf_.A.rows() > 0) xp = a_cod_.solve(by);
    x = xp;
    if (k > 0) {
      // (MZ)'(MZ) u = Z'bx + (MZ)'(bzs - M xp), with MZ P = Q R.
      const auto R = qr_.matrixQR().topLeftCorner(k, k).template triangularView<Eigen::Upper>();
      const VectorXd g = qr_.colsPermutation().transpose() * (Z_.transpose() * bx);
      VectorXd rhs = R.transpose().solve(g);
      const VectorXd qb = qr_.householderQ().transpose() * (bzs - apply_M(xp));
      rhs += qb.head(k);
      const VectorXd v = R.solve(rhs);
      x += Z_ * (qr_.colsPermutation() * v);
    }
    zt = apply_M(x) - bzs;
    if (sf_.A.rows() > 0) {
      y = at_cod_.solve(VectorXd(bx - apply_MT(zt)));
    } else {
      y.resize(0);
    }
  }

  void residual(const VectorXd& bx, const VectorXd& by, const VectorXd& bzs, const VectorXd& x, const VectorXd& y,
                const VectorXd& zt, VectorXd& rx, VectorXd& ry, VectorXd& rz) const {
    rx = bx - apply_MT(zt);
    if (sf_.A.rows() > 0) {
      rx -= sf_.A.transpose() * y;
      ry = by - sf_.A * x;
    } else {
      ry.resize(0);
    }
    rz = bzs - (apply_M(x) - zt);
  }

  const StandardForm& sf_;
  const Scaling& sc_;
  std::vector<MatrixXd> M_;
  MatrixXd Z_;
  Eigen::ColPivHouseholderQR<MatrixXd> qr_;
  Eigen::CompleteOrthogonalDecomposition<MatrixXd> a_cod_, at_cod_;
};

double safe_norm(const VectorXd& v) { return v.size() ? v.norm() : 0.0; }

}  // namespace

ConicSolution solve_hsd(const StandardForm& sf, const SolverSettings& settings) {
  ConicSolution out;
  const int n = sf.n;
  const int p = static_cast<int>(sf.A.rows());
  const VectorXd h = sf.h_full();
  const VectorXd& c = sf.c;
  const VectorXd& b = sf.b;
  const VectorXd e = identity(sf);
  const int nu = degree(sf);

  const double c_scale = std::max(1.0, c.norm());
  const double b_scale = std::max(1.0, safe_norm(b));
  const double h_scale = std::max(1.0, h.norm());

  out.x = VectorXd::Zero(n);
  if (sf.m == 0) {
    out.status = SolveStatus::numerical_failure;
    return out;
  }

  Scaling sc(sf);
  sc.set_identity();
  KktSolver kkt(sf, sc);
  if (!kkt.factor()) {
    out.status = SolveStatus::numerical_failure;
    return out;
  }

  VectorXd x, y, z, s;
  {
    VectorXd tmp_z, tmp_zt;
    kkt.solve(VectorXd::Zero(n), b, h, x, y, tmp_z, tmp_zt);
    s = -tmp_z;
    VectorXd tmp_x;
    kkt.solve(-c, VectorXd::Zero(p), VectorXd::Zero(sf.m), tmp_x, y, z, tmp_zt);
  }
  {
    const double ts = -min_eigen(sf, s);
    if (ts >= -1e-8 * std::max(1.0, s.norm())) s += (1.0 + ts) * e;
    const double tz = -min_eigen(sf, z);
    if (tz >= -1e-8 * std::max(1.0, z.norm())) z += (1.0 + tz) * e;
  }
  double tau = 1.0;
  double kappa = 1.0;

  VectorXd best_x = x;
  double best_pres = kInf;
  int iter = 0;
  for (;; ++iter) {
    const VectorXd Gx = sf.G_times(x);
    const VectorXd GTz = sf.GT_times(z);
    VectorXd rx = GTz + c * tau;
    if (p > 0) rx += sf.A.transpose() * y;
    const VectorXd ry = p > 0 ? VectorXd(sf.A * x - b * tau) : VectorXd(0);
    const VectorXd rz = Gx + s - h * tau;
    const double cx = c.dot(x);
    const double by = p > 0 ? b.dot(y) : 0.0;
    const double hz = h.dot(z);
    const double rt = kappa + cx + by + hz;
    const double sz = s.dot(z);
    const double mu = (sz + tau * kappa) / (nu + 1);

    const double pcost = cx / tau;
    const double dcost = -(by + hz) / tau;
    const double pres = std::max(safe_norm(ry) / (tau * b_scale), rz.norm() / (tau * h_scale));
    const double dres = rx.norm() / (tau * c_scale);
    const double gap = sz / (tau * tau);
    out.primal_residual = pres;
    out.gap = gap;
    if (pres < best_pres) {
      best_pres = pres;
      best_x = x / tau;
    }

    const double gap_ref = std::max(1.0, std::min(std::abs(pcost), std::abs(dcost)));
    if (pres <= settings.tol_feas && dres <= settings.tol_feas && gap <= settings.tol_gap * gap_ref &&
        std::abs(pcost - dcost) <= settings.tol_gap * gap_ref + gap) {
      out.status = SolveStatus::optimal;
      out.x = x / tau;
      out.iterations = iter;
      return out;
    }
    if (by + hz < 0.0) {
      VectorXd dual_ray = GTz;
      if (p > 0) dual_ray += sf.A.transpose() * y;
      const double pinf = dual_ray.norm() / c_scale / (-(by + hz));
      if (pinf <= settings.tol_feas) {
        out.status = SolveStatus::infeasible;
        out.x = best_x;
        out.iterations = iter;
        return out;
      }
    }
    if (cx < 0.0) {
      const double ax = p > 0 ? (sf.A * x).norm() / b_scale : 0.0;
      const double dinf = std::max(ax, (Gx + s).norm() / h_scale) / (-cx);
      if (dinf <= settings.tol_feas) {
        out.status = SolveStatus::unbounded;
        out.x = x / tau;
        out.iterations = iter;
        return out;
      }
    }
    if (iter >= settings.max_iter) {
      out.status = SolveStatus::iteration_limit;
      out.x = x / tau;
      out.iterations = iter;
      return out;
    }

    if (!sc.compute(s, z) || !kkt.factor()) {
      out.status = SolveStatus::numerical_failure;
      out.x = x / tau;
      out.iterations = iter;
      return out;
    }
    const VectorXd lam = sc.apply_W(z);
    const VectorXd lam_sq = circ(sf, lam, lam);

    VectorXd vx, vy, vz, vzt;
    kkt.solve(-c, b, h, vx, vy, vz, vzt);
    const double v_den = -kappa / tau + c.dot(vx) + (p > 0 ? b.dot(vy) : 0.0) + h.dot(vz);

    struct Direction {
      VectorXd dx, dy, dz, ds, ds_t, dz_t;
      double dtau = 0.0, dkappa = 0.0;
    };
    auto direction = [&](const VectorXd& d_s, double d_k, double eta) {
      Direction d;
      VectorXd ux, uy, uz, uzt;
      const VectorXd lam_div = circ_solve(sf, lam, d_s);
      kkt.solve_scaled(-eta * rx, -eta * ry, -eta * sc.apply_Winv(rz) - lam_div, ux, uy, uz, uzt);
      const double num = -eta * rt - d_k / tau - (c.dot(ux) + (p > 0 ? b.dot(uy) : 0.0) + h.dot(uz));
      d.dtau = num / v_den;
      d.dx = ux + d.dtau * vx;
      d.dy = p > 0 ? VectorXd(uy + d.dtau * vy) : VectorXd(0);
      d.dz = uz + d.dtau * vz;
      d.dz_t = uzt + d.dtau * vzt;
      d.ds_t = lam_div - d.dz_t;
      d.dkappa = (d_k - kappa * d.dtau) / tau;
      // Taken from the linearized primal residual so that it decays exactly with the step.
      d.ds = -eta * rz - sf.G_times(d.dx) + h * d.dtau;
      return d;
    };
    auto step_to_boundary = [&](const Direction& d) {
      double a = std::min(max_step(sf, lam, d.ds_t), max_step(sf, lam, d.dz_t));
      if (d.dtau < 0.0) a = std::min(a, -tau / d.dtau);
      if (d.dkappa < 0.0) a = std::min(a, -kappa / d.dkappa);
      return a;
    };

    const Direction aff = direction(-lam_sq, -tau * kappa, 1.0);
    const double alpha_aff = std::min(1.0, step_to_boundary(aff));
    const double sigma = std::pow(1.0 - alpha_aff, 3);

    const VectorXd corr = circ(sf, aff.ds_t, aff.dz_t);
    const Direction cmb = direction(-lam_sq + sigma * mu * e - corr,
                                    -tau * kappa + sigma * mu - aff.dtau * aff.dkappa, 1.0 - sigma);
    double alpha_max = std::min(step_to_boundary(cmb), std::min(max_step(sf, s, cmb.ds), max_step(sf, z, cmb.dz)));
    const double alpha = std::min(1.0, 0.99 * alpha_max);
    if (!(alpha > 1e-14) || !cmb.dx.allFinite()) {
      out.status = SolveStatus::numerical_failure;
      out.x = x / tau;
      out.iterations = iter;
      return out;
    }

    s += alpha * cmb.ds;
    z += alpha * cmb.dz;
    x += alpha * cmb.dx;
    if (p > 0) y += alpha * cmb.dy;
    tau += alpha * cmb.dtau;
    kappa += alpha * cmb.dkappa;
  }
}

}  // namespace jbas::conic::detail
