#pragma once

// Passive beamforming for the RIS scattering matrix.
//
// The design criterion is the aggregate channel gain
//
//   f(Theta) = || G^H + H^H Theta E ||_F^2,
//
// maximized in two stages: first over the relaxed ball ||Theta||_F^2 <= N
// (this file), then projected onto the architecture's feasible set
// (projections.hpp).  Vectorizing Theta turns the relaxed problem into a
// trust-region subproblem with known spectral solution; the low-complexity
// alternative keeps only the gradient direction at Theta = 0.

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bdris/channel.hpp"
#include "bdris/projections.hpp"

namespace bdris {

// Aggregate channel gain f(Theta).  theta must be N x N.
inline double sum_channel_gain(const ChannelSet& ch, const CMatrix& theta) {
  const int n = ch.ris_elements();
  if (theta.rows() != n || theta.cols() != n) {
    throw std::invalid_argument(
        "sum_channel_gain: theta is " + std::to_string(theta.rows()) + "x" +
        std::to_string(theta.cols()) + ", expected " + std::to_string(n) +
        "x" + std::to_string(n));
  }
  return (ch.G_mat.adjoint() + ch.H_mat.adjoint() * theta * ch.E_mat)
      .squaredNorm();
}

inline double sum_channel_gain(const ChannelSet& ch,
                               const ScatteringMatrix& sm) {
  return sum_channel_gain(ch, sm.theta);
}

// Conjugate (Wirtinger) gradient of f at Theta = 0, up to the constant
// factor absorbed into the ascent step:  grad = H G^H E^H.  Also the
// unnormalized low-complexity solution.
inline CMatrix sum_gain_gradient_at_zero(const ChannelSet& ch) {
  return ch.H_mat * ch.G_mat.adjoint() * ch.E_mat.adjoint();
}

// Vectorized form of the relaxed problem:  with z = vec(Theta),
//
//   f(Theta) = || a + A z ||^2,   A = E^T kron H^H,   a = vec(G^H).
//
// eigvals/eigvecs diagonalize A^H A, eigenvalues sorted descending.
// gamma_star is the multiplier found by relaxed_optimal; it exceeds
// eigvals(0) whenever A^H a != 0.
struct VectorizedProblem {
  CMatrix A_mat;            // (K*L) x N^2
  CVector a_vec;            // K*L
  Eigen::VectorXd eigvals;  // N^2, descending
  CMatrix eigvecs;          // N^2 x N^2, unitary
  double gamma_star = 0.0;
};

enum class RelaxationMethod { Optimal, LowComplexity, Oracle };

inline const char* relaxation_name(RelaxationMethod m) {
  switch (m) {
    case RelaxationMethod::Optimal: return "optimal";
    case RelaxationMethod::LowComplexity: return "low-complexity";
    case RelaxationMethod::Oracle: return "oracle";
  }
  return "unknown";
}

// Solution of the relaxed problem.  degenerate marks inputs where the
// generic formula collapses (A^H a = 0 for the optimal method, M = 0 for
// the low-complexity one) and a canonical fallback was returned.
struct RelaxedSolution {
  CMatrix theta;
  RelaxationMethod method = RelaxationMethod::Optimal;
  double objective = 0.0;
  bool degenerate = false;
};

inline VectorizedProblem vectorize_problem(const ChannelSet& ch) {
  const int l = ch.antennas();
  const int k = ch.users();
  const int n = ch.ris_elements();

  VectorizedProblem vp;
  vp.A_mat.resize(static_cast<Eigen::Index>(k) * l,
                  static_cast<Eigen::Index>(n) * n);
  const CMatrix hh = ch.H_mat.adjoint();  // K x N
  for (int i = 0; i < l; ++i) {
    for (int j = 0; j < n; ++j) {
      vp.A_mat.block(static_cast<Eigen::Index>(i) * k,
                     static_cast<Eigen::Index>(j) * n, k, n) =
          ch.E_mat(j, i) * hh;
    }
  }
  const CMatrix gh = ch.G_mat.adjoint();  // K x L
  vp.a_vec = Eigen::Map<const CVector>(gh.data(), gh.size());

  Eigen::SelfAdjointEigenSolver<CMatrix> eig(vp.A_mat.adjoint() * vp.A_mat);
  if (eig.info() != Eigen::Success) {
    throw std::runtime_error("vectorize_problem: eigendecomposition failed");
  }
  // Eigen returns ascending order; flip to descending.
  vp.eigvals = eig.eigenvalues().reverse();
  vp.eigvecs = eig.eigenvectors().rowwise().reverse();
  return vp;
}

namespace detail {

// phi(gamma) = sum_d |c_d|^2 / (gamma - lambda_d)^2, the squared norm of
// the candidate z(gamma).  Strictly decreasing for gamma > lambda_max.
inline double vectorized_norm_sq(const Eigen::VectorXd& lambda,
                                 const Eigen::VectorXd& c_abs2,
                                 double gamma) {
  double acc = 0.0;
  for (Eigen::Index d = 0; d < lambda.size(); ++d) {
    if (c_abs2(d) == 0.0) continue;
    const double gap = gamma - lambda(d);
    acc += c_abs2(d) / (gap * gap);
  }
  return acc;
}

}  // namespace detail

// Exact maximizer of f over ||Theta||_F^2 <= N.  The stationarity condition
// (gamma I - A^H A) z = A^H a with ||z||^2 = N pins a unique multiplier
// gamma_star to the right of the spectrum, found here by bisection on
// phi(gamma) = N.  If out_problem is non-null it receives the vectorized
// problem including gamma_star.
inline RelaxedSolution relaxed_optimal(const ChannelSet& ch,
                                       VectorizedProblem* out_problem =
                                           nullptr) {
  const int n = ch.ris_elements();
  const double n_d = static_cast<double>(n);
  VectorizedProblem vp = vectorize_problem(ch);

  const CVector aha = vp.A_mat.adjoint() * vp.a_vec;
  const CVector c = vp.eigvecs.adjoint() * aha;
  const Eigen::VectorXd c_abs2 = c.cwiseAbs2();
  const double lambda_max = vp.eigvals(0);

  RelaxedSolution sol;
  sol.method = RelaxationMethod::Optimal;

  CVector z;
  if (aha.norm() == 0.0) {
    // a is orthogonal to the range of A (or zero): any boundary point of
    // the top eigenspace is optimal.  Take the principal eigenvector.
    z = std::sqrt(n_d) * vp.eigvecs.col(0);
    vp.gamma_star = lambda_max;
    sol.degenerate = true;
  } else {
    // Bracket the root of phi(gamma) = N.  The left end sits just outside
    // the spectrum; the offset is relative to lambda_max because the
    // eigenvalues inherit the (tiny) path-loss scale of the channels.
    const double gamma_lo = lambda_max * (1.0 + 2e-12);
    double lo = gamma_lo;
    if (detail::vectorized_norm_sq(vp.eigvals, c_abs2, lo) <= n_d) {
      // Hard case: the root lies inside the bracket offset, so z(gamma_lo)
      // is already short.  Top up along the principal eigenvector, which
      // keeps stationarity at gamma = lambda_max.
      CVector coeff = c.array() / (lo - vp.eigvals.array());
      const double tau_sq = std::max(0.0, n_d - coeff.squaredNorm());
      z = vp.eigvecs * coeff;
      z += std::sqrt(tau_sq) * vp.eigvecs.col(0);
      vp.gamma_star = lo;
      sol.degenerate = true;
    } else {
      double hi = lambda_max + aha.norm() / std::sqrt(n_d);
      while (detail::vectorized_norm_sq(vp.eigvals, c_abs2, hi) > n_d) {
        hi = lambda_max + 2.0 * (hi - lambda_max);
      }
      double mid = hi;
      for (int it = 0; it < 400; ++it) {
        mid = 0.5 * (lo + hi);
        const double phi = detail::vectorized_norm_sq(vp.eigvals, c_abs2, mid);
        if (std::abs(phi - n_d) <= 1e-10) break;
        if (phi > n_d) {
          lo = mid;
        } else {
          hi = mid;
        }
        if (hi - lo <= 1e-14 * lambda_max) {
          mid = 0.5 * (lo + hi);
          break;
        }
      }
      CVector coeff = c.array() / (mid - vp.eigvals.array());
      z = vp.eigvecs * coeff;
      vp.gamma_star = mid;
    }
  }

  sol.theta = Eigen::Map<const CMatrix>(z.data(), n, n);
  sol.objective = (vp.a_vec + vp.A_mat * z).squaredNorm();
  if (out_problem != nullptr) *out_problem = std::move(vp);
  return sol;
}

// Gradient-direction solution:  Theta = (sqrt(N) / ||M||_F) M with
// M = H G^H E^H.  Costs one triple product instead of an N^2 x N^2
// eigendecomposition.  M = 0 collapses to the identity with the
// degenerate flag set.
inline RelaxedSolution relaxed_lowcomplexity(const ChannelSet& ch) {
  const int n = ch.ris_elements();
  const CMatrix m = sum_gain_gradient_at_zero(ch);
  const double m_norm = m.norm();

  RelaxedSolution sol;
  sol.method = RelaxationMethod::LowComplexity;
  if (m_norm == 0.0) {
    sol.theta = CMatrix::Identity(n, n);
    sol.degenerate = true;
  } else {
    sol.theta = (std::sqrt(static_cast<double>(n)) / m_norm) * m;
  }
  sol.objective = sum_channel_gain(ch, sol.theta);
  return sol;
}

inline RelaxedSolution relax(const ChannelSet& ch, RelaxationMethod method) {
  switch (method) {
    case RelaxationMethod::Optimal: return relaxed_optimal(ch);
    case RelaxationMethod::LowComplexity: return relaxed_lowcomplexity(ch);
    case RelaxationMethod::Oracle: break;
  }
  throw std::invalid_argument("relax: method has no direct solver");
}

// Two-stage passive design: solve the relaxed problem, then project onto
// the architecture's feasible set.
inline ScatteringMatrix passive_design(const ChannelSet& ch,
                                       const Architecture& arch,
                                       RelaxationMethod method) {
  const RelaxedSolution rel = relax(ch, method);
  switch (arch.kind) {
    case Connectivity::FullyConnected:
      return symuni(rel.theta);
    case Connectivity::GroupConnected:
      return project_group(rel.theta, arch.group);
    case Connectivity::SingleConnected:
      return project_single(rel.theta);
  }
  throw std::invalid_argument("passive_design: unknown architecture");
}

}  // namespace bdris
