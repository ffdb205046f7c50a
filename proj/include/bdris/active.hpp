#pragma once

// Transmit precoding for the effective downlink channel F (L antennas,
// K single-antenna users, columns f_k).  Two designs:
//
//   * regularized zero-forcing, closed form, used standalone and as the
//     initializer of the iterative solver;
//   * sum-rate maximization via the quadratic transform, alternating
//     closed-form updates of the SINR auxiliaries, the quadratic
//     auxiliaries, and the precoder, with the power constraint enforced
//     through a bisected dual variable.

#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bdris/channel.hpp"

namespace bdris {

struct Precoder {
  CMatrix W;            // L x K, column w_k serves user k
  double power_budget = 0.0;

  double power() const { return W.squaredNorm(); }
};

// Per-user SINR under precoder W:  |f_k^H w_k|^2 over interference plus
// noise.  k is zero-based.
inline double sinr(const CMatrix& F, const Precoder& W, int k,
                   double sigma2) {
  const Eigen::Index users = F.cols();
  if (W.W.rows() != F.rows() || W.W.cols() != users) {
    throw std::invalid_argument("sinr: F and W dimensions disagree");
  }
  if (k < 0 || k >= users) {
    throw std::invalid_argument("sinr: user index " + std::to_string(k) +
                                " out of range");
  }
  const Eigen::RowVectorXcd row = F.col(k).adjoint() * W.W;
  const double signal = std::norm(row(k));
  const double total = row.squaredNorm();
  return signal / (total - signal + sigma2);
}

// Sum rate sum_k log2(1 + SINR_k) in bit/s/Hz.
inline double sum_rate(const CMatrix& F, const Precoder& W, double sigma2) {
  if (W.W.rows() != F.rows() || W.W.cols() != F.cols()) {
    throw std::invalid_argument("sum_rate: F and W dimensions disagree");
  }
  const CMatrix b = F.adjoint() * W.W;  // b(k, j) = f_k^H w_j
  double rate = 0.0;
  for (Eigen::Index k = 0; k < b.rows(); ++k) {
    const double signal = std::norm(b(k, k));
    const double interference = b.row(k).squaredNorm() - signal;
    rate += std::log2(1.0 + signal / (interference + sigma2));
  }
  return rate;
}

// Regularized zero-forcing:  W ~ F (F^H F + eta I)^-1 with eta = K
// sigma^2 / P_t, scaled to spend the full budget.
inline Precoder rzf_beamforming(const CMatrix& F, double p_t, double sigma2) {
  if (!(p_t > 0.0) || !(sigma2 > 0.0)) {
    throw std::invalid_argument("rzf_beamforming: p_t and sigma2 must be > 0");
  }
  if (F.norm() == 0.0) {
    throw std::invalid_argument("rzf_beamforming: zero channel matrix");
  }
  const Eigen::Index k = F.cols();
  const double eta = static_cast<double>(k) * sigma2 / p_t;
  CMatrix gram = F.adjoint() * F;
  gram.diagonal().array() += eta;
  CMatrix w = gram.llt().solve(F.adjoint()).adjoint();
  w *= std::sqrt(p_t) / w.norm();
  return Precoder{std::move(w), p_t};
}

// Convergence record of fp_beamforming.  aux_sinr and aux_quad hold the
// final auxiliary variables; objective_trace holds the sum rate after the
// initializer and after every iteration, non-decreasing by construction.
// power_trace mirrors it with ||W||_F^2 so feasibility is checkable at
// every iterate, not only at exit.
struct FPState {
  Eigen::VectorXd aux_sinr;  // gamma_k
  CVector aux_quad;          // y_k
  double dual_mu = 0.0;
  std::vector<double> objective_trace;
  std::vector<double> power_trace;
  int iterations = 0;
  bool converged = false;
};

namespace detail {

// ||W(mu)||_F^2 in the eigenbasis of D: each user contributes
// |coef_k|^2 sum_i |p_k(i)|^2 / (d_i + mu)^2.  Strictly decreasing in mu.
inline double precoder_power(const Eigen::VectorXd& d_eigs,
                             const Eigen::VectorXd& coef_abs2,
                             const Eigen::MatrixXd& p_abs2, double mu) {
  double acc = 0.0;
  for (Eigen::Index k = 0; k < p_abs2.cols(); ++k) {
    if (coef_abs2(k) == 0.0) continue;
    double user = 0.0;
    for (Eigen::Index i = 0; i < p_abs2.rows(); ++i) {
      if (p_abs2(i, k) == 0.0) continue;
      const double gap = d_eigs(i) + mu;
      user += p_abs2(i, k) / (gap * gap);
    }
    acc += coef_abs2(k) * user;
  }
  return acc;
}

}  // namespace detail

// Weighted-sum-rate precoding via the quadratic transform.  Starts from
// RZF and alternates until the sum rate moves by less than tol (relative)
// or max_iter iterations elapse.
inline std::pair<Precoder, FPState> fp_beamforming(const CMatrix& F,
                                                   double p_t, double sigma2,
                                                   double tol = 1e-3,
                                                   int max_iter = 200) {
  if (!(p_t > 0.0) || !(sigma2 > 0.0)) {
    throw std::invalid_argument("fp_beamforming: p_t and sigma2 must be > 0");
  }
  const Eigen::Index l = F.rows();
  const Eigen::Index k = F.cols();

  FPState state;
  if (F.norm() == 0.0) {
    // No signal reaches any user; the zero precoder is optimal.
    state.aux_sinr = Eigen::VectorXd::Zero(k);
    state.aux_quad = CVector::Zero(k);
    state.objective_trace = {0.0};
    state.power_trace = {0.0};
    state.converged = true;
    return {Precoder{CMatrix::Zero(l, k), p_t}, state};
  }

  Precoder precoder = rzf_beamforming(F, p_t, sigma2);
  state.objective_trace.push_back(sum_rate(F, precoder, sigma2));
  state.power_trace.push_back(precoder.power());

  Eigen::VectorXd gamma(k);
  CVector y(k);
  const double f_sq = F.squaredNorm();

  for (int it = 1; it <= max_iter; ++it) {
    const CMatrix b = F.adjoint() * precoder.W;  // b(k, j) = f_k^H w_j

    // SINR auxiliaries at the current precoder, then the quadratic
    // auxiliaries y_k = sqrt(1 + gamma_k) f_k^H w_k / d_k where d_k is the
    // total received power plus noise.
    Eigen::VectorXd d_tot(k);
    for (Eigen::Index u = 0; u < k; ++u) {
      const double signal = std::norm(b(u, u));
      d_tot(u) = b.row(u).squaredNorm() + sigma2;
      gamma(u) = signal / (d_tot(u) - signal);
      y(u) = std::sqrt(1.0 + gamma(u)) * b(u, u) / d_tot(u);
    }

    // Precoder update: w_k = coef_k (D + mu I)^-1 f_k with
    // D = sum_j |y_j|^2 f_j f_j^H and coef_k = sqrt(1 + gamma_k) conj(y_k).
    // mu >= 0 is the smallest multiplier meeting the power budget,
    // evaluated in the eigenbasis of D so each probe costs O(K L).
    CMatrix d_mat = CMatrix::Zero(l, l);
    for (Eigen::Index u = 0; u < k; ++u) {
      d_mat.noalias() +=
          std::norm(y(u)) * (F.col(u) * F.col(u).adjoint());
    }
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(d_mat);
    if (eig.info() != Eigen::Success) {
      throw std::runtime_error("fp_beamforming: eigendecomposition failed");
    }
    Eigen::VectorXd d_eigs = eig.eigenvalues();
    CMatrix p = eig.eigenvectors().adjoint() * F;  // p(i, k) = q_i^H f_k
    // Every f_k with a nonzero coefficient lies in range(D), so its
    // components along numerically-zero eigendirections are rounding
    // noise; drop them before they meet a 1/(d_i + mu)^2.
    const double d_cut = d_eigs(l - 1) * 1e-12;
    for (Eigen::Index i = 0; i < l; ++i) {
      if (d_eigs(i) <= d_cut) {
        p.row(i).setZero();
        d_eigs(i) = 1.0;
      }
    }
    const Eigen::MatrixXd p_abs2 = p.cwiseAbs2();

    CVector coef(k);
    for (Eigen::Index u = 0; u < k; ++u) {
      coef(u) = std::sqrt(1.0 + gamma(u)) * std::conj(y(u));
    }
    const Eigen::VectorXd coef_abs2 = coef.cwiseAbs2();

    double mu = 0.0;
    const double p0 = detail::precoder_power(d_eigs, coef_abs2, p_abs2, 0.0);
    if (!(p0 <= p_t)) {
      // Power is strictly decreasing in mu; double the initial guess
      // until feasible, then bisect to the budget.
      double lo = 0.0;
      double hi = y.squaredNorm() * f_sq / std::sqrt(p_t);
      if (hi <= 0.0) hi = 1.0;
      while (detail::precoder_power(d_eigs, coef_abs2, p_abs2, hi) > p_t) {
        hi *= 2.0;
      }
      for (int bit = 0; bit < 300; ++bit) {
        mu = 0.5 * (lo + hi);
        const double pw =
            detail::precoder_power(d_eigs, coef_abs2, p_abs2, mu);
        if (std::abs(pw - p_t) <= 1e-10 * p_t) break;
        if (pw > p_t) {
          lo = mu;
        } else {
          hi = mu;
        }
      }
    }

    for (Eigen::Index u = 0; u < k; ++u) {
      const Eigen::VectorXcd scaled =
          p.col(u).array() / (d_eigs.array() + mu);
      precoder.W.col(u) = coef(u) * (eig.eigenvectors() * scaled);
    }

    state.dual_mu = mu;
    state.iterations = it;
    state.power_trace.push_back(precoder.power());
    const double rate = sum_rate(F, precoder, sigma2);
    const double prev = state.objective_trace.back();
    state.objective_trace.push_back(rate);
    if (std::abs(rate - prev) <=
        tol * std::max(std::abs(prev),
                       std::numeric_limits<double>::min())) {
      state.converged = true;
      break;
    }
  }

  state.aux_sinr = gamma;
  state.aux_quad = y;
  return {std::move(precoder), state};
}

}  // namespace bdris
