#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "bdris/channel.hpp"

namespace bdris {

inline constexpr double kFeasibilityTol = 1e-9;

/// RIS reconfigurable-network connectivity.
enum class Connectivity { FullyConnected, GroupConnected, SingleConnected };

/// BD-RIS architecture tag. Group-connected carries the block size N_g;
/// GroupConnected(1) behaves like SingleConnected and GroupConnected(N)
/// like FullyConnected.
struct Architecture {
  Connectivity kind = Connectivity::FullyConnected;
  int group = 0;  ///< N_g, meaningful for GroupConnected only

  static Architecture fully_connected() { return {Connectivity::FullyConnected, 0}; }
  static Architecture single_connected() { return {Connectivity::SingleConnected, 0}; }
  static Architecture group_connected(int group_size) {
    if (group_size <= 0)
      throw std::invalid_argument("Architecture: group size must be positive");
    return {Connectivity::GroupConnected, group_size};
  }

  /// Block size of the feasible set for an n x n scattering matrix.
  int block_size(int n) const {
    switch (kind) {
      case Connectivity::FullyConnected: return n;
      case Connectivity::SingleConnected: return 1;
      case Connectivity::GroupConnected: return group;
    }
    return n;
  }

  std::string label() const {
    switch (kind) {
      case Connectivity::FullyConnected: return "FC";
      case Connectivity::SingleConnected: return "SC";
      case Connectivity::GroupConnected: return "GC" + std::to_string(group);
    }
    return "?";
  }

  bool operator==(const Architecture&) const = default;
};

/// Frobenius-norm distances from the architecture's feasible set, split by
/// constraint. All three are ~0 for a feasible matrix.
struct FeasibilityResiduals {
  double symmetry = 0.0;   ///< ||Theta - Theta^T||_F
  double unitarity = 0.0;  ///< ||Theta Theta^H - I||_F
  double structure = 0.0;  ///< Frobenius mass outside the block-diagonal support

  double max() const { return std::max({symmetry, unitarity, structure}); }
};

/// Scattering matrix of the RIS together with its architecture tag.
struct ScatteringMatrix {
  CMatrix theta;
  Architecture arch;

  FeasibilityResiduals residuals() const;
  bool feasible(double tol = kFeasibilityTol) const { return residuals().max() <= tol; }
};

namespace detail {

template <typename Derived>
void require_square(const Eigen::MatrixBase<Derived>& z, const char* op) {
  if (z.rows() != z.cols())
    throw std::invalid_argument(std::string(op) + ": input must be square, got " +
                                std::to_string(z.rows()) + "x" + std::to_string(z.cols()));
}

}  // namespace detail

/// Symmetric part (Z + Z^T)/2, the Frobenius-closest symmetric matrix.
template <typename Derived>
CMatrix sym(const Eigen::MatrixBase<Derived>& z) {
  detail::require_square(z, "sym");
  return 0.5 * (z.derived() + z.derived().transpose()).eval();
}

/// Unitary projection U V^H from the SVD Z = U S V^H, the Frobenius-closest
/// matrix with Q Q^H = I. For rank-deficient Z this is one valid projection.
template <typename Derived>
CMatrix uni(const Eigen::MatrixBase<Derived>& z) {
  detail::require_square(z, "uni");
  Eigen::JacobiSVD<CMatrix> svd(z.derived(), Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

/// Projection onto the fully connected feasible set (symmetric unitary
/// matrices). Symmetrizes, takes the SVD X = U S V^H, and pairs the
/// numerical-rank-R column blocks as [U_R, conj(V_{N-R})] V^H. Singular
/// values count toward R when above N * sigma_max * 1e-12; for sym(Z) = 0
/// the SVD factors are pinned to U = V = I so the result is I.
inline ScatteringMatrix symuni(const CMatrix& z) {
  detail::require_square(z, "symuni");
  const Eigen::Index n = z.rows();
  const CMatrix x = sym(z);

  Eigen::JacobiSVD<CMatrix> svd(x, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::VectorXd& s = svd.singularValues();
  const double cutoff = static_cast<double>(n) * (s.size() > 0 ? s(0) : 0.0) * 1e-12;
  Eigen::Index rank = 0;
  while (rank < n && s(rank) > cutoff) ++rank;

  CMatrix theta;
  if (rank == 0) {
    theta = CMatrix::Identity(n, n);
  } else if (rank == n) {
    theta = svd.matrixU() * svd.matrixV().adjoint();
  } else {
    CMatrix u_hat(n, n);
    u_hat.leftCols(rank) = svd.matrixU().leftCols(rank);
    u_hat.rightCols(n - rank) = svd.matrixV().rightCols(n - rank).conjugate();
    theta = u_hat * svd.matrixV().adjoint();
  }

  // A tiny trailing singular value above the rank cutoff can leak SVD
  // rounding into the paired column blocks; one symmetrize-and-repolarize
  // pass restores feasibility without moving the projection.
  const double sym_res = (theta - theta.transpose()).norm();
  const double uni_res = (theta * theta.adjoint() - CMatrix::Identity(n, n)).norm();
  if (sym_res > 1e-11 || uni_res > 1e-11) theta = uni(sym(theta));

  return {std::move(theta), Architecture::fully_connected()};
}

/// The G = N/N_g diagonal blocks of Z, in order. Off-block entries are
/// discarded, matching the Hadamard-mask block-diagonalization.
inline std::vector<CMatrix> block_diagonalize(const CMatrix& z, int group_size) {
  detail::require_square(z, "block_diagonalize");
  const int n = static_cast<int>(z.rows());
  if (group_size <= 0 || n % group_size != 0)
    throw std::invalid_argument("block_diagonalize: group size " + std::to_string(group_size) +
                                " must divide N = " + std::to_string(n));
  std::vector<CMatrix> blocks;
  blocks.reserve(n / group_size);
  for (int g = 0; g < n / group_size; ++g)
    blocks.push_back(z.block(g * group_size, g * group_size, group_size, group_size));
  return blocks;
}

/// Projection onto the group connected feasible set: block-diagonalize, then
/// apply the symmetric unitary projection per block.
inline ScatteringMatrix project_group(const CMatrix& z, int group_size) {
  const auto blocks = block_diagonalize(z, group_size);
  const Eigen::Index n = z.rows();
  CMatrix theta = CMatrix::Zero(n, n);
  for (std::size_t g = 0; g < blocks.size(); ++g) {
    const Eigen::Index off = static_cast<Eigen::Index>(g) * group_size;
    theta.block(off, off, group_size, group_size) = symuni(blocks[g]).theta;
  }
  return {std::move(theta), Architecture::group_connected(group_size)};
}

/// Projection onto the single connected feasible set: phases of the diagonal
/// entries, diag(e^{j arg z_11}, ..., e^{j arg z_NN}). A zero diagonal entry
/// maps to phase 0, i.e. entry 1.
inline ScatteringMatrix project_single(const CMatrix& z) {
  detail::require_square(z, "project_single");
  const Eigen::Index n = z.rows();
  CMatrix theta = CMatrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Complex d = z(i, i);
    theta(i, i) = (std::abs(d) == 0.0) ? Complex(1.0, 0.0)
                                       : Complex(std::polar(1.0, std::arg(d)));
  }
  return {std::move(theta), Architecture::single_connected()};
}

inline FeasibilityResiduals ScatteringMatrix::residuals() const {
  FeasibilityResiduals r;
  const Eigen::Index n = theta.rows();
  if (n != theta.cols()) {
    r.structure = std::numeric_limits<double>::infinity();
    return r;
  }
  r.symmetry = (theta - theta.transpose()).norm();
  r.unitarity = (theta * theta.adjoint() - CMatrix::Identity(n, n)).norm();
  const int ng = arch.block_size(static_cast<int>(n));
  if (ng <= 0 || n % ng != 0) {
    r.structure = std::numeric_limits<double>::infinity();
    return r;
  }
  CMatrix off = theta;
  for (Eigen::Index g = 0; g < n / ng; ++g)
    off.block(g * ng, g * ng, ng, ng).setZero();
  r.structure = off.norm();
  return r;
}

/// Effective channel overload for a tagged scattering matrix.
inline CMatrix effective_channel(const ChannelSet& ch, const ScatteringMatrix& sm) {
  return effective_channel(ch, sm.theta);
}

}  // namespace bdris
