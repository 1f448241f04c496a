#pragma once

#include <filesystem>

#include <Eigen/Dense>

#include "cfrom/fe_core.hpp"
#include "cfrom/fom_burgers.hpp"

namespace cfrom::pod {

inline constexpr double kDefaultRankCutoff = 1e-12;

/// Mass-orthonormal POD modes (columns of `modes`) with their eigenvalues in
/// descending order. Only eigenvalues >= rank_cutoff * lambda_max are kept.
struct PodBasis {
    fe::Mesh1D mesh{2};
    fe::TriDiagMatrix mass;
    Eigen::MatrixXd modes;
    Eigen::VectorXd eigenvalues;

    int d() const noexcept { return static_cast<int>(modes.cols()); }
    Eigen::VectorXd mode(int j) const { return modes.col(j); }
};

/// Method of snapshots: eigen-decomposes the Gram matrix C = Y^T M Y and
/// maps its eigenvectors back into FE space. Each mode is sign-normalized so
/// that its largest-magnitude entry is positive.
///
/// Throws EmptyBasisError when no eigenvalue survives the cutoff.
PodBasis compute_pod(const fom::SnapshotSet& snaps, const fe::TriDiagMatrix& mass,
                     double rank_cutoff = kDefaultRankCutoff);

/// Same, on a raw N x M snapshot matrix.
PodBasis compute_pod(const Eigen::MatrixXd& snapshots, const fe::Mesh1D& mesh,
                     const fe::TriDiagMatrix& mass, double rank_cutoff = kDefaultRankCutoff);

/// Fraction of the retained eigenvalue sum carried by the first r modes.
double pod_energy(const PodBasis& basis, int r);

/// Largest |phi_i^T M phi_j - delta_ij|.
double orthonormality_defect(const PodBasis& basis);

void write_basis(const std::filesystem::path& base, const PodBasis& basis);
PodBasis read_basis(const std::filesystem::path& base);

}  // namespace cfrom::pod
