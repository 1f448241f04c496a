#pragma once

// Least-squares calibration of the ROM closure term.
//
// The closure target at snapshot time t_j is
//   g_i(t_j) = ( P_r[u_m (u_m)_x] - u_r (u_r)_x , phi_i ),   i < r,
// with u_m, u_r the rank-m and rank-r reconstructions of the snapshot and P_r
// the ROM projection. The fitted model G(a) = A~ a (+ B~(a, a)) is added to
// the G-ROM right-hand side with a configurable sign.

#include <filesystem>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "cfrom/galerkin_rom.hpp"
#include "cfrom/pod_basis.hpp"

namespace cfrom::closure {

enum class Ansatz { Linear, Quadratic };

std::string to_string(Ansatz a);
Ansatz parse_ansatz(const std::string& text);

/// Sign with which the fitted term enters the ROM right-hand side. -1 keeps
/// the closed model consistent with the exact projected dynamics
/// da/dt = F(a) - g.
inline constexpr int kDynamicsConsistentSign = -1;

struct ClosureTarget {
    Eigen::MatrixXd g;  // r x M
    int r = 0;
    int m = 0;
};

/// Requires coeffs to hold at least m rows and r <= m <= d.
ClosureTarget compute_gsnap(const rom::SnapCoeffs& coeffs, const pod::PodBasis& basis, int r,
                            int m);

struct NormalMatrices {
    Eigen::MatrixXd D;  // sum_j a(t_j) a(t_j)^T
    Eigen::MatrixXd E;  // sum_j g(t_j) a(t_j)^T
    double target_energy = 0.0;  // sum_j |g(t_j)|^2
};

/// coeffs_r is r x M (extra rows are ignored).
NormalMatrices assemble_normal_matrices(const Eigen::MatrixXd& coeffs_r,
                                        const ClosureTarget& target);

enum class SolveRoute { Ridge, Cholesky, PseudoInverse, LeastSquares, MinimumNorm };

std::string to_string(SolveRoute route);

struct ClosureModel {
    Ansatz ansatz = Ansatz::Linear;
    Eigen::MatrixXd A_tilde;
    std::optional<rom::Tensor3> B_tilde;
    int sign = kDynamicsConsistentSign;
    double fit_residual = 0.0;
    double cond_D = 0.0;

    // Diagnostics
    SolveRoute route = SolveRoute::Cholesky;
    int dropped_directions = 0;
    bool underdetermined = false;

    int r() const noexcept { return static_cast<int>(A_tilde.rows()); }
};

inline constexpr double kDefaultCondLimit = 1e12;
inline constexpr double kPseudoInverseCutoff = 1e-12;

/// Solves A~ D = E. With reg > 0 the ridge system A~ (D + reg I) = E is used;
/// otherwise a Cholesky solve when cond(D) <= cond_limit, else a truncated
/// spectral pseudo-inverse. Throws DegenerateDataError when D is zero.
ClosureModel solve_calibration(const NormalMatrices& normal, double reg = 0.0,
                               double cond_limit = kDefaultCondLimit);

/// Quadratic ansatz fitted as linear least squares in the coefficients with
/// B~ symmetric in (m, n). With fit_quadratic_terms = false only A~ is fitted.
ClosureModel solve_calibration_quadratic(const Eigen::MatrixXd& coeffs_r,
                                         const ClosureTarget& target, double reg = 0.0,
                                         bool fit_quadratic_terms = true);

/// sum_j |G(a(t_j)) - g(t_j)|^2, evaluated directly.
double calibration_residual(const ClosureModel& model, const Eigen::MatrixXd& coeffs_r,
                            const ClosureTarget& target);

/// Evaluates the fitted closure G(a).
Eigen::VectorXd evaluate(const ClosureModel& model, const Eigen::VectorXd& a);

/// Returns ops with A += sign A~ and, for the quadratic ansatz, B += sign B~.
rom::RomOperators build_cfrom(const rom::RomOperators& ops, const ClosureModel& model);

void write_model(const std::filesystem::path& base, const ClosureModel& model);
ClosureModel read_model(const std::filesystem::path& base);

}  // namespace cfrom::closure
