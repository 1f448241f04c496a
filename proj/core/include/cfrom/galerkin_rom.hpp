#pragma once

#include <filesystem>
#include <vector>

#include <Eigen/Dense>

#include "cfrom/fom_burgers.hpp"
#include "cfrom/pod_basis.hpp"

namespace cfrom::rom {

/// Dense r x r x r tensor indexed (i, m, n), n fastest.
class Tensor3 {
public:
    Tensor3() = default;
    explicit Tensor3(int r) : r_(r), data_(static_cast<std::size_t>(r) * r * r, 0.0) {}

    int rank() const noexcept { return r_; }

    double& operator()(int i, int m, int n) { return data_[index(i, m, n)]; }
    double operator()(int i, int m, int n) const { return data_[index(i, m, n)]; }

    /// out_i = sum_{m,n} T(i, m, n) a_n a_m.
    Eigen::VectorXd contract(const Eigen::VectorXd& a) const;

    Tensor3& operator+=(const Tensor3& other);
    Tensor3& operator*=(double s);

    const std::vector<double>& data() const noexcept { return data_; }
    std::vector<double>& data() noexcept { return data_; }

    double max_abs() const;

private:
    std::size_t index(int i, int m, int n) const noexcept {
        return (static_cast<std::size_t>(i) * r_ + m) * r_ + n;
    }

    int r_ = 0;
    std::vector<double> data_;
};

/// Right-hand side b + A a + B(a, a) of the reduced ODE.
struct RomOperators {
    int r = 0;
    double nu = 0.0;
    Eigen::VectorXd b;
    Eigen::MatrixXd A;
    Tensor3 B;
};

/// A_im = -nu (phi_m', phi_i'), B_imn = -(phi_m phi_n', phi_i), b = 0.
RomOperators assemble_rom_operators(const pod::PodBasis& basis, int r, double nu);

/// a(i, j) = u(t_j)^T M phi_i for i < up_to.
struct SnapCoeffs {
    Eigen::MatrixXd a;
    std::vector<double> times;
};

SnapCoeffs snapshot_coefficients(const fom::SnapshotSet& snaps, const pod::PodBasis& basis,
                                 int up_to);

/// The ROM projection filter: sum_{j<r} (u^T M phi_j) phi_j.
Eigen::VectorXd rom_project(const Eigen::VectorXd& u, const pod::PodBasis& basis, int r);

/// Linear combination sum_k coeffs(k) phi_k over the leading coeffs.size() modes.
Eigen::VectorXd expand(const pod::PodBasis& basis, const Eigen::VectorXd& coeffs);

void write_operators(const std::filesystem::path& base, const RomOperators& ops);
RomOperators read_operators(const std::filesystem::path& base);

}  // namespace cfrom::rom
