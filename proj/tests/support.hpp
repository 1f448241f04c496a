#pragma once

// Shared test oracles. Everything here is evaluated pointwise from the hat
// functions with a 5-point Gauss rule, independent of the library kernels.

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <functional>
#include <random>
#include <string>

#include <Eigen/Dense>

#include "cfrom/fe_core.hpp"

namespace cfrom::test {

struct Gauss5 {
    std::array<double, 5> x;  // on [0, 1]
    std::array<double, 5> w;
};

inline const Gauss5& gauss5() {
    static const Gauss5 rule = [] {
        const double a = std::sqrt(5.0 - 2.0 * std::sqrt(10.0 / 7.0)) / 3.0;
        const double b = std::sqrt(5.0 + 2.0 * std::sqrt(10.0 / 7.0)) / 3.0;
        const double wa = (322.0 + 13.0 * std::sqrt(70.0)) / 900.0;
        const double wb = (322.0 - 13.0 * std::sqrt(70.0)) / 900.0;
        const std::array<double, 5> t = {-b, -a, 0.0, a, b};
        const std::array<double, 5> w = {wb, wa, 128.0 / 225.0, wa, wb};
        Gauss5 g{};
        for (int q = 0; q < 5; ++q) {
            g.x[q] = 0.5 * (t[q] + 1.0);
            g.w[q] = 0.5 * w[q];
        }
        return g;
    }();
    return rule;
}

/// Interior coefficient vector -> value at x (boundary values are zero).
inline double fe_value(const Eigen::VectorXd& u, const fe::Mesh1D& mesh, double x) {
    const double h = mesh.h();
    int e = static_cast<int>(std::floor(x / h));
    e = std::clamp(e, 0, mesh.n_elements() - 1);
    const double s = (x - e * h) / h;
    const double ul = e == 0 ? 0.0 : u(e - 1);
    const double ur = e == mesh.n_elements() - 1 ? 0.0 : u(e);
    return ul * (1.0 - s) + ur * s;
}

/// Derivative on element e (constant there).
inline double fe_slope(const Eigen::VectorXd& u, const fe::Mesh1D& mesh, int e) {
    const double ul = e == 0 ? 0.0 : u(e - 1);
    const double ur = e == mesh.n_elements() - 1 ? 0.0 : u(e);
    return (ur - ul) / mesh.h();
}

inline double hat(int i, const fe::Mesh1D& mesh, double x) {
    return std::max(0.0, 1.0 - std::abs(x - mesh.node(i + 1)) / mesh.h());
}

/// Integral over [0, 1] of f(e, x), summed element by element.
inline double integrate(const fe::Mesh1D& mesh, const std::function<double(int, double)>& f) {
    const auto& g = gauss5();
    const double h = mesh.h();
    double sum = 0.0;
    for (int e = 0; e < mesh.n_elements(); ++e) {
        for (int q = 0; q < 5; ++q) sum += h * g.w[q] * f(e, (e + g.x[q]) * h);
    }
    return sum;
}

/// Entry i: integral of v w' phi_i.
inline Eigen::VectorXd convection_oracle(const Eigen::VectorXd& v, const Eigen::VectorXd& w,
                                         const fe::Mesh1D& mesh) {
    Eigen::VectorXd out(mesh.n_dofs());
    for (int i = 0; i < mesh.n_dofs(); ++i) {
        out(i) = integrate(mesh, [&](int e, double x) {
            return fe_value(v, mesh, x) * fe_slope(w, mesh, e) * hat(i, mesh, x);
        });
    }
    return out;
}

inline Eigen::MatrixXd dense_mass_oracle(const fe::Mesh1D& mesh) {
    const int n = mesh.n_dofs();
    Eigen::MatrixXd M(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            M(i, j) = integrate(mesh, [&](int, double x) { return hat(i, mesh, x) * hat(j, mesh, x); });
        }
    }
    return M;
}

inline Eigen::MatrixXd random_matrix(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols) {
    std::normal_distribution<double> dist(0.0, 1.0);
    Eigen::MatrixXd X(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j) {
        for (Eigen::Index i = 0; i < rows; ++i) X(i, j) = dist(rng);
    }
    return X;
}

inline Eigen::VectorXd random_vector(std::mt19937_64& rng, Eigen::Index n) {
    return random_matrix(rng, n, 1).col(0);
}

/// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("cfrom_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace cfrom::test
