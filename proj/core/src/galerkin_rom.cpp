#include "cfrom/galerkin_rom.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cfrom/errors.hpp"
#include "cfrom/io.hpp"

namespace cfrom::rom {

Eigen::VectorXd Tensor3::contract(const Eigen::VectorXd& a) const {
    Eigen::VectorXd out(r_);
    const double* p = data_.data();
    for (int i = 0; i < r_; ++i) {
        double s = 0.0;
        for (int m = 0; m < r_; ++m) {
            double t = 0.0;
            for (int n = 0; n < r_; ++n) t += p[n] * a(n);
            s += t * a(m);
            p += r_;
        }
        out(i) = s;
    }
    return out;
}

Tensor3& Tensor3::operator+=(const Tensor3& other) {
    if (other.r_ != r_) throw ShapeError("tensor ranks differ");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += other.data_[k];
    return *this;
}

Tensor3& Tensor3::operator*=(double s) {
    for (double& v : data_) v *= s;
    return *this;
}

double Tensor3::max_abs() const {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
}

namespace {

void check_rank(int r, int d, const char* what) {
    if (r < 1 || r > d) {
        throw RangeError(std::string(what) + " rank " + std::to_string(r) + " outside [1, " +
                         std::to_string(d) + "]");
    }
}

}  // namespace

RomOperators assemble_rom_operators(const pod::PodBasis& basis, int r, double nu) {
    check_rank(r, basis.d(), "ROM");
    const Eigen::MatrixXd phi = basis.modes.leftCols(r);
    const fe::TriDiagMatrix K = fe::assemble_stiffness(basis.mesh);

    RomOperators ops;
    ops.r = r;
    ops.nu = nu;
    ops.b = Eigen::VectorXd::Zero(r);
    ops.A = -nu * (phi.transpose() * K.apply(phi));
    ops.A = 0.5 * (ops.A + ops.A.transpose()).eval();

    ops.B = Tensor3(r);
    for (int m = 0; m < r; ++m) {
        const Eigen::VectorXd phi_m = phi.col(m);
        for (int n = 0; n < r; ++n) {
            const Eigen::VectorXd w = fe::convection_form(phi_m, phi.col(n), basis.mesh);
            const Eigen::VectorXd proj = phi.transpose() * w;
            for (int i = 0; i < r; ++i) ops.B(i, m, n) = -proj(i);
        }
    }
    return ops;
}

SnapCoeffs snapshot_coefficients(const fom::SnapshotSet& snaps, const pod::PodBasis& basis,
                                 int up_to) {
    check_rank(up_to, basis.d(), "snapshot coefficient");
    SnapCoeffs c;
    c.a = basis.modes.leftCols(up_to).transpose() * basis.mass.apply(snaps.data);
    c.times = snaps.times;
    return c;
}

Eigen::VectorXd rom_project(const Eigen::VectorXd& u, const pod::PodBasis& basis, int r) {
    check_rank(r, basis.d(), "projection");
    const auto phi = basis.modes.leftCols(r);
    const Eigen::VectorXd moments = phi.transpose() * basis.mass.apply(u);
    return phi * moments;
}

Eigen::VectorXd expand(const pod::PodBasis& basis, const Eigen::VectorXd& coeffs) {
    check_rank(static_cast<int>(coeffs.size()), basis.d(), "expansion");
    return basis.modes.leftCols(coeffs.size()) * coeffs;
}

void write_operators(const std::filesystem::path& base, const RomOperators& ops) {
    io::Header h;
    h.set("r", ops.r);
    h.set("nu", ops.nu);
    io::write_header(io::header_path(base), h);

    // b, then A row-major, then B.
    std::vector<double> values(ops.b.data(), ops.b.data() + ops.r);
    for (int i = 0; i < ops.r; ++i) {
        for (int m = 0; m < ops.r; ++m) values.push_back(ops.A(i, m));
    }
    values.insert(values.end(), ops.B.data().begin(), ops.B.data().end());
    io::write_f64(io::data_path(base), values);
}

RomOperators read_operators(const std::filesystem::path& base) {
    const io::Header h = io::read_header(io::header_path(base));
    RomOperators ops;
    ops.r = static_cast<int>(h.get_long("r"));
    ops.nu = h.get_double("nu");
    if (ops.r < 1) throw IoError("operator rank must be positive");
    const auto r = static_cast<std::size_t>(ops.r);
    const std::vector<double> values = io::read_f64(io::data_path(base), r + r * r + r * r * r);

    ops.b = Eigen::Map<const Eigen::VectorXd>(values.data(), ops.r);
    ops.A.resize(ops.r, ops.r);
    for (int i = 0; i < ops.r; ++i) {
        for (int m = 0; m < ops.r; ++m) ops.A(i, m) = values[r + r * i + m];
    }
    ops.B = Tensor3(ops.r);
    std::copy(values.begin() + static_cast<std::ptrdiff_t>(r + r * r), values.end(),
              ops.B.data().begin());
    return ops;
}

}  // namespace cfrom::rom
