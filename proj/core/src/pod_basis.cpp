#include "cfrom/pod_basis.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "cfrom/errors.hpp"
#include "cfrom/io.hpp"

namespace cfrom::pod {

namespace {

// One modified Gram-Schmidt sweep in the M inner product. The Gram route
// loses orthogonality roughly like eps * lambda_max / lambda_j on the small
// modes; this restores it without changing the span or the mode order.
void reorthonormalize(Eigen::MatrixXd& modes, const fe::TriDiagMatrix& mass) {
    for (Eigen::Index j = 0; j < modes.cols(); ++j) {
        Eigen::VectorXd v = modes.col(j);
        for (Eigen::Index k = 0; k < j; ++k) {
            const Eigen::VectorXd mk = mass.apply(Eigen::VectorXd(modes.col(k)));
            v -= v.dot(mk) * modes.col(k);
        }
        modes.col(j) = v / fe::l2_norm(mass, v);
    }
}

void canonicalize_signs(Eigen::MatrixXd& modes) {
    for (Eigen::Index j = 0; j < modes.cols(); ++j) {
        Eigen::Index imax = 0;
        modes.col(j).cwiseAbs().maxCoeff(&imax);
        if (modes(imax, j) < 0.0) modes.col(j) = -modes.col(j);
    }
}

}  // namespace

PodBasis compute_pod(const Eigen::MatrixXd& snapshots, const fe::Mesh1D& mesh,
                     const fe::TriDiagMatrix& mass, double rank_cutoff) {
    if (snapshots.cols() < 1) throw EmptyBasisError("no snapshots given");
    if (snapshots.rows() != mesh.n_dofs() || mass.size() != mesh.n_dofs()) {
        throw ShapeError("snapshot rows do not match the mesh");
    }

    const Eigen::MatrixXd MY = mass.apply(snapshots);
    Eigen::MatrixXd gram = snapshots.transpose() * MY;
    gram = 0.5 * (gram + gram.transpose()).eval();

    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
    if (eig.info() != Eigen::Success) {
        throw NumericalError("Gram eigensolver failed");
    }
    // Eigen sorts ascending.
    const Eigen::VectorXd& lam = eig.eigenvalues();
    const Eigen::Index m = lam.size();
    const double lam_max = lam(m - 1);
    if (!(lam_max > 0.0)) throw EmptyBasisError("snapshot data is identically zero");

    std::vector<Eigen::Index> kept;
    for (Eigen::Index k = m - 1; k >= 0; --k) {
        if (lam(k) >= rank_cutoff * lam_max && lam(k) > 0.0) kept.push_back(k);
    }
    if (kept.empty()) throw EmptyBasisError("all POD eigenvalues fall below the cutoff");

    PodBasis basis;
    basis.mesh = mesh;
    basis.mass = mass;
    const auto d = static_cast<Eigen::Index>(kept.size());
    basis.eigenvalues.resize(d);
    basis.modes.resize(snapshots.rows(), d);
    for (Eigen::Index j = 0; j < d; ++j) {
        const Eigen::Index k = kept[static_cast<std::size_t>(j)];
        basis.eigenvalues(j) = lam(k);
        basis.modes.col(j) = snapshots * eig.eigenvectors().col(k) / std::sqrt(lam(k));
    }
    reorthonormalize(basis.modes, mass);
    canonicalize_signs(basis.modes);
    return basis;
}

PodBasis compute_pod(const fom::SnapshotSet& snaps, const fe::TriDiagMatrix& mass,
                     double rank_cutoff) {
    return compute_pod(snaps.data, snaps.mesh, mass, rank_cutoff);
}

double pod_energy(const PodBasis& basis, int r) {
    if (r < 1 || r > basis.d()) {
        throw RangeError("pod_energy rank " + std::to_string(r) + " outside [1, " +
                         std::to_string(basis.d()) + "]");
    }
    return basis.eigenvalues.head(r).sum() / basis.eigenvalues.sum();
}

double orthonormality_defect(const PodBasis& basis) {
    const Eigen::MatrixXd G = basis.modes.transpose() * basis.mass.apply(basis.modes);
    return (G - Eigen::MatrixXd::Identity(G.rows(), G.cols())).cwiseAbs().maxCoeff();
}

void write_basis(const std::filesystem::path& base, const PodBasis& basis) {
    io::Header h;
    h.set("n_elements", basis.mesh.n_elements());
    h.set("d", basis.d());
    io::write_header(io::header_path(base), h);

    std::vector<double> values(basis.modes.data(), basis.modes.data() + basis.modes.size());
    values.insert(values.end(), basis.eigenvalues.data(),
                  basis.eigenvalues.data() + basis.eigenvalues.size());
    io::write_f64(io::data_path(base), values);
}

PodBasis read_basis(const std::filesystem::path& base) {
    const io::Header h = io::read_header(io::header_path(base));
    PodBasis basis;
    basis.mesh = fe::Mesh1D(static_cast<int>(h.get_long("n_elements")));
    basis.mass = fe::assemble_mass(basis.mesh);
    const long d = h.get_long("d");
    if (d < 1) throw IoError("basis must hold at least one mode");

    const long n = basis.mesh.n_dofs();
    const std::vector<double> values =
        io::read_f64(io::data_path(base), static_cast<std::size_t>(n * d + d));
    basis.modes = Eigen::Map<const Eigen::MatrixXd>(values.data(), n, d);
    basis.eigenvalues = Eigen::Map<const Eigen::VectorXd>(values.data() + n * d, d);
    return basis;
}

}  // namespace cfrom::pod
