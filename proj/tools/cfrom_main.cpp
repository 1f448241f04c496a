// cfrom: command-line driver for the Burgers CF-ROM workbench.
//
//   cfrom fom       --config <cfg> --out <base>
//   cfrom pod       --config <cfg> --snapshots <base> --out <base>
//   cfrom calibrate --config <cfg> --snapshots <base> --basis <base> --out <base>
//   cfrom bench     --config <cfg> --out <report.csv> [--cache <dir>]
//
// Exit codes: 0 success, 2 config/input error, 3 numerical failure.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "cfrom/bench.hpp"
#include "cfrom/closure_calibration.hpp"
#include "cfrom/errors.hpp"
#include "cfrom/fom_burgers.hpp"
#include "cfrom/galerkin_rom.hpp"
#include "cfrom/pod_basis.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

cfrom::bench::BenchConfig config_or_default(const std::string& path) {
    if (path.empty()) return cfrom::bench::BenchConfig{};
    return cfrom::bench::load_config(path);
}

int cmd_fom(const std::string& config_path, const std::string& out) {
    const auto cfg = config_or_default(config_path);
    const auto snaps = cfrom::fom::run_fom(cfg.fom);
    cfrom::fom::write_snapshots(out, snaps);
    std::printf("wrote %ld snapshots (%d interior dofs) to %s.{hdr,bin}\n",
                static_cast<long>(snaps.count()), snaps.mesh.n_dofs(), out.c_str());
    return kExitOk;
}

int cmd_pod(const std::string& config_path, const std::string& snapshots, const std::string& out) {
    const auto cfg = config_or_default(config_path);
    const auto snaps = cfrom::fom::read_snapshots(snapshots);
    const auto basis =
        cfrom::pod::compute_pod(snaps, cfrom::fe::assemble_mass(snaps.mesh), cfg.rank_cutoff);
    cfrom::pod::write_basis(out, basis);
    std::printf("d = %d modes, orthonormality defect %.3e\n", basis.d(),
                cfrom::pod::orthonormality_defect(basis));
    for (int r : cfg.r_list) {
        if (r <= basis.d()) {
            std::printf("  energy(r = %d) = %.12f\n", r, cfrom::pod::pod_energy(basis, r));
        }
    }
    return kExitOk;
}

int cmd_calibrate(const std::string& config_path, const std::string& snapshots,
                  const std::string& basis_path, const std::string& out, std::optional<int> r_opt,
                  const std::string& m_tag) {
    using namespace cfrom;
    const auto cfg = config_or_default(config_path);
    const auto snaps = fom::read_snapshots(snapshots);
    const auto basis = pod::read_basis(basis_path);
    if (!(basis.mesh == snaps.mesh)) throw InputError("basis and snapshots use different meshes");

    const int r = r_opt.value_or(cfg.r_list.front());
    const int m = bench::resolve(bench::parse_mtag(m_tag), r, basis.d());

    const auto coeffs = rom::snapshot_coefficients(snaps, basis, m);
    const Eigen::MatrixXd a_r = coeffs.a.topRows(r);
    const auto target = closure::compute_gsnap(coeffs, basis, r, m);
    closure::ClosureModel model =
        cfg.ansatz == closure::Ansatz::Linear
            ? closure::solve_calibration(closure::assemble_normal_matrices(a_r, target),
                                         cfg.ridge, cfg.cond_limit)
            : closure::solve_calibration_quadratic(a_r, target, cfg.ridge);
    model.sign = cfg.closure_sign;
    closure::write_model(out, model);

    std::printf("r = %d, m = %d, ansatz = %s, route = %s\n", r, m,
                closure::to_string(model.ansatz).c_str(), closure::to_string(model.route).c_str());
    std::printf("fit residual %.6e, cond(D) %.6e\n", model.fit_residual, model.cond_D);
    if (model.underdetermined) {
        std::fprintf(stderr, "warning: fewer snapshots than regression unknowns\n");
    }
    return kExitOk;
}

int cmd_bench(const std::string& config_path, const std::string& out, const std::string& cache) {
    auto cfg = config_or_default(config_path);
    if (!out.empty()) cfg.output_path = out;
    if (!cache.empty()) cfg.cache_dir = cache;
    const auto report = cfrom::bench::run_pipeline(cfg);
    cfrom::bench::write_report_csv(std::cout, report);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Burgers POD / G-ROM / CF-ROM workbench"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out;
    std::string cache;
    std::string snapshots;
    std::string basis;
    std::string m_tag = "2r";
    std::optional<int> r_opt;
    long seed = 0;

    app.add_option("--seed", seed, "Seed for test-data generation; the pipeline is deterministic");

    auto* fom = app.add_subcommand("fom", "Run the DNS and write snapshot files");
    fom->add_option("--config", config_path, "Config file (key = value)");
    fom->add_option("--out", out, "Output base path")->required();

    auto* pod = app.add_subcommand("pod", "Compute the POD basis from snapshot files");
    pod->add_option("--config", config_path, "Config file");
    pod->add_option("--snapshots", snapshots, "Snapshot base path")->required();
    pod->add_option("--out", out, "Output base path")->required();

    auto* cal = app.add_subcommand("calibrate", "Fit the closure model and write it");
    cal->add_option("--config", config_path, "Config file");
    cal->add_option("--snapshots", snapshots, "Snapshot base path")->required();
    cal->add_option("--basis", basis, "Basis base path")->required();
    cal->add_option("--out", out, "Output base path")->required();
    cal->add_option("--r", r_opt, "ROM rank (default: first entry of r_list)");
    cal->add_option("--m", m_tag, "Projection-space tag: r, r+1, 2r, 3r or d");

    auto* bench = app.add_subcommand("bench", "Run the full pipeline and write the CSV report");
    bench->add_option("--config", config_path, "Config file");
    bench->add_option("--out", out, "CSV report path");
    bench->add_option("--cache", cache, "Snapshot/basis cache directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (*fom) return cmd_fom(config_path, out);
        if (*pod) return cmd_pod(config_path, snapshots, out);
        if (*cal) return cmd_calibrate(config_path, snapshots, basis, out, r_opt, m_tag);
        if (*bench) return cmd_bench(config_path, out, cache);
    } catch (const cfrom::InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const cfrom::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return kExitOk;
}
