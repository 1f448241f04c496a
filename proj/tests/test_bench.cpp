#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "cfrom/bench.hpp"
#include "cfrom/errors.hpp"
#include "support.hpp"

using namespace cfrom;
using bench::Method;
using bench::MTag;

namespace {

constexpr const char* kSmallConfig = R"(# small pipeline used by the tests
n_elements = 128
t_end = 0.2
snapshot_stride = 10
r_list = 2, 3, 4
rom_dt = 1e-4
timing_repeats = 1
)";

bench::BenchConfig small_config() { return bench::parse_config(kSmallConfig, "small"); }

const bench::Pipeline& small_pipeline() {
    static const bench::Pipeline p = [] {
        bench::Pipeline q(small_config());
        q.prepare();
        return q;
    }();
    return p;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (!line.empty() && line.back() == ',') cells.emplace_back();
        rows.push_back(cells);
    }
    return rows;
}

}  // namespace

TEST(Config, DefaultsMatchPaperSetup) {
    const bench::BenchConfig cfg;
    EXPECT_EQ(cfg.fom.n_elements, 1024);
    EXPECT_EQ(cfg.fom.nu, 1e-3);
    EXPECT_EQ(cfg.fom.dt, 1e-3);
    EXPECT_EQ(cfg.rom_dt, 1e-4);
    EXPECT_EQ(cfg.r_list, (std::vector<int>{6, 10, 15}));
    EXPECT_EQ(cfg.m_tags.size(), 5u);
    EXPECT_EQ(cfg.closure_sign, -1);
    EXPECT_NO_THROW(cfg.validate());
}

TEST(Config, ParsesEveryKey) {
    const auto cfg = bench::parse_config(R"(
nu = 0.002
dt = 0.0005
t_end = 0.5
n_elements = 256
snapshot_stride = 5
newton_tol = 1e-10
newton_max_iter = 12
r_list = 4,8
m_policy_list = r, 2r , d
ansatz = quadratic
closure_sign = 1
rom_dt = 5e-5
ridge = 1e-8
cond_limit = 1e10
rank_cutoff = 1e-10
timing_repeats = 2
output_path = out/report.csv
cache_dir = cache
)");
    EXPECT_EQ(cfg.fom.nu, 0.002);
    EXPECT_EQ(cfg.fom.dt, 0.0005);
    EXPECT_EQ(cfg.fom.n_elements, 256);
    EXPECT_EQ(cfg.fom.snapshot_stride, 5);
    EXPECT_EQ(cfg.fom.newton_max_iter, 12);
    EXPECT_EQ(cfg.r_list, (std::vector<int>{4, 8}));
    EXPECT_EQ(cfg.m_tags, (std::vector<MTag>{MTag::R, MTag::TwoR, MTag::D}));
    EXPECT_EQ(cfg.ansatz, closure::Ansatz::Quadratic);
    EXPECT_EQ(cfg.closure_sign, 1);
    EXPECT_EQ(cfg.ridge, 1e-8);
    EXPECT_EQ(cfg.cond_limit, 1e10);
    EXPECT_EQ(cfg.timing_repeats, 2);
    EXPECT_EQ(cfg.output_path, "out/report.csv");
    EXPECT_EQ(cfg.cache_dir, "cache");
}

TEST(Config, Errors) {
    EXPECT_THROW(bench::parse_config("bogus = 1\n"), ConfigError);
    EXPECT_THROW(bench::parse_config("nu = fast\n"), ConfigError);
    EXPECT_THROW(bench::parse_config("n_elements = 12.5\n"), ConfigError);
    EXPECT_THROW(bench::parse_config("nu = -1\n"), ConfigError);
    EXPECT_THROW(bench::parse_config("r_list = 3, x\n"), ConfigError);
    EXPECT_THROW(bench::parse_config("r_list = 0\n"), ConfigError);
    EXPECT_THROW(bench::parse_config("m_policy_list = 4r\n"), ConfigError);
    EXPECT_THROW(bench::parse_config("closure_sign = 0\n"), ConfigError);
    EXPECT_THROW(bench::parse_config("ansatz = cubic\n"), ConfigError);
    EXPECT_THROW(bench::parse_config("missing equals sign\n"), ConfigError);
    EXPECT_THROW(bench::load_config("/nonexistent/cfrom.cfg"), ConfigError);
}

TEST(MTag, ResolveAndParse) {
    EXPECT_EQ(bench::resolve(MTag::R, 6, 101), 6);
    EXPECT_EQ(bench::resolve(MTag::RPlus1, 6, 101), 7);
    EXPECT_EQ(bench::resolve(MTag::TwoR, 6, 101), 12);
    EXPECT_EQ(bench::resolve(MTag::ThreeR, 6, 101), 18);
    EXPECT_EQ(bench::resolve(MTag::D, 6, 101), 101);
    EXPECT_THROW(bench::resolve(MTag::ThreeR, 6, 15), RangeError);
    EXPECT_THROW(bench::resolve(MTag::R, 20, 15), RangeError);
    for (MTag t : {MTag::R, MTag::RPlus1, MTag::TwoR, MTag::ThreeR, MTag::D}) {
        EXPECT_EQ(bench::parse_mtag(bench::to_string(t)), t);
    }
}

TEST(RomError, HandCase) {
    const fe::Mesh1D mesh(16);
    const auto M = fe::assemble_mass(mesh);
    std::mt19937_64 rng(71);
    const Eigen::MatrixXd Y = test::random_matrix(rng, 15, 3);
    const auto basis = pod::compute_pod(Y, mesh, M);

    Eigen::VectorXd delta = test::random_vector(rng, 15);
    delta *= 0.3 / fe::l2_norm(M, delta);
    rom::RomTrajectory traj;
    traj.dt = 0.5;
    traj.a = Eigen::MatrixXd::Zero(2, 3);
    fom::SnapshotSet snaps;
    snaps.mesh = mesh;
    snaps.data.resize(15, 2);
    snaps.data.col(0) = delta;
    snaps.data.col(1) = -delta;
    snaps.times = {0.0, 1.0};
    EXPECT_NEAR(bench::rom_error(traj, snaps, basis, M), 0.3, 1e-14);
}

TEST(RomError, ProjectedDnsWithAllModes) {
    const auto& p = small_pipeline();
    const int d = p.basis().d();
    const auto coeffs = rom::snapshot_coefficients(p.snapshots(), p.basis(), d);
    rom::RomTrajectory traj;
    traj.dt = p.snapshots().times[1];
    traj.a = coeffs.a;
    double oracle = 0.0;
    for (Eigen::Index j = 0; j < p.snapshots().count(); ++j) {
        const Eigen::VectorXd u = p.snapshots().snapshot(j);
        oracle += fe::l2_norm(p.mass(), Eigen::VectorXd(rom::rom_project(u, p.basis(), d) - u));
    }
    oracle /= static_cast<double>(p.snapshots().count());
    const double err = bench::rom_error(traj, p.snapshots(), p.basis(), p.mass());
    EXPECT_NEAR(err, oracle, 1e-12);
    EXPECT_LE(err, 1e-5 * fe::l2_norm(p.mass(), p.snapshots().snapshot(0)));

    // Identical fields: exact zero when snapshots are themselves in the span.
    fom::SnapshotSet exact = p.snapshots();
    exact.data = p.basis().modes * coeffs.a;
    EXPECT_LE(bench::rom_error(traj, exact, p.basis(), p.mass()), 1e-14);
}

TEST(Pipeline, RowStructureAndOrder) {
    const auto report = small_pipeline().run_all();
    ASSERT_EQ(report.rows.size(), 18u);
    for (int k = 0; k < 3; ++k) {
        EXPECT_EQ(report.rows[k].method, Method::GRom);
        EXPECT_EQ(report.rows[k].r, 2 + k);
        EXPECT_FALSE(report.rows[k].m_tag.has_value());
    }
    const std::vector<MTag> tags = {MTag::R, MTag::RPlus1, MTag::TwoR, MTag::ThreeR, MTag::D};
    for (int k = 0; k < 15; ++k) {
        const auto& row = report.rows[3 + k];
        EXPECT_EQ(row.method, Method::CFRom);
        EXPECT_EQ(row.r, 2 + k / 5);
        EXPECT_EQ(row.m_tag, tags[k % 5]);
        EXPECT_GT(row.offline_s, 0.0);
        EXPECT_GT(row.online_s, 0.0);
    }
    const auto* d_row = report.find(Method::CFRom, 3, MTag::D);
    ASSERT_NE(d_row, nullptr);
    EXPECT_EQ(d_row->m, small_pipeline().basis().d());
}

TEST(Pipeline, EqualRankClosureReproducesGalerkin) {
    const auto& p = small_pipeline();
    for (int r : {2, 3, 4}) {
        const auto g = p.run_grom(r);
        const auto c = p.run_cfrom(r, MTag::R);
        EXPECT_NEAR(c.row.error, g.row.error, 1e-12) << r;
        EXPECT_EQ(c.model->A_tilde.cwiseAbs().maxCoeff(), 0.0);
    }
}

TEST(Pipeline, SingleRankSingleTag) {
    auto cfg = small_config();
    cfg.r_list = {1};
    cfg.m_tags = {MTag::R};
    const auto report = bench::run_pipeline(cfg);
    ASSERT_EQ(report.rows.size(), 2u);
    EXPECT_NEAR(report.rows[0].error, report.rows[1].error, 1e-12);
}

TEST(Pipeline, ClosureSharesGalerkinOperatorShapes) {
    const auto& p = small_pipeline();
    const auto g = p.run_grom(3);
    const auto c = p.run_cfrom(3, MTag::TwoR);
    EXPECT_EQ(c.ops.A.rows(), g.ops.A.rows());
    EXPECT_EQ(c.ops.A.cols(), g.ops.A.cols());
    EXPECT_EQ(c.ops.B.data(), g.ops.B.data());
    EXPECT_GT((c.ops.A - g.ops.A).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(c.trajectory.a.cols(), g.trajectory.a.cols());
}

TEST(Pipeline, ErrorColumnsDeterministic) {
    const auto a = small_pipeline().run_all();
    const auto b = small_pipeline().run_all();
    ASSERT_EQ(a.rows.size(), b.rows.size());
    for (std::size_t k = 0; k < a.rows.size(); ++k) EXPECT_EQ(a.rows[k].error, b.rows[k].error);
}

TEST(Pipeline, TagBeyondBasisCarriesContext) {
    auto cfg = small_config();
    cfg.r_list = {15};
    cfg.m_tags = {MTag::TwoR};
    bench::Pipeline p(cfg);
    p.prepare();
    try {
        p.run_all();
        FAIL() << "expected an input error";
    } catch (const InputError& e) {
        const std::string what = e.what();
        EXPECT_NE(what.find("CF-ROM"), std::string::npos) << what;
        EXPECT_NE(what.find("r = 15"), std::string::npos) << what;
    }
}

TEST(Pipeline, RunBeforePrepareThrows) {
    bench::Pipeline p(small_config());
    EXPECT_THROW(p.run_grom(2), Error);
}

TEST(Pipeline, CacheRoundTrip) {
    const auto dir = test::scratch_dir("cache");
    auto cfg = small_config();
    cfg.cache_dir = dir / "c";
    cfg.r_list = {2, 3};

    bench::Pipeline cold(cfg);
    cold.prepare();
    EXPECT_FALSE(cold.loaded_from_cache());
    const auto first = cold.run_all();

    bench::Pipeline warm(cfg);
    warm.prepare();
    EXPECT_TRUE(warm.loaded_from_cache());
    EXPECT_EQ((warm.snapshots().data - cold.snapshots().data).cwiseAbs().maxCoeff(), 0.0);
    const auto second = warm.run_all();
    ASSERT_EQ(first.rows.size(), second.rows.size());
    for (std::size_t k = 0; k < first.rows.size(); ++k) {
        EXPECT_EQ(first.rows[k].error, second.rows[k].error);
        EXPECT_EQ(first.rows[k].m, second.rows[k].m);
    }

    // A different physical setup must not reuse the cache.
    auto other = cfg;
    other.fom.nu = 2e-3;
    bench::Pipeline changed(other);
    changed.prepare();
    EXPECT_FALSE(changed.loaded_from_cache());

    // A corrupted cache is rebuilt.
    std::filesystem::resize_file(cfg.cache_dir / "basis.bin", 16);
    bench::Pipeline broken(cfg);
    broken.prepare();
    EXPECT_FALSE(broken.loaded_from_cache());
}

TEST(ReportCsv, FormatAndRoundTrip) {
    bench::BenchReport report;
    report.rows.push_back({Method::GRom, 6, std::nullopt, 6, 0.1 + 0.2, 1.5e-3, 2.25e-2});
    report.rows.push_back({Method::CFRom, 6, MTag::RPlus1, 7, 1.0 / 3.0, 4e-3, 2.3e-2});
    std::ostringstream out;
    bench::write_report_csv(out, report);
    const auto rows = parse_csv(out.str());
    ASSERT_EQ(rows.size(), 4u);
    EXPECT_EQ(rows[0][0], "# cfrom bench report");
    EXPECT_EQ(rows[0][1], " format 1");
    EXPECT_EQ(rows[1], (std::vector<std::string>{"method", "r", "m_tag", "error", "offline_s",
                                                 "online_s"}));
    EXPECT_EQ(rows[2][0], "G-ROM");
    EXPECT_EQ(rows[2][2], "");
    EXPECT_EQ(std::stod(rows[2][3]), 0.1 + 0.2);
    EXPECT_EQ(rows[3][0], "CF-ROM");
    EXPECT_EQ(rows[3][2], "r+1");
    EXPECT_EQ(std::stod(rows[3][3]), 1.0 / 3.0);
    EXPECT_EQ(std::stod(rows[3][5]), 2.3e-2);

    const auto dir = test::scratch_dir("csv");
    bench::write_report_csv(dir / "sub" / "r.csv", report);
    std::ifstream in(dir / "sub" / "r.csv");
    std::stringstream buf;
    buf << in.rdbuf();
    EXPECT_EQ(buf.str(), out.str());
}

#ifdef CFROM_CLI_PATH

namespace {

int run_cli(const std::string& args) {
    const std::string cmd = std::string(CFROM_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::filesystem::path write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream(path) << text;
    return path;
}

}  // namespace

TEST(Cli, EndToEndSubcommands) {
    const auto dir = test::scratch_dir("cli");
    const auto cfg = write_file(dir / "small.cfg", kSmallConfig);
    const std::string c = " --config " + cfg.string();
    EXPECT_EQ(run_cli("fom" + c + " --out " + (dir / "snap").string()), 0);
    EXPECT_EQ(run_cli("pod" + c + " --snapshots " + (dir / "snap").string() + " --out " +
                      (dir / "basis").string()),
              0);
    EXPECT_EQ(run_cli("--seed 3 calibrate" + c + " --snapshots " + (dir / "snap").string() +
                      " --basis " + (dir / "basis").string() + " --out " +
                      (dir / "model").string() + " --r 3 --m 2r"),
              0);
    const auto model = closure::read_model(dir / "model");
    EXPECT_EQ(model.r(), 3);
    EXPECT_EQ(model.sign, -1);

    EXPECT_EQ(run_cli("bench" + c + " --out " + (dir / "report.csv").string() + " --cache " +
                      (dir / "cache").string()),
              0);
    EXPECT_TRUE(std::filesystem::exists(dir / "report.csv"));
    EXPECT_TRUE(std::filesystem::exists(dir / "cache" / "cache.key"));
}

TEST(Cli, ConfigErrorsExitTwo) {
    const auto dir = test::scratch_dir("cli_cfg");
    EXPECT_EQ(run_cli("bench --config " + (dir / "missing.cfg").string()), 2);
    const auto bad = write_file(dir / "bad.cfg", "unknown_key = 1\n");
    EXPECT_EQ(run_cli("fom --config " + bad.string() + " --out " + (dir / "x").string()), 2);
    EXPECT_EQ(run_cli("fom --no-such-flag"), 2);
    EXPECT_EQ(run_cli(""), 2);
    EXPECT_EQ(run_cli("pod --snapshots " + (dir / "absent").string() + " --out " +
                      (dir / "b").string()),
              2);
}

TEST(Cli, NumericalFailureExitsThree) {
    const auto dir = test::scratch_dir("cli_num");
    const auto cfg = write_file(dir / "stiff.cfg",
                                "n_elements = 64\nt_end = 0.01\nnewton_max_iter = 1\n"
                                "newton_tol = 1e-300\n");
    EXPECT_EQ(run_cli("fom --config " + cfg.string() + " --out " + (dir / "s").string()), 3);
}

#endif
