#include "cfrom/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "cfrom/errors.hpp"
#include "cfrom/io.hpp"

namespace cfrom::bench {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> items;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        const auto first = item.find_first_not_of(" \t");
        if (first == std::string::npos) continue;
        const auto last = item.find_last_not_of(" \t");
        items.push_back(item.substr(first, last - first + 1));
    }
    return items;
}

template <class T>
T parse_number(const std::string& key, const std::string& text) {
    try {
        std::size_t used = 0;
        T value{};
        if constexpr (std::is_integral_v<T>) {
            value = static_cast<T>(std::stol(text, &used));
        } else {
            value = std::stod(text, &used);
        }
        if (used != text.size()) throw std::invalid_argument(text);
        return value;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': cannot parse '" + text + "'");
    }
}

std::string context(Method method, int r, std::optional<MTag> tag) {
    std::string s = "[" + to_string(method) + ", r = " + std::to_string(r);
    if (tag) s += ", m = " + to_string(*tag);
    return s + "] ";
}

// Re-throws the active exception with a context prefix, keeping the error
// family (input vs numerical) that decides the exit code.
[[noreturn]] void rethrow_with(const std::string& prefix) {
    try {
        throw;
    } catch (const NumericalError& e) {
        throw NumericalError(prefix + e.what());
    } catch (const InputError& e) {
        throw InputError(prefix + e.what());
    }
}

io::Header cache_key(const BenchConfig& cfg) {
    io::Header h;
    h.set("n_elements", cfg.fom.n_elements);
    h.set("nu", cfg.fom.nu);
    h.set("dt", cfg.fom.dt);
    h.set("t_end", cfg.fom.t_end);
    h.set("snapshot_stride", cfg.fom.snapshot_stride);
    h.set("newton_tol", cfg.fom.newton_tol);
    h.set("newton_max_iter", cfg.fom.newton_max_iter);
    h.set("rank_cutoff", cfg.rank_cutoff);
    return h;
}

bool same_entries(const io::Header& a, const io::Header& b) {
    return a.entries() == b.entries();
}

}  // namespace

std::string to_string(MTag tag) {
    switch (tag) {
        case MTag::R: return "r";
        case MTag::RPlus1: return "r+1";
        case MTag::TwoR: return "2r";
        case MTag::ThreeR: return "3r";
        case MTag::D: return "d";
    }
    return "?";
}

MTag parse_mtag(const std::string& text) {
    for (MTag t : {MTag::R, MTag::RPlus1, MTag::TwoR, MTag::ThreeR, MTag::D}) {
        if (to_string(t) == text) return t;
    }
    throw ConfigError("unknown projection-space tag '" + text + "' (expected r, r+1, 2r, 3r, d)");
}

int resolve(MTag tag, int r, int d) {
    int m = 0;
    switch (tag) {
        case MTag::R: m = r; break;
        case MTag::RPlus1: m = r + 1; break;
        case MTag::TwoR: m = 2 * r; break;
        case MTag::ThreeR: m = 3 * r; break;
        case MTag::D: m = d; break;
    }
    if (r < 1 || r > d || m > d) {
        throw RangeError("tag " + to_string(tag) + " with r = " + std::to_string(r) +
                         " resolves to m = " + std::to_string(m) + ", but d = " +
                         std::to_string(d));
    }
    return m;
}

std::string to_string(Method m) { return m == Method::GRom ? "G-ROM" : "CF-ROM"; }

void BenchConfig::validate() const {
    fom.validate();
    if (r_list.empty()) throw ConfigError("r_list is empty");
    for (int r : r_list) {
        if (r < 1) throw ConfigError("r_list entries must be >= 1");
    }
    if (!(rom_dt > 0.0)) throw ConfigError("rom_dt must be positive");
    if (closure_sign != 1 && closure_sign != -1) throw ConfigError("closure_sign must be +1 or -1");
    if (ridge < 0.0) throw ConfigError("ridge must be non-negative");
    if (!(cond_limit > 0.0)) throw ConfigError("cond_limit must be positive");
    if (!(rank_cutoff >= 0.0 && rank_cutoff < 1.0)) {
        throw ConfigError("rank_cutoff must lie in [0, 1)");
    }
    if (timing_repeats < 1) throw ConfigError("timing_repeats must be >= 1");
}

BenchConfig parse_config(const std::string& text, const std::string& origin) {
    io::Header kv;
    try {
        kv = io::parse_key_values(text, origin);
    } catch (const IoError& e) {
        throw ConfigError(e.what());
    }

    BenchConfig cfg;
    for (const auto& [key, value] : kv.entries()) {
        if (key == "nu") {
            cfg.fom.nu = parse_number<double>(key, value);
        } else if (key == "dt") {
            cfg.fom.dt = parse_number<double>(key, value);
        } else if (key == "t_end") {
            cfg.fom.t_end = parse_number<double>(key, value);
        } else if (key == "n_elements") {
            cfg.fom.n_elements = parse_number<int>(key, value);
        } else if (key == "snapshot_stride") {
            cfg.fom.snapshot_stride = parse_number<int>(key, value);
        } else if (key == "newton_tol") {
            cfg.fom.newton_tol = parse_number<double>(key, value);
        } else if (key == "newton_max_iter") {
            cfg.fom.newton_max_iter = parse_number<int>(key, value);
        } else if (key == "r_list") {
            cfg.r_list.clear();
            for (const auto& item : split_list(value)) {
                cfg.r_list.push_back(parse_number<int>(key, item));
            }
        } else if (key == "m_policy_list") {
            cfg.m_tags.clear();
            for (const auto& item : split_list(value)) cfg.m_tags.push_back(parse_mtag(item));
        } else if (key == "ansatz") {
            cfg.ansatz = closure::parse_ansatz(value);
        } else if (key == "closure_sign") {
            cfg.closure_sign = parse_number<int>(key, value);
        } else if (key == "rom_dt") {
            cfg.rom_dt = parse_number<double>(key, value);
        } else if (key == "ridge") {
            cfg.ridge = parse_number<double>(key, value);
        } else if (key == "cond_limit") {
            cfg.cond_limit = parse_number<double>(key, value);
        } else if (key == "rank_cutoff") {
            cfg.rank_cutoff = parse_number<double>(key, value);
        } else if (key == "timing_repeats") {
            cfg.timing_repeats = parse_number<int>(key, value);
        } else if (key == "output_path") {
            cfg.output_path = value;
        } else if (key == "cache_dir") {
            cfg.cache_dir = value;
        } else {
            throw ConfigError(origin + ": unknown config key '" + key + "'");
        }
    }
    cfg.validate();
    return cfg;
}

BenchConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path.string());
}

const ReportRow* BenchReport::find(Method method, int r, std::optional<MTag> tag) const {
    for (const auto& row : rows) {
        if (row.method == method && row.r == r && row.m_tag == tag) return &row;
    }
    return nullptr;
}

double rom_error(const rom::RomTrajectory& traj, const fom::SnapshotSet& snaps,
                 const pod::PodBasis& basis, const fe::TriDiagMatrix& mass) {
    const std::vector<Eigen::VectorXd> fields = rom::reconstruct(traj, basis, snaps.times);
    double sum = 0.0;
    for (std::size_t j = 0; j < fields.size(); ++j) {
        const Eigen::VectorXd diff = fields[j] - snaps.data.col(static_cast<Eigen::Index>(j));
        sum += fe::l2_norm(mass, diff);
    }
    return sum / static_cast<double>(fields.size());
}

Pipeline::Pipeline(BenchConfig cfg) : cfg_(std::move(cfg)) { cfg_.validate(); }

void Pipeline::prepare() {
    namespace fs = std::filesystem;
    const fe::Mesh1D mesh(cfg_.fom.n_elements);
    mass_ = fe::assemble_mass(mesh);
    from_cache_ = false;

    const bool use_cache = !cfg_.cache_dir.empty();
    const fs::path key_path = cfg_.cache_dir / "cache.key";
    const fs::path snap_base = cfg_.cache_dir / "snapshots";
    const fs::path basis_base = cfg_.cache_dir / "basis";
    const io::Header key = cache_key(cfg_);

    if (use_cache && fs::exists(key_path)) {
        try {
            if (same_entries(io::read_header(key_path), key)) {
                snaps_ = fom::read_snapshots(snap_base);
                basis_ = pod::read_basis(basis_base);
                from_cache_ = true;
            }
        } catch (const IoError&) {
            from_cache_ = false;  // stale or partial cache; rebuild below
        }
    }

    if (!from_cache_) {
        snaps_ = fom::run_fom(cfg_.fom);
        basis_ = pod::compute_pod(snaps_, mass_, cfg_.rank_cutoff);
        if (use_cache) {
            fs::create_directories(cfg_.cache_dir);
            fom::write_snapshots(snap_base, snaps_);
            pod::write_basis(basis_base, basis_);
            io::write_header(key_path, key);
        }
    }
    prepared_ = true;
}

Eigen::VectorXd Pipeline::initial_coefficients(int r) const {
    return basis_.modes.leftCols(r).transpose() * mass_.apply(Eigen::VectorXd(snaps_.data.col(0)));
}

closure::ClosureModel Pipeline::calibrate(int r, int m) const {
    // Steps 1-5: coefficients, D, closure target, E, solve.
    const rom::SnapCoeffs coeffs = rom::snapshot_coefficients(snaps_, basis_, m);
    const Eigen::MatrixXd a_r = coeffs.a.topRows(r);
    const closure::ClosureTarget target = closure::compute_gsnap(coeffs, basis_, r, m);
    closure::ClosureModel model =
        cfg_.ansatz == closure::Ansatz::Linear
            ? closure::solve_calibration(closure::assemble_normal_matrices(a_r, target),
                                         cfg_.ridge, cfg_.cond_limit)
            : closure::solve_calibration_quadratic(a_r, target, cfg_.ridge);
    model.sign = cfg_.closure_sign;
    return model;
}

Pipeline::Result Pipeline::build(Method method, int r, std::optional<MTag> tag) const {
    if (!prepared_) throw Error("Pipeline::prepare() must run first");
    try {
        Result res;
        int m = r;
        res.ops = rom::assemble_rom_operators(basis_, r, cfg_.fom.nu);
        if (method == Method::CFRom) {
            m = resolve(*tag, r, basis_.d());
            res.model = calibrate(r, m);
            res.ops = closure::build_cfrom(res.ops, *res.model);
        }
        res.trajectory =
            rom::integrate_forward_euler(res.ops, initial_coefficients(r), cfg_.rom_dt, cfg_.fom.t_end);
        res.row = {method, r, tag, m, rom_error(res.trajectory, snaps_, basis_, mass_), 0.0, 0.0};
        return res;
    } catch (const Error&) {
        rethrow_with(context(method, r, tag));
    }
}

// Machine speed drifts on a scale of tens of milliseconds, so all rows of a
// batch are timed round-robin, starting each round at a different row. Every
// timed run follows an untimed run of the same phase; each row keeps its
// fastest run.
void Pipeline::time_batch(std::vector<Result>& batch) const {
    for (auto& res : batch) {
        res.row.offline_s = std::numeric_limits<double>::infinity();
        res.row.online_s = std::numeric_limits<double>::infinity();
    }
    std::vector<Eigen::VectorXd> a0;
    for (const auto& res : batch) a0.push_back(initial_coefficients(res.row.r));

    double sink = 0.0;
    for (int rep = 0; rep < cfg_.timing_repeats; ++rep) {
        const std::size_t n = batch.size();
        for (std::size_t i = 0; i < n; ++i) {
            Result& res = batch[(i + static_cast<std::size_t>(rep)) % n];
            const ReportRow& row = res.row;
            auto offline = [&] {
                return row.method == Method::GRom
                           ? rom::assemble_rom_operators(basis_, row.r, cfg_.fom.nu).A(0, 0)
                           : calibrate(row.r, row.m).A_tilde(0, 0);
            };
            sink += offline();  // warm-up
            const auto t0 = Clock::now();
            sink += offline();
            res.row.offline_s = std::min(res.row.offline_s, seconds_since(t0));
        }
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t k = (i + static_cast<std::size_t>(rep)) % n;
            auto online = [&] {
                const auto traj =
                    rom::integrate_forward_euler(batch[k].ops, a0[k], cfg_.rom_dt, cfg_.fom.t_end);
                return traj.a(0, traj.a.cols() - 1);
            };
            sink += online();  // warm-up
            const auto t0 = Clock::now();
            sink += online();
            batch[k].row.online_s = std::min(batch[k].row.online_s, seconds_since(t0));
        }
    }
    volatile double keep = sink;
    (void)keep;
}

Pipeline::Result Pipeline::run_grom(int r) const {
    std::vector<Result> batch;
    batch.push_back(build(Method::GRom, r, std::nullopt));
    time_batch(batch);
    return std::move(batch.front());
}

Pipeline::Result Pipeline::run_cfrom(int r, MTag tag) const {
    std::vector<Result> batch;
    batch.push_back(build(Method::CFRom, r, tag));
    time_batch(batch);
    return std::move(batch.front());
}

BenchReport Pipeline::run_all() const {
    BenchReport report;
    for (int r : cfg_.r_list) {
        std::vector<Result> batch;
        batch.push_back(build(Method::GRom, r, std::nullopt));
        for (MTag tag : cfg_.m_tags) batch.push_back(build(Method::CFRom, r, tag));
        time_batch(batch);
        for (auto& res : batch) report.rows.push_back(res.row);
    }
    std::stable_sort(report.rows.begin(), report.rows.end(),
                     [](const ReportRow& a, const ReportRow& b) {
                         if (a.method != b.method) return a.method < b.method;
                         if (a.r != b.r) return a.r < b.r;
                         const int ta = a.m_tag ? static_cast<int>(*a.m_tag) : -1;
                         const int tb = b.m_tag ? static_cast<int>(*b.m_tag) : -1;
                         return ta < tb;
                     });
    return report;
}

BenchReport run_pipeline(const BenchConfig& cfg) {
    Pipeline pipeline(cfg);
    pipeline.prepare();
    BenchReport report = pipeline.run_all();
    if (!cfg.output_path.empty()) write_report_csv(cfg.output_path, report);
    return report;
}

void write_report_csv(std::ostream& out, const BenchReport& report) {
    char buf[64];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return std::string(buf);
    };
    out << "# cfrom bench report, format " << BenchReport::kFormatVersion << '\n';
    out << "method,r,m_tag,error,offline_s,online_s\n";
    for (const auto& row : report.rows) {
        out << to_string(row.method) << ',' << row.r << ','
            << (row.m_tag ? to_string(*row.m_tag) : std::string()) << ',' << num(row.error) << ','
            << num(row.offline_s) << ',' << num(row.online_s) << '\n';
    }
}

void write_report_csv(const std::filesystem::path& path, const BenchReport& report) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot write report " + path.string());
    write_report_csv(out, report);
    if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace cfrom::bench
