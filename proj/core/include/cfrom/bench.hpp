#pragma once

// FOM -> POD -> G-ROM / CF-ROM benchmark pipeline and its CSV report.

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "cfrom/closure_calibration.hpp"
#include "cfrom/fom_burgers.hpp"
#include "cfrom/galerkin_rom.hpp"
#include "cfrom/pod_basis.hpp"
#include "cfrom/rom_integrator.hpp"

namespace cfrom::bench {

/// Projection-space choice for the closure target, resolved against r and d.
enum class MTag { R, RPlus1, TwoR, ThreeR, D };

std::string to_string(MTag tag);
MTag parse_mtag(const std::string& text);
/// Throws RangeError when the resolved rank exceeds d.
int resolve(MTag tag, int r, int d);

struct BenchConfig {
    fom::FomConfig fom;
    std::vector<int> r_list = {6, 10, 15};
    std::vector<MTag> m_tags = {MTag::R, MTag::RPlus1, MTag::TwoR, MTag::ThreeR, MTag::D};
    closure::Ansatz ansatz = closure::Ansatz::Linear;
    int closure_sign = closure::kDynamicsConsistentSign;
    double rom_dt = 1e-4;
    double ridge = 0.0;
    double cond_limit = closure::kDefaultCondLimit;
    double rank_cutoff = pod::kDefaultRankCutoff;
    /// Each timed phase runs this many times; the fastest run is reported.
    int timing_repeats = 5;
    std::filesystem::path output_path;
    std::filesystem::path cache_dir;

    void validate() const;
};

/// Parses `key = value` lines; unknown keys and bad values throw ConfigError.
BenchConfig parse_config(const std::string& text, const std::string& origin = "<config>");
BenchConfig load_config(const std::filesystem::path& path);

enum class Method { GRom, CFRom };

std::string to_string(Method m);

struct ReportRow {
    Method method = Method::GRom;
    int r = 0;
    std::optional<MTag> m_tag;  // empty for G-ROM
    int m = 0;
    double error = 0.0;
    double offline_s = 0.0;
    double online_s = 0.0;
};

struct BenchReport {
    static constexpr int kFormatVersion = 1;
    std::vector<ReportRow> rows;

    /// Row for (method, r, tag) or nullptr.
    const ReportRow* find(Method method, int r, std::optional<MTag> tag = std::nullopt) const;
};

/// Mean over snapshot times of the mass-weighted L2 distance between the
/// reconstructed ROM field and the stored DNS state.
double rom_error(const rom::RomTrajectory& traj, const fom::SnapshotSet& snaps,
                 const pod::PodBasis& basis, const fe::TriDiagMatrix& mass);

/// Shared offline data plus the per-(r, m) stages. Results of each stage are
/// deterministic; timings are measured with a monotonic clock.
class Pipeline {
public:
    explicit Pipeline(BenchConfig cfg);

    /// Loads the snapshot/basis cache when it matches the config, otherwise
    /// runs the FOM and POD (and refreshes the cache if one is configured).
    void prepare();

    const BenchConfig& config() const noexcept { return cfg_; }
    const fom::SnapshotSet& snapshots() const { return snaps_; }
    const pod::PodBasis& basis() const { return basis_; }
    const fe::TriDiagMatrix& mass() const { return mass_; }
    bool loaded_from_cache() const noexcept { return from_cache_; }

    struct Result {
        ReportRow row;
        rom::RomOperators ops;
        std::optional<closure::ClosureModel> model;
        rom::RomTrajectory trajectory;
    };

    Result run_grom(int r) const;
    Result run_cfrom(int r, MTag tag) const;

    /// Runs every configured combination, timing all rows of one r together,
    /// and orders rows canonically:
    /// G-ROM rows first, then CF-ROM rows, each by r and then by tag order.
    BenchReport run_all() const;

private:
    Eigen::VectorXd initial_coefficients(int r) const;
    closure::ClosureModel calibrate(int r, int m) const;
    Result build(Method method, int r, std::optional<MTag> tag) const;
    void time_batch(std::vector<Result>& batch) const;

    BenchConfig cfg_;
    fom::SnapshotSet snaps_;
    pod::PodBasis basis_;
    fe::TriDiagMatrix mass_;
    bool prepared_ = false;
    bool from_cache_ = false;
};

/// prepare() + run_all(), then writes the CSV to cfg.output_path when set.
BenchReport run_pipeline(const BenchConfig& cfg);

/// CSV with header `method,r,m_tag,error,offline_s,online_s` after one
/// leading `#` comment line carrying the format version. Floats use 17
/// significant digits.
void write_report_csv(std::ostream& out, const BenchReport& report);
void write_report_csv(const std::filesystem::path& path, const BenchReport& report);

}  // namespace cfrom::bench
