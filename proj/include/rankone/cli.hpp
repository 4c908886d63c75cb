#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rankone/cltlab.hpp"
#include "rankone/construction.hpp"
#include "rankone/ornstein.hpp"
#include "rankone/trigpoly.hpp"

namespace rankone::cli {

/// Tower family named in the config: a deterministic rule or a random ensemble.
struct FamilySpec {
    std::string name;
    std::size_t depth = 1;
    std::optional<SpacerRule> rule;          // deterministic families
    std::optional<EnsembleConfig> ensemble;  // ornstein families
    OrnsteinVariant variant = OrnsteinVariant::standard;
    BuildOptions build;
};

struct RieszParams {
    std::vector<std::size_t> mass_n;  // empty: 1..depth
    std::vector<std::size_t> selection;
    std::optional<std::size_t> stage;
    std::optional<std::int64_t> weak_frequency;
};

struct BourgainParams {
    std::size_t budget = 10;
    std::size_t first = 1;
    std::optional<std::size_t> last;
};

struct CltParams {
    std::optional<std::size_t> stage;  // default: depth
    std::size_t log2_grid = 20;
    std::vector<Arc> arcs{Arc{}};
    double tail_x = 2.0;
    bool dispersion = false;
};

struct ThetaParams {
    std::optional<std::size_t> stage;
    std::vector<double> x{0.5, 1.0, 2.0};
};

struct WordsParams {
    std::optional<std::size_t> stage;
    bool csv = false;
};

struct OrnsteinParams {
    std::size_t stage = 0;
    std::size_t samples = 1000;
    std::size_t omega_samples = kMinOmegaSamples;
    double t0 = 1.0;
    double tolerance = 1e-6;
    std::size_t histogram_bins = 60;
};

struct RunConfig {
    FamilySpec family;
    GridPolicy grid;
    std::uint64_t seed = 0;
    RieszParams riesz;
    BourgainParams bourgain;
    CltParams clt;
    ThetaParams theta;
    WordsParams words;
    OrnsteinParams ornstein;
};

/// Parses and validates a JSON config document. Throws ValidationError naming
/// the offending key (or line and column for syntax errors).
RunConfig parse_config(const std::string& text);

/// Command-line values that override the config file.
struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> threads;
    std::optional<std::size_t> grid_cap;
    std::optional<std::size_t> depth;
    std::optional<std::size_t> samples;
    std::optional<std::size_t> stage;
};

void apply_overrides(RunConfig& config, const Overrides& overrides);

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvariant = 1;
inline constexpr int kExitConfig = 2;

/// Runs one subcommand, writing <command>.json, CSV files and metadata.json to
/// `out`. Returns the exit code; invariant failures are named on `log`.
int run_command(const std::string& command, const RunConfig& config, const std::filesystem::path& out,
                std::ostream& log);

/// describe, riesz, bourgain, clt, theta, words, ornstein
const std::vector<std::string>& command_names();

}  // namespace rankone::cli
