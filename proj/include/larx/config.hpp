#pragma once

#include "larx/design.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace larx {

enum class Variant {
    baseline,
    latent_x,
    latent_y,
    latent_both,
    reversed_baseline,
    reversed_latent_x,
    reversed_latent_y,
    reversed_latent_both,
};

Variant parse_variant(const std::string& name);
std::string variant_name(Variant v);
bool latent_dependent(Variant v);
bool latent_explanatory(Variant v);

enum class Transform { log_returns, none };

// A literal target, or the full-sample variance of a series.
struct TargetSetting {
    std::optional<double> literal;
    std::string full_sample_of;   // empty: the block's observed series, else its first proxy
    bool full_sample = false;
};

struct BlockSetting {
    std::string name;
    std::vector<std::string> proxies;       // latent form
    std::optional<std::string> observed;    // single-series form
    std::vector<int> lags{0};
    std::optional<TargetSetting> variance;
    std::optional<double> sum;
    int constrained_version = 0;
};

struct SynthSetting {
    Index rows = 500;
    double noise_sd = 0.01;
    std::uint64_t seed = 0;
    std::optional<std::vector<double>> phi;
    double c = 0.1;
};

struct RunConfig {
    std::vector<std::string> data;            // as written
    std::vector<std::filesystem::path> data_paths;   // resolved
    Transform transform = Transform::log_returns;
    Variant variant = Variant::latent_both;
    std::string label;
    BlockSetting dependent;
    std::vector<int> ar_lags;
    std::vector<BlockSetting> groups;
    SolverOptions solver;
    SampleOptions sample;
    SynthSetting synth;
};

// Relative data paths are resolved against `base`.
RunConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base = {});
RunConfig load_config(const std::filesystem::path& path);

// Loads, aligns and transforms every data file.
SeriesTable load_data(const RunConfig& c);

// Model for the configured variant; full-sample targets are unweighted variances over
// the non-missing, outlier-free dates of `table`.
ModelSpec resolve_spec(const RunConfig& c, const SeriesTable& table);
// Same, for commands without data; full-sample targets are rejected.
ModelSpec resolve_spec(const RunConfig& c);

// Complete config document; with a table, full-sample targets become literals.
nlohmann::json resolved_config(const RunConfig& c, const SeriesTable* table = nullptr);

} // namespace larx
