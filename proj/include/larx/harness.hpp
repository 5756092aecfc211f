#pragma once

#include "larx/design.hpp"
#include "larx/solver.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace larx {

struct ForecastRecord {
    Date date;
    double actual = 0.0;
    double forecast = 0.0;
    double benchmark = 0.0;
    bool skipped = false;
    std::string reason;
    Index history_rows = 0;
    Index dof = 0;
    int iterations = 0;
};

struct ForecastRun {
    std::string label;
    std::vector<ForecastRecord> records;
    std::optional<double> oos_r2;   // set when at least 2 windows produced forecasts

    Index usable() const;
};

// Expanding-window one-step forecasts over the outlier-free sample assembled from `table`.
// A single-proxy dependent is reported in the units of that proxy.
ForecastRun rolling_oos_forecast(const SeriesTable& table, const ModelSpec& spec, std::string label = {});

// Decay-weighted mean of the history.
double naive_benchmark(const VectorXd& history, const WeightVector& weights);

// 1 - SSE(forecast) / SSE(benchmark) over non-skipped records.
double oos_r2(const std::vector<ForecastRecord>& records);

struct SynthParams {
    Index rows = 500;
    std::optional<VectorXd> phi;                 // one entry per AR lag
    std::optional<std::vector<VectorXd>> beta;   // one vector of V_j entries per group
    double c = 0.1;
    double factor_persistence = 0.5;   // AR(1) coefficient of each latent x̃_j
    Index burn_in = 100;
};

struct SynthTruth {
    VectorXd w;
    BlockVec omega;
    VectorXd phi;
    BlockVec beta;
    double c = 0.0;
    double noise_sd = 0.0;
    std::uint64_t seed = 0;
    VectorXd latent_y;   // ỹ on the table dates
    MatrixXd latent_x;   // x̃_j on the table dates, one column per group
};

struct SynthOutput {
    SeriesTable table;
    SynthTruth truth;
};

// Latent ARX data for `spec`: observed proxies are invertible mixtures of each latent
// series with independent nuisance series, plus measurement noise; the latent
// dependent also carries a regression error. Both noise terms have scale noise_sd.
SynthOutput synth_generate(const ModelSpec& spec, const SynthParams& params, double noise_sd, std::uint64_t seed);

// Reconstructs X·ΩΩ'·ω and compares it with X·ω; Ω defaults to the principal
// component rotation of X. True when they agree within 1e-10 (relative).
bool pca_redundancy_check(const MatrixXd& x, const VectorXd& omega, const std::optional<MatrixXd>& rotation = {});

} // namespace larx
