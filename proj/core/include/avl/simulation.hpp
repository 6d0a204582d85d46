#pragma once

#include <optional>
#include <string>
#include <vector>

#include "avl/lane_map.hpp"
#include "avl/scenario.hpp"

namespace avl {

struct EpochRow {
    double t_s = 0.0;
    CartesianCoord truth;
    std::optional<int> truth_lane;
    bool solved = false;
    CartesianCoord fix;
    double clock_bias_s = 0.0;
    bool corrected = false;
    double err_uncorrected_m = 0.0;
    double err_corrected_m = 0.0;
    std::optional<int> matched_lane;
    bool correct = false;
    std::optional<double> latency_s;  // delay of the correction message in use
    bool warmup = false;
};

struct RunAggregates {
    int total_epochs = 0;
    int warmup_epochs = 0;
    int matched_epochs = 0;
    int unmatched_epochs = 0;
    double lane_accuracy_pct = 0.0;    // correct / matched, outside warm-up
    double steady_accuracy_pct = 0.0;  // additionally outside lane-change windows
    double rms_corrected_m = 0.0;      // horizontal, epochs with corrections applied
    double rms_uncorrected_m = 0.0;    // horizontal, all solved epochs
    double mean_latency_s = 0.0;
    int corrections_sent = 0;
    int corrections_lost = 0;
    int unsolved_epochs = 0;
};

struct RunReport {
    std::vector<EpochRow> rows;
    RunAggregates aggregates;
    /// [t0, t1] intervals around scripted lane changes, excluded from the
    /// steady-state accuracy figure.
    std::vector<std::pair<double, double>> exclusion_windows_s;

    std::string to_csv() const;
    std::string summary_text() const;
};

RunAggregates compute_aggregates(const std::vector<EpochRow>& rows,
                                 const std::vector<std::pair<double, double>>& exclusions,
                                 int corrections_sent, int corrections_lost);

/// Runs the full pipeline: per epoch observe -> correct -> solve -> window ->
/// match, with the base station emitting corrections through the simulated
/// channel. Deterministic for a fixed scenario and seed.
RunReport run_scenario(const Scenario& scenario);

/// Writes report.csv, summary.txt and geometry.json under `out_dir`.
void emit_outputs(const RunReport& report, const LaneNetwork& network,
                  const std::string& out_dir);

}  // namespace avl
