#pragma once

#include "equiloc/bounds/bounds.hpp"
#include "equiloc/train/trainer.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace equiloc::experiments {

enum class Scale { Desk, Paper };

struct SweepConfig {
    bounds::Vary vary = bounds::Vary::EncoderRF;
    std::vector<double> values;
    bounds::BoundInputs fixed;  // the varied field is overwritten per point
    int seeds = 20;
    std::uint64_t master_seed = 0;
    train::TrainConfig train;
    int s_img = 80;              // grown when a point's padding leaves fewer than min_positions
    int min_positions = 4;       // per axis
    int s_pad = 0;               // 0: the smallest padding the receptive fields allow
    std::size_t channels = 32;
    std::size_t n_layers = 5;
    double temperature = 0.5;

    /// Full-scale settings: 80 px, 32 channels, 500 epochs, 20 seeds, full value grids.
    static SweepConfig paper(bounds::Vary vary);
    /// Reduced settings that finish on one CPU core: 48 px, 8 channels, 10 seeds, five values.
    static SweepConfig desk(bounds::Vary vary);

    void validate() const;
};

struct SweepRecord {
    bounds::Vary vary = bounds::Vary::EncoderRF;
    double value = 0;
    int seed = 0;  // seed index; the run seed is derive_seed(master_seed, seed)
    double delta_px = 0;
    bool success = false;
    double enc_term = 0;
    double dec_mean = 0;
    double band = 0;
    bool within_bound = false;

    bool operator==(const SweepRecord&) const = default;
};

/// Concrete setup of one sweep point, or the reason it cannot run.
struct PointPlan {
    bounds::BoundInputs inputs;
    int s_img = 0;
    int s_pad = 0;
    bool feasible = false;
    std::string reason;
};

PointPlan plan_point(const SweepConfig& cfg, double value);

/// Bound terms and verdict for one measured error.
SweepRecord make_record(const bounds::BoundInputs& in, bounds::Vary vary, double value, int seed, double delta,
                        bool success);

struct RunInfo {
    double value;
    int seed;
    const train::RunResult* result;  // null for skipped points
    std::string note;
};
using ProgressFn = std::function<void(const RunInfo&)>;

/// Runs every (value, seed) pair. Infeasible points are skipped and reported
/// through `progress` with a reason. Records come back sorted by (value, seed).
std::vector<SweepRecord> run_sweep(const SweepConfig& cfg, const ProgressFn& progress = {});

/// One training run of a sweep point; exposed so callers can run subsets.
train::RunResult run_point(const SweepConfig& cfg, const PointPlan& plan, int seed);

/// The bound curve matching a sweep, evaluated on its value list.
bounds::BoundCurve sweep_curve(const SweepConfig& cfg);

struct Verdict {
    int runs = 0;
    int successes = 0;
    int violations = 0;  // successful runs with within_bound == false
    double success_rate() const { return runs ? static_cast<double>(successes) / runs : 0.0; }
};

/// Per-value tallies over `records`, keyed by value in ascending order.
std::vector<std::pair<double, Verdict>> tally(const std::vector<SweepRecord>& records);

}  // namespace equiloc::experiments
