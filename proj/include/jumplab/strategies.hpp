#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "jumplab/filtration.hpp"
#include "jumplab/generator.hpp"
#include "jumplab/model.hpp"
#include "jumplab/parallel.hpp"
#include "jumplab/path.hpp"

namespace jumplab {

// ---- stopping rules and buy-and-hold ----

// A stopping time restricted to grid times: either a fixed date or the first
// time the price path reaches a level.  evaluate() returns npos when the rule
// never triggers within the horizon.
struct StoppingRule {
    enum class Kind { FixedTime, FirstHitting };
    Kind kind = Kind::FixedTime;
    double at = 0.0;
    double level = 0.0;

    static StoppingRule fixed(double t);
    static StoppingRule hitting(double level);
    std::size_t evaluate(const PathSample& path) const;
};

using PositionRule = std::function<double(const InformationView&)>;

// Enter at `entry`, exit at `exit`, with a position sized by `size` from the
// information available at entry.  The declared bound is enforced when the
// rule is evaluated.
struct BuyAndHold {
    StoppingRule entry;
    StoppingRule exit;
    PositionRule size;
    double bound = 1.0;
};

// position * (X at exit-or-t  -  X at entry-or-t); zero before entry, the
// locked-in profit after exit.  t must be a grid time.
double gains(const BuyAndHold& strategy, const PathSample& path, double t);

// ---- instantaneous strategies ----

// Holds only at the single date tau; its gains jump by position * (jump of X
// at tau) and stay there.  The position is sized from the strict-past view at
// tau, so a rule that tries to read the jump itself throws.
struct InstantaneousStrategy {
    StoppingRule at;
    PositionRule size;
    double bound = 1.0;
};

double gains_instantaneous(const InstantaneousStrategy& strategy, const PathSample& path, double t);

// ---- flash strategies ----

// Whether the limiting gains profile switches on at the limit time or just
// after it (the latter for right-jump collection).
enum class LimitProfile { AtOrAfter, StrictlyAfter };

struct StageWindow {
    std::size_t entry = npos;
    std::size_t exit = npos;
};

// A sequence of buy-and-hold stages squeezing onto a jump time.  Stage n
// holds over (entry_n, exit_n] with position `position(n, view at entry_n)`;
// |position| never exceeds uniform_bound.  `limit_index` is the realized time
// the limiting gains profile switches at (npos: the strategy never trades in
// the limit on this path).
struct FlashStrategy {
    std::string name;
    double uniform_bound = 1.0;
    bool qualifying = true;  // false for negative controls that cannot converge to a sure profit
    LimitProfile profile = LimitProfile::AtOrAfter;
    std::vector<std::string> warnings;
    ModelSpec model;
    TimeGrid grid;
    std::size_t jump_id = 0;  // npos when the target is the right jump

    std::function<std::size_t(const PathSample&)> limit_index;
    std::function<StageWindow(int n, const PathSample&)> window;
    std::function<double(int n, const InformationView&)> position;
};

// Directional strategy: position 2 * P(positive jump | view) - 1, unit bound.
// With the direction revealed this converges to collecting the absolute jump;
// built on an unpredictable model it is a flagged negative control.
FlashStrategy make_sure_profit_strategy(const PathGenerator& gen, std::size_t jump_id = 0);

// Inverse-sizing strategy delivering a unit profit whenever the revealed jump
// magnitude lies in [1/k, k]; positions are bounded by k and the jump is
// skipped (no trade in the limit) outside the band.
FlashStrategy make_constant_profit_strategy(const PathGenerator& gen, double k,
                                            std::size_t jump_id = 0);

// Long-only directional strategy with pathwise loss floor -2C: position
// P(trade event | view) / (1 + (|price| - C)^+) on the event that the jump
// comes by time N, is positive, and the pre-jump price stays within C.
FlashStrategy make_bounded_loss_strategy(const PathGenerator& gen, double N, double C,
                                         std::size_t jump_id = 0);

// Collects a right jump: enters AT the jump time (where the price still sits
// at its old level), exits 1/n later, sized like the constant-profit rule on
// the revealed right-jump size.  Limit profile is strictly-after.
FlashStrategy make_right_jump_strategy(const PathGenerator& gen, double k);

// Clamps a strategy to nonnegative positions by rebuilding it in the
// bounded-loss form restricted to the positive-jump event.  Defaults:
// N = horizon, C = max(1, initial price).
FlashStrategy make_long_only_variant(const FlashStrategy& fs, std::optional<double> N = {},
                                     std::optional<double> C = {});

// Same windows, positions and bound scaled by lambda > 0 (profits rescale).
FlashStrategy scale_positions(const FlashStrategy& fs, double lambda);

// ---- evaluation ----

struct EvalOptions {
    int n_max = 8;
    std::optional<double> eps;  // adversarial half-spread for cost-adjusted gains
    bool keep_trajectories = false;
    Exec exec = Exec::Parallel;
    std::uint64_t seed = 0;  // carried into the report for provenance
};

struct StageStats {
    int n = 0;
    double mean_gap = 0.0;   // mean over paths of sup_t |gains - limit profile|
    double max_gap = 0.0;
    double min_gain = 0.0;   // worst gains over paths and times (loss floor)
    double mean_final = 0.0;
    double min_gain_costs = 0.0;
    double mean_final_costs = 0.0;
};

struct TrajectoryRow {
    int n = 0;
    std::uint64_t path_id = 0;
    std::vector<double> gains;
    std::vector<double> gains_costs;
};

struct GainsReport {
    std::string model_hash;
    std::uint64_t seed = 0;
    int n_max = 0;
    std::size_t n_paths = 0;
    std::optional<double> eps;
    LimitProfile profile = LimitProfile::AtOrAfter;
    TimeGrid grid{1, 1.0};

    std::vector<StageStats> by_n;  // index n-1

    std::vector<std::size_t> limit_idx;  // per path
    std::vector<double> zeta;            // per path, final gains at n_max
    std::vector<double> zeta_costs;      // per path, cost-adjusted (empty without eps)
    std::size_t trade_paths = 0;
    double zeta_mean = 0.0, zeta_min = 0.0, zeta_max = 0.0;

    double slope_log2_gap = 0.0;  // NaN when not estimable
    bool gap_nonincreasing = true;

    // per-stage matrices [n-1][path]
    std::vector<std::vector<double>> final_by_n, gap_by_n, min_by_n;
    std::vector<std::vector<double>> final_costs_by_n, min_costs_by_n;

    std::vector<TrajectoryRow> trajectories;  // filled when keep_trajectories
};

GainsReport evaluate_flash(const FlashStrategy& fs, const std::vector<PathSample>& paths,
                           const EvalOptions& opts);

// columns: n, t, path_id, gains, gains_net_costs (requires keep_trajectories)
void write_gains_csv(const GainsReport& report, std::ostream& os);
std::string gains_summary_json(const GainsReport& report);

}  // namespace jumplab
