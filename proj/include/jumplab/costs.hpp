#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "jumplab/generator.hpp"
#include "jumplab/path.hpp"

namespace jumplab {

struct BuyAndHold;

// Friction parameters: every price within multiplicative factor (1 + epsilon)
// of the quoted path is a legal execution price, so the adversary fills longs
// at (1 + epsilon) * X and closes them at X / (1 + epsilon), and mirrors that
// for shorts.  k bounds the position, N the pre-jump price.
struct CostSpec {
    double epsilon = 0.0;
    double position_bound = 1.0;   // k
    double price_bound = 1.0;      // N

    void validate() const;
};

// True when candidate stays within the epsilon band around reference at every
// grid time, ratios included at both boundaries.  Both paths must be strictly
// positive.
bool eps_close_check(const PathSample& reference, const PathSample& candidate, double eps);

// Worst-case gains of one buy-and-hold leg pair against an adversarial
// epsilon-close execution: zero before entry, then the position marked with
// the round trip charged.  Positions of either sign; prices must be positive.
double cost_adjusted_gains(double position, std::size_t entry_idx, std::size_t exit_idx,
                           const PathSample& path, double eps, std::size_t t_idx);

double gains_with_costs(const BuyAndHold& strategy, const PathSample& path, double eps, double t);

// Floor on the cost-adjusted profit of a constant-profit strategy: profit c,
// position bound k, pre-jump price bound N give c/(1+eps) - 2*eps*k*N.
double robust_profit_floor(double c, double eps, double k, double N);

struct RobustBound {
    double c_bar = 0.0;      // floor at the given epsilon
    double eps_star = 0.0;   // break-even epsilon: the floor's root
};

// Floor at `eps` plus the break-even threshold, found by bisection (the root
// is resolved well past the 1e-10 mark the downstream checks rely on).
RobustBound robust_bound(double c, double eps, double k, double N);

// Fixed-fee alternative: round trip costs two fees regardless of price.
double fee_adjusted_gains(double frictionless_gains, double fee);

// The fragile pair: X jumps by eta ~ Exp(eta_rate) at t = 1 (a surely
// positive, hence direction-predictable, jump) while the epsilon-close
// X~ = 1 + eps + (eta - eps) * 1{t >= 1} turns every eta < eps into a loss
// for the strategy that collects X's jump.  Both paths share one eta draw.
class CounterexamplePair {
  public:
    CounterexamplePair(const TimeGrid& grid, double eps, double eta_rate = 1.0);

    const TimeGrid& grid() const { return grid_; }
    double eps() const { return eps_; }
    const std::vector<std::string>& warnings() const { return warnings_; }

    // The model behind the reference path (for building the jump collector).
    const ModelSpec& reference_model() const { return model_; }
    const PathGenerator& reference_generator() const { return gen_; }

    struct Draw {
        PathSample reference;  // X
        PathSample shifted;    // X~
        double eta = 0.0;
    };
    Draw sample(std::uint64_t seed, std::uint64_t path_index) const;

  private:
    TimeGrid grid_;
    double eps_;
    double eta_rate_;
    std::size_t jump_idx_;
    ModelSpec model_;
    PathGenerator gen_;
    std::vector<std::string> warnings_;
};

CounterexamplePair build_nonrobust_counterexample(const TimeGrid& grid, double eps,
                                                  double eta_rate = 1.0);

}  // namespace jumplab
