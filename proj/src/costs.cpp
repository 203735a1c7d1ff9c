#include "jumplab/costs.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "jumplab/strategies.hpp"

namespace jumplab {

void CostSpec::validate() const {
    if (!(epsilon >= 0.0)) throw std::invalid_argument("cost level must be nonnegative");
    if (!(position_bound >= 1.0))
        throw std::invalid_argument("position bound must be at least 1");
    if (!(price_bound > 0.0)) throw std::invalid_argument("price bound must be positive");
}

bool eps_close_check(const PathSample& reference, const PathSample& candidate, double eps) {
    if (!(eps >= 0.0)) throw std::invalid_argument("cost level must be nonnegative");
    if (reference.values.size() != candidate.values.size())
        throw std::invalid_argument("paths live on different grids");
    const double lo = 1.0 / (1.0 + eps);
    const double hi = 1.0 + eps;
    auto within = [&](double x, double y) {
        if (!(x > 0.0) || !(y > 0.0))
            throw std::invalid_argument("the closeness band is defined for positive prices only");
        const double r = y / x;
        return r >= lo - 1e-15 && r <= hi + 1e-15;
    };
    for (std::size_t i = 0; i < reference.values.size(); ++i) {
        if (!within(reference.values[i], candidate.values[i])) return false;
        if (!within(reference.left[i], candidate.left[i])) return false;
    }
    if (reference.right.has_value() != candidate.right.has_value())
        throw std::invalid_argument("one path has right limits and the other does not");
    if (reference.right) {
        for (std::size_t i = 0; i < reference.right->size(); ++i)
            if (!within((*reference.right)[i], (*candidate.right)[i])) return false;
    }
    return true;
}

double cost_adjusted_gains(double position, std::size_t entry_idx, std::size_t exit_idx,
                           const PathSample& path, double eps, std::size_t t_idx) {
    if (!(eps >= 0.0)) throw std::invalid_argument("cost level must be nonnegative");
    if (t_idx >= path.values.size())
        throw std::invalid_argument("evaluation index beyond the path");
    if (entry_idx == npos || t_idx <= entry_idx) return 0.0;
    const std::size_t b = exit_idx == npos ? t_idx : std::min(exit_idx, t_idx);
    const double xs = path.values[entry_idx];
    const double xb = path.values[b];
    if (!(xs > 0.0) || !(xb > 0.0))
        throw std::invalid_argument("cost adjustment needs strictly positive prices");
    const double m = 1.0 + eps;
    // adversarial fills: a long buys at the ask and sells at the bid, a short
    // shorts at the bid and covers at the ask
    if (position >= 0.0) return position * (xb / m - m * xs);
    return position * (m * xb - xs / m);
}

double gains_with_costs(const BuyAndHold& strategy, const PathSample& path, double eps,
                        double t) {
    const std::size_t t_idx = path.grid.require_index(t, "evaluation time");
    const std::size_t s = strategy.entry.evaluate(path);
    const std::size_t e = strategy.exit.evaluate(path);
    if (s != npos && e != npos && e < s)
        throw std::invalid_argument("exit time precedes entry time");
    if (s == npos || t_idx <= s) return 0.0;
    const double xi = strategy.size(InformationView::at(path, s));
    if (std::abs(xi) > strategy.bound * (1.0 + 1e-12) + 1e-15)
        throw std::invalid_argument("position exceeds its declared bound");
    return cost_adjusted_gains(xi, s, e, path, eps, t_idx);
}

double robust_profit_floor(double c, double eps, double k, double N) {
    if (!(c > 0.0)) throw std::invalid_argument("the frictionless profit must be positive");
    if (!(eps >= 0.0)) throw std::invalid_argument("cost level must be nonnegative");
    if (!(k >= 1.0)) throw std::invalid_argument("position bound must be at least 1");
    if (!(N > 0.0)) throw std::invalid_argument("price bound must be positive");
    return c / (1.0 + eps) - 2.0 * eps * k * N;
}

RobustBound robust_bound(double c, double eps, double k, double N) {
    RobustBound out;
    out.c_bar = robust_profit_floor(c, eps, k, N);

    // floor(0) = c > 0 and the floor is strictly decreasing, so the root is
    // unique; expand the right bracket until the floor goes negative
    double lo = 0.0, hi = std::max(eps, 1.0);
    while (robust_profit_floor(c, hi, k, N) > 0.0) {
        hi *= 2.0;
        if (hi > 1e12) throw std::logic_error("no break-even cost level found");
    }
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (robust_profit_floor(c, mid, k, N) > 0.0)
            lo = mid;
        else
            hi = mid;
        if (hi - lo < 1e-14 * std::max(1.0, hi)) break;
    }
    out.eps_star = 0.5 * (lo + hi);
    return out;
}

double fee_adjusted_gains(double frictionless, double fee) {
    if (!(fee >= 0.0)) throw std::invalid_argument("fee must be nonnegative");
    return frictionless - 2.0 * fee;  // one fee to open, one to close
}

namespace {

const TimeGrid& checked_counterexample_grid(const TimeGrid& grid, double eps, double eta_rate) {
    if (!(eps > 0.0)) throw std::invalid_argument("cost level must be strictly positive");
    if (!(eta_rate > 0.0)) throw std::invalid_argument("jump rate must be positive");
    if (!(grid.horizon > 1.0))
        throw std::invalid_argument("the horizon must extend past the jump at time 1");
    return grid;
}

// reference price: flat at 1, one positive jump of exponential size at t=1;
// its direction is known from the start even though the size is not
ModelSpec fragile_reference_model(double eta_rate) {
    ModelSpec m;
    m.initial_price = 1.0;
    m.base.kind = BaseKind::Flat;
    JumpSpec j;
    j.time.kind = TimeKind::Deterministic;
    j.time.at = 1.0;
    j.size.kind = SizeKind::Exponential;
    j.size.rate = eta_rate;
    j.predictability = Predictability::None;
    m.jumps.push_back(j);
    return m;
}

}  // namespace

CounterexamplePair::CounterexamplePair(const TimeGrid& grid, double eps, double eta_rate)
    : grid_(checked_counterexample_grid(grid, eps, eta_rate)),
      eps_(eps),
      eta_rate_(eta_rate),
      jump_idx_(grid_.require_index(1.0, "jump time")),
      model_(fragile_reference_model(eta_rate)),
      gen_(model_, grid_) {}

CounterexamplePair::Draw CounterexamplePair::sample(std::uint64_t seed,
                                                    std::uint64_t path_index) const {
    Draw d;
    d.reference = gen_.sample(seed, path_index);
    d.eta = d.reference.dx_at(jump_idx_);

    // the shifted path starts eps higher and jumps by eta − eps at the same
    // time, so the two paths agree after the jump; when eta < eps the shifted
    // jump points the other way
    d.shifted.grid = grid_;
    d.shifted.path_id = d.reference.path_id;
    const std::size_t S = grid_.n_steps;
    d.shifted.values.resize(S + 1);
    d.shifted.left.resize(S + 1);
    for (std::size_t i = 0; i <= S; ++i) {
        const double pre = 1.0 + eps_;
        const double post = 1.0 + d.eta;
        d.shifted.values[i] = i >= jump_idx_ ? post : pre;
        d.shifted.left[i] = i > jump_idx_ ? post : pre;
    }
    d.shifted.jumps.push_back(JumpEntry{jump_idx_, d.eta - eps_, 0.0});
    d.shifted.jump_index.push_back(jump_idx_);
    d.shifted.tags.push_back(InfoTag{"jump0.size", jump_idx_, d.eta - eps_});
    d.shifted.tags.push_back(
        InfoTag{"jump0.sign", jump_idx_, d.eta - eps_ > 0.0 ? 1.0 : (d.eta - eps_ < 0.0 ? -1.0 : 0.0)});
    return d;
}

CounterexamplePair build_nonrobust_counterexample(const TimeGrid& grid, double eps,
                                                  double eta_rate) {
    return CounterexamplePair(grid, eps, eta_rate);
}

}  // namespace jumplab
