#pragma once

#include <functional>
#include <optional>
#include <string_view>

#include "jumplab/model.hpp"
#include "jumplab/path.hpp"
#include "jumplab/rational.hpp"
#include "jumplab/scenario_tree.hpp"
#include "jumplab/time_grid.hpp"

namespace jumplab {

// What is knowable at a grid time: the path history up to that time plus
// every tag revealed by then.  The strict variant ("just before t") drops the
// value at t itself and tags revealed exactly at t, but keeps the left limit
// at t.  Position rules receive only a view, and every accessor throws when
// asked for something beyond the view's scope, so look-ahead is impossible by
// construction rather than by convention.
class InformationView {
  public:
    static InformationView at(const PathSample& path, std::size_t index);
    static InformationView before(const PathSample& path, std::size_t index);

    std::size_t time_index() const { return index_; }
    bool strict() const { return strict_; }
    const TimeGrid& grid() const;

    double value(std::size_t i) const;       // X_{t_i}
    double left_limit(std::size_t i) const;  // X_{t_i-}
    double right_value(std::size_t i) const; // X_{t_i+} where already determined
    // most recent price: X_t for an at-view, X_{t-} for a strict view
    double latest() const;

    std::optional<double> tag(std::string_view name) const;

    // true when the view can see a jump booked at index i (i.e. it lies in
    // the view's past); used by diagnostics, not by position rules
    bool sees_jump_at(std::size_t i) const;

  private:
    InformationView(const PathSample& path, std::size_t index, bool strict);
    const PathSample* path_;
    std::size_t index_;
    bool strict_;
};

// Grid realization of an announcing sequence for a jump at grid index
// `target`: stage n announces from target - horizon/2^n (snapped down to the
// grid, never closer than one step, floored at zero), enters there, and exits
// at the jump.  Both times are additionally capped at t = n.  Once the offset
// underflows one grid step the announce time sits one step before the target.
class AnnouncingSequence {
  public:
    AnnouncingSequence(const TimeGrid& grid, std::size_t target);

    std::size_t target() const { return target_; }
    std::size_t announce_index(int n) const;
    std::size_t entry_index(int n) const;  // announce capped at t = n
    std::size_t exit_index(int n) const;   // target capped at t = n
    double offset(int n) const;            // actual time between announce and target

  private:
    std::size_t cap_index(int n) const;
    TimeGrid grid_;
    std::size_t target_;
};

// ---- conditional statistics on trees ----

// E[payoff(terminal node) | at node]; probabilities renormalize along the
// subtree automatically because branch probabilities are conditional already.
// A NaN payoff marks "undefined at this leaf" and is rejected.
double cond_exp_tree(const ScenarioTree& tree, int node,
                     const std::function<double(int leaf)>& payoff);
double cond_prob_tree(const ScenarioTree& tree, int node,
                      const std::function<bool(int leaf)>& event);
Rational cond_exp_tree_exact(const ScenarioTree& tree, int node,
                             const std::function<Rational(int leaf)>& payoff);

// ---- conditional statistics on path models ----

// Raised when the requested conditional has no closed form under the given
// model; the caller should evaluate on a scenario tree instead.
struct NoClosedFormError : std::runtime_error {
    explicit NoClosedFormError(const std::string& what) : std::runtime_error(what) {}
};

enum class CondTarget {
    ProbPositive,  // P(jump lands positive | view), 0 on "never occurs"
    ExpectedJump,  // E[jump size, 0 if it never occurs | view]
    ProbOccurs     // P(jump occurs within the horizon | view)
};

double cond_stats_path(const ModelSpec& model, std::size_t jump_id, const InformationView& view,
                       CondTarget target);

// E[size * 1{|size| in [1/k, k]} | view] for the jump; needs the size to be
// determined by the view (revealed or degenerate).
double cond_expected_clipped_jump(const ModelSpec& model, std::size_t jump_id, double k,
                                  const InformationView& view);

// P(jump time <= N, |price just before the jump| <= C, positive jump | view)
// for a deterministically timed jump; uses the model's base closed form.
double cond_prob_trade_event(const ModelSpec& model, std::size_t jump_id, double N, double C,
                             const InformationView& view);

}  // namespace jumplab
