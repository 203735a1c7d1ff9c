#include "jumplab/filtration.hpp"

#include <cmath>
#include <stdexcept>

#include "jumplab/rng.hpp"

namespace jumplab {

// ---- InformationView ----

InformationView::InformationView(const PathSample& path, std::size_t index, bool strict)
    : path_(&path), index_(index), strict_(strict) {
    if (index >= path.values.size())
        throw std::out_of_range("view index beyond the grid");
}

InformationView InformationView::at(const PathSample& path, std::size_t index) {
    return InformationView(path, index, false);
}

InformationView InformationView::before(const PathSample& path, std::size_t index) {
    return InformationView(path, index, true);
}

const TimeGrid& InformationView::grid() const { return path_->grid; }

double InformationView::value(std::size_t i) const {
    const std::size_t limit = strict_ ? index_ : index_ + 1;
    if (i >= limit) throw std::out_of_range("position rule looked at a future price");
    return path_->values[i];
}

double InformationView::left_limit(std::size_t i) const {
    if (i > index_) throw std::out_of_range("position rule looked at a future left limit");
    return path_->left[i];
}

double InformationView::right_value(std::size_t i) const {
    // X_{t+} is determined by the history once any later time is in view; at
    // the view's own time it is known only if revealed there (right jump tag).
    if (i < index_) return path_->right_at(i);
    if (i == index_ && !strict_) {
        for (const auto& t : path_->tags)
            if (t.reveal_index == index_ && t.name == "rjump.size") return path_->right_at(i);
    }
    throw std::out_of_range("position rule looked at an undetermined right limit");
}

double InformationView::latest() const {
    return strict_ ? path_->left[index_] : path_->values[index_];
}

std::optional<double> InformationView::tag(std::string_view name) const {
    for (const auto& t : path_->tags) {
        if (t.name != name) continue;
        if (strict_ ? t.reveal_index < index_ : t.reveal_index <= index_) return t.value;
        return std::nullopt;  // exists but not yet revealed
    }
    return std::nullopt;
}

bool InformationView::sees_jump_at(std::size_t i) const {
    const std::size_t limit = strict_ ? index_ : index_ + 1;
    if (i >= limit) return false;
    return path_->dx_at(i) != 0.0;
}

// ---- AnnouncingSequence ----

AnnouncingSequence::AnnouncingSequence(const TimeGrid& grid, std::size_t target)
    : grid_(grid), target_(target) {
    if (target == 0 || target > grid.n_steps)
        throw std::invalid_argument("announcing sequence target must lie in (0, horizon]");
}

std::size_t AnnouncingSequence::announce_index(int n) const {
    if (n < 1) throw std::invalid_argument("announcing stage must be >= 1");
    std::size_t back = n < 63 ? (grid_.n_steps >> n) : 0;
    if (back == 0) back = 1;  // offset underflowed the grid: one step before the jump
    return target_ > back ? target_ - back : 0;
}

std::size_t AnnouncingSequence::cap_index(int n) const {
    if (static_cast<double>(n) >= grid_.horizon) return grid_.n_steps;
    return grid_.floor_index(static_cast<double>(n));
}

std::size_t AnnouncingSequence::entry_index(int n) const {
    return std::min(announce_index(n), cap_index(n));
}

std::size_t AnnouncingSequence::exit_index(int n) const {
    return std::min(target_, cap_index(n));
}

double AnnouncingSequence::offset(int n) const {
    return grid_.time(target_) - grid_.time(announce_index(n));
}

// ---- tree conditionals ----

double cond_exp_tree(const ScenarioTree& tree, int node,
                     const std::function<double(int leaf)>& payoff) {
    double acc = 0.0;
    for (int leaf : tree.leaves_under(node)) {
        double v = payoff(leaf);
        if (std::isnan(v))
            throw std::invalid_argument("payoff undefined at leaf " + std::to_string(leaf));
        acc += tree.path_prob(node, leaf) * v;
    }
    return acc;
}

double cond_prob_tree(const ScenarioTree& tree, int node,
                      const std::function<bool(int leaf)>& event) {
    double p = cond_exp_tree(tree, node, [&](int leaf) { return event(leaf) ? 1.0 : 0.0; });
    if (p < -1e-12 || p > 1.0 + 1e-12)
        throw std::logic_error("conditional probability escaped [0, 1]");
    return std::min(1.0, std::max(0.0, p));
}

Rational cond_exp_tree_exact(const ScenarioTree& tree, int node,
                             const std::function<Rational(int leaf)>& payoff) {
    Rational acc(0);
    for (int leaf : tree.leaves_under(node))
        acc = acc + tree.path_prob_exact(node, leaf) * payoff(leaf);
    return acc;
}

// ---- path-model conditionals ----

namespace {

const JumpSpec& jump_of(const ModelSpec& model, std::size_t jump_id,
                        std::vector<JumpSpec>& storage) {
    storage = model.effective_jumps();
    if (jump_id >= storage.size()) throw std::invalid_argument("jump id out of range");
    return storage[jump_id];
}

std::string tag_stem(std::size_t jump_id) { return "jump" + std::to_string(jump_id); }

// probability that a clock-timed jump still fires before the horizon, given
// it has not fired by the view's time (memoryless, exact on the grid because
// the per-step survival factors telescope)
double clock_remaining_prob(const JumpSpec& j, const InformationView& view) {
    double remaining = view.grid().horizon - view.grid().time(view.time_index());
    if (remaining <= 0.0) return 0.0;
    return 1.0 - std::exp(-j.time.rate * remaining);
}

}  // namespace

double cond_stats_path(const ModelSpec& model, std::size_t jump_id, const InformationView& view,
                       CondTarget target) {
    std::vector<JumpSpec> eff;
    const JumpSpec& j = jump_of(model, jump_id, eff);
    const auto size_tag = view.tag(tag_stem(jump_id) + ".size");
    const auto sign_tag = view.tag(tag_stem(jump_id) + ".sign");

    switch (target) {
        case CondTarget::ProbPositive:
            switch (j.time.kind) {
                case TimeKind::Deterministic:
                    if (size_tag) return *size_tag > 0.0 ? 1.0 : 0.0;
                    if (sign_tag) return *sign_tag > 0.0 ? 1.0 : 0.0;
                    return j.size.prob_positive();
                case TimeKind::ExponentialClock:
                    if (size_tag) return *size_tag > 0.0 ? 1.0 : 0.0;
                    return clock_remaining_prob(j, view) * j.size.prob_positive();
                case TimeKind::FirstHitting:
                    throw NoClosedFormError(
                        "no closed form for the sign of a hitting-triggered jump; use the tree backend");
            }
            break;
        case CondTarget::ExpectedJump:
            switch (j.time.kind) {
                case TimeKind::Deterministic:
                    if (size_tag) return *size_tag;
                    if (sign_tag) return j.size.mean_given_sign(*sign_tag > 0.0 ? 1 : -1);
                    return j.size.mean();
                case TimeKind::ExponentialClock:
                    if (size_tag) return *size_tag;
                    return clock_remaining_prob(j, view) * j.size.mean();
                case TimeKind::FirstHitting:
                    throw NoClosedFormError(
                        "no closed form for a hitting-triggered jump's expectation; use the tree backend");
            }
            break;
        case CondTarget::ProbOccurs:
            switch (j.time.kind) {
                case TimeKind::Deterministic:
                    return 1.0;
                case TimeKind::ExponentialClock:
                    if (size_tag) return 1.0;
                    return clock_remaining_prob(j, view);
                case TimeKind::FirstHitting:
                    throw NoClosedFormError(
                        "no closed form for a hitting probability; use the tree backend");
            }
            break;
    }
    throw std::logic_error("unreachable");
}

double cond_expected_clipped_jump(const ModelSpec& model, std::size_t jump_id, double k,
                                  const InformationView& view) {
    if (!(k >= 1.0)) throw std::invalid_argument("clipping band needs k >= 1");
    std::vector<JumpSpec> eff;
    const JumpSpec& j = jump_of(model, jump_id, eff);

    double size;
    if (j.size.kind == SizeKind::PointMass) {
        size = j.size.value;  // degenerate law: known without any reveal
    } else if (auto t = view.tag(tag_stem(jump_id) + ".size"); t) {
        size = *t;
    } else {
        throw NoClosedFormError(
            "clipped expectation needs the realized size in the view; use the tree backend");
    }
    const double a = std::abs(size);
    return (a >= 1.0 / k && a <= k) ? size : 0.0;
}

double cond_prob_trade_event(const ModelSpec& model, std::size_t jump_id, double N, double C,
                             const InformationView& view) {
    if (!(C >= 1.0)) throw std::invalid_argument("price bound C must be at least 1");
    std::vector<JumpSpec> eff;
    const JumpSpec& j = jump_of(model, jump_id, eff);
    if (j.time.kind != TimeKind::Deterministic)
        throw NoClosedFormError("trade-event probability needs a deterministic jump time");

    const TimeGrid& grid = view.grid();
    const std::size_t jump_idx = grid.require_index(j.time.at, "jump time");
    if (view.time_index() >= jump_idx)
        throw std::invalid_argument("trade-event probability is asked for after the jump");

    if (grid.time(jump_idx) > N) return 0.0;

    // sign factor; independent of the base noise by construction
    const double p_pos = cond_stats_path(model, jump_id, view, CondTarget::ProbPositive);
    if (p_pos == 0.0) return 0.0;

    // deterministic contributions of other jumps between now and the target
    double known_adds = 0.0;
    for (std::size_t o = 0; o < eff.size(); ++o) {
        if (o == jump_id) continue;
        const JumpSpec& other = eff[o];
        if (other.time.kind != TimeKind::Deterministic)
            throw NoClosedFormError("another randomly timed jump blocks the closed form");
        std::size_t oi = grid.require_index(other.time.at, "jump time");
        if (oi <= view.time_index() || oi >= jump_idx) continue;
        if (other.size.kind == SizeKind::PointMass) {
            known_adds += other.size.value;
        } else if (auto t = view.tag(tag_stem(o) + ".size"); t) {
            known_adds += *t;
        } else {
            throw NoClosedFormError("an unrevealed intervening jump blocks the closed form");
        }
    }

    const double now = grid.time(view.time_index());
    const double span = grid.time(jump_idx) - now;
    const double m = view.latest() + known_adds +
                     (model.base.kind == BaseKind::Flat ? 0.0 : model.base.drift * span);

    double p_band;
    if (model.base.kind == BaseKind::GaussianWalk) {
        const double s = model.base.sigma_vol * std::sqrt(span);
        p_band = normal_cdf((C - m) / s) - normal_cdf((-C - m) / s);
    } else {
        p_band = std::abs(m) <= C ? 1.0 : 0.0;
    }
    return p_pos * p_band;
}

}  // namespace jumplab
