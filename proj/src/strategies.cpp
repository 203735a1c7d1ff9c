#include "jumplab/strategies.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

#include "jumplab/costs.hpp"

namespace jumplab {

// ---- stopping rules ----

StoppingRule StoppingRule::fixed(double t) {
    StoppingRule r;
    r.kind = Kind::FixedTime;
    r.at = t;
    return r;
}

StoppingRule StoppingRule::hitting(double level) {
    StoppingRule r;
    r.kind = Kind::FirstHitting;
    r.level = level;
    return r;
}

std::size_t StoppingRule::evaluate(const PathSample& path) const {
    switch (kind) {
        case Kind::FixedTime: {
            if (at > path.grid.horizon) return npos;  // beyond the horizon: never
            return path.grid.require_index(at, "stopping time");
        }
        case Kind::FirstHitting: {
            const bool up = level >= path.values[0];
            for (std::size_t i = 0; i < path.values.size(); ++i) {
                if (up ? path.values[i] >= level : path.values[i] <= level) return i;
            }
            return npos;
        }
    }
    throw std::logic_error("unreachable");
}

// ---- gains ----

namespace {

double checked_position(const PositionRule& rule, const InformationView& view, double bound) {
    double xi = rule(view);
    if (std::abs(xi) > bound * (1.0 + 1e-12) + 1e-15)
        throw std::invalid_argument("position exceeds its declared bound");
    return xi;
}

}  // namespace

double gains(const BuyAndHold& strategy, const PathSample& path, double t) {
    const std::size_t t_idx = path.grid.require_index(t, "evaluation time");
    const std::size_t s = strategy.entry.evaluate(path);
    const std::size_t e = strategy.exit.evaluate(path);
    if (s != npos && e != npos && e < s)
        throw std::invalid_argument("exit time precedes entry time");
    if (s == npos) return 0.0;
    const std::size_t a = std::min(s, t_idx);
    const std::size_t b = e == npos ? t_idx : std::min(e, t_idx);
    if (a == b) return 0.0;  // not yet entered (or a degenerate window)
    const double xi = checked_position(strategy.size, InformationView::at(path, s), strategy.bound);
    return xi * (path.values[b] - path.values[a]);
}

double gains_instantaneous(const InstantaneousStrategy& strategy, const PathSample& path,
                           double t) {
    const std::size_t t_idx = path.grid.require_index(t, "evaluation time");
    const std::size_t tau = strategy.at.evaluate(path);
    if (tau == npos || tau > t_idx) return 0.0;
    const double xi =
        checked_position(strategy.size, InformationView::before(path, tau), strategy.bound);
    return xi * (path.values[tau] - path.left[tau]);
}

// ---- flash strategy constructors ----

namespace {

const JumpSpec& target_jump(const PathGenerator& gen, std::size_t jump_id) {
    const auto& eff = gen.jumps();
    if (jump_id >= eff.size())
        throw std::invalid_argument("jump id out of range for this model");
    return eff[jump_id];
}

// Stage windows squeeze onto the realized jump time of the targeted jump.
std::function<StageWindow(int, const PathSample&)> announcing_window(std::size_t jump_id) {
    return [jump_id](int n, const PathSample& path) {
        if (n < 1) throw std::invalid_argument("stage index must be >= 1");
        const std::size_t target = path.jump_index.at(jump_id);
        if (target == npos) return StageWindow{};
        AnnouncingSequence ann(path.grid, target);
        StageWindow w{ann.entry_index(n), ann.exit_index(n)};
        if (w.exit <= w.entry) return StageWindow{};  // capped into an empty window
        return w;
    };
}

double clip_to_unit_profit(double expected, double k) {
    if (expected == 0.0) return 0.0;  // no trade on the clipped-out event
    return k * std::min(std::abs(expected), 1.0 / k) / expected;
}

}  // namespace

FlashStrategy make_sure_profit_strategy(const PathGenerator& gen, std::size_t jump_id) {
    const JumpSpec& j = target_jump(gen, jump_id);

    FlashStrategy fs;
    fs.name = "sure_profit";
    fs.uniform_bound = 1.0;
    fs.profile = LimitProfile::AtOrAfter;
    fs.model = gen.spec();
    fs.grid = gen.grid();
    fs.jump_id = jump_id;

    const double pp = j.size.prob_positive();
    const bool degenerate_sign = pp == 0.0 || pp == 1.0;
    fs.qualifying = j.predictability != Predictability::None ||
                    (j.time.kind == TimeKind::Deterministic && degenerate_sign);
    if (!fs.qualifying)
        fs.warnings.push_back(
            "jump direction is not available before the jump; the limit gains vanish");

    fs.limit_index = [jump_id](const PathSample& p) { return p.jump_index.at(jump_id); };
    fs.window = announcing_window(jump_id);
    fs.position = [model = fs.model, jump_id](int, const InformationView& v) {
        return 2.0 * cond_stats_path(model, jump_id, v, CondTarget::ProbPositive) - 1.0;
    };
    return fs;
}

FlashStrategy make_constant_profit_strategy(const PathGenerator& gen, double k,
                                            std::size_t jump_id) {
    if (!(k >= 1.0)) throw std::invalid_argument("position cap k must be at least 1");
    const JumpSpec& j = target_jump(gen, jump_id);
    if (j.predictability != Predictability::Full)
        throw std::invalid_argument(
            "constant-profit sizing needs the jump size revealed in advance");

    FlashStrategy fs;
    fs.name = "constant_profit";
    fs.uniform_bound = k;
    fs.profile = LimitProfile::AtOrAfter;
    fs.model = gen.spec();
    fs.grid = gen.grid();
    fs.jump_id = jump_id;

    if (j.size.prob_abs_in(1.0 / k, k) == 0.0) {
        fs.qualifying = false;
        fs.warnings.push_back(
            "the magnitude band [1/k, k] has probability zero; the strategy never trades");
    }

    fs.limit_index = [jump_id, k](const PathSample& p) {
        const std::size_t t = p.jump_index.at(jump_id);
        if (t == npos) return npos;
        const double a = std::abs(p.dx_at(t));
        return (a >= 1.0 / k && a <= k) ? t : npos;
    };
    fs.window = announcing_window(jump_id);
    fs.position = [model = fs.model, jump_id, k](int, const InformationView& v) {
        return clip_to_unit_profit(cond_expected_clipped_jump(model, jump_id, k, v), k);
    };
    return fs;
}

FlashStrategy make_bounded_loss_strategy(const PathGenerator& gen, double N, double C,
                                         std::size_t jump_id) {
    if (!(C >= 1.0)) throw std::invalid_argument("loss parameter C must be at least 1");
    if (!(N > 0.0)) throw std::invalid_argument("time bound N must be positive");
    const JumpSpec& j = target_jump(gen, jump_id);
    if (j.time.kind != TimeKind::Deterministic)
        throw std::invalid_argument("bounded-loss sizing needs a deterministic jump time");
    if (j.time.at > N + 1e-12)
        throw std::invalid_argument("the jump arrives after the time bound; the trade event is empty");
    if (j.size.prob_positive() == 0.0)
        throw std::invalid_argument("jumps are never positive; the trade event is empty");

    FlashStrategy fs;
    fs.name = "bounded_loss";
    fs.uniform_bound = 1.0;
    fs.profile = LimitProfile::AtOrAfter;
    fs.model = gen.spec();
    fs.grid = gen.grid();
    fs.jump_id = jump_id;
    fs.qualifying = j.predictability != Predictability::None || j.size.prob_positive() == 1.0;

    fs.limit_index = [jump_id, N, C](const PathSample& p) {
        const std::size_t t = p.jump_index.at(jump_id);
        if (t == npos) return npos;
        const bool on_event = p.grid.time(t) <= N && std::abs(p.left[t]) <= C && p.dx_at(t) > 0.0;
        return on_event ? t : npos;
    };
    fs.window = announcing_window(jump_id);
    fs.position = [model = fs.model, jump_id, N, C](int, const InformationView& v) {
        const double p = cond_prob_trade_event(model, jump_id, N, C, v);
        return p / (1.0 + std::max(std::abs(v.latest()) - C, 0.0));
    };
    return fs;
}

FlashStrategy make_right_jump_strategy(const PathGenerator& gen, double k) {
    if (!(k >= 1.0)) throw std::invalid_argument("position cap k must be at least 1");
    const ModelSpec& spec = gen.spec();
    if (!spec.ladlag)
        throw std::invalid_argument("model is right-continuous: there is no right jump to collect");
    const TimeGrid& grid = gen.grid();
    const std::size_t ridx = grid.require_index(spec.ladlag->at, "right-jump time");

    FlashStrategy fs;
    fs.name = "right_jump";
    fs.uniform_bound = k;
    fs.profile = LimitProfile::StrictlyAfter;
    fs.model = spec;
    fs.grid = grid;
    fs.jump_id = npos;

    if (spec.ladlag->size.prob_abs_in(1.0 / k, k) == 0.0) {
        fs.qualifying = false;
        fs.warnings.push_back(
            "the magnitude band [1/k, k] has probability zero; the strategy never trades");
    }

    fs.limit_index = [ridx, k](const PathSample& p) {
        const double a = std::abs(p.dxplus_at(ridx));
        return (a >= 1.0 / k && a <= k) ? ridx : npos;
    };
    fs.window = [ridx, grid](int n, const PathSample&) {
        if (n < 1) throw std::invalid_argument("stage index must be >= 1");
        const double cap_t = std::min(static_cast<double>(n), grid.horizon);
        const std::size_t cap = grid.floor_index(cap_t);
        const std::size_t entry = std::min(ridx, cap);
        std::size_t exit = grid.floor_index(grid.time(ridx) + 1.0 / n);
        exit = std::max(exit, ridx + 1);
        exit = std::min({exit, grid.n_steps, cap});
        if (exit <= entry) return StageWindow{};
        return StageWindow{entry, exit};
    };
    fs.position = [k](int, const InformationView& v) {
        const auto s = v.tag("rjump.size");
        if (!s) throw std::logic_error("right-jump size not revealed at its own time");
        const double a = std::abs(*s);
        const double clipped = (a >= 1.0 / k && a <= k) ? *s : 0.0;
        return clip_to_unit_profit(clipped, k);
    };
    return fs;
}

FlashStrategy make_long_only_variant(const FlashStrategy& fs, std::optional<double> N,
                                     std::optional<double> C) {
    if (fs.jump_id == npos)
        throw std::invalid_argument("right-jump strategies have no long-only rebuild");
    const auto eff = fs.model.effective_jumps();
    if (eff.at(fs.jump_id).size.prob_positive() == 0.0)
        throw std::invalid_argument(
            "jumps are never positive; a long-only variant cannot profit");
    PathGenerator gen(fs.model, fs.grid);
    FlashStrategy out = make_bounded_loss_strategy(
        gen, N.value_or(fs.grid.horizon), C.value_or(std::max(1.0, fs.model.initial_price)),
        fs.jump_id);
    out.name = "long_only(" + fs.name + ")";
    return out;
}

FlashStrategy scale_positions(const FlashStrategy& fs, double lambda) {
    if (!(lambda > 0.0)) throw std::invalid_argument("scale factor must be positive");
    FlashStrategy out = fs;
    out.name = fs.name + "_scaled";
    out.uniform_bound = fs.uniform_bound * lambda;
    out.position = [inner = fs.position, lambda](int n, const InformationView& v) {
        return lambda * inner(n, v);
    };
    return out;
}

// ---- evaluation ----

namespace {

struct StageSetup {
    StageWindow w;
    double xi = 0.0;
};

double stage_final(const StageSetup& st, const PathSample& path) {
    if (st.w.entry == npos) return 0.0;
    const std::size_t last = path.grid.n_steps;
    const std::size_t b = st.w.exit == npos ? last : std::min(st.w.exit, last);
    return st.xi * (path.values[b] - path.values[std::min(st.w.entry, last)]);
}

}  // namespace

GainsReport evaluate_flash(const FlashStrategy& fs, const std::vector<PathSample>& paths,
                           const EvalOptions& opts) {
    if (opts.n_max < 1) throw std::invalid_argument("n_max must be at least 1");
    if (paths.empty()) throw std::invalid_argument("no paths to evaluate");
    const std::size_t P = paths.size();
    const std::size_t S = fs.grid.n_steps;
    for (const auto& p : paths)
        if (p.values.size() != S + 1)
            throw std::invalid_argument("path grid does not match the strategy grid");
    if (opts.eps && !(*opts.eps >= 0.0))
        throw std::invalid_argument("cost level must be nonnegative");
    const bool with_costs = opts.eps.has_value() && *opts.eps > 0.0;
    if (with_costs) {
        for (const auto& p : paths)
            for (double v : p.values)
                if (!(v > 0.0))
                    throw std::invalid_argument(
                        "cost adjustment needs strictly positive prices on every path");
    }
    const double eps = opts.eps.value_or(0.0);
    const int n_max = opts.n_max;

    GainsReport rep;
    rep.model_hash = model_hash(fs.model);
    rep.seed = opts.seed;
    rep.n_max = n_max;
    rep.n_paths = P;
    rep.eps = opts.eps;
    rep.profile = fs.profile;
    rep.grid = fs.grid;
    rep.limit_idx.resize(P);
    rep.zeta.resize(P);
    if (with_costs) rep.zeta_costs.resize(P);
    auto alloc = [&](std::vector<std::vector<double>>& m) {
        m.assign(static_cast<std::size_t>(n_max), std::vector<double>(P, 0.0));
    };
    alloc(rep.final_by_n);
    alloc(rep.gap_by_n);
    alloc(rep.min_by_n);
    if (with_costs) {
        alloc(rep.final_costs_by_n);
        alloc(rep.min_costs_by_n);
    }
    if (opts.keep_trajectories)
        rep.trajectories.assign(static_cast<std::size_t>(n_max) * P, TrajectoryRow{});

    // Positions and windows are computed serially: rules may throw (no closed
    // form, bound violations) and throwing out of a parallel region is not an
    // option.  The heavy per-time scans below are the parallel part.
    std::vector<std::vector<StageSetup>> setup(P, std::vector<StageSetup>(n_max));
    for (std::size_t p = 0; p < P; ++p) {
        rep.limit_idx[p] = fs.limit_index(paths[p]);
        for (int n = 1; n <= n_max; ++n) {
            StageSetup st;
            st.w = fs.window(n, paths[p]);
            if (st.w.entry != npos) {
                const auto view = InformationView::at(paths[p], st.w.entry);
                st.xi = fs.position(n, view);
                if (std::abs(st.xi) > fs.uniform_bound * (1.0 + 1e-12) + 1e-15)
                    throw std::invalid_argument("position exceeds the declared uniform bound");
            }
            setup[p][static_cast<std::size_t>(n - 1)] = st;
        }
        rep.zeta[p] = stage_final(setup[p][static_cast<std::size_t>(n_max - 1)], paths[p]);
    }

    par_for(P, opts.exec, [&](std::size_t p) {
        const PathSample& path = paths[p];
        const double zeta = rep.zeta[p];
        const std::size_t lim = rep.limit_idx[p];
        for (int n = 1; n <= n_max; ++n) {
            const auto& st = setup[p][static_cast<std::size_t>(n - 1)];
            double gap = 0.0, mn = 0.0, mnc = 0.0, g = 0.0, gc = 0.0;
            for (std::size_t t = 0; t <= S; ++t) {
                if (st.w.entry == npos) {
                    g = 0.0;
                } else {
                    const std::size_t a = std::min(st.w.entry, t);
                    const std::size_t b = st.w.exit == npos ? t : std::min(st.w.exit, t);
                    g = st.xi * (path.values[b] - path.values[a]);
                }
                const bool on = lim != npos && (fs.profile == LimitProfile::AtOrAfter
                                                    ? t >= lim
                                                    : t > lim);
                gap = std::max(gap, std::abs(g - (on ? zeta : 0.0)));
                mn = std::min(mn, g);
                if (with_costs) {
                    gc = st.w.entry == npos
                             ? 0.0
                             : cost_adjusted_gains(st.xi, st.w.entry, st.w.exit, path, eps, t);
                    mnc = std::min(mnc, gc);
                }
            }
            const auto ni = static_cast<std::size_t>(n - 1);
            rep.final_by_n[ni][p] = g;
            rep.gap_by_n[ni][p] = gap;
            rep.min_by_n[ni][p] = mn;
            if (with_costs) {
                rep.final_costs_by_n[ni][p] = gc;
                rep.min_costs_by_n[ni][p] = mnc;
            }
            if (opts.keep_trajectories) {
                TrajectoryRow row;
                row.n = n;
                row.path_id = path.path_id;
                row.gains.resize(S + 1);
                if (with_costs) row.gains_costs.resize(S + 1);
                for (std::size_t t = 0; t <= S; ++t) {
                    if (st.w.entry == npos) {
                        row.gains[t] = 0.0;
                    } else {
                        const std::size_t a = std::min(st.w.entry, t);
                        const std::size_t b = st.w.exit == npos ? t : std::min(st.w.exit, t);
                        row.gains[t] = st.xi * (path.values[b] - path.values[a]);
                    }
                    if (with_costs)
                        row.gains_costs[t] =
                            st.w.entry == npos
                                ? 0.0
                                : cost_adjusted_gains(st.xi, st.w.entry, st.w.exit, path, eps, t);
                }
                rep.trajectories[ni * P + p] = std::move(row);
            }
        }
        if (with_costs)
            rep.zeta_costs[p] = rep.final_costs_by_n[static_cast<std::size_t>(n_max - 1)][p];
    });

    // deterministic serial aggregation
    rep.by_n.resize(static_cast<std::size_t>(n_max));
    for (int n = 1; n <= n_max; ++n) {
        const auto ni = static_cast<std::size_t>(n - 1);
        StageStats s;
        s.n = n;
        double sg = 0.0, sf = 0.0, sfc = 0.0;
        s.max_gap = 0.0;
        s.min_gain = std::numeric_limits<double>::infinity();
        s.min_gain_costs = std::numeric_limits<double>::infinity();
        for (std::size_t p = 0; p < P; ++p) {
            sg += rep.gap_by_n[ni][p];
            sf += rep.final_by_n[ni][p];
            s.max_gap = std::max(s.max_gap, rep.gap_by_n[ni][p]);
            s.min_gain = std::min(s.min_gain, rep.min_by_n[ni][p]);
            if (with_costs) {
                sfc += rep.final_costs_by_n[ni][p];
                s.min_gain_costs = std::min(s.min_gain_costs, rep.min_costs_by_n[ni][p]);
            }
        }
        s.mean_gap = sg / static_cast<double>(P);
        s.mean_final = sf / static_cast<double>(P);
        s.mean_final_costs = with_costs ? sfc / static_cast<double>(P) : 0.0;
        if (!with_costs) s.min_gain_costs = 0.0;
        rep.by_n[ni] = s;
    }

    rep.trade_paths = 0;
    rep.zeta_mean = 0.0;
    rep.zeta_min = std::numeric_limits<double>::infinity();
    rep.zeta_max = -std::numeric_limits<double>::infinity();
    for (std::size_t p = 0; p < P; ++p) {
        if (rep.limit_idx[p] == npos) continue;
        ++rep.trade_paths;
        rep.zeta_mean += rep.zeta[p];
        rep.zeta_min = std::min(rep.zeta_min, rep.zeta[p]);
        rep.zeta_max = std::max(rep.zeta_max, rep.zeta[p]);
    }
    if (rep.trade_paths > 0) {
        rep.zeta_mean /= static_cast<double>(rep.trade_paths);
    } else {
        rep.zeta_min = rep.zeta_max = 0.0;
    }

    // convergence diagnostics: reported, never raised
    {
        std::vector<double> xs, ys;
        for (int n = 1; n <= n_max; ++n) {
            double g = rep.by_n[static_cast<std::size_t>(n - 1)].mean_gap;
            if (g > 0.0) {
                xs.push_back(static_cast<double>(n));
                ys.push_back(std::log2(g));
            }
        }
        if (xs.size() >= 3) {
            double mx = 0.0, my = 0.0;
            for (std::size_t i = 0; i < xs.size(); ++i) {
                mx += xs[i];
                my += ys[i];
            }
            mx /= static_cast<double>(xs.size());
            my /= static_cast<double>(xs.size());
            double num = 0.0, den = 0.0;
            for (std::size_t i = 0; i < xs.size(); ++i) {
                num += (xs[i] - mx) * (ys[i] - my);
                den += (xs[i] - mx) * (xs[i] - mx);
            }
            rep.slope_log2_gap = num / den;
        } else {
            rep.slope_log2_gap = std::numeric_limits<double>::quiet_NaN();
        }
        rep.gap_nonincreasing = true;
        for (int n = 1; n < n_max; ++n) {
            double a = rep.by_n[static_cast<std::size_t>(n - 1)].mean_gap;
            double b = rep.by_n[static_cast<std::size_t>(n)].mean_gap;
            if (b > 1.25 * a + 1e-15) rep.gap_nonincreasing = false;
        }
        if (n_max >= 2 &&
            rep.by_n.back().mean_gap > 1.05 * rep.by_n.front().mean_gap + 1e-15)
            rep.gap_nonincreasing = false;
    }

    return rep;
}

void write_gains_csv(const GainsReport& report, std::ostream& os) {
    if (report.trajectories.empty())
        throw std::invalid_argument(
            "report holds no trajectories; evaluate with keep_trajectories set");
    os << "# schema_version=" << kSchemaVersion << ",model_hash=" << report.model_hash
       << ",seed=" << report.seed << "\n";
    os << "n,t,path_id,gains,gains_net_costs\n";
    char buf[160];
    // stage-major, then path, then time: stable layout for diffing
    for (const auto& row : report.trajectories) {
        if (row.gains.empty()) continue;
        for (std::size_t t = 0; t < row.gains.size(); ++t) {
            const double g = row.gains[t];
            const double gc = row.gains_costs.empty() ? g : row.gains_costs[t];
            const double tt = report.grid.time(t);
            std::snprintf(buf, sizeof buf, "%d,%.17g,%llu,%.17g,%.17g\n", row.n, tt,
                          static_cast<unsigned long long>(row.path_id), g, gc);
            os << buf;
        }
    }
}

std::string gains_summary_json(const GainsReport& report) {
    nlohmann::json j;
    j["schema_version"] = kSchemaVersion;
    j["model_hash"] = report.model_hash;
    j["seed"] = report.seed;
    j["n_paths"] = report.n_paths;
    j["n_max"] = report.n_max;
    if (report.eps) j["eps"] = *report.eps;
    j["limit_profile"] =
        report.profile == LimitProfile::AtOrAfter ? "at_or_after" : "strictly_after";
    j["zeta"] = {{"mean", report.zeta_mean},
                 {"min", report.zeta_min},
                 {"max", report.zeta_max},
                 {"trade_paths", report.trade_paths}};
    j["slope_log2_gap"] = std::isnan(report.slope_log2_gap)
                              ? nlohmann::json()
                              : nlohmann::json(report.slope_log2_gap);
    j["gap_nonincreasing"] = report.gap_nonincreasing;
    j["by_n"] = nlohmann::json::array();
    for (const auto& s : report.by_n) {
        nlohmann::json e = {{"n", s.n},
                            {"mean_gap", s.mean_gap},
                            {"max_gap", s.max_gap},
                            {"min_gain", s.min_gain},
                            {"mean_final", s.mean_final}};
        if (report.eps) {
            e["min_gain_costs"] = s.min_gain_costs;
            e["mean_final_costs"] = s.mean_final_costs;
        }
        j["by_n"].push_back(e);
    }
    return j.dump(2);
}

}  // namespace jumplab
