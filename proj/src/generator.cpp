#include "jumplab/generator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace jumplab {

PathGenerator::PathGenerator(ModelSpec spec, TimeGrid grid)
    : spec_(std::move(spec)), grid_(grid) {
    spec_.validate(grid_);
    eff_ = spec_.effective_jumps();
    for (const auto& j : eff_) {
        fixed_idx_.push_back(j.time.kind == TimeKind::Deterministic
                                 ? grid_.require_index(j.time.at, "jump time")
                                 : npos);
    }
}

PathSample PathGenerator::sample(std::uint64_t seed, std::uint64_t path_index) const {
    Rng rng(seed, path_index);
    const std::size_t n = grid_.n_steps;

    // 1. jump variables, in declaration order
    std::vector<double> sizes(eff_.size());
    std::vector<double> clocks(eff_.size(), -1.0);
    for (std::size_t k = 0; k < eff_.size(); ++k) {
        sizes[k] = eff_[k].size.draw(rng);
        if (eff_[k].time.kind == TimeKind::ExponentialClock)
            clocks[k] = rng.exponential(eff_[k].time.rate);
    }
    double rjump = spec_.ladlag ? spec_.ladlag->size.draw(rng) : 0.0;

    // 2. continuous part
    std::vector<double> cont(n + 1);
    cont[0] = spec_.initial_price;
    const double dt = grid_.dt();
    const double drift_step = spec_.base.kind == BaseKind::Flat ? 0.0 : spec_.base.drift * dt;
    const double vol_step =
        spec_.base.kind == BaseKind::GaussianWalk ? spec_.base.sigma_vol * std::sqrt(dt) : 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
        double inc = drift_step;
        if (vol_step != 0.0) inc += vol_step * rng.normal();
        cont[i] = cont[i - 1] + inc;
    }

    // 3. realized jump times
    std::vector<std::size_t> jidx(eff_.size(), npos);
    for (std::size_t k = 0; k < eff_.size(); ++k) {
        switch (eff_[k].time.kind) {
            case TimeKind::Deterministic:
                jidx[k] = fixed_idx_[k];
                break;
            case TimeKind::FirstHitting: {
                const double level = eff_[k].time.level;
                const bool up = level >= cont[0];
                for (std::size_t i = 1; i <= n; ++i) {
                    if ((up && cont[i] >= level) || (!up && cont[i] <= level)) {
                        jidx[k] = i;
                        break;
                    }
                }
                break;
            }
            case TimeKind::ExponentialClock: {
                double steps = std::ceil(clocks[k] / dt - 1e-12);
                if (steps < 1.0) steps = 1.0;
                if (steps <= static_cast<double>(n)) jidx[k] = static_cast<std::size_t>(steps);
                break;
            }
        }
    }

    std::size_t ridx = spec_.ladlag ? grid_.require_index(spec_.ladlag->at, "right-jump time") : npos;

    // at most one jump per grid time, also for randomly realized times
    {
        std::vector<std::size_t> taken;
        for (auto i : jidx)
            if (i != npos) taken.push_back(i);
        if (ridx != npos) taken.push_back(ridx);
        std::sort(taken.begin(), taken.end());
        if (std::adjacent_find(taken.begin(), taken.end()) != taken.end())
            throw std::runtime_error("two jumps realized on the same grid time");
    }

    // 4. assemble the path
    PathSample p;
    p.grid = grid_;
    p.path_id = path_index;
    p.values.resize(n + 1);
    p.left.resize(n + 1);
    if (spec_.ladlag) p.right.emplace(n + 1);
    p.jump_index = jidx;

    double cum = 0.0;  // all jumps strictly before the current grid time
    for (std::size_t i = 0; i <= n; ++i) {
        double dx = 0.0;
        for (std::size_t k = 0; k < eff_.size(); ++k)
            if (jidx[k] == i) dx += sizes[k];
        double dxp = (ridx == i) ? rjump : 0.0;
        p.left[i] = cont[i] + cum;
        p.values[i] = p.left[i] + dx;
        if (p.right) (*p.right)[i] = p.values[i] + dxp;
        if (dx != 0.0 || dxp != 0.0) p.jumps.push_back({i, dx, dxp});
        cum += dx + dxp;
    }

    // 5. information tags
    for (std::size_t k = 0; k < eff_.size(); ++k) {
        const auto& j = eff_[k];
        const std::string stem = "jump" + std::to_string(k);
        const std::size_t jump_at = jidx[k];
        std::size_t reveal = 0;
        if (j.reveal_time) reveal = grid_.require_index(*j.reveal_time, "reveal time");
        switch (j.predictability) {
            case Predictability::Full:
                p.tags.push_back({stem + ".size", reveal, sizes[k]});
                p.tags.push_back({stem + ".sign", reveal, sizes[k] > 0.0 ? 1.0 : -1.0});
                break;
            case Predictability::DirectionOnly:
                p.tags.push_back({stem + ".sign", reveal, sizes[k] > 0.0 ? 1.0 : -1.0});
                if (jump_at != npos) p.tags.push_back({stem + ".size", jump_at, sizes[k]});
                break;
            case Predictability::None:
                if (jump_at != npos) {
                    p.tags.push_back({stem + ".size", jump_at, sizes[k]});
                    p.tags.push_back({stem + ".sign", jump_at, sizes[k] > 0.0 ? 1.0 : -1.0});
                }
                break;
        }
    }
    if (spec_.ladlag) p.tags.push_back({"rjump.size", ridx, rjump});

    return p;
}

PathGenerator build_scheduled_jump_model(const ModelSpec& spec, const TimeGrid& grid) {
    return PathGenerator(spec, grid);
}

PathGenerator build_ladlag_model(const ModelSpec& spec, const TimeGrid& grid) {
    if (!spec.ladlag)
        throw std::invalid_argument("model has no right jump; use the scheduled-jump builder");
    return PathGenerator(spec, grid);
}

std::vector<PathSample> sample_paths(const PathGenerator& gen, std::size_t n_paths,
                                     std::uint64_t seed, Exec exec) {
    std::vector<PathSample> out(n_paths);
    par_for(n_paths, exec, [&](std::size_t i) { out[i] = gen.sample(seed, i); });
    return out;
}

}  // namespace jumplab
