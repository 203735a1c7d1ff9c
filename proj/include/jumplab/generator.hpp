#pragma once

#include <cstdint>
#include <vector>

#include "jumplab/model.hpp"
#include "jumplab/parallel.hpp"
#include "jumplab/path.hpp"
#include "jumplab/time_grid.hpp"

namespace jumplab {

// Samples paths of a validated model on a fixed grid.  Sampling is pure in
// (seed, path_index): per-path variates come from a dedicated substream, in a
// fixed draw order (jump sizes, then clocks, then the right-jump size, then
// the base noise), so a path can be regenerated in isolation and parallel
// sampling cannot reorder anything.
class PathGenerator {
  public:
    PathGenerator(ModelSpec spec, TimeGrid grid);

    const ModelSpec& spec() const { return spec_; }
    const TimeGrid& grid() const { return grid_; }
    const std::vector<JumpSpec>& jumps() const { return eff_; }

    PathSample sample(std::uint64_t seed, std::uint64_t path_index) const;

  private:
    ModelSpec spec_;
    TimeGrid grid_;
    std::vector<JumpSpec> eff_;          // declared jumps plus dividend jump
    std::vector<std::size_t> fixed_idx_; // grid index per jump; npos when random
};

// Model with left jumps (scheduled, hitting-triggered, or clock-triggered).
PathGenerator build_scheduled_jump_model(const ModelSpec& spec, const TimeGrid& grid);

// Model whose distinguished feature is a right jump at a known time; the
// realized right-jump size enters the information view at that time.
PathGenerator build_ladlag_model(const ModelSpec& spec, const TimeGrid& grid);

std::vector<PathSample> sample_paths(const PathGenerator& gen, std::size_t n_paths,
                                     std::uint64_t seed, Exec exec = Exec::Parallel);

}  // namespace jumplab
