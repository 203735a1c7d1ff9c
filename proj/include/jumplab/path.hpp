#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "jumplab/time_grid.hpp"

namespace jumplab {

struct JumpEntry {
    std::size_t index = 0;  // grid index of the jump time
    double dx = 0.0;        // X_t - X_{t-}
    double dxplus = 0.0;    // X_{t+} - X_t (right jumps)
};

// A piece of auxiliary information and the grid time at which it enters the
// information view (e.g. a jump's realized sign revealed at t = 0).
struct InfoTag {
    std::string name;
    std::size_t reveal_index = 0;
    double value = 0.0;
};

// One realized price path on the grid.  `values[i]` is X at t_i, `left[i]`
// the left limit X_{t_i-} (left[0] == values[0]: no jump at time zero), and
// `right`, when present, the right limit X_{t_i+}.  The jump ledger lists
// every grid time where the path actually jumps.
struct PathSample {
    TimeGrid grid;
    std::vector<double> values;
    std::vector<double> left;
    std::optional<std::vector<double>> right;
    std::vector<JumpEntry> jumps;
    std::vector<InfoTag> tags;
    // realized grid index of each model jump (aligned with effective_jumps();
    // npos when the jump does not occur within the horizon)
    std::vector<std::size_t> jump_index;
    std::uint64_t path_id = 0;

    double dx_at(std::size_t i) const;
    double dxplus_at(std::size_t i) const;
    double right_at(std::size_t i) const { return right ? (*right)[i] : values[i]; }

    const InfoTag* find_tag(std::string_view name) const;

    // columns: t, X, X_left, X_right, dX, dXplus
    void write_csv(std::ostream& os) const;
};

}  // namespace jumplab
