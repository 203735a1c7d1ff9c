#include "jumplab/path.hpp"

#include <cstdio>
#include <ostream>

namespace jumplab {

double PathSample::dx_at(std::size_t i) const {
    for (const auto& j : jumps)
        if (j.index == i) return j.dx;
    return 0.0;
}

double PathSample::dxplus_at(std::size_t i) const {
    for (const auto& j : jumps)
        if (j.index == i) return j.dxplus;
    return 0.0;
}

const InfoTag* PathSample::find_tag(std::string_view name) const {
    for (const auto& t : tags)
        if (t.name == name) return &t;
    return nullptr;
}

void PathSample::write_csv(std::ostream& os) const {
    os << "t,X,X_left,X_right,dX,dXplus\n";
    char buf[160];
    for (std::size_t i = 0; i < values.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                      grid.time(i), values[i], left[i], right_at(i), dx_at(i), dxplus_at(i));
        os << buf;
    }
}

}  // namespace jumplab
