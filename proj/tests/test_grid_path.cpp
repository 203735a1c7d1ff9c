#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "jumplab/path.hpp"
#include "jumplab/rng.hpp"
#include "jumplab/time_grid.hpp"

using namespace jumplab;

TEST_CASE("grid times and spacing") {
    TimeGrid g(8, 2.0);
    CHECK(g.size() == 9);
    CHECK(g.dt() == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(g.time(0) == 0.0);
    CHECK(g.time(4) == 1.0);
    CHECK(g.time(8) == 2.0);
}

TEST_CASE("grid construction rejects degenerate parameters") {
    CHECK_THROWS_AS(TimeGrid(0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(TimeGrid(4, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(TimeGrid(4, -1.0), std::invalid_argument);
}

TEST_CASE("index lookup accepts grid points and rejects everything else") {
    TimeGrid g(10, 1.0);
    CHECK(g.index_of(0.0) == 0);
    CHECK(g.index_of(0.3) == 3);
    CHECK(g.index_of(1.0) == 10);
    CHECK(!g.index_of(0.35));
    CHECK(!g.index_of(-0.1));
    CHECK(!g.index_of(1.1));
    CHECK(g.require_index(0.7, "jump time") == 7);
    CHECK_THROWS_WITH_AS(g.require_index(0.33, "jump time"),
                         doctest::Contains("is not on the time grid"), std::invalid_argument);

    // tolerant to representation error at a grid point, not to true off-grid times
    CHECK(g.index_of(0.1 + 0.2) == 3);
}

TEST_CASE("floor index walks down, clamps, and survives near-hits") {
    TimeGrid g(10, 1.0);
    CHECK(g.floor_index(0.0) == 0);
    CHECK(g.floor_index(0.25) == 2);
    CHECK(g.floor_index(0.3) == 3);  // 0.3 * 10 is a hair under 3 in binary
    CHECK(g.floor_index(-0.5) == 0);
    CHECK(g.floor_index(1.0) == 10);
    CHECK(g.floor_index(7.0) == 10);
}

namespace {

PathSample two_jump_path() {
    PathSample p;
    p.grid = TimeGrid(4, 1.0);
    p.values = {1.0, 1.0, 1.5, 1.5, 1.5};
    p.left = {1.0, 1.0, 1.0, 1.5, 1.5};
    p.right.emplace(std::vector<double>{1.0, 1.0, 1.5, 2.5, 1.5});
    p.jumps = {{2, 0.5, 0.0}, {3, 0.0, 1.0}};
    p.tags = {{"jump0.size", 0, 0.5}};
    p.jump_index = {2};
    return p;
}

}  // namespace

TEST_CASE("jump lookups on the ledger") {
    PathSample p = two_jump_path();
    CHECK(p.dx_at(2) == 0.5);
    CHECK(p.dx_at(1) == 0.0);
    CHECK(p.dxplus_at(3) == 1.0);
    CHECK(p.dxplus_at(2) == 0.0);
    CHECK(p.right_at(3) == 2.5);
    CHECK(p.find_tag("jump0.size") != nullptr);
    CHECK(p.find_tag("jump0.size")->value == 0.5);
    CHECK(p.find_tag("nope") == nullptr);

    PathSample q = p;
    q.right.reset();
    CHECK(q.right_at(3) == q.values[3]);  // right-continuous fallback
}

TEST_CASE("path CSV carries the full column contract") {
    PathSample p = two_jump_path();
    std::ostringstream os;
    p.write_csv(os);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line == "t,X,X_left,X_right,dX,dXplus");
    std::getline(is, line);
    CHECK(line == "0,1,1,1,0,0");
    std::getline(is, line);  // t = 0.25
    std::getline(is, line);  // t = 0.5: the left jump
    CHECK(line == "0.5,1.5,1,1.5,0.5,0");
    std::getline(is, line);  // t = 0.75: the right jump
    CHECK(line == "0.75,1.5,1.5,2.5,0,1");
}

TEST_CASE("random source is pure in (seed, stream)") {
    Rng a(42, 7), b(42, 7), c(42, 8);
    for (int i = 0; i < 100; ++i) {
        double u = a.uniform01();
        CHECK(u == b.uniform01());
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
    // a different stream decouples
    Rng a2(42, 7);
    bool differs = false;
    for (int i = 0; i < 16; ++i) differs = differs || a2.next_u64() != c.next_u64();
    CHECK(differs);
}

TEST_CASE("normal and exponential draws match their moments") {
    Rng rng(9, 0);
    const int n = 200000;
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
        double z = rng.normal();
        sum += z;
        sum2 += z * z;
    }
    const double mean = sum / n;
    const double var = sum2 / n - mean * mean;
    CHECK(std::abs(mean) < 3.0 / std::sqrt(static_cast<double>(n)));
    CHECK(var == doctest::Approx(1.0).epsilon(0.02));

    double esum = 0.0;
    for (int i = 0; i < n; ++i) esum += rng.exponential(2.0);
    CHECK(esum / n == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("normal CDF and its inverse agree") {
    CHECK(normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(normal_cdf(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-9));
    for (double p : {0.01, 0.2, 0.5, 0.9, 0.999})
        CHECK(normal_cdf(normal_icdf(p)) == doctest::Approx(p).epsilon(1e-8));
}
