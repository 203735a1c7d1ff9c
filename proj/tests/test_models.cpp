#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "jumplab/generator.hpp"
#include "jumplab/model.hpp"

using namespace jumplab;

namespace {

SizeLaw point_mass(double v) {
    SizeLaw s;
    s.kind = SizeKind::PointMass;
    s.value = v;
    return s;
}

SizeLaw two_point(double a, double b, double pa) {
    SizeLaw s;
    s.kind = SizeKind::TwoPoint;
    s.first = a;
    s.second = b;
    s.p_first = pa;
    return s;
}

SizeLaw uniform(double lo, double hi) {
    SizeLaw s;
    s.kind = SizeKind::Uniform;
    s.lo = lo;
    s.hi = hi;
    return s;
}

SizeLaw signed_uniform(double lo, double hi, double p_up) {
    SizeLaw s;
    s.kind = SizeKind::SignedUniform;
    s.lo = lo;
    s.hi = hi;
    s.p_first = p_up;
    return s;
}

SizeLaw exponential(double rate) {
    SizeLaw s;
    s.kind = SizeKind::Exponential;
    s.rate = rate;
    return s;
}

JumpSpec scheduled_jump(double t, SizeLaw law, Predictability p) {
    JumpSpec j;
    j.time.kind = TimeKind::Deterministic;
    j.time.at = t;
    j.size = law;
    j.predictability = p;
    return j;
}

}  // namespace

TEST_CASE("size law validation rejects laws that cannot jump") {
    CHECK_THROWS_AS(point_mass(0.0).validate(), std::invalid_argument);
    CHECK_THROWS_AS(two_point(0.0, 0.3, 0.5).validate(), std::invalid_argument);
    CHECK_THROWS_AS(two_point(0.3, -0.2, 1.5).validate(), std::invalid_argument);
    CHECK_THROWS_AS(uniform(0.3, 0.3).validate(), std::invalid_argument);
    CHECK_THROWS_AS(signed_uniform(0.0, 0.3, 0.5).validate(), std::invalid_argument);
    CHECK_THROWS_AS(signed_uniform(0.2, 0.1, 0.5).validate(), std::invalid_argument);
    CHECK_THROWS_AS(exponential(0.0).validate(), std::invalid_argument);
    CHECK_NOTHROW(uniform(-0.2, 0.3).validate());
}

TEST_CASE("moments of each size law against hand-computed values") {
    SizeLaw u = uniform(-0.2, 0.3);
    CHECK(u.mean() == doctest::Approx(0.05).epsilon(1e-14));
    CHECK(u.prob_positive() == doctest::Approx(0.6).epsilon(1e-14));
    CHECK(u.mean_given_sign(+1) == doctest::Approx(0.15).epsilon(1e-14));
    CHECK(u.mean_given_sign(-1) == doctest::Approx(-0.10).epsilon(1e-14));
    // negative leg contributes |x| in [0.1, 0.2], positive leg [0.1, 0.25]
    CHECK(u.prob_abs_in(0.1, 0.25) == doctest::Approx(0.5).epsilon(1e-13));

    SizeLaw su = signed_uniform(0.1, 0.3, 0.7);
    CHECK(su.mean() == doctest::Approx(0.08).epsilon(1e-14));
    CHECK(su.prob_positive() == doctest::Approx(0.7).epsilon(1e-14));
    CHECK(su.mean_given_sign(+1) == doctest::Approx(0.2).epsilon(1e-14));
    CHECK(su.mean_given_sign(-1) == doctest::Approx(-0.2).epsilon(1e-14));
    CHECK(su.prob_abs_in(0.15, 0.2) == doctest::Approx(0.25).epsilon(1e-13));

    SizeLaw tp = two_point(0.4, -0.2, 0.6);
    CHECK(tp.mean() == doctest::Approx(0.16).epsilon(1e-14));
    CHECK(tp.prob_positive() == doctest::Approx(0.6).epsilon(1e-14));
    CHECK(tp.mean_given_sign(+1) == doctest::Approx(0.4).epsilon(1e-14));
    CHECK(tp.mean_given_sign(-1) == doctest::Approx(-0.2).epsilon(1e-14));
    CHECK(tp.prob_abs_in(0.3, 0.5) == doctest::Approx(0.6).epsilon(1e-14));
    CHECK(tp.prob_abs_in(0.2, 0.2) == doctest::Approx(0.4).epsilon(1e-14));

    SizeLaw ex = exponential(2.0);
    CHECK(ex.mean() == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(ex.prob_positive() == 1.0);
    CHECK(ex.prob_abs_in(0.5, 1.0) ==
          doctest::Approx(std::exp(-1.0) - std::exp(-2.0)).epsilon(1e-14));

    SizeLaw pm = point_mass(0.5);
    CHECK(pm.mean() == 0.5);
    CHECK(pm.prob_abs_in(0.5, 2.0) == 1.0);
    CHECK(pm.prob_abs_in(0.6, 2.0) == 0.0);
}

TEST_CASE("conditioning on a zero-probability sign is rejected") {
    CHECK_THROWS_AS(exponential(1.0).mean_given_sign(-1), std::invalid_argument);
    CHECK_THROWS_AS(point_mass(0.5).mean_given_sign(-1), std::invalid_argument);
}

TEST_CASE("draws reproduce the declared distribution") {
    Rng rng(123, 0);
    const int n = 100000;
    const double sq = std::sqrt(static_cast<double>(n));

    SizeLaw u = uniform(-0.2, 0.3);
    double acc = 0.0;
    int pos = 0;
    for (int i = 0; i < n; ++i) {
        double x = u.draw(rng);
        CHECK(x >= -0.2);
        CHECK(x <= 0.3);
        acc += x;
        pos += x > 0.0;
    }
    // 3 standard errors around the analytic values
    const double sd_u = 0.5 / std::sqrt(12.0);
    CHECK(std::abs(acc / n - 0.05) < 3.0 * sd_u / sq);
    CHECK(std::abs(static_cast<double>(pos) / n - 0.6) < 3.0 * 0.49 / sq);

    SizeLaw ex = exponential(2.0);
    acc = 0.0;
    for (int i = 0; i < n; ++i) acc += ex.draw(rng);
    CHECK(std::abs(acc / n - 0.5) < 3.0 * 0.5 / sq);

    SizeLaw tp = two_point(0.4, -0.2, 0.6);
    int firsts = 0;
    for (int i = 0; i < n; ++i) firsts += tp.draw(rng) == 0.4;
    CHECK(std::abs(static_cast<double>(firsts) / n - 0.6) < 3.0 * 0.49 / sq);
}

TEST_CASE("model validation guards every structural convention") {
    TimeGrid grid(10, 1.0);
    ModelSpec m;
    m.initial_price = 1.0;
    m.jumps = {scheduled_jump(0.5, point_mass(0.3), Predictability::Full)};
    CHECK_NOTHROW(m.validate(grid));

    SUBCASE("initial price must be positive") {
        m.initial_price = 0.0;
        CHECK_THROWS_AS(m.validate(grid), std::invalid_argument);
    }
    SUBCASE("volatility must be positive for a noisy base") {
        m.base.kind = BaseKind::GaussianWalk;
        m.base.sigma_vol = 0.0;
        CHECK_THROWS_AS(m.validate(grid), std::invalid_argument);
    }
    SUBCASE("no jump at time zero") {
        m.jumps[0].time.at = 0.0;
        CHECK_THROWS_WITH_AS(m.validate(grid), doctest::Contains("no-initial-jump"),
                             std::invalid_argument);
    }
    SUBCASE("jump times must sit on the grid") {
        m.jumps[0].time.at = 0.55;
        CHECK_THROWS_AS(m.validate(grid), std::invalid_argument);
    }
    SUBCASE("a clock-timed jump cannot be announced") {
        m.jumps[0].time.kind = TimeKind::ExponentialClock;
        m.jumps[0].time.rate = 1.0;
        CHECK_THROWS_WITH_AS(m.validate(grid), doctest::Contains("cannot be announced"),
                             std::invalid_argument);
        m.jumps[0].predictability = Predictability::None;
        CHECK_NOTHROW(m.validate(grid));
    }
    SUBCASE("a reveal at or after the jump is uninformative") {
        m.jumps[0].reveal_time = 0.5;
        CHECK_THROWS_WITH_AS(m.validate(grid), doctest::Contains("reveal time must precede"),
                             std::invalid_argument);
        m.jumps[0].reveal_time = 0.4;
        CHECK_NOTHROW(m.validate(grid));
    }
    SUBCASE("dividend parameters live in their open ranges") {
        m.jumps.clear();
        m.dividend = DividendSpec{1.0, 0.4, 0.5};
        CHECK_NOTHROW(m.validate(grid));
        m.dividend->fraction = 1.0;
        CHECK_THROWS_AS(m.validate(grid), std::invalid_argument);
        m.dividend->fraction = 0.4;
        m.dividend->amount = 0.0;
        CHECK_THROWS_AS(m.validate(grid), std::invalid_argument);
    }
    SUBCASE("two jumps cannot share a grid time") {
        m.jumps.push_back(scheduled_jump(0.5, point_mass(-0.1), Predictability::None));
        CHECK_THROWS_WITH_AS(m.validate(grid), doctest::Contains("at most one jump"),
                             std::invalid_argument);
    }
    SUBCASE("a right jump needs a grid point after it and a real size") {
        m.ladlag = LadlagSpec{1.0, point_mass(1.0)};
        CHECK_THROWS_AS(m.validate(grid), std::invalid_argument);  // nothing after the horizon
        m.ladlag->at = 0.9;
        CHECK_NOTHROW(m.validate(grid));
        m.ladlag->size = point_mass(0.0);
        CHECK_THROWS_AS(m.validate(grid), std::invalid_argument);
    }
}

TEST_CASE("escrowed dividend enters the gains process as an upward jump") {
    // ex-dividend price drops by fraction * amount, the dividend account gains
    // amount: net effect on the tracked process is + (1 - fraction) * amount
    ModelSpec m;
    m.initial_price = 10.0;
    m.dividend = DividendSpec{1.0, 0.4, 0.5};
    TimeGrid grid(10, 1.0);
    m.validate(grid);

    auto eff = m.effective_jumps();
    REQUIRE(eff.size() == 1);
    CHECK(eff[0].time.kind == TimeKind::Deterministic);
    CHECK(eff[0].time.at == 0.5);
    CHECK(eff[0].size.kind == SizeKind::PointMass);
    CHECK(eff[0].size.value == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(eff[0].predictability == Predictability::Full);
    REQUIRE(eff[0].reveal_time.has_value());
    CHECK(*eff[0].reveal_time == 0.0);

    PathGenerator gen(m, grid);
    PathSample p = gen.sample(1, 0);
    CHECK(p.values[4] == doctest::Approx(10.0).epsilon(1e-15));
    CHECK(p.left[5] == doctest::Approx(10.0).epsilon(1e-15));
    CHECK(p.values[5] == doctest::Approx(10.6).epsilon(1e-15));
    CHECK(p.values[10] == doctest::Approx(10.6).epsilon(1e-15));
    REQUIRE(p.jumps.size() == 1);
    CHECK(p.jumps[0].index == 5);
    CHECK(p.jumps[0].dx == doctest::Approx(0.6).epsilon(1e-15));
}

TEST_CASE("revelation schedule by predictability class") {
    TimeGrid grid(8, 1.0);
    ModelSpec m;
    m.jumps = {scheduled_jump(0.5, two_point(0.3, -0.3, 0.5), Predictability::Full)};

    SUBCASE("full: size and sign known from the reveal time") {
        PathGenerator gen(m, grid);
        PathSample p = gen.sample(3, 1);
        const InfoTag* size = p.find_tag("jump0.size");
        const InfoTag* sign = p.find_tag("jump0.sign");
        REQUIRE(size != nullptr);
        REQUIRE(sign != nullptr);
        CHECK(size->reveal_index == 0);
        CHECK(sign->reveal_index == 0);
        CHECK(size->value == p.dx_at(4));
        CHECK(sign->value == (p.dx_at(4) > 0 ? 1.0 : -1.0));
    }
    SUBCASE("direction only: sign early, size only at the jump") {
        m.jumps[0].predictability = Predictability::DirectionOnly;
        PathGenerator gen(m, grid);
        PathSample p = gen.sample(3, 1);
        CHECK(p.find_tag("jump0.sign")->reveal_index == 0);
        CHECK(p.find_tag("jump0.size")->reveal_index == 4);
    }
    SUBCASE("none: everything only at the jump") {
        m.jumps[0].predictability = Predictability::None;
        PathGenerator gen(m, grid);
        PathSample p = gen.sample(3, 1);
        CHECK(p.find_tag("jump0.sign")->reveal_index == 4);
        CHECK(p.find_tag("jump0.size")->reveal_index == 4);
    }
}

TEST_CASE("gaussian walk increments have the declared variance") {
    ModelSpec m;
    m.initial_price = 10.0;
    m.base.kind = BaseKind::GaussianWalk;
    m.base.sigma_vol = 0.2;
    TimeGrid grid(16, 1.0);
    PathGenerator gen(m, grid);

    const int n_paths = 20000;
    double sum = 0.0, sum2 = 0.0;
    long count = 0;
    for (int p = 0; p < n_paths; ++p) {
        PathSample s = gen.sample(77, static_cast<std::uint64_t>(p));
        for (std::size_t i = 1; i < s.values.size(); ++i) {
            double d = s.values[i] - s.values[i - 1];
            sum += d;
            sum2 += d * d;
            ++count;
        }
    }
    const double mean = sum / static_cast<double>(count);
    const double var = sum2 / static_cast<double>(count) - mean * mean;
    const double target = 0.2 * 0.2 * grid.dt();
    // variance of the sample variance for a normal law is 2 sigma^4 / n
    const double se = std::sqrt(2.0 * target * target / static_cast<double>(count));
    CHECK(std::abs(var - target) < 3.0 * se);
    CHECK(std::abs(mean) < 3.0 * std::sqrt(target / static_cast<double>(count)));
}

TEST_CASE("clock-timed jumps fire with the exponential occurrence probability") {
    ModelSpec m;
    m.jumps = {scheduled_jump(0.5, point_mass(0.3), Predictability::None)};
    m.jumps[0].time.kind = TimeKind::ExponentialClock;
    m.jumps[0].time.rate = 1.0;
    TimeGrid grid(32, 2.0);
    PathGenerator gen(m, grid);

    const int n_paths = 40000;
    int fired = 0;
    for (int p = 0; p < n_paths; ++p) {
        PathSample s = gen.sample(5, static_cast<std::uint64_t>(p));
        REQUIRE(s.jump_index.size() == 1);
        if (s.jump_index[0] != npos) {
            ++fired;
            CHECK(s.dx_at(s.jump_index[0]) == doctest::Approx(0.3).epsilon(1e-15));
        }
    }
    const double target = 1.0 - std::exp(-1.0 * grid.horizon);
    const double se = std::sqrt(target * (1.0 - target) / n_paths);
    CHECK(std::abs(static_cast<double>(fired) / n_paths - target) < 3.0 * se);
}

TEST_CASE("hitting-triggered jumps fire at the first crossing") {
    ModelSpec m;
    m.initial_price = 10.0;
    m.base.kind = BaseKind::GaussianWalk;
    m.base.sigma_vol = 0.5;
    m.jumps = {scheduled_jump(0.5, point_mass(0.2), Predictability::None)};
    m.jumps[0].time.kind = TimeKind::FirstHitting;
    m.jumps[0].time.level = 10.4;
    TimeGrid grid(64, 1.0);
    PathGenerator gen(m, grid);

    int fired = 0;
    for (int p = 0; p < 500; ++p) {
        PathSample s = gen.sample(11, static_cast<std::uint64_t>(p));
        const std::size_t j = s.jump_index[0];
        if (j == npos) {
            for (std::size_t i = 0; i < s.values.size(); ++i) CHECK(s.values[i] < 10.4);
            continue;
        }
        ++fired;
        CHECK(s.left[j] >= 10.4);             // the crossing point itself
        for (std::size_t i = 0; i < j; ++i) CHECK(s.left[i] < 10.4);
        CHECK(s.values[j] == doctest::Approx(s.left[j] + 0.2).epsilon(1e-12));
    }
    CHECK(fired > 100);  // the level is well within reach of this volatility
}

TEST_CASE("unpredictable jump direction is independent of the pre-jump path") {
    // 2x2 contingency table: sign of the pre-jump walk vs sign of the jump;
    // chi-square with one degree of freedom, 1% critical value 6.635
    ModelSpec m;
    m.initial_price = 10.0;
    m.base.kind = BaseKind::GaussianWalk;
    m.base.sigma_vol = 0.2;
    m.jumps = {scheduled_jump(0.5, two_point(0.3, -0.3, 0.5), Predictability::None)};
    TimeGrid grid(16, 1.0);
    PathGenerator gen(m, grid);

    const int n_paths = 20000;
    double table[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
    for (int p = 0; p < n_paths; ++p) {
        PathSample s = gen.sample(21, static_cast<std::uint64_t>(p));
        const int walk_up = s.left[8] > s.values[0] ? 1 : 0;
        const int jump_up = s.dx_at(8) > 0.0 ? 1 : 0;
        table[walk_up][jump_up] += 1.0;
    }
    double chi2 = 0.0;
    const double total = n_paths;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            const double row = table[i][0] + table[i][1];
            const double col = table[0][j] + table[1][j];
            const double expect = row * col / total;
            REQUIRE(expect > 0.0);
            chi2 += (table[i][j] - expect) * (table[i][j] - expect) / expect;
        }
    CHECK(chi2 < 6.635);
}

TEST_CASE("model JSON round trip preserves the hash") {
    ModelSpec m;
    m.initial_price = 10.0;
    m.base.kind = BaseKind::GaussianWalk;
    m.base.drift = 0.1;
    m.base.sigma_vol = 0.2;
    m.jumps = {scheduled_jump(0.5, signed_uniform(0.1, 0.3, 0.5), Predictability::DirectionOnly)};
    m.dividend = DividendSpec{1.0, 0.4, 0.75};

    const std::string text = model_to_json(m);
    ModelSpec back = model_from_json(text);
    CHECK(model_hash(back) == model_hash(m));
    CHECK(model_to_json(back) == text);
}

TEST_CASE("unsupported schema versions are rejected, not guessed at") {
    ModelSpec m;
    m.jumps = {scheduled_jump(0.5, point_mass(0.3), Predictability::Full)};
    std::string text = model_to_json(m);
    const std::string needle = "\"schema_version\": 1";
    auto pos = text.find(needle);
    REQUIRE(pos != std::string::npos);
    text.replace(pos, needle.size(), "\"schema_version\":99");
    CHECK_THROWS_WITH_AS(model_from_json(text), doctest::Contains("schema_version"),
                         std::invalid_argument);
}

TEST_CASE("configuration hashing is stable") {
    // 64-bit FNV-1a reference values
    CHECK(fnv1a_hex("") == "cbf29ce484222325");
    CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
    CHECK(fnv1a_hex("hello") == fnv1a_hex("hello"));
    CHECK(fnv1a_hex("hello") != fnv1a_hex("hellp"));
}
