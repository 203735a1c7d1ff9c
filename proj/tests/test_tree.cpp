#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "jumplab/rational.hpp"
#include "jumplab/scenario_tree.hpp"

using namespace jumplab;

TEST_CASE("rational arithmetic normalizes and compares exactly") {
    Rational a(2, 4);
    CHECK(a.num() == 1);
    CHECK(a.den() == 2);
    CHECK(Rational(-2, -4) == Rational(1, 2));
    CHECK(Rational(1, -2).num() == -1);       // sign lives in the numerator
    CHECK((Rational(1, 3) + Rational(1, 6)) == Rational(1, 2));
    CHECK((Rational(1, 3) * Rational(3, 5)) == Rational(1, 5));
    CHECK((Rational(1, 2) - Rational(2, 3)) == Rational(-1, 6));
    CHECK((Rational(3, 4) / Rational(3, 2)) == Rational(1, 2));
    CHECK(Rational(1, 3) < Rational(1, 2));
    CHECK(Rational(-1, 3).sign() == -1);
    CHECK(Rational(0).sign() == 0);
    CHECK(Rational(7, 3).str() == "7/3");
    CHECK(Rational(6, 3).str() == "2");
    CHECK(Rational::parse("7/3") == Rational(7, 3));
    CHECK(Rational::parse("-5") == Rational(-5));
    CHECK_THROWS_AS(Rational(1, 0), std::exception);
    CHECK_THROWS_AS(Rational(1, 2) / Rational(0), std::domain_error);
}

namespace {

// (0.3, 0.7) then (0.4, 0.6) on each middle node
ScenarioTree two_period_tree() {
    ScenarioTree t;
    int r = t.add_root(1.0);
    int up = t.add_child(r, 1.5, 0.3);
    int dn = t.add_child(r, 0.8, 0.7);
    t.add_child(up, 1.8, 0.4);
    t.add_child(up, 1.2, 0.6);
    t.add_child(dn, 1.0, 0.4);
    t.add_child(dn, 0.5, 0.6);
    return t;
}

}  // namespace

TEST_CASE("tree structure bookkeeping") {
    ScenarioTree t = two_period_tree();
    CHECK_NOTHROW(t.validate());
    CHECK(t.size() == 7);
    CHECK(t.depth() == 2);
    CHECK(t.leaves() == std::vector<int>{3, 4, 5, 6});
    CHECK(t.leaves_under(1) == std::vector<int>{4, 3});
    CHECK(!t.exact());

    CHECK(t.path_prob(0, 3) == doctest::Approx(0.12).epsilon(1e-15));
    CHECK(t.path_prob(1, 3) == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(t.path_prob(0, 0) == 1.0);
    CHECK_THROWS_AS(t.path_prob(1, 5), std::invalid_argument);  // not an ancestor
}

TEST_CASE("validation rejects malformed trees") {
    SUBCASE("branch probabilities must sum to one") {
        ScenarioTree t;
        int r = t.add_root(1.0);
        t.add_child(r, 2.0, 0.5);
        t.add_child(r, 0.5, 0.4);
        CHECK_THROWS_WITH_AS(t.validate(), doctest::Contains("sum to one"),
                             std::invalid_argument);
    }
    SUBCASE("branch probabilities must be strictly positive") {
        ScenarioTree t;
        int r = t.add_root(1.0);
        t.add_child(r, 2.0, 1.0);
        t.add_child(r, 0.5, 0.0);
        CHECK_THROWS_WITH_AS(t.validate(), doctest::Contains("strictly positive"),
                             std::invalid_argument);
    }
    SUBCASE("ragged leaves are rejected") {
        ScenarioTree t;
        int r = t.add_root(1.0);
        int a = t.add_child(r, 2.0, 0.5);
        t.add_child(r, 0.5, 0.5);
        t.add_child(a, 2.5, 0.5);
        t.add_child(a, 1.5, 0.5);
        CHECK_THROWS_WITH_AS(t.validate(), doctest::Contains("same terminal level"),
                             std::invalid_argument);
    }
    SUBCASE("only one root") {
        ScenarioTree t;
        t.add_root(1.0);
        CHECK_THROWS_AS(t.add_root(2.0), std::invalid_argument);
    }
}

TEST_CASE("exact trees keep rational prices and probabilities") {
    ScenarioTree t;
    int r = t.add_root(Rational(1));
    t.add_child(r, Rational(2), Rational(1, 3));
    t.add_child(r, Rational(1, 2), Rational(2, 3));
    t.validate();
    CHECK(t.exact());
    CHECK(t.path_prob_exact(0, 1) == Rational(1, 3));
    CHECK(t.node(2).price == doctest::Approx(0.5).epsilon(1e-15));

    ScenarioTree mixed = two_period_tree();
    CHECK_THROWS_AS(mixed.path_prob_exact(0, 3), std::invalid_argument);
}

TEST_CASE("tree JSON round trip preserves structure and exactness") {
    ScenarioTree t;
    int r = t.add_root(Rational(1));
    t.add_child(r, Rational(2), Rational(1, 3));
    t.add_child(r, Rational(1, 2), Rational(2, 3));
    ScenarioTree back = ScenarioTree::from_json(t.to_json());
    CHECK(back.size() == 3);
    CHECK(back.exact());
    CHECK(back.path_prob_exact(0, 2) == Rational(2, 3));
    CHECK(back.to_json() == t.to_json());

    ScenarioTree d = two_period_tree();
    ScenarioTree dback = ScenarioTree::from_json(d.to_json());
    CHECK(!dback.exact());
    CHECK(dback.path_prob(0, 6) == doctest::Approx(0.42).epsilon(1e-15));

    CHECK_THROWS_AS(ScenarioTree::from_json("not json"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(ScenarioTree::from_json("{\"schema_version\": 9, \"nodes\": []}"),
                         doctest::Contains("schema_version"), std::invalid_argument);
}

TEST_CASE("random construction respects the requested shape and rules") {
    ScenarioTree t = build_tree(3, 2, increment_price_rule({-1.0, 0.0, 1.0}),
                                random_prob_rule(), 42);
    t.validate();
    CHECK(t.depth() == 3);
    CHECK(t.leaves().size() == 8);
    // every edge is an alphabet increment
    for (const auto id : t.leaves()) {
        int v = id;
        while (v != 0) {
            const auto& n = t.node(v);
            double inc = n.price - t.node(n.parent).price;
            CHECK((inc == -1.0 || inc == 0.0 || inc == 1.0));
            v = n.parent;
        }
    }

    // same seed, same tree; different seed, different tree somewhere
    ScenarioTree t2 = build_tree(3, 2, increment_price_rule({-1.0, 0.0, 1.0}),
                                 random_prob_rule(), 42);
    CHECK(t.to_json() == t2.to_json());
    ScenarioTree t3 = build_tree(3, 2, increment_price_rule({-1.0, 0.0, 1.0}),
                                 random_prob_rule(), 43);
    CHECK(t.to_json() != t3.to_json());

    CHECK_THROWS_AS(build_tree(9, 2, increment_price_rule({1.0}), uniform_prob_rule(), 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(build_tree(2, 9, increment_price_rule({1.0}), uniform_prob_rule(), 1),
                    std::invalid_argument);
}

TEST_CASE("exhaustive increment families have the counted size and are exact") {
    auto family = enumerate_increment_trees(2, 2, {-1, 0, 1});
    CHECK(family.size() == 729);  // three choices on each of six edges
    std::set<std::string> distinct;
    for (const auto& t : family) {
        CHECK(t.exact());
        CHECK(t.depth() == 2);
        distinct.insert(t.to_json());
    }
    CHECK(distinct.size() == 729);

    auto single = enumerate_increment_trees(1, 2, {-1, 1}, 5);
    CHECK(single.size() == 4);
    CHECK(single[0].node(0).price == 5.0);

    CHECK_THROWS_AS(enumerate_increment_trees(4, 2, {-1, 0, 1}), std::invalid_argument);
}

TEST_CASE("one-period binomial node in exact arithmetic") {
    ScenarioTree t = binomial_tree(Rational(1), Rational(2), Rational(1, 2), Rational(1, 2));
    CHECK(t.exact());
    CHECK(t.size() == 3);
    CHECK(*t.node(1).price_q == Rational(2));
    CHECK(*t.node(2).price_q == Rational(1, 2));
    CHECK(*t.node(1).prob_q == Rational(1, 2));
}

TEST_CASE("root-to-leaf walks become piecewise-constant grid paths") {
    ScenarioTree t = two_period_tree();
    auto paths = tree_to_paths(t);
    REQUIRE(paths.size() == 4);
    double total = 0.0;
    for (const auto& [p, prob] : paths) {
        total += prob;
        CHECK(p.values.size() == 3);
        CHECK(p.values[0] == 1.0);
        CHECK(p.left[0] == p.values[0]);
        for (std::size_t i = 1; i < p.values.size(); ++i) {
            CHECK(p.left[i] == p.values[i - 1]);
            const double dx = p.values[i] - p.left[i];
            CHECK(p.dx_at(i) == dx);  // ledger matches the step change
        }
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    // first leaf path: 1.0 -> 1.5 -> 1.8 with probability 0.12
    CHECK(paths[0].first.values == std::vector<double>{1.0, 1.5, 1.8});
    CHECK(paths[0].second == doctest::Approx(0.12).epsilon(1e-15));
}
