#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "jumplab/path.hpp"
#include "jumplab/rational.hpp"
#include "jumplab/rng.hpp"

namespace jumplab {

struct TreeNode {
    int id = 0;
    int parent = -1;  // -1 for the root
    int level = 0;    // time index
    double price = 0.0;
    double prob = 1.0;  // probability of the edge from the parent; 1 at the root
    std::optional<Rational> price_q;  // exact values, carried when the inputs are rational
    std::optional<Rational> prob_q;
    std::vector<int> children;
    std::map<std::string, double> info;
};

// Finite scenario tree for one asset: prices on nodes, strictly positive
// branch probabilities summing to one, all leaves at the same terminal level.
class ScenarioTree {
  public:
    int add_root(double price);
    int add_root(const Rational& price);
    int add_child(int parent, double price, double prob);
    int add_child(int parent, const Rational& price, const Rational& prob);

    std::size_t size() const { return nodes_.size(); }
    const TreeNode& node(int id) const { return nodes_.at(static_cast<std::size_t>(id)); }
    TreeNode& node_mut(int id) { return nodes_.at(static_cast<std::size_t>(id)); }
    int depth() const;
    std::vector<int> leaves() const;
    std::vector<int> leaves_under(int id) const;
    bool exact() const;  // every node carries exact price and probability

    // probability of reaching `descendant` from `ancestor` (product of edge
    // probabilities along the unique connecting path)
    double path_prob(int ancestor, int descendant) const;
    Rational path_prob_exact(int ancestor, int descendant) const;

    // Throws std::invalid_argument on nonpositive or non-normalized branch
    // probabilities (exact check when exact, 1e-12 otherwise) or ragged leaves.
    void validate() const;

    std::string to_json() const;
    static ScenarioTree from_json(const std::string& text);

  private:
    std::vector<TreeNode> nodes_;
};

// Random tree construction.  price_rule maps (parent price, child slot) to a
// child price; prob_rule produces the branch probabilities for one node.
// Rules that return nonpositive or non-normalized probabilities are rejected.
using PriceRule = std::function<double(double parent_price, int child_slot, Rng& rng)>;
using ProbRule = std::function<std::vector<double>(int n_children, Rng& rng)>;

ScenarioTree build_tree(int depth, int branching, const PriceRule& price_rule,
                        const ProbRule& prob_rule, std::uint64_t seed,
                        int max_depth = 5, int max_branching = 4);

PriceRule increment_price_rule(std::vector<double> alphabet);
ProbRule uniform_prob_rule();
ProbRule random_prob_rule();

// Every tree of the given shape whose edge increments are taken from the
// alphabet, with uniform branch probabilities (exact rationals).  The family
// has |alphabet|^(number of edges) members.
std::vector<ScenarioTree> enumerate_increment_trees(int depth, int branching,
                                                    const std::vector<long long>& alphabet,
                                                    long long root_price = 0);

// One-period recombining-style binomial node: root 1, children u and d.
ScenarioTree binomial_tree(const Rational& root, const Rational& u, const Rational& d,
                           const Rational& p_up);

// Each root-to-leaf walk as a grid path (piecewise constant between steps,
// whole step change booked as a jump), paired with the leaf probability.
std::vector<std::pair<PathSample, double>> tree_to_paths(const ScenarioTree& tree);

}  // namespace jumplab
