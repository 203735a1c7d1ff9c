#include "jumplab/scenario_tree.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace jumplab {

using nlohmann::json;

int ScenarioTree::add_root(double price) {
    if (!nodes_.empty()) throw std::invalid_argument("tree already has a root");
    nodes_.push_back(TreeNode{0, -1, 0, price, 1.0, std::nullopt, std::nullopt, {}, {}});
    return 0;
}

int ScenarioTree::add_root(const Rational& price) {
    int id = add_root(price.to_double());
    nodes_[0].price_q = price;
    nodes_[0].prob_q = Rational(1);
    return id;
}

int ScenarioTree::add_child(int parent, double price, double prob) {
    const auto& p = node(parent);
    TreeNode n;
    n.id = static_cast<int>(nodes_.size());
    n.parent = parent;
    n.level = p.level + 1;
    n.price = price;
    n.prob = prob;
    nodes_.push_back(n);
    nodes_[static_cast<std::size_t>(parent)].children.push_back(n.id);
    return n.id;
}

int ScenarioTree::add_child(int parent, const Rational& price, const Rational& prob) {
    int id = add_child(parent, price.to_double(), prob.to_double());
    nodes_[static_cast<std::size_t>(id)].price_q = price;
    nodes_[static_cast<std::size_t>(id)].prob_q = prob;
    return id;
}

int ScenarioTree::depth() const {
    int d = 0;
    for (const auto& n : nodes_) d = std::max(d, n.level);
    return d;
}

std::vector<int> ScenarioTree::leaves() const {
    std::vector<int> out;
    for (const auto& n : nodes_)
        if (n.children.empty()) out.push_back(n.id);
    return out;
}

std::vector<int> ScenarioTree::leaves_under(int id) const {
    std::vector<int> out, stack{id};
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        const auto& n = node(v);
        if (n.children.empty())
            out.push_back(v);
        else
            for (int c : n.children) stack.push_back(c);
    }
    return out;
}

bool ScenarioTree::exact() const {
    for (const auto& n : nodes_)
        if (!n.price_q || !n.prob_q) return false;
    return !nodes_.empty();
}

double ScenarioTree::path_prob(int ancestor, int descendant) const {
    double p = 1.0;
    int v = descendant;
    while (v != ancestor) {
        const auto& n = node(v);
        if (n.parent < 0) throw std::invalid_argument("nodes are not ancestor and descendant");
        p *= n.prob;
        v = n.parent;
    }
    return p;
}

Rational ScenarioTree::path_prob_exact(int ancestor, int descendant) const {
    Rational p(1);
    int v = descendant;
    while (v != ancestor) {
        const auto& n = node(v);
        if (n.parent < 0) throw std::invalid_argument("nodes are not ancestor and descendant");
        if (!n.prob_q) throw std::invalid_argument("tree does not carry exact probabilities");
        p = p * (*n.prob_q);
        v = n.parent;
    }
    return p;
}

void ScenarioTree::validate() const {
    if (nodes_.empty()) throw std::invalid_argument("empty tree");
    const bool ex = exact();
    int leaf_level = -1;
    for (const auto& n : nodes_) {
        if (n.children.empty()) {
            if (leaf_level < 0) leaf_level = n.level;
            if (n.level != leaf_level)
                throw std::invalid_argument("all leaves must sit at the same terminal level");
            continue;
        }
        if (ex) {
            Rational s(0);
            for (int c : n.children) {
                const auto& q = *node(c).prob_q;
                if (!(q > Rational(0)))
                    throw std::invalid_argument("branch probability must be strictly positive");
                s = s + q;
            }
            if (s != Rational(1))
                throw std::invalid_argument("branch probabilities must sum to one");
        } else {
            double s = 0.0;
            for (int c : n.children) {
                double q = node(c).prob;
                if (!(q > 0.0))
                    throw std::invalid_argument("branch probability must be strictly positive");
                s += q;
            }
            if (std::abs(s - 1.0) > 1e-12)
                throw std::invalid_argument("branch probabilities must sum to one");
        }
    }
}

std::string ScenarioTree::to_json() const {
    json arr = json::array();
    for (const auto& n : nodes_) {
        json e;
        e["id"] = n.id;
        e["parent"] = n.parent;
        e["level"] = n.level;
        if (n.price_q)
            e["price"] = n.price_q->str();
        else
            e["price"] = n.price;
        if (n.prob_q)
            e["prob"] = n.prob_q->str();
        else
            e["prob"] = n.prob;
        arr.push_back(e);
    }
    json j;
    j["schema_version"] = 1;
    j["nodes"] = arr;
    return j.dump(2);
}

ScenarioTree ScenarioTree::from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("tree JSON does not parse: ") + e.what());
    }
    if (j.value("schema_version", -1) != 1)
        throw std::invalid_argument("unsupported tree schema_version");
    ScenarioTree t;
    for (const auto& e : j.at("nodes")) {
        int parent = e.at("parent");
        std::optional<Rational> price_q, prob_q;
        double price, prob = 1.0;
        if (e.at("price").is_string()) {
            price_q = Rational::parse(e.at("price").get<std::string>());
            price = price_q->to_double();
        } else {
            price = e.at("price");
        }
        if (e.at("prob").is_string()) {
            prob_q = Rational::parse(e.at("prob").get<std::string>());
            prob = prob_q->to_double();
        } else {
            prob = e.at("prob");
        }
        int id;
        if (parent < 0)
            id = t.add_root(price);
        else
            id = t.add_child(parent, price, prob);
        t.nodes_[static_cast<std::size_t>(id)].price_q = price_q;
        t.nodes_[static_cast<std::size_t>(id)].prob_q =
            parent < 0 ? std::optional<Rational>(Rational(1)) : prob_q;
    }
    t.validate();
    return t;
}

ScenarioTree build_tree(int depth, int branching, const PriceRule& price_rule,
                        const ProbRule& prob_rule, std::uint64_t seed, int max_depth,
                        int max_branching) {
    if (depth < 1 || depth > max_depth)
        throw std::invalid_argument("tree depth outside [1, " + std::to_string(max_depth) + "]");
    if (branching < 1 || branching > max_branching)
        throw std::invalid_argument("branching outside [1, " + std::to_string(max_branching) + "]");

    Rng rng(seed, 0x712ee);
    ScenarioTree t;
    int root = t.add_root(1.0);
    std::vector<int> frontier{root};
    for (int l = 0; l < depth; ++l) {
        std::vector<int> next;
        for (int v : frontier) {
            auto probs = prob_rule(branching, rng);
            if (static_cast<int>(probs.size()) != branching)
                throw std::invalid_argument("probability rule returned the wrong arity");
            double s = 0.0;
            for (double q : probs) {
                if (!(q > 0.0))
                    throw std::invalid_argument("probability rule produced a nonpositive branch");
                s += q;
            }
            if (std::abs(s - 1.0) > 1e-12)
                throw std::invalid_argument("probability rule produced non-normalized branches");
            for (int c = 0; c < branching; ++c) {
                double price = price_rule(t.node(v).price, c, rng);
                next.push_back(t.add_child(v, price, probs[static_cast<std::size_t>(c)]));
            }
        }
        frontier = std::move(next);
    }
    t.validate();
    return t;
}

PriceRule increment_price_rule(std::vector<double> alphabet) {
    if (alphabet.empty()) throw std::invalid_argument("empty increment alphabet");
    return [alphabet](double parent, int, Rng& rng) {
        return parent + alphabet[rng.uniform_index(alphabet.size())];
    };
}

ProbRule uniform_prob_rule() {
    return [](int n, Rng&) {
        return std::vector<double>(static_cast<std::size_t>(n), 1.0 / n);
    };
}

ProbRule random_prob_rule() {
    return [](int n, Rng& rng) {
        std::vector<double> u(static_cast<std::size_t>(n));
        double s = 0.0;
        for (auto& x : u) {
            x = 0.05 + rng.uniform01();  // bounded away from zero
            s += x;
        }
        for (auto& x : u) x /= s;
        return u;
    };
}

std::vector<ScenarioTree> enumerate_increment_trees(int depth, int branching,
                                                    const std::vector<long long>& alphabet,
                                                    long long root_price) {
    if (depth < 1 || depth > 3 || branching < 1 || branching > 3)
        throw std::invalid_argument("enumeration supports depth and branching up to 3");
    std::size_t edges = 0, width = 1;
    for (int l = 0; l < depth; ++l) {
        width *= static_cast<std::size_t>(branching);
        edges += width;
    }
    const std::size_t a = alphabet.size();
    std::size_t total = 1;
    for (std::size_t e = 0; e < edges; ++e) {
        if (total > 2'000'000 / a) throw std::invalid_argument("enumeration family too large");
        total *= a;
    }

    const Rational uniform(1, branching);
    std::vector<ScenarioTree> family;
    family.reserve(total);
    std::vector<std::size_t> digits(edges, 0);
    for (std::size_t m = 0; m < total; ++m) {
        ScenarioTree t;
        t.add_root(Rational(root_price));
        std::vector<int> frontier{0};
        std::size_t e = 0;
        for (int l = 0; l < depth; ++l) {
            std::vector<int> next;
            for (int v : frontier) {
                for (int c = 0; c < branching; ++c) {
                    Rational price = *t.node(v).price_q + Rational(alphabet[digits[e++]]);
                    next.push_back(t.add_child(v, price, uniform));
                }
            }
            frontier = std::move(next);
        }
        family.push_back(std::move(t));
        // next mixed-radix assignment
        for (std::size_t d = 0; d < edges; ++d) {
            if (++digits[d] < a) break;
            digits[d] = 0;
        }
    }
    return family;
}

ScenarioTree binomial_tree(const Rational& root, const Rational& u, const Rational& d,
                           const Rational& p_up) {
    ScenarioTree t;
    int r = t.add_root(root);
    t.add_child(r, root * u, p_up);
    t.add_child(r, root * d, Rational(1) - p_up);
    t.validate();
    return t;
}

std::vector<std::pair<PathSample, double>> tree_to_paths(const ScenarioTree& tree) {
    tree.validate();
    const int d = tree.depth();
    std::vector<std::pair<PathSample, double>> out;
    for (int leaf : tree.leaves()) {
        std::vector<int> chain;
        for (int v = leaf; v >= 0; v = tree.node(v).parent) chain.push_back(v);
        std::reverse(chain.begin(), chain.end());

        PathSample p;
        p.grid = TimeGrid(static_cast<std::size_t>(d), static_cast<double>(d));
        p.path_id = static_cast<std::uint64_t>(leaf);
        p.values.resize(chain.size());
        p.left.resize(chain.size());
        for (std::size_t i = 0; i < chain.size(); ++i) {
            p.values[i] = tree.node(chain[i]).price;
            p.left[i] = i == 0 ? p.values[0] : p.values[i - 1];
            double dx = p.values[i] - p.left[i];
            if (dx != 0.0) p.jumps.push_back({i, dx, 0.0});
        }
        out.emplace_back(std::move(p), tree.path_prob(0, leaf));
    }
    return out;
}

}  // namespace jumplab
