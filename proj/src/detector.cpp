#include "jumplab/detector.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace jumplab {

namespace {

constexpr double kPriceTol = 1e-9;

// sign with a dead zone: 0 counts as "no move" in floating mode
int sgn_tol(double x) { return x > kPriceTol ? 1 : (x < -kPriceTol ? -1 : 0); }

std::vector<int> internal_nodes(const ScenarioTree& tree) {
    std::vector<int> out;
    for (std::size_t i = 0; i < tree.size(); ++i)
        if (!tree.node(static_cast<int>(i)).children.empty())
            out.push_back(static_cast<int>(i));
    return out;
}

}  // namespace

std::vector<JumpFinding> detect_predictable_jumps(const ScenarioTree& tree) {
    tree.validate();
    const bool exact = tree.exact();
    std::vector<JumpFinding> out;
    for (int id : internal_nodes(tree)) {
        const TreeNode& nd = tree.node(id);
        bool all_nonzero = true;
        bool all_equal = true;
        bool same_sign = true;
        int sign0 = 0;
        std::vector<double> changes;
        std::optional<Rational> first_q;
        for (std::size_t c = 0; c < nd.children.size(); ++c) {
            const TreeNode& ch = tree.node(nd.children[c]);
            if (exact) {
                const Rational dq = *ch.price_q - *nd.price_q;
                changes.push_back(dq.to_double());
                const int s = dq.sign();
                if (s == 0) all_nonzero = false;
                if (c == 0) {
                    sign0 = s;
                    first_q = dq;
                } else {
                    if (s != sign0) same_sign = false;
                    if (!(dq == *first_q)) all_equal = false;
                }
            } else {
                const double d = ch.price - nd.price;
                changes.push_back(d);
                const int s = sgn_tol(d);
                if (s == 0) all_nonzero = false;
                if (c == 0) {
                    sign0 = s;
                } else {
                    if (s != sign0) same_sign = false;
                    if (std::abs(d - changes[0]) > kPriceTol) all_equal = false;
                }
            }
        }
        if (!all_nonzero || !same_sign) continue;
        JumpFinding f;
        f.node = id;
        f.kind = all_equal ? FindingKind::FullyPredictable : FindingKind::DirectionPredictable;
        f.changes = std::move(changes);
        out.push_back(std::move(f));
    }
    return out;
}

std::optional<SureProfitHit> search_sure_profit(const ScenarioTree& tree) {
    tree.validate();
    const bool exact = tree.exact();
    std::optional<SureProfitHit> best;
    for (int id : internal_nodes(tree)) {
        const TreeNode& nd = tree.node(id);
        for (int xi : {+1, -1}) {
            bool wins = true;
            bool unit_scalable = true;
            std::vector<double> profits;
            std::optional<Rational> first_q;
            double first_d = 0.0;
            for (std::size_t c = 0; c < nd.children.size() && wins; ++c) {
                const TreeNode& ch = tree.node(nd.children[c]);
                if (exact) {
                    const Rational p = (*ch.price_q - *nd.price_q) * Rational(xi);
                    if (!(p.sign() > 0)) {
                        wins = false;
                        break;
                    }
                    profits.push_back(p.to_double());
                    if (c == 0)
                        first_q = p;
                    else if (!(p == *first_q))
                        unit_scalable = false;
                } else {
                    const double p = xi * (ch.price - nd.price);
                    if (!(p > kPriceTol)) {
                        wins = false;
                        break;
                    }
                    profits.push_back(p);
                    if (c == 0)
                        first_d = p;
                    else if (std::abs(p - first_d) > kPriceTol)
                        unit_scalable = false;
                }
            }
            if (!wins) continue;
            SureProfitHit hit;
            hit.node = id;
            hit.kind = unit_scalable ? ProfitKind::Constant : ProfitKind::Sure;
            if (unit_scalable) {
                // rescale so every child pays exactly 1
                const double p0 = profits[0];
                hit.position = static_cast<double>(xi) / p0;
                for (double& p : profits) p /= p0;
            } else {
                hit.position = static_cast<double>(xi);
            }
            hit.profits = std::move(profits);
            if (hit.kind == ProfitKind::Constant) return hit;  // preferred kind
            if (!best) best = std::move(hit);
        }
    }
    return best;
}

EquivalenceReport verify_equivalence(const std::vector<ScenarioTree>& family, Exec exec) {
    EquivalenceReport rep;
    rep.trees_checked = family.size();
    rep.verdicts.resize(family.size());

    par_for(family.size(), exec, [&](std::size_t i) {
        const ScenarioTree& tree = family[i];
        TreeVerdict v;
        v.tree_index = i;
        const auto findings = detect_predictable_jumps(tree);
        v.has_finding = !findings.empty();
        for (const auto& f : findings)
            if (f.kind == FindingKind::FullyPredictable) v.has_fully = true;
        const auto hit = search_sure_profit(tree);
        v.search_hit = hit.has_value();
        v.search_constant = hit && hit->kind == ProfitKind::Constant;
        v.consistent = v.has_finding == v.search_hit && v.has_fully == v.search_constant;
        rep.verdicts[i] = v;
    });

    for (std::size_t i = 0; i < family.size(); ++i) {
        const TreeVerdict& v = rep.verdicts[i];
        if (v.has_finding) ++rep.trees_with_findings;
        if (v.search_constant) ++rep.trees_with_constant;
        if (!v.consistent) {
            ++rep.mismatches;
            rep.mismatch_trees.push_back(family[i].to_json());
        }
    }
    return rep;
}

std::string equivalence_report_json(const EquivalenceReport& report) {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["trees_checked"] = report.trees_checked;
    j["trees_with_findings"] = report.trees_with_findings;
    j["trees_with_constant"] = report.trees_with_constant;
    j["mismatches"] = report.mismatches;
    j["verdicts"] = nlohmann::json::array();
    for (const auto& v : report.verdicts) {
        j["verdicts"].push_back({{"tree", v.tree_index},
                                 {"has_finding", v.has_finding},
                                 {"has_fully", v.has_fully},
                                 {"search_hit", v.search_hit},
                                 {"search_constant", v.search_constant},
                                 {"consistent", v.consistent}});
    }
    j["mismatch_trees"] = nlohmann::json::array();
    for (const auto& t : report.mismatch_trees) j["mismatch_trees"].push_back(nlohmann::json::parse(t));
    return j.dump(2);
}

namespace {

// One node's feasibility: q_i >= q_min, sum q_i = 1, sum q_i c_i = s.
// Putting the floor q_min on every child leaves mass W = 1 - m*q_min to
// spread; the reachable means then sweep [q_min*sum(c) + W*min(c),
// q_min*sum(c) + W*max(c)] and the solution mixes the two extreme children.

bool solve_node_exact(const ScenarioTree& tree, const TreeNode& nd, NodeMeasure& out,
                      std::string& reason) {
    const Rational q_min(1, 1000000);
    const auto m = static_cast<long long>(nd.children.size());
    const Rational W = Rational(1) - Rational(m) * q_min;
    if (W.sign() < 0) {
        reason = "too many children for the probability floor";
        return false;
    }
    Rational csum(0);
    std::size_t imin = 0, imax = 0;
    std::vector<Rational> c;
    for (std::size_t i = 0; i < nd.children.size(); ++i) {
        c.push_back(*tree.node(nd.children[i]).price_q);
        csum = csum + c.back();
        if (c.back() < c[imin]) imin = i;
        if (c[imax] < c.back()) imax = i;
    }
    const Rational target = *nd.price_q - q_min * csum;
    const Rational lo = W * c[imin];
    const Rational hi = W * c[imax];
    if (target < lo || hi < target) {
        reason = "node price outside the reachable range of child means";
        return false;
    }
    std::vector<Rational> q(nd.children.size(), q_min);
    if (imin == imax) {
        q[imin] = q[imin] + W;  // all children share one price
    } else {
        const Rational lambda = (target - lo) / (hi - lo);
        q[imax] = q[imax] + lambda * W;
        q[imin] = q[imin] + (Rational(1) - lambda) * W;
    }
    for (const Rational& qi : q) {
        out.q.push_back(qi.to_double());
        out.q_exact.push_back(qi.str());
    }
    return true;
}

bool solve_node_double(const ScenarioTree& tree, const TreeNode& nd, NodeMeasure& out,
                       std::string& reason) {
    const double q_min = kMinBranchProb;
    const double m = static_cast<double>(nd.children.size());
    const double W = 1.0 - m * q_min;
    if (W < 0.0) {
        reason = "too many children for the probability floor";
        return false;
    }
    double csum = 0.0;
    std::size_t imin = 0, imax = 0;
    std::vector<double> c;
    for (std::size_t i = 0; i < nd.children.size(); ++i) {
        c.push_back(tree.node(nd.children[i]).price);
        csum += c.back();
        if (c.back() < c[imin]) imin = i;
        if (c.back() > c[imax]) imax = i;
    }
    const double target = nd.price - q_min * csum;
    const double lo = W * c[imin];
    const double hi = W * c[imax];
    if (target < lo - kPriceTol || target > hi + kPriceTol) {
        reason = "node price outside the reachable range of child means";
        return false;
    }
    std::vector<double> q(nd.children.size(), q_min);
    if (hi - lo <= kPriceTol) {
        q[imin] += W;
    } else {
        const double lambda = std::clamp((target - lo) / (hi - lo), 0.0, 1.0);
        q[imax] += lambda * W;
        q[imin] += (1.0 - lambda) * W;
    }
    out.q = std::move(q);
    return true;
}

}  // namespace

MartingaleMeasure find_martingale_measure(const ScenarioTree& tree) {
    tree.validate();
    MartingaleMeasure mm;
    mm.exact = tree.exact();
    mm.feasible = true;
    for (int id : internal_nodes(tree)) {
        const TreeNode& nd = tree.node(id);
        NodeMeasure nmeas;
        nmeas.node = id;
        std::string reason;
        const bool ok = mm.exact ? solve_node_exact(tree, nd, nmeas, reason)
                                 : solve_node_double(tree, nd, nmeas, reason);
        if (!ok) {
            mm.feasible = false;
            mm.blocking_node = id;
            mm.reason = reason;
            mm.nodes.clear();
            return mm;
        }
        mm.nodes.push_back(std::move(nmeas));
    }
    return mm;
}

std::string measure_json(const MartingaleMeasure& measure) {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["feasible"] = measure.feasible;
    j["exact"] = measure.exact;
    if (!measure.feasible) {
        j["blocking_node"] = measure.blocking_node;
        j["reason"] = measure.reason;
    }
    j["nodes"] = nlohmann::json::array();
    for (const auto& nm : measure.nodes) {
        nlohmann::json e;
        e["node"] = nm.node;
        e["q"] = nm.q;
        if (!nm.q_exact.empty()) e["q_exact"] = nm.q_exact;
        j["nodes"].push_back(e);
    }
    return j.dump(2);
}

}  // namespace jumplab
