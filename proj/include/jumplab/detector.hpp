#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "jumplab/parallel.hpp"
#include "jumplab/scenario_tree.hpp"

namespace jumplab {

// Branch probabilities below this floor do not count as strictly positive.
inline constexpr double kMinBranchProb = 1e-6;

// ---- predictable-jump detection ----

enum class FindingKind { DirectionPredictable, FullyPredictable };

// A node all of whose one-step price changes are nonzero: the move at the next
// date is certain given the node, i.e. the jump is announced one step ahead.
// Direction: the changes share one sign.  Fully: they are all equal.
struct JumpFinding {
    int node = -1;
    FindingKind kind = FindingKind::DirectionPredictable;
    std::vector<double> changes;  // per child, child order
};

std::vector<JumpFinding> detect_predictable_jumps(const ScenarioTree& tree);

// ---- exhaustive one-period strategy search ----

enum class ProfitKind { Sure, Constant };

struct SureProfitHit {
    int node = -1;
    double position = 0.0;  // the sign scanned, rescaled to 1/change for constant hits
    ProfitKind kind = ProfitKind::Sure;
    std::vector<double> profits;  // position * change, per child
};

// Scans every node and both trade directions for a one-period strategy whose
// profit is strictly positive on every child.  Constant hits (profit
// rescalable to exactly 1 on every child) are preferred when both exist.
std::optional<SureProfitHit> search_sure_profit(const ScenarioTree& tree);

// ---- equivalence of the two characterizations ----

struct TreeVerdict {
    std::size_t tree_index = 0;
    bool has_finding = false;
    bool has_fully = false;
    bool search_hit = false;
    bool search_constant = false;
    bool consistent = true;
};

struct EquivalenceReport {
    std::size_t trees_checked = 0;
    std::size_t trees_with_findings = 0;
    std::size_t trees_with_constant = 0;
    std::size_t mismatches = 0;
    std::vector<TreeVerdict> verdicts;          // one per tree, family order
    std::vector<std::string> mismatch_trees;    // full JSON of every inconsistent tree
};

// Per tree: a detector finding exists iff the strategy search succeeds, and a
// fully-predictable finding exists iff the search can lock a constant profit.
EquivalenceReport verify_equivalence(const std::vector<ScenarioTree>& family,
                                     Exec exec = Exec::Parallel);

std::string equivalence_report_json(const EquivalenceReport& report);

// ---- martingale-measure feasibility ----

struct NodeMeasure {
    int node = -1;
    std::vector<double> q;              // branch probabilities, child order
    std::vector<std::string> q_exact;   // "num/den" strings when solved exactly
};

struct MartingaleMeasure {
    bool feasible = false;
    bool exact = false;                 // solved in rational arithmetic
    std::vector<NodeMeasure> nodes;     // internal nodes only
    int blocking_node = -1;             // certificate when infeasible
    std::string reason;
};

// Per-node linear feasibility: branch probabilities q >= kMinBranchProb
// summing to 1 with  sum q_i * child_i = node price.  Exact rational solve
// when the tree carries exact values, floating point within 1e-9 otherwise.
MartingaleMeasure find_martingale_measure(const ScenarioTree& tree);

std::string measure_json(const MartingaleMeasure& measure);

}  // namespace jumplab
