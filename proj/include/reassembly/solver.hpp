#pragma once

// Solvers for the fragment-to-position assignment. All of them minimize the
// total cost of a path through the assignment tree (see
// evaluate_assignment) and break ties the same way: lower cost first, then
// lower fragment index, then lower position index with skips after every
// position, then earlier generation order.

#include "reassembly/core.hpp"
#include "reassembly/graph.hpp"

#include <chrono>
#include <cstdint>
#include <optional>
#include <string_view>

namespace reassembly {

enum class SolverMethod { Dijkstra, Implicit, MergedDp, Greedy, BruteForce };

std::string_view to_string(SolverMethod method);
/// Accepts the names printed by to_string. nullopt otherwise.
std::optional<SolverMethod> parse_solver_method(std::string_view name);

struct SolverReport {
    Reassembly reassembly;
    Assignment assignment;
    SolverMethod method = SolverMethod::Dijkstra;
    std::uint64_t nodes_expanded = 0;
    std::uint64_t edges_relaxed = 0;
    std::uint64_t candidates_evaluated = 0;  // brute force only
    std::chrono::nanoseconds wall_time{0};
    bool approximate = false;                // greedy, or a bounded beam
    std::optional<std::size_t> beam_width;
};

/// Shortest S-to-T path on a materialized graph.
SolverReport solve_dijkstra(const AssignmentGraph& graph);

struct ImplicitOptions {
    /// Keep only the best `beam_width` partial paths per depth. Unset means
    /// exact uniform-cost search.
    std::optional<std::size_t> beam_width;
    /// Maximum number of tree nodes generated by the exact search.
    std::size_t node_budget = kDefaultNodeBudget;
};

/// Uniform-cost search generating the tree lazily. Same path as
/// solve_dijkstra on the explicit graph. Throws BudgetExceeded when the
/// exact search outgrows its node budget.
SolverReport solve_implicit(const ImplicitGraph& graph, const ImplicitOptions& options = {});

/// Limit on positions for the merged-state solver.
inline constexpr int kMaxMergedPositions = 24;

/// Dynamic programme over (next fragment, set of filled positions): tree
/// nodes reaching the same state share their optimal continuation, so this
/// is exact in O(n 2^p p). Throws DataError for more than 24 positions and
/// BudgetExceeded when the state table would not fit in memory.
SolverReport solve_merged_dp(const CostTable& table);

/// Repeatedly places the globally highest-scoring (fragment, position)
/// pair among those still free. When both skips and empty positions are
/// allowed it stops once the best remaining pair costs more than leaving
/// that fragment out. For an unknown central every candidate is tried and
/// the cheapest result kept.
SolverReport solve_greedy(const CostTable& table);

/// Takes fragments in roster order and gives each its cheapest free
/// position (or the skip when that is cheaper). Matches solve_implicit
/// with a beam width of 1 on known-central puzzles.
SolverReport solve_greedy_in_order(const CostTable& table);

struct BruteForceOptions {
    std::uint64_t candidate_budget = 100'000'000;
};

/// Exhaustive enumeration of every feasible assignment. Throws
/// BudgetExceeded when there are more than `candidate_budget` of them.
SolverReport solve_brute_force(const CostTable& table, const BruteForceOptions& options = {});

/// Number of assignments solve_brute_force would enumerate.
std::uint64_t brute_force_candidates(const CostTable& table);

struct SolveOptions {
    SolverMethod method = SolverMethod::MergedDp;
    CostModel cost;
    std::optional<std::size_t> beam_width;  // Implicit only
    std::size_t node_budget = kDefaultNodeBudget;
};

/// Dispatches to the selected solver. Dijkstra materializes the graph
/// first and so inherits the graph's node budget.
SolverReport solve(const ScoreTensor& scores, const PuzzleSpec& spec, const SolveOptions& options);

}  // namespace reassembly
