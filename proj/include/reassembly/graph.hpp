#pragma once

// Assignment graphs. Every graph runs from a source S to a sink T; depth d
// below S (below the central-choice layer when the central is unknown)
// assigns roster row d to one still-empty position, or to no position via
// a skip edge. Nodes are never merged, so the explicit graphs are trees
// whose sizes are the ones the closed-form counts describe.

#include "reassembly/core.hpp"

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

namespace reassembly {

/// Edge label position of a central-selection edge.
inline constexpr int kCentralChoice = -2;
/// Edge label fragment/position of a terminal edge into T.
inline constexpr int kNoLabel = -3;

inline constexpr std::size_t kDefaultNodeBudget = 10'000'000;

struct GraphNode {
    std::int16_t fragment;  // roster index assigned by the edge into this node, kNoLabel for S and T
    std::int16_t position;  // position label of that edge
    std::int16_t candidate;
    std::uint32_t parent;
};

struct GraphEdge {
    std::uint32_t from;
    std::uint32_t to;
    double weight;
    std::int16_t fragment;
    std::int16_t position;
};

/// Materialized assignment graph with out-edge lists.
class AssignmentGraph {
public:
    static constexpr std::uint32_t kSource = 0;
    static constexpr std::uint32_t kSink = 1;

    std::size_t node_count() const { return nodes_.size(); }
    std::size_t edge_count() const { return edges_.size(); }
    const std::vector<GraphNode>& nodes() const { return nodes_; }
    const std::vector<GraphEdge>& edges() const { return edges_; }
    std::span<const GraphEdge> out_edges(std::uint32_t node) const {
        return std::span<const GraphEdge>(edges_).subspan(first_edge_[node], first_edge_[node + 1] - first_edge_[node]);
    }
    const CostTable& table() const { return *table_; }
    std::shared_ptr<const CostTable> shared_table() const { return table_; }

private:
    friend class GraphBuilder;

    std::shared_ptr<const CostTable> table_;
    std::vector<GraphNode> nodes_;
    std::vector<GraphEdge> edges_;  // grouped by `from`
    std::vector<std::uint32_t> first_edge_;
};

struct BuildOptions {
    std::size_t node_budget = kDefaultNodeBudget;
};

/// Central known, complete puzzle: the permutation tree. Requires as many
/// fragments as positions and no skip or empty-position flags.
AssignmentGraph build_known_central(const ScoreTensor& scores, const PuzzleSpec& spec, const CostModel& model,
                                    const BuildOptions& options = {});

/// Central unknown: S fans out to one zero-weight edge per central
/// candidate, each followed by the permutation tree over the remaining
/// fragments; all subtrees end in the shared T.
AssignmentGraph build_unknown_central(const ScoreTensor& scores, const PuzzleSpec& spec, const CostModel& model,
                                      const BuildOptions& options = {});

/// Incomplete puzzles (known or unknown central): every level also offers a
/// skip edge, which stays available at every depth; a branch ends when all
/// positions are filled or all fragments are used. Throws BudgetExceeded
/// when the tree would exceed the node budget.
AssignmentGraph build_with_empty_positions(const ScoreTensor& scores, const PuzzleSpec& spec,
                                           const CostModel& model, const BuildOptions& options = {});

/// Picks the builder matching the spec's flags.
AssignmentGraph build_graph(const ScoreTensor& scores, const PuzzleSpec& spec, const CostModel& model,
                            const BuildOptions& options = {});

/// Tab-separated edge list: from, to, weight, fragment id, position
/// ("skip", "central", or "-" on terminal edges).
void write_edge_list(std::ostream& out, const AssignmentGraph& graph);

/// State of the lazily expanded graph. The tree node is the state plus the
/// path that led to it; the path is kept by the search, not here.
struct SearchState {
    std::int16_t candidate = -1;  // -1 until the central is chosen
    std::int16_t next_row = 0;
    std::uint32_t used_positions = 0;
    bool sink = false;

    friend bool operator==(const SearchState&, const SearchState&) = default;
};

struct Transition {
    SearchState next;
    double weight;
    int fragment;  // roster index, or kNoLabel on the terminal edge
    int position;  // position, kSkipPosition, kCentralChoice or kNoLabel
};

/// Successor generator over SearchStates describing the same graph the
/// explicit builders materialize, for any combination of spec flags.
class ImplicitGraph {
public:
    ImplicitGraph(const ScoreTensor& scores, const PuzzleSpec& spec, const CostModel& model);

    SearchState source() const;
    /// Appends the out-transitions of `state` to `out`, positions in
    /// ascending order, then the skip edge.
    void successors(const SearchState& state, std::vector<Transition>& out) const;
    const CostTable& table() const { return *table_; }
    std::shared_ptr<const CostTable> shared_table() const { return table_; }

private:
    std::shared_ptr<const CostTable> table_;
    std::uint32_t full_mask_;
};

enum class GraphVariant { KnownCentral, UnknownCentral, EmptyPositions };

struct GraphCounts {
    std::uint64_t nodes = 0;
    std::uint64_t edges = 0;

    friend bool operator==(const GraphCounts&, const GraphCounts&) = default;
};

/// Size of the explicit graph for `n` fragments and `p` positions.
///
/// KnownCentral: closed form, n >= p. For n > p the form counts the tree
/// that fills positions in order from the remaining fragments; the builder
/// only materializes n == p, where both orders give the same size. UnknownCentral: n counts every
/// fragment including the one that becomes central, n - 1 >= p.
/// EmptyPositions (central known, skips and empty positions allowed): exact
/// count by recursion over the tree, memoized on (next fragment, empty
/// positions). Throws BudgetExceeded when a count does not fit 64 bits.
GraphCounts count_graph(GraphVariant variant, int n, int p);

}  // namespace reassembly
