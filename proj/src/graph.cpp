#include "reassembly/graph.hpp"

#include "reassembly/error.hpp"

#include <limits>
#include <map>
#include <ostream>
#include <utility>

namespace reassembly {

namespace {

std::uint64_t checked_add(std::uint64_t a, std::uint64_t b) {
    std::uint64_t out;
    if (__builtin_add_overflow(a, b, &out)) throw BudgetExceeded("graph size does not fit in 64 bits");
    return out;
}

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
    std::uint64_t out;
    if (__builtin_mul_overflow(a, b, &out)) throw BudgetExceeded("graph size does not fit in 64 bits");
    return out;
}

// Nodes strictly below, and edges leaving, a tree node whose next row is
// `row` with `empty` positions still open.
class TreeCounter {
public:
    TreeCounter(int rows, bool skips, bool empty_ok) : rows_(rows), skips_(skips), empty_ok_(empty_ok) {}

    GraphCounts below(int row, int empty) {
        if (empty == 0) return {0, 1};
        if (row == rows_) return {0, empty_ok_ ? 1u : 0u};
        const auto key = std::pair{row, empty};
        if (auto it = memo_.find(key); it != memo_.end()) return it->second;
        GraphCounts total;
        const GraphCounts placed = below(row + 1, empty - 1);
        total.nodes = checked_mul(static_cast<std::uint64_t>(empty), checked_add(1, placed.nodes));
        total.edges = checked_mul(static_cast<std::uint64_t>(empty), checked_add(1, placed.edges));
        if (skips_) {
            const GraphCounts skipped = below(row + 1, empty);
            total.nodes = checked_add(total.nodes, checked_add(1, skipped.nodes));
            total.edges = checked_add(total.edges, checked_add(1, skipped.edges));
        }
        memo_.emplace(key, total);
        return total;
    }

private:
    int rows_;
    bool skips_;
    bool empty_ok_;
    std::map<std::pair<int, int>, GraphCounts> memo_;
};

// S and T plus, per candidate, an optional central-choice node and its tree.
GraphCounts count_tree(int candidates, bool central_layer, int rows, int positions, bool skips, bool empty_ok) {
    const GraphCounts sub = TreeCounter(rows, skips, empty_ok).below(0, positions);
    if (!central_layer) return {checked_add(2, sub.nodes), sub.edges};
    const auto c = static_cast<std::uint64_t>(candidates);
    return {checked_add(2, checked_mul(c, checked_add(1, sub.nodes))), checked_mul(c, checked_add(1, sub.edges))};
}

GraphCounts count_known_closed_form(int n, int p) {
    // Level k of the permutation tree holds n!/(n-k)! nodes.
    std::uint64_t level = 1;
    std::uint64_t inner = 0;
    for (int k = 1; k <= p; ++k) {
        level = checked_mul(level, static_cast<std::uint64_t>(n - k + 1));
        inner = checked_add(inner, level);
    }
    return {checked_add(2, inner), checked_add(level, inner)};
}

void check_sizes(const PuzzleSpec& spec) {
    if (spec.num_positions > 31) {
        throw DataError(DataError::Kind::Validation, "at most 31 positions are supported by the assignment graph");
    }
    if (spec.fragment_ids.size() > static_cast<std::size_t>(std::numeric_limits<std::int16_t>::max())) {
        throw DataError(DataError::Kind::Validation, "too many fragments for the assignment graph");
    }
}

}  // namespace

GraphCounts count_graph(GraphVariant variant, int n, int p) {
    if (n < 0 || p < 1) throw DataError(DataError::Kind::Validation, "graph counts need n >= 0 and p >= 1");
    switch (variant) {
        case GraphVariant::KnownCentral:
            if (n < p) throw DataError(DataError::Kind::Validation, "known-central count needs n >= p");
            return count_known_closed_form(n, p);
        case GraphVariant::UnknownCentral: {
            if (n - 1 < p) throw DataError(DataError::Kind::Validation, "unknown-central count needs n - 1 >= p");
            const GraphCounts sub = count_known_closed_form(n - 1, p);
            const auto c = static_cast<std::uint64_t>(n);
            return {checked_add(2, checked_mul(c, checked_add(1, sub.nodes - 2))),
                    checked_mul(c, checked_add(1, sub.edges))};
        }
        case GraphVariant::EmptyPositions:
            return count_tree(1, false, n, p, true, true);
    }
    return {};
}

class GraphBuilder {
public:
    GraphBuilder(std::shared_ptr<const CostTable> table, const BuildOptions& options)
        : table_(std::move(table)), budget_(options.node_budget) {}

    AssignmentGraph build() {
        const CostTable& t = *table_;
        const bool central_layer = !t.spec().central_known;
        const GraphCounts expected =
            count_tree(t.candidates(), central_layer, t.rows(), t.positions(), t.skips_allowed(), t.empty_allowed());
        if (expected.nodes > budget_ || expected.nodes > std::numeric_limits<std::uint32_t>::max()) {
            throw BudgetExceeded("explicit graph would have " + std::to_string(expected.nodes) +
                                 " nodes, budget is " + std::to_string(budget_) +
                                 "; use the implicit or merged-state solver");
        }
        full_mask_ = (std::uint32_t{1} << t.positions()) - 1;
        graph_.table_ = table_;
        graph_.nodes_.reserve(expected.nodes);
        edges_.reserve(expected.edges);
        add_node(kNoLabel, kNoLabel, -1, 0);  // S
        add_node(kNoLabel, kNoLabel, -1, 0);  // T
        if (central_layer) {
            for (int c = 0; c < t.candidates(); ++c) {
                const auto node = add_node(c, kCentralChoice, c, AssignmentGraph::kSource);
                add_edge(AssignmentGraph::kSource, node, 0.0, c, kCentralChoice);
                expand(node, c, 0, 0);
            }
        } else {
            expand(AssignmentGraph::kSource, 0, 0, 0);
        }
        group_edges();
        return std::move(graph_);
    }

private:
    std::uint32_t add_node(int fragment, int position, int candidate, std::uint32_t parent) {
        graph_.nodes_.push_back({static_cast<std::int16_t>(fragment), static_cast<std::int16_t>(position),
                                 static_cast<std::int16_t>(candidate), parent});
        return static_cast<std::uint32_t>(graph_.nodes_.size() - 1);
    }

    void add_edge(std::uint32_t from, std::uint32_t to, double weight, int fragment, int position) {
        edges_.push_back({from, to, weight, static_cast<std::int16_t>(fragment), static_cast<std::int16_t>(position)});
    }

    void expand(std::uint32_t node, int candidate, int row, std::uint32_t used) {
        const CostTable& t = *table_;
        if (used == full_mask_ || row == t.rows()) {
            if (used == full_mask_ || t.empty_allowed()) add_edge(node, AssignmentGraph::kSink, 0.0, kNoLabel, kNoLabel);
            return;
        }
        const int fragment = t.scores().fragment_of(candidate, row);
        for (int j = 0; j < t.positions(); ++j) {
            if (used & (std::uint32_t{1} << j)) continue;
            const auto child = add_node(fragment, j, candidate, node);
            add_edge(node, child, t.place(candidate, row, j), fragment, j);
            expand(child, candidate, row + 1, used | (std::uint32_t{1} << j));
        }
        if (t.skips_allowed()) {
            const auto child = add_node(fragment, kSkipPosition, candidate, node);
            add_edge(node, child, t.skip(candidate, row), fragment, kSkipPosition);
            expand(child, candidate, row + 1, used);
        }
    }

    // Stable counting sort by source node, so each node's out-edges keep
    // their generation order.
    void group_edges() {
        const std::size_t n = graph_.nodes_.size();
        auto& first = graph_.first_edge_;
        first.assign(n + 1, 0);
        for (const auto& e : edges_) ++first[e.from + 1];
        for (std::size_t k = 0; k < n; ++k) first[k + 1] += first[k];
        std::vector<std::uint32_t> cursor(first.begin(), first.end() - 1);
        graph_.edges_.resize(edges_.size());
        for (const auto& e : edges_) graph_.edges_[cursor[e.from]++] = e;
        edges_.clear();
        edges_.shrink_to_fit();
    }

    std::shared_ptr<const CostTable> table_;
    std::size_t budget_;
    std::uint32_t full_mask_ = 0;
    AssignmentGraph graph_;
    std::vector<GraphEdge> edges_;
};

namespace {

AssignmentGraph build_checked(const ScoreTensor& scores, const PuzzleSpec& spec, const CostModel& model,
                              const BuildOptions& options) {
    check_sizes(spec);
    return GraphBuilder(std::make_shared<const CostTable>(scores, spec, model), options).build();
}

void require_complete(const PuzzleSpec& spec, const char* builder) {
    if (spec.skips_allowed() || spec.allow_empty_positions || spec.assignable_count() != spec.num_positions) {
        throw DataError(DataError::Kind::Validation,
                        std::string(builder) +
                            " needs a complete puzzle (as many fragments as positions, no skips or empty "
                            "positions); use build_with_empty_positions");
    }
}

}  // namespace

AssignmentGraph build_known_central(const ScoreTensor& scores, const PuzzleSpec& spec, const CostModel& model,
                                    const BuildOptions& options) {
    if (!spec.central_known) {
        throw DataError(DataError::Kind::Validation, "build_known_central called on an unknown-central puzzle");
    }
    require_complete(spec, "build_known_central");
    return build_checked(scores, spec, model, options);
}

AssignmentGraph build_unknown_central(const ScoreTensor& scores, const PuzzleSpec& spec, const CostModel& model,
                                      const BuildOptions& options) {
    if (spec.central_known) {
        throw DataError(DataError::Kind::Validation, "build_unknown_central called on a known-central puzzle");
    }
    require_complete(spec, "build_unknown_central");
    return build_checked(scores, spec, model, options);
}

AssignmentGraph build_with_empty_positions(const ScoreTensor& scores, const PuzzleSpec& spec,
                                           const CostModel& model, const BuildOptions& options) {
    return build_checked(scores, spec, model, options);
}

AssignmentGraph build_graph(const ScoreTensor& scores, const PuzzleSpec& spec, const CostModel& model,
                            const BuildOptions& options) {
    const bool complete = !spec.skips_allowed() && !spec.allow_empty_positions &&
                          spec.assignable_count() == spec.num_positions;
    if (!complete) return build_with_empty_positions(scores, spec, model, options);
    return spec.central_known ? build_known_central(scores, spec, model, options)
                              : build_unknown_central(scores, spec, model, options);
}

void write_edge_list(std::ostream& out, const AssignmentGraph& graph) {
    const auto& ids = graph.table().spec().fragment_ids;
    const auto old_precision = out.precision(17);
    for (const auto& e : graph.edges()) {
        out << e.from << '\t' << e.to << '\t' << e.weight << '\t';
        out << (e.fragment >= 0 ? ids[static_cast<std::size_t>(e.fragment)] : std::string("-")) << '\t';
        if (e.position >= 0) {
            out << e.position;
        } else if (e.position == kSkipPosition) {
            out << "skip";
        } else if (e.position == kCentralChoice) {
            out << "central";
        } else {
            out << '-';
        }
        out << '\n';
    }
    out.precision(old_precision);
}

ImplicitGraph::ImplicitGraph(const ScoreTensor& scores, const PuzzleSpec& spec, const CostModel& model) {
    check_sizes(spec);
    table_ = std::make_shared<const CostTable>(scores, spec, model);
    full_mask_ = (std::uint32_t{1} << table_->positions()) - 1;
}

SearchState ImplicitGraph::source() const {
    SearchState s;
    if (table_->spec().central_known) s.candidate = 0;
    return s;
}

void ImplicitGraph::successors(const SearchState& state, std::vector<Transition>& out) const {
    const CostTable& t = *table_;
    if (state.sink) return;
    if (state.candidate < 0) {
        for (int c = 0; c < t.candidates(); ++c) {
            SearchState next;
            next.candidate = static_cast<std::int16_t>(c);
            out.push_back({next, 0.0, c, kCentralChoice});
        }
        return;
    }
    const int c = state.candidate;
    const std::uint32_t used = state.used_positions;
    if (used == full_mask_ || state.next_row == t.rows()) {
        if (used == full_mask_ || t.empty_allowed()) {
            SearchState sink;
            sink.sink = true;
            out.push_back({sink, 0.0, kNoLabel, kNoLabel});
        }
        return;
    }
    const int row = state.next_row;
    const int fragment = t.scores().fragment_of(c, row);
    SearchState next = state;
    next.next_row = static_cast<std::int16_t>(row + 1);
    for (int j = 0; j < t.positions(); ++j) {
        const std::uint32_t bit = std::uint32_t{1} << j;
        if (used & bit) continue;
        next.used_positions = used | bit;
        out.push_back({next, t.place(c, row, j), fragment, j});
    }
    if (t.skips_allowed()) {
        next.used_positions = used;
        out.push_back({next, t.skip(c, row), fragment, kSkipPosition});
    }
}

}  // namespace reassembly
