#include "reassembly/solver.hpp"

#include "reassembly/error.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <limits>
#include <numeric>
#include <queue>
#include <tuple>

namespace reassembly {

namespace {

using Clock = std::chrono::steady_clock;
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kLast = std::numeric_limits<int>::max();

// Labels other than a real fragment or position sort after every real one.
int fragment_key(int fragment) { return fragment >= 0 ? fragment : kLast; }
int position_key(int position) { return position >= 0 ? position : kLast; }

struct OrderKey {
    double cost;
    int fragment;
    int position;
    std::uint64_t seq;

    friend bool operator<(const OrderKey& a, const OrderKey& b) {
        return std::tie(a.cost, a.fragment, a.position, a.seq) < std::tie(b.cost, b.fragment, b.position, b.seq);
    }
    friend bool operator>(const OrderKey& a, const OrderKey& b) { return b < a; }
};

using MinHeap = std::priority_queue<OrderKey, std::vector<OrderKey>, std::greater<>>;

struct EdgeLabel {
    int fragment;
    int position;
};

// Labels are in path order from S.
Assignment assignment_from_labels(const CostTable& table, std::span<const EdgeLabel> labels) {
    Assignment a;
    a.position_of_row.assign(static_cast<std::size_t>(table.rows()), kSkipPosition);
    for (const auto& l : labels) {
        if (l.position == kCentralChoice) a.candidate = l.fragment;
    }
    for (const auto& l : labels) {
        if (l.position >= 0) {
            a.position_of_row[static_cast<std::size_t>(table.scores().row_of(a.candidate, l.fragment))] = l.position;
        }
    }
    return a;
}

SolverReport finish(SolverReport report, Assignment assignment, const CostTable& table, Clock::time_point start) {
    report.reassembly = to_reassembly(assignment, table);
    report.assignment = std::move(assignment);
    report.wall_time = std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - start);
    return report;
}

[[noreturn]] void no_solution() {
    throw DataError(DataError::Kind::Validation, "the puzzle has no feasible assignment");
}

}  // namespace

std::string_view to_string(SolverMethod method) {
    switch (method) {
        case SolverMethod::Dijkstra: return "dijkstra";
        case SolverMethod::Implicit: return "implicit";
        case SolverMethod::MergedDp: return "dp";
        case SolverMethod::Greedy: return "greedy";
        case SolverMethod::BruteForce: return "brute";
    }
    return "?";
}

std::optional<SolverMethod> parse_solver_method(std::string_view name) {
    for (auto m : {SolverMethod::Dijkstra, SolverMethod::Implicit, SolverMethod::MergedDp, SolverMethod::Greedy,
                   SolverMethod::BruteForce}) {
        if (to_string(m) == name) return m;
    }
    return std::nullopt;
}

SolverReport solve_dijkstra(const AssignmentGraph& graph) {
    const auto start = Clock::now();
    SolverReport report;
    report.method = SolverMethod::Dijkstra;

    const std::size_t n = graph.node_count();
    std::vector<double> dist(n, kInf);
    std::vector<std::uint32_t> via(n, std::numeric_limits<std::uint32_t>::max());
    std::vector<bool> settled(n, false);
    const auto& edges = graph.edges();

    // Node ids are in preorder, which is the lexicographic order of the
    // label paths, so equal-cost ties settle on the smallest path.
    MinHeap heap;
    dist[AssignmentGraph::kSource] = 0.0;
    heap.push({0.0, 0, 0, AssignmentGraph::kSource});
    while (!heap.empty()) {
        const OrderKey top = heap.top();
        heap.pop();
        const auto u = static_cast<std::uint32_t>(top.seq);
        if (settled[u]) continue;
        settled[u] = true;
        ++report.nodes_expanded;
        if (u == AssignmentGraph::kSink) break;
        for (const GraphEdge& e : graph.out_edges(u)) {
            ++report.edges_relaxed;
            const double d = dist[u] + e.weight;
            if (d < dist[e.to]) {
                dist[e.to] = d;
                via[e.to] = static_cast<std::uint32_t>(&e - edges.data());
                heap.push({d, 0, 0, e.to});
            }
        }
    }
    if (!settled[AssignmentGraph::kSink]) no_solution();

    std::vector<EdgeLabel> labels;
    for (std::uint32_t v = AssignmentGraph::kSink; v != AssignmentGraph::kSource;) {
        const GraphEdge& e = edges[via[v]];
        labels.push_back({e.fragment, e.position});
        v = e.from;
    }
    std::reverse(labels.begin(), labels.end());
    const CostTable& table = graph.table();
    return finish(std::move(report), assignment_from_labels(table, labels), table, start);
}

namespace {

struct TreeNode {
    SearchState state;
    std::uint32_t parent;
    std::int16_t fragment;
    std::int16_t position;
};

std::vector<EdgeLabel> labels_to(const std::vector<TreeNode>& arena, std::uint32_t leaf) {
    std::vector<EdgeLabel> labels;
    for (std::uint32_t v = leaf; v != 0; v = arena[v].parent) labels.push_back({arena[v].fragment, arena[v].position});
    std::reverse(labels.begin(), labels.end());
    return labels;
}

// Siblings are ordered by position, skip and terminal last, and central
// choices by fragment; a prefix sorts before its extensions.
bool path_less(const std::vector<TreeNode>& arena, std::uint32_t a, std::uint32_t b) {
    const auto pa = labels_to(arena, a);
    const auto pb = labels_to(arena, b);
    auto key = [](const EdgeLabel& l) { return std::pair{position_key(l.position), fragment_key(l.fragment)}; };
    return std::lexicographical_compare(pa.begin(), pa.end(), pb.begin(), pb.end(),
                                        [&](const EdgeLabel& x, const EdgeLabel& y) { return key(x) < key(y); });
}

// A partial path that can still reach T.
bool viable(const CostTable& table, const SearchState& s) {
    if (s.sink || s.candidate < 0 || table.empty_allowed()) return true;
    const int open = table.positions() - std::popcount(s.used_positions);
    return table.rows() - s.next_row >= open;
}

SolverReport uniform_cost(const ImplicitGraph& graph, std::size_t budget) {
    const auto start = Clock::now();
    SolverReport report;
    report.method = SolverMethod::Implicit;

    std::vector<TreeNode> arena;
    std::vector<double> cost;
    arena.push_back({graph.source(), 0, kNoLabel, kNoLabel});
    cost.push_back(0.0);
    // Equal costs fall back to comparing the label paths from S, so the
    // first sink popped is the lexicographically smallest optimum.
    auto after = [&](std::uint32_t a, std::uint32_t b) {
        if (cost[a] != cost[b]) return cost[a] > cost[b];
        return path_less(arena, b, a);
    };
    std::priority_queue<std::uint32_t, std::vector<std::uint32_t>, decltype(after)> heap(after);
    heap.push(0);
    std::vector<Transition> next;
    while (!heap.empty()) {
        const auto u = heap.top();
        heap.pop();
        ++report.nodes_expanded;
        if (arena[u].state.sink) {
            const CostTable& table = graph.table();
            return finish(std::move(report), assignment_from_labels(table, labels_to(arena, u)), table, start);
        }
        next.clear();
        graph.successors(arena[u].state, next);
        for (const Transition& t : next) {
            ++report.edges_relaxed;
            if (arena.size() >= budget) {
                throw BudgetExceeded("uniform-cost search exceeded its budget of " + std::to_string(budget) +
                                     " nodes; use a beam width or the merged-state solver");
            }
            const double d = cost[u] + t.weight;
            arena.push_back({t.next, u, static_cast<std::int16_t>(t.fragment), static_cast<std::int16_t>(t.position)});
            cost.push_back(d);
            heap.push(static_cast<std::uint32_t>(arena.size() - 1));
        }
    }
    no_solution();
}

SolverReport beam_search(const ImplicitGraph& graph, std::size_t width) {
    const auto start = Clock::now();
    SolverReport report;
    report.method = SolverMethod::Implicit;
    report.approximate = true;
    report.beam_width = width;
    const CostTable& table = graph.table();

    struct Entry {
        OrderKey key;
        TreeNode node;
    };
    std::vector<TreeNode> arena{{graph.source(), 0, kNoLabel, kNoLabel}};
    std::vector<double> cost{0.0};
    std::vector<std::uint32_t> frontier{0};
    std::optional<std::uint32_t> best_leaf;
    double best_cost = kInf;
    std::vector<Transition> next;
    std::vector<Entry> children;
    std::uint64_t seq = 0;
    while (!frontier.empty()) {
        children.clear();
        for (const auto u : frontier) {
            ++report.nodes_expanded;
            next.clear();
            graph.successors(arena[u].state, next);
            for (const Transition& t : next) {
                ++report.edges_relaxed;
                const double d = cost[u] + t.weight;
                const TreeNode node{t.next, u, static_cast<std::int16_t>(t.fragment),
                                    static_cast<std::int16_t>(t.position)};
                if (t.next.sink) {
                    if (d < best_cost) {
                        arena.push_back(node);
                        cost.push_back(d);
                        best_cost = d;
                        best_leaf = static_cast<std::uint32_t>(arena.size() - 1);
                    }
                    continue;
                }
                if (!viable(table, t.next)) continue;
                children.push_back({{d, fragment_key(t.fragment), position_key(t.position), seq++}, node});
            }
        }
        const std::size_t keep = std::min(width, children.size());
        std::partial_sort(children.begin(), children.begin() + static_cast<std::ptrdiff_t>(keep), children.end(),
                          [](const Entry& a, const Entry& b) { return a.key < b.key; });
        frontier.clear();
        for (std::size_t k = 0; k < keep; ++k) {
            arena.push_back(children[k].node);
            cost.push_back(children[k].key.cost);
            frontier.push_back(static_cast<std::uint32_t>(arena.size() - 1));
        }
    }
    if (!best_leaf) no_solution();
    return finish(std::move(report), assignment_from_labels(table, labels_to(arena, *best_leaf)), table, start);
}

}  // namespace

SolverReport solve_implicit(const ImplicitGraph& graph, const ImplicitOptions& options) {
    if (options.beam_width) {
        if (*options.beam_width == 0) throw DataError(DataError::Kind::Validation, "beam width must be positive");
        return beam_search(graph, *options.beam_width);
    }
    return uniform_cost(graph, options.node_budget);
}

SolverReport solve_merged_dp(const CostTable& table) {
    const auto start = Clock::now();
    SolverReport report;
    report.method = SolverMethod::MergedDp;

    const int p = table.positions();
    const int rows = table.rows();
    if (p > kMaxMergedPositions) {
        throw DataError(DataError::Kind::Validation, "merged-state solver supports at most " +
                                                         std::to_string(kMaxMergedPositions) + " positions");
    }
    const std::size_t masks = std::size_t{1} << p;
    const std::size_t states = masks * static_cast<std::size_t>(rows + 1);
    constexpr std::size_t kMaxStates = std::size_t{1} << 25;
    if (states > kMaxStates) {
        throw BudgetExceeded("merged-state table would need " + std::to_string(states) + " states");
    }
    const std::uint32_t full = static_cast<std::uint32_t>(masks - 1);

    std::vector<double> dist(states);
    std::vector<std::int8_t> choice(states);
    auto at = [masks](int r, std::uint32_t mask) { return static_cast<std::size_t>(r) * masks + mask; };

    std::optional<Assignment> best;
    double best_cost = kInf;
    for (int c = 0; c < table.candidates(); ++c) {
        std::fill(dist.begin(), dist.end(), kInf);
        dist[at(0, 0)] = 0.0;
        for (int r = 0; r < rows; ++r) {
            for (std::uint32_t mask = 0; mask < full; ++mask) {
                const double d = dist[at(r, mask)];
                if (d == kInf) continue;
                ++report.nodes_expanded;
                for (int j = 0; j < p; ++j) {
                    const std::uint32_t bit = std::uint32_t{1} << j;
                    if (mask & bit) continue;
                    ++report.edges_relaxed;
                    const double nd = d + table.place(c, r, j);
                    if (nd < dist[at(r + 1, mask | bit)]) {
                        dist[at(r + 1, mask | bit)] = nd;
                        choice[at(r + 1, mask | bit)] = static_cast<std::int8_t>(j);
                    }
                }
                if (table.skips_allowed()) {
                    ++report.edges_relaxed;
                    const double nd = d + table.skip(c, r);
                    if (nd < dist[at(r + 1, mask)]) {
                        dist[at(r + 1, mask)] = nd;
                        choice[at(r + 1, mask)] = static_cast<std::int8_t>(kSkipPosition);
                    }
                }
            }
        }
        // A path ends when the positions run out, or when the fragments run
        // out if positions may stay empty.
        for (int r = 0; r <= rows; ++r) {
            for (std::uint32_t mask = 0; mask <= full; ++mask) {
                const bool terminal = mask == full || (r == rows && table.empty_allowed());
                if (!terminal || !(dist[at(r, mask)] < best_cost)) continue;
                best_cost = dist[at(r, mask)];
                Assignment a;
                a.candidate = c;
                a.position_of_row.assign(static_cast<std::size_t>(rows), kSkipPosition);
                std::uint32_t m = mask;
                for (int rr = r; rr > 0; --rr) {
                    const int j = choice[at(rr, m)];
                    a.position_of_row[static_cast<std::size_t>(rr - 1)] = j;
                    if (j != kSkipPosition) m ^= std::uint32_t{1} << j;
                }
                best = std::move(a);
            }
        }
    }
    if (!best) no_solution();
    return finish(std::move(report), std::move(*best), table, start);
}

namespace {

template <class PerCandidate>
SolverReport best_over_candidates(const CostTable& table, SolverMethod method, PerCandidate&& per_candidate) {
    const auto start = Clock::now();
    SolverReport report;
    report.method = method;
    report.approximate = true;
    std::optional<Assignment> best;
    double best_cost = kInf;
    for (int c = 0; c < table.candidates(); ++c) {
        Assignment a = per_candidate(c, report);
        const auto totals = evaluate_assignment(a, table);
        if (totals && totals->cost < best_cost) {
            best_cost = totals->cost;
            best = std::move(a);
        }
    }
    if (!best) no_solution();
    return finish(std::move(report), std::move(*best), table, start);
}

}  // namespace

SolverReport solve_greedy(const CostTable& table) {
    const int rows = table.rows();
    const int p = table.positions();
    const bool stop_rule = table.skips_allowed() && table.empty_allowed();
    return best_over_candidates(table, SolverMethod::Greedy, [&](int c, SolverReport& report) {
        Assignment a;
        a.candidate = c;
        a.position_of_row.assign(static_cast<std::size_t>(rows), kSkipPosition);
        std::vector<bool> row_free(static_cast<std::size_t>(rows), true);
        std::vector<bool> position_free(static_cast<std::size_t>(p), true);
        while (true) {
            int best_r = -1;
            int best_j = -1;
            double best_score = -kInf;
            for (int r = 0; r < rows; ++r) {
                if (!row_free[static_cast<std::size_t>(r)]) continue;
                for (int j = 0; j < p; ++j) {
                    if (!position_free[static_cast<std::size_t>(j)]) continue;
                    ++report.edges_relaxed;
                    if (table.score(c, r, j) > best_score) {
                        best_score = table.score(c, r, j);
                        best_r = r;
                        best_j = j;
                    }
                }
            }
            if (best_r < 0) break;
            if (stop_rule && table.place(c, best_r, best_j) > table.skip(c, best_r)) break;
            ++report.nodes_expanded;
            a.position_of_row[static_cast<std::size_t>(best_r)] = best_j;
            row_free[static_cast<std::size_t>(best_r)] = false;
            position_free[static_cast<std::size_t>(best_j)] = false;
        }
        return a;
    });
}

SolverReport solve_greedy_in_order(const CostTable& table) {
    const int rows = table.rows();
    const int p = table.positions();
    return best_over_candidates(table, SolverMethod::Greedy, [&](int c, SolverReport& report) {
        Assignment a;
        a.candidate = c;
        a.position_of_row.assign(static_cast<std::size_t>(rows), kSkipPosition);
        std::uint32_t used = 0;
        int filled = 0;
        for (int r = 0; r < rows && filled < p; ++r) {
            ++report.nodes_expanded;
            int best_j = -1;
            double best_cost = kInf;
            for (int j = 0; j < p; ++j) {
                if (used & (std::uint32_t{1} << j)) continue;
                ++report.edges_relaxed;
                if (table.place(c, r, j) < best_cost) {
                    best_cost = table.place(c, r, j);
                    best_j = j;
                }
            }
            const bool can_skip =
                table.skips_allowed() && (table.empty_allowed() || rows - r - 1 >= p - filled);
            if (can_skip && table.skip(c, r) < best_cost) continue;
            a.position_of_row[static_cast<std::size_t>(r)] = best_j;
            used |= std::uint32_t{1} << best_j;
            ++filled;
        }
        return a;
    });
}

namespace {

struct SizeRange {
    int min;
    int max;
};

// Numbers of placed fragments a feasible assignment can have.
SizeRange placed_range(const CostTable& table) {
    const int rows = table.rows();
    const int p = table.positions();
    if (!table.skips_allowed()) return {rows, rows};
    return {table.empty_allowed() ? 0 : p, std::min(rows, p)};
}

std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b) {
    std::uint64_t out;
    return __builtin_mul_overflow(a, b, &out) ? std::numeric_limits<std::uint64_t>::max() : out;
}

std::uint64_t saturating_add(std::uint64_t a, std::uint64_t b) {
    std::uint64_t out;
    return __builtin_add_overflow(a, b, &out) ? std::numeric_limits<std::uint64_t>::max() : out;
}

std::uint64_t choose(int n, int k) {
    std::uint64_t out = 1;
    for (int i = 1; i <= k; ++i) out = saturating_mul(out, static_cast<std::uint64_t>(n - k + i)) / static_cast<std::uint64_t>(i);
    return out;
}

std::uint64_t arrangements(int n, int k) {
    std::uint64_t out = 1;
    for (int i = 0; i < k; ++i) out = saturating_mul(out, static_cast<std::uint64_t>(n - i));
    return out;
}

}  // namespace

std::uint64_t brute_force_candidates(const CostTable& table) {
    const auto [lo, hi] = placed_range(table);
    std::uint64_t per_candidate = 0;
    for (int k = lo; k <= hi; ++k) {
        per_candidate =
            saturating_add(per_candidate, saturating_mul(choose(table.rows(), k), arrangements(table.positions(), k)));
    }
    return saturating_mul(per_candidate, static_cast<std::uint64_t>(table.candidates()));
}

SolverReport solve_brute_force(const CostTable& table, const BruteForceOptions& options) {
    const auto start = Clock::now();
    const std::uint64_t total = brute_force_candidates(table);
    if (total > options.candidate_budget) {
        throw BudgetExceeded("brute force would enumerate " + std::to_string(total) + " assignments, budget is " +
                             std::to_string(options.candidate_budget));
    }
    if (table.rows() > 30) throw BudgetExceeded("brute force supports at most 30 fragments per candidate");

    SolverReport report;
    report.method = SolverMethod::BruteForce;
    const int rows = table.rows();
    const int p = table.positions();
    const auto [lo, hi] = placed_range(table);

    std::optional<Assignment> best;
    double best_cost = kInf;
    std::vector<int> position_of_row(static_cast<std::size_t>(rows));
    std::vector<int> chosen_rows;
    std::vector<int> perm;
    for (int c = 0; c < table.candidates(); ++c) {
        for (std::uint32_t row_set = 0; row_set < (std::uint32_t{1} << rows); ++row_set) {
            const int k = std::popcount(row_set);
            if (k < lo || k > hi) continue;
            chosen_rows.clear();
            for (int r = 0; r < rows; ++r) {
                if (row_set & (std::uint32_t{1} << r)) chosen_rows.push_back(r);
            }
            for (std::uint32_t position_set = 0; position_set < (std::uint32_t{1} << p); ++position_set) {
                if (std::popcount(position_set) != k) continue;
                perm.clear();
                for (int j = 0; j < p; ++j) {
                    if (position_set & (std::uint32_t{1} << j)) perm.push_back(j);
                }
                do {
                    ++report.candidates_evaluated;
                    std::fill(position_of_row.begin(), position_of_row.end(), kSkipPosition);
                    for (std::size_t i = 0; i < chosen_rows.size(); ++i) {
                        position_of_row[static_cast<std::size_t>(chosen_rows[i])] = perm[i];
                    }
                    double cost = 0.0;
                    int filled = 0;
                    for (int r = 0; r < rows && filled < p; ++r) {
                        const int j = position_of_row[static_cast<std::size_t>(r)];
                        if (j == kSkipPosition) {
                            cost += table.skip(c, r);
                        } else {
                            cost += table.place(c, r, j);
                            ++filled;
                        }
                    }
                    if (cost < best_cost) {
                        best_cost = cost;
                        best = Assignment{c, position_of_row};
                    }
                } while (std::next_permutation(perm.begin(), perm.end()));
            }
        }
    }
    if (!best) no_solution();
    return finish(std::move(report), std::move(*best), table, start);
}

SolverReport solve(const ScoreTensor& scores, const PuzzleSpec& spec, const SolveOptions& options) {
    switch (options.method) {
        case SolverMethod::Dijkstra:
            return solve_dijkstra(build_graph(scores, spec, options.cost, BuildOptions{options.node_budget}));
        case SolverMethod::Implicit:
            return solve_implicit(ImplicitGraph(scores, spec, options.cost),
                                  ImplicitOptions{options.beam_width, options.node_budget});
        case SolverMethod::MergedDp:
            return solve_merged_dp(CostTable(scores, spec, options.cost));
        case SolverMethod::Greedy:
            return solve_greedy(CostTable(scores, spec, options.cost));
        case SolverMethod::BruteForce:
            return solve_brute_force(CostTable(scores, spec, options.cost));
    }
    throw DataError(DataError::Kind::Validation, "unknown solver method");
}

}  // namespace reassembly
