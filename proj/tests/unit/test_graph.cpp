#include "reassembly/error.hpp"
#include "reassembly/graph.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <functional>
#include <random>
#include <sstream>

using namespace reassembly;
using test_support::random_instance;

namespace {

// Independent tree size: every node is a distinct label prefix, so count
// the prefixes directly. `rows` fragments per candidate, `p` positions.
GraphCounts prefix_count(int candidates, bool central_layer, int rows, int p, bool skips, bool empty_ok) {
    GraphCounts total{2, 0};
    std::function<void(int, int)> walk = [&](int row, int empty) {
        if (empty == 0 || row == rows) {
            if (empty == 0 || empty_ok) ++total.edges;
            return;
        }
        for (int j = 0; j < empty; ++j) {
            ++total.nodes;
            ++total.edges;
            walk(row + 1, empty - 1);
        }
        if (skips) {
            ++total.nodes;
            ++total.edges;
            walk(row + 1, empty);
        }
    };
    for (int c = 0; c < candidates; ++c) {
        if (central_layer) {
            ++total.nodes;
            ++total.edges;
        }
        walk(0, p);
    }
    return total;
}

test_support::Instance instance(int n, int p, bool known, bool empty, std::uint64_t seed = 1) {
    std::mt19937_64 rng(seed);
    return random_instance(rng, n, p, known, empty, empty);
}

}  // namespace

TEST_CASE("closed-form counts for 3x3 puzzle sizes") {
    CHECK(count_graph(GraphVariant::KnownCentral, 8, 8) == GraphCounts{109'602, 149'920});
    CHECK(count_graph(GraphVariant::KnownCentral, 2, 2) == GraphCounts{6, 6});
    CHECK(count_graph(GraphVariant::KnownCentral, 1, 1) == GraphCounts{3, 2});
    CHECK(count_graph(GraphVariant::UnknownCentral, 9, 8) == GraphCounts{986'411, 1'349'289});
    CHECK(count_graph(GraphVariant::EmptyPositions, 1, 1) == GraphCounts{4, 4});
    CHECK(count_graph(GraphVariant::EmptyPositions, 2, 2) == GraphCounts{12, 17});
}

TEST_CASE("closed-form counts agree with prefix enumeration") {
    for (int n = 1; n <= 7; ++n) {
        for (int p = 1; p <= n; ++p) {
            CAPTURE(n);
            CAPTURE(p);
            // The closed form fills positions in order from the remaining
            // fragments; with n == p that is the same tree as assigning rows.
            CHECK(count_graph(GraphVariant::KnownCentral, n, p) == prefix_count(1, false, p, n, false, true));
            CHECK(count_graph(GraphVariant::UnknownCentral, n + 1, p) ==
                  prefix_count(n + 1, true, p, n, false, true));
            if (n == p) {
                CHECK(count_graph(GraphVariant::KnownCentral, n, p) == prefix_count(1, false, n, p, false, false));
            }
            CHECK(count_graph(GraphVariant::EmptyPositions, n, p) == prefix_count(1, false, n, p, true, true));
            CHECK(count_graph(GraphVariant::EmptyPositions, p, n) == prefix_count(1, false, p, n, true, true));
        }
    }
}

TEST_CASE("materialized graphs have exactly the counted size") {
    for (int n = 1; n <= 6; ++n) {
        CAPTURE(n);
        const auto known = instance(n, n, true, false);
        const auto g = build_known_central(known.scores, known.spec, CostModel{});
        CHECK(GraphCounts{g.node_count(), g.edge_count()} == count_graph(GraphVariant::KnownCentral, n, n));

        const auto unknown = instance(n + 1, n, false, false);
        const auto u = build_unknown_central(unknown.scores, unknown.spec, CostModel{});
        CHECK(GraphCounts{u.node_count(), u.edge_count()} == count_graph(GraphVariant::UnknownCentral, n + 1, n));

        for (int p = 1; p <= 6; ++p) {
            CAPTURE(p);
            const auto empty = instance(n, p, true, true);
            const auto e = build_with_empty_positions(empty.scores, empty.spec, CostModel{});
            CHECK(GraphCounts{e.node_count(), e.edge_count()} == count_graph(GraphVariant::EmptyPositions, n, p));
        }
    }
}

TEST_CASE("count overflow is reported instead of wrapping") {
    CHECK_THROWS_AS(count_graph(GraphVariant::KnownCentral, 30, 30), BudgetExceeded);
    CHECK_THROWS_AS(count_graph(GraphVariant::KnownCentral, 3, 4), DataError);
}

TEST_CASE("graph structure: tree edges point away from S, weights come from the cost table") {
    for (const bool known : {true, false}) {
        CAPTURE(known);
        const auto in = known ? instance(4, 4, true, false, 3) : instance(5, 4, false, false, 3);
        const AssignmentGraph g = build_graph(in.scores, in.spec, CostModel{});
        const CostTable& t = g.table();
        std::vector<int> in_degree(g.node_count(), 0);
        for (std::uint32_t u = 0; u < g.node_count(); ++u) {
            for (const GraphEdge& e : g.out_edges(u)) {
                CHECK(e.from == u);
                CHECK(e.weight >= 0.0);
                ++in_degree[e.to];
                if (e.to == AssignmentGraph::kSink) {
                    CHECK(e.weight == 0.0);
                    continue;
                }
                CHECK(e.to > e.from);  // preorder ids: acyclic
                const GraphNode& child = g.nodes()[e.to];
                CHECK(child.parent == u);
                CHECK(child.fragment == e.fragment);
                CHECK(child.position == e.position);
                if (e.position == kCentralChoice) {
                    CHECK(e.weight == 0.0);
                } else {
                    const int row = t.scores().row_of(child.candidate, e.fragment);
                    CHECK(e.weight == t.place(child.candidate, row, e.position));
                }
            }
        }
        for (std::uint32_t v = 2; v < g.node_count(); ++v) CHECK(in_degree[v] == 1);
        CHECK(in_degree[AssignmentGraph::kSource] == 0);
        for (std::uint32_t v = 0; v < g.node_count(); ++v) {
            if (v != AssignmentGraph::kSink) CHECK_FALSE(g.out_edges(v).empty());
        }
    }
}

TEST_CASE("level d assigns fragment d") {
    const auto in = instance(5, 5, true, false, 4);
    const AssignmentGraph g = build_known_central(in.scores, in.spec, CostModel{});
    std::vector<int> depth(g.node_count(), 0);
    for (std::uint32_t v = 2; v < g.node_count(); ++v) {
        depth[v] = depth[g.nodes()[v].parent] + 1;
        CHECK(g.nodes()[v].fragment == depth[v] - 1);
    }
}

TEST_CASE("skip edges are priced by the skip cost") {
    const auto in = instance(3, 3, true, true, 5);
    const AssignmentGraph g = build_with_empty_positions(in.scores, in.spec, CostModel{});
    int skips = 0;
    for (const GraphEdge& e : g.edges()) {
        if (e.position != kSkipPosition) continue;
        ++skips;
        CHECK(e.weight == g.table().skip(0, e.fragment));
    }
    CHECK(skips > 0);
}

TEST_CASE("builders refuse specs they do not describe") {
    const auto surplus = instance(9, 8, true, false);
    CHECK_THROWS_AS(build_known_central(surplus.scores, surplus.spec, CostModel{}), DataError);
    const auto empty = instance(8, 8, true, true);
    CHECK_THROWS_AS(build_known_central(empty.scores, empty.spec, CostModel{}), DataError);
    const auto known = instance(8, 8, true, false);
    CHECK_THROWS_AS(build_unknown_central(known.scores, known.spec, CostModel{}), DataError);
}

TEST_CASE("explicit builds beyond the node budget are refused") {
    const auto big = instance(10, 8, true, true);
    CHECK_THROWS_AS(build_with_empty_positions(big.scores, big.spec, CostModel{}), BudgetExceeded);
    const auto small = instance(4, 4, true, false);
    CHECK_THROWS_AS(build_known_central(small.scores, small.spec, CostModel{}, BuildOptions{10}), BudgetExceeded);
}

TEST_CASE("the implicit graph generates the same tree as the explicit one") {
    struct Case {
        int n, p;
        bool known, empty;
    };
    for (const Case c : {Case{4, 4, true, false}, Case{5, 4, false, false}, Case{4, 3, true, true},
                         Case{3, 4, true, true}, Case{4, 3, false, true}, Case{5, 3, true, false}}) {
        CAPTURE(c.n);
        CAPTURE(c.p);
        CAPTURE(c.known);
        CAPTURE(c.empty);
        const auto in = instance(c.n, c.p, c.known, c.empty, 6);
        const AssignmentGraph g = build_graph(in.scores, in.spec, CostModel{});
        const ImplicitGraph lazy(in.scores, in.spec, CostModel{});
        std::size_t visited = 0;
        std::function<void(std::uint32_t, const SearchState&)> compare = [&](std::uint32_t u, const SearchState& s) {
            ++visited;
            std::vector<Transition> next;
            lazy.successors(s, next);
            const auto edges = g.out_edges(u);
            REQUIRE(next.size() == edges.size());
            for (std::size_t k = 0; k < next.size(); ++k) {
                CHECK(next[k].weight == edges[k].weight);
                CHECK(next[k].fragment == edges[k].fragment);
                CHECK(next[k].position == edges[k].position);
                CHECK(next[k].next.sink == (edges[k].to == AssignmentGraph::kSink));
                if (!next[k].next.sink) compare(edges[k].to, next[k].next);
            }
        };
        compare(AssignmentGraph::kSource, lazy.source());
        CHECK(visited == g.node_count() - 1);  // every node but T
    }
}

TEST_CASE("search states track filled positions") {
    const auto in = instance(3, 3, true, true, 8);
    const ImplicitGraph lazy(in.scores, in.spec, CostModel{});
    std::vector<Transition> next;
    lazy.successors(lazy.source(), next);
    REQUIRE(next.size() == 4);  // three positions and the skip
    for (const auto& t : next) {
        CHECK(t.next.next_row == 1);
        CHECK(std::popcount(t.next.used_positions) <= t.next.next_row);
    }
    CHECK(next[3].position == kSkipPosition);
    CHECK(next[3].next.used_positions == 0);
}

TEST_CASE("edge list dump has one labelled line per edge") {
    const auto in = instance(2, 2, true, true, 9);
    const AssignmentGraph g = build_with_empty_positions(in.scores, in.spec, CostModel{});
    std::ostringstream out;
    write_edge_list(out, g);
    std::istringstream lines(out.str());
    std::string line;
    std::size_t count = 0;
    bool saw_skip = false;
    bool saw_terminal = false;
    while (std::getline(lines, line)) {
        ++count;
        CHECK(std::count(line.begin(), line.end(), '\t') == 4);
        saw_skip = saw_skip || line.ends_with("\tskip");
        saw_terminal = saw_terminal || line.ends_with("\t-\t-");
    }
    CHECK(count == g.edge_count());
    CHECK(saw_skip);
    CHECK(saw_terminal);
}
