#include "reassembly/error.hpp"
#include "reassembly/solver.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <random>

using namespace reassembly;
using test_support::random_instance;
using test_support::reference_optimum;

namespace {

struct Shape {
    int n;
    int p;
    bool known;
    bool empty;
};

const Shape kShapes[] = {
    {5, 5, true, false}, {6, 5, false, false}, {4, 5, true, true}, {6, 5, true, true},
    {6, 4, true, false}, {5, 4, false, true},  {3, 3, true, true}, {1, 1, true, false},
};

std::vector<SolverReport> exact_reports(const test_support::Instance& in, const CostModel& model) {
    const CostTable table(in.scores, in.spec, model);
    return {
        solve_dijkstra(build_graph(in.scores, in.spec, model)),
        solve_implicit(ImplicitGraph(in.scores, in.spec, model)),
        solve_merged_dp(table),
        solve_brute_force(table),
    };
}

}  // namespace

TEST_CASE("exact solvers reach the reference optimum") {
    std::mt19937_64 rng(21);
    for (const Shape s : kShapes) {
        for (const auto mode : {CostMode::OneMinusP, CostMode::NegLogP}) {
            for (int trial = 0; trial < 8; ++trial) {
                CAPTURE(s.n);
                CAPTURE(s.p);
                CAPTURE(s.known);
                CAPTURE(s.empty);
                const auto in = random_instance(rng, s.n, s.p, s.known, s.empty, trial % 2 == 0);
                CostModel model;
                model.mode = mode;
                const auto ref = reference_optimum(CostTable(in.scores, in.spec, model));
                for (const SolverReport& r : exact_reports(in, model)) {
                    CAPTURE(to_string(r.method));
                    CHECK(r.reassembly.total_cost == doctest::Approx(ref.cost).epsilon(1e-12));
                    CHECK(validate(r.reassembly, in.spec).empty());
                    CHECK_FALSE(r.approximate);
                    const auto totals = evaluate_assignment(r.assignment, CostTable(in.scores, in.spec, model));
                    REQUIRE(totals);
                    CHECK(totals->cost == r.reassembly.total_cost);
                }
            }
        }
    }
}

TEST_CASE("Dijkstra and uniform-cost search report the exact path cost") {
    std::mt19937_64 rng(5);
    const auto in = random_instance(rng, 6, 6, true);
    const AssignmentGraph g = build_graph(in.scores, in.spec, CostModel{});
    const SolverReport explicit_run = solve_dijkstra(g);
    const SolverReport lazy_run = solve_implicit(ImplicitGraph(in.scores, in.spec, CostModel{}));
    CHECK(explicit_run.reassembly.total_cost == lazy_run.reassembly.total_cost);
    CHECK(explicit_run.nodes_expanded > 0);
    CHECK(explicit_run.nodes_expanded <= g.node_count());
    CHECK(lazy_run.edges_relaxed > 0);
}

TEST_CASE("ties resolve to the lowest fragment and position") {
    PuzzleSpec spec;
    spec.num_positions = 4;
    spec.fragment_ids = test_support::ids(4);
    ScoreTensor flat(TensorVariant::KnownCentral, spec.fragment_ids, 4);
    std::fill(flat.values().begin(), flat.values().end(), 0.5);
    const CostTable table(flat, spec, CostModel{});
    const Assignment identity{0, {0, 1, 2, 3}};
    CHECK(solve_dijkstra(build_graph(flat, spec, CostModel{})).assignment == identity);
    CHECK(solve_implicit(ImplicitGraph(flat, spec, CostModel{})).assignment == identity);
    CHECK(solve_merged_dp(table).assignment == identity);
    CHECK(solve_brute_force(table).assignment == identity);
    CHECK(solve_greedy(table).assignment == identity);
    CHECK(solve_greedy_in_order(table).assignment == identity);
}

TEST_CASE("greedy witness: the best pair first loses to the assignment") {
    PuzzleSpec spec;
    spec.num_positions = 2;
    spec.fragment_ids = {"a", "b"};
    ScoreTensor t(TensorVariant::KnownCentral, spec.fragment_ids, 2);
    t.p(0, 0, 0) = 0.9;
    t.p(0, 0, 1) = 0.8;
    t.p(0, 1, 0) = 0.85;
    t.p(0, 1, 1) = 0.1;
    const CostTable table(t, spec, CostModel{});
    const SolverReport greedy = solve_greedy(table);
    CHECK(greedy.reassembly.total_score == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(greedy.approximate);
    for (const SolverReport& r : exact_reports({spec, t}, CostModel{})) {
        CHECK(r.reassembly.total_score == doctest::Approx(1.65).epsilon(1e-15));
        CHECK(r.reassembly.placements.at(0) == "b");
        CHECK(r.reassembly.placements.at(1) == "a");
    }
}

TEST_CASE("greedy never beats the optimum and its result is feasible") {
    std::mt19937_64 rng(8);
    for (const Shape s : kShapes) {
        for (int trial = 0; trial < 10; ++trial) {
            const auto in = random_instance(rng, s.n, s.p, s.known, s.empty, true);
            const CostTable table(in.scores, in.spec, CostModel{});
            const SolverReport greedy = solve_greedy(table);
            const SolverReport optimum = solve_merged_dp(table);
            CHECK(greedy.reassembly.total_cost >= optimum.reassembly.total_cost - 1e-12);
            CHECK(validate(greedy.reassembly, in.spec).empty());
            if (!s.empty && s.n == s.p) {
                CHECK(greedy.reassembly.total_score <= optimum.reassembly.total_score + 1e-12);
            }
        }
    }
}

TEST_CASE("greedy stops when a placement costs more than the skip") {
    PuzzleSpec spec;
    spec.num_positions = 2;
    spec.fragment_ids = {"a", "b"};
    spec.allow_empty_positions = spec.allow_unused_fragments = true;
    ScoreTensor t(TensorVariant::KnownCentral, spec.fragment_ids, 2);
    t.p(0, 0, 0) = 0.9;
    t.p(0, 1, 1) = 0.2;  // 0.8 cost against a skip at 0.5
    const CostTable table(t, spec, CostModel{});
    const Reassembly r = solve_greedy(table).reassembly;
    CHECK(r.placements.size() == 1);
    CHECK(r.placements.at(0) == "a");
    CHECK(r.unused == std::set<FragmentId>{"b"});
}

TEST_CASE("a beam of width 1 follows fragments in order") {
    std::mt19937_64 rng(13);
    for (const Shape s : kShapes) {
        if (!s.known) continue;
        for (int trial = 0; trial < 10; ++trial) {
            const auto in = random_instance(rng, s.n, s.p, true, s.empty, trial % 2 == 1);
            const SolverReport beam =
                solve_implicit(ImplicitGraph(in.scores, in.spec, CostModel{}), ImplicitOptions{std::size_t{1}});
            const SolverReport greedy = solve_greedy_in_order(CostTable(in.scores, in.spec, CostModel{}));
            CHECK(beam.assignment == greedy.assignment);
            CHECK(beam.approximate);
            CHECK(beam.beam_width == std::optional<std::size_t>{1});
        }
    }
}

TEST_CASE("a beam wide enough to keep every node is exact") {
    std::mt19937_64 rng(14);
    for (const Shape s : kShapes) {
        const auto in = random_instance(rng, s.n, s.p, s.known, s.empty, true);
        const SolverReport wide =
            solve_implicit(ImplicitGraph(in.scores, in.spec, CostModel{}), ImplicitOptions{std::size_t{1} << 20});
        const SolverReport dp = solve_merged_dp(CostTable(in.scores, in.spec, CostModel{}));
        CHECK(wide.reassembly.total_cost == doctest::Approx(dp.reassembly.total_cost).epsilon(1e-12));
    }
}

TEST_CASE("brute force enumerates the expected number of assignments") {
    std::mt19937_64 rng(1);
    const auto known = random_instance(rng, 8, 8, true);
    const CostTable known_table(known.scores, known.spec, CostModel{});
    CHECK(brute_force_candidates(known_table) == 40'320);
    CHECK(solve_brute_force(known_table).candidates_evaluated == 40'320);

    const auto unknown = random_instance(rng, 9, 8, false);
    CHECK(brute_force_candidates(CostTable(unknown.scores, unknown.spec, CostModel{})) == 362'880);

    // Incomplete: every injective partial map from 2 fragments to 3 positions.
    const auto partial = random_instance(rng, 2, 3, true, true);
    const CostTable partial_table(partial.scores, partial.spec, CostModel{});
    CHECK(brute_force_candidates(partial_table) == 1 + 2 * 3 + 1 * 6);
    CHECK(solve_brute_force(partial_table).candidates_evaluated == 13);

    CHECK_THROWS_AS(solve_brute_force(known_table, BruteForceOptions{1000}), BudgetExceeded);
}

TEST_CASE("merged-state solver limits") {
    PuzzleSpec spec;
    spec.num_positions = 25;
    spec.fragment_ids = test_support::ids(1);
    spec.allow_empty_positions = true;
    const ScoreTensor t(TensorVariant::KnownCentral, spec.fragment_ids, 25);
    CHECK_THROWS_AS(solve_merged_dp(CostTable(t, spec, CostModel{})), DataError);
}

TEST_CASE("uniform-cost search honours its node budget") {
    std::mt19937_64 rng(2);
    const auto in = random_instance(rng, 8, 8, true);
    ImplicitOptions tight;
    tight.node_budget = 20;
    CHECK_THROWS_AS(solve_implicit(ImplicitGraph(in.scores, in.spec, CostModel{}), tight), BudgetExceeded);
}

TEST_CASE("solve dispatches by method name") {
    for (const auto name : {"dijkstra", "implicit", "dp", "greedy", "brute"}) {
        const auto m = parse_solver_method(name);
        REQUIRE(m);
        CHECK(to_string(*m) == name);
    }
    CHECK_FALSE(parse_solver_method("hungarian"));

    std::mt19937_64 rng(3);
    const auto in = random_instance(rng, 5, 5, true);
    SolveOptions options;
    options.method = SolverMethod::BruteForce;
    const double best = solve(in.scores, in.spec, options).reassembly.total_cost;
    for (const auto m : {SolverMethod::Dijkstra, SolverMethod::Implicit, SolverMethod::MergedDp}) {
        options.method = m;
        const SolverReport r = solve(in.scores, in.spec, options);
        CHECK(r.method == m);
        CHECK(r.reassembly.total_cost == doctest::Approx(best).epsilon(1e-12));
    }
}
