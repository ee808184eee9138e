// Command-line driver: cut images into fragment sets, score puzzles, solve
// them, evaluate batches of reports, count graph sizes and render results.
//
// Exit codes: 0 success, 1 usage error, 2 data or schema error, 3 budget
// exceeded.

#include "reassembly/core.hpp"
#include "reassembly/error.hpp"
#include "reassembly/fragmenter.hpp"
#include "reassembly/graph.hpp"
#include "reassembly/image.hpp"
#include "reassembly/metrics.hpp"
#include "reassembly/report_io.hpp"
#include "reassembly/scoring.hpp"
#include "reassembly/solver.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace reassembly;

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kData = 2, kBudget = 3 };

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Everything a run depends on besides its input files; persisted in every
/// report so the run can be repeated.
struct RunConfig {
    std::string subcommand;
    std::vector<std::string> inputs;
    std::vector<std::string> pool;
    std::string out;
    std::string spec = "central-known";
    bool allow_empty = false;
    int extra_fragments = 0;
    int missing = 0;
    std::string scorer = "oracle";
    double noise = 0.0;
    std::string scores;
    std::string solver = "dijkstra";
    std::string cost = "one-minus-p";
    std::string skip_cost = "outsider";
    double lambda = 0.5;
    std::uint64_t seed = 0;
    std::optional<std::size_t> beam;
    std::size_t node_budget = kDefaultNodeBudget;
    bool jitter = false;
    bool render = false;
    bool dump_graph = false;
    unsigned jobs = 1;

    json to_json() const {
        return {
            {"subcommand", subcommand},
            {"inputs", inputs},
            {"pool", pool},
            {"out", out},
            {"spec", spec},
            {"allow_empty", allow_empty},
            {"extra_fragments", extra_fragments},
            {"missing", missing},
            {"scorer", scorer},
            {"noise", noise},
            {"scores", scores.empty() ? json(nullptr) : json(scores)},
            {"solver", solver},
            {"cost", cost},
            {"skip_cost", skip_cost},
            {"lambda", lambda},
            {"seed", seed},
            {"beam", beam ? json(*beam) : json(nullptr)},
            {"node_budget", node_budget},
            {"jitter", jitter},
            {"render", render},
        };
    }

    bool central_known() const { return spec == "central-known"; }

    PuzzleOptions puzzle_options() const {
        PuzzleOptions o;
        o.central_known = central_known();
        o.missing = missing;
        o.extra = extra_fragments;
        o.allow_empty = allow_empty;
        o.seed = seed;
        return o;
    }

    CostModel cost_model() const {
        CostModel m;
        m.mode = cost == "neg-log" ? CostMode::NegLogP : CostMode::OneMinusP;
        m.skip_source = skip_cost == "lambda" ? SkipCostSource::FixedLambda : SkipCostSource::OutsiderProbability;
        m.lambda = lambda;
        return m;
    }

    ScorerConfig scorer_config() const {
        ScorerConfig c;
        c.kind = scorer == "noisy" ? ScorerKind::NoisyOracle
                 : scorer == "content" ? ScorerKind::Content
                                       : ScorerKind::Oracle;
        c.noise = noise;
        c.seed = seed;
        return c;
    }

    SolveOptions solve_options() const {
        SolveOptions o;
        o.method = *parse_solver_method(solver);
        o.cost = cost_model();
        o.beam_width = beam;
        o.node_budget = node_budget;
        return o;
    }
};

/// Runs `body(k)` for k in [0, count) on `jobs` threads. The first failure
/// in index order is rethrown after every task has finished.
template <class Body>
void parallel_for(std::size_t count, unsigned jobs, Body&& body) {
    std::vector<std::exception_ptr> errors(count);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k; (k = next++) < count;) {
            try {
                body(k);
            } catch (...) {
                errors[k] = std::current_exception();
            }
        }
    };
    {
        std::vector<std::jthread> threads;
        for (unsigned t = 1; t < std::max(1u, jobs); ++t) threads.emplace_back(worker);
        worker();
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

/// Manifest files named by `inputs`: files as given, directories searched
/// recursively for manifest.json. Sorted for reproducibility.
std::vector<fs::path> find_manifests(const std::vector<std::string>& inputs) {
    std::vector<fs::path> out;
    for (const auto& input : inputs) {
        const fs::path p(input);
        if (fs::is_directory(p)) {
            for (const auto& entry : fs::recursive_directory_iterator(p)) {
                if (entry.is_regular_file() && entry.path().filename() == "manifest.json") out.push_back(entry.path());
            }
        } else if (fs::is_regular_file(p)) {
            out.push_back(p);
        } else {
            throw DataError(DataError::Kind::Io, "no such file or directory: " + input);
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<FragmentSet> load_sets(const std::vector<fs::path>& manifests, bool rasters, unsigned jobs) {
    std::vector<FragmentSet> sets(manifests.size());
    parallel_for(manifests.size(), jobs, [&](std::size_t k) { sets[k] = read_fragment_set(manifests[k], rasters); });
    return sets;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) throw DataError(DataError::Kind::Io, "cannot write " + path.string());
}

void write_json(const fs::path& path, const json& value) { write_text(path, value.dump(2) + "\n"); }

json read_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError(DataError::Kind::Io, "cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw DataError(DataError::Kind::Parse, path.string() + ": " + e.what());
    }
}

void validate_config(const RunConfig& cfg) {
    if (cfg.extra_fragments < 0) throw UsageError("--extra-fragments must be non-negative");
    if (cfg.missing < 0 || cfg.missing > RelativePosition::kCount) throw UsageError("--missing must be in 0..8");
    if (!(cfg.noise >= 0.0)) throw UsageError("--noise must be non-negative");
    if (!(cfg.lambda >= 0.0 && cfg.lambda <= 1.0)) throw UsageError("--lambda must be in [0, 1]");
    if (cfg.beam && *cfg.beam == 0) throw UsageError("--beam must be positive");
    if (cfg.beam && cfg.solver != "implicit") throw UsageError("--beam applies to --solver implicit only");
    if (cfg.dump_graph && cfg.solver != "dijkstra") throw UsageError("--dump-graph needs --solver dijkstra");
}

// ---- fragment ----------------------------------------------------------

int cmd_fragment(const RunConfig& cfg) {
    const fs::path image_dir(cfg.inputs.at(0));
    const fs::path out_dir(cfg.out);
    if (!fs::is_directory(image_dir)) throw DataError(DataError::Kind::Io, "not a directory: " + image_dir.string());
    std::vector<fs::path> images;
    for (const auto& entry : fs::directory_iterator(image_dir)) {
        if (entry.is_regular_file()) images.push_back(entry.path());
    }
    std::sort(images.begin(), images.end());
    fs::create_directories(out_dir);
    if (images.empty()) {
        std::cerr << "warning: no images in " << image_dir.string() << "\n";
        return kOk;
    }

    std::vector<std::string> skipped(images.size());
    std::vector<bool> written(images.size(), false);
    parallel_for(images.size(), cfg.jobs, [&](std::size_t k) {
        Raster image;
        try {
            image = read_image(images[k]);
        } catch (const DataError& e) {
            skipped[k] = e.what();
            return;
        }
        const std::string source_id = images[k].stem().string();
        const FragmentSet set = fragment_image(image, source_id, cfg.jitter, cfg.seed);
        write_fragment_set(set, out_dir / source_id);
        written[k] = true;
    });
    int count = 0;
    for (std::size_t k = 0; k < images.size(); ++k) {
        if (!skipped[k].empty()) std::cerr << "warning: skipping " << images[k].string() << ": " << skipped[k] << "\n";
        count += written[k] ? 1 : 0;
    }
    std::cout << json{{"fragment_sets", count}, {"skipped", images.size() - static_cast<std::size_t>(count)}}.dump()
              << "\n";
    return kOk;
}

// ---- puzzles -----------------------------------------------------------

struct PuzzleInputs {
    std::vector<FragmentSet> sets;
    std::vector<FragmentSet> pool;  // sets plus the extra pool
};

PuzzleInputs load_puzzle_inputs(const RunConfig& cfg, bool rasters) {
    PuzzleInputs in;
    in.sets = load_sets(find_manifests(cfg.inputs), rasters, cfg.jobs);
    in.pool = in.sets;
    if (!cfg.pool.empty()) {
        auto extra = load_sets(find_manifests(cfg.pool), rasters, cfg.jobs);
        for (auto& s : extra) {
            const bool dup = std::any_of(in.pool.begin(), in.pool.end(),
                                         [&](const FragmentSet& o) { return o.source_id == s.source_id; });
            if (!dup) in.pool.push_back(std::move(s));
        }
    }
    return in;
}

std::unique_ptr<Scorer> scorer_for(const RunConfig& cfg) {
    if (!cfg.scores.empty()) return std::make_unique<ScoreFileScorer>(cfg.scores);
    return make_scorer(cfg.scorer_config());
}

json puzzle_json(const std::string& id, const std::optional<std::string>& source_id, const PuzzleSpec& spec) {
    return {{"id", id}, {"source_id", source_id ? json(*source_id) : json(nullptr)}, {"spec", spec_to_json(spec)}};
}

int cmd_score(const RunConfig& cfg) {
    const bool rasters = cfg.scorer == "content";
    const PuzzleInputs in = load_puzzle_inputs(cfg, rasters);
    if (in.sets.size() != 1) throw UsageError("score takes exactly one manifest");
    const Puzzle puzzle = make_puzzle(in.sets[0], in.pool, cfg.puzzle_options());
    const ScoreTensor tensor = make_scorer(cfg.scorer_config())->score(puzzle);
    save_score_tensor(tensor, cfg.out);
    return kOk;
}

// ---- solve -------------------------------------------------------------

json violations_json(const Reassembly& r, const PuzzleSpec& spec) {
    json out = json::array();
    for (const auto& v : validate(r, spec)) out.push_back({{"kind", to_string(v.kind)}, {"detail", v.detail}});
    return out;
}

void write_report(const RunConfig& cfg, const fs::path& out_dir, const json& puzzle, const SolverReport& report,
                  const PuzzleSpec& spec) {
    const json doc = {{"puzzle", puzzle},
                      {"config", cfg.to_json()},
                      {"result", solver_report_to_json(report)},
                      {"violations", violations_json(report.reassembly, spec)}};
    write_json(out_dir / (puzzle["id"].get<std::string>() + ".report.json"), doc);
}

void dump_graph(const RunConfig& cfg, const fs::path& path, const ScoreTensor& tensor, const PuzzleSpec& spec) {
    const AssignmentGraph graph = build_graph(tensor, spec, cfg.cost_model(), BuildOptions{cfg.node_budget});
    std::ofstream out(path, std::ios::binary);
    write_edge_list(out, graph);
    if (!out) throw DataError(DataError::Kind::Io, "cannot write " + path.string());
}

int solve_score_file(const RunConfig& cfg, const fs::path& out_dir) {
    const ScoreTensor tensor = load_score_tensor(cfg.scores);
    PuzzleSpec spec;
    spec.num_positions = tensor.positions();
    spec.fragment_ids = tensor.fragments();
    spec.central_known = tensor.variant() == TensorVariant::KnownCentral;
    if (spec.central_known != cfg.central_known()) {
        throw DataError(DataError::Kind::Dimension, cfg.scores + ": tensor variant does not match --spec " + cfg.spec);
    }
    spec.allow_empty_positions = cfg.allow_empty;
    spec.allow_unused_fragments = cfg.allow_empty;
    check_spec(spec);

    std::string id = fs::path(cfg.scores).filename().string();
    if (const auto pos = id.find(".scores.json"); pos != std::string::npos) id.erase(pos);
    if (cfg.dump_graph) dump_graph(cfg, out_dir / (id + ".edges.tsv"), tensor, spec);
    const SolverReport report = solve(tensor, spec, cfg.solve_options());
    write_report(cfg, out_dir, puzzle_json(id, std::nullopt, spec), report, spec);
    if (cfg.render) std::cerr << "warning: --render needs fragment manifests; skipped for a bare score file\n";
    return kOk;
}

int cmd_solve(const RunConfig& cfg) {
    const fs::path out_dir(cfg.out);
    fs::create_directories(out_dir);
    if (cfg.inputs.empty()) {
        if (cfg.scores.empty()) throw UsageError("solve needs manifests or --scores");
        return solve_score_file(cfg, out_dir);
    }

    const bool rasters = cfg.render || (cfg.scores.empty() && cfg.scorer == "content");
    const PuzzleInputs in = load_puzzle_inputs(cfg, rasters);
    if (!cfg.scores.empty() && in.sets.size() != 1) throw UsageError("--scores applies to a single manifest");
    const auto scorer = scorer_for(cfg);
    const PuzzleOptions options = cfg.puzzle_options();

    parallel_for(in.sets.size(), cfg.jobs, [&](std::size_t k) {
        const Puzzle puzzle = make_puzzle(in.sets[k], in.pool, options);
        const ScoreTensor tensor = scorer->score(puzzle);
        if (cfg.dump_graph) dump_graph(cfg, out_dir / (puzzle.id + ".edges.tsv"), tensor, puzzle.spec);
        const SolverReport report = solve(tensor, puzzle.spec, cfg.solve_options());
        write_report(cfg, out_dir, puzzle_json(puzzle.id, puzzle.source_id, puzzle.spec), report, puzzle.spec);
        if (cfg.render) {
            RenderOptions ro;
            ro.truth = puzzle.truth();
            write_png(out_dir / (puzzle.id + ".png"), render_reassembly(report.reassembly, puzzle.all_fragments(), ro));
        }
    });
    std::cout << json{{"puzzles", in.sets.size()}, {"out_dir", out_dir.string()}}.dump() << "\n";
    return kOk;
}

// ---- evaluate ----------------------------------------------------------

struct TruthIndex {
    struct Entry {
        std::string source_id;
        GroundTruth truth;
    };
    std::map<FragmentId, Entry> by_id;
    std::map<std::string, const FragmentSet*> by_source;
};

TruthIndex index_truth(const std::vector<FragmentSet>& sets) {
    TruthIndex index;
    for (const auto& set : sets) {
        index.by_source[set.source_id] = &set;
        for (const auto& f : set.fragments) {
            if (!index.by_id.emplace(f.id, TruthIndex::Entry{set.source_id, f.truth}).second) {
                throw DataError(DataError::Kind::Validation, "fragment id '" + f.id + "' appears in two manifests");
            }
        }
    }
    return index;
}

// The puzzle's image: the recorded source, or else the one most of its
// fragments come from.
std::string puzzle_source(const json& puzzle, const PuzzleSpec& spec, const TruthIndex& index,
                          const std::string& report_name) {
    if (const auto it = puzzle.find("source_id"); it != puzzle.end() && it->is_string()) return it->get<std::string>();
    std::map<std::string, int> votes;
    for (const auto& id : spec.fragment_ids) {
        if (const auto it = index.by_id.find(id); it != index.by_id.end()) ++votes[it->second.source_id];
    }
    if (spec.central_id) {
        if (const auto it = index.by_id.find(*spec.central_id); it != index.by_id.end()) return it->second.source_id;
    }
    std::string best;
    int best_votes = 0;
    bool tie = false;
    for (const auto& [source, n] : votes) {
        if (n > best_votes) {
            best = source;
            best_votes = n;
            tie = false;
        } else if (n == best_votes) {
            tie = true;
        }
    }
    if (best.empty() || tie) {
        throw DataError(DataError::Kind::UnknownId, report_name + ": cannot tell which image the puzzle comes from");
    }
    return best;
}

PuzzleTruth truth_for(const json& puzzle, const PuzzleSpec& spec, const TruthIndex& index,
                      const std::string& report_name) {
    const std::string source = puzzle_source(puzzle, spec, index, report_name);
    if (!index.by_source.contains(source)) {
        throw DataError(DataError::Kind::UnknownId, report_name + ": no manifest for image '" + source + "'");
    }
    PuzzleTruth truth;
    truth.puzzle_id = puzzle.value("id", report_name);
    truth.central_unknown = !spec.central_known;
    auto add = [&](const FragmentId& id) {
        const auto it = index.by_id.find(id);
        if (it == index.by_id.end()) {
            throw DataError(DataError::Kind::UnknownId, report_name + ": fragment '" + id + "' is in no manifest");
        }
        truth.fragments[id] = it->second.source_id == source ? it->second.truth : GroundTruth::outsider();
    };
    for (const auto& id : spec.fragment_ids) add(id);
    if (spec.central_id) add(*spec.central_id);
    return truth;
}

int cmd_evaluate(const RunConfig& cfg) {
    const fs::path reports_dir(cfg.inputs.at(0));
    if (!fs::is_directory(reports_dir)) throw DataError(DataError::Kind::Io, "not a directory: " + reports_dir.string());
    std::vector<fs::path> reports;
    for (const auto& entry : fs::directory_iterator(reports_dir)) {
        const std::string name = entry.path().filename().string();
        if (entry.is_regular_file() && name.ends_with(".report.json")) reports.push_back(entry.path());
    }
    std::sort(reports.begin(), reports.end());

    const std::vector<FragmentSet> sets = load_sets(find_manifests({cfg.inputs.at(1)}), false, cfg.jobs);
    const TruthIndex index = index_truth(sets);

    std::vector<Reassembly> reassemblies;
    std::vector<PuzzleTruth> truths;
    for (const auto& path : reports) {
        const json doc = read_json(path);
        const std::string name = path.filename().string();
        try {
            const json& puzzle = doc.at("puzzle");
            const PuzzleSpec spec = spec_from_json(puzzle.at("spec"), "puzzle.spec");
            reassemblies.push_back(reassembly_from_json(doc.at("result").at("reassembly"), "result.reassembly"));
            truths.push_back(truth_for(puzzle, spec, index, name));
        } catch (const json::exception& e) {
            throw DataError(DataError::Kind::Schema, name + ": " + e.what());
        } catch (const DataError& e) {
            throw DataError(e.kind(), name + ": " + e.what());
        }
    }
    const json result = evaluation_to_json(evaluate(reassemblies, truths));
    if (!cfg.out.empty()) write_json(cfg.out, result);
    std::cout << result.dump(2) << "\n";
    return kOk;
}

// ---- count -------------------------------------------------------------

std::optional<GraphVariant> parse_variant(std::string name) {
    std::replace(name.begin(), name.end(), '-', '_');
    if (name == "known_central") return GraphVariant::KnownCentral;
    if (name == "unknown_central") return GraphVariant::UnknownCentral;
    if (name == "empty_positions") return GraphVariant::EmptyPositions;
    return std::nullopt;
}

// Builds the graph for a uniform tensor and counts what was materialized.
GraphCounts materialized_counts(GraphVariant variant, int n, int p, std::size_t budget) {
    PuzzleSpec spec;
    spec.num_positions = p;
    for (int k = 0; k < n; ++k) spec.fragment_ids.push_back("f" + std::to_string(k));
    spec.central_known = variant != GraphVariant::UnknownCentral;
    spec.allow_empty_positions = spec.allow_unused_fragments = variant == GraphVariant::EmptyPositions;
    ScoreTensor tensor(spec.central_known ? TensorVariant::KnownCentral : TensorVariant::AllCentrals,
                       spec.fragment_ids, p);
    std::fill(tensor.values().begin(), tensor.values().end(), 0.5);
    const AssignmentGraph g = build_graph(tensor, spec, CostModel{}, BuildOptions{budget});
    return {g.node_count(), g.edge_count()};
}

int cmd_count(const RunConfig& cfg, const std::string& variant_name, int n, int p, bool materialize) {
    const auto variant = parse_variant(variant_name);
    if (!variant) throw UsageError("unknown variant '" + variant_name + "'");
    const GraphCounts formula = count_graph(*variant, n, p);
    json out = {{"variant", variant_name}, {"n", n}, {"p", p}, {"nodes", formula.nodes}, {"edges", formula.edges}};
    if (materialize) {
        const GraphCounts built = materialized_counts(*variant, n, p, cfg.node_budget);
        out["materialized"] = {{"nodes", built.nodes}, {"edges", built.edges}};
    }
    std::cout << out.dump() << "\n";
    return kOk;
}

// ---- render ------------------------------------------------------------

int cmd_render(const RunConfig& cfg) {
    const fs::path report_path(cfg.inputs.at(0));
    const json doc = read_json(report_path);
    const std::vector<FragmentSet> sets = load_sets(find_manifests({cfg.inputs.at(1)}), true, cfg.jobs);
    const TruthIndex index = index_truth(sets);
    const std::string name = report_path.filename().string();
    Reassembly reassembly;
    PuzzleTruth truth;
    try {
        const json& puzzle = doc.at("puzzle");
        const PuzzleSpec spec = spec_from_json(puzzle.at("spec"), "puzzle.spec");
        reassembly = reassembly_from_json(doc.at("result").at("reassembly"), "result.reassembly");
        truth = truth_for(puzzle, spec, index, name);
    } catch (const json::exception& e) {
        throw DataError(DataError::Kind::Schema, name + ": " + e.what());
    }
    std::vector<Fragment> fragments;
    for (const auto& set : sets) {
        for (const auto& f : set.fragments) {
            if (truth.fragments.contains(f.id)) fragments.push_back(f);
        }
    }
    RenderOptions ro;
    ro.truth = truth.fragments;
    write_png(cfg.out, render_reassembly(reassembly, fragments, ro));
    return kOk;
}

void add_puzzle_flags(CLI::App& app, RunConfig& cfg) {
    app.add_option("--spec", cfg.spec, "Puzzle variant")
        ->check(CLI::IsMember({"central-known", "central-unknown"}));
    app.add_flag("--allow-empty", cfg.allow_empty, "Allow empty positions and unused fragments");
    app.add_option("--extra-fragments", cfg.extra_fragments, "Outsider fragments drawn from other images");
    app.add_option("--missing", cfg.missing, "True relative fragments removed from each puzzle");
    app.add_option("--pool", cfg.pool, "Extra manifests or directories to draw outsiders from");
    app.add_option("--seed", cfg.seed, "Run seed");
    app.add_option("--scorer", cfg.scorer, "Built-in scorer")->check(CLI::IsMember({"oracle", "noisy", "content"}));
    app.add_option("--noise", cfg.noise, "Noise level of the noisy oracle");
    app.add_option("-j,--jobs", cfg.jobs, "Worker threads");
}

void add_cost_flags(CLI::App& app, RunConfig& cfg) {
    app.add_option("--cost", cfg.cost, "Score to cost conversion")->check(CLI::IsMember({"one-minus-p", "neg-log"}));
    app.add_option("--skip-cost", cfg.skip_cost, "Price of leaving a fragment out")
        ->check(CLI::IsMember({"outsider", "lambda"}));
    app.add_option("--lambda", cfg.lambda, "Skip score used without outsider scores");
    app.add_option("--node-budget", cfg.node_budget, "Node limit for explicit graphs and exact implicit search");
}

int run(int argc, char** argv) {
    CLI::App app{"Reassemble 3x3 image puzzles by shortest path"};
    app.require_subcommand(1);
    RunConfig cfg;

    auto* fragment = app.add_subcommand("fragment", "Cut every image of a directory into a fragment set");
    std::string image_dir;
    fragment->add_option("images", image_dir, "Directory of images")->required();
    fragment->add_option("out", cfg.out, "Output directory")->required();
    fragment->add_option("--seed", cfg.seed, "Run seed");
    fragment->add_flag("--jitter", cfg.jitter, "Shift each fragment by up to 7 px");
    fragment->add_option("-j,--jobs", cfg.jobs, "Worker threads");

    auto* score = app.add_subcommand("score", "Write the score tensor of one puzzle");
    std::string manifest;
    score->add_option("manifest", manifest, "Fragment set manifest")->required();
    score->add_option("-o,--out", cfg.out, "Score file to write")->required();
    add_puzzle_flags(*score, cfg);

    auto* solve_cmd = app.add_subcommand("solve", "Solve puzzles and write one report per puzzle");
    solve_cmd->add_option("inputs", cfg.inputs, "Manifests or directories of fragment sets");
    solve_cmd->add_option("-o,--out-dir", cfg.out, "Report directory")->required();
    solve_cmd->add_option("--scores", cfg.scores, "Precomputed score file instead of a built-in scorer");
    solve_cmd->add_option("--solver", cfg.solver, "Solver")
        ->check(CLI::IsMember({"dijkstra", "implicit", "dp", "greedy", "brute"}));
    solve_cmd->add_option("--beam", cfg.beam, "Beam width for the implicit solver");
    solve_cmd->add_flag("--render", cfg.render, "Also write the reassembled image");
    solve_cmd->add_flag("--dump-graph", cfg.dump_graph, "Also write the explicit graph as an edge list");
    add_puzzle_flags(*solve_cmd, cfg);
    add_cost_flags(*solve_cmd, cfg);

    auto* evaluate_cmd = app.add_subcommand("evaluate", "Score a directory of reports against the manifests");
    std::string reports_dir;
    std::string manifests_dir;
    evaluate_cmd->add_option("reports", reports_dir, "Report directory")->required();
    evaluate_cmd->add_option("manifests", manifests_dir, "Directory of fragment sets")->required();
    evaluate_cmd->add_option("-o,--out", cfg.out, "Also write the result here");

    auto* count = app.add_subcommand("count", "Print the size of an assignment graph");
    std::string variant = "known-central";
    int n = 8;
    int p = 8;
    bool materialize = false;
    count->add_option("--variant", variant, "known-central, unknown-central or empty-positions");
    count->add_option("-n", n, "Fragments");
    count->add_option("-p", p, "Positions");
    count->add_flag("--materialize", materialize, "Also build the graph and count it");
    count->add_option("--node-budget", cfg.node_budget, "Node limit when materializing");

    auto* render = app.add_subcommand("render", "Draw a report's reassembly");
    std::string report;
    render->add_option("report", report, "Report file")->required();
    render->add_option("manifests", manifests_dir, "Directory of fragment sets")->required();
    render->add_option("-o,--out", cfg.out, "PNG to write")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (fragment->parsed()) {
            cfg.subcommand = "fragment";
            cfg.inputs = {image_dir};
            return cmd_fragment(cfg);
        }
        if (score->parsed()) {
            cfg.subcommand = "score";
            cfg.inputs = {manifest};
            validate_config(cfg);
            return cmd_score(cfg);
        }
        if (solve_cmd->parsed()) {
            cfg.subcommand = "solve";
            validate_config(cfg);
            return cmd_solve(cfg);
        }
        if (evaluate_cmd->parsed()) {
            cfg.subcommand = "evaluate";
            cfg.inputs = {reports_dir, manifests_dir};
            return cmd_evaluate(cfg);
        }
        if (count->parsed()) {
            cfg.subcommand = "count";
            return cmd_count(cfg, variant, n, p, materialize);
        }
        if (render->parsed()) {
            cfg.subcommand = "render";
            cfg.inputs = {report, manifests_dir};
            return cmd_render(cfg);
        }
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kUsage;
    } catch (const BudgetExceeded& e) {
        std::cerr << "budget exceeded: " << e.what() << "\n";
        return kBudget;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kData;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kData;
    }
    return kUsage;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kData;
    }
}
