#include "reassembly/report_io.hpp"

#include "json_util.hpp"

namespace reassembly {

using json_util::json;

namespace {

std::string_view step_kind_name(PlacementStep::Kind kind) {
    switch (kind) {
        case PlacementStep::Kind::Central: return "central";
        case PlacementStep::Kind::Place: return "place";
        case PlacementStep::Kind::Skip: return "skip";
    }
    return "?";
}

PlacementStep::Kind step_kind_from(const std::string& name, const std::string& field) {
    if (name == "central") return PlacementStep::Kind::Central;
    if (name == "place") return PlacementStep::Kind::Place;
    if (name == "skip") return PlacementStep::Kind::Skip;
    json_util::schema_error(field, "unknown step kind '" + name + "'");
}

}  // namespace

json spec_to_json(const PuzzleSpec& spec) {
    return {
        {"num_positions", spec.num_positions},
        {"fragment_ids", spec.fragment_ids},
        {"central_known", spec.central_known},
        {"allow_empty_positions", spec.allow_empty_positions},
        {"allow_unused_fragments", spec.allow_unused_fragments},
        {"central_id", spec.central_id ? json(*spec.central_id) : json(nullptr)},
    };
}

PuzzleSpec spec_from_json(const json& value, const std::string& path) {
    PuzzleSpec spec;
    spec.num_positions = json_util::get_field<int>(value, "num_positions", path);
    const json& ids = json_util::require(value, "fragment_ids", path);
    if (!ids.is_array()) json_util::schema_error(path + ".fragment_ids", "expected an array");
    for (std::size_t k = 0; k < ids.size(); ++k) {
        spec.fragment_ids.push_back(
            json_util::get_as<std::string>(ids[k], path + ".fragment_ids[" + std::to_string(k) + "]"));
    }
    spec.central_known = json_util::get_field<bool>(value, "central_known", path);
    spec.allow_empty_positions = json_util::get_field<bool>(value, "allow_empty_positions", path);
    spec.allow_unused_fragments = json_util::get_field<bool>(value, "allow_unused_fragments", path);
    if (const auto it = value.find("central_id"); it != value.end() && !it->is_null()) {
        spec.central_id = json_util::get_as<std::string>(*it, path + ".central_id");
    }
    return spec;
}

json reassembly_to_json(const Reassembly& r) {
    json placements = json::array();
    for (const auto& [position, id] : r.placements) placements.push_back({{"position", position}, {"fragment", id}});
    json trace = json::array();
    for (const auto& step : r.trace) {
        trace.push_back({{"kind", step_kind_name(step.kind)},
                         {"fragment", step.fragment},
                         {"position", step.position == kSkipPosition ? json(nullptr) : json(step.position)},
                         {"score", step.score},
                         {"cost", step.cost}});
    }
    return {
        {"central", r.central_fragment ? json(*r.central_fragment) : json(nullptr)},
        {"placements", placements},
        {"unused", r.unused},
        {"total_score", r.total_score},
        {"total_cost", r.total_cost},
        {"trace", trace},
    };
}

Reassembly reassembly_from_json(const json& value, const std::string& path) {
    Reassembly r;
    const json& central = json_util::require(value, "central", path);
    if (!central.is_null()) r.central_fragment = json_util::get_as<std::string>(central, path + ".central");

    const json& placements = json_util::require(value, "placements", path);
    if (!placements.is_array()) json_util::schema_error(path + ".placements", "expected an array");
    for (std::size_t k = 0; k < placements.size(); ++k) {
        const std::string item = path + ".placements[" + std::to_string(k) + "]";
        const int position = json_util::get_field<int>(placements[k], "position", item);
        const auto id = json_util::get_field<std::string>(placements[k], "fragment", item);
        if (!r.placements.emplace(position, id).second) {
            json_util::schema_error(item + ".position", "position " + std::to_string(position) + " placed twice");
        }
    }

    const json& unused = json_util::require(value, "unused", path);
    if (!unused.is_array()) json_util::schema_error(path + ".unused", "expected an array");
    for (std::size_t k = 0; k < unused.size(); ++k) {
        r.unused.insert(json_util::get_as<std::string>(unused[k], path + ".unused[" + std::to_string(k) + "]"));
    }
    r.total_score = json_util::get_field<double>(value, "total_score", path);
    r.total_cost = json_util::get_field<double>(value, "total_cost", path);

    if (const auto it = value.find("trace"); it != value.end()) {
        if (!it->is_array()) json_util::schema_error(path + ".trace", "expected an array");
        for (std::size_t k = 0; k < it->size(); ++k) {
            const json& s = (*it)[k];
            const std::string item = path + ".trace[" + std::to_string(k) + "]";
            PlacementStep step;
            step.kind = step_kind_from(json_util::get_field<std::string>(s, "kind", item), item + ".kind");
            step.fragment = json_util::get_field<std::string>(s, "fragment", item);
            const json& position = json_util::require(s, "position", item);
            step.position = position.is_null() ? kSkipPosition : json_util::get_as<int>(position, item + ".position");
            step.score = json_util::get_field<double>(s, "score", item);
            step.cost = json_util::get_field<double>(s, "cost", item);
            r.trace.push_back(std::move(step));
        }
    }
    return r;
}

json solver_report_to_json(const SolverReport& report) {
    return {
        {"method", to_string(report.method)},
        {"reassembly", reassembly_to_json(report.reassembly)},
        {"assignment",
         {{"candidate", report.assignment.candidate}, {"position_of_row", report.assignment.position_of_row}}},
        {"nodes_expanded", report.nodes_expanded},
        {"edges_relaxed", report.edges_relaxed},
        {"candidates_evaluated", report.candidates_evaluated},
        {"wall_time_ms", std::chrono::duration<double, std::milli>(report.wall_time).count()},
        {"approximate", report.approximate},
        {"beam_width", report.beam_width ? json(*report.beam_width) : json(nullptr)},
    };
}

json evaluation_to_json(const EvaluationResult& result) {
    json per_puzzle = json::array();
    for (const auto& s : result.per_puzzle) {
        per_puzzle.push_back({{"puzzle_id", s.puzzle_id},
                              {"perfect", s.perfect},
                              {"correct_positions", s.correct_positions},
                              {"total_positions", s.total_positions}});
    }
    return {
        {"reconstruction_accuracy", result.reconstruction_accuracy},
        {"position_accuracy", result.position_accuracy},
        {"n_puzzles", result.per_puzzle.size()},
        {"per_puzzle", per_puzzle},
    };
}

}  // namespace reassembly
