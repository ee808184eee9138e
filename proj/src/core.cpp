#include "reassembly/core.hpp"

#include "reassembly/error.hpp"
#include "reassembly/kernels.hpp"

#include <array>
#include <unordered_set>

namespace reassembly {

std::string_view RelativePosition::name() const {
    static constexpr std::array<std::string_view, kCount> kNames{
        "top-left", "top", "top-right", "left", "right", "bottom-left", "bottom", "bottom-right"};
    return kNames[static_cast<std::size_t>(index_)];
}

void check_spec(const PuzzleSpec& spec) {
    using K = DataError::Kind;
    if (spec.num_positions < 1) throw DataError(K::Validation, "num_positions must be at least 1");
    if (spec.fragment_ids.empty()) throw DataError(K::Validation, "fragment_ids must not be empty");
    std::unordered_set<std::string_view> seen;
    for (const auto& id : spec.fragment_ids) {
        if (!seen.insert(id).second) throw DataError(K::Validation, "duplicate fragment id '" + id + "'");
    }
    if (spec.central_known) {
        if (spec.central_id && seen.contains(*spec.central_id)) {
            throw DataError(K::Validation, "central fragment '" + *spec.central_id + "' is also listed for assignment");
        }
    } else if (spec.central_id) {
        throw DataError(K::Validation, "central_id given for a puzzle whose central is unknown");
    }
    if (!spec.allow_empty_positions && spec.assignable_count() < spec.num_positions) {
        throw DataError(K::Validation, "complete puzzle needs at least " + std::to_string(spec.num_positions) +
                                           " assignable fragments, got " + std::to_string(spec.assignable_count()));
    }
}

ScoreTensor::ScoreTensor(TensorVariant variant, std::vector<FragmentId> fragments, int positions)
    : variant_(variant), fragments_(std::move(fragments)), positions_(positions) {
    const int n = static_cast<int>(fragments_.size());
    candidates_ = variant_ == TensorVariant::KnownCentral ? 1 : n;
    rows_ = variant_ == TensorVariant::KnownCentral ? n : n - 1;
    if (positions_ < 1 || rows_ < 0 || (variant_ == TensorVariant::AllCentrals && n < 1)) {
        throw DataError(DataError::Kind::Dimension, "invalid tensor dimensions");
    }
    values_.assign(static_cast<std::size_t>(candidates_) * rows_ * positions_, 0.0);
}

void ScoreTensor::check_ranges() const {
    auto check = [](std::span<const double> xs, std::string_view field) {
        for (std::size_t k = 0; k < xs.size(); ++k) {
            if (!(xs[k] >= 0.0 && xs[k] <= 1.0)) {
                throw DataError(DataError::Kind::Validation, std::string(field) + " out of [0,1] at flat index " +
                                                                 std::to_string(k) + " (got " +
                                                                 std::to_string(xs[k]) + ")");
            }
        }
    };
    check(values_, "p");
    check(outsider_, "outsider");
    check(neighbor_, "neighbor");
}

CostTable::CostTable(const ScoreTensor& scores, const PuzzleSpec& spec, const CostModel& model)
    : scores_(scores), spec_(spec), model_(model) {
    using K = DataError::Kind;
    check_spec(spec_);
    const bool known = scores_.variant() == TensorVariant::KnownCentral;
    if (known != spec_.central_known) {
        throw DataError(K::Dimension, "tensor variant does not match the central-known flag of the puzzle");
    }
    if (scores_.fragments() != spec_.fragment_ids) {
        throw DataError(K::Dimension, "tensor fragment list does not match the puzzle roster");
    }
    if (scores_.positions() != spec_.num_positions) {
        throw DataError(K::Dimension, "tensor has " + std::to_string(scores_.positions()) + " positions, puzzle has " +
                                          std::to_string(spec_.num_positions));
    }
    skips_allowed_ = spec_.skips_allowed();
    empty_allowed_ = spec_.allow_empty_positions;

    place_.resize(scores_.values().size());
    switch (model_.mode) {
        case CostMode::OneMinusP:
            kernels::one_minus(scores_.values(), place_);
            break;
        case CostMode::NegLogP:
            kernels::neg_log_clamped(scores_.values(), place_, model_.epsilon);
            break;
    }

    skip_.resize(static_cast<std::size_t>(candidates()) * rows());
    const bool use_outsider = model_.skip_source == SkipCostSource::OutsiderProbability && scores_.has_outsider();
    for (int c = 0; c < candidates(); ++c) {
        for (int r = 0; r < rows(); ++r) {
            const double skip_score = use_outsider ? scores_.outsider(c, r) : model_.lambda;
            skip_[static_cast<std::size_t>(c) * rows() + r] = cost_of(skip_score, model_);
        }
    }
}

namespace {

// Walks the rows like a path through the assignment tree and calls
// `step(row, position, cost, score)` for every edge taken.
template <class Step>
bool walk_assignment(const Assignment& a, const CostTable& table, Step&& step) {
    const int rows = table.rows();
    const int positions = table.positions();
    if (a.candidate < 0 || a.candidate >= table.candidates()) return false;
    if (static_cast<int>(a.position_of_row.size()) != rows) return false;

    std::vector<bool> used(static_cast<std::size_t>(positions), false);
    int filled = 0;
    int r = 0;
    for (; r < rows && filled < positions; ++r) {
        const int j = a.position_of_row[static_cast<std::size_t>(r)];
        if (j == kSkipPosition) {
            if (!table.skips_allowed()) return false;
            step(r, kSkipPosition, table.skip(a.candidate, r), 0.0);
            continue;
        }
        if (j < 0 || j >= positions || used[static_cast<std::size_t>(j)]) return false;
        used[static_cast<std::size_t>(j)] = true;
        ++filled;
        step(r, j, table.place(a.candidate, r, j), table.score(a.candidate, r, j));
    }
    // Path ended with every position filled; the remaining rows cannot be placed.
    for (; r < rows; ++r) {
        if (a.position_of_row[static_cast<std::size_t>(r)] != kSkipPosition) return false;
        if (!table.skips_allowed()) return false;
    }
    if (filled < positions && !table.empty_allowed()) return false;
    return true;
}

}  // namespace

std::optional<AssignmentTotals> evaluate_assignment(const Assignment& assignment, const CostTable& table) {
    AssignmentTotals totals;
    const bool ok = walk_assignment(assignment, table, [&](int, int, double cost, double score) {
        totals.cost += cost;
        totals.score += score;
    });
    if (!ok) return std::nullopt;
    return totals;
}

Reassembly to_reassembly(const Assignment& assignment, const CostTable& table) {
    const ScoreTensor& scores = table.scores();
    const PuzzleSpec& spec = table.spec();
    Reassembly out;
    if (spec.central_known) {
        out.central_fragment = spec.central_id;
    } else {
        out.central_fragment = spec.fragment_ids[static_cast<std::size_t>(assignment.candidate)];
        out.trace.push_back({PlacementStep::Kind::Central, *out.central_fragment, kSkipPosition, 0.0, 0.0});
    }
    const bool ok = walk_assignment(assignment, table, [&](int row, int position, double cost, double score) {
        const FragmentId& id =
            spec.fragment_ids[static_cast<std::size_t>(scores.fragment_of(assignment.candidate, row))];
        const auto kind = position == kSkipPosition ? PlacementStep::Kind::Skip : PlacementStep::Kind::Place;
        out.trace.push_back({kind, id, position, score, cost});
        out.total_cost += cost;
        out.total_score += score;
        if (position != kSkipPosition) out.placements.emplace(position, id);
    });
    if (!ok) throw DataError(DataError::Kind::Validation, "assignment breaks the puzzle constraints");
    for (int r = 0; r < table.rows(); ++r) {
        if (assignment.position_of_row[static_cast<std::size_t>(r)] == kSkipPosition) {
            out.unused.insert(spec.fragment_ids[static_cast<std::size_t>(scores.fragment_of(assignment.candidate, r))]);
        }
    }
    return out;
}

std::string_view to_string(Violation::Kind kind) {
    switch (kind) {
        case Violation::Kind::UnknownFragment: return "unknown-fragment";
        case Violation::Kind::DuplicateFragment: return "duplicate-fragment";
        case Violation::Kind::PositionOutOfRange: return "position-out-of-range";
        case Violation::Kind::EmptyPosition: return "empty-position";
        case Violation::Kind::UnplacedFragment: return "unplaced-fragment";
        case Violation::Kind::MissingCentral: return "missing-central";
        case Violation::Kind::UnexpectedCentral: return "unexpected-central";
    }
    return "?";
}

std::vector<Violation> validate(const Reassembly& reassembly, const PuzzleSpec& spec) {
    using K = Violation::Kind;
    std::vector<Violation> out;

    std::unordered_set<std::string_view> roster(spec.fragment_ids.begin(), spec.fragment_ids.end());
    auto known = [&](const FragmentId& id) {
        return roster.contains(id) || (spec.central_known && spec.central_id && *spec.central_id == id);
    };
    std::map<std::string_view, int> uses;

    if (spec.central_known) {
        if (reassembly.central_fragment && reassembly.central_fragment != spec.central_id) {
            out.push_back({K::UnexpectedCentral, "central '" + *reassembly.central_fragment +
                                                     "' given for a puzzle with a fixed central"});
        }
        if (spec.central_id) ++uses[*spec.central_id];
    } else if (!reassembly.central_fragment) {
        out.push_back({K::MissingCentral, "no central fragment chosen"});
    } else if (!roster.contains(*reassembly.central_fragment)) {
        out.push_back({K::UnknownFragment, "central '" + *reassembly.central_fragment + "' is not in the roster"});
    } else {
        ++uses[*reassembly.central_fragment];
    }

    for (const auto& [position, id] : reassembly.placements) {
        if (position < 0 || position >= spec.num_positions) {
            out.push_back({K::PositionOutOfRange, "position " + std::to_string(position) + " holds '" + id + "'"});
        }
        if (!known(id)) {
            out.push_back({K::UnknownFragment, "'" + id + "' placed at position " + std::to_string(position)});
            continue;
        }
        ++uses[id];
    }
    for (const auto& id : reassembly.unused) {
        if (!known(id)) {
            out.push_back({K::UnknownFragment, "'" + id + "' listed as unused"});
            continue;
        }
        if (uses.contains(id)) out.push_back({K::DuplicateFragment, "'" + id + "' is both used and unused"});
    }
    for (const auto& [id, count] : uses) {
        if (count > 1) {
            out.push_back({K::DuplicateFragment, "'" + std::string(id) + "' used " + std::to_string(count) + " times"});
        }
    }

    if (!spec.allow_empty_positions) {
        for (int j = 0; j < spec.num_positions; ++j) {
            if (!reassembly.placements.contains(j)) {
                out.push_back({K::EmptyPosition, "position " + std::to_string(j) + " is empty"});
            }
        }
    }
    if (!spec.skips_allowed()) {
        for (const auto& id : spec.fragment_ids) {
            if (!uses.contains(id)) out.push_back({K::UnplacedFragment, "'" + id + "' is not placed"});
        }
    }
    return out;
}

}  // namespace reassembly
