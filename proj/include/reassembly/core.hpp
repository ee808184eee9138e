#pragma once

// Domain types shared by every module: puzzle geometry, score tensors,
// the score-to-cost conversion and reassembly results.

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace reassembly {

using FragmentId = std::string;

/// Position label of an edge that assigns a fragment to no position.
inline constexpr int kSkipPosition = -1;

/// One of the 8 grid neighbours of the central fragment, numbered in
/// row-major order around the centre:
///
///     0 1 2
///     3 C 4
///     5 6 7
class RelativePosition {
public:
    static constexpr int kCount = 8;

    constexpr explicit RelativePosition(int index) : index_(index) {
        assert(index >= 0 && index < kCount);
    }

    /// nullopt for the central cell (1, 1).
    static constexpr std::optional<RelativePosition> from_cell(int row, int col) {
        const int cell = row * 3 + col;
        if (cell == 4) return std::nullopt;
        return RelativePosition(cell < 4 ? cell : cell - 1);
    }

    constexpr int index() const { return index_; }
    constexpr int cell() const { return index_ < 4 ? index_ : index_ + 1; }
    constexpr int row() const { return cell() / 3; }
    constexpr int col() const { return cell() % 3; }
    /// Offset from the centre, each component in {-1, 0, 1}.
    constexpr int dx() const { return col() - 1; }
    constexpr int dy() const { return row() - 1; }
    /// The position seen from the other side: a fragment at `p` has the
    /// central fragment at `p.mirror()`.
    constexpr RelativePosition mirror() const { return RelativePosition(kCount - 1 - index_); }

    std::string_view name() const;

    friend constexpr bool operator==(RelativePosition, RelativePosition) = default;

private:
    int index_;
};

/// Where a fragment truly belongs with respect to a puzzle.
struct GroundTruth {
    enum class Kind { Central, Relative, Outsider };
    Kind kind = Kind::Outsider;
    int position = kSkipPosition;  // meaningful for Relative only

    static GroundTruth central() { return {Kind::Central, kSkipPosition}; }
    static GroundTruth relative(int position) { return {Kind::Relative, position}; }
    static GroundTruth outsider() { return {Kind::Outsider, kSkipPosition}; }

    friend bool operator==(const GroundTruth&, const GroundTruth&) = default;
};

/// Geometry of a puzzle instance.
///
/// When the central fragment is known, `fragment_ids` lists only the
/// fragments to assign and `central_id` (optional) names the central one.
/// When it is unknown, `fragment_ids` lists every candidate and the solver
/// picks the central among them.
struct PuzzleSpec {
    int num_positions = RelativePosition::kCount;
    std::vector<FragmentId> fragment_ids;
    bool central_known = true;
    bool allow_empty_positions = false;
    bool allow_unused_fragments = false;
    std::optional<FragmentId> central_id;

    /// Fragments competing for the relative positions under one central.
    int assignable_count() const {
        return static_cast<int>(fragment_ids.size()) - (central_known ? 0 : 1);
    }
    int candidate_count() const { return central_known ? 1 : static_cast<int>(fragment_ids.size()); }
    /// Supernumerary fragments force skipping even without the flag.
    bool skips_allowed() const { return allow_unused_fragments || assignable_count() > num_positions; }
};

/// Throws DataError when the spec is malformed or cannot be satisfied
/// (e.g. fewer fragments than positions on a complete puzzle).
void check_spec(const PuzzleSpec& spec);

enum class TensorVariant { KnownCentral, AllCentrals };

/// Relevance of each fragment at each position.
///
/// Stored flat as [candidate][row][position]. For KnownCentral there is a
/// single candidate and row i is fragment i. For AllCentrals candidate c is
/// fragment c taken as the central and rows enumerate the other fragments
/// in roster order (fragment c removed, later ones shifted up).
class ScoreTensor {
public:
    ScoreTensor() = default;
    ScoreTensor(TensorVariant variant, std::vector<FragmentId> fragments, int positions);

    TensorVariant variant() const { return variant_; }
    const std::vector<FragmentId>& fragments() const { return fragments_; }
    int positions() const { return positions_; }
    int candidates() const { return candidates_; }
    int rows() const { return rows_; }

    double p(int candidate, int row, int position) const { return values_[index(candidate, row, position)]; }
    double& p(int candidate, int row, int position) { return values_[index(candidate, row, position)]; }
    std::span<const double> values() const { return values_; }
    std::span<double> values() { return values_; }
    std::span<const double> row_values(int candidate, int row) const {
        return std::span<const double>(values_).subspan(index(candidate, row, 0), positions_);
    }

    bool has_outsider() const { return !outsider_.empty(); }
    bool has_neighbor() const { return !neighbor_.empty(); }
    /// Allocates the optional per-row arrays, zero filled.
    void enable_outsider() { outsider_.assign(static_cast<std::size_t>(candidates_ * rows_), 0.0); }
    void enable_neighbor() { neighbor_.assign(static_cast<std::size_t>(candidates_ * rows_), 0.0); }
    double outsider(int candidate, int row) const { return outsider_[row_index(candidate, row)]; }
    double& outsider(int candidate, int row) { return outsider_[row_index(candidate, row)]; }
    double neighbor(int candidate, int row) const { return neighbor_[row_index(candidate, row)]; }
    double& neighbor(int candidate, int row) { return neighbor_[row_index(candidate, row)]; }
    std::span<const double> outsider_values() const { return outsider_; }
    std::span<const double> neighbor_values() const { return neighbor_; }

    /// Roster index of the fragment in `row` under `candidate`.
    int fragment_of(int candidate, int row) const {
        if (variant_ == TensorVariant::KnownCentral) return row;
        return row < candidate ? row : row + 1;
    }
    /// Inverse of fragment_of; -1 when `fragment` is the candidate itself.
    int row_of(int candidate, int fragment) const {
        if (variant_ == TensorVariant::KnownCentral) return fragment;
        if (fragment == candidate) return -1;
        return fragment < candidate ? fragment : fragment - 1;
    }

    /// Throws DataError(Validation) on any entry outside [0, 1].
    void check_ranges() const;

    friend bool operator==(const ScoreTensor&, const ScoreTensor&) = default;

private:
    std::size_t index(int c, int r, int j) const {
        return (static_cast<std::size_t>(c) * rows_ + r) * positions_ + j;
    }
    std::size_t row_index(int c, int r) const { return static_cast<std::size_t>(c) * rows_ + r; }

    TensorVariant variant_ = TensorVariant::KnownCentral;
    std::vector<FragmentId> fragments_;
    int positions_ = 0;
    int candidates_ = 0;
    int rows_ = 0;
    std::vector<double> values_;
    std::vector<double> outsider_;
    std::vector<double> neighbor_;
};

enum class CostMode { OneMinusP, NegLogP };
enum class SkipCostSource { OutsiderProbability, FixedLambda };

/// How scores become non-negative edge weights.
///
/// A skip edge is priced like a placement whose score is the outsider
/// probability of the fragment (or `lambda` when there is none, or when
/// FixedLambda is requested).
struct CostModel {
    CostMode mode = CostMode::OneMinusP;
    double epsilon = 1e-9;
    SkipCostSource skip_source = SkipCostSource::OutsiderProbability;
    double lambda = 0.5;
};

inline double cost_of(double p, const CostModel& model) {
    switch (model.mode) {
        case CostMode::OneMinusP:
            return 1.0 - p;
        case CostMode::NegLogP:
            return -std::log(std::max(p, model.epsilon));
    }
    return 0.0;
}

/// Edge weights for one (tensor, spec, cost model) triple, precomputed
/// for every candidate, row and position. Holds its own copies of the inputs.
class CostTable {
public:
    /// Throws DataError(Dimension) when the tensor does not describe the spec.
    CostTable(const ScoreTensor& scores, const PuzzleSpec& spec, const CostModel& model);

    int candidates() const { return scores_.candidates(); }
    int rows() const { return scores_.rows(); }
    int positions() const { return scores_.positions(); }
    bool skips_allowed() const { return skips_allowed_; }
    bool empty_allowed() const { return empty_allowed_; }

    double place(int candidate, int row, int position) const {
        return place_[(static_cast<std::size_t>(candidate) * rows() + row) * positions() + position];
    }
    double skip(int candidate, int row) const { return skip_[static_cast<std::size_t>(candidate) * rows() + row]; }
    double score(int candidate, int row, int position) const { return scores_.p(candidate, row, position); }

    const ScoreTensor& scores() const { return scores_; }
    const PuzzleSpec& spec() const { return spec_; }
    const CostModel& model() const { return model_; }

private:
    ScoreTensor scores_;
    PuzzleSpec spec_;
    CostModel model_;
    bool skips_allowed_;
    bool empty_allowed_;
    std::vector<double> place_;
    std::vector<double> skip_;
};

/// Index-level solution: a chosen candidate (always 0 for a known central)
/// and, per row, the assigned position or kSkipPosition.
struct Assignment {
    int candidate = 0;
    std::vector<int> position_of_row;

    friend bool operator==(const Assignment&, const Assignment&) = default;
};

struct AssignmentTotals {
    double cost = 0.0;
    double score = 0.0;
};

/// Totals of an assignment as the path through the assignment tree would
/// accumulate them: rows are visited in order, a placed row pays its
/// placement cost, an unplaced row pays the skip cost, and the path ends
/// as soon as every position is filled (later rows are then unused for
/// free). nullopt when the assignment breaks a constraint of the table.
std::optional<AssignmentTotals> evaluate_assignment(const Assignment& assignment, const CostTable& table);

struct PlacementStep {
    enum class Kind { Central, Place, Skip };
    Kind kind = Kind::Place;
    FragmentId fragment;
    int position = kSkipPosition;
    double score = 0.0;
    double cost = 0.0;
};

struct Reassembly {
    std::optional<FragmentId> central_fragment;
    std::map<int, FragmentId> placements;
    std::set<FragmentId> unused;
    double total_score = 0.0;
    double total_cost = 0.0;
    std::vector<PlacementStep> trace;
};

/// Decodes an assignment into ids. Totals are taken from the assignment
/// tree semantics; throws DataError(Validation) on an infeasible assignment.
Reassembly to_reassembly(const Assignment& assignment, const CostTable& table);

struct Violation {
    enum class Kind {
        UnknownFragment,
        DuplicateFragment,    // a fragment used more than once
        PositionOutOfRange,
        EmptyPosition,        // a position left empty on a complete puzzle
        UnplacedFragment,     // a fragment left out when skipping is not allowed
        MissingCentral,
        UnexpectedCentral,
    };
    Kind kind;
    std::string detail;
};

/// Every constraint of the spec's constraint set that the reassembly breaks.
/// An empty result means the reassembly is valid.
std::vector<Violation> validate(const Reassembly& reassembly, const PuzzleSpec& spec);

std::string_view to_string(Violation::Kind kind);

}  // namespace reassembly
