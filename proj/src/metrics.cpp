#include "reassembly/metrics.hpp"

#include "reassembly/error.hpp"

namespace reassembly {

PuzzleScore score_puzzle(const Reassembly& reassembly, const PuzzleTruth& truth) {
    auto lookup = [&](const FragmentId& id) -> const GroundTruth& {
        const auto it = truth.fragments.find(id);
        if (it == truth.fragments.end()) {
            throw DataError(DataError::Kind::UnknownId,
                            "puzzle '" + truth.puzzle_id + "': fragment '" + id + "' has no ground truth");
        }
        return it->second;
    };

    PuzzleScore out;
    out.puzzle_id = truth.puzzle_id;
    for (const auto& [id, t] : truth.fragments) {
        if (t.kind == GroundTruth::Kind::Relative) ++out.total_positions;
    }
    for (const auto& [position, id] : reassembly.placements) {
        const GroundTruth& t = lookup(id);
        if (t.kind == GroundTruth::Kind::Outsider) {
            ++out.total_positions;
        } else if (t.kind == GroundTruth::Kind::Relative && t.position == position) {
            ++out.correct_positions;
        }
    }
    for (const auto& id : reassembly.unused) lookup(id);
    if (truth.central_unknown) {
        ++out.total_positions;
        if (reassembly.central_fragment && lookup(*reassembly.central_fragment).kind == GroundTruth::Kind::Central) {
            ++out.correct_positions;
        }
    }
    out.perfect = out.correct_positions == out.total_positions;
    return out;
}

EvaluationResult aggregate(std::vector<PuzzleScore> scores) {
    EvaluationResult out;
    long correct = 0;
    long total = 0;
    long perfect = 0;
    for (const auto& s : scores) {
        correct += s.correct_positions;
        total += s.total_positions;
        perfect += s.perfect ? 1 : 0;
    }
    if (!scores.empty()) out.reconstruction_accuracy = static_cast<double>(perfect) / static_cast<double>(scores.size());
    if (total > 0) out.position_accuracy = static_cast<double>(correct) / static_cast<double>(total);
    out.per_puzzle = std::move(scores);
    return out;
}

EvaluationResult evaluate(std::span<const Reassembly> reassemblies, std::span<const PuzzleTruth> truths) {
    if (reassemblies.size() != truths.size()) {
        throw DataError(DataError::Kind::Dimension, std::to_string(reassemblies.size()) + " reassemblies but " +
                                                        std::to_string(truths.size()) + " ground truths");
    }
    std::vector<PuzzleScore> scores;
    scores.reserve(truths.size());
    for (std::size_t k = 0; k < truths.size(); ++k) scores.push_back(score_puzzle(reassemblies[k], truths[k]));
    return aggregate(std::move(scores));
}

}  // namespace reassembly
