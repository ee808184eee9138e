#pragma once

// Batch evaluation of reassemblies against ground truth.
//
// Per puzzle, the slots counted are the true relative fragments present in
// the puzzle, every outsider that was placed (each one is an error), and
// the central when the solver had to choose it. A true fragment left
// unplaced counts as wrong; a skipped outsider adds nothing. A puzzle is
// perfect when every counted slot is correct.

#include "reassembly/core.hpp"

#include <map>
#include <span>
#include <string>
#include <vector>

namespace reassembly {

struct PuzzleTruth {
    std::string puzzle_id;
    /// Every fragment of the puzzle, the known central included.
    std::map<FragmentId, GroundTruth> fragments;
    bool central_unknown = false;
};

struct PuzzleScore {
    std::string puzzle_id;
    bool perfect = false;
    int correct_positions = 0;
    int total_positions = 0;
};

struct EvaluationResult {
    double reconstruction_accuracy = 0.0;
    double position_accuracy = 0.0;
    std::vector<PuzzleScore> per_puzzle;
};

/// Throws DataError(UnknownId) when the reassembly names a fragment that
/// the truth does not know.
PuzzleScore score_puzzle(const Reassembly& reassembly, const PuzzleTruth& truth);

/// Means over the puzzles; an empty batch gives zeros.
EvaluationResult aggregate(std::vector<PuzzleScore> scores);

/// `reassemblies[k]` is checked against `truths[k]`. Throws DataError when
/// the lists differ in length.
EvaluationResult evaluate(std::span<const Reassembly> reassemblies, std::span<const PuzzleTruth> truths);

}  // namespace reassembly
