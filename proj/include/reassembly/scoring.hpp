#pragma once

// Producers of score tensors: deterministic baselines used for testing and
// the file bridge for tensors computed by an external (neural) scorer.

#include "reassembly/core.hpp"
#include "reassembly/fragmenter.hpp"

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>

namespace reassembly {

enum class ScorerKind { Oracle, NoisyOracle, Content };

struct ScorerConfig {
    ScorerKind kind = ScorerKind::Oracle;
    double noise = 0.0;  // sigma, NoisyOracle only
    std::uint64_t seed = 0;
};

class Scorer {
public:
    virtual ~Scorer() = default;
    /// KnownCentral tensor when the puzzle's central is known, AllCentrals otherwise.
    virtual ScoreTensor score(const Puzzle& puzzle) const = 0;
};

std::unique_ptr<Scorer> make_scorer(const ScorerConfig& config);

/// One-hot scores from the ground truth: p = 1 exactly where the fragment
/// belongs (and, for all centrals, only under the true central);
/// outsider = 1 for fragments from another image than the central.
ScoreTensor oracle_score(const Puzzle& puzzle);

/// Oracle scores with U(0, sigma) added to every entry of each row (the
/// position scores plus the outsider column) and each row then divided by
/// its maximum when that is positive. sigma = 0 gives oracle_score exactly.
ScoreTensor noisy_oracle_score(const Puzzle& puzzle, double sigma, std::uint64_t seed);

inline constexpr int kContentBandWidth = 8;
inline constexpr int kContentCornerLength = 32;

/// Ground-truth-free heuristic: compares per-channel mean and standard
/// deviation of the central's band facing each position with the
/// fragment's band facing back, rows scaled so their maximum is 1.
ScoreTensor content_score(const Puzzle& puzzle);

/// Reads `*.scores.json` produced by any scorer. Throws DataError naming
/// the offending field on schema, dimension or range problems.
ScoreTensor load_score_tensor(const std::filesystem::path& path);
ScoreTensor parse_score_tensor(const std::string& text);
void save_score_tensor(const ScoreTensor& tensor, const std::filesystem::path& path);
std::string dump_score_tensor(const ScoreTensor& tensor);

/// Scorer reading a precomputed file; its fragment list must match the puzzle roster.
class ScoreFileScorer final : public Scorer {
public:
    explicit ScoreFileScorer(std::filesystem::path path) : path_(std::move(path)) {}
    ScoreTensor score(const Puzzle& puzzle) const override;

private:
    std::filesystem::path path_;
};

}  // namespace reassembly
