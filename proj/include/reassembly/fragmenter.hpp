#pragma once

// Cutting source images into ground-truthed 3x3 fragment sets, composing
// puzzles from them and rendering reassemblies back into images.
//
// Layout of the 398 x 398 crop: three 110 px cells per axis separated by
// 34 px gaps (cell k starts at 144k). A 96 px fragment sits at the cell
// centre, nominal top-left 7 + 144k, and may shift by up to 7 px each way
// when jitter is on. Unjittered neighbours are separated by 48 px of
// discarded image (3*96 + 2*48 + 2*7 = 398); with jitter the gap never
// drops below 34 px.

#include "reassembly/core.hpp"
#include "reassembly/image.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace reassembly {

inline constexpr int kImageSize = 398;
inline constexpr int kFragmentSize = 96;
inline constexpr int kCellPitch = 144;
inline constexpr int kAnchorOffset = 7;
inline constexpr int kMaxJitter = 7;

struct PixelOffset {
    int x = 0;
    int y = 0;

    friend bool operator==(const PixelOffset&, const PixelOffset&) = default;
};

/// Nominal top-left corner of the fragment in grid cell (row, col).
constexpr PixelOffset nominal_anchor(int row, int col) {
    return {kAnchorOffset + kCellPitch * col, kAnchorOffset + kCellPitch * row};
}

/// Nominal anchor of a central or relative slot.
PixelOffset nominal_anchor(const GroundTruth& slot);

struct Fragment {
    FragmentId id;
    std::string source_id;
    Raster raster;
    GroundTruth truth;
    PixelOffset anchor;
    PixelOffset jitter;
    std::string file;  // raster file name relative to the manifest
};

struct FragmentSet {
    std::string source_id;
    int image_size = kImageSize;
    std::vector<Fragment> fragments;

    const Fragment& central() const;
    const Fragment* find(const FragmentId& id) const;
};

/// Resizes so the short side is 398 px (bilinear), then centre-crops to
/// 398 x 398. Throws DataError when the short side is below 96 px.
Raster prepare_image(const Raster& image);

/// Cuts the nine fragments of `image`. Fragment order in the result is a
/// seeded shuffle and ids are "<source_id>:<k>" for list index k, so
/// neither leaks the ground truth. Deterministic in (image, source_id,
/// jitter_enabled, seed).
FragmentSet fragment_image(const Raster& image, const std::string& source_id, bool jitter_enabled,
                           std::uint64_t seed);

/// Writes `<dir>/manifest.json` and one PNG per fragment.
void write_fragment_set(const FragmentSet& set, const std::filesystem::path& dir);
/// Reads a manifest; rasters are loaded from the files next to it unless
/// `load_rasters` is false.
FragmentSet read_fragment_set(const std::filesystem::path& manifest_path, bool load_rasters = true);

struct PuzzleOptions {
    bool central_known = true;
    int missing = 0;  // true relative fragments removed
    int extra = 0;    // outsiders drawn from other fragment sets
    bool allow_empty = false;
    std::uint64_t seed = 0;
};

/// One puzzle instance: the spec handed to scorers and solvers plus the
/// fragments behind it, their truth rewritten relative to this puzzle.
struct Puzzle {
    std::string id;
    std::string source_id;
    PuzzleSpec spec;
    std::vector<Fragment> roster;  // aligned with spec.fragment_ids
    std::optional<Fragment> central;

    std::map<FragmentId, GroundTruth> truth() const;
    /// Roster plus the known central.
    std::vector<Fragment> all_fragments() const;
};

/// Builds a puzzle from `set`. Outsiders are drawn from the sets in `pool`
/// with a different source id. `allow_empty` enables both empty positions
/// and skipped fragments. Throws DataError when the pool is too small or
/// the options describe an unsatisfiable puzzle.
Puzzle make_puzzle(const FragmentSet& set, std::span<const FragmentSet> pool, const PuzzleOptions& options);

struct RenderOptions {
    Rgb fill{128, 128, 128};
    /// When set, fragments whose placement disagrees with this truth get
    /// an outline drawn in the margin around them.
    std::optional<std::map<FragmentId, GroundTruth>> truth;
    Rgb outline{255, 0, 0};
};

/// 398 x 398 canvas with every placed fragment (and the central) drawn at
/// its nominal anchor. Throws DataError(UnknownId) when a placement names a
/// fragment missing from `fragments`.
Raster render_reassembly(const Reassembly& reassembly, std::span<const Fragment> fragments,
                         const RenderOptions& options = {});

}  // namespace reassembly
