#include "reassembly/fragmenter.hpp"

#include "json_util.hpp"
#include "seeding.hpp"

#include "reassembly/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <unordered_set>

namespace reassembly {

using json_util::json;

PixelOffset nominal_anchor(const GroundTruth& slot) {
    switch (slot.kind) {
        case GroundTruth::Kind::Central:
            return nominal_anchor(1, 1);
        case GroundTruth::Kind::Relative: {
            const RelativePosition pos(slot.position);
            return nominal_anchor(pos.row(), pos.col());
        }
        case GroundTruth::Kind::Outsider:
            break;
    }
    throw DataError(DataError::Kind::Validation, "outsiders have no anchor");
}

const Fragment& FragmentSet::central() const {
    for (const auto& f : fragments) {
        if (f.truth.kind == GroundTruth::Kind::Central) return f;
    }
    throw DataError(DataError::Kind::Validation, "fragment set '" + source_id + "' has no central fragment");
}

const Fragment* FragmentSet::find(const FragmentId& id) const {
    for (const auto& f : fragments) {
        if (f.id == id) return &f;
    }
    return nullptr;
}

Raster prepare_image(const Raster& image) {
    const int w = image.width();
    const int h = image.height();
    if (std::min(w, h) < kFragmentSize) {
        throw DataError(DataError::Kind::Validation, "image is " + std::to_string(w) + "x" + std::to_string(h) +
                                                         ", the short side must be at least " +
                                                         std::to_string(kFragmentSize) + " px");
    }
    int rw = kImageSize;
    int rh = kImageSize;
    if (w < h) {
        rh = static_cast<int>(std::lround(static_cast<double>(h) * kImageSize / w));
    } else {
        rw = static_cast<int>(std::lround(static_cast<double>(w) * kImageSize / h));
    }
    const Raster resized = resize_bilinear(image, rw, rh);
    return resized.crop((rw - kImageSize) / 2, (rh - kImageSize) / 2, kImageSize, kImageSize);
}

FragmentSet fragment_image(const Raster& image, const std::string& source_id, bool jitter_enabled,
                           std::uint64_t seed) {
    const Raster square = prepare_image(image);
    std::mt19937_64 rng(seeding::derive(seed, source_id));
    std::uniform_int_distribution<int> jitter(-kMaxJitter, kMaxJitter);

    std::vector<Fragment> cells;
    cells.reserve(9);
    for (int row = 0; row < 3; ++row) {
        for (int col = 0; col < 3; ++col) {
            Fragment f;
            f.source_id = source_id;
            const auto rel = RelativePosition::from_cell(row, col);
            f.truth = rel ? GroundTruth::relative(rel->index()) : GroundTruth::central();
            f.anchor = nominal_anchor(row, col);
            if (jitter_enabled) {
                f.jitter.x = jitter(rng);
                f.jitter.y = jitter(rng);
            }
            f.raster = square.crop(f.anchor.x + f.jitter.x, f.anchor.y + f.jitter.y, kFragmentSize, kFragmentSize);
            cells.push_back(std::move(f));
        }
    }
    std::shuffle(cells.begin(), cells.end(), rng);

    FragmentSet set;
    set.source_id = source_id;
    for (std::size_t k = 0; k < cells.size(); ++k) {
        cells[k].id = source_id + ":" + std::to_string(k);
        cells[k].file = "frag_" + std::to_string(k) + ".png";
    }
    set.fragments = std::move(cells);
    return set;
}

namespace {

json truth_to_json(const GroundTruth& t) {
    if (t.kind == GroundTruth::Kind::Central) return "C";
    if (t.kind == GroundTruth::Kind::Relative) return t.position;
    throw DataError(DataError::Kind::Validation, "manifests cannot hold outsider fragments");
}

GroundTruth truth_from_json(const json& value, const std::string& field) {
    if (value.is_string() && value.get<std::string>() == "C") return GroundTruth::central();
    if (value.is_number_integer()) {
        const int p = value.get<int>();
        if (p >= 0 && p < RelativePosition::kCount) return GroundTruth::relative(p);
    }
    json_util::schema_error(field, "expected \"C\" or an integer in 0..7");
}

PixelOffset offset_from_json(const json& value, const std::string& field) {
    if (!value.is_array() || value.size() != 2) json_util::schema_error(field, "expected [x, y]");
    return {json_util::get_as<int>(value[0], field + "[0]"), json_util::get_as<int>(value[1], field + "[1]")};
}

}  // namespace

void write_fragment_set(const FragmentSet& set, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    json fragments = json::array();
    for (const auto& f : set.fragments) {
        write_png(dir / f.file, f.raster);
        fragments.push_back({{"id", f.id},
                             {"ground_truth", truth_to_json(f.truth)},
                             {"anchor", {f.anchor.x, f.anchor.y}},
                             {"jitter", {f.jitter.x, f.jitter.y}},
                             {"file", f.file}});
    }
    const json manifest = {{"source_id", set.source_id}, {"image_size", set.image_size}, {"fragments", fragments}};
    json_util::write_json_file(dir / "manifest.json", manifest);
}

FragmentSet read_fragment_set(const std::filesystem::path& manifest_path, bool load_rasters) {
    const json doc = json_util::read_json_file(manifest_path);
    FragmentSet set;
    set.source_id = json_util::get_field<std::string>(doc, "source_id");
    set.image_size = json_util::get_field<int>(doc, "image_size");
    const json& list = json_util::require(doc, "fragments");
    if (!list.is_array()) json_util::schema_error("fragments", "expected an array");

    std::unordered_set<std::string> ids;
    int centrals = 0;
    for (std::size_t k = 0; k < list.size(); ++k) {
        const std::string path = "fragments[" + std::to_string(k) + "]";
        const json& item = list[k];
        Fragment f;
        f.source_id = set.source_id;
        f.id = json_util::get_field<std::string>(item, "id", path);
        f.truth = truth_from_json(json_util::require(item, "ground_truth", path), path + ".ground_truth");
        f.anchor = offset_from_json(json_util::require(item, "anchor", path), path + ".anchor");
        f.jitter = offset_from_json(json_util::require(item, "jitter", path), path + ".jitter");
        f.file = json_util::get_field<std::string>(item, "file", path);
        if (std::abs(f.jitter.x) > kMaxJitter || std::abs(f.jitter.y) > kMaxJitter) {
            json_util::schema_error(path + ".jitter", "outside [-7, 7]");
        }
        if (!ids.insert(f.id).second) json_util::schema_error(path + ".id", "duplicate id '" + f.id + "'");
        if (f.truth.kind == GroundTruth::Kind::Central) ++centrals;
        if (load_rasters) {
            f.raster = read_image(manifest_path.parent_path() / f.file);
            if (f.raster.width() != kFragmentSize || f.raster.height() != kFragmentSize) {
                throw DataError(DataError::Kind::Validation, f.file + " is not " + std::to_string(kFragmentSize) +
                                                                 "x" + std::to_string(kFragmentSize));
            }
        }
        set.fragments.push_back(std::move(f));
    }
    if (centrals != 1) json_util::schema_error("fragments", "expected exactly one central fragment");
    return set;
}

std::map<FragmentId, GroundTruth> Puzzle::truth() const {
    std::map<FragmentId, GroundTruth> out;
    for (const auto& f : roster) out.emplace(f.id, f.truth);
    if (central) out.emplace(central->id, central->truth);
    return out;
}

std::vector<Fragment> Puzzle::all_fragments() const {
    std::vector<Fragment> out = roster;
    if (central) out.push_back(*central);
    return out;
}

Puzzle make_puzzle(const FragmentSet& set, std::span<const FragmentSet> pool, const PuzzleOptions& options) {
    using K = DataError::Kind;
    if (options.missing < 0 || options.missing > RelativePosition::kCount) {
        throw DataError(K::Validation, "missing must be in 0..8");
    }
    if (options.extra < 0) throw DataError(K::Validation, "extra must be non-negative");

    std::mt19937_64 rng(seeding::derive(options.seed, set.source_id, 0x70757a7a6c65ULL));

    std::vector<Fragment> relatives;
    for (const auto& f : set.fragments) {
        if (f.truth.kind == GroundTruth::Kind::Relative) relatives.push_back(f);
    }
    std::shuffle(relatives.begin(), relatives.end(), rng);
    relatives.erase(relatives.begin(), relatives.begin() + std::min<std::ptrdiff_t>(options.missing, std::ssize(relatives)));

    std::vector<const FragmentSet*> donors;
    for (const auto& other : pool) {
        if (other.source_id != set.source_id && !other.fragments.empty()) donors.push_back(&other);
    }
    if (options.extra > 0 && donors.empty()) {
        throw DataError(K::Validation, "no other fragment sets available to draw outsiders from");
    }
    std::vector<Fragment> roster = relatives;
    std::unordered_set<std::string> taken;
    for (const auto& f : set.fragments) taken.insert(f.id);
    int attempts = 0;
    while (static_cast<int>(roster.size()) < static_cast<int>(relatives.size()) + options.extra) {
        if (++attempts > 1000 * (options.extra + 1)) throw DataError(K::Validation, "not enough distinct outsiders");
        const FragmentSet& donor = *donors[std::uniform_int_distribution<std::size_t>(0, donors.size() - 1)(rng)];
        const Fragment& pick = donor.fragments[std::uniform_int_distribution<std::size_t>(0, donor.fragments.size() - 1)(rng)];
        if (!taken.insert(pick.id).second) continue;
        Fragment outsider = pick;
        outsider.truth = GroundTruth::outsider();
        roster.push_back(std::move(outsider));
    }

    Puzzle puzzle;
    puzzle.id = set.source_id;
    puzzle.source_id = set.source_id;
    if (options.central_known) {
        puzzle.central = set.central();
    } else {
        roster.push_back(set.central());
    }
    std::shuffle(roster.begin(), roster.end(), rng);

    puzzle.spec.num_positions = RelativePosition::kCount;
    puzzle.spec.central_known = options.central_known;
    puzzle.spec.allow_empty_positions = options.allow_empty;
    puzzle.spec.allow_unused_fragments = options.allow_empty || options.extra > 0;
    if (puzzle.central) puzzle.spec.central_id = puzzle.central->id;
    for (const auto& f : roster) puzzle.spec.fragment_ids.push_back(f.id);
    puzzle.roster = std::move(roster);
    check_spec(puzzle.spec);
    return puzzle;
}

Raster render_reassembly(const Reassembly& reassembly, std::span<const Fragment> fragments,
                         const RenderOptions& options) {
    Raster canvas(kImageSize, kImageSize, options.fill);
    auto lookup = [&](const FragmentId& id) -> const Fragment& {
        for (const auto& f : fragments) {
            if (f.id == id) return f;
        }
        throw DataError(DataError::Kind::UnknownId, "no raster for fragment '" + id + "'");
    };
    auto draw = [&](const FragmentId& id, const GroundTruth& slot) {
        const Fragment& f = lookup(id);
        const PixelOffset at = nominal_anchor(slot);
        canvas.blit(f.raster, at.x, at.y);
        if (!options.truth) return;
        const auto it = options.truth->find(id);
        const bool correct = it != options.truth->end() && it->second == slot;
        if (correct) return;
        // 3 px frame inside the 7 px margin around the fragment
        constexpr int gap = 1;
        constexpr int width = 3;
        const int x0 = at.x - gap - width;
        const int y0 = at.y - gap - width;
        const int outer = kFragmentSize + 2 * (gap + width);
        canvas.fill_rect(x0, y0, outer, width, options.outline);
        canvas.fill_rect(x0, y0 + outer - width, outer, width, options.outline);
        canvas.fill_rect(x0, y0, width, outer, options.outline);
        canvas.fill_rect(x0 + outer - width, y0, width, outer, options.outline);
    };
    if (reassembly.central_fragment) draw(*reassembly.central_fragment, GroundTruth::central());
    for (const auto& [position, id] : reassembly.placements) {
        if (position < 0 || position >= RelativePosition::kCount) {
            throw DataError(DataError::Kind::Validation, "position " + std::to_string(position) + " is not on the 3x3 grid");
        }
        draw(id, GroundTruth::relative(position));
    }
    return canvas;
}

}  // namespace reassembly
