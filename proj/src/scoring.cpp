#include "reassembly/scoring.hpp"

#include "json_util.hpp"
#include "seeding.hpp"

#include "reassembly/error.hpp"
#include "reassembly/kernels.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <sstream>
#include <unordered_set>

namespace reassembly {

namespace {

const Fragment& candidate_central(const Puzzle& puzzle, int candidate) {
    if (puzzle.spec.central_known) {
        if (!puzzle.central) throw DataError(DataError::Kind::Validation, "puzzle has no central fragment");
        return *puzzle.central;
    }
    return puzzle.roster[static_cast<std::size_t>(candidate)];
}

ScoreTensor empty_tensor(const Puzzle& puzzle) {
    const auto variant = puzzle.spec.central_known ? TensorVariant::KnownCentral : TensorVariant::AllCentrals;
    return ScoreTensor(variant, puzzle.spec.fragment_ids, puzzle.spec.num_positions);
}

}  // namespace

ScoreTensor oracle_score(const Puzzle& puzzle) {
    ScoreTensor t = empty_tensor(puzzle);
    t.enable_outsider();
    for (int c = 0; c < t.candidates(); ++c) {
        const Fragment& central = candidate_central(puzzle, c);
        const bool true_central = central.truth.kind == GroundTruth::Kind::Central;
        for (int r = 0; r < t.rows(); ++r) {
            const Fragment& f = puzzle.roster[static_cast<std::size_t>(t.fragment_of(c, r))];
            if (true_central && f.truth.kind == GroundTruth::Kind::Relative && f.truth.position < t.positions()) {
                t.p(c, r, f.truth.position) = 1.0;
            }
            t.outsider(c, r) = f.source_id != central.source_id ? 1.0 : 0.0;
        }
    }
    return t;
}

ScoreTensor noisy_oracle_score(const Puzzle& puzzle, double sigma, std::uint64_t seed) {
    if (!(sigma >= 0.0)) throw DataError(DataError::Kind::Validation, "noise level must be non-negative");
    ScoreTensor t = oracle_score(puzzle);
    std::mt19937_64 rng(seeding::derive(seed, puzzle.id, 0x6e6f697365ULL));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int c = 0; c < t.candidates(); ++c) {
        for (int r = 0; r < t.rows(); ++r) {
            double top = 0.0;
            for (int j = 0; j < t.positions(); ++j) {
                t.p(c, r, j) += sigma * unit(rng);
                top = std::max(top, t.p(c, r, j));
            }
            if (t.has_outsider()) {
                t.outsider(c, r) += sigma * unit(rng);
                top = std::max(top, t.outsider(c, r));
            }
            if (top <= 0.0) continue;
            for (int j = 0; j < t.positions(); ++j) t.p(c, r, j) /= top;
            if (t.has_outsider()) t.outsider(c, r) /= top;
        }
    }
    return t;
}

namespace {

struct ChannelStats {
    double mean = 0.0;
    double stddev = 0.0;
};

using BandStats = std::array<ChannelStats, 3>;

struct Rect {
    int x, y, w, h;
};

class PlanarFragment {
public:
    explicit PlanarFragment(const Raster& raster) : width_(raster.width()), height_(raster.height()) {
        for (auto& plane : planes_) plane.resize(static_cast<std::size_t>(width_) * height_);
        const auto data = raster.data();
        for (std::size_t k = 0; k < planes_[0].size(); ++k) {
            planes_[0][k] = data[k * 3];
            planes_[1][k] = data[k * 3 + 1];
            planes_[2][k] = data[k * 3 + 2];
        }
    }

    int width() const { return width_; }
    int height() const { return height_; }

    kernels::ByteMoments moments(int channel, const Rect& r) const {
        kernels::ByteMoments total;
        const auto& plane = planes_[static_cast<std::size_t>(channel)];
        for (int y = r.y; y < r.y + r.h; ++y) {
            const auto m = kernels::byte_moments(
                std::span<const std::uint8_t>(plane).subspan(static_cast<std::size_t>(y) * width_ + r.x, r.w));
            total.sum += m.sum;
            total.sum_sq += m.sum_sq;
        }
        return total;
    }

private:
    int width_;
    int height_;
    std::array<std::vector<std::uint8_t>, 3> planes_;
};

// Band of `f` facing direction `pos`: an 8 px strip along an edge, or for
// corners an L of two such strips, each 32 px long from the corner.
BandStats band_stats(const PlanarFragment& f, RelativePosition pos) {
    const int w = f.width();
    const int h = f.height();
    const int b = std::min({kContentBandWidth, w, h});
    const int len = std::min({kContentCornerLength, w, h});
    const int band_y = pos.dy() < 0 ? 0 : h - b;
    const int band_x = pos.dx() < 0 ? 0 : w - b;

    std::vector<Rect> add;
    std::optional<Rect> overlap;
    if (pos.dx() == 0) {
        add.push_back({0, band_y, w, b});
    } else if (pos.dy() == 0) {
        add.push_back({band_x, 0, b, h});
    } else {
        const int run_x = pos.dx() < 0 ? 0 : w - len;
        const int run_y = pos.dy() < 0 ? 0 : h - len;
        add.push_back({run_x, band_y, len, b});
        add.push_back({band_x, run_y, b, len});
        overlap = Rect{band_x, band_y, b, b};
    }

    BandStats out;
    for (int ch = 0; ch < 3; ++ch) {
        std::uint64_t sum = 0;
        std::uint64_t sum_sq = 0;
        std::uint64_t count = 0;
        for (const Rect& r : add) {
            const auto m = f.moments(ch, r);
            sum += m.sum;
            sum_sq += m.sum_sq;
            count += static_cast<std::uint64_t>(r.w) * r.h;
        }
        if (overlap) {
            const auto m = f.moments(ch, *overlap);
            sum -= m.sum;
            sum_sq -= m.sum_sq;
            count -= static_cast<std::uint64_t>(overlap->w) * overlap->h;
        }
        const double n = static_cast<double>(count);
        const double mean = static_cast<double>(sum) / n;
        const double var = std::max(0.0, static_cast<double>(sum_sq) / n - mean * mean);
        out[static_cast<std::size_t>(ch)] = {mean, std::sqrt(var)};
    }
    return out;
}

double band_similarity(const BandStats& a, const BandStats& b) {
    constexpr double kTemperature = 0.02;
    double d = 0.0;
    for (std::size_t ch = 0; ch < 3; ++ch) {
        const double dm = a[ch].mean - b[ch].mean;
        const double ds = a[ch].stddev - b[ch].stddev;
        d += dm * dm + ds * ds;
    }
    d /= 3.0 * 255.0 * 255.0;
    return std::exp(-d / kTemperature);
}

}  // namespace

ScoreTensor content_score(const Puzzle& puzzle) {
    ScoreTensor t = empty_tensor(puzzle);
    if (t.positions() > RelativePosition::kCount) {
        throw DataError(DataError::Kind::Dimension, "content scorer needs the 3x3 geometry (8 positions)");
    }
    auto stats_of = [](const Fragment& f) {
        const PlanarFragment planar(f.raster);
        std::array<BandStats, RelativePosition::kCount> all;
        for (int j = 0; j < RelativePosition::kCount; ++j) all[static_cast<std::size_t>(j)] = band_stats(planar, RelativePosition(j));
        return all;
    };
    std::vector<std::array<BandStats, RelativePosition::kCount>> roster_stats;
    roster_stats.reserve(puzzle.roster.size());
    for (const auto& f : puzzle.roster) roster_stats.push_back(stats_of(f));
    const auto central_stats = puzzle.central ? stats_of(*puzzle.central) : std::array<BandStats, RelativePosition::kCount>{};

    for (int c = 0; c < t.candidates(); ++c) {
        const auto& cs = puzzle.spec.central_known ? central_stats : roster_stats[static_cast<std::size_t>(c)];
        for (int r = 0; r < t.rows(); ++r) {
            const auto& fs = roster_stats[static_cast<std::size_t>(t.fragment_of(c, r))];
            double top = 0.0;
            for (int j = 0; j < t.positions(); ++j) {
                const RelativePosition pos(j);
                const double s = band_similarity(cs[static_cast<std::size_t>(j)], fs[static_cast<std::size_t>(pos.mirror().index())]);
                t.p(c, r, j) = s;
                top = std::max(top, s);
            }
            if (top > 0.0) {
                for (int j = 0; j < t.positions(); ++j) t.p(c, r, j) /= top;
            }
        }
    }
    return t;
}

namespace {

using json_util::json;

const char* variant_name(TensorVariant v) {
    return v == TensorVariant::KnownCentral ? "known_central" : "all_centrals";
}

void dimension_error(const std::string& field, std::size_t expected, std::size_t got) {
    throw DataError(DataError::Kind::Dimension, "field '" + field + "': expected " + std::to_string(expected) +
                                                    " entries, got " + std::to_string(got));
}

double probability(const json& value, const std::string& field, std::string_view name) {
    if (!value.is_number()) json_util::schema_error(field, "expected a number");
    const double x = value.get<double>();
    if (!(x >= 0.0 && x <= 1.0)) {
        std::ostringstream msg;
        msg << "field '" << field << "': " << name << " out of [0,1] (got " << x << ")";
        throw DataError(DataError::Kind::Validation, msg.str());
    }
    return x;
}

const json& array_of(const json& value, const std::string& field, std::size_t size) {
    if (!value.is_array()) json_util::schema_error(field, "expected an array");
    if (value.size() != size) dimension_error(field, size, value.size());
    return value;
}

// Reads a [candidates][rows] array (or [rows] for a known central).
void read_row_values(const json& doc, const std::string& key, ScoreTensor& t,
                     double& (ScoreTensor::*slot)(int, int)) {
    const json& root = doc.at(key);
    auto read_rows = [&](const json& rows, int c, const std::string& field) {
        array_of(rows, field, static_cast<std::size_t>(t.rows()));
        for (int r = 0; r < t.rows(); ++r) {
            const std::string f = field + "[" + std::to_string(r) + "]";
            (t.*slot)(c, r) = probability(rows[static_cast<std::size_t>(r)], f, key);
        }
    };
    if (t.variant() == TensorVariant::KnownCentral) {
        read_rows(root, 0, key);
        return;
    }
    array_of(root, key, static_cast<std::size_t>(t.candidates()));
    for (int c = 0; c < t.candidates(); ++c) {
        read_rows(root[static_cast<std::size_t>(c)], c, key + "[" + std::to_string(c) + "]");
    }
}

}  // namespace

ScoreTensor parse_score_tensor(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw DataError(DataError::Kind::Parse, e.what());
    }
    if (!doc.is_object()) json_util::schema_error("<root>", "expected an object");
    static const std::unordered_set<std::string> kKnown{"version", "variant", "fragments", "positions",
                                                        "p",       "outsider", "neighbor"};
    for (const auto& [key, _] : doc.items()) {
        if (!kKnown.contains(key)) json_util::schema_error(key, "unknown field");
    }

    if (json_util::get_field<int>(doc, "version") != 1) json_util::schema_error("version", "unsupported version");
    const std::string variant_text = json_util::get_field<std::string>(doc, "variant");
    TensorVariant variant;
    if (variant_text == "known_central") {
        variant = TensorVariant::KnownCentral;
    } else if (variant_text == "all_centrals") {
        variant = TensorVariant::AllCentrals;
    } else {
        json_util::schema_error("variant", "expected \"known_central\" or \"all_centrals\"");
    }

    const json& frag_json = json_util::require(doc, "fragments");
    if (!frag_json.is_array()) json_util::schema_error("fragments", "expected an array");
    std::vector<FragmentId> fragments;
    std::unordered_set<std::string> seen;
    for (std::size_t k = 0; k < frag_json.size(); ++k) {
        const std::string field = "fragments[" + std::to_string(k) + "]";
        fragments.push_back(json_util::get_as<std::string>(frag_json[k], field));
        if (!seen.insert(fragments.back()).second) json_util::schema_error(field, "duplicate id");
    }
    if (fragments.empty()) json_util::schema_error("fragments", "must not be empty");
    const int positions = json_util::get_field<int>(doc, "positions");
    if (positions < 1) json_util::schema_error("positions", "must be at least 1");

    ScoreTensor t(variant, std::move(fragments), positions);
    const json& p = json_util::require(doc, "p");
    auto read_matrix = [&](const json& m, int c, const std::string& field) {
        array_of(m, field, static_cast<std::size_t>(t.rows()));
        for (int r = 0; r < t.rows(); ++r) {
            const std::string row_field = field + "[" + std::to_string(r) + "]";
            const json& row = array_of(m[static_cast<std::size_t>(r)], row_field, static_cast<std::size_t>(positions));
            for (int j = 0; j < positions; ++j) {
                t.p(c, r, j) = probability(row[static_cast<std::size_t>(j)], row_field + "[" + std::to_string(j) + "]", "p");
            }
        }
    };
    if (variant == TensorVariant::KnownCentral) {
        read_matrix(p, 0, "p");
    } else {
        array_of(p, "p", static_cast<std::size_t>(t.candidates()));
        for (int c = 0; c < t.candidates(); ++c) read_matrix(p[static_cast<std::size_t>(c)], c, "p[" + std::to_string(c) + "]");
    }
    if (doc.contains("outsider")) {
        t.enable_outsider();
        read_row_values(doc, "outsider", t, &ScoreTensor::outsider);
    }
    if (doc.contains("neighbor")) {
        t.enable_neighbor();
        read_row_values(doc, "neighbor", t, &ScoreTensor::neighbor);
    }
    return t;
}

ScoreTensor load_score_tensor(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError(DataError::Kind::Io, "cannot open " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    try {
        return parse_score_tensor(buffer.str());
    } catch (const DataError& e) {
        throw DataError(e.kind(), path.string() + ": " + e.what());
    }
}

std::string dump_score_tensor(const ScoreTensor& t) {
    auto matrix = [&](int c) {
        json m = json::array();
        for (int r = 0; r < t.rows(); ++r) {
            const auto row = t.row_values(c, r);
            m.push_back(json(std::vector<double>(row.begin(), row.end())));
        }
        return m;
    };
    auto per_row = [&](auto getter) {
        auto rows_of = [&](int c) {
            json v = json::array();
            for (int r = 0; r < t.rows(); ++r) v.push_back(getter(c, r));
            return v;
        };
        if (t.variant() == TensorVariant::KnownCentral) return rows_of(0);
        json all = json::array();
        for (int c = 0; c < t.candidates(); ++c) all.push_back(rows_of(c));
        return all;
    };

    json doc;
    doc["version"] = 1;
    doc["variant"] = variant_name(t.variant());
    doc["fragments"] = t.fragments();
    doc["positions"] = t.positions();
    if (t.variant() == TensorVariant::KnownCentral) {
        doc["p"] = matrix(0);
    } else {
        json all = json::array();
        for (int c = 0; c < t.candidates(); ++c) all.push_back(matrix(c));
        doc["p"] = all;
    }
    if (t.has_outsider()) doc["outsider"] = per_row([&](int c, int r) { return t.outsider(c, r); });
    if (t.has_neighbor()) doc["neighbor"] = per_row([&](int c, int r) { return t.neighbor(c, r); });
    return doc.dump(2) + "\n";
}

void save_score_tensor(const ScoreTensor& tensor, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError(DataError::Kind::Io, "cannot write " + path.string());
    out << dump_score_tensor(tensor);
    if (!out) throw DataError(DataError::Kind::Io, "cannot write " + path.string());
}

ScoreTensor ScoreFileScorer::score(const Puzzle& puzzle) const {
    ScoreTensor t = load_score_tensor(path_);
    if (t.fragments() != puzzle.spec.fragment_ids) {
        throw DataError(DataError::Kind::Dimension, path_.string() + ": fragment list does not match the puzzle roster");
    }
    return t;
}

namespace {

class OracleScorer final : public Scorer {
public:
    ScoreTensor score(const Puzzle& puzzle) const override { return oracle_score(puzzle); }
};

class NoisyOracleScorer final : public Scorer {
public:
    NoisyOracleScorer(double sigma, std::uint64_t seed) : sigma_(sigma), seed_(seed) {}
    ScoreTensor score(const Puzzle& puzzle) const override { return noisy_oracle_score(puzzle, sigma_, seed_); }

private:
    double sigma_;
    std::uint64_t seed_;
};

class ContentScorer final : public Scorer {
public:
    ScoreTensor score(const Puzzle& puzzle) const override { return content_score(puzzle); }
};

}  // namespace

std::unique_ptr<Scorer> make_scorer(const ScorerConfig& config) {
    switch (config.kind) {
        case ScorerKind::Oracle:
            return std::make_unique<OracleScorer>();
        case ScorerKind::NoisyOracle:
            if (!(config.noise >= 0.0)) throw DataError(DataError::Kind::Validation, "noise level must be non-negative");
            return std::make_unique<NoisyOracleScorer>(config.noise, config.seed);
        case ScorerKind::Content:
            return std::make_unique<ContentScorer>();
    }
    return nullptr;
}

}  // namespace reassembly
