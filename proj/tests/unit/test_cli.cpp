#include "reassembly/fragmenter.hpp"
#include "reassembly/image.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <fstream>

#include <json.hpp>

using nlohmann::json;
using test_support::run_command;
using test_support::slurp;
using test_support::synthetic_image;
using test_support::TempDir;
namespace fs = std::filesystem;

namespace {

const std::string kExe = REASSEMBLE_EXE;

test_support::CommandResult cli(const std::string& args, const TempDir& scratch) {
    return run_command("'" + kExe + "' " + args, scratch.path());
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

// Three images plus their fragment sets under dir/images and dir/sets.
void fragment_three(const TempDir& dir) {
    fs::create_directories(dir / "images");
    for (int k = 0; k < 3; ++k) {
        reassembly::write_png(dir / "images" / ("img" + std::to_string(k) + ".png"), synthetic_image(300 + k));
    }
    const auto r = cli("fragment " + q(dir / "images") + " " + q(dir / "sets") + " --seed 4", dir);
    REQUIRE_MESSAGE(r.exit_code == 0, r.err);
}

}  // namespace

TEST_CASE("fragment writes one manifest and nine crops per image, reproducibly") {
    TempDir dir("cli-fragment");
    fragment_three(dir);
    int manifests = 0;
    int pngs = 0;
    for (const auto& entry : fs::recursive_directory_iterator(dir / "sets")) {
        if (entry.path().filename() == "manifest.json") ++manifests;
        if (entry.path().extension() == ".png") ++pngs;
    }
    CHECK(manifests == 3);
    CHECK(pngs == 27);

    const std::string first = slurp(dir / "sets" / "img1" / "manifest.json");
    const auto again = cli("fragment " + q(dir / "images") + " " + q(dir / "again") + " --seed 4", dir);
    REQUIRE(again.exit_code == 0);
    CHECK(slurp(dir / "again" / "img1" / "manifest.json") == first);
}

TEST_CASE("fragment warns on empty directories and skips undecodable files") {
    TempDir dir("cli-empty");
    fs::create_directories(dir / "none");
    const auto empty = cli("fragment " + q(dir / "none") + " " + q(dir / "out"), dir);
    CHECK(empty.exit_code == 0);
    CHECK(empty.err.find("warning") != std::string::npos);

    fs::create_directories(dir / "mixed");
    reassembly::write_png(dir / "mixed" / "good.png", synthetic_image(1));
    std::ofstream(dir / "mixed" / "bad.png") << "garbage";
    const auto mixed = cli("fragment " + q(dir / "mixed") + " " + q(dir / "out2"), dir);
    CHECK(mixed.exit_code == 0);
    CHECK(mixed.err.find("bad.png") != std::string::npos);
    CHECK(fs::exists(dir / "out2" / "good" / "manifest.json"));
    CHECK_FALSE(fs::exists(dir / "out2" / "bad"));
}

TEST_CASE("oracle solve and evaluate give perfect accuracy") {
    TempDir dir("cli-solve");
    fragment_three(dir);
    for (const std::string flags :
         {"--spec central-known", "--spec central-unknown", "--allow-empty --extra-fragments 2 --missing 1"}) {
        CAPTURE(flags);
        const auto solved =
            cli("solve " + q(dir / "sets") + " -o " + q(dir / "reports") + " --scorer oracle --solver dijkstra " +
                    flags + " --render",
                dir);
        REQUIRE_MESSAGE(solved.exit_code == 0, solved.err);
        CHECK(fs::exists(dir / "reports" / "img2.png"));
        const json report = json::parse(slurp(dir / "reports" / "img0.report.json"));
        CHECK(report["violations"].empty());
        CHECK(report["result"]["method"] == "dijkstra");

        const auto evaluated = cli("evaluate " + q(dir / "reports") + " " + q(dir / "sets"), dir);
        REQUIRE_MESSAGE(evaluated.exit_code == 0, evaluated.err);
        const json result = json::parse(evaluated.out);
        CHECK(result["reconstruction_accuracy"] == 1.0);
        CHECK(result["position_accuracy"] == 1.0);
        CHECK(result["n_puzzles"] == 3);
        fs::remove_all(dir / "reports");
    }
}

TEST_CASE("score files feed solve and malformed ones are data errors") {
    TempDir dir("cli-scores");
    fragment_three(dir);
    const auto scored =
        cli("score " + q(dir / "sets" / "img0" / "manifest.json") + " -o " + q(dir / "img0.scores.json"), dir);
    REQUIRE_MESSAGE(scored.exit_code == 0, scored.err);
    const auto solved =
        cli("solve --scores " + q(dir / "img0.scores.json") + " -o " + q(dir / "reports") + " --solver dp", dir);
    REQUIRE_MESSAGE(solved.exit_code == 0, solved.err);
    CHECK(fs::exists(dir / "reports" / "img0.report.json"));
    const auto evaluated = cli("evaluate " + q(dir / "reports") + " " + q(dir / "sets"), dir);
    REQUIRE_MESSAGE(evaluated.exit_code == 0, evaluated.err);
    CHECK(json::parse(evaluated.out)["reconstruction_accuracy"] == 1.0);

    const auto rendered = cli("render " + q(dir / "reports" / "img0.report.json") + " " + q(dir / "sets") + " -o " +
                                  q(dir / "img0.png"),
                              dir);
    CHECK(rendered.exit_code == 0);
    CHECK(reassembly::read_image(dir / "img0.png").width() == reassembly::kImageSize);

    json doc = json::parse(slurp(dir / "img0.scores.json"));
    doc["p"][0][2] = 7.0;
    std::ofstream(dir / "bad.scores.json") << doc.dump();
    const auto bad = cli("solve --scores " + q(dir / "bad.scores.json") + " -o " + q(dir / "r2"), dir);
    CHECK(bad.exit_code == 2);
    CHECK(bad.err.find("p[0][2]") != std::string::npos);
}

TEST_CASE("usage errors exit 1") {
    TempDir dir("cli-usage");
    CHECK(cli("", dir).exit_code == 1);
    CHECK(cli("solve", dir).exit_code == 1);
    CHECK(cli("solve x -o y --solver hungarian", dir).exit_code == 1);
    CHECK(cli("count --variant sideways", dir).exit_code == 1);
}

TEST_CASE("count prints formula sizes and refuses oversized materialization") {
    TempDir dir("cli-count");
    const auto known = cli("count --variant known-central -n 8 -p 8 --materialize", dir);
    REQUIRE_MESSAGE(known.exit_code == 0, known.err);
    const json out = json::parse(known.out);
    CHECK(out["nodes"] == 109'602);
    CHECK(out["edges"] == 149'920);
    CHECK(out["materialized"]["nodes"] == 109'602);
    CHECK(out["materialized"]["edges"] == 149'920);

    const auto big = cli("count --variant empty-positions -n 10 -p 8 --materialize", dir);
    CHECK(big.exit_code == 3);
    CHECK(cli("count --variant empty-positions -n 10 -p 8", dir).exit_code == 0);
}
