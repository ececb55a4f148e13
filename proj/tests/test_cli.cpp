#include "stroketrace/cli.hpp"
#include "stroketrace/raster.hpp"
#include "stroketrace/synth.hpp"
#include "stroketrace/trace_model.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

using namespace stroketrace;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code = 0;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "stroketrace");
    std::vector<const char*> argv;
    for (const std::string& a : args) {
        argv.push_back(a.c_str());
    }
    std::ostringstream out;
    std::ostringstream err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

fs::path workdir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "stroketrace_cli_tests" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string p(const fs::path& path) {
    return path.string();
}

} // namespace

TEST_CASE("convert a clean bar") {
    const fs::path dir = workdir("bar");
    ScriptSpec spec;
    spec.width = 60;
    spec.height = 30;
    spec.pen_width = 4.0;
    spec.strokes = {{{8.0, 15.0}, {50.0, 15.0}}};
    save_image(rasterize(spec).image, dir / "bar.pgm");

    const Run r = run({"convert", p(dir / "bar.pgm"), "-o", p(dir / "bar.json"), "--svg", p(dir / "bar.svg"), "--csv",
                       p(dir / "bar.csv")});
    REQUIRE(r.code == 0);
    const OnlineTrace t = trace_from_json(read_file(dir / "bar.json"));
    CHECK(t.strokes.size() == 1);
    CHECK(t.width == 60);
    CHECK(fs::exists(dir / "bar.svg"));
    CHECK(read_file(dir / "bar.csv").starts_with("stroke_id,x,y,t\n"));
}

TEST_CASE("convert a blank page") {
    const fs::path dir = workdir("blank");
    save_image(GrayImage(40, 20, 230), dir / "blank.pgm");
    const Run r = run({"convert", p(dir / "blank.pgm")});
    CHECK(r.code == 0);
    CHECK(nlohmann::json::parse(r.out)["strokes"].empty());
}

TEST_CASE("convert a missing file") {
    const Run r = run({"convert", "/no/such/file.pgm", "-o", "/tmp/never-written.json"});
    CHECK(r.code == kExitIo);
    CHECK(r.err.find("/no/such/file.pgm") != std::string::npos);
}

TEST_CASE("flag validation") {
    CHECK(run({"convert", "x.pgm", "--truck-scale", "0"}).code == kExitValidation);
    CHECK(run({"convert", "x.pgm", "--k", "0"}).code == kExitValidation);
    CHECK(run({"convert", "x.pgm", "--gain", "1"}).code == kExitValidation);
    CHECK(run({"frobnicate"}).code == kExitValidation);
    CHECK(run({"--help"}).code == 0);
}

TEST_CASE("debug stages") {
    const fs::path dir = workdir("stages");
    CorpusParams params;
    params.count = 1;
    save_image(corpus_item(params, 0).image, dir / "in.pgm");
    const Run r = run({"convert", p(dir / "in.pgm"), "-o", p(dir / "out.json"), "--debug-stages", p(dir / "dbg"),
                       "--snapshot-every", "20"});
    REQUIRE(r.code == 0);
    for (const char* f : {"a_original.pgm", "a_filtered.pgm", "b_binarized.pgm", "c_traversal_000000.pgm",
                          "d_traversed.pgm", "e_overlay.svg", "stages.json"}) {
        CHECK_MESSAGE(fs::exists(dir / "dbg" / f), f);
    }
    const nlohmann::json stages = nlohmann::json::parse(read_file(dir / "dbg" / "stages.json"));
    CHECK(stages["histogram"]["counts"].size() == 256);
}

TEST_CASE("expert flags reach the tracer") {
    const fs::path dir = workdir("expert");
    CorpusParams params;
    params.count = 1;
    save_image(corpus_item(params, 0).image, dir / "in.pgm");
    const Run a = run({"convert", p(dir / "in.pgm")});
    const Run b = run({"convert", p(dir / "in.pgm"), "--expert", "--steering", "proportional"});
    REQUIRE(a.code == 0);
    REQUIRE(b.code == 0);
    CHECK(a.out != b.out);
}

TEST_CASE("synth from a spec is byte-identical across runs") {
    const fs::path dir = workdir("synth");
    write_file_atomic(dir / "spec.json",
                      R"({"image_size":[40,30],"pen_width":3,"noise":0.01,"seed":5,"strokes":[[[5,5],[30,20]]]})");
    for (const char* n : {"1", "2"}) {
        const Run r = run({"synth", "--spec", p(dir / "spec.json"), "--image", p(dir / (std::string(n) + ".pgm")),
                           "--truth", p(dir / (std::string(n) + ".json"))});
        REQUIRE(r.code == 0);
    }
    CHECK(read_file(dir / "1.pgm") == read_file(dir / "2.pgm"));
    CHECK(read_file(dir / "1.json") == read_file(dir / "2.json"));

    write_file_atomic(dir / "bad.json", R"({"image_size":[40,30],"pen_width":3,"strokes":[[[5,5],[90,20]]]})");
    const Run bad = run({"synth", "--spec", p(dir / "bad.json"), "--image", p(dir / "b.pgm"), "--truth", p(dir / "b.json")});
    CHECK(bad.code == kExitValidation);
    CHECK(bad.err.find("strokes") != std::string::npos);
    CHECK_FALSE(fs::exists(dir / "b.pgm"));
}

TEST_CASE("synth a corpus and evaluate it in batch") {
    const fs::path dir = workdir("corpus");
    REQUIRE(run({"synth", "--corpus", "4", "--seed", "9", "--out-dir", p(dir / "c")}).code == 0);
    fs::create_directories(dir / "r");
    for (int i = 0; i < 4; ++i) {
        const std::string name = "item_00" + std::to_string(i);
        CHECK(fs::exists(dir / "c" / (name + ".spec.json")));
        REQUIRE(run({"convert", p(dir / "c" / (name + ".pgm")), "-o", p(dir / "r" / (name + ".json"))}).code == 0);
    }
    const Run r = run({"eval", "--truth-dir", p(dir / "c"), "--recovered-dir", p(dir / "r")});
    REQUIRE(r.code == 0);
    const nlohmann::json doc = nlohmann::json::parse(r.out);
    CHECK(doc["rows"].size() == 4);
    CHECK(doc["summary"]["items"] == 4);
}

TEST_CASE("eval a single pair") {
    const fs::path dir = workdir("eval");
    REQUIRE(run({"synth", "--corpus", "1", "--out-dir", p(dir)}).code == 0);
    const std::string truth = p(dir / "item_000.truth.json");
    const Run same = run({"eval", "--truth", truth, "--recovered", truth});
    REQUIRE(same.code == 0);
    const nlohmann::json rep = nlohmann::json::parse(same.out);
    CHECK(rep["direction_accuracy"] == 1.0);
    CHECK(rep["mean_dtw_per_point"] == 0.0);

    OnlineTrace other = trace_from_json(read_file(truth));
    other.width += 1;
    write_file_atomic(dir / "other.json", to_json(other));
    CHECK(run({"eval", "--truth", truth, "--recovered", p(dir / "other.json")}).code == kExitValidation);
}

TEST_CASE("render") {
    const fs::path dir = workdir("render");
    REQUIRE(run({"synth", "--corpus", "1", "--out-dir", p(dir)}).code == 0);
    const Run r = run({"render", p(dir / "item_000.truth.json"), "--underlay", p(dir / "item_000.pgm")});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("<svg") != std::string::npos);
}

TEST_CASE("bench summary is deterministic") {
    const Run a = run({"bench", "--count", "4", "--seed", "3"});
    const Run b = run({"bench", "--count", "4", "--seed", "3", "--threads", "3"});
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    const nlohmann::json s = nlohmann::json::parse(a.out);
    for (const char* key : {"items", "stroke_count_exact_fraction", "direction_accuracy", "mean_dtw_per_point",
                            "dtw_within_pen_fraction", "mean_direction_accuracy"}) {
        CHECK_MESSAGE(s.contains(key), key);
    }
    CHECK(a.err.find("total") != std::string::npos);
}
