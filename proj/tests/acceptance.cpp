// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.
#include "oracles.hpp"

#include "stroketrace/binarize.hpp"
#include "stroketrace/cli.hpp"
#include "stroketrace/metrics.hpp"
#include "stroketrace/pipeline.hpp"
#include "stroketrace/synth.hpp"
#include "stroketrace/width.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace stroketrace;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

int failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
    std::cout << (pass ? "PASS" : "FAIL") << "  criterion " << id << "  " << name << "  " << detail << std::endl;
    failures += pass ? 0 : 1;
}

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, pattern, a, b, c, d);
    return buf;
}

int run_cli_quiet(std::vector<std::string> args, std::string* out = nullptr) {
    args.insert(args.begin(), "stroketrace");
    std::vector<const char*> argv;
    for (const std::string& a : args) {
        argv.push_back(a.c_str());
    }
    std::ostringstream o;
    std::ostringstream e;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), o, e);
    if (out != nullptr) {
        *out = o.str();
    }
    return code;
}

// 1 ------------------------------------------------------------------------

void oracle_exactness() {
    constexpr int kInstances = 200;
    const auto started = Clock::now();
    std::mt19937_64 rng(20240101);
    std::uniform_int_distribution<int> side(1, 24);
    int mismatches[5] = {0, 0, 0, 0, 0};

    for (int i = 0; i < kInstances; ++i) {
        const GrayImage img = oracle::random_gray(rng, side(rng), side(rng), i % 3 == 0 ? 3 : 256);
        mismatches[0] += median_filter_5x5(img) == oracle::median5(img) ? 0 : 1;
    }
    for (int i = 0; i < kInstances; ++i) {
        const BinaryImage img = oracle::random_mask(rng, side(rng), side(rng), (i % 10 + 1) / 11.0);
        mismatches[1] += sectional_widths(img).runs == oracle::row_runs(img) ? 0 : 1;
    }
    for (int i = 0; i < kInstances; ++i) {
        const BinaryImage img = oracle::random_mask(rng, side(rng), side(rng), 0.1);
        TraversalMask mask(img);
        std::vector<bool> visited(img.size(), false);
        std::bernoulli_distribution visit(0.6);
        for (int y = 0; y < img.height(); ++y) {
            for (int x = 0; x < img.width(); ++x) {
                if (img.at(x, y) && visit(rng)) {
                    mask.mark(x, y);
                    visited[static_cast<std::size_t>(y) * img.width() + x] = true;
                }
            }
        }
        const auto got = find_start(img, mask);
        const auto want = oracle::first_unvisited(img, visited);
        mismatches[2] += (got.has_value() == want.has_value() && (!got || *got == *want)) ? 0 : 1;
    }
    std::uniform_int_distribution<int> len(1, 8);
    for (int i = 0; i < kInstances; ++i) {
        const auto a = oracle::random_points(rng, len(rng));
        const auto b = oracle::random_points(rng, len(rng));
        const double want = oracle::dtw_exhaustive(a, b);
        mismatches[3] += std::abs(dtw(a, b) - want) <= 1e-9 * std::max(1.0, want) ? 0 : 1;
    }
    std::uniform_real_distribution<double> pen(1.0, 6.0);
    for (int i = 0; i < kInstances; ++i) {
        ScriptSpec spec;
        spec.width = 8 + side(rng);
        spec.height = 8 + side(rng);
        spec.pen_width = pen(rng);
        spec.jitter_sigma = 0.0;
        for (int s = 0; s < 1 + i % 3; ++s) {
            std::vector<Point> pts = oracle::random_points(rng, 1 + i % 6, 1.0);
            for (Point& q : pts) {
                q.x *= spec.width - 1;
                q.y *= spec.height - 1;
            }
            spec.strokes.push_back(pts);
        }
        const GrayImage img = rasterize(spec).image;
        BinaryImage ink(spec.width, spec.height);
        for (int y = 0; y < spec.height; ++y) {
            for (int x = 0; x < spec.width; ++x) {
                ink.set(x, y, img.at(x, y) == spec.foreground);
            }
        }
        mismatches[4] += ink == oracle::pen_coverage(spec) ? 0 : 1;
    }
    const double elapsed = seconds_since(started);
    const int total = mismatches[0] + mismatches[1] + mismatches[2] + mismatches[3] + mismatches[4];
    std::ostringstream detail;
    detail << kInstances << " instances each; mismatches median=" << mismatches[0] << " widths=" << mismatches[1]
           << " start=" << mismatches[2] << " dtw=" << mismatches[3] << " rasterize=" << mismatches[4] << "; "
           << fmt("%.2f s (limit 30 s)", elapsed);
    report(1, "oracle exactness", total == 0 && elapsed < 30.0, detail.str());
}

// 2 ------------------------------------------------------------------------

void binarization() {
    std::mt19937_64 rng(777);
    std::uniform_int_distribution<int> dark(5, 150);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    int between = 0;
    int midpoint = 0;
    constexpr int kImages = 100;
    for (int i = 0; i < kImages; ++i) {
        ScriptSpec spec;
        spec.width = 96;
        spec.height = 64;
        spec.pen_width = 3.0 + 5.0 * unit(rng);
        spec.foreground = dark(rng);
        spec.background = std::uniform_int_distribution<int>(spec.foreground + 64, 250)(rng);
        spec.jitter_sigma = 8.0;
        spec.seed = rng();
        for (int s = 0; s < 4; ++s) {
            std::vector<Point> pts = oracle::random_points(rng, 4, 1.0);
            for (Point& q : pts) {
                q.x *= spec.width - 1;
                q.y *= spec.height - 1;
            }
            spec.strokes.push_back(pts);
        }
        const BinarizeResult r = binarize(rasterize(spec).image);
        const int t = r.report.threshold;
        between += (spec.foreground < t && t < spec.background) ? 1 : 0;
        midpoint += (r.report.peaks && t == (r.report.peaks->lo + r.report.peaks->hi) / 2) ? 1 : 0;
    }
    report(2, "binarization", between == kImages && midpoint == kImages,
           fmt("threshold between modes %.0f/100, equals floored peak midpoint %.0f/100", between, midpoint));
}

// 3 ------------------------------------------------------------------------

void width_estimates() {
    std::mt19937_64 rng(31337);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double worst_axis = 0.0;
    double worst_diag = 0.0;
    std::ostringstream per_width;
    for (int w = 2; w <= 6; ++w) {
        double axis_err = 0.0;
        double diag_err = 0.0;
        for (int trial = 0; trial < 10; ++trial) {
            for (int diagonal = 0; diagonal <= 1; ++diagonal) {
                ScriptSpec spec;
                spec.width = 140;
                spec.height = 140;
                spec.pen_width = w;
                spec.seed = rng();
                const double ox = 30.0 + 10.0 * unit(rng);
                const double oy = 30.0 + 10.0 * unit(rng);
                if (diagonal == 0) {
                    // rows cross a vertical stroke square on; a horizontal one has no width along a row
                    spec.strokes = {{{ox, 10.0}, {ox, 130.0}}};
                } else {
                    spec.strokes = {{{ox - 20.0, oy - 20.0}, {ox + 70.0, oy + 70.0}}};
                }
                const BinaryImage ink = binarize(rasterize(spec).image).image;
                const double est = average_width(sectional_widths(ink), WidthMode::HistogramEq1, 3).avg_width;
                const double err = std::abs(est - w);
                (diagonal == 0 ? axis_err : diag_err) = std::max(diagonal == 0 ? axis_err : diag_err, err);
            }
        }
        per_width << " w" << w << ":" << fmt("%.2f/%.2f", axis_err, diag_err);
        worst_axis = std::max(worst_axis, axis_err);
        worst_diag = std::max(worst_diag, diag_err);
    }
    report(3, "width estimate", worst_axis <= 1.0 && worst_diag <= 1.5,
           fmt("max |error| vertical %.2f (tol 1.0), diagonal %.2f (tol 1.5);", worst_axis, worst_diag) +
               " per width axis/diag" + per_width.str());
}

// 4 and 7b -----------------------------------------------------------------

void corpus_bench(double& bench_seconds) {
    CorpusParams params;
    params.count = 50;
    params.seed = 42;
    const auto started = Clock::now();
    const BenchResult r = bench(params);
    bench_seconds = seconds_since(started);
    const CorpusSummary& s = r.summary;
    const double dir = s.direction_accuracy.value_or(0.0);
    const bool pass = s.stroke_count_exact_fraction >= 0.80 && dir >= 0.90 && s.dtw_within_pen_fraction >= 0.85;
    report(4, "end-to-end corpus", pass,
           fmt("stroke count exact %.2f (need 0.80), direction accuracy %.3f (need 0.90), "
               "dtw within pen %.2f (need 0.85)",
               s.stroke_count_exact_fraction, dir, s.dtw_within_pen_fraction));
}

// 5 ------------------------------------------------------------------------

void four_strokes() {
    ScriptSpec spec;
    spec.width = 220;
    spec.height = 120;
    spec.pen_width = 4.0;
    spec.noise = 0.01;
    spec.seed = 4;
    spec.strokes = {
        {{20.0, 20.0}, {22.0, 50.0}, {25.0, 80.0}, {30.0, 100.0}},
        {{55.0, 25.0}, {75.0, 35.0}, {90.0, 55.0}, {100.0, 85.0}},
        {{120.0, 20.0}, {122.0, 60.0}, {126.0, 95.0}, {150.0, 98.0}, {170.0, 96.0}},
        {{160.0, 20.0}, {180.0, 30.0}, {200.0, 45.0}},
    };
    const SynthSample sample = rasterize(spec);
    const ConvertResult converted = convert(sample.image, {}, "four");
    const EvalReport r = evaluate(sample.truth, converted.trace);
    int correct = 0;
    for (const MatchedPair& m : r.matched_pairs) {
        correct += m.direction_correct ? 1 : 0;
    }
    report(5, "four disjoint strokes", r.recovered_strokes == 4 && r.matched_pairs.size() == 4 && correct == 4,
           fmt("recovered %.0f strokes, matched %.0f, directions correct %.0f", r.recovered_strokes,
               static_cast<double>(r.matched_pairs.size()), correct));
}

// 6 ------------------------------------------------------------------------

void determinism(const fs::path& dir) {
    CorpusParams params;
    params.count = 3;
    params.seed = 42;
    save_image(corpus_item(params, 2).image, dir / "in.pgm");
    bool same = true;
    std::string first;
    for (int round = 0; round < 2; ++round) {
        const std::string out = (dir / ("trace" + std::to_string(round) + ".json")).string();
        const std::string svg = (dir / ("trace" + std::to_string(round) + ".svg")).string();
        same = same && run_cli_quiet({"convert", (dir / "in.pgm").string(), "-o", out, "--svg", svg}) == 0;
    }
    same = same && read_file(dir / "trace0.json") == read_file(dir / "trace1.json") &&
           read_file(dir / "trace0.svg") == read_file(dir / "trace1.svg");

    std::string bench_a;
    std::string bench_b;
    same = same &&
           run_cli_quiet({"bench", "--count", "50", "--seed", "42", "--rows", (dir / "rows0.json").string()},
                         &bench_a) == 0 &&
           run_cli_quiet({"bench", "--count", "50", "--seed", "42", "--rows", (dir / "rows1.json").string()},
                         &bench_b) == 0;
    same = same && bench_a == bench_b && read_file(dir / "rows0.json") == read_file(dir / "rows1.json");
    report(6, "determinism", same, same ? "convert JSON/SVG and bench summary/rows byte-identical across two runs"
                                        : "outputs differ between runs");
}

// 7 ------------------------------------------------------------------------

void performance(const fs::path& dir, double bench_seconds) {
    ScriptSpec spec;
    spec.width = 512;
    spec.height = 256;
    spec.pen_width = 5.0;
    spec.noise = 0.02;
    spec.seed = 512;
    std::mt19937_64 rng(512);
    for (int s = 0; s < 5; ++s) {
        std::vector<Point> pts = oracle::random_points(rng, 6, 1.0);
        for (Point& q : pts) {
            q.x = 10.0 + q.x * 490.0;
            q.y = 10.0 + q.y * 235.0;
        }
        spec.strokes.push_back(pts);
    }
    save_image(rasterize(spec).image, dir / "big.pgm");
    const auto started = Clock::now();
    const int code = run_cli_quiet({"convert", (dir / "big.pgm").string(), "-o", (dir / "big.json").string()});
    const double convert_seconds = seconds_since(started);
    report(7, "performance", code == 0 && convert_seconds < 1.0 && bench_seconds < 60.0,
           fmt("convert 512x256 %.3f s (limit 1 s), bench N=50 %.2f s (limit 60 s)", convert_seconds, bench_seconds));
}

} // namespace

int main() {
    const fs::path dir = fs::temp_directory_path() / "stroketrace_acceptance";
    fs::remove_all(dir);
    fs::create_directories(dir);

    double bench_seconds = 0.0;
    oracle_exactness();
    binarization();
    width_estimates();
    corpus_bench(bench_seconds);
    four_strokes();
    determinism(dir);
    performance(dir, bench_seconds);

    std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
    return failures;
}
