#include "stroketrace/cli.hpp"

#include "stroketrace/error.hpp"
#include "stroketrace/pipeline.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace stroketrace {

namespace fs = std::filesystem;

int exit_code_for(const std::exception& e) noexcept {
    if (dynamic_cast<const IoError*>(&e) != nullptr) {
        return kExitIo;
    }
    if (dynamic_cast<const FormatError*>(&e) != nullptr || dynamic_cast<const ValidationError*>(&e) != nullptr ||
        dynamic_cast<const EmptySignature*>(&e) != nullptr) {
        return kExitValidation;
    }
    return kExitInternal;
}

namespace {

struct TuningFlags {
    bool invert = false;
    double truck_scale = 1.0;
    std::string width_mode = "histogram";
    int k = 3;
    bool expert = false;
    std::string steering = "balance";
    TruckProportions proportions;
    TracerParams tracer;
};

void add_tuning_options(CLI::App& cmd, TuningFlags& f) {
    cmd.add_flag("--invert", f.invert, "Treat the lighter histogram peak as ink");
    cmd.add_option("--truck-scale", f.truck_scale, "Track width as a multiple of the average stroke width")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd.add_option("--width-mode", f.width_mode, "Average width statistic")
        ->check(CLI::IsMember({"histogram", "topk"}))
        ->capture_default_str();
    cmd.add_option("--k", f.k, "Number of widths entering the average")->check(CLI::PositiveNumber)->capture_default_str();

    const std::string group = "Expert tracer tunables (require --expert)";
    CLI::Option* expert = cmd.add_flag("--expert", f.expert, "Enable the expert tunables")->group(group);
    const auto tunable = [&](const std::string& name, auto& value, const std::string& help) {
        cmd.add_option(name, value, help)->group(group)->needs(expert)->capture_default_str();
    };
    cmd.add_option("--steering", f.steering, "Steering law")
        ->check(CLI::IsMember({"balance", "proportional"}))
        ->group(group)
        ->needs(expert)
        ->capture_default_str();
    tunable("--gain", f.tracer.gain, "Proportional steering gain, rad per unit imbalance");
    tunable("--max-turn", f.tracer.max_turn, "Heading clamp per tick, rad");
    tunable("--turn-candidates", f.tracer.turn_candidates, "Balance law headings tried per side");
    tunable("--turn-penalty", f.tracer.turn_penalty, "Balance law cost per radian turned");
    tunable("--junction-fill", f.tracer.junction_fill, "Wheel fill at which the heading is held");
    tunable("--junction-density", f.tracer.junction_density, "Footprint road density at which the heading is held");
    tunable("--heading-probes", f.tracer.heading_probes, "Directions probed for the initial heading");
    tunable("--residue-fraction", f.tracer.residue_fraction, "Share of a leftover piece hugging covered road");
    tunable("--spur-lookaheads", f.tracer.spur_lookaheads, "Spur length limit in lookaheads");
    tunable("--runaway-factor", f.tracer.runaway_factor, "Tick budget per foreground pixel and step");
    tunable("--wheel-ratio", f.proportions.wheel_radius, "Wheel radius / track width");
    tunable("--step-ratio", f.proportions.step, "Step / track width");
    tunable("--lookahead-ratio", f.proportions.lookahead, "Lookahead / track width");
}

ConvertOptions to_convert_options(const TuningFlags& f) {
    ConvertOptions o;
    o.invert = f.invert;
    o.truck_scale = f.truck_scale;
    o.width_mode = parse_width_mode(f.width_mode);
    o.k = f.k;
    o.proportions = f.proportions;
    o.tracer = f.tracer;
    o.tracer.law = f.steering == "proportional" ? SteeringLaw::Proportional : SteeringLaw::Balance;
    if (o.tracer.max_turn <= 0.0) {
        throw ValidationError("max_turn", "--max-turn must be positive");
    }
    if (o.tracer.heading_probes < 1) {
        throw ValidationError("heading_probes", "--heading-probes must be at least 1");
    }
    if (o.tracer.turn_candidates < 1) {
        throw ValidationError("turn_candidates", "--turn-candidates must be at least 1");
    }
    if (o.proportions.step <= 0.0 || o.proportions.wheel_radius <= 0.0 || o.proportions.lookahead <= 0.0) {
        throw ValidationError("proportions", "truck ratios must be positive");
    }
    return o;
}

std::string dump(const nlohmann::json& j) {
    return j.dump(2) + "\n";
}

void emit(const std::string& path, const std::string& bytes, std::ostream& out) {
    if (path.empty() || path == "-") {
        out << bytes;
    } else {
        write_file_atomic(path, bytes);
    }
}

OnlineTrace load_trace(const fs::path& path) {
    return trace_from_json(read_file(path));
}

// ---- convert

struct ConvertFlags {
    std::string input;
    std::string output;
    std::string svg;
    std::string csv;
    std::string debug_dir;
    int snapshot_every = 100;
    TuningFlags tuning;
};

GrayImage render_traversal(const TraversalMask& mask) {
    const BinaryImage& road = mask.road();
    GrayImage img(road.width(), road.height(), 255);
    for (int y = 0; y < road.height(); ++y) {
        for (int x = 0; x < road.width(); ++x) {
            if (road.at(x, y)) {
                img.at(x, y) = mask.visited(x, y) ? 0 : 160;
            }
        }
    }
    return img;
}

std::string stage_name(const char* prefix, long long n, const char* suffix) {
    std::ostringstream s;
    s << prefix << std::setw(6) << std::setfill('0') << n << suffix;
    return s.str();
}

int cmd_convert(const ConvertFlags& f, std::ostream& out) {
    const ConvertOptions options = to_convert_options(f.tuning);
    const GrayImage image = load_image(f.input);

    std::vector<std::pair<std::string, GrayImage>> snapshots;
    GrayImage traversed;
    long long tick = 0;
    TickObserver observer;
    if (!f.debug_dir.empty()) {
        const long long every = std::max(1, f.snapshot_every);
        observer = [&](const TraversalMask& mask, const TruckState&) {
            if (tick % every == 0) {
                snapshots.emplace_back(stage_name("c_traversal_", tick, ".pgm"), render_traversal(mask));
            }
            ++tick;
            traversed = render_traversal(mask);
        };
    }

    const ConvertResult result = convert(image, options, fs::path(f.input).filename().string(), observer);
    const std::string json = to_json(result.trace);

    if (!f.debug_dir.empty()) {
        const fs::path dir(f.debug_dir);
        std::error_code ec;
        fs::create_directories(dir, ec);
        if (ec) {
            throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
        }
        write_file_atomic(dir / "a_original.pgm", encode_pgm(image));
        write_file_atomic(dir / "a_filtered.pgm", encode_pgm(result.filtered));
        write_file_atomic(dir / "b_binarized.pgm", encode_pgm(result.binary.image));
        nlohmann::json stages;
        stages["histogram"] = result.binary.report;
        if (result.width) {
            nlohmann::json support = nlohmann::json::array();
            for (const auto& [w, n] : result.width->support) {
                support.push_back({w, n});
            }
            stages["width"] = {{"avg_width", quantize(result.width->avg_width)},
                               {"mode", to_string(result.width->mode)},
                               {"k", result.width->k},
                               {"support", support}};
        } else {
            stages["width"] = nullptr;
        }
        if (result.geometry) {
            stages["truck"] = {{"track_width", quantize(result.geometry->track_width)},
                               {"wheel_radius", quantize(result.geometry->wheel_radius)},
                               {"step", quantize(result.geometry->step)},
                               {"lookahead", quantize(result.geometry->lookahead)}};
        } else {
            stages["truck"] = nullptr;
        }
        stages["ticks"] = tick;
        write_file_atomic(dir / "stages.json", dump(stages));
        for (const auto& [name, snap] : snapshots) {
            write_file_atomic(dir / name, encode_pgm(snap));
        }
        if (traversed.empty()) {
            traversed = to_gray(result.binary.image);
        }
        write_file_atomic(dir / "d_traversed.pgm", encode_pgm(traversed));
        SvgOptions svg;
        svg.underlay = to_gray(result.binary.image);
        write_file_atomic(dir / "e_overlay.svg", to_svg(result.trace, svg));
    }
    if (!f.svg.empty()) {
        SvgOptions svg;
        svg.underlay = image;
        write_file_atomic(f.svg, to_svg(result.trace, svg));
    }
    if (!f.csv.empty()) {
        write_file_atomic(f.csv, to_csv(result.trace));
    }
    emit(f.output, json, out);
    return kExitOk;
}

// ---- synth

struct SynthFlags {
    std::string spec;
    std::string image;
    std::string truth;
    int corpus = 0;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
};

int cmd_synth(const SynthFlags& f) {
    if (!f.spec.empty()) {
        if (f.image.empty() || f.truth.empty()) {
            throw ValidationError("output", "--spec needs both --image and --truth");
        }
        ScriptSpec spec = spec_from_json(read_file(f.spec));
        if (f.seed) {
            spec.seed = *f.seed;
        }
        const SynthSample sample = rasterize(spec);
        const std::string image = encode_pgm(sample.image);
        const std::string truth = to_json(sample.truth);
        write_file_atomic(f.image, image);
        write_file_atomic(f.truth, truth);
        return kExitOk;
    }
    if (f.corpus < 1 || f.out_dir.empty()) {
        throw ValidationError("corpus", "give --spec, or --corpus N (N >= 1) with --out-dir");
    }
    CorpusParams params;
    params.count = f.corpus;
    params.seed = f.seed.value_or(params.seed);
    const fs::path dir(f.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
    }
    for (int i = 0; i < params.count; ++i) {
        const CorpusItem item = corpus_item(params, i);
        write_file_atomic(dir / (item.name + ".pgm"), encode_pgm(item.image));
        write_file_atomic(dir / (item.name + ".truth.json"), to_json(item.truth));
        write_file_atomic(dir / (item.name + ".spec.json"), spec_to_json(item.spec));
    }
    return kExitOk;
}

// ---- eval

struct EvalFlags {
    std::string truth;
    std::string recovered;
    std::string truth_dir;
    std::string recovered_dir;
    std::string output;
    double match_threshold_scale = 3.0;
};

constexpr std::string_view kTruthSuffix = ".truth.json";

int cmd_eval(const EvalFlags& f, std::ostream& out) {
    EvalOptions options;
    options.match_threshold_scale = f.match_threshold_scale;

    if (!f.truth.empty() || !f.recovered.empty()) {
        if (f.truth.empty() || f.recovered.empty()) {
            throw ValidationError("input", "--truth and --recovered go together");
        }
        const EvalReport report = evaluate(load_trace(f.truth), load_trace(f.recovered), options);
        emit(f.output, dump(report), out);
        return kExitOk;
    }
    if (f.truth_dir.empty() || f.recovered_dir.empty()) {
        throw ValidationError("input", "give --truth/--recovered or --truth-dir/--recovered-dir");
    }

    std::vector<std::string> names;
    std::error_code ec;
    fs::directory_iterator it(f.truth_dir, ec);
    if (ec) {
        throw IoError("cannot read directory " + f.truth_dir + ": " + ec.message());
    }
    for (const fs::directory_entry& entry : it) {
        const std::string file = entry.path().filename().string();
        if (entry.is_regular_file() && file.size() > kTruthSuffix.size() && file.ends_with(kTruthSuffix)) {
            names.push_back(file.substr(0, file.size() - kTruthSuffix.size()));
        }
    }
    std::sort(names.begin(), names.end());

    std::vector<CorpusRow> rows;
    for (const std::string& name : names) {
        const OnlineTrace truth = load_trace(fs::path(f.truth_dir) / (name + std::string(kTruthSuffix)));
        const OnlineTrace recovered = load_trace(fs::path(f.recovered_dir) / (name + ".json"));
        rows.push_back({name, truth.avg_width, evaluate(truth, recovered, options)});
    }
    nlohmann::json doc;
    doc["rows"] = rows;
    doc["summary"] = summarize(rows);
    emit(f.output, dump(doc), out);
    return kExitOk;
}

// ---- render

struct RenderFlags {
    std::string trace;
    std::string output;
    std::string underlay;
    double stroke_width = 1.5;
};

int cmd_render(const RenderFlags& f, std::ostream& out) {
    const OnlineTrace trace = load_trace(f.trace);
    SvgOptions options;
    options.stroke_width = f.stroke_width;
    if (!f.underlay.empty()) {
        options.underlay = load_image(f.underlay);
    }
    emit(f.output, to_svg(trace, options), out);
    return kExitOk;
}

// ---- bench

struct BenchFlags {
    int count = 50;
    std::uint64_t seed = 42;
    unsigned threads = 0;
    std::string output;
    std::string rows;
    double match_threshold_scale = 3.0;
    TuningFlags tuning;
};

int cmd_bench(const BenchFlags& f, std::ostream& out, std::ostream& err) {
    CorpusParams params;
    params.count = f.count;
    params.seed = f.seed;
    EvalOptions eval_options;
    eval_options.match_threshold_scale = f.match_threshold_scale;

    const auto started = std::chrono::steady_clock::now();
    const BenchResult result = bench(params, to_convert_options(f.tuning), eval_options, f.threads);
    const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

    for (const BenchItem& item : result.items) {
        err << item.row.name << " " << std::fixed << std::setprecision(4) << item.seconds << " s\n";
    }
    err << "total " << std::fixed << std::setprecision(4) << total << " s\n";

    const std::string summary = dump(result.summary);
    if (!f.rows.empty()) {
        std::vector<CorpusRow> rows;
        for (const BenchItem& item : result.items) {
            rows.push_back(item.row);
        }
        write_file_atomic(f.rows, dump(rows));
    }
    if (!f.output.empty() && f.output != "-") {
        write_file_atomic(f.output, summary);
    }
    out << summary;
    return kExitOk;
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Recover ordered, directed pen strokes from offline script images"};
    app.name("stroketrace");
    app.require_subcommand(1);

    ConvertFlags convert_flags;
    CLI::App* convert = app.add_subcommand("convert", "Trace an image into online strokes");
    convert->add_option("input", convert_flags.input, "PGM or PNG image")->required();
    convert->add_option("-o,--output", convert_flags.output, "Trace JSON (default stdout)");
    convert->add_option("--svg", convert_flags.svg, "Also write an SVG rendering");
    convert->add_option("--csv", convert_flags.csv, "Also write stroke_id,x,y,t rows");
    convert->add_option("--debug-stages", convert_flags.debug_dir, "Directory for the intermediate stages");
    convert->add_option("--snapshot-every", convert_flags.snapshot_every, "Ticks between traversal snapshots")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    add_tuning_options(*convert, convert_flags.tuning);

    SynthFlags synth_flags;
    std::uint64_t synth_seed = 0;
    CLI::App* synth = app.add_subcommand("synth", "Render ground-truth scripts to images");
    synth->add_option("--spec", synth_flags.spec, "ScriptSpec JSON");
    synth->add_option("--image", synth_flags.image, "Output PGM for --spec");
    synth->add_option("--truth", synth_flags.truth, "Output truth JSON for --spec");
    synth->add_option("--corpus", synth_flags.corpus, "Generate N random scripts");
    synth->add_option("--out-dir", synth_flags.out_dir, "Directory for --corpus");
    CLI::Option* synth_seed_opt =
        synth->add_option("--seed", synth_seed, "Seed (overrides the script's; default 42 for corpora)")
            ->envname("STROKETRACE_SEED");
    synth->get_option("--spec")->excludes("--corpus");

    EvalFlags eval_flags;
    CLI::App* eval = app.add_subcommand("eval", "Compare recovered traces with ground truth");
    eval->add_option("--truth", eval_flags.truth, "Truth trace JSON");
    eval->add_option("--recovered", eval_flags.recovered, "Recovered trace JSON");
    eval->add_option("--truth-dir", eval_flags.truth_dir, "Directory of NAME.truth.json files");
    eval->add_option("--recovered-dir", eval_flags.recovered_dir, "Directory of NAME.json files");
    eval->add_option("-o,--output", eval_flags.output, "Report JSON (default stdout)");
    eval->add_option("--match-threshold-scale", eval_flags.match_threshold_scale,
                     "Match threshold in multiples of the pen width")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();

    RenderFlags render_flags;
    CLI::App* render = app.add_subcommand("render", "Draw a trace as SVG");
    render->add_option("trace", render_flags.trace, "Trace JSON")->required();
    render->add_option("-o,--output", render_flags.output, "SVG file (default stdout)");
    render->add_option("--underlay", render_flags.underlay, "Image drawn under the strokes");
    render->add_option("--stroke-width", render_flags.stroke_width, "Line width in pixels")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();

    BenchFlags bench_flags;
    CLI::App* bench_cmd = app.add_subcommand("bench", "Synthesize, convert and score a corpus");
    bench_cmd->add_option("--count", bench_flags.count, "Corpus size")->check(CLI::PositiveNumber)->capture_default_str();
    bench_cmd->add_option("--seed", bench_flags.seed, "Corpus seed")->envname("STROKETRACE_SEED")->capture_default_str();
    bench_cmd->add_option("--threads", bench_flags.threads, "Worker threads (0 = all cores)")->capture_default_str();
    bench_cmd->add_option("-o,--output", bench_flags.output, "Also write the summary here");
    bench_cmd->add_option("--rows", bench_flags.rows, "Write per-item reports here");
    bench_cmd->add_option("--match-threshold-scale", bench_flags.match_threshold_scale,
                          "Match threshold in multiples of the pen width")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    add_tuning_options(*bench_cmd, bench_flags.tuning);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitValidation;
    }

    try {
        if (*convert) {
            return cmd_convert(convert_flags, out);
        }
        if (*synth) {
            if (*synth_seed_opt) {
                synth_flags.seed = synth_seed;
            }
            return cmd_synth(synth_flags);
        }
        if (*eval) {
            return cmd_eval(eval_flags, out);
        }
        if (*render) {
            return cmd_render(render_flags, out);
        }
        return cmd_bench(bench_flags, out, err);
    } catch (const ValidationError& e) {
        err << "stroketrace: " << e.what() << " [" << e.field() << "]\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        err << "stroketrace: " << e.what() << "\n";
        return exit_code_for(e);
    }
}

} // namespace stroketrace
