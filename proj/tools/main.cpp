#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ambisphere/pipeline.hpp"

namespace fs = std::filesystem;
using namespace ambisphere;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitInternal = 1;

int cmd_synth(const std::string& spec_path, const std::string& out_dir, uint64_t seed) {
    const SceneSpec spec = scene_from_json_file(spec_path);
    render_scene(spec, seed, out_dir);
    std::cout << "wrote " << spec.duration_s * kFramesPerSecond << " frames, audio.wav and "
              << "annotations.json to " << out_dir << "\n";
    return 0;
}

int cmd_predict(const std::string& frames_dir, const std::string& audio_path,
                const std::string& out_dir, const RunConfig& cfg) {
    run_predict(frames_dir, audio_path, cfg, out_dir);
    std::cout << "wrote per-second volumes, sources.json and manifest.json to " << out_dir
              << "\n";
    return 0;
}

int cmd_encode(const std::string& audio_path, const std::string& out_path,
               const std::string& sources_path, const std::string& annotations_path,
               bool ambix) {
    AudioSignal audio = read_wav(audio_path);
    if (audio.sample_rate != kAudioSampleRate) {
        audio = resample_linear(audio, kAudioSampleRate);
    }
    const int seconds = static_cast<int>(
        (audio.length() + kAudioSampleRate - 1) / kAudioSampleRate);

    std::vector<std::vector<SourceEstimate>> per_second;
    if (!sources_path.empty()) {
        per_second = read_sources_json(sources_path);
    } else {
        per_second = sources_from_annotations(read_annotations(annotations_path), seconds);
    }
    per_second.resize(static_cast<size_t>(seconds));

    const BFormatSignal b = encode_clip(audio, per_second);
    if (ambix) {
        write_wav_f32(to_ambix_channels(b), b.sample_rate, out_path);
    } else {
        write_bformat_wav(b, out_path);
    }
    for (int s = 0; s < seconds; ++s) {
        std::cout << "second " << s << ": " << per_second[static_cast<size_t>(s)].size()
                  << " sources\n";
    }
    std::cout << "wrote " << (ambix ? "AmbiX" : "B-format") << " WAV to " << out_path << "\n";
    return 0;
}

int cmd_evaluate(const std::string& run_dir, const std::string& annotations_path,
                 const std::string& out_dir, std::vector<double> epsilons,
                 double spread_deg) {
    if (!fs::is_directory(run_dir)) {
        throw std::runtime_error(run_dir + ": run directory not found");
    }
    EvalReport report;
    report.epsilons = epsilons;
    if (fs::exists(fs::path(run_dir) / "manifest.json")) {
        report.rows.push_back(evaluate_run(run_dir, annotations_path, epsilons, spread_deg));
    }
    fs::create_directories(out_dir);
    const std::string table = report_to_table(report);
    std::ofstream json_out(fs::path(out_dir) / "report.json", std::ios::trunc);
    json_out << report_to_json(report);
    std::ofstream table_out(fs::path(out_dir) / "report.txt", std::ios::trunc);
    table_out << table;
    std::cout << table;
    if (report.rows.empty()) {
        std::cout << "(no predictions found in " << run_dir << "; empty report)\n";
    }
    return 0;
}

int cmd_info() {
    std::cout << "ambisphere 0.1.0\n"
              << "visual feature grid: " << kFeatureGrid << "x" << kFeatureGrid << "x"
              << kVisualChannels << "\n"
              << "audio feature dim:   " << kAudioFeatureDim << "\n"
              << "audio sample rate:   " << kAudioSampleRate << " Hz\n"
              << "frames per second:   " << kFramesPerSecond << "\n"
              << "mel bands/frames:    " << kMelBands << "/" << kMelFrames << "\n"
              << "models:              ssm, att\n"
              << "projections:         equirect, cubemap3x2\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spherical sound-source localization and first-order Ambisonics encoding"};
    app.require_subcommand(1);

    std::string spec_path, frames_dir, audio_path, sources_path, annotations_path;
    std::string run_dir, out_path;
    RunConfig cfg;
    std::string model_name = "ssm";
    std::string projection_name = "equirect";
    std::vector<double> epsilons = {0.6, 0.5, 0.4};
    bool ambix = false;

    CLI::App* synth = app.add_subcommand("synth", "Render a synthetic scene directory");
    synth->add_option("--spec", spec_path, "Scene spec JSON")->required();
    synth->add_option("--out", out_path, "Output directory")->required();
    synth->add_option("--seed", cfg.seed, "Deterministic seed")->capture_default_str();

    CLI::App* predict = app.add_subcommand("predict", "Localize sources per second");
    predict->add_option("--frames", frames_dir, "Directory of frame_%06d.ppm")->required();
    predict->add_option("--audio", audio_path, "Input WAV")->required();
    predict->add_option("--out", out_path, "Output run directory")->required();
    predict->add_option("--model", model_name, "Prediction head: ssm or att")
        ->capture_default_str();
    predict->add_option("--projection", projection_name, "equirect or cubemap3x2")
        ->capture_default_str();
    predict->add_option("--seed", cfg.seed, "Deterministic seed")->capture_default_str();
    predict->add_option("--epsilon", cfg.epsilon, "Volume threshold in [0,1]")
        ->capture_default_str();
    predict->add_option("--resolution", cfg.resolution, "Voxel grid resolution")
        ->capture_default_str();
    predict->add_flag("--oracle-embedding", cfg.oracle_embedding,
                      "Use the luminance oracle instead of the conv embedding");
    predict->add_option("--jobs", cfg.jobs, "Worker threads over seconds")
        ->capture_default_str();

    CLI::App* encode = app.add_subcommand("encode", "Encode audio to 4-channel B-format");
    encode->add_option("--audio", audio_path, "Input mono/stereo WAV")->required();
    encode->add_option("--out", out_path, "Output 4-channel WAV")->required();
    CLI::Option* src_opt = encode->add_option("--sources", sources_path,
                                              "sources.json from a predict run");
    encode->add_option("--annotations", annotations_path, "Ground-truth annotation JSON")
        ->excludes(src_opt);
    encode->add_flag("--ambix", ambix, "Emit AmbiX channel order (W,Y,Z,X; W rescaled)");

    CLI::App* evaluate = app.add_subcommand("evaluate", "Score a predict run against annotations");
    evaluate->add_option("--run", run_dir, "Predict run directory")->required();
    evaluate->add_option("--annotations", annotations_path, "Ground-truth annotation JSON")
        ->required();
    evaluate->add_option("--out", out_path, "Report output directory")->required();
    evaluate->add_option("--epsilon", epsilons, "Threshold sweep")->capture_default_str();
    evaluate->add_option("--spread-deg", cfg.spread_deg,
                         "Angular radius of ground-truth cones, degrees")
        ->capture_default_str();

    app.add_subcommand("info", "Print build and pipeline constants");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (synth->parsed()) return cmd_synth(spec_path, out_path, cfg.seed);
        if (predict->parsed()) {
            cfg.model = model_from_string(model_name);
            cfg.projection = projection_from_string(projection_name);
            return cmd_predict(frames_dir, audio_path, out_path, cfg);
        }
        if (encode->parsed()) {
            if (sources_path.empty() && annotations_path.empty()) {
                std::cerr << "encode: one of --sources or --annotations is required\n";
                return kExitUsage;
            }
            return cmd_encode(audio_path, out_path, sources_path, annotations_path, ambix);
        }
        if (evaluate->parsed()) {
            return cmd_evaluate(run_dir, annotations_path, out_path, epsilons,
                                cfg.spread_deg);
        }
        return cmd_info();
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::runtime_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
}
