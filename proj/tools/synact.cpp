#include "synact/body/humanoid.hpp"
#include "synact/error.hpp"
#include "synact/formats/clip.hpp"
#include "synact/formats/flow_file.hpp"
#include "synact/formats/motion.hpp"
#include "synact/formats/ply.hpp"
#include "synact/formats/png_io.hpp"
#include "synact/pipeline/generate.hpp"
#include "synact/preprocess/preprocess.hpp"
#include "synact/recon/reconstruction.hpp"
#include "synact/scene/assets.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace synact;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitPartial = 1;
constexpr int kExitConfig = 2;

PipelineConfig config_from(const std::string& path) {
    PipelineConfig cfg = path.empty() ? parse_pipeline_config(default_config_toml(), fs::current_path())
                                      : load_pipeline_config(path);
    apply_environment_overrides(cfg);
    return cfg;
}

ProgressCallback stderr_progress(const char* what) {
    return [what](std::size_t done, std::size_t total) {
        std::fprintf(stderr, "\r%s %zu/%zu", what, done, total);
        if (done == total) std::fputc('\n', stderr);
    };
}

// NumPy .npy v1.0, little-endian float32, C order.
void write_npy(const fs::path& path, const std::vector<std::size_t>& shape, const std::vector<float>& data) {
    std::string dims;
    for (std::size_t i = 0; i < shape.size(); ++i) dims += std::to_string(shape[i]) + (shape.size() == 1 || i + 1 < shape.size() ? ", " : "");
    std::string header = "{'descr': '<f4', 'fortran_order': False, 'shape': (" + dims + "), }";
    const std::size_t total = 10 + header.size() + 1;
    header.append((64 - total % 64) % 64, ' ');
    header += '\n';
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out.write("\x93NUMPY\x01\x00", 8);
    const auto len = static_cast<std::uint16_t>(header.size());
    const char lb[2] = {static_cast<char>(len & 0xff), static_cast<char>(len >> 8)};
    out.write(lb, 2);
    out.write(header.data(), static_cast<std::streamsize>(header.size()));
    out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size() * sizeof(float)));
    if (!out) throw IoError("cannot write " + path.string());
}

int run_generate(const std::string& config_path, const std::string& output, int threads, bool dry_run) {
    PipelineConfig cfg = config_from(config_path);
    if (!output.empty()) cfg.output_root = output;
    if (threads > 0) cfg.threads = threads;
    cfg.validate();
    if (dry_run) {
        const auto tasks = plan_clips(cfg);
        for (const auto& t : tasks) std::printf("%s %016llx\n", t.relative_path().c_str(), static_cast<unsigned long long>(t.seed));
        std::printf("%zu clips\n", tasks.size());
        return kExitOk;
    }
    const GenerateReport r = generate(cfg, stderr_progress("clips"));
    for (const auto& w : r.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
    for (const auto& e : r.manifest.entries)
        if (!e.ok()) std::fprintf(stderr, "failed: %s: %s\n", e.path.c_str(), e.error.c_str());
    std::printf("rendered %zu, resumed %zu, failed %zu; manifest %s\n", r.rendered, r.skipped, r.failed,
                (cfg.output_root / "manifest.json").string().c_str());
    return r.failed ? kExitPartial : kExitOk;
}

int run_flow(const std::string& root, const std::string& config_path, int threads) {
    const PipelineConfig cfg = config_from(config_path);
    const fs::path manifest_path = fs::path(root) / "manifest.json";
    Manifest m = load_manifest(manifest_path);
    const FlowReport r = compute_flows(m, root, cfg.flow, threads > 0 ? threads : cfg.threads, stderr_progress("flows"));
    save_manifest_atomic(manifest_path, m);
    std::printf("computed %zu, kept %zu, failed %zu\n", r.computed, r.skipped, r.failed);
    return r.failed ? kExitPartial : kExitOk;
}

int run_reconstruct(const std::string& input, const std::string& output, bool tum, const std::string& config_path) {
    const PipelineConfig cfg = config_from(config_path);
    cfg.recon.validate();
    const auto frames = load_rgbd_directory(input, tum);
    const ReconResult r = reconstruct(frames, cfg.recon);
    const fs::path out(output);
    fs::create_directories(out);
    write_file_bytes(out / "mesh.ply", write_ply(r.mesh));
    write_file_text(out / "trajectory.txt", format_trajectory(r.trajectory));
    nlohmann::json report;
    report["frames"] = frames.size();
    report["fragments"] = r.fragment_count;
    report["edges"] = r.edge_count;
    report["loop_edges"] = r.loop_edge_count;
    report["final_cost"] = r.final_cost;
    report["vertices"] = r.mesh.vertices.size();
    report["triangles"] = r.mesh.triangles.size();
    report["tracking_lost"] = r.tracking_lost;
    report["warnings"] = r.warnings;
    write_file_text(out / "report.json", report.dump(2) + "\n");
    for (const auto& w : r.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
    std::printf("%zu frames, %zu fragments, %zu edges (%zu loop), cost %.6g, %zu triangles\n", frames.size(),
                r.fragment_count, r.edge_count, r.loop_edge_count, r.final_cost, r.mesh.triangles.size());
    return r.tracking_lost ? kExitPartial : kExitOk;
}

int run_weights(const std::string& root, const std::string& subset, std::optional<double> rgb,
                std::optional<double> flow) {
    const fs::path manifest_path = fs::path(root) / "manifest.json";
    Manifest m = load_manifest(manifest_path);
    if (!subset.empty()) {
        StreamWeights w = m.weights.count(subset) ? m.weights.find(subset)->second : StreamWeights{};
        if (rgb) w.rgb = *rgb;
        if (flow) w.flow = *flow;
        set_weights(m, subset, w);
        save_manifest_atomic(manifest_path, m);
    }
    for (const auto& [k, w] : m.weights) std::printf("%-8s rgb %g flow %g\n", k.c_str(), w.rgb, w.flow);
    return kExitOk;
}

int run_stats(const std::string& root, bool run_audit) {
    const Manifest m = load_manifest(fs::path(root) / "manifest.json");
    std::fputs(format_stats(m).c_str(), stdout);
    if (!run_audit) return kExitOk;
    const auto problems = audit(m, root);
    for (const auto& p : problems) std::printf("audit: %s\n", p.c_str());
    std::printf("audit: %zu problems\n", problems.size());
    return problems.empty() ? kExitOk : kExitPartial;
}

int run_export_png(const std::string& input, const std::string& output) {
    const fs::path in(input);
    if (in.extension() == ".flow") {
        const FlowSequence seq = load_flow(in);
        fs::create_directories(output);
        for (std::size_t i = 0; i < seq.fields.size(); ++i) {
            char name[32];
            std::snprintf(name, sizeof name, "%06zu.png", i);
            write_png(fs::path(output) / name, flow_to_color(seq.fields[i]));
        }
        std::printf("%zu flow images\n", seq.fields.size());
        return kExitOk;
    }
    const auto files = export_png_frames(load_clip(in), output);
    std::printf("%zu frames\n", files.size());
    return kExitOk;
}

int run_preprocess(const std::string& input, const std::string& output, std::uint32_t fps,
                   std::optional<int> crops) {
    const fs::path in(input);
    const ClipContainer clip = fs::is_directory(in) ? load_png_sequence(in, fps) : load_clip(in);
    const auto stacks = preprocess_clip(clip, crops);
    fs::create_directories(output);
    nlohmann::json meta;
    meta["source"] = in.filename().string();
    meta["fps"] = kGeneratedClipFps;
    meta["crops"] = nlohmann::json::array();
    for (std::size_t i = 0; i < stacks.size(); ++i) {
        const auto& s = stacks[i];
        std::vector<float> flat;
        flat.reserve(s.frames.size() * static_cast<std::size_t>(s.width * s.height * 3));
        for (const auto& f : s.frames) flat.insert(flat.end(), f.begin(), f.end());
        const std::string name = "crop_" + std::to_string(i) + ".npy";
        write_npy(fs::path(output) / name,
                  {s.frames.size(), static_cast<std::size_t>(s.height), static_cast<std::size_t>(s.width), 3}, flat);
        meta["crops"].push_back({{"file", name}, {"offset", s.crop_offset}, {"frames", s.frames.size()}});
    }
    write_file_text(fs::path(output) / "crops.json", meta.dump(2) + "\n");
    std::printf("%zu crops of %zu frames\n", stacks.size(), stacks.empty() ? std::size_t{0} : stacks[0].frames.size());
    return kExitOk;
}

int run_fixture_rgbd(const std::string& output, std::size_t frames, double sweep, int size) {
    const Environment room = make_living_room();
    RenderConfig rc;
    rc.width = size;
    rc.height = size;
    rc.shadows = false;
    const DepthSequence seq = render_depth_sequence(room_orbit_scenes(room, frames, 0.8, sweep), rc);
    save_rgbd_directory(output, seq);
    write_file_text(fs::path(output) / "groundtruth.txt", format_trajectory(seq.poses));
    write_file_bytes(fs::path(output) / "room.ply", write_ply(environment_world_mesh(room)));
    std::printf("%zu RGB-D frames in %s\n", frames, output.c_str());
    return kExitOk;
}

int run_fixture_subjects(const std::string& output, std::size_t count) {
    const auto ids = default_subject_ids(count);
    for (std::size_t i = 0; i < ids.size(); ++i) {
        const ProceduralSubject s = make_procedural_subject(ids[i], subject_shape(i), i);
        const fs::path dir = fs::path(output) / ids[i];
        fs::create_directories(dir);
        write_file_text(dir / "rig.json", write_rig(s.body));
        for (const auto& t : s.takes)
            write_file_text(dir / (std::string(to_string(t.action)) + ".json"), write_motion_take(t));
    }
    std::printf("%zu subjects in %s\n", ids.size(), output.c_str());
    return kExitOk;
}

int run_fixture_backgrounds(const std::string& output) {
    const auto bgs = placeholder_backgrounds();
    fs::create_directories(output);
    for (std::size_t i = 0; i < bgs.size(); ++i)
        write_png(fs::path(output) / ("wall_" + std::to_string(i) + ".png"), *bgs[i]);
    std::printf("%zu backgrounds in %s\n", bgs.size(), output.c_str());
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Synthetic human-activity video generator"};
    app.require_subcommand(1);

    std::string config_path, output, root, input, subset;
    int threads = 0;
    bool dry_run = false, tum = false, run_audit = false;
    std::optional<double> rgb_weight, flow_weight;
    std::optional<int> crops;
    std::uint32_t fps = 25;
    std::size_t frames = 100, count = 15;
    double sweep = 120.0;
    int size = 224;

    auto* gen = app.add_subcommand("generate", "Render every clip of the dataset plan");
    gen->add_option("-c,--config", config_path, "TOML config (built-in defaults when omitted)")->check(CLI::ExistingFile);
    gen->add_option("-o,--output", output, "Output root (overrides the config)");
    gen->add_option("-j,--threads", threads, "Worker threads");
    gen->add_flag("--dry-run", dry_run, "Print the clip plan only");

    auto* flow = app.add_subcommand("flow", "Compute TV-L1 flow for every clip of a manifest");
    flow->add_option("root", root, "Dataset root containing manifest.json")->required();
    flow->add_option("-c,--config", config_path, "TOML config for flow parameters")->check(CLI::ExistingFile);
    flow->add_option("-j,--threads", threads, "Worker threads");

    auto* rec = app.add_subcommand("reconstruct", "Reconstruct a mesh from an RGB-D directory");
    rec->add_option("input", input, "Directory with intrinsics.json, color/ and depth/")->required();
    rec->add_option("-o,--output", output, "Output directory")->required();
    rec->add_flag("--tum", tum, "Depth PNGs use the 5000-per-metre scale");
    rec->add_option("-c,--config", config_path, "TOML config for [recon]")->check(CLI::ExistingFile);

    auto* wts = app.add_subcommand("weights", "Show or set per-subset stream weights");
    wts->add_option("root", root, "Dataset root containing manifest.json")->required();
    wts->add_option("--subset", subset, "Method name or 'real'");
    wts->add_option("--rgb", rgb_weight, "RGB stream weight");
    wts->add_option("--flow", flow_weight, "Flow stream weight");

    auto* st = app.add_subcommand("stats", "Per-class and per-method counts");
    st->add_option("root", root, "Dataset root containing manifest.json")->required();
    st->add_flag("--audit", run_audit, "Check that every referenced container parses");

    auto* ex = app.add_subcommand("export-png", "Write the frames of a clip (or flow container) as PNGs");
    ex->add_option("input", input, ".clip or .flow file")->required()->check(CLI::ExistingFile);
    ex->add_option("-o,--output", output, "Output directory")->required();

    auto* pre = app.add_subcommand("preprocess", "Resample, resize, crop and normalize a clip into .npy tensors");
    pre->add_option("input", input, ".clip file or PNG-sequence directory")->required()->check(CLI::ExistingPath);
    pre->add_option("-o,--output", output, "Output directory")->required();
    pre->add_option("--fps", fps, "Frame rate of a PNG-sequence input");
    pre->add_option("--crops", crops, "Crop count (default ceil(W/224))");

    auto* fx = app.add_subcommand("fixtures", "Write procedural test assets");
    fx->require_subcommand(1);
    auto* fx_rgbd = fx->add_subcommand("rgbd", "Rendered RGB-D orbit of the living room with ground truth");
    fx_rgbd->add_option("-o,--output", output)->required();
    fx_rgbd->add_option("--frames", frames);
    fx_rgbd->add_option("--sweep", sweep, "Orbit sweep in degrees");
    fx_rgbd->add_option("--size", size, "Image width and height");
    auto* fx_subj = fx->add_subcommand("subjects", "Procedural rigs and motion takes");
    fx_subj->add_option("-o,--output", output)->required();
    fx_subj->add_option("--count", count);
    auto* fx_bg = fx->add_subcommand("backgrounds", "Six wall textures");
    fx_bg->add_option("-o,--output", output)->required();

    auto* cfg = app.add_subcommand("config", "Print the default TOML config");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*gen) return run_generate(config_path, output, threads, dry_run);
        if (*flow) return run_flow(root, config_path, threads);
        if (*rec) return run_reconstruct(input, output, tum, config_path);
        if (*wts) return run_weights(root, subset, rgb_weight, flow_weight);
        if (*st) return run_stats(root, run_audit);
        if (*ex) return run_export_png(input, output);
        if (*pre) return run_preprocess(input, output, fps, crops);
        if (*fx_rgbd) return run_fixture_rgbd(output, frames, sweep, size);
        if (*fx_subj) return run_fixture_subjects(output, count);
        if (*fx_bg) return run_fixture_backgrounds(output);
        if (*cfg) {
            std::fputs(default_config_toml().c_str(), stdout);
            return kExitOk;
        }
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const ParseError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const ValidationError& e) {
        std::fprintf(stderr, "invalid input: %s\n", e.what());
        return kExitConfig;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitPartial;
    }
    return kExitOk;
}
