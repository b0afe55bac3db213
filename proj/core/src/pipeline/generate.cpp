#include "synact/pipeline/generate.hpp"

#include "synact/body/humanoid.hpp"
#include "synact/error.hpp"
#include "synact/formats/flow_file.hpp"
#include "synact/formats/motion.hpp"
#include "synact/formats/ply.hpp"
#include "synact/formats/png_io.hpp"
#include "synact/rng.hpp"

#include "json.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

namespace synact {

using json = nlohmann::json;

std::string ClipTask::relative_path() const {
    return std::string(to_string(method)) + "/" + std::string(to_string(action)) + "/" + subject_id + "_" +
           std::to_string(clip_index) + ".clip";
}

std::uint64_t clip_seed(std::uint64_t master, std::string_view subject, ActionLabel action, AugmentMethod method,
                        std::uint32_t clip_index) {
    return StableHasher().add(master).add(subject).add(to_string(action)).add(to_string(method)).add(clip_index).finish();
}

std::vector<ClipTask> plan_clips(const PipelineConfig& config) {
    std::vector<ClipTask> tasks;
    tasks.reserve(config.subjects.size() * config.actions.size() * config.methods.size() * config.clips_per_action);
    for (std::size_t s = 0; s < config.subjects.size(); ++s)
        for (auto a : config.actions)
            for (auto m : config.methods)
                for (std::uint32_t k = 0; k < config.clips_per_action; ++k) {
                    ClipTask t;
                    t.subject_id = config.subjects[s];
                    t.subject_index = s;
                    t.action = a;
                    t.method = m;
                    t.clip_index = k;
                    t.seed = clip_seed(config.seed, t.subject_id, a, m, k);
                    tasks.push_back(std::move(t));
                }
    return tasks;
}

void write_file_atomic(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
    namespace fs = std::filesystem;
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    write_file_bytes(tmp, bytes);
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) throw IoError("cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

namespace {

std::vector<std::uint8_t> to_bytes(const std::string& s) { return {s.begin(), s.end()}; }

std::unique_ptr<Environment> reconstructed_from_ply(const std::filesystem::path& path, const std::string& name,
                                                    const Affine& placement) {
    auto mesh = std::make_shared<Mesh>(parse_ply(read_file_bytes(path)));
    if (mesh->normals.size() != mesh->vertices.size()) compute_vertex_normals(*mesh);
    auto env = std::make_unique<Environment>();
    env->name = name;
    SceneNode node;
    node.name = name;
    node.mesh = std::move(mesh);
    node.world = placement;
    node.role = NodeRole::Environment;
    env->nodes.push_back(std::move(node));
    return env;
}

Affine placement_of(const ReconstructedSceneSource& src) {
    Affine a = Affine::Identity();
    a.translate(src.translation);
    a.rotate(Eigen::AngleAxisd(deg_to_rad(src.yaw_deg), Vec3d::UnitY()));
    return a;
}

}  // namespace

Environment procedural_reconstructed_room(const std::filesystem::path& cache_dir, std::size_t frames,
                                          const ReconConfig& recon, std::vector<std::string>* warnings) {
    const std::filesystem::path cache = cache_dir / "reconstructed_room.ply";
    if (!std::filesystem::exists(cache)) {
        const Environment room = make_living_room();
        const auto scenes = room_orbit_scenes(room, frames, 0.8, 360.0);
        RenderConfig rc;
        rc.shadows = false;
        const DepthSequence seq = render_depth_sequence(scenes, rc);
        const ReconResult res = reconstruct(frames_from_depth_sequence(seq), recon);
        if (warnings)
            for (const auto& w : res.warnings) warnings->push_back("reconstructed_room: " + w);
        // Reconstruction coordinates are those of the first camera; the
        // known first pose places the mesh back in the room frame.
        const Mesh placed = transformed(res.mesh, Affine(seq.poses.front().matrix()));
        write_file_atomic(cache, write_ply(placed));
    }
    return std::move(*reconstructed_from_ply(cache, "reconstructed_room", Affine::Identity()));
}

AugmentAssets load_assets(const PipelineConfig& config, std::vector<std::string>* warnings) {
    AugmentAssets assets;
    auto warn = [&](const std::string& w) {
        if (warnings) warnings->push_back(w);
    };
    auto uses = [&](AugmentMethod m) {
        return std::find(config.methods.begin(), config.methods.end(), m) != config.methods.end();
    };
    if (uses(AugmentMethod::BgRotation) || uses(AugmentMethod::BgRotationScaleTranslate)) {
        if (config.wall_textures.empty()) {
            assets.backgrounds = placeholder_backgrounds();
        } else {
            for (const auto& p : config.wall_textures) {
                try {
                    assets.backgrounds.push_back(std::make_shared<const Texture>(read_png(config.resolve(p))));
                } catch (const Error& e) {
                    warn("wall texture " + p.string() + ": " + e.what());
                    assets.backgrounds.push_back(nullptr);
                }
            }
        }
    }
    if (uses(AugmentMethod::RoomRotation) || uses(AugmentMethod::RoomMotion)) {
        try {
            if (config.environment == kProceduralLivingRoom)
                assets.room = make_living_room();
            else
                assets.room = load_environment(config.resolve(config.environment), Affine::Identity(),
                                               config.environment_colorable);
        } catch (const Error& e) {
            warn("environment " + config.environment + ": " + e.what());
        }
    }
    if (uses(AugmentMethod::ReconRotation)) {
        for (const auto& src : config.reconstructed) {
            try {
                if (src.source == kProceduralReconstructedRoom) {
                    Environment env = procedural_reconstructed_room(config.output_root / "scenes",
                                                                    config.reconstruction_frames, config.recon, warnings);
                    for (auto& n : env.nodes) n.world = placement_of(src) * n.world;
                    assets.reconstructed.emplace(src.id, std::move(env));
                } else {
                    assets.reconstructed.emplace(
                        src.id, std::move(*reconstructed_from_ply(config.resolve(src.source), src.id, placement_of(src))));
                }
            } catch (const Error& e) {
                warn("reconstructed scene " + src.id + ": " + e.what());
            }
        }
    }
    return assets;
}

namespace {

struct SubjectAssets {
    std::optional<SkinnedBody> body;
    std::map<ActionLabel, MotionTake> takes;
    std::string error;
};

SubjectAssets load_subject(const PipelineConfig& config, std::size_t index) {
    SubjectAssets out;
    const std::string& id = config.subjects[index];
    try {
        if (config.bodies_dir.empty()) {
            ProceduralSubject p = make_procedural_subject(id, subject_shape(index), index);
            out.body = std::move(p.body);
            for (auto& t : p.takes) out.takes.emplace(t.action, std::move(t));
        } else {
            const auto dir = config.resolve(config.bodies_dir) / id;
            out.body = parse_rig(read_file_text(dir / "rig.json"));
            out.body->validate();
            for (auto a : config.actions) {
                MotionTake t = parse_motion_take(read_file_text(dir / (std::string(to_string(a)) + ".json")));
                t.validate();
                if (t.action != a) throw ValidationError("motion take label does not match its file name");
                out.takes.emplace(a, std::move(t));
            }
        }
    } catch (const Error& e) {
        out.error = "subject " + id + ": " + e.what();
    }
    return out;
}

std::string provenance_json(const PipelineConfig& config, const ClipTask& task, const AugmentSpec& spec,
                            double body_height) {
    json p;
    p["version"] = 1;
    p["subject"] = task.subject_id;
    p["action"] = std::string(to_string(task.action));
    p["method"] = std::string(to_string(task.method));
    p["clip_index"] = task.clip_index;
    p["seed"] = std::to_string(task.seed);
    p["spec"] = json::parse(spec_to_json(spec));
    p["body_height"] = body_height;
    p["render"] = {{"width", config.render.width},
                   {"height", config.render.height},
                   {"supersample", config.render.supersample},
                   {"shadows", config.render.shadows},
                   {"shadow_resolution", config.render.shadow_resolution}};
    json assets;
    assets["bodies"] = config.bodies_dir.empty() ? "procedural" : config.bodies_dir.generic_string();
    switch (task.method) {
        case AugmentMethod::BgRotation:
        case AugmentMethod::BgRotationScaleTranslate:
            assets["background"] = config.wall_textures.empty()
                                       ? "procedural:" + std::to_string(*spec.background_index)
                                       : config.wall_textures[static_cast<std::size_t>(*spec.background_index)].generic_string();
            break;
        case AugmentMethod::RoomRotation:
        case AugmentMethod::RoomMotion:
            assets["environment"] = config.environment;
            break;
        case AugmentMethod::ReconRotation:
            for (const auto& r : config.reconstructed)
                if (r.id == *spec.scene_id) assets["scene"] = r.source;
            break;
    }
    p["assets"] = assets;
    return p.dump();
}

std::vector<std::string> scene_ids(const PipelineConfig& config) {
    std::vector<std::string> ids;
    for (const auto& r : config.reconstructed) ids.push_back(r.id);
    return ids;
}

bool flow_matches(const std::filesystem::path& path, std::uint32_t frames) {
    if (frames < 2 || !std::filesystem::exists(path)) return false;
    try {
        return load_flow_header(path).count == frames - 1;
    } catch (const Error&) {
        return false;
    }
}

std::string flow_relative(const std::string& clip_rel) {
    std::filesystem::path p(clip_rel);
    p.replace_extension(".flow");
    return p.generic_string();
}

unsigned worker_count(int requested, std::size_t jobs) {
    unsigned n = requested > 0 ? static_cast<unsigned>(requested) : std::thread::hardware_concurrency();
    return std::max(1u, std::min<unsigned>(n, static_cast<unsigned>(std::max<std::size_t>(jobs, 1))));
}

template <class Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < count; i = next++) fn(i);
    };
    if (threads <= 1) {
        worker();
        return;
    }
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
}

}  // namespace

Manifest load_manifest(const std::filesystem::path& path) { return parse_manifest(read_file_text(path)); }

void save_manifest_atomic(const std::filesystem::path& path, const Manifest& manifest) {
    manifest.validate();
    write_file_atomic(path, to_bytes(write_manifest(manifest)));
}

GenerateReport generate(const PipelineConfig& config, const ProgressCallback& progress) {
    config.validate();
    namespace fs = std::filesystem;
    const fs::path root = config.output_root;
    fs::create_directories(root);

    GenerateReport report;
    const AugmentAssets assets = load_assets(config, &report.warnings);
    std::vector<SubjectAssets> subjects;
    for (std::size_t i = 0; i < config.subjects.size(); ++i) {
        subjects.push_back(load_subject(config, i));
        if (!subjects.back().error.empty()) report.warnings.push_back(subjects.back().error);
    }

    const auto tasks = plan_clips(config);
    const auto ids = scene_ids(config);
    std::vector<ManifestEntry> entries(tasks.size());
    std::vector<int> outcome(tasks.size(), 0);  // 0 rendered, 1 skipped, 2 failed
    std::mutex progress_mutex;
    std::size_t done = 0;

    parallel_for(tasks.size(), worker_count(config.threads, tasks.size()), [&](std::size_t i) {
        const ClipTask& task = tasks[i];
        ManifestEntry& e = entries[i];
        e.path = task.relative_path();
        e.label = task.action;
        e.method = task.method;
        e.subject_id = task.subject_id;
        e.seed = task.seed;
        e.clip_index = task.clip_index;
        try {
            const SubjectAssets& subj = subjects[task.subject_index];
            if (!subj.error.empty()) throw ConfigError(subj.error);
            auto take = subj.takes.find(task.action);
            if (take == subj.takes.end()) throw ConfigError("no motion take for " + std::string(to_string(task.action)));
            Rng rng(task.seed);
            const AugmentSpec spec = sample_spec(task.method, rng, ids);
            const RealizedClip realized = realize(spec, assets, *subj.body, take->second);
            const std::string prov = provenance_json(config, task, spec, realized.body_height);

            const fs::path clip_path = root / e.path;
            fs::path side = clip_path;
            side.replace_extension(".json");
            bool resumed = false;
            if (fs::exists(clip_path) && fs::exists(side)) {
                try {
                    if (read_file_text(side) == prov + "\n") {
                        e.frame_count = load_clip_header(clip_path).frame_count;
                        resumed = true;
                    }
                } catch (const Error&) {
                    resumed = false;
                }
            }
            if (!resumed) {
                const ClipContainer clip = render_clip(realized.frames, task.action, prov, config.render);
                write_file_atomic(clip_path, write_clip(clip));
                write_file_atomic(side, to_bytes(prov + "\n"));
                e.frame_count = clip.header.frame_count;
            }
            outcome[i] = resumed ? 1 : 0;
            const std::string flow_rel = flow_relative(e.path);
            if (flow_matches(root / flow_rel, e.frame_count)) e.flow_path = flow_rel;
        } catch (const Error& ex) {
            e.error = ex.what();
            outcome[i] = 2;
        }
        if (progress) {
            std::lock_guard lock(progress_mutex);
            progress(++done, tasks.size());
        }
    });

    for (int o : outcome) {
        if (o == 0) ++report.rendered;
        else if (o == 1) ++report.skipped;
        else ++report.failed;
    }
    report.manifest.entries = std::move(entries);
    report.manifest.weights = default_stream_weights();
    const fs::path manifest_path = root / "manifest.json";
    if (fs::exists(manifest_path)) {
        try {
            report.manifest.weights = load_manifest(manifest_path).weights;
        } catch (const Error& ex) {
            report.warnings.push_back("existing manifest ignored: " + std::string(ex.what()));
        }
    }
    save_manifest_atomic(manifest_path, report.manifest);
    return report;
}

FlowReport compute_flows(Manifest& manifest, const std::filesystem::path& root, const FlowParams& params, int threads,
                         const ProgressCallback& progress) {
    params.validate();
    FlowReport report;
    std::vector<int> outcome(manifest.entries.size(), -1);
    std::mutex progress_mutex;
    std::size_t done = 0;
    parallel_for(manifest.entries.size(), worker_count(threads, manifest.entries.size()), [&](std::size_t i) {
        ManifestEntry& e = manifest.entries[i];
        if (e.ok()) {
            const std::string rel = flow_relative(e.path);
            try {
                if (flow_matches(root / rel, e.frame_count)) {
                    outcome[i] = 1;
                } else {
                    const ClipContainer clip = load_clip(root / e.path);
                    std::ostringstream os;
                    write_flow(clip_flow(clip, params, 1), os);
                    const std::string s = os.str();
                    write_file_atomic(root / rel, std::vector<std::uint8_t>(s.begin(), s.end()));
                    outcome[i] = 0;
                }
                e.flow_path = rel;
            } catch (const Error& ex) {
                e.error = std::string("flow: ") + ex.what();
                e.flow_path.clear();
                outcome[i] = 2;
            }
        }
        if (progress) {
            std::lock_guard lock(progress_mutex);
            progress(++done, manifest.entries.size());
        }
    });
    for (int o : outcome) {
        if (o == 0) ++report.computed;
        else if (o == 1) ++report.skipped;
        else if (o == 2) ++report.failed;
    }
    return report;
}

void set_weights(Manifest& manifest, std::string_view subset, StreamWeights weights) {
    if (subset != kExternalRealSubset && !parse_method(subset))
        throw ValidationError("unknown weight subset '" + std::string(subset) + "'");
    if (!std::isfinite(weights.rgb) || !std::isfinite(weights.flow) || weights.rgb < 0 || weights.flow < 0)
        throw ValidationError("stream weights must be finite and nonnegative");
    std::string key(subset);
    if (auto m = parse_method(subset)) key = std::string(to_string(*m));
    manifest.weights[key] = weights;
}

DatasetStats compute_stats(const Manifest& manifest) {
    DatasetStats s;
    for (auto a : kAllActions) s.per_class[std::string(to_string(a))] = 0;
    for (auto m : kAllMethods) s.per_method[std::string(to_string(m))] = 0;
    for (const auto& e : manifest.entries) {
        if (!e.ok()) {
            ++s.failed;
            continue;
        }
        ++s.total;
        ++s.per_class[std::string(to_string(e.label))];
        ++s.per_method[std::string(to_string(e.method))];
        s.with_flow += !e.flow_path.empty();
    }
    return s;
}

std::string format_stats(const Manifest& manifest) {
    const DatasetStats s = compute_stats(manifest);
    std::string out;
    char buf[128];
    std::snprintf(buf, sizeof buf, "clips: %zu ok, %zu failed, %zu with flow\n", s.total, s.failed, s.with_flow);
    out += buf;
    out += "per class:\n";
    for (auto a : kAllActions) {
        std::snprintf(buf, sizeof buf, "  %-14s %zu\n", std::string(to_string(a)).c_str(), s.per_class.at(std::string(to_string(a))));
        out += buf;
    }
    out += "per method:\n";
    for (auto m : kAllMethods) {
        std::snprintf(buf, sizeof buf, "  %-14s %zu\n", std::string(to_string(m)).c_str(), s.per_method.at(std::string(to_string(m))));
        out += buf;
    }
    out += "weights (rgb, flow):\n";
    for (const auto& [k, w] : manifest.weights) {
        std::snprintf(buf, sizeof buf, "  %-14s %g %g\n", k.c_str(), w.rgb, w.flow);
        out += buf;
    }
    return out;
}

std::vector<std::string> audit(const Manifest& manifest, const std::filesystem::path& root) {
    std::vector<std::string> problems;
    for (const auto& e : manifest.entries) {
        if (!e.ok()) continue;
        try {
            const ClipHeader h = load_clip_header(root / e.path);
            if (h.frame_count != e.frame_count)
                problems.push_back(e.path + ": manifest says " + std::to_string(e.frame_count) + " frames, clip has " +
                                   std::to_string(h.frame_count));
            load_clip(root / e.path).validate();
        } catch (const Error& ex) {
            problems.push_back(e.path + ": " + ex.what());
            continue;
        }
        if (e.flow_path.empty()) continue;
        try {
            const FlowHeader fh = load_flow_header(root / e.flow_path);
            if (fh.count + 1 != e.frame_count) problems.push_back(e.flow_path + ": field count does not match the clip");
        } catch (const Error& ex) {
            problems.push_back(e.flow_path + ": " + ex.what());
        }
    }
    return problems;
}

}  // namespace synact
