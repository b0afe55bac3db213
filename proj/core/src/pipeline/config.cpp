#include "synact/pipeline/config.hpp"

#include "synact/augment/augment.hpp"
#include "synact/error.hpp"
#include "synact/formats/png_io.hpp"
#include "toml.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <set>

namespace synact {

using json = nlohmann::json;

std::vector<std::string> default_subject_ids(std::size_t count) {
    std::vector<std::string> ids;
    char buf[16];
    for (std::size_t i = 1; i <= count; ++i) {
        std::snprintf(buf, sizeof buf, "s%02zu", i);
        ids.emplace_back(buf);
    }
    return ids;
}

std::filesystem::path PipelineConfig::resolve(const std::filesystem::path& p) const {
    if (p.empty() || p.is_absolute() || base_dir.empty()) return p;
    return base_dir / p;
}

namespace {

bool is_procedural(std::string_view s) { return s.rfind("procedural:", 0) == 0; }

void require_unique(const std::vector<std::string>& items, const char* what) {
    std::set<std::string> seen;
    for (const auto& s : items)
        if (!seen.insert(s).second) throw ConfigError(std::string("duplicate ") + what + " '" + s + "'");
}

}  // namespace

void PipelineConfig::validate() const {
    if (subjects.empty()) throw ConfigError("no subjects configured");
    if (actions.empty()) throw ConfigError("no actions configured");
    if (methods.empty()) throw ConfigError("no methods configured");
    if (clips_per_action < 1) throw ConfigError("clips_per_action must be >= 1");
    if (threads < 0) throw ConfigError("threads must be >= 0");
    require_unique(subjects, "subject");
    for (const auto& s : subjects) {
        if (s.empty() || !std::all_of(s.begin(), s.end(), [](char c) {
                return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
            }))
            throw ConfigError("subject id '" + s + "' must use letters, digits, '_' or '-'");
    }
    {
        std::set<ActionLabel> a(actions.begin(), actions.end());
        if (a.size() != actions.size()) throw ConfigError("duplicate action");
        std::set<AugmentMethod> m(methods.begin(), methods.end());
        if (m.size() != methods.size()) throw ConfigError("duplicate method");
    }
    try {
        render.validate();
        flow.validate();
        recon.validate();
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }

    namespace fs = std::filesystem;
    if (!bodies_dir.empty()) {
        const fs::path dir = resolve(bodies_dir);
        if (!fs::is_directory(dir)) throw ConfigError("bodies_dir not found: " + dir.string());
        for (const auto& s : subjects) {
            if (!fs::exists(dir / s / "rig.json")) throw ConfigError("missing " + (dir / s / "rig.json").string());
            for (auto a : actions) {
                const fs::path take = dir / s / (std::string(to_string(a)) + ".json");
                if (!fs::exists(take)) throw ConfigError("missing motion take " + take.string());
            }
        }
    }
    if (!wall_textures.empty() && wall_textures.size() != static_cast<std::size_t>(kBackgroundCount))
        throw ConfigError("wall_textures needs exactly " + std::to_string(kBackgroundCount) + " images");
    for (const auto& t : wall_textures)
        if (!fs::exists(resolve(t))) throw ConfigError("wall texture not found: " + resolve(t).string());
    if (is_procedural(environment)) {
        if (environment != kProceduralLivingRoom) throw ConfigError("unknown environment source '" + environment + "'");
    } else if (!fs::exists(resolve(environment))) {
        throw ConfigError("environment not found: " + resolve(environment).string());
    }
    std::vector<std::string> ids;
    for (const auto& r : reconstructed) {
        if (r.id.empty()) throw ConfigError("reconstructed scene needs an id");
        ids.push_back(r.id);
        if (is_procedural(r.source)) {
            if (r.source != kProceduralReconstructedRoom)
                throw ConfigError("unknown reconstructed scene source '" + r.source + "'");
        } else if (!fs::exists(resolve(r.source))) {
            throw ConfigError("reconstructed scene not found: " + resolve(r.source).string());
        }
    }
    require_unique(ids, "reconstructed scene id");
    const bool needs_recon = std::find(methods.begin(), methods.end(), AugmentMethod::ReconRotation) != methods.end();
    if (needs_recon && reconstructed.empty()) throw ConfigError("R3D+R needs at least one reconstructed scene");
    if (reconstruction_frames < 2) throw ConfigError("reconstruction_frames must be >= 2");
}

namespace {

class Reader {
public:
    Reader(const json& obj, std::string where) : obj_(obj), where_(std::move(where)) {
        if (!obj_.is_object()) throw ConfigError(where_ + " must be a table");
    }

    // Rejects keys that were never read.
    void finish() const {
        for (const auto& [k, v] : obj_.items())
            if (!used_.count(k)) throw ConfigError("unknown key '" + prefix() + k + "'");
    }

    const json* get(const std::string& key) {
        used_.insert(key);
        auto it = obj_.find(key);
        return it == obj_.end() ? nullptr : &*it;
    }

    template <class T>
    void read(const std::string& key, T& out) {
        const json* v = get(key);
        if (!v) return;
        try {
            if constexpr (std::is_same_v<T, bool>) {
                if (!v->is_boolean()) throw ConfigError("");
                out = v->get<bool>();
            } else if constexpr (std::is_integral_v<T>) {
                if (!v->is_number_integer()) throw ConfigError("");
                if constexpr (std::is_unsigned_v<T>) {
                    if (v->is_number_unsigned()) out = static_cast<T>(v->get<std::uint64_t>());
                    else if (v->get<std::int64_t>() < 0) throw ConfigError("");
                    else out = static_cast<T>(v->get<std::int64_t>());
                } else {
                    out = static_cast<T>(v->get<std::int64_t>());
                }
            } else if constexpr (std::is_floating_point_v<T>) {
                if (!v->is_number()) throw ConfigError("");
                out = v->get<double>();
            } else {
                out = v->get<T>();
            }
        } catch (const std::exception&) {
            throw ConfigError("bad value for '" + prefix() + key + "'");
        }
    }

    std::vector<std::string> strings(const std::string& key, bool& present) {
        present = false;
        const json* v = get(key);
        if (!v) return {};
        if (!v->is_array()) throw ConfigError("'" + prefix() + key + "' must be an array of strings");
        std::vector<std::string> out;
        for (const auto& e : *v) {
            if (!e.is_string()) throw ConfigError("'" + prefix() + key + "' must be an array of strings");
            out.push_back(e.get<std::string>());
        }
        present = true;
        return out;
    }

    std::string prefix() const { return where_.empty() ? "" : where_ + "."; }

private:
    const json& obj_;
    std::string where_;
    std::set<std::string> used_;
};

}  // namespace

PipelineConfig parse_pipeline_config(std::string_view toml_text, const std::filesystem::path& base_dir) {
    const json root = toml::parse(toml_text);
    PipelineConfig cfg;
    cfg.base_dir = base_dir;
    cfg.subjects = default_subject_ids();
    {
        Reader r(root, "");
        r.read("seed", cfg.seed);
        std::string out = cfg.output_root.string();
        r.read("output_root", out);
        cfg.output_root = out;
        bool present = false;
        auto subjects = r.strings("subjects", present);
        if (present) cfg.subjects = subjects;
        if (const json* n = r.get("subject_count")) {
            if (present) throw ConfigError("set either 'subjects' or 'subject_count', not both");
            if (!n->is_number_integer() || n->get<std::int64_t>() < 1) throw ConfigError("subject_count must be >= 1");
            cfg.subjects = default_subject_ids(static_cast<std::size_t>(n->get<std::int64_t>()));
        }
        auto actions = r.strings("actions", present);
        if (present) {
            cfg.actions.clear();
            for (const auto& a : actions) {
                auto p = parse_action(a);
                if (!p) throw ConfigError("unknown action '" + a + "'");
                cfg.actions.push_back(*p);
            }
        }
        r.read("clips_per_action", cfg.clips_per_action);
        auto methods = r.strings("methods", present);
        if (present) {
            cfg.methods.clear();
            for (const auto& m : methods) {
                auto p = parse_method(m);
                if (!p) throw ConfigError("unknown method '" + m + "'");
                cfg.methods.push_back(*p);
            }
        }
        r.read("threads", cfg.threads);

        if (const json* a = r.get("assets")) {
            Reader ar(*a, "assets");
            std::string bodies;
            ar.read("bodies_dir", bodies);
            cfg.bodies_dir = bodies;
            bool p2 = false;
            auto walls = ar.strings("wall_textures", p2);
            for (const auto& w : walls) cfg.wall_textures.emplace_back(w);
            ar.read("environment", cfg.environment);
            cfg.environment_colorable = ar.strings("environment_colorable", p2);
            ar.read("reconstruction_frames", cfg.reconstruction_frames);
            if (const json* rs = ar.get("reconstructed")) {
                if (!rs->is_array()) throw ConfigError("assets.reconstructed must be an array of tables");
                cfg.reconstructed.clear();
                for (const auto& e : *rs) {
                    Reader er(e, "assets.reconstructed");
                    ReconstructedSceneSource src;
                    er.read("id", src.id);
                    er.read("source", src.source);
                    er.read("yaw_deg", src.yaw_deg);
                    if (const json* t = er.get("translation")) {
                        if (!t->is_array() || t->size() != 3 || !std::all_of(t->begin(), t->end(), [](const json& x) { return x.is_number(); }))
                            throw ConfigError("assets.reconstructed.translation must be three numbers");
                        src.translation = Vec3d((*t)[0].get<double>(), (*t)[1].get<double>(), (*t)[2].get<double>());
                    }
                    er.finish();
                    cfg.reconstructed.push_back(std::move(src));
                }
            }
            ar.finish();
        }
        if (const json* rj = r.get("render")) {
            Reader rr(*rj, "render");
            rr.read("width", cfg.render.width);
            rr.read("height", cfg.render.height);
            rr.read("supersample", cfg.render.supersample);
            rr.read("shadows", cfg.render.shadows);
            rr.read("shadow_resolution", cfg.render.shadow_resolution);
            rr.finish();
        }
        if (const json* fj = r.get("flow")) {
            Reader fr(*fj, "flow");
            fr.read("lambda", cfg.flow.lambda);
            fr.read("theta", cfg.flow.theta);
            fr.read("tau", cfg.flow.tau);
            fr.read("epsilon", cfg.flow.epsilon);
            fr.read("scales", cfg.flow.scales);
            fr.read("scale_factor", cfg.flow.scale_factor);
            fr.read("warps", cfg.flow.warps);
            fr.read("iterations", cfg.flow.iterations);
            fr.read("median_filter", cfg.flow.median_filter);
            fr.finish();
        }
        if (const json* cj = r.get("recon")) {
            Reader cr(*cj, "recon");
            cr.read("voxel_size", cfg.recon.tsdf.voxel_size);
            cr.read("truncation", cfg.recon.tsdf.truncation);
            cr.read("max_depth", cfg.recon.tsdf.max_depth_m);
            cr.read("fragment_size", cfg.recon.fragment_size);
            cr.read("keyframe_interval", cfg.recon.keyframe_interval);
            cr.read("loop_min_fitness", cfg.recon.loop_min_fitness);
            cr.read("tracking_min_fitness", cfg.recon.odometry.min_fitness);
            cr.read("fitness_distance", cfg.recon.odometry.fitness_threshold_m);
            cr.read("huber_delta", cfg.recon.posegraph.huber_delta);
            cr.finish();
        }
        r.finish();
    }
    return cfg;
}

PipelineConfig load_pipeline_config(const std::filesystem::path& path) {
    std::string text;
    try {
        text = read_file_text(path);
    } catch (const Error& e) {
        throw ConfigError("cannot read config " + path.string() + ": " + e.what());
    }
    return parse_pipeline_config(text, path.parent_path());
}

void apply_environment_overrides(PipelineConfig& config) {
    if (const char* root = std::getenv("SYNACT_OUTPUT_ROOT"); root && *root) config.output_root = root;
}

std::string default_config_toml() {
    return R"(# synact dataset generation config. Every value below is the default.

seed = 20240601              # master seed; clip seeds are hashed from it
output_root = "out"          # overridden by SYNACT_OUTPUT_ROOT
subject_count = 15           # or: subjects = ["s01", "s02"]
actions = ["walking", "sitting_down", "hand_waving"]
clips_per_action = 10        # clips per (subject, action, method)
methods = ["BG+R", "BG+R2T", "3D+R", "3D+M", "R3D+R"]
threads = 0                  # 0 = all cores

[assets]
bodies_dir = ""              # <dir>/<subject>/rig.json + <action>.json; "" = procedural humanoids
wall_textures = []           # PNG files; [] = six built-in backgrounds
environment = "procedural:living_room"
environment_colorable = []   # node names that take background colours (OBJ/GLB/PLY environments)
reconstruction_frames = 180  # RGB-D views rendered for procedural:reconstructed_room

[[assets.reconstructed]]
id = "default"
source = "procedural:reconstructed_room"   # or a PLY path
translation = [0.0, 0.0, 0.0]
yaw_deg = 0.0

[render]
width = 224
height = 224
supersample = false
shadows = true
shadow_resolution = 1024

[flow]                       # dual TV-L1
lambda = 0.15
theta = 0.3
tau = 0.25
epsilon = 0.01
scales = 5
scale_factor = 0.5
warps = 5
iterations = 300
median_filter = true

[recon]
voxel_size = 0.02            # metres
truncation = 0.08            # 4 voxels
max_depth = 8.0
fragment_size = 50           # frames per fragment
keyframe_interval = 5
loop_min_fitness = 0.3
tracking_min_fitness = 0.3
fitness_distance = 0.04      # 2 voxels
huber_delta = 0.1
)";
}

}  // namespace synact
