#include "synact/formats/manifest.hpp"

#include "synact/error.hpp"

#include "json.hpp"

#include <cmath>
#include <set>

namespace synact {

using nlohmann::json;

std::map<std::string, StreamWeights, std::less<>> default_stream_weights() {
    return {
        {std::string(to_string(AugmentMethod::BgRotation)), {1, 0}},
        {std::string(to_string(AugmentMethod::BgRotationScaleTranslate)), {0, 1}},
        {std::string(to_string(AugmentMethod::RoomRotation)), {1, 1}},
        {std::string(to_string(AugmentMethod::RoomMotion)), {1, 1}},
        {std::string(to_string(AugmentMethod::ReconRotation)), {1, 1}},
        {std::string(kExternalRealSubset), {8, 3}},
    };
}

void Manifest::validate() const {
    std::set<std::string_view> seen;
    for (const auto& e : entries) {
        if (!seen.insert(e.path).second) throw ValidationError("duplicate manifest path " + e.path);
    }
    for (const auto& [key, w] : weights) {
        if (!(w.rgb >= 0) || !(w.flow >= 0) || !std::isfinite(w.rgb) || !std::isfinite(w.flow))
            throw ValidationError("weights for " + key + " must be finite and nonnegative");
    }
}

std::string write_manifest(const Manifest& m) {
    m.validate();
    json j;
    j["version"] = 1;
    json w = json::object();
    for (const auto& [key, sw] : m.weights) w[key] = {{"rgb", sw.rgb}, {"flow", sw.flow}};
    j["weights"] = std::move(w);
    json entries = json::array();
    for (const auto& e : m.entries) {
        json je = {{"path", e.path},
                   {"label", std::string(to_string(e.label))},
                   {"method", std::string(to_string(e.method))},
                   {"subject", e.subject_id},
                   {"seed", e.seed},
                   {"clip_index", e.clip_index},
                   {"frames", e.frame_count}};
        if (!e.flow_path.empty()) je["flow_path"] = e.flow_path;
        if (!e.error.empty()) je["error"] = e.error;
        entries.push_back(std::move(je));
    }
    j["entries"] = std::move(entries);
    return j.dump(1) + "\n";
}

Manifest parse_manifest(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("invalid manifest JSON: ") + e.what());
    }
    Manifest m;
    try {
        if (j.value("version", 0) != 1) throw FormatError("unsupported manifest version");
        for (const auto& [key, w] : j.at("weights").items()) {
            m.weights[key] = {w.at("rgb").get<double>(), w.at("flow").get<double>()};
        }
        for (const auto& je : j.at("entries")) {
            ManifestEntry e;
            e.path = je.at("path").get<std::string>();
            const auto label = parse_action(je.at("label").get<std::string>());
            if (!label) throw ValidationError("unknown label in manifest entry " + e.path);
            e.label = *label;
            const auto method = parse_method(je.at("method").get<std::string>());
            if (!method) throw ValidationError("unknown method in manifest entry " + e.path);
            e.method = *method;
            e.subject_id = je.at("subject").get<std::string>();
            e.seed = je.at("seed").get<std::uint64_t>();
            e.clip_index = je.at("clip_index").get<std::uint32_t>();
            e.frame_count = je.value("frames", 0u);
            e.flow_path = je.value("flow_path", "");
            e.error = je.value("error", "");
            m.entries.push_back(std::move(e));
        }
    } catch (const json::exception& e) {
        throw StructuralError(std::string("malformed manifest: ") + e.what());
    }
    m.validate();
    return m;
}

}  // namespace synact
