#pragma once

#include "synact/formats/mesh.hpp"
#include "synact/rng.hpp"

#include <unistd.h>

#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace test {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::atomic<int> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("synact_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& s) const { return path_ / s; }

private:
    std::filesystem::path path_;
};

// Smooth random texture in [0, 1]: sum of a few sinusoids, good for flow and
// corner tests because gradients exist everywhere.
inline std::vector<float> smooth_pattern(int w, int h, std::uint64_t seed) {
    synact::Rng rng(seed);
    struct Wave {
        double fx, fy, phase, amp;
    };
    std::vector<Wave> waves;
    for (int i = 0; i < 6; ++i)
        waves.push_back({rng.uniform(0.02, 0.15), rng.uniform(0.02, 0.15), rng.uniform(0, 6.28), rng.uniform(0.5, 1.0)});
    std::vector<float> out(static_cast<std::size_t>(w) * h);
    double total = 0;
    for (const auto& wv : waves) total += wv.amp;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double v = 0;
            for (const auto& wv : waves) v += wv.amp * std::sin(wv.fx * x + wv.fy * y + wv.phase) * std::cos(wv.fy * x - wv.fx * y);
            out[static_cast<std::size_t>(y) * w + x] = static_cast<float>(0.5 + 0.5 * v / total);
        }
    return out;
}

inline synact::Mesh random_mesh(synact::Rng& rng, std::size_t vertices, std::size_t triangles) {
    synact::Mesh m;
    for (std::size_t i = 0; i < vertices; ++i)
        m.vertices.emplace_back(static_cast<float>(rng.uniform(-2, 2)), static_cast<float>(rng.uniform(-2, 2)),
                                static_cast<float>(rng.uniform(-2, 2)));
    while (m.triangles.size() < triangles) {
        const auto a = static_cast<std::uint32_t>(rng.below(vertices));
        const auto b = static_cast<std::uint32_t>(rng.below(vertices));
        const auto c = static_cast<std::uint32_t>(rng.below(vertices));
        if (a != b && b != c && a != c) m.triangles.push_back({a, b, c});
    }
    return m;
}

}  // namespace test
