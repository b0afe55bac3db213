#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace synact {

// Rendered RGB8 clip.
//
// Byte layout (all integers u32 little-endian):
//   "SACT" | version=1 | width | height | fps | frame_count
//   | label_len | label bytes (UTF-8)
//   | provenance_len | provenance bytes (JSON text)
//   | frame_count * width * height * 3 bytes, frames in order, rows top-down
struct ClipHeader {
    std::uint32_t width = 0;
    std::uint32_t height = 0;
    std::uint32_t fps = 0;
    std::uint32_t frame_count = 0;
    std::string label;
    std::string provenance;

    std::size_t frame_bytes() const { return static_cast<std::size_t>(width) * height * 3; }
    friend bool operator==(const ClipHeader&, const ClipHeader&) = default;
};

struct ClipContainer {
    ClipHeader header;
    std::vector<std::vector<std::uint8_t>> frames;

    // frame count and frame sizes agree with the header; fps > 0.
    void validate() const;
    friend bool operator==(const ClipContainer&, const ClipContainer&) = default;
};

inline constexpr std::uint32_t kGeneratedClipFps = 25;
inline constexpr std::uint32_t kGeneratedClipSize = 224;

void write_clip(const ClipContainer& clip, std::ostream& sink);
std::vector<std::uint8_t> write_clip(const ClipContainer& clip);

// Reads only the header; the stream is left positioned at the first frame.
ClipHeader read_clip_header(std::istream& source);
// Throws FormatError on magic mismatch or truncated payload.
ClipContainer read_clip(std::istream& source);
ClipContainer read_clip(const std::vector<std::uint8_t>& bytes);

void save_clip(const std::filesystem::path& path, const ClipContainer& clip);
ClipContainer load_clip(const std::filesystem::path& path);
ClipHeader load_clip_header(const std::filesystem::path& path);

// One lossless PNG per frame named 000000.png, 000001.png, ... Creates the
// directory if needed. Throws IoError when it cannot be written.
std::vector<std::filesystem::path> export_png_frames(const ClipContainer& clip, const std::filesystem::path& directory);

}  // namespace synact
