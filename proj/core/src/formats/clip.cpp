#include "synact/formats/clip.hpp"

#include "synact/error.hpp"
#include "synact/formats/png_io.hpp"

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace synact {

namespace {

constexpr char kMagic[4] = {'S', 'A', 'C', 'T'};
constexpr std::uint32_t kVersion = 1;
// Guards against absurd allocations from corrupt headers.
constexpr std::uint32_t kMaxStringBytes = 64u << 20;

void put_u32(std::ostream& out, std::uint32_t v) {
    char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    out.write(b, 4);
}

std::uint32_t get_u32(std::istream& in) {
    unsigned char b[4];
    if (!in.read(reinterpret_cast<char*>(b), 4)) throw FormatError("truncated clip header");
    return b[0] | (b[1] << 8) | (b[2] << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

std::string get_string(std::istream& in) {
    const std::uint32_t len = get_u32(in);
    if (len > kMaxStringBytes) throw FormatError("clip header string too long");
    std::string s(len, '\0');
    if (len && !in.read(s.data(), len)) throw FormatError("truncated clip header");
    return s;
}

}  // namespace

void ClipContainer::validate() const {
    if (header.fps == 0) throw ContractError("clip fps must be positive");
    if (frames.size() != header.frame_count) throw ContractError("clip frame count does not match header");
    for (const auto& f : frames) {
        if (f.size() != header.frame_bytes()) throw ContractError("clip frame size does not match header");
    }
}

void write_clip(const ClipContainer& clip, std::ostream& sink) {
    clip.validate();
    const auto& h = clip.header;
    sink.write(kMagic, 4);
    put_u32(sink, kVersion);
    put_u32(sink, h.width);
    put_u32(sink, h.height);
    put_u32(sink, h.fps);
    put_u32(sink, h.frame_count);
    put_u32(sink, static_cast<std::uint32_t>(h.label.size()));
    sink.write(h.label.data(), static_cast<std::streamsize>(h.label.size()));
    put_u32(sink, static_cast<std::uint32_t>(h.provenance.size()));
    sink.write(h.provenance.data(), static_cast<std::streamsize>(h.provenance.size()));
    for (const auto& f : clip.frames) sink.write(reinterpret_cast<const char*>(f.data()), static_cast<std::streamsize>(f.size()));
    if (!sink) throw IoError("failed writing clip");
}

std::vector<std::uint8_t> write_clip(const ClipContainer& clip) {
    std::ostringstream os(std::ios::binary);
    write_clip(clip, os);
    const std::string s = std::move(os).str();
    return std::vector<std::uint8_t>(s.begin(), s.end());
}

ClipHeader read_clip_header(std::istream& in) {
    char magic[4];
    if (!in.read(magic, 4)) throw FormatError("truncated clip header");
    if (std::memcmp(magic, kMagic, 4) != 0) throw FormatError("clip magic mismatch");
    const std::uint32_t version = get_u32(in);
    if (version != kVersion) throw FormatError("unsupported clip version " + std::to_string(version));
    ClipHeader h;
    h.width = get_u32(in);
    h.height = get_u32(in);
    h.fps = get_u32(in);
    h.frame_count = get_u32(in);
    h.label = get_string(in);
    h.provenance = get_string(in);
    return h;
}

ClipContainer read_clip(std::istream& in) {
    ClipContainer clip;
    clip.header = read_clip_header(in);
    const std::size_t bytes = clip.header.frame_bytes();
    // Check the declared payload against what a seekable stream holds
    // before allocating anything sized by the header.
    const auto here = in.tellg();
    if (here != std::streampos(-1)) {
        in.seekg(0, std::ios::end);
        const auto end = in.tellg();
        in.seekg(here);
        const auto left = static_cast<unsigned long long>(end - here);
        if (static_cast<unsigned long long>(clip.header.frame_count) * bytes > left)
            throw FormatError("truncated clip payload: header declares " + std::to_string(clip.header.frame_count) +
                              " frames of " + std::to_string(bytes) + " bytes, " + std::to_string(left) + " bytes left");
    }
    clip.frames.reserve(std::min<std::size_t>(clip.header.frame_count, 4096));
    for (std::uint32_t i = 0; i < clip.header.frame_count; ++i) {
        std::vector<std::uint8_t> f(bytes);
        if (bytes && !in.read(reinterpret_cast<char*>(f.data()), static_cast<std::streamsize>(bytes))) {
            throw FormatError("truncated clip payload: header declares " + std::to_string(clip.header.frame_count) +
                              " frames, found " + std::to_string(i));
        }
        clip.frames.push_back(std::move(f));
    }
    return clip;
}

ClipContainer read_clip(const std::vector<std::uint8_t>& bytes) {
    std::istringstream is(std::string(bytes.begin(), bytes.end()), std::ios::binary);
    return read_clip(is);
}

void save_clip(const std::filesystem::path& path, const ClipContainer& clip) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    write_clip(clip, out);
}

ClipContainer load_clip(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    return read_clip(in);
}

ClipHeader load_clip_header(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    return read_clip_header(in);
}

std::vector<std::filesystem::path> export_png_frames(const ClipContainer& clip, const std::filesystem::path& directory) {
    clip.validate();
    std::error_code ec;
    std::filesystem::create_directories(directory, ec);
    if (ec || !std::filesystem::is_directory(directory)) throw IoError("cannot create directory " + directory.string());
    std::vector<std::filesystem::path> files;
    for (std::size_t i = 0; i < clip.frames.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "%06zu.png", i);
        Texture t;
        t.width = static_cast<int>(clip.header.width);
        t.height = static_cast<int>(clip.header.height);
        t.pixels = clip.frames[i];
        const auto path = directory / name;
        write_png(path, t);
        files.push_back(path);
    }
    return files;
}

}  // namespace synact
