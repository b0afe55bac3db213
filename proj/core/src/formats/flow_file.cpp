#include "synact/formats/flow_file.hpp"

#include "synact/error.hpp"

#include <bit>
#include <cstring>
#include <fstream>

namespace synact {

namespace {

constexpr char kMagic[4] = {'S', 'F', 'L', 'O'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::ostream& out, std::uint32_t v) {
    char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    out.write(b, 4);
}

std::uint32_t get_u32(std::istream& in) {
    unsigned char b[4];
    if (!in.read(reinterpret_cast<char*>(b), 4)) throw FormatError("truncated flow container");
    return b[0] | (b[1] << 8) | (b[2] << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

void put_plane(std::ostream& out, const std::vector<float>& plane) {
    if constexpr (std::endian::native == std::endian::little) {
        out.write(reinterpret_cast<const char*>(plane.data()), static_cast<std::streamsize>(plane.size() * 4));
    } else {
        for (float f : plane) put_u32(out, std::bit_cast<std::uint32_t>(f));
    }
}

void get_plane(std::istream& in, std::vector<float>& plane) {
    if constexpr (std::endian::native == std::endian::little) {
        if (!in.read(reinterpret_cast<char*>(plane.data()), static_cast<std::streamsize>(plane.size() * 4)))
            throw FormatError("truncated flow payload");
    } else {
        for (float& f : plane) f = std::bit_cast<float>(get_u32(in));
    }
}

}  // namespace

void write_flow(const FlowSequence& seq, std::ostream& out) {
    const std::uint32_t w = seq.fields.empty() ? 0 : seq.fields.front().width;
    const std::uint32_t h = seq.fields.empty() ? 0 : seq.fields.front().height;
    for (const auto& f : seq.fields) {
        if (static_cast<std::uint32_t>(f.width) != w || static_cast<std::uint32_t>(f.height) != h ||
            f.u.size() != static_cast<std::size_t>(w) * h || f.v.size() != f.u.size())
            throw ContractError("flow fields must share dimensions");
    }
    out.write(kMagic, 4);
    put_u32(out, kVersion);
    put_u32(out, w);
    put_u32(out, h);
    put_u32(out, static_cast<std::uint32_t>(seq.fields.size()));
    put_u32(out, seq.normalized ? 1 : 0);
    for (const auto& f : seq.fields) {
        put_plane(out, f.u);
        put_plane(out, f.v);
    }
    if (!out) throw IoError("failed writing flow container");
}

FlowHeader read_flow_header(std::istream& in) {
    char magic[4];
    if (!in.read(magic, 4)) throw FormatError("truncated flow container");
    if (std::memcmp(magic, kMagic, 4) != 0) throw FormatError("flow magic mismatch");
    if (get_u32(in) != kVersion) throw FormatError("unsupported flow container version");
    FlowHeader h;
    h.width = get_u32(in);
    h.height = get_u32(in);
    h.count = get_u32(in);
    const std::uint32_t norm = get_u32(in);
    if (norm > 1) throw FormatError("invalid normalized flag");
    h.normalized = norm == 1;
    return h;
}

FlowSequence read_flow(std::istream& in) {
    const FlowHeader h = read_flow_header(in);
    FlowSequence seq;
    seq.normalized = h.normalized;
    for (std::uint32_t i = 0; i < h.count; ++i) {
        FlowField f(static_cast<int>(h.width), static_cast<int>(h.height));
        get_plane(in, f.u);
        get_plane(in, f.v);
        seq.fields.push_back(std::move(f));
    }
    return seq;
}

void save_flow(const std::filesystem::path& path, const FlowSequence& seq) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    write_flow(seq, out);
}

FlowSequence load_flow(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    return read_flow(in);
}

FlowHeader load_flow_header(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    return read_flow_header(in);
}

}  // namespace synact
