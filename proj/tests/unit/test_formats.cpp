#include "doctest.h"
#include "support.hpp"

#include "synact/body/humanoid.hpp"
#include "synact/error.hpp"
#include "synact/formats/clip.hpp"
#include "synact/formats/flow_file.hpp"
#include "synact/formats/glb.hpp"
#include "synact/formats/manifest.hpp"
#include "synact/formats/motion.hpp"
#include "synact/formats/obj.hpp"
#include "synact/formats/ply.hpp"
#include "synact/formats/png_io.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

using namespace synact;

namespace {

std::vector<std::uint8_t> bytes_of(const std::string& s) { return {s.begin(), s.end()}; }

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_f32(std::vector<std::uint8_t>& out, float f) {
    std::uint32_t v;
    std::memcpy(&v, &f, 4);
    put_u32(out, v);
}

// Binary glTF assembled by hand: header, JSON chunk, BIN chunk.
std::vector<std::uint8_t> assemble_glb(std::string json, std::vector<std::uint8_t> bin, std::uint32_t magic = 0x46546C67) {
    while (json.size() % 4) json += ' ';
    while (bin.size() % 4) bin.push_back(0);
    std::vector<std::uint8_t> out;
    put_u32(out, magic);
    put_u32(out, 2);
    put_u32(out, static_cast<std::uint32_t>(12 + 8 + json.size() + 8 + bin.size()));
    put_u32(out, static_cast<std::uint32_t>(json.size()));
    put_u32(out, 0x4E4F534A);
    out.insert(out.end(), json.begin(), json.end());
    put_u32(out, static_cast<std::uint32_t>(bin.size()));
    put_u32(out, 0x004E4942);
    out.insert(out.end(), bin.begin(), bin.end());
    return out;
}

std::vector<std::uint8_t> triangle_positions() {
    std::vector<std::uint8_t> bin;
    for (float f : {0.f, 0.f, 0.f, 1.f, 0.f, 0.f, 0.f, 1.f, 0.f}) put_f32(bin, f);
    return bin;
}

const char* kTriangleJson =
    R"({"asset":{"version":"2.0"},"buffers":[{"byteLength":36}],)"
    R"("bufferViews":[{"buffer":0,"byteOffset":0,"byteLength":36}],)"
    R"("accessors":[{"bufferView":0,"componentType":5126,"count":COUNT,"type":"VEC3"}],)"
    R"("meshes":[{"primitives":[{"attributes":{"POSITION":0}}]}],)"
    R"("nodes":[{"mesh":0}],"scenes":[{"nodes":[0]}],"scene":0})";

std::string triangle_json(int count, int component = 5126) {
    std::string s = kTriangleJson;
    s.replace(s.find("COUNT"), 5, std::to_string(count));
    if (component != 5126) s.replace(s.find("5126"), 4, std::to_string(component));
    return s;
}

ClipContainer small_clip(std::uint32_t frames, std::uint32_t w = 4, std::uint32_t h = 3) {
    ClipContainer c;
    c.header = {w, h, 25, frames, "walking", R"({"seed":"1"})"};
    for (std::uint32_t f = 0; f < frames; ++f) {
        std::vector<std::uint8_t> px(static_cast<std::size_t>(w) * h * 3);
        for (std::size_t i = 0; i < px.size(); ++i) px[i] = static_cast<std::uint8_t>((i * 7 + f * 31) & 0xff);
        c.frames.push_back(std::move(px));
    }
    return c;
}

}  // namespace

TEST_SUITE("formats") {

TEST_CASE("obj single triangle gets the right-hand normal") {
    const Mesh m = parse_obj("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n");
    REQUIRE(m.vertices.size() == 3);
    REQUIRE(m.triangles.size() == 1);
    CHECK(m.triangles[0] == Triangle{0, 1, 2});
    for (const auto& n : m.normals) CHECK((n - Vec3f(0, 0, 1)).norm() < 1e-6f);
}

TEST_CASE("obj quad is fan triangulated") {
    const Mesh m = parse_obj("v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n");
    REQUIRE(m.triangles.size() == 2);
    CHECK(m.triangles[0] == Triangle{0, 1, 2});
    CHECK(m.triangles[1] == Triangle{0, 2, 3});
}

TEST_CASE("obj with vt records matches a hand-parsed fixture") {
    // 2x5 strip of quads = 10 triangles; uvs deliberately outside [0,1].
    std::string text = "# strip\n";
    for (int i = 0; i <= 5; ++i) text += "v " + std::to_string(i) + " 0 0\nv " + std::to_string(i) + " 1 0\n";
    text += "vt 1.25 0.5\nvt -0.25 0.5\nvt 0.5 2.75\nvt 0.5 0.5\n";
    for (int i = 0; i < 5; ++i) {
        const int a = 2 * i + 1, b = 2 * i + 3, c = 2 * i + 4, d = 2 * i + 2;
        text += "f " + std::to_string(a) + "/1 " + std::to_string(b) + "/2 " + std::to_string(c) + "/3\n";
        text += "f " + std::to_string(a) + "/1 " + std::to_string(c) + "/3 " + std::to_string(d) + "/4\n";
    }
    const Mesh m = parse_obj(text);
    CHECK(m.triangles.size() == 10);
    REQUIRE(m.uvs.size() == m.vertices.size());
    for (const auto& uv : m.uvs) {
        CHECK(uv.x() >= 0.0f);
        CHECK(uv.x() <= 1.0f);
        CHECK(uv.y() >= 0.0f);
        CHECK(uv.y() <= 1.0f);
    }
    // First vertex emitted is (v1, vt1): position (0,0,0), uv 1.25 -> 0.25.
    CHECK(m.vertices[0] == Vec3f(0, 0, 0));
    CHECK(m.uvs[0].x() == doctest::Approx(0.25));
    // Second is (v3, vt2): position (1,0,0), uv -0.25 -> 0.75.
    CHECK(m.vertices[1] == Vec3f(1, 0, 0));
    CHECK(m.uvs[1].x() == doctest::Approx(0.75));
    CHECK(m.uvs[2].y() == doctest::Approx(0.75));
}

TEST_CASE("obj errors carry line numbers or are structural") {
    try {
        parse_obj("v 0 0 0\nv 1 0\n");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
    }
    CHECK_THROWS_AS(parse_obj("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 7\n"), StructuralError);
}

TEST_CASE("glb with one position-only triangle") {
    const GlbScene s = parse_glb(assemble_glb(triangle_json(3), triangle_positions()));
    REQUIRE(s.meshes.size() == 1);
    const Mesh& m = s.meshes[0];
    REQUIRE(m.vertices.size() == 3);
    CHECK(m.vertices[1] == Vec3f(1, 0, 0));
    CHECK(m.vertices[2] == Vec3f(0, 1, 0));
    REQUIRE(m.triangles.size() == 1);
    REQUIRE(m.normals.size() == 3);
    CHECK((m.normals[0] - Vec3f(0, 0, 1)).norm() < 1e-6f);
    REQUIRE(s.instances.size() == 1);
    CHECK(s.instances[0].world.matrix().isIdentity());
}

TEST_CASE("glb with a 2x2 texture") {
    Texture tex(2, 2);
    for (std::size_t i = 0; i < tex.pixels.size(); ++i) tex.pixels[i] = static_cast<std::uint8_t>(20 * i);
    const auto png = encode_png(tex);
    std::vector<std::uint8_t> bin = triangle_positions();
    for (float f : {0.f, 0.f, 1.f, 0.f, 0.f, 1.f}) put_f32(bin, f);
    const std::size_t png_offset = bin.size();
    bin.insert(bin.end(), png.begin(), png.end());
    const std::string json =
        R"({"asset":{"version":"2.0"},"buffers":[{"byteLength":)" + std::to_string(bin.size()) +
        R"(}],"bufferViews":[{"buffer":0,"byteOffset":0,"byteLength":36},{"buffer":0,"byteOffset":36,"byteLength":24},)"
        R"({"buffer":0,"byteOffset":)" + std::to_string(png_offset) + R"(,"byteLength":)" + std::to_string(png.size()) +
        R"(}],"accessors":[{"bufferView":0,"componentType":5126,"count":3,"type":"VEC3"},)"
        R"({"bufferView":1,"componentType":5126,"count":3,"type":"VEC2"}],)"
        R"("images":[{"bufferView":2,"mimeType":"image/png"}],"textures":[{"source":0}],)"
        R"("materials":[{"pbrMetallicRoughness":{"baseColorTexture":{"index":0}}}],)"
        R"("meshes":[{"primitives":[{"attributes":{"POSITION":0,"TEXCOORD_0":1},"material":0}]}],)"
        R"("nodes":[{"mesh":0,"translation":[1,2,3]}],"scenes":[{"nodes":[0]}],"scene":0})";
    const GlbScene s = parse_glb(assemble_glb(json, bin));
    REQUIRE(s.textures.size() == 1);
    CHECK(s.textures[0].pixels.size() == 12);
    CHECK(s.textures[0] == tex);
    REQUIRE(s.meshes.size() == 1);
    CHECK(s.meshes[0].uvs.size() == 3);
    CHECK(s.meshes[0].texture_id == std::optional<std::size_t>(0));
    CHECK((s.instances[0].world.translation() - Vec3d(1, 2, 3)).norm() < 1e-12);
}

TEST_CASE("glb errors") {
    CHECK_THROWS_AS(parse_glb(assemble_glb(triangle_json(3), triangle_positions(), 0x12345678)), FormatError);
    CHECK_THROWS_AS(parse_glb(assemble_glb(triangle_json(4), triangle_positions())), StructuralError);
    try {
        parse_glb(assemble_glb(triangle_json(3, 5130), triangle_positions()));
        FAIL("expected an unsupported-feature error");
    } catch (const UnsupportedFeatureError& e) {
        CHECK(std::string(e.what()).find("5130") != std::string::npos);
    }
}

TEST_CASE("ply round trips") {
    const Mesh cube = make_cube_shared(Vec3f(0, 0, 0), Vec3f(1, 1, 1));
    for (auto enc : {PlyEncoding::BinaryLittleEndian, PlyEncoding::Ascii}) {
        const Mesh back = parse_ply(write_ply(cube, enc));
        CHECK(back.vertices == cube.vertices);
        CHECK(back.triangles == cube.triangles);
        CHECK(back.vertices.size() == 8);
        CHECK(back.triangles.size() == 12);
    }
    const Mesh empty = parse_ply(write_ply(Mesh{}));
    CHECK(empty.vertices.empty());
    CHECK(empty.triangles.empty());
    const std::string text(reinterpret_cast<const char*>(write_ply(Mesh{}, PlyEncoding::Ascii).data()),
                           write_ply(Mesh{}, PlyEncoding::Ascii).size());
    CHECK(text.find("element vertex 0") != std::string::npos);
    CHECK(text.find("element face 0") != std::string::npos);
}

TEST_CASE("ply errors") {
    const std::string head = "ply\nformat ascii 1.0\nelement vertex 3\nproperty float x\nproperty float y\nproperty float z\n"
                             "element face 1\nproperty list uchar int vertex_indices\nend_header\n";
    CHECK(parse_ply(bytes_of(head + "0 0 0\n1 0 0\n0 1 0\n3 0 1 2\n")).triangles.size() == 1);
    CHECK_THROWS_AS(parse_ply(bytes_of(head + "0 0 0\n1 0 0\n3 0 1 2\n")), StructuralError);
    CHECK_THROWS_AS(parse_ply(bytes_of(head + "0 0 0\n1 0 0\n0 1 0\n3 0 1 9\n")), StructuralError);
    const std::string bad_type = "ply\nformat ascii 1.0\nelement vertex 1\nproperty quaternion x\nend_header\n1\n";
    CHECK_THROWS_AS(parse_ply(bytes_of(bad_type)), ParseError);
}

TEST_CASE("random meshes round trip through ply and obj with identical topology") {
    Rng rng(7);
    for (int k = 0; k < 25; ++k) {
        Mesh m = test::random_mesh(rng, 5 + rng.below(40), 1 + rng.below(60));
        compute_vertex_normals(m);
        const Mesh p = parse_ply(write_ply(m));
        CHECK(p.vertices == m.vertices);
        CHECK(p.triangles == m.triangles);
        CHECK(write_ply(p) == write_ply(m));
        // OBJ re-indexes per (v, vt, vn) tuple, so compare corner positions.
        const Mesh o = parse_obj(write_obj(m));
        REQUIRE(o.triangles.size() == m.triangles.size());
        for (std::size_t t = 0; t < m.triangles.size(); ++t)
            for (int c = 0; c < 3; ++c) CHECK(o.vertices[o.triangles[t][c]] == m.vertices[m.triangles[t][c]]);
    }
}

TEST_CASE("clip container round trip and header-only read") {
    const ClipContainer c = small_clip(2, 224, 224);
    CHECK(read_clip(write_clip(c)) == c);

    test::TempDir dir("clip");
    ClipContainer big = small_clip(250, 8, 8);
    save_clip(dir / "big.clip", big);
    const ClipHeader h = load_clip_header(dir / "big.clip");
    CHECK(h.frame_count == 250);
    CHECK(h.label == "walking");
    std::ifstream in(dir / "big.clip", std::ios::binary);
    const ClipHeader h2 = read_clip_header(in);
    CHECK(h2 == h);
    CHECK(static_cast<std::size_t>(in.tellg()) + 250 * h.frame_bytes() == std::filesystem::file_size(dir / "big.clip"));
}

TEST_CASE("clip container errors") {
    auto bytes = write_clip(small_clip(10));
    bytes.resize(bytes.size() - 4 * 3 * 3);
    CHECK_THROWS_AS(read_clip(bytes), FormatError);
    auto bad = write_clip(small_clip(1));
    bad[0] = 'X';
    CHECK_THROWS_AS(read_clip(bad), FormatError);
}

TEST_CASE("png export is lossless with zero-padded names") {
    test::TempDir dir("png");
    const ClipContainer c = small_clip(3);
    const auto files = export_png_frames(c, dir / "frames");
    REQUIRE(files.size() == 3);
    CHECK(files[0].filename() == "000000.png");
    CHECK(files[2].filename() == "000002.png");
    for (std::size_t i = 0; i < 3; ++i) CHECK(read_png(files[i]).pixels == c.frames[i]);
    CHECK(export_png_frames(small_clip(0), dir / "empty").empty());
    CHECK(std::filesystem::is_directory(dir / "empty"));
    CHECK(std::filesystem::is_empty(dir / "empty"));
}

TEST_CASE("motion takes") {
    const std::string two = R"({"subject":"s01","label":"walking","fps":25,"joints":["root","spine"],)"
                            R"("frames":[[[0,0,0],[0,0,0]],[[0,0,0],[0,0,0]]]})";
    const MotionTake t = parse_motion_take(two);
    REQUIRE(t.frames.size() == 2);
    for (const auto& f : t.frames)
        for (const auto& r : f.joint_rotations) CHECK(r.isZero());
    CHECK(t.joint_names == std::vector<std::string>{"root", "spine"});

    std::string jumping = two;
    jumping.replace(jumping.find("walking"), 7, "jumping");
    CHECK_THROWS_AS(parse_motion_take(jumping), ValidationError);

    const std::string short_frame = R"({"subject":"s01","label":"walking","fps":25,"joints":["root","spine"],)"
                                    R"("frames":[[[0,0,0]],[[0,0,0],[0,0,0]]]})";
    CHECK_THROWS_AS(parse_motion_take(short_frame), StructuralError);

    const SkinnedBody body = make_procedural_humanoid();
    const MotionTake wave = make_procedural_take(body.rig, ActionLabel::HandWaving, "s01", 120);
    const std::string text = write_motion_take(wave);
    const MotionTake back = parse_motion_take(text);
    CHECK(write_motion_take(back) == text);
    REQUIRE(back.frames.size() == 120);
    for (std::size_t f = 0; f < 120; ++f)
        for (std::size_t j = 0; j < body.rig.size(); ++j)
            CHECK(back.frames[f].joint_rotations[j] == wave.frames[f].joint_rotations[j]);
}

TEST_CASE("rig json round trip") {
    const SkinnedBody body = make_procedural_humanoid();
    const std::string text = write_rig(body);
    const SkinnedBody back = parse_rig(text);
    CHECK(write_rig(back) == text);
    CHECK(back.template_mesh.vertices == body.template_mesh.vertices);
    CHECK(back.rig.size() == body.rig.size());
}

TEST_CASE("manifest weights and round trip") {
    const auto w = default_stream_weights();
    CHECK(w.at("BG+R") == StreamWeights{1, 0});
    CHECK(w.at("BG+R2T") == StreamWeights{0, 1});
    CHECK(w.at("3D+R") == StreamWeights{1, 1});
    CHECK(w.at("3D+M") == StreamWeights{1, 1});
    CHECK(w.at("R3D+R") == StreamWeights{1, 1});
    CHECK(w.at("real") == StreamWeights{8, 3});

    Manifest m;
    m.weights = w;
    ManifestEntry e;
    e.path = "BG+R/walking/s01_0.clip";
    e.seed = 0xfedcba9876543210ULL;
    e.frame_count = 50;
    m.entries.push_back(e);
    e.path = "BG+R/walking/s01_1.clip";
    e.error = "boom";
    m.entries.push_back(e);
    CHECK(parse_manifest(write_manifest(m)) == m);

    m.entries[1].path = m.entries[0].path;
    CHECK_THROWS_AS(m.validate(), ValidationError);
    m.entries.pop_back();
    m.weights["BG+R"].rgb = -1;
    CHECK_THROWS_AS(m.validate(), ValidationError);
}

TEST_CASE("flow container round trip") {
    FlowSequence seq;
    seq.normalized = true;
    for (int k = 0; k < 3; ++k) {
        FlowField f(5, 4);
        for (std::size_t i = 0; i < f.size(); ++i) {
            f.u[i] = static_cast<float>(i) / 40.0f - 0.5f;
            f.v[i] = -static_cast<float>(k) / 7.0f;
        }
        seq.fields.push_back(f);
    }
    std::stringstream ss;
    write_flow(seq, ss);
    const std::string bytes = ss.str();
    CHECK(bytes.substr(0, 4) == "SFLO");
    std::stringstream in(bytes);
    CHECK(read_flow(in) == seq);
    std::stringstream hin(bytes);
    const FlowHeader h = read_flow_header(hin);
    CHECK(h.count == 3);
    CHECK(h.width == 5);
    CHECK(h.normalized);
}

TEST_CASE("parsers only raise structured errors on arbitrary bytes") {
    Rng rng(99);
    const std::vector<std::string> seeds = {
        "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n",
        std::string(reinterpret_cast<const char*>(write_ply(make_cube_shared(Vec3f(0, 0, 0), Vec3f(1, 1, 1))).data()), 300),
        R"({"subject":"s","label":"walking","fps":25,"joints":["a"],"frames":[[[0,0,0]],[[0,0,0]]]})",
    };
    auto glb = assemble_glb(triangle_json(3), triangle_positions());
    auto clip = write_clip(small_clip(2));
    int structured = 0;
    for (int k = 0; k < 400; ++k) {
        std::vector<std::uint8_t> buf;
        switch (k % 5) {
            case 0:
            case 1:
            case 2: buf = bytes_of(seeds[static_cast<std::size_t>(k % 3)]); break;
            case 3: buf = glb; break;
            default: buf = clip; break;
        }
        const int flips = 1 + static_cast<int>(rng.below(8));
        for (int f = 0; f < flips && !buf.empty(); ++f) buf[rng.below(buf.size())] = static_cast<std::uint8_t>(rng.below(256));
        if (rng.below(4) == 0) buf.resize(rng.below(buf.size() + 1));
        const std::string text(buf.begin(), buf.end());
        try {
            switch (k % 5) {
                case 0: (void)parse_obj(text); break;
                case 1: (void)parse_ply(buf); break;
                case 2: (void)parse_motion_take(text); break;
                case 3: (void)parse_glb(buf); break;
                default: (void)read_clip(buf); break;
            }
        } catch (const Error&) {
            ++structured;
        }
    }
    CHECK(structured > 0);
}

}  // TEST_SUITE
