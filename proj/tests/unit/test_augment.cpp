#include "doctest.h"
#include "support.hpp"

#include "synact/augment/augment.hpp"
#include "synact/body/humanoid.hpp"
#include "synact/error.hpp"
#include "synact/scene/assets.hpp"

using namespace synact;

namespace {

const ProceduralSubject& subject() {
    static const ProceduralSubject s = make_procedural_subject("s01");
    return s;
}

AugmentAssets assets_with_everything() {
    AugmentAssets a;
    a.backgrounds = placeholder_backgrounds(64, 48);
    a.room = make_living_room();
    Environment recon;
    recon.name = "scan";
    SceneNode n;
    n.name = "scan";
    n.mesh = std::make_shared<const Mesh>(make_box(Vec3f(-3, 0, -3), Vec3f(3, 0.05f, 3)));
    recon.nodes.push_back(n);
    a.reconstructed.emplace("scan", recon);
    return a;
}

AugmentSpec motion_spec(double x1, double x2, double y1, double y2, double t1, double t2) {
    AugmentSpec s;
    s.method = AugmentMethod::RoomMotion;
    s.x1 = x1;
    s.x2 = x2;
    s.y1 = y1;
    s.y2 = y2;
    s.theta1 = t1;
    s.theta2 = t2;
    return s;
}

}  // namespace

TEST_SUITE("augment") {

TEST_CASE("rng is a fixed SplitMix64 stream") {
    // Reference values of SplitMix64 seeded with 0.
    Rng r(0);
    CHECK(r.next_u64() == 0xe220a8397b1dcdafULL);
    CHECK(r.next_u64() == 0x6e789e6aa1b965f4ULL);
    CHECK(r.next_u64() == 0x06c45d188009454fULL);
    Rng u(1);
    for (int i = 0; i < 1000; ++i) {
        const double v = u.uniform();
        CHECK(v >= 0.0);
        CHECK(v < 1.0);
        CHECK(u.below(6) < 6);
    }
    CHECK(StableHasher().add("ab").add("c").finish() != StableHasher().add("a").add("bc").finish());
}

TEST_CASE("sampled specs stay in range and validate") {
    const std::vector<std::string> ids{"a", "b", "c"};
    for (auto m : kAllMethods) {
        Rng rng(17);
        for (int k = 0; k < 10000; ++k) {
            const AugmentSpec s = sample_spec(m, rng, ids);
            REQUIRE_NOTHROW(s.validate());
            CHECK(s.method == m);
            if (s.theta) CHECK(std::abs(*s.theta) <= 90.0);
            if (s.s) CHECK((*s.s >= 0.7 && *s.s <= 1.3));
            if (s.x) CHECK(std::abs(*s.x) <= 0.5);
            if (s.y) CHECK(std::abs(*s.y) <= 0.1);
            if (s.background_index) CHECK((*s.background_index >= 0 && *s.background_index < 6));
            if (s.x1) CHECK((std::abs(*s.x1) <= 0.5 && std::abs(*s.x2) <= 0.5));
            if (s.y1) CHECK((std::abs(*s.y1) <= 0.1 && std::abs(*s.y2) <= 0.1));
            if (s.theta1) CHECK((std::abs(*s.theta1) <= 90.0 && std::abs(*s.theta2) <= 90.0));
            if (s.scene_id) CHECK(std::find(ids.begin(), ids.end(), *s.scene_id) != ids.end());
        }
    }
}

TEST_CASE("only the active fields are set") {
    Rng rng(1);
    const AugmentSpec bg = sample_spec(AugmentMethod::BgRotation, rng);
    CHECK(bg.theta.has_value());
    CHECK(bg.background_index.has_value());
    CHECK_FALSE(bg.s.has_value());
    CHECK_FALSE(bg.x1.has_value());
    AugmentSpec extra = bg;
    extra.s = 1.0;
    CHECK_THROWS_AS(extra.validate(), ValidationError);
    AugmentSpec wide = bg;
    wide.theta = 90.5;
    CHECK_THROWS_AS(wide.validate(), ValidationError);
    const AugmentSpec room = sample_spec(AugmentMethod::RoomRotation, rng);
    REQUIRE(room.color_name.has_value());
    CHECK_NOTHROW(palette_color(*room.color_name));
    const AugmentSpec rec = sample_spec(AugmentMethod::ReconRotation, rng);
    CHECK(rec.scene_id == std::optional<std::string>("default"));
}

TEST_CASE("same seed, same spec") {
    for (auto m : kAllMethods) {
        Rng a(42), b(42);
        CHECK(sample_spec(m, a) == sample_spec(m, b));
    }
}

TEST_CASE("scale mean over 1e5 draws") {
    Rng rng(123);
    double sum = 0;
    for (int k = 0; k < 100000; ++k) sum += *sample_spec(AugmentMethod::BgRotationScaleTranslate, rng).s;
    CHECK(std::abs(sum / 100000 - 1.0) < 0.01);
}

TEST_CASE("colours are drawn from the whole palette") {
    Rng rng(9);
    std::map<std::string, int> seen;
    for (int k = 0; k < 6000; ++k) ++seen[*sample_spec(AugmentMethod::RoomRotation, rng).color_name];
    CHECK(seen.size() == 12);
    for (const auto& [name, n] : seen) CHECK(std::abs(n - 500) < 100);
}

TEST_CASE("spec json round trip") {
    for (auto m : kAllMethods) {
        Rng rng(77);
        AugmentSpec s = sample_spec(m, rng);
        s.seed = 0xffffffffffffffffULL;
        CHECK(spec_from_json(spec_to_json(s)) == s);
    }
}

TEST_CASE("body placement") {
    AugmentSpec s;
    s.method = AugmentMethod::BgRotationScaleTranslate;
    s.background_index = 0;
    s.s = 1.0;
    s.x = 0.0;
    s.y = 0.0;
    BodyPlacement p = body_placement(s, 1.7);
    CHECK(p.translation == Vec2d(0, 0));
    CHECK(p.scale == 1.0);
    s.x = 0.5;
    s.y = 0.1;
    p = body_placement(s, 1.7);
    CHECK(p.translation.x() == doctest::Approx(0.85));
    CHECK(p.translation.y() == doctest::Approx(0.17));
    s.x = -0.5;
    CHECK(body_placement(s, 2.0).translation.x() == doctest::Approx(-1.0));
    CHECK_THROWS_AS(body_placement(s, 0.0), ContractError);
    AugmentSpec other;
    other.theta = 0.0;
    other.background_index = 0;
    CHECK_THROWS_AS(body_placement(other, 1.7), ContractError);
}

TEST_CASE("camera track endpoints, midpoint and degenerate track") {
    Rng rng(31);
    for (int k = 0; k < 200; ++k) {
        const AugmentSpec s = sample_spec(AugmentMethod::RoomMotion, rng);
        const double h = rng.uniform(1.4, 2.0);
        const std::size_t n = 2 + rng.below(100);
        const auto first = camera_track(s, 0, n, h);
        const auto last = camera_track(s, n - 1, n, h);
        CHECK(first.offset.x() == *s.x1 * h);
        CHECK(first.offset.y() == *s.y1 * h);
        CHECK(first.angle == *s.theta1);
        CHECK(last.offset.x() == *s.x2 * h);
        CHECK(last.offset.y() == *s.y2 * h);
        CHECK(last.angle == *s.theta2);
        if (n % 2 == 1) {
            const auto mid = camera_track(s, n / 2, n, h);
            CHECK(std::abs(mid.angle - 0.5 * (*s.theta1 + *s.theta2)) < 1e-9);
            CHECK((mid.offset - 0.5 * (first.offset + last.offset)).norm() < 1e-9);
        }
    }
    const AugmentSpec still = motion_spec(0.2, 0.2, -0.05, -0.05, 30, 30);
    for (std::size_t f = 0; f < 10; ++f) {
        const auto t = camera_track(still, f, 10, 1.7);
        CHECK(t.angle == doctest::Approx(30.0));
        CHECK(t.offset.x() == doctest::Approx(0.34));
    }
    CHECK_THROWS_AS(camera_track(still, 0, 1, 1.7), ContractError);
    CHECK_THROWS_AS(camera_track(still, 10, 10, 1.7), ContractError);
}

TEST_CASE("realize dispatches on the method") {
    const AugmentAssets assets = assets_with_everything();
    const auto& subj = subject();
    const MotionTake& take = subj.takes[0];
    Rng rng(4);

    const RealizedClip bg = realize(sample_spec(AugmentMethod::BgRotation, rng), assets, subj.body, take);
    REQUIRE(bg.frames.size() == take.frames.size());
    for (const auto& f : bg.frames) CHECK(f.camera.pose.matrix() == bg.frames[0].camera.pose.matrix());
    CHECK(bg.body_height > 1.0);

    const RealizedClip moving = realize(motion_spec(-0.3, 0.3, 0, 0.05, -20, 40), assets, subj.body, take);
    CHECK_FALSE(moving.frames.front().camera.pose.isApprox(moving.frames.back().camera.pose));
    CHECK(moving.track.size() == moving.frames.size());
    const RealizedClip still = realize(motion_spec(0.1, 0.1, 0.02, 0.02, 10, 10), assets, subj.body, take);
    CHECK(still.frames.front().camera.pose.isApprox(still.frames.back().camera.pose, 1e-12));

    AugmentSpec rec;
    rec.method = AugmentMethod::ReconRotation;
    rec.theta = 15.0;
    rec.scene_id = "scan";
    const RealizedClip r = realize(rec, assets, subj.body, take);
    bool found = false;
    for (const auto& n : r.frames[0].nodes) found |= n.mesh == assets.reconstructed.at("scan").nodes[0].mesh;
    CHECK(found);

    AugmentAssets empty;
    CHECK_THROWS_AS(realize(sample_spec(AugmentMethod::BgRotation, rng), empty, subj.body, take), ConfigError);
    CHECK_THROWS_AS(realize(sample_spec(AugmentMethod::RoomRotation, rng), empty, subj.body, take), ConfigError);
    rec.scene_id = "missing";
    CHECK_THROWS_AS(realize(rec, assets, subj.body, take), ConfigError);
}

TEST_CASE("temporal resampling indices") {
    CHECK(resample_indices(50, 25.0) == [] {
        std::vector<std::size_t> v(50);
        for (std::size_t i = 0; i < 50; ++i) v[i] = i;
        return v;
    }());
    const auto half = resample_indices(100, 50.0);
    REQUIRE(half.size() == 50);
    for (std::size_t k = 0; k < 50; ++k) CHECK(half[k] == 2 * k);
    const auto thirty = resample_indices(90, 30.0);
    REQUIRE(thirty.size() == 75);
    for (std::size_t k = 0; k < 75; ++k)
        CHECK(thirty[k] == std::min<std::size_t>(89, static_cast<std::size_t>(std::lround(k * 30.0 / 25.0))));
}

}  // TEST_SUITE
