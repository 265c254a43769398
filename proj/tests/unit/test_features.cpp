#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include <dancestyle/features.hpp>
#include <dancestyle/pipeline.hpp>

#include "support.hpp"

using namespace dancestyle;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;

namespace {

// Eight-joint skeleton whose joint order matches the role order.
MotionSequence role_skeleton(const std::vector<std::array<Point, 8>>& frames) {
    MotionSequence seq;
    seq.video_id = "roles";
    seq.fps = 10.0;
    seq.dims = 3;
    seq.joint_names = {"lh", "rh", "ls", "rs", "lw", "rw", "la", "ra"};
    for (const auto& frame : frames)
        for (const auto& p : frame) seq.coords.insert(seq.coords.end(), p.begin(), p.end());
    return seq;
}

JointRoleMap role_skeleton_map() {
    JointRoleMap map;
    map.joints = {"lh", "rh", "ls", "rs", "lw", "rw", "la", "ra"};
    return map;
}

std::array<Point, 8> upright_pose() {
    return {{{0.1, 1, 0}, {-0.1, 1, 0}, {0.2, 1.5, 0}, {-0.2, 1.5, 0}, {0.3, 1, 0}, {-0.3, 1, 0}, {0.1, 0, 0}, {-0.1, 0, 0}}};
}

double oracle_distance(const Point& a, const Point& b) {
    return std::hypot(a[0] - b[0], a[1] - b[1], a[2] - b[2]);
}

struct Stat {
    long double mean, std;
};

// segment boundaries from floating division, long double accumulation
std::vector<Stat> brute_segments(const std::vector<double>& x, std::size_t n) {
    std::vector<Stat> out;
    const std::size_t L = x.size();
    for (std::size_t s = 0; s < n; ++s) {
        const auto b = static_cast<std::size_t>(std::floor(static_cast<double>(s) * static_cast<double>(L) / static_cast<double>(n) + 1e-9));
        const auto e = static_cast<std::size_t>(std::floor(static_cast<double>(s + 1) * static_cast<double>(L) / static_cast<double>(n) + 1e-9));
        long double sum = 0, sq = 0;
        for (std::size_t i = b; i < e; ++i) sum += x[i];
        const long double mean = sum / static_cast<long double>(e - b);
        for (std::size_t i = b; i < e; ++i) sq += (x[i] - mean) * (x[i] - mean);
        out.push_back({mean, std::sqrt(sq / static_cast<long double>(e - b))});
    }
    return out;
}

}  // namespace

TEST_CASE("hip center", "[features]") {
    auto pose = upright_pose();
    pose[0] = {0, 0, 0};
    pose[1] = {2, 0, 0};
    auto seq = role_skeleton({pose, pose, pose});
    const auto roles = resolve_roles(role_skeleton_map(), seq);
    CHECK(hip_center(seq, 0, roles) == Point{1, 0, 0});

    pose[0] = {1, 2, 3};
    pose[1] = {3, 6, 1};
    seq = role_skeleton({pose, pose, pose});
    CHECK(hip_center(seq, 1, roles) == Point{2, 4, 2});

    pose[0] = pose[1] = {0.5, -2, 7};
    seq = role_skeleton({pose, pose, pose});
    CHECK(hip_center(seq, 2, roles) == Point{0.5, -2, 7});
}

TEST_CASE("joint to hip distances", "[features]") {
    auto pose = upright_pose();
    pose[0] = {-1, 0, 0};
    pose[1] = {1, 0, 0};
    pose[4] = {0, 0, 0};   // at the hip center
    pose[5] = {3, 4, 0};   // 3-4-5 from the hip center
    const auto seq = role_skeleton({pose, pose, pose});
    const auto d = joint_hip_distances(seq, resolve_roles(role_skeleton_map(), seq));
    REQUIRE(d.size() == 8);
    for (std::size_t t = 0; t < 3; ++t) {
        CHECK(d[4][t] == 0.0);
        CHECK(d[5][t] == 5.0);
        CHECK(d[0][t] == 1.0);
    }
}

TEST_CASE("extremity distances", "[features]") {
    auto pose = upright_pose();
    pose[4] = {0, 0, 0};
    pose[5] = {1, 0, 0};
    pose[6] = {0, -3, 0};  // left foot: 3 from left hand
    pose[7] = {1, 5, 0};   // right foot
    // right hand to left foot = hypot(1, 3); left hand to right foot = hypot(1, 5)
    auto seq = role_skeleton({pose, pose, pose});
    const auto roles = resolve_roles(role_skeleton_map(), seq);
    const auto e = extremity_distances(seq, roles);
    CHECK(e.hands[0] == 1.0);
    CHECK(e.feet[0] == oracle_distance({0, -3, 0}, {1, 5, 0}));
    CHECK_THAT(e.cross[0], WithinAbs(0.5 * (std::hypot(1.0, 3.0) + std::hypot(1.0, 5.0)), 1e-15));

    // cross distances 3 and 5 -> 4
    pose[4] = {0, 0, 0};
    pose[5] = {10, 0, 0};
    pose[6] = {10, 3, 0};  // right hand to left foot = 3
    pose[7] = {0, 5, 0};   // left hand to right foot = 5
    seq = role_skeleton({pose, pose, pose});
    CHECK(extremity_distances(seq, roles).cross[0] == 4.0);

    // mirror-symmetric pose -> both cross distances equal
    pose = upright_pose();
    seq = role_skeleton({pose, pose, pose});
    const double d = oracle_distance(pose[5], pose[6]);
    CHECK_THAT(extremity_distances(seq, roles).cross[0], WithinAbs(d, 1e-15));
}

TEST_CASE("torso yaw direction", "[features]") {
    auto along = [](Point dir) {
        auto pose = upright_pose();
        for (std::size_t s : {2u, 3u})
            for (std::size_t d = 0; d < 3; ++d) pose[s][d] = pose[s - 2][d] + dir[d];
        return pose;
    };
    const auto map = role_skeleton_map();
    auto seq = role_skeleton({along({0, 0.5, 0.2}), along({0, 0.5, 0.2}), along({0, 0.5, 0.2})});
    CHECK_THAT(torso_yaw(seq, resolve_roles(map, seq))[0], WithinAbs(0.0, 1e-15));
    seq = role_skeleton({along({0.3, 0.5, 0}), along({0.3, 0.5, 0}), along({0.3, 0.5, 0})});
    CHECK_THAT(torso_yaw(seq, resolve_roles(map, seq))[0], WithinAbs(std::numbers::pi / 2, 1e-15));

    // z-up data uses the x-y plane
    JointRoleMap zup = map;
    zup.vertical_axis = 2;
    seq = role_skeleton({along({0, 0.3, 0.5}), along({0, 0.3, 0.5}), along({0, 0.3, 0.5})});
    CHECK_THAT(torso_yaw(seq, resolve_roles(zup, seq))[0], WithinAbs(0.0, 1e-15));

    // degenerate frames hold the previous angle
    seq = role_skeleton({along({0.3, 0.5, 0}), along({0, 0.5, 0}), along({0, 0.5, 0})});
    const auto yaw = torso_yaw(seq, resolve_roles(map, seq));
    CHECK(yaw[1] == yaw[0]);
    CHECK(yaw[2] == yaw[0]);
    seq = role_skeleton({along({0, 0.5, 0}), along({0, 0.5, 0}), along({0, 0.5, 0})});
    CHECK(torso_yaw(seq, resolve_roles(map, seq))[0] == 0.0);
}

TEST_CASE("angle unwrapping", "[features]") {
    auto two = unwrap_angles(std::vector<double>{3.0, -3.0});
    CHECK(two[0] == 3.0);
    CHECK_THAT(two[1], WithinAbs(-3.0 + 2 * std::numbers::pi, 1e-12));
    CHECK_THAT(two[1], WithinAbs(3.28319, 1e-5));

    const auto three = unwrap_angles(std::vector<double>{3.1, -3.1, 3.1});
    CHECK(three[0] == 3.1);
    CHECK_THAT(three[1], WithinAbs(-3.1 + 2 * std::numbers::pi, 1e-12));
    CHECK_THAT(three[2], WithinAbs(3.1, 1e-12));

    const std::vector<double> slow = {0.0, 0.4, 1.1, 2.0, 2.9, 2.5, 1.0};
    CHECK(unwrap_angles(slow) == slow);

    std::vector<double> eight;
    for (int k = 0; k < 8; ++k) eight.push_back(std::remainder(0.3 + k * std::numbers::pi / 4, 2 * std::numbers::pi));
    const auto u = unwrap_angles(eight);
    for (std::size_t i = 1; i < u.size(); ++i) CHECK(std::abs(u[i] - u[i - 1]) < std::numbers::pi);
}

TEST_CASE("yaw of a three-revolution spin stays continuous", "[features]") {
    std::vector<std::array<Point, 8>> frames;
    const int steps = 3 * 37;
    for (int k = 0; k <= steps; ++k) {
        const double th = 3.0 * 2.0 * std::numbers::pi * k / steps;
        auto pose = upright_pose();
        for (auto& p : pose) {
            const double x = p[0], z = p[2] + (p[1] > 1.2 ? 0.2 : 0.0);
            p[0] = x * std::cos(th) + z * std::sin(th);
            p[2] = -x * std::sin(th) + z * std::cos(th);
        }
        frames.push_back(pose);
    }
    const auto seq = role_skeleton(frames);
    const auto yaw = torso_yaw(seq, resolve_roles(role_skeleton_map(), seq));
    for (std::size_t i = 1; i < yaw.size(); ++i) REQUIRE(std::abs(yaw[i] - yaw[i - 1]) <= std::numbers::pi + 1e-12);
    CHECK_THAT(std::abs(yaw.back() - yaw.front()), WithinAbs(6 * std::numbers::pi, 1e-9));
}

TEST_CASE("velocity and acceleration", "[features]") {
    const std::vector<double> f = {0, 1, 3};
    const auto v = velocity(f, 1.0);
    CHECK(v == std::vector<double>{1, 2});
    CHECK(acceleration(v, 1.0) == std::vector<double>{1});

    const std::vector<double> c(10, 4.2);
    for (double x : velocity(c, 0.1)) CHECK(x == 0.0);
    for (double x : acceleration(velocity(c, 0.1), 0.1)) CHECK(x == 0.0);

    std::vector<double> sq;
    for (int t = 0; t < 40; ++t) sq.push_back((0.5 * t) * (0.5 * t));
    for (double x : acceleration(velocity(sq, 0.5), 0.5)) CHECK_THAT(x, WithinAbs(2.0, 1e-12));

    dancestyle::Rng rng(8);
    for (int trial = 0; trial < 50; ++trial) {
        const auto x = test_support::random_signal(3 + rng.below(100), rng);
        const double dt = rng.uniform(0.001, 1.0);
        const auto vel = velocity(x, dt);
        const auto acc = acceleration(vel, dt);
        REQUIRE(vel.size() == x.size() - 1);
        REQUIRE(acc.size() == x.size() - 2);
        for (std::size_t t = 0; t < vel.size(); ++t) REQUIRE(vel[t] == (x[t + 1] - x[t]) / dt);
        for (std::size_t t = 0; t < acc.size(); ++t) REQUIRE(acc[t] == (vel[t + 1] - vel[t]) / dt);
    }
    CHECK_THROWS_AS(velocity(std::vector<double>{1.0}, 1.0), DataError);
}

TEST_CASE("spectral channel", "[features]") {
    for (double v : spectral_channel(std::vector<double>(9, 2.5))) CHECK_THAT(v, WithinAbs(0.0, 1e-12));
    std::vector<double> s(8);
    for (std::size_t t = 0; t < 8; ++t) s[t] = std::sin(2 * std::numbers::pi * static_cast<double>(t) / 8);
    const auto mag = spectral_channel(s);
    for (std::size_t k = 0; k < 8; ++k) CHECK_THAT(mag[k], WithinAbs(k == 1 || k == 7 ? 4.0 : 0.0, 1e-12));

    dancestyle::Rng rng(9);
    for (int trial = 0; trial < 30; ++trial) {
        auto x = test_support::random_signal(5 + rng.below(300), rng);
        auto shifted = x;
        const double offset = rng.uniform(-50, 50);
        for (double& v : shifted) v += offset;
        const auto a = spectral_channel(x);
        const auto b = spectral_channel(shifted);
        for (std::size_t k = 0; k < a.size(); ++k) REQUIRE_THAT(a[k], WithinAbs(b[k], 1e-9));
    }
}

TEST_CASE("segment aggregation hand example", "[features]") {
    std::vector<double> x(10);
    for (int i = 0; i < 10; ++i) x[static_cast<std::size_t>(i)] = i;
    const auto s = segment_aggregate(x, 2);
    CHECK(s[0].mean == 2.0);
    CHECK(s[1].mean == 7.0);
    CHECK_THAT(s[0].std, WithinAbs(std::sqrt(2.0), 1e-15));
    CHECK_THAT(s[1].std, WithinAbs(std::sqrt(2.0), 1e-15));

    const auto whole = segment_aggregate(x, 1);
    CHECK(whole[0].mean == 4.5);
    CHECK_THAT(whole[0].std, WithinAbs(std::sqrt(8.25), 1e-15));

    for (const auto& st : segment_aggregate(std::vector<double>(17, -1.25), 4)) {
        CHECK(st.mean == -1.25);
        CHECK(st.std == 0.0);
    }
    CHECK_THROWS_AS(segment_aggregate(x, 11), DataError);
    CHECK_THROWS_AS(segment_aggregate(x, 0), DataError);
}

TEST_CASE("segment aggregation matches brute force", "[features]") {
    dancestyle::Rng rng(10);
    for (std::size_t n : {1u, 5u, 10u, 15u, 20u}) {
        for (std::size_t L = n; L <= 200; ++L) {
            const auto x = test_support::random_signal(L, rng);
            const auto got = segment_aggregate(x, n);
            const auto want = brute_segments(x, n);
            for (std::size_t s = 0; s < n; ++s) {
                REQUIRE_THAT(got[s].mean, WithinAbs(static_cast<double>(want[s].mean), 1e-12));
                REQUIRE_THAT(got[s].std, WithinAbs(static_cast<double>(want[s].std), 1e-12));
            }
        }
    }
}

TEST_CASE("feature counts", "[features]") {
    const auto seq3 = test_support::random_coco_sequence(120, 3, 21);
    const auto rows = extract_segment_features(seq3, coco_role_map());
    REQUIRE(rows.size() == 10);
    std::size_t total = 0;
    for (const auto& r : rows) {
        CHECK(r.values.size() == 168);
        total += r.values.size();
    }
    CHECK(total == 1680);
    CHECK(segment_column_names(channel_names(seq3.joint_names, 3)).size() == 168);

    const auto seq2 = project_to_2d(seq3);
    const auto rows2 = extract_segment_features(seq2, coco_role_map());
    for (const auto& r : rows2) CHECK(r.values.size() == 160);
    CHECK(segment_column_names(channel_names(seq2.joint_names, 2)).size() == 160);

    ExtractionOptions no_fft;
    no_fft.include_fft = false;
    CHECK(extract_segment_features(seq3, coco_role_map(), no_fft)[0].values.size() == 126);

    ExtractionOptions one;
    one.segments = 1;
    CHECK(extract_segment_features(seq3, coco_role_map(), one).size() == 1);

    ExtractionOptions many;
    many.segments = 119;
    CHECK_THROWS_WITH(extract_segment_features(seq3, coco_role_map(), many), ContainsSubstring("too short"));
}

TEST_CASE("segment vector layout", "[features]") {
    const auto seq = test_support::random_coco_sequence(97, 3, 22);
    ExtractionOptions opts;
    opts.segments = 7;
    const auto rows = extract_segment_features(seq, coco_role_map(), opts);
    const auto names = segment_column_names(channel_names(seq.joint_names, 3));

    // recompute a few channels directly
    std::vector<double> d_nose(97), hands(97);
    for (std::size_t t = 0; t < 97; ++t) {
        const Point hip = midpoint(seq.point(t, 11), seq.point(t, 12));
        d_nose[t] = oracle_distance(seq.point(t, 0), hip);
        hands[t] = oracle_distance(seq.point(t, 9), seq.point(t, 10));
    }
    std::vector<double> hands_v(96);
    for (std::size_t t = 0; t < 96; ++t) hands_v[t] = (hands[t + 1] - hands[t]) * 60.0;
    auto column = [&](const std::string& name) {
        const auto it = std::find(names.begin(), names.end(), name);
        REQUIRE(it != names.end());
        return static_cast<std::size_t>(it - names.begin());
    };
    const auto nose = brute_segments(d_nose, 7);
    const auto hv = brute_segments(hands_v, 7);
    for (std::size_t s = 0; s < 7; ++s) {
        CHECK(rows[s].segment_index == s);
        CHECK_THAT(rows[s].values[column("d_nose|f|mean")], WithinAbs(static_cast<double>(nose[s].mean), 1e-12));
        CHECK_THAT(rows[s].values[column("d_nose|f|std")], WithinAbs(static_cast<double>(nose[s].std), 1e-12));
        CHECK_THAT(rows[s].values[column("e_hands|v|std")], WithinAbs(static_cast<double>(hv[s].std), 1e-9));
    }
    CHECK(names.front() == "d_nose|f|mean");
    CHECK(names[6] == "d_nose|fft|mean");
    CHECK(names.back() == "yaw|fft|std");
    CHECK(segment_feature_name(names.front(), 3) == "d_nose|f|mean|s3");
}

TEST_CASE("global translation leaves every feature unchanged", "[features]") {
    dancestyle::Rng rng(23);
    for (int dims : {2, 3}) {
        for (int trial = 0; trial < 5; ++trial) {
            const auto seq = test_support::random_coco_sequence(64 + rng.below(100), dims, 100 + static_cast<std::uint64_t>(trial));
            auto moved = seq;
            std::array<double, 3> shift{rng.uniform(-100, 100), rng.uniform(-100, 100), rng.uniform(-100, 100)};
            for (std::size_t i = 0; i < moved.coords.size(); ++i) moved.coords[i] += shift[i % static_cast<std::size_t>(dims)];
            const auto a = extract_segment_features(seq, coco_role_map());
            const auto b = extract_segment_features(moved, coco_role_map());
            for (std::size_t s = 0; s < a.size(); ++s)
                for (std::size_t k = 0; k < a[s].values.size(); ++k)
                    REQUIRE_THAT(b[s].values[k], WithinAbs(a[s].values[k], 1e-9));
        }
    }
}

TEST_CASE("extraction errors", "[features]") {
    auto seq = test_support::random_coco_sequence(30, 3, 30);
    JointRoleMap map = coco_role_map();
    map[Role::hand_left] = "left_hand";
    CHECK_THROWS_WITH(extract_segment_features(seq, map), ContainsSubstring("left_hand"));
    CHECK_THROWS_AS(torso_yaw(project_to_2d(seq), resolve_roles(coco_role_map(), seq)), DataError);
}
