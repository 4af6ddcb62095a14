#include "multicrop/geometry.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "multicrop/rng.hpp"

using namespace multicrop;

namespace {

// Plain-arithmetic projection oracle, written without the library types.
double oracle_u(double x, double z, double s, double t_x, double f, double res) {
    const double tz = 2.0 * f / (res * s);
    return f * (x + t_x) / (z + tz) + res / 2.0;
}

BBox random_bbox(CounterRng& rng) {
    return {rng.uniform(-500.0, 500.0), rng.uniform(-300.0, 300.0), rng.uniform(20.0, 800.0)};
}

FullCamera random_full(CounterRng& rng) {
    FullCamera full;
    full.t_x = rng.uniform(-2.0, 2.0);
    full.t_y = rng.uniform(-2.0, 2.0);
    full.t_z = rng.uniform(2.0, 20.0);
    full.width = rng.uniform(320.0, 4000.0);
    full.height = rng.uniform(240.0, 3000.0);
    return full;
}

}  // namespace

TEST_CASE("crop depth follows 2f/(res s)") {
    CHECK(crop_tz({1.0, 0.0, 0.0}) == 2.0 * 5000.0 / 224.0);
    CHECK(crop_tz({2.0, 0.0, 0.0}) == doctest::Approx(10000.0 / (224.0 * 2.0)).epsilon(1e-15));
    CropIntrinsics intr{1000.0, 100.0};
    CHECK(crop_tz({0.5, 0.0, 0.0}, intr) == doctest::Approx(2000.0 / 50.0).epsilon(1e-15));
    CHECK_THROWS_AS(crop_tz({0.0, 0.0, 0.0}), DegenerateCamera);
    CHECK_THROWS_AS(crop_tz({-1.0, 0.0, 0.0}), DegenerateCamera);
}

TEST_CASE("crop projection matches the scalar oracle") {
    CounterRng rng(11);
    for (int i = 0; i < 200; ++i) {
        const LocalCamera cam{rng.uniform(0.3, 4.0), rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
        const Joint3D j{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), rng.uniform(-0.5, 0.5)};
        const Joint2D p = project_crop(j, cam);
        CHECK(p.u == doctest::Approx(oracle_u(j.x, j.z, cam.s, cam.t_x, 5000.0, 224.0)).epsilon(1e-14));
        CHECK(p.v == doctest::Approx(oracle_u(j.y, j.z, cam.s, cam.t_y, 5000.0, 224.0)).epsilon(1e-14));
    }
}

TEST_CASE("crop projection centers the origin") {
    // x + t_x = 0 at z = 0 lands on the crop center regardless of scale.
    const Joint2D p = project_crop({0.25, -0.5, 0.0}, {1.7, -0.25, 0.5});
    CHECK(p.u == doctest::Approx(112.0).epsilon(1e-14));
    CHECK(p.v == doctest::Approx(112.0).epsilon(1e-14));
}

TEST_CASE("joints behind the crop camera are rejected") {
    const LocalCamera cam{1.0, 0.0, 0.0};
    const double tz = crop_tz(cam);
    CHECK_THROWS_AS(project_crop({0.0, 0.0, -tz - 0.1}, cam), BehindCamera);
    CHECK_THROWS_AS(project_crop({0.0, 0.0, -tz}, cam), BehindCamera);
}

TEST_CASE("full focal length is the image diagonal") {
    CHECK(full_focal(1920.0, 1080.0) == std::sqrt(1920.0 * 1920.0 + 1080.0 * 1080.0));
    CHECK(full_focal(3.0, 4.0) == doctest::Approx(5.0).epsilon(1e-15));
    CHECK_THROWS_AS(full_focal(0.0, 100.0), InvalidImage);
    CHECK_THROWS_AS(full_focal(100.0, -5.0), InvalidImage);
}

TEST_CASE("local_to_full matches explicit formulas") {
    const ImageSize img{1920.0, 1080.0};
    const BBox bbox{150.0, -80.0, 250.0};
    const LocalCamera cam{1.4, 0.2, -0.1};
    const FullCamera full = local_to_full(cam, bbox, img);
    const double f = std::sqrt(1920.0 * 1920.0 + 1080.0 * 1080.0);
    CHECK(full.t_x == doctest::Approx(0.2 + 2.0 * 150.0 / (250.0 * 1.4)).epsilon(1e-15));
    CHECK(full.t_y == doctest::Approx(-0.1 + 2.0 * -80.0 / (250.0 * 1.4)).epsilon(1e-15));
    CHECK(full.t_z == doctest::Approx(2.0 * f / (250.0 * 1.4)).epsilon(1e-15));
    CHECK(full.width == 1920.0);
    CHECK(full.height == 1080.0);
    CHECK_THROWS_AS(local_to_full({0.0, 0.0, 0.0}, bbox, img), DegenerateCamera);
    CHECK_THROWS_AS(local_to_full(cam, {0.0, 0.0, -1.0}, img), InvalidBBox);
}

TEST_CASE("camera conversion round-trips to 1e-12 relative") {
    CounterRng rng(7);
    for (int i = 0; i < 10000; ++i) {
        const FullCamera full = random_full(rng);
        const BBox bbox = random_bbox(rng);
        const LocalCamera cam = full_to_local(full, bbox);
        const FullCamera back = local_to_full(cam, bbox, {full.width, full.height});
        const auto rel = [](double a, double b) {
            return std::abs(a - b) / std::max(1.0, std::abs(b));
        };
        CHECK(rel(back.t_x, full.t_x) <= 1e-12);
        CHECK(rel(back.t_y, full.t_y) <= 1e-12);
        CHECK(rel(back.t_z, full.t_z) <= 1e-12);
    }
}

TEST_CASE("shared apparent size implies a shared full depth") {
    const ImageSize img{1000.0, 800.0};
    // b_i s_i = 120 = b_j s_j with different splits.
    const FullCamera a = local_to_full({1.2, 0.3, 0.1}, {40.0, 10.0, 100.0}, img);
    const FullCamera b = local_to_full({0.8, -0.5, 0.0}, {-30.0, 25.0, 150.0}, img);
    CHECK(a.t_z == doctest::Approx(b.t_z).epsilon(1e-12));
}

TEST_CASE("full projection matches the pinhole oracle") {
    CounterRng rng(13);
    for (int i = 0; i < 200; ++i) {
        const FullCamera full = random_full(rng);
        const Joint3D j{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), rng.uniform(-0.5, 0.5)};
        const double f = std::sqrt(full.width * full.width + full.height * full.height);
        const Joint2D p = project_full(j, full);
        CHECK(p.u ==
              doctest::Approx(f * (j.x + full.t_x) / (j.z + full.t_z) + full.width / 2.0).epsilon(1e-14));
        CHECK(p.v ==
              doctest::Approx(f * (j.y + full.t_y) / (j.z + full.t_z) + full.height / 2.0).epsilon(1e-14));
    }
    FullCamera close = random_full(rng);
    close.t_z = 0.2;
    CHECK_THROWS_AS(project_full({0.0, 0.0, -0.3}, close), BehindCamera);
}

TEST_CASE("translation offsets shift projections by f delta over depth") {
    CounterRng rng(17);
    for (int i = 0; i < 100; ++i) {
        const LocalCamera cam{rng.uniform(0.5, 3.0), rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
        const Joint3D j{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), rng.uniform(-0.3, 0.3)};
        const double delta = rng.uniform(-0.5, 0.5);
        LocalCamera shifted = cam;
        shifted.t_x += delta;
        const double depth = j.z + crop_tz(cam);
        const double expected = project_crop(j, cam).u + 5000.0 * delta / depth;
        CHECK(project_crop(j, shifted).u == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("projection of a joint list is elementwise") {
    CounterRng rng(19);
    Joints3D joints;
    for (int k = 0; k < 12; ++k)
        joints.push_back({rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), rng.uniform(-0.3, 0.3)});
    const LocalCamera cam{1.1, 0.05, -0.2};
    const Joints2D batch = project_crop(joints, cam);
    REQUIRE(batch.size() == joints.size());

    std::vector<std::size_t> order(joints.size());
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
    std::mt19937 shuf(123);
    std::shuffle(order.begin(), order.end(), shuf);
    Joints3D permuted;
    for (const std::size_t k : order) permuted.push_back(joints[k]);
    const Joints2D batch_permuted = project_crop(permuted, cam);
    for (std::size_t k = 0; k < order.size(); ++k) {
        CHECK(batch_permuted[k].u == batch[order[k]].u);
        CHECK(batch_permuted[k].v == batch[order[k]].v);
    }
}

TEST_CASE("crop pixel map sends the crop window to [0, res]") {
    const ImageSize img{1920.0, 1080.0};
    const BBox bbox{100.0, -50.0, 200.0};
    const double cx_px = 100.0 + 960.0;  // absolute center column
    const double cy_px = -50.0 + 540.0;
    const Joint2D center = crop_pixel_map({cx_px, cy_px}, bbox, img);
    CHECK(center.u == doctest::Approx(112.0).epsilon(1e-14));
    CHECK(center.v == doctest::Approx(112.0).epsilon(1e-14));
    const Joint2D corner = crop_pixel_map({cx_px - 100.0, cy_px - 100.0}, bbox, img);
    CHECK(corner.u == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(corner.v == doctest::Approx(0.0).epsilon(1e-14));
    // b=200 and res=224: one full-image pixel is 1.12 crop pixels.
    const Joint2D shifted = crop_pixel_map({cx_px + 1.0, cy_px}, bbox, img);
    CHECK(shifted.u - center.u == doctest::Approx(1.12).epsilon(1e-14));
}

TEST_CASE("crop and mapped full projection agree at zero depth") {
    CounterRng rng(23);
    for (int i = 0; i < 500; ++i) {
        const ImageSize img{rng.uniform(640.0, 3840.0), rng.uniform(480.0, 2160.0)};
        const BBox bbox = random_bbox(rng);
        const LocalCamera cam{rng.uniform(0.3, 4.0), rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
        const Joint3D j{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), 0.0};
        const FullCamera full = local_to_full(cam, bbox, img);
        const Joint2D direct = project_crop(j, cam);
        const Joint2D mapped = crop_pixel_map(project_full(j, full), bbox, img);
        CHECK(std::abs(direct.u - mapped.u) <= 1e-9);
        CHECK(std::abs(direct.v - mapped.v) <= 1e-9);
    }
}

TEST_CASE("crop/full deviation scales linearly in joint depth") {
    CounterRng rng(29);
    int checked = 0;
    for (int i = 0; i < 300; ++i) {
        const ImageSize img{1920.0, 1080.0};
        const BBox bbox = random_bbox(rng);
        const LocalCamera cam{rng.uniform(0.5, 3.0), rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)};
        const FullCamera full = local_to_full(cam, bbox, img);
        const double z = rng.uniform(0.005, 0.04) * full.t_z;
        // Same lateral position for both depths so only z changes.
        const double x = rng.uniform(-0.5, 0.5);
        const double y = rng.uniform(-0.5, 0.5);
        const auto dev_at = [&](double depth) {
            const Joint3D j{x, y, depth};
            const Joint2D direct = project_crop(j, cam);
            const Joint2D mapped = crop_pixel_map(project_full(j, full), bbox, img);
            return std::hypot(direct.u - mapped.u, direct.v - mapped.v);
        };
        const double d1 = dev_at(z);
        const double d2 = dev_at(2.0 * z);
        if (d1 < 1e-9) continue;  // deviation too small to measure a ratio
        ++checked;
        CHECK(d2 / d1 >= 1.8);
        CHECK(d2 / d1 <= 2.2);
    }
    CHECK(checked > 200);
}
