#include "multicrop/solver.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

#include "multicrop/geometry.hpp"

using namespace multicrop;

namespace {

double max_residual(const std::vector<LocalCamera>& cams, const std::vector<BBox>& boxes) {
    double worst = 0.0;
    for (std::size_t i = 0; i < cams.size(); ++i) {
        for (std::size_t j = i + 1; j < cams.size(); ++j) {
            const PairResiduals r = pair_residuals(cams[i], boxes[i], cams[j], boxes[j]);
            worst = std::max({worst, std::abs(r.r_x), std::abs(r.r_y), std::abs(r.r_s)});
        }
    }
    return worst;
}

}  // namespace

TEST_CASE("a noise-free scene is already converged") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const Scene scene = make_scene(seed);
        const auto [cams, report] = refine_cameras(scene);
        CHECK(report.iterations <= 1);
        CHECK(report.final_total <= report.initial_total);
        for (std::size_t i = 0; i < cams.size(); ++i) {
            CHECK(std::abs(cams[i].s - scene.local_cams[i].s) <= 1e-9);
            CHECK(std::abs(cams[i].t_x - scene.local_cams[i].t_x) <= 1e-9);
            CHECK(std::abs(cams[i].t_y - scene.local_cams[i].t_y) <= 1e-9);
        }
    }
}

TEST_CASE("noisy cameras are pulled back together") {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        const Scene noisy = perturb(make_scene(seed), 0.05, 0.05, seed + 1000);
        const auto [cams, report] = refine_cameras(noisy);
        CHECK(report.initial_cam_loss > 1e-4);
        CHECK(report.final_cam_loss <= 1e-6);
        CHECK(report.spread_before >= 100.0 * report.spread_after);
        CHECK(report.final_total <= report.initial_total);
        CHECK(report.final_loss_2d <= report.initial_loss_2d);
    }
}

TEST_CASE("report bookkeeping is coherent") {
    const Scene noisy = perturb(make_scene(21), 0.05, 0.05, 4);
    const auto [cams, report] = refine_cameras(noisy);
    REQUIRE(!report.trace.empty());
    CHECK(report.trace.front() == report.initial_total);
    CHECK(static_cast<int>(report.trace.size()) == report.iterations + 1);
    double best = report.trace.front();
    for (const double f : report.trace) best = std::min(best, f);
    CHECK(report.final_total == best);  // Adam keeps the best-seen iterate

    const ImageSize img{noisy.full_cam.width, noisy.full_cam.height};
    REQUIRE(report.implied_before.size() == noisy.local_cams.size());
    REQUIRE(report.implied_after.size() == cams.size());
    const auto before = implied_tfull(noisy.local_cams, noisy.bboxes, img);
    for (std::size_t i = 0; i < before.size(); ++i)
        for (int c = 0; c < 3; ++c) CHECK(report.implied_before[i][c] == before[i][c]);
    CHECK(report.spread_before == implied_spread(noisy.local_cams, noisy.bboxes, img));
    CHECK(report.spread_after == implied_spread(cams, noisy.bboxes, img));
    CHECK(report.final_cam_loss == cam_loss(cams, noisy.bboxes));
}

TEST_CASE("gradient descent accepts only descent steps") {
    const Scene noisy = perturb(make_scene(33), 0.05, 0.05, 9);
    SolveConfig cfg;
    cfg.optimizer = OptimizerKind::GD;
    cfg.step = 1e-4;
    const auto [cams, report] = refine_cameras(noisy, cfg);
    REQUIRE(report.trace.size() >= 2);
    for (std::size_t k = 1; k < report.trace.size(); ++k)
        CHECK(report.trace[k] <= report.trace[k - 1]);
    CHECK(report.trace.back() < report.trace.front());
    CHECK(report.final_total == report.trace.back());
}

TEST_CASE("consistency alone flattens the residuals") {
    SolveConfig cfg;
    cfg.lambda_2d = 0.0;
    for (std::uint64_t seed = 40; seed < 44; ++seed) {
        const Scene noisy = perturb(make_scene(seed), 0.05, 0.05, seed);
        CHECK(max_residual(noisy.local_cams, noisy.bboxes) > 1e-3);
        const auto [cams, report] = refine_cameras(noisy, cfg);
        CHECK(max_residual(cams, noisy.bboxes) < 1e-6);
    }
}

TEST_CASE("solver output is deterministic") {
    const Scene noisy = perturb(make_scene(50), 0.05, 0.05, 3);
    const auto [cams_a, report_a] = refine_cameras(noisy);
    const auto [cams_b, report_b] = refine_cameras(noisy);
    CHECK(report_a.iterations == report_b.iterations);
    CHECK(report_a.final_total == report_b.final_total);
    for (std::size_t i = 0; i < cams_a.size(); ++i) {
        CHECK(cams_a[i].s == cams_b[i].s);
        CHECK(cams_a[i].t_x == cams_b[i].t_x);
        CHECK(cams_a[i].t_y == cams_b[i].t_y);
    }
}

TEST_CASE("implied spread measures full-camera disagreement") {
    const Scene scene = make_scene(60);
    const ImageSize img{scene.full_cam.width, scene.full_cam.height};
    CHECK(implied_spread(scene.local_cams, scene.bboxes, img) <= 1e-9);

    // Doubling one crop's scale halves its implied depth; the spread must
    // pick up at least that depth gap.
    std::vector<LocalCamera> cams = scene.local_cams;
    cams[1].s *= 2.0;
    const double tz = local_to_full(scene.local_cams[1], scene.bboxes[1], img).t_z;
    CHECK(implied_spread(cams, scene.bboxes, img) >= tz / 2.0 - 1e-9);

    const auto pts = implied_tfull(cams, scene.bboxes, img);
    REQUIRE(pts.size() == cams.size());
    double brute = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        for (std::size_t j = 0; j < pts.size(); ++j) {
            const double d = std::sqrt(std::pow(pts[i][0] - pts[j][0], 2.0) +
                                       std::pow(pts[i][1] - pts[j][1], 2.0) +
                                       std::pow(pts[i][2] - pts[j][2], 2.0));
            brute = std::max(brute, d);
        }
    }
    CHECK(implied_spread(cams, scene.bboxes, img) == doctest::Approx(brute).epsilon(1e-12));
}

TEST_CASE("total-loss gradient passes finite differences on random scenes") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const Scene noisy = perturb(make_scene(seed), 0.05, 0.05, seed ^ 0xABCDu);
        const GradCheckReport report = fd_validate(noisy);
        CHECK(report.max_rel_err <= 1e-4);
    }
    // At a noise-free optimum the gradient is ~0 and FD errors are absolute.
    const GradCheckReport clean = fd_validate(make_scene(3));
    CHECK(clean.max_abs_err <= 1e-8);
}

TEST_CASE("solver validation") {
    const Scene scene = make_scene(70);
    SolveConfig cfg;
    cfg.max_iters = 0;
    CHECK_THROWS_AS(refine_cameras(scene, cfg), InvalidSpec);
    cfg = {};
    cfg.step = 0.0;
    CHECK_THROWS_AS(refine_cameras(scene, cfg), InvalidSpec);
    cfg = {};
    cfg.weights.lambda_x = -1.0;
    CHECK_THROWS_AS(refine_cameras(scene, cfg), InvalidSpec);

    Scene solo = scene;
    solo.local_cams.resize(1);
    solo.bboxes.resize(1);
    CHECK_THROWS_AS(refine_cameras(solo), NotEnoughCrops);
    Scene uneven = scene;
    uneven.bboxes.resize(3);
    CHECK_THROWS_AS(refine_cameras(uneven), ShapeError);
    Scene flat = scene;
    flat.local_cams[0].s = 0.0;
    CHECK_THROWS_AS(refine_cameras(flat), DegenerateCamera);
}

TEST_CASE("points behind the camera surface as numeric errors") {
    Scene bad;
    bad.full_cam = {0.0, 0.0, 5.0, 100.0, 100.0};
    bad.joints3d = {{0.0, 0.0, -0.5}};
    bad.gt2d_full = {{50.0, 50.0}};
    bad.bboxes = {{0.0, 0.0, 100.0}, {5.0, 0.0, 120.0}};
    // s large enough that the implied full depth sits inside the joint.
    bad.local_cams = {{1000.0, 0.0, 0.0}, {900.0, 0.0, 0.0}};
    CHECK_THROWS_AS(refine_cameras(bad), NumericError);
    CHECK_THROWS_AS(fd_validate(bad), NumericError);
}
