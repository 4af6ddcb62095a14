#include "multicrop/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "multicrop/geometry.hpp"
#include "multicrop/rng.hpp"

namespace multicrop {

namespace {

// Stylized standing figure, pelvis at the origin, y down, within ~1 m.
constexpr std::array<Joint3D, 24> kSkeleton = {{
    {0.00, 0.00, 0.00},    // pelvis
    {0.09, 0.02, 0.00},    // hips
    {-0.09, 0.02, 0.00},
    {0.00, -0.10, 0.01},   // spine
    {0.00, -0.20, 0.01},
    {0.00, -0.28, 0.02},
    {0.00, -0.38, 0.00},   // neck
    {0.00, -0.47, 0.02},   // head
    {0.05, -0.33, 0.00},   // collars
    {-0.05, -0.33, 0.00},
    {0.17, -0.35, 0.00},   // shoulders
    {-0.17, -0.35, 0.00},
    {0.24, -0.15, 0.03},   // elbows
    {-0.24, -0.15, 0.03},
    {0.28, 0.03, 0.05},    // wrists
    {-0.28, 0.03, 0.05},
    {0.30, 0.09, 0.06},    // hands
    {-0.30, 0.09, 0.06},
    {0.10, 0.28, 0.02},    // knees
    {-0.10, 0.28, 0.02},
    {0.11, 0.48, 0.04},    // ankles
    {-0.11, 0.48, 0.04},
    {0.12, 0.50, -0.04},   // feet
    {-0.12, 0.50, -0.04},
}};

constexpr std::uint64_t kCropSeedSalt = 0xC2B2AE3D27D4EB4FULL;

}  // namespace

void SceneConfig::validate() const {
    if (!(width > 0.0) || !(height > 0.0)) throw InvalidSpec("scene image size must be positive");
    if (joint_count < 1) throw InvalidSpec("scene needs at least one joint");
    if (!(tz_min > 0.0) || !(tz_min <= tz_max)) throw InvalidSpec("depth range must satisfy 0 < min <= max");
    if (!(lateral_range >= 0.0) || !(joint_jitter >= 0.0) || !(bbox_margin >= 0.0))
        throw InvalidSpec("scene ranges must be >= 0");
    crops.validate();
}

Scene make_scene(std::uint64_t seed, const SceneConfig& config) {
    config.validate();
    CounterRng rng(seed);
    for (int attempt = 0; attempt < 100; ++attempt) {
        Scene scene;
        scene.full_cam.t_z = rng.uniform(config.tz_min, config.tz_max);
        scene.full_cam.t_x = rng.uniform(-config.lateral_range, config.lateral_range);
        scene.full_cam.t_y = rng.uniform(-config.lateral_range, config.lateral_range);
        scene.full_cam.width = config.width;
        scene.full_cam.height = config.height;

        scene.joints3d.reserve(static_cast<std::size_t>(config.joint_count));
        bool in_front = true;
        for (int k = 0; k < config.joint_count; ++k) {
            const Joint3D& base = kSkeleton[static_cast<std::size_t>(k) % kSkeleton.size()];
            Joint3D j{base.x + rng.normal(0.0, config.joint_jitter),
                      base.y + rng.normal(0.0, config.joint_jitter),
                      base.z + rng.normal(0.0, config.joint_jitter)};
            if (!(j.z + scene.full_cam.t_z > 0.0)) in_front = false;
            scene.joints3d.push_back(j);
        }
        if (!in_front) continue;

        scene.gt2d_full = project_full(scene.joints3d, scene.full_cam);

        double u_min = scene.gt2d_full[0].u, u_max = u_min;
        double v_min = scene.gt2d_full[0].v, v_max = v_min;
        for (const Joint2D& p : scene.gt2d_full) {
            u_min = std::min(u_min, p.u);
            u_max = std::max(u_max, p.u);
            v_min = std::min(v_min, p.v);
            v_max = std::max(v_max, p.v);
        }
        const double extent = std::max(u_max - u_min, v_max - v_min);
        if (!(extent > 0.0)) continue;

        BBox base;
        base.c_x = (u_min + u_max) / 2.0 - config.width / 2.0;
        base.c_y = (v_min + v_max) / 2.0 - config.height / 2.0;
        base.b = extent * (1.0 + 2.0 * config.bbox_margin);

        CropSpec crop_spec = config.crops;
        crop_spec.seed = seed ^ kCropSeedSalt;
        scene.bboxes = generate_crops(base, crop_spec);

        scene.local_cams.reserve(scene.bboxes.size());
        for (const BBox& bbox : scene.bboxes)
            scene.local_cams.push_back(full_to_local(scene.full_cam, bbox));
        return scene;
    }
    throw NumericalError("no valid scene after 100 sampling attempts");
}

Scene perturb(const Scene& scene, double sigma_s, double sigma_t, std::uint64_t seed) {
    if (!(sigma_s >= 0.0) || !(sigma_t >= 0.0)) throw InvalidSpec("noise sigmas must be >= 0");
    Scene noisy = scene;
    CounterRng rng(seed);
    for (LocalCamera& cam : noisy.local_cams) {
        cam.s = std::max(cam.s + rng.normal(0.0, sigma_s), 1e-3);
        cam.t_x += rng.normal(0.0, sigma_t);
        cam.t_y += rng.normal(0.0, sigma_t);
    }
    noisy.noise_sigma = {sigma_s, sigma_t};
    return noisy;
}

}  // namespace multicrop
