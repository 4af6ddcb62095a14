#pragma once

#include <cstdint>
#include <vector>

#include "multicrop/crops.hpp"
#include "multicrop/types.hpp"

namespace multicrop {

struct NoiseSigma {
    double s = 0.0;
    double t = 0.0;
};

struct SceneConfig {
    double width = 1920.0;
    double height = 1080.0;
    int joint_count = 24;
    double tz_min = 4.0;
    double tz_max = 15.0;
    double lateral_range = 0.4;   // |t_x|, |t_y| of the full camera, meters
    double joint_jitter = 0.03;   // per-joint gaussian, meters
    double bbox_margin = 0.15;    // fraction of the joint extent
    CropSpec crops;               // mode, m, seed follow the scene seed

    void validate() const;
};

/// Synthetic person-plus-camera setup. local_cams are derived from full_cam
/// before any noise, so pair residuals start at zero; after perturb() they
/// hold the noisy cameras and noise_sigma records what was applied.
struct Scene {
    Joints3D joints3d;
    FullCamera full_cam;
    std::vector<BBox> bboxes;
    std::vector<LocalCamera> local_cams;
    Joints2D gt2d_full;
    NoiseSigma noise_sigma;
};

/// Deterministic scene from a seed: jittered 24-joint skeleton, a full
/// camera inside the configured depth range, a square bbox covering the
/// projected joints with margin, crops, and ground-truth local cameras.
Scene make_scene(std::uint64_t seed, const SceneConfig& config = {});

/// Gaussian noise on each local camera's (s, t_x, t_y); s stays >= 1e-3.
Scene perturb(const Scene& scene, double sigma_s, double sigma_t, std::uint64_t seed);

}  // namespace multicrop
