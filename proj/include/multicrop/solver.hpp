#pragma once

#include <array>
#include <utility>
#include <vector>

#include "multicrop/consistency.hpp"
#include "multicrop/grad_check.hpp"
#include "multicrop/synth.hpp"
#include "multicrop/types.hpp"

namespace multicrop {

enum class OptimizerKind { GD, Adam };

struct SolveConfig {
    int max_iters = 2000;
    double step = 1e-2;
    OptimizerKind optimizer = OptimizerKind::Adam;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double adam_eps = 1e-8;
    double tol_grad = 1e-8;     // stop when the gradient inf-norm drops below
    double lambda_cam = 1.0;
    double lambda_2d = 1e-3;    // 2D residuals are squared pixels, so small
    ConsistencyWeights weights;

    void validate() const;
};

struct SolveReport {
    int iterations = 0;
    double initial_cam_loss = 0.0;
    double final_cam_loss = 0.0;
    double initial_loss_2d = 0.0;
    double final_loss_2d = 0.0;
    double initial_total = 0.0;
    double final_total = 0.0;
    std::vector<std::array<double, 3>> implied_before;  // T^full per crop
    std::vector<std::array<double, 3>> implied_after;
    double spread_before = 0.0;  // max pairwise distance of implied T^full
    double spread_after = 0.0;
    std::vector<double> trace;   // total loss per iteration, [0] = initial
};

/// Max pairwise Euclidean distance among the full-image translations
/// implied by each crop's local camera.
double implied_spread(const std::vector<LocalCamera>& cams, const std::vector<BBox>& bboxes,
                      const ImageSize& img);

std::vector<std::array<double, 3>> implied_tfull(const std::vector<LocalCamera>& cams,
                                                 const std::vector<BBox>& bboxes,
                                                 const ImageSize& img);

/// Minimize lambda_cam * L_cam + lambda_2d * L_2D over each crop's
/// (log s, t_x, t_y), starting from scene.local_cams. Adam runs fixed-step
/// and returns the lowest-loss iterate; GD backtracks (halving, up to 30)
/// so every accepted step decreases the loss.
std::pair<std::vector<LocalCamera>, SolveReport> refine_cameras(const Scene& scene,
                                                                const SolveConfig& cfg = {});

/// Finite-difference check of the total-loss gradient at the initial point.
GradCheckReport fd_validate(const Scene& scene, const SolveConfig& cfg = {});

}  // namespace multicrop
