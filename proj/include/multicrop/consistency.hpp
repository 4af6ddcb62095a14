#pragma once

#include <vector>

#include "multicrop/types.hpp"

namespace multicrop {

struct ConsistencyWeights {
    double lambda_x = 1.0;
    double lambda_y = 1.0;
    double lambda_s = 1e-4;

    void validate() const;
};

/// Partials of a loss with respect to one crop's (s, t_x, t_y).
struct CamGrad {
    double d_s = 0.0;
    double d_tx = 0.0;
    double d_ty = 0.0;
};

struct PairResiduals {
    double r_x = 0.0;
    double r_y = 0.0;
    double r_s = 0.0;
};

/// Mismatch of the full-image translation implied by two crops:
/// r_x = (t_xi + 2c_xi/(b_i s_i)) - (t_xj + 2c_xj/(b_j s_j)), r_y alike,
/// r_s = b_i s_i - b_j s_j.
PairResiduals pair_residuals(const LocalCamera& cam_i, const BBox& bbox_i, const LocalCamera& cam_j,
                             const BBox& bbox_j);

/// Sum over unordered pairs i<j of the weighted squared residuals.
double cam_loss(const std::vector<LocalCamera>& cams, const std::vector<BBox>& bboxes,
                const ConsistencyWeights& w = {});

std::vector<CamGrad> cam_loss_grad(const std::vector<LocalCamera>& cams,
                                   const std::vector<BBox>& bboxes,
                                   const ConsistencyWeights& w = {});

/// Full-image reprojection error summed over crops and joints:
/// sum_m sum_k |project_full(j3d_k, local_to_full(cam_m)) - gt2d_k|^2.
double loss_2d(const Joints3D& j3d, const Joints2D& gt2d, const std::vector<LocalCamera>& cams,
               const std::vector<BBox>& bboxes, const ImageSize& img);

std::vector<CamGrad> loss_2d_grad(const Joints3D& j3d, const Joints2D& gt2d,
                                  const std::vector<LocalCamera>& cams,
                                  const std::vector<BBox>& bboxes, const ImageSize& img);

/// Squared 3D joint error.
double loss_3d(const Joints3D& j3d, const Joints3D& gt3d);

/// Gradient of loss_3d with respect to the j3d coordinates.
Joints3D loss_3d_grad(const Joints3D& j3d, const Joints3D& gt3d);

}  // namespace multicrop
