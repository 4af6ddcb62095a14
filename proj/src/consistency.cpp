#include "multicrop/consistency.hpp"

#include <cmath>
#include <string>

#include "multicrop/geometry.hpp"

namespace multicrop {

namespace {

constexpr double kMinScale = 1e-9;

void check_camera(const LocalCamera& cam, const BBox& bbox) {
    bbox.validate();
    if (!(cam.s > kMinScale))
        throw DegenerateCamera("scale " + std::to_string(cam.s) + " at or below " +
                               std::to_string(kMinScale));
}

void check_set(const std::vector<LocalCamera>& cams, const std::vector<BBox>& bboxes) {
    if (cams.size() != bboxes.size())
        throw ShapeError("camera count " + std::to_string(cams.size()) + " != bbox count " +
                         std::to_string(bboxes.size()));
    if (cams.size() < 2) throw NotEnoughCrops("need at least 2 crops, got " + std::to_string(cams.size()));
    for (std::size_t i = 0; i < cams.size(); ++i) check_camera(cams[i], bboxes[i]);
}

}  // namespace

void ConsistencyWeights::validate() const {
    if (!(lambda_x >= 0.0) || !(lambda_y >= 0.0) || !(lambda_s >= 0.0))
        throw InvalidSpec("consistency weights must be >= 0");
}

PairResiduals pair_residuals(const LocalCamera& cam_i, const BBox& bbox_i, const LocalCamera& cam_j,
                             const BBox& bbox_j) {
    check_camera(cam_i, bbox_i);
    check_camera(cam_j, bbox_j);
    const double gi = bbox_i.b * cam_i.s;
    const double gj = bbox_j.b * cam_j.s;
    return {(cam_i.t_x + 2.0 * bbox_i.c_x / gi) - (cam_j.t_x + 2.0 * bbox_j.c_x / gj),
            (cam_i.t_y + 2.0 * bbox_i.c_y / gi) - (cam_j.t_y + 2.0 * bbox_j.c_y / gj),
            gi - gj};
}

double cam_loss(const std::vector<LocalCamera>& cams, const std::vector<BBox>& bboxes,
                const ConsistencyWeights& w) {
    check_set(cams, bboxes);
    w.validate();
    double loss = 0.0;
    for (std::size_t i = 0; i < cams.size(); ++i) {
        for (std::size_t j = i + 1; j < cams.size(); ++j) {
            const PairResiduals r = pair_residuals(cams[i], bboxes[i], cams[j], bboxes[j]);
            loss += w.lambda_x * r.r_x * r.r_x + w.lambda_y * r.r_y * r.r_y + w.lambda_s * r.r_s * r.r_s;
        }
    }
    return loss;
}

std::vector<CamGrad> cam_loss_grad(const std::vector<LocalCamera>& cams,
                                   const std::vector<BBox>& bboxes, const ConsistencyWeights& w) {
    check_set(cams, bboxes);
    w.validate();
    std::vector<CamGrad> grads(cams.size());
    for (std::size_t i = 0; i < cams.size(); ++i) {
        for (std::size_t j = i + 1; j < cams.size(); ++j) {
            const PairResiduals r = pair_residuals(cams[i], bboxes[i], cams[j], bboxes[j]);
            // d r_x / d s_i = -2 c_xi / (b_i s_i^2); d r_s / d s_i = b_i.
            const double gx = 2.0 * w.lambda_x * r.r_x;
            const double gy = 2.0 * w.lambda_y * r.r_y;
            const double gs = 2.0 * w.lambda_s * r.r_s;
            grads[i].d_tx += gx;
            grads[j].d_tx -= gx;
            grads[i].d_ty += gy;
            grads[j].d_ty -= gy;
            const double si2 = cams[i].s * cams[i].s;
            const double sj2 = cams[j].s * cams[j].s;
            grads[i].d_s += gx * (-2.0 * bboxes[i].c_x / (bboxes[i].b * si2)) +
                            gy * (-2.0 * bboxes[i].c_y / (bboxes[i].b * si2)) + gs * bboxes[i].b;
            grads[j].d_s += gx * (2.0 * bboxes[j].c_x / (bboxes[j].b * sj2)) +
                            gy * (2.0 * bboxes[j].c_y / (bboxes[j].b * sj2)) - gs * bboxes[j].b;
        }
    }
    return grads;
}

double loss_2d(const Joints3D& j3d, const Joints2D& gt2d, const std::vector<LocalCamera>& cams,
               const std::vector<BBox>& bboxes, const ImageSize& img) {
    if (j3d.size() != gt2d.size())
        throw ShapeError("3D joint count " + std::to_string(j3d.size()) + " != 2D joint count " +
                         std::to_string(gt2d.size()));
    if (cams.size() != bboxes.size()) throw ShapeError("camera count != bbox count");
    double loss = 0.0;
    for (std::size_t m = 0; m < cams.size(); ++m) {
        const FullCamera full = local_to_full(cams[m], bboxes[m], img);
        for (std::size_t k = 0; k < j3d.size(); ++k) {
            const Joint2D p = project_full(j3d[k], full);
            const double du = p.u - gt2d[k].u;
            const double dv = p.v - gt2d[k].v;
            loss += du * du + dv * dv;
        }
    }
    return loss;
}

std::vector<CamGrad> loss_2d_grad(const Joints3D& j3d, const Joints2D& gt2d,
                                  const std::vector<LocalCamera>& cams,
                                  const std::vector<BBox>& bboxes, const ImageSize& img) {
    if (j3d.size() != gt2d.size()) throw ShapeError("3D joint count != 2D joint count");
    if (cams.size() != bboxes.size()) throw ShapeError("camera count != bbox count");
    const double f = full_focal(img.width, img.height);
    std::vector<CamGrad> grads(cams.size());
    for (std::size_t m = 0; m < cams.size(); ++m) {
        const LocalCamera& cam = cams[m];
        const BBox& bbox = bboxes[m];
        const FullCamera full = local_to_full(cam, bbox, img);
        const double s2 = cam.s * cam.s;
        // txf = t_x + 2c_x/(b s): d txf / d s = -2c_x/(b s^2); d tzf / d s = -2f/(b s^2).
        const double dtxf_ds = -2.0 * bbox.c_x / (bbox.b * s2);
        const double dtyf_ds = -2.0 * bbox.c_y / (bbox.b * s2);
        const double dtzf_ds = -2.0 * f / (bbox.b * s2);
        for (std::size_t k = 0; k < j3d.size(); ++k) {
            const double depth = j3d[k].z + full.t_z;
            if (!(depth > 0.0)) throw BehindCamera("joint behind camera in loss_2d gradient");
            const Joint2D p = project_full(j3d[k], full);
            const double ru = 2.0 * (p.u - gt2d[k].u);
            const double rv = 2.0 * (p.v - gt2d[k].v);
            const double du_dtxf = f / depth;
            const double dv_dtyf = f / depth;
            const double du_dtzf = -f * (j3d[k].x + full.t_x) / (depth * depth);
            const double dv_dtzf = -f * (j3d[k].y + full.t_y) / (depth * depth);
            grads[m].d_tx += ru * du_dtxf;
            grads[m].d_ty += rv * dv_dtyf;
            grads[m].d_s += ru * (du_dtxf * dtxf_ds + du_dtzf * dtzf_ds) +
                            rv * (dv_dtyf * dtyf_ds + dv_dtzf * dtzf_ds);
        }
    }
    return grads;
}

double loss_3d(const Joints3D& j3d, const Joints3D& gt3d) {
    if (j3d.size() != gt3d.size())
        throw ShapeError("joint count " + std::to_string(j3d.size()) + " != ground truth count " +
                         std::to_string(gt3d.size()));
    double loss = 0.0;
    for (std::size_t k = 0; k < j3d.size(); ++k) {
        const double dx = j3d[k].x - gt3d[k].x;
        const double dy = j3d[k].y - gt3d[k].y;
        const double dz = j3d[k].z - gt3d[k].z;
        loss += dx * dx + dy * dy + dz * dz;
    }
    return loss;
}

Joints3D loss_3d_grad(const Joints3D& j3d, const Joints3D& gt3d) {
    if (j3d.size() != gt3d.size()) throw ShapeError("joint count != ground truth count");
    Joints3D grad(j3d.size());
    for (std::size_t k = 0; k < j3d.size(); ++k) {
        grad[k] = {2.0 * (j3d[k].x - gt3d[k].x), 2.0 * (j3d[k].y - gt3d[k].y),
                   2.0 * (j3d[k].z - gt3d[k].z)};
    }
    return grad;
}

}  // namespace multicrop
