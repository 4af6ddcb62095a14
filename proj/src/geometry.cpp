#include "multicrop/geometry.hpp"

#include <cmath>
#include <string>

namespace multicrop {

double crop_tz(const LocalCamera& cam, const CropIntrinsics& intr) {
    if (!(cam.s > 0.0)) throw DegenerateCamera("scale must be positive, got " + std::to_string(cam.s));
    return 2.0 * intr.f / (intr.res * cam.s);
}

Joint2D project_crop(const Joint3D& j, const LocalCamera& cam, const CropIntrinsics& intr) {
    const double t_z = crop_tz(cam, intr);
    const double depth = j.z + t_z;
    if (!(depth > 0.0)) throw BehindCamera("joint depth " + std::to_string(depth) + " behind crop camera");
    return {intr.f * (j.x + cam.t_x) / depth + intr.res / 2.0,
            intr.f * (j.y + cam.t_y) / depth + intr.res / 2.0};
}

Joints2D project_crop(const Joints3D& joints, const LocalCamera& cam, const CropIntrinsics& intr) {
    Joints2D out;
    out.reserve(joints.size());
    for (const auto& j : joints) out.push_back(project_crop(j, cam, intr));
    return out;
}

double full_focal(double width, double height) {
    if (!(width > 0.0) || !(height > 0.0))
        throw InvalidImage("image size must be positive, got " + std::to_string(width) + "x" +
                           std::to_string(height));
    return std::sqrt(width * width + height * height);
}

FullCamera local_to_full(const LocalCamera& cam, const BBox& bbox, const ImageSize& img) {
    bbox.validate();
    if (!(cam.s > 0.0)) throw DegenerateCamera("scale must be positive, got " + std::to_string(cam.s));
    const double f = full_focal(img.width, img.height);
    const double bs = bbox.b * cam.s;
    if (bs == 0.0) throw DegenerateCamera("b*s is zero");
    FullCamera full;
    full.t_x = cam.t_x + 2.0 * bbox.c_x / bs;
    full.t_y = cam.t_y + 2.0 * bbox.c_y / bs;
    full.t_z = 2.0 * f / bs;
    full.width = img.width;
    full.height = img.height;
    return full;
}

LocalCamera full_to_local(const FullCamera& full, const BBox& bbox) {
    bbox.validate();
    if (!(full.t_z > 0.0))
        throw DegenerateCamera("full-camera depth must be positive, got " + std::to_string(full.t_z));
    const double f = full_focal(full.width, full.height);
    LocalCamera cam;
    cam.s = 2.0 * f / (bbox.b * full.t_z);
    const double bs = bbox.b * cam.s;
    cam.t_x = full.t_x - 2.0 * bbox.c_x / bs;
    cam.t_y = full.t_y - 2.0 * bbox.c_y / bs;
    return cam;
}

Joint2D project_full(const Joint3D& j, const FullCamera& full) {
    const double f = full_focal(full.width, full.height);
    const double depth = j.z + full.t_z;
    if (!(depth > 0.0)) throw BehindCamera("joint depth " + std::to_string(depth) + " behind full camera");
    return {f * (j.x + full.t_x) / depth + full.width / 2.0,
            f * (j.y + full.t_y) / depth + full.height / 2.0};
}

Joints2D project_full(const Joints3D& joints, const FullCamera& full) {
    Joints2D out;
    out.reserve(joints.size());
    for (const auto& j : joints) out.push_back(project_full(j, full));
    return out;
}

Joint2D crop_pixel_map(const Joint2D& u_full, const BBox& bbox, const ImageSize& img,
                       const CropIntrinsics& intr) {
    bbox.validate();
    const double left = bbox.c_x + img.width / 2.0 - bbox.b / 2.0;
    const double top = bbox.c_y + img.height / 2.0 - bbox.b / 2.0;
    const double scale = intr.res / bbox.b;
    return {(u_full.u - left) * scale, (u_full.v - top) * scale};
}

}  // namespace multicrop
