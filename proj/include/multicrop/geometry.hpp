#pragma once

#include "multicrop/types.hpp"

namespace multicrop {

/// Depth of a crop camera: t_z = 2 f / (res * s).
double crop_tz(const LocalCamera& cam, const CropIntrinsics& intr = {});

/// Weak-perspective projection into crop pixels:
/// u = f (x + t_x) / (z + t_z) + res/2, likewise v.
Joint2D project_crop(const Joint3D& j, const LocalCamera& cam, const CropIntrinsics& intr = {});

Joints2D project_crop(const Joints3D& joints, const LocalCamera& cam,
                      const CropIntrinsics& intr = {});

/// Focal length tied to the full image: sqrt(width^2 + height^2).
double full_focal(double width, double height);

/// Lift a per-crop camera to the full-image translation through the bbox.
FullCamera local_to_full(const LocalCamera& cam, const BBox& bbox, const ImageSize& img);

/// Algebraic inverse of local_to_full for a given bbox.
LocalCamera full_to_local(const FullCamera& full, const BBox& bbox);

/// Projection onto the full image with the derived focal length.
Joint2D project_full(const Joint3D& j, const FullCamera& full);

Joints2D project_full(const Joints3D& joints, const FullCamera& full);

/// Affine map from full-image pixels into the resized crop. The crop's
/// left-top corner sits at (c_x + width/2 - b/2, c_y + height/2 - b/2).
Joint2D crop_pixel_map(const Joint2D& u_full, const BBox& bbox, const ImageSize& img,
                       const CropIntrinsics& intr = {});

}  // namespace multicrop
