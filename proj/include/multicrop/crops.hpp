#pragma once

#include <cstdint>
#include <vector>

#include "multicrop/types.hpp"

namespace multicrop {

enum class CropMode { Fixed, Random };

struct CropSpec {
    CropMode mode = CropMode::Fixed;
    int m = 5;
    double shift_range = 0.1;                  // fraction of b
    double scale_low = 0.65;
    double scale_high = 1.5;
    std::uint64_t seed = 0;
    bool no_shift = false;                     // zero the center offsets
    bool no_scale = false;                     // keep every box at size b

    void validate() const;
};

/// The five fixed boxes; element 0 is the base box itself.
std::vector<BBox> fixed_crops(const BBox& base);

std::vector<BBox> fixed_crops(const BBox& base, const CropSpec& spec);

/// Base box first, then m-1 boxes with uniform shifts in
/// [-shift_range*b, shift_range*b] and scales in [scale_low, scale_high].
std::vector<BBox> random_crops(const BBox& base, const CropSpec& spec);

/// Dispatch on spec.mode.
std::vector<BBox> generate_crops(const BBox& base, const CropSpec& spec);

/// True when the box pokes past any image border.
bool crop_exceeds_image(const BBox& bbox, const ImageSize& img);

}  // namespace multicrop
