#include "multicrop/crops.hpp"

#include <string>

#include "multicrop/rng.hpp"

namespace multicrop {

void CropSpec::validate() const {
    if (m < 1) throw InvalidSpec("crop count must be >= 1, got " + std::to_string(m));
    if (!(shift_range >= 0.0)) throw InvalidSpec("shift_range must be >= 0");
    if (!(scale_low > 0.0) || !(scale_low <= scale_high))
        throw InvalidSpec("scale range must satisfy 0 < low <= high");
}

std::vector<BBox> fixed_crops(const BBox& base) { return fixed_crops(base, CropSpec{}); }

std::vector<BBox> fixed_crops(const BBox& base, const CropSpec& spec) {
    base.validate();
    const double shift = spec.no_shift ? 0.0 : 0.1 * base.b;
    auto size = [&](double factor) { return spec.no_scale ? base.b : factor * base.b; };
    return {
        {base.c_x, base.c_y, base.b},
        {base.c_x + shift, base.c_y, size(1.5)},
        {base.c_x - shift, base.c_y, size(1.25)},
        {base.c_x, base.c_y + shift, size(0.8)},
        {base.c_x, base.c_y - shift, size(0.65)},
    };
}

std::vector<BBox> random_crops(const BBox& base, const CropSpec& spec) {
    base.validate();
    spec.validate();
    CounterRng rng(spec.seed);
    std::vector<BBox> boxes;
    boxes.reserve(static_cast<std::size_t>(spec.m));
    boxes.push_back(base);
    const double shift = spec.shift_range * base.b;
    for (int i = 1; i < spec.m; ++i) {
        // Draw order is fixed (x, y, scale) so seeds reproduce exactly.
        const double x = rng.uniform(-shift, shift);
        const double y = rng.uniform(-shift, shift);
        const double s = rng.uniform(spec.scale_low, spec.scale_high);
        boxes.push_back({base.c_x + (spec.no_shift ? 0.0 : x),
                         base.c_y + (spec.no_shift ? 0.0 : y),
                         (spec.no_scale ? 1.0 : s) * base.b});
    }
    return boxes;
}

std::vector<BBox> generate_crops(const BBox& base, const CropSpec& spec) {
    return spec.mode == CropMode::Fixed ? fixed_crops(base, spec) : random_crops(base, spec);
}

bool crop_exceeds_image(const BBox& bbox, const ImageSize& img) {
    const double left = bbox.c_x + img.width / 2.0 - bbox.b / 2.0;
    const double top = bbox.c_y + img.height / 2.0 - bbox.b / 2.0;
    return left < 0.0 || top < 0.0 || left + bbox.b > img.width || top + bbox.b > img.height;
}

}  // namespace multicrop
