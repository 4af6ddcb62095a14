#include "multicrop/encoding.hpp"

#include <cmath>
#include <string>

namespace multicrop {

Eigen::VectorXd encode(double p, int levels) {
    if (levels < 0) throw InvalidSpec("encoding level count must be >= 0, got " + std::to_string(levels));
    Eigen::VectorXd out(2 * levels + 3);
    out[0] = p;
    double freq = M_PI;  // bands 2^0 pi .. 2^L pi
    for (int l = 0; l <= levels; ++l) {
        out[1 + 2 * l] = std::sin(freq * p);
        out[2 + 2 * l] = std::cos(freq * p);
        freq *= 2.0;
    }
    return out;
}

Eigen::VectorXd encode_bbox(const BBox& bbox, int levels, double pre_scale) {
    const int n = 2 * levels + 3;
    Eigen::VectorXd out(3 * n);
    out.segment(0, n) = encode(bbox.c_x * pre_scale, levels);
    out.segment(n, n) = encode(bbox.c_y * pre_scale, levels);
    out.segment(2 * n, n) = encode(bbox.b * pre_scale, levels);
    return out;
}

Eigen::VectorXd relative(const BBox& bbox_m, const BBox& bbox_n, int levels, double pre_scale) {
    return encode_bbox(bbox_m, levels, pre_scale) - encode_bbox(bbox_n, levels, pre_scale);
}

}  // namespace multicrop
