#pragma once

#include <Eigen/Core>

#include "multicrop/types.hpp"

namespace multicrop {

/// Sinusoidal expansion of a scalar: [p, sin(pi p), cos(pi p), ...,
/// sin(2^L pi p), cos(2^L pi p)], length 2L+3.
/// At L=32 the top band is 2^32 pi p; for pixel-scale p those entries carry
/// no usable precision in doubles, but stay deterministic. A coordinate
/// pre-scale is available to bring inputs into a useful range.
Eigen::VectorXd encode(double p, int levels);

/// Per-coordinate encoding of (c_x, c_y, b), concatenated; length 3(2L+3).
/// pre_scale multiplies each coordinate before encoding (1.0 = off).
Eigen::VectorXd encode_bbox(const BBox& bbox, int levels = 32, double pre_scale = 1.0);

/// Relative encoding: encode_bbox(m) - encode_bbox(n).
Eigen::VectorXd relative(const BBox& bbox_m, const BBox& bbox_n, int levels = 32,
                         double pre_scale = 1.0);

/// Length of encode_bbox output for a given L.
inline int encoding_length(int levels) { return 3 * (2 * levels + 3); }

}  // namespace multicrop
