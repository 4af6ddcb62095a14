#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace multicrop {

// Errors are split by how the CLI reports them: bad inputs exit with 1,
// numerical failures (non-finite values, points behind the camera) with 2.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ValidationError : Error {
    using Error::Error;
};

struct NumericError : Error {
    using Error::Error;
};

struct DegenerateCamera : ValidationError {
    using ValidationError::ValidationError;
};
struct InvalidImage : ValidationError {
    using ValidationError::ValidationError;
};
struct InvalidBBox : ValidationError {
    using ValidationError::ValidationError;
};
struct InvalidSpec : ValidationError {
    using ValidationError::ValidationError;
};
struct ShapeError : ValidationError {
    using ValidationError::ValidationError;
};
struct NotEnoughCrops : ValidationError {
    using ValidationError::ValidationError;
};
struct NotEnoughSamples : ValidationError {
    using ValidationError::ValidationError;
};
struct BehindCamera : NumericError {
    using NumericError::NumericError;
};
struct NumericalError : NumericError {
    using NumericError::NumericError;
};

/// Square bounding box of side b, centered at (c_x, c_y) relative to the
/// full-image center (pixels, y down).
struct BBox {
    double c_x = 0.0;
    double c_y = 0.0;
    double b = 0.0;

    void validate() const {
        if (!(b > 0.0)) throw InvalidBBox("bbox width must be positive, got " + std::to_string(b));
        if (!std::isfinite(c_x) || !std::isfinite(c_y) || !std::isfinite(b))
            throw InvalidBBox("bbox fields must be finite");
    }
};

/// Weak-perspective camera of one crop: scale s plus translation in meters.
struct LocalCamera {
    double s = 1.0;
    double t_x = 0.0;
    double t_y = 0.0;
};

/// Camera translation relative to the full image, plus the image size the
/// focal length is derived from.
struct FullCamera {
    double t_x = 0.0;
    double t_y = 0.0;
    double t_z = 0.0;  // meters, > 0
    double width = 0.0;
    double height = 0.0;

    double f_full() const { return std::sqrt(width * width + height * height); }
};

/// Intrinsics of the resized crop image; f is large so the projection stays
/// close to orthographic.
struct CropIntrinsics {
    double f = 5000.0;
    double res = 224.0;
};

struct Joint3D {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

struct Joint2D {
    double u = 0.0;
    double v = 0.0;
};

struct ImageSize {
    double width = 0.0;
    double height = 0.0;
};

using Joints3D = std::vector<Joint3D>;
using Joints2D = std::vector<Joint2D>;

}  // namespace multicrop
