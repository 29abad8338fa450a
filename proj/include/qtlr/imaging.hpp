#ifndef QTLR_IMAGING_HPP
#define QTLR_IMAGING_HPP

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <string>

#include "qtlr/mask.hpp"
#include "qtlr/quaternion_matrix.hpp"

namespace qtlr {

// RGB image with channels on [0, 1].
struct ColorImage {
  std::array<Eigen::ArrayXXd, 3> channels;

  ColorImage() = default;
  ColorImage(Index height, Index width) {
    for (auto& c : channels) c = Eigen::ArrayXXd::Zero(height, width);
  }
  Index height() const { return channels[0].rows(); }
  Index width() const { return channels[0].cols(); }
};

// Pixel (r, g, b) becomes 0 + r i + g j + b k.
QuaternionMatrixd to_quaternion(const ColorImage& img);
// Imaginary parts clamped to [0, 1]; the real part is dropped.
ColorImage from_quaternion(const QuaternionMatrixd& q);

// Exactly round(rate * H * W) observed pixels, chosen by a seeded shuffle.
BoolPlane random_mask(Index height, Index width, double rate, std::uint64_t seed);
// Non-black pixels are observed.
BoolPlane structural_mask(const ColorImage& mask_image);
// Missing pixels set to black.
ColorImage apply_mask(const ColorImage& img, const BoolPlane& mask);

// Pooled MSE over the three channels, peak 1. Identical images give +inf.
double psnr(const ColorImage& ref, const ColorImage& test);
// Gaussian-window SSIM (11x11, sigma 1.5, K1 0.01, K2 0.03, dynamic range 1)
// over windows fully inside the image, averaged over channels. Images smaller
// than the window use the largest odd window that fits.
double ssim(const ColorImage& ref, const ColorImage& test);

// 8-bit RGB. Format by content on read (PNG signature or P6), by extension on
// write (.png, anything else is PPM).
ColorImage read_image(const std::string& path);
void write_image(const std::string& path, const ColorImage& img);
BoolPlane read_mask(const std::string& path);
// Observed pixels white, missing black.
void write_mask(const std::string& path, const BoolPlane& mask);

}  // namespace qtlr

#endif  // QTLR_IMAGING_HPP
