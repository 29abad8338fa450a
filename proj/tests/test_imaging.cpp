#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>

#include "qtlr/imaging.hpp"
#include "qtlr/quaternion_tensor.hpp"

using qtlr::BoolPlane;
using qtlr::ColorImage;
using qtlr::Index;

namespace {

const std::string kCrop = std::string(QTLR_TEST_DATA) + "/astronaut_crop64.png";

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("qtlr_imaging_" + name)).string();
}

ColorImage gradient(Index h, Index w) {
  ColorImage img(h, w);
  for (Index r = 0; r < h; ++r)
    for (Index c = 0; c < w; ++c) {
      img.channels[0](r, c) = static_cast<double>(r) / h;
      img.channels[1](r, c) = static_cast<double>(c) / w;
      img.channels[2](r, c) = static_cast<double>((r * 7 + c * 3) % 11) / 10;
    }
  return img;
}

}  // namespace

TEST_CASE("quaternion encoding") {
  ColorImage img(1, 2);
  img.channels[0](0, 0) = 1;  // red
  const auto q = qtlr::to_quaternion(img);
  CHECK(q(0, 0) == qtlr::Quaterniond{0, 1, 0, 0});
  CHECK(q(0, 1) == qtlr::Quaterniond{});
  CHECK(q.plane(0).isZero(0));

  const auto g = gradient(5, 7);
  const auto back = qtlr::from_quaternion(qtlr::to_quaternion(g));
  for (int ch = 0; ch < 3; ++ch) CHECK((back.channels[ch] == g.channels[ch]).all());

  qtlr::QuaternionMatrixd odd(1, 2);
  odd.set(0, 0, {5, 1.2, -0.3, 0.5});
  odd.set(0, 1, {-2, 0.25, 0.5, 0.75});
  const auto c = qtlr::from_quaternion(odd);
  CHECK(c.channels[0](0, 0) == 1.0);
  CHECK(c.channels[1](0, 0) == 0.0);
  CHECK(c.channels[2](0, 0) == 0.5);
  CHECK(c.channels[0](0, 1) == 0.25);
}

TEST_CASE("masks") {
  CHECK(qtlr::random_mask(10, 10, 0.1, 1).count() == 10);
  CHECK(qtlr::random_mask(7, 9, 1.0, 1).all());
  CHECK(qtlr::random_mask(64, 64, 0.3, 5).count() == std::lround(0.3 * 4096));
  CHECK((qtlr::random_mask(32, 20, 0.5, 9) == qtlr::random_mask(32, 20, 0.5, 9)).all());
  CHECK_FALSE((qtlr::random_mask(32, 20, 0.5, 9) == qtlr::random_mask(32, 20, 0.5, 10)).all());
  CHECK_THROWS_AS(qtlr::random_mask(4, 4, 0.0, 1), qtlr::ArgumentError);
  CHECK_THROWS_AS(qtlr::random_mask(4, 4, 1.5, 1), qtlr::ArgumentError);

  ColorImage m(2, 2);
  m.channels[2](0, 1) = 0.1;
  m.channels[0](1, 1) = 1.0;
  const BoolPlane s = qtlr::structural_mask(m);
  CHECK(s.count() == 2);
  CHECK(s(0, 1));
  CHECK(s(1, 1));

  const auto g = gradient(2, 2);
  const auto z = qtlr::apply_mask(g, s);
  CHECK(z.channels[0](1, 1) == g.channels[0](1, 1));
  CHECK(z.channels[1](0, 0) == 0.0);
}

TEST_CASE("psnr") {
  const auto g = gradient(16, 16);
  CHECK(qtlr::psnr(g, g) == std::numeric_limits<double>::infinity());

  ColorImage shifted = g;
  for (auto& c : shifted.channels) c += 10.0 / 255.0;
  CHECK(qtlr::psnr(g, shifted) == doctest::Approx(20 * std::log10(255.0 / 10.0)).epsilon(1e-12));
  CHECK(qtlr::psnr(g, shifted) == doctest::Approx(28.13).epsilon(1e-3));
  CHECK(qtlr::psnr(shifted, g) == qtlr::psnr(g, shifted));

  ColorImage binary(4, 4), flipped(4, 4);
  for (int ch = 0; ch < 3; ++ch) {
    binary.channels[ch] = (gradient(4, 4).channels[ch] > 0.5).cast<double>();
    flipped.channels[ch] = 1.0 - binary.channels[ch];
  }
  CHECK(qtlr::psnr(binary, flipped) == doctest::Approx(0.0));
  CHECK_THROWS_AS(qtlr::psnr(g, gradient(16, 15)), qtlr::ShapeError);
}

TEST_CASE("ssim") {
  const auto ref = qtlr::read_image(kCrop);
  CHECK(qtlr::ssim(ref, ref) == 1.0);

  // Reference values from an independent Gaussian-window SSIM implementation
  // (same window, constants and valid-region averaging).
  ColorImage squared = ref, holes = ref;
  for (auto& c : squared.channels) c = c.square();
  for (auto& c : holes.channels)
    for (Index r = 0; r < c.rows(); r += 3)
      for (Index k = 0; k < c.cols(); k += 2) c(r, k) = 0;
  CHECK(qtlr::ssim(ref, squared) == doctest::Approx(0.8716759535824843).epsilon(1e-10));
  CHECK(qtlr::ssim(ref, holes) == doctest::Approx(0.14805222287719896).epsilon(1e-10));
  CHECK(qtlr::psnr(ref, squared) == doctest::Approx(14.248050401365152).epsilon(1e-10));
  CHECK(qtlr::ssim(squared, ref) == doctest::Approx(qtlr::ssim(ref, squared)).epsilon(1e-12));

  ColorImage inverted = ref;
  for (auto& c : inverted.channels) c = 1.0 - c;
  const double s = qtlr::ssim(ref, inverted);
  CHECK(s >= -1.0);
  CHECK(s < 0.5);

  // Smaller than the window still works.
  const auto tiny = gradient(5, 8);
  CHECK(qtlr::ssim(tiny, tiny) == 1.0);
  CHECK_THROWS_AS(qtlr::ssim(ref, tiny), qtlr::ShapeError);
}

TEST_CASE("image io") {
  const auto crop = qtlr::read_image(kCrop);
  CHECK(crop.height() == 64);
  CHECK(crop.width() == 64);

  // 8-bit data survives both formats exactly.
  for (const char* name : {"rt.png", "rt.ppm"}) {
    const auto path = temp_path(name);
    qtlr::write_image(path, crop);
    const auto back = qtlr::read_image(path);
    for (int ch = 0; ch < 3; ++ch) CHECK((back.channels[ch] == crop.channels[ch]).all());
    std::remove(path.c_str());
  }

  SUBCASE("ppm with comments and 16-bit samples") {
    const auto path = temp_path("wide.ppm");
    {
      std::ofstream os(path, std::ios::binary);
      os << "P6\n# comment\n2 1\n65535\n";
      const unsigned char px[] = {0xff, 0xff, 0, 0, 0x80, 0x80, 0, 0, 0, 0, 0xff, 0xff};
      os.write(reinterpret_cast<const char*>(px), sizeof px);
    }
    const auto img = qtlr::read_image(path);
    CHECK(img.channels[0](0, 0) == 1.0);
    CHECK(img.channels[2](0, 0) == doctest::Approx(128.0 / 255.0));
    CHECK(img.channels[2](0, 1) == 1.0);
    std::remove(path.c_str());
  }

  SUBCASE("mask files") {
    const auto path = temp_path("mask.png");
    const auto m = qtlr::random_mask(13, 17, 0.4, 2);
    qtlr::write_mask(path, m);
    CHECK((qtlr::read_mask(path) == m).all());
    std::remove(path.c_str());
  }

  CHECK_THROWS_AS(qtlr::read_image(temp_path("missing.png")), qtlr::IoError);
  const auto junk = temp_path("junk.bin");
  std::ofstream(junk) << "hello";
  CHECK_THROWS_AS(qtlr::read_image(junk), qtlr::IoError);
  std::remove(junk.c_str());
}
