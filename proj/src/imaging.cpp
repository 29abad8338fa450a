#include "qtlr/imaging.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

namespace qtlr {

namespace {

void check_same_shape(const ColorImage& a, const ColorImage& b, const char* what) {
  if (a.height() != b.height() || a.width() != b.width())
    throw ShapeError(std::string(what) + ": images are " + std::to_string(a.height()) + "x" +
                     std::to_string(a.width()) + " and " + std::to_string(b.height()) + "x" +
                     std::to_string(b.width()));
}

// Interleaved 8-bit RGB rows, top to bottom.
struct Rgb8 {
  Index height = 0, width = 0;
  std::vector<std::uint8_t> data;
};

ColorImage from_rgb8(const Rgb8& raw) {
  ColorImage img(raw.height, raw.width);
  for (Index r = 0; r < raw.height; ++r)
    for (Index c = 0; c < raw.width; ++c)
      for (int ch = 0; ch < 3; ++ch)
        img.channels[ch](r, c) = raw.data[3 * (r * raw.width + c) + ch] / 255.0;
  return img;
}

Rgb8 to_rgb8(const ColorImage& img) {
  Rgb8 raw{img.height(), img.width(), std::vector<std::uint8_t>(3 * img.height() * img.width())};
  for (Index r = 0; r < raw.height; ++r)
    for (Index c = 0; c < raw.width; ++c)
      for (int ch = 0; ch < 3; ++ch) {
        const double v = std::clamp(img.channels[ch](r, c), 0.0, 1.0);
        raw.data[3 * (r * raw.width + c) + ch] = static_cast<std::uint8_t>(std::lround(v * 255.0));
      }
  return raw;
}

Rgb8 read_png(const std::string& path) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.c_str()))
    throw IoError("cannot read PNG '" + path + "': " + image.message);
  image.format = PNG_FORMAT_RGBA;
  std::vector<std::uint8_t> rgba(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, rgba.data(), 0, nullptr)) {
    const std::string msg = image.message;
    png_image_free(&image);
    throw IoError("cannot decode PNG '" + path + "': " + msg);
  }
  Rgb8 raw{static_cast<Index>(image.height), static_cast<Index>(image.width), {}};
  raw.data.resize(3 * raw.height * raw.width);
  for (Index p = 0; p < raw.height * raw.width; ++p)
    for (int ch = 0; ch < 3; ++ch) raw.data[3 * p + ch] = rgba[4 * p + ch];
  return raw;
}

void write_png(const std::string& path, const Rgb8& raw) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(raw.width);
  image.height = static_cast<png_uint_32>(raw.height);
  image.format = PNG_FORMAT_RGB;
  if (!png_image_write_to_file(&image, path.c_str(), 0, raw.data.data(), 0, nullptr))
    throw IoError("cannot write PNG '" + path + "': " + image.message);
}

// Next header token of a PNM stream, skipping comments.
Index pnm_token(std::istream& is, const std::string& path) {
  is >> std::ws;
  while (is.peek() == '#') {
    std::string comment;
    std::getline(is, comment);
    is >> std::ws;
  }
  Index v = -1;
  if (!(is >> v) || v < 0) throw IoError("malformed PPM header in '" + path + "'");
  return v;
}

Rgb8 read_ppm(std::istream& is, const std::string& path) {
  std::string magic(2, '\0');
  is.read(magic.data(), 2);
  if (magic != "P6") throw IoError("'" + path + "' is neither PNG nor binary PPM (P6)");
  Rgb8 raw;
  raw.width = pnm_token(is, path);
  raw.height = pnm_token(is, path);
  const Index maxval = pnm_token(is, path);
  if (raw.width < 1 || raw.height < 1 || maxval < 1 || maxval > 65535)
    throw IoError("unsupported PPM dims or maxval in '" + path + "'");
  is.get();  // single whitespace before the raster
  const Index samples = 3 * raw.width * raw.height;
  const int bytes = maxval > 255 ? 2 : 1;
  std::vector<unsigned char> buf(samples * bytes);
  is.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (is.gcount() != static_cast<std::streamsize>(buf.size())) throw IoError("truncated PPM raster in '" + path + "'");
  raw.data.resize(samples);
  for (Index i = 0; i < samples; ++i) {
    const double v = bytes == 2 ? (buf[2 * i] << 8 | buf[2 * i + 1]) : buf[i];
    raw.data[i] = static_cast<std::uint8_t>(std::lround(v * 255.0 / static_cast<double>(maxval)));
  }
  return raw;
}

void write_ppm(const std::string& path, const Rgb8& raw) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open '" + path + "' for writing");
  os << "P6\n" << raw.width << ' ' << raw.height << "\n255\n";
  os.write(reinterpret_cast<const char*>(raw.data.data()), static_cast<std::streamsize>(raw.data.size()));
  if (!os) throw IoError("failed writing '" + path + "'");
}

bool has_png_extension(const std::string& path) {
  if (path.size() < 4) return false;
  std::string ext = path.substr(path.size() - 4);
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".png";
}

Eigen::VectorXd gaussian_kernel(int size, double sigma) {
  Eigen::VectorXd k(size);
  const double c = (size - 1) / 2.0;
  for (int i = 0; i < size; ++i) k(i) = std::exp(-(i - c) * (i - c) / (2 * sigma * sigma));
  return k / k.sum();
}

// Separable "valid" filtering: output is (H - s + 1) x (W - s + 1).
Eigen::ArrayXXd filter_valid(const Eigen::ArrayXXd& x, const Eigen::VectorXd& k) {
  const Index s = k.size();
  const Index h = x.rows() - s + 1, w = x.cols() - s + 1;
  Eigen::ArrayXXd rows(h, x.cols());
  for (Index c = 0; c < x.cols(); ++c)
    for (Index r = 0; r < h; ++r) rows(r, c) = x.col(c).segment(r, s).matrix().dot(k);
  Eigen::ArrayXXd out(h, w);
  for (Index c = 0; c < w; ++c) out.col(c) = rows.block(0, c, h, s).matrix() * k;
  return out;
}

double ssim_channel(const Eigen::ArrayXXd& x, const Eigen::ArrayXXd& y, const Eigen::VectorXd& k) {
  constexpr double c1 = 0.01 * 0.01, c2 = 0.03 * 0.03;
  const Eigen::ArrayXXd mx = filter_valid(x, k), my = filter_valid(y, k);
  const Eigen::ArrayXXd sxx = filter_valid(x * x, k) - mx * mx;
  const Eigen::ArrayXXd syy = filter_valid(y * y, k) - my * my;
  const Eigen::ArrayXXd sxy = filter_valid(x * y, k) - mx * my;
  const Eigen::ArrayXXd map =
      ((2 * mx * my + c1) * (2 * sxy + c2)) / ((mx * mx + my * my + c1) * (sxx + syy + c2));
  return map.mean();
}

}  // namespace

QuaternionMatrixd to_quaternion(const ColorImage& img) {
  return QuaternionMatrixd(Eigen::MatrixXd::Zero(img.height(), img.width()), img.channels[0].matrix(),
                           img.channels[1].matrix(), img.channels[2].matrix());
}

ColorImage from_quaternion(const QuaternionMatrixd& q) {
  ColorImage img(q.rows(), q.cols());
  for (int ch = 0; ch < 3; ++ch) img.channels[ch] = q.plane(ch + 1).array().min(1.0).max(0.0);
  return img;
}

BoolPlane random_mask(Index height, Index width, double rate, std::uint64_t seed) {
  if (height < 1 || width < 1) throw ArgumentError("random_mask: dims must be positive");
  if (!(rate > 0.0 && rate <= 1.0)) throw ArgumentError("random_mask: sampling rate must lie in (0, 1]");
  const Index total = height * width;
  const Index observed = std::llround(rate * static_cast<double>(total));
  std::vector<Index> perm(total);
  std::iota(perm.begin(), perm.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(perm.begin(), perm.end(), rng);
  BoolPlane mask = BoolPlane::Constant(height, width, false);
  for (Index i = 0; i < observed; ++i) mask.data()[perm[i]] = true;
  return mask;
}

BoolPlane structural_mask(const ColorImage& mask_image) {
  return (mask_image.channels[0] > 0) || (mask_image.channels[1] > 0) || (mask_image.channels[2] > 0);
}

ColorImage apply_mask(const ColorImage& img, const BoolPlane& mask) {
  if (mask.rows() != img.height() || mask.cols() != img.width())
    throw ShapeError("apply_mask: mask dims differ from the image");
  ColorImage out = img;
  for (auto& c : out.channels) c = mask.select(c, 0.0);
  return out;
}

double psnr(const ColorImage& ref, const ColorImage& test) {
  check_same_shape(ref, test, "psnr");
  double sse = 0;
  for (int ch = 0; ch < 3; ++ch) sse += (ref.channels[ch] - test.channels[ch]).square().sum();
  const double mse = sse / (3.0 * static_cast<double>(ref.height() * ref.width()));
  if (mse == 0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(1.0 / mse);
}

double ssim(const ColorImage& ref, const ColorImage& test) {
  check_same_shape(ref, test, "ssim");
  int size = static_cast<int>(std::min<Index>({11, ref.height(), ref.width()}));
  if (size % 2 == 0) --size;
  if (size < 1) throw ShapeError("ssim: empty image");
  const Eigen::VectorXd k = gaussian_kernel(size, 1.5);
  double total = 0;
  for (int ch = 0; ch < 3; ++ch) total += ssim_channel(ref.channels[ch], test.channels[ch], k);
  return total / 3.0;
}

ColorImage read_image(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open '" + path + "'");
  unsigned char sig[8] = {};
  is.read(reinterpret_cast<char*>(sig), 8);
  if (is.gcount() == 8 && png_sig_cmp(sig, 0, 8) == 0) return from_rgb8(read_png(path));
  is.clear();
  is.seekg(0);
  return from_rgb8(read_ppm(is, path));
}

void write_image(const std::string& path, const ColorImage& img) {
  const Rgb8 raw = to_rgb8(img);
  if (has_png_extension(path))
    write_png(path, raw);
  else
    write_ppm(path, raw);
}

BoolPlane read_mask(const std::string& path) { return structural_mask(read_image(path)); }

void write_mask(const std::string& path, const BoolPlane& mask) {
  ColorImage img(mask.rows(), mask.cols());
  for (auto& c : img.channels) c = mask.cast<double>();
  write_image(path, img);
}

}  // namespace qtlr
