#include <png.h>

#include <algorithm>
#include <cmath>

#include "binary_io.hpp"
#include "s3a/datakit.hpp"
#include "s3a/error.hpp"

namespace s3a {

namespace {

// Neutral pixels are returned as-is so gray images survive the RGB path exactly.
double luminance(double r, double g, double b) {
  if (r == g && g == b) return r;
  return 0.299 * r + 0.587 * g + 0.114 * b;
}

GrayImage decode_png(const std::string& path) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.c_str())) {
    throw Error(Errc::UnreadableImage, path + ": " + image.message);
  }
  const bool color = (image.format & PNG_FORMAT_FLAG_COLOR) != 0;
  image.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  std::vector<png_byte> buffer(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, buffer.data(), 0, nullptr)) {
    const std::string msg = image.message;
    png_image_free(&image);
    throw Error(Errc::UnreadableImage, path + ": " + msg);
  }
  GrayImage out;
  out.width = image.width;
  out.height = image.height;
  out.pixels.resize(out.width * out.height);
  for (std::size_t i = 0; i < out.pixels.size(); ++i) {
    out.pixels[i] = color ? luminance(buffer[3 * i], buffer[3 * i + 1], buffer[3 * i + 2]) / 255.0
                          : buffer[i] / 255.0;
  }
  return out;
}

std::uint32_t le32(std::string_view s, std::size_t at) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) {
    v |= static_cast<std::uint32_t>(static_cast<unsigned char>(s[at + i])) << (8 * i);
  }
  return v;
}

std::uint16_t le16(std::string_view s, std::size_t at) {
  return static_cast<std::uint16_t>(static_cast<unsigned char>(s[at]) |
                                    (static_cast<unsigned char>(s[at + 1]) << 8));
}

// Uncompressed 8-bit paletted, 24-bit and 32-bit BMP.
GrayImage decode_bmp(const std::string& path, std::string_view data) {
  auto fail = [&](const std::string& why) {
    return Error(Errc::UnreadableImage, path + ": " + why);
  };
  if (data.size() < 54) throw fail("BMP header truncated");
  const std::uint32_t pixel_offset = le32(data, 10);
  const std::uint32_t dib_size = le32(data, 14);
  if (dib_size < 40) throw fail("unsupported BMP header");
  const auto width = static_cast<std::int32_t>(le32(data, 18));
  const auto raw_height = static_cast<std::int32_t>(le32(data, 22));
  const std::uint16_t bpp = le16(data, 28);
  const std::uint32_t compression = le32(data, 30);
  if (width == 0 || raw_height == 0) throw Error(Errc::ZeroAreaImage, path + ": zero-area image");
  if (width < 0) throw fail("negative BMP width");
  if (compression != 0 && !(compression == 3 && bpp == 32)) throw fail("compressed BMP");
  if (bpp != 8 && bpp != 24 && bpp != 32) throw fail("unsupported bit depth");

  const bool top_down = raw_height < 0;
  const std::size_t w = static_cast<std::size_t>(width);
  const std::size_t h = static_cast<std::size_t>(top_down ? -static_cast<std::int64_t>(raw_height)
                                                          : raw_height);
  const std::size_t stride = ((w * bpp + 31) / 32) * 4;
  if (pixel_offset + stride * h > data.size()) throw fail("BMP pixel data truncated");

  std::vector<double> palette;
  if (bpp == 8) {
    std::uint32_t colors = le32(data, 46);
    if (colors == 0) colors = 256;
    const std::size_t at = 14 + dib_size;
    if (at + 4 * colors > data.size()) throw fail("BMP palette truncated");
    for (std::uint32_t i = 0; i < colors; ++i) {
      const auto* p = reinterpret_cast<const unsigned char*>(data.data() + at + 4 * i);
      palette.push_back(luminance(p[2], p[1], p[0]));
    }
  }

  GrayImage out;
  out.width = w;
  out.height = h;
  out.pixels.resize(w * h);
  for (std::size_t y = 0; y < h; ++y) {
    const std::size_t src_row = top_down ? y : h - 1 - y;
    const auto* row =
        reinterpret_cast<const unsigned char*>(data.data() + pixel_offset + src_row * stride);
    for (std::size_t x = 0; x < w; ++x) {
      double v;
      if (bpp == 8) {
        if (row[x] >= palette.size()) throw fail("palette index out of range");
        v = palette[row[x]];
      } else {
        const auto* p = row + x * (bpp / 8);
        v = luminance(p[2], p[1], p[0]);
      }
      out.pixels[y * w + x] = v / 255.0;
    }
  }
  return out;
}

}  // namespace

GrayImage load_image(const std::string& path) {
  std::string data;
  try {
    data = detail::read_file(path);
  } catch (const Error&) {
    throw Error(Errc::UnreadableImage, "cannot open " + path);
  }
  GrayImage img;
  if (data.size() >= 8 && data.compare(0, 8, "\x89PNG\r\n\x1a\n") == 0) {
    img = decode_png(path);
  } else if (data.size() >= 2 && data.compare(0, 2, "BM") == 0) {
    img = decode_bmp(path, data);
  } else {
    throw Error(Errc::UnreadableImage, path + ": not a PNG or BMP file");
  }
  if (img.width == 0 || img.height == 0) {
    throw Error(Errc::ZeroAreaImage, path + ": zero-area image");
  }
  return img;
}

GrayImage resize_bilinear(const GrayImage& img, std::size_t width, std::size_t height) {
  if (img.width == 0 || img.height == 0 || width == 0 || height == 0) {
    throw Error(Errc::ZeroAreaImage, "cannot resize a zero-area image");
  }
  struct Tap {
    std::size_t lo, hi;
    double frac;
  };
  auto taps = [](std::size_t out, std::size_t in) {
    std::vector<Tap> t(out);
    const double scale = static_cast<double>(in) / static_cast<double>(out);
    for (std::size_t i = 0; i < out; ++i) {
      double src = (static_cast<double>(i) + 0.5) * scale - 0.5;
      src = std::clamp(src, 0.0, static_cast<double>(in - 1));
      const auto lo = static_cast<std::size_t>(std::floor(src));
      t[i] = {lo, std::min(lo + 1, in - 1), src - static_cast<double>(lo)};
    }
    return t;
  };
  const auto xs = taps(width, img.width);
  const auto ys = taps(height, img.height);
  GrayImage out;
  out.width = width;
  out.height = height;
  out.pixels.resize(width * height);
  for (std::size_t y = 0; y < height; ++y) {
    const double* r0 = img.pixels.data() + ys[y].lo * img.width;
    const double* r1 = img.pixels.data() + ys[y].hi * img.width;
    const double fy = ys[y].frac;
    for (std::size_t x = 0; x < width; ++x) {
      const double fx = xs[x].frac;
      const double top = (1.0 - fx) * r0[xs[x].lo] + fx * r0[xs[x].hi];
      const double bottom = (1.0 - fx) * r1[xs[x].lo] + fx * r1[xs[x].hi];
      out.pixels[y * width + x] = (1.0 - fy) * top + fy * bottom;
    }
  }
  return out;
}

Vector vectorize_image(const std::string& path, std::size_t width, std::size_t height) {
  return resize_bilinear(load_image(path), width, height).pixels;
}

Matrix average_pool(const Matrix& X, std::size_t side, std::size_t factor) {
  if (factor == 0 || side == 0 || side % factor != 0) {
    throw Error(Errc::InvalidArgument, "pool factor must divide the image side");
  }
  if (X.rows() != side * side) {
    throw Error(Errc::ShapeError, "expected " + std::to_string(side * side) + " rows, got " +
                                      std::to_string(X.rows()));
  }
  const std::size_t out_side = side / factor;
  const double inv = 1.0 / static_cast<double>(factor * factor);
  Matrix out(out_side * out_side, X.cols());
  for (std::size_t oy = 0; oy < out_side; ++oy) {
    for (std::size_t ox = 0; ox < out_side; ++ox) {
      auto dst = out.row(oy * out_side + ox);
      for (std::size_t dy = 0; dy < factor; ++dy) {
        for (std::size_t dx = 0; dx < factor; ++dx) {
          auto src = X.row((oy * factor + dy) * side + ox * factor + dx);
          for (std::size_t c = 0; c < X.cols(); ++c) dst[c] += src[c];
        }
      }
      for (double& v : dst) v *= inv;
    }
  }
  return out;
}

Vector column_mean(const Matrix& X) {
  Vector mean(X.rows(), 0.0);
  if (X.cols() == 0) return mean;
  for (std::size_t r = 0; r < X.rows(); ++r) {
    double acc = 0.0;
    for (double v : X.row(r)) acc += v;
    mean[r] = acc / static_cast<double>(X.cols());
  }
  return mean;
}

Matrix center_columns(const Matrix& X, std::span<const double> mean) {
  if (mean.size() != X.rows()) throw Error(Errc::ShapeError, "mean length does not match rows");
  Matrix out = X;
  for (std::size_t r = 0; r < out.rows(); ++r) {
    for (double& v : out.row(r)) v -= mean[r];
  }
  return out;
}

}  // namespace s3a
