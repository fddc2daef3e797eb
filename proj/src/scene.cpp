#include "spi/scene.hpp"

#include <png.h>

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cctype>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <memory>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace spi {

ImageGrid::ImageGrid(std::size_t width, std::size_t height, double fill)
    : width_(width), height_(height), values_(width * height, fill) {
  if (!std::isfinite(fill)) throw std::invalid_argument("ImageGrid: non-finite fill value");
}

ImageGrid::ImageGrid(std::size_t width, std::size_t height, std::vector<double> values)
    : width_(width), height_(height), values_(std::move(values)) {
  if (values_.size() != width_ * height_) {
    throw std::invalid_argument("ImageGrid: " + std::to_string(values_.size()) +
                                " values for a " + std::to_string(width_) + "x" +
                                std::to_string(height_) + " grid");
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw std::invalid_argument("ImageGrid: non-finite value");
  }
}

double ImageGrid::min() const { return *std::min_element(values_.begin(), values_.end()); }
double ImageGrid::max() const { return *std::max_element(values_.begin(), values_.end()); }
double ImageGrid::sum() const { return std::accumulate(values_.begin(), values_.end(), 0.0); }

namespace {

std::string read_all(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// PGM header tokens may be separated by whitespace and '#' comments.
class PgmHeader {
 public:
  explicit PgmHeader(const std::string& data) : data_(data) {}

  std::size_t next_uint() {
    skip_space();
    if (pos_ >= data_.size() || !std::isdigit(static_cast<unsigned char>(data_[pos_]))) {
      throw std::runtime_error("malformed PGM header");
    }
    std::size_t value = 0;
    while (pos_ < data_.size() && std::isdigit(static_cast<unsigned char>(data_[pos_]))) {
      value = value * 10 + static_cast<std::size_t>(data_[pos_++] - '0');
      if (value > (1u << 24)) throw std::runtime_error("malformed PGM header");
    }
    return value;
  }

  void skip_space() {
    while (pos_ < data_.size()) {
      if (data_[pos_] == '#') {
        while (pos_ < data_.size() && data_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(data_[pos_]))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  std::size_t pos() const { return pos_; }
  void advance(std::size_t n) { pos_ += n; }

 private:
  const std::string& data_;
  std::size_t pos_ = 2;
};

struct Gray8 {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> pixels;
};

Gray8 decode_pgm(const std::string& data) {
  const bool binary = data[1] == '5';
  PgmHeader header(data);
  Gray8 img;
  img.width = header.next_uint();
  img.height = header.next_uint();
  const std::size_t maxval = header.next_uint();
  if (maxval != 255) {
    throw std::runtime_error("unsupported PGM maxval " + std::to_string(maxval) +
                             " (only 8-bit, maxval 255)");
  }
  const std::size_t count = img.width * img.height;
  img.pixels.resize(count);
  if (binary) {
    // Exactly one whitespace byte separates maxval from the raster.
    header.advance(1);
    if (data.size() < header.pos() + count) throw std::runtime_error("truncated PGM raster");
    std::copy_n(data.begin() + static_cast<std::ptrdiff_t>(header.pos()), count,
                img.pixels.begin());
  } else {
    for (std::size_t i = 0; i < count; ++i) {
      const std::size_t v = header.next_uint();
      if (v > 255) throw std::runtime_error("PGM sample exceeds maxval");
      img.pixels[i] = static_cast<std::uint8_t>(v);
    }
  }
  return img;
}

struct PngCloser {
  png_structp png = nullptr;
  png_infop info = nullptr;
  ~PngCloser() { png_destroy_read_struct(&png, info ? &info : nullptr, nullptr); }
};

struct PngBuffer {
  const std::string& data;
  std::size_t offset = 0;
};

void png_read_from_buffer(png_structp png, png_bytep out, png_size_t length) {
  auto* buffer = static_cast<PngBuffer*>(png_get_io_ptr(png));
  if (buffer->offset + length > buffer->data.size()) png_error(png, "truncated PNG");
  std::memcpy(out, buffer->data.data() + buffer->offset, length);
  buffer->offset += length;
}

[[noreturn]] void png_throw(png_structp, png_const_charp message) {
  throw std::runtime_error(std::string("PNG decode error: ") + message);
}

Gray8 decode_png(const std::string& data) {
  PngCloser guard;
  guard.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, png_throw, nullptr);
  if (!guard.png) throw std::runtime_error("png_create_read_struct failed");
  guard.info = png_create_info_struct(guard.png);
  if (!guard.info) throw std::runtime_error("png_create_info_struct failed");

  PngBuffer buffer{data};
  png_set_read_fn(guard.png, &buffer, png_read_from_buffer);
  png_read_info(guard.png, guard.info);

  const auto color = png_get_color_type(guard.png, guard.info);
  const auto depth = png_get_bit_depth(guard.png, guard.info);
  if (color != PNG_COLOR_TYPE_GRAY || depth != 8) {
    throw std::runtime_error("unsupported PNG: only 8-bit grayscale without alpha is accepted");
  }
  if (png_get_interlace_type(guard.png, guard.info) != PNG_INTERLACE_NONE) {
    png_set_interlace_handling(guard.png);
  }
  png_read_update_info(guard.png, guard.info);

  Gray8 img;
  img.width = png_get_image_width(guard.png, guard.info);
  img.height = png_get_image_height(guard.png, guard.info);
  img.pixels.resize(img.width * img.height);
  std::vector<png_bytep> rows(img.height);
  for (std::size_t y = 0; y < img.height; ++y) rows[y] = img.pixels.data() + y * img.width;
  png_read_image(guard.png, rows.data());
  return img;
}

// 5x7 glyphs for the "letters" target.
using Glyph = std::array<std::uint8_t, 7>;
constexpr Glyph kGlyphS = {0b01111, 0b10000, 0b10000, 0b01110, 0b00001, 0b00001, 0b11110};
constexpr Glyph kGlyphI = {0b11111, 0b00100, 0b00100, 0b00100, 0b00100, 0b00100, 0b11111};
constexpr Glyph kGlyphO = {0b01110, 0b10001, 0b10001, 0b10001, 0b10001, 0b10001, 0b01110};
constexpr Glyph kGlyphM = {0b10001, 0b11011, 0b10101, 0b10101, 0b10001, 0b10001, 0b10001};

// Four glyphs at different gray levels on a 0.25 panel spanning the middle
// three quarters of the rows; the top and bottom bands stay black. Dyadic
// gray levels keep noiseless pipelines exact in binary floating point.
std::vector<double> render_letters(std::size_t size) {
  std::vector<double> values(size * size, 0.0);
  for (std::size_t y = size / 8; y < size - size / 8; ++y)
    for (std::size_t x = 0; x < size; ++x) values[y * size + x] = 0.25;

  const std::array<const Glyph*, 4> glyphs = {&kGlyphS, &kGlyphI, &kGlyphO, &kGlyphM};
  const std::array<double, 4> levels = {1.0, 0.75, 0.5, 0.875};

  const std::size_t scale = size > 23 ? (size - 3) / 20 : 1;
  const std::size_t glyph_w = 5 * scale;
  const std::size_t glyph_h = 7 * scale;
  const std::size_t total_w = 4 * glyph_w + 3;
  const std::size_t x0 = size > total_w ? (size - total_w) / 2 : 0;
  const std::size_t y0 = size > glyph_h ? (size - glyph_h) / 2 : 0;

  for (std::size_t g = 0; g < glyphs.size(); ++g) {
    const std::size_t gx = x0 + g * (glyph_w + 1);
    for (std::size_t row = 0; row < glyph_h; ++row) {
      for (std::size_t col = 0; col < glyph_w; ++col) {
        const std::size_t x = gx + col;
        const std::size_t y = y0 + row;
        if (x >= size || y >= size) continue;
        const auto bits = (*glyphs[g])[row / scale];
        if ((bits >> (4 - col / scale)) & 1u) values[y * size + x] = levels[g];
      }
    }
  }
  return values;
}

void put_u32le(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
}

std::uint32_t get_u32le(const std::string& in, std::size_t offset) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) {
    v |= static_cast<std::uint32_t>(static_cast<unsigned char>(in[offset + i])) << (8 * i);
  }
  return v;
}

}  // namespace

ImageGrid load_target(const std::filesystem::path& path, std::size_t size) {
  if (!std::filesystem::exists(path)) throw std::runtime_error("no such file: " + path.string());
  const std::string data = read_all(path);

  Gray8 img;
  if (data.size() >= 2 && data[0] == 'P' && (data[1] == '2' || data[1] == '5')) {
    img = decode_pgm(data);
  } else if (data.size() >= 8 && png_sig_cmp(reinterpret_cast<png_const_bytep>(data.data()), 0, 8) == 0) {
    img = decode_png(data);
  } else {
    throw std::runtime_error("unsupported image format: " + path.string());
  }

  if (img.width != size || img.height != size) {
    throw std::runtime_error("dimension mismatch: " + path.string() + " is " +
                             std::to_string(img.width) + "x" + std::to_string(img.height) +
                             ", expected " + std::to_string(size) + "x" + std::to_string(size));
  }
  std::vector<double> values(img.pixels.size());
  std::transform(img.pixels.begin(), img.pixels.end(), values.begin(),
                 [](std::uint8_t p) { return static_cast<double>(p) / 255.0; });
  return ImageGrid::square(size, std::move(values));
}

ImageGrid builtin_target(std::string_view name, std::size_t size) {
  if (size < 2) throw std::invalid_argument("builtin target size must be >= 2");
  std::vector<double> values(size * size);
  if (name == "flat") {
    std::fill(values.begin(), values.end(), 0.5);
  } else if (name == "checker") {
    for (std::size_t y = 0; y < size; ++y)
      for (std::size_t x = 0; x < size; ++x) values[y * size + x] = (x + y) % 2 == 0 ? 1.0 : 0.0;
  } else if (name == "bars") {
    const std::size_t width = std::max<std::size_t>(1, size / 8);
    for (std::size_t y = 0; y < size; ++y)
      for (std::size_t x = 0; x < size; ++x)
        values[y * size + x] = (x / width) % 2 == 0 ? 0.0 : 1.0;
  } else if (name == "letters") {
    values = render_letters(size);
  } else {
    throw std::invalid_argument("unknown builtin target '" + std::string(name) +
                                "' (expected letters, bars, checker or flat)");
  }
  return ImageGrid::square(size, std::move(values));
}

ImageGrid resolve_target(const TargetSpec& spec) {
  if (spec.is_builtin()) return builtin_target(spec.builtin_name(), spec.size);
  return load_target(spec.source, spec.size);
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

void save_image(const ImageGrid& grid, const std::filesystem::path& path, SaveMode mode,
                double gray_scale) {
  for (double v : grid.values()) {
    if (std::isnan(v)) throw std::invalid_argument("save_image: NaN in grid");
  }
  std::string out;
  if (mode == SaveMode::gray8) {
    out = "P5\n" + std::to_string(grid.width()) + " " + std::to_string(grid.height()) + "\n255\n";
    out.reserve(out.size() + grid.size());
    for (double v : grid.values()) {
      const double scaled = std::clamp(v * gray_scale, 0.0, 255.0);
      out.push_back(static_cast<char>(static_cast<std::uint8_t>(std::floor(scaled + 0.5))));
    }
  } else {
    static_assert(std::endian::native == std::endian::little, "raw-float writer assumes LE host");
    out = "SPI1";
    put_u32le(out, static_cast<std::uint32_t>(grid.width()));
    put_u32le(out, static_cast<std::uint32_t>(grid.height()));
    put_u32le(out, 0);
    const auto* bytes = reinterpret_cast<const char*>(grid.values().data());
    out.append(bytes, grid.size() * sizeof(double));
  }
  write_file_atomic(path, out);
}

ImageGrid load_raw_float(const std::filesystem::path& path) {
  const std::string data = read_all(path);
  if (data.size() < 16 || data.compare(0, 4, "SPI1") != 0) {
    throw std::runtime_error("not an SPI1 raw-float file: " + path.string());
  }
  const std::size_t width = get_u32le(data, 4);
  const std::size_t height = get_u32le(data, 8);
  if (data.size() != 16 + width * height * sizeof(double)) {
    throw std::runtime_error("SPI1 payload size mismatch: " + path.string());
  }
  std::vector<double> values(width * height);
  std::memcpy(values.data(), data.data() + 16, values.size() * sizeof(double));
  return ImageGrid(width, height, std::move(values));
}

}  // namespace spi
