#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace spi {

// Row-major grid of real intensities on the DMD pixel grid. Holds target
// reflectance, disturbance fields and reconstructions alike.
class ImageGrid {
 public:
  ImageGrid() = default;
  ImageGrid(std::size_t width, std::size_t height, double fill = 0.0);
  // Throws std::invalid_argument on size mismatch or non-finite entries.
  ImageGrid(std::size_t width, std::size_t height, std::vector<double> values);

  static ImageGrid square(std::size_t side, std::vector<double> values) {
    return ImageGrid(side, side, std::move(values));
  }

  std::size_t width() const { return width_; }
  std::size_t height() const { return height_; }
  std::size_t size() const { return values_.size(); }
  bool is_square() const { return width_ == height_; }

  double operator[](std::size_t index) const { return values_[index]; }
  double at(std::size_t x, std::size_t y) const { return values_[y * width_ + x]; }
  std::span<const double> values() const { return values_; }

  double min() const;
  double max() const;
  double sum() const;

  bool operator==(const ImageGrid&) const = default;

 private:
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  std::vector<double> values_;
};

// Names accepted by builtin_target.
inline constexpr std::string_view kBuiltinTargets[] = {"letters", "bars", "checker", "flat"};

struct TargetSpec {
  // Either a file path or "builtin:<name>".
  std::string source = "builtin:letters";
  std::size_t size = 64;

  bool is_builtin() const { return source.starts_with("builtin:"); }
  std::string builtin_name() const { return source.substr(8); }
};

enum class SaveMode { gray8, raw_float };

// Loads an 8-bit grayscale PGM (P2/P5, maxval 255) or PNG and maps [0,255]
// onto [0,1]. The image must already be size x size.
ImageGrid load_target(const std::filesystem::path& path, std::size_t size);

// Deterministic substitute targets; see kBuiltinTargets.
ImageGrid builtin_target(std::string_view name, std::size_t size);

ImageGrid resolve_target(const TargetSpec& spec);

// gray8: value * gray_scale, clamped to [0,255], rounded half-up, written as
// PGM P5. raw_float: SPI1 header followed by little-endian doubles.
void save_image(const ImageGrid& grid, const std::filesystem::path& path, SaveMode mode,
                double gray_scale = 255.0);

ImageGrid load_raw_float(const std::filesystem::path& path);

// Writes via a sibling temporary file and renames into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace spi
