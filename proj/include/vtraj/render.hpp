#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "vtraj/field_io.hpp"

namespace vtraj {

struct Rgb {
  std::uint8_t r{0}, g{0}, b{0};
  friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// Interleaved 8-bit RGB raster, row 0 at the top.
struct Image {
  int width{0};
  int height{0};
  std::vector<std::uint8_t> pixels;

  Image() = default;
  Image(int w, int h, Rgb fill);

  Rgb at(int x, int y) const;
  void set(int x, int y, Rgb c);
};

/// Fixed five-stop red-yellow-green colormap: slow traffic is red, free flow green.
///   0.00 (165,0,38)  0.25 (244,109,67)  0.50 (254,224,139)  0.75 (166,217,106)  1.00 (26,152,80)
Rgb speed_color(double v, double v_min, double v_max);

inline constexpr Rgb kEmptyCellColor{128, 128, 128};
inline constexpr Rgb kBackgroundColor{255, 255, 255};
inline constexpr Rgb kOverlayColor{0, 0, 0};

struct RenderOptions {
  int px_per_dt{2};
  int px_per_dx{2};
  double v_min{0.0};
  double v_max{35.0};
  /// Downstream (increasing x) at the top of the image.
  bool downstream_up{true};
  /// Real-space window; defaults to the grid hull.
  std::optional<double> x_lo;
  std::optional<double> x_hi;
};

/// Maps between (t, x) and pixel coordinates of a rendered field.
struct PixelFrame {
  double t0, t1, x_lo, x_hi;
  int width, height;
  bool downstream_up;

  /// Continuous pixel coordinates (column, row) of (t, x).
  std::pair<double, double> to_pixel(double t, double x) const;
  /// (t, x) at the center of pixel (column, row).
  std::pair<double, double> from_pixel(int col, int row) const;
};

PixelFrame pixel_frame(const GridSpec& grid, const RenderOptions& options);

/// Time-space diagram of a speed field (kind raw or smoothed) with optional
/// black polylines. Throws DataError for any other kind.
Image render_heatmap(const FieldFile& field, const RenderOptions& options,
                     const std::vector<std::vector<std::pair<double, double>>>& overlays = {});

void write_ppm(const std::filesystem::path& path, const Image& image);
Image read_ppm(const std::filesystem::path& path);

/// Sidecar text describing axes, speed scale and colors.
std::string legend_text(const FieldFile& field, const RenderOptions& options);

}  // namespace vtraj
