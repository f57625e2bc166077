#include "vtraj/render.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <sstream>

#include "vtraj/errors.hpp"
#include "vtraj/format.hpp"

namespace vtraj {

Image::Image(int w, int h, Rgb fill) : width{w}, height{h}, pixels(static_cast<std::size_t>(w) * h * 3) {
  for (std::size_t i = 0; i < pixels.size(); i += 3) {
    pixels[i] = fill.r;
    pixels[i + 1] = fill.g;
    pixels[i + 2] = fill.b;
  }
}

Rgb Image::at(int x, int y) const {
  const std::size_t i = (static_cast<std::size_t>(y) * width + x) * 3;
  return {pixels[i], pixels[i + 1], pixels[i + 2]};
}

void Image::set(int x, int y, Rgb c) {
  if (x < 0 || y < 0 || x >= width || y >= height) return;
  const std::size_t i = (static_cast<std::size_t>(y) * width + x) * 3;
  pixels[i] = c.r;
  pixels[i + 1] = c.g;
  pixels[i + 2] = c.b;
}

Rgb speed_color(double v, double v_min, double v_max) {
  static constexpr std::array<Rgb, 5> stops{{{165, 0, 38}, {244, 109, 67}, {254, 224, 139}, {166, 217, 106}, {26, 152, 80}}};
  double u = v_max > v_min ? (v - v_min) / (v_max - v_min) : 0.0;
  u = std::clamp(u, 0.0, 1.0) * (stops.size() - 1);
  const auto k = std::min<std::size_t>(static_cast<std::size_t>(u), stops.size() - 2);
  const double f = u - static_cast<double>(k);
  const auto mix = [f](std::uint8_t a, std::uint8_t b) {
    return static_cast<std::uint8_t>(std::lround(a + f * (static_cast<double>(b) - a)));
  };
  return {mix(stops[k].r, stops[k + 1].r), mix(stops[k].g, stops[k + 1].g), mix(stops[k].b, stops[k + 1].b)};
}

std::pair<double, double> PixelFrame::to_pixel(double t, double x) const {
  const double col = (t - t0) / (t1 - t0) * width;
  const double up = (x - x_lo) / (x_hi - x_lo) * height;
  return {col, downstream_up ? height - up : up};
}

std::pair<double, double> PixelFrame::from_pixel(int col, int row) const {
  const double t = t0 + (col + 0.5) / width * (t1 - t0);
  const double from_low = downstream_up ? height - (row + 0.5) : row + 0.5;
  return {t, x_lo + from_low / height * (x_hi - x_lo)};
}

PixelFrame pixel_frame(const GridSpec& g, const RenderOptions& o) {
  const double drift = g.cwave * (g.t_end() - g.t0);
  const double x_lo = o.x_lo.value_or(g.x0 + std::min(0.0, drift));
  const double x_hi = o.x_hi.value_or(g.x_end() + std::max(0.0, drift));
  if (!(x_hi > x_lo)) throw ConfigError("render window is empty");
  const int height = std::max(1, static_cast<int>(std::ceil((x_hi - x_lo) / g.dx * o.px_per_dx - 1e-9)));
  const int width = static_cast<int>(g.nt) * o.px_per_dt;
  return {g.t0, g.t_end(), x_lo, x_hi, width, height, o.downstream_up};
}

namespace {

void draw_line(Image& img, double x0, double y0, double x1, double y1, Rgb c) {
  const double len = std::max(std::abs(x1 - x0), std::abs(y1 - y0));
  const int steps = std::max(1, static_cast<int>(std::ceil(len)));
  for (int s = 0; s <= steps; ++s) {
    const double f = static_cast<double>(s) / steps;
    img.set(static_cast<int>(std::floor(x0 + f * (x1 - x0))), static_cast<int>(std::floor(y0 + f * (y1 - y0))), c);
  }
}

}  // namespace

Image render_heatmap(const FieldFile& field, const RenderOptions& options,
                     const std::vector<std::vector<std::pair<double, double>>>& overlays) {
  if (field.kind != "raw" && field.kind != "smoothed")
    throw DataError("cannot render field of kind '" + field.kind + "' as speed");
  if (options.px_per_dt < 1 || options.px_per_dx < 1) throw ConfigError("pixel scale must be >= 1");
  const GridSpec& g = field.grid;
  const PixelFrame frame = pixel_frame(g, options);
  Image img(frame.width, frame.height, kBackgroundColor);
  for (int row = 0; row < frame.height; ++row) {
    for (int col = 0; col < frame.width; ++col) {
      const auto [t, x] = frame.from_pixel(col, row);
      const auto cell = cell_of(t, x, g);
      if (!cell) continue;
      const double v = field.values(cell->it, cell->ix);
      img.set(col, row, std::isnan(v) ? kEmptyCellColor : speed_color(v, options.v_min, options.v_max));
    }
  }
  for (const auto& line : overlays) {
    for (std::size_t k = 1; k < line.size(); ++k) {
      const auto [c0, r0] = frame.to_pixel(line[k - 1].first, line[k - 1].second);
      const auto [c1, r1] = frame.to_pixel(line[k].first, line[k].second);
      draw_line(img, c0, r0, c1, r1, kOverlayColor);
    }
  }
  return img;
}

void write_ppm(const std::filesystem::path& path, const Image& image) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << "P6\n" << image.width << ' ' << image.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(image.pixels.data()), static_cast<std::streamsize>(image.pixels.size()));
  if (!out) throw DataError("write failed: " + path.string());
}

Image read_ppm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::string magic;
  int w = 0, h = 0, maxval = 0;
  if (!(in >> magic >> w >> h >> maxval) || magic != "P6" || maxval != 255 || w <= 0 || h <= 0)
    throw DataError("not an 8-bit binary PPM: " + path.string());
  in.get();
  Image img(w, h, {});
  in.read(reinterpret_cast<char*>(img.pixels.data()), static_cast<std::streamsize>(img.pixels.size()));
  if (!in) throw DataError("truncated PPM: " + path.string());
  return img;
}

std::string legend_text(const FieldFile& field, const RenderOptions& o) {
  const PixelFrame frame = pixel_frame(field.grid, o);
  std::ostringstream s;
  s << "kind " << field.kind << '\n';
  s << "size " << frame.width << 'x' << frame.height << '\n';
  s << "horizontal time_s " << format_number(frame.t0) << " -> " << format_number(frame.t1) << '\n';
  s << "vertical position_m " << format_number(frame.x_lo) << " -> " << format_number(frame.x_hi)
    << (o.downstream_up ? " (downstream up)" : " (downstream down)") << '\n';
  s << "speed_ms " << format_number(o.v_min) << " -> " << format_number(o.v_max) << '\n';
  for (int k = 0; k <= 4; ++k) {
    const double v = o.v_min + (o.v_max - o.v_min) * k / 4.0;
    const Rgb c = speed_color(v, o.v_min, o.v_max);
    s << "stop " << format_number(v) << ' ' << int(c.r) << ',' << int(c.g) << ',' << int(c.b) << '\n';
  }
  s << "empty " << int(kEmptyCellColor.r) << ',' << int(kEmptyCellColor.g) << ',' << int(kEmptyCellColor.b) << '\n';
  s << "outside " << int(kBackgroundColor.r) << ',' << int(kBackgroundColor.g) << ',' << int(kBackgroundColor.b) << '\n';
  s << "overlay " << int(kOverlayColor.r) << ',' << int(kOverlayColor.g) << ',' << int(kOverlayColor.b) << '\n';
  return s.str();
}

}  // namespace vtraj
