#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "vtraj/grid.hpp"

namespace vtraj {

/// One grid of values as stored on disk:
///
///     # t0=<> dt=<> nt=<> x0=<> dx=<> nx=<> cwave=<> kind=<>
///     # <optional further comment lines>
///     v00,v01,...        (nt lines of nx values, time-major; empty cells as nan)
struct FieldFile {
  GridSpec grid;
  std::string kind;
  FieldArray values;
  /// Additional `#` lines without the leading "# ".
  std::vector<std::string> notes;
};

/// Kinds written by the pipeline.
namespace field_kind {
inline constexpr const char* ttt = "ttt";
inline constexpr const char* ttd = "ttd";
inline constexpr const char* raw = "raw";
inline constexpr const char* density = "density";
inline constexpr const char* flow = "flow";
inline constexpr const char* smoothed = "smoothed";
inline constexpr const char* weight = "weight";
}  // namespace field_kind

void write_field(std::ostream& out, const FieldFile& field);
void write_field(const std::filesystem::path& path, const FieldFile& field);

/// Throws DataError naming `source` and the offending line.
FieldFile read_field(std::istream& in, const std::string& source = "<stream>");
FieldFile read_field(const std::filesystem::path& path);

/// Grid of an existing field file (header only).
GridSpec read_field_grid(const std::filesystem::path& path);

}  // namespace vtraj
