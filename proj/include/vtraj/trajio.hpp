#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace vtraj {

inline constexpr double kMetersPerMile = 1609.344;
inline constexpr double kMetersPerFoot = 0.3048;

enum class DistanceUnit { miles, feet, meters };
enum class SpeedUnit { mph, mps };
enum class MarkerDirection { decreasing, increasing };

/// How file positions map onto the internal forward coordinate (meters,
/// increasing downstream).
struct UnitConvention {
  DistanceUnit distance_in{DistanceUnit::meters};
  SpeedUnit speed_in{SpeedUnit::mps};
  MarkerDirection mile_marker_direction{MarkerDirection::increasing};
  /// Marker (in miles) that maps to x = 0.
  double reference_marker{0.0};

  void validate() const;
};

double meters_per_unit(DistanceUnit unit);
/// File position -> forward meters.
double to_forward_meters(double position, const UnitConvention& conv);
/// Forward meters -> file position.
double from_forward_meters(double x, const UnitConvention& conv);

DistanceUnit parse_distance_unit(std::string_view name);
SpeedUnit parse_speed_unit(std::string_view name);
MarkerDirection parse_marker_direction(std::string_view name);

struct TrajectorySample {
  std::string vehicle_id;
  double t{0.0};
  double x{0.0};
  int lane{1};
};

/// A contiguous run of samples of one vehicle in one lane; t strictly increasing.
struct Fragment {
  struct Point {
    double t;
    double x;
  };

  std::string vehicle_id;
  int lane{1};
  std::vector<Point> points;

  double duration() const { return points.size() < 2 ? 0.0 : points.back().t - points.front().t; }
};

/// Column positions of the four canonical fields inside a CSV row. Extra
/// columns (vehicle dimensions, class, ...) are ignored.
struct ColumnLayout {
  int vehicle_id{0};
  int timestamp{1};
  int position{2};
  int lane{3};

  int required_columns() const;
};

inline constexpr std::string_view kTrajectoryHeader = "vehicle_id,timestamp_s,position,lane";

/// Builds a layout from a header row; nullopt if the row is not a header.
std::optional<ColumnLayout> parse_header(std::string_view line);

/// Parses one CSV row or one JSON-lines object. Throws ParseError tagged with
/// `line_no`.
TrajectorySample parse_record(std::string_view line, const UnitConvention& conv,
                              std::size_t line_no = 0, const ColumnLayout& layout = {});

enum class ErrorPolicy { raise, skip };

struct ReaderOptions {
  ErrorPolicy on_error{ErrorPolicy::raise};
  /// Stop after consuming this many bytes (shard end).
  std::uint64_t byte_limit{std::numeric_limits<std::uint64_t>::max()};
  /// Line number of the first line read, for error messages.
  std::size_t first_line{1};
  /// Forced layout; otherwise taken from a header row if present.
  std::optional<ColumnLayout> layout;
  std::optional<std::set<int>> lanes;
};

struct ReaderStats {
  std::uint64_t rows{0};
  std::uint64_t fragments{0};
  std::uint64_t duplicate_timestamps{0};
  std::uint64_t decreasing_timestamps{0};
  std::uint64_t malformed_rows{0};
  std::uint64_t filtered_fragments{0};
};

/// Pulls fragments one at a time from a stream of rows grouped by vehicle.
/// Holds at most one fragment in memory.
class FragmentReader {
public:
  FragmentReader(std::istream& in, UnitConvention conv, ReaderOptions options = {});

  std::optional<Fragment> next();

  const ReaderStats& stats() const { return m_stats; }
  std::uint64_t bytes_consumed() const { return m_bytes; }

private:
  bool read_sample(TrajectorySample& out);

  std::istream& m_in;
  UnitConvention m_conv;
  ReaderOptions m_options;
  ColumnLayout m_layout;
  ReaderStats m_stats;
  std::string m_line;
  std::uint64_t m_bytes{0};
  std::size_t m_line_no;
  bool m_first_row{true};
  std::optional<TrajectorySample> m_pending;
};

/// Reads every fragment of a stream into memory. Intended for small inputs.
std::vector<Fragment> read_fragments(std::istream& in, const UnitConvention& conv,
                                     ReaderOptions options = {});

/// Writes fragments as canonical CSV (header included when `header` is set).
void write_fragments_csv(std::ostream& out, const std::vector<Fragment>& fragments,
                         const UnitConvention& conv, bool header = true);
void write_fragment_rows(std::ostream& out, const Fragment& fragment, const UnitConvention& conv);

/// Byte range [begin, end) of one shard of a trajectory file.
struct ShardRange {
  std::uint64_t begin{0};
  std::uint64_t end{0};
};

/// Splits a file into at most `shards` ranges that start on line boundaries
/// where the vehicle id changes, so no fragment straddles two shards.
std::vector<ShardRange> plan_shards(const std::filesystem::path& file, int shards);

}  // namespace vtraj
