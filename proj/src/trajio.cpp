#include "vtraj/trajio.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "vtraj/errors.hpp"
#include "vtraj/format.hpp"

namespace vtraj {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::string_view unquote(std::string_view s) {
  s = trim(s);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return s;
}

// Splits on ',' into at most `max_fields` views; returns the field count seen.
int split_csv(std::string_view line, std::string_view* fields, int max_fields) {
  int n = 0;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    const std::string_view field =
        line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    if (n < max_fields) fields[n] = field;
    ++n;
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return n;
}

int parse_lane(std::string_view text, std::size_t line_no) {
  text = trim(text);
  int lane = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), lane);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    throw ParseError(line_no, "malformed lane '" + std::string(text) + "'");
  if (lane < 1) throw ParseError(line_no, "lane must be >= 1");
  return lane;
}

double parse_finite(std::string_view text, const char* what, std::size_t line_no) {
  double v = 0.0;
  if (!parse_number(text, v)) throw ParseError(line_no, std::string("malformed ") + what + " '" + std::string(trim(text)) + "'");
  if (!std::isfinite(v)) throw ParseError(line_no, std::string("non-finite ") + what);
  return v;
}

TrajectorySample parse_json_record(std::string_view line, const UnitConvention& conv,
                                   std::size_t line_no) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(line_no, std::string("malformed JSON: ") + e.what());
  }
  auto number = [&](const char* key) {
    if (!j.contains(key) || !j[key].is_number()) throw ParseError(line_no, std::string("missing numeric '") + key + "'");
    const double v = j[key].get<double>();
    if (!std::isfinite(v)) throw ParseError(line_no, std::string("non-finite ") + key);
    return v;
  };
  TrajectorySample s;
  if (!j.contains("vehicle_id")) throw ParseError(line_no, "missing 'vehicle_id'");
  const auto& id = j["vehicle_id"];
  s.vehicle_id = id.is_string() ? id.get<std::string>() : id.dump();
  s.t = number("timestamp_s");
  s.x = to_forward_meters(number("position"), conv);
  if (!j.contains("lane") || !j["lane"].is_number_integer()) throw ParseError(line_no, "missing integer 'lane'");
  s.lane = j["lane"].get<int>();
  if (s.lane < 1) throw ParseError(line_no, "lane must be >= 1");
  return s;
}

}  // namespace

void UnitConvention::validate() const {
  if (!std::isfinite(reference_marker)) throw ConfigError("reference marker must be finite");
}

double meters_per_unit(DistanceUnit unit) {
  switch (unit) {
    case DistanceUnit::miles: return kMetersPerMile;
    case DistanceUnit::feet: return kMetersPerFoot;
    case DistanceUnit::meters: return 1.0;
  }
  return 1.0;
}

double to_forward_meters(double position, const UnitConvention& conv) {
  const double factor = meters_per_unit(conv.distance_in);
  const double reference = conv.reference_marker * kMetersPerMile / factor;
  return conv.mile_marker_direction == MarkerDirection::decreasing ? (reference - position) * factor
                                                                   : (position - reference) * factor;
}

double from_forward_meters(double x, const UnitConvention& conv) {
  const double factor = meters_per_unit(conv.distance_in);
  const double reference = conv.reference_marker * kMetersPerMile / factor;
  return conv.mile_marker_direction == MarkerDirection::decreasing ? reference - x / factor
                                                                   : reference + x / factor;
}

DistanceUnit parse_distance_unit(std::string_view name) {
  if (name == "miles" || name == "mi") return DistanceUnit::miles;
  if (name == "feet" || name == "ft") return DistanceUnit::feet;
  if (name == "meters" || name == "m") return DistanceUnit::meters;
  throw ConfigError("unknown distance unit '" + std::string(name) + "'");
}

SpeedUnit parse_speed_unit(std::string_view name) {
  if (name == "mph") return SpeedUnit::mph;
  if (name == "m/s" || name == "mps") return SpeedUnit::mps;
  throw ConfigError("unknown speed unit '" + std::string(name) + "'");
}

MarkerDirection parse_marker_direction(std::string_view name) {
  if (name == "decreasing") return MarkerDirection::decreasing;
  if (name == "increasing") return MarkerDirection::increasing;
  throw ConfigError("unknown marker direction '" + std::string(name) + "'");
}

int ColumnLayout::required_columns() const {
  return std::max({vehicle_id, timestamp, position, lane}) + 1;
}

std::optional<ColumnLayout> parse_header(std::string_view line) {
  line = trim(line);
  if (line.empty() || line.front() == '{') return std::nullopt;
  constexpr int kMax = 64;
  std::string_view fields[kMax];
  const int n = std::min(split_csv(line, fields, kMax), kMax);
  ColumnLayout layout{-1, -1, -1, -1};
  for (int i = 0; i < n; ++i) {
    const auto name = unquote(fields[i]);
    if (name == "vehicle_id") layout.vehicle_id = i;
    else if (name == "timestamp_s") layout.timestamp = i;
    else if (name == "position") layout.position = i;
    else if (name == "lane") layout.lane = i;
  }
  if (layout.vehicle_id < 0 || layout.timestamp < 0 || layout.position < 0 || layout.lane < 0)
    return std::nullopt;
  return layout;
}

TrajectorySample parse_record(std::string_view line, const UnitConvention& conv, std::size_t line_no,
                              const ColumnLayout& layout) {
  line = trim(line);
  if (!line.empty() && line.front() == '{') return parse_json_record(line, conv, line_no);

  constexpr int kMax = 32;
  std::string_view fields[kMax];
  const int n = split_csv(line, fields, kMax);
  if (n < layout.required_columns() || layout.required_columns() > kMax)
    throw ParseError(line_no, "expected at least " + std::to_string(layout.required_columns()) +
                                  " columns, got " + std::to_string(n));
  TrajectorySample s;
  const auto id = unquote(fields[layout.vehicle_id]);
  if (id.empty()) throw ParseError(line_no, "empty vehicle_id");
  s.vehicle_id.assign(id);
  s.t = parse_finite(fields[layout.timestamp], "timestamp", line_no);
  s.x = to_forward_meters(parse_finite(fields[layout.position], "position", line_no), conv);
  if (!std::isfinite(s.x)) throw ParseError(line_no, "position overflows after unit conversion");
  s.lane = parse_lane(fields[layout.lane], line_no);
  return s;
}

FragmentReader::FragmentReader(std::istream& in, UnitConvention conv, ReaderOptions options)
    : m_in{in},
      m_conv{conv},
      m_options{std::move(options)},
      m_layout{m_options.layout.value_or(ColumnLayout{})},
      m_line_no{m_options.first_line - 1} {
  m_conv.validate();
}

bool FragmentReader::read_sample(TrajectorySample& out) {
  while (m_bytes < m_options.byte_limit && std::getline(m_in, m_line)) {
    m_bytes += m_line.size() + 1;
    ++m_line_no;
    const std::string_view view = trim(m_line);
    if (view.empty()) continue;
    if (m_first_row) {
      m_first_row = false;
      if (auto header = parse_header(view)) {
        if (!m_options.layout) m_layout = *header;
        continue;
      }
    }
    try {
      out = parse_record(view, m_conv, m_line_no, m_layout);
    } catch (const ParseError&) {
      ++m_stats.malformed_rows;
      if (m_options.on_error == ErrorPolicy::raise) throw;
      continue;
    }
    ++m_stats.rows;
    return true;
  }
  return false;
}

std::optional<Fragment> FragmentReader::next() {
  while (true) {
    Fragment fragment;
    TrajectorySample sample;
    if (m_pending) {
      sample = std::move(*m_pending);
      m_pending.reset();
    } else if (!read_sample(sample)) {
      return std::nullopt;
    }
    fragment.vehicle_id = std::move(sample.vehicle_id);
    fragment.lane = sample.lane;
    fragment.points.push_back({sample.t, sample.x});

    while (read_sample(sample)) {
      if (sample.vehicle_id != fragment.vehicle_id || sample.lane != fragment.lane) {
        m_pending = std::move(sample);
        break;
      }
      const double last_t = fragment.points.back().t;
      if (sample.t == last_t) {
        ++m_stats.duplicate_timestamps;
      } else if (sample.t < last_t) {
        ++m_stats.decreasing_timestamps;
      } else {
        fragment.points.push_back({sample.t, sample.x});
      }
    }

    if (m_options.lanes && !m_options.lanes->contains(fragment.lane)) {
      ++m_stats.filtered_fragments;
      continue;
    }
    ++m_stats.fragments;
    return fragment;
  }
}

std::vector<Fragment> read_fragments(std::istream& in, const UnitConvention& conv, ReaderOptions options) {
  FragmentReader reader(in, conv, std::move(options));
  std::vector<Fragment> out;
  while (auto f = reader.next()) out.push_back(std::move(*f));
  return out;
}

void write_fragment_rows(std::ostream& out, const Fragment& fragment, const UnitConvention& conv) {
  std::string row;
  for (const auto& p : fragment.points) {
    row.clear();
    row += fragment.vehicle_id;
    row += ',';
    append_number(row, p.t);
    row += ',';
    append_number(row, from_forward_meters(p.x, conv));
    row += ',';
    row += std::to_string(fragment.lane);
    row += '\n';
    out << row;
  }
}

void write_fragments_csv(std::ostream& out, const std::vector<Fragment>& fragments,
                         const UnitConvention& conv, bool header) {
  if (header) out << kTrajectoryHeader << '\n';
  for (const auto& f : fragments) write_fragment_rows(out, f, conv);
}

namespace {

std::string_view first_field(std::string_view line) {
  line = trim(line);
  if (!line.empty() && line.front() == '{') {
    // JSON rows: good enough to compare the raw id token.
    const auto key = line.find("\"vehicle_id\"");
    if (key == std::string_view::npos) return line;
    const auto colon = line.find(':', key);
    const auto end = line.find_first_of(",}", colon);
    return trim(line.substr(colon + 1, end - colon - 1));
  }
  return unquote(line.substr(0, line.find(',')));
}

}  // namespace

std::vector<ShardRange> plan_shards(const std::filesystem::path& file, int shards) {
  const std::uint64_t size = std::filesystem::file_size(file);
  if (shards < 1) shards = 1;
  std::ifstream in(file, std::ios::binary);
  if (!in) throw DataError("cannot open " + file.string());

  std::vector<std::uint64_t> cuts{0};
  std::string line;
  for (int k = 1; k < shards; ++k) {
    const std::uint64_t target = size * static_cast<std::uint64_t>(k) / static_cast<std::uint64_t>(shards);
    if (target <= cuts.back()) continue;
    in.clear();
    in.seekg(static_cast<std::streamoff>(target));
    // Align to the start of the next full line.
    if (!std::getline(in, line)) break;
    std::uint64_t pos = target + line.size() + 1;
    if (!std::getline(in, line)) break;
    const std::string previous_id{first_field(line)};
    pos += line.size() + 1;
    std::uint64_t cut = size;
    while (std::getline(in, line)) {
      if (first_field(line) != previous_id) {
        cut = pos;
        break;
      }
      pos += line.size() + 1;
    }
    if (cut >= size) break;
    if (cut > cuts.back()) cuts.push_back(cut);
  }
  cuts.push_back(size);

  std::vector<ShardRange> out;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) out.push_back({cuts[i], cuts[i + 1]});
  return out;
}

}  // namespace vtraj
