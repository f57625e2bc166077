#include "vtraj/field_io.hpp"

#include <fstream>
#include <sstream>

#include "vtraj/errors.hpp"
#include "vtraj/format.hpp"

namespace vtraj {

namespace {

std::string header_line(const GridSpec& g, const std::string& kind) {
  std::string h = "# t0=";
  append_number(h, g.t0);
  h += " dt=";
  append_number(h, g.dt);
  h += " nt=" + std::to_string(g.nt);
  h += " x0=";
  append_number(h, g.x0);
  h += " dx=";
  append_number(h, g.dx);
  h += " nx=" + std::to_string(g.nx);
  h += " cwave=";
  append_number(h, g.cwave);
  h += " kind=" + kind;
  return h;
}

[[noreturn]] void fail(const std::string& source, std::size_t line, const std::string& what) {
  throw DataError(source + ":" + std::to_string(line) + ": " + what);
}

void parse_header(const std::string& line, FieldFile& f, const std::string& source) {
  static constexpr const char* keys[] = {"t0", "dt", "nt", "x0", "dx", "nx", "cwave", "kind"};
  std::istringstream ss(line.substr(1));
  std::string token;
  int k = 0;
  while (ss >> token) {
    if (k >= 8) fail(source, 1, "unexpected header token '" + token + "'");
    const auto eq = token.find('=');
    if (eq == std::string::npos || token.substr(0, eq) != keys[k])
      fail(source, 1, std::string("expected key '") + keys[k] + "' in header");
    const std::string value = token.substr(eq + 1);
    if (k == 7) {
      f.kind = value;
    } else {
      double v = 0.0;
      if (!parse_number(value, v) || !std::isfinite(v)) fail(source, 1, "bad value for " + std::string(keys[k]));
      switch (k) {
        case 0: f.grid.t0 = v; break;
        case 1: f.grid.dt = v; break;
        case 2: f.grid.nt = static_cast<Eigen::Index>(v); break;
        case 3: f.grid.x0 = v; break;
        case 4: f.grid.dx = v; break;
        case 5: f.grid.nx = static_cast<Eigen::Index>(v); break;
        case 6: f.grid.cwave = v; break;
      }
    }
    ++k;
  }
  if (k != 8) fail(source, 1, "incomplete field header");
  try {
    f.grid.validate();
  } catch (const ConfigError& e) {
    fail(source, 1, e.what());
  }
}

}  // namespace

void write_field(std::ostream& out, const FieldFile& field) {
  out << header_line(field.grid, field.kind) << '\n';
  for (const auto& note : field.notes) out << "# " << note << '\n';
  std::string row;
  for (Eigen::Index i = 0; i < field.values.rows(); ++i) {
    row.clear();
    for (Eigen::Index j = 0; j < field.values.cols(); ++j) {
      if (j) row += ',';
      append_number(row, field.values(i, j));
    }
    row += '\n';
    out << row;
  }
}

void write_field(const std::filesystem::path& path, const FieldFile& field) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  write_field(out, field);
  if (!out) throw DataError("write failed: " + path.string());
}

FieldFile read_field(std::istream& in, const std::string& source) {
  FieldFile f;
  std::string line;
  if (!std::getline(in, line) || line.empty() || line[0] != '#') fail(source, 1, "missing field header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  parse_header(line, f, source);

  f.values.resize(f.grid.nt, f.grid.nx);
  std::size_t line_no = 1;
  Eigen::Index row = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (row > 0) fail(source, line_no, "comment after data rows");
      f.notes.push_back(line.size() > 2 ? line.substr(2) : std::string{});
      continue;
    }
    if (row >= f.grid.nt) fail(source, line_no, "more than nt data rows");
    std::string_view view(line);
    Eigen::Index col = 0;
    while (true) {
      const auto comma = view.find(',');
      const auto token = view.substr(0, comma);
      if (col >= f.grid.nx) fail(source, line_no, "more than nx values");
      double v = 0.0;
      if (!parse_number(token, v)) fail(source, line_no, "malformed value '" + std::string(token) + "'");
      f.values(row, col++) = v;
      if (comma == std::string_view::npos) break;
      view.remove_prefix(comma + 1);
    }
    if (col != f.grid.nx) fail(source, line_no, "expected " + std::to_string(f.grid.nx) + " values");
    ++row;
  }
  if (row != f.grid.nt) fail(source, line_no, "expected " + std::to_string(f.grid.nt) + " data rows");
  return f;
}

FieldFile read_field(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  return read_field(in, path.string());
}

GridSpec read_field_grid(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::string line;
  FieldFile f;
  if (!std::getline(in, line) || line.empty() || line[0] != '#') fail(path.string(), 1, "missing field header");
  if (line.back() == '\r') line.pop_back();
  parse_header(line, f, path.string());
  return f.grid;
}

}  // namespace vtraj
