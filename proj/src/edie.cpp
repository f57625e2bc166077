#include "vtraj/edie.hpp"

#include <cmath>
#include <fstream>
#include <thread>

#include "vtraj/errors.hpp"

namespace vtraj {

void GridSpec::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("grid dt must be positive");
  if (!(dx > 0.0) || !std::isfinite(dx)) throw ConfigError("grid dx must be positive");
  if (nt < 1 || nx < 1) throw ConfigError("grid must have at least one cell in each direction");
  if (!std::isfinite(t0) || !std::isfinite(x0) || !std::isfinite(cwave)) throw ConfigError("grid origin and cwave must be finite");
}

MacroField::MacroField(const GridSpec& g) : grid{g} {
  grid.validate();
  ttt = FieldArray::Zero(grid.nt, grid.nx);
  ttd = FieldArray::Zero(grid.nt, grid.nx);
}

std::vector<CellPiece> clip_segment(Fragment::Point p1, Fragment::Point p2, const GridSpec& grid) {
  std::vector<CellPiece> out;
  for_each_piece(p1, p2, grid, [&out](const CellPiece& piece) { out.push_back(piece); });
  return out;
}

EdieAccumulator::EdieAccumulator(const GridSpec& grid) : m_field{grid} {}

void EdieAccumulator::add_segment(Fragment::Point p1, Fragment::Point p2) {
  for_each_piece(p1, p2, m_field.grid, [this](const CellPiece& piece) {
    m_field.ttt(piece.cell.it, piece.cell.ix) += piece.dt_in;
    m_field.ttd(piece.cell.it, piece.cell.ix) += piece.dx_in;
  });
}

void EdieAccumulator::add(const Fragment& fragment) {
  for (std::size_t i = 1; i < fragment.points.size(); ++i) add_segment(fragment.points[i - 1], fragment.points[i]);
}

MacroField accumulate(const std::vector<Fragment>& fragments, const GridSpec& grid) {
  EdieAccumulator acc(grid);
  for (const auto& f : fragments) acc.add(f);
  return acc.take();
}

MacroField accumulate(FragmentReader& reader, const GridSpec& grid) {
  EdieAccumulator acc(grid);
  while (auto f = reader.next()) acc.add(*f);
  return acc.take();
}

void merge_into(MacroField& into, const MacroField& other) {
  if (!into.grid.same_as(other.grid)) throw DataError("cannot merge fields with different grids");
  into.ttt += other.ttt;
  into.ttd += other.ttd;
}

MacroField merge(const MacroField& a, const MacroField& b) {
  MacroField out = a;
  merge_into(out, b);
  return out;
}

namespace {

std::optional<ColumnLayout> header_layout(const std::filesystem::path& file) {
  std::ifstream in(file);
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    return parse_header(line);
  }
  return std::nullopt;
}

struct ShardResult {
  std::map<int, EdieAccumulator> lanes;
  ReaderStats stats;
  std::exception_ptr error;
};

void accumulate_shard(const std::filesystem::path& file, const UnitConvention& conv, const GridSpec& grid,
                      const std::optional<std::set<int>>& lanes, const ShardRange& range,
                      const std::optional<ColumnLayout>& layout, ShardResult& result) {
  try {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw DataError("cannot open " + file.string());
    in.seekg(static_cast<std::streamoff>(range.begin));
    ReaderOptions options;
    options.byte_limit = range.end - range.begin;
    options.lanes = lanes;
    if (range.begin > 0) options.layout = layout.value_or(ColumnLayout{});
    FragmentReader reader(in, conv, options);
    while (auto f = reader.next()) {
      auto it = result.lanes.find(f->lane);
      if (it == result.lanes.end()) it = result.lanes.emplace(f->lane, EdieAccumulator(grid)).first;
      it->second.add(*f);
    }
    result.stats = reader.stats();
  } catch (const ParseError& e) {
    result.error = std::make_exception_ptr(
        DataError(file.string() + ": " + e.what() +
                  (range.begin > 0 ? " (counted from byte offset " + std::to_string(range.begin) + ")" : "")));
  } catch (...) {
    result.error = std::current_exception();
  }
}

}  // namespace

std::map<int, MacroField> accumulate_file(const std::filesystem::path& file, const UnitConvention& conv,
                                          const GridSpec& grid, const std::optional<std::set<int>>& lanes,
                                          int jobs, ReaderStats* stats) {
  grid.validate();
  if (!std::filesystem::exists(file)) throw DataError("input file not found: " + file.string());
  const auto shards = plan_shards(file, std::max(jobs, 1));
  const auto layout = header_layout(file);

  std::vector<ShardResult> results(shards.size());
  if (shards.size() == 1) {
    accumulate_shard(file, conv, grid, lanes, shards[0], layout, results[0]);
  } else {
    std::vector<std::jthread> workers;
    for (std::size_t i = 0; i < shards.size(); ++i)
      workers.emplace_back([&, i] { accumulate_shard(file, conv, grid, lanes, shards[i], layout, results[i]); });
  }

  std::map<int, MacroField> out;
  for (auto& r : results) {
    if (r.error) std::rethrow_exception(r.error);
    for (auto& [lane, acc] : r.lanes) {
      auto it = out.find(lane);
      if (it == out.end()) out.emplace(lane, acc.take());
      else merge_into(it->second, acc.field());
    }
    if (stats) {
      stats->rows += r.stats.rows;
      stats->fragments += r.stats.fragments;
      stats->duplicate_timestamps += r.stats.duplicate_timestamps;
      stats->decreasing_timestamps += r.stats.decreasing_timestamps;
      stats->malformed_rows += r.stats.malformed_rows;
      stats->filtered_fragments += r.stats.filtered_fragments;
    }
  }
  return out;
}

RawSpeedField speed_field(const MacroField& m, double min_ttt) {
  if (!(min_ttt > 0.0)) throw ConfigError("min_ttt must be positive");
  const double area = m.grid.dx * m.grid.dt;
  const double nan = std::nan("");
  RawSpeedField out;
  out.grid = m.grid;
  out.ttt = m.ttt;
  out.v.resize(m.grid.nt, m.grid.nx);
  out.rho.resize(m.grid.nt, m.grid.nx);
  out.q.resize(m.grid.nt, m.grid.nx);
  for (Eigen::Index i = 0; i < m.grid.nt; ++i) {
    for (Eigen::Index j = 0; j < m.grid.nx; ++j) {
      const double ttt = m.ttt(i, j);
      if (ttt >= min_ttt) {
        // Reverse-rolling noise can leave a tiny negative distance.
        const double ttd = std::max(m.ttd(i, j), 0.0);
        out.rho(i, j) = ttt / area;
        out.q(i, j) = ttd / area;
        out.v(i, j) = out.q(i, j) / out.rho(i, j);
      } else {
        out.v(i, j) = out.rho(i, j) = out.q(i, j) = nan;
      }
    }
  }
  return out;
}

}  // namespace vtraj
