#ifndef ZONCF_HARNESS_PLOT_H_
#define ZONCF_HARNESS_PLOT_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "zoncf/report.h"

namespace zoncf::harness {

struct TrajectoryFile {
  std::uint64_t seed = 0;
  std::string algorithm;
  std::vector<TrajectoryRecord> records;
};

// Throws std::runtime_error on a header other than the trajectory header, a
// malformed row, or rows mixing seeds or algorithms.
TrajectoryFile ParseTrajectoryCsv(std::string_view text, const std::string& source = "<csv>");
TrajectoryFile ReadTrajectoryCsv(const std::filesystem::path& path);

struct SeriesSummary {
  std::string label;
  std::size_t runs = 0;
  std::vector<double> queries;
  std::vector<double> median;
  std::vector<double> q25;
  std::vector<double> q75;
};

// Groups by algorithm in order of first appearance. The query grid is the
// union of the group's query counts thinned to at most max_points; each run
// holds its last value before a grid point and after it ends.
std::vector<SeriesSummary> SummarizeSeries(const std::vector<TrajectoryFile>& files,
                                           std::size_t max_points = 400);

struct PlotOptions {
  bool log_x = false;
  bool log_y = false;           // plots f − f_ref
  std::optional<double> f_ref;  // default: lowest plotted value
  std::string title;
  int width = 800;
  int height = 500;
};

std::string RenderSvg(const std::vector<SeriesSummary>& series, const PlotOptions& options);

// Reads every trajectory CSV in dir (summary.csv excluded, sorted by file
// name) and writes dir/plot.svg. Returns the written path.
std::filesystem::path PlotDirectory(const std::filesystem::path& dir, const PlotOptions& options);

}  // namespace zoncf::harness

#endif  // ZONCF_HARNESS_PLOT_H_
