#include "zoncf/harness/plot.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include "zoncf/harness/experiment.h"

namespace zoncf::harness {
namespace {

std::vector<std::string_view> SplitComma(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(',', start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) return out;
    start = pos + 1;
  }
}

template <typename T>
T ParseField(std::string_view s, const std::string& where) {
  T v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw std::runtime_error(where + ": bad field '" + std::string(s) + "'");
  }
  return v;
}

double Quantile(std::vector<double>& v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

std::string Fmt(const char* fmt, double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

std::string Escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                "#9467bd", "#8c564b", "#e377c2", "#17becf"};

struct Axis {
  double lo = 0.0;
  double hi = 1.0;
  bool log = false;

  void Fit() {
    if (!(hi > lo)) {
      const double pad = log ? 0.5 : std::max(1.0, std::abs(lo)) * 0.5;
      lo -= pad;
      hi += pad;
    }
  }
  double Frac(double v) const { return (v - lo) / (hi - lo); }

  std::vector<double> Ticks() const {
    std::vector<double> t;
    if (log) {
      for (double e = std::ceil(lo); e <= hi + 1e-9; e += 1.0) t.push_back(e);
      if (t.size() >= 2) return t;
      t.clear();
    }
    for (int i = 0; i <= 4; ++i) t.push_back(lo + (hi - lo) * i / 4.0);
    return t;
  }
  std::string Label(double v) const {
    if (log) return Fmt("%g", std::pow(10.0, v));
    return Fmt("%.4g", v);
  }
};

}  // namespace

TrajectoryFile ParseTrajectoryCsv(std::string_view text, const std::string& source) {
  TrajectoryFile file;
  std::size_t line_no = 0;
  bool first = true;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (first) {
      if (line != kTrajectoryHeader) {
        throw std::runtime_error(source + ": header '" + std::string(line) + "' is not '" +
                                 kTrajectoryHeader + "'");
      }
      first = false;
      continue;
    }
    if (line.empty()) continue;
    const std::string where = source + ":" + std::to_string(line_no);
    const auto f = SplitComma(line);
    if (f.size() != 6) throw std::runtime_error(where + ": expected 6 fields");
    const auto seed = ParseField<std::uint64_t>(f[0], where);
    TrajectoryRecord r;
    r.queries = ParseField<std::uint64_t>(f[2], where);
    r.f = ParseField<double>(f[3], where);
    const auto ev = ParseEvent(std::string(f[4]));
    if (!ev) throw std::runtime_error(where + ": unknown event '" + std::string(f[4]) + "'");
    r.event = *ev;
    r.ms = ParseField<double>(f[5], where);
    if (file.records.empty()) {
      file.seed = seed;
      file.algorithm = std::string(f[1]);
    } else if (seed != file.seed || f[1] != file.algorithm) {
      throw std::runtime_error(where + ": rows mix seeds or algorithms");
    } else if (r.queries < file.records.back().queries) {
      throw std::runtime_error(where + ": query counts decrease");
    }
    file.records.push_back(r);
  }
  if (first) throw std::runtime_error(source + ": empty file");
  return file;
}

TrajectoryFile ReadTrajectoryCsv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return ParseTrajectoryCsv(os.str(), path.string());
}

std::vector<SeriesSummary> SummarizeSeries(const std::vector<TrajectoryFile>& files,
                                           std::size_t max_points) {
  std::vector<std::string> order;
  std::map<std::string, std::vector<const TrajectoryFile*>> groups;
  for (const auto& f : files) {
    if (f.records.empty()) continue;
    if (!groups.count(f.algorithm)) order.push_back(f.algorithm);
    groups[f.algorithm].push_back(&f);
  }
  std::vector<SeriesSummary> out;
  for (const auto& label : order) {
    const auto& runs = groups[label];
    std::vector<std::uint64_t> grid;
    for (const auto* run : runs) {
      for (const auto& r : run->records) grid.push_back(r.queries);
    }
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    if (max_points >= 2 && grid.size() > max_points) {
      std::vector<std::uint64_t> thin;
      for (std::size_t i = 0; i < max_points; ++i) {
        thin.push_back(grid[i * (grid.size() - 1) / (max_points - 1)]);
      }
      thin.erase(std::unique(thin.begin(), thin.end()), thin.end());
      grid = std::move(thin);
    }

    SeriesSummary s;
    s.label = label;
    s.runs = runs.size();
    std::vector<double> values(runs.size());
    for (const auto q : grid) {
      for (std::size_t k = 0; k < runs.size(); ++k) {
        const auto& recs = runs[k]->records;
        auto it = std::upper_bound(recs.begin(), recs.end(), q,
                                   [](std::uint64_t v, const TrajectoryRecord& r) {
                                     return v < r.queries;
                                   });
        values[k] = it == recs.begin() ? recs.front().f : std::prev(it)->f;
      }
      s.queries.push_back(static_cast<double>(q));
      s.median.push_back(Quantile(values, 0.5));
      s.q25.push_back(Quantile(values, 0.25));
      s.q75.push_back(Quantile(values, 0.75));
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::string RenderSvg(const std::vector<SeriesSummary>& series, const PlotOptions& options) {
  const double left = 80, right = 190, top = 40, bottom = 60;
  const double w = options.width, h = options.height;
  const double pw = w - left - right, ph = h - top - bottom;

  double f_ref = std::numeric_limits<double>::infinity();
  double f_max = -std::numeric_limits<double>::infinity();
  for (const auto& s : series) {
    for (double v : s.q25) f_ref = std::min(f_ref, v);
    for (double v : s.q75) f_max = std::max(f_max, v);
  }
  if (options.f_ref) f_ref = *options.f_ref;
  const double floor_gap =
      std::max(1e-300, 1e-9 * std::max(std::abs(f_max - f_ref), std::abs(f_ref)));

  auto tx = [&](double q) { return options.log_x ? std::log10(std::max(q, 1.0)) : q; };
  auto ty = [&](double f) {
    return options.log_y ? std::log10(std::max(f - f_ref, floor_gap)) : f;
  };

  Axis ax{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
          options.log_x};
  Axis ay{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
          options.log_y};
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.queries.size(); ++i) {
      ax.lo = std::min(ax.lo, tx(s.queries[i]));
      ax.hi = std::max(ax.hi, tx(s.queries[i]));
      for (double v : {s.q25[i], s.median[i], s.q75[i]}) {
        ay.lo = std::min(ay.lo, ty(v));
        ay.hi = std::max(ay.hi, ty(v));
      }
    }
  }
  if (!std::isfinite(ax.lo)) ax = {0.0, 1.0, options.log_x};
  if (!std::isfinite(ay.lo)) ay = {0.0, 1.0, options.log_y};
  ax.Fit();
  ay.Fit();

  auto px = [&](double q) { return left + ax.Frac(tx(q)) * pw; };
  auto py = [&](double f) { return top + (1.0 - ay.Frac(ty(f))) * ph; };
  auto pt = [&](double q, double f) { return Fmt("%.2f", px(q)) + "," + Fmt("%.2f", py(f)); };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << options.width
     << "\" height=\"" << options.height << "\" viewBox=\"0 0 " << options.width << ' '
     << options.height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!options.title.empty()) {
    os << "<text x=\"" << Fmt("%.2f", left + pw / 2) << "\" y=\"24\" text-anchor=\"middle\" "
       << "font-size=\"15\">" << Escape(options.title) << "</text>\n";
  }
  os << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << Fmt("%.2f", pw)
     << "\" height=\"" << Fmt("%.2f", ph) << "\" fill=\"none\" stroke=\"#444\"/>\n";

  for (double t : ax.Ticks()) {
    const double x = left + ax.Frac(t) * pw;
    os << "<line x1=\"" << Fmt("%.2f", x) << "\" y1=\"" << top + ph << "\" x2=\""
       << Fmt("%.2f", x) << "\" y2=\"" << top + ph + 5 << "\" stroke=\"#444\"/>\n";
    os << "<text x=\"" << Fmt("%.2f", x) << "\" y=\"" << top + ph + 18
       << "\" text-anchor=\"middle\">" << ax.Label(t) << "</text>\n";
  }
  for (double t : ay.Ticks()) {
    const double y = top + (1.0 - ay.Frac(t)) * ph;
    os << "<line x1=\"" << left - 5 << "\" y1=\"" << Fmt("%.2f", y) << "\" x2=\"" << left
       << "\" y2=\"" << Fmt("%.2f", y) << "\" stroke=\"#444\"/>\n";
    os << "<text x=\"" << left - 8 << "\" y=\"" << Fmt("%.2f", y + 4)
       << "\" text-anchor=\"end\">" << ay.Label(t) << "</text>\n";
  }
  os << "<text x=\"" << Fmt("%.2f", left + pw / 2) << "\" y=\"" << h - 15
     << "\" text-anchor=\"middle\">function queries</text>\n";
  const std::string ylabel =
      options.log_y ? "f - " + Fmt("%.6g", f_ref) + " (median, IQR)" : "f (median, IQR)";
  os << "<text transform=\"translate(18," << Fmt("%.2f", top + ph / 2)
     << ") rotate(-90)\" text-anchor=\"middle\">" << Escape(ylabel) << "</text>\n";

  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* color = kPalette[k % std::size(kPalette)];
    if (s.runs > 1 && !s.queries.empty()) {
      os << "<polygon fill=\"" << color << "\" fill-opacity=\"0.18\" stroke=\"none\" points=\"";
      for (std::size_t i = 0; i < s.queries.size(); ++i) {
        os << (i ? " " : "") << pt(s.queries[i], s.q75[i]);
      }
      for (std::size_t i = s.queries.size(); i-- > 0;) os << ' ' << pt(s.queries[i], s.q25[i]);
      os << "\"/>\n";
    }
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.8\" points=\"";
    for (std::size_t i = 0; i < s.queries.size(); ++i) {
      os << (i ? " " : "") << pt(s.queries[i], s.median[i]);
    }
    os << "\"/>\n";
    const double ly = top + 14 + 18.0 * static_cast<double>(k);
    const double lx = left + pw + 12;
    os << "<line x1=\"" << Fmt("%.2f", lx) << "\" y1=\"" << Fmt("%.2f", ly) << "\" x2=\""
       << Fmt("%.2f", lx + 22) << "\" y2=\"" << Fmt("%.2f", ly) << "\" stroke=\"" << color
       << "\" stroke-width=\"2.5\"/>\n";
    os << "<text x=\"" << Fmt("%.2f", lx + 28) << "\" y=\"" << Fmt("%.2f", ly + 4) << "\">"
       << Escape(s.label) << " (n=" << s.runs << ")</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::filesystem::path PlotDirectory(const std::filesystem::path& dir, const PlotOptions& options) {
  std::vector<std::filesystem::path> paths;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".csv") continue;
    if (entry.path().filename() == "summary.csv") continue;
    paths.push_back(entry.path());
  }
  if (paths.empty()) throw std::runtime_error("no trajectory CSVs in '" + dir.string() + "'");
  std::sort(paths.begin(), paths.end());
  std::vector<TrajectoryFile> files;
  for (const auto& p : paths) files.push_back(ReadTrajectoryCsv(p));
  const auto out = dir / "plot.svg";
  WriteFileAtomic(out, RenderSvg(SummarizeSeries(files), options));
  return out;
}

}  // namespace zoncf::harness
