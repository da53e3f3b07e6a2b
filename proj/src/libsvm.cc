#include "zoncf/libsvm.h"

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

namespace zoncf {
namespace {

double ParseNumber(const std::string& token, long line, const char* what) {
  if (token.empty()) throw LibsvmParseError(std::string("empty ") + what, line);
  errno = 0;
  char* end = nullptr;
  const double value = std::strtod(token.c_str(), &end);
  if (end != token.c_str() + token.size() || errno == ERANGE) {
    throw LibsvmParseError(std::string("bad ") + what + " '" + token + "'", line);
  }
  return value;
}

double MapLabel(double raw, long line) {
  if (raw == 1.0) return 1.0;
  if (raw == -1.0 || raw == 0.0) return 0.0;
  throw LibsvmParseError("label outside {-1, 0, +1}", line);
}

}  // namespace

LibsvmDataset ParseLibsvm(std::istream& in, std::optional<long> dimension) {
  std::vector<Eigen::Triplet<double>> entries;
  std::vector<double> labels;
  long max_index = 0;
  long line_no = 0;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    std::istringstream tokens(line);
    std::string token;
    if (!(tokens >> token)) continue;  // blank line

    const long row = static_cast<long>(labels.size());
    labels.push_back(MapLabel(ParseNumber(token, line_no, "label"), line_no));

    long previous = 0;
    while (tokens >> token) {
      const auto colon = token.find(':');
      if (colon == std::string::npos) {
        throw LibsvmParseError("expected idx:val, got '" + token + "'", line_no);
      }
      const std::string idx_text = token.substr(0, colon);
      char* end = nullptr;
      errno = 0;
      const long index = std::strtol(idx_text.c_str(), &end, 10);
      if (idx_text.empty() || end != idx_text.c_str() + idx_text.size() ||
          errno == ERANGE || index < 1) {
        throw LibsvmParseError("bad feature index '" + idx_text + "'", line_no);
      }
      if (index <= previous) {
        throw LibsvmParseError("feature indices must be strictly increasing",
                               line_no);
      }
      previous = index;
      const double value =
          ParseNumber(token.substr(colon + 1), line_no, "feature value");
      entries.emplace_back(row, index - 1, value);
      if (index > max_index) max_index = index;
    }
  }
  if (labels.empty()) throw LibsvmParseError("no data rows", 0);

  long dims = max_index;
  if (dimension) {
    if (*dimension < max_index) {
      throw LibsvmParseError("dimension override " + std::to_string(*dimension) +
                                 " smaller than max index " +
                                 std::to_string(max_index),
                             0);
    }
    dims = *dimension;
  }
  if (dims == 0) throw LibsvmParseError("no features", 0);

  LibsvmDataset data;
  data.features.resize(static_cast<long>(labels.size()), dims);
  data.features.setFromTriplets(entries.begin(), entries.end());
  data.features.makeCompressed();
  data.labels = Eigen::Map<const Eigen::VectorXd>(
      labels.data(), static_cast<long>(labels.size()));
  return data;
}

LibsvmDataset ParseLibsvmFile(const std::string& path,
                              std::optional<long> dimension) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset '" + path + "'");
  return ParseLibsvm(in, dimension);
}

}  // namespace zoncf
