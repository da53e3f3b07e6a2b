#ifndef ZONCF_LIBSVM_H_
#define ZONCF_LIBSVM_H_

#include <istream>
#include <optional>
#include <stdexcept>
#include <string>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace zoncf {

// Binary classification data read from LIBSVM sparse text. Feature indices
// are 1-based in the file and 0-based here; labels are mapped to {0, 1}.
struct LibsvmDataset {
  Eigen::SparseMatrix<double, Eigen::RowMajor> features;  // rows × dims
  Eigen::VectorXd labels;

  long rows() const { return features.rows(); }
  long dims() const { return features.cols(); }
};

class LibsvmParseError : public std::runtime_error {
 public:
  LibsvmParseError(const std::string& what, long line)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what
                                    : what),
        line_(line) {}
  long line() const { return line_; }

 private:
  long line_;
};

// `dimension` overrides the feature count (must cover every index seen).
LibsvmDataset ParseLibsvm(std::istream& in,
                          std::optional<long> dimension = std::nullopt);
LibsvmDataset ParseLibsvmFile(const std::string& path,
                              std::optional<long> dimension = std::nullopt);

}  // namespace zoncf

#endif  // ZONCF_LIBSVM_H_
