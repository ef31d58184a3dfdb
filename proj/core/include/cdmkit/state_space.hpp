#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

namespace cdmkit {

/// Continuous-time linear system
///   x' = A x + B u,   y = C x + D u.
struct StateSpace {
  Eigen::MatrixXd A;
  Eigen::MatrixXd B;
  Eigen::MatrixXd C;
  Eigen::MatrixXd D;
  std::vector<std::string> state_labels;
  std::vector<std::string> input_labels;
  std::vector<std::string> output_labels;

  Eigen::Index states() const { return A.rows(); }
  Eigen::Index inputs() const { return B.cols(); }
  Eigen::Index outputs() const { return C.rows(); }

  /// Throws std::invalid_argument on inconsistent dimensions, label counts
  /// or non-finite entries. Empty label vectors are filled with defaults.
  void validate();

  int input_index(const std::string& label) const;   // -1 if absent
  int output_index(const std::string& label) const;  // -1 if absent
};

}  // namespace cdmkit
