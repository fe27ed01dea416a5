#pragma once

#include <vector>

#include <Eigen/Dense>

namespace amfg {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Time-indexed sequences. Index i always means time step i.
using MatrixSeq = std::vector<Matrix>;
using VectorSeq = std::vector<Vector>;

}  // namespace amfg
