#pragma once

#include <Eigen/Dense>

namespace vlogcues {

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using VectorXd = VectorX<double>;
using MatrixXd = MatrixX<double>;

using Index = Eigen::Index;

}  // namespace vlogcues
