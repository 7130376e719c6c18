#pragma once

#include <complex>

#include <Eigen/Dense>

namespace bosonperm {

using Complex = std::complex<double>;

/// Dense row-major complex square matrix; the input type of every permanent
/// routine.
using ComplexMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

}  // namespace bosonperm
