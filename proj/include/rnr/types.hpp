#pragma once

#include <Eigen/Core>

namespace rnr {

// Embedding rows are the unit of access everywhere, so matrices are row-major.
template <typename T>
using MatrixX = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using VectorX = Eigen::Matrix<T, Eigen::Dynamic, 1>;

using Scalar = double;
using Matrix = MatrixX<Scalar>;
using Vector = VectorX<Scalar>;

}  // namespace rnr
