#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace dmimo {

template <typename Real>
using Complex = std::complex<Real>;

template <typename Real>
using ComplexMatrixT = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Real>
using ComplexVectorT = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;

using cdouble = std::complex<double>;
using ComplexMatrix = ComplexMatrixT<double>;
using ComplexVector = ComplexVectorT<double>;
using Point3 = Eigen::Vector3d;
using Index = Eigen::Index;
using IndexSet = std::vector<Index>;

/// M x K channel matrix, column k is the channel towards user k.
using ChannelMatrix = ComplexMatrix;
/// M x K precoding matrix, column k is w_k.
using PrecodingMatrix = ComplexMatrix;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Wraps an angle to (-pi, pi].
inline double wrap_angle(double radians) {
  double r = std::remainder(radians, kTwoPi);
  if (r <= -kPi) r += kTwoPi;
  return r;
}

}  // namespace dmimo
