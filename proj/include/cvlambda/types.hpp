#pragma once

#include <complex>

#include <Eigen/Dense>

namespace cvlambda {

using cd = std::complex<double>;

inline constexpr cd kI{0.0, 1.0};

using Mat4 = Eigen::Matrix<cd, 4, 4>;
using Mat9 = Eigen::Matrix<cd, 9, 9>;
using Mat94 = Eigen::Matrix<cd, 9, 4>;
using Mat49 = Eigen::Matrix<cd, 4, 9>;
using Vec2 = Eigen::Matrix<cd, 2, 1>;

/// How the mean fields entering the fluctuation matrices depend on position.
enum class PropagationMode {
    full,    ///< closed-form Ω_c(ξ), Ω_s(ξ), rebuilt at every ξ
    stable,  ///< constant stably-transmitted fields, C and Z independent of ξ
};

}  // namespace cvlambda
