#pragma once

#include <complex>

#include <Eigen/Dense>

namespace sl4 {

using cplx = std::complex<double>;

using Vec2c = Eigen::Matrix<cplx, 2, 1>;
using Vec4c = Eigen::Matrix<cplx, 4, 1>;
using Mat2c = Eigen::Matrix<cplx, 2, 2>;
using Mat4c = Eigen::Matrix<cplx, 4, 4>;
using Mat42c = Eigen::Matrix<cplx, 4, 2>;
using Mat2d = Eigen::Matrix2d;
using Vec2d = Eigen::Vector2d;

enum class Side { Left, Right };

inline const char* side_name(Side s) { return s == Side::Left ? "left" : "right"; }

}  // namespace sl4
