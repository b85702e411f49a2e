#pragma once

#include <cstdint>

#include "vbsq/sun_algebra.hpp"

namespace vbsq {

// value = mantissa * 2^log2_scale with |mantissa| in [1, 2), or exactly zero.
struct ScaledComplex {
  Complex mantissa{0.0, 0.0};
  std::int64_t log2_scale = 0;

  static ScaledComplex from(Complex z);
  static ScaledComplex from_parts(Complex m, std::int64_t e);

  bool is_zero() const { return mantissa == Complex(0.0, 0.0); }
  // Ordinary complex value; underflows to zero / overflows to inf outside double range.
  Complex value() const;
  double log_abs() const;  // natural log of |value|
  double log10_abs() const;
  double arg() const { return std::arg(mantissa); }
  double abs() const;

  ScaledComplex operator*(const ScaledComplex& o) const;
  ScaledComplex operator/(const ScaledComplex& o) const;
  ScaledComplex operator+(const ScaledComplex& o) const;
  ScaledComplex operator-(const ScaledComplex& o) const;
  ScaledComplex conj() const { return from_parts(std::conj(mantissa), log2_scale); }
};

// matrix * 2^log2_scale, renormalized so the largest entry magnitude is near 1.
struct ScaledMatrix {
  Matrix mantissa;
  std::int64_t log2_scale = 0;

  static ScaledMatrix from(const Matrix& m);
  static ScaledMatrix identity(Eigen::Index dim);

  void renormalize();
  ScaledMatrix operator*(const ScaledMatrix& o) const;
  ScaledMatrix operator*(const Matrix& o) const;
  ScaledComplex trace() const;
  Matrix value() const;
};

ScaledMatrix operator*(const Matrix& a, const ScaledMatrix& b);

// m^p by binary powering, renormalizing after every multiply.
ScaledMatrix scaled_power(const Matrix& m, std::int64_t p);
ScaledMatrix scaled_power(const ScaledMatrix& m, std::int64_t p);

}  // namespace vbsq
