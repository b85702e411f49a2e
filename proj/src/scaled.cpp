#include "vbsq/scaled.hpp"

#include <cmath>
#include <limits>

namespace vbsq {

namespace {

constexpr double kLn2 = 0.69314718055994530942;

// Exponent e such that |z| * 2^-e lies in [1, 2).
int binary_exponent(double a) {
  int e = 0;
  std::frexp(a, &e);
  return e - 1;
}

}  // namespace

ScaledComplex ScaledComplex::from_parts(Complex m, std::int64_t e) {
  ScaledComplex s;
  double a = std::max(std::abs(m.real()), std::abs(m.imag()));
  if (a == 0.0) return s;
  int shift = binary_exponent(std::abs(m));
  s.mantissa = Complex(std::ldexp(m.real(), -shift), std::ldexp(m.imag(), -shift));
  s.log2_scale = e + shift;
  // std::abs may round a mantissa just below 1 or at 2; nudge into range
  double r = std::abs(s.mantissa);
  if (r >= 2.0) {
    s.mantissa *= 0.5;
    s.log2_scale += 1;
  } else if (r < 1.0) {
    s.mantissa *= 2.0;
    s.log2_scale -= 1;
  }
  return s;
}

ScaledComplex ScaledComplex::from(Complex z) { return from_parts(z, 0); }

Complex ScaledComplex::value() const {
  if (is_zero()) return {0.0, 0.0};
  if (log2_scale > std::numeric_limits<int>::max()) return {std::numeric_limits<double>::infinity(), 0.0};
  if (log2_scale < std::numeric_limits<int>::min()) return {0.0, 0.0};
  int e = static_cast<int>(log2_scale);
  return {std::ldexp(mantissa.real(), e), std::ldexp(mantissa.imag(), e)};
}

double ScaledComplex::log_abs() const {
  if (is_zero()) return -std::numeric_limits<double>::infinity();
  return std::log(std::abs(mantissa)) + static_cast<double>(log2_scale) * kLn2;
}

double ScaledComplex::log10_abs() const { return log_abs() / std::log(10.0); }

double ScaledComplex::abs() const { return std::abs(value()); }

ScaledComplex ScaledComplex::operator*(const ScaledComplex& o) const {
  if (is_zero() || o.is_zero()) return {};
  return from_parts(mantissa * o.mantissa, log2_scale + o.log2_scale);
}

ScaledComplex ScaledComplex::operator/(const ScaledComplex& o) const {
  if (o.is_zero()) return from_parts(Complex(std::numeric_limits<double>::infinity(), 0.0), 0);
  if (is_zero()) return {};
  return from_parts(mantissa / o.mantissa, log2_scale - o.log2_scale);
}

ScaledComplex ScaledComplex::operator+(const ScaledComplex& o) const {
  if (is_zero()) return o;
  if (o.is_zero()) return *this;
  const ScaledComplex& big = log2_scale >= o.log2_scale ? *this : o;
  const ScaledComplex& small = log2_scale >= o.log2_scale ? o : *this;
  std::int64_t gap = big.log2_scale - small.log2_scale;
  if (gap > 1100) return big;
  Complex s = small.mantissa;
  s = Complex(std::ldexp(s.real(), -static_cast<int>(gap)), std::ldexp(s.imag(), -static_cast<int>(gap)));
  return from_parts(big.mantissa + s, big.log2_scale);
}

ScaledComplex ScaledComplex::operator-(const ScaledComplex& o) const {
  return *this + from_parts(-o.mantissa, o.log2_scale);
}

ScaledMatrix ScaledMatrix::from(const Matrix& m) {
  ScaledMatrix s{m, 0};
  s.renormalize();
  return s;
}

ScaledMatrix ScaledMatrix::identity(Eigen::Index dim) { return ScaledMatrix{Matrix::Identity(dim, dim), 0}; }

void ScaledMatrix::renormalize() {
  double a = mantissa.cwiseAbs().maxCoeff();
  if (a == 0.0 || !std::isfinite(a)) return;
  int shift = binary_exponent(a);
  if (shift == 0) return;
  // power-of-two scaling is exact
  mantissa *= std::ldexp(1.0, -shift);
  log2_scale += shift;
}

ScaledMatrix ScaledMatrix::operator*(const ScaledMatrix& o) const {
  ScaledMatrix r{mantissa * o.mantissa, log2_scale + o.log2_scale};
  r.renormalize();
  return r;
}

ScaledMatrix ScaledMatrix::operator*(const Matrix& o) const {
  ScaledMatrix r{mantissa * o, log2_scale};
  r.renormalize();
  return r;
}

ScaledMatrix operator*(const Matrix& a, const ScaledMatrix& b) {
  ScaledMatrix r{a * b.mantissa, b.log2_scale};
  r.renormalize();
  return r;
}

ScaledComplex ScaledMatrix::trace() const { return ScaledComplex::from_parts(mantissa.trace(), log2_scale); }

Matrix ScaledMatrix::value() const {
  if (log2_scale < std::numeric_limits<int>::min() / 2) return Matrix::Zero(mantissa.rows(), mantissa.cols());
  return mantissa * std::ldexp(1.0, static_cast<int>(log2_scale));
}

ScaledMatrix scaled_power(const ScaledMatrix& m, std::int64_t p) {
  ScaledMatrix result = ScaledMatrix::identity(m.mantissa.rows());
  ScaledMatrix base = m;
  bool first = true;
  while (p > 0) {
    if (p & 1) {
      result = first ? base : result * base;
      first = false;
    }
    p >>= 1;
    if (p > 0) base = base * base;
  }
  return result;
}

ScaledMatrix scaled_power(const Matrix& m, std::int64_t p) { return scaled_power(ScaledMatrix::from(m), p); }

}  // namespace vbsq
