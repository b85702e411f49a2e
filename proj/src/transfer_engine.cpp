#include "vbsq/transfer_engine.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vbsq {

std::vector<Matrix> site_tensors(const SunBasis& basis, Chirality c) {
  double s = std::sqrt(2.0 / basis.n);
  std::vector<Matrix> out;
  out.reserve(basis.generators.size());
  for (const auto& t : basis.generators) out.push_back(c == Chirality::L ? Matrix(s * t) : Matrix(s * t.conjugate()));
  return out;
}

std::vector<Matrix> apply_physical(const std::vector<Matrix>& tensors, const Matrix& op) {
  int d = static_cast<int>(tensors.size());
  if (op.rows() != d || op.cols() != d) throw std::invalid_argument("phys_op has wrong dimension");
  std::vector<Matrix> out(d, Matrix::Zero(tensors[0].rows(), tensors[0].cols()));
  for (int j = 0; j < d; ++j)
    for (int i = 0; i < d; ++i)
      if (op(j, i) != Complex(0.0, 0.0)) out[j] += op(j, i) * tensors[i];
  return out;
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Matrix factor_from_tensors(const std::vector<Matrix>& ket, const std::vector<Matrix>& bra) {
  if (ket.size() != bra.size() || ket.empty()) throw std::invalid_argument("factor_from_tensors: size mismatch");
  Eigen::Index n = ket[0].rows();
  Matrix out = Matrix::Zero(n * n, n * n);
  for (size_t a = 0; a < ket.size(); ++a) {
    Matrix cb = bra[a].conjugate();
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) {
        Complex k = ket[a](i, j);
        if (k != Complex(0.0, 0.0)) out.block(i * n, j * n, n, n) += k * cb;
      }
  }
  return out;
}

TransferFactor transfer_factor(const SunBasis& basis, const FactorSpec& spec) {
  int n = basis.n;
  auto check = [n](const std::optional<Matrix>& v, const char* name) {
    if (v && (v->rows() != n || v->cols() != n)) throw std::invalid_argument(std::string(name) + " must be N x N");
  };
  check(spec.virt_left, "virt_left");
  check(spec.virt_right, "virt_right");
  std::vector<Matrix> ket = site_tensors(basis, spec.ket);
  if (spec.virt_left || spec.virt_right) {
    for (auto& a : ket) {
      if (spec.virt_left) a = *spec.virt_left * a;
      if (spec.virt_right) a = a * *spec.virt_right;
    }
  }
  if (spec.phys_op) ket = apply_physical(ket, *spec.phys_op);
  return {factor_from_tensors(ket, site_tensors(basis, spec.bra)), spec};
}

Matrix plain_factor(const SunBasis& basis, Chirality bra, Chirality ket) {
  return factor_from_tensors(site_tensors(basis, ket), site_tensors(basis, bra));
}

ScaledComplex chain_trace(const std::vector<Matrix>& factors) {
  if (factors.empty()) throw std::invalid_argument("chain_trace: empty factor list");
  ScaledMatrix acc = ScaledMatrix::from(factors[0]);
  for (size_t i = 1; i < factors.size(); ++i) acc = acc * factors[i];
  return acc.trace();
}

ScaledComplex chain_trace(const std::vector<TransferFactor>& factors) {
  std::vector<Matrix> m;
  m.reserve(factors.size());
  for (const auto& f : factors) m.push_back(f.matrix);
  return chain_trace(m);
}

Overlap make_overlap(const ScaledComplex& ratio) {
  Overlap o;
  o.scaled = ratio;
  o.log_abs = ratio.log_abs();
  o.phase = ratio.arg();
  o.representable = ratio.is_zero() || (ratio.log2_scale > -1070 && ratio.log2_scale < 1020);
  o.value = ratio.value();
  return o;
}

Overlap normalized_overlap(const SunBasis& basis, const std::vector<TransferFactor>& factors, int l) {
  if (static_cast<int>(factors.size()) != l) throw std::invalid_argument("normalized_overlap: list length differs from l");
  Matrix m = plain_factor(basis, Chirality::L, Chirality::L);
  std::vector<Matrix> plain(l, m);
  return make_overlap(chain_trace(factors) / chain_trace(plain));
}

RingContractor::RingContractor(Matrix background, int l) : background_(std::move(background)), l_(l) {
  if (l < 1) throw std::invalid_argument("RingContractor: l must be >= 1");
  powers_.reserve(l + 1);
  powers_.push_back(ScaledMatrix::identity(background_.rows()));
  powers_.push_back(ScaledMatrix::from(background_));
  for (int g = 2; g <= l; ++g) powers_.push_back(powers_.back() * background_);
}

ScaledComplex RingContractor::trace(std::vector<std::pair<int, Matrix>> insertions) const {
  std::vector<Insertion> spans;
  spans.reserve(insertions.size());
  for (auto& [site, m] : insertions) spans.push_back({site, std::move(m), 1});
  return trace_spans(std::move(spans));
}

ScaledComplex RingContractor::trace_spans(std::vector<Insertion> insertions) const {
  if (insertions.empty()) return background_trace();
  std::sort(insertions.begin(), insertions.end(), [](const auto& a, const auto& b) { return a.site < b.site; });
  for (size_t i = 0; i < insertions.size(); ++i) {
    const Insertion& x = insertions[i];
    if (x.width < 1 || x.site < 1 || x.site + x.width - 1 > l_)
      throw std::invalid_argument("RingContractor: insertion out of range");
    if (i > 0 && insertions[i - 1].site + insertions[i - 1].width > x.site)
      throw std::invalid_argument("RingContractor: overlapping insertions");
  }
  // rotate so the ring starts at the first insertion
  ScaledMatrix acc = ScaledMatrix::from(insertions[0].factor);
  for (size_t i = 1; i < insertions.size(); ++i) {
    int gap = insertions[i].site - (insertions[i - 1].site + insertions[i - 1].width);
    if (gap > 0) acc = acc * powers_[gap];
    acc = acc * insertions[i].factor;
  }
  const Insertion& last = insertions.back();
  int tail = l_ - (last.site + last.width - 1) + insertions.front().site - 1;
  if (tail > 0) acc = acc * powers_[tail];
  return acc.trace();
}

}  // namespace vbsq
