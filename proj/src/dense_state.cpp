#include "vbsq/dense_state.hpp"

#include <cmath>
#include <stdexcept>

namespace vbsq {

namespace {

void dfs(const std::vector<std::vector<Matrix>>& tensors, size_t site, const Matrix& prefix, Eigen::Index index,
         Vector& out) {
  const auto& t = tensors[site];
  Eigen::Index d = static_cast<Eigen::Index>(t.size());
  if (site + 1 == tensors.size()) {
    for (Eigen::Index i = 0; i < d; ++i) out(index * d + i) = prefix.cwiseProduct(t[i].transpose()).sum();
    return;
  }
  for (Eigen::Index i = 0; i < d; ++i) dfs(tensors, site + 1, prefix * t[i], index * d + i, out);
}

}  // namespace

Vector dense_mps(const std::vector<std::vector<Matrix>>& tensors) {
  if (tensors.empty()) throw std::invalid_argument("dense_mps: no sites");
  double size = 1.0;
  for (const auto& t : tensors) size *= static_cast<double>(t.size());
  if (size > kDenseCap) throw std::invalid_argument("dense_mps: state exceeds the dense cap");
  Vector out(static_cast<Eigen::Index>(size));
  Eigen::Index n = tensors[0][0].rows();
  dfs(tensors, 0, Matrix::Identity(n, n), 0, out);
  return out;
}

DenseState dense_state_oracle(const SunBasis& basis, int l, Chirality c) {
  if (l < 1) throw std::invalid_argument("dense_state_oracle: l must be >= 1");
  int d = basis.dim();
  if (std::pow(static_cast<double>(d), l) > kDenseCap)
    throw std::invalid_argument("dense_state_oracle: (N^2-1)^L exceeds 1e7");
  std::vector<std::vector<Matrix>> tensors(l, site_tensors(basis, c));
  DenseState s;
  s.n = basis.n;
  s.l = l;
  double n2 = static_cast<double>(basis.n) * basis.n;
  double theta = std::pow(n2 / (n2 - 1.0), 0.5 * l);
  s.amplitudes = theta * dense_mps(tensors);
  s.theta_norm = s.amplitudes.norm();
  s.amplitudes /= s.theta_norm;
  return s;
}

Vector apply_site(const Vector& psi, int d, int l, int site, const Matrix& op) {
  if (site < 1 || site > l) throw std::invalid_argument("apply_site: site out of range");
  Eigen::Index stride = 1;
  for (int s = site; s < l; ++s) stride *= d;
  Eigen::Index block = stride * d;
  Vector out = Vector::Zero(psi.size());
  for (Eigen::Index base = 0; base < psi.size(); base += block) {
    for (Eigen::Index r = 0; r < stride; ++r) {
      for (int a = 0; a < d; ++a) {
        Complex acc(0.0, 0.0);
        for (int b = 0; b < d; ++b) acc += op(a, b) * psi(base + b * stride + r);
        out(base + a * stride + r) = acc;
      }
    }
  }
  return out;
}

Vector apply_two_site(const Vector& psi, int d, int l, int site, const TwoSiteOperator& op) {
  int next = site % l + 1;
  Vector out = Vector::Zero(psi.size());
  for (const auto& [a, b] : op) out += apply_site(apply_site(psi, d, l, next, b), d, l, site, a);
  return out;
}

}  // namespace vbsq
