#include "gsr/design.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace gsr {

namespace {

bool is_contiguous(const IndexList& cols) {
  for (std::size_t k = 1; k < cols.size(); ++k)
    if (cols[k] != cols[k - 1] + 1) return false;
  return !cols.empty();
}

}  // namespace

Vec DenseDesign::apply(const Vec& x) const {
  if (x.size() != a_.cols())
    throw std::invalid_argument("DenseDesign::apply: dimension mismatch");
  return a_ * x;
}

Vec DenseDesign::apply_transpose(const Vec& y) const {
  if (y.size() != a_.rows())
    throw std::invalid_argument(
        "DenseDesign::apply_transpose: dimension mismatch");
  return a_.transpose() * y;
}

void DenseDesign::add_apply_columns(const IndexList& cols, const Vec& u,
                                    Vec& out) const {
  if (is_contiguous(cols)) {
    out.noalias() += a_.middleCols(cols.front(), cols.size()) * u;
    return;
  }
  for (std::size_t k = 0; k < cols.size(); ++k) out += u[k] * a_.col(cols[k]);
}

Vec DenseDesign::apply_transpose_columns(const IndexList& cols,
                                         const Vec& y) const {
  if (is_contiguous(cols))
    return a_.middleCols(cols.front(), cols.size()).transpose() * y;
  Vec out(cols.size());
  for (std::size_t k = 0; k < cols.size(); ++k) out[k] = a_.col(cols[k]).dot(y);
  return out;
}

double spectral_norm(const DesignOperator& a, double rel_tol, int max_iter) {
  const Index p = a.cols();
  if (p == 0 || a.rows() == 0) return 0.0;
  // Fixed seed: the estimate must not depend on global state.
  std::mt19937_64 gen(0x5eed5eedULL);
  Vec v(p);
  for (Index j = 0; j < p; ++j)
    v[j] = 1.0 + static_cast<double>(gen() >> 11) * 0x1.0p-53;
  v.normalize();
  double eig = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    Vec w = a.apply_transpose(a.apply(v));
    eig = v.dot(w);
    if (eig <= 0.0) {
      const double wn = w.norm();
      if (wn == 0.0) return 0.0;
      v = w / wn;
      continue;
    }
    const double resid = (w - eig * v).norm();
    if (resid <= rel_tol * eig) break;
    v = w / w.norm();
  }
  return std::sqrt(std::max(eig, 0.0));
}

}  // namespace gsr
