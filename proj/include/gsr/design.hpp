#pragma once

#include <memory>

#include "gsr/types.hpp"

namespace gsr {

/// Linear map x -> A x used by the solvers. Only matrix-vector products
/// are required, so large or structured designs can implement this without
/// materializing A. Column-block products serve the group-sparse Newton
/// system, which only touches the columns of groups outside their balls.
class DesignOperator {
 public:
  virtual ~DesignOperator() = default;

  virtual Index rows() const = 0;
  virtual Index cols() const = 0;

  virtual Vec apply(const Vec& x) const = 0;
  virtual Vec apply_transpose(const Vec& y) const = 0;

  /// out += A(:, cols) * u
  virtual void add_apply_columns(const IndexList& cols, const Vec& u,
                                 Vec& out) const = 0;
  /// A(:, cols)^T * y
  virtual Vec apply_transpose_columns(const IndexList& cols,
                                      const Vec& y) const = 0;
};

/// Dense column-major design.
class DenseDesign final : public DesignOperator {
 public:
  explicit DenseDesign(Mat a) : a_(std::move(a)) {}

  const Mat& matrix() const { return a_; }

  Index rows() const override { return a_.rows(); }
  Index cols() const override { return a_.cols(); }
  Vec apply(const Vec& x) const override;
  Vec apply_transpose(const Vec& y) const override;
  void add_apply_columns(const IndexList& cols, const Vec& u,
                         Vec& out) const override;
  Vec apply_transpose_columns(const IndexList& cols,
                              const Vec& y) const override;

 private:
  Mat a_;
};

using DesignPtr = std::shared_ptr<const DesignOperator>;

inline DesignPtr make_dense_design(Mat a) {
  return std::make_shared<const DenseDesign>(std::move(a));
}

/// Largest singular value of A by power iteration on A^T A. Stops when the
/// eigen-residual ||A^T A v - s^2 v|| falls below rel_tol * s^2.
double spectral_norm(const DesignOperator& a, double rel_tol = 1e-6,
                     int max_iter = 10000);

}  // namespace gsr
