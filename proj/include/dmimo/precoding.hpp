#pragma once

// Dense linear-algebra kernels behind every precoder: MRT, (regularized)
// zero-forcing and subspace orthogonalization. All functions take Eigen
// expressions and are templated on the complex scalar type.

#include <algorithm>
#include <limits>
#include <string>

#include <Eigen/Dense>

#include "dmimo/error.hpp"
#include "dmimo/types.hpp"

namespace dmimo {

/// Numerical rank with threshold eps * sigma_max * max(rows, cols).
template <typename Derived>
Index numerical_rank(const Eigen::MatrixBase<Derived>& a) {
  using Real = typename Derived::RealScalar;
  if (a.size() == 0) return 0;
  using Plain = typename Derived::PlainObject;
  const Eigen::JacobiSVD<Plain> svd(a.eval());
  const auto& sv = svd.singularValues();
  const Real tol = std::numeric_limits<Real>::epsilon() * sv(0) *
                   static_cast<Real>(std::max(a.rows(), a.cols()));
  return static_cast<Index>((sv.array() > tol).count());
}

template <typename Derived>
typename Derived::PlainObject normalize_columns(const Eigen::MatrixBase<Derived>& a) {
  typename Derived::PlainObject out = a;
  for (Index c = 0; c < out.cols(); ++c) {
    const auto n = out.col(c).norm();
    if (n == 0) fail(ErrorCode::DegenerateChannel, "cannot normalize a zero column");
    out.col(c) /= n;
  }
  return out;
}

/// h / ||h||.
template <typename Derived>
typename Derived::PlainObject mrt(const Eigen::MatrixBase<Derived>& h) {
  const auto n = h.norm();
  if (!(n > 0)) fail(ErrorCode::DegenerateChannel, "MRT of a zero channel vector");
  return h / n;
}

/// H (H^H H)^{-1} without column normalization, so that H^H W = I.
template <typename Derived>
typename Derived::PlainObject zf_unnormalized(const Eigen::MatrixBase<Derived>& h) {
  using Plain = typename Derived::PlainObject;
  if (h.cols() > h.rows() || numerical_rank(h) < h.cols()) {
    fail(ErrorCode::RankDeficiency,
         "zero-forcing needs a full column rank channel (" + std::to_string(h.rows()) +
             "x" + std::to_string(h.cols()) + "); use the regularized variant");
  }
  const Plain gram = h.adjoint() * h;
  const Plain inv = gram.ldlt().solve(Plain::Identity(h.cols(), h.cols()));
  return h * inv;
}

template <typename Derived>
typename Derived::PlainObject zf(const Eigen::MatrixBase<Derived>& h) {
  return normalize_columns(zf_unnormalized(h));
}

/// H (H^H H + alpha I)^{-1} without column normalization. alpha == 0 falls
/// back to zf_unnormalized and its rank check.
template <typename Derived>
typename Derived::PlainObject rzf_unnormalized(const Eigen::MatrixBase<Derived>& h,
                                               typename Derived::RealScalar alpha) {
  using Plain = typename Derived::PlainObject;
  if (!(alpha >= 0)) fail(ErrorCode::Domain, "RZF regularization must be >= 0");
  if (alpha == 0) return zf_unnormalized(h);
  Plain gram = h.adjoint() * h;
  gram.diagonal().array() += alpha;
  return h * gram.ldlt().solve(Plain::Identity(h.cols(), h.cols()));
}

template <typename Derived>
typename Derived::PlainObject rzf(const Eigen::MatrixBase<Derived>& h,
                                  typename Derived::RealScalar alpha) {
  return normalize_columns(rzf_unnormalized(h, alpha));
}

/// w - V (V^H V)^{-1} V^H w: removes from w its component in span(V).
/// The least-squares coefficients are obtained from an SVD of V, which is
/// algebraically the Gram-inverse form.
template <typename DerivedW, typename DerivedV>
typename DerivedW::PlainObject orthogonalize(const Eigen::MatrixBase<DerivedW>& w,
                                             const Eigen::MatrixBase<DerivedV>& v) {
  using Vec = typename DerivedW::PlainObject;
  using Mat = typename DerivedV::PlainObject;
  using Real = typename DerivedW::RealScalar;
  const Real w_norm = w.norm();
  if (!(w_norm > 0)) fail(ErrorCode::DegenerateChannel, "cannot orthogonalize a zero vector");
  if (v.rows() != w.rows()) fail(ErrorCode::Domain, "orthogonalize: dimension mismatch");
  if (v.cols() == 0) return w;

  const Eigen::JacobiSVD<Mat> svd(v.eval(), Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const Real tol = std::numeric_limits<Real>::epsilon() * sv(0) *
                   static_cast<Real>(std::max(v.rows(), v.cols()));
  const Index rank = static_cast<Index>((sv.array() > tol).count());
  if (rank < v.cols()) {
    fail(ErrorCode::RankDeficiency,
         "suppression subspace is rank deficient (rank " + std::to_string(rank) + " < " +
             std::to_string(v.cols()) + " columns in dimension " + std::to_string(v.rows()) +
             "); use the regularized variant");
  }
  const Vec coeffs = svd.solve(w.eval());
  Vec out = w - v * coeffs;
  if (out.norm() < Real(1e-12) * w_norm) {
    fail(ErrorCode::FullySuppressed, "precoding vector lies in the suppression subspace");
  }
  return out;
}

/// w - V (V^H V + alpha I)^{-1} V^H w with every column of V first scaled to
/// unit norm, so alpha is comparable across CSI and beamforming columns.
/// Zero columns carry no direction and are dropped.
template <typename DerivedW, typename DerivedV>
typename DerivedW::PlainObject orthogonalize_regularized(
    const Eigen::MatrixBase<DerivedW>& w, const Eigen::MatrixBase<DerivedV>& v,
    typename DerivedW::RealScalar alpha) {
  using Vec = typename DerivedW::PlainObject;
  using Mat = typename DerivedV::PlainObject;
  if (!(alpha > 0)) fail(ErrorCode::Domain, "regularized orthogonalization needs alpha > 0");
  if (v.rows() != w.rows()) fail(ErrorCode::Domain, "orthogonalize: dimension mismatch");

  Mat vn(v.rows(), v.cols());
  Index kept = 0;
  for (Index c = 0; c < v.cols(); ++c) {
    const auto n = v.col(c).norm();
    if (n > 0) vn.col(kept++) = v.col(c) / n;
  }
  if (kept == 0) return w;
  const auto basis = vn.leftCols(kept);
  Mat gram = basis.adjoint() * basis;
  gram.diagonal().array() += alpha;
  const Vec coeffs = gram.ldlt().solve(basis.adjoint() * w);
  return w - basis * coeffs;
}

}  // namespace dmimo
