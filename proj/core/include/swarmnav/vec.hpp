#pragma once

#include <array>
#include <cmath>
#include <cstdint>

#include "swarmnav/error.hpp"

namespace swarmnav {

/// Euclidean vector tagged with its dimension (2 or 3). A 2D vector stores
/// z = 0 but is not interchangeable with a 3D one: mixing dimensions in
/// arithmetic throws, which turns silent planar/spatial bugs into errors.
class Vec {
 public:
  Vec() : dim_(2), c_{0.0, 0.0, 0.0} {}
  Vec(double x, double y) : dim_(2), c_{x, y, 0.0} {}
  Vec(double x, double y, double z) : dim_(3), c_{x, y, z} {}

  static Vec zero(int dim) {
    require(dim == 2 || dim == 3, ErrorCategory::config,
            "vector dimension must be 2 or 3");
    return dim == 2 ? Vec(0.0, 0.0) : Vec(0.0, 0.0, 0.0);
  }

  int dim() const { return dim_; }
  double x() const { return c_[0]; }
  double y() const { return c_[1]; }
  double z() const { return c_[2]; }

  double operator[](int i) const { return c_[static_cast<std::size_t>(i)]; }
  double& operator[](int i) { return c_[static_cast<std::size_t>(i)]; }

  Vec& operator+=(const Vec& o) {
    check_same_dim(o);
    c_[0] += o.c_[0];
    c_[1] += o.c_[1];
    c_[2] += o.c_[2];
    return *this;
  }
  Vec& operator-=(const Vec& o) {
    check_same_dim(o);
    c_[0] -= o.c_[0];
    c_[1] -= o.c_[1];
    c_[2] -= o.c_[2];
    return *this;
  }
  Vec& operator*=(double s) {
    c_[0] *= s;
    c_[1] *= s;
    c_[2] *= s;
    return *this;
  }

  friend Vec operator+(Vec a, const Vec& b) { return a += b; }
  friend Vec operator-(Vec a, const Vec& b) { return a -= b; }
  friend Vec operator*(Vec a, double s) { return a *= s; }
  friend Vec operator*(double s, Vec a) { return a *= s; }
  friend Vec operator-(Vec a) { return a *= -1.0; }

  friend bool operator==(const Vec& a, const Vec& b) {
    return a.dim_ == b.dim_ && a.c_ == b.c_;
  }

  double dot(const Vec& o) const {
    check_same_dim(o);
    return c_[0] * o.c_[0] + c_[1] * o.c_[1] + c_[2] * o.c_[2];
  }

  double norm_sq() const { return dot(*this); }
  double norm() const { return std::sqrt(norm_sq()); }

  /// Unit vector along *this, or the zero vector when ||this|| <= eps.
  /// Degenerate directions are resolved by callers that know the context.
  Vec normalized_or_zero(double eps = 1e-12) const {
    double n = norm();
    if (n <= eps) return Vec::zero(dim_);
    Vec r = *this;
    r *= 1.0 / n;
    return r;
  }

  /// Clamp the Euclidean norm to at most `limit` (limit >= 0), keeping the
  /// direction. Zero vectors pass through untouched.
  Vec clamped_norm(double limit) const {
    double n = norm();
    if (n <= limit || n == 0.0) return *this;
    Vec r = *this;
    r *= limit / n;
    return r;
  }

  bool is_finite() const {
    return std::isfinite(c_[0]) && std::isfinite(c_[1]) && std::isfinite(c_[2]);
  }

 private:
  void check_same_dim(const Vec& o) const {
    if (dim_ != o.dim_)
      fail(ErrorCategory::config, "mixed 2D/3D vector arithmetic");
  }

  int dim_;
  std::array<double, 3> c_;
};

inline double distance(const Vec& a, const Vec& b) { return (a - b).norm(); }

/// 3D cross product; rejects 2D operands.
inline Vec cross(const Vec& a, const Vec& b) {
  if (a.dim() != 3 || b.dim() != 3)
    fail(ErrorCategory::config, "cross product requires 3D vectors");
  return Vec(a.y() * b.z() - a.z() * b.y(), a.z() * b.x() - a.x() * b.z(),
             a.x() * b.y() - a.y() * b.x());
}

}  // namespace swarmnav
