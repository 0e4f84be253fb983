#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <array>

namespace helixlab {

using Vector3 = Eigen::Vector3d;
using Point3 = Eigen::Vector3d;
using Matrix3 = Eigen::Matrix3d;

/// Stored as a full matrix but always written through set(), so g_ij == g_ji bitwise.
class SymMatrix3 {
 public:
  SymMatrix3() : m_(Matrix3::Zero()) {}
  explicit SymMatrix3(const Matrix3& m);  // symmetrizes from the upper triangle

  double operator()(int i, int j) const { return m_(i, j); }
  void set(int i, int j, double v) {
    m_(i, j) = v;
    m_(j, i) = v;
  }
  const Matrix3& matrix() const { return m_; }

  static SymMatrix3 identity() { return SymMatrix3(Matrix3::Identity()); }
  static SymMatrix3 diagonal(double a, double b, double c);

 private:
  Matrix3 m_;
};

/// Christoffel symbols of the second kind, Γ^k_ij stored as symbols[k](i, j).
struct Christoffel3 {
  std::array<SymMatrix3, 3> symbols;

  double operator()(int k, int i, int j) const { return symbols[k](i, j); }

  /// Γ^k_ij X^i Y^j
  Vector3 contract(const Vector3& x, const Vector3& y) const {
    return {x.dot(symbols[0].matrix() * y), x.dot(symbols[1].matrix() * y),
            x.dot(symbols[2].matrix() * y)};
  }
};

bool all_finite(const Vector3& v);

}  // namespace helixlab
