#ifndef QTLR_QUATERNION_HPP
#define QTLR_QUATERNION_HPP

#include <cmath>
#include <ostream>

#include "qtlr/error.hpp"

namespace qtlr {

// q = w + x i + y j + z k with i^2 = j^2 = k^2 = ijk = -1.
template <typename Scalar>
struct Quaternion {
  Scalar w{0};
  Scalar x{0};
  Scalar y{0};
  Scalar z{0};

  constexpr Quaternion() = default;
  constexpr Quaternion(Scalar w_, Scalar x_, Scalar y_, Scalar z_) : w(w_), x(x_), y(y_), z(z_) {}
  // Real quaternion.
  constexpr explicit Quaternion(Scalar real) : w(real) {}

  static constexpr Quaternion i() { return {0, 1, 0, 0}; }
  static constexpr Quaternion j() { return {0, 0, 1, 0}; }
  static constexpr Quaternion k() { return {0, 0, 0, 1}; }

  constexpr bool is_pure() const { return w == Scalar(0); }

  constexpr Quaternion& operator+=(const Quaternion& o) {
    w += o.w; x += o.x; y += o.y; z += o.z;
    return *this;
  }
  constexpr Quaternion& operator-=(const Quaternion& o) {
    w -= o.w; x -= o.x; y -= o.y; z -= o.z;
    return *this;
  }
  constexpr Quaternion& operator*=(Scalar s) {
    w *= s; x *= s; y *= s; z *= s;
    return *this;
  }
  constexpr Quaternion& operator/=(Scalar s) {
    w /= s; x /= s; y /= s; z /= s;
    return *this;
  }

  friend constexpr bool operator==(const Quaternion&, const Quaternion&) = default;
};

using Quaterniond = Quaternion<double>;

template <typename Scalar>
constexpr Quaternion<Scalar> operator+(Quaternion<Scalar> a, const Quaternion<Scalar>& b) {
  return a += b;
}
template <typename Scalar>
constexpr Quaternion<Scalar> operator-(Quaternion<Scalar> a, const Quaternion<Scalar>& b) {
  return a -= b;
}
template <typename Scalar>
constexpr Quaternion<Scalar> operator-(const Quaternion<Scalar>& a) {
  return {-a.w, -a.x, -a.y, -a.z};
}
template <typename Scalar>
constexpr Quaternion<Scalar> operator*(Quaternion<Scalar> a, Scalar s) {
  return a *= s;
}
template <typename Scalar>
constexpr Quaternion<Scalar> operator*(Scalar s, Quaternion<Scalar> a) {
  return a *= s;
}
template <typename Scalar>
constexpr Quaternion<Scalar> operator/(Quaternion<Scalar> a, Scalar s) {
  return a /= s;
}

// Hamilton product; mul(a, b) != mul(b, a) in general.
template <typename Scalar>
constexpr Quaternion<Scalar> mul(const Quaternion<Scalar>& a, const Quaternion<Scalar>& b) {
  return {a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
          a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
          a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
          a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w};
}

template <typename Scalar>
constexpr Quaternion<Scalar> operator*(const Quaternion<Scalar>& a, const Quaternion<Scalar>& b) {
  return mul(a, b);
}

template <typename Scalar>
constexpr Quaternion<Scalar> conj(const Quaternion<Scalar>& q) {
  return {q.w, -q.x, -q.y, -q.z};
}

template <typename Scalar>
constexpr Scalar squared_modulus(const Quaternion<Scalar>& q) {
  return q.w * q.w + q.x * q.x + q.y * q.y + q.z * q.z;
}

template <typename Scalar>
Scalar modulus(const Quaternion<Scalar>& q) {
  using std::sqrt;
  return sqrt(squared_modulus(q));
}

template <typename Scalar>
Quaternion<Scalar> inverse(const Quaternion<Scalar>& q) {
  const Scalar n2 = squared_modulus(q);
  if (n2 == Scalar(0)) throw DomainError("inverse of the zero quaternion");
  return conj(q) / n2;
}

template <typename Scalar>
struct ConjInvMod {
  Quaternion<Scalar> conjugate;
  Quaternion<Scalar> inverse;
  Scalar modulus;
};

template <typename Scalar>
ConjInvMod<Scalar> conj_inv_mod(const Quaternion<Scalar>& q) {
  return {conj(q), inverse(q), modulus(q)};
}

// Largest componentwise absolute difference.
template <typename Scalar>
Scalar max_abs_diff(const Quaternion<Scalar>& a, const Quaternion<Scalar>& b) {
  using std::abs;
  using std::max;
  return max(max(abs(a.w - b.w), abs(a.x - b.x)), max(abs(a.y - b.y), abs(a.z - b.z)));
}

template <typename Scalar>
std::ostream& operator<<(std::ostream& os, const Quaternion<Scalar>& q) {
  return os << '(' << q.w << ", " << q.x << "i, " << q.y << "j, " << q.z << "k)";
}

}  // namespace qtlr

#endif  // QTLR_QUATERNION_HPP
