#pragma once

// Unit-determinant 2x2 real matrices acting on the upper half-plane, defined
// up to global sign. Axis endpoints live on RP^1 and are kept as projective
// 2-vectors; raw boundary coordinates appear only at the API edge.

#include <array>
#include <cmath>
#include <complex>
#include <limits>

#include "currents/common.hpp"
#include "currents/word.hpp"

namespace currents {

struct Mat2 {
  double a = 1, b = 0, c = 0, d = 1;

  static Mat2 identity() { return {}; }

  double trace() const { return a + d; }
  double det() const { return a * d - b * c; }

  Mat2 operator*(const Mat2& o) const {
    return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
  }

  Mat2 inv() const {  // assumes det == 1 up to sign normalization
    return {d, -b, -c, a};
  }

  // scale so det = 1; throws unless det > 0
  Mat2 unit_det() const {
    double dt = det();
    if (!(dt > 0)) throw ValidationError("matrix determinant must be positive, got " + std::to_string(dt));
    double s = 1.0 / std::sqrt(dt);
    return {a * s, b * s, c * s, d * s};
  }

  // representative with trace >= 0; near-zero trace falls back to the sign of
  // the first nonzero entry
  Mat2 sign_normalized() const {
    double t = trace();
    double s = 1.0;
    if (std::abs(t) > 1e-12) {
      s = t < 0 ? -1.0 : 1.0;
    } else {
      for (double e : {a, b, c, d}) {
        if (std::abs(e) > 1e-12) {
          s = e < 0 ? -1.0 : 1.0;
          break;
        }
      }
    }
    return {s * a, s * b, s * c, s * d};
  }

  std::complex<double> mobius(std::complex<double> z) const {
    return (a * z + b) / (c * z + d);
  }

  double max_abs_diff(const Mat2& o) const {
    return std::max(std::max(std::abs(a - o.a), std::abs(b - o.b)),
                    std::max(std::abs(c - o.c), std::abs(d - o.d)));
  }

  // distance to +-identity
  double identity_residual() const {
    Mat2 n = unit_det();
    Mat2 i = identity();
    Mat2 m{-n.a, -n.b, -n.c, -n.d};
    return std::min(n.max_abs_diff(i), m.max_abs_diff(i));
  }
};

inline bool is_hyperbolic(const Mat2& m) { return std::abs(m.trace()) > 2.0 + 1e-12; }

inline double translation_length(const Mat2& m) {
  double t = std::abs(m.trace());
  if (t <= 2.0 + 1e-12) throw NotHyperbolicError(t);
  return 2.0 * std::acosh(t / 2.0);
}

// point of RP^1 as a unit 2-vector with sign-normalized leading entry
struct BoundaryPoint {
  double u = 1, v = 0;

  static BoundaryPoint from_vector(double u, double v) {
    double n = std::hypot(u, v);
    if (n == 0) throw ValidationError("zero boundary vector");
    u /= n;
    v /= n;
    if (u < 0 || (u == 0 && v < 0)) {
      u = -u;
      v = -v;
    }
    return {u, v};
  }

  bool is_infinity(double tol = 1e-12) const { return std::abs(v) <= tol; }
  // boundary coordinate on R u {inf}
  double coordinate() const { return is_infinity() ? std::numeric_limits<double>::infinity() : u / v; }
  // angle in [0, pi) — a uniform chart of RP^1
  double angle() const {
    double t = std::atan2(v, u);
    if (t < 0) t += std::acos(-1.0);
    const double pi = std::acos(-1.0);
    if (t >= pi) t -= pi;
    return t;
  }
  BoundaryPoint apply(const Mat2& m) const {
    return from_vector(m.a * u + m.b * v, m.c * u + m.d * v);
  }
};

struct AxisEndpoints {
  BoundaryPoint attracting;
  BoundaryPoint repelling;
};

inline AxisEndpoints axis_endpoints(const Mat2& m_in) {
  Mat2 m = m_in.sign_normalized();
  double t = m.trace();
  if (t <= 2.0 + 1e-12) throw NotHyperbolicError(t);
  double sq = std::sqrt(t * t - 4.0);
  auto evec = [&](double lam) {
    double u1 = m.b, v1 = lam - m.a;
    double u2 = lam - m.d, v2 = m.c;
    if (u1 * u1 + v1 * v1 >= u2 * u2 + v2 * v2) return BoundaryPoint::from_vector(u1, v1);
    return BoundaryPoint::from_vector(u2, v2);
  };
  return {evec((t + sq) / 2.0), evec((t - sq) / 2.0)};
}

// hyperbolic distance in the upper half-plane
inline double hyp_distance(std::complex<double> z, std::complex<double> w) {
  double num = std::norm(z - w);
  double den = 2.0 * z.imag() * w.imag();
  return std::acosh(1.0 + num / den);
}

// distance from z to the geodesic (0, infinity), and the log-height of the
// orthogonal projection onto it
inline double dist_to_vertical_axis(std::complex<double> z) {
  return std::asinh(std::abs(z.real()) / z.imag());
}
inline double log_height_on_vertical_axis(std::complex<double> z) { return std::log(std::abs(z)); }

// frame F with F(att) = infinity, F(rep) = 0; conjugating by F diagonalizes
inline Mat2 axis_frame(const AxisEndpoints& ax) {
  // inverse of the column matrix [att | rep]
  double a = ax.attracting.u, c = ax.attracting.v;
  double b = ax.repelling.u, d = ax.repelling.v;
  double dt = a * d - b * c;
  if (std::abs(dt) < 1e-300) throw ValidationError("degenerate axis frame");
  double s = 1.0 / std::sqrt(std::abs(dt));
  if (dt < 0) {
    // swap sign of one column to stay orientation-friendly; boundary action is unaffected
    b = -b;
    d = -d;
  }
  Mat2 cols{a * s, b * s, c * s, d * s};
  return cols.inv();
}

}  // namespace currents
