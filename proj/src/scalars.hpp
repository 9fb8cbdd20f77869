#pragma once

// Scalar types backing the four supported precision levels.
//
//   f16  -> Half        (float storage, every result rounded to binary16)
//   f32  -> float
//   f64  -> double
//   f128 -> Quad        (__float128, IEEE binary128 via libgcc/libquadmath)
//
// Half relies on the double-rounding identity: a correctly rounded binary32
// operation re-rounded to binary16 equals the correctly rounded binary16
// operation (valid because 24 >= 2*11 + 2). The same identity justifies
// narrowing through double when converting Quad values to f32/f16.

#include <bit>
#include <cmath>
#include <cstdint>
#include <quadmath.h>

#if defined(__F16C__)
#include <immintrin.h>
#endif

namespace mpark {

using Quad = __float128;

namespace detail {

#if defined(__F16C__)
inline float canon16(float x) {
  return _cvtsh_ss(_cvtss_sh(x, _MM_FROUND_TO_NEAREST_INT));
}
#else
// Software float -> binary16 value set, round to nearest even.
inline float canon16(float x) {
  uint32_t bits = std::bit_cast<uint32_t>(x);
  uint32_t sign = bits & 0x80000000u;
  uint32_t mag = bits & 0x7fffffffu;
  if (mag >= 0x7f800000u) return x;  // inf or nan
  // 0x477ff000 = largest float rounding to a finite half (65519.996...)
  if (mag >= 0x477ff000u) return std::bit_cast<float>(sign | 0x7f800000u);
  int e = static_cast<int>(mag >> 23) - 127;
  if (e < -25) return std::bit_cast<float>(sign);  // underflows to zero
  uint32_t m = (mag & 0x007fffffu) | 0x00800000u;  // 24-bit significand
  int drop = (e >= -14) ? 13 : 13 + (-14 - e);     // subnormal loses more
  uint32_t keep = m >> drop;
  uint32_t rem = m & ((1u << drop) - 1u);
  uint32_t half = 1u << (drop - 1);
  if (rem > half || (rem == half && (keep & 1u))) keep += 1;
  float mag_out = std::ldexp(static_cast<float>(keep), e - 23 + drop);
  return std::bit_cast<float>(sign | std::bit_cast<uint32_t>(mag_out));
}
#endif

}  // namespace detail

// IEEE binary16 arithmetic emulated on float.
struct Half {
  float v = 0.0f;

  Half() = default;
  explicit Half(float x) : v(detail::canon16(x)) {}
  explicit Half(double x) : v(detail::canon16(static_cast<float>(x))) {}
  explicit Half(int x) : Half(static_cast<double>(x)) {}

  static Half raw(float canonical) {
    Half h;
    h.v = canonical;
    return h;
  }

  explicit operator float() const { return v; }
  explicit operator double() const { return static_cast<double>(v); }

  friend Half operator+(Half a, Half b) { return raw(detail::canon16(a.v + b.v)); }
  friend Half operator-(Half a, Half b) { return raw(detail::canon16(a.v - b.v)); }
  friend Half operator*(Half a, Half b) { return raw(detail::canon16(a.v * b.v)); }
  friend Half operator/(Half a, Half b) { return raw(detail::canon16(a.v / b.v)); }
  Half operator-() const { return raw(-v); }
  Half& operator+=(Half o) { v = detail::canon16(v + o.v); return *this; }
  Half& operator-=(Half o) { v = detail::canon16(v - o.v); return *this; }
  Half& operator*=(Half o) { v = detail::canon16(v * o.v); return *this; }
  friend bool operator==(Half a, Half b) { return a.v == b.v; }
  friend bool operator!=(Half a, Half b) { return a.v != b.v; }
  friend bool operator<(Half a, Half b) { return a.v < b.v; }
  friend bool operator<=(Half a, Half b) { return a.v <= b.v; }
  friend bool operator>(Half a, Half b) { return a.v > b.v; }
  friend bool operator>=(Half a, Half b) { return a.v >= b.v; }
};

inline double to_double(Half x) { return static_cast<double>(x.v); }
inline double to_double(float x) { return static_cast<double>(x); }
inline double to_double(double x) { return x; }
inline double to_double(Quad x) { return static_cast<double>(x); }

inline Quad to_quad(Half x) { return static_cast<Quad>(x.v); }
inline Quad to_quad(float x) { return static_cast<Quad>(x); }
inline Quad to_quad(double x) { return static_cast<Quad>(x); }
inline Quad to_quad(Quad x) { return x; }

// Correctly rounded narrowing from Quad; the double hop is innocuous for
// p <= 24 targets (53 >= 2p + 2).
template <class T> T from_quad(Quad x);
template <> inline Quad from_quad<Quad>(Quad x) { return x; }
template <> inline double from_quad<double>(Quad x) { return static_cast<double>(x); }
template <> inline float from_quad<float>(Quad x) { return static_cast<float>(x); }
template <> inline Half from_quad<Half>(Quad x) { return Half(static_cast<double>(x)); }

template <class T> T from_double(double x);
template <> inline Quad from_double<Quad>(double x) { return static_cast<Quad>(x); }
template <> inline double from_double<double>(double x) { return x; }
template <> inline float from_double<float>(double x) { return static_cast<float>(x); }
template <> inline Half from_double<Half>(double x) { return Half(x); }

// Exact widening low -> high (valid whenever low <= high in precision order).
template <class S, class L> inline S widen(L x) { return from_quad<S>(to_quad(x)); }
template <> inline double widen<double, double>(double x) { return x; }
template <> inline double widen<double, float>(float x) { return static_cast<double>(x); }
template <> inline double widen<double, Half>(Half x) { return static_cast<double>(x.v); }
template <> inline float widen<float, float>(float x) { return x; }
template <> inline float widen<float, Half>(Half x) { return x.v; }
template <> inline Quad widen<Quad, Quad>(Quad x) { return x; }

inline Half abs_s(Half x) { return Half::raw(std::fabs(x.v)); }
inline float abs_s(float x) { return std::fabs(x); }
inline double abs_s(double x) { return std::fabs(x); }
inline Quad abs_s(Quad x) { return x < 0 ? -x : x; }

inline bool finite_s(Half x) { return std::isfinite(x.v); }
inline bool finite_s(float x) { return std::isfinite(x); }
inline bool finite_s(double x) { return std::isfinite(x); }
inline bool finite_s(Quad x) { return finiteq(x) != 0; }

}  // namespace mpark
