#include "precision.hpp"

#include <bit>
#include <cmath>

namespace mpark {

namespace {

const FpFormat kFormats[4] = {
    {PrecisionLevel::Half, "f16", 11, -14, 15, 0x1p-11},
    {PrecisionLevel::Single, "f32", 24, -126, 127, 0x1p-24},
    {PrecisionLevel::Double, "f64", 53, -1022, 1023, 0x1p-53},
    {PrecisionLevel::Extended, "f128", 113, -16382, 16383, 0x1p-113},
};

struct Decomp {
  bool special = false;  // nan/inf/zero: return input unchanged
  int sign = 0;
  int exp = 0;        // value = significand * 2^exp, 1 <= significand < 2
  uint64_t sig = 0;   // 53-bit integer significand (bit 52 set)
};

Decomp decompose(double x, const FpFormat& fmt) {
  Decomp d;
  uint64_t bits = std::bit_cast<uint64_t>(x);
  uint64_t mag = bits & 0x7fffffffffffffffull;
  d.sign = (bits >> 63) ? -1 : 1;
  if (mag == 0 || (mag >> 52) == 0x7ff) {
    d.special = true;
    return d;
  }
  if ((mag >> 52) == 0) {
    // double subnormal: below every target's subnormal range except f64/f128
    if (fmt.significand_bits >= 53) {
      d.special = true;
      return d;
    }
    d.exp = fmt.min_exp - fmt.significand_bits - 2;  // forces round-to-zero path
    d.sig = 1ull << 52;
    return d;
  }
  d.exp = static_cast<int>(mag >> 52) - 1023;
  d.sig = (mag & 0xfffffffffffffull) | (1ull << 52);
  return d;
}

double compose(int sign, uint64_t sig, int exp_of_lsb, const FpFormat& fmt) {
  double v = std::ldexp(static_cast<double>(sig), exp_of_lsb);
  double max_finite = std::ldexp(2.0 - std::ldexp(1.0, 1 - fmt.significand_bits), fmt.max_exp);
  if (v > max_finite) v = HUGE_VAL;
  return sign < 0 ? -v : v;
}

}  // namespace

const FpFormat& format(PrecisionLevel level) { return kFormats[static_cast<int>(level)]; }

double unit_roundoff(PrecisionLevel level) { return format(level).unit_roundoff; }

std::optional<PrecisionLevel> parse_level(const std::string& name) {
  for (const auto& f : kFormats)
    if (name == f.name) return f.level;
  return std::nullopt;
}

std::string PrecisionPair::str() const {
  return std::string(format(high).name) + "/" + format(low).name;
}

std::optional<PrecisionPair> parse_pair(const std::string& text) {
  auto slash = text.find('/');
  if (slash == std::string::npos) {
    auto l = parse_level(text);
    if (!l) return std::nullopt;
    return PrecisionPair{*l, *l};
  }
  auto hi = parse_level(text.substr(0, slash));
  auto lo = parse_level(text.substr(slash + 1));
  if (!hi || !lo) return std::nullopt;
  if (static_cast<int>(*lo) > static_cast<int>(*hi)) return std::nullopt;
  return PrecisionPair{*hi, *lo};
}

double round_to(double x, const FpFormat& fmt) {
  if (fmt.significand_bits >= 53) return x;
  Decomp d = decompose(x, fmt);
  if (d.special) return x;

  int keep = fmt.significand_bits;
  if (d.exp < fmt.min_exp) keep -= fmt.min_exp - d.exp;  // gradual underflow
  int drop = 53 - keep;
  if (keep <= 0) {
    // Magnitude at or below half the smallest subnormal rounds to zero
    // (ties to even = zero); above it rounds to the smallest subnormal.
    double tiny = std::ldexp(1.0, fmt.min_exp - fmt.significand_bits + 1);
    double mag = std::fabs(x);
    double out = (mag > tiny / 2) ? tiny : 0.0;
    return d.sign < 0 ? -out : out;
  }
  uint64_t kept = d.sig >> drop;
  uint64_t rem = d.sig & ((1ull << drop) - 1ull);
  uint64_t half = 1ull << (drop - 1);
  if (rem > half || (rem == half && (kept & 1ull))) kept += 1;
  return compose(d.sign, kept, d.exp - 52 + drop, fmt);
}

Quad round_to(Quad x, const FpFormat& fmt) {
  if (fmt.level == PrecisionLevel::Extended) return x;
  // Quad -> double is correctly rounded and the second rounding is innocuous
  // for p <= 24; for p = 53 the cast itself is the rounding.
  return static_cast<Quad>(round_to(static_cast<double>(x), fmt));
}

double round_stochastic(double x, const FpFormat& fmt, uint64_t& state) {
  if (fmt.significand_bits >= 53) return x;
  Decomp d = decompose(x, fmt);
  if (d.special) return x;

  int keep = fmt.significand_bits;
  if (d.exp < fmt.min_exp) keep -= fmt.min_exp - d.exp;
  if (keep <= 0) {
    double tiny = std::ldexp(1.0, fmt.min_exp - fmt.significand_bits + 1);
    double frac = std::fabs(x) / tiny;
    double out = (uniform01(state) < frac) ? tiny : 0.0;
    return d.sign < 0 ? -out : out;
  }
  int drop = 53 - keep;
  uint64_t kept = d.sig >> drop;
  uint64_t rem = d.sig & ((1ull << drop) - 1ull);
  if (rem == 0) return x;  // exact
  double frac = std::ldexp(static_cast<double>(rem), -drop);
  if (uniform01(state) < frac) kept += 1;
  return compose(d.sign, kept, d.exp - 52 + drop, fmt);
}

double round_to(double x, const FpFormat& fmt, RoundingMode mode, uint64_t& state) {
  return mode == RoundingMode::NearestEven ? round_to(x, fmt) : round_stochastic(x, fmt, state);
}

uint64_t splitmix64(uint64_t& state) {
  uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

double uniform01(uint64_t& state) {
  return static_cast<double>(splitmix64(state) >> 11) * 0x1p-53;
}

uint64_t mix_seed(uint64_t seed, uint64_t a, uint64_t b) {
  uint64_t s = seed ^ (0x9e3779b97f4a7c15ull + a * 0xc2b2ae3d27d4eb4full + b * 0x165667b19e3779f9ull);
  splitmix64(s);
  return s;
}

}  // namespace mpark
