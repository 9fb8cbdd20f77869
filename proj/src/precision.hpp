#pragma once

// Precision levels and the software rounding used to emulate low-precision
// arithmetic. Levels are named f16/f32/f64/f128 on the command line and in
// config files; a mixed pair is written "high/low", e.g. "f128/f16".

#include <cstdint>
#include <optional>
#include <string>

#include "scalars.hpp"

namespace mpark {

enum class PrecisionLevel : int { Half = 0, Single = 1, Double = 2, Extended = 3 };

struct FpFormat {
  PrecisionLevel level;
  const char* name;       // CLI spelling
  int significand_bits;   // p, including the implicit bit
  int min_exp;            // smallest normalized binary exponent
  int max_exp;            // largest normalized binary exponent
  double unit_roundoff;   // 2^(-p), exact
};

const FpFormat& format(PrecisionLevel level);
double unit_roundoff(PrecisionLevel level);

std::optional<PrecisionLevel> parse_level(const std::string& name);

struct PrecisionPair {
  PrecisionLevel high = PrecisionLevel::Double;
  PrecisionLevel low = PrecisionLevel::Double;
  std::string str() const;
};

// Parses "f64/f16"; a bare level "f64" means a uniform pair. Rejects pairs
// with low > high.
std::optional<PrecisionPair> parse_pair(const std::string& text);

enum class RoundingMode { NearestEven, Stochastic };

// Round-to-nearest-even into the value set of `fmt`. Values beyond the
// largest finite saturate to signed infinity; NaN and infinities pass
// through. Exact for inputs already representable.
double round_to(double x, const FpFormat& fmt);
Quad round_to(Quad x, const FpFormat& fmt);

inline double round_to(double x, PrecisionLevel level) { return round_to(x, format(level)); }

// Stochastic rounding: picks one of the two bracketing representables with
// probability proportional to proximity, drawing from `state` (splitmix64).
// Reproducible for a fixed starting state.
double round_stochastic(double x, const FpFormat& fmt, uint64_t& state);

double round_to(double x, const FpFormat& fmt, RoundingMode mode, uint64_t& state);

// splitmix64; also used wherever the toolkit needs seeded randomness.
uint64_t splitmix64(uint64_t& state);
// uniform draw in [0,1)
double uniform01(uint64_t& state);
// stable per-cell seed derivation
uint64_t mix_seed(uint64_t seed, uint64_t a, uint64_t b);

}  // namespace mpark
