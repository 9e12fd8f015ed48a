// Core domain value types shared across the library.

#pragma once

#include <cstdint>
#include <stdexcept>

namespace mtlab {

// A probability, kept in [0,1] by construction.
class Probability {
 public:
  constexpr Probability() = default;
  explicit Probability(double value) : value_(checked(value)) {}

  constexpr double value() const { return value_; }
  constexpr operator double() const { return value_; }

 private:
  static double checked(double value) {
    if (!(value >= 0.0 && value <= 1.0)) {
      throw std::invalid_argument("Probability: value must lie in [0,1]");
    }
    return value;
  }

  double value_ = 0.0;
};

// A strictly positive mean shift for the alternative distribution.
class EffectSize {
 public:
  explicit EffectSize(double mu) : mu_(checked(mu)) {}

  constexpr double value() const { return mu_; }
  constexpr operator double() const { return mu_; }

 private:
  static double checked(double mu) {
    if (!(mu > 0.0) || mu > 1e308) {
      throw std::invalid_argument("EffectSize: mu must be positive and finite");
    }
    return mu;
  }

  double mu_;
};

// Identifies one reproducible random substream. The pair is a pure key:
// the same (master_seed, stream_id) always yields the identical sequence.
struct SeedSpec {
  std::uint64_t master_seed = 0;
  std::uint64_t stream_id = 0;
};

enum class HypothesisStatus : std::uint8_t {
  TrueNull,   // no effect exists
  FalseNull,  // a real discovery to be made
};

}  // namespace mtlab
