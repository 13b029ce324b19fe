#pragma once

#include <cstddef>
#include <span>

#include "rankbench/rank.hpp"

namespace rankbench {

// An evaluation algebra bundles the two table operations (combine,
// marginalize) with their identity elements and the normalization rule
// for posterior vectors. One elimination routine instantiated with
// either algebra gives the numeric and the rank engine; the engines
// differ in nothing else.

/// (product, sum) over non-negative reals; normalize by dividing by the
/// total. The standard probability semiring.
struct SumProductAlgebra {
  using value_type = double;

  static constexpr double unit() noexcept { return 1.0; }
  static constexpr double annihilator() noexcept { return 0.0; }

  static constexpr double combine(double a, double b) noexcept { return a * b; }
  static constexpr double marginalize(double acc, double x) noexcept { return acc + x; }

  /// In-place normalization. Returns false when the vector is
  /// unnormalizable (total mass zero, i.e. contradictory evidence).
  static bool normalize(std::span<double> v) noexcept {
    double total = 0.0;
    for (double x : v) total += x;
    if (!(total > 0.0)) return false;
    for (double& x : v) x /= total;
    return true;
  }
};

/// (integer addition, minimum) over ranks; normalize by subtracting the
/// minimum. Infinity absorbs addition and is the identity of min.
struct MinSumAlgebra {
  using value_type = Rank;

  static constexpr Rank unit() noexcept { return Rank(0); }
  static constexpr Rank annihilator() noexcept { return Rank::infinity(); }

  static constexpr Rank combine(Rank a, Rank b) noexcept { return a + b; }
  static constexpr Rank marginalize(Rank acc, Rank x) noexcept { return min(acc, x); }

  /// Returns false when every entry is infinite.
  static bool normalize(std::span<Rank> v) noexcept {
    Rank m = Rank::infinity();
    for (Rank x : v) m = min(m, x);
    if (m.is_infinite()) return false;
    for (Rank& x : v) x = x - m;
    return true;
  }
};

template <class A>
concept EvaluationAlgebra = requires(typename A::value_type x, std::span<typename A::value_type> v) {
  { A::unit() } -> std::same_as<typename A::value_type>;
  { A::annihilator() } -> std::same_as<typename A::value_type>;
  { A::combine(x, x) } -> std::same_as<typename A::value_type>;
  { A::marginalize(x, x) } -> std::same_as<typename A::value_type>;
  { A::normalize(v) } -> std::same_as<bool>;
};

}  // namespace rankbench
