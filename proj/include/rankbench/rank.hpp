#pragma once

#include <compare>
#include <cstdint>
#include <limits>
#include <string>

namespace rankbench {

/// Degree-of-surprise value: a non-negative integer or infinity.
///
/// Addition saturates at infinity, which absorbs. Ranks are never
/// negative by construction.
class Rank {
 public:
  constexpr Rank() noexcept = default;
  constexpr explicit Rank(std::uint32_t v) noexcept : v_(v) {}

  static constexpr Rank infinity() noexcept { return Rank(kInf); }

  constexpr bool is_infinite() const noexcept { return v_ == kInf; }
  constexpr bool is_finite() const noexcept { return v_ != kInf; }

  /// Finite value; meaningless when infinite (callers check first).
  constexpr std::uint32_t value() const noexcept { return v_; }

  friend constexpr Rank operator+(Rank a, Rank b) noexcept {
    if (a.is_infinite() || b.is_infinite()) return infinity();
    std::uint64_t s = std::uint64_t(a.v_) + std::uint64_t(b.v_);
    return s >= kInf ? infinity() : Rank(static_cast<std::uint32_t>(s));
  }
  Rank& operator+=(Rank o) noexcept { return *this = *this + o; }

  /// Difference of finite ranks, clamped at zero; inf - finite = inf.
  friend constexpr Rank operator-(Rank a, Rank b) noexcept {
    if (a.is_infinite()) return infinity();
    if (b.is_infinite() || b.v_ >= a.v_) return Rank(0);
    return Rank(a.v_ - b.v_);
  }

  friend constexpr auto operator<=>(Rank a, Rank b) noexcept { return a.v_ <=> b.v_; }
  friend constexpr bool operator==(Rank a, Rank b) noexcept = default;

 private:
  static constexpr std::uint32_t kInf = std::numeric_limits<std::uint32_t>::max();
  std::uint32_t v_ = 0;
};

inline constexpr Rank min(Rank a, Rank b) noexcept { return a < b ? a : b; }

inline std::string to_string(Rank r) {
  return r.is_infinite() ? "inf" : std::to_string(r.value());
}

}  // namespace rankbench
