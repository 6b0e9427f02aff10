#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <string>

namespace gcaccel {

/*! \brief 128-bit wire label.
 *
 * Bytes are stored in memory order; byte 0 holds the least-significant bit,
 * which doubles as the point-and-permute select bit.
 */
struct Label {
  std::array<std::uint8_t, 16> bytes{};

  static Label from_words(std::uint64_t lo, std::uint64_t hi) {
    Label l;
    for (int i = 0; i < 8; ++i) {
      l.bytes[i] = static_cast<std::uint8_t>(lo >> (8 * i));
      l.bytes[8 + i] = static_cast<std::uint8_t>(hi >> (8 * i));
    }
    return l;
  }

  std::uint64_t lo() const {
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | bytes[i];
    return v;
  }

  std::uint64_t hi() const {
    std::uint64_t v = 0;
    for (int i = 15; i >= 8; --i) v = (v << 8) | bytes[i];
    return v;
  }

  bool lsb() const { return bytes[0] & 1u; }

  bool is_zero() const {
    for (auto b : bytes)
      if (b) return false;
    return true;
  }

  Label& operator^=(const Label& o) {
    for (std::size_t i = 0; i < 16; ++i) bytes[i] ^= o.bytes[i];
    return *this;
  }

  friend Label operator^(Label a, const Label& b) { return a ^= b; }
  friend bool operator==(const Label&, const Label&) = default;
  friend auto operator<=>(const Label&, const Label&) = default;

  /// Hex in memory byte order (byte 0 first).
  std::string hex() const {
    static const char* digits = "0123456789abcdef";
    std::string s;
    s.reserve(32);
    for (auto b : bytes) {
      s.push_back(digits[b >> 4]);
      s.push_back(digits[b & 15]);
    }
    return s;
  }

  static Label from_hex(const std::string& h);

  int popcount() const {
    int c = 0;
    for (auto b : bytes) c += __builtin_popcount(b);
    return c;
  }
};

/// Selects `l` when `bit` is set, otherwise the zero label.
inline Label select(bool bit, const Label& l) { return bit ? l : Label{}; }

}  // namespace gcaccel
