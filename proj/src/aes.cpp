#include "gcaccel/aes.hpp"

#include <stdexcept>

namespace gcaccel {

namespace {

constexpr std::uint8_t xtime(std::uint8_t x) {
  return static_cast<std::uint8_t>((x << 1) ^ ((x & 0x80) ? 0x1b : 0x00));
}

constexpr std::uint8_t gmul(std::uint8_t a, std::uint8_t b) {
  std::uint8_t p = 0;
  for (int i = 0; i < 8; ++i) {
    if (b & 1) p ^= a;
    a = xtime(a);
    b >>= 1;
  }
  return p;
}

constexpr std::array<std::uint8_t, 256> make_sbox() {
  std::array<std::uint8_t, 256> box{};
  for (int x = 0; x < 256; ++x) {
    // multiplicative inverse by exponentiation: x^254
    std::uint8_t inv = 1;
    if (x != 0) {
      std::uint8_t base = static_cast<std::uint8_t>(x);
      int e = 254;
      while (e) {
        if (e & 1) inv = gmul(inv, base);
        base = gmul(base, base);
        e >>= 1;
      }
    } else {
      inv = 0;
    }
    std::uint8_t s = inv;
    std::uint8_t r = inv;
    for (int i = 0; i < 4; ++i) {
      r = static_cast<std::uint8_t>((r << 1) | (r >> 7));
      s ^= r;
    }
    box[x] = static_cast<std::uint8_t>(s ^ 0x63);
  }
  return box;
}

constexpr auto kSbox = make_sbox();

// Combined SubBytes+MixColumns tables, column-major word per output column.
struct TTables {
  std::array<std::uint32_t, 256> t0{}, t1{}, t2{}, t3{};
};

constexpr TTables make_ttables() {
  TTables t;
  for (int x = 0; x < 256; ++x) {
    std::uint8_t s = kSbox[x];
    std::uint8_t s2 = xtime(s);
    std::uint8_t s3 = static_cast<std::uint8_t>(s2 ^ s);
    // word bytes: [row0,row1,row2,row3] little-endian packed
    t.t0[x] = std::uint32_t(s2) | (std::uint32_t(s) << 8) | (std::uint32_t(s) << 16) |
              (std::uint32_t(s3) << 24);
    t.t1[x] = std::uint32_t(s3) | (std::uint32_t(s2) << 8) | (std::uint32_t(s) << 16) |
              (std::uint32_t(s) << 24);
    t.t2[x] = std::uint32_t(s) | (std::uint32_t(s3) << 8) | (std::uint32_t(s2) << 16) |
              (std::uint32_t(s) << 24);
    t.t3[x] = std::uint32_t(s) | (std::uint32_t(s) << 8) | (std::uint32_t(s3) << 16) |
              (std::uint32_t(s2) << 24);
  }
  return t;
}

constexpr TTables kT = make_ttables();

constexpr std::array<std::uint8_t, 10> kRcon = {0x01, 0x02, 0x04, 0x08, 0x10,
                                                0x20, 0x40, 0x80, 0x1b, 0x36};

inline std::uint32_t load_col(const std::uint8_t* p) {
  return std::uint32_t(p[0]) | (std::uint32_t(p[1]) << 8) | (std::uint32_t(p[2]) << 16) |
         (std::uint32_t(p[3]) << 24);
}

inline void store_col(std::uint8_t* p, std::uint32_t w) {
  p[0] = static_cast<std::uint8_t>(w);
  p[1] = static_cast<std::uint8_t>(w >> 8);
  p[2] = static_cast<std::uint8_t>(w >> 16);
  p[3] = static_cast<std::uint8_t>(w >> 24);
}

}  // namespace

void Aes128::expand(const Label& key) {
  std::array<std::uint8_t, 176> w{};
  for (int i = 0; i < 16; ++i) w[i] = key.bytes[i];
  for (int i = 4; i < 44; ++i) {
    std::uint8_t t[4] = {w[4 * (i - 1)], w[4 * (i - 1) + 1], w[4 * (i - 1) + 2],
                         w[4 * (i - 1) + 3]};
    if (i % 4 == 0) {
      std::uint8_t first = t[0];
      t[0] = static_cast<std::uint8_t>(kSbox[t[1]] ^ kRcon[i / 4 - 1]);
      t[1] = kSbox[t[2]];
      t[2] = kSbox[t[3]];
      t[3] = kSbox[first];
    }
    for (int j = 0; j < 4; ++j) w[4 * i + j] = w[4 * (i - 4) + j] ^ t[j];
  }
  for (int r = 0; r < 11; ++r)
    for (int j = 0; j < 16; ++j) rk_[r][j] = w[16 * r + j];
}

Label Aes128::encrypt(const Label& block) const {
  std::uint8_t s[16];
  for (int i = 0; i < 16; ++i) s[i] = block.bytes[i] ^ rk_[0][i];

  for (int round = 1; round < 10; ++round) {
    std::uint8_t out[16];
    for (int c = 0; c < 4; ++c) {
      // ShiftRows: row r of column c comes from column (c + r) mod 4
      std::uint32_t col = kT.t0[s[4 * c]] ^ kT.t1[s[4 * ((c + 1) & 3) + 1]] ^
                          kT.t2[s[4 * ((c + 2) & 3) + 2]] ^ kT.t3[s[4 * ((c + 3) & 3) + 3]];
      col ^= load_col(&rk_[round][4 * c]);
      store_col(&out[4 * c], col);
    }
    for (int i = 0; i < 16; ++i) s[i] = out[i];
  }

  Label result;
  for (int c = 0; c < 4; ++c)
    for (int r = 0; r < 4; ++r)
      result.bytes[4 * c + r] =
          static_cast<std::uint8_t>(kSbox[s[4 * ((c + r) & 3) + r]] ^ rk_[10][4 * c + r]);
  return result;
}

Label Label::from_hex(const std::string& h) {
  if (h.size() != 32) throw std::invalid_argument("label hex must be 32 digits");
  auto nib = [](char ch) -> std::uint8_t {
    if (ch >= '0' && ch <= '9') return static_cast<std::uint8_t>(ch - '0');
    if (ch >= 'a' && ch <= 'f') return static_cast<std::uint8_t>(ch - 'a' + 10);
    if (ch >= 'A' && ch <= 'F') return static_cast<std::uint8_t>(ch - 'A' + 10);
    throw std::invalid_argument("bad hex digit");
  };
  Label l;
  for (int i = 0; i < 16; ++i)
    l.bytes[i] = static_cast<std::uint8_t>((nib(h[2 * i]) << 4) | nib(h[2 * i + 1]));
  return l;
}

}  // namespace gcaccel
