#pragma once

#include "gcaccel/label.hpp"

#include <array>
#include <cstdint>

namespace gcaccel {

/*! \brief AES-128 with an explicit key schedule.
 *
 * The key schedule is kept as a value so a caller can expand a key once and
 * reuse it for several blocks, which is how the Half-Gate hash pairs its
 * calls.
 */
class Aes128 {
public:
  using RoundKeys = std::array<std::array<std::uint8_t, 16>, 11>;

  Aes128() = default;
  explicit Aes128(const Label& key) { expand(key); }

  void expand(const Label& key);
  Label encrypt(const Label& block) const;

  const RoundKeys& round_keys() const { return rk_; }

private:
  RoundKeys rk_{};
};

}  // namespace gcaccel
