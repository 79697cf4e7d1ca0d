#pragma once

// AES-128 CMAC with the 64-bit truncation that LIN-MM multiplexes onto the
// response frame. The block cipher is an opaque permutation (OpenSSL); the
// CMAC construction itself lives here.

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace linmm {

using Block128 = std::array<std::uint8_t, 16>;

class MacKey {
 public:
  explicit MacKey(const Block128& bytes) : bytes_(bytes) {}
  /// Parses exactly 32 hex characters.
  static MacKey from_hex(std::string_view hex);

  [[nodiscard]] const Block128& bytes() const { return bytes_; }
  friend bool operator==(const MacKey&, const MacKey&) = default;

 private:
  Block128 bytes_;
};

/// 64-bit truncated tag. Bit 0 of the transmitted stream is the MSB.
class MacTag {
 public:
  MacTag() = default;
  explicit MacTag(std::uint64_t v) : value_(v) {}

  [[nodiscard]] std::uint64_t value() const { return value_; }
  /// Bit i in transmission order (i = 0 is the most significant bit).
  [[nodiscard]] int bit(int i) const { return static_cast<int>((value_ >> (63 - i)) & 1u); }
  [[nodiscard]] std::string hex() const;
  static MacTag from_bits(std::span<const std::uint8_t> bits_msb_first);

  friend bool operator==(MacTag, MacTag) = default;

 private:
  std::uint64_t value_ = 0;
};

struct CmacSubkeys {
  Block128 k1;
  Block128 k2;
};

/// Encrypts a single block with AES-128.
Block128 aes128_encrypt_block(const MacKey& key, const Block128& in);

/// Doubling in GF(2^128) with the 0x87 reduction constant.
Block128 gf128_double(const Block128& b);

CmacSubkeys cmac_subkeys(const MacKey& key);
Block128 cmac_tag(const MacKey& key, std::span<const std::uint8_t> msg);
MacTag truncate_tag(const Block128& full);

/// Compares all 64 bits regardless of where the first mismatch is.
bool tags_equal(MacTag a, MacTag b);
bool verify_tag(const MacKey& key, std::span<const std::uint8_t> msg, MacTag received);

struct MacProfile {
  bool freshness_counter = false;
  std::uint32_t counter = 0;
};

/// pid || data, optionally followed by a big-endian 32-bit counter.
std::vector<std::uint8_t> auth_message(std::uint8_t pid, std::span<const std::uint8_t> data,
                                       const MacProfile& profile = {});

MacTag compute_mac(const MacKey& key, std::uint8_t pid, std::span<const std::uint8_t> data,
                   const MacProfile& profile = {});

std::string to_hex(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> from_hex(std::string_view hex);

}  // namespace linmm
