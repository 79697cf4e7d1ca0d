#include "linmm/mac_engine.hpp"

#include <openssl/evp.h>

#include <memory>
#include <stdexcept>

namespace linmm {

namespace {

struct CipherCtxDeleter {
  void operator()(EVP_CIPHER_CTX* ctx) const { EVP_CIPHER_CTX_free(ctx); }
};

int hex_nibble(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

void xor_into(Block128& dst, const Block128& src) {
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] ^= src[i];
}

}  // namespace

std::vector<std::uint8_t> from_hex(std::string_view hex) {
  if (hex.size() % 2 != 0) throw std::invalid_argument("hex string has odd length");
  std::vector<std::uint8_t> out;
  out.reserve(hex.size() / 2);
  for (std::size_t i = 0; i < hex.size(); i += 2) {
    int hi = hex_nibble(hex[i]), lo = hex_nibble(hex[i + 1]);
    if (hi < 0 || lo < 0) throw std::invalid_argument("invalid hex digit");
    out.push_back(static_cast<std::uint8_t>(hi << 4 | lo));
  }
  return out;
}

std::string to_hex(std::span<const std::uint8_t> bytes) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string s;
  s.reserve(bytes.size() * 2);
  for (auto b : bytes) {
    s.push_back(digits[b >> 4]);
    s.push_back(digits[b & 0xF]);
  }
  return s;
}

MacKey MacKey::from_hex(std::string_view hex) {
  if (hex.size() != 32) throw std::invalid_argument("MAC key must be 32 hex characters");
  auto bytes = linmm::from_hex(hex);
  Block128 b{};
  std::copy(bytes.begin(), bytes.end(), b.begin());
  return MacKey(b);
}

std::string MacTag::hex() const {
  std::array<std::uint8_t, 8> b{};
  for (int i = 0; i < 8; ++i) b[i] = static_cast<std::uint8_t>(value_ >> (56 - 8 * i));
  return to_hex(b);
}

MacTag MacTag::from_bits(std::span<const std::uint8_t> bits) {
  if (bits.size() != 64) throw std::invalid_argument("MAC tag needs exactly 64 bits");
  std::uint64_t v = 0;
  for (auto b : bits) v = (v << 1) | (b & 1u);
  return MacTag(v);
}

Block128 aes128_encrypt_block(const MacKey& key, const Block128& in) {
  std::unique_ptr<EVP_CIPHER_CTX, CipherCtxDeleter> ctx(EVP_CIPHER_CTX_new());
  if (!ctx || EVP_EncryptInit_ex(ctx.get(), EVP_aes_128_ecb(), nullptr, key.bytes().data(), nullptr) != 1)
    throw std::runtime_error("AES-128 initialisation failed");
  EVP_CIPHER_CTX_set_padding(ctx.get(), 0);
  Block128 out{};
  int len = 0;
  if (EVP_EncryptUpdate(ctx.get(), out.data(), &len, in.data(), static_cast<int>(in.size())) != 1 || len != 16)
    throw std::runtime_error("AES-128 block encryption failed");
  return out;
}

Block128 gf128_double(const Block128& b) {
  Block128 out{};
  const bool msb = (b[0] & 0x80) != 0;
  for (std::size_t i = 0; i < 16; ++i) {
    out[i] = static_cast<std::uint8_t>(b[i] << 1);
    if (i + 1 < 16) out[i] |= static_cast<std::uint8_t>(b[i + 1] >> 7);
  }
  if (msb) out[15] ^= 0x87;
  return out;
}

CmacSubkeys cmac_subkeys(const MacKey& key) {
  const Block128 l = aes128_encrypt_block(key, Block128{});
  CmacSubkeys s;
  s.k1 = gf128_double(l);
  s.k2 = gf128_double(s.k1);
  return s;
}

Block128 cmac_tag(const MacKey& key, std::span<const std::uint8_t> msg) {
  const auto sub = cmac_subkeys(key);
  const std::size_t n_blocks = msg.empty() ? 1 : (msg.size() + 15) / 16;
  const bool complete = !msg.empty() && msg.size() % 16 == 0;

  Block128 state{};
  for (std::size_t blk = 0; blk + 1 < n_blocks; ++blk) {
    Block128 m{};
    std::copy_n(msg.begin() + static_cast<std::ptrdiff_t>(blk * 16), 16, m.begin());
    xor_into(state, m);
    state = aes128_encrypt_block(key, state);
  }

  Block128 last{};
  const std::size_t off = (n_blocks - 1) * 16;
  const std::size_t rem = msg.size() - off;
  std::copy_n(msg.begin() + static_cast<std::ptrdiff_t>(off), rem, last.begin());
  if (complete) {
    xor_into(last, sub.k1);
  } else {
    last[rem] = 0x80;
    xor_into(last, sub.k2);
  }
  xor_into(state, last);
  return aes128_encrypt_block(key, state);
}

MacTag truncate_tag(const Block128& full) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v = (v << 8) | full[static_cast<std::size_t>(i)];
  return MacTag(v);
}

bool tags_equal(MacTag a, MacTag b) {
  // Fold the whole difference before deciding.
  std::uint64_t diff = a.value() ^ b.value();
  diff |= diff >> 32;
  diff |= diff >> 16;
  diff |= diff >> 8;
  diff |= diff >> 4;
  diff |= diff >> 2;
  diff |= diff >> 1;
  return (diff & 1u) == 0;
}

bool verify_tag(const MacKey& key, std::span<const std::uint8_t> msg, MacTag received) {
  return tags_equal(truncate_tag(cmac_tag(key, msg)), received);
}

std::vector<std::uint8_t> auth_message(std::uint8_t pid, std::span<const std::uint8_t> data,
                                       const MacProfile& profile) {
  std::vector<std::uint8_t> m;
  m.reserve(1 + data.size() + 4);
  m.push_back(pid);
  m.insert(m.end(), data.begin(), data.end());
  if (profile.freshness_counter) {
    for (int shift = 24; shift >= 0; shift -= 8)
      m.push_back(static_cast<std::uint8_t>(profile.counter >> shift));
  }
  return m;
}

MacTag compute_mac(const MacKey& key, std::uint8_t pid, std::span<const std::uint8_t> data,
                   const MacProfile& profile) {
  return truncate_tag(cmac_tag(key, auth_message(pid, data, profile)));
}

}  // namespace linmm
