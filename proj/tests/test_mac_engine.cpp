#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "linmm/mac_engine.hpp"

#include <openssl/core_names.h>
#include <openssl/evp.h>
#include <openssl/params.h>

#include <random>
#include <set>

using namespace linmm;

namespace {

const char* kKey = "2b7e151628aed2a6abf7158809cf4f3c";
const char* kMsg64 =
    "6bc1bee22e409f96e93d7e117393172aae2d8a571e03ac9c9eb76fac45af8e51"
    "30c81c46a35ce411e5fbc1191a0a52eff69f2445df4f9b17ad2b417be66c3710";

Block128 block(std::string_view hex) {
  const auto v = from_hex(hex);
  Block128 b{};
  std::copy(v.begin(), v.end(), b.begin());
  return b;
}

// OpenSSL's own CMAC, used only as a reference.
Block128 openssl_cmac(const MacKey& key, std::span<const std::uint8_t> msg) {
  EVP_MAC* mac = EVP_MAC_fetch(nullptr, "CMAC", nullptr);
  EVP_MAC_CTX* ctx = EVP_MAC_CTX_new(mac);
  char cipher[] = "AES-128-CBC";
  OSSL_PARAM params[] = {OSSL_PARAM_construct_utf8_string(OSSL_MAC_PARAM_CIPHER, cipher, 0), OSSL_PARAM_construct_end()};
  Block128 out{};
  size_t len = 0;
  const bool ok = EVP_MAC_init(ctx, key.bytes().data(), 16, params) == 1 &&
                  EVP_MAC_update(ctx, msg.data(), msg.size()) == 1 && EVP_MAC_final(ctx, out.data(), &len, 16) == 1;
  EVP_MAC_CTX_free(ctx);
  EVP_MAC_free(mac);
  REQUIRE(ok);
  REQUIRE(len == 16);
  return out;
}

MacKey random_key(std::mt19937_64& eng) {
  Block128 b{};
  for (auto& x : b) x = static_cast<std::uint8_t>(eng());
  return MacKey(b);
}

}  // namespace

TEST_CASE("subkeys match the published example") {
  const auto key = MacKey::from_hex(kKey);
  CHECK(aes128_encrypt_block(key, Block128{}) == block("7df76b0c1ab899b33e42f047b91b546f"));
  const auto sk = cmac_subkeys(key);
  CHECK(sk.k1 == block("fbeed618357133667c85e08f7236a8de"));
  CHECK(sk.k2 == block("f7ddac306ae266ccf90bc11ee46d513b"));
}

TEST_CASE("CMAC known-answer vectors") {
  const auto key = MacKey::from_hex(kKey);
  const auto msg = from_hex(kMsg64);
  const std::span<const std::uint8_t> m(msg);
  CHECK(cmac_tag(key, m.first(0)) == block("bb1d6929e95937287fa37d129b756746"));
  CHECK(cmac_tag(key, m.first(16)) == block("070a16b46b4d4144f79bdd9dd04a287c"));
  CHECK(cmac_tag(key, m.first(40)) == block("dfa66747de9ae63030ca32611497c827"));
  CHECK(cmac_tag(key, m.first(64)) == block("51f0bebf7e3b9d92fc49741779363cfe"));
  CHECK(truncate_tag(cmac_tag(key, m.first(16))).hex() == "070a16b46b4d4144");
}

TEST_CASE("CMAC agrees with the OpenSSL reference on random messages") {
  std::mt19937_64 eng(3);
  for (int i = 0; i < 500; ++i) {
    const auto key = random_key(eng);
    std::vector<std::uint8_t> msg(static_cast<std::size_t>(eng() % 70));
    for (auto& b : msg) b = static_cast<std::uint8_t>(eng());
    REQUIRE(cmac_tag(key, msg) == openssl_cmac(key, msg));
  }
}

TEST_CASE("a complete final block takes the K1 branch") {
  const auto key = MacKey::from_hex(kKey);
  const auto msg = from_hex("6bc1bee22e409f96e93d7e117393172a");
  const auto sk = cmac_subkeys(key);
  Block128 x{};
  for (int i = 0; i < 16; ++i) x[i] = static_cast<std::uint8_t>(msg[i] ^ sk.k1[i]);
  CHECK(cmac_tag(key, msg) == aes128_encrypt_block(key, x));
}

TEST_CASE("gf128_double") {
  SUBCASE("msb clear is a plain left shift") {
    auto b = block("0123456789abcdef0123456789abcdef");
    auto d = gf128_double(b);
    CHECK(d == block("02468acf13579bde02468acf13579bde"));
  }
  SUBCASE("msb set folds in 0x87") {
    auto d = gf128_double(block("80000000000000000000000000000000"));
    CHECK(d == block("00000000000000000000000000000087"));
  }
  SUBCASE("K2 is the double of K1") {
    std::mt19937_64 eng(11);
    for (int i = 0; i < 100; ++i) {
      const auto sk = cmac_subkeys(random_key(eng));
      CHECK(sk.k2 == gf128_double(sk.k1));
    }
  }
}

TEST_CASE("transmission order is most significant bit first") {
  const MacTag t(0x8000000000000001ull);
  CHECK(t.bit(0) == 1);
  CHECK(t.bit(1) == 0);
  CHECK(t.bit(63) == 1);
  std::vector<std::uint8_t> bits(64);
  for (int i = 0; i < 64; ++i) bits[i] = static_cast<std::uint8_t>(t.bit(i));
  CHECK(MacTag::from_bits(bits) == t);
  CHECK_THROWS(MacTag::from_bits(std::span<const std::uint8_t>(bits).first(63)));
}

TEST_CASE("verification rejects every single-bit flip") {
  const auto key = MacKey::from_hex(kKey);
  const std::vector<std::uint8_t> data{1, 2, 3, 4, 5, 6, 7, 8};
  const auto msg = auth_message(0x50, data);
  const auto tag = compute_mac(key, 0x50, data);
  CHECK(verify_tag(key, msg, tag));
  for (int i = 0; i < 64; ++i) CHECK_FALSE(verify_tag(key, msg, MacTag(tag.value() ^ (1ull << i))));
}

TEST_CASE("distinct keys give distinct tags on a fixed message") {
  std::mt19937_64 eng(5);
  const std::vector<std::uint8_t> data{0xde, 0xad, 0xbe, 0xef};
  std::set<std::uint64_t> tags;
  for (int i = 0; i < 1000; ++i) tags.insert(compute_mac(random_key(eng), 0x50, data).value());
  CHECK(tags.size() == 1000);
}

TEST_CASE("verify accepts exactly the computed tag") {
  std::mt19937_64 eng(17);
  for (int i = 0; i < 1000; ++i) {
    const auto key = random_key(eng);
    std::vector<std::uint8_t> data(1 + eng() % 8);
    for (auto& b : data) b = static_cast<std::uint8_t>(eng());
    const auto pid = static_cast<std::uint8_t>(eng());
    const auto tag = compute_mac(key, pid, data);
    REQUIRE(verify_tag(key, auth_message(pid, data), tag));
    REQUIRE_FALSE(verify_tag(key, auth_message(pid, data), MacTag(tag.value() ^ (1ull << (eng() % 64)))));
  }
}

TEST_CASE("authenticated message layout") {
  const std::vector<std::uint8_t> data{0xaa, 0xbb};
  CHECK(auth_message(0x50, data) == std::vector<std::uint8_t>{0x50, 0xaa, 0xbb});
  MacProfile p{true, 0x01020304};
  CHECK(auth_message(0x50, data, p) == std::vector<std::uint8_t>{0x50, 0xaa, 0xbb, 1, 2, 3, 4});
  CHECK(compute_mac(MacKey::from_hex(kKey), 0x50, data, p) != compute_mac(MacKey::from_hex(kKey), 0x50, data));
}

TEST_CASE("key parsing") {
  CHECK_THROWS(MacKey::from_hex("2b7e"));
  CHECK_THROWS(MacKey::from_hex("zz7e151628aed2a6abf7158809cf4f3c"));
  CHECK(to_hex(MacKey::from_hex(kKey).bytes()) == kKey);
}
