#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "linmm/run_config.hpp"

#include <sstream>

using namespace linmm;

namespace {

const std::string kBase =
    "mac.key = 2b7e151628aed2a6abf7158809cf4f3c\n"
    "node.door.ids = 0x10\n"
    "node.door.data = 0123456789abcdef\n"
    "transaction.id = 0x10\n";

RunConfig from_text(const std::string& text) {
  std::istringstream in(text);
  return build_run_config(parse_key_values(in));
}

}  // namespace

TEST_CASE("key-value parsing") {
  std::istringstream in("# comment\n  a.b = 1  # trailing\n\nc = x y\n");
  const auto kv = parse_key_values(in);
  CHECK(kv.at("a.b") == "1");
  CHECK(kv.at("c") == "x y");
  std::istringstream dup("a = 1\na = 2\n");
  CHECK_THROWS_AS(parse_key_values(dup), ConfigError);
  std::istringstream junk("just words\n");
  CHECK_THROWS_AS(parse_key_values(junk), ConfigError);
}

TEST_CASE("a minimal configuration builds with defaults") {
  const auto rc = from_text(kBase);
  CHECK(rc.request_id == 0x10);
  REQUIRE(rc.topology.nodes.size() == 2);
  CHECK(rc.topology.master().capability == Capability::lin_mm);
  CHECK(rc.topology.responder(0x10)->key == std::optional<MacKey>(MacKey::from_hex("2b7e151628aed2a6abf7158809cf4f3c")));
  CHECK(rc.phy.f_c == 100000.0);
  CHECK(rc.scenario.type == AttackType::none);
  CHECK(rc.sweep.sigmas == std::vector<double>{0.0});
}

TEST_CASE("configuration errors") {
  CHECK_THROWS_AS(from_text(kBase + "phy.bogus = 1\n"), ConfigError);
  CHECK_THROWS_AS(from_text(kBase + "phy.filter_low_hz = 130000\n"), ConfigError);
  CHECK_THROWS_AS(from_text(kBase + "phy.sample_rate_hz = 500000\n"), ConfigError);
  CHECK_THROWS_AS(from_text(kBase + "phy.a_c_v = 3.0\n"), ConfigError);
  CHECK_THROWS_AS(from_text(kBase + "phy.f_c_hz = abc\n"), ConfigError);
  CHECK_THROWS_AS(from_text(kBase + "frame.break_bits = 12\n"), ConfigError);
  CHECK_THROWS_AS(from_text(kBase + "noise.sigma_v = -0.1\n"), ConfigError);
  CHECK_THROWS_AS(from_text(kBase + "sweep.data_len = 5\n"), ConfigError);
  CHECK_THROWS_AS(from_text(kBase + "transaction.id = 0x40\n"), ConfigError);
  CHECK_THROWS_AS(from_text(kBase + "expect.mac = maybe\n"), ConfigError);
  CHECK_THROWS_AS(from_text("mac.key = 2b7e\nnode.door.ids = 0x10\nnode.door.data = 01020304050607\n"), ConfigError);
}

TEST_CASE("legacy nodes drop the network key") {
  const auto rc = from_text(kBase + "node.door.capability = legacy_lin\n");
  CHECK_FALSE(rc.topology.responder(0x10)->key.has_value());
}

TEST_CASE("expectations against a report") {
  const auto rc = from_text(kBase + "expect.outcome = none\nexpect.mac = pass\nexpect.checksum = pass\n");
  SimReport r;
  r.outcome = Outcome::none;
  r.mac_verdict = MacVerdict::pass;
  r.checksum_verdict = ParseStatus::ok;
  CHECK(check_expectations(rc.expect, r).empty());
  r.mac_verdict = MacVerdict::fail;
  CHECK(check_expectations(rc.expect, r).size() == 1);
}

TEST_CASE("canonical text is order independent and hashable") {
  const auto a = from_text(kBase + "noise.seed = 3\n");
  const auto b = from_text("noise.seed = 3\n" + kBase);
  CHECK(a.canonical == b.canonical);
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}
