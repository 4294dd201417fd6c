#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "chainml/rng.hpp"
#include "chainml/sha256.hpp"

using namespace chainml;

// Reference outputs computed with an independent implementation of the
// published algorithms.
TEST_CASE("splitmix64 known answers") {
  SplitMix64 sm0(0);
  CHECK(sm0.next() == 0xe220a8397b1dcdafull);
  CHECK(sm0.next() == 0x6e789e6aa1b965f4ull);
  CHECK(sm0.next() == 0x06c45d188009454full);
  CHECK(sm0.next() == 0xf88bb8a8724c81ecull);

  SplitMix64 sm42(42);
  CHECK(sm42.next() == 0xbdd732262feb6e95ull);
  CHECK(sm42.next() == 0x28efe333b266f103ull);
}

TEST_CASE("xoshiro256** known answers") {
  Xoshiro256 g0(0);
  CHECK(g0.next() == 0x99ec5f36cb75f2b4ull);
  CHECK(g0.next() == 0xbf6e1f784956452aull);
  CHECK(g0.next() == 0x1a5f849d4933e6e0ull);
  CHECK(g0.next() == 0x6aa594f1262d2d2cull);
  CHECK(g0.next() == 0xbba5ad4a1f842e59ull);

  Xoshiro256 g(12345);
  CHECK(g.next() == 0xbe6a36374160d49bull);
  CHECK(g.next() == 0x214aaa0637a688c6ull);
}

TEST_CASE("bounded draws and distinct sampling") {
  Xoshiro256 g(7);
  const std::vector<std::uint64_t> expect = {94, 74, 38, 64, 64, 21, 16, 96, 8, 19, 3, 96};
  for (const auto e : expect) CHECK(g.bounded(100) == e);

  Xoshiro256 g2(99);
  auto pick = g2.sample_distinct(10, 100);
  std::sort(pick.begin(), pick.end());
  CHECK(pick == std::vector<std::uint32_t>{1, 8, 24, 39, 43, 68, 81, 83, 88, 93});
  CHECK(std::set<std::uint32_t>(pick.begin(), pick.end()).size() == 10);
}

TEST_CASE("sha256 standard vectors") {
  CHECK(hex(sha256("abc")) ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(hex(sha256("")) ==
        "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(hex(sha256("abcdbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnopnopq")) ==
        "248d6a61d20638b8e5c026930c3e6039a33ce45964ff2167f6ecedd419db06c1");
  // incremental hashing matches one-shot
  Sha256 h;
  const std::string m = "abcdbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnopnopq";
  for (const char c : m) h.update(&c, 1);
  CHECK(hex(h.finish()) == hex(sha256(m)));
}

TEST_CASE("digest seed folding is little-endian over the first 8 bytes") {
  Digest d{};
  for (int i = 0; i < 8; ++i) d[i] = static_cast<std::uint8_t>(i + 1);
  CHECK(digest_seed64(d) == 0x0807060504030201ull);
}
