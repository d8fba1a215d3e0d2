#include <doctest.h>

#include <variant>

#include "aralab/error.hpp"
#include "aralab/fountain.hpp"
#include "aralab/gf256.hpp"

using namespace aralab;
using namespace aralab::fountain;

namespace {

// Bitwise carry-less multiply reduced by x^8 + x^4 + x^3 + x^2 + 1.
std::uint8_t slow_mul(std::uint8_t a, std::uint8_t b) {
  unsigned r = 0, x = a;
  for (int i = 0; i < 8; ++i)
    if (b & (1u << i)) r ^= x << i;
  for (int bit = 15; bit >= 8; --bit)
    if (r & (1u << bit)) r ^= 0x11du << (bit - 8);
  return static_cast<std::uint8_t>(r);
}

std::vector<std::uint8_t> random_bytes(RngStream& rng, std::size_t n) {
  std::vector<std::uint8_t> v(n);
  for (auto& b : v) b = static_cast<std::uint8_t>(rng.below(256));
  return v;
}

}  // namespace

TEST_CASE("GF(256) matches carry-less multiplication") {
  for (unsigned a = 0; a < 256; ++a)
    for (unsigned b = 0; b < 256; ++b) REQUIRE(gf256::mul(a, b) == slow_mul(a, b));
}

TEST_CASE("GF(256) field axioms") {
  for (unsigned a = 1; a < 256; ++a) {
    const auto ia = gf256::inv(static_cast<std::uint8_t>(a));
    CHECK(gf256::mul(a, ia) == 1);
    CHECK(gf256::div(a, a) == 1);
  }
  CHECK_THROWS(gf256::inv(0));
  RngStream rng(1);
  for (int i = 0; i < 2000; ++i) {
    const auto a = static_cast<std::uint8_t>(rng.below(256));
    const auto b = static_cast<std::uint8_t>(rng.below(256));
    const auto c = static_cast<std::uint8_t>(rng.below(256));
    CHECK(gf256::mul(a, gf256::add(b, c)) == gf256::add(gf256::mul(a, b), gf256::mul(a, c)));
    CHECK(gf256::mul(gf256::mul(a, b), c) == gf256::mul(a, gf256::mul(b, c)));
  }
  std::vector<std::uint8_t> dst{1, 2, 3}, src{4, 5, 6};
  gf256::axpy(dst.data(), src.data(), 7, 3);
  for (int i = 0; i < 3; ++i) CHECK(dst[i] == static_cast<std::uint8_t>((i + 1) ^ slow_mul(7, i + 4)));
}

TEST_CASE("source block padding and limits") {
  const auto b = SourceBlock::from_bytes(3, std::vector<std::uint8_t>(1001, 9), 100);
  CHECK(b.k == 11);
  CHECK(b.payload.size() == 1100);
  CHECK(b.payload[1000] == 9);
  CHECK(b.payload[1001] == 0);
  CHECK_THROWS_AS(SourceBlock::from_bytes(0, std::vector<std::uint8_t>(257, 1), 1), ValidationError);
  CHECK_THROWS_AS(SourceBlock::from_bytes(0, {}, 10), ValidationError);
}

TEST_CASE("systematic symbols decode directly") {
  RngStream rng(2);
  const auto b = SourceBlock::from_bytes(0, random_bytes(rng, 640), 64);
  const auto syms = encode_block(b, 10, rng);
  for (const auto& s : syms) CHECK(s.kind == SymbolKind::systematic);
  const auto out = decode_block(syms);
  REQUIRE(std::holds_alternative<std::vector<std::uint8_t>>(out));
  CHECK(std::get<std::vector<std::uint8_t>>(out) == b.payload);
}

TEST_CASE("repair coefficients are deterministic and nonzero") {
  const auto a = repair_coefficients(5, 1, 40, 32);
  CHECK(a == repair_coefficients(5, 1, 40, 32));
  CHECK(a != repair_coefficients(5, 1, 41, 32));
  for (auto c : a) CHECK(c != 0);
}

TEST_CASE("K random repair symbols almost always decode") {
  RngStream rng(7);
  int ok = 0;
  for (int t = 0; t < 1000; ++t) {
    const auto b = SourceBlock::from_bytes(t, random_bytes(rng, 32 * 16), 16);
    const auto seed = rng.next_u64();
    std::vector<EncodedSymbol> syms;
    for (int i = 0; i < 32; ++i) syms.push_back(encode_symbol(b, 32 + i + 100 * static_cast<std::uint32_t>(t % 7), seed));
    const auto out = decode_block(syms);
    if (auto* p = std::get_if<std::vector<std::uint8_t>>(&out)) ok += *p == b.payload;
  }
  CHECK(ok >= 990);
}

TEST_CASE("mixed subsets decode bit-exactly") {
  RngStream rng(11);
  for (int t = 0; t < 300; ++t) {
    const std::size_t sym = 1 + rng.below(64);
    const auto data = random_bytes(rng, 1 + rng.below(sym * 256));
    const auto b = SourceBlock::from_bytes(t, data, sym);
    auto syms = encode_block(b, static_cast<std::size_t>(b.k) * 2 + 4, rng.fork(t));
    for (std::size_t i = syms.size(); i > 1; --i) std::swap(syms[i - 1], syms[rng.below(i)]);
    BlockDecoder dec(t, b.k, sym);
    for (const auto& s : syms) {
      dec.add(s);
      if (dec.complete()) break;
    }
    REQUIRE(dec.complete());
    auto out = dec.payload();
    CHECK(out == b.payload);
    out.resize(data.size());
    CHECK(out == data);
  }
}

TEST_CASE("too few symbols report the deficit") {
  RngStream rng(4);
  const auto b = SourceBlock::from_bytes(0, random_bytes(rng, 200), 20);
  auto syms = encode_block(b, 14, rng);
  syms.erase(syms.begin(), syms.begin() + 7);  // 3 systematic + 4 repair left
  const auto out = decode_block(syms);
  REQUIRE(std::holds_alternative<NeedMore>(out));
  CHECK(std::get<NeedMore>(out).deficit == 3);
  // A duplicate never raises the rank.
  BlockDecoder dec(0, b.k, 20);
  CHECK(dec.add(syms[0]));
  CHECK_FALSE(dec.add(syms[0]));
  CHECK_THROWS_AS(dec.payload(), Error);
  EncodedSymbol other = syms[0];
  other.block_id = 9;
  CHECK_THROWS_AS(dec.add(other), ValidationError);
}
