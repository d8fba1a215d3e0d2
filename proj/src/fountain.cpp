#include "aralab/fountain.hpp"

#include <algorithm>
#include <cstring>

#include "aralab/error.hpp"
#include "aralab/gf256.hpp"

namespace aralab::fountain {

SourceBlock SourceBlock::from_bytes(std::uint32_t block_id, const std::vector<std::uint8_t>& data,
                                    std::size_t symbol_size) {
  if (symbol_size == 0) throw ValidationError("symbol size must be > 0");
  if (data.empty()) throw ValidationError("source block needs data");
  SourceBlock b;
  b.block_id = block_id;
  b.symbol_size = symbol_size;
  b.k = static_cast<int>((data.size() + symbol_size - 1) / symbol_size);
  b.payload = data;
  b.payload.resize(static_cast<std::size_t>(b.k) * symbol_size, 0);
  validate(b);
  return b;
}

void validate(const SourceBlock& b) {
  if (b.k < 1 || b.k > kMaxSourceSymbols) throw ValidationError("K must be in [1, 256]");
  if (b.symbol_size == 0) throw ValidationError("symbol size must be > 0");
  if (b.payload.size() != static_cast<std::size_t>(b.k) * b.symbol_size)
    throw ValidationError("payload length must equal K * symbol_size");
}

std::vector<std::uint8_t> repair_coefficients(std::uint64_t code_seed, std::uint32_t block_id,
                                              std::uint32_t symbol_id, int k) {
  std::vector<std::uint8_t> c(static_cast<std::size_t>(k));
  std::uint64_t state = hash_words(code_seed, block_id, symbol_id, 0x5eedc0deULL);
  std::uint64_t word = 0;
  int left = 0;
  for (auto& v : c) {
    do {
      if (left == 0) {
        word = splitmix64(state);
        left = 8;
      }
      v = static_cast<std::uint8_t>(word & 0xff);
      word >>= 8;
      --left;
    } while (v == 0);
  }
  return c;
}

EncodedSymbol encode_symbol(const SourceBlock& block, std::uint32_t symbol_id, std::uint64_t code_seed) {
  const auto k = static_cast<std::size_t>(block.k);
  EncodedSymbol s;
  s.block_id = block.block_id;
  s.symbol_id = symbol_id;
  s.data.assign(block.symbol_size, 0);
  if (symbol_id < k) {
    s.kind = SymbolKind::systematic;
    s.coefficients.assign(k, 0);
    s.coefficients[symbol_id] = 1;
    std::memcpy(s.data.data(), block.payload.data() + symbol_id * block.symbol_size, block.symbol_size);
  } else {
    s.kind = SymbolKind::repair;
    s.coefficients = repair_coefficients(code_seed, block.block_id, symbol_id, block.k);
    for (std::size_t i = 0; i < k; ++i)
      gf256::axpy(s.data.data(), block.payload.data() + i * block.symbol_size, s.coefficients[i], block.symbol_size);
  }
  return s;
}

std::uint64_t code_seed_of(const RngStream& rng) { return hash_words(rng.seed(), rng.stream_id()); }

std::vector<EncodedSymbol> encode_block(const SourceBlock& block, std::size_t n_symbols, const RngStream& rng) {
  validate(block);
  if (n_symbols < static_cast<std::size_t>(block.k)) throw ValidationError("n_symbols must be >= K");
  const std::uint64_t seed = code_seed_of(rng);
  std::vector<EncodedSymbol> out;
  out.reserve(n_symbols);
  for (std::size_t i = 0; i < n_symbols; ++i) out.push_back(encode_symbol(block, static_cast<std::uint32_t>(i), seed));
  return out;
}

BlockDecoder::BlockDecoder(std::uint32_t block_id, int k, std::size_t symbol_size)
    : block_id_(block_id), k_(k), symbol_size_(symbol_size) {
  if (k < 1 || k > kMaxSourceSymbols) throw ValidationError("K must be in [1, 256]");
  if (symbol_size == 0) throw ValidationError("symbol size must be > 0");
  rows_.resize(static_cast<std::size_t>(k));
  present_.assign(static_cast<std::size_t>(k), false);
  scratch_.resize(static_cast<std::size_t>(k) + symbol_size);
}

bool BlockDecoder::add(const EncodedSymbol& s) {
  if (s.block_id != block_id_) throw ValidationError("symbol belongs to another block");
  if (s.coefficients.size() != static_cast<std::size_t>(k_) || s.data.size() != symbol_size_)
    throw ValidationError("symbol K or symbol size does not match the block");
  return add(s.coefficients.data(), s.data.data());
}

bool BlockDecoder::add(const std::uint8_t* coefficients, const std::uint8_t* data) {
  if (complete()) return false;
  const auto k = static_cast<std::size_t>(k_);
  const std::size_t width = k + symbol_size_;
  std::uint8_t* row = scratch_.data();
  std::memcpy(row, coefficients, k);
  std::memcpy(row + k, data, symbol_size_);
  for (std::size_t p = 0; p < k; ++p) {
    const std::uint8_t c = row[p];
    if (c == 0) continue;
    if (present_[p]) {
      // Pivot rows have zeros before p, so only the tail needs updating.
      gf256::axpy(row + p, rows_[p].data() + p, c, width - p);
      continue;
    }
    gf256::scale(row + p, gf256::inv(c), width - p);
    rows_[p].assign(row, row + width);
    present_[p] = true;
    ++rank_;
    return true;
  }
  return false;
}

std::vector<std::uint8_t> BlockDecoder::payload() const {
  if (!complete()) throw Error("block not decodable yet");
  const auto k = static_cast<std::size_t>(k_);
  const std::size_t width = k + symbol_size_;
  auto rows = rows_;
  for (std::size_t c = k; c-- > 0;) {
    auto& r = rows[c];
    for (std::size_t j = c + 1; j < k; ++j)
      if (r[j] != 0) gf256::axpy(r.data() + j, rows[j].data() + j, r[j], width - j);
  }
  std::vector<std::uint8_t> out(k * symbol_size_);
  for (std::size_t c = 0; c < k; ++c) std::memcpy(out.data() + c * symbol_size_, rows[c].data() + k, symbol_size_);
  return out;
}

std::variant<std::vector<std::uint8_t>, NeedMore> decode_block(const std::vector<EncodedSymbol>& symbols) {
  if (symbols.empty()) throw ValidationError("no symbols to decode");
  const auto& first = symbols.front();
  const int k = static_cast<int>(first.coefficients.size());
  for (const auto& s : symbols)
    if (s.block_id != first.block_id || s.coefficients.size() != first.coefficients.size() ||
        s.data.size() != first.data.size())
      throw ValidationError("symbols disagree on block id, K or symbol size");
  BlockDecoder dec(first.block_id, k, first.data.size());
  for (const auto& s : symbols) {
    dec.add(s);
    if (dec.complete()) break;
  }
  if (!dec.complete()) return NeedMore{k - dec.rank()};
  return dec.payload();
}

}  // namespace aralab::fountain
