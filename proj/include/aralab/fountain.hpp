#pragma once

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "aralab/rng.hpp"

namespace aralab::fountain {

inline constexpr int kMaxSourceSymbols = 256;

struct SourceBlock {
  std::uint32_t block_id = 0;
  int k = 0;
  std::size_t symbol_size = 0;
  std::vector<std::uint8_t> payload;  // k * symbol_size bytes

  /// Splits `data` into symbols, zero-padding the last one.
  static SourceBlock from_bytes(std::uint32_t block_id, const std::vector<std::uint8_t>& data,
                                std::size_t symbol_size);
};

void validate(const SourceBlock& b);

enum class SymbolKind { systematic, repair };

struct EncodedSymbol {
  std::uint32_t block_id = 0;
  std::uint32_t symbol_id = 0;
  SymbolKind kind = SymbolKind::systematic;
  std::vector<std::uint8_t> coefficients;  // length k
  std::vector<std::uint8_t> data;          // length symbol_size
  bool operator==(const EncodedSymbol&) const = default;
};

/// Coefficients of a repair symbol: a pure function of the code seed,
/// block and symbol id. Every entry is nonzero.
std::vector<std::uint8_t> repair_coefficients(std::uint64_t code_seed, std::uint32_t block_id,
                                              std::uint32_t symbol_id, int k);

/// Symbol ids below k are systematic; any id at or above k is a repair
/// symbol, so the stream can always be extended.
EncodedSymbol encode_symbol(const SourceBlock& block, std::uint32_t symbol_id, std::uint64_t code_seed);

/// The first n symbols of the block's stream; the code seed is derived
/// from the rng's identity, so equal streams give equal symbols.
std::vector<EncodedSymbol> encode_block(const SourceBlock& block, std::size_t n_symbols, const RngStream& rng);
std::uint64_t code_seed_of(const RngStream& rng);

struct NeedMore {
  int deficit = 0;
};

/// Incremental Gaussian elimination over GF(256).
class BlockDecoder {
public:
  BlockDecoder(std::uint32_t block_id, int k, std::size_t symbol_size);

  /// Returns true when the symbol raised the rank. Throws on metadata
  /// that does not match the block.
  bool add(const EncodedSymbol& symbol);
  /// Same, for a symbol described by coefficients and data only.
  bool add(const std::uint8_t* coefficients, const std::uint8_t* data);

  int rank() const { return rank_; }
  int k() const { return k_; }
  bool complete() const { return rank_ == k_; }
  /// Decoded payload; requires complete().
  std::vector<std::uint8_t> payload() const;

private:
  std::uint32_t block_id_;
  int k_;
  std::size_t symbol_size_;
  int rank_ = 0;
  // rows_[p] has its leading one at column p; coefficient block then data.
  std::vector<std::vector<std::uint8_t>> rows_;
  std::vector<bool> present_;
  std::vector<std::uint8_t> scratch_;
};

/// Decodes any subset of one block's symbols.
std::variant<std::vector<std::uint8_t>, NeedMore> decode_block(const std::vector<EncodedSymbol>& symbols);

}  // namespace aralab::fountain
