#pragma once

// Authenticated encryption of suspicious-state records before they are
// forwarded to the cloud sink. XChaCha20-Poly1305 (libsodium), detached tag;
// key id, device id and timestamp travel in clear and are bound as
// associated data.

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sentinel/collector.hpp"

namespace sentinel {

using Bytes = std::vector<std::uint8_t>;

inline constexpr std::size_t kSealKeyBytes = 32;
inline constexpr std::size_t kSealNonceBytes = 24;
inline constexpr std::size_t kSealTagBytes = 16;

class IntegrityFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SealKey {
  std::array<std::uint8_t, kSealKeyBytes> bytes{};
  std::string key_id;

  static SealKey from_hex(const std::string& hex);
  /// Deterministic scenario key for configs that do not pin one.
  static SealKey derive_from_seed(std::uint64_t seed);
};

struct SealedRecord {
  std::string key_id;
  std::string device_id;
  TimeMs timestamp_ms = 0;
  std::array<std::uint8_t, kSealNonceBytes> nonce{};
  Bytes ciphertext;
  std::array<std::uint8_t, kSealTagBytes> tag{};

  bool operator==(const SealedRecord&) const = default;

  /// Binary form stored in the cloud sink.
  Bytes encode() const;
  static SealedRecord decode(std::span<const std::uint8_t> bytes);
};

/// Seals with a fresh random nonce.
SealedRecord seal(const CleanRecord& record, const SealKey& key);
/// Throws IntegrityFailure on any tampering or a wrong key.
CleanRecord unseal(const SealedRecord& sealed, const SealKey& key);

/// Nonce = 16-byte stream prefix || 64-bit call counter. Every call gets a
/// distinct nonce and the sequence is reproducible for a given prefix.
class Sealer {
 public:
  Sealer(SealKey key, std::array<std::uint8_t, 16> nonce_prefix);

  SealedRecord seal(const CleanRecord& record);
  const SealKey& key() const { return key_; }

 private:
  SealKey key_;
  std::array<std::uint8_t, 16> prefix_;
  std::uint64_t counter_ = 0;
};

/// 4-byte big-endian length followed by the encoded SealedRecord.
void append_frame(Bytes& out, const SealedRecord& sealed);
std::vector<SealedRecord> read_frames(std::span<const std::uint8_t> data);

/// SHA-256 as lowercase hex.
std::string sha256_hex(std::span<const std::uint8_t> data);
std::string sha256_hex(std::string_view text);

}  // namespace sentinel
