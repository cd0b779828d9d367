#include "sentinel/sealing.hpp"

#include <sodium.h>

#include <cstring>
#include <mutex>

#include "sentinel/json_io.hpp"

namespace sentinel {

namespace {

void ensure_sodium() {
  static std::once_flag once;
  std::call_once(once, [] {
    if (sodium_init() < 0) throw std::runtime_error("libsodium initialisation failed");
  });
}

std::string to_hex(std::span<const std::uint8_t> bytes) {
  std::string out(bytes.size() * 2 + 1, '\0');
  sodium_bin2hex(out.data(), out.size(), bytes.data(), bytes.size());
  out.pop_back();
  return out;
}

std::string key_id_for(const std::array<std::uint8_t, kSealKeyBytes>& key) {
  std::array<std::uint8_t, 8> id{};
  crypto_generichash(id.data(), id.size(), key.data(), key.size(), nullptr, 0);
  return to_hex(id);
}

Bytes associated_data(const std::string& key_id, const std::string& device_id, TimeMs ts) {
  Json ad = {key_id, device_id, ts};
  const auto text = ad.dump();
  return Bytes(text.begin(), text.end());
}

void put_u16(Bytes& out, std::size_t v) {
  if (v > 0xFFFF) throw std::length_error("field too long for sealed record");
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

void put_u32(Bytes& out, std::uint64_t v) {
  if (v > 0xFFFFFFFFu) throw std::length_error("frame too long");
  for (int s = 24; s >= 0; s -= 8) out.push_back(static_cast<std::uint8_t>(v >> s));
}

void put_u64(Bytes& out, std::uint64_t v) {
  for (int s = 56; s >= 0; s -= 8) out.push_back(static_cast<std::uint8_t>(v >> s));
}

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> data) : data_(data) {}

  std::span<const std::uint8_t> take(std::size_t n) {
    if (n > data_.size() - pos_) throw std::invalid_argument("truncated sealed record");
    auto s = data_.subspan(pos_, n);
    pos_ += n;
    return s;
  }
  std::uint64_t uint(std::size_t width) {
    std::uint64_t v = 0;
    for (auto b : take(width)) v = (v << 8) | b;
    return v;
  }
  std::string str() {
    auto s = take(uint(2));
    return std::string(s.begin(), s.end());
  }
  bool done() const { return pos_ == data_.size(); }

 private:
  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
};

SealedRecord seal_with_nonce(const CleanRecord& record, const SealKey& key,
                             const std::array<std::uint8_t, kSealNonceBytes>& nonce) {
  ensure_sodium();
  SealedRecord out;
  out.key_id = key.key_id;
  out.device_id = record.event.device_id;
  out.timestamp_ms = record.event.timestamp_ms;
  out.nonce = nonce;

  const auto plain = canonical_dump(to_json(record));
  const auto ad = associated_data(out.key_id, out.device_id, out.timestamp_ms);
  out.ciphertext.resize(plain.size());
  unsigned long long tag_len = 0;
  crypto_aead_xchacha20poly1305_ietf_encrypt_detached(
      out.ciphertext.data(), out.tag.data(), &tag_len,
      reinterpret_cast<const unsigned char*>(plain.data()), plain.size(), ad.data(), ad.size(), nullptr,
      out.nonce.data(), key.bytes.data());
  return out;
}

}  // namespace

SealKey SealKey::from_hex(const std::string& hex) {
  ensure_sodium();
  SealKey k;
  std::size_t len = 0;
  if (hex.size() != kSealKeyBytes * 2 ||
      sodium_hex2bin(k.bytes.data(), k.bytes.size(), hex.data(), hex.size(), nullptr, &len, nullptr) != 0 ||
      len != kSealKeyBytes)
    throw std::invalid_argument("seal key must be 64 hex characters");
  k.key_id = key_id_for(k.bytes);
  return k;
}

SealKey SealKey::derive_from_seed(std::uint64_t seed) {
  ensure_sodium();
  const std::string material = "sentinel-seal-key:" + std::to_string(seed);
  SealKey k;
  crypto_generichash(k.bytes.data(), k.bytes.size(), reinterpret_cast<const unsigned char*>(material.data()),
                     material.size(), nullptr, 0);
  k.key_id = key_id_for(k.bytes);
  return k;
}

Bytes SealedRecord::encode() const {
  Bytes out;
  out.reserve(64 + key_id.size() + device_id.size() + ciphertext.size());
  put_u16(out, key_id.size());
  out.insert(out.end(), key_id.begin(), key_id.end());
  put_u16(out, device_id.size());
  out.insert(out.end(), device_id.begin(), device_id.end());
  put_u64(out, static_cast<std::uint64_t>(timestamp_ms));
  out.insert(out.end(), nonce.begin(), nonce.end());
  out.insert(out.end(), tag.begin(), tag.end());
  put_u32(out, ciphertext.size());
  out.insert(out.end(), ciphertext.begin(), ciphertext.end());
  return out;
}

SealedRecord SealedRecord::decode(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  SealedRecord s;
  s.key_id = r.str();
  s.device_id = r.str();
  s.timestamp_ms = static_cast<TimeMs>(r.uint(8));
  auto nonce = r.take(kSealNonceBytes);
  std::copy(nonce.begin(), nonce.end(), s.nonce.begin());
  auto tag = r.take(kSealTagBytes);
  std::copy(tag.begin(), tag.end(), s.tag.begin());
  auto ct = r.take(r.uint(4));
  s.ciphertext.assign(ct.begin(), ct.end());
  if (!r.done()) throw std::invalid_argument("trailing bytes in sealed record");
  return s;
}

SealedRecord seal(const CleanRecord& record, const SealKey& key) {
  ensure_sodium();
  std::array<std::uint8_t, kSealNonceBytes> nonce{};
  randombytes_buf(nonce.data(), nonce.size());
  return seal_with_nonce(record, key, nonce);
}

CleanRecord unseal(const SealedRecord& sealed, const SealKey& key) {
  ensure_sodium();
  if (sealed.key_id != key.key_id) throw IntegrityFailure("IntegrityFailure: key id mismatch");
  const auto ad = associated_data(sealed.key_id, sealed.device_id, sealed.timestamp_ms);
  std::string plain(sealed.ciphertext.size(), '\0');
  if (crypto_aead_xchacha20poly1305_ietf_decrypt_detached(
          reinterpret_cast<unsigned char*>(plain.data()), nullptr, sealed.ciphertext.data(),
          sealed.ciphertext.size(), sealed.tag.data(), ad.data(), ad.size(), sealed.nonce.data(),
          key.bytes.data()) != 0)
    throw IntegrityFailure("IntegrityFailure: authentication tag mismatch");
  try {
    return clean_record_from_json(Json::parse(plain));
  } catch (const std::exception& e) {
    throw IntegrityFailure(std::string("IntegrityFailure: undecodable payload: ") + e.what());
  }
}

Sealer::Sealer(SealKey key, std::array<std::uint8_t, 16> nonce_prefix)
    : key_(std::move(key)), prefix_(nonce_prefix) {}

SealedRecord Sealer::seal(const CleanRecord& record) {
  std::array<std::uint8_t, kSealNonceBytes> nonce{};
  std::copy(prefix_.begin(), prefix_.end(), nonce.begin());
  const std::uint64_t n = counter_++;
  for (int i = 0; i < 8; ++i) nonce[16 + i] = static_cast<std::uint8_t>(n >> (56 - 8 * i));
  return seal_with_nonce(record, key_, nonce);
}

void append_frame(Bytes& out, const SealedRecord& sealed) {
  const auto body = sealed.encode();
  put_u32(out, body.size());
  out.insert(out.end(), body.begin(), body.end());
}

std::vector<SealedRecord> read_frames(std::span<const std::uint8_t> data) {
  std::vector<SealedRecord> out;
  Reader r(data);
  while (!r.done()) out.push_back(SealedRecord::decode(r.take(r.uint(4))));
  return out;
}

std::string sha256_hex(std::span<const std::uint8_t> data) {
  ensure_sodium();
  std::array<std::uint8_t, crypto_hash_sha256_BYTES> digest{};
  crypto_hash_sha256(digest.data(), data.data(), data.size());
  return to_hex(digest);
}

std::string sha256_hex(std::string_view text) {
  return sha256_hex(std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

}  // namespace sentinel
