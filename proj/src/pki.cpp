#include "phishgame/pki.hpp"

#include <openssl/crypto.h>
#include <openssl/evp.h>

#include <stdexcept>

#include "phishgame/errors.hpp"

namespace phishgame {
namespace {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) {
    out.push_back(static_cast<std::uint8_t>(v >> shift));
  }
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int shift = 56; shift >= 0; shift -= 8) {
    out.push_back(static_cast<std::uint8_t>(v >> shift));
  }
}

void put_text(std::vector<std::uint8_t>& out, std::string_view text) {
  put_u32(out, static_cast<std::uint32_t>(text.size()));
  out.insert(out.end(), text.begin(), text.end());
}

// Strict UTF-8 decode; rejects C0/C1 controls and DEL.
bool is_printable_utf8(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size()) {
    const auto b0 = static_cast<unsigned char>(s[i]);
    std::uint32_t cp = 0;
    std::size_t len = 0;
    if (b0 < 0x80) {
      cp = b0;
      len = 1;
    } else if ((b0 & 0xE0) == 0xC0) {
      cp = b0 & 0x1F;
      len = 2;
    } else if ((b0 & 0xF0) == 0xE0) {
      cp = b0 & 0x0F;
      len = 3;
    } else if ((b0 & 0xF8) == 0xF0) {
      cp = b0 & 0x07;
      len = 4;
    } else {
      return false;
    }
    if (i + len > s.size()) return false;
    for (std::size_t k = 1; k < len; ++k) {
      const auto b = static_cast<unsigned char>(s[i + k]);
      if ((b & 0xC0) != 0x80) return false;
      cp = (cp << 6) | (b & 0x3F);
    }
    const bool overlong = (len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) ||
                          (len == 4 && cp < 0x10000);
    if (overlong || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
      return false;
    }
    if (cp < 0x20 || (cp >= 0x7F && cp < 0xA0)) return false;
    i += len;
  }
  return true;
}

Tag sha256(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
  Tag out{};
  unsigned int out_len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (ctx == nullptr) throw std::bad_alloc();
  const bool ok = EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) == 1 &&
                  EVP_DigestUpdate(ctx, a.data(), a.size()) == 1 &&
                  EVP_DigestUpdate(ctx, b.data(), b.size()) == 1 &&
                  EVP_DigestFinal_ex(ctx, out.data(), &out_len) == 1;
  EVP_MD_CTX_free(ctx);
  if (!ok || out_len != kTagSize) throw std::runtime_error("SHA-256 failed");
  return out;
}

Tag random_secret(Rng& rng) {
  Tag secret{};
  for (std::size_t i = 0; i < secret.size(); i += 8) {
    const std::uint64_t word = rng.next_u64();
    for (std::size_t k = 0; k < 8; ++k) {
      secret[i + k] = static_cast<std::uint8_t>(word >> (8 * k));
    }
  }
  return secret;
}

}  // namespace

std::string sha256_hex(std::string_view bytes) {
  const auto* data = reinterpret_cast<const std::uint8_t*>(bytes.data());
  const Tag digest = sha256({data, bytes.size()}, {});
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * digest.size());
  for (std::uint8_t b : digest) {
    out.push_back(kHex[b >> 4]);
    out.push_back(kHex[b & 0xF]);
  }
  return out;
}

bool is_valid(const IdentityCredentials& identity) {
  return !identity.subject_name.empty() &&
         is_printable_utf8(identity.subject_name) &&
         is_printable_utf8(identity.organization) &&
         is_printable_utf8(identity.jurisdiction);
}

std::vector<std::uint8_t> canonical_encode(const CertificatePayload& payload) {
  std::vector<std::uint8_t> out;
  out.reserve(64 + payload.subject.subject_name.size() +
              payload.subject.organization.size() +
              payload.subject.jurisdiction.size() + payload.trent_name.size());
  put_text(out, payload.subject.subject_name);
  put_text(out, payload.subject.organization);
  put_text(out, payload.subject.jurisdiction);
  put_text(out, payload.trent_name);
  put_u64(out, payload.serial);
  put_u64(out, payload.not_before);
  put_u64(out, payload.not_after);
  put_u64(out, payload.wants_login_dialog ? 1 : 0);
  return out;
}

Tag TrentKey::sign(std::span<const std::uint8_t> message) const {
  return sha256(secret_, message);
}

TrentAuthority::TrentAuthority(std::string name, Rng& rng)
    : name_(std::move(name)), key_(random_secret(rng)) {
  if (name_.empty() || !is_printable_utf8(name_)) {
    throw ConfigError("trent name must be nonempty printable text");
  }
}

Certificate TrentAuthority::issue(const IdentityCredentials& subject,
                                  ValidityRange validity,
                                  bool wants_login_dialog) {
  if (!is_valid(subject)) throw ConfigError("invalid subject identity");
  if (validity.not_before > validity.not_after) {
    throw ConfigError("empty validity range");
  }
  Certificate cert;
  cert.payload.subject = subject;
  cert.payload.trent_name = name_;
  cert.payload.serial = next_serial_++;
  cert.payload.not_before = validity.not_before;
  cert.payload.not_after = validity.not_after;
  cert.payload.wants_login_dialog = wants_login_dialog;
  cert.tag = key_.sign(canonical_encode(cert.payload));
  return cert;
}

void TrentRegistry::add(const TrentAuthority& trent, std::string display_name) {
  entries_.insert_or_assign(trent.name(), trent.key());
  display_names_.insert_or_assign(trent.name(), std::move(display_name));
}

bool TrentRegistry::contains(std::string_view trent_name) const {
  return entries_.find(trent_name) != entries_.end();
}

const TrentKey* TrentRegistry::find(std::string_view trent_name) const {
  const auto it = entries_.find(trent_name);
  return it == entries_.end() ? nullptr : &it->second;
}

std::optional<std::string> TrentRegistry::display_name(
    std::string_view trent_name) const {
  const auto it = display_names_.find(trent_name);
  if (it == display_names_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::string> TrentRegistry::display_names() const {
  std::vector<std::string> names;
  for (const auto& [_, display] : display_names_) names.push_back(display);
  return names;
}

std::string_view to_string(RejectReason reason) {
  switch (reason) {
    case RejectReason::kTagMismatch:
      return "tag_mismatch";
    case RejectReason::kUnknownIssuer:
      return "unknown_issuer";
    case RejectReason::kNotYetValid:
      return "not_yet_valid";
    case RejectReason::kExpired:
      return "expired";
  }
  return "unknown";
}

VerificationResult verify_certificate(const Certificate& cert,
                                      const TrentRegistry& registry, Tick now) {
  const TrentKey* key = registry.find(cert.payload.trent_name);
  if (key == nullptr) return {RejectReason::kUnknownIssuer};

  const Tag expected = key->sign(canonical_encode(cert.payload));
  if (CRYPTO_memcmp(expected.data(), cert.tag.data(), kTagSize) != 0) {
    return {RejectReason::kTagMismatch};
  }
  if (now < cert.payload.not_before) return {RejectReason::kNotYetValid};
  if (now > cert.payload.not_after) return {RejectReason::kExpired};
  return {};
}

}  // namespace phishgame
