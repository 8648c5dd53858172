// Toy certificate authority: Trent issues certificates that bind a
// requester's identity, and the browser verifies them before it will show
// the trusted login dialog.
//
// Signatures are keyed digests, tag = SHA-256(trent_secret || canonical
// payload). Only the Trent and the browser's registry hold the secret, so
// nothing on the attacker side can mint a tag.

#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "phishgame/rng.hpp"

namespace phishgame {

using Tick = std::uint64_t;

inline constexpr std::size_t kTagSize = 32;
using Tag = std::array<std::uint8_t, kTagSize>;

struct IdentityCredentials {
  std::string subject_name;  // also the host name the certificate is for
  std::string organization;
  std::string jurisdiction;

  friend auto operator<=>(const IdentityCredentials&,
                          const IdentityCredentials&) = default;
};

/// subject_name nonempty and every field valid UTF-8 without control
/// characters.
bool is_valid(const IdentityCredentials& identity);

struct ValidityRange {
  Tick not_before = 0;
  Tick not_after = 0;
};

/// Everything a certificate carries except its tag, in signing order.
struct CertificatePayload {
  IdentityCredentials subject;
  std::string trent_name;
  std::uint64_t serial = 0;
  Tick not_before = 0;
  Tick not_after = 0;
  bool wants_login_dialog = true;

  friend bool operator==(const CertificatePayload&,
                         const CertificatePayload&) = default;
};

struct Certificate {
  CertificatePayload payload;
  Tag tag{};

  friend bool operator==(const Certificate&, const Certificate&) = default;
};

/// Bit-exact signing input. Text fields in declaration order as a 4-byte
/// big-endian length followed by the UTF-8 bytes; integers (and the login
/// dialog flag, as 0 or 1) as 8-byte big-endian.
std::vector<std::uint8_t> canonical_encode(const CertificatePayload& payload);

/// Secret half of a Trent, shared with the browser's registry.
class TrentKey {
 public:
  Tag sign(std::span<const std::uint8_t> message) const;

  friend bool operator==(const TrentKey&, const TrentKey&) = default;

 private:
  friend class TrentAuthority;
  explicit TrentKey(const Tag& secret) : secret_(secret) {}
  Tag secret_;
};

class TrentAuthority {
 public:
  /// Draws the Trent's secret from `rng`.
  TrentAuthority(std::string name, Rng& rng);

  const std::string& name() const { return name_; }
  const TrentKey& key() const { return key_; }

  /// Binds `subject` exactly as given; serials increase from 1.
  /// Throws ConfigError on an invalid subject or an inverted range.
  Certificate issue(const IdentityCredentials& subject, ValidityRange validity,
                    bool wants_login_dialog);

 private:
  std::string name_;
  TrentKey key_;
  std::uint64_t next_serial_ = 1;
};

class TrentRegistry {
 public:
  void add(const TrentAuthority& trent, std::string display_name);

  bool contains(std::string_view trent_name) const;
  const TrentKey* find(std::string_view trent_name) const;
  std::optional<std::string> display_name(std::string_view trent_name) const;
  std::vector<std::string> display_names() const;

  friend bool operator==(const TrentRegistry&, const TrentRegistry&) = default;

 private:
  std::map<std::string, TrentKey, std::less<>> entries_;
  std::map<std::string, std::string, std::less<>> display_names_;
};

/// Lowercase hex SHA-256 of raw bytes (config hashes in reports).
std::string sha256_hex(std::string_view bytes);

enum class RejectReason { kTagMismatch, kUnknownIssuer, kNotYetValid, kExpired };

std::string_view to_string(RejectReason reason);

struct VerificationResult {
  std::optional<RejectReason> rejection;

  bool verified() const { return !rejection.has_value(); }
  friend bool operator==(const VerificationResult&,
                         const VerificationResult&) = default;
};

/// Pure in (cert, registry, now). When several reasons apply the reported
/// one follows TagMismatch > UnknownIssuer > NotYetValid > Expired. A tag
/// can only be checked against a known issuer, so an unregistered
/// trent_name reports UnknownIssuer.
VerificationResult verify_certificate(const Certificate& cert,
                                      const TrentRegistry& registry, Tick now);

}  // namespace phishgame
