#pragma once

#include <compare>
#include <string>

namespace phishgame {

/// Which of the browser's N + 1 personalities is acting: the chrome process
/// (installed software, one per browser) or one of the N sandboxed pages.
class Capability {
 public:
  enum class Kind { kChromeProcess, kSandboxedPage };

  static Capability chrome_process() { return Capability(Kind::kChromeProcess, {}); }
  static Capability sandboxed_page(std::string origin) {
    return Capability(Kind::kSandboxedPage, std::move(origin));
  }

  Kind kind() const { return kind_; }
  bool is_chrome() const { return kind_ == Kind::kChromeProcess; }
  /// Empty for the chrome process.
  const std::string& origin() const { return origin_; }

  friend auto operator<=>(const Capability&, const Capability&) = default;

 private:
  Capability(Kind kind, std::string origin) : kind_(kind), origin_(std::move(origin)) {}

  Kind kind_;
  std::string origin_;
};

}  // namespace phishgame
