#pragma once

#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>

namespace smellcheck {

// FNV-1a 64; stable across platforms, used for ids and fingerprints.
class Fnv1a {
 public:
  Fnv1a& bytes(std::string_view s) {
    for (unsigned char c : s) {
      h_ ^= c;
      h_ *= kPrime;
    }
    return *this;
  }
  // Field with a separator so ("ab","c") and ("a","bc") differ.
  Fnv1a& field(std::string_view s) {
    bytes(s);
    h_ ^= 0x1f;
    h_ *= kPrime;
    return *this;
  }
  std::uint64_t value() const { return h_; }
  std::string hex() const {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h_));
    return buf;
  }

 private:
  static constexpr std::uint64_t kPrime = 1099511628211ull;
  std::uint64_t h_ = 14695981039346656037ull;
};

}  // namespace smellcheck
