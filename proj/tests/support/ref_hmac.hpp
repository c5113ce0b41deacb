#pragma once

// Test-only reference MAC: a from-scratch SHA-256 and HMAC, independent of
// the library-backed implementation under test.

#include <array>
#include <cstdint>
#include <vector>

namespace refmac {

std::array<uint8_t, 32> sha256(const std::vector<uint8_t>& msg);
std::array<uint8_t, 32> hmac_sha256(const std::vector<uint8_t>& key,
                                    const std::vector<uint8_t>& msg);

}  // namespace refmac
