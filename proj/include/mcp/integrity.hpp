#pragma once

#include <array>

#include "mcp/bytes.hpp"
#include "mcp/wire.hpp"

namespace mcp::integrity {

// Shared secret of the two endpoints of one connection. Stands in for the
// overlying transport's cryptographic state; scenario configs pre-share it.
struct ConnectionKey {
    std::array<uint8_t, 32> key{};

    bool operator==(const ConnectionKey&) const = default;
};

// The three-class trust boundary. Every bit of an encoded packet falls into
// exactly one class; WRITABLE scratch values are the only PATH_WRITABLE bits.
enum class TrustClass {
    END_TO_END,     // payload plaintext semantics
    PATH_READABLE,  // header fields, scratch type/length, READ_ONLY values
    PATH_WRITABLE,  // scratch values in WRITABLE mode
};

enum class VerifyResult { OK, FAIL };

// HMAC-SHA-256 (full 32 bytes). Also used as the PRF for HOTP-style CIDs.
std::array<uint8_t, 32> hmac_sha256(ByteView key, ByteView msg);

// Encoded packet minus the tag, with WRITABLE scratch values zeroed.
// pcf_type, integrity_mode and length stay literal.
Bytes canonical_bytes(const wire::Packet& p);

// truncate16(HMAC-SHA-256(key, canonical_bytes(p)))
wire::Tag compute_tag(const ConnectionKey& key, const wire::Packet& p);

// Constant-time comparison against compute_tag.
VerifyResult verify(const ConnectionKey& key, const wire::Packet& p);

}  // namespace mcp::integrity
