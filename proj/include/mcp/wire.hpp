#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <variant>

#include "mcp/bytes.hpp"

namespace mcp::wire {

// 28-bit protocol magic; lives in the top 28 bits of the first word.
inline constexpr uint32_t kMagic = 0x0D8007FF;

// Scratch space PCF type codes.
inline constexpr uint8_t kPcfMtu = 0x01;
inline constexpr uint8_t kPcfTestPayload = 0x02;

inline constexpr size_t kTagLen = 16;
inline constexpr size_t kFixedHeaderLen = 20;  // magic/flags + cid + psn + pse
inline constexpr size_t kMaxScratchLen = 63;

using Tag = std::array<uint8_t, kTagLen>;

// Flag bits in the low nibble of the first word: L=bit3 R=bit2 S=bit1 X=bit0.
struct Flags {
    bool lola = false;      // loss/latency treatment bit
    bool resume = false;    // reserved, never set by this implementation
    bool stop = false;      // flow-end signal
    bool extended = false;  // scratch space present

    bool operator==(const Flags&) const = default;
};

enum class IntegrityMode : uint8_t {
    READ_ONLY = 0,
    WRITABLE = 1,
};

struct ScratchSpace {
    uint8_t pcf_type = 0;
    IntegrityMode mode = IntegrityMode::READ_ONLY;
    Bytes value;  // at most kMaxScratchLen bytes; length travels on the wire

    bool operator==(const ScratchSpace&) const = default;
};

struct Packet {
    Flags flags;
    uint64_t cid = 0;
    uint32_t psn = 0;  // never 0 on the wire; senders skip it
    uint32_t pse = 0;  // 0 means "no echo"
    std::optional<ScratchSpace> scratch;  // present iff flags.extended
    Bytes payload;  // opaque end-to-end bytes
    Tag tag{};

    bool operator==(const Packet&) const = default;
};

enum class DecodeError {
    NotMCP,        // top 28 bits are not the magic
    Truncated,     // fewer bytes than the declared structure requires
    ReservedMode,  // scratch integrity_mode >= 2
    BadPSN,        // psn = 0
};

const char* decode_error_name(DecodeError e);

// 36 + (extended ? 2 + scratch length : 0) + |payload|
size_t encoded_length(const Packet& p);

Bytes encode(const Packet& p);

using DecodeResult = std::variant<Packet, DecodeError>;

DecodeResult decode(ByteView bytes);

inline const Packet* as_packet(const DecodeResult& r) {
    return std::get_if<Packet>(&r);
}
inline std::optional<DecodeError> as_error(const DecodeResult& r) {
    if (const auto* e = std::get_if<DecodeError>(&r)) return *e;
    return std::nullopt;
}

// Modular PSN comparison. "Newer" means (candidate - reference) mod 2^32 is
// in [1, 2^16]; "in window" accepts either side of the reference.
bool psn_newer(uint32_t reference, uint32_t candidate);
bool psn_in_window(uint32_t reference, uint32_t candidate);

// Big-endian helpers for the 2-byte MTU scratch value.
uint16_t scratch_mtu_value(const ScratchSpace& s);
Bytes mtu_scratch_bytes(uint16_t mtu);

}  // namespace mcp::wire
