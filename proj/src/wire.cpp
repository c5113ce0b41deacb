#include "mcp/wire.hpp"

#include <cstdio>
#include <stdexcept>

namespace mcp {

std::string to_hex(ByteView data) {
    static const char* digits = "0123456789abcdef";
    std::string out;
    out.reserve(data.size() * 2);
    for (uint8_t b : data) {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 0xF]);
    }
    return out;
}

static int hex_nibble(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    throw std::invalid_argument("bad hex digit");
}

Bytes from_hex(std::string_view hex) {
    if (hex.size() % 2 != 0) throw std::invalid_argument("odd hex length");
    Bytes out;
    out.reserve(hex.size() / 2);
    for (size_t i = 0; i < hex.size(); i += 2) {
        out.push_back(static_cast<uint8_t>(hex_nibble(hex[i]) << 4 | hex_nibble(hex[i + 1])));
    }
    return out;
}

}  // namespace mcp

namespace mcp::wire {

const char* decode_error_name(DecodeError e) {
    switch (e) {
        case DecodeError::NotMCP: return "NotMCP";
        case DecodeError::Truncated: return "Truncated";
        case DecodeError::ReservedMode: return "ReservedMode";
        case DecodeError::BadPSN: return "BadPSN";
    }
    return "?";
}

size_t encoded_length(const Packet& p) {
    size_t n = kFixedHeaderLen + kTagLen + p.payload.size();
    if (p.scratch) n += 2 + p.scratch->value.size();
    return n;
}

static uint8_t flag_bits(const Flags& f) {
    return static_cast<uint8_t>((f.lola << 3) | (f.resume << 2) | (f.stop << 1) |
                                (f.extended << 0));
}

Bytes encode(const Packet& p) {
    Bytes out;
    out.reserve(encoded_length(p));
    put_u32(out, (kMagic << 4) | flag_bits(p.flags));
    put_u64(out, p.cid);
    put_u32(out, p.psn);
    put_u32(out, p.pse);
    if (p.scratch) {
        const ScratchSpace& s = *p.scratch;
        out.push_back(s.pcf_type);
        out.push_back(static_cast<uint8_t>((static_cast<uint8_t>(s.mode) << 6) |
                                           (s.value.size() & 0x3F)));
        out.insert(out.end(), s.value.begin(), s.value.end());
    }
    out.insert(out.end(), p.payload.begin(), p.payload.end());
    out.insert(out.end(), p.tag.begin(), p.tag.end());
    return out;
}

DecodeResult decode(ByteView b) {
    if (b.size() < 4) return DecodeError::Truncated;
    uint32_t word0 = get_u32(b.data());
    if ((word0 >> 4) != kMagic) return DecodeError::NotMCP;
    if (b.size() < kFixedHeaderLen + kTagLen) return DecodeError::Truncated;

    Packet p;
    p.flags.lola = (word0 >> 3) & 1;
    p.flags.resume = (word0 >> 2) & 1;
    p.flags.stop = (word0 >> 1) & 1;
    p.flags.extended = word0 & 1;
    p.cid = get_u64(b.data() + 4);
    p.psn = get_u32(b.data() + 12);
    p.pse = get_u32(b.data() + 16);
    if (p.psn == 0) return DecodeError::BadPSN;

    size_t off = kFixedHeaderLen;
    if (p.flags.extended) {
        if (b.size() < off + 2 + kTagLen) return DecodeError::Truncated;
        ScratchSpace s;
        s.pcf_type = b[off];
        uint8_t mode_len = b[off + 1];
        uint8_t mode = mode_len >> 6;
        if (mode >= 2) return DecodeError::ReservedMode;
        s.mode = static_cast<IntegrityMode>(mode);
        size_t len = mode_len & 0x3F;
        off += 2;
        if (b.size() < off + len + kTagLen) return DecodeError::Truncated;
        s.value.assign(b.begin() + off, b.begin() + off + len);
        off += len;
        p.scratch = std::move(s);
    }

    // Everything between the structured part and the trailing tag is payload.
    size_t payload_len = b.size() - off - kTagLen;
    p.payload.assign(b.begin() + off, b.begin() + off + payload_len);
    std::copy(b.end() - kTagLen, b.end(), p.tag.begin());
    return p;
}

bool psn_newer(uint32_t reference, uint32_t candidate) {
    uint32_t diff = candidate - reference;  // mod 2^32
    return diff >= 1 && diff <= (1u << 16);
}

bool psn_in_window(uint32_t reference, uint32_t candidate) {
    return reference == candidate || psn_newer(reference, candidate) ||
           psn_newer(candidate, reference);
}

uint16_t scratch_mtu_value(const ScratchSpace& s) {
    if (s.value.size() != 2) throw std::invalid_argument("MTU scratch must be 2 bytes");
    return get_u16(s.value.data());
}

Bytes mtu_scratch_bytes(uint16_t mtu) {
    Bytes v;
    put_u16(v, mtu);
    return v;
}

}  // namespace mcp::wire
