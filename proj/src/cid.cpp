#include "mcp/cid.hpp"

#include "mcp/integrity.hpp"

namespace mcp::cid {

static uint16_t routed_auth(const Key& lb_key, uint64_t routing_bits) {
    // MAC over the 48 routing bits, big-endian, 6 bytes.
    Bytes msg;
    for (int shift = 40; shift >= 0; shift -= 8)
        msg.push_back(static_cast<uint8_t>(routing_bits >> shift));
    auto mac = integrity::hmac_sha256(lb_key, msg);
    return get_u16(mac.data());
}

uint64_t make_routed(const Key& lb_key, uint8_t backend_id, uint64_t routing_entropy) {
    uint64_t routing = ((routing_entropy & 0xFF'FFFF'FFFFull) << 8) | backend_id;
    return (routing << 16) | routed_auth(lb_key, routing);
}

uint8_t routed_backend(uint64_t cid) {
    return static_cast<uint8_t>(cid >> 16);
}

bool routed_valid(const Key& lb_key, uint64_t cid) {
    uint64_t routing = cid >> 16;
    return routed_auth(lb_key, routing) == static_cast<uint16_t>(cid);
}

uint64_t hotp(const Key& cid_key, uint64_t counter) {
    Bytes msg;
    put_u64(msg, counter);
    auto mac = integrity::hmac_sha256(cid_key, msg);
    return get_u64(mac.data());
}

std::optional<uint64_t> hotp_reassociate(const Key& cid_key, uint64_t base_counter,
                                         uint64_t observed, uint64_t lookahead) {
    for (uint64_t c = base_counter; c <= base_counter + lookahead; ++c) {
        if (hotp(cid_key, c) == observed) return c;
    }
    return std::nullopt;
}

}  // namespace mcp::cid
