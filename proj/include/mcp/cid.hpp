#pragma once

#include <array>
#include <cstdint>
#include <optional>

#include "mcp/bytes.hpp"

namespace mcp::cid {

using Key = std::array<uint8_t, 32>;

// Server-routed CID layout: bits 63..16 carry routing data, bits 15..0 a
// truncated MAC over those routing bits under the load-balancer key. The
// low byte of the routing field holds the backend id.
uint64_t make_routed(const Key& lb_key, uint8_t backend_id, uint64_t routing_entropy);

uint8_t routed_backend(uint64_t cid);

// True iff the 16-bit authenticator validates under lb_key.
bool routed_valid(const Key& lb_key, uint64_t cid);

// HOTP-style rotating CID: truncate64(HMAC(cid_key, counter)).
uint64_t hotp(const Key& cid_key, uint64_t counter);

// Server-side re-association: search counters [base, base+lookahead] for the
// observed CID. Returns the matching counter.
std::optional<uint64_t> hotp_reassociate(const Key& cid_key, uint64_t base_counter,
                                         uint64_t observed, uint64_t lookahead = 8);

}  // namespace mcp::cid
