#pragma once

// Shared random-packet generator for property tests.

#include "mcp/rng.hpp"
#include "mcp/wire.hpp"

namespace testgen {

inline mcp::wire::Packet random_packet(mcp::Rng& rng, bool force_scratch = false,
                                       bool force_writable = false) {
    using namespace mcp;
    wire::Packet p;
    p.flags.lola = rand_bernoulli(rng, 0.5);
    p.flags.stop = rand_bernoulli(rng, 0.2);
    p.cid = rng();
    p.psn = static_cast<uint32_t>(rand_range(rng, 1, 0xFFFFFFFFull));
    p.pse = static_cast<uint32_t>(rand_below(rng, 0x100000000ull));
    bool scratch = force_scratch || rand_bernoulli(rng, 0.5);
    if (scratch) {
        p.flags.extended = true;
        wire::ScratchSpace s;
        s.pcf_type = static_cast<uint8_t>(rand_below(rng, 256));
        s.mode = (force_writable || rand_bernoulli(rng, 0.5)) ? wire::IntegrityMode::WRITABLE
                                                              : wire::IntegrityMode::READ_ONLY;
        size_t len = force_writable ? rand_range(rng, 1, wire::kMaxScratchLen)
                                    : rand_below(rng, wire::kMaxScratchLen + 1);
        s.value.resize(len);
        for (auto& b : s.value) b = static_cast<uint8_t>(rand_below(rng, 256));
        p.scratch = std::move(s);
    }
    p.payload.resize(rand_below(rng, 101));
    for (auto& b : p.payload) b = static_cast<uint8_t>(rand_below(rng, 256));
    for (auto& b : p.tag) b = static_cast<uint8_t>(rand_below(rng, 256));
    return p;
}

}  // namespace testgen
