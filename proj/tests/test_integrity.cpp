#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mcp/integrity.hpp"
#include "support/gen.hpp"
#include "support/ref_hmac.hpp"

using namespace mcp;
using namespace mcp::integrity;

static wire::Packet minimal_packet() {
    wire::Packet p;
    p.psn = 1;
    return p;
}

TEST_CASE("canonical bytes drop the tag and zero writable values") {
    wire::Packet p = minimal_packet();
    p.payload = {0x10, 0x20};
    CHECK(canonical_bytes(p).size() == 20 + 2);

    p.flags.extended = true;
    p.scratch = wire::ScratchSpace{wire::kPcfMtu, wire::IntegrityMode::WRITABLE,
                                   {0xAA, 0xBB, 0xCC, 0xDD}};
    Bytes canon = canonical_bytes(p);
    CHECK(Bytes(canon.begin() + 22, canon.begin() + 26) == Bytes{0, 0, 0, 0});
    CHECK(canon[20] == wire::kPcfMtu);
    CHECK(canon[21] == ((1 << 6) | 4));

    p.scratch->mode = wire::IntegrityMode::READ_ONLY;
    canon = canonical_bytes(p);
    CHECK(Bytes(canon.begin() + 22, canon.begin() + 26) == Bytes{0xAA, 0xBB, 0xCC, 0xDD});
}

TEST_CASE("compute_tag matches an independent HMAC-SHA-256 implementation") {
    ConnectionKey key;  // 32 zero bytes
    Rng rng(7);
    for (int i = 0; i < 50; ++i) {
        wire::Packet p = i == 0 ? minimal_packet() : testgen::random_packet(rng);
        Bytes canon = canonical_bytes(p);
        auto ref = refmac::hmac_sha256(Bytes(key.key.begin(), key.key.end()), canon);
        wire::Tag expect;
        std::copy_n(ref.begin(), expect.size(), expect.begin());
        CHECK(compute_tag(key, p) == expect);
    }
    // Determinism.
    wire::Packet p = minimal_packet();
    CHECK(compute_tag(key, p) == compute_tag(key, p));
}

TEST_CASE("writable scratch value does not enter the tag") {
    ConnectionKey key;
    key.key.fill(0x42);
    wire::Packet a = minimal_packet();
    a.flags.extended = true;
    a.scratch = wire::ScratchSpace{wire::kPcfMtu, wire::IntegrityMode::WRITABLE, {1, 2, 3, 4}};
    wire::Packet b = a;
    b.scratch->value = {9, 9, 9, 9};
    CHECK(compute_tag(key, a) == compute_tag(key, b));

    a.tag = compute_tag(key, a);
    CHECK(verify(key, a) == VerifyResult::OK);
    // On-path rewrite of the writable value stays invisible.
    a.scratch->value = {0xDE, 0xAD, 0xBE, 0xEF};
    CHECK(verify(key, a) == VerifyResult::OK);
}

TEST_CASE("scratch framing is protected even in writable mode") {
    ConnectionKey key;
    key.key.fill(0x42);
    wire::Packet p = minimal_packet();
    p.flags.extended = true;
    p.scratch = wire::ScratchSpace{wire::kPcfMtu, wire::IntegrityMode::WRITABLE, {1, 2}};
    p.tag = compute_tag(key, p);

    wire::Packet t = p;
    t.scratch->pcf_type = wire::kPcfTestPayload;
    CHECK(verify(key, t) == VerifyResult::FAIL);

    t = p;
    t.scratch->mode = wire::IntegrityMode::READ_ONLY;
    CHECK(verify(key, t) == VerifyResult::FAIL);

    t = p;
    t.scratch->value = {1, 2, 3};  // length change
    CHECK(verify(key, t) == VerifyResult::FAIL);
}

TEST_CASE("single-bit tampering in protected regions always fails") {
    ConnectionKey key;
    key.key.fill(0x11);
    Rng rng(99);
    for (int i = 0; i < 2000; ++i) {
        wire::Packet p = testgen::random_packet(rng);
        p.tag = compute_tag(key, p);
        CHECK(verify(key, p) == VerifyResult::OK);

        wire::Packet t = p;
        switch (rand_below(rng, 3)) {
            case 0: t.psn ^= 1u << rand_below(rng, 32); if (t.psn == 0) t.psn = 1; break;
            case 1: t.cid ^= 1ull << rand_below(rng, 64); break;
            default:
                if (!t.payload.empty())
                    t.payload[rand_below(rng, t.payload.size())] ^=
                        uint8_t(1 << rand_below(rng, 8));
                else
                    t.pse ^= 1u << rand_below(rng, 32);
        }
        if (t == p) continue;
        CHECK(verify(key, t) == VerifyResult::FAIL);
    }
}
