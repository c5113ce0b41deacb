#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mcp/wire.hpp"
#include "support/gen.hpp"

using namespace mcp;
using namespace mcp::wire;

TEST_CASE("minimal packet encodes with the pinned magic/flag word") {
    Packet p;
    p.psn = 1;
    Bytes enc = encode(p);
    REQUIRE(enc.size() == 36);
    CHECK(enc[0] == 0xD8);
    CHECK(enc[1] == 0x00);
    CHECK(enc[2] == 0x7F);
    CHECK(enc[3] == 0xF0);
}

TEST_CASE("stop flag occupies bit 1 of the low nibble") {
    Packet p;
    p.psn = 1;
    p.flags.stop = true;
    CHECK(encode(p)[3] == 0xF2);
}

TEST_CASE("scratch header packs mode and length into one byte") {
    Packet p;
    p.psn = 1;
    p.flags.extended = true;
    p.scratch = ScratchSpace{kPcfMtu, IntegrityMode::WRITABLE, mtu_scratch_bytes(1500)};
    Bytes enc = encode(p);
    REQUIRE(enc.size() == 36 + 2 + 2);
    CHECK(enc[20] == kPcfMtu);
    CHECK(enc[21] == ((1 << 6) | 2));
    CHECK(enc[22] == 0x05);  // 1500 = 0x05DC
    CHECK(enc[23] == 0xDC);
}

TEST_CASE("decode rejects the documented error cases") {
    CHECK(as_error(decode(Bytes{0x01, 0x02, 0x03})) == DecodeError::Truncated);

    Bytes zeros(36, 0);
    CHECK(as_error(decode(zeros)) == DecodeError::NotMCP);

    Packet p;
    p.psn = 1;
    Bytes enc = encode(p);

    Bytes short_enc(enc.begin(), enc.begin() + 10);
    CHECK(as_error(decode(short_enc)) == DecodeError::Truncated);

    Bytes zero_psn = enc;
    zero_psn[12] = zero_psn[13] = zero_psn[14] = zero_psn[15] = 0;
    CHECK(as_error(decode(zero_psn)) == DecodeError::BadPSN);

    Packet ext;
    ext.psn = 1;
    ext.flags.extended = true;
    ext.scratch = ScratchSpace{kPcfMtu, IntegrityMode::READ_ONLY, {}};
    Bytes ext_enc = encode(ext);
    ext_enc[21] |= 0x80;  // mode 2: reserved
    CHECK(as_error(decode(ext_enc)) == DecodeError::ReservedMode);
}

TEST_CASE("round-trip over 10000 random packets") {
    Rng rng(0xC0FFEE);
    for (int i = 0; i < 10000; ++i) {
        Packet p = testgen::random_packet(rng);
        Bytes enc = encode(p);
        CHECK(enc.size() == encoded_length(p));
        auto r = decode(enc);
        const Packet* back = as_packet(r);
        REQUIRE(back != nullptr);
        CHECK(*back == p);
    }
}

TEST_CASE("decode is total over arbitrary byte soup") {
    Rng rng(0xDECAF);
    for (int i = 0; i < 10000; ++i) {
        Bytes junk(rand_below(rng, 120));
        for (auto& b : junk) b = static_cast<uint8_t>(rand_below(rng, 256));
        // Half the cases get a valid magic so the parser walks further in.
        if (junk.size() >= 4 && rand_bernoulli(rng, 0.5)) {
            junk[0] = 0xD8; junk[1] = 0x00; junk[2] = 0x7F;
            junk[3] = static_cast<uint8_t>(0xF0 | (junk[3] & 0x0F));
        }
        auto r = decode(junk);  // must neither crash nor over-read
        if (const Packet* p = as_packet(r)) CHECK(encode(*p) == junk);
    }
}

TEST_CASE("psn window arithmetic") {
    CHECK(psn_newer(40, 41));
    CHECK(psn_newer(40, 40 + (1 << 16)));
    CHECK_FALSE(psn_newer(40, 40));
    CHECK_FALSE(psn_newer(41, 40));
    CHECK_FALSE(psn_newer(40, 40 + (1 << 16) + 1));
    CHECK(psn_newer(0xFFFFFFFF, 5));  // wraps
    CHECK(psn_in_window(100, 90));
    CHECK(psn_in_window(100, 100));
    CHECK_FALSE(psn_in_window(100, 100 + (1 << 20)));
}
