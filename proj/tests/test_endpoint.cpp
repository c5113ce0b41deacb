#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mcp/endpoint.hpp"
#include "support/ref_hmac.hpp"

using namespace mcp;
using namespace mcp::endpoint;

static integrity::ConnectionKey test_key() {
    integrity::ConnectionKey k;
    k.key.fill(0x33);
    return k;
}

TEST_CASE("open_connection is deterministic under a seed") {
    CidMode mode;
    auto a = open_connection(Role::CLIENT, mode, 1234, VerifyPolicy::HARD_FAIL, test_key());
    auto b = open_connection(Role::CLIENT, mode, 1234, VerifyPolicy::HARD_FAIL, test_key());
    CHECK(a.next_psn == b.next_psn);
    CHECK(a.current_cid == b.current_cid);
    CHECK(a.next_psn != 0);
}

TEST_CASE("HOTP cid matches an independent PRF computation") {
    CidMode mode;
    mode.kind = CidModeKind::HOTP_ROTATING;
    mode.cid_key.fill(0x55);
    auto conn = open_connection(Role::CLIENT, mode, 9, VerifyPolicy::HARD_FAIL, test_key());

    Bytes counter0;
    put_u64(counter0, 0);
    auto mac = refmac::hmac_sha256(Bytes(mode.cid_key.begin(), mode.cid_key.end()), counter0);
    CHECK(conn.current_cid == get_u64(mac.data()));

    rotate_cid(conn);
    Bytes counter1;
    put_u64(counter1, 1);
    mac = refmac::hmac_sha256(Bytes(mode.cid_key.begin(), mode.cid_key.end()), counter1);
    CHECK(conn.current_cid == get_u64(mac.data()));
}

TEST_CASE("HOTP cids do not collide over 10000 counters") {
    cid::Key key;
    key.fill(0xA1);
    std::set<uint64_t> seen;
    for (uint64_t c = 0; c < 10000; ++c) seen.insert(cid::hotp(key, c));
    CHECK(seen.size() == 10000);
}

TEST_CASE("HOTP re-association finds a rotated cid within the lookahead") {
    cid::Key key;
    key.fill(0xB2);
    for (uint64_t base = 0; base < 50; ++base) {
        for (uint64_t ahead = 0; ahead <= 8; ++ahead) {
            auto found = cid::hotp_reassociate(key, base, cid::hotp(key, base + ahead));
            REQUIRE(found.has_value());
            CHECK(*found == base + ahead);
        }
        CHECK_FALSE(cid::hotp_reassociate(key, base, cid::hotp(key, base + 9)).has_value());
    }
}

TEST_CASE("server-routed cid embeds a routable backend id") {
    CidMode mode;
    mode.kind = CidModeKind::SERVER_ROUTED;
    mode.lb_key.fill(0x77);
    mode.backend_id = 3;
    auto conn = open_connection(Role::SERVER, mode, 42, VerifyPolicy::HARD_FAIL, test_key());
    CHECK(cid::routed_valid(mode.lb_key, conn.current_cid));
    CHECK(cid::routed_backend(conn.current_cid) == 3);
}

TEST_CASE("psn advances by one per packet, skipping zero") {
    CidMode mode;
    auto conn = open_connection(Role::CLIENT, mode, 5, VerifyPolicy::HARD_FAIL, test_key());
    conn.next_psn = 7;
    CHECK(next_packet(conn, {}).psn == 7);
    CHECK(next_packet(conn, {}).psn == 8);
    CHECK(next_packet(conn, {}).psn == 9);

    conn.next_psn = 0xFFFFFFFF;
    CHECK(next_packet(conn, {}).psn == 0xFFFFFFFF);
    CHECK(next_packet(conn, {}).psn == 1);  // 0 skipped
}

TEST_CASE("stop option sets the flag and latches stop_sent") {
    CidMode mode;
    auto conn = open_connection(Role::CLIENT, mode, 5, VerifyPolicy::HARD_FAIL, test_key());
    SendOptions opt;
    opt.stop = true;
    auto p = next_packet(conn, {}, opt);
    CHECK(p.flags.stop);
    CHECK(conn.stop_sent);
    // Retransmission after stop stays legal.
    CHECK_NOTHROW(next_packet(conn, {}));
    conn.open = false;
    CHECK_THROWS_AS(next_packet(conn, {}), StoppedConnection);
}

TEST_CASE("writable scratch request survives on-path rewrites") {
    CidMode mode;
    auto conn = open_connection(Role::CLIENT, mode, 5, VerifyPolicy::HARD_FAIL, test_key());
    SendOptions opt;
    opt.scratch_request =
        ScratchRequest{wire::kPcfMtu, wire::IntegrityMode::WRITABLE, wire::mtu_scratch_bytes(1500)};
    auto p = next_packet(conn, {}, opt);
    REQUIRE(p.scratch.has_value());
    CHECK(p.flags.extended);
    p.scratch->value = wire::mtu_scratch_bytes(1280);
    CHECK(integrity::verify(conn.key, p) == integrity::VerifyResult::OK);
}

TEST_CASE("accept updates the received high-water mark") {
    CidMode mode;
    auto sender = open_connection(Role::CLIENT, mode, 5, VerifyPolicy::HARD_FAIL, test_key());
    auto receiver = open_connection(Role::SERVER, mode, 6, VerifyPolicy::HARD_FAIL, test_key());
    receiver.current_cid = sender.current_cid;
    receiver.highest_received_psn = 40;
    sender.next_psn = 41;

    auto p = next_packet(sender, {});
    auto res = accept_packet(receiver, p);
    CHECK(res.decision == AcceptDecision::DELIVERED);
    CHECK(receiver.highest_received_psn == 41);
    REQUIRE(res.events.size() == 1);
    CHECK(res.events[0].kind == EventKind::DELIVERED);
}

TEST_CASE("verify policy controls the fate of tampered packets") {
    CidMode mode;
    auto sender = open_connection(Role::CLIENT, mode, 5, VerifyPolicy::HARD_FAIL, test_key());
    auto hard = open_connection(Role::SERVER, mode, 6, VerifyPolicy::HARD_FAIL, test_key());
    auto soft = open_connection(Role::SERVER, mode, 6, VerifyPolicy::DELIVER_WITH_FLAG, test_key());

    auto p = next_packet(sender, {});
    p.psn ^= 4;  // tamper after tagging
    if (p.psn == 0) p.psn = 4;

    auto res = accept_packet(hard, p);
    CHECK(res.decision == AcceptDecision::DROPPED);
    REQUIRE(res.events.size() == 1);
    CHECK(res.events[0].kind == EventKind::VERIFY_FAIL);

    res = accept_packet(soft, p);
    CHECK(res.decision == AcceptDecision::DELIVERED_FLAGGED);
    CHECK(res.events.size() == 2);
    CHECK(res.events[0].kind == EventKind::VERIFY_FAIL);
}

TEST_CASE("stop flag is inside the integrity envelope") {
    CidMode mode;
    auto sender = open_connection(Role::CLIENT, mode, 5, VerifyPolicy::HARD_FAIL, test_key());
    auto receiver = open_connection(Role::SERVER, mode, 6, VerifyPolicy::HARD_FAIL, test_key());
    receiver.current_cid = sender.current_cid;

    auto p = next_packet(sender, {});
    p.flags.stop = true;  // on-path flip
    auto res = accept_packet(receiver, p);
    CHECK(res.decision == AcceptDecision::DROPPED);
    CHECK_FALSE(receiver.stop_received);

    auto stop = signal_stop(sender);
    CHECK(stop.flags.stop);
    res = accept_packet(receiver, stop);
    CHECK(res.decision == AcceptDecision::DELIVERED);
    CHECK(receiver.stop_received);
}

TEST_CASE("mtu feedback loop closes within one reverse packet") {
    CidMode mode;
    auto client = open_connection(Role::CLIENT, mode, 5, VerifyPolicy::HARD_FAIL, test_key());
    auto server = open_connection(Role::SERVER, mode, 6, VerifyPolicy::HARD_FAIL, test_key());
    server.current_cid = client.current_cid;

    SendOptions opt;
    opt.scratch_request =
        ScratchRequest{wire::kPcfMtu, wire::IntegrityMode::WRITABLE, wire::mtu_scratch_bytes(1500)};
    auto p = next_packet(client, {}, opt);
    p.scratch->value = wire::mtu_scratch_bytes(1280);  // on-path MTU writer

    auto res = accept_packet(server, p);
    CHECK(res.decision == AcceptDecision::DELIVERED);
    REQUIRE(server.feedback_queue.size() == 1);
    CHECK(server.feedback_queue.front().observed_value == wire::mtu_scratch_bytes(1280));

    auto reply = next_packet(server, {});
    CHECK(server.feedback_queue.empty());
    accept_packet(client, reply);
    REQUIRE(client.learned_path_mtu.has_value());
    CHECK(*client.learned_path_mtu == 1280);
}
