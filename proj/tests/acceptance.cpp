// End-to-end acceptance checks. Each numbered criterion prints one PASS/FAIL
// line; the process exits nonzero if any criterion fails.

#include <cstdio>
#include <string>

#include "mcp/catalog.hpp"
#include "mcp/classify.hpp"
#include "mcp/integrity.hpp"
#include "mcp/pathdev.hpp"
#include "mcp/simulate.hpp"
#include "mcp/workloads.hpp"
#include "support/gen.hpp"
#include "support/ref_hmac.hpp"

using namespace mcp;
using harness::DeviceConfig;
using harness::PayloadDist;
using harness::ScenarioConfig;

static int failures = 0;

static void report(int num, const char* what, bool ok, const std::string& detail = "") {
    std::printf("%s  %2d. %s%s%s\n", ok ? "PASS" : "FAIL", num, what,
                detail.empty() ? "" : " -- ", detail.c_str());
    if (!ok) ++failures;
}

// Offsets of bytes covered by the integrity envelope: everything except the
// trailing tag and the value bytes of a writable scratch space.
static std::vector<size_t> protected_offsets(const wire::Packet& p, const Bytes& encoded) {
    std::vector<size_t> offs;
    size_t scratch_value_begin = 0, scratch_value_end = 0;
    if (p.scratch && p.scratch->mode == wire::IntegrityMode::WRITABLE) {
        scratch_value_begin = wire::kFixedHeaderLen + 2;
        scratch_value_end = scratch_value_begin + p.scratch->value.size();
    }
    for (size_t i = 0; i + wire::kTagLen < encoded.size(); ++i) {
        if (i >= scratch_value_begin && i < scratch_value_end) continue;
        offs.push_back(i);
    }
    return offs;
}

static void criterion_1() {
    Rng rng(1001);
    integrity::ConnectionKey key;
    for (auto& b : key.key) b = uint8_t(rng() & 0xFF);

    size_t undetected = 0, clean_fails = 0;
    const int kTrials = 10000;
    for (int trial = 0; trial < kTrials; ++trial) {
        wire::Packet p = testgen::random_packet(rng);
        p.tag = integrity::compute_tag(key, p);
        if (integrity::verify(key, p) != integrity::VerifyResult::OK) ++clean_fails;

        Bytes encoded = wire::encode(p);
        auto offs = protected_offsets(p, encoded);
        size_t off = offs[rand_below(rng, offs.size())];
        encoded[off] ^= uint8_t(1u << rand_below(rng, 8));

        auto decoded = wire::decode(encoded);
        if (const wire::Packet* q = wire::as_packet(decoded)) {
            // A flip that leaves a well-formed packet must break the tag.
            if (integrity::verify(key, *q) == integrity::VerifyResult::OK) ++undetected;
        }  // decode rejection counts as detection
    }
    report(1, "bit flips in the protected region are always detected",
           undetected == 0 && clean_fails == 0,
           "undetected " + std::to_string(undetected) + "/10000, clean false alarms " +
               std::to_string(clean_fails));
}

static void criterion_2() {
    Rng rng(1002);
    integrity::ConnectionKey key;
    for (auto& b : key.key) b = uint8_t(rng() & 0xFF);

    size_t false_alarms = 0;
    for (int trial = 0; trial < 10000; ++trial) {
        wire::Packet p = testgen::random_packet(rng, true, true);
        p.tag = integrity::compute_tag(key, p);
        for (auto& b : p.scratch->value) b = uint8_t(rand_below(rng, 256));
        if (integrity::verify(key, p) != integrity::VerifyResult::OK) ++false_alarms;
    }
    report(2, "writable scratch rewrites never break verification", false_alarms == 0,
           std::to_string(false_alarms) + "/10000 false alarms");
}

static void criterion_3() {
    harness::CatalogOutcome out = harness::run_catalog();
    std::string bad;
    for (const auto& row : out.rows)
        if (!row.matched)
            bad += row.name + "=" + observer::manipulation_class_str(row.cls) + " ";
    report(3, "the six catalog attacks land in their expected (D,P) classes",
           out.all_matched, bad);
}

static void criterion_4() {
    using namespace pathdev;
    Rng rng(1004);
    const FiveTuple tuple{0x0A000002, 0x08080808, 40000, 443, 17};
    bool ok = true;

    for (int trial = 0; trial < 1000 && ok; ++trial) {
        FlowTable table;
        uint32_t fwd_psn = uint32_t(rand_range(rng, 1, 0xFFFFFFF0ull));
        uint32_t rev_psn = uint32_t(rand_range(rng, 1, 0xFFFFFFF0ull));
        SimTime now = 0;
        // Guaranteed association traffic first.
        table.observe(1, tuple, Direction::FORWARD, fwd_psn++, 0, false, now++);
        table.observe(1, tuple.reversed(), Direction::REVERSE, rev_psn++, fwd_psn - 1, false,
                      now++);
        table.observe(1, tuple, Direction::FORWARD, fwd_psn++, rev_psn - 1, false, now++);

        Direction stopper = rand_bernoulli(rng, 0.5) ? Direction::FORWARD : Direction::REVERSE;
        bool stop_sent = false;
        int n = int(rand_range(rng, 5, 40));
        for (int i = 0; i < n; ++i) {
            bool fwd = rand_bernoulli(rng, 0.5);
            Direction dir = fwd ? Direction::FORWARD : Direction::REVERSE;
            bool stop = dir == stopper && (stop_sent || rand_bernoulli(rng, 0.3));
            stop_sent = stop_sent || stop;
            uint32_t psn = fwd ? fwd_psn++ : rev_psn++;
            uint32_t pse = fwd ? rev_psn - 1 : fwd_psn - 1;
            auto out = table.observe(1, fwd ? tuple : tuple.reversed(), dir, psn, pse, stop,
                                     now++);
            if (out.after == FlowState::STOPPING) ok = false;  // one side only
        }
        // The other direction's stop must finish the job.
        if (!stop_sent)
            table.observe(1, stopper == Direction::FORWARD ? tuple : tuple.reversed(), stopper,
                          stopper == Direction::FORWARD ? fwd_psn++ : rev_psn++, 0, true, now++);
        Direction peer = other(stopper);
        auto out = table.observe(1, peer == Direction::FORWARD ? tuple : tuple.reversed(), peer,
                                 peer == Direction::FORWARD ? fwd_psn++ : rev_psn++, 0, true,
                                 now++);
        if (out.after != FlowState::STOPPING) ok = false;
    }
    report(4, "across 1000 fuzzed interleavings, STOPPING needs stops from both directions", ok);
}

static ScenarioConfig keepalive_scenario(double interval_s) {
    ScenarioConfig c;
    c.seed = 11;
    c.duration_s = 601.0;
    c.link_delay_us = 1000;
    c.client.traffic.packet_rate_pps = 0.0;
    c.client.traffic.keepalive_interval_s = interval_s;
    c.server.traffic.packet_rate_pps = 0.0;
    DeviceConfig fw;
    fw.type = DeviceConfig::Type::STATEFUL;
    c.path.push_back(fw);
    return c;
}

static void criterion_5() {
    auto count_keepalives = [](const Trace& t) {
        size_t n = 0;
        for (const auto& ev : t)
            if (ev.kind == EventKind::KEEPALIVE) ++n;
        return n;
    };
    size_t idle_rate = count_keepalives(harness::run_scenario(keepalive_scenario(30.0)).trace);
    size_t assoc_rate = count_keepalives(harness::run_scenario(keepalive_scenario(300.0)).trace);
    double reduction = idle_rate ? 1.0 - double(assoc_rate) / double(idle_rate) : 0.0;
    report(5, "association stretches the keepalive interval (>= 90% fewer keepalives)",
           idle_rate == 20 && assoc_rate == 2 && reduction >= 0.90,
           std::to_string(idle_rate) + " vs " + std::to_string(assoc_rate));
}

static void criterion_6() {
    auto w_static = harness::make_linkability_workload(endpoint::CidModeKind::RANDOM_STATIC, 1);
    auto cid_score = observer::score_linkage(observer::link_by_cid(w_static.records),
                                             w_static.flow, w_static.segment);
    auto psn_score = observer::score_linkage(observer::link_by_psn(w_static.records).clusters,
                                             w_static.flow, w_static.segment);

    auto w_hotp = harness::make_linkability_workload(endpoint::CidModeKind::HOTP_ROTATING, 1);
    auto hotp_score = observer::score_linkage(observer::link_by_cid(w_hotp.records),
                                              w_hotp.flow, w_hotp.segment);
    size_t reassociated = 0;
    for (const auto& rot : w_hotp.rotations)
        if (cid::hotp_reassociate(w_hotp.flow_keys[rot.flow], rot.base_counter,
                                  rot.observed_cid) == 1)
            ++reassociated;

    bool ok = cid_score.precision == 1.0 && cid_score.recall == 1.0 &&
              hotp_score.recall <= 0.05 && reassociated == w_hotp.rotations.size() &&
              psn_score.f1 < cid_score.f1;
    report(6, "cid rotation defeats the observer linker but not the key holder", ok,
           "static f1 " + std::to_string(cid_score.f1) + ", psn f1 " +
               std::to_string(psn_score.f1) + ", rotating recall " +
               std::to_string(hotp_score.recall) + ", reassociated " +
               std::to_string(reassociated) + "/" + std::to_string(w_hotp.rotations.size()));
}

static void criterion_7() {
    double min_margin = 1.0, min_with = 1.0;
    for (uint64_t seed = 7; seed < 27; ++seed) {
        auto flows = harness::make_lola_flows(200, seed);
        double with = observer::classify_lola(flows, true).accuracy;
        double without = observer::classify_lola(flows, false).accuracy;
        min_margin = std::min(min_margin, with - without);
        min_with = std::min(min_with, with);
    }
    report(7, "the lola bit never hurts and sharpens traffic classification (20 seeds)",
           min_margin >= 0.0 && min_with >= 0.9,
           "worst margin " + std::to_string(min_margin) + ", worst with-lola accuracy " +
               std::to_string(min_with));
}

static void criterion_8() {
    Rng rng(1008);
    cid::Key lb_key;
    for (auto& b : lb_key) b = uint8_t(rng() & 0xFF);

    size_t accepted = 0;
    for (int i = 0; i < 10000; ++i)
        if (pathdev::lb_route(rng(), lb_key, 8)) ++accepted;
    // Forged cids pass with probability 2^-16: mean 0.15 over 10k draws, so
    // anything beyond 1 acceptance is outside 3 sigma.
    bool forged_ok = accepted <= 1;

    bool issued_ok = true;
    for (int i = 0; i < 1000 && issued_ok; ++i) {
        uint8_t backend = uint8_t(rand_below(rng, 256));
        uint64_t c = cid::make_routed(lb_key, backend, rng());
        auto route = pathdev::lb_route(c, lb_key, 8);
        issued_ok = route && *route == backend % 8;
    }
    report(8, "the balancer accepts every issued cid and almost no forged ones",
           forged_ok && issued_ok, std::to_string(accepted) + "/10000 forged accepted");
}

static void criterion_9() {
    // Channel-level fidelity across every scratch size.
    Rng rng(1009);
    integrity::ConnectionKey key;
    for (auto& b : key.key) b = uint8_t(rng() & 0xFF);
    bool channel_ok = true;
    for (int trial = 0; trial < 1000 && channel_ok; ++trial) {
        size_t chan = 1 + trial % wire::kMaxScratchLen;
        observer::TwoPointExfil exfil(observer::ExfilChannelKind::WRITABLE_SCRATCH);
        endpoint::CidMode mode;
        auto conn = endpoint::open_connection(endpoint::Role::CLIENT, mode, trial,
                                              endpoint::VerifyPolicy::HARD_FAIL, key);
        endpoint::SendOptions opt;
        opt.scratch_request = endpoint::ScratchRequest{
            wire::kPcfTestPayload, wire::IntegrityMode::WRITABLE, Bytes(chan, 0xA5)};
        for (int pkt = 0; pkt < 4 && channel_ok; ++pkt) {
            wire::Packet original = endpoint::next_packet(conn, {}, opt);
            wire::Packet p = original;
            Bytes covert(chan);
            for (auto& b : covert) b = uint8_t(rand_below(rng, 256));
            bool embedded = exfil.ingress(p, covert);
            auto extracted = exfil.egress(p);
            channel_ok = p == original &&
                         integrity::verify(key, p) == integrity::VerifyResult::OK &&
                         (pkt == 0 ? !embedded : embedded && extracted && *extracted == covert);
        }
    }

    // Simulator-level: the two-point psn channel moves data while both the
    // endpoint experience and the classifier stay at (!D,!P).
    bool sim_ok = true;
    std::string sim_detail;
    for (const auto& entry : harness::builtin_catalog()) {
        if (entry.name != "psn-exfil-two-point") continue;
        auto base = harness::run_scenario(entry.baseline);
        auto attack = harness::run_scenario(entry.attack);
        auto cls = harness::classify_dp(base.trace, attack.trace);
        bool recovered = !attack.exfil_sent.empty() &&
                         attack.exfil_sent == attack.exfil_received;
        auto vb = harness::endpoint_view(base.trace);
        auto va = harness::endpoint_view(attack.trace);
        sim_ok = recovered && !cls.detectable && !cls.behavior_changing &&
                 va.deliveries == vb.deliveries;
        sim_detail = std::to_string(attack.exfil_sent.size()) + " covert messages, class " +
                     observer::manipulation_class_str(cls);
    }
    report(9, "two-point exfiltration is exact and classifies as (!D,!P)",
           channel_ok && sim_ok, sim_detail);
}

static void criterion_10() {
    // Wire codec round-trip.
    Rng rng(1010);
    bool codec_ok = true;
    for (int i = 0; i < 10000 && codec_ok; ++i) {
        wire::Packet p = testgen::random_packet(rng);
        auto decoded = wire::decode(wire::encode(p));
        const wire::Packet* q = wire::as_packet(decoded);
        codec_ok = q && *q == p;
    }

    // Full-stack determinism on a busy scenario.
    ScenarioConfig c;
    c.seed = 77;
    c.duration_s = 5.0;
    c.link_delay_us = 1000;
    c.client.traffic.packet_rate_pps = 40.0;
    c.client.traffic.payload_len = {PayloadDist::Kind::UNIFORM, 50, 400};
    c.client.traffic.lola_prob = 0.5;
    c.client.traffic.jitter_us = 2000.0;
    c.client.traffic.scratch = harness::ScratchConfig{
        wire::kPcfMtu, wire::IntegrityMode::WRITABLE, wire::mtu_scratch_bytes(1500)};
    c.server.traffic.respond_to_data = true;
    DeviceConfig nat, fw, lola, writer;
    nat.type = DeviceConfig::Type::NAT;
    fw.type = DeviceConfig::Type::STATEFUL;
    lola.type = DeviceConfig::Type::LOLA;
    writer.type = DeviceConfig::Type::MTU_WRITER;
    writer.mtu = 1280;
    c.path = {nat, fw, lola, writer};
    harness::AttackerConfig atk;
    atk.type = harness::AttackerConfig::Type::PASSIVE;
    atk.taps = {2};
    c.attacker = atk;

    std::string a = harness::trace_to_jsonl(harness::run_scenario(c).trace);
    std::string b = harness::trace_to_jsonl(harness::run_scenario(c).trace);
    report(10, "the codec round-trips and full simulations replay byte-identically",
           codec_ok && !a.empty() && a == b);
}

int main() {
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    criterion_10();
    std::printf("%s\n", failures == 0 ? "all acceptance criteria satisfied"
                                      : "acceptance criteria FAILED");
    return failures == 0 ? 0 : 1;
}
