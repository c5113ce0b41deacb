#include "mcp/catalog.hpp"

#include <sstream>

#include "mcp/classify.hpp"
#include "mcp/simulate.hpp"
#include "mcp/workloads.hpp"

namespace mcp::harness {

namespace {

ScenarioConfig base_scenario(uint64_t seed) {
    ScenarioConfig c;
    c.seed = seed;
    c.duration_s = 3.0;
    c.link_delay_us = 1000;
    c.client.traffic.packet_rate_pps = 20.0;
    c.client.traffic.payload_len = {PayloadDist::Kind::FIXED, 100, 100};
    c.server.traffic.packet_rate_pps = 0.0;
    c.server.traffic.respond_to_data = true;
    DeviceConfig fw;
    fw.type = DeviceConfig::Type::STATEFUL;
    c.path.push_back(fw);
    return c;
}

CatalogEntry make_entry(std::string name, uint64_t seed, AttackerConfig atk,
                        std::optional<bool> d, std::optional<bool> p,
                        std::optional<ScratchConfig> client_scratch = std::nullopt) {
    CatalogEntry e;
    e.name = std::move(name);
    e.baseline = base_scenario(seed);
    if (client_scratch) e.baseline.client.traffic.scratch = client_scratch;
    e.attack = e.baseline;
    e.attack.attacker = std::move(atk);
    e.expect_d = d;
    e.expect_p = p;
    return e;
}

std::string expect_str(std::optional<bool> d, std::optional<bool> p) {
    auto one = [](std::optional<bool> v, const char* yes, const char* no) {
        return v ? std::string(*v ? yes : no) : std::string("*");
    };
    return "(" + one(d, "D", "!D") + "," + one(p, "P", "!P") + ")";
}

}  // namespace

std::vector<CatalogEntry> builtin_catalog() {
    std::vector<CatalogEntry> entries;

    {
        // Covert data in the integrity-protected psn, never restored: every
        // touched packet fails endpoint verification.
        AttackerConfig atk;
        atk.type = AttackerConfig::Type::EXFIL_PSN_NORESTORE;
        atk.taps = {0, 1};
        atk.covert_len = 4;
        entries.push_back(make_entry("psn-exfil-no-restore", 101, atk, true, std::nullopt));
    }
    {
        // Same channel with a second cooperating tap restoring the original.
        AttackerConfig atk;
        atk.type = AttackerConfig::Type::EXFIL_PSN;
        atk.taps = {0, 1};
        atk.covert_len = 4;
        entries.push_back(make_entry("psn-exfil-two-point", 102, atk, false, false));
    }
    {
        // Covert data in a writable scratch value, restored before the
        // receiver: outside the integrity envelope entirely.
        AttackerConfig atk;
        atk.type = AttackerConfig::Type::EXFIL_SCRATCH;
        atk.taps = {0, 1};
        atk.covert_len = 4;
        ScratchConfig sc;
        sc.pcf_type = wire::kPcfTestPayload;
        sc.mode = wire::IntegrityMode::WRITABLE;
        sc.value = Bytes(4, 0x00);
        entries.push_back(
            make_entry("scratch-exfil-two-point", 103, atk, false, std::nullopt, sc));
    }
    {
        // A gate that requires the MTU scratch field and advertises the
        // policy. Endpoints already comply, so only the signal changes.
        AttackerConfig atk;
        atk.type = AttackerConfig::Type::COERCE;
        atk.taps = {0};
        atk.coerce.required_pcf = wire::kPcfMtu;
        atk.coerce.penalty = observer::CoercePolicy::Penalty::DROP;
        atk.coerce.advertise = true;
        ScratchConfig sc;
        sc.pcf_type = wire::kPcfMtu;
        sc.mode = wire::IntegrityMode::WRITABLE;
        sc.value = wire::mtu_scratch_bytes(1500);
        entries.push_back(make_entry("scratch-coercion-advertised", 104, atk, true, false, sc));
    }
    {
        // Forged stop signals toward both endpoints; no connection key, so
        // the endpoints see verification failures.
        AttackerConfig atk;
        atk.type = AttackerConfig::Type::INJECT_STOP;
        atk.taps = {0, 1};
        atk.inject_directions = {pathdev::Direction::REVERSE, pathdev::Direction::FORWARD};
        atk.inject_count = 3;
        atk.inject_time_s = 1.0;
        entries.push_back(make_entry("forged-stop-injection", 105, atk, true, std::nullopt));
    }
    {
        AttackerConfig atk;
        atk.type = AttackerConfig::Type::PASSIVE;
        atk.taps = {0};
        entries.push_back(make_entry("passive-observation", 106, atk, false, false));
    }
    return entries;
}

CatalogOutcome run_catalog() {
    CatalogOutcome out;
    std::ostringstream text;
    text << "attack catalog\n";

    for (const CatalogEntry& e : builtin_catalog()) {
        SimResult base = run_scenario(e.baseline);
        SimResult attack = run_scenario(e.attack);
        auto cls = classify_dp(base.trace, attack.trace);

        CatalogOutcome::Row row;
        row.name = e.name;
        row.cls = cls;
        row.expected = expect_str(e.expect_d, e.expect_p);
        row.matched = (!e.expect_d || *e.expect_d == cls.detectable) &&
                      (!e.expect_p || *e.expect_p == cls.behavior_changing);
        out.all_matched = out.all_matched && row.matched;

        text << "  " << row.name;
        for (size_t i = row.name.size(); i < 30; ++i) text << ' ';
        text << observer::manipulation_class_str(cls) << "  expected " << row.expected
             << (row.matched ? "" : "  MISMATCH") << "\n";
        out.rows.push_back(std::move(row));
    }

    // Side experiments backing the class table.
    {
        auto w_static =
            make_linkability_workload(endpoint::CidModeKind::RANDOM_STATIC, 1);
        auto cid_score =
            observer::score_linkage(observer::link_by_cid(w_static.records), w_static.flow,
                                    w_static.segment);
        auto psn_score = observer::score_linkage(
            observer::link_by_psn(w_static.records).clusters, w_static.flow, w_static.segment);
        auto w_hotp =
            make_linkability_workload(endpoint::CidModeKind::HOTP_ROTATING, 1);
        auto hotp_score = observer::score_linkage(observer::link_by_cid(w_hotp.records),
                                                  w_hotp.flow, w_hotp.segment);
        size_t reassociated = 0;
        for (const auto& rot : w_hotp.rotations) {
            if (cid::hotp_reassociate(w_hotp.flow_keys[rot.flow], rot.base_counter,
                                      rot.observed_cid))
                ++reassociated;
        }
        text << "linkability (" << w_static.rebinds << " rebinds, "
             << w_static.blackout_rebinds << " behind blackouts)\n";
        text << "  static cid linker   f1=" << cid_score.f1 << "\n";
        text << "  psn-delta linker    f1=" << psn_score.f1 << "\n";
        text << "  rotating cid linker f1=" << hotp_score.f1
             << " recall=" << hotp_score.recall << "\n";
        text << "  key-holder reassociation " << reassociated << "/"
             << w_hotp.rotations.size() << "\n";
    }
    {
        auto flows = make_lola_flows(200, 7);
        double with = observer::classify_lola(flows, true).accuracy;
        double without = observer::classify_lola(flows, false).accuracy;
        text << "lola-bit traffic classification\n";
        text << "  accuracy without lola " << without << ", with lola " << with << "\n";
    }
    {
        // Exfiltration fidelity inside the simulator.
        for (const CatalogEntry& e : builtin_catalog()) {
            if (e.name != "psn-exfil-two-point" && e.name != "scratch-exfil-two-point")
                continue;
            SimResult r = run_scenario(e.attack);
            size_t exact = 0;
            size_t n = std::min(r.exfil_sent.size(), r.exfil_received.size());
            for (size_t i = 0; i < n; ++i)
                if (r.exfil_sent[i] == r.exfil_received[i]) ++exact;
            text << "exfil fidelity " << e.name << ": " << exact << "/"
                 << r.exfil_sent.size() << " messages recovered\n";
        }
    }

    out.text = text.str();
    return out;
}

}  // namespace mcp::harness
