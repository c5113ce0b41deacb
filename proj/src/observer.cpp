#include "mcp/observer.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace mcp::observer {

ObservationRecord observe(SimTime time, int tap, Direction dir, const FiveTuple& tuple,
                          const wire::Packet& packet) {
    ObservationRecord r;
    r.time = time;
    r.tap = tap;
    r.direction = dir;
    r.tuple = tuple;
    r.cid = packet.cid;
    r.psn = packet.psn;
    r.pse = packet.pse;
    r.flags = packet.flags;
    if (packet.scratch) {
        r.has_scratch = true;
        r.scratch_type = packet.scratch->pcf_type;
        r.scratch_mode = packet.scratch->mode;
        r.scratch_value = packet.scratch->value;
    }
    r.payload_len = packet.payload.size();
    return r;
}

int preference_rank(const ManipulationClass& c) {
    return (c.detectable ? 2 : 0) + (c.behavior_changing ? 1 : 0);
}

std::string manipulation_class_str(const ManipulationClass& c) {
    std::string s = "(";
    s += c.detectable ? "D" : "!D";
    s += c.behavior_changing ? ",P)" : ",!P)";
    return s;
}

PathMetrics measure_path_metrics(const std::vector<ObservationRecord>& records) {
    PathMetrics m;
    std::optional<uint32_t> high[2];
    for (const auto& r : records) {
        int d = r.direction == Direction::FORWARD ? 0 : 1;
        size_t& loss = d == 0 ? m.loss_fwd : m.loss_rev;
        size_t& reorder = d == 0 ? m.reorder_fwd : m.reorder_rev;
        if (!high[d]) {
            high[d] = r.psn;
        } else if (wire::psn_newer(*high[d], r.psn)) {
            loss += (r.psn - *high[d]) - 1;  // gap below the new high
            high[d] = r.psn;
        } else {
            ++reorder;
        }
    }
    // RTT: forward psn X at t1, first later reverse record whose pse covers X.
    for (const auto& fwd : records) {
        if (fwd.direction != Direction::FORWARD) continue;
        for (const auto& rev : records) {
            if (rev.direction != Direction::REVERSE || rev.time < fwd.time) continue;
            if (rev.pse == 0) continue;
            if (rev.pse == fwd.psn || wire::psn_newer(fwd.psn, rev.pse)) {
                m.rtt_samples.push_back(rev.time - fwd.time);
                break;
            }
        }
    }
    return m;
}

std::vector<size_t> link_by_cid(const std::vector<ObservationRecord>& records) {
    std::map<uint64_t, size_t> cluster_of;
    std::vector<size_t> out;
    out.reserve(records.size());
    for (const auto& r : records) {
        auto [it, inserted] = cluster_of.try_emplace(r.cid, cluster_of.size());
        out.push_back(it->second);
    }
    return out;
}

namespace {
struct TrackedFlow {
    size_t cluster;
    uint32_t src_addr;
    uint16_t src_port;
    uint32_t high_psn;
};
}  // namespace

PsnLinkResult link_by_psn(const std::vector<ObservationRecord>& records, uint32_t delta) {
    PsnLinkResult result;
    result.clusters.reserve(records.size());
    std::vector<TrackedFlow> flows;
    size_t next_cluster = 0;

    auto within_delta = [delta](uint32_t high, uint32_t psn) {
        uint32_t diff = psn - high;  // mod 2^32
        return diff >= 1 && diff <= delta;
    };

    for (const auto& r : records) {
        TrackedFlow* match = nullptr;
        bool migrated = false;
        // Same source and a plausible psn continues the flow.
        for (auto& f : flows) {
            if (f.src_addr == r.tuple.src_addr && f.src_port == r.tuple.src_port &&
                (r.psn == f.high_psn || within_delta(f.high_psn, r.psn) ||
                 wire::psn_newer(r.psn, f.high_psn))) {
                match = &f;
                break;
            }
        }
        if (!match) {
            // Different source but psn just above a tracked high-water mark:
            // read as a migration of that flow.
            for (auto& f : flows) {
                if (within_delta(f.high_psn, r.psn)) {
                    match = &f;
                    migrated = true;
                    break;
                }
            }
        }
        if (match) {
            if (migrated) {
                double p_false = static_cast<double>(flows.size()) * 2.0 * delta / 4294967296.0;
                result.migrations.push_back({match->cluster, r.tuple, 1.0 - p_false});
                match->src_addr = r.tuple.src_addr;
                match->src_port = r.tuple.src_port;
            }
            if (wire::psn_newer(match->high_psn, r.psn)) match->high_psn = r.psn;
            result.clusters.push_back(match->cluster);
        } else {
            flows.push_back({next_cluster, r.tuple.src_addr, r.tuple.src_port, r.psn});
            result.clusters.push_back(next_cluster++);
        }
    }
    return result;
}

LinkScore score_linkage(const std::vector<size_t>& predicted,
                        const std::vector<int>& true_flow,
                        const std::vector<int>& segment) {
    // Majority predicted cluster per (flow, segment).
    std::map<std::pair<int, int>, std::map<size_t, size_t>> votes;
    for (size_t i = 0; i < predicted.size(); ++i)
        ++votes[{true_flow[i], segment[i]}][predicted[i]];

    std::vector<int> seg_flow;
    std::vector<size_t> seg_cluster;
    for (const auto& [key, counts] : votes) {
        seg_flow.push_back(key.first);
        size_t best = 0, best_count = 0;
        for (const auto& [cluster, n] : counts) {
            if (n > best_count) {
                best = cluster;
                best_count = n;
            }
        }
        seg_cluster.push_back(best);
    }

    size_t tp = 0, fp = 0, fn = 0;
    for (size_t i = 0; i < seg_flow.size(); ++i) {
        for (size_t j = i + 1; j < seg_flow.size(); ++j) {
            bool same_flow = seg_flow[i] == seg_flow[j];
            bool same_cluster = seg_cluster[i] == seg_cluster[j];
            if (same_flow && same_cluster) ++tp;
            else if (!same_flow && same_cluster) ++fp;
            else if (same_flow && !same_cluster) ++fn;
        }
    }
    LinkScore s;
    s.precision = (tp + fp) == 0 ? 1.0 : static_cast<double>(tp) / (tp + fp);
    s.recall = (tp + fn) == 0 ? 1.0 : static_cast<double>(tp) / (tp + fn);
    s.f1 = (s.precision + s.recall) == 0.0
               ? 0.0
               : 2.0 * s.precision * s.recall / (s.precision + s.recall);
    return s;
}

namespace {
struct Gaussian {
    double mean = 0.0, var = 1.0;
    double log_density(double x) const {
        double d = x - mean;
        return -0.5 * (std::log(2.0 * M_PI * var) + d * d / var);
    }
};

Gaussian fit_gaussian(const std::vector<double>& xs) {
    Gaussian g;
    double n = static_cast<double>(xs.size());
    for (double x : xs) g.mean += x;
    g.mean /= n;
    for (double x : xs) g.var += (x - g.mean) * (x - g.mean);
    g.var = g.var / n + 1e-9;  // variance floor
    return g;
}
}  // namespace

LolaClassifyResult classify_lola(const std::vector<FlowFeatures>& flows, bool use_lola) {
    size_t split = flows.size() / 2;
    size_t n_features = use_lola ? 3 : 2;

    std::map<int, std::vector<std::vector<double>>> per_class;  // label -> feature columns
    std::map<int, size_t> class_count;
    for (size_t i = 0; i < split; ++i) {
        const auto& f = flows[i];
        auto& cols = per_class[f.label];
        cols.resize(n_features);
        cols[0].push_back(f.mean_payload_len);
        cols[1].push_back(f.mean_interarrival_us);
        if (use_lola) cols[2].push_back(f.lola_rate);
        ++class_count[f.label];
    }
    for (const auto& [label, n] : class_count)
        if (n < 10) throw InsufficientData();

    std::map<int, std::vector<Gaussian>> models;
    std::map<int, double> log_prior;
    for (const auto& [label, cols] : per_class) {
        for (const auto& col : cols) models[label].push_back(fit_gaussian(col));
        log_prior[label] =
            std::log(static_cast<double>(class_count[label]) / static_cast<double>(split));
    }

    LolaClassifyResult result;
    size_t correct = 0;
    for (size_t i = split; i < flows.size(); ++i) {
        const auto& f = flows[i];
        double x[3] = {f.mean_payload_len, f.mean_interarrival_us, f.lola_rate};
        int best_label = 0;
        double best_score = -1e300;
        for (const auto& [label, gs] : models) {
            double score = log_prior[label];
            for (size_t k = 0; k < n_features; ++k) score += gs[k].log_density(x[k]);
            if (score > best_score) {
                best_score = score;
                best_label = label;
            }
        }
        result.predictions.push_back(best_label);
        if (best_label == f.label) ++correct;
    }
    size_t n_eval = flows.size() - split;
    result.accuracy = n_eval == 0 ? 0.0 : static_cast<double>(correct) / n_eval;
    return result;
}

Fingerprint fingerprint(const std::vector<ObservationRecord>& rs) {
    Fingerprint fp;
    if (rs.empty()) return fp;
    double n = static_cast<double>(rs.size());
    for (const auto& r : rs) {
        if (r.has_scratch) {
            fp.scratch_rate += 1.0;
            fp.pcf_types.insert(r.scratch_type);
        }
        if (r.flags.lola) fp.lola_rate += 1.0;
        if (r.flags.stop) fp.stop_rate += 1.0;
        if (r.pse != 0) fp.echo_rate += 1.0;
    }
    fp.scratch_rate /= n;
    fp.lola_rate /= n;
    fp.stop_rate /= n;
    fp.echo_rate /= n;
    return fp;
}

size_t match_fingerprint(const Fingerprint& obs, const std::vector<Fingerprint>& profiles) {
    size_t best = 0;
    double best_dist = 1e300;
    for (size_t i = 0; i < profiles.size(); ++i) {
        const Fingerprint& p = profiles[i];
        double d = 0.0;
        auto sq = [](double a) { return a * a; };
        d += sq(obs.scratch_rate - p.scratch_rate);
        d += sq(obs.lola_rate - p.lola_rate);
        d += sq(obs.stop_rate - p.stop_rate);
        d += sq(obs.echo_rate - p.echo_rate);
        std::vector<uint8_t> diff;
        std::set_symmetric_difference(obs.pcf_types.begin(), obs.pcf_types.end(),
                                      p.pcf_types.begin(), p.pcf_types.end(),
                                      std::back_inserter(diff));
        d += static_cast<double>(diff.size());
        if (d < best_dist) {
            best_dist = d;
            best = i;
        }
    }
    return best;
}

// ---------------------------------------------------------------------------

static uint32_t advance_psn(uint32_t psn) {
    return ++psn == 0 ? 1 : psn;
}

bool TwoPointExfil::ingress(wire::Packet& packet, ByteView covert) {
    FlowSync& sync = ingress_flows_[packet.cid];
    if (kind_ == ExfilChannelKind::PROTECTED_PSN) {
        if (covert.size() > 4) throw ChannelTooSmall();
        if (!sync.synced) {
            sync.synced = true;
            return false;
        }
        uint32_t covert32 = 0;
        for (uint8_t b : covert) covert32 = (covert32 << 8) | b;
        if ((packet.psn ^ covert32) == 0) return false;  // would forge the 0 sentinel
        packet.psn ^= covert32;
        return true;
    }

    if (!packet.scratch || packet.scratch->mode != wire::IntegrityMode::WRITABLE)
        return false;
    Bytes& value = packet.scratch->value;
    if (covert.size() > value.size()) throw ChannelTooSmall();
    if (!sync.synced) {
        sync.synced = true;
        sync.baseline_value = value;
        return false;
    }
    value = sync.baseline_value;
    for (size_t i = 0; i < covert.size(); ++i) value[i] ^= covert[i];
    return true;
}

std::optional<Bytes> TwoPointExfil::egress(wire::Packet& packet) {
    FlowSync& sync = egress_flows_[packet.cid];
    if (kind_ == ExfilChannelKind::PROTECTED_PSN) {
        if (!sync.synced) {
            sync.synced = true;
            sync.expected_psn = advance_psn(packet.psn);
            return std::nullopt;
        }
        uint32_t covert32 = packet.psn ^ sync.expected_psn;
        packet.psn = sync.expected_psn;
        sync.expected_psn = advance_psn(sync.expected_psn);
        Bytes out;
        put_u32(out, covert32);
        return out;
    }

    if (!packet.scratch || packet.scratch->mode != wire::IntegrityMode::WRITABLE)
        return std::nullopt;
    Bytes& value = packet.scratch->value;
    if (!sync.synced) {
        sync.synced = true;
        sync.baseline_value = value;
        return std::nullopt;
    }
    Bytes covert(value.size(), 0);
    for (size_t i = 0; i < value.size() && i < sync.baseline_value.size(); ++i)
        covert[i] = value[i] ^ sync.baseline_value[i];
    value = sync.baseline_value;
    return covert;
}

wire::Packet make_forged_stop(uint64_t cid, uint32_t psn, uint32_t pse) {
    wire::Packet p;
    p.flags.stop = true;
    p.cid = cid;
    p.psn = psn == 0 ? 1 : psn;
    p.pse = pse;
    // No connection key: the tag cannot be computed, only guessed.
    p.tag.fill(0);
    return p;
}

GateDecision coerce_gate(const wire::Packet& packet, const CoercePolicy& policy) {
    GateDecision d;
    bool compliant = packet.scratch && packet.scratch->pcf_type == policy.required_pcf;
    if (compliant) return d;
    if (policy.penalty == CoercePolicy::Penalty::DROP) {
        d.action = GateDecision::Action::DROP;
    } else {
        d.action = GateDecision::Action::DELAY;
        d.extra_delay = policy.delay_us;
    }
    return d;
}

}  // namespace mcp::observer
