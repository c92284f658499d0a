#include "hdsim/routing.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>

namespace hdsim {

WeightResult hd_weight_original(double q_diff, double etx, double beta) {
    assert(etx >= 1.0 && beta >= 0.0 && beta <= 1.0);
    const double phi = (1.0 - beta) + beta / etx;
    const double f_hat = std::min(phi * std::max(q_diff, 0.0), 1.0);
    WeightResult r;
    r.f_hat = f_hat;
    r.f = static_cast<int>(std::ceil(f_hat));
    r.weight = 2.0 * phi * q_diff * f_hat - f_hat * f_hat;
    return r;
}

WeightResult hd_weight_modified(double q_diff, double etx, double beta, double v) {
    assert(etx >= 1.0 && beta >= 0.0 && beta <= 1.0 && v >= 1.0);
    const double phi = (1.0 - beta) + beta / (v * etx);
    const double f_hat = std::min(phi * std::max(q_diff, 0.0), 1.0);
    WeightResult r;
    r.f_hat = f_hat;
    r.f = static_cast<int>(std::ceil(f_hat));
    const double f = static_cast<double>(r.f);
    r.weight = 2.0 * phi * q_diff * f - f * f;
    return r;
}

WeightResult bp_weight(double q_diff, double etx, double v) {
    assert(etx >= 1.0 && v >= 0.0);
    WeightResult r;
    r.weight = q_diff - v * etx;
    r.f_hat = r.weight > 0.0 ? 1.0 : 0.0;
    r.f = static_cast<int>(r.f_hat);
    return r;
}

WeightResult protocol_weight(const ProtocolKind& p, double q_diff, double etx) {
    switch (p.kind) {
        case Protocol::HdcpOriginal: return hd_weight_original(q_diff, etx, p.beta);
        case Protocol::HdcpModified: return hd_weight_modified(q_diff, etx, p.beta, p.v);
        case Protocol::Bcp:          return bp_weight(q_diff, etx, p.v);
        case Protocol::MinEtxTree:   break;
    }
    throw std::logic_error("protocol_weight: tree routing has no per-neighbor weight");
}

bool rank_before(const RankedNeighbor& a, const RankedNeighbor& b) {
    return a.wr.weight > b.wr.weight;
}

namespace {

std::vector<RankedNeighbor> weigh_all(const std::vector<RankInput>& table,
                                      int self_backlog,
                                      const ProtocolKind& protocol) {
    std::vector<RankedNeighbor> out;
    out.reserve(table.size());
    for (const RankInput& in : table) {
        RankedNeighbor rn;
        rn.id = in.id;
        rn.etx = in.etx;
        rn.wr = protocol_weight(protocol, static_cast<double>(self_backlog - in.backlog), in.etx);
        rn.eligible = rn.wr.weight > 0.0;
        out.push_back(rn);
    }
    return out;
}

void sort_by_weight_then_id(std::vector<RankedNeighbor>& v) {
    std::sort(v.begin(), v.end(), [](const RankedNeighbor& a, const RankedNeighbor& b) {
        if (a.wr.weight != b.wr.weight) return a.wr.weight > b.wr.weight;
        return a.id < b.id;
    });
}

}  // namespace

std::vector<RankedNeighbor> rank_neighbors(const std::vector<RankInput>& table,
                                           int self_backlog,
                                           const ProtocolKind& protocol,
                                           Rng& rng) {
    std::vector<RankedNeighbor> out = weigh_all(table, self_backlog, protocol);
    sort_by_weight_then_id(out);
    // Fisher-Yates within each run of exactly-equal weights.
    std::size_t i = 0;
    while (i < out.size()) {
        std::size_t j = i + 1;
        while (j < out.size() && out[j].wr.weight == out[i].wr.weight) ++j;
        for (std::size_t k = j - 1; k > i; --k) {
            std::size_t pick = i + static_cast<std::size_t>(rng.uniform_u64(k - i + 1));
            std::swap(out[k], out[pick]);
        }
        i = j;
    }
    return out;
}

std::vector<RankedNeighbor> rank_neighbors_deterministic(const std::vector<RankInput>& table,
                                                         int self_backlog,
                                                         const ProtocolKind& protocol) {
    std::vector<RankedNeighbor> out = weigh_all(table, self_backlog, protocol);
    sort_by_weight_then_id(out);
    return out;
}

const SwitchList::Entry& SwitchList::next() {
    if (entries.empty()) throw std::logic_error("SwitchList::next on empty list");
    const Entry& e = entries[static_cast<std::size_t>(cursor)];
    cursor = (cursor + 1) % static_cast<int>(entries.size());
    return e;
}

SwitchList build_switch_list(const std::vector<RankedNeighbor>& ranked, int max_k) {
    SwitchList list;
    double best_etx = 0.0;
    bool have_best = false;
    for (const RankedNeighbor& rn : ranked) {
        if (!rn.eligible) continue;
        if (!have_best) {
            best_etx = rn.etx;
            have_best = true;
        }
        if (rn.etx <= best_etx + 1.0) {
            list.entries.push_back({rn.id, rn.wr.weight, rn.etx});
            if (static_cast<int>(list.entries.size()) >= max_k) break;
        }
    }
    return list;
}

}  // namespace hdsim
