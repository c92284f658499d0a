#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "hdsim/rng.hpp"
#include "hdsim/routing.hpp"

using namespace hdsim;

namespace {

// Closed form for the pure queue-differential rule (beta = 0): the link cost
// drops out entirely, so the weight is 2*q - 1 for q > 0 and 0 otherwise.
double closed_form_beta0(double q) { return q > 0.0 ? 2.0 * q - 1.0 : 0.0; }

// Closed form for the pure cost-scaled rule (beta = 1), in terms of the
// normalized differential r = q / etx: 2r - 1 once r >= 1, r^2 while
// 0 < r < 1, and 0 when nothing is waiting.
double closed_form_beta1(double q, double etx) {
    const double inv = 1.0 / etx;
    const double r = q * inv;
    if (q > 0.0 && r >= 1.0) return 2.0 * r - 1.0;
    if (q > 0.0) return r * r;
    return 0.0;
}

std::vector<RankInput> sample_table() {
    // self_backlog = 10 against these gives differentials 8, 6, 4, 1, -2.
    return {{11, 2, 1.0}, {12, 4, 1.5}, {13, 6, 1.0}, {14, 9, 2.0}, {15, 12, 1.0}};
}

}  // namespace

TEST_SUITE("routing_engines") {

TEST_CASE("beta=0 weight equals its closed form on the full grid") {
    int mismatches = 0;
    for (int qi = -50; qi <= 50; ++qi) {
        const double q = static_cast<double>(qi);
        for (int ei = 0; ei <= 90; ++ei) {
            const double e = (10 + ei) / 10.0;
            if (hd_weight_original(q, e, 0.0).weight != closed_form_beta0(q)) ++mismatches;
        }
    }
    CHECK(mismatches == 0);
}

TEST_CASE("beta=1 weight equals its closed form on the full grid") {
    int mismatches = 0;
    for (int qi = -50; qi <= 50; ++qi) {
        const double q = static_cast<double>(qi);
        for (int ei = 0; ei <= 90; ++ei) {
            const double e = (10 + ei) / 10.0;
            if (hd_weight_original(q, e, 1.0).weight != closed_form_beta1(q, e)) ++mismatches;
        }
    }
    CHECK(mismatches == 0);
}

TEST_CASE("frozen spot values for the original rule") {
    CHECK(hd_weight_original(3.0, 1.0, 0.0).weight == 5.0);
    CHECK(hd_weight_original(3.0, 2.5, 0.0).weight == 5.0);  // cost ignored at beta=0
    CHECK(hd_weight_original(4.0, 2.0, 1.0).weight == 3.0);
    CHECK(hd_weight_original(1.0, 2.0, 1.0).weight == 0.25);
    CHECK(hd_weight_original(1.0, 2.0, 1.0).f_hat == 0.5);
}

TEST_CASE("frozen spot values for the deployable scaled rule") {
    const WeightResult two = hd_weight_modified(3.0, 1.0, 1.0, 2.0);
    CHECK(two.weight == 2.0);
    CHECK(two.f == 1.0);

    const WeightResult zero = hd_weight_modified(1.0, 1.0, 1.0, 2.0);
    CHECK(zero.weight == 0.0);   // exactly at the send threshold: not eligible
    CHECK(zero.f_hat == 0.5);
    CHECK(zero.f == 1.0);        // integral send quantum

    CHECK(bp_weight(5.0, 1.5, 2.0).weight == 2.0);
    CHECK(bp_weight(2.0, 1.0, 2.0).weight == 0.0);
}

TEST_CASE("scaled rule is eligible exactly above v*etx/2 at beta=1") {
    for (double v : {2.0, 3.0, 4.0}) {
        int violations = 0;
        for (int qi = -50; qi <= 50; ++qi) {
            const double q = static_cast<double>(qi);
            for (int ei = 0; ei <= 90; ++ei) {
                const double e = (10 + ei) / 10.0;
                const bool positive = hd_weight_modified(q, e, 1.0, v).weight > 0.0;
                const bool above = q > v * e / 2.0;
                if (positive != above) ++violations;
            }
        }
        CHECK(violations == 0);
    }
}

TEST_CASE("negative differential never yields positive weight") {
    int violations = 0;
    for (int qi = -50; qi <= -1; ++qi) {
        const double q = static_cast<double>(qi);
        for (int ei = 0; ei <= 90; ei += 9) {
            const double e = (10 + ei) / 10.0;
            for (double beta : {0.0, 0.25, 0.5, 0.75, 1.0}) {
                if (hd_weight_original(q, e, beta).weight > 0.0) ++violations;
                for (double v : {1.0, 2.0, 4.0}) {
                    if (hd_weight_modified(q, e, beta, v).weight > 0.0) ++violations;
                }
            }
            for (double v : {0.0, 1.0, 2.0, 4.0}) {
                if (bp_weight(q, e, v).weight > 0.0) ++violations;
            }
        }
    }
    CHECK(violations == 0);
}

TEST_CASE("protocol_weight dispatches to the matching rule") {
    ProtocolKind orig{Protocol::HdcpOriginal, 0.4, 2.0};
    CHECK(protocol_weight(orig, 5.0, 1.5).weight == hd_weight_original(5.0, 1.5, 0.4).weight);

    ProtocolKind mod{Protocol::HdcpModified, 1.0, 2.0};
    CHECK(protocol_weight(mod, 5.0, 1.5).weight == hd_weight_modified(5.0, 1.5, 1.0, 2.0).weight);

    ProtocolKind bcp{Protocol::Bcp, 1.0, 2.0};
    CHECK(protocol_weight(bcp, 5.0, 1.5).weight == bp_weight(5.0, 1.5, 2.0).weight);

    ProtocolKind tree{Protocol::MinEtxTree, 1.0, 2.0};
    CHECK_THROWS_AS((void)protocol_weight(tree, 5.0, 1.5), std::logic_error);
}

TEST_CASE("pairwise order is invariant under positive weight scaling") {
    // Ordering decisions must depend only on weight comparisons, so scaling
    // every weight by the same positive constant cannot change any of them.
    // Exact ties must also survive scaling, which holds for the power-of-two
    // and small-integer scales used here.
    auto make = [](NodeId id, double weight, double etx) {
        RankedNeighbor rn;
        rn.id = id;
        rn.wr.weight = weight;
        rn.etx = etx;
        rn.eligible = weight > 0.0;
        return rn;
    };
    std::vector<RankedNeighbor> items = {
        make(1, 5.0, 1.0), make(2, 3.0, 1.5), make(3, 5.0, 2.0),
        make(4, 0.5, 1.0), make(5, 12.0, 1.0), make(6, 3.0, 1.0),
    };
    for (double c : {0.5, 2.0, 3.0, 1024.0}) {
        for (const auto& a : items) {
            for (const auto& b : items) {
                RankedNeighbor sa = a, sb = b;
                sa.wr.weight *= c;
                sb.wr.weight *= c;
                CHECK(rank_before(a, b) == rank_before(sa, sb));
            }
        }
    }
}

TEST_CASE("ranking sorts by weight and flags ineligible entries at the tail") {
    Rng rng(7);
    ProtocolKind proto{Protocol::HdcpModified, 1.0, 2.0};
    auto ranked = rank_neighbors(sample_table(), 10, proto, rng);
    REQUIRE(ranked.size() == 5);
    for (std::size_t i = 1; i < ranked.size(); ++i) {
        CHECK(ranked[i - 1].wr.weight >= ranked[i].wr.weight);
    }
    for (const auto& rn : ranked) {
        CHECK(rn.eligible == (rn.wr.weight > 0.0));
    }
    // Differential 8 over a unit link dominates everything else.
    CHECK(ranked[0].id == 13);
    // The negative-differential neighbor cannot be eligible.
    CHECK_FALSE(ranked.back().eligible);
    CHECK(ranked.back().id == 15);
}

TEST_CASE("ranking is deterministic for a fixed rng seed") {
    // Ties: three neighbors with identical weight.
    std::vector<RankInput> table = {{21, 5, 1.0}, {22, 5, 1.0}, {23, 5, 1.0}, {24, 2, 1.0}};
    ProtocolKind proto{Protocol::Bcp, 1.0, 2.0};

    Rng rng_a(99), rng_b(99), rng_c(100);
    auto a = rank_neighbors(table, 10, proto, rng_a);
    auto b = rank_neighbors(table, 10, proto, rng_b);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].id == b[i].id);
        CHECK(a[i].wr.weight == b[i].wr.weight);
        CHECK(a[i].eligible == b[i].eligible);
    }
    // A different stream may legally permute the tie group, but the sets and
    // weights stay put; just confirm the call succeeds with the same layout.
    auto c = rank_neighbors(table, 10, proto, rng_c);
    CHECK(c.size() == a.size());

    auto det1 = rank_neighbors_deterministic(table, 10, proto);
    auto det2 = rank_neighbors_deterministic(table, 10, proto);
    REQUIRE(det1.size() == det2.size());
    for (std::size_t i = 0; i < det1.size(); ++i) CHECK(det1[i].id == det2[i].id);
    // Shared tiebreak: equal weights resolve by ascending id.
    CHECK(det1[0].id == 21);
    CHECK(det1[1].id == 22);
    CHECK(det1[2].id == 23);
}

TEST_CASE("switch list keeps at most three comparable-cost eligible targets") {
    auto make = [](NodeId id, double weight, double etx) {
        RankedNeighbor rn;
        rn.id = id;
        rn.wr.weight = weight;
        rn.etx = etx;
        rn.eligible = weight > 0.0;
        return rn;
    };
    std::vector<RankedNeighbor> ranked = {
        make(31, 9.0, 1.0),   // anchor: best eligible, etx 1.0
        make(32, 7.0, 1.5),   // inside the etx window
        make(33, 6.0, 2.5),   // outside: 2.5 > 1.0 + 1.0
        make(34, 5.0, 2.0),   // inside, third entry
        make(35, 4.0, 1.0),   // would be fourth: trimmed by length cap
        make(36, -1.0, 1.0),
    };
    SwitchList list = build_switch_list(ranked, 3);
    REQUIRE(list.size() == 3);
    CHECK(list.entries[0].id == 31);
    CHECK(list.entries[1].id == 32);
    CHECK(list.entries[2].id == 34);

    // next() walks the entries cyclically.
    CHECK(list.next().id == 31);
    CHECK(list.next().id == 32);
    CHECK(list.next().id == 34);
    CHECK(list.next().id == 31);

    SwitchList empty_list = build_switch_list({make(41, -2.0, 1.0)}, 3);
    CHECK(empty_list.empty());
    CHECK_THROWS_AS((void)empty_list.next(), std::logic_error);
}

}  // TEST_SUITE
