#include "trace/evidence.hpp"

#include "trace/digest.hpp"
#include "trace/errors.hpp"
#include "trace/rng.hpp"

#include <doctest.h>

using namespace trace;

namespace {

EvidenceTrail sample_trail(size_t n) {
    EvidenceTrail t;
    t.task_id = "t-1";
    for (size_t i = 0; i < n; ++i) {
        t = append_evidence(std::move(t), "L3", EventKind::policy_decision,
                            {{"task_id", "t-1"},
                             {"decision_kind", "invoke"},
                             {"reason", {{"step_index", i}}}});
    }
    return t;
}

// Independent oracle: recompute every digest and link from scratch, without
// going through verify_trail.
bool brute_force_chain_ok(const EvidenceTrail& t) {
    std::string prev = zero_digest();
    for (size_t i = 0; i < t.records.size(); ++i) {
        const EvidenceRecord& r = t.records[i];
        const json canonical =
            json::array({r.seq, r.actor, to_string(r.event_kind), r.payload, r.prev_hash});
        if (r.seq != i) return false;
        if (r.prev_hash != prev) return false;
        if (sha256_hex(canonical.dump()) != r.this_hash) return false;
        prev = r.this_hash;
    }
    return true;
}

} // namespace

TEST_CASE("first record links to the zero digest") {
    EvidenceTrail t;
    t.task_id = "t-0";
    t = append_evidence(std::move(t), "L3", EventKind::finalization,
                        {{"decision", "approve"}, {"confidence", 0.9}, {"total_cost", 1.0}});
    REQUIRE(t.records.size() == 1);
    CHECK(t.records[0].seq == 0);
    CHECK(t.records[0].prev_hash == zero_digest());
    CHECK(verify_trail(t));
}

TEST_CASE("appending to a 3-record trail yields seq 3") {
    EvidenceTrail t = sample_trail(3);
    t = append_evidence(std::move(t), "L2a:c", EventKind::invocation, {{"component_id", "c"}});
    CHECK(t.records.size() == 4);
    CHECK(t.records.back().seq == 3);
    CHECK(verify_trail(t));
    CHECK(brute_force_chain_ok(t));
}

TEST_CASE("appending after payload tampering raises ChainCorrupt") {
    EvidenceTrail t = sample_trail(3);
    t.records[1].payload["reason"]["step_index"] = 99;
    CHECK(!brute_force_chain_ok(t));
    CHECK_THROWS_AS(
        append_evidence(std::move(t), "L3", EventKind::finalization, {{"decision", "x"}}),
        ChainCorrupt);
}

TEST_CASE("verify_trail accepts fresh trails and rejects gaps") {
    EvidenceTrail t = sample_trail(5);
    CHECK(verify_trail(t));
    SUBCASE("deleting a middle record breaks the chain") {
        t.records.erase(t.records.begin() + 2);
        CHECK(!verify_trail(t));
    }
    SUBCASE("a flipped payload bit in record 0 is detected") {
        t.records[0].payload["decision_kind"] = "reinvoke";
        CHECK(!verify_trail(t));
        CHECK(!brute_force_chain_ok(t));
    }
}

TEST_CASE("append is deterministic") {
    const EvidenceTrail a = sample_trail(4);
    const EvidenceTrail b = sample_trail(4);
    REQUIRE(a.records.size() == b.records.size());
    for (size_t i = 0; i < a.records.size(); ++i) {
        CHECK(a.records[i].this_hash == b.records[i].this_hash);
    }
}

TEST_CASE("any single-record mutation or interior deletion is detected") {
    RngStream rng(99, "tamper", 0);
    for (int round = 0; round < 200; ++round) {
        EvidenceTrail t = sample_trail(2 + rng.uniform_int(6));
        const uint64_t victim = rng.uniform_int(t.records.size());
        switch (rng.uniform_int(4)) {
            case 0:
                t.records[victim].payload["extra"] = static_cast<int64_t>(rng.next_u64());
                break;
            case 1:
                t.records[victim].actor = "L4";
                break;
            case 2:
                // Truncating the tail is the one edit a bare hash chain
                // cannot see; delete interior records only.
                t.records.erase(t.records.begin() +
                                rng.uniform_int(t.records.size() - 1));
                break;
            default: {
                std::string& h = t.records[victim].this_hash;
                const size_t pos = rng.uniform_int(h.size());
                h[pos] = h[pos] == 'f' ? '0' : 'f';
                break;
            }
        }
        CHECK(verify_trail(t) == brute_force_chain_ok(t));
        CHECK(!verify_trail(t));
    }
}

TEST_CASE("completeness counts records with all required fields") {
    EvidenceTrail t;
    t.task_id = "t-2";
    for (int i = 0; i < 3; ++i) {
        t = append_evidence(std::move(t), "L1", EventKind::rule_fired,
                            {{"rule_id", "r"}, {"rule_version", 1}, {"outcome", "allow"}});
    }
    t = append_evidence(std::move(t), "L1", EventKind::rule_fired,
                        {{"rule_id", "r"}, {"rule_version", 1}});  // missing outcome
    CHECK(trail_completeness(t, default_payload_schema()) == doctest::Approx(0.75));

    SUBCASE("empty fields do not count") {
        EvidenceTrail e;
        e = append_evidence(std::move(e), "L1", EventKind::rule_fired,
                            {{"rule_id", ""}, {"rule_version", 1}, {"outcome", "allow"}});
        CHECK(trail_completeness(e, default_payload_schema()) == 0.0);
    }
    SUBCASE("an empty trail is vacuously complete") {
        CHECK(trail_completeness(EvidenceTrail{}, default_payload_schema()) == 1.0);
    }
    SUBCASE("a kind missing from the schema is an error") {
        PayloadSchema partial = default_payload_schema();
        partial.erase("rule_fired");
        CHECK_THROWS_AS(trail_completeness(t, partial), UnknownEventKind);
    }
}

TEST_CASE("completeness never increases when a required field is removed") {
    EvidenceTrail t = sample_trail(6);
    const double before = trail_completeness(t, default_payload_schema());
    t.records[3].payload.erase("reason");
    CHECK(trail_completeness(t, default_payload_schema()) <= before);
}

TEST_CASE("jsonl round-trip preserves records exactly") {
    const EvidenceTrail t = sample_trail(4);
    for (const EvidenceRecord& r : t.records) {
        const EvidenceRecord back = record_from_jsonl(record_to_jsonl(r));
        CHECK(back.seq == r.seq);
        CHECK(back.actor == r.actor);
        CHECK(back.event_kind == r.event_kind);
        CHECK(back.payload == r.payload);
        CHECK(back.prev_hash == r.prev_hash);
        CHECK(back.this_hash == r.this_hash);
    }
}

TEST_CASE("split_trails separates concatenated chains on seq 0") {
    const EvidenceTrail a = sample_trail(3);
    const EvidenceTrail b = sample_trail(2);
    std::vector<EvidenceRecord> flat;
    flat.insert(flat.end(), a.records.begin(), a.records.end());
    flat.insert(flat.end(), b.records.begin(), b.records.end());
    const auto trails = split_trails(flat);
    REQUIRE(trails.size() == 2);
    CHECK(trails[0].records.size() == 3);
    CHECK(trails[1].records.size() == 2);
    CHECK(trails[0].task_id == "t-1");
    CHECK(verify_trail(trails[0]));
    CHECK(verify_trail(trails[1]));
}
