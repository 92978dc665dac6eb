// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <sstream>

#include "arasim/errors.hpp"
#include "arasim/scenario.hpp"

using namespace arasim;

namespace {

const char* kMinimal = R"(# comment
node.a.role = gmc
node.b.role = oc
link.l1.endpoints = a b
link.l1.kind = fiber
link.l1.length_km = 0.1
)";

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool mentions(const std::vector<std::string>& v, const std::string& needle) {
    return std::any_of(v.begin(), v.end(), [&](const std::string& s) {
        return s.find(needle) != std::string::npos;
    });
}

}  // namespace

TEST_CASE("minimal scenario parses with role defaults") {
    const Scenario s = parse_scenario(kMinimal);
    REQUIRE(s.nodes.size() == 2);
    REQUIRE(s.links.size() == 1);

    const NodeSpec& gmc = s.nodes[0];
    CHECK(gmc.id == "a");
    CHECK(gmc.role == Role::Gmc);
    CHECK_FALSE(gmc.two_step);
    CHECK(gmc.clock_class == 6);
    CHECK(gmc.clock_accuracy == 0x21);
    CHECK(gmc.variance == 0x4E5D);
    CHECK(gmc.osc.freq_offset_ppb == 0.0);

    const NodeSpec& oc = s.nodes[1];
    CHECK(oc.role == Role::Oc);
    CHECK(oc.two_step);
    CHECK(oc.draw_freq_offset);
    CHECK(oc.draw_initial_phase);
    CHECK(oc.osc.freq_walk_ppb_per_sqrt_s == 0.5);
    CHECK(oc.osc.white_noise_ns == 5.0);
    CHECK(oc.servo.kp == doctest::Approx(0.7));
    CHECK(oc.servo.ki == doctest::Approx(0.3));

    CHECK(s.links[0].node_a == "a");
    CHECK(s.links[0].node_b == "b");
    CHECK(s.links[0].spec.kind == LinkKind::Fiber);

    // run defaults
    CHECK(s.domain_number == 24);
    CHECK(s.announce_pps == 8.0);
    CHECK(s.sync_pps == 16.0);
    CHECK(s.delay_req_pps == 16.0);

    CHECK(validate(s).empty());
}

TEST_CASE("explicit values override role defaults regardless of key order") {
    const Scenario s = parse_scenario(
        "node.x.freq_offset_ppb = 1500\n"
        "node.x.role = bc\n"
        "node.x.initial_phase_ns = -200\n");
    REQUIRE(s.nodes.size() == 1);
    CHECK_FALSE(s.nodes[0].draw_freq_offset);
    CHECK(s.nodes[0].osc.freq_offset_ppb == 1500.0);
    CHECK_FALSE(s.nodes[0].draw_initial_phase);
    CHECK(s.nodes[0].osc.initial_phase_ns == -200);
}

TEST_CASE("syntax errors carry line numbers") {
    SUBCASE("missing equals") {
        try {
            parse_scenario("node.a.role = gmc\nnot a key value\n");
            FAIL("expected throw");
        } catch (const ScenarioError& e) {
            CHECK(e.line() == 2);
        }
    }
    SUBCASE("unknown section") {
        try {
            parse_scenario("frob.a.x = 1\n");
            FAIL("expected throw");
        } catch (const ScenarioError& e) {
            CHECK(e.line() == 1);
        }
    }
    SUBCASE("unknown node key") {
        CHECK_THROWS_AS(parse_scenario("node.a.role = gmc\nnode.a.bogus = 1\n"),
                        ScenarioError);
    }
    SUBCASE("unknown role") {
        CHECK_THROWS_AS(parse_scenario("node.a.role = mystery\n"), ScenarioError);
    }
    SUBCASE("node without role") {
        CHECK_THROWS_AS(parse_scenario("node.a.priority1 = 1\n"), ScenarioError);
    }
    SUBCASE("non-numeric value") {
        CHECK_THROWS_AS(parse_scenario("node.a.role = gmc\nnode.a.priority1 = soon\n"),
                        ScenarioError);
    }
    SUBCASE("link with dangling endpoint") {
        try {
            parse_scenario("node.a.role = gmc\nlink.l.endpoints = a ghost\n");
            FAIL("expected throw");
        } catch (const ScenarioError& e) {
            CHECK(e.line() == 2);
            CHECK(std::string(e.what()).find("ghost") != std::string::npos);
        }
    }
    SUBCASE("link without endpoints") {
        CHECK_THROWS_AS(parse_scenario("node.a.role = gmc\nlink.l.kind = fiber\n"),
                        ScenarioError);
    }
    SUBCASE("malformed weather segment") {
        CHECK_THROWS_AS(parse_scenario("weather.segment = 0\n"), ScenarioError);
    }
}

TEST_CASE("duration parsing") {
    CHECK(parse_duration_s("120s") == 120.0);
    CHECK(parse_duration_s("30m") == 1800.0);
    CHECK(parse_duration_s("2h") == 7200.0);
    CHECK(parse_duration_s("45") == 45.0);
    CHECK(parse_duration_s("0.5h") == 1800.0);
    CHECK_THROWS_AS(parse_duration_s(""), RangeError);
    CHECK_THROWS_AS(parse_duration_s("soon"), RangeError);
    CHECK_THROWS_AS(parse_duration_s("1x2s"), RangeError);
}

TEST_CASE("validation reports all violations, not just the first") {
    SUBCASE("two grandmasters") {
        const Scenario s = parse_scenario(
            "node.a.role = gmc\nnode.b.role = gmc\n"
            "link.l.endpoints = a b\nlink.l.kind = fiber\nlink.l.length_km = 1\n");
        CHECK(mentions(validate(s), "multiple grandmasters"));
    }
    SUBCASE("domain outside the profile range") {
        Scenario s = parse_scenario(kMinimal);
        s.domain_number = 50;
        CHECK(mentions(validate(s), "24-43"));
        s.domain_number = 23;
        CHECK(mentions(validate(s), "24-43"));
        s.domain_number = 43;
        CHECK_FALSE(mentions(validate(s), "24-43"));
    }
    SUBCASE("wireless link without channel parameters") {
        const Scenario s = parse_scenario(
            "node.a.role = gmc\nnode.b.role = oc\n"
            "link.l.endpoints = a b\nlink.l.kind = wireless\nlink.l.length_km = 10\n");
        CHECK(mentions(validate(s), "no channel parameters"));
    }
    SUBCASE("degree rules") {
        const Scenario s = parse_scenario(
            "node.a.role = gmc\nnode.b.role = oc\nnode.c.role = oc\n"
            "link.l1.endpoints = a b\nlink.l1.kind = fiber\nlink.l1.length_km = 1\n"
            "link.l2.endpoints = c b\nlink.l2.kind = fiber\nlink.l2.length_km = 1\n");
        // b now has two links; an ordinary clock gets exactly one
        CHECK(mentions(validate(s), "exactly one link"));
    }
    SUBCASE("transparent clock needs two links") {
        const Scenario s = parse_scenario(
            "node.a.role = gmc\nnode.t.role = tc_e2e\n"
            "link.l.endpoints = a t\nlink.l.kind = fiber\nlink.l.length_km = 1\n");
        CHECK(mentions(validate(s), "exactly two links"));
    }
    SUBCASE("disconnected topology") {
        const Scenario s = parse_scenario(
            "node.a.role = gmc\nnode.b.role = oc\nnode.c.role = bc\nnode.d.role = bc\n"
            "link.l1.endpoints = a b\nlink.l1.kind = fiber\nlink.l1.length_km = 1\n"
            "link.l2.endpoints = c d\nlink.l2.kind = fiber\nlink.l2.length_km = 1\n");
        CHECK(mentions(validate(s), "not connected"));
    }
    SUBCASE("weather must cover t=0") {
        Scenario s = parse_scenario(kMinimal);
        s.weather_segments = {{100.0, 0.1}};
        CHECK(mentions(validate(s), "weather"));
    }
    SUBCASE("several problems at once come back together") {
        Scenario s = parse_scenario(
            "node.a.role = oc\nnode.b.role = oc\n"
            "link.l.endpoints = a b\nlink.l.kind = fiber\nlink.l.length_km = 1\n");
        s.domain_number = 99;
        const auto v = validate(s);
        CHECK(v.size() >= 2);
        CHECK(mentions(v, "no grandmaster"));
        CHECK(mentions(v, "24-43"));
    }
}

TEST_CASE("serialize then parse is the identity on every field we emit") {
    const Scenario a = ara_preset();
    const std::string text = serialize_scenario(a);
    const Scenario b = parse_scenario(text);
    CHECK(serialize_scenario(b) == text);  // fixpoint after one round
    REQUIRE(b.nodes.size() == a.nodes.size());
    REQUIRE(b.links.size() == a.links.size());
    CHECK(b.domain_number == a.domain_number);
    CHECK(b.seed == a.seed);
    CHECK(b.duration_s == a.duration_s);
    CHECK(b.timestamp_granularity_ns == a.timestamp_granularity_ns);
    for (std::size_t i = 0; i < a.nodes.size(); ++i) {
        CHECK(b.nodes[i].id == a.nodes[i].id);
        CHECK(b.nodes[i].role == a.nodes[i].role);
        CHECK(b.nodes[i].draw_freq_offset == a.nodes[i].draw_freq_offset);
        CHECK(b.nodes[i].servo.lock_threshold_ns == a.nodes[i].servo.lock_threshold_ns);
    }
    for (std::size_t i = 0; i < a.links.size(); ++i) {
        CHECK(b.links[i].id == a.links[i].id);
        CHECK(b.links[i].spec.kind == a.links[i].spec.kind);
        CHECK(b.links[i].spec.length_km == a.links[i].spec.length_km);
        CHECK(b.links[i].wireless.has_value() == a.links[i].wireless.has_value());
    }
}

TEST_CASE("built-in deployment preset") {
    const Scenario s = ara_preset();
    CHECK(validate(s).empty());
    CHECK(s.domain_number == 24);
    CHECK(s.announce_pps == 8.0);
    CHECK(s.sync_pps == 16.0);
    CHECK(s.delay_req_pps == 16.0);
    CHECK(s.nodes.size() == 7);
    CHECK(s.links.size() == 7);

    const auto wl = std::find_if(s.links.begin(), s.links.end(),
                                 [](const LinkDecl& l) { return l.spec.kind == LinkKind::Wireless; });
    REQUIRE(wl != s.links.end());
    REQUIRE(wl->wireless.has_value());
    CHECK(wl->wireless->carrier_ghz == 80.0);
    CHECK(wl->spec.length_km == doctest::Approx(10.15));

    CHECK(preset_names() == std::vector<std::string>{"ara"});
    CHECK(preset_by_name("ara").has_value());
    CHECK_FALSE(preset_by_name("nope").has_value());

    // the serialized form is pinned byte-for-byte
    const std::string golden = slurp(std::string(ARASIM_TEST_DATA_DIR) + "/ara.scn");
    CHECK(serialize_scenario(s) == golden);
}
