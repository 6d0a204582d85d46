#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "avl/errors.hpp"
#include "avl/network_gen.hpp"
#include "avl/scenario.hpp"
#include "avl/simulation.hpp"
#include "support/oracles.hpp"

using namespace avl;

namespace {

std::string temp_network(double straight_km = 10.0) {
    NetworkGenSpec spec;
    spec.lanes = 3;
    spec.straight_km = straight_km;
    const std::string path =
        (std::filesystem::temp_directory_path() / "avl_sim_test_net.json").string();
    save_network(generate_lane_grid(spec), path);
    return path;
}

Scenario base_scenario(const std::string& network_file) {
    Scenario s;
    s.seed = 99;
    s.duration_s = 120.0;
    s.fix_rate_hz = 1.0;
    s.network_file = network_file;
    s.matcher.window_size = 5;
    s.base_station.position = {1.0, -0.5, 0.0};
    for (int i = 0; i < 8; ++i) {
        SatelliteSpec sat;
        sat.prn = i + 1;
        const double a = 2.0 * 3.14159265358979 * i / 8.0;
        sat.cartesian = {15000.0 * std::cos(a), 15000.0 * std::sin(a), 20000.0 + 800.0 * i};
        s.constellation.push_back(sat);
    }
    s.vehicle.mode = VehicleSpec::Mode::LaneFollow;
    s.vehicle.initial_lane = 2;
    s.vehicle.speed_mps = 15.0;
    s.vehicle.start_arclength_km = 0.1;
    return s;
}

}  // namespace

TEST_CASE("scenario validation diagnostics") {
    Scenario s = base_scenario(temp_network());
    CHECK(validate_scenario(s).empty());

    SUBCASE("missing network file") {
        s.network_file = "/nonexistent/net.json";
        const auto diags = validate_scenario(s);
        REQUIRE_FALSE(diags.empty());
        CHECK(diags[0].is_error);
        CHECK(diags[0].field == "network_file");
    }
    SUBCASE("window too small") {
        s.matcher.window_size = 1;
        bool found = false;
        for (const auto& d : validate_scenario(s)) {
            found = found || (d.is_error && d.field == "matcher.window_size");
        }
        CHECK(found);
    }
    SUBCASE("satellite below the receiver is a warning") {
        s.constellation[0].cartesian.z_km = -20000.0;
        bool warned = false;
        for (const auto& d : validate_scenario(s)) {
            warned = warned || (!d.is_error && d.field == "constellation");
        }
        CHECK(warned);
    }
    SUBCASE("run refuses an invalid scenario") {
        s.duration_s = -1.0;
        CHECK_THROWS_AS(run_scenario(s), SchemaError);
    }
}

TEST_CASE("scenario file parsing") {
    const Scenario s = load_scenario("scenarios/baseline_dgps.json");
    CHECK(s.duration_s == 300.0);
    CHECK(s.matcher.window_size == 5);
    CHECK(s.constellation.size() == 8);
    CHECK(s.vehicle.lane_changes.size() == 3);
    CHECK(s.channel.max_age_s == 45.0);
    CHECK(validate_scenario(s).empty());
    CHECK_THROWS_AS(parse_scenario_json("{"), SchemaError);
    CHECK_THROWS_AS(parse_scenario_json(R"({"duration_s": 1})"), SchemaError);
}

TEST_CASE("generated lane grids are geometrically continuous") {
    NetworkGenSpec spec;
    spec.lanes = 3;
    spec.straight_km = 2.0;
    spec.arc_radius_km = 0.5;
    spec.arc_deg = 90.0;
    spec.tail_km = 1.0;
    const LaneNetwork net = generate_lane_grid(spec);
    REQUIRE(net.lanes().size() == 3);
    for (const auto& lane : net.lanes()) {
        for (size_t i = 0; i + 1 < lane.points.size(); ++i) {
            CHECK(distance_km(lane.points[i], lane.points[i + 1]) < 0.06);
        }
    }
    // Adjacent lanes stay one spacing apart along their whole length.
    const auto& l1 = net.lane(1);
    const auto& l2 = net.lane(2);
    for (double s = 0.0; s < l1.total_length_km(); s += 0.1) {
        const Vec2 p = point_at_arclength(l1, s).point;
        const double d = project_point(l2, p).distance_km;
        CHECK(std::abs(d - spec.lane_spacing_m * 1e-3) < 1e-4);
    }
}

TEST_CASE("zero-noise run stays glued to the lane") {
    const Scenario s = base_scenario(temp_network());
    const RunReport report = run_scenario(s);
    const auto& a = report.aggregates;
    CHECK(a.total_epochs == 120);
    CHECK(a.unsolved_epochs == 0);
    CHECK(a.lane_accuracy_pct == 100.0);
    double sq = 0.0;
    for (const EpochRow& r : report.rows) {
        sq += r.err_uncorrected_m * r.err_uncorrected_m;
    }
    CHECK(std::sqrt(sq / report.rows.size()) < 1e-6);  // metres
}

TEST_CASE("epoch conservation and aggregate recomputation") {
    Scenario s = base_scenario(temp_network());
    s.errors.receiver_noise_sigma_m = 2.0;
    s.errors.base_noise_sigma_m = 2.0;
    s.errors.iono_delay_min_ns = 20.0;
    s.errors.iono_delay_max_ns = 60.0;
    s.vehicle.lane_changes.push_back({40.0, 1, 3.0});
    const RunReport report = run_scenario(s);
    const auto& a = report.aggregates;
    CHECK(a.matched_epochs + a.unmatched_epochs + a.warmup_epochs + a.unsolved_epochs ==
          a.total_epochs);

    // Re-parse the CSV and recompute: identical aggregates.
    const auto rows = oracle::parse_report_csv(report.to_csv());
    REQUIRE(rows.size() == report.rows.size());
    const RunAggregates b = compute_aggregates(rows, report.exclusion_windows_s,
                                               a.corrections_sent, a.corrections_lost);
    CHECK(b.total_epochs == a.total_epochs);
    CHECK(b.matched_epochs == a.matched_epochs);
    CHECK(b.lane_accuracy_pct == a.lane_accuracy_pct);
    CHECK(b.steady_accuracy_pct == a.steady_accuracy_pct);
    CHECK(b.rms_corrected_m == a.rms_corrected_m);
    CHECK(b.rms_uncorrected_m == a.rms_uncorrected_m);
    CHECK(b.mean_latency_s == a.mean_latency_s);
}

TEST_CASE("corrections help and latency stays within channel bounds") {
    Scenario s = base_scenario(temp_network());
    s.duration_s = 240.0;
    s.errors.receiver_noise_sigma_m = 2.0;
    s.errors.base_noise_sigma_m = 2.0;
    s.errors.iono_delay_min_ns = 20.0;
    s.errors.iono_delay_max_ns = 60.0;
    s.errors.receiver_clock_bias_ms = 0.1;
    for (auto& sat : s.constellation) {
        sat.clock_error_ns = 120.0 * ((sat.prn % 3) - 1);
    }
    s.channel.max_age_s = 45.0;
    const RunReport with = run_scenario(s);
    Scenario off = s;
    off.dgps_enabled = false;
    const RunReport without = run_scenario(off);

    CHECK(with.aggregates.rms_corrected_m < with.aggregates.rms_uncorrected_m);
    // Loose sanity bound for this small constellation; the tighter accuracy
    // target is covered by the acceptance gate with a wider geometry.
    CHECK(with.aggregates.rms_corrected_m <= 5.0);
    CHECK(without.aggregates.rms_corrected_m == 0.0);
    CHECK(with.aggregates.corrections_sent > 0);

    const double tx_floor = 0.0;
    for (const EpochRow& r : with.rows) {
        if (r.latency_s) {
            CHECK(*r.latency_s >= s.channel.latency_min_s + tx_floor);
            CHECK(*r.latency_s <= s.channel.latency_max_s + 1.0);  // + transmission time
        }
    }
}

TEST_CASE("identical seeds give byte-identical reports") {
    Scenario s = base_scenario(temp_network());
    s.errors.receiver_noise_sigma_m = 2.0;
    s.errors.iono_delay_min_ns = 20.0;
    s.errors.iono_delay_max_ns = 60.0;
    const RunReport a = run_scenario(s);
    const RunReport b = run_scenario(s);
    CHECK(a.to_csv() == b.to_csv());
    CHECK(a.summary_text() == b.summary_text());
    s.seed += 1;
    CHECK(run_scenario(s).to_csv() != a.to_csv());
}

TEST_CASE("output files") {
    namespace fs = std::filesystem;
    const std::string net_path = temp_network(2.0);
    const LaneNetwork net = load_network(net_path);
    const std::string out_dir = (fs::temp_directory_path() / "avl_sim_out").string();

    SUBCASE("empty report writes a header-only csv") {
        RunReport empty;
        emit_outputs(empty, net, out_dir);
        std::ifstream in(fs::path(out_dir) / "report.csv");
        std::string line;
        int lines = 0;
        while (std::getline(in, line)) {
            ++lines;
        }
        CHECK(lines == 1);
    }
    SUBCASE("full run writes all three artifacts") {
        Scenario s = base_scenario(net_path);
        s.duration_s = 30.0;
        const RunReport report = run_scenario(s);
        emit_outputs(report, net, out_dir);
        CHECK(fs::exists(fs::path(out_dir) / "report.csv"));
        CHECK(fs::exists(fs::path(out_dir) / "summary.txt"));
        CHECK(fs::exists(fs::path(out_dir) / "geometry.json"));
        std::ifstream in(fs::path(out_dir) / "report.csv");
        std::string line;
        int lines = 0;
        while (std::getline(in, line)) {
            ++lines;
        }
        CHECK(lines == 1 + report.aggregates.total_epochs);
    }
    fs::remove_all(out_dir);
}

TEST_CASE("waypoint vehicles work without lane following") {
    Scenario s = base_scenario(temp_network());
    s.vehicle.mode = VehicleSpec::Mode::Waypoints;
    s.vehicle.waypoints = {{{0.1, 0.0036}, 15.0}, {{1.6, 0.0036}, 15.0}};
    s.duration_s = 100.0;
    const RunReport report = run_scenario(s);
    CHECK(report.aggregates.lane_accuracy_pct == 100.0);
    CHECK(report.rows.front().truth_lane == 2);
}
