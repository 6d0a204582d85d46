// Acceptance gate: one pass/fail line per criterion, nonzero exit on any
// failure. Run from the repository root (uses scenarios/ and temp files).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "avl/dgps.hpp"
#include "avl/errors.hpp"
#include "avl/geodesy.hpp"
#include "avl/lane_matcher.hpp"
#include "avl/network_gen.hpp"
#include "avl/pnt_solver.hpp"
#include "avl/scenario.hpp"
#include "avl/signal_codes.hpp"
#include "avl/simulation.hpp"
#include "support/oracles.hpp"

using namespace avl;

namespace {

const EarthModel kEarth;
const double kC = kEarth.speed_of_light_km_per_s;

int g_failures = 0;

struct Check {
    bool ok = true;
    std::string detail;

    void require(bool cond, const std::string& what) {
        if (!cond && ok) {
            ok = false;
            detail = what;
        }
    }
};

void report(int index, const char* title, const Check& c, double elapsed_s,
            double budget_s) {
    bool ok = c.ok;
    std::string detail = c.detail;
    if (ok && elapsed_s > budget_s) {
        ok = false;
        detail = "runtime " + std::to_string(elapsed_s) + " s exceeds budget";
    }
    std::printf("criterion %2d [%s] %s (%.2f s)%s%s\n", index, ok ? "PASS" : "FAIL", title,
                elapsed_s, detail.empty() ? "" : " -- ", detail.c_str());
    if (!ok) {
        ++g_failures;
    }
}

void run(int index, const char* title, double budget_s,
         const std::function<void(Check&)>& body) {
    Check c;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        body(c);
    } catch (const std::exception& e) {
        c.require(false, std::string("exception: ") + e.what());
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report(index, title, c, elapsed, budget_s);
}

std::string temp_file(const char* name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

// --- shared scenario builders ----------------------------------------------

Scenario reference_scenario(const std::string& network_file) {
    Scenario s;
    s.seed = 20260825;
    s.fix_rate_hz = 1.0;
    s.network_file = network_file;
    s.matcher.window_size = 5;
    s.matcher.candidate_distance_m = 10.0;
    s.errors.iono_delay_min_ns = 20.0;
    s.errors.iono_delay_max_ns = 60.0;
    s.errors.receiver_noise_sigma_m = 2.0;
    s.errors.base_noise_sigma_m = 2.0;
    s.errors.receiver_clock_bias_ms = 0.1;
    s.errors.base_clock_bias_ms = 0.05;
    s.errors.base_smoothing_epochs = 30;
    s.channel.latency_min_s = 5.0;
    s.channel.latency_max_s = 10.0;
    s.channel.correction_period_s = 30.0;
    s.channel.bandwidth_bps = 20000.0;
    s.channel.max_age_s = 45.0;
    s.base_station.position = {2.0, -1.0, 0.0};
    std::mt19937_64 rng(404);
    std::uniform_real_distribution<double> clk(-150.0, 150.0);
    for (int i = 0; i < 14; ++i) {
        SatelliteSpec sat;
        sat.prn = i + 1;
        const double az = 2.0 * std::numbers::pi * i / 14.0;
        const double r = 9000.0 + 6000.0 * (i % 3);
        sat.cartesian = {r * std::cos(az), r * std::sin(az), 20000.0 + 450.0 * i};
        sat.clock_error_ns = clk(rng);
        s.constellation.push_back(sat);
    }
    s.vehicle.mode = VehicleSpec::Mode::LaneFollow;
    s.vehicle.initial_lane = 2;
    s.vehicle.start_arclength_km = 0.2;
    return s;
}

std::string make_network(const char* name, double straight_km, double tail_km) {
    NetworkGenSpec spec;
    spec.lanes = 3;
    spec.straight_km = straight_km;
    spec.arc_radius_km = 3.0;
    spec.arc_deg = 90.0;
    spec.tail_km = tail_km;
    const std::string path = temp_file(name);
    save_network(generate_lane_grid(spec), path);
    return path;
}

// --- criteria ---------------------------------------------------------------

void criterion1(Check& c) {
    std::mt19937_64 rng(1001);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        const CartesianCoord truth{4000.0 * (u01(rng) - 0.5), 4000.0 * (u01(rng) - 0.5), 0.0};
        std::vector<SatelliteState> sats;
        const double phase = 2.0 * std::numbers::pi * u01(rng);
        for (int k = 0; k < 3; ++k) {
            const double az = phase + 2.0 * std::numbers::pi * k / 3.0 +
                              (u01(rng) - 0.5) * std::numbers::pi / 3.0;
            const double r = 8000.0 + 8000.0 * u01(rng);
            sats.push_back({k + 1, {r * std::cos(az), r * std::sin(az),
                                    18000.0 + 6000.0 * u01(rng)}, 0.0, true});
        }
        const double az4 = 2.0 * std::numbers::pi * u01(rng);
        const double r4 = 8000.0 * u01(rng);
        sats.push_back({4, {r4 * std::cos(az4), r4 * std::sin(az4),
                            24000.0 + 4000.0 * u01(rng)}, 0.0, true});
        const double b = (u01(rng) - 0.5) * 1e-3;
        const auto obs = oracle::exact_observations(truth, sats, b);

        const PositionFix fix = solve_iterative(obs, sats, {0.0, 0.0, 0.0});
        c.require(distance_km(fix.position, truth) <= 1e-6, "iterative position error");
        c.require(std::abs(fix.clock_bias_s - b) <= 1e-9, "iterative clock bias error");

        const auto clean = oracle::exact_observations(truth, sats);
        const auto sol = solve_three_sphere(std::span(clean.data(), 3),
                                            std::span(sats.data(), 3));
        for (int k = 0; k < 3; ++k) {
            const double ra = distance_km(sol.fix.position, sats[k].position) -
                              clean[k].pseudorange_km;
            const double rb =
                distance_km(sol.alternate, sats[k].position) - clean[k].pseudorange_km;
            c.require(std::abs(ra) <= 1e-6, "three-sphere root residual");
            c.require(std::abs(rb) <= 1e-6, "three-sphere alternate residual");
        }
        if (!c.ok) {
            return;
        }
    }
}

void criterion2(Check& c) {
    std::mt19937_64 rng(2002);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const double b = 1e-3;
    for (int i = 0; i < 100; ++i) {
        const CartesianCoord truth{0.0, 0.0, 0.0};
        const double ring_r = 12000.0 + 4000.0 * u01(rng);
        const double ring_z = 22000.0 + 4000.0 * u01(rng);
        const double phase = 2.0 * std::numbers::pi * u01(rng);
        std::vector<SatelliteState> sats;
        for (int k = 0; k < 3; ++k) {
            const double az = phase + 2.0 * std::numbers::pi * k / 3.0;
            sats.push_back({k + 1, {ring_r * std::cos(az), ring_r * std::sin(az), ring_z},
                            0.0, true});
        }
        const auto obs3 = oracle::exact_observations(truth, sats, b);
        const auto biased = solve_three_sphere(obs3, sats);
        // A fourth satellite on the bisector plane of the true and biased
        // positions sees both at the same distance, so the two-step formula
        // recovers the injected bias exactly.
        const double mid_z = 0.5 * (truth.z_km + biased.fix.position.z_km);
        const double az4 = 2.0 * std::numbers::pi * u01(rng);
        const double r4 = 15000.0 + 3000.0 * u01(rng);
        sats.push_back({4, {r4 * std::cos(az4), r4 * std::sin(az4), mid_z}, 0.0, true});
        const auto obs = oracle::exact_observations(truth, sats, b);
        const double est = estimate_clock_bias(biased.fix, obs[3], sats[3]);
        c.require(est > 0.0, "estimated bias not positive");
        c.require(std::abs(est - b) <= 1e-9, "estimated bias off by more than 1e-9 s");
        if (!c.ok) {
            return;
        }
    }
}

void criterion3(Check& c) {
    const CartesianCoord p = to_cartesian_paper({49.6, 40.6, 27500.0}, kEarth);
    c.require(std::abs(p.x_km - 5540.32) <= 0.05, "x outside 5540.32 +- 0.05");
    c.require(std::abs(p.y_km - 9070.12) <= 0.5, "y outside 9070.12 +- 0.5");
    c.require(p.z_km == 27500.0, "z must pass through unchanged");
}

void criterion4(Check& c) {
    const auto& table = ca_code_table();
    for (int i = 0; i < 32 && c.ok; ++i) {
        c.require(correlate(std::vector<uint8_t>(table[i].chips.begin(),
                                                 table[i].chips.end()),
                            table[i], 0) == 1023,
                  "autocorrelation peak must be 1023");
        for (int j = i + 1; j < 32 && c.ok; ++j) {
            const std::vector<uint8_t> rx(table[j].chips.begin(), table[j].chips.end());
            for (int lag = 0; lag < kChipsPerCode; ++lag) {
                const int v = correlate(rx, table[i], lag);
                if (v != -65 && v != -1 && v != 63) {
                    c.require(false, "cross-correlation outside {-65, -1, 63}");
                    break;
                }
            }
        }
    }
    std::mt19937_64 rng(4004);
    for (int trial = 0; trial < 100 && c.ok; ++trial) {
        const int prn = 1 + trial % 32;
        const int lag = static_cast<int>(rng() % 1023);
        std::vector<uint8_t> rx(kChipsPerCode);
        for (int i = 0; i < kChipsPerCode; ++i) {
            rx[(i + lag) % kChipsPerCode] = table[prn - 1].chips[i];
        }
        std::vector<int> idx(kChipsPerCode);
        for (int i = 0; i < kChipsPerCode; ++i) {
            idx[i] = i;
        }
        std::shuffle(idx.begin(), idx.end(), rng);
        for (int i = 0; i < 102; ++i) {
            rx[idx[i]] ^= 1;
        }
        const CodeLock lock = identify_satellite(rx);
        c.require(lock.prn_id == prn && lock.lag == lag,
                  "misidentification at 10% chip flips");
    }
}

void criterion5(Check& c) {
    std::mt19937_64 rng(5005);
    std::uniform_real_distribution<double> pos(-30000.0, 30000.0);
    std::uniform_real_distribution<double> clk(-1e-3, 1e-3);
    int cases = 0;
    for (int i = 0; i < 400 && c.ok; ++i) {
        Almanac alm;
        alm.iono_delay_s = 40e-9;
        const int n_sats = 1 + static_cast<int>(rng() % 12);
        for (int k = 0; k < n_sats; ++k) {
            alm.entries.push_back({k + 1, (rng() % 8) != 0,
                                   {pos(rng), pos(rng), pos(rng)}, clk(rng)});
        }
        alm = quantize(alm);
        auto slices = almanac_slices(alm);
        c.require(slices.size() == kAlmanacSlices, "almanac must split into 25 slices");

        Ephemeris eph;
        eph.prn_id = 1 + static_cast<int>(rng() % 32);
        eph.mode = (rng() % 2) ? OrbitMode::Circular : OrbitMode::Static;
        eph.position_at_epoch = {pos(rng), pos(rng), pos(rng)};
        CartesianCoord axis{pos(rng), pos(rng), pos(rng) + 1.0};
        eph.rotation_axis = (1.0 / axis.norm()) * axis;
        eph.angular_rate_rad_per_s = clk(rng);
        eph.clock_offset_s = clk(rng);
        eph.epoch_time_s = static_cast<double>(rng() % 604800);
        eph = quantize(eph);
        const ClockData clock = quantize(
            ClockData{static_cast<uint16_t>(rng() % 1024),
                      static_cast<uint32_t>(rng() % 604800), clk(rng),
                      static_cast<uint8_t>(rng() % 2)});

        for (int k = 0; k < static_cast<int>(kAlmanacSlices) && c.ok; ++k) {
            const NavFrame frame = build_nav_frame(eph, slices[k], clock, k);
            c.require(frame.bits.size() == kFrameBits, "frame must be 1500 bits");
            c.require(frame.clock_section().size() == 300 &&
                          frame.ephemeris_section().size() == 600 &&
                          frame.almanac_section().size() == 600,
                      "section boundaries must sit at 300/900");
            const ParsedFrame parsed = parse_nav_frame(frame.bits);
            c.require(parsed.ephemeris == eph && parsed.clock == clock &&
                          parsed.almanac_slice == slices[k],
                      "nav frame round trip mismatch");
            ++cases;
        }
        std::shuffle(slices.begin(), slices.end(), rng);
        c.require(reassemble_almanac(slices) == alm, "almanac reassembly mismatch");
        ++cases;

        const int prn = 1 + static_cast<int>(rng() % 32);
        const double t = std::ldexp(static_cast<double>(rng() % (604800ull << 20)), -20);
        const CompactMessage msg = parse_compact_message(build_compact_message(prn, t));
        c.require(msg.prn_id == prn && msg.transmit_time_s == t,
                  "compact message round trip mismatch");
        ++cases;
    }
    c.require(cases >= 10000, "fewer than 10000 codec cases exercised");
}

void criterion6(Check& c) {
    Scenario s = reference_scenario(make_network("avl_accept_net6.json", 8.0, 0.0));
    s.duration_s = 3600.0;
    s.vehicle.speed_mps = 2.0;
    const RunReport report = run_scenario(s);
    const auto& a = report.aggregates;
    c.require(a.total_epochs >= 3600, "need at least 3600 epochs");
    c.require(a.rms_corrected_m <= 3.0, "corrected RMS above 3 m: rms=" +
                                            std::to_string(a.rms_corrected_m));
    c.require(a.rms_corrected_m <= 0.5 * a.rms_uncorrected_m,
              "corrected RMS above half the uncorrected RMS: " +
                  std::to_string(a.rms_corrected_m) + " vs " +
                  std::to_string(a.rms_uncorrected_m));
}

void criterion7(Check& c) {
    Scenario s = reference_scenario(make_network("avl_accept_net7.json", 100.0, 55.0));
    s.duration_s = 10000.0;
    s.vehicle.speed_mps = 15.0;
    s.errors.receiver_noise_sigma_m = 1.2;
    const int lanes[] = {1, 2, 3, 2, 1, 2, 3, 2, 1, 2, 3,
                         2, 1, 2, 3, 2, 1, 2, 3, 2, 1};
    for (int i = 0; i < 21; ++i) {
        s.vehicle.lane_changes.push_back({400.0 + 450.0 * i, lanes[i], 3.0});
    }
    const RunReport noisy = run_scenario(s);
    c.require(noisy.aggregates.total_epochs >= 10000, "need at least 10000 epochs");
    c.require(noisy.aggregates.rms_corrected_m <= 3.0,
              "corrected-fix noise above the 3 m RMS precondition");
    c.require(noisy.aggregates.steady_accuracy_pct >= 95.0,
              "steady accuracy below 95%: " +
                  std::to_string(noisy.aggregates.steady_accuracy_pct));

    Scenario zero = s;
    zero.errors = {};
    zero.dgps_enabled = false;
    for (auto& sat : zero.constellation) {
        sat.clock_error_ns = 0.0;
    }
    const RunReport clean = run_scenario(zero);
    c.require(clean.aggregates.steady_accuracy_pct == 100.0,
              "zero-noise steady accuracy below 100%: " +
                  std::to_string(clean.aggregates.steady_accuracy_pct));
}

void criterion8(Check& c) {
    std::mt19937_64 rng(8008);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    int active = 0;
    for (int trial = 0; trial < 1200 && c.ok; ++trial) {
        LaneNetwork net;
        const int n_lanes = 2 + static_cast<int>(rng() % 4);
        for (int i = 0; i < n_lanes; ++i) {
            LanePolyline lane;
            lane.lane_id = i + 1;
            lane.points.push_back({-0.2, 0.004 * i + 0.002 * u(rng)});
            const int segs = 2 + static_cast<int>(rng() % 3);
            for (int k = 0; k < segs; ++k) {
                lane.points.push_back(lane.points.back() +
                                      Vec2{0.1 + 0.1 * std::abs(u(rng)), 0.003 * u(rng)});
            }
            lane.finalize();
            net.add_lane(std::move(lane));
        }
        net.finalize();
        const int m = 2 + static_cast<int>(rng() % 4);
        TrajectoryWindow w(m);
        Vec2 p{0.0, 0.004 * static_cast<double>(rng() % n_lanes) + 0.001 * u(rng)};
        for (int k = 0; k < m; ++k) {
            w.push_fix(k, p);
            p = p + Vec2{0.01 + 0.02 * std::abs(u(rng)), 0.001 * u(rng)};
        }
        const MatchResult mr = match_lane(w, net, 0.01);
        const auto expect = oracle::brute_force_match(w, net, 0.01);
        c.require(mr.lane_id == expect, "matcher disagrees with brute-force argmin");
        active += expect.has_value() ? 1 : 0;
    }
    c.require(active >= 1000, "fewer than 1000 instances with candidates");
}

void criterion9(Check& c) {
    std::mt19937_64 rng(9009);
    std::uniform_real_distribution<double> u(-1.0, 1.0);

    // Translation invariance and scale behavior of the curve distance.
    for (int trial = 0; trial < 200 && c.ok; ++trial) {
        TrajectoryWindow w(4), wt(4), ws(4);
        CorrespondingSegment seg, seg_t, seg_s;
        const Vec2 shift{u(rng) * 1e4, u(rng) * 1e4};
        const double k = 0.5 + 2.0 * std::abs(u(rng));
        double x = 0.0;
        for (int i = 0; i < 4; ++i) {
            x += 0.1 + 0.2 * std::abs(u(rng));
            const Vec2 p{x, 0.01 * u(rng)};
            const Vec2 q{x + 0.002 * u(rng), 0.01 * u(rng)};
            w.push_fix(i, p);
            wt.push_fix(i, p + shift);
            ws.push_fix(i, k * p);
            seg.points.push_back(q);
            seg_t.points.push_back(q + shift);
            seg_s.points.push_back(k * q);
        }
        const double d0 = curve_distance(w, seg);
        c.require(std::abs(curve_distance(wt, seg_t) - d0) <= 1e-9 * std::max(d0, 1e-12),
                  "translation changes the curve distance");
        c.require(std::abs(curve_distance(ws, seg_s) - k * k * d0) <=
                      1e-9 * std::max(k * k * d0, 1e-12),
                  "scaling does not scale the distance by k^2");
    }

    // Scale invariance of the argmin itself.
    for (int trial = 0; trial < 50 && c.ok; ++trial) {
        LaneNetwork net, scaled;
        const double k = 0.5 + 2.0 * std::abs(u(rng));
        for (int i = 0; i < 3; ++i) {
            LanePolyline a, b;
            a.lane_id = b.lane_id = i + 1;
            Vec2 p{-0.2, 0.004 * i};
            for (int seg = 0; seg < 4; ++seg) {
                a.points.push_back(p);
                b.points.push_back(k * p);
                p = p + Vec2{0.15, 0.002 * u(rng)};
            }
            a.finalize();
            b.finalize();
            net.add_lane(std::move(a));
            scaled.add_lane(std::move(b));
        }
        net.finalize();
        scaled.finalize();
        TrajectoryWindow w(3), wk(3);
        Vec2 p{0.0, 0.004 * static_cast<double>(rng() % 3) + 0.0005 * u(rng)};
        for (int i = 0; i < 3; ++i) {
            w.push_fix(i, p);
            wk.push_fix(i, k * p);
            p = p + Vec2{0.05, 0.0005 * u(rng)};
        }
        const auto m1 = match_lane(w, net, 0.01);
        const auto m2 = match_lane(wk, scaled, 0.01 * k);
        c.require(m1.lane_id == m2.lane_id, "argmin changes under uniform scaling");
    }

    // Parallel offset: distance h * L to 1e-12 relative.
    const double h = 0.0018;
    TrajectoryWindow w(6);
    CorrespondingSegment seg;
    for (int i = 0; i < 6; ++i) {
        w.push_fix(i, {0.25 * i, h});
        seg.points.push_back({0.25 * i, 0.0});
    }
    const double L = 1.25;
    c.require(std::abs(curve_distance(w, seg) - h * L) <= 1e-12 * h * L,
              "parallel offset distance differs from h*L");

    // Projection against dense sampling within 2 mm.
    LanePolyline lane;
    lane.points = {{0.0, 0.0}, {0.4, 0.1}, {0.9, -0.1}, {1.3, 0.2}};
    lane.finalize();
    for (int i = 0; i < 10 && c.ok; ++i) {
        const Vec2 p{1.4 * std::abs(u(rng)), 0.3 * u(rng)};
        const Projection pr = project_point(lane, p);
        const auto dense = oracle::dense_project(lane.points, p, 1e-6);
        c.require(std::abs(pr.distance_km - dense.distance_km) <= 2e-6 &&
                      distance_km(pr.foot, dense.foot) <= 2e-6,
                  "projection differs from dense sampling by more than 2 mm");
    }
}

void criterion10(Check& c) {
    Scenario s = reference_scenario(make_network("avl_accept_net10.json", 8.0, 0.0));
    s.duration_s = 300.0;
    s.vehicle.speed_mps = 15.0;
    const RunReport a = run_scenario(s);
    const RunReport b = run_scenario(s);
    c.require(a.to_csv() == b.to_csv() && a.summary_text() == b.summary_text(),
              "same seed must give byte-identical reports");

    std::mt19937_64 rng(1010);
    std::uniform_real_distribution<double> corr(-8000.0, 8000.0);
    for (int i = 0; i < 10000 && c.ok; ++i) {
        CorrectionMessage msg;
        msg.epoch_time_s = static_cast<uint32_t>(rng() % 604800);
        msg.station_id = static_cast<uint16_t>(rng() % 4096);
        const int n = 1 + static_cast<int>(rng() % 14);
        for (int k = 0; k < n; ++k) {
            msg.entries.push_back(
                {1 + k, std::nearbyint(corr(rng) / kCorrectionResolutionM) *
                            kCorrectionResolutionM});
        }
        c.require(decode(encode(msg)) == msg, "correction codec round trip mismatch");
    }
}

}  // namespace

int main() {
    run(1, "trilateration oracle suite (1000 zero-noise instances)", 5.0, criterion1);
    run(2, "fourth-satellite clock bias sign and magnitude", 1.0, criterion2);
    run(3, "flat-frame conversion worked example", 1.0, criterion3);
    run(4, "Gold code family properties and identification", 30.0, criterion4);
    run(5, "navigation message framing and codec round trips", 10.0, criterion5);
    run(6, "differential correction accuracy analog", 30.0, criterion6);
    run(7, "lane determination accuracy analog", 60.0, criterion7);
    run(8, "matcher equivalence with brute-force argmin", 10.0, criterion8);
    run(9, "curve geometry invariants", 10.0, criterion9);
    run(10, "end-to-end determinism and codec exactness", 30.0, criterion10);

    if (g_failures == 0) {
        std::printf("all criteria passed\n");
        return 0;
    }
    std::printf("%d criteria failed\n", g_failures);
    return 1;
}
