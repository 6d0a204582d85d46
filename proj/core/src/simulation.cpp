#include "avl/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include <json.hpp>

#include "avl/errors.hpp"
#include "avl/lane_matcher.hpp"
#include "avl/pnt_solver.hpp"
#include "avl/rng.hpp"

namespace avl {

namespace {

constexpr double kChangeExclusionPadS = 2.0;

double smoothstep(double u) {
    u = std::clamp(u, 0.0, 1.0);
    return u * u * (3.0 - 2.0 * u);
}

struct TruthSample {
    Vec2 position;
    std::optional<int> lane;
};

std::vector<TruthSample> generate_lane_follow_truth(const Scenario& sc,
                                                    const LaneNetwork& net, int n_epochs,
                                                    double dt) {
    std::vector<TruthSample> out;
    out.reserve(n_epochs);

    std::vector<LaneChangeSpec> changes = sc.vehicle.lane_changes;
    std::sort(changes.begin(), changes.end(),
              [](const auto& a, const auto& b) { return a.t_s < b.t_s; });

    int lane_id = sc.vehicle.initial_lane;
    double s = sc.vehicle.start_arclength_km;
    const double step_km = sc.vehicle.speed_mps * dt * 1e-3;
    size_t next_change = 0;
    std::optional<LaneChangeSpec> active;

    for (int i = 0; i < n_epochs; ++i) {
        const double t = i * dt;
        if (!active && next_change < changes.size() && t >= changes[next_change].t_s) {
            active = changes[next_change++];
            if (active->to_lane == lane_id) {
                active.reset();
            }
        }

        TruthSample sample;
        if (active) {
            const double f = smoothstep((t - active->t_s) / active->duration_s);
            const Vec2 pos_from = point_at_arclength(net.lane(lane_id), s).point;
            const Vec2 foot_to = project_point(net.lane(active->to_lane), pos_from).foot;
            sample.position = pos_from + f * (foot_to - pos_from);
            sample.lane = f < 0.5 ? lane_id : active->to_lane;
            if (f >= 1.0) {
                lane_id = active->to_lane;
                s = project_point(net.lane(lane_id), sample.position).arc_length_km;
                active.reset();
            }
        } else {
            sample.position = point_at_arclength(net.lane(lane_id), s).point;
            sample.lane = lane_id;
        }
        out.push_back(sample);
        s += step_km;
    }
    return out;
}

std::vector<TruthSample> generate_waypoint_truth(const Scenario& sc, const LaneNetwork& net,
                                                 int n_epochs, double dt) {
    const auto& wps = sc.vehicle.waypoints;
    // Cumulative arrival time at each waypoint.
    std::vector<double> arrive{0.0};
    for (size_t i = 1; i < wps.size(); ++i) {
        const double seg_km = distance_km(wps[i - 1].first, wps[i].first);
        const double speed = wps[i - 1].second;
        arrive.push_back(arrive.back() + seg_km * 1e3 / speed);
    }
    std::vector<TruthSample> out;
    out.reserve(n_epochs);
    const double d_km = sc.matcher.candidate_distance_m * 1e-3;
    for (int i = 0; i < n_epochs; ++i) {
        const double t = i * dt;
        Vec2 pos = wps.back().first;
        for (size_t k = 1; k < wps.size(); ++k) {
            if (t <= arrive[k]) {
                const double f = (t - arrive[k - 1]) / (arrive[k] - arrive[k - 1]);
                pos = wps[k - 1].first + f * (wps[k].first - wps[k - 1].first);
                break;
            }
        }
        TruthSample sample{pos, std::nullopt};
        double best = d_km;
        for (int id : net.candidate_lanes(pos, d_km)) {
            const double d = project_point(net.lane(id), pos).distance_km;
            if (d <= best) {
                best = d;
                sample.lane = id;
            }
        }
        out.push_back(sample);
    }
    return out;
}

struct PendingDelivery {
    double t_arrive_s;
    double delay_s;
    CorrectionMessage message;
};

}  // namespace

RunAggregates compute_aggregates(const std::vector<EpochRow>& rows,
                                 const std::vector<std::pair<double, double>>& exclusions,
                                 int corrections_sent, int corrections_lost) {
    RunAggregates a;
    a.total_epochs = static_cast<int>(rows.size());
    a.corrections_sent = corrections_sent;
    a.corrections_lost = corrections_lost;

    double sum_sq_corr = 0.0, sum_sq_uncorr = 0.0, sum_latency = 0.0;
    int n_corr = 0, n_uncorr = 0, n_latency = 0;
    int matched_correct = 0, steady_matched = 0, steady_correct = 0;

    const auto excluded = [&](double t) {
        for (const auto& [t0, t1] : exclusions) {
            if (t >= t0 && t <= t1) {
                return true;
            }
        }
        return false;
    };

    for (const EpochRow& r : rows) {
        if (!r.solved) {
            ++a.unsolved_epochs;
        } else {
            sum_sq_uncorr += r.err_uncorrected_m * r.err_uncorrected_m;
            ++n_uncorr;
            if (r.corrected) {
                sum_sq_corr += r.err_corrected_m * r.err_corrected_m;
                ++n_corr;
            }
        }
        if (r.latency_s) {
            sum_latency += *r.latency_s;
            ++n_latency;
        }
        if (r.warmup) {
            ++a.warmup_epochs;
            continue;
        }
        if (r.matched_lane) {
            ++a.matched_epochs;
            matched_correct += r.correct ? 1 : 0;
            if (!excluded(r.t_s)) {
                ++steady_matched;
                steady_correct += r.correct ? 1 : 0;
            }
        } else {
            ++a.unmatched_epochs;
        }
    }
    a.rms_corrected_m = n_corr > 0 ? std::sqrt(sum_sq_corr / n_corr) : 0.0;
    a.rms_uncorrected_m = n_uncorr > 0 ? std::sqrt(sum_sq_uncorr / n_uncorr) : 0.0;
    a.mean_latency_s = n_latency > 0 ? sum_latency / n_latency : 0.0;
    a.lane_accuracy_pct =
        a.matched_epochs > 0 ? 100.0 * matched_correct / a.matched_epochs : 0.0;
    a.steady_accuracy_pct = steady_matched > 0 ? 100.0 * steady_correct / steady_matched : 0.0;
    return a;
}

RunReport run_scenario(const Scenario& sc) {
    for (const Diagnostic& d : validate_scenario(sc)) {
        if (d.is_error) {
            throw SchemaError("scenario invalid: " + d.field + ": " + d.message);
        }
    }
    const LaneNetwork net = load_network(sc.network_file);
    const double dt = 1.0 / sc.fix_rate_hz;
    const int n_epochs = static_cast<int>(std::llround(sc.duration_s * sc.fix_rate_hz));

    const std::vector<TruthSample> truth =
        sc.vehicle.mode == VehicleSpec::Mode::LaneFollow
            ? generate_lane_follow_truth(sc, net, n_epochs, dt)
            : generate_waypoint_truth(sc, net, n_epochs, dt);

    // Per-satellite common-mode delay, shared by base and rover.
    std::map<int, double> iono_s;
    for (const SatelliteSpec& sat : sc.constellation) {
        std::mt19937_64 rng(derive_seed(sc.seed, 4, sat.prn));
        std::uniform_real_distribution<double> dist(sc.errors.iono_delay_min_ns * 1e-9,
                                                    sc.errors.iono_delay_max_ns * 1e-9);
        iono_s[sat.prn] = sc.errors.iono_delay_max_ns > sc.errors.iono_delay_min_ns
                              ? dist(rng)
                              : sc.errors.iono_delay_min_ns * 1e-9;
    }

    const Almanac almanac = scenario_almanac(sc);
    const double c = sc.earth.speed_of_light_km_per_s;

    RunReport report;
    for (const LaneChangeSpec& lc : sc.vehicle.lane_changes) {
        report.exclusion_windows_s.emplace_back(lc.t_s - kChangeExclusionPadS,
                                                lc.t_s + lc.duration_s + kChangeExclusionPadS);
    }

    // Base-side correction accumulator (per-PRN running sums between emissions).
    std::map<int, std::pair<double, int>> corr_accum;
    std::vector<PendingDelivery> deliveries;
    int corrections_sent = 0, corrections_lost = 0;
    int emission_index = 0;

    std::optional<CorrectionMessage> current_msg;
    std::optional<double> current_delay;
    size_t delivery_cursor = 0;

    TrajectoryWindow window(static_cast<size_t>(sc.matcher.window_size));
    LaneTracker tracker(sc.matcher.candidate_distance_m * 1e-3, sc.matcher.commit_epochs);
    CartesianCoord guess = sc.base_station.position;

    for (int epoch = 0; epoch < n_epochs; ++epoch) {
        const double t = epoch * dt;
        const std::vector<SatelliteState> sats_all = constellation_at(sc, t);
        const std::vector<int> visible =
            visible_satellites(almanac, {0.0, 0.0, sc.vehicle.height_km}, t);

        std::vector<SatelliteState> sats;
        for (const SatelliteState& s : sats_all) {
            if (std::find(visible.begin(), visible.end(), s.prn_id) != visible.end()) {
                sats.push_back(s);
            }
        }

        // --- Base station: observe, solve own bias, accumulate corrections.
        if (sc.dgps_enabled && !sats.empty()) {
            std::vector<PseudorangeObservation> base_obs;
            for (const SatelliteState& s : sats) {
                ErrorModel em{iono_s[s.prn_id], sc.errors.base_noise_sigma_m * 1e-3,
                              sc.errors.base_clock_bias_ms * 1e-3};
                base_obs.push_back(observe(sc.base_station.position, s, t, em,
                                           derive_seed(sc.seed, 2, epoch, s.prn_id), sc.earth));
            }
            double base_bias_s = 0.0;
            if (base_obs.size() >= 4) {
                try {
                    base_bias_s = solve_iterative(base_obs, sats, sc.base_station.position,
                                                  sc.solver, sc.earth)
                                      .clock_bias_s;
                } catch (const Error&) {
                    base_bias_s = 0.0;
                }
            }
            const ComputedCorrections cc =
                compute_corrections(sc.base_station.position, base_obs, sats,
                                    static_cast<uint32_t>(t), sc.base_station.station_id,
                                    base_bias_s, sc.earth);
            for (const CorrectionEntry& e : cc.message.entries) {
                auto& [sum, n] = corr_accum[e.prn_id];
                if (n < sc.errors.base_smoothing_epochs) {
                    sum += e.range_correction_m;
                    ++n;
                } else {
                    sum += e.range_correction_m - sum / n;
                }
            }

            if (std::fmod(t, sc.channel.correction_period_s) < 0.5 * dt) {
                CorrectionMessage msg;
                msg.epoch_time_s = static_cast<uint32_t>(t);
                msg.station_id = sc.base_station.station_id;
                for (auto& [prn, acc] : corr_accum) {
                    msg.entries.push_back(
                        {prn, std::nearbyint(acc.first / acc.second / kCorrectionResolutionM) *
                                  kCorrectionResolutionM});
                }
                corr_accum.clear();
                const DeliveryEvent ev = channel_send(
                    msg, t, sc.channel, derive_seed(sc.seed, 3, emission_index++));
                ++corrections_sent;
                if (ev.lost) {
                    ++corrections_lost;
                } else {
                    deliveries.push_back({ev.t_arrive_s, ev.t_arrive_s - t, msg});
                }
            }
        }

        // --- Deliveries arriving by now; later epochs supersede earlier ones.
        std::sort(deliveries.begin() + delivery_cursor, deliveries.end(),
                  [](const auto& a, const auto& b) { return a.t_arrive_s < b.t_arrive_s; });
        while (delivery_cursor < deliveries.size() &&
               deliveries[delivery_cursor].t_arrive_s <= t) {
            const PendingDelivery& d = deliveries[delivery_cursor++];
            if (!current_msg || d.message.epoch_time_s >= current_msg->epoch_time_s) {
                current_msg = d.message;
                current_delay = d.delay_s;
            }
        }

        // --- Rover epoch.
        EpochRow row;
        row.t_s = t;
        row.truth = {truth[epoch].position.x_km, truth[epoch].position.y_km,
                     sc.vehicle.height_km};
        row.truth_lane = truth[epoch].lane;

        std::vector<PseudorangeObservation> rover_obs;
        for (const SatelliteState& s : sats) {
            ErrorModel em{iono_s[s.prn_id], sc.errors.receiver_noise_sigma_m * 1e-3,
                          sc.errors.receiver_clock_bias_ms * 1e-3};
            rover_obs.push_back(observe(row.truth, s, t, em,
                                        derive_seed(sc.seed, 1, epoch, s.prn_id), sc.earth));
        }

        bool solved = false;
        CartesianCoord fix_uncorr, fix_corr;
        double bias_corr = 0.0;
        bool corrected = false;
        if (rover_obs.size() >= 4) {
            try {
                const PositionFix fu =
                    solve_iterative(rover_obs, sats, guess, sc.solver, sc.earth);
                fix_uncorr = fu.position;
                fix_corr = fu.position;
                bias_corr = fu.clock_bias_s;
                solved = true;
                if (sc.dgps_enabled && current_msg &&
                    t - static_cast<double>(current_msg->epoch_time_s) <=
                        sc.channel.max_age_s) {
                    const CorrectedObservations co = apply_corrections(
                        rover_obs, *current_msg, t, sc.channel.max_age_s, sc.earth);
                    const PositionFix fc = solve_iterative(co.observations, sats, guess,
                                                           sc.solver, sc.earth);
                    fix_corr = fc.position;
                    bias_corr = fc.clock_bias_s;
                    corrected = true;
                    row.latency_s = current_delay;
                }
            } catch (const Error&) {
                solved = false;
            }
        }

        row.solved = solved;
        if (solved) {
            row.fix = fix_corr;
            row.clock_bias_s = bias_corr;
            row.corrected = corrected;
            const Vec2 truth2{row.truth.x_km, row.truth.y_km};
            row.err_uncorrected_m =
                1e3 * distance_km(truth2, Vec2{fix_uncorr.x_km, fix_uncorr.y_km});
            row.err_corrected_m = 1e3 * distance_km(truth2, Vec2{fix_corr.x_km, fix_corr.y_km});
            guess = fix_corr;

            window.push_fix(t, {fix_corr.x_km, fix_corr.y_km});
            if (!window.full()) {
                row.warmup = true;
            } else {
                const MatchResult mr = tracker.update(window, net);
                row.matched_lane = mr.lane_id;
                row.correct = row.matched_lane && row.truth_lane &&
                              *row.matched_lane == *row.truth_lane;
            }
        }
        report.rows.push_back(row);
    }

    report.aggregates = compute_aggregates(report.rows, report.exclusion_windows_s,
                                           corrections_sent, corrections_lost);
    return report;
}

// ---------------------------------------------------------------------------
// Output files. All floating-point fields use fixed formats so identical runs
// produce identical bytes.

namespace {

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

}  // namespace

std::string RunReport::to_csv() const {
    std::ostringstream out;
    out << "t_s,truth_x_km,truth_y_km,truth_z_km,truth_lane,solved,fix_x_km,fix_y_km,"
           "fix_z_km,clock_bias_s,corrected,err_uncorrected_m,err_corrected_m,"
           "matched_lane,correct,latency_s,warmup\n";
    for (const EpochRow& r : rows) {
        out << fmt("%.17g", r.t_s) << ',' << fmt("%.17g", r.truth.x_km) << ','
            << fmt("%.17g", r.truth.y_km) << ',' << fmt("%.17g", r.truth.z_km) << ',';
        if (r.truth_lane) out << *r.truth_lane;
        out << ',' << (r.solved ? 1 : 0) << ',';
        if (r.solved) {
            out << fmt("%.17g", r.fix.x_km) << ',' << fmt("%.17g", r.fix.y_km) << ','
                << fmt("%.17g", r.fix.z_km) << ',' << fmt("%.17g", r.clock_bias_s);
        } else {
            out << ",,,";
        }
        out << ',' << (r.corrected ? 1 : 0) << ',';
        if (r.solved) {
            out << fmt("%.17g", r.err_uncorrected_m) << ',' << fmt("%.17g", r.err_corrected_m);
        } else {
            out << ',';
        }
        out << ',';
        if (r.matched_lane) out << *r.matched_lane;
        out << ',' << (r.correct ? 1 : 0) << ',';
        if (r.latency_s) out << fmt("%.17g", *r.latency_s);
        out << ',' << (r.warmup ? 1 : 0) << '\n';
    }
    return out.str();
}

std::string RunReport::summary_text() const {
    const RunAggregates& a = aggregates;
    std::ostringstream out;
    out << "epochs:               " << a.total_epochs << '\n'
        << "warmup epochs:        " << a.warmup_epochs << '\n'
        << "matched epochs:       " << a.matched_epochs << '\n'
        << "unmatched epochs:     " << a.unmatched_epochs << '\n'
        << "unsolved epochs:      " << a.unsolved_epochs << '\n'
        << "lane accuracy:        " << fmt("%.3f", a.lane_accuracy_pct) << " %\n"
        << "steady lane accuracy: " << fmt("%.3f", a.steady_accuracy_pct) << " %\n"
        << "horizontal RMS (corrected):   " << fmt("%.4f", a.rms_corrected_m) << " m\n"
        << "horizontal RMS (uncorrected): " << fmt("%.4f", a.rms_uncorrected_m) << " m\n"
        << "mean correction latency:      " << fmt("%.4f", a.mean_latency_s) << " s\n"
        << "corrections sent:     " << a.corrections_sent << '\n'
        << "corrections lost:     " << a.corrections_lost << '\n';
    return out.str();
}

void emit_outputs(const RunReport& report, const LaneNetwork& network,
                  const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    const auto write_file = [&](const std::string& name, const std::string& content) {
        std::ofstream out(fs::path(out_dir) / name);
        if (!out) {
            throw std::runtime_error("cannot write output file: " + name);
        }
        out << content;
    };
    write_file("report.csv", report.to_csv());
    write_file("summary.txt", report.summary_text());

    nlohmann::json doc = nlohmann::json::parse(network_to_json(network));
    nlohmann::json truth_pts = nlohmann::json::array();
    nlohmann::json est_pts = nlohmann::json::array();
    for (const EpochRow& r : report.rows) {
        truth_pts.push_back({r.truth.x_km, r.truth.y_km});
        if (r.solved) {
            est_pts.push_back({r.fix.x_km, r.fix.y_km});
        }
    }
    doc["tracks"] = {{{"name", "truth"}, {"points", truth_pts}},
                     {{"name", "estimate"}, {"points", est_pts}}};
    write_file("geometry.json", doc.dump(2) + "\n");
}

}  // namespace avl
