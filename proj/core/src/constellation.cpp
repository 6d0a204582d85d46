#include "avl/constellation.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "avl/errors.hpp"

namespace avl {

namespace {

CartesianCoord rotate_about_axis(const CartesianCoord& v, const CartesianCoord& axis,
                                 double angle_rad) {
    const double n = axis.norm();
    if (n <= 0.0) {
        throw std::invalid_argument("rotation axis must be non-zero");
    }
    const CartesianCoord k = (1.0 / n) * axis;
    const double c = std::cos(angle_rad);
    const double s = std::sin(angle_rad);
    // Rodrigues formula.
    return c * v + s * k.cross(v) + ((1.0 - c) * k.dot(v)) * k;
}

}  // namespace

SatelliteState propagate(const Ephemeris& eph, double t) {
    if (std::abs(t - eph.epoch_time_s) > eph.validity_span_s) {
        throw StaleEphemerisError("ephemeris not valid at requested time");
    }
    SatelliteState s;
    s.prn_id = eph.prn_id;
    s.clock_error_s = eph.clock_offset_s;
    switch (eph.mode) {
        case OrbitMode::Static:
            s.position = eph.position_at_epoch;
            break;
        case OrbitMode::Circular:
            s.position = rotate_about_axis(eph.position_at_epoch, eph.rotation_axis,
                                           eph.angular_rate_rad_per_s * (t - eph.epoch_time_s));
            break;
        default:
            throw std::invalid_argument("unknown orbit mode");
    }
    return s;
}

PseudorangeObservation observe(const CartesianCoord& receiver_truth,
                               const SatelliteState& sat, double t,
                               const ErrorModel& err, uint64_t rng_seed,
                               const EarthModel& earth) {
    if (!sat.healthy) {
        throw UnhealthySatelliteError("observation of unhealthy satellite excluded");
    }
    const double c = earth.speed_of_light_km_per_s;
    const double range_km = distance_km(receiver_truth, sat.position);

    double noise_km = 0.0;
    if (err.receiver_noise_sigma_km > 0.0) {
        std::mt19937_64 rng(rng_seed);
        std::normal_distribution<double> dist(0.0, err.receiver_noise_sigma_km);
        noise_km = dist(rng);
    }

    PseudorangeObservation obs;
    obs.prn_id = sat.prn_id;
    obs.transmit_time_s = t + sat.clock_error_s;
    obs.receive_time_s =
        t + range_km / c + err.receiver_clock_bias_s + err.iono_delay_s + noise_km / c;
    // Computed from the error budget directly: the time difference above
    // cancels catastrophically once t reaches thousands of seconds.
    obs.pseudorange_km = range_km +
                         (err.receiver_clock_bias_s + err.iono_delay_s - sat.clock_error_s) * c +
                         noise_km;
    if (obs.pseudorange_km < kMinPseudorangeKm || obs.pseudorange_km > kMaxPseudorangeKm) {
        throw std::domain_error("pseudorange outside plausible geometry bounds");
    }
    return obs;
}

std::vector<int> visible_satellites(const Almanac& alm, const CartesianCoord& approx_pos,
                                    double /*t*/, double min_z_margin_km) {
    if (alm.entries.empty()) {
        throw std::invalid_argument("almanac is empty");
    }
    std::vector<int> out;
    for (const AlmanacEntry& e : alm.entries) {
        if (e.healthy && e.coarse_position.z_km - approx_pos.z_km > min_z_margin_km) {
            out.push_back(e.prn_id);
        }
    }
    return out;
}

}  // namespace avl
