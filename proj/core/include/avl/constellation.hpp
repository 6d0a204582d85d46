#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "avl/geodesy.hpp"
#include "avl/signal_codes.hpp"

namespace avl {

struct SatelliteState {
    int prn_id = 0;
    CartesianCoord position;
    double clock_error_s = 0.0;
    bool healthy = true;
};

/// Error terms injected into a single observation.
struct ErrorModel {
    double iono_delay_s = 0.0;          // common-mode between receivers, per satellite
    double receiver_noise_sigma_km = 0.0;
    double receiver_clock_bias_s = 0.0; // the unknown b recovered by the solver
};

struct PseudorangeObservation {
    int prn_id = 0;
    double transmit_time_s = 0.0;  // t_i, satellite clock
    double receive_time_s = 0.0;   // t_r, receiver clock
    double pseudorange_km = 0.0;   // (t_r - t_i) * c
};

/// Plausibility window for simulated geometry.
inline constexpr double kMinPseudorangeKm = 15000.0;
inline constexpr double kMaxPseudorangeKm = 40000.0;

/// Position at time t from an orbit record. Throws StaleEphemerisError when
/// t falls outside the validity span around the epoch.
SatelliteState propagate(const Ephemeris& eph, double t);

/// Synthesizes one pseudorange. Noise is drawn from the given seed only, so
/// repeated calls are bit-reproducible.
PseudorangeObservation observe(const CartesianCoord& receiver_truth,
                               const SatelliteState& sat, double t,
                               const ErrorModel& err, uint64_t rng_seed,
                               const EarthModel& earth = {});

/// Healthy satellites on the positive-z side of the receiver (flat-frame
/// elevation proxy); `min_z_margin_km` raises the cut.
std::vector<int> visible_satellites(const Almanac& alm, const CartesianCoord& approx_pos,
                                    double t, double min_z_margin_km = 0.0);

}  // namespace avl
