#pragma once

#include <span>
#include <string>
#include <vector>

#include "avl/constellation.hpp"
#include "avl/geodesy.hpp"

namespace avl {

enum class SolveMethod { ThreeSphere, FourSatBias, Iterative };

struct PositionFix {
    CartesianCoord position;
    double clock_bias_s = 0.0;
    double residual_km = 0.0;  // max per-satellite pseudorange residual
    SolveMethod method = SolveMethod::ThreeSphere;
    std::vector<int> satellites_used;
};

struct SolverConfig {
    double earth_surface_tolerance_km = 1000.0;
    int max_iterations = 20;
    double convergence_km = 1e-9;
    double degenerate_volume_threshold_km3 = 1.0;
};

struct ThreeSphereSolution {
    PositionFix fix;
    CartesianCoord alternate;  // the discarded root
};

/// Algebraic intersection of three range spheres. The fix is the root whose
/// distance from the Earth centre is nearest the surface radius; the mirror
/// root is returned as `alternate`. Clock bias is not estimated (b = 0).
ThreeSphereSolution solve_three_sphere(std::span<const PseudorangeObservation> obs,
                                       std::span<const SatelliteState> sats,
                                       const SolverConfig& cfg = {},
                                       const EarthModel& earth = {});

/// b = (r4 - P4) / c, where r4 is the measured fourth pseudorange and P4 the
/// Euclidean distance from the fix to the fourth satellite. Positive b means
/// the receiver clock should be advanced.
double estimate_clock_bias(const PositionFix& fix, const PseudorangeObservation& fourth_obs,
                           const SatelliteState& fourth_sat, const EarthModel& earth = {});

/// Gauss-Newton least squares over (x, y, z, b) on >= 4 pseudoranges.
PositionFix solve_iterative(std::span<const PseudorangeObservation> obs,
                            std::span<const SatelliteState> sats,
                            const CartesianCoord& initial_guess,
                            const SolverConfig& cfg = {}, const EarthModel& earth = {});

}  // namespace avl
