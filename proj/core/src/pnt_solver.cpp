#include "avl/pnt_solver.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "avl/errors.hpp"

namespace avl {

namespace {

// Gaussian elimination with partial pivoting; throws on singular systems.
template <int N>
std::array<double, N> solve_linear(std::array<std::array<double, N>, N> a,
                                   std::array<double, N> b) {
    for (int col = 0; col < N; ++col) {
        int pivot = col;
        for (int row = col + 1; row < N; ++row) {
            if (std::abs(a[row][col]) > std::abs(a[pivot][col])) {
                pivot = row;
            }
        }
        if (std::abs(a[pivot][col]) < 1e-12) {
            throw DegenerateGeometryError("singular system in position solve");
        }
        std::swap(a[col], a[pivot]);
        std::swap(b[col], b[pivot]);
        for (int row = col + 1; row < N; ++row) {
            const double f = a[row][col] / a[col][col];
            for (int k = col; k < N; ++k) {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    std::array<double, N> x{};
    for (int row = N - 1; row >= 0; --row) {
        double s = b[row];
        for (int k = row + 1; k < N; ++k) {
            s -= a[row][k] * x[k];
        }
        x[row] = s / a[row][row];
    }
    return x;
}

double max_range_residual(const CartesianCoord& p, double bias_km,
                          std::span<const PseudorangeObservation> obs,
                          std::span<const SatelliteState> sats) {
    double worst = 0.0;
    for (size_t i = 0; i < obs.size(); ++i) {
        const double r = distance_km(p, sats[i].position) + bias_km - obs[i].pseudorange_km;
        worst = std::max(worst, std::abs(r));
    }
    return worst;
}

}  // namespace

ThreeSphereSolution solve_three_sphere(std::span<const PseudorangeObservation> obs,
                                       std::span<const SatelliteState> sats,
                                       const SolverConfig& cfg, const EarthModel& earth) {
    if (obs.size() != 3 || sats.size() != 3) {
        throw std::invalid_argument("three-sphere solve needs exactly 3 observations");
    }
    const CartesianCoord s1 = sats[0].position;
    const CartesianCoord s2 = sats[1].position;
    const CartesianCoord s3 = sats[2].position;
    const double r1 = obs[0].pseudorange_km;
    const double r2 = obs[1].pseudorange_km;
    const double r3 = obs[2].pseudorange_km;

    // Pairwise subtraction of sphere equations gives two planes; their
    // intersection line is parameterized and substituted into sphere 1.
    const CartesianCoord n2 = 2.0 * (s2 - s1);
    const CartesianCoord n3 = 2.0 * (s3 - s1);
    const double d2 = r1 * r1 - r2 * r2 + s2.dot(s2) - s1.dot(s1);
    const double d3 = r1 * r1 - r3 * r3 + s3.dot(s3) - s1.dot(s1);

    // |(s2-s1) x (s3-s1)| / 6 as a tetrahedron-volume proxy for collinearity.
    if ((s2 - s1).cross(s3 - s1).norm() / 6.0 < cfg.degenerate_volume_threshold_km3) {
        throw DegenerateGeometryError("collinear satellite geometry");
    }
    CartesianCoord u = n2.cross(n3);
    u = (1.0 / u.norm()) * u;

    // Point on both planes, fixing the free direction with u . p = u . s1.
    const std::array<double, 3> rhs{d2, d3, u.dot(s1)};
    const std::array<std::array<double, 3>, 3> mat{{{n2.x_km, n2.y_km, n2.z_km},
                                                    {n3.x_km, n3.y_km, n3.z_km},
                                                    {u.x_km, u.y_km, u.z_km}}};
    const auto p0v = solve_linear<3>(mat, rhs);
    const CartesianCoord p0{p0v[0], p0v[1], p0v[2]};

    // Unit direction: |p0 + t u - s1|^2 = r1^2 is t^2 + 2 bq t + cq = 0.
    const CartesianCoord w = p0 - s1;
    const double bq = u.dot(w);
    const double cq = w.dot(w) - r1 * r1;
    const double disc = bq * bq - cq;
    if (disc < 0.0) {
        const double slack = std::sqrt(cq - bq * bq);  // nearest miss along the line
        throw NoSolutionError("range spheres do not intersect", slack);
    }
    const double sq = std::sqrt(disc);
    const CartesianCoord rootA = p0 + (-bq + sq) * u;
    const CartesianCoord rootB = p0 + (-bq - sq) * u;

    auto surface_miss = [&](const CartesianCoord& p) {
        return std::abs(p.norm() - earth.radius_km);
    };
    auto prefer_a = [&] {
        const double ma = surface_miss(rootA);
        const double mb = surface_miss(rootB);
        if (ma != mb) {
            return ma < mb;
        }
        // Exact tie: smaller z, then y, then x.
        if (rootA.z_km != rootB.z_km) return rootA.z_km < rootB.z_km;
        if (rootA.y_km != rootB.y_km) return rootA.y_km < rootB.y_km;
        return rootA.x_km <= rootB.x_km;
    }();

    ThreeSphereSolution sol;
    sol.fix.position = prefer_a ? rootA : rootB;
    sol.alternate = prefer_a ? rootB : rootA;
    sol.fix.clock_bias_s = 0.0;
    sol.fix.residual_km = max_range_residual(sol.fix.position, 0.0, obs, sats);
    sol.fix.method = SolveMethod::ThreeSphere;
    sol.fix.satellites_used = {sats[0].prn_id, sats[1].prn_id, sats[2].prn_id};
    return sol;
}

double estimate_clock_bias(const PositionFix& fix, const PseudorangeObservation& fourth_obs,
                           const SatelliteState& fourth_sat, const EarthModel& earth) {
    const double r4 = fourth_obs.pseudorange_km;
    const double p4 = distance_km(fix.position, fourth_sat.position);
    return (r4 - p4) / earth.speed_of_light_km_per_s;
}

PositionFix solve_iterative(std::span<const PseudorangeObservation> obs,
                            std::span<const SatelliteState> sats,
                            const CartesianCoord& initial_guess, const SolverConfig& cfg,
                            const EarthModel& earth) {
    const size_t n = obs.size();
    if (n < 4 || sats.size() != n) {
        throw std::invalid_argument("iterative solve needs >= 4 observations");
    }

    CartesianCoord p = initial_guess;
    double bias_km = 0.0;  // c * b

    for (int iter = 0; iter < cfg.max_iterations; ++iter) {
        std::array<std::array<double, 4>, 4> ata{};
        std::array<double, 4> atb{};
        for (size_t i = 0; i < n; ++i) {
            const CartesianCoord d = p - sats[i].position;
            const double rho = d.norm();
            if (rho < 1.0) {
                throw DegenerateGeometryError("estimate coincides with a satellite");
            }
            const std::array<double, 4> row{d.x_km / rho, d.y_km / rho, d.z_km / rho, 1.0};
            const double f = rho + bias_km - obs[i].pseudorange_km;
            for (int r = 0; r < 4; ++r) {
                for (int c = 0; c < 4; ++c) {
                    ata[r][c] += row[r] * row[c];
                }
                atb[r] -= row[r] * f;
            }
        }
        const auto step = solve_linear<4>(ata, atb);
        p.x_km += step[0];
        p.y_km += step[1];
        p.z_km += step[2];
        bias_km += step[3];
        const double step_norm = std::sqrt(step[0] * step[0] + step[1] * step[1] +
                                           step[2] * step[2] + step[3] * step[3]);
        if (step_norm < cfg.convergence_km) {
            PositionFix fix;
            fix.position = p;
            fix.clock_bias_s = bias_km / earth.speed_of_light_km_per_s;
            fix.residual_km = max_range_residual(p, bias_km, obs, sats);
            fix.method = SolveMethod::Iterative;
            for (const SatelliteState& s : sats) {
                fix.satellites_used.push_back(s.prn_id);
            }
            return fix;
        }
    }
    throw NonConvergenceError("position solve did not converge");
}

}  // namespace avl
