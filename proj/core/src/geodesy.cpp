#include "avl/geodesy.hpp"

#include <numbers>
#include <stdexcept>

namespace avl {

namespace {
void require_valid(const GeodeticCoord& g) {
    if (!g.valid()) {
        throw std::invalid_argument("geodetic coordinate out of range");
    }
}
}  // namespace

CartesianCoord to_cartesian_paper(const GeodeticCoord& g, const EarthModel& m) {
    require_valid(g);
    return {g.latitude_deg * m.km_per_deg_lat(),
            g.longitude_deg * m.km_per_deg_lon(),
            g.height_km};
}

CartesianCoord to_cartesian_spherical(const GeodeticCoord& g, const EarthModel& m) {
    require_valid(g);
    const double deg = std::numbers::pi / 180.0;
    const double lat = g.latitude_deg * deg;
    const double lon = g.longitude_deg * deg;
    const double r = m.radius_km + g.height_km;
    return {r * std::cos(lat) * std::cos(lon),
            r * std::cos(lat) * std::sin(lon),
            r * std::sin(lat)};
}

GeodeticCoord inverse_paper(const CartesianCoord& c, const EarthModel& m) {
    return {c.x_km / m.km_per_deg_lat(), c.y_km / m.km_per_deg_lon(), c.z_km};
}

}  // namespace avl
