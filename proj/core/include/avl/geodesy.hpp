#pragma once

#include <cmath>

namespace avl {

struct CartesianCoord {
    double x_km = 0.0;
    double y_km = 0.0;
    double z_km = 0.0;

    bool operator==(const CartesianCoord&) const = default;

    friend CartesianCoord operator+(const CartesianCoord& a, const CartesianCoord& b) {
        return {a.x_km + b.x_km, a.y_km + b.y_km, a.z_km + b.z_km};
    }
    friend CartesianCoord operator-(const CartesianCoord& a, const CartesianCoord& b) {
        return {a.x_km - b.x_km, a.y_km - b.y_km, a.z_km - b.z_km};
    }
    friend CartesianCoord operator*(double s, const CartesianCoord& a) {
        return {s * a.x_km, s * a.y_km, s * a.z_km};
    }
    double dot(const CartesianCoord& o) const {
        return x_km * o.x_km + y_km * o.y_km + z_km * o.z_km;
    }
    CartesianCoord cross(const CartesianCoord& o) const {
        return {y_km * o.z_km - z_km * o.y_km,
                z_km * o.x_km - x_km * o.z_km,
                x_km * o.y_km - y_km * o.x_km};
    }
    double norm() const { return std::sqrt(dot(*this)); }
    bool finite() const {
        return std::isfinite(x_km) && std::isfinite(y_km) && std::isfinite(z_km);
    }
};

inline double distance_km(const CartesianCoord& a, const CartesianCoord& b) {
    return (a - b).norm();
}

/// Latitude/longitude in degrees, height above the surface in km.
struct GeodeticCoord {
    double latitude_deg = 0.0;
    double longitude_deg = 0.0;
    double height_km = 0.0;

    bool valid() const {
        return latitude_deg >= -90.0 && latitude_deg <= 90.0 &&
               longitude_deg >= -180.0 && longitude_deg <= 180.0 &&
               height_km >= -10.0;
    }
};

/// Spherical Earth constants. The flat-frame per-degree scale is anchored to
/// the quarter circumference so 90 degrees of latitude span exactly one
/// quarter turn of the configured circumference.
struct EarthModel {
    double radius_km = 6400.0;
    double speed_of_light_km_per_s = 299792.458;
    double quarter_circumference_km = 10053.09;

    double km_per_deg_lat() const { return quarter_circumference_km / 90.0; }
    double km_per_deg_lon() const { return 2.0 * quarter_circumference_km / 90.0; }
};

/// Flat frame: x = lat * k_lat, y = lon * k_lon, z = height. Origin at the
/// intersection of the 0-degree latitude and longitude.
CartesianCoord to_cartesian_paper(const GeodeticCoord& g, const EarthModel& m);

/// Earth-centered spherical mapping at radius (R + height).
CartesianCoord to_cartesian_spherical(const GeodeticCoord& g, const EarthModel& m);

/// Exact inverse of to_cartesian_paper.
GeodeticCoord inverse_paper(const CartesianCoord& c, const EarthModel& m);

}  // namespace avl
