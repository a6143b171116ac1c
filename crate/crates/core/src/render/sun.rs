//! Solar position from location and UTC time.

use chrono::{DateTime, NaiveDateTime, TimeZone, Utc};
use glam::DVec3;
use serde::{Deserialize, Serialize};

use super::RenderError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SunPosition {
    /// Degrees clockwise from north.
    pub azimuth: f64,
    /// Degrees above the horizon, without refraction.
    pub elevation: f64,
}

impl SunPosition {
    /// Unit vector towards the sun in the scene frame (+X east, +Y north, +Z up).
    pub fn direction(&self) -> DVec3 {
        let (az, el) = (self.azimuth.to_radians(), self.elevation.to_radians());
        DVec3::new(az.sin() * el.cos(), az.cos() * el.cos(), el.sin())
    }
}

/// Sun position and lighting of one render.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SunSpec {
    pub latitude: f64,
    pub longitude: f64,
    pub time: DateTime<Utc>,
    /// Multiplier of the direct term.
    pub irradiance: f64,
    /// Constant sky term.
    pub ambient: f64,
}

impl SunSpec {
    pub fn position(&self) -> Result<SunPosition, RenderError> {
        sun_direction(self.latitude, self.longitude, self.time)
    }
}

/// Parses an RFC 3339 time or a naive `YYYY-MM-DDTHH:MM:SS` taken as UTC.
pub fn parse_utc(s: &str) -> Result<DateTime<Utc>, RenderError> {
    if let Ok(t) = DateTime::parse_from_rfc3339(s) {
        return Ok(t.with_timezone(&Utc));
    }
    NaiveDateTime::parse_from_str(s, "%Y-%m-%dT%H:%M:%S")
        .map(|n| Utc.from_utc_datetime(&n))
        .map_err(|e| RenderError::InvalidDate(format!("{s}: {e}")))
}

/// Builds a UTC instant, rejecting impossible calendar values.
pub fn utc(year: i32, month: u32, day: u32, hour: u32, minute: u32, second: u32) -> Result<DateTime<Utc>, RenderError> {
    Utc.with_ymd_and_hms(year, month, day, hour, minute, second)
        .single()
        .ok_or_else(|| RenderError::InvalidDate(format!("{year:04}-{month:02}-{day:02} {hour:02}:{minute:02}:{second:02}")))
}

/// Solar azimuth and elevation from the low-precision ephemeris of the
/// Astronomical Almanac: ecliptic longitude of the sun, right ascension and
/// declination, then the hour angle from local mean sidereal time. Good to
/// about 0.01 degrees between 1950 and 2050.
pub fn sun_direction(lat: f64, lon: f64, t: DateTime<Utc>) -> Result<SunPosition, RenderError> {
    if !(-90.0..=90.0).contains(&lat) || !(-180.0..=180.0).contains(&lon) {
        return Err(RenderError::InvalidLocation { lat, lon });
    }
    let r = f64::to_radians;
    // Days from J2000.0.
    let n = t.timestamp() as f64 / 86_400.0 + t.timestamp_subsec_nanos() as f64 * 1e-9 / 86_400.0 - 10_957.5;
    let mean_long = (280.460 + 0.985_647_4 * n).rem_euclid(360.0);
    let anomaly = r((357.528 + 0.985_600_3 * n).rem_euclid(360.0));
    let ecl_long = r(mean_long + 1.915 * anomaly.sin() + 0.020 * (2.0 * anomaly).sin());
    let obliquity = r(23.439 - 0.000_000_4 * n);
    let ra = (obliquity.cos() * ecl_long.sin()).atan2(ecl_long.cos());
    let decl = (obliquity.sin() * ecl_long.sin()).asin();
    let gmst_h = (18.697_374_558 + 24.065_709_824_419_08 * n).rem_euclid(24.0);
    let ha = r(gmst_h * 15.0 + lon) - ra;
    let phi = r(lat);
    let sin_el = (phi.sin() * decl.sin() + phi.cos() * decl.cos() * ha.cos()).clamp(-1.0, 1.0);
    let elevation = sin_el.asin().to_degrees();
    let az = (-decl.cos() * ha.sin()).atan2(decl.sin() * phi.cos() - decl.cos() * phi.sin() * ha.cos());
    let azimuth = az.to_degrees().rem_euclid(360.0);
    Ok(SunPosition { azimuth, elevation })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equator_equinox_noon_is_overhead() {
        // Solar noon at Greenwich on the March equinox is about 12:07 UTC.
        let p = sun_direction(0.0, 0.0, utc(2024, 3, 20, 12, 7, 0).unwrap()).unwrap();
        assert!((p.elevation - 90.0).abs() < 1.0, "{p:?}");
    }

    #[test]
    fn bad_inputs() {
        assert!(utc(2023, 2, 29, 0, 0, 0).is_err());
        assert!(parse_utc("2024-13-01T00:00:00").is_err());
        assert!(sun_direction(91.0, 0.0, utc(2024, 1, 1, 0, 0, 0).unwrap()).is_err());
    }

    #[test]
    fn direction_points_up_at_noon() {
        let p = sun_direction(40.0, -90.0, parse_utc("2024-06-21T18:00:00Z").unwrap()).unwrap();
        let d = p.direction();
        assert!(d.z > 0.9 && d.y < 0.0);
    }
}
