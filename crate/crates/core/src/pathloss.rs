//! Path loss of the two hops: a power law from the command centre to the UAV
//! and an elevation-dependent LoS/NLoS mixture from the UAV to the user.
//!
//! Angles are in degrees throughout; they are converted to radians only at the
//! trigonometric calls.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathLossParams {
    /// Path-loss exponent of the command-centre hop.
    pub alpha: f64,
    /// S-curve constants `a` and `b` (degree-calibrated).
    pub s_a: f64,
    pub s_b: f64,
    /// Excess losses in dB.
    pub eta_los_db: f64,
    pub eta_nlos_db: f64,
    /// Carrier frequency in Hz.
    pub frequency: f64,
}

impl PathLossParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha >= 1.0 && self.alpha.is_finite()) {
            return Err(Error::domain("path-loss exponent must be at least 1"));
        }
        if !(self.s_a > 0.0 && self.s_b > 0.0) {
            return Err(Error::domain("S-curve constants must be positive"));
        }
        if !(self.eta_nlos_db >= self.eta_los_db) {
            return Err(Error::domain("NLoS excess loss must not be below the LoS one"));
        }
        if !(self.frequency > 0.0 && self.frequency.is_finite()) {
            return Err(Error::domain("carrier frequency must be positive"));
        }
        Ok(())
    }

    pub fn wavelength(&self) -> f64 {
        SPEED_OF_LIGHT / self.frequency
    }
}

/// UAV placement relative to the command centre and the served disc.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Geometry {
    pub altitude: f64,
    /// Horizontal distance between command centre and UAV.
    pub z_c: f64,
    pub radius: f64,
    /// Elevation angle at the cell edge, degrees.
    pub theta_deg: f64,
}

impl Geometry {
    /// Geometry whose altitude follows from `radius · tan θ`.
    pub fn from_radius_angle(z_c: f64, radius: f64, theta_deg: f64) -> Result<Self> {
        let g = Self {
            altitude: radius * theta_deg.to_radians().tan(),
            z_c,
            radius,
            theta_deg,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.altitude > 0.0 && self.altitude.is_finite()) {
            return Err(Error::domain("altitude must be positive"));
        }
        if !(self.z_c >= 0.0) || !(self.radius >= 0.0) {
            return Err(Error::domain("distances must be non-negative"));
        }
        if !(self.theta_deg > 0.0 && self.theta_deg < 90.0) {
            return Err(Error::domain("elevation angle must lie in (0, 90) degrees"));
        }
        let implied = self.radius * self.theta_deg.to_radians().tan();
        if self.radius > 0.0 && (implied - self.altitude).abs() > 1e-6 * self.altitude.max(1.0) {
            return Err(Error::domain("altitude is inconsistent with radius and elevation"));
        }
        Ok(())
    }
}

/// Command-centre hop loss `d_c^α` with `d_c² = z_c² + h²` (linear).
pub fn pl_command(geom: &Geometry, p: &PathLossParams) -> f64 {
    (geom.z_c * geom.z_c + geom.altitude * geom.altitude).powf(0.5 * p.alpha)
}

pub fn p_los(theta_deg: f64, p: &PathLossParams) -> f64 {
    1.0 / (1.0 + p.s_a * (-p.s_b * (theta_deg - p.s_a)).exp())
}

fn fspl_db(distance: f64, p: &PathLossParams) -> f64 {
    20.0 * (4.0 * std::f64::consts::PI * distance / p.wavelength()).log10()
}

fn check_angle(theta_deg: f64, h: f64) -> Result<()> {
    if !(theta_deg > 0.0 && theta_deg <= 90.0) {
        return Err(Error::domain(format!(
            "elevation angle must lie in (0, 90] degrees, got {theta_deg}"
        )));
    }
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::domain("altitude must be positive"));
    }
    Ok(())
}

/// Mean UAV-to-user loss in dB at slant distance `h / sin θ`.
pub fn pl_uav_db(theta_deg: f64, h: f64, p: &PathLossParams) -> Result<f64> {
    check_angle(theta_deg, h)?;
    let d = h / theta_deg.to_radians().sin();
    Ok(fspl_db(d, p) + (p.eta_los_db - p.eta_nlos_db) * p_los(theta_deg, p) + p.eta_nlos_db)
}

/// LoS and NLoS losses in dB at the same geometry, as `(los, nlos)`.
pub fn pl_uav_components_db(theta_deg: f64, h: f64, p: &PathLossParams) -> Result<(f64, f64)> {
    check_angle(theta_deg, h)?;
    let base = fspl_db(h / theta_deg.to_radians().sin(), p);
    Ok((base + p.eta_los_db, base + p.eta_nlos_db))
}

/// Linear product of both hop losses for a geometry.
pub fn composite_path_loss(geom: &Geometry, p: &PathLossParams) -> Result<f64> {
    geom.validate()?;
    let uav = pl_uav_db(geom.theta_deg, geom.altitude, p)?;
    Ok(pl_command(geom, p) * db_to_linear(uav))
}

pub fn db_to_linear(x: f64) -> f64 {
    10f64.powf(x / 10.0)
}

pub fn linear_to_db(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::domain(format!("cannot express {x} in dB")));
    }
    Ok(10.0 * x.log10())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn table() -> PathLossParams {
        PathLossParams {
            alpha: 2.0,
            s_a: 4.88,
            s_b: 0.4472,
            eta_los_db: 0.1,
            eta_nlos_db: 20.0,
            frequency: 1.5e9,
        }
    }

    fn geom(z_c: f64, h: f64) -> Geometry {
        Geometry {
            altitude: h,
            z_c,
            radius: 0.0,
            theta_deg: 45.0,
        }
    }

    #[test]
    fn command_hop() {
        let p = table();
        assert_relative_eq!(pl_command(&geom(3.0, 4.0), &p), 25.0, max_relative = 1e-15);
        assert_relative_eq!(pl_command(&geom(0.0, 7.0), &p), 49.0, max_relative = 1e-15);
        assert_relative_eq!(pl_command(&geom(1000.0, 100.0), &p), 1.01e6, max_relative = 1e-12);
        assert!(pl_command(&geom(10.0, 5.0), &p) < pl_command(&geom(11.0, 5.0), &p));
        assert!(pl_command(&geom(10.0, 5.0), &p) < pl_command(&geom(10.0, 6.0), &p));
    }

    #[test]
    fn los_probability() {
        let p = table();
        assert_abs_diff_eq!(p_los(4.88, &p), 1.0 / 5.88, epsilon = 1e-15);
        assert!(p_los(90.0, &p) >= 0.9999);
        let mut prev = 0.0;
        for i in 1..=900 {
            let v = p_los(i as f64 * 0.1, &p);
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn overhead_is_free_space_plus_excess() {
        let p = table();
        let lam = SPEED_OF_LIGHT / 1.5e9;
        let fspl = 20.0 * (4.0 * std::f64::consts::PI * 100.0 / lam).log10();
        let pl = p_los(90.0, &p);
        let expect = fspl + pl * 0.1 + (1.0 - pl) * 20.0;
        assert_abs_diff_eq!(pl_uav_db(90.0, 100.0, &p).unwrap(), expect, epsilon = 1e-12);
    }

    #[test]
    fn table_geometry_at_45_degrees() {
        // Recomputed term by term: slant range 100·√2 m, λ = c / 1.5 GHz.
        let p = table();
        let d = 100.0 * 2f64.sqrt();
        let lam = 299_792_458.0 / 1.5e9;
        let fspl = 10.0 * ((4.0 * std::f64::consts::PI * d / lam).powi(2)).log10();
        let plos = 1.0 / (1.0 + 4.88 * (-0.4472f64 * (45.0 - 4.88)).exp());
        let v = pl_uav_db(45.0, 100.0, &p).unwrap();
        assert_abs_diff_eq!(v, fspl + 0.1 * plos + 20.0 * (1.0 - plos), epsilon = 1e-10);
        assert!((v - 79.1).abs() < 0.5, "{v}");
    }

    #[test]
    fn grazing_angle_is_rejected() {
        assert!(matches!(pl_uav_db(0.0, 100.0, &table()), Err(Error::Domain(_))));
    }

    #[test]
    fn db_round_trip() {
        assert_eq!(db_to_linear(0.0), 1.0);
        assert_relative_eq!(db_to_linear(10.0), 10.0, max_relative = 1e-15);
        assert!(linear_to_db(0.0).is_err());
        assert!(linear_to_db(-1.0).is_err());
    }

    #[test]
    fn geometry_consistency() {
        let g = Geometry::from_radius_angle(1000.0, 200.0, 30.0).unwrap();
        assert_relative_eq!(g.altitude, 200.0 * 30f64.to_radians().tan(), max_relative = 1e-15);
        let bad = Geometry {
            altitude: 10.0,
            z_c: 0.0,
            radius: 200.0,
            theta_deg: 30.0,
        };
        assert!(bad.validate().is_err());
    }

    proptest::proptest! {
        #[test]
        fn mixture_identity(theta in 0.5f64..90.0, h in 1.0f64..3000.0) {
            let p = table();
            let (los, nlos) = pl_uav_components_db(theta, h, &p).unwrap();
            let pl = p_los(theta, &p);
            let composed = pl * los + (1.0 - pl) * nlos;
            proptest::prop_assert!((pl_uav_db(theta, h, &p).unwrap() - composed).abs() < 1e-12);
        }

        #[test]
        fn free_space_term_decreases_with_elevation(theta in 1.0f64..89.0, h in 1.0f64..3000.0) {
            let p = table();
            let a = pl_uav_components_db(theta, h, &p).unwrap().0;
            let b = pl_uav_components_db(theta + 0.5, h, &p).unwrap().0;
            proptest::prop_assert!(b < a);
        }

        #[test]
        fn db_inverse(x in -100.0f64..100.0) {
            proptest::prop_assert!((linear_to_db(db_to_linear(x)).unwrap() - x).abs() < 1e-12);
        }
    }
}
