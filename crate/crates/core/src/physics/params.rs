use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct TransportParams {
    /// Molecular diffusion along x (m²/s).
    pub diffusion_x: f64,
    /// Molecular diffusion along y (m²/s).
    pub diffusion_y: f64,
    /// Dynamic dispersivity (m).
    pub alpha: f64,
    /// Prescribed uniform velocity (m/s); `None` when the velocity follows
    /// from Darcy's law.
    pub velocity: Option<[f64; 2]>,
    pub porosity: f64,
    /// Viscosity times porosity (Pa·s).
    pub mu_phi: f64,
    /// Injection concentration.
    pub c0: f64,
}

impl Default for TransportParams {
    fn default() -> Self {
        Self {
            diffusion_x: 0.02,
            diffusion_y: 0.02,
            alpha: 0.0,
            velocity: Some([0.0, 0.0]),
            porosity: 1.0,
            mu_phi: 1.0,
            c0: 1.0,
        }
    }
}

impl TransportParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        if !(self.diffusion_x >= 0.0 && self.diffusion_y >= 0.0) {
            return bad("diffusion must be nonnegative");
        }
        if !(self.alpha >= 0.0) {
            return bad("dispersivity must be nonnegative");
        }
        if !(self.porosity > 0.0 && self.porosity <= 1.0) {
            return bad("porosity must lie in (0, 1]");
        }
        if !(self.mu_phi > 0.0) {
            return bad("mu_phi must be positive");
        }
        if !self.c0.is_finite() {
            return bad("c0 must be finite");
        }
        if self.alpha == 0.0 && (self.diffusion_x <= 0.0 || self.diffusion_y <= 0.0) {
            return bad("effective dispersion must be positive");
        }
        Ok(())
    }

    /// Effective dispersion along x and y at speed `speed`.
    pub fn dispersion_xy(&self, speed: f64) -> [f64; 2] {
        [
            dispersion(self.diffusion_x, self.alpha, speed),
            dispersion(self.diffusion_y, self.alpha, speed),
        ]
    }
}

/// Hydrodynamic dispersion `D0 + alpha * U`.
pub fn dispersion(d0: f64, alpha: f64, speed: f64) -> f64 {
    d0 + alpha * speed
}

/// Scales mapping physical variables to the unit interval.
#[derive(Debug, Clone, PartialEq)]
pub struct Normalization {
    pub length_x: f64,
    pub length_y: f64,
    pub time: f64,
    pub c_scale: f64,
    pub p_min: f64,
    pub p_max: f64,
}

impl Normalization {
    pub fn validate(&self) -> Result<()> {
        let positive = [self.length_x, self.length_y, self.time, self.c_scale];
        if positive.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
            return Err(Error::Config("normalization scales must be positive".into()));
        }
        if !(self.p_max > self.p_min) {
            return Err(Error::Config("p_max must exceed p_min".into()));
        }
        Ok(())
    }

    pub fn p_range(&self) -> f64 {
        self.p_max - self.p_min
    }

    /// `L_x / L_y`.
    pub fn aspect(&self) -> f64 {
        self.length_x / self.length_y
    }

    pub fn to_pressure(&self, p_hat: f64) -> f64 {
        self.p_min + self.p_range() * p_hat
    }

    pub fn from_pressure(&self, p: f64) -> f64 {
        (p - self.p_min) / self.p_range()
    }

    pub fn to_concentration(&self, c_hat: f64) -> f64 {
        c_hat * self.c_scale
    }

    pub fn from_concentration(&self, c: f64) -> f64 {
        c / self.c_scale
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn dispersion_examples() {
        for u in [0.0, 0.3, 5.0] {
            assert_eq!(dispersion(0.02, 0.0, u), 0.02);
        }
        assert!((dispersion(0.0, 0.1, 0.5) - 0.05).abs() < 1e-15);
    }

    #[test]
    fn invalid_params_rejected() {
        let p = TransportParams {
            porosity: 0.0,
            ..Default::default()
        };
        assert!(p.validate().is_err());
        let p = TransportParams {
            diffusion_x: 0.0,
            ..Default::default()
        };
        assert!(p.validate().is_err());
    }

    proptest! {
        #[test]
        fn dispersion_monotone(d0 in 0.0f64..1.0, alpha in 0.0f64..2.0, u in 0.0f64..10.0, du in 0.0f64..10.0) {
            prop_assert!(dispersion(d0, alpha, u + du) >= dispersion(d0, alpha, u));
        }
    }
}
