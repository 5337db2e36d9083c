use super::params::{Normalization, TransportParams};
use super::{time_axis, AXIS_X, AXIS_Y};
use crate::net::FieldJet;

/// Darcy velocity `u = -ζ ∇P` and its magnitude, from a physical pressure
/// gradient.
pub fn darcy_velocity(grad_p: [f64; 2], zeta: f64) -> ([f64; 2], f64) {
    let u = [-zeta * grad_p[0], -zeta * grad_p[1]];
    (u, u[0].hypot(u[1]))
}

/// Coefficients of the nondimensional advection–dispersion residual
/// `Ĉ_t̂ + Σ a_i Ĉ_i + Σ b_i Ĉ_ii` for a fixed velocity and dispersion.
#[derive(Debug, Clone, PartialEq)]
pub struct AdeCoefficients {
    spatial_dims: usize,
    advection: [f64; 2],
    diffusion: [f64; 2],
}

impl AdeCoefficients {
    pub fn new_1d(ux: f64, dx: f64, norm: &Normalization) -> Self {
        let (lx, t) = (norm.length_x, norm.time);
        Self {
            spatial_dims: 1,
            advection: [ux * t / lx, 0.0],
            diffusion: [-dx * t / (lx * lx), 0.0],
        }
    }

    pub fn new_2d(u: [f64; 2], d: [f64; 2], norm: &Normalization) -> Self {
        let (lx, ly, t) = (norm.length_x, norm.length_y, norm.time);
        Self {
            spatial_dims: 2,
            advection: [u[0] * t / lx, u[1] * t / ly],
            diffusion: [-d[0] * t / (lx * lx), -d[1] * t / (ly * ly)],
        }
    }

    pub fn residual(&self, c: &FieldJet) -> f64 {
        let mut r = c.d1[time_axis(self.spatial_dims)];
        for a in 0..self.spatial_dims {
            r += self.advection[a] * c.d1[a] + self.diffusion[a] * c.d2[a];
        }
        r
    }

    /// Derivative of the residual with respect to each jet component.
    pub fn gradient(&self) -> FieldJet {
        let mut g = FieldJet::default();
        g.d1[time_axis(self.spatial_dims)] = 1.0;
        for a in 0..self.spatial_dims {
            g.d1[a] = self.advection[a];
            g.d2[a] = self.diffusion[a];
        }
        g
    }
}

/// 1D residual `Ĉ_t̂ + (u T/L) Ĉ_x̂ - (D T/L²) Ĉ_x̂x̂` for the uniform velocity
/// carried by `params`.
pub fn residual_ade_1d(c: &FieldJet, params: &TransportParams, norm: &Normalization) -> f64 {
    let ux = params.velocity.map_or(0.0, |u| u[0]);
    let d = params.dispersion_xy(ux.abs())[0];
    AdeCoefficients::new_1d(ux, d, norm).residual(c)
}

/// 2D residual for a given velocity and dispersion pair.
pub fn residual_ade_2d(c: &FieldJet, u: [f64; 2], dx: f64, dy: f64, norm: &Normalization) -> f64 {
    AdeCoefficients::new_2d(u, [dx, dy], norm).residual(c)
}

/// Coefficients of the nondimensional pressure residual
/// `P̂_x̂x̂ + κ² P̂_ŷŷ + (L_x ∂ζ/∂x / ζ) P̂_x̂ + κ² (L_y ∂ζ/∂y / ζ) P̂_ŷ`,
/// the variable-mobility Laplacian scaled by `L_x² / (ζ ΔP)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PressureCoefficients {
    first: [f64; 2],
    second: [f64; 2],
}

impl PressureCoefficients {
    pub fn new(zeta: f64, zeta_grad: [f64; 2], norm: &Normalization) -> Self {
        let kappa2 = norm.aspect().powi(2);
        Self {
            first: [
                norm.length_x * zeta_grad[0] / zeta,
                kappa2 * norm.length_y * zeta_grad[1] / zeta,
            ],
            second: [1.0, kappa2],
        }
    }

    pub fn residual(&self, p: &FieldJet) -> f64 {
        (0..2)
            .map(|a| self.second[a] * p.d2[a] + self.first[a] * p.d1[a])
            .sum()
    }

    pub fn gradient(&self) -> FieldJet {
        let mut g = FieldJet::default();
        for a in 0..2 {
            g.d1[a] = self.first[a];
            g.d2[a] = self.second[a];
        }
        g
    }
}

pub fn residual_pressure(
    p: &FieldJet,
    zeta: f64,
    zeta_grad: [f64; 2],
    norm: &Normalization,
) -> f64 {
    PressureCoefficients::new(zeta, zeta_grad, norm).residual(p)
}

/// Transport residual driven by the Darcy velocity of the pressure jet,
/// together with its derivatives with respect to both jets.
#[derive(Debug, Clone, PartialEq)]
pub struct DarcyAdeResidual {
    pub value: f64,
    pub d_concentration: FieldJet,
    pub d_pressure: FieldJet,
    pub velocity: [f64; 2],
    pub speed: f64,
}

/// 2D transport residual with `u = -ζ ∇P` and `D = D0 + α |u|`. Dispersion
/// is treated as locally constant in the dispersive flux.
pub fn residual_ade_darcy(
    c: &FieldJet,
    p: &FieldJet,
    zeta: f64,
    params: &TransportParams,
    norm: &Normalization,
) -> DarcyAdeResidual {
    let (lx, ly, t) = (norm.length_x, norm.length_y, norm.time);
    let dp = norm.p_range();
    let grad_scale = [dp / lx, dp / ly];
    let grad_p = [grad_scale[0] * p.d1[AXIS_X], grad_scale[1] * p.d1[AXIS_Y]];
    let (u, speed) = darcy_velocity(grad_p, zeta);
    let d = params.dispersion_xy(speed);

    let adv = [t / lx, t / ly];
    let dif = [t / (lx * lx), t / (ly * ly)];
    let ta = time_axis(2);

    let value = c.d1[ta] + adv[0] * u[0] * c.d1[AXIS_X] + adv[1] * u[1] * c.d1[AXIS_Y]
        - dif[0] * d[0] * c.d2[AXIS_X]
        - dif[1] * d[1] * c.d2[AXIS_Y];

    let mut d_c = FieldJet::default();
    d_c.d1[ta] = 1.0;
    d_c.d1[AXIS_X] = adv[0] * u[0];
    d_c.d1[AXIS_Y] = adv[1] * u[1];
    d_c.d2[AXIS_X] = -dif[0] * d[0];
    d_c.d2[AXIS_Y] = -dif[1] * d[1];

    // ∂r/∂u_i, including the dispersivity dependence through |u|.
    let curvature = dif[0] * c.d2[AXIS_X] + dif[1] * c.d2[AXIS_Y];
    let mut dr_du = [adv[0] * c.d1[AXIS_X], adv[1] * c.d1[AXIS_Y]];
    if params.alpha != 0.0 && speed > 0.0 {
        for a in 0..2 {
            dr_du[a] -= params.alpha * u[a] / speed * curvature;
        }
    }
    let mut d_p = FieldJet::default();
    for a in 0..2 {
        d_p.d1[a] = -dr_du[a] * zeta * grad_scale[a];
    }

    DarcyAdeResidual {
        value,
        d_concentration: d_c,
        d_pressure: d_p,
        velocity: u,
        speed,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::physics::dispersion;

    fn unit_norm() -> Normalization {
        Normalization {
            length_x: 1.0,
            length_y: 1.0,
            time: 1.0,
            c_scale: 1.0,
            p_min: 0.0,
            p_max: 1.0,
        }
    }

    fn jet(value: f64, d1: [f64; 3], d2: [f64; 3]) -> FieldJet {
        FieldJet { value, d1, d2 }
    }

    #[test]
    fn darcy_examples() {
        let (u, speed) = darcy_velocity([-0.5, 0.0], 1.0);
        assert_eq!(u, [0.5, 0.0]);
        assert_eq!(speed, 0.5);
        let (u, speed) = darcy_velocity([0.0, 0.0], 3.0);
        assert_eq!(u, [0.0, 0.0]);
        assert_eq!(speed, 0.0);
    }

    #[test]
    fn dispersion_from_darcy_composition() {
        let (_, speed) = darcy_velocity([-0.5, 0.0], 1.0);
        assert!((dispersion(0.02, 0.1, speed) - 0.07).abs() < 1e-15);
    }

    #[test]
    fn residuals_vanish_on_constants() {
        let c = FieldJet::constant(0.7);
        let norm = Normalization {
            length_x: 2.0,
            length_y: 0.5,
            time: 10.0,
            c_scale: 0.2,
            p_min: 0.1,
            p_max: 1.0,
        };
        let params = TransportParams {
            velocity: Some([0.5, 0.1]),
            alpha: 0.3,
            ..Default::default()
        };
        assert_eq!(residual_ade_1d(&c, &params, &norm), 0.0);
        assert_eq!(residual_ade_2d(&c, [0.5, 0.2], 0.02, 0.03, &norm), 0.0);
        assert_eq!(residual_pressure(&c, 2.0, [0.4, -1.0], &norm), 0.0);
        let r = residual_ade_darcy(&c, &FieldJet::constant(0.3), 2.0, &params, &norm);
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn linear_profile_1d() {
        // Ĉ = x̂ with u T / L = 5.
        let c = jet(0.4, [1.0, 0.0, 0.0], [0.0; 3]);
        let norm = Normalization {
            time: 10.0,
            ..unit_norm()
        };
        let params = TransportParams {
            velocity: Some([0.5, 0.0]),
            ..Default::default()
        };
        assert!((residual_ade_1d(&c, &params, &norm) - 5.0).abs() < 1e-14);
    }

    #[test]
    fn linear_profile_2d() {
        let c = jet(0.0, [1.0, 1.0, 0.0], [0.0; 3]);
        let r = residual_ade_2d(&c, [0.5, 0.5], 0.0, 0.0, &unit_norm());
        assert!((r - 1.0).abs() < 1e-15);
    }

    #[test]
    fn pressure_examples() {
        let norm = unit_norm();
        let linear = jet(0.0, [1.0, 0.0, 0.0], [0.0; 3]);
        assert_eq!(residual_pressure(&linear, 1.0, [0.0, 0.0], &norm), 0.0);
        // x̂² - ŷ²
        let saddle = jet(0.0, [0.6, -0.8, 0.0], [2.0, -2.0, 0.0]);
        assert_eq!(residual_pressure(&saddle, 1.0, [0.0, 0.0], &norm), 0.0);
        let bowl = jet(0.0, [0.6, 0.0, 0.0], [2.0, 0.0, 0.0]);
        assert_eq!(residual_pressure(&bowl, 1.0, [0.0, 0.0], &norm), 2.0);
    }

    #[test]
    fn homogeneous_pressure_residual_independent_of_k() {
        let norm = Normalization {
            length_x: 1.0,
            length_y: 2.0,
            ..unit_norm()
        };
        let p = jet(0.2, [0.3, -0.1, 0.0], [1.2, 0.7, 0.0]);
        let reference = residual_pressure(&p, 1e-3 / 1e-3, [0.0, 0.0], &norm);
        for k in [1e-5, 1e-4, 1e-3, 1e-2, 1e-1] {
            assert_eq!(residual_pressure(&p, k / 1e-3, [0.0, 0.0], &norm), reference);
        }
    }

    #[test]
    fn nondimensional_residual_scales_with_time() {
        // Physical test functions C(x, t) and their residual
        // C_t + u C_x - D C_xx, compared with the normalised residual.
        let (l, tt, u, d) = (2.0, 5.0, 0.3, 0.04);
        let norm = Normalization {
            length_x: l,
            time: tt,
            ..unit_norm()
        };
        let params = TransportParams {
            velocity: Some([u, 0.0]),
            diffusion_x: d,
            ..Default::default()
        };
        type Poly = fn(f64, f64) -> [f64; 4]; // C, C_x, C_xx, C_t
        let polys: [Poly; 3] = [
            |x, t| [x * x + t, 2.0 * x, 2.0, 1.0],
            |x, t| [x * t * t, t * t, 0.0, 2.0 * x * t],
            |x, t| [x.powi(3) - x * t, 3.0 * x * x - t, 6.0 * x, -x],
        ];
        for f in polys {
            for &(x, t) in &[(0.3, 1.0), (1.5, 4.0)] {
                let [_, cx, cxx, ct] = f(x, t);
                let physical = ct + u * cx - d * cxx;
                let c_hat = jet(0.0, [l * cx, tt * ct, 0.0], [l * l * cxx, 0.0, 0.0]);
                let r = residual_ade_1d(&c_hat, &params, &norm);
                assert!((r - tt * physical).abs() < 1e-12 * (1.0 + r.abs()));
            }
        }
    }

    #[test]
    fn darcy_residual_gradients_match_differences() {
        let norm = Normalization {
            length_x: 1.0,
            length_y: 1.5,
            time: 2.0,
            c_scale: 0.2,
            p_min: 0.1,
            p_max: 1.0,
        };
        let params = TransportParams {
            velocity: None,
            alpha: 0.2,
            ..Default::default()
        };
        let c = jet(0.3, [0.4, -0.2, 0.1], [1.1, -0.6, 0.0]);
        let p = jet(0.5, [-0.7, 0.3, 0.0], [0.2, 0.1, 0.0]);
        let zeta = 1.3;
        let r = residual_ade_darcy(&c, &p, zeta, &params, &norm);
        let h = 1e-6;
        for a in 0..2 {
            let mut pp = p;
            pp.d1[a] += h;
            let mut pm = p;
            pm.d1[a] -= h;
            let fd = (residual_ade_darcy(&c, &pp, zeta, &params, &norm).value
                - residual_ade_darcy(&c, &pm, zeta, &params, &norm).value)
                / (2.0 * h);
            assert!((fd - r.d_pressure.d1[a]).abs() < 1e-7);
        }
        for a in 0..3 {
            let mut cp = c;
            cp.d1[a] += h;
            let fd = (residual_ade_darcy(&cp, &p, zeta, &params, &norm).value - r.value) / h;
            assert!((fd - r.d_concentration.d1[a]).abs() < 1e-6);
        }
    }
}
