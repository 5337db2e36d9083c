use std::fs;
use std::path::Path;

use crate::{Error, Result};

/// One Gaussian bump of a lobed permeability field.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianLobe {
    pub x: f64,
    pub y: f64,
    pub width: f64,
    /// Peak relative increase over the background.
    pub amplitude: f64,
}

/// Smooth permeability fields with closed-form gradients.
#[derive(Debug, Clone, PartialEq)]
pub enum AnalyticField {
    /// `k0 (1 + amplitude sin(2π waves x))`.
    SineX { k0: f64, amplitude: f64, waves: f64 },
    /// `background (1 + Σ a_i exp(-|p - c_i|² / (2 w_i²)))`.
    GaussianLobes {
        background: f64,
        lobes: Vec<GaussianLobe>,
    },
}

impl AnalyticField {
    pub fn name(&self) -> &'static str {
        match self {
            AnalyticField::SineX { .. } => "sine-x",
            AnalyticField::GaussianLobes { .. } => "gaussian-lobes",
        }
    }

    fn eval(&self, x: f64, y: f64) -> (f64, [f64; 2]) {
        match self {
            AnalyticField::SineX {
                k0,
                amplitude,
                waves,
            } => {
                let w = 2.0 * std::f64::consts::PI * waves;
                let (s, c) = (w * x).sin_cos();
                (k0 * (1.0 + amplitude * s), [k0 * amplitude * w * c, 0.0])
            }
            AnalyticField::GaussianLobes { background, lobes } => {
                let mut k = 1.0;
                let mut g = [0.0, 0.0];
                for lobe in lobes {
                    let (dx, dy) = (x - lobe.x, y - lobe.y);
                    let s2 = lobe.width * lobe.width;
                    let e = lobe.amplitude * (-(dx * dx + dy * dy) / (2.0 * s2)).exp();
                    k += e;
                    g[0] -= e * dx / s2;
                    g[1] -= e * dy / s2;
                }
                (background * k, [background * g[0], background * g[1]])
            }
        }
    }
}

/// Node values on a uniform grid, interpolated bilinearly.
#[derive(Debug, Clone, PartialEq)]
pub struct RasterField {
    pub nx: usize,
    pub ny: usize,
    /// `[x0, y0, x1, y1]`.
    pub extent: [f64; 4],
    /// Row-major with y outer: node `(i, j)` is `values[j * nx + i]`.
    pub values: Vec<f64>,
}

impl RasterField {
    pub fn new(nx: usize, ny: usize, extent: [f64; 4], values: Vec<f64>) -> Result<Self> {
        if nx < 2 || ny < 2 {
            return Err(Error::Config("raster needs at least 2×2 nodes".into()));
        }
        if values.len() != nx * ny {
            return Err(Error::Dimension {
                expected: nx * ny,
                actual: values.len(),
            });
        }
        if !(extent[2] > extent[0] && extent[3] > extent[1]) {
            return Err(Error::Config("raster extent is degenerate".into()));
        }
        Ok(Self {
            nx,
            ny,
            extent,
            values,
        })
    }

    /// Parses the text form: a header line `nx ny x0 y0 x1 y1` followed by
    /// `nx * ny` whitespace-separated values.
    pub fn parse(text: &str) -> std::result::Result<Self, String> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header: Vec<&str> = lines
            .next()
            .ok_or("empty raster")?
            .split_whitespace()
            .collect();
        if header.len() != 6 {
            return Err("header must be `nx ny x0 y0 x1 y1`".into());
        }
        let nx: usize = header[0].parse().map_err(|_| "bad nx")?;
        let ny: usize = header[1].parse().map_err(|_| "bad ny")?;
        let mut extent = [0.0; 4];
        for (slot, s) in extent.iter_mut().zip(&header[2..]) {
            *slot = s.parse().map_err(|_| format!("bad extent value `{s}`"))?;
        }
        let values = lines
            .flat_map(str::split_whitespace)
            .map(|s| s.parse::<f64>().map_err(|_| format!("bad value `{s}`")))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Self::new(nx, ny, extent, values).map_err(|e| e.to_string())
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text).map_err(|m| Error::format(path, m))
    }

    pub fn to_text(&self) -> String {
        let [x0, y0, x1, y1] = self.extent;
        let mut s = format!("{} {} {x0} {y0} {x1} {y1}\n", self.nx, self.ny);
        for row in self.values.chunks(self.nx) {
            let line: Vec<String> = row.iter().map(|v| format!("{v:?}")).collect();
            s.push_str(&line.join(" "));
            s.push('\n');
        }
        s
    }

    fn spacing(&self) -> (f64, f64) {
        let [x0, y0, x1, y1] = self.extent;
        (
            (x1 - x0) / (self.nx - 1) as f64,
            (y1 - y0) / (self.ny - 1) as f64,
        )
    }

    fn contains(&self, x: f64, y: f64) -> bool {
        let [x0, y0, x1, y1] = self.extent;
        let tol = 1e-12 * (x1 - x0).max(y1 - y0);
        x >= x0 - tol && x <= x1 + tol && y >= y0 - tol && y <= y1 + tol
    }

    fn bilinear(&self, x: f64, y: f64) -> f64 {
        let [x0, y0, x1, y1] = self.extent;
        let (hx, hy) = self.spacing();
        let fx = ((x.clamp(x0, x1) - x0) / hx).min((self.nx - 1) as f64);
        let fy = ((y.clamp(y0, y1) - y0) / hy).min((self.ny - 1) as f64);
        let i = (fx.floor() as usize).min(self.nx - 2);
        let j = (fy.floor() as usize).min(self.ny - 2);
        let (tx, ty) = (fx - i as f64, fy - j as f64);
        let v = |i: usize, j: usize| self.values[j * self.nx + i];
        (1.0 - tx) * (1.0 - ty) * v(i, j)
            + tx * (1.0 - ty) * v(i + 1, j)
            + (1.0 - tx) * ty * v(i, j + 1)
            + tx * ty * v(i + 1, j + 1)
    }

    /// Bilinear value and a central-difference gradient with a half-cell
    /// step, shortened to one side at the raster edge.
    pub fn eval(&self, x: f64, y: f64) -> Result<(f64, [f64; 2])> {
        if !self.contains(x, y) {
            return Err(Error::OutsideRaster { x, y });
        }
        let [x0, y0, x1, y1] = self.extent;
        let (hx, hy) = self.spacing();
        let (xa, xb) = ((x - 0.5 * hx).max(x0), (x + 0.5 * hx).min(x1));
        let (ya, yb) = ((y - 0.5 * hy).max(y0), (y + 0.5 * hy).min(y1));
        let gx = (self.bilinear(xb, y) - self.bilinear(xa, y)) / (xb - xa);
        let gy = (self.bilinear(x, yb) - self.bilinear(x, ya)) / (yb - ya);
        Ok((self.bilinear(x, y), [gx, gy]))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PermeabilityField {
    Homogeneous { k: f64 },
    Analytic(AnalyticField),
    Raster(RasterField),
}

impl PermeabilityField {
    /// Permeability and its spatial gradient.
    pub fn eval(&self, x: f64, y: f64) -> Result<(f64, [f64; 2])> {
        match self {
            PermeabilityField::Homogeneous { k } => Ok((*k, [0.0, 0.0])),
            PermeabilityField::Analytic(f) => Ok(f.eval(x, y)),
            PermeabilityField::Raster(r) => r.eval(x, y),
        }
    }

    /// Mobility `ζ = k/(μφ)` and its gradient.
    pub fn zeta(&self, mu_phi: f64, x: f64, y: f64) -> Result<(f64, [f64; 2])> {
        let (k, g) = self.eval(x, y)?;
        Ok((k / mu_phi, [g[0] / mu_phi, g[1] / mu_phi]))
    }

    pub fn is_homogeneous(&self) -> bool {
        matches!(self, PermeabilityField::Homogeneous { .. })
    }

    /// Checks positivity on an `n × n` lattice over `extent`.
    pub fn validate(&self, extent: [f64; 4]) -> Result<()> {
        if let PermeabilityField::Raster(r) = self {
            if r.values.iter().any(|v| !(*v > 0.0)) {
                return Err(Error::Config("raster permeability must be positive".into()));
            }
        }
        let n = 41;
        for j in 0..n {
            for i in 0..n {
                let x = extent[0] + (extent[2] - extent[0]) * i as f64 / (n - 1) as f64;
                let y = extent[1] + (extent[3] - extent[1]) * j as f64 / (n - 1) as f64;
                let (k, _) = self.eval(x, y)?;
                if !(k > 0.0 && k.is_finite()) {
                    return Err(Error::Config(format!(
                        "permeability must be positive, got {k} at ({x}, {y})"
                    )));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn homogeneous_zeta() {
        let f = PermeabilityField::Homogeneous { k: 1e-3 };
        let (z, g) = f.zeta(1e-3, 0.3, 0.7).unwrap();
        assert!((z - 1.0).abs() < 1e-15);
        assert_eq!(g, [0.0, 0.0]);
    }

    #[test]
    fn sine_field_extremum() {
        let k0 = 2e-3;
        let f = PermeabilityField::Analytic(AnalyticField::SineX {
            k0,
            amplitude: 0.5,
            waves: 1.0,
        });
        let (z, g) = f.zeta(1e-3, 0.25, 0.4).unwrap();
        assert!((z - 1.5 * k0 / 1e-3).abs() < 1e-12);
        assert!(g[0].abs() < 1e-12 && g[1] == 0.0);
    }

    #[test]
    fn analytic_gradients_match_differences() {
        let fields = [
            AnalyticField::SineX {
                k0: 1.0,
                amplitude: 0.3,
                waves: 2.0,
            },
            AnalyticField::GaussianLobes {
                background: 5e-4,
                lobes: vec![
                    GaussianLobe {
                        x: 0.3,
                        y: 0.35,
                        width: 0.12,
                        amplitude: 99.0,
                    },
                    GaussianLobe {
                        x: 0.7,
                        y: 0.65,
                        width: 0.12,
                        amplitude: 99.0,
                    },
                ],
            },
        ];
        let h = 1e-6;
        for f in &fields {
            for &(x, y) in &[(0.1, 0.2), (0.33, 0.41), (0.8, 0.6), (0.5, 0.5)] {
                let (_, g) = f.eval(x, y);
                let fx = (f.eval(x + h, y).0 - f.eval(x - h, y).0) / (2.0 * h);
                let fy = (f.eval(x, y + h).0 - f.eval(x, y - h).0) / (2.0 * h);
                let scale = g[0].abs().max(g[1].abs()).max(f.eval(x, y).0);
                assert!((fx - g[0]).abs() < 1e-6 * scale, "{} at ({x},{y})", f.name());
                assert!((fy - g[1]).abs() < 1e-6 * scale, "{} at ({x},{y})", f.name());
            }
        }
    }

    fn small_raster() -> RasterField {
        RasterField::new(3, 2, [0.0, 0.0, 2.0, 1.0], vec![1.0, 2.0, 4.0, 3.0, 5.0, 8.0]).unwrap()
    }

    #[test]
    fn raster_cell_center_is_node_average() {
        let r = small_raster();
        let (v, _) = r.eval(0.5, 0.5).unwrap();
        assert!((v - (1.0 + 2.0 + 3.0 + 5.0) / 4.0).abs() < 1e-15);
        let (v, _) = r.eval(1.5, 0.5).unwrap();
        assert!((v - (2.0 + 4.0 + 5.0 + 8.0) / 4.0).abs() < 1e-15);
        let (v, _) = r.eval(2.0, 1.0).unwrap();
        assert_eq!(v, 8.0);
    }

    #[test]
    fn raster_gradient_inside_cell() {
        let r = small_raster();
        // Within the first cell the surface is 1 + x + 2y + x y.
        let (_, g) = r.eval(0.5, 0.5).unwrap();
        assert!((g[0] - 1.5).abs() < 1e-12);
        assert!((g[1] - 2.5).abs() < 1e-12);
    }

    #[test]
    fn raster_outside_extent_is_error() {
        let r = small_raster();
        assert!(matches!(
            r.eval(2.5, 0.5),
            Err(Error::OutsideRaster { .. })
        ));
        assert!(r.eval(-0.1, 0.5).is_err());
    }

    #[test]
    fn raster_text_roundtrip() {
        let r = small_raster();
        let back = RasterField::parse(&r.to_text()).unwrap();
        assert_eq!(back, r);
        assert!(RasterField::parse("3 2 0 0 1 1\n1 2 3").is_err());
        assert!(RasterField::parse("3 2 0 0\n1 2 3 4 5 6").is_err());
    }

    #[test]
    fn nonpositive_permeability_rejected() {
        let f = PermeabilityField::Analytic(AnalyticField::SineX {
            k0: 1.0,
            amplitude: 1.5,
            waves: 1.0,
        });
        assert!(f.validate([0.0, 0.0, 1.0, 1.0]).is_err());
    }
}
