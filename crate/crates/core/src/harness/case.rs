//! Problem descriptions and the built-in presets.

use crate::net::{Activation, NetworkConfig};
use crate::oracles::Face;
use crate::physics::{AnalyticField, GaussianLobe, Normalization, PermeabilityField, TransportParams};
use crate::training::{Budget, LossWeights, TrainOptions};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseKind {
    /// `(x, t)` column with a uniform velocity.
    Column1D,
    /// `(x, y, t)` with a prescribed uniform velocity.
    Uniform2D,
    /// `(x, y, t)` with pressure and concentration outputs; the velocity
    /// follows from Darcy's law.
    Darcy2D,
}

impl CaseKind {
    pub fn spatial_dims(self) -> usize {
        match self {
            CaseKind::Column1D => 1,
            _ => 2,
        }
    }

    pub fn input_dim(self) -> usize {
        self.spatial_dims() + 1
    }

    pub fn output_dim(self) -> usize {
        match self {
            CaseKind::Darcy2D => 2,
            _ => 1,
        }
    }

    /// Output index of the concentration.
    pub fn concentration_output(self) -> usize {
        self.output_dim() - 1
    }

    pub fn has_pressure(self) -> bool {
        self == CaseKind::Darcy2D
    }
}

/// Concentration condition on one face of the box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FaceCondition {
    ZeroGradient,
    /// `C = C0` for face coordinates in `[from, to]` and `C = 0` on the rest
    /// of the face.
    Inlet { from: f64, to: f64 },
}

/// One value per face, in the order left, right, bottom, top.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FaceSet<T> {
    pub left: T,
    pub right: T,
    pub bottom: T,
    pub top: T,
}

impl<T: Copy> FaceSet<T> {
    pub fn uniform(v: T) -> Self {
        Self { left: v, right: v, bottom: v, top: v }
    }

    pub fn get(&self, face: Face) -> T {
        match face {
            Face::Left => self.left,
            Face::Right => self.right,
            Face::Bottom => self.bottom,
            Face::Top => self.top,
        }
    }

    pub fn set(&mut self, face: Face, v: T) {
        match face {
            Face::Left => self.left = v,
            Face::Right => self.right = v,
            Face::Bottom => self.bottom = v,
            Face::Top => self.top = v,
        }
    }
}

pub const FACES: [Face; 4] = [Face::Left, Face::Right, Face::Bottom, Face::Top];

pub fn face_name(face: Face) -> &'static str {
    match face {
        Face::Left => "left",
        Face::Right => "right",
        Face::Bottom => "bottom",
        Face::Top => "top",
    }
}

/// Pressure pinned at a point, in physical units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Anchor {
    pub x: f64,
    pub y: f64,
    pub pressure: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CaseSpec {
    pub name: String,
    pub kind: CaseKind,
    pub length: f64,
    /// Ignored by 1D cases.
    pub width: f64,
    pub horizon: f64,
    pub transport: TransportParams,
    /// Required by [`CaseKind::Darcy2D`].
    pub permeability: Option<PermeabilityField>,
    pub concentration_bc: FaceSet<FaceCondition>,
    /// Dirichlet pressure per face, required by [`CaseKind::Darcy2D`].
    pub pressure_bc: Option<FaceSet<f64>>,
    pub initial_concentration: f64,
    pub anchors: Vec<Anchor>,
    /// Nodes per axis of the evaluation grid.
    pub grid: usize,
    pub snapshots: Vec<f64>,
}

impl CaseSpec {
    /// Extent of a face coordinate: y for left/right, x for bottom/top.
    pub fn face_extent(&self, face: Face) -> f64 {
        match face {
            Face::Left | Face::Right => self.width,
            Face::Bottom | Face::Top => self.length,
        }
    }

    /// Faces that exist for this dimensionality.
    pub fn faces(&self) -> &'static [Face] {
        match self.kind {
            CaseKind::Column1D => &FACES[..2],
            _ => &FACES,
        }
    }

    /// Concentration imposed at face coordinate `s`, or `None` on a
    /// zero-gradient face.
    pub fn inlet_value(&self, face: Face, s: f64) -> Option<f64> {
        match self.concentration_bc.get(face) {
            FaceCondition::ZeroGradient => None,
            FaceCondition::Inlet { .. } if self.kind == CaseKind::Column1D => Some(self.transport.c0),
            FaceCondition::Inlet { from, to } => {
                Some(if (from..=to).contains(&s) { self.transport.c0 } else { 0.0 })
            }
        }
    }

    pub fn normalization(&self) -> Normalization {
        let (p_min, p_max) = match &self.pressure_bc {
            Some(bc) => {
                let v = [bc.left, bc.right, bc.bottom, bc.top];
                let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
                let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                if hi > lo { (lo, hi) } else { (lo, lo + 1.0) }
            }
            None => (0.0, 1.0),
        };
        let c_scale = if self.transport.c0 != 0.0 { self.transport.c0.abs() } else { 1.0 };
        Normalization {
            length_x: self.length,
            length_y: if self.kind == CaseKind::Column1D { 1.0 } else { self.width },
            time: self.horizon,
            c_scale,
            p_min,
            p_max,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if !(self.length > 0.0) {
            return bad(format!("domain.length must be positive, got {}", self.length));
        }
        if self.kind != CaseKind::Column1D && !(self.width > 0.0) {
            return bad(format!("domain.width must be positive, got {}", self.width));
        }
        if !(self.horizon > 0.0) {
            return bad(format!("domain.time must be positive, got {}", self.horizon));
        }
        self.transport.validate()?;
        for &face in self.faces() {
            if let FaceCondition::Inlet { from, to } = self.concentration_bc.get(face) {
                if self.kind == CaseKind::Column1D {
                    continue;
                }
                if from > to {
                    return bad(format!(
                        "bc.{}: injection interval start {from} exceeds end {to}",
                        face_name(face)
                    ));
                }
                if from < 0.0 || to > self.face_extent(face) {
                    return bad(format!(
                        "bc.{}: injection interval [{from}, {to}] outside the face",
                        face_name(face)
                    ));
                }
            }
        }
        match self.kind {
            CaseKind::Darcy2D => {
                let perm = self
                    .permeability
                    .as_ref()
                    .ok_or_else(|| Error::Config("physics.permeability is required".into()))?;
                perm.validate([0.0, 0.0, self.length, self.width])?;
                if self.pressure_bc.is_none() {
                    return bad("bc.pressure_* values are required".into());
                }
            }
            _ => {
                if self.transport.velocity.is_none() {
                    return bad("physics.velocity is required".into());
                }
            }
        }
        if self.grid < 3 {
            return bad(format!("output.grid must be at least 3, got {}", self.grid));
        }
        for &t in &self.snapshots {
            if !(0.0..=self.horizon).contains(&t) {
                return bad(format!("output snapshot {t} outside [0, {}]", self.horizon));
            }
        }
        for a in &self.anchors {
            if !(0.0..=self.length).contains(&a.x) || !(0.0..=self.width).contains(&a.y) {
                return bad(format!("anchor ({}, {}) outside the domain", a.x, a.y));
            }
        }
        self.normalization().validate()
    }
}

/// Everything needed for one run: the problem, the network and the
/// optimiser settings.
#[derive(Debug, Clone, PartialEq)]
pub struct CaseBundle {
    pub case: CaseSpec,
    pub network: NetworkConfig,
    pub training: TrainOptions,
}

impl CaseBundle {
    pub fn validate(&self) -> Result<()> {
        self.case.validate()?;
        self.network.validate()?;
        if self.network.input_dim != self.case.kind.input_dim()
            || self.network.output_dim != self.case.kind.output_dim()
        {
            return Err(Error::Config(format!(
                "network maps {} → {} but the case needs {} → {}",
                self.network.input_dim,
                self.network.output_dim,
                self.case.kind.input_dim(),
                self.case.kind.output_dim()
            )));
        }
        self.training.validate()
    }

    pub fn with_activation(mut self, activation: Activation) -> Self {
        self.network = self.network.with_activation(activation);
        self
    }
}

pub const PRESETS: [&str; 6] = [
    "case1",
    "case2-dispersion",
    "case2-advection",
    "case2-line",
    "case3",
    "case4",
];

fn training(interior: usize, boundary_initial: usize, data: usize, pde_weight: f64, iterations: usize) -> TrainOptions {
    let mut t = TrainOptions::default();
    t.budget = Budget { interior, boundary_initial, data };
    t.weights = LossWeights { pde: pde_weight, ..LossWeights::default() };
    t.lbfgs.max_iters = iterations;
    t
}

fn uniform_2d(name: &str, u: f64, y1: f64, y2: f64, snapshot: f64) -> CaseBundle {
    let mut bc = FaceSet::uniform(FaceCondition::ZeroGradient);
    bc.left = FaceCondition::Inlet { from: y1, to: y2 };
    CaseBundle {
        case: CaseSpec {
            name: name.into(),
            kind: CaseKind::Uniform2D,
            length: 1.0,
            width: 1.0,
            horizon: 1.0,
            transport: TransportParams {
                velocity: Some([u, 0.0]),
                c0: 0.2,
                ..TransportParams::default()
            },
            permeability: None,
            concentration_bc: bc,
            pressure_bc: None,
            initial_concentration: 0.0,
            anchors: Vec::new(),
            grid: 101,
            snapshots: vec![snapshot],
        },
        network: NetworkConfig::new(3, vec![32, 16, 16, 16], 1).with_frequency(10.0),
        training: training(8000, 8000, 0, 1.0, 2000),
    }
}

fn darcy_2d(name: &str, permeability: PermeabilityField, mu_phi: f64, anchors: Vec<Anchor>) -> CaseSpec {
    let mut bc = FaceSet::uniform(FaceCondition::ZeroGradient);
    bc.bottom = FaceCondition::Inlet { from: 0.3, to: 0.7 };
    bc.top = FaceCondition::Inlet { from: 0.3, to: 0.7 };
    CaseSpec {
        name: name.into(),
        kind: CaseKind::Darcy2D,
        length: 1.0,
        width: 1.0,
        horizon: 1.0,
        transport: TransportParams {
            velocity: None,
            mu_phi,
            c0: 0.2,
            ..TransportParams::default()
        },
        permeability: Some(permeability),
        concentration_bc: bc,
        pressure_bc: Some(FaceSet { left: 0.1, right: 0.1, bottom: 1.0, top: 1.0 }),
        initial_concentration: 0.0,
        anchors,
        grid: 101,
        snapshots: vec![1.0],
    }
}

/// Two Gaussian lobes of 100× contrast over a low-permeability background.
pub fn lobed_permeability() -> PermeabilityField {
    PermeabilityField::Analytic(AnalyticField::GaussianLobes {
        background: 1e-5,
        lobes: vec![
            GaussianLobe { x: 0.3, y: 0.35, width: 0.12, amplitude: 99.0 },
            GaussianLobe { x: 0.7, y: 0.65, width: 0.12, amplitude: 99.0 },
        ],
    })
}

/// Built-in case by name.
pub fn preset(name: &str) -> Result<CaseBundle> {
    let bundle = match name {
        "case1" => {
            let mut bc = FaceSet::uniform(FaceCondition::ZeroGradient);
            bc.left = FaceCondition::Inlet { from: 0.0, to: 1.0 };
            CaseBundle {
                case: CaseSpec {
                    name: name.into(),
                    kind: CaseKind::Column1D,
                    length: 1.0,
                    width: 1.0,
                    horizon: 10.0,
                    transport: TransportParams {
                        velocity: Some([0.5, 0.0]),
                        c0: 1.0,
                        ..TransportParams::default()
                    },
                    permeability: None,
                    concentration_bc: bc,
                    pressure_bc: None,
                    initial_concentration: 0.0,
                    anchors: Vec::new(),
                    grid: 101,
                    snapshots: Vec::new(),
                },
                // A first-layer frequency of 30 resolves far more than this
                // smooth front needs and trains an order of magnitude slower.
                network: NetworkConfig::new(2, vec![32, 32, 16, 16], 1).with_frequency(10.0),
                training: training(5000, 5000, 0, 1.0, 10_000),
            }
        }
        "case2-dispersion" => uniform_2d(name, 0.0, 0.3, 0.7, 1.0),
        "case2-advection" => uniform_2d(name, 0.5, 0.3, 0.7, 1.0),
        "case2-line" => uniform_2d(name, 0.5, 0.0, 1.0, 0.75),
        "case3" => {
            let corners = [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0)]
                .map(|(x, y)| Anchor { x, y, pressure: 0.55 })
                .to_vec();
            CaseBundle {
                case: darcy_2d(name, PermeabilityField::Homogeneous { k: 1.0 }, 1.0, corners),
                network: NetworkConfig::new(3, vec![32, 16, 16, 8, 8], 2).with_frequency(3.0),
                training: training(12000, 12000, 4, 1.0, 2000),
            }
        }
        "case4" => CaseBundle {
            case: darcy_2d(name, lobed_permeability(), 0.001, Vec::new()),
            network: NetworkConfig::new(3, vec![32, 32, 16, 16, 16], 2).with_frequency(3.0),
            training: training(15000, 15000, 0, 0.7, 1000),
        },
        other => {
            return Err(Error::Config(format!(
                "unknown preset {other:?}; expected one of {}",
                PRESETS.join(", ")
            )))
        }
    };
    bundle.validate()?;
    Ok(bundle)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_presets_validate() {
        for name in PRESETS {
            preset(name).unwrap();
        }
        assert!(preset("case9").is_err());
    }

    #[test]
    fn case1_parameters() {
        let b = preset("case1").unwrap();
        let c = &b.case;
        assert_eq!((c.length, c.horizon, c.transport.c0), (1.0, 10.0, 1.0));
        assert_eq!(c.transport.velocity, Some([0.5, 0.0]));
        assert_eq!(c.transport.diffusion_x, 0.02);
        assert_eq!(b.network.hidden_widths, vec![32, 32, 16, 16]);
        assert_eq!(b.training.budget, Budget { interior: 5000, boundary_initial: 5000, data: 0 });
    }

    #[test]
    fn case4_parameters() {
        let b = preset("case4").unwrap();
        assert_eq!(b.case.transport.mu_phi, 0.001);
        assert_eq!(b.case.transport.alpha, 0.0);
        assert_eq!(b.training.weights.pde, 0.7);
        assert_eq!(b.network.hidden_widths, vec![32, 32, 16, 16, 16]);
        assert_eq!(b.training.budget.interior, 15000);
        assert_eq!(b.training.budget.boundary_initial, 15000);
    }

    #[test]
    fn inverted_injection_rejected() {
        let mut b = preset("case2-advection").unwrap();
        b.case.concentration_bc.left = FaceCondition::Inlet { from: 0.7, to: 0.3 };
        assert!(matches!(b.validate(), Err(Error::Config(_))));
    }

    #[test]
    fn pressure_normalization_spans_boundary_values() {
        let n = preset("case3").unwrap().case.normalization();
        assert_eq!((n.p_min, n.p_max), (0.1, 1.0));
        assert!((n.from_pressure(0.55) - 0.5).abs() < 1e-15);
    }
}
