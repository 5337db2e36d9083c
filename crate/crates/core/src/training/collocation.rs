use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::harness::{CaseKind, CaseSpec};
use crate::oracles::Face;
use crate::physics::{AXIS_X, AXIS_Y};

/// Point counts for one run. Boundary and initial points share one budget,
/// split in proportion to the measure of each region.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub interior: usize,
    pub boundary_initial: usize,
    pub data: usize,
}

/// A boundary target for the concentration, in normalised units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Constraint {
    Value(f64),
    /// Derivative along jet axis `axis` equals `value`.
    Normal { axis: usize, value: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryPoint {
    pub face: Face,
    pub concentration: Constraint,
    /// Normalised pressure target on pressure-carrying cases.
    pub pressure: Option<f64>,
}

/// Fixed training points in normalised coordinates, `input_dim` values per
/// point with time last.
#[derive(Debug, Clone, PartialEq)]
pub struct CollocationSet {
    pub input_dim: usize,
    pub interior: Vec<f64>,
    pub boundary: Vec<f64>,
    pub boundary_targets: Vec<BoundaryPoint>,
    pub initial: Vec<f64>,
    /// Normalised concentration at each initial point.
    pub initial_values: Vec<f64>,
    pub anchors: Vec<f64>,
    /// Normalised pressure at each anchor.
    pub anchor_values: Vec<f64>,
    pub seed: u64,
}

impl CollocationSet {
    pub fn n_interior(&self) -> usize {
        self.interior.len() / self.input_dim
    }

    pub fn n_boundary(&self) -> usize {
        self.boundary_targets.len()
    }

    pub fn n_initial(&self) -> usize {
        self.initial_values.len()
    }

    pub fn n_anchors(&self) -> usize {
        self.anchor_values.len()
    }
}

/// Splits `total` between boundary and initial points in proportion to
/// their normalised measures: (number of faces × time) against the unit
/// initial slab.
pub fn split_boundary_initial(case: &CaseSpec, total: usize) -> (usize, usize) {
    let boundary = case.faces().len() as f64;
    let n_b = (total as f64 * boundary / (boundary + 1.0)).round() as usize;
    (n_b, total - n_b)
}

/// Largest-remainder split of `total` into equal shares over `parts`.
fn equal_shares(total: usize, parts: usize) -> Vec<usize> {
    (0..parts).map(|i| total / parts + usize::from(i < total % parts)).collect()
}

pub fn sample_points(case: &CaseSpec, budget: Budget, seed: u64) -> CollocationSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dims = case.kind.spatial_dims();
    let input_dim = dims + 1;
    let norm = case.normalization();

    let mut interior = Vec::with_capacity(budget.interior * input_dim);
    for _ in 0..budget.interior * input_dim {
        interior.push(rng.gen::<f64>());
    }

    let (n_b, n_i) = split_boundary_initial(case, budget.boundary_initial);
    let faces = case.faces();
    let mut boundary = Vec::with_capacity(n_b * input_dim);
    let mut boundary_targets = Vec::with_capacity(n_b);
    for (&face, count) in faces.iter().zip(equal_shares(n_b, faces.len())) {
        for _ in 0..count {
            let s_hat = if dims == 2 { rng.gen::<f64>() } else { 0.0 };
            let t_hat = rng.gen::<f64>();
            let (x_hat, y_hat) = match face {
                Face::Left => (0.0, s_hat),
                Face::Right => (1.0, s_hat),
                Face::Bottom => (s_hat, 0.0),
                Face::Top => (s_hat, 1.0),
            };
            boundary.push(x_hat);
            if dims == 2 {
                boundary.push(y_hat);
            }
            boundary.push(t_hat);
            let s = s_hat * case.face_extent(face);
            let axis = match face {
                Face::Left | Face::Right => AXIS_X,
                Face::Bottom | Face::Top => AXIS_Y,
            };
            let concentration = match case.inlet_value(face, s) {
                Some(c) => Constraint::Value(norm.from_concentration(c)),
                None => Constraint::Normal { axis, value: 0.0 },
            };
            let pressure = case
                .pressure_bc
                .as_ref()
                .filter(|_| case.kind == CaseKind::Darcy2D)
                .map(|bc| norm.from_pressure(bc.get(face)));
            boundary_targets.push(BoundaryPoint { face, concentration, pressure });
        }
    }

    let mut initial = Vec::with_capacity(n_i * input_dim);
    for _ in 0..n_i {
        for _ in 0..dims {
            initial.push(rng.gen::<f64>());
        }
        initial.push(0.0);
    }
    let initial_values = vec![norm.from_concentration(case.initial_concentration); n_i];

    let mut anchors = Vec::new();
    let mut anchor_values = Vec::new();
    if !case.anchors.is_empty() && case.kind == CaseKind::Darcy2D {
        for k in 0..budget.data {
            let a = case.anchors[k % case.anchors.len()];
            anchors.extend([a.x / norm.length_x, a.y / norm.length_y, rng.gen::<f64>()]);
            anchor_values.push(norm.from_pressure(a.pressure));
        }
    }

    CollocationSet {
        input_dim,
        interior,
        boundary,
        boundary_targets,
        initial,
        initial_values,
        anchors,
        anchor_values,
        seed,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::preset;

    #[test]
    fn case1_counts() {
        let b = preset("case1").unwrap();
        let s = sample_points(&b.case, b.training.budget, 0);
        assert_eq!(s.n_interior(), 5000);
        assert_eq!(s.n_boundary() + s.n_initial(), 5000);
        assert_eq!((s.n_boundary(), s.n_initial()), (3333, 1667));
        assert_eq!(s.n_anchors(), 0);
    }

    #[test]
    fn deterministic_per_seed() {
        let b = preset("case3").unwrap();
        let budget = Budget { interior: 300, boundary_initial: 200, data: 4 };
        assert_eq!(sample_points(&b.case, budget, 9), sample_points(&b.case, budget, 9));
        assert_ne!(sample_points(&b.case, budget, 9), sample_points(&b.case, budget, 10));
    }

    #[test]
    fn case3_anchors_are_corners() {
        let b = preset("case3").unwrap();
        let s = sample_points(&b.case, b.training.budget, 1);
        assert_eq!(s.n_anchors(), 4);
        for k in 0..4 {
            let (x, y) = (s.anchors[3 * k], s.anchors[3 * k + 1]);
            assert!((x == 0.0 || x == 1.0) && (y == 0.0 || y == 1.0));
            assert!((s.anchor_values[k] - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn points_respect_their_regions() {
        for name in ["case1", "case2-advection", "case3"] {
            let b = preset(name).unwrap();
            let s = sample_points(&b.case, Budget { interior: 500, boundary_initial: 500, data: 4 }, 3);
            let d = s.input_dim;
            assert!(s.interior.iter().all(|v| (0.0..=1.0).contains(v)));
            for (k, bp) in s.boundary_targets.iter().enumerate() {
                let p = &s.boundary[k * d..(k + 1) * d];
                let on = match bp.face {
                    Face::Left => p[0] == 0.0,
                    Face::Right => p[0] == 1.0,
                    Face::Bottom => p[1] == 0.0,
                    Face::Top => p[1] == 1.0,
                };
                assert!(on, "{name}: {p:?} not on {:?}", bp.face);
                assert!(p.iter().all(|v| (0.0..=1.0).contains(v)));
            }
            for k in 0..s.n_initial() {
                assert_eq!(s.initial[k * d + d - 1], 0.0);
            }
        }
    }

    #[test]
    fn inlet_targets_follow_the_strip() {
        let b = preset("case2-advection").unwrap();
        let s = sample_points(&b.case, Budget { interior: 0, boundary_initial: 2000, data: 0 }, 5);
        for (k, bp) in s.boundary_targets.iter().enumerate() {
            let y = s.boundary[3 * k + 1];
            match (bp.face, bp.concentration) {
                (Face::Left, Constraint::Value(v)) => {
                    assert_eq!(v, if (0.3..=0.7).contains(&y) { 1.0 } else { 0.0 })
                }
                (Face::Left, _) => panic!("left face must be Dirichlet"),
                (_, Constraint::Normal { value, .. }) => assert_eq!(value, 0.0),
                _ => panic!("outflow faces must be zero-gradient"),
            }
            assert!(bp.pressure.is_none());
        }
    }
}
