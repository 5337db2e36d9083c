use std::fmt::Write as _;
use std::path::Path;

use crate::{Error, Result};

/// Scalar field on a uniform node grid, stored row-major with y outer.
///
/// The grid includes both end nodes on each axis. For space–time fields of
/// 1D problems the second axis is time.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    pub nx: usize,
    pub ny: usize,
    /// `[x0, y0, x1, y1]`.
    pub extent: [f64; 4],
    pub time: f64,
    pub values: Vec<f64>,
}

const CSV_HEADER: &str = "nx,ny,x0,y0,x1,y1,time";

impl GridField {
    pub fn new(nx: usize, ny: usize, extent: [f64; 4], time: f64, values: Vec<f64>) -> Result<Self> {
        if nx == 0 || ny == 0 {
            return Err(Error::Shape("grid needs at least one node per axis".into()));
        }
        if values.len() != nx * ny {
            return Err(Error::Shape(format!(
                "{} values for a {nx}x{ny} grid",
                values.len()
            )));
        }
        let [x0, y0, x1, y1] = extent;
        if !(x1 > x0) || !(y1 > y0 || ny == 1) {
            return Err(Error::Shape(format!("degenerate extent {extent:?}")));
        }
        Ok(Self { nx, ny, extent, time, values })
    }

    /// Samples `f(x, y)` at every node.
    pub fn from_fn(
        nx: usize,
        ny: usize,
        extent: [f64; 4],
        time: f64,
        mut f: impl FnMut(f64, f64) -> f64,
    ) -> Result<Self> {
        let mut field = Self::new(nx, ny, extent, time, vec![0.0; nx * ny])?;
        for j in 0..ny {
            for i in 0..nx {
                let (x, y) = field.node(i, j);
                field.values[j * nx + i] = f(x, y);
            }
        }
        Ok(field)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn spacing(&self) -> (f64, f64) {
        let [x0, y0, x1, y1] = self.extent;
        let step = |a: f64, b: f64, n: usize| if n > 1 { (b - a) / (n - 1) as f64 } else { 0.0 };
        (step(x0, x1, self.nx), step(y0, y1, self.ny))
    }

    pub fn node(&self, i: usize, j: usize) -> (f64, f64) {
        let (hx, hy) = self.spacing();
        // The last node lands exactly on the far edge.
        let x = if i + 1 == self.nx { self.extent[2] } else { self.extent[0] + i as f64 * hx };
        let y = if j + 1 == self.ny && self.ny > 1 {
            self.extent[3]
        } else {
            self.extent[1] + j as f64 * hy
        };
        (x, y)
    }

    /// Node coordinates in storage order, flattened as `[x, y, x, y, ...]`.
    pub fn coordinates(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(2 * self.len());
        for j in 0..self.ny {
            for i in 0..self.nx {
                let (x, y) = self.node(i, j);
                out.push(x);
                out.push(y);
            }
        }
        out
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.nx + i]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    fn same_shape(&self, other: &Self) -> Result<()> {
        if self.nx != other.nx || self.ny != other.ny {
            return Err(Error::Shape(format!(
                "grid {}x{} vs {}x{}",
                self.nx, self.ny, other.nx, other.ny
            )));
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let [x0, y0, x1, y1] = self.extent;
        let mut s = String::with_capacity(24 * (self.len() + 2));
        s.push_str(CSV_HEADER);
        s.push('\n');
        let _ = writeln!(s, "{},{},{x0:?},{y0:?},{x1:?},{y1:?},{:?}", self.nx, self.ny, self.time);
        for v in &self.values {
            let _ = writeln!(s, "{v:?}");
        }
        s
    }

    pub fn from_csv(text: &str, path: &Path) -> Result<Self> {
        let bad = |line: usize, message: String| Error::Parse {
            path: path.display().to_string(),
            line,
            message,
        };
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, h)) if h.trim() == CSV_HEADER => {}
            _ => return Err(bad(1, format!("expected header `{CSV_HEADER}`"))),
        }
        let (_, meta) = lines.next().ok_or_else(|| bad(2, "missing grid description".into()))?;
        let fields: Vec<&str> = meta.split(',').map(str::trim).collect();
        if fields.len() != 7 {
            return Err(bad(2, format!("expected 7 fields, found {}", fields.len())));
        }
        let count = |s: &str| s.parse::<usize>().map_err(|e| bad(2, format!("{s:?}: {e}")));
        let real = |s: &str| s.parse::<f64>().map_err(|e| bad(2, format!("{s:?}: {e}")));
        let (nx, ny) = (count(fields[0])?, count(fields[1])?);
        let extent = [real(fields[2])?, real(fields[3])?, real(fields[4])?, real(fields[5])?];
        let time = real(fields[6])?;
        let mut values = Vec::with_capacity(nx * ny);
        for (n, line) in lines {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            values.push(line.parse::<f64>().map_err(|e| bad(n + 1, format!("{line:?}: {e}")))?);
        }
        Self::new(nx, ny, extent, time, values)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv()).map_err(|e| Error::io(path, e))
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_csv(&text, path)
    }
}

/// Mean of squared differences over all nodes.
pub fn mse(a: &GridField, b: &GridField) -> Result<f64> {
    a.same_shape(b)?;
    let sum: f64 = a.values.iter().zip(&b.values).map(|(p, q)| (p - q) * (p - q)).sum();
    Ok(sum / a.len() as f64)
}

/// `|a - b|` at every node, on `a`'s grid.
pub fn pointwise_error(a: &GridField, b: &GridField) -> Result<GridField> {
    a.same_shape(b)?;
    let values = a.values.iter().zip(&b.values).map(|(p, q)| (p - q).abs()).collect();
    Ok(GridField { values, ..a.clone() })
}
