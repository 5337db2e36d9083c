use std::fmt;
use std::str::FromStr;

use crate::{Error, Result};

/// Largest supported input dimension, `(x, y, t)`.
pub const MAX_INPUTS: usize = 3;
/// Largest supported output dimension, `(P, C)`.
pub const MAX_OUTPUTS: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Activation {
    #[default]
    Sine,
    Tanh,
}

impl Activation {
    /// Returns `sigma(z)` and its first three derivatives.
    #[inline]
    pub fn eval(self, z: f64) -> [f64; 4] {
        match self {
            Activation::Sine => {
                let (s, c) = z.sin_cos();
                [s, c, -s, -c]
            }
            Activation::Tanh => {
                let t = z.tanh();
                let d = 1.0 - t * t;
                [t, d, -2.0 * t * d, -2.0 * d * (1.0 - 3.0 * t * t)]
            }
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Activation::Sine => "sine",
            Activation::Tanh => "tanh",
        }
    }
}

impl fmt::Display for Activation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Activation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "sine" | "sin" => Ok(Activation::Sine),
            "tanh" => Ok(Activation::Tanh),
            other => Err(Error::Config(format!("unknown activation `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetworkConfig {
    pub input_dim: usize,
    pub hidden_widths: Vec<usize>,
    pub output_dim: usize,
    pub activation: Activation,
    /// Frequency applied to the first layer at initialisation.
    pub first_layer_frequency: f64,
}

impl NetworkConfig {
    pub fn new(input_dim: usize, hidden_widths: Vec<usize>, output_dim: usize) -> Self {
        Self {
            input_dim,
            hidden_widths,
            output_dim,
            activation: Activation::Sine,
            first_layer_frequency: 30.0,
        }
    }

    pub fn with_activation(mut self, activation: Activation) -> Self {
        self.activation = activation;
        self
    }

    pub fn with_frequency(mut self, omega0: f64) -> Self {
        self.first_layer_frequency = omega0;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.hidden_widths.is_empty() {
            return Err(Error::Config("network needs at least one hidden layer".into()));
        }
        if self.input_dim == 0 || self.output_dim == 0 || self.hidden_widths.contains(&0) {
            return Err(Error::Config("layer widths must be at least 1".into()));
        }
        if self.input_dim > MAX_INPUTS {
            return Err(Error::Config(format!(
                "input dimension {} exceeds {MAX_INPUTS}",
                self.input_dim
            )));
        }
        if self.output_dim > MAX_OUTPUTS {
            return Err(Error::Config(format!(
                "output dimension {} exceeds {MAX_OUTPUTS}",
                self.output_dim
            )));
        }
        if !(self.first_layer_frequency > 0.0 && self.first_layer_frequency.is_finite()) {
            return Err(Error::Config("first-layer frequency must be positive".into()));
        }
        Ok(())
    }

    /// Widths of every layer including input and output.
    pub fn widths(&self) -> Vec<usize> {
        let mut w = Vec::with_capacity(self.hidden_widths.len() + 2);
        w.push(self.input_dim);
        w.extend_from_slice(&self.hidden_widths);
        w.push(self.output_dim);
        w
    }

    pub fn parameter_count(&self) -> usize {
        self.widths().windows(2).map(|w| w[0] * w[1] + w[1]).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parameter_count_of_four_layer_net() {
        let cfg = NetworkConfig::new(2, vec![32, 32, 16, 16], 1);
        assert_eq!(cfg.parameter_count(), 1969);
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(NetworkConfig::new(2, vec![], 1).validate().is_err());
        assert!(NetworkConfig::new(2, vec![8, 0], 1).validate().is_err());
        assert!(NetworkConfig::new(4, vec![8], 1).validate().is_err());
        assert!(NetworkConfig::new(2, vec![8], 1)
            .with_frequency(0.0)
            .validate()
            .is_err());
    }

    #[test]
    fn tanh_derivatives_match_differences() {
        let h = 1e-5;
        for &z in &[-1.3, 0.0, 0.4, 2.1] {
            let d = Activation::Tanh.eval(z);
            for k in 0..3 {
                let fd = (Activation::Tanh.eval(z + h)[k] - Activation::Tanh.eval(z - h)[k])
                    / (2.0 * h);
                assert!((fd - d[k + 1]).abs() < 1e-8, "order {k} at {z}");
            }
        }
    }
}
