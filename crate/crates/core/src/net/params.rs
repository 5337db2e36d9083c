use ndarray::{Array1, Array2};
use rand::distributions::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::config::{Activation, NetworkConfig};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    /// `out × in`, row-major.
    pub weights: Array2<f64>,
    pub bias: Array1<f64>,
}

impl Layer {
    pub fn zeros(n_in: usize, n_out: usize) -> Self {
        Self {
            weights: Array2::zeros((n_out, n_in)),
            bias: Array1::zeros(n_out),
        }
    }

    pub fn n_in(&self) -> usize {
        self.weights.ncols()
    }

    pub fn n_out(&self) -> usize {
        self.weights.nrows()
    }

    fn len(&self) -> usize {
        self.weights.len() + self.bias.len()
    }
}

/// All weights and biases of a network.
///
/// The flat layout is layer by layer: the weight matrix in row-major order
/// followed by the bias vector.
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterSet {
    config: NetworkConfig,
    layers: Vec<Layer>,
}

impl ParameterSet {
    pub fn zeros(config: &NetworkConfig) -> Result<Self> {
        config.validate()?;
        let layers = config
            .widths()
            .windows(2)
            .map(|w| Layer::zeros(w[0], w[1]))
            .collect();
        Ok(Self {
            config: config.clone(),
            layers,
        })
    }

    pub fn from_layers(config: &NetworkConfig, layers: Vec<Layer>) -> Result<Self> {
        let mut out = Self::zeros(config)?;
        if layers.len() != out.layers.len() {
            return Err(Error::Dimension {
                expected: out.layers.len(),
                actual: layers.len(),
            });
        }
        for (slot, layer) in out.layers.iter_mut().zip(layers) {
            if slot.weights.dim() != layer.weights.dim() || slot.bias.len() != layer.bias.len() {
                return Err(Error::Shape(format!(
                    "layer shape {:?} does not match {:?}",
                    layer.weights.dim(),
                    slot.weights.dim()
                )));
            }
            *slot = layer;
        }
        Ok(out)
    }

    pub fn from_flat(config: &NetworkConfig, flat: &[f64]) -> Result<Self> {
        let mut out = Self::zeros(config)?;
        out.set_flat(flat)?;
        Ok(out)
    }

    pub fn config(&self) -> &NetworkConfig {
        &self.config
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn layers_mut(&mut self) -> &mut [Layer] {
        &mut self.layers
    }

    pub fn len(&self) -> usize {
        self.layers.iter().map(Layer::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Offset of each layer's weight block in the flat vector.
    pub(crate) fn offsets(&self) -> Vec<usize> {
        let mut offsets = Vec::with_capacity(self.layers.len());
        let mut acc = 0;
        for layer in &self.layers {
            offsets.push(acc);
            acc += layer.len();
        }
        offsets
    }

    pub fn flatten(&self) -> Vec<f64> {
        let mut flat = Vec::with_capacity(self.len());
        for layer in &self.layers {
            flat.extend(layer.weights.iter());
            flat.extend(layer.bias.iter());
        }
        flat
    }

    pub fn set_flat(&mut self, flat: &[f64]) -> Result<()> {
        if flat.len() != self.len() {
            return Err(Error::Dimension {
                expected: self.len(),
                actual: flat.len(),
            });
        }
        let mut it = flat.iter().copied();
        for layer in &mut self.layers {
            for w in layer.weights.iter_mut() {
                *w = it.next().unwrap();
            }
            for b in layer.bias.iter_mut() {
                *b = it.next().unwrap();
            }
        }
        Ok(())
    }
}

/// Draws initial parameters.
///
/// Sine networks use the periodic-network scheme: first-layer weights are
/// uniform in `±1/d_in` scaled by the first-layer frequency, deeper layers are
/// uniform in `±sqrt(6/n_in)`. Tanh networks use Xavier-uniform. Biases start
/// at zero.
pub fn init_network(config: &NetworkConfig, seed: u64) -> Result<ParameterSet> {
    let mut params = ParameterSet::zeros(config)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for (l, layer) in params.layers.iter_mut().enumerate() {
        let (n_out, n_in) = layer.weights.dim();
        let limit = match config.activation {
            Activation::Sine if l == 0 => config.first_layer_frequency / n_in as f64,
            Activation::Sine => (6.0 / n_in as f64).sqrt(),
            Activation::Tanh => (6.0 / (n_in + n_out) as f64).sqrt(),
        };
        let dist = Uniform::new_inclusive(-limit, limit);
        layer.weights.iter_mut().for_each(|w| *w = dist.sample(&mut rng));
    }
    Ok(params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn case1_net() -> NetworkConfig {
        NetworkConfig::new(2, vec![32, 32, 16, 16], 1)
    }

    #[test]
    fn parameter_total_matches_layer_sum() {
        let p = init_network(&case1_net(), 7).unwrap();
        assert_eq!(p.len(), 2 * 32 + 32 + 32 * 32 + 32 + 32 * 16 + 16 + 16 * 16 + 16 + 16 + 1);
        assert_eq!(p.len(), 1969);
        assert_eq!(p.flatten().len(), 1969);
    }

    #[test]
    fn initialisation_is_deterministic() {
        let a = init_network(&case1_net(), 42).unwrap();
        let b = init_network(&case1_net(), 42).unwrap();
        let c = init_network(&case1_net(), 43).unwrap();
        assert_eq!(a.flatten(), b.flatten());
        assert_ne!(a.flatten(), c.flatten());
    }

    #[test]
    fn empty_hidden_layers_rejected() {
        let cfg = NetworkConfig::new(2, vec![], 1);
        assert!(matches!(init_network(&cfg, 0), Err(Error::Config(_))));
    }

    #[test]
    fn sine_init_ranges() {
        let p = init_network(&case1_net(), 1).unwrap();
        let first = &p.layers()[0];
        assert!(first.weights.iter().all(|w| w.abs() <= 30.0 / 2.0));
        let lim = (6.0f64 / 32.0).sqrt();
        assert!(p.layers()[1].weights.iter().all(|w| w.abs() <= lim));
        assert!(p.layers().iter().all(|l| l.bias.iter().all(|&b| b == 0.0)));
    }

    #[test]
    fn wrong_flat_length_is_rejected() {
        let mut p = init_network(&case1_net(), 1).unwrap();
        assert!(p.set_flat(&[0.0; 3]).is_err());
    }

    proptest! {
        #[test]
        fn flatten_roundtrip(values in proptest::collection::vec(-1e3f64..1e3, 1969)) {
            let p = ParameterSet::from_flat(&case1_net(), &values).unwrap();
            prop_assert_eq!(p.flatten(), values);
        }
    }
}
