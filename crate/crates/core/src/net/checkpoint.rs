//! Binary parameter checkpoints.
//!
//! Layout (little endian): magic `SPNNCKPT`, `u32` format version, `u32`
//! input dim, `u32` output dim, `u32` hidden layer count, one `u32` per hidden
//! width, `u8` activation (0 sine, 1 tanh), `f64` first-layer frequency,
//! `u64` seed, `u64` parameter count, then the flattened parameters as `f64`.

use std::fs;
use std::path::Path;

use super::config::{Activation, NetworkConfig};
use super::params::ParameterSet;
use crate::{Error, Result};

const MAGIC: &[u8; 8] = b"SPNNCKPT";
pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub params: ParameterSet,
    pub seed: u64,
}

impl Checkpoint {
    pub fn to_bytes(&self) -> Vec<u8> {
        let cfg = self.params.config();
        let mut buf = Vec::with_capacity(64 + 8 * self.params.len());
        buf.extend_from_slice(MAGIC);
        buf.extend_from_slice(&CHECKPOINT_VERSION.to_le_bytes());
        buf.extend_from_slice(&(cfg.input_dim as u32).to_le_bytes());
        buf.extend_from_slice(&(cfg.output_dim as u32).to_le_bytes());
        buf.extend_from_slice(&(cfg.hidden_widths.len() as u32).to_le_bytes());
        for &w in &cfg.hidden_widths {
            buf.extend_from_slice(&(w as u32).to_le_bytes());
        }
        buf.push(match cfg.activation {
            Activation::Sine => 0,
            Activation::Tanh => 1,
        });
        buf.extend_from_slice(&cfg.first_layer_frequency.to_le_bytes());
        buf.extend_from_slice(&self.seed.to_le_bytes());
        let flat = self.params.flatten();
        buf.extend_from_slice(&(flat.len() as u64).to_le_bytes());
        for v in flat {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        buf
    }

    pub fn from_bytes(bytes: &[u8]) -> std::result::Result<Self, String> {
        let mut r = Reader { bytes, pos: 0 };
        if r.take(8)? != MAGIC {
            return Err("bad magic".into());
        }
        let version = r.u32()?;
        if version != CHECKPOINT_VERSION {
            return Err(format!("unsupported version {version}"));
        }
        let input_dim = r.u32()? as usize;
        let output_dim = r.u32()? as usize;
        let n_hidden = r.u32()? as usize;
        let hidden = (0..n_hidden)
            .map(|_| r.u32().map(|w| w as usize))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        let activation = match r.take(1)?[0] {
            0 => Activation::Sine,
            1 => Activation::Tanh,
            other => return Err(format!("unknown activation tag {other}")),
        };
        let omega0 = f64::from_le_bytes(r.take(8)?.try_into().unwrap());
        let seed = r.u64()?;
        let n = r.u64()? as usize;
        let config = NetworkConfig::new(input_dim, hidden, output_dim)
            .with_activation(activation)
            .with_frequency(omega0);
        let flat = (0..n)
            .map(|_| r.take(8).map(|b| f64::from_le_bytes(b.try_into().unwrap())))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        if r.pos != bytes.len() {
            return Err("trailing bytes".into());
        }
        let params = ParameterSet::from_flat(&config, &flat).map_err(|e| e.to_string())?;
        Ok(Self { params, seed })
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> std::result::Result<&'a [u8], String> {
        let end = self.pos + n;
        if end > self.bytes.len() {
            return Err("unexpected end of data".into());
        }
        let out = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    fn u32(&mut self) -> std::result::Result<u32, String> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> std::result::Result<u64, String> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

pub fn write_checkpoint(path: &Path, checkpoint: &Checkpoint) -> Result<()> {
    fs::write(path, checkpoint.to_bytes()).map_err(|e| Error::io(path, e))
}

pub fn read_checkpoint(path: &Path) -> Result<Checkpoint> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    Checkpoint::from_bytes(&bytes).map_err(|m| Error::format(path, m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::init_network;

    #[test]
    fn binary_roundtrip_is_bit_exact() {
        let cfg = NetworkConfig::new(3, vec![8, 4], 2).with_activation(Activation::Tanh);
        let ck = Checkpoint {
            params: init_network(&cfg, 99).unwrap(),
            seed: 99,
        };
        let back = Checkpoint::from_bytes(&ck.to_bytes()).unwrap();
        assert_eq!(back, ck);
        let a: Vec<u64> = ck.params.flatten().iter().map(|v| v.to_bits()).collect();
        let b: Vec<u64> = back.params.flatten().iter().map(|v| v.to_bits()).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn truncated_checkpoint_is_rejected() {
        let cfg = NetworkConfig::new(2, vec![4], 1);
        let ck = Checkpoint {
            params: init_network(&cfg, 1).unwrap(),
            seed: 1,
        };
        let bytes = ck.to_bytes();
        assert!(Checkpoint::from_bytes(&bytes[..bytes.len() - 3]).is_err());
        assert!(Checkpoint::from_bytes(b"garbage!").is_err());
    }
}
