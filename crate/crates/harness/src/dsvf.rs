//! Binary velocity grid dump.
//!
//! Layout, little endian: magic `DSVF`, `u32` version, `u32` grid side `n`,
//! `u32` band, then `n²` samples of `u₁` followed by `n²` samples of `u₂`
//! as `f64`, row-major in x.

use crate::error::HarnessError;

pub const MAGIC: &[u8; 4] = b"DSVF";
pub const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct VelocityDump {
    pub n: usize,
    pub band: usize,
    pub u1: Vec<f64>,
    pub u2: Vec<f64>,
}

impl VelocityDump {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(16 + 16 * self.u1.len());
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        out.extend_from_slice(&(self.n as u32).to_le_bytes());
        out.extend_from_slice(&(self.band as u32).to_le_bytes());
        for v in self.u1.iter().chain(&self.u2) {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, HarnessError> {
        let bad = |why: &str| HarnessError::Io(format!("malformed velocity dump: {why}"));
        if bytes.len() < 16 || &bytes[..4] != MAGIC {
            return Err(bad("missing header"));
        }
        let word = |i: usize| u32::from_le_bytes(bytes[i..i + 4].try_into().unwrap());
        if word(4) != VERSION {
            return Err(bad("unsupported version"));
        }
        let (n, band) = (word(8) as usize, word(12) as usize);
        let count = n * n;
        if bytes.len() != 16 + 16 * count {
            return Err(bad("length does not match grid size"));
        }
        let floats: Vec<f64> = bytes[16..]
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        let (u1, u2) = floats.split_at(count);
        Ok(Self {
            n,
            band,
            u1: u1.to_vec(),
            u2: u2.to_vec(),
        })
    }
}
