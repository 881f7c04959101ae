//! HyperLogLog cardinality sketches and the sketched component-matrix
//! variants.
//!
//! A sketch keeps `s = 2^p` one-byte registers. An element is hashed to 64
//! bits; the top `p` bits pick a register and the rank (leading zeros of the
//! remaining `64 - p` bits, plus one) is max-updated into it. Union is the
//! register-wise maximum, which makes merging exact and lossless.
//!
//! The element hash is keyed by a salt and is unrelated to the hash family
//! used for network compression.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::SizeDistribution;
use crate::network::{Event, TemporalNetwork};

pub const MIN_REGISTERS: usize = 16;
pub const MAX_REGISTERS: usize = 1 << 24;
pub const DEFAULT_REGISTERS: usize = 1 << 14;
pub const DEFAULT_SALT: u64 = 0x5eed_0fc0_ffee;

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Salted 64-bit avalanche hash of an element.
#[inline]
pub fn element_hash(element: u64, salt: u64) -> u64 {
    splitmix64(element ^ splitmix64(salt))
}

fn precision_for(s: usize) -> Result<u8> {
    if !s.is_power_of_two() || !(MIN_REGISTERS..=MAX_REGISTERS).contains(&s) {
        return Err(Error::InvalidParameter(format!(
            "register count must be a power of two in [{MIN_REGISTERS}, {MAX_REGISTERS}], got {s}"
        )));
    }
    Ok(s.trailing_zeros() as u8)
}

#[inline]
fn register_update(p: u8, element: u64, salt: u64) -> (usize, u8) {
    let h = element_hash(element, salt);
    let idx = (h >> (64 - p)) as usize;
    let rest = h << p;
    let rank = rest.leading_zeros().min(64 - p as u32) + 1;
    (idx, rank as u8)
}

fn alpha(s: usize) -> f64 {
    match s {
        16 => 0.673,
        32 => 0.697,
        64 => 0.709,
        _ => 0.7213 / (1.0 + 1.079 / s as f64),
    }
}

/// Raw HLL estimate, replaced by linear counting while the raw value is at
/// most `2.5 s`. Linear counting is capped at `2.5 s` (and taken as that cap
/// once no register is empty), which keeps the estimate non-decreasing as
/// registers grow.
pub(crate) fn estimate_registers(registers: &[u8]) -> f64 {
    let s = registers.len() as f64;
    let mut sum = 0.0;
    let mut zeros = 0usize;
    for &r in registers {
        // 2^-r built directly from the exponent bits; r <= 64.
        sum += f64::from_bits((1023 - r as u64) << 52);
        zeros += (r == 0) as usize;
    }
    let raw = alpha(registers.len()) * s * s / sum;
    let switch = 2.5 * s;
    if raw > switch {
        return raw;
    }
    if zeros == 0 {
        return switch;
    }
    (s * (s / zeros as f64).ln()).min(switch)
}

#[inline]
fn max_pair(a: &mut [u8], b: &mut [u8]) {
    for (x, y) in a.iter_mut().zip(b.iter_mut()) {
        let m = (*x).max(*y);
        *x = m;
        *y = m;
    }
}

#[inline]
pub(crate) fn max_into(dst: &mut [u8], src: &[u8]) {
    for (x, y) in dst.iter_mut().zip(src) {
        *x = (*x).max(*y);
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CardinalitySketch {
    p: u8,
    salt: u64,
    registers: Vec<u8>,
}

impl CardinalitySketch {
    pub fn new(s: usize, salt: u64) -> Result<Self> {
        let p = precision_for(s)?;
        Ok(CardinalitySketch {
            p,
            salt,
            registers: vec![0; s],
        })
    }

    pub fn registers(&self) -> &[u8] {
        &self.registers
    }

    pub fn register_count(&self) -> usize {
        self.registers.len()
    }

    pub fn salt(&self) -> u64 {
        self.salt
    }

    pub fn add(&mut self, element: u64) {
        let (idx, rank) = register_update(self.p, element, self.salt);
        if self.registers[idx] < rank {
            self.registers[idx] = rank;
        }
    }

    fn compatible(&self, other: &Self) -> Result<()> {
        if self.registers.len() != other.registers.len() {
            return Err(Error::SketchMismatch(format!(
                "register counts differ: {} vs {}",
                self.registers.len(),
                other.registers.len()
            )));
        }
        if self.salt != other.salt {
            return Err(Error::SketchMismatch(format!("salts differ: {:#x} vs {:#x}", self.salt, other.salt)));
        }
        Ok(())
    }

    /// In-place union.
    pub fn merge(&mut self, other: &Self) -> Result<()> {
        self.compatible(other)?;
        max_into(&mut self.registers, &other.registers);
        Ok(())
    }

    pub fn merged(a: &Self, b: &Self) -> Result<Self> {
        let mut out = a.clone();
        out.merge(b)?;
        Ok(out)
    }

    pub fn estimate(&self) -> f64 {
        estimate_registers(&self.registers)
    }

    /// `s` (u32 LE), `salt` (u64 LE), then one byte per register.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(12 + self.registers.len());
        out.extend_from_slice(&(self.registers.len() as u32).to_le_bytes());
        out.extend_from_slice(&self.salt.to_le_bytes());
        out.extend_from_slice(&self.registers);
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < 12 {
            return Err(Error::Format("sketch header truncated".into()));
        }
        let s = u32::from_le_bytes(bytes[..4].try_into().unwrap()) as usize;
        let salt = u64::from_le_bytes(bytes[4..12].try_into().unwrap());
        let mut sk = Self::new(s, salt)?;
        let body = &bytes[12..];
        if body.len() != s {
            return Err(Error::Format(format!("expected {s} register bytes, got {}", body.len())));
        }
        let max_rank = 65 - sk.p;
        if let Some(r) = body.iter().find(|&&r| r > max_rank) {
            return Err(Error::Format(format!("register value {r} exceeds {max_rank}")));
        }
        sk.registers.copy_from_slice(body);
        Ok(sk)
    }
}

/// Orientation of a sketch bank, mirroring the component matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BankOrientation {
    /// Sketch `i` tracks the in-component of `i`.
    Forward,
    /// Sketch `i` tracks the out-component of `i`.
    Reversed,
}

/// One sketch per node, stored contiguously. Takes the place of the
/// component matrix at `n * s` bytes instead of `n^2 / 8`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SketchBank {
    n: usize,
    s: usize,
    p: u8,
    salt: u64,
    registers: Vec<u8>,
    orientation: BankOrientation,
}

impl SketchBank {
    /// Sketch `i` starts out containing exactly element `i`.
    pub fn new(n: usize, s: usize, salt: u64, orientation: BankOrientation) -> Result<Self> {
        let p = precision_for(s)?;
        let mut registers = vec![0u8; n * s];
        for i in 0..n {
            let (idx, rank) = register_update(p, i as u64, salt);
            registers[i * s + idx] = rank;
        }
        Ok(SketchBank {
            n,
            s,
            p,
            salt,
            registers,
            orientation,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn orientation(&self) -> BankOrientation {
        self.orientation
    }

    /// Unions the sketches of `e.u` and `e.v` and stores the union in both.
    pub fn apply_event(&mut self, e: &Event) -> Result<()> {
        for id in [e.u, e.v] {
            if id as usize >= self.n {
                return Err(Error::NodeOutOfRange {
                    node: id as u64,
                    n: self.n,
                });
            }
        }
        self.merge_pair(e.u as usize, e.v as usize);
        Ok(())
    }

    #[inline]
    fn merge_pair(&mut self, u: usize, v: usize) {
        if u == v {
            return;
        }
        let s = self.s;
        let (lo, hi) = if u < v { (u, v) } else { (v, u) };
        let (head, tail) = self.registers.split_at_mut(hi * s);
        max_pair(&mut head[lo * s..(lo + 1) * s], &mut tail[..s]);
    }

    /// Forward pass: sketch `i` ends up summarizing the in-component of `i`.
    pub fn run(net: &TemporalNetwork, s: usize, salt: u64) -> Result<Self> {
        let mut bank = Self::new(net.n(), s, salt, BankOrientation::Forward)?;
        for e in net.events() {
            bank.merge_pair(e.u as usize, e.v as usize);
        }
        Ok(bank)
    }

    /// Pass over the events from last to first: sketch `i` summarizes the
    /// out-component of `i`.
    pub fn run_reversed(net: &TemporalNetwork, s: usize, salt: u64) -> Result<Self> {
        let mut bank = Self::new(net.n(), s, salt, BankOrientation::Reversed)?;
        for e in net.events().iter().rev() {
            bank.merge_pair(e.u as usize, e.v as usize);
        }
        Ok(bank)
    }

    pub fn sketch(&self, i: usize) -> CardinalitySketch {
        CardinalitySketch {
            p: self.p,
            salt: self.salt,
            registers: self.registers[i * self.s..(i + 1) * self.s].to_vec(),
        }
    }

    pub fn estimate(&self, i: usize) -> f64 {
        estimate_registers(&self.registers[i * self.s..(i + 1) * self.s])
    }

    pub fn estimates(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.estimate(i)).collect()
    }

    /// One byte per register.
    pub fn logical_bytes(&self) -> u64 {
        (self.n * self.s) as u64
    }
}

/// Estimated mean component size from a single chronological pass.
///
/// The bank tracks in-components, but the total number of reachable pairs
/// is the same whether counted by row or by column, so the mean in-component
/// size equals the mean out-component size.
pub fn run_hll_average(net: &TemporalNetwork, s: usize, salt: u64) -> Result<f64> {
    let bank = SketchBank::run(net, s, salt)?;
    if bank.n() == 0 {
        return Ok(0.0);
    }
    Ok(bank.estimates().iter().sum::<f64>() / bank.n() as f64)
}

/// Estimated out-component size of every node, from one pass over the
/// reversed event sequence.
pub fn run_hll_distribution(net: &TemporalNetwork, s: usize, salt: u64) -> Result<SizeDistribution> {
    Ok(SizeDistribution::from_estimates(SketchBank::run_reversed(net, s, salt)?.estimates()))
}
