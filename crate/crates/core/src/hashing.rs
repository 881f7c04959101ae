//! k-universal hash functions over node ids, used to map nodes onto
//! super-nodes.
//!
//! A 64-bit key is split into characters `x0` (low 32 bits), `x1` (high 32
//! bits) and the derived `x2 = x0 + x1`. Each character indexes its own
//! random table, and the three table values are XORed. Table `i` holds the
//! values of a random polynomial of degree `order - 1` over `GF(2^61 - 1)`,
//! evaluated by Horner's rule with [`mult_add_mod`]; with the default order
//! 4 the tables are 4-independent, and the derived character makes the
//! combination 4-universal over keys. The XOR is finally reduced modulo the
//! number of super-nodes.
//!
//! Characters below [`TABLE_SIZE`] are served from precomputed tables;
//! larger ones are evaluated on the fly.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// The Mersenne prime `2^61 - 1`.
pub const PRIME: u64 = (1 << 61) - 1;
pub const DEFAULT_ORDER: usize = 4;
/// Precomputed table entries per character position.
pub const TABLE_SIZE: usize = 1 << 16;

#[inline]
fn mod_mersenne(x: u128) -> u64 {
    let p = PRIME as u128;
    let r = (x & p) + (x >> 61);
    let r = (r & p) + (r >> 61);
    let r = r as u64;
    if r >= PRIME {
        r - PRIME
    } else {
        r
    }
}

/// `(a * x + b) mod 2^61 - 1`, with a 128-bit product folded by the
/// Mersenne identity `2^61 = 1`.
#[inline]
pub fn mult_add_mod(x: u64, a: u64, b: u64) -> u64 {
    let prod = mod_mersenne(a as u128 * x as u128);
    mod_mersenne(prod as u128 + b as u128)
}

/// Anything that assigns node ids to super-nodes.
pub trait SuperNodeMap: Sync {
    fn n_super(&self) -> usize;
    fn super_node(&self, node: u64) -> usize;
}

/// An explicit node → super-node table. Node ids beyond the table fall back
/// to `id % n_super`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableMap {
    n_super: usize,
    assignment: Vec<usize>,
}

impl TableMap {
    pub fn new(n_super: usize, assignment: Vec<usize>) -> Result<Self> {
        if n_super == 0 {
            return Err(Error::InvalidParameter("n_super must be at least 1".into()));
        }
        if let Some(&bad) = assignment.iter().find(|&&x| x >= n_super) {
            return Err(Error::NodeOutOfRange {
                node: bad as u64,
                n: n_super,
            });
        }
        Ok(TableMap { n_super, assignment })
    }
}

impl SuperNodeMap for TableMap {
    fn n_super(&self) -> usize {
        self.n_super
    }

    fn super_node(&self, node: u64) -> usize {
        self.assignment
            .get(node as usize)
            .copied()
            .unwrap_or((node % self.n_super as u64) as usize)
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct HashFunction {
    n_super: usize,
    order: usize,
    seed: u64,
    /// `coefficients[i][j]`, `i` in 0..3, `j` in 0..order.
    coefficients: [Vec<u64>; 3],
    tables: [Vec<u64>; 3],
}

impl std::fmt::Debug for HashFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HashFunction")
            .field("n_super", &self.n_super)
            .field("order", &self.order)
            .field("seed", &self.seed)
            .field("coefficients", &self.coefficients)
            .finish_non_exhaustive()
    }
}

impl HashFunction {
    pub fn new(seed: u64, n_super: usize, order: usize) -> Result<Self> {
        if n_super == 0 {
            return Err(Error::InvalidParameter("n_super must be at least 1".into()));
        }
        if order < 2 {
            return Err(Error::InvalidParameter(format!("hash order must be at least 2, got {order}")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut draw31 = || rng.random_range(0..(1u64 << 31) - 1);
        let mut coefficients: [Vec<u64>; 3] = Default::default();
        for row in &mut coefficients {
            *row = (0..order).map(|_| ((draw31() << 32) + draw31()) % PRIME).collect();
        }
        let mut h = HashFunction {
            n_super,
            order,
            seed,
            coefficients,
            tables: Default::default(),
        };
        for i in 0..3 {
            h.tables[i] = (0..TABLE_SIZE as u64).map(|c| h.poly(i, c)).collect();
        }
        Ok(h)
    }

    /// Polynomial of table `i` evaluated at character `c`.
    #[inline]
    fn poly(&self, i: usize, c: u64) -> u64 {
        let a = &self.coefficients[i];
        let mut acc = a[0];
        for &coef in &a[1..] {
            acc = mult_add_mod(c, acc, coef);
        }
        acc
    }

    #[inline]
    fn table(&self, i: usize, c: u64) -> u64 {
        match self.tables[i].get(c as usize) {
            Some(&v) => v,
            None => self.poly(i, c),
        }
    }

    /// XOR of the three table values, before reduction to `[0, n_super)`.
    #[inline]
    pub fn raw(&self, key: u64) -> u64 {
        let x0 = key & 0xffff_ffff;
        let x1 = key >> 32;
        let x2 = x0 + x1;
        self.table(0, x0) ^ self.table(1, x1) ^ self.table(2, x2)
    }

    #[inline]
    pub fn hash(&self, key: u64) -> usize {
        (self.raw(key) % self.n_super as u64) as usize
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coefficients(&self) -> &[Vec<u64>; 3] {
        &self.coefficients
    }

    /// Public description: parameters plus a SHA-256 digest of each table.
    pub fn descriptor(&self) -> HashDescriptor {
        let table_digests = std::array::from_fn(|i| {
            let mut hasher = Sha256::new();
            for v in &self.tables[i] {
                hasher.update(v.to_le_bytes());
            }
            hex::encode(hasher.finalize())
        });
        HashDescriptor {
            seed: self.seed,
            n_super: self.n_super,
            order: self.order,
            prime: PRIME,
            table_digests,
        }
    }
}

impl SuperNodeMap for HashFunction {
    fn n_super(&self) -> usize {
        self.n_super
    }

    fn super_node(&self, node: u64) -> usize {
        self.hash(node)
    }
}

/// Serializable identity of a hash function. Rebuilding from `seed`,
/// `n_super` and `order` must reproduce the digests.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HashDescriptor {
    pub seed: u64,
    pub n_super: usize,
    pub order: usize,
    pub prime: u64,
    pub table_digests: [String; 3],
}

impl HashDescriptor {
    pub fn rebuild(&self) -> Result<HashFunction> {
        let h = HashFunction::new(self.seed, self.n_super, self.order)?;
        if h.descriptor() != *self {
            return Err(Error::Format("hash descriptor digests do not match its parameters".into()));
        }
        Ok(h)
    }
}

/// A seeded sequence of independent hash functions. Member `j` depends only
/// on `(seed, j)`, so the first `K` members of any family are shared with
/// every larger family from the same seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HashFamily {
    pub seed: u64,
    pub n_super: usize,
    pub order: usize,
}

impl HashFamily {
    pub fn new(seed: u64, n_super: usize) -> Self {
        HashFamily {
            seed,
            n_super,
            order: DEFAULT_ORDER,
        }
    }

    pub fn member_seed(&self, j: usize) -> u64 {
        let mut z = self.seed ^ (j as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15);
        z = (z ^ (z >> 33)).wrapping_mul(0xff51_afd7_ed55_8ccd);
        z = (z ^ (z >> 33)).wrapping_mul(0xc4ce_b9fe_1a85_ec53);
        z ^ (z >> 33)
    }

    pub fn member(&self, j: usize) -> Result<HashFunction> {
        HashFunction::new(self.member_seed(j), self.n_super, self.order)
    }

    pub fn members(&self, k: usize) -> Result<Vec<HashFunction>> {
        (0..k).map(|j| self.member(j)).collect()
    }
}

/// `ceil(0.3 n)`, at least 1.
pub fn default_super_nodes(n: usize) -> usize {
    ((n as f64 * 0.3).ceil() as usize).max(1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mersenne_arithmetic() {
        assert_eq!(mult_add_mod(2, 3, 4), 10);
        assert_eq!(mult_add_mod(PRIME - 1, PRIME - 1, 0), 1);
        assert_eq!(mult_add_mod(0, 5, PRIME - 1), PRIME - 1);
        assert_eq!(mult_add_mod(1 << 40, 1 << 40, 0), ((1u128 << 80) % PRIME as u128) as u64);
        for (x, a, b) in [(123_456_789u64, PRIME - 7, PRIME - 3), (u32::MAX as u64 * 2, 1 << 60, 99)] {
            let want = ((a as u128 * x as u128 + b as u128) % PRIME as u128) as u64;
            assert_eq!(mult_add_mod(x, a, b), want);
        }
    }

    #[test]
    fn single_super_node() {
        let h = HashFunction::new(7, 1, DEFAULT_ORDER).unwrap();
        assert!((0..1000u64).chain([u64::MAX, 1 << 40]).all(|u| h.hash(u) == 0));
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(HashFunction::new(0, 0, 4).is_err());
        assert!(HashFunction::new(0, 10, 1).is_err());
    }

    #[test]
    fn deterministic_and_seed_sensitive() {
        let a = HashFunction::new(11, 300, 4).unwrap();
        let b = HashFunction::new(11, 300, 4).unwrap();
        let c = HashFunction::new(12, 300, 4).unwrap();
        let keys: Vec<u64> = (0..5000).chain([1 << 33, u64::MAX]).collect();
        assert!(keys.iter().all(|&k| a.hash(k) == b.hash(k)));
        assert!(keys.iter().any(|&k| a.hash(k) != c.hash(k)));
        assert!(keys.iter().all(|&k| a.hash(k) < 300));
    }

    #[test]
    fn tables_agree_with_polynomial() {
        let h = HashFunction::new(3, 97, 4).unwrap();
        for c in [0u64, 1, 2, 65_535] {
            for i in 0..3 {
                assert_eq!(h.tables[i][c as usize], h.poly(i, c));
            }
        }
        // Keys whose characters fall past the precomputed range.
        let key = (70_000u64 << 32) | 80_000;
        let want = h.poly(0, 80_000) ^ h.poly(1, 70_000) ^ h.poly(2, 150_000);
        assert_eq!(h.raw(key), want);
    }

    #[test]
    fn coefficients_in_field() {
        let h = HashFunction::new(5, 10, 6).unwrap();
        for row in h.coefficients() {
            assert_eq!(row.len(), 6);
            assert!(row.iter().all(|&a| a < PRIME));
        }
    }

    #[test]
    fn descriptor_round_trip() {
        let h = HashFunction::new(21, 64, 4).unwrap();
        let d = h.descriptor();
        assert_eq!(d.table_digests[0].len(), 64);
        assert_eq!(d.rebuild().unwrap(), h);
        let mut forged = d.clone();
        forged.seed += 1;
        assert!(forged.rebuild().is_err());
    }

    #[test]
    fn family_members_are_nested() {
        let f = HashFamily::new(9, 50);
        let three = f.members(3).unwrap();
        let five = f.members(5).unwrap();
        assert_eq!(three[..], five[..3]);
        assert_ne!(five[3], five[4]);
    }

    #[test]
    fn default_super_node_count() {
        assert_eq!(default_super_nodes(1000), 300);
        assert_eq!(default_super_nodes(5), 2);
        assert_eq!(default_super_nodes(0), 1);
    }
}
