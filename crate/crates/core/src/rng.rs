//! Seeded, labelled random substreams.
//!
//! A stream's seed is `SHA-256("ptp-sim/rng/v1" || root_seed_le || label)`,
//! fed to ChaCha12. Both algorithms are fixed, so a `(root_seed, label)` pair
//! yields the same sequence on every platform.

use std::collections::HashSet;

use rand::RngCore;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;
use sha2::{Digest, Sha256};

use crate::engine::EngineError;

const DOMAIN_TAG: &[u8] = b"ptp-sim/rng/v1";

pub struct RngStream {
    label: String,
    inner: ChaCha12Rng,
}

impl RngStream {
    /// Builds a stream directly, bypassing the per-run duplicate check.
    pub fn derive(root_seed: u64, label: &str) -> Self {
        let mut h = Sha256::new();
        h.update(DOMAIN_TAG);
        h.update(root_seed.to_le_bytes());
        h.update(label.as_bytes());
        let digest = h.finalize();
        let mut seed = [0u8; 32];
        seed.copy_from_slice(&digest);
        RngStream {
            label: label.to_owned(),
            inner: ChaCha12Rng::from_seed(seed),
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Uniform sample in the half-open interval (0, 1].
    pub fn unit_open_closed(&mut self) -> f64 {
        // 53 random mantissa bits mapped onto {1, ..., 2^53} / 2^53.
        let bits = self.inner.next_u64() >> 11;
        (bits + 1) as f64 / (1u64 << 53) as f64
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}

/// Hands out one stream per label for a single run.
pub struct RngFactory {
    root_seed: u64,
    issued: HashSet<String>,
}

impl RngFactory {
    pub fn new(root_seed: u64) -> Self {
        RngFactory {
            root_seed,
            issued: HashSet::new(),
        }
    }

    pub fn root_seed(&self) -> u64 {
        self.root_seed
    }

    pub fn stream(&mut self, label: &str) -> Result<RngStream, EngineError> {
        if !self.issued.insert(label.to_owned()) {
            return Err(EngineError::DuplicateStream(label.to_owned()));
        }
        Ok(RngStream::derive(self.root_seed, label))
    }
}

/// Derives a 64-bit seed from a list of 64-bit words (used for sweep points).
pub fn hash_seed(words: &[u64]) -> u64 {
    let mut h = Sha256::new();
    h.update(b"ptp-sim/seed/v1");
    for w in words {
        h.update(w.to_le_bytes());
    }
    let digest = h.finalize();
    let mut out = [0u8; 8];
    out.copy_from_slice(&digest[..8]);
    u64::from_le_bytes(out)
}
