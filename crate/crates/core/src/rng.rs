//! Source of key and IV material: system entropy, or a seeded stream for
//! reproducible runs.

use std::sync::Mutex;

use rand::rngs::OsRng;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("system entropy unavailable: {0}")]
pub struct EntropyUnavailable(pub String);

/// Shared randomness provider. In seeded mode all callers draw from one
/// locked stream, so concurrent draws never overlap.
#[derive(Debug)]
pub enum RandomnessProvider {
    System,
    Seeded(Box<Mutex<ChaCha20Rng>>),
}

impl RandomnessProvider {
    pub fn system() -> Self {
        RandomnessProvider::System
    }

    pub fn seeded(seed: u64) -> Self {
        RandomnessProvider::Seeded(Box::new(Mutex::new(ChaCha20Rng::seed_from_u64(seed))))
    }

    pub fn from_seed(seed: Option<u64>) -> Self {
        seed.map_or_else(Self::system, Self::seeded)
    }

    pub fn fill(&self, buf: &mut [u8]) -> Result<(), EntropyUnavailable> {
        match self {
            RandomnessProvider::System => OsRng
                .try_fill_bytes(buf)
                .map_err(|e| EntropyUnavailable(e.to_string())),
            RandomnessProvider::Seeded(rng) => {
                // A poisoned lock still holds a usable stream position.
                let mut rng = rng.lock().unwrap_or_else(|p| p.into_inner());
                rng.fill_bytes(buf);
                Ok(())
            }
        }
    }
}

impl Default for RandomnessProvider {
    fn default() -> Self {
        Self::system()
    }
}
