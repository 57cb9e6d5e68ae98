use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Result, TcpError};

/// Search budget attached to every budget-relative verdict.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchBudget {
    /// Grid spacing per axis on the sphere faces used for seeding.
    pub grid_resolution: f64,
    pub multistarts: usize,
    pub tolerance: f64,
    pub seed: u64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            grid_resolution: 1.0 / 32.0,
            multistarts: 64,
            tolerance: 1e-8,
            seed: 0,
        }
    }
}

impl SearchBudget {
    /// Defaults used by the extremal Pareto eigenvalue searches.
    pub fn pareto() -> Self {
        SearchBudget {
            multistarts: 128,
            ..Self::default()
        }
    }

    pub fn with_grid(mut self, grid_resolution: f64) -> Self {
        self.grid_resolution = grid_resolution;
        self
    }

    pub fn with_multistarts(mut self, multistarts: usize) -> Self {
        self.multistarts = multistarts;
        self
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.grid_resolution > 0.0 && self.grid_resolution <= 1.0) {
            return Err(TcpError::InvalidParameter(format!(
                "grid resolution {} must lie in (0, 1]",
                self.grid_resolution
            )));
        }
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(TcpError::InvalidParameter(format!(
                "tolerance {} must be positive",
                self.tolerance
            )));
        }
        Ok(())
    }

    /// Independent RNG stream for worker `stream`.
    pub(crate) fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng
    }
}
