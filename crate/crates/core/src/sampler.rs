//! Deterministic sampling of vertex tuples.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum SamplerSpec {
    /// Every unordered tuple of distinct vertices.
    Exhaustive,
    /// `samples` independent uniform draws (with replacement) from `seed`.
    Random { samples: usize, seed: u64 },
}

impl SamplerSpec {
    pub fn random(samples: usize, seed: u64) -> Self {
        SamplerSpec::Random { samples, seed }
    }

    pub fn check(&self) -> Result<()> {
        match self {
            SamplerSpec::Random { samples: 0, .. } => Err(Error::SamplerBudgetZero),
            _ => Ok(()),
        }
    }

    pub fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    /// Vertex triples over `0..n`. Random draws may repeat vertices
    /// (degenerate triangles are genuine triangles).
    pub fn triples(&self, n: usize) -> Result<Vec<[usize; 3]>> {
        self.check()?;
        Ok(match *self {
            SamplerSpec::Exhaustive => {
                let mut out = Vec::new();
                for a in 0..n {
                    for b in a + 1..n {
                        for c in b + 1..n {
                            out.push([a, b, c]);
                        }
                    }
                }
                out
            }
            SamplerSpec::Random { samples, seed } => {
                let mut rng = Self::rng(seed);
                (0..samples)
                    .map(|_| {
                        [
                            rng.gen_range(0..n),
                            rng.gen_range(0..n),
                            rng.gen_range(0..n),
                        ]
                    })
                    .collect()
            }
        })
    }

    /// Vertex quadruples over `0..n`, with the same conventions as
    /// [`SamplerSpec::triples`].
    pub fn quadruples(&self, n: usize) -> Result<Vec<[usize; 4]>> {
        self.check()?;
        Ok(match *self {
            SamplerSpec::Exhaustive => {
                let mut out = Vec::new();
                for a in 0..n {
                    for b in a + 1..n {
                        for c in b + 1..n {
                            for d in c + 1..n {
                                out.push([a, b, c, d]);
                            }
                        }
                    }
                }
                out
            }
            SamplerSpec::Random { samples, seed } => {
                let mut rng = Self::rng(seed);
                (0..samples)
                    .map(|_| std::array::from_fn(|_| rng.gen_range(0..n)))
                    .collect()
            }
        })
    }
}
