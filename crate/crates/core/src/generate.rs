//! Seeded random instance generators.

use rand::Rng;

use crate::error::{Error, Result};
use crate::instance::{validate_instance, Instance, Model, Rational};
use crate::seed::rng_from_seed;

/// Shape of the random precedence graph.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DagShape {
    None,
    /// Each pair `j < j'` becomes an edge with this probability.
    Density(f64),
    /// Jobs split into `layers` consecutive blocks; each pair in adjacent
    /// layers becomes an edge with probability `density`.
    Layered { layers: usize, density: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorConfig {
    pub model: Model,
    pub n: usize,
    pub m: usize,
    /// Inclusive range of job sizes (entries of the matrix for unrelated).
    pub size_range: (i64, i64),
    pub weight_range: (i64, i64),
    pub dag: DagShape,
    /// Inclusive speed range; speeds are drawn as multiples of 1/2.
    pub speed_range: (i64, i64),
    /// Probability that an unrelated entry `p_ij` is finite.
    pub sparsity: f64,
}

impl GeneratorConfig {
    pub fn new(model: Model, n: usize, m: usize) -> Self {
        GeneratorConfig {
            model,
            n,
            m,
            size_range: (1, 3),
            weight_range: (1, 5),
            dag: if model == Model::Unrelated {
                DagShape::None
            } else {
                DagShape::Density(0.3)
            },
            speed_range: (1, 8),
            sparsity: 1.0,
        }
    }

    fn check(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::Generator(msg.to_string()));
        if self.n == 0 {
            return bad("n must be positive");
        }
        if self.m == 0 {
            return bad("m must be positive");
        }
        if self.size_range.0 < 1 || self.size_range.0 > self.size_range.1 {
            return bad("size range must satisfy 1 <= lo <= hi");
        }
        if self.weight_range.0 < 1 || self.weight_range.0 > self.weight_range.1 {
            return bad("weight range must satisfy 1 <= lo <= hi");
        }
        if self.model == Model::Related
            && (self.speed_range.0 < 1 || self.speed_range.0 > self.speed_range.1)
        {
            return bad("speed range must satisfy 1 <= lo <= hi");
        }
        if !(0.0..=1.0).contains(&self.sparsity) {
            return bad("sparsity must lie in [0, 1]");
        }
        match self.dag {
            DagShape::Density(d) | DagShape::Layered { density: d, .. } if !(0.0..=1.0).contains(&d) => {
                bad("dag density must lie in [0, 1]")
            }
            DagShape::Layered { layers: 0, .. } => bad("layered dag needs at least one layer"),
            _ => Ok(()),
        }
    }
}

/// Generates a valid instance; deterministic for a fixed `(config, seed)`.
pub fn generate(cfg: &GeneratorConfig, seed: u64) -> Result<Instance> {
    cfg.check()?;
    let mut rng = rng_from_seed(seed);
    let n = cfg.n;
    let weights: Vec<i64> = (0..n)
        .map(|_| rng.gen_range(cfg.weight_range.0..=cfg.weight_range.1))
        .collect();

    let inst = match cfg.model {
        Model::Identical | Model::Related => {
            let sizes: Vec<i64> = (0..n)
                .map(|_| rng.gen_range(cfg.size_range.0..=cfg.size_range.1))
                .collect();
            let edges = random_edges(&mut rng, n, cfg.dag);
            if cfg.model == Model::Identical {
                Instance::identical(&weights, &sizes, cfg.m, &edges)
            } else {
                let speeds: Vec<Rational> = (0..cfg.m)
                    .map(|_| {
                        let halves = rng.gen_range(2 * cfg.speed_range.0..=2 * cfg.speed_range.1);
                        Rational::new(halves as i128, 2)
                    })
                    .collect();
                Instance::related(&weights, &sizes, &speeds, &edges)
            }
        }
        Model::Unrelated => {
            let mut pmatrix = vec![vec![None; n]; cfg.m];
            for j in 0..n {
                for row in pmatrix.iter_mut() {
                    if rng.gen_bool(cfg.sparsity) {
                        row[j] = Some(rng.gen_range(cfg.size_range.0..=cfg.size_range.1));
                    }
                }
                if pmatrix.iter().all(|row| row[j].is_none()) {
                    let i = rng.gen_range(0..cfg.m);
                    pmatrix[i][j] = Some(rng.gen_range(cfg.size_range.0..=cfg.size_range.1));
                }
            }
            Instance::unrelated(&weights, pmatrix)
        }
    };
    let violations = validate_instance(&inst);
    if violations.is_empty() {
        Ok(inst)
    } else {
        Err(Error::InvalidInstance(violations))
    }
}

fn random_edges<R: Rng>(rng: &mut R, n: usize, shape: DagShape) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    match shape {
        DagShape::None => {}
        DagShape::Density(d) => {
            for a in 0..n {
                for b in a + 1..n {
                    if rng.gen_bool(d) {
                        edges.push((a, b));
                    }
                }
            }
        }
        DagShape::Layered { layers, density } => {
            let layer_of = |j: usize| j * layers / n;
            for a in 0..n {
                for b in a + 1..n {
                    if layer_of(b) == layer_of(a) + 1 && rng.gen_bool(density) {
                        edges.push((a, b));
                    }
                }
            }
        }
    }
    edges
}
