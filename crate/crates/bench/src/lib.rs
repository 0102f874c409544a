//! Fixed benchmark instances.

use tilp_core::{generate, GeneratorConfig, Instance, Model};

/// Deterministic instance of the given model and size.
pub fn fixture(model: Model, n: usize, m: usize) -> Instance {
    generate(&GeneratorConfig::new(model, n, m), 0xBE7C).expect("benchmark fixture")
}
