//! Fixtures shared by the benchmarks.

use choquet_core::corpus::{corpus, CorpusEntry};
use choquet_core::DiscreteDistribution;

/// `n` equally weighted atoms spread irregularly over roughly [-10, 10].
pub fn law(n: usize) -> DiscreteDistribution {
    let w = 1.0 / n as f64;
    DiscreteDistribution::new((0..n).map(|i| (10.0 * (i as f64 * 1.618_034).sin(), w))).unwrap()
}

pub fn corpus_entry(name: &str) -> CorpusEntry {
    corpus()
        .into_iter()
        .find(|e| e.name == name)
        .unwrap_or_else(|| panic!("no corpus entry {name}"))
}
