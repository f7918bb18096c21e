//! Prints a LEACH vs MONCH comparison table for the default field over a
//! range of seeds: `cargo run --release --example paired_sweep -- 20`.

use wsnsim_core::experiment::{comparison_rows, comparison_table, run_pair, sweep_seeds};
use wsnsim_core::SimConfig;

fn main() {
    let count = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(20);
    let config = SimConfig::default();
    let pairs: Vec<_> = sweep_seeds(1, count)
        .into_iter()
        .map(|seed| run_pair(&config, seed).expect("default config is valid"))
        .collect();
    print!("{}", comparison_table(&comparison_rows(&pairs)));
}
