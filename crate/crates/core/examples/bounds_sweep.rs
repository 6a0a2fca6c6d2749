//! Compare the closed-form path bounds with brute force.
//!
//! Usage: `cargo run --release --example bounds_sweep -- [max_n]` (default 12).
//! Prints CSV on stdout.

use qsig::bounds::{oracle_worst_case, BoundReport};

fn main() -> qsig::Result<()> {
    let max_n: usize = std::env::args()
        .nth(1)
        .and_then(|a| a.parse().ok())
        .unwrap_or(12);
    println!("{},slack", BoundReport::CSV_HEADER);
    for n in 1..=max_n.min(16) {
        for t in 1..=n {
            for contiguous in [false, true] {
                let r = oracle_worst_case(n, t, contiguous)?;
                println!("{},{}", r.to_csv_row(), r.slack());
            }
        }
    }
    Ok(())
}
