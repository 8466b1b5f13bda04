//! Runs one simulation cell and prints its summary.
//!
//! `cargo run --release -p vbpbb --example cell -- <period> <noise_variance> [m] [null]`

use vbpbb::{run_scenario, Scenario};

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let period = args.first().and_then(|a| a.parse().ok()).unwrap_or(50);
    let noise = args.get(1).and_then(|a| a.parse().ok()).unwrap_or(10.0);
    let m = args.get(2).and_then(|a| a.parse().ok()).unwrap_or(11);
    let null_component = args.get(3).is_some_and(|a| a == "null");
    let scenario = Scenario {
        kzft_m: m,
        null_component,
        master_seed: Some(1),
        ..Scenario::new(period, noise)
    };
    let start = std::time::Instant::now();
    match run_scenario(&scenario) {
        Ok(report) => println!(
            "{}\n{:#?}\n({:.1?})",
            scenario.label(),
            report.summary,
            start.elapsed()
        ),
        Err(e) => eprintln!("error: {e}"),
    }
}
