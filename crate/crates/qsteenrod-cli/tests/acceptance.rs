//! Acceptance run: one line per numbered criterion, nonzero exit if any fails.

use std::process::ExitCode;
use std::time::Instant;

use qsteenrod_cli::criteria::{acceptance_primes, run, CRITERIA};
use qsteenrod_cli::report::{outcome_from_error, Status};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 0x5eed_0001;

fn main() -> ExitCode {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut failed = 0;
    for c in &CRITERIA {
        let primes = acceptance_primes(c.number);
        let start = Instant::now();
        let outcome = run(c.number, &primes, &mut rng).unwrap_or_else(outcome_from_error);
        let elapsed = start.elapsed().as_secs_f64();
        let label = match outcome.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Inconclusive => "INCONCLUSIVE",
        };
        if outcome.status != Status::Pass {
            failed += 1;
        }
        let ps = primes.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(",");
        println!(
            "criterion {:>2} {:<24} {:<5} {:>7.2}s  primes [{ps}]  {}: {}",
            c.number, c.check_id, label, elapsed, c.anchor, outcome.detail
        );
    }
    println!("{} of {} criteria passed", CRITERIA.len() - failed, CRITERIA.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
