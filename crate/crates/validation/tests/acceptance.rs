//! Acceptance criteria. Prints one line per criterion; pass criterion ids as
//! arguments to run a subset.

use std::process::ExitCode;

use bellforge::reproduce;
use bellforge::Limits;

fn main() -> ExitCode {
    let selected: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let limits = Limits::default();
    let mut failed = 0;
    for &(id, claim) in reproduce::CRITERIA {
        if !selected.is_empty() && !selected.contains(&id) {
            continue;
        }
        match reproduce::run(id, &limits) {
            Ok(o) => {
                println!(
                    "{} criterion {}: {} ({:.2} s)",
                    if o.pass { "PASS" } else { "FAIL" },
                    id,
                    claim,
                    o.seconds
                );
                for line in o.details.iter().filter(|l| !o.pass || !l.starts_with("ok")) {
                    println!("    {}", line);
                }
                failed += usize::from(!o.pass);
            }
            Err(e) => {
                println!("FAIL criterion {}: {} (error: {})", id, claim, e);
                failed += 1;
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{} criteria failed", failed);
        ExitCode::FAILURE
    }
}
