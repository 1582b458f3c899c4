//! Runs every acceptance criterion and prints one line each.

use ltlab::verify::{verify_all, VerifyOptions};
use std::process::ExitCode;

fn main() -> ExitCode {
    let results = match verify_all(&VerifyOptions::default()) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("acceptance suite could not run: {e}");
            return ExitCode::FAILURE;
        }
    };
    let mut failed = 0;
    for c in &results {
        let secs: f64 = c.timings.iter().map(|t| t.seconds).sum();
        println!("criterion {}: {} {} ({secs:.2} s)", c.id, if c.pass { "PASS" } else { "FAIL" }, c.title);
        if let Some(e) = &c.error {
            println!("    error: {e}");
        }
        for k in c.failures() {
            println!("    {}: got {} expected {} tol {}", k.name, k.got, k.expected, k.tolerance);
        }
        for t in c.timings.iter().filter(|t| t.seconds > t.limit) {
            println!("    {} took {:.2} s, limit {} s", t.label, t.seconds, t.limit);
        }
        failed += usize::from(!c.pass);
    }
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
