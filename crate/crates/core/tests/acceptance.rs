//! Runs without the libtest harness so every criterion line reaches the
//! console under plain `cargo test`.

use std::process::ExitCode;

use jbw_core::acceptance::run_all;
use jbw_core::par::Backend;

fn main() -> ExitCode {
    let outcomes = run_all(Backend::default());
    for o in &outcomes {
        println!("{o}");
    }
    let failed: Vec<u8> = outcomes.iter().filter(|o| !o.passed).map(|o| o.id).collect();
    if failed.is_empty() {
        println!("acceptance: {}/{} criteria passed", outcomes.len(), outcomes.len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failed criteria {failed:?}");
        ExitCode::FAILURE
    }
}
