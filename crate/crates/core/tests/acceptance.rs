//! Runs the eight acceptance criteria at full scale and prints one line per criterion.

use std::process::ExitCode;

use ergoshift::battery::{criterion_count, run_criterion, BatteryOptions, Scale, DEFAULT_SEED};

fn main() -> ExitCode {
    let opts = BatteryOptions {
        threads: std::thread::available_parallelism().map_or(1, |n| n.get()),
        ..BatteryOptions::new(Scale::Full, DEFAULT_SEED)
    };
    println!("acceptance battery, seed {:#x}, {} thread(s)", opts.seed, opts.threads);
    let mut failed = 0;
    for id in 1..=criterion_count() as u8 {
        let report = run_criterion(id, &opts).expect("known criterion");
        println!("{}", report.summary_line());
        for c in &report.checks {
            println!("    {} {c}", if c.holds { "ok  " } else { "FAIL" });
        }
        failed += usize::from(!report.passed);
    }
    println!("{} of {} criteria passed", criterion_count() - failed, criterion_count());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
