//! Acceptance battery on the shipped desk config, one line per criterion.
//!
//! `ACCEPTANCE_ONLY=1,5,13` restricts the run to the listed criteria.

use inelastic_lab::battery::{Battery, Settings, CRITERIA};
use inelastic_lab::config::Config;
use inelastic_lab::shipped_config;

/// Criteria whose targets sit below what the discretization can reach at
/// the specified resolution. They are run and reported, but do not fail
/// the test target.
const KNOWN_LIMITS: [u8; 3] = [3, 6, 10];

fn main() {
    let cfg = Config::load(&shipped_config("desk.cfg")).expect("desk.cfg");
    let settings = Settings::from_config(&cfg, 0).expect("settings");
    let only: Option<Vec<u8>> = std::env::var("ACCEPTANCE_ONLY")
        .ok()
        .map(|s| s.split(',').filter_map(|t| t.trim().parse().ok()).collect());
    let mut battery = Battery::new(settings);
    let mut unexpected = Vec::new();
    for (id, _) in CRITERIA {
        if only.as_ref().is_some_and(|o| !o.contains(&id)) {
            continue;
        }
        let o = battery.run(id);
        let known = KNOWN_LIMITS.contains(&id);
        let tag = match (o.passed, known) {
            (true, _) => "",
            (false, true) => "  [known limit]",
            (false, false) => "  [UNEXPECTED]",
        };
        println!("{}{tag}", o.line());
        if !o.passed && !known {
            unexpected.push(id);
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
