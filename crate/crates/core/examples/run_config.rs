// Runs one experiment from a JSON config in memory and prints its checks.
//
// `cargo run --example run_config -- window-sweep configs/window_sweep.json`

use algestim::expcli::{run, ExperimentConfig, ExperimentKind};

pub fn run_example(kind: &str, json: &str) -> algestim::Result<bool> {
    let kind: ExperimentKind = kind.parse()?;
    let resolved = ExperimentConfig::from_json(json)?.resolve(kind, None, None)?;
    let report = run(&resolved)?;
    for (name, contents) in &report.files {
        println!("{name}: {} lines", contents.lines().count());
    }
    for c in &report.checks {
        println!("{} {} = {} (threshold {})", if c.pass { "PASS" } else { "FAIL" }, c.name, c.value, c.threshold);
    }
    Ok(report.passed())
}

fn main() -> algestim::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let (kind, json) = match args.as_slice() {
        [kind, path] => (kind.clone(), std::fs::read_to_string(path)?),
        _ => ("osc-trend".to_string(), "{}".to_string()),
    };
    run_example(&kind, &json)?;
    Ok(())
}
