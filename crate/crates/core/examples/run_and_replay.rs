//! Runs a config through the batch driver and replays its manifest at a
//! different thread count.

use rdseries::runner::{replay, run_to_dir, Config, MANIFEST_FILE};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join("rdseries-example");
    let mut cfg = Config::parse(
        "experiment = clt\nalpha = 0\ns = 2e-3\nreplicates = 1000\nseed = 42\n[coefficients]\nkind = rademacher\n",
    )?;
    cfg.set_flag("output_dir", dir.to_str().unwrap())?;
    let (out, dir) = run_to_dir(&cfg)?;
    println!("{}", out.report_json());
    let again = replay(&dir.join(MANIFEST_FILE), Some(2))?;
    println!("replay reproduced {} artifacts byte for byte", again.artifacts.len());
    Ok(())
}
