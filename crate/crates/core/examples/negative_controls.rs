// Every checker on an input built to violate it.

use maxop::verify::fixtures::negative_controls;
use maxop::{KernelSpec, Result};

pub fn run() -> Result<()> {
    for r in negative_controls(&KernelSpec::poisson())? {
        let why = r.witnesses.first().map(|w| w.detail.as_str()).unwrap_or("");
        println!("{:<18} {:?}  {why}", r.name, r.verdict);
        assert!(r.is_failure());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run()
}
