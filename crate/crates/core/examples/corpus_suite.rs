// A small check suite over the seeded corpus, written out as JSON and CSV.

use maxop::cli::write_outcome;
use maxop::suite::{run_suite, Suite, SuiteConfig};
use maxop::{KernelSpec, Result};

pub fn run() -> Result<()> {
    let cfg = SuiteConfig { corpus_n: 4, kernels: vec![KernelSpec::poisson()], grid_n: 401, ..SuiteConfig::default() };
    let out = run_suite(Suite::Subharmonicity, &cfg)?;
    for e in &out.entries {
        println!("{:<12} {:<10} {:<16} {:?}", e.function, e.kernel, e.check, e.report.verdict);
    }
    let dir = std::env::temp_dir().join("maxop-corpus-suite");
    let failing = write_outcome(&dir, &out)?;
    println!("reports in {} ({} failing)", dir.display(), failing.len());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run()
}
