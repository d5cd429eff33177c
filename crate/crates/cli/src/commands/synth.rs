//! `rainshape synth`: generate a synthetic pass corpus with a ground-truth
//! ledger from a TOML spec.

use std::fs;

use rainshape::ingest::write_records;
use rainshape::synth::{generate_dataset, write_ledger, SynthSpec};

use crate::args::SynthArgs;
use crate::failure::{at_path, Failure};

pub fn run(args: &SynthArgs) -> Result<(), Failure> {
    args.config.validate()?;
    let text = fs::read_to_string(&args.spec)
        .map_err(|e| Failure::Config(format!("{}: {e}", args.spec.display())))?;
    let spec: SynthSpec = toml::from_str(&text)
        .map_err(|e| Failure::Config(format!("{}: {e}", args.spec.display())))?;
    spec.validate()
        .map_err(|e| Failure::Config(format!("{}: {e}", args.spec.display())))?;

    let (records, ledger) = generate_dataset(&spec)?;

    let out = &args.config.out_dir;
    let path = out.join("dataset.csv");
    write_records(super::common::create_file(&path)?, &records).map_err(|e| at_path(&path, e))?;
    let path = out.join("ledger.csv");
    write_ledger(super::common::create_file(&path)?, &ledger).map_err(|e| at_path(&path, e))?;

    let censored = ledger.iter().filter(|g| g.censored).count();
    println!(
        "generated {} regions ({censored} censored, seed {}) -> {}",
        ledger.len(),
        spec.seed,
        out.display()
    );
    Ok(())
}
