use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use crate::config::RunConfig;
use crate::error::CliResult;

pub fn sink(path: Option<&Path>) -> CliResult<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// CSV with a provenance comment line followed by the header row.
pub struct Table {
    w: csv::Writer<Box<dyn Write>>,
}

impl Table {
    pub fn create(cfg: &RunConfig, header: &[&str]) -> CliResult<Self> {
        let mut out = sink(cfg.out.as_deref())?;
        writeln!(out, "# config_hash={} tolerances={}", cfg.hash(), cfg.tolerance_summary())?;
        let mut w = csv::Writer::from_writer(out);
        w.write_record(header)?;
        Ok(Self { w })
    }

    pub fn row(&mut self, fields: &[f64]) -> CliResult<()> {
        self.w.write_record(fields.iter().map(|v| format!("{v:?}")))?;
        Ok(())
    }

    pub fn finish(mut self) -> CliResult<()> {
        self.w.flush()?;
        Ok(())
    }
}
