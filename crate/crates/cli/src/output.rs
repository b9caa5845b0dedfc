use crate::{CliError, Global};
use std::fs::File;
use std::io::{self, BufWriter, Write};

/// Nine significant digits in scientific notation.
pub fn num(x: f64) -> String {
    format!("{x:.8e}")
}

/// CSV writer on `--out` or stdout, LF-terminated.
pub fn csv_sink(g: &Global) -> Result<csv::Writer<Box<dyn Write>>, CliError> {
    Ok(csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(text_sink(g)?))
}

pub fn text_sink(g: &Global) -> Result<Box<dyn Write>, CliError> {
    Ok(match &g.out {
        Some(path) => Box::new(BufWriter::new(File::create(path).map_err(|e| {
            CliError::Io(format!("cannot create {}: {e}", path.display()))
        })?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}
