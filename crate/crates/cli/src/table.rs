use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use anyhow::{Context, Result};

/// A CSV cell: floats are written with 17 significant digits.
pub enum Cell {
    Num(f64),
    Text(&'static str),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<&'static str> for Cell {
    fn from(s: &'static str) -> Self {
        Cell::Text(s)
    }
}

fn render(c: &Cell) -> String {
    match c {
        Cell::Num(x) => format!("{x:.16e}"),
        Cell::Text(s) => s.to_string(),
    }
}

pub fn write(out: Option<&Path>, header: &[&str], rows: &[Vec<Cell>]) -> Result<()> {
    let sink: Box<dyn Write> = match out {
        Some(p) => Box::new(File::create(p).with_context(|| format!("creating {}", p.display()))?),
        None => Box::new(io::stdout().lock()),
    };
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(header)?;
    for row in rows {
        w.write_record(row.iter().map(render))?;
    }
    w.flush()?;
    Ok(())
}
