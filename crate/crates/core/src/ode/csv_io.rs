//! Trajectory CSV: header `t,s0,s1,...`, one row per sample, 17 significant
//! digits per value so that a write/read round trip is exact.

use std::io::{Read, Write};

use super::Trajectory;
use crate::error::{Error, Result};

fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_csv<W: Write>(traj: &Trajectory, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let dim = traj.dim();
    let mut header = Vec::with_capacity(dim + 1);
    header.push("t".to_string());
    header.extend((0..dim).map(|i| format!("s{i}")));
    w.write_record(&header)?;
    let mut row = Vec::with_capacity(dim + 1);
    for (t, s) in traj.times.iter().zip(&traj.states) {
        row.clear();
        row.push(fmt(*t));
        row.extend(s.iter().map(|&v| fmt(v)));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Parses a trajectory written by [`write_csv`]. Metadata is not stored in the
/// file and comes back empty.
pub fn read_csv<R: Read>(reader: R) -> Result<Trajectory> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_reader(reader);
    let header = r.headers()?.clone();
    if header.is_empty() || &header[0] != "t" {
        return Err(Error::Rejected("trajectory header must start with `t`".into()));
    }
    for (i, name) in header.iter().skip(1).enumerate() {
        if name != format!("s{i}") {
            return Err(Error::Rejected(format!(
                "unexpected column `{name}` at position {}",
                i + 1
            )));
        }
    }
    let dim = header.len() - 1;
    if dim == 0 {
        return Err(Error::Rejected("trajectory has no state columns".into()));
    }

    let mut traj = Trajectory::default();
    for (line, record) in r.records().enumerate() {
        let record = record?;
        let mut values = record.iter().map(|f| {
            f.trim()
                .parse::<f64>()
                .map_err(|e| Error::Rejected(format!("row {}: bad number `{f}`: {e}", line + 1)))
        });
        let t = values
            .next()
            .ok_or_else(|| Error::Rejected(format!("row {}: empty record", line + 1)))??;
        if !t.is_finite() {
            return Err(Error::Rejected(format!("row {}: non-finite time", line + 1)));
        }
        if let Some(&prev) = traj.times.last() {
            if t <= prev {
                return Err(Error::Rejected(format!(
                    "row {}: times must be strictly increasing",
                    line + 1
                )));
            }
        }
        let state = values.collect::<Result<Vec<f64>>>()?;
        if state.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: state.len(),
            });
        }
        traj.times.push(t);
        traj.states.push(state);
    }
    Ok(traj)
}
