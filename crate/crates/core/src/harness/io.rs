//! Chain CSV files and per-run metadata.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::diagnostics::WeightedChain;
use crate::error::{Error, Result};

/// Writes `iter,weight,accepted,theta_1..theta_D` with 17 significant digits.
///
/// `weight` is the importance weight `exp(H̃ − H)`, exactly 1 for unweighted samplers.
pub fn write_chain_csv(path: &Path, chain: &WeightedChain) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write!(w, "iter,weight,accepted")?;
    for d in 1..=chain.dim() {
        write!(w, ",theta_{d}")?;
    }
    writeln!(w)?;
    for i in 0..chain.len() {
        write!(w, "{},{:.16e},{}", chain.iterations[i], chain.log_weights[i].exp(), chain.accepted[i] as u8)?;
        for v in &chain.samples[i] {
            write!(w, ",{v:.16e}")?;
        }
        writeln!(w)?;
    }
    w.flush()?;
    Ok(())
}

fn schema(path: &Path, msg: impl Into<String>) -> Error {
    Error::Dataset { column: path.display().to_string(), msg: msg.into() }
}

/// Reads a chain file written by [`write_chain_csv`]. Timing and acceptance come from a
/// sibling `chains_meta.csv` when one lists the file.
pub fn read_chain_csv(path: &Path) -> Result<WeightedChain> {
    let mut reader = csv::Reader::from_path(path)?;
    let header = reader.headers()?.clone();
    if header.len() < 4 || &header[0] != "iter" || &header[1] != "weight" || &header[2] != "accepted" {
        return Err(schema(path, "expected header iter,weight,accepted,theta_1,..."));
    }
    let mut chain = WeightedChain::unweighted(Vec::new());
    for (r, rec) in reader.records().enumerate() {
        let rec = rec?;
        let num = |j: usize| rec[j].parse::<f64>().map_err(|_| schema(path, format!("row {}: bad value `{}`", r + 1, &rec[j])));
        chain.iterations.push(num(0)? as usize);
        let w = num(1)?;
        if !(w >= 0.0) {
            return Err(schema(path, format!("row {}: negative weight", r + 1)));
        }
        chain.log_weights.push(w.ln());
        chain.accepted.push(num(2)? != 0.0);
        chain.samples.push((3..rec.len()).map(num).collect::<Result<_>>()?);
    }
    let accepted = chain.accepted.iter().filter(|a| **a).count() as f64;
    chain.accept_pos = accepted / chain.len().max(1) as f64;
    chain.accept_mom = f64::NAN;
    chain.accept_pos_total = chain.accept_pos;
    if let Some(meta) = path.parent().map(|p| p.join(META_FILE)).filter(|p| p.is_file()) {
        let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        if let Some(m) = read_meta(&meta)?.remove(&name) {
            chain.wall_time = m.wall_time;
            chain.accept_pos = m.accept_pos;
            chain.accept_mom = m.accept_mom;
            chain.accept_pos_total = m.accept_pos_total;
        }
    }
    Ok(chain)
}

pub const META_FILE: &str = "chains_meta.csv";

/// One row of `chains_meta.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainMeta {
    pub file: String,
    pub seed: u64,
    pub retained: usize,
    pub wall_time: f64,
    pub accept_pos: f64,
    pub accept_mom: f64,
    pub accept_pos_total: f64,
}

impl ChainMeta {
    pub fn new(file: String, seed: u64, chain: &WeightedChain) -> Self {
        Self {
            file,
            seed,
            retained: chain.len(),
            wall_time: chain.wall_time,
            accept_pos: chain.accept_pos,
            accept_mom: chain.accept_mom,
            accept_pos_total: chain.accept_pos_total,
        }
    }
}

pub fn write_meta(path: &Path, rows: &[ChainMeta]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "file,seed,retained,wall_time,accept_pos,accept_mom,accept_pos_total")?;
    for m in rows {
        writeln!(
            w,
            "{},{},{},{:.16e},{:.16e},{:.16e},{:.16e}",
            m.file, m.seed, m.retained, m.wall_time, m.accept_pos, m.accept_mom, m.accept_pos_total
        )?;
    }
    w.flush()?;
    Ok(())
}

fn read_meta(path: &Path) -> Result<HashMap<String, ChainMeta>> {
    let mut out = HashMap::new();
    for rec in csv::Reader::from_path(path)?.records() {
        let rec = rec?;
        if rec.len() != 7 {
            return Err(schema(path, "expected 7 columns"));
        }
        let f = |j: usize| rec[j].parse::<f64>().map_err(|_| schema(path, format!("bad value `{}`", &rec[j])));
        let m = ChainMeta {
            file: rec[0].to_string(),
            seed: f(1)? as u64,
            retained: f(2)? as usize,
            wall_time: f(3)?,
            accept_pos: f(4)?,
            accept_mom: f(5)?,
            accept_pos_total: f(6)?,
        };
        out.insert(m.file.clone(), m);
    }
    Ok(out)
}

/// Chain files matching a glob pattern, sorted by path.
pub fn glob_chains(pattern: &str) -> Result<Vec<PathBuf>> {
    let paths = glob::glob(pattern).map_err(|e| Error::InvalidArgument(format!("bad pattern `{pattern}`: {e}")))?;
    let mut out: Vec<PathBuf> = paths.filter_map(|p| p.ok()).filter(|p| p.is_file()).collect();
    out.sort();
    if out.is_empty() {
        return Err(Error::InvalidArgument(format!("no files match `{pattern}`")));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chain_round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let mut c = WeightedChain::weighted(vec![vec![0.1, -1.0 / 3.0], vec![2.5e-300, 7.0]], vec![0.0, -0.25]).unwrap();
        c.iterations = vec![0, 1];
        c.accepted = vec![true, false];
        c.wall_time = 1.5;
        c.accept_pos = 0.5;
        c.accept_mom = 0.9;
        c.accept_pos_total = 0.6;
        let p = dir.path().join("chain_00.csv");
        write_chain_csv(&p, &c).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        assert!(text.starts_with("iter,weight,accepted,theta_1,theta_2\n0,1.0000000000000000e0,1,"));
        write_meta(&dir.path().join(META_FILE), &[ChainMeta::new("chain_00.csv".into(), 7, &c)]).unwrap();
        let back = read_chain_csv(&p).unwrap();
        assert_eq!(back.samples, c.samples);
        assert_eq!(back.accepted, c.accepted);
        assert_eq!(back.log_weights[0], 0.0);
        assert!((back.log_weights[1] + 0.25).abs() < 1e-15);
        assert_eq!((back.wall_time, back.accept_mom), (1.5, 0.9));
    }

    #[test]
    fn bad_schema_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("x.csv");
        std::fs::write(&p, "a,b,c,d\n1,2,3,4\n").unwrap();
        assert!(read_chain_csv(&p).is_err());
        assert!(glob_chains(&format!("{}/none_*.csv", dir.path().display())).is_err());
    }
}
