//! Plain-text instance files.
//!
//! ```text
//! ND NS
//! A0 DELTA SEED        # SEED is `-` when absent
//! h00 h01 ... h0{NS-1}
//! ...
//! ```
//!
//! Numbers are written with 17 significant digits so they read back exactly.

use std::io::{BufRead, Write};
use std::path::Path;

use super::DiskStack;
use crate::error::{Error, Result};

impl DiskStack {
    pub fn write_to<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{} {}", self.n_disks, self.n_segments)?;
        let seed = self.seed.map_or_else(|| "-".to_string(), |s| s.to_string());
        writeln!(
            out,
            "{} {} {seed}",
            fmt_f64(self.target_thickness),
            fmt_f64(self.max_variation)
        )?;
        for k in 0..self.n_disks {
            let line: Vec<String> = self.row(k).iter().map(|&h| fmt_f64(h)).collect();
            writeln!(out, "{}", line.join(" "))?;
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut buf = Vec::new();
        self.write_to(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("instance text is ASCII")
    }

    pub fn read_from<R: BufRead>(input: R) -> Result<Self> {
        let mut lines = input
            .lines()
            .enumerate()
            .map(|(i, l)| l.map(|l| (i + 1, l)))
            .filter(|r| r.as_ref().map_or(true, |(_, l)| !l.trim().is_empty()));

        let mut next = |what: &str| -> Result<(usize, String)> {
            lines
                .next()
                .transpose()?
                .ok_or_else(|| Error::parse(0, format!("missing {what}")))
        };

        let (ln, dims) = next("dimension line")?;
        let dims = parse_fields::<usize>(ln, &dims, 2)?;
        let (n_disks, n_segments) = (dims[0], dims[1]);

        let (ln, meta) = next("parameter line")?;
        let fields: Vec<&str> = meta.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(Error::parse(ln, "expected `A0 DELTA SEED`"));
        }
        let a0 = parse_one::<f64>(ln, fields[0])?;
        let delta = parse_one::<f64>(ln, fields[1])?;
        let seed = match fields[2] {
            "-" => None,
            s => Some(parse_one::<u64>(ln, s)?),
        };

        let mut rows = Vec::with_capacity(n_disks);
        for k in 0..n_disks {
            let (ln, row) = next(&format!("height row {k}"))?;
            rows.push(parse_fields::<f64>(ln, &row, n_segments)?);
        }
        if let Some((ln, _)) = lines.next().transpose()? {
            return Err(Error::parse(ln, "unexpected trailing content"));
        }
        DiskStack::new(rows, a0, delta, seed)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::read_from(std::io::BufReader::new(file))
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let file = std::fs::File::create(path)?;
        let mut out = std::io::BufWriter::new(file);
        self.write_to(&mut out)?;
        out.flush()?;
        Ok(())
    }
}

/// 17 significant digits.
pub(crate) fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn parse_one<T: std::str::FromStr>(line: usize, s: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    s.parse()
        .map_err(|e| Error::parse(line, format!("bad value `{s}`: {e}")))
}

fn parse_fields<T: std::str::FromStr>(line: usize, s: &str, expected: usize) -> Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    let vals = s
        .split_whitespace()
        .map(|f| parse_one(line, f))
        .collect::<Result<Vec<T>>>()?;
    if vals.len() != expected {
        return Err(Error::parse(
            line,
            format!("expected {expected} values, found {}", vals.len()),
        ));
    }
    Ok(vals)
}
