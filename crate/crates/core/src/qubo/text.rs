//! Sparse QUBO text format.
//!
//! ```text
//! QUBO <n_vars> <offset> <rho>
//! # model <n_disks> <n_segments> <gauge_fixed 0|1>
//! # varmap i -> disk,shift
//! # 0 -> 1,0
//! ...
//! L <i> <coeff>
//! Q <i> <j> <coeff>        (i < j)
//! ```
//!
//! Decimals carry 17 significant digits, so import reproduces every
//! coefficient exactly. The `# model` line is needed to rebuild an empty
//! model; all other comment lines are ignored on import.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};
use std::path::Path;

use super::QuboModel;
use crate::error::{Error, Result};
use crate::stack::format::fmt_f64;

impl QuboModel {
    pub fn write_to<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(
            out,
            "QUBO {} {} {}",
            self.n_vars(),
            fmt_f64(self.offset),
            fmt_f64(self.rho)
        )?;
        writeln!(
            out,
            "# model {} {} {}",
            self.n_disks,
            self.n_segments,
            u8::from(self.gauge_fixed)
        )?;
        writeln!(out, "# varmap i -> disk,shift")?;
        for v in 0..self.n_vars() {
            let (k, j) = self.slot(v);
            writeln!(out, "# {v} -> {k},{j}")?;
        }
        for (i, c) in self.linear.iter().enumerate() {
            writeln!(out, "L {i} {}", fmt_f64(*c))?;
        }
        for (&(i, j), c) in &self.quadratic {
            writeln!(out, "Q {i} {j} {}", fmt_f64(*c))?;
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut buf = Vec::new();
        self.write_to(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("QUBO text is ASCII")
    }

    /// Writes the model to `path`.
    pub fn export(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
        self.write_to(&mut out)?;
        out.flush()?;
        Ok(())
    }

    pub fn import(path: impl AsRef<Path>) -> Result<Self> {
        Self::read_from(std::io::BufReader::new(std::fs::File::open(path)?))
    }

    pub fn read_from<R: BufRead>(input: R) -> Result<Self> {
        let mut header: Option<(usize, f64, f64)> = None;
        let mut dims: Option<(usize, usize, bool)> = None;
        let mut linear: Vec<Option<f64>> = Vec::new();
        let mut quadratic = BTreeMap::new();

        for (idx, line) in input.lines().enumerate() {
            let ln = idx + 1;
            let line = line?;
            let fields: Vec<&str> = line.split_whitespace().collect();
            match fields.as_slice() {
                [] => {}
                ["#", "model", nd, ns, g] => {
                    let gauge = match *g {
                        "0" => false,
                        "1" => true,
                        other => return Err(Error::parse(ln, format!("bad gauge flag `{other}`"))),
                    };
                    dims = Some((num(ln, nd)?, num(ln, ns)?, gauge));
                }
                ["#", ..] => {}
                ["QUBO", n, offset, rho] => {
                    if header.is_some() {
                        return Err(Error::parse(ln, "duplicate header"));
                    }
                    let n: usize = num(ln, n)?;
                    header = Some((n, num(ln, offset)?, num(ln, rho)?));
                    linear = vec![None; n];
                }
                ["L", i, c] => {
                    let i: usize = num(ln, i)?;
                    let slot = linear
                        .get_mut(i)
                        .ok_or_else(|| Error::parse(ln, format!("linear index {i} out of range")))?;
                    if slot.replace(num(ln, c)?).is_some() {
                        return Err(Error::parse(ln, format!("duplicate linear term {i}")));
                    }
                }
                ["Q", i, j, c] => {
                    let (i, j): (usize, usize) = (num(ln, i)?, num(ln, j)?);
                    if i >= j || j >= linear.len() {
                        return Err(Error::parse(ln, format!("bad quadratic key ({i}, {j})")));
                    }
                    if quadratic.insert((i, j), num::<f64>(ln, c)?).is_some() {
                        return Err(Error::parse(ln, format!("duplicate quadratic term ({i}, {j})")));
                    }
                }
                _ => return Err(Error::parse(ln, format!("unrecognised line `{line}`"))),
            }
        }

        let (n_vars, offset, rho) = header.ok_or_else(|| Error::parse(0, "missing QUBO header"))?;
        let (n_disks, n_segments, gauge_fixed) =
            dims.ok_or_else(|| Error::parse(0, "missing `# model` line"))?;
        let encoded = n_disks.checked_sub(usize::from(gauge_fixed));
        if n_segments == 0 || encoded.map(|e| e * n_segments) != Some(n_vars) {
            return Err(Error::parse(0, "model dimensions disagree with n_vars"));
        }
        let linear = linear
            .into_iter()
            .enumerate()
            .map(|(i, c)| c.ok_or_else(|| Error::parse(0, format!("missing linear term {i}"))))
            .collect::<Result<Vec<f64>>>()?;

        Ok(QuboModel {
            n_disks,
            n_segments,
            gauge_fixed,
            rho,
            offset,
            linear,
            quadratic,
        })
    }
}

fn num<T: std::str::FromStr>(line: usize, s: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    s.parse()
        .map_err(|e| Error::parse(line, format!("bad number `{s}`: {e}")))
}
