//! Plain-text sparse triplet format for exchanging problems with external solvers.
//!
//! ```text
//! # comment lines start with '#'
//! blocks 2 10 1          <- number of blocks, then each block dimension
//! free 0                 <- number of free variables
//! constraints 3          <- number of constraints
//! rhs 0 1.5              <- constraint index, right-hand side
//! a 0 0 1 2 -0.5         <- constraint, block, row, col (row <= col), value
//! f 0 0 1.0              <- constraint, free variable, value
//! c 0 1 1 1.0            <- objective entry: block, row, col, value
//! cf 0 1.0               <- objective coefficient of a free variable
//! ```
//!
//! Indices are 0-based. An off-diagonal entry stands for both symmetric positions.
//! Values are printed with round-trip precision.

use std::fmt::Write as _;

use super::{Constraint, Entry, Objective, SdpProblem};
use crate::error::{Error, Result};

pub fn write_triplets(p: &SdpProblem) -> String {
    let mut out = String::new();
    let dims: Vec<String> = p.block_dims.iter().map(usize::to_string).collect();
    let _ = writeln!(out, "blocks {} {}", p.block_dims.len(), dims.join(" "));
    let _ = writeln!(out, "free {}", p.num_free);
    let _ = writeln!(out, "constraints {}", p.constraints.len());
    for (i, c) in p.constraints.iter().enumerate() {
        let _ = writeln!(out, "rhs {i} {:?}", c.rhs);
        for e in &c.entries {
            let _ = writeln!(out, "a {i} {} {} {} {:?}", e.block, e.row, e.col, e.value);
        }
        for (k, v) in &c.free {
            let _ = writeln!(out, "f {i} {k} {v:?}");
        }
    }
    if let Some(obj) = &p.objective {
        for e in &obj.entries {
            let _ = writeln!(out, "c {} {} {} {:?}", e.block, e.row, e.col, e.value);
        }
        for (k, v) in &obj.free {
            let _ = writeln!(out, "cf {k} {v:?}");
        }
    }
    out
}

fn bad(line: usize, msg: &str) -> Error {
    Error::InvalidArgument(format!("triplet line {}: {msg}", line + 1))
}

pub fn read_triplets(text: &str) -> Result<SdpProblem> {
    let mut p = SdpProblem::default();
    let mut objective: Option<Objective> = None;
    for (ln, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut it = line.split_whitespace();
        let tag = it.next().unwrap_or_default();
        let rest: Vec<&str> = it.collect();
        let us = |k: usize| -> Result<usize> {
            rest.get(k).and_then(|s| s.parse().ok()).ok_or_else(|| bad(ln, "expected an index"))
        };
        let fl = |k: usize| -> Result<f64> {
            rest.get(k).and_then(|s| s.parse().ok()).ok_or_else(|| bad(ln, "expected a number"))
        };
        let constraint = |p: &mut SdpProblem, i: usize| -> Result<()> {
            if i >= p.constraints.len() {
                return Err(bad(ln, "constraint index out of range"));
            }
            Ok(())
        };
        match tag {
            "blocks" => {
                let k = us(0)?;
                p.block_dims = (1..=k).map(us).collect::<Result<_>>()?;
            }
            "free" => p.num_free = us(0)?,
            "constraints" => p.constraints = vec![Constraint::default(); us(0)?],
            "rhs" => {
                let i = us(0)?;
                constraint(&mut p, i)?;
                p.constraints[i].rhs = fl(1)?;
            }
            "a" => {
                let i = us(0)?;
                constraint(&mut p, i)?;
                p.constraints[i].entries.push(Entry::new(us(1)?, us(2)?, us(3)?, fl(4)?));
            }
            "f" => {
                let i = us(0)?;
                constraint(&mut p, i)?;
                p.constraints[i].free.push((us(1)?, fl(2)?));
            }
            "c" => objective
                .get_or_insert_with(Objective::default)
                .entries
                .push(Entry::new(us(0)?, us(1)?, us(2)?, fl(3)?)),
            "cf" => objective.get_or_insert_with(Objective::default).free.push((us(0)?, fl(1)?)),
            _ => return Err(bad(ln, "unknown record tag")),
        }
    }
    p.objective = objective;
    p.validate()?;
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let mut p = SdpProblem::new(vec![2, 1]);
        p.num_free = 1;
        p.add_constraint(Constraint {
            entries: vec![Entry::new(0, 0, 1, 0.1), Entry::new(1, 0, 0, -3.0)],
            free: vec![(0, 2.5)],
            rhs: 1.0 / 3.0,
        });
        p.objective = Some(Objective {
            entries: vec![Entry::new(0, 1, 1, 1.0)],
            free: vec![(0, -1.0)],
        });
        let text = write_triplets(&p);
        assert_eq!(read_triplets(&text).unwrap(), p);
    }

    #[test]
    fn rejects_garbage() {
        assert!(read_triplets("blocks 1 2\nconstraints 1\nzz 0").is_err());
        assert!(read_triplets("blocks 1 2\nconstraints 1\na 3 0 0 0 1.0").is_err());
        assert!(read_triplets("blocks 1 2\nconstraints 1\na 0 0 0 5 1.0").is_err());
    }
}
