//! Interleaved inner/outer membership loop for a lower curvature bound.
//!
//! At each level `m` the inner test (an SOS certificate) can only prove the
//! bound and the outer test (Weitzenböck curvature terms) can only refute it.
//! An operator on the boundary between the two can stay undecided at every
//! level, so the loop is bounded by `m_max`.

use std::fmt;

use crate::error::Result;
use crate::exactmath::Rat;
use crate::sos::{inner_membership_with, InnerOptions, InnerOutcome, SosCertificate};
use crate::tensorspace::{apply_bound_reduction, BoundSide, CurvOp};
use crate::weitzenboeck::outer_report;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Answer {
    True,
    False,
    Undecided,
}

impl fmt::Display for Answer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Answer::True => "TRUE",
            Answer::False => "FALSE",
            Answer::Undecided => "UNDECIDED",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Witness {
    Certificate(Box<SosCertificate>),
    /// Degree `p` of a curvature term that is not PSD.
    FailingDegree(usize),
    None,
}

/// What happened at one level.
#[derive(Clone, Debug, PartialEq)]
pub struct LevelTrace {
    pub m: usize,
    pub inner: InnerOutcome,
    /// `None` when the inner test already decided the level.
    pub outer: Option<OuterSummary>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OuterSummary {
    Holds,
    FailsAt(usize),
}

impl fmt::Display for LevelTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "m={}: inner {}", self.m, self.inner.label())?;
        match self.outer {
            Some(OuterSummary::Holds) => write!(f, ", outer TRUE"),
            Some(OuterSummary::FailsAt(p)) => write!(f, ", outer FALSE at p={p}"),
            None => Ok(()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Verdict {
    pub answer: Answer,
    /// Level at which the loop stopped.
    pub level: usize,
    pub witness: Witness,
    pub trace: Vec<LevelTrace>,
}

impl Verdict {
    pub fn trace_line(&self) -> String {
        self.trace.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
    }
}

/// Decides `sec ≥ k` for `r`, trying levels `0 ..= m_max`.
pub fn algorithm1(r: &CurvOp, k: &Rat, m_max: usize, tol: f64) -> Result<Verdict> {
    algorithm1_with(r, k, m_max, &InnerOptions::new(tol))
}

pub fn algorithm1_with(r: &CurvOp, k: &Rat, m_max: usize, opts: &InnerOptions) -> Result<Verdict> {
    let shifted = apply_bound_reduction(r, k, BoundSide::Lower);
    let mut trace = Vec::new();
    for m in 0..=m_max {
        let inner = inner_membership_with(&shifted, m, opts)?;
        if let InnerOutcome::Yes(cert) = &inner {
            let witness = Witness::Certificate(cert.clone());
            trace.push(LevelTrace { m, inner, outer: None });
            return Ok(Verdict {
                answer: Answer::True,
                level: m,
                witness,
                trace,
            });
        }
        let report = outer_report(&shifted, m)?;
        match report.failing_degree() {
            Some(p) => {
                trace.push(LevelTrace {
                    m,
                    inner,
                    outer: Some(OuterSummary::FailsAt(p)),
                });
                return Ok(Verdict {
                    answer: Answer::False,
                    level: m,
                    witness: Witness::FailingDegree(p),
                    trace,
                });
            }
            None => trace.push(LevelTrace {
                m,
                inner,
                outer: Some(OuterSummary::Holds),
            }),
        }
    }
    Ok(Verdict {
        answer: Answer::Undecided,
        level: m_max,
        witness: Witness::None,
        trace,
    })
}
