//! Command implementations behind the `curvcone` binary. Each command returns
//! its report text and exit code instead of printing, so it can be tested
//! in-process.
//!
//! Exit codes: 0 bound holds / TRUE, 1 fails / FALSE, 2 UNDECIDED,
//! 3 problem size cap exceeded, 64 unparseable input, 65 wrong dimension,
//! 66 operator violates the Bianchi identity (or Q-symmetry), 70 internal
//! failure, 74 I/O error.

pub mod opfile;

use std::fmt::Write as _;
use std::path::Path;

use curvcone::dim4::{defining_poly, ft_certificate, query_bound_exact, FtCertificate, FtWitness};
use curvcone::exactmath::{parse_rat, Rat};
use curvcone::relax::{algorithm1_with, Answer, Witness};
use curvcone::sdp::write_triplets;
use curvcone::sos::{build_reduced_sos_sdp, InnerOptions};
use curvcone::tensorspace::{apply_bound_reduction, bianchi_project, psi_q, random_curvop, BoundSide, CurvOp, ModCurvOp, Signature};
use curvcone::Error;

use opfile::{FileError, OperatorFile};

pub mod exit {
    pub const HOLDS: i32 = 0;
    pub const FAILS: i32 = 1;
    pub const UNDECIDED: i32 = 2;
    pub const SIZE_CAP: i32 = 3;
    pub const PARSE: i32 = 64;
    pub const DIMENSION: i32 = 65;
    pub const NOT_BIANCHI: i32 = 66;
    pub const INTERNAL: i32 = 70;
    pub const IO: i32 = 74;
}

#[derive(Debug, PartialEq)]
pub struct Output {
    pub code: i32,
    pub text: String,
}

#[derive(Debug, PartialEq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn new(code: i32, message: impl Into<String>) -> Self {
        CliError {
            code,
            message: message.into(),
        }
    }
}

impl From<FileError> for CliError {
    fn from(e: FileError) -> Self {
        match e {
            FileError::Parse(m) => CliError::new(exit::PARSE, m),
            FileError::Dimension(m) => CliError::new(exit::DIMENSION, m),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NotBianchi | Error::NotQSymmetric => exit::NOT_BIANCHI,
            Error::WrongDimension { .. } | Error::DimensionMismatch { .. } => exit::DIMENSION,
            Error::SizeCap { .. } => exit::SIZE_CAP,
            Error::BadSignature { .. } | Error::InvalidArgument(_) => exit::PARSE,
            _ => exit::INTERNAL,
        };
        CliError::new(code, e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub fn read_file(path: &Path) -> CliResult<OperatorFile> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::new(exit::IO, format!("{}: {e}", path.display())))?;
    Ok(OperatorFile::parse(&text)?)
}

pub fn write_file(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|e| CliError::new(exit::IO, format!("{}: {e}", path.display())))
}

pub fn parse_bound(s: &str) -> CliResult<Rat> {
    parse_rat(s).ok_or_else(|| CliError::new(exit::PARSE, format!("bound is not a rational: {s:?}")))
}

/// The operator as a `CurvOp`, projecting onto the Bianchi subspace when
/// `project` is set and rejecting non-Bianchi input otherwise.
pub fn to_curvop(op: ModCurvOp, project: bool) -> CliResult<CurvOp> {
    if op.is_bianchi() {
        return Ok(CurvOp::new(op)?);
    }
    if project {
        return Ok(bianchi_project(&op));
    }
    Err(CliError::new(
        exit::NOT_BIANCHI,
        "operator violates the first Bianchi identity (use --project to project it)",
    ))
}

fn describe_bound(k: &Rat, side: BoundSide, strict: bool) -> String {
    let op = match (side, strict) {
        (BoundSide::Lower, false) => ">=",
        (BoundSide::Lower, true) => ">",
        (BoundSide::Upper, false) => "<=",
        (BoundSide::Upper, true) => "<",
    };
    format!("sec {op} {k}")
}

/// Text form of a Finsler–Thorpe certificate:
///
/// ```text
/// ft-certificate
/// strict true|false
/// point <x0>                      exact shift, or
/// root <lo> <hi> <c0> <c1> ...    unique root of c0 + c1 x + ... in (lo, hi)
/// ```
pub fn ft_certificate_text(c: &FtCertificate) -> String {
    let mut s = format!("ft-certificate\nstrict {}\n", c.strict);
    match &c.witness {
        FtWitness::RationalPoint(x) => {
            let _ = writeln!(s, "point {x}");
        }
        FtWitness::IsolatedRoot { lo, hi, factor } => {
            let coeffs: Vec<String> = factor.coeffs().iter().map(ToString::to_string).collect();
            let _ = writeln!(s, "root {lo} {hi} {}", coeffs.join(" "));
        }
    }
    s
}

pub fn check4(r: &CurvOp, k: &Rat, side: BoundSide, strict: bool) -> CliResult<(Output, Option<FtCertificate>)> {
    let n = r.n();
    if n > 4 {
        return Err(CliError::new(
            exit::DIMENSION,
            format!("check4 needs n <= 4, got n = {n} (use relax)"),
        ));
    }
    let holds = query_bound_exact(r, k, side, strict)?;
    let mut text = format!("n {n}\nquery {}\n", describe_bound(k, side, strict));
    let mut cert = None;
    if holds && n == 4 {
        let c = ft_certificate(&apply_bound_reduction(r, k, side))?
            .ok_or_else(|| CliError::new(exit::INTERNAL, "bound holds but no certificate was produced"))?;
        for line in ft_certificate_text(&c).lines() {
            let _ = writeln!(text, "  {line}");
        }
        cert = Some(c);
    }
    if holds && n < 4 {
        text.push_str("every 2-vector is decomposable: decided by the PSD status of the shifted operator\n");
    }
    let _ = writeln!(text, "VERDICT: {}", if holds { "TRUE" } else { "FALSE" });
    let code = if holds { exit::HOLDS } else { exit::FAILS };
    Ok((Output { code, text }, cert))
}

pub fn defpoly(r: &CurvOp, k: &Rat) -> CliResult<Output> {
    let v = defining_poly(r, k)?;
    Ok(Output {
        code: exit::HOLDS,
        text: format!("{v}\n"),
    })
}

pub struct RelaxArgs<'a> {
    pub k: Rat,
    pub max_m: usize,
    pub tol: f64,
    pub cert: Option<&'a Path>,
    /// Triplet dumps of the SDP of each visited level go to `<prefix>.m<m>.txt`.
    pub dump_sdp: Option<&'a Path>,
}

pub fn relax(r: &CurvOp, args: &RelaxArgs) -> CliResult<Output> {
    if !(args.tol > 0.0) {
        return Err(CliError::new(exit::PARSE, "--tol must be positive"));
    }
    let opts = InnerOptions::new(args.tol);
    let v = algorithm1_with(r, &args.k, args.max_m, &opts)?;
    let mut text = format!("n {}\nquery {}\n", r.n(), describe_bound(&args.k, BoundSide::Lower, false));
    for t in &v.trace {
        let _ = writeln!(text, "{t}");
    }
    if let Some(prefix) = args.dump_sdp {
        let shifted = apply_bound_reduction(r, &args.k, BoundSide::Lower);
        for t in &v.trace {
            let sos = build_reduced_sos_sdp(&shifted, t.m)?;
            let path = prefix.with_extension(format!("m{}.txt", t.m));
            write_file(&path, &write_triplets(&sos.problem))?;
            let _ = writeln!(text, "sdp dump m={} {}", t.m, path.display());
        }
    }
    match &v.witness {
        Witness::Certificate(c) => {
            let _ = writeln!(
                text,
                "certificate: residual {}, psd shift {}, verified exact {}",
                c.residual,
                c.psd_shift.as_ref().map_or("none".to_string(), ToString::to_string),
                c.verified_exact()
            );
            if let Some(path) = args.cert {
                write_file(path, &c.to_text())?;
            }
        }
        Witness::FailingDegree(p) => {
            let _ = writeln!(text, "witness: curvature term of degree p={p} is not PSD");
        }
        Witness::None => {}
    }
    let _ = writeln!(text, "VERDICT: {} level={}", v.answer, v.level);
    let code = match v.answer {
        Answer::True => exit::HOLDS,
        Answer::False => exit::FAILS,
        Answer::Undecided => exit::UNDECIDED,
    };
    Ok(Output { code, text })
}

pub fn gen(n: usize, seed: u64, magnitude: u32) -> CliResult<String> {
    if n < 2 {
        return Err(CliError::new(exit::DIMENSION, format!("need n >= 2, got {n}")));
    }
    Ok(OperatorFile::from_op(&random_curvop(n, seed, magnitude)).to_json())
}

/// `ψ_Q` applied to the entries of a file carrying a signature.
pub fn semiriem_operator(file: &OperatorFile, project: bool) -> CliResult<CurvOp> {
    let nu = file
        .signature
        .ok_or_else(|| CliError::new(exit::PARSE, "file has no \"signature\" field"))?;
    let sig = Signature::new(file.n, nu)?;
    let op = psi_q(&file.matrix()?, &sig)?;
    to_curvop(op, project)
}

#[cfg(test)]
mod tests {
    use super::*;
    use curvcone::exactmath::int;
    use curvcone::fixtures::diag4;
    use num_traits::Zero;

    #[test]
    fn check4_examples() {
        let id = CurvOp::identity(4);
        let (out, cert) = check4(&id, &Rat::zero(), BoundSide::Lower, true).unwrap();
        assert_eq!(out.code, 0);
        assert!(out.text.contains("VERDICT: TRUE"));
        assert_eq!(cert.unwrap().witness, FtWitness::RationalPoint(Rat::zero()));
        assert_eq!(check4(&id.neg(), &Rat::zero(), BoundSide::Lower, false).unwrap().0.code, 1);

        let d = diag4([0, 1, 1, 1, 1, 0]);
        assert_eq!(check4(&d, &Rat::zero(), BoundSide::Lower, true).unwrap().0.code, 1);
        assert_eq!(check4(&d, &Rat::zero(), BoundSide::Lower, false).unwrap().0.code, 0);
        assert_eq!(check4(&id, &int(1), BoundSide::Upper, false).unwrap().0.code, 0);
        assert_eq!(check4(&CurvOp::identity(5), &Rat::zero(), BoundSide::Lower, false).unwrap_err().code, 65);
    }

    #[test]
    fn defpoly_examples() {
        assert_eq!(defpoly(&CurvOp::identity(4), &Rat::zero()).unwrap().text, "0\n");
        assert_eq!(defpoly(&CurvOp::zero(4), &Rat::zero()).unwrap().text, "0\n");
        let v = defpoly(&diag4([1, 2, 3, 4, 5, 6]), &Rat::zero()).unwrap();
        assert!(parse_rat(v.text.trim()).unwrap() > Rat::zero());
    }

    #[test]
    fn projection_flag() {
        let raw = curvcone::fixtures::zoltek_form();
        assert_eq!(to_curvop(raw.clone(), false).unwrap_err().code, exit::NOT_BIANCHI);
        let once = to_curvop(raw, true).unwrap();
        let twice = to_curvop(once.as_mod().clone(), true).unwrap();
        assert_eq!(once, twice);
    }
}
