//! Exact rational kernels: polynomials, Sturm sequences, root isolation,
//! discriminants, characteristic polynomials and PSD tests.

pub mod charpoly;
pub mod discriminant;
pub mod matrix;
pub mod poly;
pub mod rat;
pub mod ring;
pub mod sturm;

pub use charpoly::{berkowitz, charpoly, det};
pub use discriminant::{discriminant_x, resultant, sylvester_matrix};
pub use matrix::{
    eigen_symmetric_functions, psd_status, psd_status_by_elimination, PsdStatus, RatMatrix,
    SymMatRat,
};
pub use poly::UniPoly;
pub use rat::{from_f64, int, parse_rat, rat, round_dyadic, sign, to_f64, ExtRat, Rat};
pub use ring::Ring;
pub use sturm::{count_roots, isolate_family, sturm_sequence, IsolatingPartition, SturmSeq};
