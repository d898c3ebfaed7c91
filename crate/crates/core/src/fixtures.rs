//! Named operators used by tests, examples and the command line.

use num_traits::Zero;

use crate::exactmath::{int, Rat, SymMatRat};
use crate::sos::{quad_polynomial, Straightener};
use crate::tensorspace::{bianchi_project, pair_index, CurvOp, ModCurvOp};

/// Zoltek's quadratic form on `∧²ℝ⁵`:
/// `x12² + 2x13² + 2x23² + 2x14² + x15² + x34² + 2x25² + 2x45²
///  − 2x12x34 − 2x12x15 − 2x34x15` (1-based indices).
///
/// As written it is not Bianchi: it differs from its Bianchi projection by a
/// multiple of the relation of `{1,2,3,4}`, so both define the same function
/// on decomposable 2-vectors.
pub fn zoltek_form() -> ModCurvOp {
    let n = 5;
    let ix = |i: usize, j: usize| pair_index(n, i - 1, j - 1);
    let mut m = SymMatRat::zeros(10);
    for (i, j, c) in [
        (1, 2, 1),
        (1, 3, 2),
        (2, 3, 2),
        (1, 4, 2),
        (1, 5, 1),
        (3, 4, 1),
        (2, 5, 2),
        (4, 5, 2),
    ] {
        m.set(ix(i, j), ix(i, j), int(c));
    }
    for ((a, b), (c, d)) in [((1, 2), (3, 4)), ((1, 2), (1, 5)), ((3, 4), (1, 5))] {
        m.set(ix(a, b), ix(c, d), int(-1));
    }
    ModCurvOp::new(n, m).expect("10x10")
}

/// The Bianchi projection of [`zoltek_form`], an algebraic curvature operator
/// with `sec ≥ 0`.
pub fn zoltek() -> CurvOp {
    bianchi_project(&zoltek_form())
}

/// True when `a − b` lies in the span of the Plücker relations.
pub fn same_modulo_ideal(a: &ModCurvOp, b: &ModCurvOp) -> bool {
    if a.n() != b.n() {
        return false;
    }
    let mut s = Straightener::new(a.n());
    let d = quad_polynomial(&a.sub(b));
    s.reduce_poly(&d).standard.values().all(Rat::is_zero)
}

/// `diag(d)` in the Plücker basis for `n = 4`.
pub fn diag4(d: [i64; 6]) -> CurvOp {
    CurvOp::diag(4, &d.map(int)).expect("diagonal operators are Bianchi")
}
