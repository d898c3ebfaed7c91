//! Polynomials in the Plücker variables and their normal form modulo the
//! Plücker relations.
//!
//! A monomial is standard when no two of its factors `x_il`, `x_jk` are nested
//! (`i < j < k < l`). Standard monomials form a basis of the coordinate ring of
//! the Grassmannian, and every monomial reduces to one by repeatedly applying
//! `x_il·x_jk = x_ik·x_jl − x_ij·x_kl + g/2` for the relation `g` of `{i,j,k,l}`.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::exactmath::{rat, Rat};
use crate::tensorspace::{pair_index, wedge4_basis, ModCurvOp, PluckerBasis};

/// Sorted multiset of Plücker variable indices.
pub type Monomial = Vec<u16>;

/// Sparse polynomial, coefficients keyed by monomial.
pub type Polynomial = BTreeMap<Monomial, Rat>;

/// Multiplier of `x^β · g_q`, keyed by `(β, q)`.
pub type IdealPart = BTreeMap<(Monomial, usize), Rat>;

/// All monomials of degree `d` in `vars` variables, lexicographically ordered.
pub fn monomials(vars: usize, d: usize) -> Vec<Monomial> {
    fn rec(vars: usize, d: usize, start: usize, cur: &mut Monomial, out: &mut Vec<Monomial>) {
        if cur.len() == d {
            out.push(cur.clone());
            return;
        }
        for v in start..vars {
            cur.push(v as u16);
            rec(vars, d, v, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(vars, d, 0, &mut Vec::with_capacity(d), &mut out);
    out
}

pub fn mul_monomials(a: &[u16], b: &[u16]) -> Monomial {
    let mut m: Monomial = a.iter().chain(b).copied().collect();
    m.sort_unstable();
    m
}

fn add_term<K: Ord>(p: &mut BTreeMap<K, Rat>, k: K, c: Rat) {
    if c.is_zero() {
        return;
    }
    use std::collections::btree_map::Entry;
    match p.entry(k) {
        Entry::Vacant(e) => {
            e.insert(c);
        }
        Entry::Occupied(mut e) => {
            *e.get_mut() += c;
            if e.get().is_zero() {
                e.remove();
            }
        }
    }
}

/// `p += s · q`.
pub fn add_scaled<K: Ord + Clone>(p: &mut BTreeMap<K, Rat>, s: &Rat, q: &BTreeMap<K, Rat>) {
    for (k, c) in q {
        add_term(p, k.clone(), s * c);
    }
}

pub fn mul_polys(a: &Polynomial, b: &Polynomial) -> Polynomial {
    let mut out = Polynomial::new();
    for (ma, ca) in a {
        for (mb, cb) in b {
            add_term(&mut out, mul_monomials(ma, mb), ca * cb);
        }
    }
    out
}

/// The quadratic form `αᵗ M α` as a polynomial in the Plücker variables.
pub fn quad_polynomial(form: &ModCurvOp) -> Polynomial {
    let mut out = Polynomial::new();
    let d = form.dim();
    let two = rat(2, 1);
    for a in 0..d {
        for b in a..d {
            let v = form.get(a, b);
            if v.is_zero() {
                continue;
            }
            let c = if a == b { v.clone() } else { &two * v };
            add_term(&mut out, vec![a as u16, b as u16], c);
        }
    }
    out
}

/// `r^m` for `r = Σ x_a²`.
pub fn r_power(vars: usize, m: usize) -> Polynomial {
    let mut r = Polynomial::new();
    for a in 0..vars {
        r.insert(vec![a as u16, a as u16], Rat::one());
    }
    let mut out = Polynomial::new();
    out.insert(Vec::new(), Rat::one());
    for _ in 0..m {
        out = mul_polys(&out, &r);
    }
    out
}

/// Normal form of a monomial: its standard part and the ideal multipliers
/// with `μ = standard + Σ c_{β,q} x^β g_q`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Reduction {
    pub standard: Polynomial,
    pub ideal: IdealPart,
}

/// Memoised straightening for a fixed `n`.
pub struct Straightener {
    n: usize,
    pairs: Vec<(usize, usize)>,
    quad_index: HashMap<[usize; 4], usize>,
    memo: HashMap<Monomial, Arc<Reduction>>,
}

impl Straightener {
    pub fn new(n: usize) -> Self {
        let quad_index = wedge4_basis(n).into_iter().enumerate().map(|(q, v)| (v, q)).collect();
        Straightener {
            n,
            pairs: PluckerBasis::new(n).pairs().to_vec(),
            quad_index,
            memo: HashMap::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Position `p` such that factors `p` and `p+1` are nested.
    fn nested_at(&self, mono: &[u16]) -> Option<usize> {
        mono.windows(2)
            .position(|w| self.pairs[w[0] as usize].1 > self.pairs[w[1] as usize].1)
    }

    pub fn is_standard(&self, mono: &[u16]) -> bool {
        self.nested_at(mono).is_none()
    }

    pub fn standard_monomials(&self, d: usize) -> Vec<Monomial> {
        monomials(self.pairs.len(), d)
            .into_iter()
            .filter(|m| self.is_standard(m))
            .collect()
    }

    pub fn reduce(&mut self, mono: &[u16]) -> Arc<Reduction> {
        if let Some(r) = self.memo.get(mono) {
            return r.clone();
        }
        let red = match self.nested_at(mono) {
            None => Reduction {
                standard: Polynomial::from([(mono.to_vec(), Rat::one())]),
                ideal: IdealPart::new(),
            },
            Some(p) => {
                let (i, l) = self.pairs[mono[p] as usize];
                let (j, k) = self.pairs[mono[p + 1] as usize];
                let rest: Monomial = mono[..p].iter().chain(&mono[p + 2..]).copied().collect();
                let ix = |a, b| pair_index(self.n, a, b) as u16;
                let crossing = mul_monomials(&rest, &[ix(i, k), ix(j, l)]);
                let disjoint = mul_monomials(&rest, &[ix(i, j), ix(k, l)]);
                let r1 = self.reduce(&crossing);
                let r2 = self.reduce(&disjoint);
                let mut standard = r1.standard.clone();
                add_scaled(&mut standard, &-Rat::one(), &r2.standard);
                let mut ideal = r1.ideal.clone();
                add_scaled(&mut ideal, &-Rat::one(), &r2.ideal);
                let q = self.quad_index[&[i, j, k, l]];
                add_term(&mut ideal, (rest, q), rat(1, 2));
                Reduction { standard, ideal }
            }
        };
        let red = Arc::new(red);
        self.memo.insert(mono.to_vec(), red.clone());
        red
    }

    /// Normal form of a polynomial.
    pub fn reduce_poly(&mut self, p: &Polynomial) -> Reduction {
        let mut out = Reduction::default();
        for (m, c) in p {
            let r = self.reduce(m);
            add_scaled(&mut out.standard, c, &r.standard);
            add_scaled(&mut out.ideal, c, &r.ideal);
        }
        out
    }
}

/// The relation `g_q = αᵗ W_q α` as a polynomial.
pub fn relation_polynomial(n: usize, q: usize) -> Polynomial {
    let [i, j, k, l] = wedge4_basis(n)[q];
    let ix = |a, b| pair_index(n, a, b) as u16;
    let mut p = Polynomial::new();
    for (a, b, s) in [(ix(i, j), ix(k, l), 2), (ix(i, k), ix(j, l), -2), (ix(i, l), ix(j, k), 2)] {
        add_term(&mut p, mul_monomials(&[a], &[b]), rat(s, 1));
    }
    p
}

/// Expands `Σ c_{β,q} x^β g_q`.
pub fn expand_ideal(n: usize, ideal: &IdealPart) -> Polynomial {
    let rels: Vec<Polynomial> = (0..wedge4_basis(n).len()).map(|q| relation_polynomial(n, q)).collect();
    let mut out = Polynomial::new();
    for ((beta, q), c) in ideal {
        for (m, g) in &rels[*q] {
            add_term(&mut out, mul_monomials(beta, m), c * g);
        }
    }
    out
}
