//! Sturm sequences, exact real-root counting and common root isolation.

use num_traits::{One, Zero};

use super::poly::UniPoly;
use super::rat::{ExtRat, Rat};
use crate::error::{Error, Result};

/// Signed remainder sequence `p, p', -rem(p, p'), ...`.
#[derive(Clone, Debug, PartialEq)]
pub struct SturmSeq {
    pub polys: Vec<UniPoly>,
}

impl SturmSeq {
    /// Number of sign changes along the sequence at `x`, zeros skipped.
    pub fn variations(&self, x: &ExtRat) -> usize {
        let mut last = 0i8;
        let mut count = 0;
        for p in &self.polys {
            let s = p.sign_at(x);
            if s == 0 {
                continue;
            }
            if last != 0 && s != last {
                count += 1;
            }
            last = s;
        }
        count
    }
}

pub fn sturm_sequence(p: &UniPoly) -> Result<SturmSeq> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let mut polys = vec![p.clone()];
    let d = p.derivative();
    if d.is_zero() {
        return Ok(SturmSeq { polys });
    }
    polys.push(d);
    loop {
        let n = polys.len();
        let r = polys[n - 2].rem(&polys[n - 1]);
        if r.is_zero() {
            break;
        }
        polys.push(-r);
    }
    Ok(SturmSeq { polys })
}

/// Number of distinct real roots of `p` in `(a, b]`.
///
/// The signs at infinite endpoints are the limiting signs. Multiplicities are
/// disregarded: the count runs on the squarefree part.
pub fn count_roots(p: &UniPoly, a: &ExtRat, b: &ExtRat) -> Result<usize> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if a >= b {
        return Err(Error::EmptyInterval);
    }
    if p.sign_at(a) == 0 || p.sign_at(b) == 0 {
        return Err(Error::EndpointVanishes);
    }
    let seq = counting_sequence(&p.squarefree_part())?;
    Ok(count_with(&seq, a, b))
}

fn count_with(seq: &SturmSeq, a: &ExtRat, b: &ExtRat) -> usize {
    seq.variations(a) - seq.variations(b)
}

/// Common root-isolating partition of a polynomial family.
///
/// `points` runs from `NegInf` to `PosInf`; interval `j` is `[points[j], points[j+1]]`.
/// Every interval contains exactly one real point that is a root of some
/// member (when the family has real roots at all), and no member vanishes at a
/// finite partition point.
#[derive(Clone, Debug, PartialEq)]
pub struct IsolatingPartition {
    pub points: Vec<ExtRat>,
    /// `root_flags[j][i]`: member `i` has a root in interval `j`.
    pub root_flags: Vec<Vec<bool>>,
    /// For each interval with a root, a tight rational bracket `(lo, hi)`
    /// holding that root in its interior.
    pub brackets: Vec<Option<(Rat, Rat)>>,
}

impl IsolatingPartition {
    pub fn num_intervals(&self) -> usize {
        self.points.len() - 1
    }

    pub fn interval(&self, j: usize) -> (&ExtRat, &ExtRat) {
        (&self.points[j], &self.points[j + 1])
    }

    pub fn has_root(&self, j: usize, member: usize) -> bool {
        self.root_flags[j][member]
    }
}

/// Builds a common root-isolating partition with dyadic partition points.
///
/// Each member is isolated on its own; overlapping brackets of different
/// members are either recognised as a shared root (via the gcd) or refined
/// until they separate.
pub fn isolate_family(ps: &[UniPoly]) -> Result<IsolatingPartition> {
    if ps.is_empty() {
        return Err(Error::InvalidArgument("empty polynomial family".into()));
    }
    if ps.iter().any(UniPoly::is_zero) {
        return Err(Error::ZeroPolynomial);
    }
    let parts: Vec<UniPoly> = ps.iter().map(UniPoly::squarefree_part).collect();
    let mut distinct: Vec<UniPoly> = Vec::new();
    for p in &parts {
        if !distinct.contains(p) {
            distinct.push(p.clone());
        }
    }
    let seqs: Vec<SturmSeq> = distinct.iter().map(counting_sequence).collect::<Result<_>>()?;

    let mut clusters: Vec<Cluster> = Vec::new();
    for (m, q) in distinct.iter().enumerate() {
        for (lo, hi) in isolate_with(q, &seqs[m])? {
            clusters.push(Cluster {
                members: vec![m],
                lo,
                hi,
            });
        }
    }
    let clusters = resolve_overlaps(clusters, &distinct, &seqs)?;

    let mut points = vec![ExtRat::NegInf];
    for w in clusters.windows(2) {
        points.push(ExtRat::Finite(w[0].hi.clone()));
    }
    points.push(ExtRat::PosInf);

    let member_seqs: Vec<&SturmSeq> = parts
        .iter()
        .map(|p| &seqs[distinct.iter().position(|d| d == p).expect("present")])
        .collect();
    let root_flags = (0..points.len() - 1)
        .map(|j| {
            member_seqs
                .iter()
                .map(|s| count_with(s, &points[j], &points[j + 1]) > 0)
                .collect()
        })
        .collect();
    let brackets = if clusters.is_empty() {
        vec![None]
    } else {
        clusters.into_iter().map(|c| Some((c.lo, c.hi))).collect()
    };
    Ok(IsolatingPartition {
        points,
        root_flags,
        brackets,
    })
}

/// One real point, a root of every listed member, inside `(lo, hi)`.
#[derive(Clone, Debug)]
struct Cluster {
    members: Vec<usize>,
    lo: Rat,
    hi: Rat,
}

fn resolve_overlaps(
    mut clusters: Vec<Cluster>,
    polys: &[UniPoly],
    seqs: &[SturmSeq],
) -> Result<Vec<Cluster>> {
    loop {
        clusters.sort_by(|a, b| a.lo.cmp(&b.lo).then(a.hi.cmp(&b.hi)));
        let Some(k) = (0..clusters.len().saturating_sub(1)).find(|&k| clusters[k].hi > clusters[k + 1].lo)
        else {
            return Ok(clusters);
        };
        let (a, b) = (clusters[k].clone(), clusters[k + 1].clone());
        let lo = a.lo.clone().max(b.lo.clone());
        let hi = a.hi.clone().min(b.hi.clone());
        // a common root inside the overlap is the root of both clusters
        let g = polys[a.members[0]].gcd(&polys[b.members[0]]);
        let shared = g.degree().unwrap_or(0) > 0 && {
            let gs = counting_sequence(&g)?;
            count_with(&gs, &ExtRat::Finite(lo.clone()), &ExtRat::Finite(hi.clone())) > 0
        };
        if shared {
            let mut members = a.members;
            members.extend(b.members);
            clusters[k] = Cluster { members, lo, hi };
            clusters.remove(k + 1);
        } else {
            clusters[k] = halve(a, polys, seqs);
            clusters[k + 1] = halve(b, polys, seqs);
        }
    }
}

/// Keeps the half of the bracket that holds the root.
fn halve(c: Cluster, polys: &[UniPoly], seqs: &[SturmSeq]) -> Cluster {
    let q = &polys[c.members[0]];
    let m = split_point(q, &c.lo, &c.hi);
    let left = count_with(
        &seqs[c.members[0]],
        &ExtRat::Finite(c.lo.clone()),
        &ExtRat::Finite(m.clone()),
    );
    if left > 0 {
        Cluster { hi: m, ..c }
    } else {
        Cluster { lo: m, ..c }
    }
}

/// Sturm sequence with every entry rescaled by a positive constant to a
/// primitive integer polynomial. Sign variations are unchanged.
fn counting_sequence(p: &UniPoly) -> Result<SturmSeq> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let mut polys = vec![p.primitive()];
    let d = p.derivative();
    if d.is_zero() {
        return Ok(SturmSeq { polys });
    }
    polys.push(d.primitive());
    loop {
        let n = polys.len();
        let r = polys[n - 2].rem(&polys[n - 1]);
        if r.is_zero() {
            break;
        }
        polys.push((-r).primitive());
    }
    Ok(SturmSeq { polys })
}

/// Disjoint brackets `(lo, hi)` each containing exactly one real root of the
/// squarefree polynomial `q`, sorted left to right. Endpoints are dyadic and
/// never roots of `q`.
pub fn isolate_roots(q: &UniPoly) -> Result<Vec<(Rat, Rat)>> {
    if q.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let q = q.squarefree_part();
    isolate_with(&q, &counting_sequence(&q)?)
}

fn isolate_with(q: &UniPoly, seq: &SturmSeq) -> Result<Vec<(Rat, Rat)>> {
    if q.degree() == Some(0) {
        return Ok(Vec::new());
    }
    let bound = q.root_bound();
    let mut limit = Rat::one();
    while limit <= bound {
        limit *= Rat::from_integer(2.into());
    }
    let lo = -limit.clone();
    let mut out = Vec::new();
    let mut stack = vec![(lo, limit)];
    while let Some((a, b)) = stack.pop() {
        let c = count_with(seq, &ExtRat::Finite(a.clone()), &ExtRat::Finite(b.clone()));
        match c {
            0 => {}
            1 => out.push((a, b)),
            _ => {
                let m = split_point(q, &a, &b);
                // right half first so the left half pops first
                stack.push((m.clone(), b));
                stack.push((a, m));
            }
        }
    }
    Ok(out)
}

/// A dyadic point strictly inside `(a, b)` that is not a root of `q`,
/// as close to the midpoint as possible.
fn split_point(q: &UniPoly, a: &Rat, b: &Rat) -> Rat {
    let two = Rat::from_integer(2.into());
    let mid = (a + b) / &two;
    if !q.eval(&mid).is_zero() {
        return mid;
    }
    let width = b - a;
    let mut step = &width / Rat::from_integer(8.into());
    loop {
        for cand in [&mid + &step, &mid - &step] {
            if !q.eval(&cand).is_zero() {
                return cand;
            }
        }
        step /= &two;
    }
}

/// Refines the bracket `(lo, hi)` of a simple root of the squarefree `q` by
/// bisection until its width is at most `width`.
pub fn refine_bracket(q: &UniPoly, lo: &Rat, hi: &Rat, width: &Rat) -> (Rat, Rat) {
    let (mut lo, mut hi) = (lo.clone(), hi.clone());
    let two = Rat::from_integer(2.into());
    let s_hi = q.sign_at(&ExtRat::Finite(hi.clone()));
    while &(&hi - &lo) > width {
        let m = (&lo + &hi) / &two;
        let s = q.sign_at(&ExtRat::Finite(m.clone()));
        if s == 0 {
            return (m.clone(), m);
        }
        if s == s_hi {
            hi = m;
        } else {
            lo = m;
        }
    }
    (lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::rat::{int, rat};

    fn fin(r: Rat) -> ExtRat {
        ExtRat::Finite(r)
    }

    #[test]
    fn sturm_examples() {
        let s = sturm_sequence(&UniPoly::from_ints(&[-1, 0, 1])).unwrap();
        assert_eq!(
            s.polys,
            vec![
                UniPoly::from_ints(&[-1, 0, 1]),
                UniPoly::from_ints(&[0, 2]),
                UniPoly::from_ints(&[1])
            ]
        );
        let s = sturm_sequence(&UniPoly::x()).unwrap();
        assert_eq!(s.polys, vec![UniPoly::x(), UniPoly::from_ints(&[1])]);
        let reduced = UniPoly::from_ints(&[1, -2, 1]).squarefree_part();
        let s = sturm_sequence(&reduced).unwrap();
        assert_eq!(s.polys, vec![UniPoly::from_ints(&[-1, 1]), UniPoly::from_ints(&[1])]);
        assert_eq!(sturm_sequence(&UniPoly::zero()), Err(Error::ZeroPolynomial));
    }

    #[test]
    fn count_examples() {
        let cubic = UniPoly::from_ints(&[-6, 11, -6, 1]);
        assert_eq!(count_roots(&cubic, &ExtRat::NegInf, &ExtRat::PosInf).unwrap(), 3);
        let no_roots = UniPoly::from_ints(&[1, 0, 1]);
        assert_eq!(count_roots(&no_roots, &ExtRat::NegInf, &ExtRat::PosInf).unwrap(), 0);
        let two = UniPoly::from_ints(&[-2, 0, 1]);
        assert_eq!(count_roots(&two, &fin(int(0)), &fin(rat(3, 2))).unwrap(), 1);
        assert_eq!(
            count_roots(&cubic, &fin(int(1)), &fin(int(5))),
            Err(Error::EndpointVanishes)
        );
        assert_eq!(
            count_roots(&cubic, &fin(int(5)), &fin(int(4))),
            Err(Error::EmptyInterval)
        );
    }

    #[test]
    fn count_is_half_open() {
        // roots 1, 2, 3; (1/2, 5/2] holds two
        let cubic = UniPoly::from_ints(&[-6, 11, -6, 1]);
        assert_eq!(count_roots(&cubic, &fin(rat(1, 2)), &fin(rat(5, 2))).unwrap(), 2);
        // repeated root counted once
        let sq = UniPoly::from_ints(&[1, -2, 1]);
        assert_eq!(count_roots(&sq, &ExtRat::NegInf, &ExtRat::PosInf).unwrap(), 1);
    }

    #[test]
    fn isolate_two_lines() {
        let part = isolate_family(&[UniPoly::from_ints(&[-1, 1]), UniPoly::from_ints(&[-2, 1])])
            .unwrap();
        assert_eq!(part.num_intervals(), 2);
        assert_eq!(part.root_flags, vec![vec![true, false], vec![false, true]]);
        let p = part.points[1].finite().unwrap();
        assert!(p > &int(1) && p < &int(2));
    }

    #[test]
    fn isolate_rootless() {
        let part = isolate_family(&[UniPoly::from_ints(&[1, 0, 1])]).unwrap();
        assert_eq!(part.points, vec![ExtRat::NegInf, ExtRat::PosInf]);
        assert_eq!(part.root_flags, vec![vec![false]]);
    }

    #[test]
    fn isolate_shared_root() {
        // {x, x(x-1)}: the interval holding 0 is flagged for both
        let part = isolate_family(&[UniPoly::x(), UniPoly::from_ints(&[0, -1, 1])]).unwrap();
        assert_eq!(part.num_intervals(), 2);
        let j0 = (0..part.num_intervals())
            .find(|&j| {
                let (a, b) = part.interval(j);
                a < &fin(int(0)) && &fin(int(0)) < b
            })
            .unwrap();
        assert!(part.has_root(j0, 0) && part.has_root(j0, 1));
        assert_eq!(isolate_family(&[]).unwrap_err(), Error::InvalidArgument("empty polynomial family".into()));
        assert_eq!(isolate_family(&[UniPoly::zero()]), Err(Error::ZeroPolynomial));
    }

    #[test]
    fn split_point_avoids_roots() {
        // x has its root exactly at the first midpoint 0
        let q = UniPoly::from_ints(&[0, -1, 0, 1]);
        let roots = isolate_roots(&q).unwrap();
        assert_eq!(roots.len(), 3);
        for (lo, hi) in &roots {
            assert!(!q.eval(lo).is_zero() && !q.eval(hi).is_zero());
        }
    }

    #[test]
    fn refine_brackets_sqrt2() {
        let q = UniPoly::from_ints(&[-2, 0, 1]);
        let (lo, hi) = refine_bracket(&q, &int(1), &int(2), &rat(1, 1024));
        assert!(&hi - &lo <= rat(1, 1024));
        assert!(&lo * &lo < int(2) && &hi * &hi > int(2));
    }
}
