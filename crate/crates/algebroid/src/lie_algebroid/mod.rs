//! Lie algebroids given by anchor matrices and structure functions on a
//! free module, their inverse images, composition maps and extensions.

mod marked;
mod pullback;

pub use marked::{
    baer_combination, check_extension_pullback_linear, f_plus_marked, quotient_by_marking, trivial_extension, BaerSum,
    MarkedLieData, OExtensionData,
};
pub use pullback::{
    c_plus, check_c_plus_assoc, check_c_plus_morphism, f_plus, pull_morphism, LieMode, LiePullback,
};

use crate::error::{Error, Result};
use crate::linalg::{unit_vec, vec_add, vec_is_zero, vec_scale, vec_sub, Mat};
use crate::report::Report;
use crate::sample::Sampler;
use crate::scalar::Field;
use crate::symcalc::{print_poly, print_vfield, Chart, Poly, VField};

/// How a Lie algebroid was obtained.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Origin {
    Base,
    Pullback(String),
    Quotient,
    Combination,
}

/// Free Lie algebroid on a chart: `σ(e_a) = Σ anchor[a][i] ∂_i` and
/// `[e_a, e_b] = Σ structure[a][b][k] e_k`, extended by the Leibniz rule.
#[derive(Clone, Debug)]
pub struct LieData<S> {
    pub chart: Chart,
    pub rank: usize,
    pub anchor: Mat<S>,
    pub structure: Vec<Vec<Vec<Poly<S>>>>,
    pub origin: Origin,
}

impl<S: Field> LieData<S> {
    pub fn new(chart: &Chart, anchor: Mat<S>, structure: Vec<Vec<Vec<Poly<S>>>>) -> Result<Self> {
        let rank = anchor.len();
        let n = chart.dim();
        if anchor.iter().any(|row| row.len() != n) {
            return Err(Error::dim("anchor rows must have one entry per coordinate"));
        }
        if structure.len() != rank
            || structure.iter().any(|row| row.len() != rank || row.iter().any(|v| v.len() != rank))
        {
            return Err(Error::dim("structure functions must be rank × rank × rank"));
        }
        let all = anchor.iter().flatten().chain(structure.iter().flatten().flatten());
        if all.into_iter().any(|p| p.nvars() != n) {
            return Err(Error::dim("structure data must live on the algebroid's chart"));
        }
        Ok(LieData { chart: chart.clone(), rank, anchor, structure, origin: Origin::Base })
    }

    /// Zero bracket data of the given rank with the given anchor.
    pub fn abelian(chart: &Chart, anchor: Mat<S>) -> Result<Self> {
        let r = anchor.len();
        let n = chart.dim();
        LieData::new(chart, anchor, vec![vec![vec![Poly::zero(n); r]; r]; r])
    }

    /// The tangent algebroid `T_X` in the coordinate frame.
    pub fn tangent(chart: &Chart) -> Self {
        let n = chart.dim();
        let anchor = (0..n).map(|i| unit_vec(n, n, i)).collect();
        LieData::abelian(chart, anchor).expect("consistent dimensions")
    }

    pub fn nvars(&self) -> usize {
        self.chart.dim()
    }

    pub fn zero_section(&self) -> Vec<Poly<S>> {
        vec![Poly::zero(self.nvars()); self.rank]
    }

    pub fn basis(&self, a: usize) -> Vec<Poly<S>> {
        unit_vec(self.nvars(), self.rank, a)
    }

    pub fn anchor_of(&self, q: &[Poly<S>]) -> VField<S> {
        let n = self.nvars();
        let mut comps = vec![Poly::zero(n); n];
        for (qa, row) in q.iter().zip(&self.anchor) {
            if qa.is_zero() {
                continue;
            }
            for (c, s) in comps.iter_mut().zip(row) {
                if !s.is_zero() {
                    *c = &*c + &(qa * s);
                }
            }
        }
        VField { chart: self.chart.clone(), comps }
    }

    /// Bracket of arbitrary sections.
    pub fn bracket(&self, q: &[Poly<S>], p: &[Poly<S>]) -> Vec<Poly<S>> {
        let sq = self.anchor_of(q);
        let sp = self.anchor_of(p);
        let mut out = self.zero_section();
        for (a, fa) in q.iter().enumerate() {
            if fa.is_zero() {
                continue;
            }
            for (b, gb) in p.iter().enumerate() {
                if gb.is_zero() || vec_is_zero(&self.structure[a][b]) {
                    continue;
                }
                out = vec_add(&out, &vec_scale(&(fa * gb), &self.structure[a][b]));
            }
        }
        for (b, gb) in p.iter().enumerate() {
            out[b] = &out[b] + &sq.apply(gb);
        }
        for (a, fa) in q.iter().enumerate() {
            out[a] = &out[a] - &sp.apply(fa);
        }
        out
    }

    /// Same anchor and structure functions.
    pub fn same_structure(&self, other: &LieData<S>) -> bool {
        self.chart == other.chart
            && self.rank == other.rank
            && self.anchor == other.anchor
            && self.structure == other.structure
    }

    pub fn section_string(&self, q: &[Poly<S>]) -> String {
        section_string(&self.chart, q)
    }
}

pub(crate) fn section_string<S: Field>(chart: &Chart, q: &[Poly<S>]) -> String {
    let parts: Vec<String> = q.iter().map(|p| print_poly(p, chart)).collect();
    format!("({})", parts.join(", "))
}

/// Verifies antisymmetry, the Jacobi identity and the anchor being a
/// bracket morphism on generators (exactly), and the Leibniz rule on
/// seeded random sections.
pub fn check_lie_algebroid<S: Field>(a: &LieData<S>, samples: usize, seed: u64) -> Report {
    let mut rep = Report::new();
    let r = a.rank;
    let e: Vec<Vec<Poly<S>>> = (0..r).map(|i| a.basis(i)).collect();

    let mut bad = None;
    'anti: for i in 0..r {
        for j in i..r {
            let s = vec_add(&a.structure[i][j], &a.structure[j][i]);
            if !vec_is_zero(&s) {
                bad = Some(format!("[e{},e{}] + [e{},e{}] = {}", i + 1, j + 1, j + 1, i + 1, a.section_string(&s)));
                break 'anti;
            }
        }
    }
    rep.record("antisymmetry", bad);

    let mut bad = None;
    'jac: for i in 0..r {
        for j in i + 1..r {
            for k in j + 1..r {
                let t1 = a.bracket(&e[i], &a.bracket(&e[j], &e[k]));
                let t2 = a.bracket(&e[j], &a.bracket(&e[k], &e[i]));
                let t3 = a.bracket(&e[k], &a.bracket(&e[i], &e[j]));
                let s = vec_add(&vec_add(&t1, &t2), &t3);
                if !vec_is_zero(&s) {
                    bad = Some(format!("generators (e{},e{},e{}): jacobiator = {}", i + 1, j + 1, k + 1, a.section_string(&s)));
                    break 'jac;
                }
            }
        }
    }
    rep.record("jacobi", bad);

    let mut bad = None;
    'anc: for i in 0..r {
        for j in i + 1..r {
            let lhs = a.anchor_of(&a.bracket(&e[i], &e[j]));
            let rhs = a.anchor_of(&e[i]).bracket(&a.anchor_of(&e[j])).expect("same chart");
            if lhs != rhs {
                bad = Some(format!("generators (e{},e{}): defect = {}", i + 1, j + 1, print_vfield(&lhs.sub(&rhs))));
                break 'anc;
            }
        }
    }
    rep.record("anchor_morphism", bad);

    let mut smp = Sampler::new(seed);
    let n = a.nvars();
    let mut bad = None;
    for t in 0..samples {
        let q = smp.section(n, r);
        let p = smp.section(n, r);
        let f: Poly<S> = smp.poly(n);
        let lhs = a.bracket(&q, &vec_scale(&f, &p));
        let rhs = vec_add(&vec_scale(&a.anchor_of(&q).apply(&f), &p), &vec_scale(&f, &a.bracket(&q, &p)));
        if lhs != rhs {
            bad = Some(format!("sample {t}: defect = {}", a.section_string(&vec_sub(&lhs, &rhs))));
            break;
        }
    }
    rep.record("leibniz_rule", bad);
    rep
}

/// Checks that `m` (target.rank × source.rank) commutes with anchors and
/// brackets on generators.
pub fn check_lie_morphism<S: Field>(src: &LieData<S>, tgt: &LieData<S>, m: &Mat<S>) -> Report {
    let mut rep = Report::new();
    let apply = |v: &[Poly<S>]| -> Vec<Poly<S>> { crate::linalg::mat_vec(src.nvars(), m, v) };
    let mut bad = None;
    for a in 0..src.rank {
        let e = src.basis(a);
        if tgt.anchor_of(&apply(&e)) != src.anchor_of(&e) {
            bad = Some(format!("anchor differs on e{}", a + 1));
            break;
        }
    }
    rep.record("anchor", bad);
    let mut bad = None;
    'br: for a in 0..src.rank {
        for b in 0..src.rank {
            let lhs = apply(&src.bracket(&src.basis(a), &src.basis(b)));
            let rhs = tgt.bracket(&apply(&src.basis(a)), &apply(&src.basis(b)));
            if lhs != rhs {
                bad = Some(format!("bracket of (e{},e{}): defect = {}", a + 1, b + 1, tgt.section_string(&vec_sub(&lhs, &rhs))));
                break 'br;
            }
        }
    }
    rep.record("bracket", bad);
    rep
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rat;

    #[test]
    fn tangent_algebroid_passes() {
        let x = Chart::numbered("R2", "x", 2);
        let t = LieData::<Rat>::tangent(&x);
        assert!(check_lie_algebroid(&t, 20, 0).all_passed());
    }

    #[test]
    fn rank_one_abelian_passes() {
        let x = Chart::numbered("R2", "x", 2);
        let a = LieData::<Rat>::abelian(&x, vec![vec![Poly::zero(2), Poly::zero(2)]]).unwrap();
        assert!(check_lie_algebroid(&a, 20, 0).all_passed());
    }
}
