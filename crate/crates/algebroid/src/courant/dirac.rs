//! Dirac structures with support on a coordinate subspace `Z = {x_s = 0}`.
//!
//! Bracket closure is tested on one lift `k̃` of each generator, obtained by
//! reading its polynomials over `X`. The result does not depend on the
//! lift: replacing `k̃` by `k̃ + f·q` with `f|_Z = 0` changes `{k̃₁,k̃₂}|_Z`
//! by `f·{…}|_Z + π(k̃)(f)·q|_Z`, and `π(k̃)` is tangent to `Z`, so
//! `π(k̃)(f)` also vanishes on `Z`.

use super::combine::{dotplus, CourantSum};
use super::data::{check_courant_morphism, opposite, CourantData};
use crate::error::{Error, Result};
use crate::linalg::{det, generic_rank, mat_vec, unit_vec, Mat};
use crate::report::Report;
use crate::scalar::Field;
use crate::symcalc::{print_poly, Chart, Poly};

#[derive(Clone, Debug)]
pub struct DiracData<S> {
    /// Indices of the coordinates set to zero on the support.
    pub support: Vec<usize>,
    /// Generators as sections over the support chart.
    pub generators: Vec<Vec<Poly<S>>>,
}

impl<S: Field> DiracData<S> {
    pub fn support_chart(&self, q: &CourantData<S>) -> Chart {
        q.chart.subspace(&self.support)
    }

    /// Lifts of the generators to sections over `X`.
    pub fn lifts(&self, q: &CourantData<S>) -> Vec<Vec<Poly<S>>> {
        let kept = q.chart.kept(&self.support);
        let n = q.nvars();
        self.generators.iter().map(|g| g.iter().map(|p| p.embed(n, &kept)).collect()).collect()
    }
}

fn restrict_mat<S: Field>(m: &Mat<S>, keep: &[usize]) -> Mat<S> {
    m.iter().map(|row| row.iter().map(|p| p.restrict(keep)).collect()).collect()
}

fn restrict_vec<S: Field>(v: &[Poly<S>], keep: &[usize]) -> Vec<Poly<S>> {
    v.iter().map(|p| p.restrict(keep)).collect()
}

/// Verifies isotropy, maximality, tangency of anchors and bracket closure.
/// Fails with an error on a degenerate pairing or dependent generators.
pub fn check_dirac<S: Field>(q: &CourantData<S>, k: &DiracData<S>) -> Result<Report> {
    let mut support = k.support.clone();
    support.sort_unstable();
    support.dedup();
    if support.iter().any(|&s| s >= q.nvars()) {
        return Err(Error::dim("support index out of range"));
    }
    let z = q.chart.subspace(&support);
    let keep = q.chart.kept(&support);
    let nz = z.dim();
    if k.generators.iter().any(|g| g.len() != q.rank || g.iter().any(|p| p.nvars() != nz)) {
        return Err(Error::dim("generators must be sections over the support chart"));
    }
    let pairing = restrict_mat(&q.pairing, &keep);
    if det(nz, &pairing).is_zero() {
        return Err(Error::invalid("pairing is degenerate on the support; maximality is undefined"));
    }
    let gens = &k.generators;
    let m = gens.len();
    if generic_rank(nz, gens) != m {
        return Err(Error::invalid("generators are dependent at the generic point"));
    }
    let pair_z = |x: &[Poly<S>], y: &[Poly<S>]| crate::linalg::dot(nz, x, &mat_vec(nz, &pairing, y));
    let mut rep = Report::new();

    let mut bad = None;
    'iso: for i in 0..m {
        for j in i..m {
            let w = pair_z(&gens[i], &gens[j]);
            if !w.is_zero() {
                bad = Some(format!("generators (k{},k{}): pairing = {}", i + 1, j + 1, print_poly(&w, &z)));
                break 'iso;
            }
        }
    }
    rep.record("isotropy", bad);

    rep.record(
        "maximality",
        if 2 * m == q.rank { None } else { Some(format!("{m} generators for rank {}", q.rank)) },
    );

    let anchor = restrict_mat(&q.anchor, &keep);
    let mut bad = None;
    'tan: for (i, g) in gens.iter().enumerate() {
        for &s in &support {
            let c: Poly<S> = g.iter().zip(&anchor).fold(Poly::zero(nz), |acc, (x, row)| &acc + &(x * &row[s]));
            if !c.is_zero() {
                bad = Some(format!("generator k{}: normal anchor component along ∂{} = {}", i + 1, q.chart.coords()[s], print_poly(&c, &z)));
                break 'tan;
            }
        }
    }
    rep.record("anchor_tangent", bad);

    if !support.is_empty() {
        let n = q.nvars();
        let mut bad = None;
        for &s in &support {
            let v = restrict_vec(&q.coanchor_of(&unit_vec(n, n, s)), &keep);
            let mut stacked = gens.clone();
            stacked.push(v);
            if generic_rank(nz, &stacked) != m {
                bad = Some(format!("π†(d{}) is not in the span", q.chart.coords()[s]));
                break;
            }
        }
        rep.record("contains_conormal", bad);
    }

    let lifts = k.lifts(q);
    let mut bad = None;
    'cl: for i in 0..m {
        for j in 0..m {
            let br = restrict_vec(&q.bracket(&lifts[i], &lifts[j]), &keep);
            for l in 0..m {
                let w = pair_z(&br, &gens[l]);
                if !w.is_zero() {
                    bad = Some(format!(
                        "⟨{{k{},k{}}}, k{}⟩ = {}",
                        i + 1,
                        j + 1,
                        l + 1,
                        print_poly(&w, &z)
                    ));
                    break 'cl;
                }
            }
        }
    }
    rep.record("bracket_closure", bad);
    Ok(rep)
}

/// Picks a maximal generically independent subfamily, in order.
pub fn independent_subset<S: Field>(n: usize, vecs: &[Vec<Poly<S>>]) -> Vec<Vec<Poly<S>>> {
    let mut out: Vec<Vec<Poly<S>>> = Vec::new();
    for v in vecs {
        let mut trial = out.clone();
        trial.push(v.clone());
        if generic_rank(n, &trial) == trial.len() {
            out = trial;
        }
    }
    out
}

/// The graph `{(q, φq)}` of a morphism `φ: Q₁ → Q₂` as a Dirac structure
/// in `Q₁ ∔ Q₂^op`.
pub fn graph_of_morphism<S: Field>(
    q1: &CourantData<S>,
    q2: &CourantData<S>,
    phi: &Mat<S>,
) -> Result<(CourantSum<S>, DiracData<S>)> {
    let rep = check_courant_morphism(q1, q2, phi);
    if !rep.all_passed() {
        return Err(Error::invalid(format!("not a Courant morphism: {:?}", rep.failed_names())));
    }
    let sum = dotplus(q1, &opposite(q2))?;
    let n = q1.nvars();
    let images = (0..q1.rank)
        .map(|a| {
            let e = q1.basis(a);
            let fe = mat_vec(n, phi, &e);
            sum.project_tuple(&[e, fe])
        })
        .collect::<Result<Vec<_>>>()?;
    let generators = independent_subset(n, &images);
    Ok((sum, DiracData { support: vec![], generators }))
}
