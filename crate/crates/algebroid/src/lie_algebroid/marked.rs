use super::pullback::{f_plus, pull_morphism, LieMode, LiePullback};
use super::{check_lie_morphism, LieData, Origin};
use crate::error::{Error, Result};
use crate::linalg::{det, generic_rank, mat_mul, mat_vec, right_inverse, transpose, unit_vec, vec_is_zero, vec_scale, vec_sub, Mat};
use crate::report::Report;
use crate::scalar::Field;
use crate::symcalc::{ChartMap, Poly};

/// Lie algebroid with a central section `c` of nominal degree `degree`.
#[derive(Clone, Debug)]
pub struct MarkedLieData<S> {
    pub base: LieData<S>,
    pub marking: Vec<Poly<S>>,
    pub degree: i32,
}

impl<S: Field> MarkedLieData<S> {
    pub fn new(base: LieData<S>, marking: Vec<Poly<S>>, degree: i32) -> Result<Self> {
        if marking.len() != base.rank {
            return Err(Error::dim("marking length differs from the rank"));
        }
        if !base.anchor_of(&marking).is_zero() {
            return Err(Error::invalid("marking is not central: nonzero anchor"));
        }
        for a in 0..base.rank {
            if !vec_is_zero(&base.bracket(&marking, &base.basis(a))) {
                return Err(Error::invalid(format!("marking is not central: [c, e{}] ≠ 0", a + 1)));
            }
        }
        Ok(MarkedLieData { base, marking, degree })
    }

    /// `B ⊕ O·c` with zero brackets against `c`, which comes last.
    pub fn trivial(b: &LieData<S>, degree: i32) -> Self {
        let n = b.nvars();
        let r = b.rank + 1;
        let mut anchor = b.anchor.clone();
        anchor.push(vec![Poly::zero(n); n]);
        let mut structure = vec![vec![vec![Poly::zero(n); r]; r]; r];
        for i in 0..b.rank {
            for j in 0..b.rank {
                let mut v = b.structure[i][j].clone();
                v.push(Poly::zero(n));
                structure[i][j] = v;
            }
        }
        let base = LieData::new(&b.chart, anchor, structure).expect("consistent dimensions");
        let marking = unit_vec(n, r, r - 1);
        MarkedLieData { base, marking, degree }
    }
}

fn unit_pivot<S: Field>(v: &[Poly<S>]) -> Option<usize> {
    v.iter().position(|p| !p.is_zero() && p.is_constant())
}

/// `A / O·c` on the complement of a constant marking component, with the
/// quotient map (`(r-1) × r`).
pub fn quotient_by_marking<S: Field>(m: &MarkedLieData<S>) -> Result<(LieData<S>, Mat<S>)> {
    let a = &m.base;
    MarkedLieData::new(a.clone(), m.marking.clone(), m.degree)?;
    let n = a.nvars();
    let p = unit_pivot(&m.marking)
        .ok_or_else(|| Error::unsupported("marking has no constant component to split off"))?;
    let cp = m.marking[p].as_constant().unwrap();
    let keep: Vec<usize> = (0..a.rank).filter(|&i| i != p).collect();
    let mut proj = vec![vec![Poly::zero(n); a.rank]; keep.len()];
    for (row, &k) in keep.iter().enumerate() {
        proj[row][k] = Poly::one(n);
        proj[row][p] = -m.marking[k].scale(&(S::one() / cp.clone()));
    }
    let anchor: Mat<S> = keep.iter().map(|&k| a.anchor[k].clone()).collect();
    let structure = keep
        .iter()
        .map(|&i| keep.iter().map(|&j| mat_vec(n, &proj, &a.structure[i][j])).collect())
        .collect();
    let mut q = LieData::new(&a.chart, anchor, structure)?;
    q.origin = Origin::Quotient;
    if !check_lie_morphism(a, &q, &proj).all_passed() {
        return Err(Error::invalid("quotient map is not a morphism"));
    }
    Ok((q, proj))
}

/// An extension `0 → O·c → A → B → 0`.
#[derive(Clone, Debug)]
pub struct OExtensionData<S> {
    pub marked: MarkedLieData<S>,
    pub quotient: LieData<S>,
    /// `B.rank × A.rank`.
    pub projection: Mat<S>,
}

impl<S: Field> OExtensionData<S> {
    pub fn new(marked: MarkedLieData<S>, quotient: LieData<S>, projection: Mat<S>) -> Result<Self> {
        let a = &marked.base;
        let n = a.nvars();
        quotient.chart.check_same(&a.chart, "extension")?;
        if projection.len() != quotient.rank || projection.iter().any(|r| r.len() != a.rank) {
            return Err(Error::dim("projection must be quotient.rank × rank"));
        }
        if !vec_is_zero(&mat_vec(n, &projection, &marked.marking)) {
            return Err(Error::invalid("projection does not kill the marking"));
        }
        if a.rank != quotient.rank + 1 || generic_rank(n, &projection) != quotient.rank {
            return Err(Error::invalid("kernel of the projection is not the marking line"));
        }
        right_inverse(n, &projection, a.rank)
            .map_err(|_| Error::unsupported("projection has no constant-pivot splitting"))?;
        let rep = check_lie_morphism(a, &quotient, &projection);
        if !rep.all_passed() {
            return Err(Error::invalid(format!("projection is not a morphism: {:?}", rep.failed_names())));
        }
        Ok(OExtensionData { marked, quotient, projection })
    }

    pub fn from_marked(marked: MarkedLieData<S>) -> Result<Self> {
        let (q, p) = quotient_by_marking(&marked)?;
        OExtensionData::new(marked, q, p)
    }
}

/// A Baer combination `Σ λ_k A_k` together with the data needed to map
/// tuples of the fiber product into it.
#[derive(Clone, Debug)]
pub struct BaerSum<S> {
    pub extension: OExtensionData<S>,
    pub parts: Vec<OExtensionData<S>>,
    pub lambdas: Vec<S>,
    splittings: Vec<Mat<S>>,
}

impl<S: Field> BaerSum<S> {
    /// Coordinates of the class of a tuple `(a_1, …, a_m)` with equal
    /// images in `B`. `f` pulls the data back first, for tuples over
    /// another chart.
    pub fn project_tuple(&self, f: Option<&ChartMap<S>>, tuple: &[Vec<Poly<S>>]) -> Result<Vec<Poly<S>>> {
        let pull = |p: &Poly<S>| match f {
            Some(f) => f.pull(p),
            None => p.clone(),
        };
        let pm = |m: &Mat<S>| -> Mat<S> { m.iter().map(|r| r.iter().map(pull).collect()).collect() };
        let n = tuple.first().and_then(|v| v.first()).map(|p| p.nvars()).unwrap_or_else(|| match f {
            Some(f) => f.source.dim(),
            None => self.extension.quotient.nvars(),
        });
        if tuple.len() != self.parts.len() {
            return Err(Error::dim("tuple length differs from the number of summands"));
        }
        let b = mat_vec(n, &pm(&self.parts[0].projection), &tuple[0]);
        let mut coeff = Poly::zero(n);
        for (k, part) in self.parts.iter().enumerate() {
            if mat_vec(n, &pm(&part.projection), &tuple[k]) != b {
                return Err(Error::invalid("tuple components have different images in the quotient"));
            }
            let rest = vec_sub(&tuple[k], &mat_vec(n, &pm(&self.splittings[k]), &b));
            let c: Vec<Poly<S>> = part.marked.marking.iter().map(pull).collect();
            let p = unit_pivot(&c).ok_or_else(|| Error::unsupported("marking has no constant component"))?;
            let mu = rest[p].scale(&(S::one() / c[p].as_constant().unwrap()));
            if vec_scale(&mu, &c) != rest {
                return Err(Error::invalid("tuple difference is not on the marking line"));
            }
            coeff = &coeff + &mu.scale(&self.lambdas[k]);
        }
        let mut out = b;
        out.push(coeff);
        Ok(out)
    }

    /// Tuple representing the basis section `E_b` (the lifts of `e'_b`).
    pub fn lift_tuple(&self, f: Option<&ChartMap<S>>, b: usize) -> Vec<Vec<Poly<S>>> {
        self.splittings
            .iter()
            .map(|s| {
                s.iter()
                    .map(|row| match f {
                        Some(f) => f.pull(&row[b]),
                        None => row[b].clone(),
                    })
                    .collect()
            })
            .collect()
    }
}

/// The push-out `λ₁A₁ ∔ ⋯ ∔ λ_mA_m` of extensions of one `B`. Its basis is
/// the lifts `E_b` of the basis of `B` followed by the marking.
pub fn baer_combination<S: Field>(exts: &[OExtensionData<S>], lambdas: &[S]) -> Result<BaerSum<S>> {
    if exts.is_empty() {
        return Err(Error::invalid("need at least one extension"));
    }
    if exts.len() != lambdas.len() {
        return Err(Error::dim("one coefficient per extension is required"));
    }
    let b = &exts[0].quotient;
    if exts.iter().any(|e| !e.quotient.same_structure(b)) {
        return Err(Error::invalid("extensions are not over the same quotient"));
    }
    let n = b.nvars();
    let rb = b.rank;
    let splittings = exts
        .iter()
        .map(|e| right_inverse(n, &e.projection, e.marked.base.rank))
        .collect::<Result<Vec<_>>>()?;
    let mut sum = BaerSum {
        extension: trivial_extension(b, exts[0].marked.degree),
        parts: exts.to_vec(),
        lambdas: lambdas.to_vec(),
        splittings,
    };
    let r = rb + 1;
    let lifts: Vec<Vec<Vec<Poly<S>>>> = (0..rb).map(|i| sum.lift_tuple(None, i)).collect();
    let mut structure = vec![vec![vec![Poly::zero(n); r]; r]; r];
    for i in 0..rb {
        for j in i + 1..rb {
            let tuple: Vec<Vec<Poly<S>>> = exts
                .iter()
                .enumerate()
                .map(|(k, e)| e.marked.base.bracket(&lifts[i][k], &lifts[j][k]))
                .collect();
            let coords = sum.project_tuple(None, &tuple)?;
            structure[j][i] = coords.iter().map(|p| -p.clone()).collect();
            structure[i][j] = coords;
        }
    }
    let mut anchor: Mat<S> = (0..rb).map(|i| exts[0].marked.base.anchor_of(&lifts[i][0]).comps).collect();
    anchor.push(vec![Poly::zero(n); n]);
    let mut base = LieData::new(&b.chart, anchor, structure)?;
    base.origin = Origin::Combination;
    let marked = MarkedLieData::new(base, unit_vec(n, r, rb), exts[0].marked.degree)?;
    let mut proj = vec![vec![Poly::zero(n); r]; rb];
    for (i, row) in proj.iter_mut().enumerate() {
        row[i] = Poly::one(n);
    }
    sum.extension = OExtensionData::new(marked, b.clone(), proj)?;
    Ok(sum)
}

/// `B ⊕ O·c` as an extension of `B`.
pub fn trivial_extension<S: Field>(b: &LieData<S>, degree: i32) -> OExtensionData<S> {
    let marked = MarkedLieData::trivial(b, degree);
    let n = b.nvars();
    let proj = (0..b.rank).map(|i| unit_vec(n, b.rank + 1, i)).collect();
    OExtensionData { marked, quotient: b.clone(), projection: proj }
}

/// `f⁺M` with marking the image of `(0, f*c)`.
pub fn f_plus_marked<S: Field>(
    f: &ChartMap<S>,
    m: &MarkedLieData<S>,
    mode: LieMode<S>,
) -> Result<(MarkedLieData<S>, LiePullback<S>)> {
    let pb = f_plus(f, &m.base, mode)?;
    let ny = f.source.dim();
    let c: Vec<Poly<S>> = m.marking.iter().map(|p| f.pull(p)).collect();
    let marking = pb.project(&vec![Poly::zero(ny); ny], &c)?;
    let marked = MarkedLieData::new(pb.result.clone(), marking, m.degree)?;
    Ok((marked, pb))
}

fn pull_extension<S: Field>(
    f: &ChartMap<S>,
    e: &OExtensionData<S>,
    qb: &LiePullback<S>,
) -> Result<(OExtensionData<S>, LiePullback<S>)> {
    let (marked, pa) = f_plus_marked(f, &e.marked, LieMode::detect(f))?;
    let proj = pull_morphism(&e.projection, &pa, qb)?;
    Ok((OExtensionData::new(marked, qb.result.clone(), proj)?, pa))
}

/// Builds `λ₁f⁺A₁ ∔ λ₂f⁺A₂` and `f⁺(λ₁A₁ ∔ λ₂A₂)` and verifies that the
/// canonical map between them is an isomorphism of extensions.
pub fn check_extension_pullback_linear<S: Field>(
    f: &ChartMap<S>,
    e1: &OExtensionData<S>,
    e2: &OExtensionData<S>,
    l1: S,
    l2: S,
) -> Result<Report> {
    let lam = [l1, l2];
    let qb = f_plus(f, &e1.quotient, LieMode::detect(f))?;
    let (p1, pa1) = pull_extension(f, e1, &qb)?;
    let (p2, pa2) = pull_extension(f, e2, &qb)?;
    let lhs = baer_combination(&[p1, p2], &lam)?;
    let rhs_x = baer_combination(&[e1.clone(), e2.clone()], &lam)?;
    let (rhs, pc) = pull_extension(f, &rhs_x.extension, &qb)?;

    let ny = f.source.dim();
    let rb = qb.result.rank;
    let pas = [&pa1, &pa2];
    let mut cols = Vec::with_capacity(rb + 1);
    for b in 0..rb {
        let tuple = lhs.lift_tuple(None, b);
        let mut xi = None;
        let mut amb = Vec::new();
        for (k, t) in tuple.iter().enumerate() {
            let (x, a) = pas[k].ambient(t);
            if xi.get_or_insert_with(|| x.clone()) != &x {
                return Err(Error::invalid("lifted components have different anchors"));
            }
            amb.push(a);
        }
        let g = rhs_x.project_tuple(Some(f), &amb)?;
        cols.push(pc.project(&xi.unwrap(), &g)?);
    }
    let c: Vec<Poly<S>> = rhs_x.extension.marked.marking.iter().map(|p| f.pull(p)).collect();
    cols.push(pc.project(&vec![Poly::zero(ny); ny], &c)?);
    let phi = transpose(ny, &cols, rhs.marked.base.rank);

    let l = &lhs.extension;
    let mut rep = check_lie_morphism(&l.marked.base, &rhs.marked.base, &phi);
    let mk = mat_vec(ny, &phi, &l.marked.marking);
    rep.record(
        "marking",
        if mk == rhs.marked.marking { None } else { Some("marking is not preserved".into()) },
    );
    let compat = mat_mul(ny, &rhs.projection, &phi, l.marked.base.rank) == l.projection;
    rep.record("projection", if compat { None } else { Some("projections do not commute".into()) });
    let dt = det(ny, &phi);
    let inv = dt.is_constant() && !dt.is_zero();
    rep.record("invertible", if inv { None } else { Some(format!("determinant {dt:?}")) });
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie_algebroid::check_lie_algebroid;
    use crate::symcalc::Chart;
    use crate::Rat;

    #[test]
    fn trivial_quotient_recovers_base() {
        let x = Chart::numbered("R2", "x", 2);
        let t = LieData::<Rat>::tangent(&x);
        let m = MarkedLieData::trivial(&t, 0);
        let (q, _) = quotient_by_marking(&m).unwrap();
        assert!(q.same_structure(&t));
        assert!(check_lie_algebroid(&m.base, 10, 0).all_passed());
    }
}
