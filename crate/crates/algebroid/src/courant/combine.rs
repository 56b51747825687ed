use super::data::CourantData;
use crate::error::{Error, Result};
use crate::lie_algebroid::LieData;
use crate::linalg::{generic_rank, mat_mul, mat_vec, right_inverse, transpose, unit_vec, vec_sub, Mat, Solver};
use crate::scalar::Field;
use crate::symcalc::{ChartMap, Poly};

/// A Courant algebroid `Q` with an identification `Q / π†Ω¹ ≅ A` given by
/// the projection `Q → A` (`A.rank × Q.rank`).
#[derive(Clone, Debug)]
pub struct CourantExtension<S> {
    pub courant: CourantData<S>,
    pub base: LieData<S>,
    pub projection: Mat<S>,
}

impl<S: Field> CourantExtension<S> {
    pub fn new(courant: CourantData<S>, base: LieData<S>, projection: Mat<S>) -> Result<Self> {
        let q = &courant;
        let n = q.nvars();
        base.chart.check_same(&q.chart, "Courant extension")?;
        if projection.len() != base.rank || projection.iter().any(|row| row.len() != q.rank) {
            return Err(Error::dim("projection must be base.rank × rank"));
        }
        if q.rank != base.rank + n || generic_rank(n, &q.coanchor) != n {
            return Err(Error::invalid("sequence 0 → Ω¹ → Q → A → 0 is not exact (rank count)"));
        }
        if mat_mul(n, &projection, &q.coanchor, n).iter().flatten().any(|p| !p.is_zero()) {
            return Err(Error::invalid("projection does not kill the coanchor image"));
        }
        right_inverse(n, &projection, q.rank)
            .map_err(|_| Error::unsupported("projection has no constant-pivot splitting"))?;
        for a in 0..q.rank {
            let e = q.basis(a);
            let pe = mat_vec(n, &projection, &e);
            if base.anchor_of(&pe) != q.anchor_of(&e) {
                return Err(Error::invalid(format!("anchor does not factor through the projection at e{}", a + 1)));
            }
            for b in 0..q.rank {
                let lhs = mat_vec(n, &projection, &q.structure[a][b]);
                let rhs = base.bracket(&pe, &mat_vec(n, &projection, &q.basis(b)));
                if lhs != rhs {
                    return Err(Error::invalid(format!("projection is not a bracket morphism at (e{},e{})", a + 1, b + 1)));
                }
            }
        }
        Ok(CourantExtension { courant, base, projection })
    }

    /// An exact Courant algebroid as an extension of `T_X` via its anchor.
    pub fn exact(q: &CourantData<S>) -> Result<Self> {
        let n = q.nvars();
        q.splitting_or_derive()?;
        let proj = transpose(n, &q.anchor, n);
        CourantExtension::new(q.clone(), LieData::tangent(&q.chart), proj)
            .map_err(|e| Error::unsupported(format!("not an exact Courant algebroid: {e}")))
    }
}

/// A linear combination `Σ λ_k Q_k` with the data to map tuples of the
/// fiber product over `A` into it. The basis is the lifts `E_b` of the
/// basis of `A` followed by `F_j = π†(dx_j)`.
#[derive(Clone, Debug)]
pub struct CourantSum<S> {
    pub extension: CourantExtension<S>,
    pub parts: Vec<CourantExtension<S>>,
    pub lambdas: Vec<S>,
    splittings: Vec<Mat<S>>,
    coanchors: Vec<Solver<S>>,
}

fn pull_mat<S: Field>(f: Option<&ChartMap<S>>, m: &Mat<S>) -> Mat<S> {
    match f {
        Some(f) => m.iter().map(|row| row.iter().map(|p| f.pull(p)).collect()).collect(),
        None => m.clone(),
    }
}

impl<S: Field> CourantSum<S> {
    pub fn courant(&self) -> &CourantData<S> {
        &self.extension.courant
    }

    /// Coordinates of the class of `(q_1, …, q_m)`, whose components must
    /// have equal images in `A`.
    pub fn project_tuple(&self, tuple: &[Vec<Poly<S>>]) -> Result<Vec<Poly<S>>> {
        let n = self.courant().nvars();
        if tuple.len() != self.parts.len() {
            return Err(Error::dim("tuple length differs from the number of summands"));
        }
        let b = mat_vec(n, &self.parts[0].projection, &tuple[0]);
        let mut alpha = vec![Poly::zero(n); n];
        for (k, part) in self.parts.iter().enumerate() {
            if mat_vec(n, &part.projection, &tuple[k]) != b {
                return Err(Error::invalid("tuple components have different images in the base"));
            }
            let rest = vec_sub(&tuple[k], &mat_vec(n, &self.splittings[k], &b));
            let ak = self.coanchors[k].solve(&rest)?;
            for (acc, x) in alpha.iter_mut().zip(&ak) {
                *acc = &*acc + &x.scale(&self.lambdas[k]);
            }
        }
        let mut out = b;
        out.extend(alpha);
        Ok(out)
    }

    /// The tuple of lifts representing `E_b`.
    pub fn lift_tuple(&self, b: usize) -> Vec<Vec<Poly<S>>> {
        self.splittings.iter().map(|s| s.iter().map(|row| row[b].clone()).collect()).collect()
    }

    /// `project_tuple` for tuples over another chart, pulling all data
    /// back along `f` first.
    pub fn project_tuple_along(&self, f: &ChartMap<S>, tuple: &[Vec<Poly<S>>]) -> Result<Vec<Poly<S>>> {
        let ny = f.source.dim();
        let n = f.target.dim();
        let mut alpha = vec![Poly::zero(ny); n];
        let p0 = pull_mat(Some(f), &self.parts[0].projection);
        let b = mat_vec(ny, &p0, &tuple[0]);
        for (k, part) in self.parts.iter().enumerate() {
            if mat_vec(ny, &pull_mat(Some(f), &part.projection), &tuple[k]) != b {
                return Err(Error::invalid("tuple components have different images in the base"));
            }
            let rest = vec_sub(&tuple[k], &mat_vec(ny, &pull_mat(Some(f), &self.splittings[k]), &b));
            let cols: Vec<Vec<Poly<S>>> = (0..n)
                .map(|i| part.courant.coanchor.iter().map(|row| f.pull(&row[i])).collect())
                .collect();
            let ak = Solver::new(ny, cols, part.courant.rank)?.solve(&rest)?;
            for (acc, x) in alpha.iter_mut().zip(&ak) {
                *acc = &*acc + &x.scale(&self.lambdas[k]);
            }
        }
        let mut out = b;
        out.extend(alpha);
        Ok(out)
    }
}

/// The push-out `λ₁Q₁ ∔ ⋯ ∔ λ_mQ_m` of Courant extensions of one `A`.
/// The pairing is `Σ λ_k ⟨,⟩_k` on lifts; brackets are computed
/// component-wise on lifts and projected.
pub fn linear_combination<S: Field>(exts: &[CourantExtension<S>], lambdas: &[S]) -> Result<CourantSum<S>> {
    if exts.is_empty() {
        return Err(Error::invalid("need at least one summand"));
    }
    if exts.len() != lambdas.len() {
        return Err(Error::dim("one coefficient per summand is required"));
    }
    let a = &exts[0].base;
    if exts.iter().any(|e| !e.base.same_structure(a)) {
        return Err(Error::invalid("summands are not extensions of the same Lie algebroid"));
    }
    let n = a.nvars();
    let rb = a.rank;
    let r = rb + n;
    let splittings = exts
        .iter()
        .map(|e| right_inverse(n, &e.projection, e.courant.rank))
        .collect::<Result<Vec<_>>>()?;
    let coanchors = exts
        .iter()
        .map(|e| {
            let cols = (0..n).map(|i| e.courant.coanchor.iter().map(|row| row[i].clone()).collect()).collect();
            Solver::new(n, cols, e.courant.rank)
        })
        .collect::<Result<Vec<_>>>()?;
    let placeholder = exts[0].clone();
    let mut sum = CourantSum { extension: placeholder, parts: exts.to_vec(), lambdas: lambdas.to_vec(), splittings, coanchors };
    let lifts: Vec<Vec<Vec<Poly<S>>>> = (0..rb).map(|b| sum.lift_tuple(b)).collect();

    let zero = || Poly::zero(n);
    let mut anchor = vec![vec![zero(); n]; r];
    let mut coanchor = vec![vec![zero(); n]; r];
    let mut pairing = vec![vec![zero(); r]; r];
    let mut structure = vec![vec![vec![zero(); r]; r]; r];
    for b in 0..rb {
        anchor[b] = a.anchor[b].clone();
    }
    for j in 0..n {
        coanchor[rb + j][j] = Poly::one(n);
    }
    for b in 0..rb {
        for c in 0..rb {
            let mut w = zero();
            for (k, e) in exts.iter().enumerate() {
                w = &w + &e.courant.pair(&lifts[b][k], &lifts[c][k]).scale(&lambdas[k]);
            }
            pairing[b][c] = w;
            let tuple: Vec<Vec<Poly<S>>> =
                exts.iter().enumerate().map(|(k, e)| e.courant.bracket(&lifts[b][k], &lifts[c][k])).collect();
            structure[b][c] = sum.project_tuple(&tuple)?;
        }
        for j in 0..n {
            let s = a.anchor[b][j].clone();
            pairing[b][rb + j] = s.clone();
            pairing[rb + j][b] = s.clone();
            for i in 0..n {
                structure[b][rb + j][rb + i] = s.deriv(i);
            }
        }
    }
    let q = CourantData::new(&a.chart, anchor, coanchor, pairing, structure)?;
    let tangent_base = a.rank == n && a.anchor == LieData::tangent(&a.chart).anchor;
    let q = if tangent_base { q.with_splitting((0..n).map(|i| unit_vec(n, r, i)).collect())? } else { q };
    let proj: Mat<S> = (0..rb).map(|b| unit_vec(n, r, b)).collect();
    sum.extension = CourantExtension::new(q, a.clone(), proj)?;
    Ok(sum)
}

/// `Q₁ ∔ Q₂` for exact Courant algebroids: the push-out of the fiber
/// product over `T_X` along the sum `Ω¹ × Ω¹ → Ω¹`. Its rank is `2·dim`.
pub fn dotplus<S: Field>(q1: &CourantData<S>, q2: &CourantData<S>) -> Result<CourantSum<S>> {
    q1.chart.check_same(&q2.chart, "dotplus")?;
    let e1 = CourantExtension::exact(q1)?;
    let e2 = CourantExtension::exact(q2)?;
    linear_combination(&[e1, e2], &[S::one(), S::one()])
}
