//! Inverse image of Courant algebroids as a sub-quotient of
//! `Ω¹_Y ⊕ f*Q ⊕ T_Y`, and the operations built on it.
//!
//! Ambient sections are flat vectors `[β | q | ξ]` of length
//! `dim Y + rank Q + dim Y`. The fiber product is cut out by
//! `df(ξ) = f*π(q)`; the quotient is by the relation generators
//! `(df∨(dx_i), -f*π†(dx_i), 0)`.

mod ops;

use crate::courant::{CourantData, CourantExtension};
use crate::error::{Error, Result};
use crate::linalg::{mat_vec, nullspace, transpose, unit_vec, vec_add, vec_is_zero, vec_scale, vec_sub, Mat, Solver, UnitRref};
use crate::report::Report;
use crate::scalar::Field;
use crate::symcalc::{ChartMap, KForm, Poly, VField};

pub use ops::{
    c_plusplus, check_c_plusplus, check_curvature_pullback, check_dirac_correspondence, check_twist_commute, conormal,
    courant_morphism_graph, dirac_preimage, i_plusplus_dirac, pullback_connection, MorphismGraph,
};

/// Supported presentations of `f⁺⁺Q`.
#[derive(Clone, Debug)]
pub enum CourantMode<S> {
    /// `Q` exact with a connection `∇₀`; row `i` is `∇₀(∂_i)`. `None` uses
    /// the splitting of `Q`.
    ExactSplit(Option<Mat<S>>),
    CoordinateEmbedding,
    CoordinateSubmersion,
    Identity,
}

impl<S: Field> CourantMode<S> {
    pub fn detect(f: &ChartMap<S>) -> Self {
        if f.is_identity() {
            CourantMode::Identity
        } else if f.embedding_shape().is_some() {
            CourantMode::CoordinateEmbedding
        } else if f.submersion_shape().is_some() {
            CourantMode::CoordinateSubmersion
        } else {
            CourantMode::ExactSplit(None)
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            CourantMode::ExactSplit(_) => "exact-split",
            CourantMode::CoordinateEmbedding => "coordinate-embedding",
            CourantMode::CoordinateSubmersion => "coordinate-submersion",
            CourantMode::Identity => "identity",
        }
    }
}

/// `f⁺⁺Q` with its presentation.
#[derive(Clone, Debug)]
pub struct PullbackPresentation<S> {
    pub map: ChartMap<S>,
    pub mode: &'static str,
    pub source: CourantData<S>,
    /// Free basis of the fiber product `Ω¹_Y ⊕ (f*Q ×_{f*T_X} T_Y)`.
    pub fiber_basis: Vec<Vec<Poly<S>>>,
    /// `(df∨(dx_i), -f*π†(dx_i), 0)`.
    pub relation_generators: Vec<Vec<Poly<S>>>,
    /// Indices into `fiber_basis` kept as the basis of the quotient.
    pub basis: Vec<usize>,
    pub result: CourantData<S>,
    /// Relations reduced to unit pivots, in fiber-basis coordinates.
    reduced: Vec<(usize, Vec<Poly<S>>)>,
    solver: Solver<S>,
    pulled_anchor: Mat<S>,
    pulled_pairing: Mat<S>,
    pulled_structure: Vec<Vec<Vec<Poly<S>>>>,
}

fn pull_mat<S: Field>(f: &ChartMap<S>, m: &Mat<S>) -> Mat<S> {
    m.iter().map(|row| row.iter().map(|p| f.pull(p)).collect()).collect()
}

fn stack<S: Field>(parts: &[&[Poly<S>]]) -> Vec<Poly<S>> {
    parts.iter().flat_map(|p| p.iter().cloned()).collect()
}

impl<S: Field> PullbackPresentation<S> {
    fn m(&self) -> usize {
        self.map.source.dim()
    }

    fn r(&self) -> usize {
        self.source.rank
    }

    /// Splits an ambient vector into `(β, q, ξ)`.
    pub fn split<'a>(&self, v: &'a [Poly<S>]) -> (&'a [Poly<S>], &'a [Poly<S>], &'a [Poly<S>]) {
        let (m, r) = (self.m(), self.r());
        (&v[..m], &v[m..m + r], &v[m + r..])
    }

    pub fn ambient_len(&self) -> usize {
        2 * self.m() + self.r()
    }

    /// `df(ξ) - f*π(q)`.
    pub fn constraint_defect(&self, v: &[Poly<S>]) -> Vec<Poly<S>> {
        let (_, q, xi) = self.split(v);
        let m = self.m();
        let n = self.map.target.dim();
        let x = VField { chart: self.map.source.clone(), comps: xi.to_vec() };
        let dfx = self.map.dmap(&x).expect("same chart");
        let sq = mat_vec(m, &transpose(m, &self.pulled_anchor, n), q);
        vec_sub(&dfx, &sq)
    }

    /// Reduces fiber-basis coordinates modulo the relations and keeps the
    /// basis entries.
    fn reduce(&self, mut c: Vec<Poly<S>>, reduced: &[(usize, Vec<Poly<S>>)]) -> Vec<Poly<S>> {
        for (col, row) in reduced {
            let k = c[*col].clone();
            if !k.is_zero() {
                c = vec_sub(&c, &vec_scale(&k, row));
            }
        }
        self.basis.iter().map(|&i| c[i].clone()).collect()
    }

    /// Coordinates of the class of an ambient fiber-product element.
    pub fn project(&self, v: &[Poly<S>]) -> Result<Vec<Poly<S>>> {
        if v.len() != self.ambient_len() {
            return Err(Error::dim("ambient element has the wrong length"));
        }
        if !vec_is_zero(&self.constraint_defect(v)) {
            return Err(Error::invalid("element violates the fiber-product constraint df(ξ) = f*π(q)"));
        }
        let c = self.solver.solve(v)?;
        Ok(self.reduce(c, &self.reduced))
    }

    /// Fiber-product coordinates modulo relations are zero.
    pub fn is_relation(&self, v: &[Poly<S>]) -> Result<bool> {
        Ok(vec_is_zero(&self.project(v)?))
    }

    /// `project` for an ambient element over another chart `h: Z → Y`,
    /// with all data pulled back along `h`.
    pub fn project_along(&self, h: &ChartMap<S>, v: &[Poly<S>]) -> Result<Vec<Poly<S>>> {
        h.target.check_same(&self.map.source, "projection along a map")?;
        let z = h.source.dim();
        let basis: Vec<Vec<Poly<S>>> = self.fiber_basis.iter().map(|b| b.iter().map(|p| h.pull(p)).collect()).collect();
        let c = Solver::new(z, basis, self.ambient_len())?.solve(v)?;
        let reduced: Vec<(usize, Vec<Poly<S>>)> =
            self.reduced.iter().map(|(col, row)| (*col, row.iter().map(|p| h.pull(p)).collect())).collect();
        Ok(self.reduce(c, &reduced))
    }

    /// Ambient representative of a section in basis coordinates.
    pub fn ambient(&self, coords: &[Poly<S>]) -> Vec<Poly<S>> {
        let m = self.m();
        let mut out = vec![Poly::zero(m); self.ambient_len()];
        for (c, &i) in coords.iter().zip(&self.basis) {
            if !c.is_zero() {
                out = vec_add(&out, &vec_scale(c, &self.fiber_basis[i]));
            }
        }
        out
    }

    /// `⟨(α,q,ξ),(β,p,η)⟩″ = f*⟨q,p⟩ + ι_ξβ + ι_ηα`.
    pub fn ambient_pair(&self, x: &[Poly<S>], y: &[Poly<S>]) -> Poly<S> {
        let m = self.m();
        let (a, q, xi) = self.split(x);
        let (b, p, eta) = self.split(y);
        let mut w = crate::linalg::dot(m, q, &mat_vec(m, &self.pulled_pairing, p));
        w = &w + &crate::linalg::dot(m, xi, b);
        &w + &crate::linalg::dot(m, eta, a)
    }

    /// `[(α, h⊗q, ξ), (β, j⊗p, η)]′ = (-ι_η dα + L_ξ β + j dh ⟨q,p⟩,
    /// hj⊗[q,p] - ι_η dh⊗q + L_ξ j⊗p, [ξ,η])`, expanded over the basis of `Q`.
    pub fn ambient_bracket(&self, x: &[Poly<S>], y: &[Poly<S>]) -> Result<Vec<Poly<S>>> {
        let chart = &self.map.source;
        let m = self.m();
        let r = self.r();
        let (a, h, xi) = self.split(x);
        let (b, j, eta) = self.split(y);
        let xi = VField { chart: chart.clone(), comps: xi.to_vec() };
        let eta = VField { chart: chart.clone(), comps: eta.to_vec() };
        let alpha = KForm::one_form(chart, a);
        let beta = KForm::one_form(chart, b);
        let mut omega = beta.lie(&xi)?.sub(&alpha.d().iota(&eta)?)?;
        let mut q = vec![Poly::zero(m); r];
        for (ia, ha) in h.iter().enumerate() {
            if ha.is_zero() {
                continue;
            }
            let dh = KForm::function(chart, ha.clone()).d();
            for (ib, jb) in j.iter().enumerate() {
                if jb.is_zero() {
                    continue;
                }
                let pr = &self.pulled_pairing[ia][ib];
                if !pr.is_zero() {
                    omega = omega.add(&dh.scale(&(jb * pr)))?;
                }
                q = vec_add(&q, &vec_scale(&(ha * jb), &self.pulled_structure[ia][ib]));
            }
            q[ia] = &q[ia] - &eta.apply(ha);
        }
        for (ib, jb) in j.iter().enumerate() {
            q[ib] = &q[ib] + &xi.apply(jb);
        }
        let t = xi.bracket(&eta)?;
        Ok(stack(&[&omega.as_covector(), &q, &t.comps]))
    }

    /// Verifies that every relation generator pairs to zero with the fiber
    /// product and that `[γ·rel, x]′` is again a relation, for `γ ∈ {1, y_1}`.
    pub fn check_relations(&self) -> Result<Report> {
        let m = self.m();
        let mut rep = Report::new();
        let mut bad = None;
        'p: for (i, rel) in self.relation_generators.iter().enumerate() {
            for (k, b) in self.fiber_basis.iter().enumerate() {
                let w = self.ambient_pair(rel, b);
                if !w.is_zero() {
                    bad = Some(format!("relation {} pairs with fiber generator {} to {}", i + 1, k + 1, crate::symcalc::print_poly(&w, &self.map.source)));
                    break 'p;
                }
            }
        }
        rep.record("relations_isotropic", bad);
        let mut gammas = vec![Poly::one(m)];
        if m > 0 {
            gammas.push(Poly::var(m, 0));
        }
        let mut bad = None;
        'b: for (i, rel) in self.relation_generators.iter().enumerate() {
            for g in &gammas {
                let grel = vec_scale(g, rel);
                for (k, b) in self.fiber_basis.iter().enumerate() {
                    let br = self.ambient_bracket(&grel, b)?;
                    if !self.is_relation(&br)? {
                        bad = Some(format!("[γ·relation {}, fiber generator {}]′ is not a relation", i + 1, k + 1));
                        break 'b;
                    }
                }
            }
        }
        rep.record("relations_absorbed", bad);
        Ok(rep)
    }
}

/// Builds `f⁺⁺Q` in the requested mode.
pub fn f_plusplus<S: Field>(f: &ChartMap<S>, q: &CourantData<S>, mode: CourantMode<S>) -> Result<PullbackPresentation<S>> {
    f.target.check_same(&q.chart, "inverse image")?;
    let m = f.source.dim();
    let n = f.target.dim();
    let r = q.rank;
    let len = 2 * m + r;
    let pulled_anchor = pull_mat(f, &q.anchor);
    let pulled_pairing = pull_mat(f, &q.pairing);
    let pulled_coanchor = pull_mat(f, &q.coanchor);
    let pulled_structure: Vec<Vec<Vec<Poly<S>>>> = q.structure.iter().map(|row| pull_mat(f, row)).collect();
    let zero = || vec![Poly::zero(m); len];
    // (q, ξ) placed into an ambient vector
    let amb = |qv: &[Poly<S>], xi: &[Poly<S>]| stack(&[&vec![Poly::zero(m); m], qv, xi]);
    let mode_name = mode.name();
    let mut fiber: Vec<Vec<Poly<S>>> = Vec::new();
    // fiber-basis columns eliminated first by the relations
    let mut first: Vec<usize> = Vec::new();
    match mode {
        CourantMode::Identity => {
            if !f.is_identity() {
                return Err(Error::unsupported("identity mode needs the identity map"));
            }
            for a in 0..r {
                fiber.push(amb(&unit_vec(m, r, a), &pulled_anchor[a]));
            }
        }
        CourantMode::CoordinateSubmersion => {
            let src = f
                .submersion_shape()
                .ok_or_else(|| Error::unsupported("map is not a coordinate submersion"))?;
            for a in 0..r {
                let mut xi = vec![Poly::zero(m); m];
                for (j, &s) in src.iter().enumerate() {
                    xi[s] = pulled_anchor[a][j].clone();
                }
                fiber.push(amb(&unit_vec(m, r, a), &xi));
            }
            for k in (0..m).filter(|k| !src.contains(k)) {
                fiber.push(amb(&vec![Poly::zero(m); r], &unit_vec(m, m, k)));
            }
        }
        CourantMode::CoordinateEmbedding => {
            let shape = f
                .embedding_shape()
                .ok_or_else(|| Error::unsupported("map is not a coordinate embedding"))?;
            let normal: Mat<S> = shape
                .zeroed
                .iter()
                .map(|&s| (0..r).map(|a| pulled_anchor[a][s].clone()).collect())
                .collect();
            let order: Vec<usize> = (0..r).collect();
            for k in nullspace(m, &normal, r, &order)? {
                let mut xi = vec![Poly::zero(m); m];
                for (j, src) in shape.source_of.iter().enumerate() {
                    if let Some(z) = *src {
                        for (a, ka) in k.iter().enumerate() {
                            if !ka.is_zero() {
                                xi[z] = &xi[z] + &(ka * &pulled_anchor[a][j]);
                            }
                        }
                    }
                }
                fiber.push(amb(&k, &xi));
            }
        }
        CourantMode::ExactSplit(nabla) => {
            CourantExtension::exact(q)
                .map_err(|e| Error::unsupported(format!("exact-split mode needs an exact Courant algebroid: {e}")))?;
            let nabla = match nabla {
                Some(nb) => crate::courant::Connection::new(q, nb)?.sections,
                None => q.splitting_or_derive()?,
            };
            let jac = f.jacobian();
            let pn = pull_mat(f, &nabla);
            for i in 0..m {
                let mut qv = vec![Poly::zero(m); r];
                for j in 0..n {
                    if !jac[j][i].is_zero() {
                        qv = vec_add(&qv, &vec_scale(&jac[j][i], &pn[j]));
                    }
                }
                fiber.push(amb(&qv, &unit_vec(m, m, i)));
            }
            for i in 0..n {
                let col: Vec<Poly<S>> = pulled_coanchor.iter().map(|row| row[i].clone()).collect();
                first.push(fiber.len());
                fiber.push(amb(&col, &vec![Poly::zero(m); m]));
            }
        }
    }
    let omega_start = fiber.len();
    for j in 0..m {
        let mut v = zero();
        v[j] = Poly::one(m);
        fiber.push(v);
    }
    if first.is_empty() {
        first = (omega_start..fiber.len()).collect();
    }
    let solver = Solver::new(m, fiber.clone(), len)?;

    let mut relations = Vec::new();
    for i in 0..n {
        let dual = f.dmap_dual(&unit_vec(m, n, i))?.as_covector();
        let col: Vec<Poly<S>> = pulled_coanchor.iter().map(|row| -row[i].clone()).collect();
        relations.push(stack(&[&dual, &col, &vec![Poly::zero(m); m]]));
    }
    let rel_coords = relations.iter().map(|v| solver.solve(v)).collect::<Result<Vec<_>>>()?;
    let mut order = first.clone();
    order.extend((0..fiber.len()).filter(|i| !first.contains(i)));
    let rr = UnitRref::new(m, &rel_coords, &order);
    if !rr.complete() {
        return Err(Error::unsupported("relations have no constant-pivot elimination"));
    }
    let reduced: Vec<(usize, Vec<Poly<S>>)> = rr.pivots.iter().map(|&(row, col)| (col, rr.reduced[row].clone())).collect();
    let pivot_cols: Vec<usize> = reduced.iter().map(|p| p.0).collect();
    let basis: Vec<usize> = (0..fiber.len()).filter(|i| !pivot_cols.contains(i)).collect();

    let mut pres = PullbackPresentation {
        map: f.clone(),
        mode: mode_name,
        source: q.clone(),
        fiber_basis: fiber,
        relation_generators: relations,
        basis,
        result: q.clone(),
        reduced,
        solver,
        pulled_anchor,
        pulled_pairing,
        pulled_structure,
    };
    for (k, v) in pres.fiber_basis.iter().enumerate() {
        if !vec_is_zero(&pres.constraint_defect(v)) {
            return Err(Error::invalid(format!("fiber generator {} violates the constraint", k + 1)));
        }
    }
    let reps: Vec<Vec<Poly<S>>> = pres.basis.iter().map(|&i| pres.fiber_basis[i].clone()).collect();
    let rank = reps.len();
    let zp = || Poly::zero(m);
    let mut anchor = vec![vec![zp(); m]; rank];
    let mut coanchor = vec![vec![zp(); m]; rank];
    let mut pairing = vec![vec![zp(); rank]; rank];
    let mut structure = vec![vec![vec![zp(); rank]; rank]; rank];
    for (a, x) in reps.iter().enumerate() {
        anchor[a] = pres.split(x).2.to_vec();
        for (b, y) in reps.iter().enumerate() {
            pairing[a][b] = pres.ambient_pair(x, y);
            structure[a][b] = pres.project(&pres.ambient_bracket(x, y)?)?;
        }
    }
    for j in 0..m {
        let mut v = zero();
        v[j] = Poly::one(m);
        let col = pres.project(&v)?;
        for a in 0..rank {
            coanchor[a][j] = col[a].clone();
        }
    }
    pres.result = CourantData::new(&f.source, anchor, coanchor, pairing, structure)
        .map_err(|e| Error::invalid(format!("inverse image data is inconsistent: {e}")))?;
    Ok(pres)
}

/// `f⁺⁺(m)` for a morphism `m: Q₁ → Q₂` (matrix over `X`), given
/// `from = f⁺⁺Q₁` and `to = f⁺⁺Q₂`.
pub fn pull_courant_morphism<S: Field>(
    m: &Mat<S>,
    from: &PullbackPresentation<S>,
    to: &PullbackPresentation<S>,
) -> Result<Mat<S>> {
    if from.map != to.map {
        return Err(Error::invalid("inverse images along different maps"));
    }
    let f = &from.map;
    let ny = f.source.dim();
    let pm = pull_mat(f, m);
    let cols = (0..from.result.rank)
        .map(|b| {
            let amb = from.ambient(&unit_vec(ny, from.result.rank, b));
            let (beta, q, xi) = from.split(&amb);
            to.project(&stack(&[beta, &mat_vec(ny, &pm, q), xi]))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(transpose(ny, &cols, to.result.rank))
}
