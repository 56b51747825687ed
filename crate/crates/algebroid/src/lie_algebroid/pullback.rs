use super::{check_lie_morphism, LieData, Origin};
use crate::error::{Error, Result};
use crate::linalg::{mat_mul, mat_vec, nullspace, right_inverse, transpose, unit_vec, vec_add, vec_scale, vec_sub, Mat, Solver};
use crate::report::Report;
use crate::sample::Sampler;
use crate::scalar::Field;
use crate::symcalc::{ChartMap, Poly, VField};

/// Supported presentations of the fiber product `T_Y ×_{f*T_X} f*A`.
#[derive(Clone, Debug)]
pub enum LieMode<S> {
    /// Surjective anchor with a splitting `∇₀`; row `i` is `∇₀(∂_i)`.
    /// `None` derives one by constant-pivot elimination.
    TransitiveSplit(Option<Mat<S>>),
    CoordinateEmbedding,
    CoordinateSubmersion,
    Identity,
}

impl<S: Field> LieMode<S> {
    /// Picks the most specific mode that applies to `f`.
    pub fn detect(f: &ChartMap<S>) -> Self {
        if f.is_identity() {
            LieMode::Identity
        } else if f.embedding_shape().is_some() {
            LieMode::CoordinateEmbedding
        } else if f.submersion_shape().is_some() {
            LieMode::CoordinateSubmersion
        } else {
            LieMode::TransitiveSplit(None)
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            LieMode::TransitiveSplit(_) => "transitive-split",
            LieMode::CoordinateEmbedding => "coordinate-embedding",
            LieMode::CoordinateSubmersion => "coordinate-submersion",
            LieMode::Identity => "identity",
        }
    }
}

/// An inverse image `f⁺A` together with its free presentation inside
/// `T_Y ⊕ f*A`.
#[derive(Clone, Debug)]
pub struct LiePullback<S> {
    pub map: ChartMap<S>,
    pub mode: &'static str,
    pub source: LieData<S>,
    /// Ambient representatives `(ξ, a)` of the basis sections.
    pub basis: Vec<(Vec<Poly<S>>, Vec<Poly<S>>)>,
    pub result: LieData<S>,
    solver: Solver<S>,
    pulled_anchor: Mat<S>,
    pulled_structure: Vec<Vec<Vec<Poly<S>>>>,
}

impl<S: Field> LiePullback<S> {
    fn m(&self) -> usize {
        self.map.source.dim()
    }

    /// `df(ξ) - f*σ(a)`.
    fn constraint_defect(&self, xi: &[Poly<S>], a: &[Poly<S>]) -> Vec<Poly<S>> {
        let v = VField { chart: self.map.source.clone(), comps: xi.to_vec() };
        let dfx = self.map.dmap(&v).expect("same chart");
        let sa = mat_vec(self.m(), &transpose(self.m(), &self.pulled_anchor, self.map.target.dim()), a);
        vec_sub(&dfx, &sa)
    }

    /// Coordinates of an element `(ξ, a)` of the fiber product.
    pub fn project(&self, xi: &[Poly<S>], a: &[Poly<S>]) -> Result<Vec<Poly<S>>> {
        if xi.len() != self.m() || a.len() != self.source.rank {
            return Err(Error::dim("ambient element has the wrong shape"));
        }
        if !crate::linalg::vec_is_zero(&self.constraint_defect(xi, a)) {
            return Err(Error::invalid("element violates the fiber-product constraint df(ξ) = f*σ(a)"));
        }
        let mut v = xi.to_vec();
        v.extend_from_slice(a);
        self.solver.solve(&v)
    }

    /// Ambient representative of a section given in basis coordinates.
    pub fn ambient(&self, coords: &[Poly<S>]) -> (Vec<Poly<S>>, Vec<Poly<S>>) {
        let m = self.m();
        let mut xi = vec![Poly::zero(m); m];
        let mut a = vec![Poly::zero(m); self.source.rank];
        for (c, (bx, ba)) in coords.iter().zip(&self.basis) {
            if c.is_zero() {
                continue;
            }
            xi = vec_add(&xi, &vec_scale(c, bx));
            a = vec_add(&a, &vec_scale(c, ba));
        }
        (xi, a)
    }

    /// Bracket on `T_Y ⊕ f*A`:
    /// `[(ξ, Σh_a e_a), (η, Σg_b e_b)] = ([ξ,η], Σ h_a g_b f*[e_a,e_b] + ξ(g_b) e_b - η(h_a) e_a)`.
    pub fn ambient_bracket(
        &self,
        x: &(Vec<Poly<S>>, Vec<Poly<S>>),
        y: &(Vec<Poly<S>>, Vec<Poly<S>>),
    ) -> (Vec<Poly<S>>, Vec<Poly<S>>) {
        ambient_bracket(&self.map.source, &self.pulled_structure, x, y)
    }
}

pub(crate) fn ambient_bracket<S: Field>(
    chart: &crate::symcalc::Chart,
    pulled_structure: &[Vec<Vec<Poly<S>>>],
    x: &(Vec<Poly<S>>, Vec<Poly<S>>),
    y: &(Vec<Poly<S>>, Vec<Poly<S>>),
) -> (Vec<Poly<S>>, Vec<Poly<S>>) {
    let xi = VField { chart: chart.clone(), comps: x.0.clone() };
    let eta = VField { chart: chart.clone(), comps: y.0.clone() };
    let t = xi.bracket(&eta).expect("same chart").comps;
    let r = x.1.len();
    let mut a = vec![Poly::zero(chart.dim()); r];
    for (i, h) in x.1.iter().enumerate() {
        if h.is_zero() {
            continue;
        }
        for (j, g) in y.1.iter().enumerate() {
            if g.is_zero() {
                continue;
            }
            a = vec_add(&a, &vec_scale(&(h * g), &pulled_structure[i][j]));
        }
    }
    for (j, g) in y.1.iter().enumerate() {
        a[j] = &a[j] + &xi.apply(g);
    }
    for (i, h) in x.1.iter().enumerate() {
        a[i] = &a[i] - &eta.apply(h);
    }
    (t, a)
}

fn pull_mat<S: Field>(f: &ChartMap<S>, m: &Mat<S>) -> Mat<S> {
    m.iter().map(|row| row.iter().map(|p| f.pull(p)).collect()).collect()
}

/// Inverse image `f⁺A` in the requested mode.
pub fn f_plus<S: Field>(f: &ChartMap<S>, a: &LieData<S>, mode: LieMode<S>) -> Result<LiePullback<S>> {
    f.target.check_same(&a.chart, "inverse image")?;
    let m = f.source.dim();
    let n = f.target.dim();
    let r = a.rank;
    let pulled_anchor = pull_mat(f, &a.anchor);
    let pulled_structure: Vec<Vec<Vec<Poly<S>>>> =
        a.structure.iter().map(|row| pull_mat(f, row)).collect();
    let mode_name = mode.name();
    let zero_m = || vec![Poly::zero(m); m];
    let mut basis: Vec<(Vec<Poly<S>>, Vec<Poly<S>>)> = Vec::new();
    match mode {
        LieMode::Identity => {
            if !f.is_identity() {
                return Err(Error::unsupported("identity mode needs the identity map"));
            }
            for i in 0..r {
                basis.push((pulled_anchor[i].clone(), unit_vec(m, r, i)));
            }
        }
        LieMode::CoordinateSubmersion => {
            let src = f
                .submersion_shape()
                .ok_or_else(|| Error::unsupported("map is not a coordinate submersion"))?;
            for i in 0..r {
                let mut xi = zero_m();
                for (j, &s) in src.iter().enumerate() {
                    xi[s] = pulled_anchor[i][j].clone();
                }
                basis.push((xi, unit_vec(m, r, i)));
            }
            for k in (0..m).filter(|k| !src.contains(k)) {
                basis.push((unit_vec(m, m, k), vec![Poly::zero(m); r]));
            }
        }
        LieMode::CoordinateEmbedding => {
            let shape = f
                .embedding_shape()
                .ok_or_else(|| Error::unsupported("map is not a coordinate embedding"))?;
            let normal: Mat<S> = shape
                .zeroed
                .iter()
                .map(|&s| (0..r).map(|i| pulled_anchor[i][s].clone()).collect())
                .collect();
            let order: Vec<usize> = (0..r).collect();
            for k in nullspace(m, &normal, r, &order)? {
                let mut xi = zero_m();
                for (j, src) in shape.source_of.iter().enumerate() {
                    if let Some(z) = *src {
                        for (i, ki) in k.iter().enumerate() {
                            if !ki.is_zero() {
                                xi[z] = &xi[z] + &(ki * &pulled_anchor[i][j]);
                            }
                        }
                    }
                }
                basis.push((xi, k));
            }
        }
        LieMode::TransitiveSplit(nabla) => {
            let sigma_t = transpose(n, &a.anchor, n);
            let nabla = match nabla {
                Some(nb) => {
                    if nb.len() != n || nb.iter().any(|row| row.len() != r) {
                        return Err(Error::dim("splitting must have one rank-vector per coordinate"));
                    }
                    let s = transpose(n, &nb, r);
                    if mat_mul(n, &sigma_t, &s, n) != crate::linalg::identity(n, n) {
                        return Err(Error::invalid("supplied splitting is not a right inverse of the anchor"));
                    }
                    nb
                }
                None => {
                    let s = right_inverse(n, &sigma_t, r).map_err(|_| {
                        Error::unsupported("anchor is not surjective with a constant-pivot splitting")
                    })?;
                    transpose(n, &s, n)
                }
            };
            let jac = f.jacobian();
            let pn = pull_mat(f, &nabla);
            for i in 0..m {
                let mut av = vec![Poly::zero(m); r];
                for j in 0..n {
                    if !jac[j][i].is_zero() {
                        av = vec_add(&av, &vec_scale(&jac[j][i], &pn[j]));
                    }
                }
                basis.push((unit_vec(m, m, i), av));
            }
            let order: Vec<usize> = (0..r).collect();
            for k in nullspace(n, &sigma_t, r, &order)? {
                basis.push((zero_m(), k.iter().map(|p| f.pull(p)).collect()));
            }
        }
    }
    let stacked: Vec<Vec<Poly<S>>> = basis
        .iter()
        .map(|(x, y)| {
            let mut v = x.clone();
            v.extend_from_slice(y);
            v
        })
        .collect();
    let solver = Solver::new(m, stacked, m + r)?;
    let mut pb = LiePullback {
        map: f.clone(),
        mode: mode_name,
        source: a.clone(),
        basis,
        result: LieData::abelian(&f.source, vec![])?,
        solver,
        pulled_anchor,
        pulled_structure,
    };
    for (k, (x, y)) in pb.basis.iter().enumerate() {
        if !crate::linalg::vec_is_zero(&pb.constraint_defect(x, y)) {
            return Err(Error::invalid(format!("basis section {} violates the fiber-product constraint", k + 1)));
        }
    }
    let rank = pb.basis.len();
    let mut structure = vec![vec![vec![Poly::zero(m); rank]; rank]; rank];
    for b in 0..rank {
        for c in b + 1..rank {
            let br = pb.ambient_bracket(&pb.basis[b], &pb.basis[c]);
            let coords = pb.project(&br.0, &br.1)?;
            structure[c][b] = coords.iter().map(|p| -p.clone()).collect();
            structure[b][c] = coords;
        }
    }
    let anchor = pb.basis.iter().map(|(x, _)| x.clone()).collect();
    let mut result = LieData::new(&f.source, anchor, structure)?;
    result.origin = Origin::Pullback(format!("{} → {} ({})", f.source.name(), f.target.name(), mode_name));
    pb.result = result;
    Ok(pb)
}

/// Matrix of `c⁺_{φ,ψ}: ψ⁺φ⁺A → (φ∘ψ)⁺A`, given `inner = φ⁺A`,
/// `outer = ψ⁺(φ⁺A)` and `composite = (φ∘ψ)⁺A`.
pub fn c_plus<S: Field>(inner: &LiePullback<S>, outer: &LiePullback<S>, composite: &LiePullback<S>) -> Result<Mat<S>> {
    outer.map.target.check_same(&inner.map.source, "composition map")?;
    if composite.map != inner.map.compose(&outer.map)? {
        return Err(Error::invalid("composite pullback is not along φ∘ψ"));
    }
    if !composite.source.same_structure(&inner.source) {
        return Err(Error::invalid("inner and composite pullbacks start from different algebroids"));
    }
    let psi = &outer.map;
    let nz = psi.source.dim();
    let pulled: Vec<Vec<Poly<S>>> = inner.basis.iter().map(|(_, a)| a.iter().map(|p| psi.pull(p)).collect()).collect();
    let mut cols = Vec::with_capacity(outer.basis.len());
    for (rho, u) in &outer.basis {
        let mut a = vec![Poly::zero(nz); inner.source.rank];
        for (uc, pc) in u.iter().zip(&pulled) {
            if !uc.is_zero() {
                a = vec_add(&a, &vec_scale(uc, pc));
            }
        }
        cols.push(composite.project(rho, &a)?);
    }
    Ok(transpose(nz, &cols, composite.basis.len()))
}

/// `ξ⁺(m)` for a morphism `m: B₁ → B₂` (matrix over `Y`), given
/// `from = ξ⁺B₁` and `to = ξ⁺B₂`.
pub fn pull_morphism<S: Field>(m: &Mat<S>, from: &LiePullback<S>, to: &LiePullback<S>) -> Result<Mat<S>> {
    if from.map != to.map {
        return Err(Error::invalid("pullbacks along different maps"));
    }
    let xi = &from.map;
    let nw = xi.source.dim();
    let pm = pull_mat(xi, m);
    let mut cols = Vec::with_capacity(from.basis.len());
    for (rho, u) in &from.basis {
        cols.push(to.project(rho, &mat_vec(nw, &pm, u))?);
    }
    Ok(transpose(nw, &cols, to.basis.len()))
}

/// Checks that a c⁺ matrix is a morphism: exactly on generators and on
/// seeded section pairs.
pub fn check_c_plus_morphism<S: Field>(
    src: &LieData<S>,
    tgt: &LieData<S>,
    c: &Mat<S>,
    samples: usize,
    seed: u64,
) -> Report {
    let mut rep = check_lie_morphism(src, tgt, c);
    let n = src.nvars();
    let mut smp = Sampler::new(seed);
    let mut bad = None;
    for t in 0..samples {
        let s = smp.section(n, src.rank);
        let u = smp.section(n, src.rank);
        let lhs = mat_vec(n, c, &src.bracket(&s, &u));
        let rhs = tgt.bracket(&mat_vec(n, c, &s), &mat_vec(n, c, &u));
        if lhs != rhs {
            bad = Some(format!("sample {t}: defect = {}", tgt.section_string(&vec_sub(&lhs, &rhs))));
            break;
        }
    }
    rep.record("bracket_samples", bad);
    rep
}

/// Compares `c⁺_{φψ,ξ} ∘ ξ⁺(c⁺_{φ,ψ})` with `c⁺_{φ,ψξ} ∘ c⁺_{ψ,ξ}` for the
/// chain `W →ξ Z →ψ Y →φ X`, as matrices and on seeded sections.
pub fn check_c_plus_assoc<S: Field>(
    phi: &ChartMap<S>,
    psi: &ChartMap<S>,
    xi: &ChartMap<S>,
    a: &LieData<S>,
    samples: usize,
    seed: u64,
) -> Result<Report> {
    let pull = |f: &ChartMap<S>, b: &LieData<S>| f_plus(f, b, LieMode::detect(f));
    let phipsi = phi.compose(psi)?;
    let psixi = psi.compose(xi)?;
    let all = phipsi.compose(xi)?;
    let p1 = pull(phi, a)?;
    let p2 = pull(psi, &p1.result)?;
    let p3 = pull(xi, &p2.result)?;
    let q1 = pull(&phipsi, a)?;
    let q2 = pull(xi, &q1.result)?;
    let r = pull(&all, a)?;
    let s1 = pull(&psixi, &p1.result)?;

    let c_phi_psi = c_plus(&p1, &p2, &q1)?;
    let c_phipsi_xi = c_plus(&q1, &q2, &r)?;
    let c_psi_xi = c_plus(&p2, &p3, &s1)?;
    let c_phi_psixi = c_plus(&p1, &s1, &r)?;
    let lifted = pull_morphism(&c_phi_psi, &p3, &q2)?;

    let nw = xi.source.dim();
    let rank_r = r.result.rank;
    let lhs = mat_mul(nw, &c_phipsi_xi, &lifted, p3.result.rank);
    let rhs = mat_mul(nw, &c_phi_psixi, &c_psi_xi, p3.result.rank);

    let mut rep = Report::new();
    rep.absorb("c_phi_psi", check_lie_morphism(&p2.result, &q1.result, &c_phi_psi));
    rep.absorb("c_phipsi_xi", check_lie_morphism(&q2.result, &r.result, &c_phipsi_xi));
    rep.absorb("c_psi_xi", check_lie_morphism(&p3.result, &s1.result, &c_psi_xi));
    rep.absorb("c_phi_psixi", check_lie_morphism(&s1.result, &r.result, &c_phi_psixi));
    rep.record(
        "composites_equal",
        if lhs == rhs { None } else { Some("composite matrices differ".to_string()) },
    );
    let mut smp = Sampler::new(seed);
    let mut bad = None;
    for t in 0..samples {
        let s = smp.section(nw, p3.result.rank);
        let x = mat_vec(nw, &lhs, &s);
        let y = mat_vec(nw, &rhs, &s);
        if x != y {
            bad = Some(format!("sample {t}: defect = {}", r.result.section_string(&vec_sub(&x, &y))));
            break;
        }
    }
    debug_assert_eq!(lhs.len(), rank_r);
    rep.record("composites_equal_on_samples", bad);
    Ok(rep)
}
