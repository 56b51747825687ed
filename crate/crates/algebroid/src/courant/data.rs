use crate::error::{Error, Result};
use crate::lie_algebroid::{section_string, LieData, Origin};
use crate::linalg::{dot, mat_vec, right_inverse, transpose, unit_vec, vec_add, vec_is_zero, vec_scale, vec_sub, Mat, UnitRref};
use crate::report::Report;
use crate::sample::Sampler;
use crate::scalar::Field;
use crate::symcalc::{print_poly, Chart, KForm, Poly, VField};

/// Courant algebroid on a free module of rank `r`.
///
/// `anchor[a]` holds the components of `π(e_a)`; `coanchor[a][i]` is the
/// `a`-th component of `π†(dx_i)`; `structure[a][b]` holds `{e_a, e_b}`.
/// The optional `splitting` lists sections `s(∂_i)` with `π s = id`.
#[derive(Clone, Debug)]
pub struct CourantData<S> {
    pub chart: Chart,
    pub rank: usize,
    pub anchor: Mat<S>,
    pub coanchor: Mat<S>,
    pub pairing: Mat<S>,
    pub structure: Vec<Vec<Vec<Poly<S>>>>,
    pub splitting: Option<Vec<Vec<Poly<S>>>>,
}

impl<S: Field> CourantData<S> {
    pub fn new(
        chart: &Chart,
        anchor: Mat<S>,
        coanchor: Mat<S>,
        pairing: Mat<S>,
        structure: Vec<Vec<Vec<Poly<S>>>>,
    ) -> Result<Self> {
        let r = anchor.len();
        let n = chart.dim();
        let rect = |m: &Mat<S>, rows: usize, cols: usize| m.len() == rows && m.iter().all(|row| row.len() == cols);
        if !rect(&anchor, r, n) || !rect(&coanchor, r, n) {
            return Err(Error::dim("anchor and coanchor must be rank × dim"));
        }
        if !rect(&pairing, r, r) {
            return Err(Error::dim("pairing must be rank × rank"));
        }
        if structure.len() != r || structure.iter().any(|row| !rect(row, r, r)) {
            return Err(Error::dim("structure functions must be rank × rank × rank"));
        }
        let all = anchor.iter().chain(&coanchor).chain(&pairing).flatten().chain(structure.iter().flatten().flatten());
        if all.into_iter().any(|p| p.nvars() != n) {
            return Err(Error::dim("structure data must live on the algebroid's chart"));
        }
        for a in 0..r {
            for b in a + 1..r {
                if pairing[a][b] != pairing[b][a] {
                    return Err(Error::invalid(format!("pairing is not symmetric at ({}, {})", a + 1, b + 1)));
                }
            }
        }
        Ok(CourantData { chart: chart.clone(), rank: r, anchor, coanchor, pairing, structure, splitting: None })
    }

    pub fn with_splitting(mut self, splitting: Vec<Vec<Poly<S>>>) -> Result<Self> {
        let n = self.nvars();
        if splitting.len() != n || splitting.iter().any(|s| s.len() != self.rank) {
            return Err(Error::dim("splitting needs one section per coordinate"));
        }
        for (i, s) in splitting.iter().enumerate() {
            if self.anchor_of(s) != VField::coord(&self.chart, i) {
                return Err(Error::invalid(format!("splitting is not a right inverse of the anchor at ∂{}", i + 1)));
            }
        }
        self.splitting = Some(splitting);
        Ok(self)
    }

    /// The given splitting, or one found by constant-pivot elimination.
    pub fn splitting_or_derive(&self) -> Result<Vec<Vec<Poly<S>>>> {
        if let Some(s) = &self.splitting {
            return Ok(s.clone());
        }
        let n = self.nvars();
        let sigma_t = transpose(n, &self.anchor, n);
        let s = right_inverse(n, &sigma_t, self.rank)
            .map_err(|_| Error::unsupported("anchor is not surjective with a constant-pivot splitting"))?;
        Ok(transpose(n, &s, n))
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
        let comps = mat_vec(n, &transpose(n, &self.anchor, n), q);
        VField { chart: self.chart.clone(), comps }
    }

    /// `π†(Σ α_i dx_i)`.
    pub fn coanchor_of(&self, alpha: &[Poly<S>]) -> Vec<Poly<S>> {
        mat_vec(self.nvars(), &self.coanchor, alpha)
    }

    pub fn coanchor_form(&self, alpha: &KForm<S>) -> Vec<Poly<S>> {
        self.coanchor_of(&alpha.as_covector())
    }

    pub fn pair(&self, q: &[Poly<S>], p: &[Poly<S>]) -> Poly<S> {
        dot(self.nvars(), q, &mat_vec(self.nvars(), &self.pairing, p))
    }

    /// Bracket of arbitrary sections, extended from generators by the
    /// Leibniz rule in the second slot and the symmetrizer in the first.
    pub fn bracket(&self, q: &[Poly<S>], p: &[Poly<S>]) -> Vec<Poly<S>> {
        let n = self.nvars();
        let pq = self.anchor_of(q);
        let pp = self.anchor_of(p);
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
            out[b] = &out[b] + &pq.apply(gb);
        }
        for (a, fa) in q.iter().enumerate() {
            if fa.is_zero() {
                continue;
            }
            out[a] = &out[a] - &pp.apply(fa);
            let w = dot(n, &self.pairing[a], p);
            if w.is_zero() || fa.is_constant() {
                continue;
            }
            let df: Vec<Poly<S>> = (0..n).map(|i| &w * &fa.deriv(i)).collect();
            out = vec_add(&out, &self.coanchor_of(&df));
        }
        out
    }

    pub fn section_string(&self, q: &[Poly<S>]) -> String {
        section_string(&self.chart, q)
    }

    /// Same anchor, coanchor, pairing and structure functions.
    pub fn same_structure(&self, other: &CourantData<S>) -> bool {
        self.chart == other.chart
            && self.rank == other.rank
            && self.anchor == other.anchor
            && self.coanchor == other.coanchor
            && self.pairing == other.pairing
            && self.structure == other.structure
    }
}

/// `T_X ⊕ Ω¹_X` with basis `∂_1..∂_n, dx_1..dx_n`, the pairing
/// `⟨(ξ,α),(η,β)⟩ = ι_ξβ + ι_ηα` and the `H`-twisted Dorfman bracket.
pub fn standard_exact<S: Field>(chart: &Chart, h: &KForm<S>) -> Result<CourantData<S>> {
    h.chart.check_same(chart, "standard Courant algebroid")?;
    if h.degree() != 3 {
        return Err(Error::dim(format!("twisting form must have degree 3, got {}", h.degree())));
    }
    let n = chart.dim();
    let r = 2 * n;
    let zero = || Poly::zero(n);
    let one = || Poly::one(n);
    let mut anchor = vec![vec![zero(); n]; r];
    let mut coanchor = vec![vec![zero(); n]; r];
    let mut pairing = vec![vec![zero(); r]; r];
    for i in 0..n {
        anchor[i][i] = one();
        coanchor[n + i][i] = one();
        pairing[i][n + i] = one();
        pairing[n + i][i] = one();
    }
    let mut structure = vec![vec![vec![zero(); r]; r]; r];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                structure[i][j][n + k] = h.coeff(&[i, j, k]);
            }
        }
    }
    let q = CourantData::new(chart, anchor, coanchor, pairing, structure)?;
    let split = (0..n).map(|i| unit_vec(n, r, i)).collect();
    q.with_splitting(split)
}

/// `{q, p}_H = {q, p} + π†(ι_{π p} ι_{π q} H)` on generators.
pub fn twist<S: Field>(q: &CourantData<S>, h: &KForm<S>) -> Result<CourantData<S>> {
    h.chart.check_same(&q.chart, "twist")?;
    if h.degree() != 3 {
        return Err(Error::dim(format!("twisting form must have degree 3, got {}", h.degree())));
    }
    let mut out = q.clone();
    let anchors: Vec<VField<S>> = (0..q.rank).map(|a| q.anchor_of(&q.basis(a))).collect();
    for a in 0..q.rank {
        if anchors[a].is_zero() {
            continue;
        }
        let ia = h.iota(&anchors[a])?;
        for b in 0..q.rank {
            let w = ia.iota(&anchors[b])?;
            if !w.is_zero() {
                out.structure[a][b] = vec_add(&out.structure[a][b], &q.coanchor_form(&w));
            }
        }
    }
    Ok(out)
}

/// Same bracket and anchor, negated pairing and coanchor.
pub fn opposite<S: Field>(q: &CourantData<S>) -> CourantData<S> {
    let neg = |m: &Mat<S>| -> Mat<S> { m.iter().map(|row| row.iter().map(|p| -p.clone()).collect()).collect() };
    CourantData { pairing: neg(&q.pairing), coanchor: neg(&q.coanchor), ..q.clone() }
}

/// The Lie algebroid `Q / π†Ω¹` with the quotient map (`rank × Q.rank`).
pub fn overline<S: Field>(q: &CourantData<S>) -> Result<(LieData<S>, Mat<S>)> {
    let n = q.nvars();
    let order: Vec<usize> = (0..n).collect();
    let rr = UnitRref::new(n, &q.coanchor, &order);
    if rr.pivots.len() != n {
        return Err(Error::unsupported("coanchor has no constant-pivot complement"));
    }
    let pivot_rows: Vec<usize> = rr.pivots.iter().map(|p| p.0).collect();
    let proj: Mat<S> = (0..q.rank).filter(|a| !pivot_rows.contains(a)).map(|a| rr.transform[a].clone()).collect();
    let rb = proj.len();
    let lifts = transpose(n, &right_inverse(n, &proj, q.rank)?, rb);
    let anchor = lifts.iter().map(|l| q.anchor_of(l).comps).collect();
    let structure = lifts
        .iter()
        .map(|x| lifts.iter().map(|y| mat_vec(n, &proj, &q.bracket(x, y))).collect())
        .collect();
    let mut lie = LieData::new(&q.chart, anchor, structure)?;
    lie.origin = Origin::Quotient;
    let rep = check_courant_to_lie(q, &lie, &proj);
    if !rep.all_passed() {
        return Err(Error::invalid(format!("quotient map is not a morphism: {:?}", rep.failed_names())));
    }
    Ok((lie, proj))
}

fn check_courant_to_lie<S: Field>(q: &CourantData<S>, lie: &LieData<S>, proj: &Mat<S>) -> Report {
    let n = q.nvars();
    let mut rep = Report::new();
    let mut bad = None;
    'g: for a in 0..q.rank {
        if lie.anchor_of(&mat_vec(n, proj, &q.basis(a))) != q.anchor_of(&q.basis(a)) {
            bad = Some(format!("anchor differs on e{}", a + 1));
            break;
        }
        for b in 0..q.rank {
            let lhs = mat_vec(n, proj, &q.bracket(&q.basis(a), &q.basis(b)));
            let rhs = lie.bracket(&mat_vec(n, proj, &q.basis(a)), &mat_vec(n, proj, &q.basis(b)));
            if lhs != rhs {
                bad = Some(format!("bracket of (e{},e{})", a + 1, b + 1));
                break 'g;
            }
        }
    }
    rep.record("morphism", bad);
    rep
}

/// Itemized verification of the six Courant axioms, the anchor being a
/// bracket morphism and the Leibniz identity. Generator-level identities
/// are exact; the section-level checks use `samples` seeded sections.
pub fn check_courant<S: Field>(q: &CourantData<S>, samples: usize, seed: u64) -> Report {
    let n = q.nvars();
    let r = q.rank;
    let e: Vec<Vec<Poly<S>>> = (0..r).map(|a| q.basis(a)).collect();
    let anchors: Vec<VField<S>> = e.iter().map(|v| q.anchor_of(v)).collect();
    let mut rep = Report::new();
    let mut smp = Sampler::new(seed);
    let sec = |smp: &mut Sampler| smp.section::<S>(n, r);

    let mut bad = None;
    for i in 0..n {
        let v = q.anchor_of(&q.coanchor_of(&unit_vec(n, n, i)));
        if !v.is_zero() {
            bad = Some(format!("π(π†(dx{})) = {}", i + 1, crate::symcalc::print_vfield(&v)));
            break;
        }
    }
    rep.record("eq1_anchor_coanchor", bad);

    let mut bad = None;
    for t in 0..samples {
        let (x, y, f) = (sec(&mut smp), sec(&mut smp), smp.poly::<S>(n));
        let lhs = q.bracket(&x, &vec_scale(&f, &y));
        let rhs = vec_add(&vec_scale(&f, &q.bracket(&x, &y)), &vec_scale(&q.anchor_of(&x).apply(&f), &y));
        if lhs != rhs {
            bad = Some(format!("sample {t}: defect = {}", q.section_string(&vec_sub(&lhs, &rhs))));
            break;
        }
    }
    rep.record("eq2_leibniz_rule", bad);

    let inv = |x: &[Poly<S>], y: &[Poly<S>], z: &[Poly<S>]| -> Poly<S> {
        let lhs = &q.pair(&q.bracket(x, y), z) + &q.pair(y, &q.bracket(x, z));
        &lhs - &q.anchor_of(x).apply(&q.pair(y, z))
    };
    let mut bad = None;
    'inv: for a in 0..r {
        for b in 0..r {
            for c in b..r {
                let d = inv(&e[a], &e[b], &e[c]);
                if !d.is_zero() {
                    bad = Some(format!("generators (e{},e{},e{}): defect = {}", a + 1, b + 1, c + 1, print_poly(&d, &q.chart)));
                    break 'inv;
                }
            }
        }
    }
    if bad.is_none() {
        for t in 0..samples {
            let (x, y, z) = (sec(&mut smp), sec(&mut smp), sec(&mut smp));
            let d = inv(&x, &y, &z);
            if !d.is_zero() {
                bad = Some(format!("sample {t}: defect = {}", print_poly(&d, &q.chart)));
                break;
            }
        }
    }
    rep.record("eq3_invariance", bad);

    let ideal = |x: &[Poly<S>], alpha: &KForm<S>| -> Result<Vec<Poly<S>>> {
        let lhs = q.bracket(x, &q.coanchor_form(alpha));
        let rhs = q.coanchor_form(&alpha.lie(&q.anchor_of(x))?);
        Ok(vec_sub(&lhs, &rhs))
    };
    let mut bad = None;
    'ideal: for a in 0..r {
        for i in 0..n {
            let d = ideal(&e[a], &KForm::dx(&q.chart, i)).expect("same chart");
            if !vec_is_zero(&d) {
                bad = Some(format!("generators (e{}, dx{}): defect = {}", a + 1, i + 1, q.section_string(&d)));
                break 'ideal;
            }
        }
    }
    if bad.is_none() {
        for t in 0..samples {
            let x = sec(&mut smp);
            let alpha = smp.form::<S>(&q.chart, 1);
            let d = ideal(&x, &alpha).expect("same chart");
            if !vec_is_zero(&d) {
                bad = Some(format!("sample {t}: defect = {}", q.section_string(&d)));
                break;
            }
        }
    }
    rep.record("eq4_coanchor_bracket", bad);

    let mut bad = None;
    'adj: for a in 0..r {
        for i in 0..n {
            let lhs = q.pair(&e[a], &q.coanchor_of(&unit_vec(n, n, i)));
            if lhs != anchors[a].comps[i] {
                bad = Some(format!("generators (e{}, dx{}): ⟨e, π†dx⟩ = {}", a + 1, i + 1, print_poly(&lhs, &q.chart)));
                break 'adj;
            }
        }
    }
    rep.record("eq5_pairing_coanchor", bad);

    let sym = |x: &[Poly<S>], y: &[Poly<S>]| -> Vec<Poly<S>> {
        let lhs = vec_add(&q.bracket(x, y), &q.bracket(y, x));
        let w = q.pair(x, y);
        let dw: Vec<Poly<S>> = (0..n).map(|i| w.deriv(i)).collect();
        vec_sub(&lhs, &q.coanchor_of(&dw))
    };
    let mut bad = None;
    'sym: for a in 0..r {
        for b in a..r {
            let d = sym(&e[a], &e[b]);
            if !vec_is_zero(&d) {
                bad = Some(format!("generators (e{},e{}): defect = {}", a + 1, b + 1, q.section_string(&d)));
                break 'sym;
            }
        }
    }
    if bad.is_none() {
        for t in 0..samples {
            let d = sym(&sec(&mut smp), &sec(&mut smp));
            if !vec_is_zero(&d) {
                bad = Some(format!("sample {t}: defect = {}", q.section_string(&d)));
                break;
            }
        }
    }
    rep.record("eq6_symmetrization", bad);

    let mut bad = None;
    'anc: for a in 0..r {
        for b in 0..r {
            let lhs = q.anchor_of(&q.structure[a][b]);
            let rhs = anchors[a].bracket(&anchors[b]).expect("same chart");
            if lhs != rhs {
                bad = Some(format!("generators (e{},e{}): defect = {}", a + 1, b + 1, crate::symcalc::print_vfield(&lhs.sub(&rhs))));
                break 'anc;
            }
        }
    }
    rep.record("anchor_bracket", bad);

    let leib = |x: &[Poly<S>], y: &[Poly<S>], z: &[Poly<S>]| -> Vec<Poly<S>> {
        let lhs = q.bracket(x, &q.bracket(y, z));
        let rhs = vec_add(&q.bracket(&q.bracket(x, y), z), &q.bracket(y, &q.bracket(x, z)));
        vec_sub(&lhs, &rhs)
    };
    let mut bad = None;
    'leib: for a in 0..r {
        for b in 0..r {
            for c in 0..r {
                let d = leib(&e[a], &e[b], &e[c]);
                if !vec_is_zero(&d) {
                    bad = Some(format!("generators (e{},e{},e{}): defect = {}", a + 1, b + 1, c + 1, q.section_string(&d)));
                    break 'leib;
                }
            }
        }
    }
    if bad.is_none() {
        for t in 0..samples.min(20) {
            let d = leib(&sec(&mut smp), &sec(&mut smp), &sec(&mut smp));
            if !vec_is_zero(&d) {
                bad = Some(format!("sample {t}: defect = {}", q.section_string(&d)));
                break;
            }
        }
    }
    rep.record("leibniz_identity", bad);
    rep
}

/// Checks that `m` (target.rank × source.rank) is a morphism of Courant
/// algebroids on generators: anchors, coanchors, brackets and pairings.
pub fn check_courant_morphism<S: Field>(src: &CourantData<S>, tgt: &CourantData<S>, m: &Mat<S>) -> Report {
    let n = src.nvars();
    let apply = |v: &[Poly<S>]| mat_vec(n, m, v);
    let mut rep = Report::new();
    if m.len() != tgt.rank || m.iter().any(|row| row.len() != src.rank) || src.chart != tgt.chart {
        rep.fail("shape", "matrix shape or charts do not match");
        return rep;
    }
    let e: Vec<Vec<Poly<S>>> = (0..src.rank).map(|a| src.basis(a)).collect();
    let img: Vec<Vec<Poly<S>>> = e.iter().map(|v| apply(v)).collect();
    let bad = (0..src.rank)
        .find(|&a| tgt.anchor_of(&img[a]) != src.anchor_of(&e[a]))
        .map(|a| format!("anchor differs on e{}", a + 1));
    rep.record("anchor", bad);
    let bad = (0..n)
        .find(|&i| apply(&src.coanchor_of(&unit_vec(n, n, i))) != tgt.coanchor_of(&unit_vec(n, n, i)))
        .map(|i| format!("coanchor differs on dx{}", i + 1));
    rep.record("coanchor", bad);
    let mut bad = None;
    let mut pbad = None;
    'g: for a in 0..src.rank {
        for b in 0..src.rank {
            if pbad.is_none() && tgt.pair(&img[a], &img[b]) != src.pairing[a][b] {
                pbad = Some(format!("pairing differs on (e{},e{})", a + 1, b + 1));
            }
            let lhs = apply(&src.structure[a][b]);
            let rhs = tgt.bracket(&img[a], &img[b]);
            if lhs != rhs {
                bad = Some(format!("bracket of (e{},e{}): defect = {}", a + 1, b + 1, tgt.section_string(&vec_sub(&lhs, &rhs))));
                break 'g;
            }
        }
    }
    rep.record("bracket", bad);
    rep.record("pairing", pbad);
    rep
}
