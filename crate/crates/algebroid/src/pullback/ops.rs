use super::{f_plusplus, pull_mat, stack, CourantMode, PullbackPresentation};
use crate::courant::{
    check_courant_morphism, check_dirac, curvature, CourantData, dotplus, independent_subset, opposite, twist, Connection,
    CourantSum, DiracData,
};
use crate::error::{Error, Result};
use crate::linalg::{det, generic_rank, mat_vec, unit_vec, vec_add, vec_scale, Mat};
use crate::report::Report;
use crate::scalar::Field;
use crate::symcalc::{print_form, Chart, ChartMap, KForm, Poly};

/// `f⁺⁺(∇)(ξ) = (0, f*∇(df ξ), ξ)` on coordinate fields of `Y`.
pub fn pullback_connection<S: Field>(pres: &PullbackPresentation<S>, conn: &Connection<S>) -> Result<Connection<S>> {
    let q = &pres.source;
    crate::courant::CourantExtension::exact(q)
        .map_err(|e| Error::unsupported(format!("connections are pulled back only for exact Q: {e}")))?;
    let f = &pres.map;
    let m = f.source.dim();
    let n = f.target.dim();
    let jac = f.jacobian();
    let pn = pull_mat(f, &conn.sections);
    let mut sections = Vec::new();
    for i in 0..m {
        let mut qv = vec![Poly::zero(m); q.rank];
        for j in 0..n {
            if !jac[j][i].is_zero() {
                qv = vec_add(&qv, &vec_scale(&jac[j][i], &pn[j]));
            }
        }
        let v = stack(&[&vec![Poly::zero(m); m], &qv, &unit_vec(m, m, i)]);
        sections.push(pres.project(&v)?);
    }
    Connection::new(&pres.result, sections)
}

/// Compares `twist(f⁺⁺Q, f*H)` with `f⁺⁺(twist(Q, H))` in the shared basis.
pub fn check_twist_commute<S: Field>(
    f: &ChartMap<S>,
    q: &CourantData<S>,
    h: &KForm<S>,
    mode: CourantMode<S>,
) -> Result<Report> {
    if !h.d().is_zero() {
        return Err(Error::invalid("twisting form is not closed"));
    }
    let left = f_plusplus(f, q, mode.clone())?;
    let right = f_plusplus(f, &twist(q, h)?, mode)?;
    let fh = f.pullback_form(h)?;
    let twisted = twist(&left.result, &fh)?;
    let mut rep = Report::new();
    rep.record(
        "same_basis",
        (left.fiber_basis != right.fiber_basis || left.basis != right.basis)
            .then(|| "presentations chose different bases".to_string()),
    );
    let mut bad = None;
    'g: for a in 0..twisted.rank {
        for b in 0..twisted.rank {
            if twisted.structure[a][b] != right.result.structure[a][b] {
                bad = Some(format!(
                    "bracket of (e{},e{}): {} vs {}",
                    a + 1,
                    b + 1,
                    twisted.section_string(&twisted.structure[a][b]),
                    twisted.section_string(&right.result.structure[a][b])
                ));
                break 'g;
            }
        }
    }
    rep.record("twist_commutes", bad);
    rep.record(
        "pairing_anchor_coanchor",
        (twisted.pairing != right.result.pairing
            || twisted.anchor != right.result.anchor
            || twisted.coanchor != right.result.coanchor)
            .then(|| "underlying data differ".to_string()),
    );
    Ok(rep)
}

/// Compares `c(f⁺⁺∇)` with `f*c(∇)`.
pub fn check_curvature_pullback<S: Field>(
    f: &ChartMap<S>,
    q: &CourantData<S>,
    conn: &Connection<S>,
    mode: CourantMode<S>,
) -> Result<Report> {
    let pres = f_plusplus(f, q, mode)?;
    let pulled = pullback_connection(&pres, conn)?;
    let up = curvature(&pres.result, &pulled)?;
    let down = f.pullback_form(&curvature(q, conn)?)?;
    let mut rep = Report::new();
    rep.record(
        "curvature_commutes",
        (up != down).then(|| format!("c(f⁺⁺∇) = {}, f*c(∇) = {}", print_form(&up), print_form(&down))),
    );
    Ok(rep)
}

/// Generators `dx_s` of the conormal bundle of a coordinate embedding, as
/// 1-forms on the target.
pub fn conormal<S: Field>(i: &ChartMap<S>) -> Result<Vec<KForm<S>>> {
    let shape = i
        .embedding_shape()
        .ok_or_else(|| Error::unsupported("conormal bundles are computed only for coordinate embeddings"))?;
    Ok(shape.zeroed.iter().map(|&s| KForm::dx(&i.target, s)).collect())
}

fn embedding_support<S: Field>(i: &ChartMap<S>) -> Result<Vec<usize>> {
    let shape = i.embedding_shape().ok_or_else(|| Error::unsupported("map is not a coordinate embedding"))?;
    let kept: Vec<usize> = shape.source_of.iter().filter_map(|s| *s).collect();
    if kept != (0..i.source.dim()).collect::<Vec<_>>() {
        return Err(Error::unsupported("embedding must keep the coordinate order"));
    }
    Ok(shape.zeroed)
}

/// `i⁺⁺K = K / π†(Ň)` expressed in the basis of `i⁺⁺Q`.
pub fn i_plusplus_dirac<S: Field>(
    i: &ChartMap<S>,
    q: &CourantData<S>,
    k: &DiracData<S>,
) -> Result<(PullbackPresentation<S>, DiracData<S>)> {
    let zeroed = embedding_support(i)?;
    let mut support = k.support.clone();
    support.sort_unstable();
    if support != zeroed {
        return Err(Error::invalid("support of K differs from the image of the embedding"));
    }
    let rep = check_dirac(q, k)?;
    if !rep.all_passed() {
        return Err(Error::invalid(format!("K is not a Dirac structure: {:?}", rep.failed_names())));
    }
    let pres = f_plusplus(i, q, CourantMode::CoordinateEmbedding)?;
    let m = i.source.dim();
    let images = k
        .generators
        .iter()
        .map(|g| {
            let xi = q_anchor_on(&pres, g);
            pres.project(&stack(&[&vec![Poly::zero(m); m], g, &xi]))
        })
        .collect::<Result<Vec<_>>>()?;
    let generators = independent_subset(m, &images);
    Ok((pres, DiracData { support: vec![], generators }))
}

/// Tangential anchor of a section of `i*Q` over `Z`.
fn q_anchor_on<S: Field>(pres: &PullbackPresentation<S>, g: &[Poly<S>]) -> Vec<Poly<S>> {
    let m = pres.map.source.dim();
    let shape = pres.map.embedding_shape().expect("embedding");
    let mut xi = vec![Poly::zero(m); m];
    for (j, src) in shape.source_of.iter().enumerate() {
        if let Some(z) = *src {
            for (a, ga) in g.iter().enumerate() {
                if !ga.is_zero() {
                    xi[z] = &xi[z] + &(ga * &pres.pulled_anchor[a][j]);
                }
            }
        }
    }
    xi
}

/// The preimage `D + π†(Ň)` of a Dirac structure of `i⁺⁺Q`, supported on
/// the image of `i`.
pub fn dirac_preimage<S: Field>(pres: &PullbackPresentation<S>, d: &DiracData<S>) -> Result<DiracData<S>> {
    let zeroed = embedding_support(&pres.map)?;
    let m = pres.map.source.dim();
    let shape = pres.map.embedding_shape().expect("embedding");
    let q = &pres.source;
    let col = |t: usize| -> Vec<Poly<S>> { q.coanchor.iter().map(|row| pres.map.pull(&row[t])).collect() };
    let mut gens = Vec::new();
    for g in &d.generators {
        let amb = pres.ambient(g);
        let (beta, qv, _) = pres.split(&amb);
        let mut v = qv.to_vec();
        // (dz_j, 0, 0) is identified with (0, i*π†(dx_t), 0) for t ↦ j
        for (t, src) in shape.source_of.iter().enumerate() {
            if let Some(j) = *src {
                if !beta[j].is_zero() {
                    v = vec_add(&v, &vec_scale(&beta[j], &col(t)));
                }
            }
        }
        gens.push(v);
    }
    for &s in &zeroed {
        gens.push(col(s));
    }
    Ok(DiracData { support: zeroed, generators: independent_subset(m, &gens) })
}

/// Checks `K`, `i⁺⁺K` and the round trip `preimage(i⁺⁺K) = K` as spans at
/// the generic point.
pub fn check_dirac_correspondence<S: Field>(
    i: &ChartMap<S>,
    q: &CourantData<S>,
    k: &DiracData<S>,
) -> Result<Report> {
    let mut rep = Report::new();
    rep.absorb("source", check_dirac(q, k)?);
    let (pres, d) = i_plusplus_dirac(i, q, k)?;
    rep.absorb("reduced", check_dirac(&pres.result, &d)?);
    let back = dirac_preimage(&pres, &d)?;
    let m = i.source.dim();
    let mut both = k.generators.clone();
    both.extend(back.generators.iter().cloned());
    let rk = generic_rank(m, &k.generators);
    let ok = rk == generic_rank(m, &back.generators) && rk == generic_rank(m, &both);
    rep.record("round_trip", (!ok).then(|| "preimage of i⁺⁺K spans a different module".to_string()));
    Ok(rep)
}

/// The Dirac structure of a morphism `φ: Q_Y → f⁺⁺Q_X`, supported on the
/// graph of `f` inside `Y × X`.
#[derive(Clone, Debug)]
pub struct MorphismGraph<S> {
    /// `Y × X` in coordinates `(y, u)` with `u = x - f(y)`, so the graph is
    /// `{u = 0}`. The `u` coordinates are named `u1, u2, …`.
    pub chart: Chart,
    pub sum: CourantSum<S>,
    pub dirac: DiracData<S>,
}

/// Builds `pr_Y⁺⁺Q_Y ∔ pr_X⁺⁺Q_X^op` on `Y × X` and the Dirac structure
/// supported on the graph of `f` that corresponds to the graph of `φ`.
pub fn courant_morphism_graph<S: Field>(
    f: &ChartMap<S>,
    q_y: &CourantData<S>,
    q_x: &CourantData<S>,
    phi: &Mat<S>,
) -> Result<MorphismGraph<S>> {
    let pres_f = f_plusplus(f, q_x, CourantMode::detect(f))?;
    let rep = check_courant_morphism(q_y, &pres_f.result, phi);
    if !rep.all_passed() {
        return Err(Error::invalid(format!("φ is not a morphism into f⁺⁺Q_X: {:?}", rep.failed_names())));
    }
    let (m, n) = (f.source.dim(), f.target.dim());
    let p = m + n;
    let chart = f.source.product(&Chart::numbered("U", "u", n))?;
    let yv = |i: usize| Poly::var(p, i);
    let lift = |g: &Poly<S>| g.embed(p, &(0..m).collect::<Vec<_>>());
    let g_y = ChartMap::new(&chart, &f.source, (0..m).map(yv).collect())?;
    let g_x = ChartMap::new(&chart, &f.target, (0..n).map(|k| &yv(m + k) + &lift(&f.comps[k])).collect())?;
    let a = f_plusplus(&g_y, q_y, CourantMode::CoordinateSubmersion)?;
    let b = f_plusplus(&g_x, &opposite(q_x), CourantMode::ExactSplit(None))?;
    let sum = dotplus(&a.result, &b.result)?;

    let mut emb = (0..m).map(|i| Poly::var(m, i)).collect::<Vec<_>>();
    emb.extend((0..n).map(|_| Poly::zero(m)));
    let i = ChartMap::new(&f.source, &chart, emb)?;
    let zp = |k: usize| vec![Poly::zero(m); k];
    let mut gens: Vec<Vec<Poly<S>>> = (0..n)
        .map(|k| sum.courant().coanchor.iter().map(|row| i.pull(&row[m + k])).collect())
        .collect();
    for e in 0..q_y.rank {
        let v = q_y.anchor_of(&q_y.basis(e)).comps;
        let xi = stack(&[&v, &zp(n)]);
        let a_amb = stack(&[&zp(p), &unit_vec(m, q_y.rank, e), &xi]);
        let a_coords = a.project_along(&i, &a_amb)?;
        let img = pres_f.ambient(&mat_vec(m, phi, &q_y.basis(e)));
        let (beta, pv, w) = pres_f.split(&img);
        // the opposite algebroid identifies (β, q, ξ) with (-β, q, ξ)
        let neg_beta: Vec<Poly<S>> = beta.iter().map(|x| -x.clone()).collect();
        let b_amb = stack(&[&neg_beta, &zp(n), pv, w, &zp(n)]);
        let b_coords = b.project_along(&i, &b_amb)?;
        gens.push(sum.project_tuple_along(&i, &[a_coords, b_coords])?);
    }
    let dirac = DiracData { support: (m..p).collect(), generators: independent_subset(m, &gens) };
    Ok(MorphismGraph { chart, sum, dirac })
}

/// Matrix of `f⁺⁺g⁺⁺Q → (g∘f)⁺⁺Q` given `inner = g⁺⁺Q`, `outer = f⁺⁺(inner)`
/// and `composite = (g∘f)⁺⁺Q`.
pub fn c_plusplus<S: Field>(
    inner: &PullbackPresentation<S>,
    outer: &PullbackPresentation<S>,
    composite: &PullbackPresentation<S>,
) -> Result<Mat<S>> {
    let f = &outer.map;
    if composite.map != inner.map.compose(f)? {
        return Err(Error::invalid("composite inverse image is not along g∘f"));
    }
    let m = f.source.dim();
    let inner_reps: Vec<Vec<Poly<S>>> = (0..inner.result.rank).map(|s| inner.ambient(&unit_vec(inner.map.source.dim(), inner.result.rank, s))).collect();
    let cols = (0..outer.result.rank)
        .map(|b| {
            let amb = outer.ambient(&unit_vec(m, outer.result.rank, b));
            let (beta, h, xi) = outer.split(&amb);
            let mut omega = KForm::one_form(&f.source, beta);
            let mut qv = vec![Poly::zero(m); composite.source.rank];
            for (s, hs) in h.iter().enumerate() {
                if hs.is_zero() {
                    continue;
                }
                let (bs, qs, _) = inner.split(&inner_reps[s]);
                let pulled = f.pullback_form(&KForm::one_form(&f.target, bs))?;
                omega = omega.add(&pulled.scale(hs))?;
                let qs: Vec<Poly<S>> = qs.iter().map(|x| f.pull(x)).collect();
                qv = vec_add(&qv, &vec_scale(hs, &qs));
            }
            composite.project(&stack(&[&omega.as_covector(), &qv, xi]))
        })
        .collect::<Result<Vec<_>>>()?;
    let rows = composite.result.rank;
    Ok((0..rows).map(|i| cols.iter().map(|c| c[i].clone()).collect()).collect())
}

/// `c⁺⁺` is a Courant isomorphism: a morphism whose determinant is a
/// nonzero constant.
pub fn check_c_plusplus<S: Field>(
    inner: &PullbackPresentation<S>,
    outer: &PullbackPresentation<S>,
    composite: &PullbackPresentation<S>,
) -> Result<Report> {
    let c = c_plusplus(inner, outer, composite)?;
    let mut rep = Report::new();
    rep.absorb("morphism", check_courant_morphism(&outer.result, &composite.result, &c));
    let m = outer.map.source.dim();
    let d = if c.len() == c.first().map_or(0, |r| r.len()) { det(m, &c) } else { Poly::zero(m) };
    rep.record("invertible", (!d.is_constant() || d.is_zero()).then(|| "c⁺⁺ is not invertible".to_string()));
    Ok(rep)
}
