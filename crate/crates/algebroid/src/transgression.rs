//! Truncated transgression model: `τQ` in degrees −2..0 as a module over
//! the de Rham algebra, generated by the marking `c` (degree −2), `e_a·ε`
//! (degree −1) and `e_a` (degree 0), modulo `β·π†(α)ε ≡ (β∧α)·c`.
//!
//! Elements are kept in a normal form: in degree −1 every `α·c` is folded
//! into `π†(α)·ε`; in degree 0 the `π†Ω¹`-part of each `Ω¹·ε` coefficient
//! is folded into a 2-form multiple of `c`, using the constant-pivot
//! complement of the coanchor image.

use crate::courant::{CourantData, CourantExtension, CourantSum};
use crate::error::{Error, Result};
use crate::linalg::{mat_vec, vec_add, vec_sub, UnitRref};
use crate::report::Report;
use crate::scalar::Field;
use crate::symcalc::{print_form, Chart, KForm, Poly, VField};

/// Module generators of the truncated model.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Gen {
    C,
    Eps(usize),
    Plain(usize),
}

impl Gen {
    pub fn degree(self) -> i32 {
        match self {
            Gen::C => -2,
            Gen::Eps(_) => -1,
            Gen::Plain(_) => 0,
        }
    }
}

fn sign(parity: i32) -> bool {
    parity.rem_euclid(2) == 1
}

/// Homogeneous element `ω·c + Σ α_a·e_aε + Σ η_a·e_a` of degree `degree`;
/// slots whose form degree would be negative are absent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TauElement<S> {
    pub degree: i32,
    pub c: Option<KForm<S>>,
    pub eps: Vec<KForm<S>>,
    pub plain: Vec<KForm<S>>,
}

impl<S: Field> TauElement<S> {
    pub fn zero(chart: &Chart, rank: usize, degree: i32) -> Self {
        let slot = |k: i32| (k >= 0).then(|| KForm::zero(chart, k as usize));
        TauElement {
            degree,
            c: slot(degree + 2),
            eps: slot(degree + 1).map(|f| vec![f; rank]).unwrap_or_default(),
            plain: slot(degree).map(|f| vec![f; rank]).unwrap_or_default(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.c.as_ref().map_or(true, |f| f.is_zero())
            && self.eps.iter().all(KForm::is_zero)
            && self.plain.iter().all(KForm::is_zero)
    }

    pub fn terms(&self) -> Vec<(KForm<S>, Gen)> {
        let mut out = Vec::new();
        if let Some(f) = &self.c {
            if !f.is_zero() {
                out.push((f.clone(), Gen::C));
            }
        }
        for (a, f) in self.eps.iter().enumerate() {
            if !f.is_zero() {
                out.push((f.clone(), Gen::Eps(a)));
            }
        }
        for (a, f) in self.plain.iter().enumerate() {
            if !f.is_zero() {
                out.push((f.clone(), Gen::Plain(a)));
            }
        }
        out
    }

    /// Adds `ω·g`; fails if the term does not fit the window.
    pub fn add_term(&mut self, w: &KForm<S>, g: Gen) -> Result<()> {
        if w.is_zero() {
            return Ok(());
        }
        if w.degree() as i32 + g.degree() != self.degree {
            return Err(Error::dim("term degree does not match the element degree"));
        }
        let slot = match g {
            Gen::C => self.c.as_mut(),
            Gen::Eps(a) => self.eps.get_mut(a),
            Gen::Plain(a) => self.plain.get_mut(a),
        };
        match slot {
            Some(f) => {
                *f = f.add(w)?;
                Ok(())
            }
            None => Err(Error::invalid(format!(
                "bracket result of degree {} escapes the truncation window −2..0",
                self.degree
            ))),
        }
    }

    /// Functions on `e_a·ε` of a degree −1 element in normal form.
    pub fn eps_functions(&self) -> Vec<Poly<S>> {
        self.eps.iter().map(|f| f.as_function()).collect()
    }
}

/// `τQ` together with the data for its normal form.
#[derive(Clone, Debug)]
pub struct TauModule<S> {
    pub parent: CourantData<S>,
    /// Row operations and pivot row per coanchor column, when the coanchor
    /// has a constant-pivot complement.
    split: Option<(Vec<Vec<Poly<S>>>, Vec<usize>)>,
}

/// Builds the truncated model of `τQ`.
pub fn tau<S: Field>(q: &CourantData<S>) -> Result<TauModule<S>> {
    let n = q.nvars();
    let order: Vec<usize> = (0..n).collect();
    let rr = UnitRref::new(n, &q.coanchor, &order);
    let split = if rr.pivots.len() == n {
        let mut rows = vec![0; n];
        for &(row, col) in &rr.pivots {
            rows[col] = row;
        }
        Some((rr.transform, rows))
    } else if q.coanchor.iter().flatten().all(Poly::is_zero) {
        None
    } else {
        return Err(Error::unsupported("coanchor has no constant-pivot complement"));
    };
    Ok(TauModule { parent: q.clone(), split })
}

impl<S: Field> TauModule<S> {
    pub fn chart(&self) -> &Chart {
        &self.parent.chart
    }

    pub fn rank(&self) -> usize {
        self.parent.rank
    }

    pub fn zero(&self, degree: i32) -> TauElement<S> {
        TauElement::zero(self.chart(), self.rank(), degree)
    }

    /// `ω·g` in normal form.
    pub fn term(&self, w: &KForm<S>, g: Gen) -> Result<TauElement<S>> {
        let mut e = self.zero(w.degree() as i32 + g.degree());
        e.add_term(w, g)?;
        self.normalize(e)
    }

    pub fn generator(&self, g: Gen) -> TauElement<S> {
        self.term(&KForm::function(self.chart(), Poly::one(self.chart().dim())), g).expect("generator fits")
    }

    pub fn marking(&self) -> TauElement<S> {
        self.generator(Gen::C)
    }

    /// `q·ε` for a section `q`.
    pub fn eps_section(&self, q: &[Poly<S>]) -> TauElement<S> {
        let mut e = self.zero(-1);
        for (a, f) in q.iter().enumerate() {
            e.eps[a] = KForm::function(self.chart(), f.clone());
        }
        e
    }

    /// `q` in degree 0 for a section `q`.
    pub fn plain_section(&self, q: &[Poly<S>]) -> TauElement<S> {
        let mut e = self.zero(0);
        for (a, f) in q.iter().enumerate() {
            e.plain[a] = KForm::function(self.chart(), f.clone());
        }
        e
    }

    /// Coordinates `α` with `v - π†α` in the chosen complement.
    fn coanchor_part(&self, v: &[Poly<S>]) -> Vec<Poly<S>> {
        let n = self.chart().dim();
        match &self.split {
            Some((t, rows)) => {
                let w = mat_vec(n, t, v);
                rows.iter().map(|&r| w[r].clone()).collect()
            }
            None => vec![Poly::zero(n); n],
        }
    }

    pub fn normalize(&self, mut e: TauElement<S>) -> Result<TauElement<S>> {
        let chart = self.chart().clone();
        let n = chart.dim();
        let q = &self.parent;
        match e.degree {
            -1 => {
                let alpha = e.c.take().unwrap();
                let shift = q.coanchor_form(&alpha);
                for (a, s) in shift.into_iter().enumerate() {
                    e.eps[a] = e.eps[a].add(&KForm::function(&chart, s))?;
                }
                e.c = Some(KForm::zero(&chart, 1));
            }
            0 => {
                let mut rows: Vec<Vec<Poly<S>>> =
                    (0..n).map(|i| e.eps.iter().map(|f| f.coeff(&[i])).collect()).collect();
                let mut w = e.c.take().unwrap();
                for (i, row) in rows.iter_mut().enumerate() {
                    let alpha = self.coanchor_part(row);
                    *row = vec_sub(row, &q.coanchor_of(&alpha));
                    let beta = KForm::one_form(&chart, &alpha);
                    w = w.add(&KForm::dx(&chart, i).wedge(&beta)?)?;
                }
                if self.split.is_none() && !w.is_zero() {
                    // with a zero coanchor every positive-degree multiple of c vanishes
                    w = KForm::zero(&chart, 2);
                }
                e.c = Some(w);
                for (a, f) in e.eps.iter_mut().enumerate() {
                    let coeffs: Vec<Poly<S>> = (0..n).map(|i| rows[i][a].clone()).collect();
                    *f = KForm::one_form(&chart, &coeffs);
                }
            }
            _ => {}
        }
        Ok(e)
    }

    /// Action of a generator on forms: `c ↦ 0`, `qε ↦ ι_{π q}`, `q ↦ L_{π q}`.
    pub fn act_gen(&self, g: Gen, w: &KForm<S>) -> Result<Option<KForm<S>>> {
        let v = |a: usize| self.parent.anchor_of(&self.parent.basis(a));
        Ok(match g {
            Gen::C => None,
            Gen::Eps(_) if w.degree() == 0 => None,
            Gen::Eps(a) => Some(w.iota(&v(a))?),
            Gen::Plain(a) => Some(w.lie(&v(a))?),
        })
    }

    /// Anchor action `u(η)`, a derivation of degree `|u|`.
    pub fn act(&self, u: &TauElement<S>, w: &KForm<S>) -> Result<Option<KForm<S>>> {
        let mut out: Option<KForm<S>> = None;
        for (om, g) in u.terms() {
            if let Some(x) = self.act_gen(g, w)? {
                let t = om.wedge(&x)?;
                out = Some(match out {
                    Some(o) => o.add(&t)?,
                    None => t,
                });
            }
        }
        Ok(out)
    }

    fn table(&self, g: Gen, h: Gen) -> Result<Vec<(KForm<S>, Gen)>> {
        let q = &self.parent;
        let chart = self.chart();
        let fun = |p: Poly<S>| KForm::function(chart, p);
        Ok(match (g, h) {
            (Gen::C, _) | (_, Gen::C) => vec![],
            (Gen::Eps(a), Gen::Eps(b)) => vec![(fun(q.pairing[a][b].clone()), Gen::C)],
            (Gen::Plain(a), Gen::Eps(b)) => {
                q.structure[a][b].iter().enumerate().map(|(k, p)| (fun(p.clone()), Gen::Eps(k))).collect()
            }
            (Gen::Eps(a), Gen::Plain(b)) => {
                let mut v: Vec<(KForm<S>, Gen)> =
                    q.structure[a][b].iter().enumerate().map(|(k, p)| (fun(p.clone()), Gen::Eps(k))).collect();
                v.push((fun(q.pairing[a][b].clone()).d().neg(), Gen::C));
                v
            }
            (Gen::Plain(a), Gen::Plain(b)) => {
                return Err(Error::invalid(format!(
                    "bracket of e{} and e{} in degree 0 is not determined by the table",
                    a + 1,
                    b + 1
                )))
            }
        })
    }

    /// Bracket extended from the table by the graded Leibniz rule
    /// `[u, f v] = u(f) v + (−1)^{|u||f|} f [u, v]` and its mirror.
    pub fn bracket(&self, u: &TauElement<S>, v: &TauElement<S>) -> Result<TauElement<S>> {
        let d = u.degree + v.degree;
        let mut out = TauElement::zero(self.chart(), self.rank(), d);
        for (om, g) in u.terms() {
            let p = om.degree() as i32;
            let du = p + g.degree();
            for (eta, h) in v.terms() {
                let qd = eta.degree() as i32;
                let s = sign(du * qd);
                if let Some(x) = self.act_gen(g, &eta)? {
                    out.add_term(&om.wedge(&x)?, h)?;
                }
                let ew = eta.wedge(&om)?;
                if !ew.is_zero() {
                    for (kappa, k) in self.table(g, h)? {
                        let t = ew.wedge(&kappa)?;
                        out.add_term(&if s { t.neg() } else { t }, k)?;
                    }
                }
                if let Some(x) = self.act_gen(h, &om)? {
                    let t = eta.wedge(&x)?;
                    let neg = !(s ^ sign(h.degree() * du));
                    out.add_term(&if neg { t.neg() } else { t }, g)?;
                }
            }
        }
        if d < -2 {
            return Ok(out);
        }
        self.normalize(out)
    }

    /// Graded ranks of the truncated model in degrees −2, −1, 0.
    pub fn graded_ranks(&self) -> [usize; 3] {
        let n = self.chart().dim();
        let r = self.rank();
        match self.split {
            Some(_) => [1, r, r + n * (r - n) + n * n.saturating_sub(1) / 2],
            None => [1, r, r + n * r],
        }
    }
}

/// Reads a Courant algebroid back from the table: pairing from `[e_aε, e_bε]`,
/// bracket from the derived bracket `[e_a, e_bε]`, anchor from the action of
/// `e_aε` on `dx_i` and coanchor from `dx_i·c`.
pub fn cour<S: Field>(m: &TauModule<S>) -> Result<CourantData<S>> {
    let chart = m.chart().clone();
    let n = chart.dim();
    let r = m.rank();
    let mut pairing = vec![vec![Poly::zero(n); r]; r];
    let mut structure = vec![vec![vec![Poly::zero(n); r]; r]; r];
    let mut anchor = vec![vec![Poly::zero(n); n]; r];
    for a in 0..r {
        let ea = m.generator(Gen::Eps(a));
        let pa = m.generator(Gen::Plain(a));
        for b in 0..r {
            let eb = m.generator(Gen::Eps(b));
            let pb = m.bracket(&ea, &eb)?;
            pairing[a][b] = pb.c.as_ref().unwrap().as_function();
            structure[a][b] = m.bracket(&pa, &eb)?.eps_functions();
        }
        for i in 0..n {
            if let Some(w) = m.act(&ea, &KForm::dx(&chart, i))? {
                anchor[a][i] = w.as_function();
            }
        }
    }
    let mut coanchor = vec![vec![Poly::zero(n); n]; r];
    for i in 0..n {
        let col = m.term(&KForm::dx(&chart, i), Gen::C)?.eps_functions();
        for a in 0..r {
            coanchor[a][i] = col[a].clone();
        }
    }
    CourantData::new(&chart, anchor, coanchor, pairing, structure)
        .map_err(|e| Error::invalid(format!("components do not assemble: {e}")))
}

/// Verifies the six bracket rules of the table on generators, the anchor
/// action, graded antisymmetry between rules (5) and (6), and centrality of
/// the marking.
pub fn check_bracket_table<S: Field>(m: &TauModule<S>) -> Result<Report> {
    let q = &m.parent;
    let chart = m.chart().clone();
    let n = chart.dim();
    let r = m.rank();
    let mut rep = Report::new();
    let c = m.marking();
    let gens: Vec<Gen> = (0..r).flat_map(|a| [Gen::Eps(a), Gen::Plain(a)]).collect();

    let mut bad = None;
    for &g in &gens {
        let u = m.generator(g);
        for x in [m.bracket(&c, &u)?, m.bracket(&u, &c)?] {
            if !x.is_zero() {
                bad = Some(format!("[c, {g:?}] ≠ 0"));
            }
        }
        let xu = m.term(&KForm::function(&chart, if n > 0 { Poly::var(n, 0) } else { Poly::one(0) }), g)?;
        if !m.bracket(&c, &xu)?.is_zero() {
            bad = Some(format!("[c, f·{g:?}] ≠ 0"));
        }
    }
    rep.record("rule1_marking_central", bad);

    let probes: Vec<KForm<S>> = probe_forms(&chart);
    let mut bad2 = None;
    let mut bad3 = None;
    for a in 0..r {
        let v: VField<S> = q.anchor_of(&q.basis(a));
        for beta in &probes {
            let got = m.act(&m.generator(Gen::Eps(a)), beta)?;
            let want = (beta.degree() > 0).then(|| beta.iota(&v)).transpose()?;
            if !same_opt(&got, &want) {
                bad2 = Some(format!("e{}ε acting on {}", a + 1, print_form(beta)));
            }
            let got = m.act(&m.generator(Gen::Plain(a)), beta)?;
            if !same_opt(&got, &Some(beta.lie(&v)?)) {
                bad3 = Some(format!("e{} acting on {}", a + 1, print_form(beta)));
            }
        }
    }
    rep.record("rule2_eps_contraction", bad2);
    rep.record("rule3_lie_derivative", bad3);

    let mut bad4 = None;
    let mut bad5 = None;
    let mut bad6 = None;
    let mut bad_sym = None;
    for a in 0..r {
        for b in 0..r {
            let (ea, eb) = (m.generator(Gen::Eps(a)), m.generator(Gen::Eps(b)));
            let (pa, pb) = (m.generator(Gen::Plain(a)), m.generator(Gen::Plain(b)));
            let x = m.bracket(&ea, &eb)?;
            let want = m.term(&KForm::function(&chart, q.pairing[a][b].clone()), Gen::C)?;
            if x != want {
                bad4 = Some(format!("[e{}ε, e{}ε]", a + 1, b + 1));
            }
            let x = m.bracket(&pa, &eb)?;
            if x != m.eps_section(&q.structure[a][b]) {
                bad5 = Some(format!("[e{}, e{}ε]", a + 1, b + 1));
            }
            let y = m.bracket(&ea, &pb)?;
            let dpair = KForm::function(&chart, q.pairing[a][b].clone()).d().neg();
            let mut want = m.eps_section(&q.structure[a][b]);
            want.c = Some(dpair);
            let want = m.normalize(want)?;
            if y != want {
                bad6 = Some(format!("[e{}ε, e{}]", a + 1, b + 1));
            }
            let swapped = m.bracket(&eb, &pa)?;
            let sum: Vec<Poly<S>> = vec_add(&x.eps_functions(), &swapped.eps_functions());
            if !sum.iter().all(Poly::is_zero) {
                bad_sym = Some(format!("[e{}, e{}ε] + [e{}ε, e{}] = {}", a + 1, b + 1, b + 1, a + 1, q.section_string(&sum)));
            }
        }
    }
    rep.record("rule4_pairing", bad4);
    rep.record("rule5_derived_bracket", bad5);
    rep.record("rule6_mixed_bracket", bad6);
    rep.record("graded_antisymmetry", bad_sym);
    Ok(rep)
}

fn same_opt<S: Field>(a: &Option<KForm<S>>, b: &Option<KForm<S>>) -> bool {
    let z = |x: &Option<KForm<S>>| x.as_ref().map_or(true, KForm::is_zero);
    match (a, b) {
        (Some(x), Some(y)) => x == y,
        _ => z(a) && z(b),
    }
}

fn probe_forms<S: Field>(chart: &Chart) -> Vec<KForm<S>> {
    let n = chart.dim();
    let mut out = Vec::new();
    for i in 0..n {
        out.push(KForm::function(chart, Poly::var(n, i)));
        out.push(KForm::dx(chart, i).scale(&Poly::var(n, (i + 1) % n)));
        for j in i + 1..n {
            out.push(KForm::dx(chart, i).wedge(&KForm::dx(chart, j)).unwrap().scale(&Poly::var(n, i)));
        }
    }
    out
}

/// The right-hand side `λ₁τQ₁ ∔ λ₂τQ₂`: tuples of elements of the `τQ_k`
/// with brackets taken component-wise and markings pushed out along
/// `(μ₁, μ₂) ↦ λ₁μ₁ + λ₂μ₂`.
struct TauSum<'a, S> {
    parts: Vec<TauModule<S>>,
    sum: &'a CourantSum<S>,
}

impl<S: Field> TauSum<'_, S> {
    /// Canonical form of a tuple of normal-form elements of one degree, as
    /// an element of the τ-model of the linear combination.
    fn push_out(&self, target: &TauModule<S>, tuple: &[TauElement<S>]) -> Result<TauElement<S>> {
        let d = tuple[0].degree;
        let chart = target.chart().clone();
        match d {
            -2 => {
                let mut w = KForm::zero(&chart, 0);
                for (x, l) in tuple.iter().zip(&self.sum.lambdas) {
                    w = w.add(&x.c.as_ref().unwrap().scale(&Poly::constant(chart.dim(), l.clone())))?;
                }
                target.term(&w, Gen::C)
            }
            -1 => {
                let sections: Vec<Vec<Poly<S>>> = tuple.iter().map(|x| x.eps_functions()).collect();
                Ok(target.eps_section(&self.sum.project_tuple(&sections)?))
            }
            _ => Err(Error::unsupported("push-out of degree-0 tuples is not needed")),
        }
    }

    fn bracket(&self, x: &[TauElement<S>], y: &[TauElement<S>]) -> Result<Vec<TauElement<S>>> {
        self.parts.iter().zip(x.iter().zip(y)).map(|(m, (u, v))| m.bracket(u, v)).collect()
    }
}

/// Verifies `τ(λ₁Q₁ ∔ λ₂Q₂) ≅ λ₁τQ₁ ∔ λ₂τQ₂` on generators: the map
/// `c_k ↦ λ_k c`, `E_bε ↦ (s_k b·ε)_k`, `E_b ↦ (s_k b)_k`, `F_j ε ↦ dx_j·c` must
/// match markings, anchors and the bracket table.
pub fn check_tau_linear<S: Field>(
    e1: &CourantExtension<S>,
    e2: &CourantExtension<S>,
    l1: S,
    l2: S,
) -> Result<Report> {
    let sum = crate::courant::linear_combination(&[e1.clone(), e2.clone()], &[l1, l2])?;
    let lhs = tau(sum.courant())?;
    let rhs = TauSum { parts: vec![tau(&e1.courant)?, tau(&e2.courant)?], sum: &sum };
    let chart = lhs.chart().clone();
    let n = chart.dim();
    let rb = e1.base.rank;
    let r = lhs.rank();

    // images of the degree −1 and degree 0 generators as tuples
    let lift = |b: usize| -> Vec<Vec<Poly<S>>> { sum.lift_tuple(b) };
    let eps_img = |a: usize| -> Result<Vec<TauElement<S>>> {
        if a < rb {
            Ok(rhs.parts.iter().zip(lift(a)).map(|(m, s)| m.eps_section(&s)).collect())
        } else {
            let dx = KForm::dx(&chart, a - rb);
            let mut out = Vec::new();
            for (k, m) in rhs.parts.iter().enumerate() {
                // dx_j·c_k pushes out to λ_k dx_j·c; split it evenly over a summand with λ ≠ 0
                let w = if Some(k) == first_nonzero(&sum.lambdas) {
                    dx.scale(&Poly::constant(n, S::one() / sum.lambdas[k].clone()))
                } else {
                    KForm::zero(&chart, 1)
                };
                out.push(m.term(&w, Gen::C)?);
            }
            Ok(out)
        }
    };
    let plain_img = |b: usize| -> Vec<TauElement<S>> {
        rhs.parts.iter().zip(lift(b)).map(|(m, s)| m.plain_section(&s)).collect()
    };

    let mut rep = Report::new();
    let mut marking_ok = true;
    for k in 0..rhs.parts.len() {
        let tuple: Vec<TauElement<S>> = rhs
            .parts
            .iter()
            .enumerate()
            .map(|(j, m)| if j == k { m.marking() } else { m.zero(-2) })
            .collect();
        let want = lhs.term(&KForm::function(&chart, Poly::constant(n, sum.lambdas[k].clone())), Gen::C)?;
        marking_ok &= rhs.push_out(&lhs, &tuple)? == want;
    }
    let central = rhs.parts.iter().all(|m| {
        (0..m.rank()).all(|a| m.bracket(&m.marking(), &m.generator(Gen::Eps(a))).map_or(false, |x| x.is_zero()))
    });
    rep.record(
        "marking",
        if marking_ok && central { None } else { Some("markings do not correspond".into()) },
    );

    let mut bad = None;
    for a in 0..r {
        let u = lhs.generator(Gen::Eps(a));
        for i in 0..n {
            let dx = KForm::dx(&chart, i);
            let l = lhs.act(&u, &dx)?;
            if a < rb {
                for (m, x) in rhs.parts.iter().zip(eps_img(a)?) {
                    if !same_opt(&l, &m.act(&x, &dx)?) {
                        bad = Some(format!("anchor of E{}ε on dx{}", a + 1, i + 1));
                    }
                }
            } else if !same_opt(&l, &None) {
                bad = Some(format!("anchor of F{}ε is nonzero", a - rb + 1));
            }
        }
    }
    rep.record("anchor", bad);

    let mut bad = None;
    'pairs: for a in 0..r {
        let ua = eps_img(a)?;
        for b in 0..r {
            let ub = eps_img(b)?;
            let left = lhs.bracket(&lhs.generator(Gen::Eps(a)), &lhs.generator(Gen::Eps(b)))?;
            if rhs.push_out(&lhs, &rhs.bracket(&ua, &ub)?)? != left {
                bad = Some(format!("[E{}ε, E{}ε]", a + 1, b + 1));
                break 'pairs;
            }
            if a < rb {
                let pa = plain_img(a);
                let left = lhs.bracket(&lhs.generator(Gen::Plain(a)), &lhs.generator(Gen::Eps(b)))?;
                if rhs.push_out(&lhs, &rhs.bracket(&pa, &ub)?)? != left {
                    bad = Some(format!("[E{}, E{}ε]", a + 1, b + 1));
                    break 'pairs;
                }
                let left = lhs.bracket(&lhs.generator(Gen::Eps(b)), &lhs.generator(Gen::Plain(a)))?;
                if rhs.push_out(&lhs, &rhs.bracket(&ub, &pa)?)? != left {
                    bad = Some(format!("[E{}ε, E{}]", b + 1, a + 1));
                    break 'pairs;
                }
            }
        }
    }
    rep.record("bracket_table", bad);
    Ok(rep)
}

fn first_nonzero<S: Field>(l: &[S]) -> Option<usize> {
    l.iter().position(|x| !x.is_zero())
}
