//! Descent data over finite covers given as diagrams of charts and
//! polynomial maps, and the cocycle condition
//! `π₁₂▼(g) ∘ π₂₃▼(g) = π₁₃▼(g)` on triple overlaps.

use crate::courant::{check_courant_morphism, CourantData};
use crate::error::{Error, Result};
use crate::lie_algebroid::{c_plus, check_lie_morphism, f_plus, pull_morphism, LieData, LieMode, LiePullback};
use crate::linalg::{det, mat_mul, right_inverse, Mat};
use crate::pullback::{c_plusplus, f_plusplus, pull_courant_morphism, CourantMode, PullbackPresentation};
use crate::report::Report;
use crate::scalar::Field;
use crate::symcalc::{Chart, ChartMap};

/// `U_ij` with its projections to `U_i` and `U_j`.
#[derive(Clone, Debug)]
pub struct Overlap<S> {
    pub i: usize,
    pub j: usize,
    pub to_i: ChartMap<S>,
    pub to_j: ChartMap<S>,
}

/// `U_ijk` with its projections to the overlaps `U_ij`, `U_jk`, `U_ik`,
/// given as indices into `CoverData::overlaps`.
#[derive(Clone, Debug)]
pub struct Triple<S> {
    pub ij: usize,
    pub jk: usize,
    pub ik: usize,
    pub to_ij: ChartMap<S>,
    pub to_jk: ChartMap<S>,
    pub to_ik: ChartMap<S>,
}

#[derive(Clone, Debug)]
pub struct CoverData<S> {
    pub base: Chart,
    pub pieces: Vec<ChartMap<S>>,
    pub overlaps: Vec<Overlap<S>>,
    pub triples: Vec<Triple<S>>,
}

impl<S: Field> CoverData<S> {
    /// Validates index ranges and that all projections commute.
    pub fn new(base: Chart, pieces: Vec<ChartMap<S>>, overlaps: Vec<Overlap<S>>, triples: Vec<Triple<S>>) -> Result<Self> {
        let cover = CoverData { base, pieces, overlaps, triples };
        for (p, f) in cover.pieces.iter().enumerate() {
            f.target.check_same(&cover.base, &format!("piece {}", p + 1))?;
        }
        for o in &cover.overlaps {
            if o.i >= cover.pieces.len() || o.j >= cover.pieces.len() {
                return Err(Error::dim("overlap refers to a missing piece"));
            }
            if cover.pieces[o.i].compose(&o.to_i)? != cover.pieces[o.j].compose(&o.to_j)? {
                return Err(Error::invalid(format!("projections of U{}{} to X disagree", o.i + 1, o.j + 1)));
            }
        }
        for t in &cover.triples {
            let [ij, jk, ik] = cover.triple_overlaps(t)?;
            let ok = ij.j == jk.i
                && ij.i == ik.i
                && jk.j == ik.j
                && ij.to_i.compose(&t.to_ij)? == ik.to_i.compose(&t.to_ik)?
                && ij.to_j.compose(&t.to_ij)? == jk.to_i.compose(&t.to_jk)?
                && jk.to_j.compose(&t.to_jk)? == ik.to_j.compose(&t.to_ik)?;
            if !ok {
                return Err(Error::invalid(format!("triple overlap {} has incompatible projections", cover.triple_name(t))));
            }
        }
        Ok(cover)
    }

    /// `n` copies of `X` with identity maps, all ordered overlaps and all
    /// ordered triples.
    pub fn trivial(base: &Chart, n: usize) -> Self {
        let id = ChartMap::identity(base);
        let mut overlaps = Vec::new();
        for i in 0..n {
            for j in 0..n {
                overlaps.push(Overlap { i, j, to_i: id.clone(), to_j: id.clone() });
            }
        }
        let mut triples = Vec::new();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    triples.push(Triple {
                        ij: i * n + j,
                        jk: j * n + k,
                        ik: i * n + k,
                        to_ij: id.clone(),
                        to_jk: id.clone(),
                        to_ik: id.clone(),
                    });
                }
            }
        }
        CoverData { base: base.clone(), pieces: vec![id; n], overlaps, triples }
    }

    fn triple_overlaps(&self, t: &Triple<S>) -> Result<[&Overlap<S>; 3]> {
        let get = |k: usize| self.overlaps.get(k).ok_or_else(|| Error::dim("triple refers to a missing overlap"));
        Ok([get(t.ij)?, get(t.jk)?, get(t.ik)?])
    }

    fn triple_name(&self, t: &Triple<S>) -> String {
        match self.triple_overlaps(t) {
            Ok([ij, jk, _]) => format!("({},{},{})", ij.i + 1, ij.j + 1, jk.j + 1),
            Err(_) => "(?)".into(),
        }
    }
}

/// Operations descent needs from an algebroid type.
pub trait Descend<S: Field>: Clone + Sized {
    type Pres;
    fn pull(f: &ChartMap<S>, obj: &Self) -> Result<Self::Pres>;
    fn result(p: &Self::Pres) -> &Self;
    fn compose_iso(inner: &Self::Pres, outer: &Self::Pres, composite: &Self::Pres) -> Result<Mat<S>>;
    fn pull_morphism(m: &Mat<S>, from: &Self::Pres, to: &Self::Pres) -> Result<Mat<S>>;
    fn check_morphism(src: &Self, tgt: &Self, m: &Mat<S>) -> Report;
    fn rank(&self) -> usize;
}

impl<S: Field> Descend<S> for LieData<S> {
    type Pres = LiePullback<S>;
    fn pull(f: &ChartMap<S>, obj: &Self) -> Result<Self::Pres> {
        f_plus(f, obj, LieMode::detect(f))
    }
    fn result(p: &Self::Pres) -> &Self {
        &p.result
    }
    fn compose_iso(inner: &Self::Pres, outer: &Self::Pres, composite: &Self::Pres) -> Result<Mat<S>> {
        c_plus(inner, outer, composite)
    }
    fn pull_morphism(m: &Mat<S>, from: &Self::Pres, to: &Self::Pres) -> Result<Mat<S>> {
        pull_morphism(m, from, to)
    }
    fn check_morphism(src: &Self, tgt: &Self, m: &Mat<S>) -> Report {
        check_lie_morphism(src, tgt, m)
    }
    fn rank(&self) -> usize {
        self.rank
    }
}

impl<S: Field> Descend<S> for CourantData<S> {
    type Pres = PullbackPresentation<S>;
    fn pull(f: &ChartMap<S>, obj: &Self) -> Result<Self::Pres> {
        f_plusplus(f, obj, CourantMode::detect(f))
    }
    fn result(p: &Self::Pres) -> &Self {
        &p.result
    }
    fn compose_iso(inner: &Self::Pres, outer: &Self::Pres, composite: &Self::Pres) -> Result<Mat<S>> {
        c_plusplus(inner, outer, composite)
    }
    fn pull_morphism(m: &Mat<S>, from: &Self::Pres, to: &Self::Pres) -> Result<Mat<S>> {
        pull_courant_morphism(m, from, to)
    }
    fn check_morphism(src: &Self, tgt: &Self, m: &Mat<S>) -> Report {
        check_courant_morphism(src, tgt, m)
    }
    fn rank(&self) -> usize {
        self.rank
    }
}

/// Objects `F_i` on the pieces and isomorphisms
/// `g_ij: to_j▼F_j → to_i▼F_i` on every overlap.
#[derive(Clone, Debug)]
pub struct DescentDatum<S, T> {
    pub cover: CoverData<S>,
    pub objects: Vec<T>,
    pub g: Vec<Mat<S>>,
}

impl<S: Field, T: Descend<S>> DescentDatum<S, T> {
    pub fn new(cover: CoverData<S>, objects: Vec<T>, g: Vec<Mat<S>>) -> Result<Self> {
        if objects.len() != cover.pieces.len() || g.len() != cover.overlaps.len() {
            return Err(Error::dim("one object per piece and one isomorphism per overlap are required"));
        }
        Ok(DescentDatum { cover, objects, g })
    }

    /// The datum of a global object: `F_i = π_i▼F` and `g_ij` the canonical
    /// identification of `to_j▼π_j▼F` with `to_i▼π_i▼F` through `(π∘to)▼F`.
    pub fn restrict_global(cover: CoverData<S>, global: &T) -> Result<Self> {
        let pulled: Vec<T::Pres> = cover.pieces.iter().map(|p| T::pull(p, global)).collect::<Result<_>>()?;
        let objects: Vec<T> = pulled.iter().map(|p| T::result(p).clone()).collect();
        let mut g = Vec::new();
        for o in &cover.overlaps {
            let via = cover.pieces[o.i].compose(&o.to_i)?;
            let composite = T::pull(&via, global)?;
            let ci = T::compose_iso(&pulled[o.i], &T::pull(&o.to_i, &objects[o.i])?, &composite)?;
            let cj = T::compose_iso(&pulled[o.j], &T::pull(&o.to_j, &objects[o.j])?, &composite)?;
            let nz = via.source.dim();
            let inv = right_inverse(nz, &ci, ci.len()).map_err(|_| Error::unsupported("c⁺ has no polynomial inverse"))?;
            g.push(mat_mul(nz, &inv, &cj, T::result(&composite).rank()));
        }
        DescentDatum::new(cover, objects, g)
    }
}

/// Re-checks that each `g` is an isomorphism of the pulled structures and
/// verifies the cocycle identity on every triple overlap, naming the first
/// offending triple.
pub fn check_cocycle<S: Field, T: Descend<S>>(d: &DescentDatum<S, T>) -> Result<Report> {
    let cover = &d.cover;
    let mut rep = Report::new();
    // pulled objects to_i▼F_i and to_j▼F_j per overlap
    let mut pulled: Vec<(T::Pres, T::Pres)> = Vec::new();
    let mut bad = None;
    for (k, o) in cover.overlaps.iter().enumerate() {
        let pi = T::pull(&o.to_i, &d.objects[o.i])?;
        let pj = T::pull(&o.to_j, &d.objects[o.j])?;
        let (src, tgt) = (T::result(&pj), T::result(&pi));
        let g = &d.g[k];
        let nz = o.to_i.source.dim();
        let shape_ok = g.len() == tgt.rank() && g.iter().all(|r| r.len() == src.rank());
        if bad.is_none() {
            if !shape_ok {
                bad = Some(format!("g{}{} has the wrong shape", o.i + 1, o.j + 1));
            } else {
                let r = T::check_morphism(src, tgt, g);
                let dt = det(nz, g);
                if !r.all_passed() {
                    bad = Some(format!("g{}{} fails {:?}", o.i + 1, o.j + 1, r.failed_names()));
                } else if dt.is_zero() || !dt.is_constant() {
                    bad = Some(format!("g{}{} is not invertible", o.i + 1, o.j + 1));
                }
            }
        }
        pulled.push((pi, pj));
    }
    let shapes_ok = bad.as_deref().map_or(true, |b| !b.ends_with("wrong shape"));
    rep.record("isomorphisms", bad);
    if !shapes_ok {
        rep.fail("cocycle", "skipped: some g has the wrong shape");
        return Ok(rep);
    }

    let mut bad = None;
    for t in &cover.triples {
        let [ij, jk, ik] = cover.triple_overlaps(t)?;
        // G_ab on U_ijk: (to_b∘t)▼F_b → (to_a∘t)▼F_a
        let lift = |o: &Overlap<S>, k: usize, tmap: &ChartMap<S>| -> Result<Mat<S>> {
            let (pi, pj) = &pulled[k];
            let from = T::pull(tmap, T::result(pj))?;
            let to = T::pull(tmap, T::result(pi))?;
            let pm = T::pull_morphism(&d.g[k], &from, &to)?;
            let ci = T::compose_iso(pi, &to, &T::pull(&o.to_i.compose(tmap)?, &d.objects[o.i])?)?;
            let cj = T::compose_iso(pj, &from, &T::pull(&o.to_j.compose(tmap)?, &d.objects[o.j])?)?;
            let nz = tmap.source.dim();
            let inv = right_inverse(nz, &cj, cj.len()).map_err(|_| Error::unsupported("c⁺ has no polynomial inverse"))?;
            let tmp = mat_mul(nz, &pm, &inv, cj.len());
            Ok(mat_mul(nz, &ci, &tmp, cj.len()))
        };
        let g_ij = lift(ij, t.ij, &t.to_ij)?;
        let g_jk = lift(jk, t.jk, &t.to_jk)?;
        let g_ik = lift(ik, t.ik, &t.to_ik)?;
        let nz = t.to_ij.source.dim();
        let lhs = mat_mul(nz, &g_ij, &g_jk, g_jk.first().map_or(0, |r| r.len()));
        if lhs != g_ik {
            bad = Some(format!("triple {}: g_ij∘g_jk ≠ g_ik", cover.triple_name(t)));
            break;
        }
    }
    rep.record("cocycle", bad);
    Ok(rep)
}
