use std::collections::BTreeMap;

use algebroid::courant::{check_courant, check_courant_morphism, check_dirac, connection_shift, curvature, Connection, CourantExtension};
use algebroid::descent::{check_cocycle, CoverData, Descend, DescentDatum, Overlap, Triple};
use algebroid::json::{mat_from, CourantJson, DiracJson, LieJson};
use algebroid::lie_algebroid::{check_c_plus_assoc, check_lie_algebroid, f_plus, LieMode};
use algebroid::pullback::{
    check_c_plusplus, check_curvature_pullback, check_dirac_correspondence, check_twist_commute, courant_morphism_graph,
    f_plusplus, i_plusplus_dirac, CourantMode,
};
use algebroid::report::Report;
use algebroid::transgression::{check_bracket_table, check_tau_linear, cour, tau};
use algebroid::{Chart, ChartMap, CourantData, Error, Rat, Result};
use serde_json::{json, Value};

use crate::spec::{form, missing, rational, Object, SpecFile};

pub const VERBS: &[&str] = &[
    "check-lie",
    "check-courant",
    "check-dirac",
    "pullback",
    "twist",
    "curvature",
    "tau-roundtrip",
    "tau-linear",
    "cocycle",
    "twist-commute",
    "curvature-pullback",
    "dirac-pushdown",
    "morphism-graph",
    "assoc-c-plus",
];

pub struct Settings {
    pub seed: u64,
    pub samples: usize,
}

#[derive(Default)]
pub struct Outcome {
    pub report: Report,
    pub artifacts: BTreeMap<String, Value>,
}

fn req<'a, T>(v: &'a Option<T>, field: &str) -> Result<&'a T> {
    v.as_ref().ok_or_else(|| missing(field))
}

fn courant_mode(name: Option<&str>, f: &ChartMap) -> Result<CourantMode<Rat>> {
    Ok(match name {
        None => CourantMode::detect(f),
        Some("exact-split") => CourantMode::ExactSplit(None),
        Some("coordinate-embedding") => CourantMode::CoordinateEmbedding,
        Some("coordinate-submersion") => CourantMode::CoordinateSubmersion,
        Some("identity") => CourantMode::Identity,
        Some(other) => return Err(Error::invalid(format!("unknown pullback mode \"{other}\""))),
    })
}

fn lie_mode(name: Option<&str>, f: &ChartMap) -> Result<LieMode<Rat>> {
    Ok(match name {
        None => LieMode::detect(f),
        Some("transitive-split") => LieMode::TransitiveSplit(None),
        Some("coordinate-embedding") => LieMode::CoordinateEmbedding,
        Some("coordinate-submersion") => LieMode::CoordinateSubmersion,
        Some("identity") => LieMode::Identity,
        Some(other) => return Err(Error::invalid(format!("unknown pullback mode \"{other}\""))),
    })
}

fn connection(spec: &SpecFile, q: &CourantData) -> Result<Connection<Rat>> {
    match &spec.connection {
        Some(rows) => Connection::new(q, mat_from(rows, &q.chart, "connection")?),
        None => Connection::from_splitting(q),
    }
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

pub fn run(verb: &str, spec: &SpecFile, s: &Settings) -> Result<Outcome> {
    let mut out = Outcome::default();
    let rep = &mut out.report;
    let art = &mut out.artifacts;
    match verb {
        "check-lie" => {
            let a = spec.lie_named(req(&spec.algebroid, "algebroid")?)?;
            *rep = check_lie_algebroid(&a, s.samples, s.seed);
        }
        "check-courant" => {
            let q = spec.courant_named(req(&spec.algebroid, "algebroid")?)?;
            *rep = check_courant(&q, s.samples, s.seed);
        }
        "check-dirac" => {
            let q = spec.courant_named(req(&spec.algebroid, "algebroid")?)?;
            let d = req(&spec.dirac, "dirac")?.to_data(&q)?;
            *rep = check_dirac(&q, &d)?;
        }
        "pullback" => {
            let f = spec.map_named(req(&spec.map, "map")?)?;
            match spec.object(req(&spec.algebroid, "algebroid")?)? {
                Object::Lie(a) => {
                    let p = f_plus(&f, &a, lie_mode(spec.mode.as_deref(), &f)?)?;
                    rep.absorb("result", check_lie_algebroid(&p.result, s.samples, s.seed));
                    art.insert("mode".into(), json!(p.mode));
                    art.insert("result".into(), to_value(&LieJson::from_data(&p.result)));
                }
                Object::Courant(q) => {
                    let p = f_plusplus(&f, &q, courant_mode(spec.mode.as_deref(), &f)?)?;
                    rep.absorb("relations", p.check_relations()?);
                    rep.absorb("result", check_courant(&p.result, s.samples, s.seed));
                    art.insert("mode".into(), json!(p.mode));
                    art.insert("result".into(), to_value(&CourantJson::from_data(&p.result)));
                }
            }
        }
        "twist" => {
            let q = spec.courant_named(req(&spec.algebroid, "algebroid")?)?;
            let h = form(req(&spec.h, "H")?, &q.chart, 3, "H")?;
            let t = algebroid::courant::twist(&q, &h)?;
            rep.absorb("result", check_courant(&t, s.samples, s.seed));
            art.insert("result".into(), to_value(&CourantJson::from_data(&t)));
        }
        "curvature" => {
            let q = spec.courant_named(req(&spec.algebroid, "algebroid")?)?;
            let conn = connection(spec, &q)?;
            let c = curvature(&q, &conn)?;
            rep.record("closed", (!c.d().is_zero()).then(|| format!("d(curvature) = {}", algebroid::symcalc::print_form(&c.d()))));
            if let Some(e) = &spec.expected {
                let e = form(e, &q.chart, 3, "expected")?;
                let diff = c.sub(&e)?;
                rep.record("matches_expected", (!diff.is_zero()).then(|| format!("curvature − expected = {}", algebroid::symcalc::print_form(&diff))));
            }
            if let Some(b) = &spec.shift {
                let b = form(b, &q.chart, 2, "shift")?;
                let shifted = curvature(&q, &connection_shift(&q, &conn, &b)?)?;
                let diff = shifted.sub(&c.add(&b.d())?)?;
                rep.record("torsor_law", (!diff.is_zero()).then(|| format!("c(∇+B) − c(∇) − dB = {}", algebroid::symcalc::print_form(&diff))));
            }
            art.insert("curvature".into(), json!(algebroid::symcalc::print_form(&c)));
        }
        "tau-roundtrip" => {
            let q = spec.courant_named(req(&spec.algebroid, "algebroid")?)?;
            let m = tau(&q)?;
            let back = cour(&m)?;
            rep.record("round_trip", (!back.same_structure(&q)).then(|| "cour(tau(Q)) differs from Q".to_string()));
            rep.absorb("bracket_table", check_bracket_table(&m)?);
            art.insert("graded_ranks".into(), json!(m.graded_ranks()));
        }
        "tau-linear" => {
            let names = req(&spec.extensions, "extensions")?;
            let lam = req(&spec.lambdas, "lambdas")?;
            if names.len() != 2 || lam.len() != 2 {
                return Err(Error::dim("tau-linear takes two extensions and two lambdas"));
            }
            let e1 = CourantExtension::exact(&spec.courant_named(&names[0])?)?;
            let e2 = CourantExtension::exact(&spec.courant_named(&names[1])?)?;
            *rep = check_tau_linear(&e1, &e2, rational(&lam[0])?, rational(&lam[1])?)?;
        }
        "cocycle" => *rep = cocycle(spec)?,
        "twist-commute" => {
            let f = spec.map_named(req(&spec.map, "map")?)?;
            let q = spec.courant_named(req(&spec.algebroid, "algebroid")?)?;
            let h = form(req(&spec.h, "H")?, &q.chart, 3, "H")?;
            *rep = check_twist_commute(&f, &q, &h, courant_mode(spec.mode.as_deref(), &f)?)?;
        }
        "curvature-pullback" => {
            let f = spec.map_named(req(&spec.map, "map")?)?;
            let q = spec.courant_named(req(&spec.algebroid, "algebroid")?)?;
            let conn = connection(spec, &q)?;
            *rep = check_curvature_pullback(&f, &q, &conn, courant_mode(spec.mode.as_deref(), &f)?)?;
        }
        "dirac-pushdown" => {
            let i = spec.map_named(req(&spec.map, "map")?)?;
            let q = spec.courant_named(req(&spec.algebroid, "algebroid")?)?;
            let k = req(&spec.dirac, "dirac")?.to_data(&q)?;
            *rep = check_dirac_correspondence(&i, &q, &k)?;
            let (pres, d) = i_plusplus_dirac(&i, &q, &k)?;
            art.insert("reduced".into(), to_value(&DiracJson::from_data(&pres.result, &d)));
        }
        "morphism-graph" => {
            let f = spec.map_named(req(&spec.map, "map")?)?;
            let qy = spec.courant_named(req(&spec.source, "source")?)?;
            let qx = spec.courant_named(req(&spec.target, "target")?)?;
            let phi = mat_from(req(&spec.morphism, "morphism")?, &f.source, "morphism")?;
            let pres = f_plusplus(&f, &qx, CourantMode::detect(&f))?;
            rep.absorb("morphism", check_courant_morphism(&qy, &pres.result, &phi));
            if rep.all_passed() {
                let g = courant_morphism_graph(&f, &qy, &qx, &phi)?;
                rep.absorb("graph", check_dirac(g.sum.courant(), &g.dirac)?);
                art.insert("graph".into(), to_value(&DiracJson::from_data(g.sum.courant(), &g.dirac)));
            }
        }
        "assoc-c-plus" => {
            let chain = req(&spec.chain, "chain")?;
            let maps = chain.iter().map(|m| spec.map_named(m)).collect::<Result<Vec<_>>>()?;
            match (spec.object(req(&spec.algebroid, "algebroid")?)?, maps.as_slice()) {
                (Object::Lie(a), [phi, psi, xi]) => *rep = check_c_plus_assoc(phi, psi, xi, &a, s.samples, s.seed)?,
                (Object::Courant(q), [g, f]) => {
                    let inner = f_plusplus(g, &q, CourantMode::detect(g))?;
                    let outer = f_plusplus(f, &inner.result, CourantMode::detect(f))?;
                    let gf = g.compose(f)?;
                    let comp = f_plusplus(&gf, &q, CourantMode::detect(&gf))?;
                    *rep = check_c_plusplus(&inner, &outer, &comp)?;
                }
                (o, _) => {
                    return Err(Error::invalid(format!(
                        "assoc-c-plus takes a chain of 3 maps for a Lie algebroid or 2 for a Courant algebroid, got {} for a {} algebroid",
                        maps.len(),
                        o.kind()
                    )))
                }
            }
        }
        other => return Err(Error::invalid(format!("unknown verb \"{other}\"; expected one of {}", VERBS.join(", ")))),
    }
    Ok(out)
}

fn piece(n: usize, count: usize, what: &str) -> Result<usize> {
    if n == 0 || n > count {
        return Err(Error::invalid(format!("{what} refers to piece {n}, but the cover has {count}")));
    }
    Ok(n - 1)
}

fn cover(spec: &SpecFile) -> Result<CoverData<Rat>> {
    let d = req(&spec.descent, "descent")?;
    let base = spec.named_chart(&d.base)?;
    if let Some(n) = d.trivial {
        if !(d.pieces.is_empty() && d.overlaps.is_empty() && d.triples.is_empty()) {
            return Err(Error::invalid("a trivial cover takes no pieces, overlaps or triples"));
        }
        return Ok(CoverData::trivial(&base, n));
    }
    let pieces = d.pieces.iter().map(|m| spec.map_named(m)).collect::<Result<Vec<_>>>()?;
    let np = pieces.len();
    let mut overlaps = Vec::new();
    for o in &d.overlaps {
        overlaps.push(Overlap {
            i: piece(o.i, np, "overlap")?,
            j: piece(o.j, np, "overlap")?,
            to_i: spec.map_named(&o.to_i)?,
            to_j: spec.map_named(&o.to_j)?,
        });
    }
    let find = |i: usize, j: usize| -> Result<usize> {
        overlaps
            .iter()
            .position(|o| o.i == i && o.j == j)
            .ok_or_else(|| Error::invalid(format!("no overlap ({},{}) for a triple", i + 1, j + 1)))
    };
    let mut triples = Vec::new();
    for t in &d.triples {
        let (i, j, k) = (piece(t.i, np, "triple")?, piece(t.j, np, "triple")?, piece(t.k, np, "triple")?);
        triples.push(Triple {
            ij: find(i, j)?,
            jk: find(j, k)?,
            ik: find(i, k)?,
            to_ij: spec.map_named(&t.to_ij)?,
            to_jk: spec.map_named(&t.to_jk)?,
            to_ik: spec.map_named(&t.to_ik)?,
        });
    }
    CoverData::new(base, pieces, overlaps, triples)
}

fn datum<T: Descend<Rat>>(
    cover: CoverData<Rat>,
    global: Option<T>,
    objects: Vec<T>,
    g: &[Vec<Vec<String>>],
) -> Result<DescentDatum<Rat, T>> {
    if let Some(global) = global {
        return DescentDatum::restrict_global(cover, &global);
    }
    if g.len() != cover.overlaps.len() {
        return Err(Error::dim(format!("{} gluing matrices for {} overlaps", g.len(), cover.overlaps.len())));
    }
    let charts: Vec<Chart> = cover.overlaps.iter().map(|o| o.to_i.source.clone()).collect();
    let g = g
        .iter()
        .zip(&charts)
        .enumerate()
        .map(|(k, (m, c))| mat_from(m, c, &format!("g[{}]", k + 1)))
        .collect::<Result<Vec<_>>>()?;
    DescentDatum::new(cover, objects, g)
}

fn cocycle(spec: &SpecFile) -> Result<Report> {
    let d = req(&spec.descent, "descent")?;
    let cover = cover(spec)?;
    let names: Vec<&String> = d.global.iter().chain(&d.objects).collect();
    if d.global.is_some() != d.objects.is_empty() {
        return Err(Error::invalid("descent needs either \"global\" or \"objects\" with \"g\""));
    }
    let objs = names.iter().map(|n| spec.object(n)).collect::<Result<Vec<_>>>()?;
    let lie: Option<Vec<_>> = objs.iter().map(|o| if let Object::Lie(a) = o { Some(a.clone()) } else { None }).collect();
    let cou: Option<Vec<_>> = objs.iter().map(|o| if let Object::Courant(q) = o { Some(q.clone()) } else { None }).collect();
    let global = d.global.is_some();
    match (lie, cou) {
        (Some(mut v), _) => {
            let gl = if global { v.pop() } else { None };
            check_cocycle(&datum(cover, gl, v, &d.g)?)
        }
        (_, Some(mut v)) => {
            let gl = if global { v.pop() } else { None };
            check_cocycle(&datum(cover, gl, v, &d.g)?)
        }
        _ => Err(Error::invalid("descent objects must all be Lie or all be Courant algebroids")),
    }
}
