//! JSON schemas for structure data.
//!
//! Polynomials are strings in the chart's coordinates. Generators are
//! numbered from 1 in bracket keys (`"a,b"`), and omitted entries are zero.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::courant::{CourantData, DiracData};
use crate::error::{Error, Result};
use crate::lie_algebroid::LieData;
use crate::linalg::Mat;
use crate::scalar::Field;
use crate::symcalc::{parse_poly, print_poly, Chart, ChartMap, Poly};

/// A chart, either inline or by name in some enclosing table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ChartJson {
    Named(String),
    Inline { name: String, coords: Vec<String> },
}

impl ChartJson {
    pub fn inline(chart: &Chart) -> Self {
        ChartJson::Inline { name: chart.name().to_string(), coords: chart.coords().to_vec() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LieJson {
    pub chart: ChartJson,
    pub rank: usize,
    pub anchor: Vec<Vec<String>>,
    #[serde(default)]
    pub bracket: BTreeMap<String, Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CourantJson {
    pub chart: ChartJson,
    pub rank: usize,
    pub anchor: Vec<Vec<String>>,
    pub coanchor: Vec<Vec<String>>,
    pub pairing: Vec<Vec<String>>,
    #[serde(default)]
    pub bracket: BTreeMap<String, Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub splitting: Option<Vec<Vec<String>>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiracJson {
    /// Names of the coordinates set to zero.
    #[serde(default)]
    pub support: Vec<String>,
    pub generators: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapJson {
    pub source: ChartJson,
    pub target: ChartJson,
    pub components: Vec<String>,
}

fn located(what: &str, e: Error) -> Error {
    match e {
        Error::Parse { pos, msg } => Error::Parse { pos, msg: format!("{what}: {msg}") },
        other => other,
    }
}

pub fn poly_from<S: Field>(s: &str, chart: &Chart, what: &str) -> Result<Poly<S>> {
    parse_poly(s, chart).map_err(|e| located(what, e))
}

pub fn vec_from<S: Field>(v: &[String], chart: &Chart, what: &str) -> Result<Vec<Poly<S>>> {
    v.iter().enumerate().map(|(i, s)| poly_from(s, chart, &format!("{what}[{}]", i + 1))).collect()
}

pub fn mat_from<S: Field>(m: &[Vec<String>], chart: &Chart, what: &str) -> Result<Mat<S>> {
    m.iter().enumerate().map(|(i, row)| vec_from(row, chart, &format!("{what}[{}]", i + 1))).collect()
}

pub fn vec_to<S: Field>(v: &[Poly<S>], chart: &Chart) -> Vec<String> {
    v.iter().map(|p| print_poly(p, chart)).collect()
}

pub fn mat_to<S: Field>(m: &Mat<S>, chart: &Chart) -> Vec<Vec<String>> {
    m.iter().map(|row| vec_to(row, chart)).collect()
}

fn bracket_key(key: &str, rank: usize) -> Result<(usize, usize)> {
    let parsed = key.split_once(',').and_then(|(a, b)| Some((a.trim().parse::<usize>().ok()?, b.trim().parse::<usize>().ok()?)));
    match parsed {
        Some((a, b)) if (1..=rank).contains(&a) && (1..=rank).contains(&b) => Ok((a - 1, b - 1)),
        _ => Err(Error::invalid(format!("bracket key \"{key}\" is not a pair of generator numbers in 1..={rank}"))),
    }
}

fn check_len<T>(v: &[T], len: usize, what: &str) -> Result<()> {
    if v.len() != len {
        return Err(Error::dim(format!("{what} has {} entries, expected {len}", v.len())));
    }
    Ok(())
}

/// Bracket table: `antisymmetric` fills `[b,a] = −[a,b]` when only one
/// order is given and rejects inconsistent pairs.
fn structure_from<S: Field>(
    table: &BTreeMap<String, Vec<String>>,
    rank: usize,
    chart: &Chart,
    antisymmetric: bool,
) -> Result<Vec<Vec<Vec<Poly<S>>>>> {
    let n = chart.dim();
    let mut st: Vec<Vec<Option<Vec<Poly<S>>>>> = vec![vec![None; rank]; rank];
    for (key, v) in table {
        let (a, b) = bracket_key(key, rank)?;
        check_len(v, rank, &format!("bracket \"{key}\""))?;
        let val = vec_from(v, chart, &format!("bracket \"{key}\""))?;
        if st[a][b].is_some() {
            return Err(Error::invalid(format!("bracket ({},{}) given twice", a + 1, b + 1)));
        }
        st[a][b] = Some(val);
    }
    let mut out = vec![vec![vec![Poly::zero(n); rank]; rank]; rank];
    for a in 0..rank {
        for b in 0..rank {
            match (&st[a][b], if antisymmetric { &st[b][a] } else { &None }) {
                (Some(v), Some(w)) => {
                    if v.iter().zip(w).any(|(p, q)| *p != -q) {
                        return Err(Error::invalid(format!("brackets ({},{}) and ({},{}) are not opposite", a + 1, b + 1, b + 1, a + 1)));
                    }
                    out[a][b] = v.clone();
                }
                (Some(v), None) => out[a][b] = v.clone(),
                (None, Some(w)) => out[a][b] = w.iter().map(|p| -p).collect(),
                (None, None) => {}
            }
        }
    }
    Ok(out)
}

fn structure_to<S: Field>(st: &[Vec<Vec<Poly<S>>>], chart: &Chart, antisymmetric: bool) -> BTreeMap<String, Vec<String>> {
    let mut out = BTreeMap::new();
    for (a, row) in st.iter().enumerate() {
        for (b, v) in row.iter().enumerate() {
            if (antisymmetric && b <= a) || v.iter().all(|p| p.is_zero()) {
                continue;
            }
            out.insert(format!("{},{}", a + 1, b + 1), vec_to(v, chart));
        }
    }
    out
}

impl LieJson {
    pub fn to_data<S: Field>(&self, chart: &Chart) -> Result<LieData<S>> {
        check_len(&self.anchor, self.rank, "anchor")?;
        for row in &self.anchor {
            check_len(row, chart.dim(), "anchor row")?;
        }
        let anchor = mat_from(&self.anchor, chart, "anchor")?;
        let st = structure_from(&self.bracket, self.rank, chart, true)?;
        LieData::new(chart, anchor, st)
    }

    pub fn from_data<S: Field>(a: &LieData<S>) -> Self {
        LieJson {
            chart: ChartJson::inline(&a.chart),
            rank: a.rank,
            anchor: mat_to(&a.anchor, &a.chart),
            bracket: structure_to(&a.structure, &a.chart, true),
        }
    }
}

impl CourantJson {
    pub fn to_data<S: Field>(&self, chart: &Chart) -> Result<CourantData<S>> {
        let n = chart.dim();
        for (what, m, cols) in [("anchor", &self.anchor, n), ("coanchor", &self.coanchor, n), ("pairing", &self.pairing, self.rank)] {
            check_len(m, self.rank, what)?;
            for row in m {
                check_len(row, cols, &format!("{what} row"))?;
            }
        }
        let q = CourantData::new(
            chart,
            mat_from(&self.anchor, chart, "anchor")?,
            mat_from(&self.coanchor, chart, "coanchor")?,
            mat_from(&self.pairing, chart, "pairing")?,
            structure_from(&self.bracket, self.rank, chart, false)?,
        )?;
        match &self.splitting {
            Some(s) => q.with_splitting(mat_from(s, chart, "splitting")?),
            None => Ok(q),
        }
    }

    pub fn from_data<S: Field>(q: &CourantData<S>) -> Self {
        CourantJson {
            chart: ChartJson::inline(&q.chart),
            rank: q.rank,
            anchor: mat_to(&q.anchor, &q.chart),
            coanchor: mat_to(&q.coanchor, &q.chart),
            pairing: mat_to(&q.pairing, &q.chart),
            bracket: structure_to(&q.structure, &q.chart, false),
            splitting: q.splitting.as_ref().map(|s| mat_to(s, &q.chart)),
        }
    }
}

impl DiracJson {
    /// Generators are read over the support chart of `q`.
    pub fn to_data<S: Field>(&self, q: &CourantData<S>) -> Result<DiracData<S>> {
        let mut support = Vec::new();
        for name in &self.support {
            let i = q.chart.index_of(name).ok_or_else(|| Error::invalid(format!("unknown coordinate \"{name}\" in support")))?;
            support.push(i);
        }
        support.sort_unstable();
        support.dedup();
        let z = q.chart.subspace(&support);
        for g in &self.generators {
            check_len(g, q.rank, "Dirac generator")?;
        }
        Ok(DiracData { support, generators: mat_from(&self.generators, &z, "generator")? })
    }

    pub fn from_data<S: Field>(q: &CourantData<S>, d: &DiracData<S>) -> Self {
        let z = d.support_chart(q);
        DiracJson {
            support: d.support.iter().map(|&i| q.chart.coords()[i].clone()).collect(),
            generators: mat_to(&d.generators, &z),
        }
    }
}

impl MapJson {
    pub fn to_map<S: Field>(&self, source: &Chart, target: &Chart) -> Result<ChartMap<S>> {
        check_len(&self.components, target.dim(), "map components")?;
        ChartMap::new(source, target, vec_from(&self.components, source, "component")?)
    }

    pub fn from_map<S: Field>(f: &ChartMap<S>) -> Self {
        MapJson {
            source: ChartJson::inline(&f.source),
            target: ChartJson::inline(&f.target),
            components: vec_to(&f.comps, &f.source),
        }
    }
}
