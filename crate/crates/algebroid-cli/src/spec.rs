//! Job files: named charts, maps and objects plus the verb's arguments.

use std::collections::BTreeMap;
use std::str::FromStr;

use algebroid::courant::{dotplus, linear_combination, opposite, standard_exact, twist, CourantExtension};
use algebroid::json::{ChartJson, CourantJson, DiracJson, LieJson, MapJson};
use algebroid::symcalc::parse_form;
use algebroid::{Chart, ChartMap, CourantData, Error, KForm, LieData, Rat, Result};
use serde::Deserialize;

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ObjectJson {
    Lie(LieJson),
    Tangent { chart: ChartJson },
    Courant(CourantJson),
    /// `T ⊕ Ω¹` with the `H`-twisted Dorfman bracket.
    Standard {
        chart: ChartJson,
        #[serde(rename = "H", default)]
        h: Option<String>,
    },
    Twist {
        of: String,
        #[serde(rename = "H")]
        h: String,
    },
    Opposite { of: String },
    Dotplus { of: [String; 2] },
    /// Baer-type combination of exact algebroids.
    Combination { of: Vec<String>, lambdas: Vec<String> },
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OverlapJson {
    pub i: usize,
    pub j: usize,
    pub to_i: String,
    pub to_j: String,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TripleJson {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub to_ij: String,
    pub to_jk: String,
    pub to_ik: String,
}

/// A cover is either `trivial` (copies of the base) or listed explicitly
/// with 1-based piece numbers; `g` follows the order of `overlaps`
/// (row-major `i, j` for trivial covers).
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DescentJson {
    pub base: String,
    #[serde(default)]
    pub trivial: Option<usize>,
    #[serde(default)]
    pub pieces: Vec<String>,
    #[serde(default)]
    pub overlaps: Vec<OverlapJson>,
    #[serde(default)]
    pub triples: Vec<TripleJson>,
    #[serde(default)]
    pub objects: Vec<String>,
    #[serde(default)]
    pub g: Vec<Vec<Vec<String>>>,
    #[serde(default)]
    pub global: Option<String>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    pub verb: Option<String>,
    #[serde(default)]
    pub charts: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    pub maps: BTreeMap<String, MapJson>,
    #[serde(default)]
    pub objects: BTreeMap<String, ObjectJson>,

    pub algebroid: Option<String>,
    pub map: Option<String>,
    pub chain: Option<Vec<String>>,
    pub mode: Option<String>,
    #[serde(rename = "H")]
    pub h: Option<String>,
    /// Rows `s(∂_i)` of a connection; the splitting is used when absent.
    pub connection: Option<Vec<Vec<String>>>,
    pub shift: Option<String>,
    pub expected: Option<String>,
    pub dirac: Option<DiracJson>,
    pub source: Option<String>,
    pub target: Option<String>,
    pub morphism: Option<Vec<Vec<String>>>,
    pub extensions: Option<Vec<String>>,
    pub lambdas: Option<Vec<String>>,
    pub descent: Option<DescentJson>,
}

#[derive(Clone, Debug)]
pub enum Object {
    Lie(LieData),
    Courant(CourantData),
}

impl Object {
    pub fn kind(&self) -> &'static str {
        match self {
            Object::Lie(_) => "Lie",
            Object::Courant(_) => "Courant",
        }
    }
}

pub fn missing(field: &str) -> Error {
    Error::invalid(format!("this verb needs \"{field}\""))
}

pub fn rational(s: &str) -> Result<Rat> {
    Rat::from_str(s.trim()).map_err(|_| Error::invalid(format!("\"{s}\" is not a rational number")))
}

pub fn form(s: &str, chart: &Chart, degree: usize, what: &str) -> Result<KForm> {
    parse_form(s, chart, degree).map_err(|e| match e {
        Error::Parse { pos, msg } => Error::Parse { pos, msg: format!("{what}: {msg}") },
        other => other,
    })
}

impl SpecFile {
    pub fn chart(&self, c: &ChartJson) -> Result<Chart> {
        match c {
            ChartJson::Named(name) => {
                let coords = self.charts.get(name).ok_or_else(|| Error::invalid(format!("unknown chart \"{name}\"")))?;
                Chart::new(name.clone(), coords.clone())
            }
            ChartJson::Inline { name, coords } => Chart::new(name.clone(), coords.clone()),
        }
    }

    pub fn named_chart(&self, name: &str) -> Result<Chart> {
        self.chart(&ChartJson::Named(name.to_string()))
    }

    pub fn map_named(&self, name: &str) -> Result<ChartMap> {
        let m = self.maps.get(name).ok_or_else(|| Error::invalid(format!("unknown map \"{name}\"")))?;
        m.to_map(&self.chart(&m.source)?, &self.chart(&m.target)?)
    }

    pub fn object(&self, name: &str) -> Result<Object> {
        self.object_at(name, 0)
    }

    fn object_at(&self, name: &str, depth: usize) -> Result<Object> {
        if depth > self.objects.len() {
            return Err(Error::invalid(format!("object \"{name}\" refers to itself")));
        }
        let o = self.objects.get(name).ok_or_else(|| Error::invalid(format!("unknown object \"{name}\"")))?;
        let courant = |n: &str| -> Result<CourantData> {
            match self.object_at(n, depth + 1)? {
                Object::Courant(q) => Ok(q),
                Object::Lie(_) => Err(Error::invalid(format!("object \"{n}\" is not a Courant algebroid"))),
            }
        };
        Ok(match o {
            ObjectJson::Lie(j) => Object::Lie(j.to_data(&self.chart(&j.chart)?)?),
            ObjectJson::Tangent { chart } => Object::Lie(LieData::tangent(&self.chart(chart)?)),
            ObjectJson::Courant(j) => Object::Courant(j.to_data(&self.chart(&j.chart)?)?),
            ObjectJson::Standard { chart, h } => {
                let x = self.chart(chart)?;
                let h = match h {
                    Some(s) => form(s, &x, 3, "H")?,
                    None => KForm::zero(&x, 3),
                };
                Object::Courant(standard_exact(&x, &h)?)
            }
            ObjectJson::Twist { of, h } => {
                let q = courant(of)?;
                let h = form(h, &q.chart, 3, "H")?;
                Object::Courant(twist(&q, &h)?)
            }
            ObjectJson::Opposite { of } => Object::Courant(opposite(&courant(of)?)),
            ObjectJson::Dotplus { of } => Object::Courant(dotplus(&courant(&of[0])?, &courant(&of[1])?)?.courant().clone()),
            ObjectJson::Combination { of, lambdas } => {
                if of.len() != lambdas.len() {
                    return Err(Error::dim("one λ per summand is required"));
                }
                let exts = of.iter().map(|n| CourantExtension::exact(&courant(n)?)).collect::<Result<Vec<_>>>()?;
                let lam = lambdas.iter().map(|s| rational(s)).collect::<Result<Vec<_>>>()?;
                Object::Courant(linear_combination(&exts, &lam)?.courant().clone())
            }
        })
    }

    pub fn courant_named(&self, name: &str) -> Result<CourantData> {
        match self.object(name)? {
            Object::Courant(q) => Ok(q),
            Object::Lie(_) => Err(Error::invalid(format!("object \"{name}\" is not a Courant algebroid"))),
        }
    }

    pub fn lie_named(&self, name: &str) -> Result<LieData> {
        match self.object(name)? {
            Object::Lie(a) => Ok(a),
            Object::Courant(_) => Err(Error::invalid(format!("object \"{name}\" is not a Lie algebroid"))),
        }
    }
}
