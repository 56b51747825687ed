use crate::error::{Error, Result};
use std::fmt;
use std::sync::Arc;

#[derive(Debug, PartialEq, Eq, Hash)]
struct ChartInner {
    name: String,
    coords: Vec<String>,
}

/// A global affine chart: a name plus an ordered list of coordinate names.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Chart(Arc<ChartInner>);

fn valid_ident(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl Chart {
    pub fn new(name: impl Into<String>, coords: Vec<String>) -> Result<Self> {
        let name = name.into();
        for (i, c) in coords.iter().enumerate() {
            if !valid_ident(c) {
                return Err(Error::invalid(format!("chart {name}: bad coordinate name {c:?}")));
            }
            if coords[..i].contains(c) {
                return Err(Error::invalid(format!("chart {name}: duplicate coordinate {c}")));
            }
        }
        Ok(Chart(Arc::new(ChartInner { name, coords })))
    }

    /// Chart with coordinates `{prefix}1 .. {prefix}n`.
    pub fn numbered(name: impl Into<String>, prefix: &str, n: usize) -> Self {
        let coords = (1..=n).map(|i| format!("{prefix}{i}")).collect();
        Chart::new(name, coords).expect("numbered coordinates are valid")
    }

    pub fn name(&self) -> &str {
        &self.0.name
    }

    pub fn coords(&self) -> &[String] {
        &self.0.coords
    }

    pub fn dim(&self) -> usize {
        self.0.coords.len()
    }

    pub fn index_of(&self, coord: &str) -> Option<usize> {
        self.0.coords.iter().position(|c| c == coord)
    }

    /// Product chart with source-first coordinate ordering.
    pub fn product(&self, other: &Chart) -> Result<Chart> {
        let mut coords = self.coords().to_vec();
        coords.extend(other.coords().iter().cloned());
        Chart::new(format!("{}x{}", self.name(), other.name()), coords)
    }

    /// The coordinate subspace obtained by setting `zeroed` coordinates to 0.
    pub fn subspace(&self, zeroed: &[usize]) -> Chart {
        let coords = (0..self.dim())
            .filter(|i| !zeroed.contains(i))
            .map(|i| self.coords()[i].clone())
            .collect();
        Chart::new(format!("{}|Z", self.name()), coords).expect("subset of valid coordinates")
    }

    /// Indices of coordinates kept by `subspace(zeroed)`.
    pub fn kept(&self, zeroed: &[usize]) -> Vec<usize> {
        (0..self.dim()).filter(|i| !zeroed.contains(i)).collect()
    }

    pub fn check_same(&self, other: &Chart, what: &str) -> Result<()> {
        if Arc::ptr_eq(&self.0, &other.0) || self.0 == other.0 {
            Ok(())
        } else {
            Err(Error::ChartMismatch(format!(
                "{what}: {} vs {}",
                self.name(),
                other.name()
            )))
        }
    }
}

impl fmt::Display for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.name(), self.coords().join(","))
    }
}
