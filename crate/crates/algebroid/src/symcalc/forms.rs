use super::{Chart, Poly};
use crate::error::{Error, Result};
use crate::scalar::Field;
use std::collections::BTreeMap;

/// Sorts `idx` in place and returns the permutation sign, or `None` if an
/// index repeats.
fn sort_sign(idx: &mut [usize]) -> Option<bool> {
    let mut neg = false;
    for i in 1..idx.len() {
        let mut j = i;
        while j > 0 && idx[j - 1] > idx[j] {
            idx.swap(j - 1, j);
            neg = !neg;
            j -= 1;
        }
    }
    if idx.windows(2).any(|w| w[0] == w[1]) {
        None
    } else {
        Some(neg)
    }
}

/// Vector field `Σ ξ_i ∂/∂x_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VField<S> {
    pub chart: Chart,
    pub comps: Vec<Poly<S>>,
}

impl<S: Field> VField<S> {
    pub fn new(chart: &Chart, comps: Vec<Poly<S>>) -> Result<Self> {
        if comps.len() != chart.dim() {
            return Err(Error::dim(format!(
                "vector field needs {} components, got {}",
                chart.dim(),
                comps.len()
            )));
        }
        Ok(VField { chart: chart.clone(), comps })
    }

    pub fn zero(chart: &Chart) -> Self {
        VField { chart: chart.clone(), comps: vec![Poly::zero(chart.dim()); chart.dim()] }
    }

    /// The coordinate field `∂/∂x_i`.
    pub fn coord(chart: &Chart, i: usize) -> Self {
        let mut v = VField::zero(chart);
        v.comps[i] = Poly::one(chart.dim());
        v
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(Poly::is_zero)
    }

    /// Derivative `ξ(f)`.
    pub fn apply(&self, f: &Poly<S>) -> Poly<S> {
        let mut acc = Poly::zero(f.nvars());
        for (i, c) in self.comps.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let df = f.deriv(i);
            if !df.is_zero() {
                acc = acc + c * &df;
            }
        }
        acc
    }

    pub fn add(&self, other: &Self) -> Self {
        VField {
            chart: self.chart.clone(),
            comps: self.comps.iter().zip(&other.comps).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        VField {
            chart: self.chart.clone(),
            comps: self.comps.iter().zip(&other.comps).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scale(&self, f: &Poly<S>) -> Self {
        VField { chart: self.chart.clone(), comps: self.comps.iter().map(|c| f * c).collect() }
    }

    /// Lie bracket `[ξ, η]`.
    pub fn bracket(&self, other: &Self) -> Result<Self> {
        self.chart.check_same(&other.chart, "vector field bracket")?;
        Ok(VField {
            chart: self.chart.clone(),
            comps: self
                .comps
                .iter()
                .zip(&other.comps)
                .map(|(a, b)| self.apply(b) - other.apply(a))
                .collect(),
        })
    }
}

/// Differential k-form stored on strictly increasing index tuples.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KForm<S> {
    pub chart: Chart,
    degree: usize,
    comps: BTreeMap<Vec<usize>, Poly<S>>,
}

impl<S: Field> KForm<S> {
    pub fn zero(chart: &Chart, degree: usize) -> Self {
        KForm { chart: chart.clone(), degree, comps: BTreeMap::new() }
    }

    /// A function viewed as a 0-form.
    pub fn function(chart: &Chart, f: Poly<S>) -> Self {
        let mut w = KForm::zero(chart, 0);
        w.add_component(vec![], f);
        w
    }

    /// `dx_i`.
    pub fn dx(chart: &Chart, i: usize) -> Self {
        let mut w = KForm::zero(chart, 1);
        w.add_component(vec![i], Poly::one(chart.dim()));
        w
    }

    /// 1-form with the given coefficients on `dx_1 .. dx_n`.
    pub fn one_form(chart: &Chart, coeffs: &[Poly<S>]) -> Self {
        let mut w = KForm::zero(chart, 1);
        for (i, c) in coeffs.iter().enumerate() {
            w.add_component(vec![i], c.clone());
        }
        w
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    /// Nonzero components in lexicographic order of index tuples.
    pub fn components(&self) -> impl Iterator<Item = (&Vec<usize>, &Poly<S>)> {
        self.comps.iter()
    }

    /// Adds `f · dx_{idx}` with sign normalization; `idx` may be unsorted.
    pub fn add_component(&mut self, mut idx: Vec<usize>, f: Poly<S>) {
        assert_eq!(idx.len(), self.degree, "form degree mismatch");
        assert!(idx.iter().all(|&i| i < self.chart.dim()), "form index out of range");
        if f.is_zero() {
            return;
        }
        let neg = match sort_sign(&mut idx) {
            Some(n) => n,
            None => return,
        };
        let f = if neg { -f } else { f };
        let e = self.comps.entry(idx.clone()).or_insert_with(|| Poly::zero(f.nvars()));
        *e = &*e + &f;
        if e.is_zero() {
            self.comps.remove(&idx);
        }
    }

    /// Coefficient on `dx_{idx}` for any ordering of `idx` (alternating).
    pub fn coeff(&self, idx: &[usize]) -> Poly<S> {
        let mut v = idx.to_vec();
        match sort_sign(&mut v) {
            None => Poly::zero(self.chart.dim()),
            Some(neg) => {
                let c = self.comps.get(&v).cloned().unwrap_or_else(|| Poly::zero(self.chart.dim()));
                if neg {
                    -c
                } else {
                    c
                }
            }
        }
    }

    /// Coefficients of a 1-form as a vector of length `dim`.
    pub fn as_covector(&self) -> Vec<Poly<S>> {
        assert_eq!(self.degree, 1);
        (0..self.chart.dim()).map(|i| self.coeff(&[i])).collect()
    }

    /// The function of a 0-form.
    pub fn as_function(&self) -> Poly<S> {
        assert_eq!(self.degree, 0);
        self.coeff(&[])
    }

    fn check(&self, other: &Self, what: &str) -> Result<()> {
        self.chart.check_same(&other.chart, what)?;
        if self.degree != other.degree {
            return Err(Error::dim(format!(
                "{what}: degrees {} and {}",
                self.degree, other.degree
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other, "form sum")?;
        let mut out = self.clone();
        for (i, c) in &other.comps {
            out.add_component(i.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&Poly::from_i64(self.chart.dim(), -1))
    }

    /// Multiplication by a function.
    pub fn scale(&self, f: &Poly<S>) -> Self {
        let mut out = KForm::zero(&self.chart, self.degree);
        for (i, c) in &self.comps {
            out.add_component(i.clone(), f * c);
        }
        out
    }

    pub fn wedge(&self, other: &Self) -> Result<Self> {
        self.chart.check_same(&other.chart, "wedge")?;
        let mut out = KForm::zero(&self.chart, self.degree + other.degree);
        if self.degree + other.degree > self.chart.dim() {
            return Ok(out);
        }
        for (i, a) in &self.comps {
            for (j, b) in &other.comps {
                let mut idx = i.clone();
                idx.extend_from_slice(j);
                out.add_component(idx, a * b);
            }
        }
        Ok(out)
    }

    /// Exterior derivative.
    pub fn d(&self) -> Self {
        let mut out = KForm::zero(&self.chart, self.degree + 1);
        if self.degree + 1 > self.chart.dim() {
            return out;
        }
        for (idx, f) in &self.comps {
            for k in 0..self.chart.dim() {
                let df = f.deriv(k);
                if df.is_zero() {
                    continue;
                }
                let mut v = Vec::with_capacity(idx.len() + 1);
                v.push(k);
                v.extend_from_slice(idx);
                out.add_component(v, df);
            }
        }
        out
    }

    /// Interior product `ι_ξ ω`; zero on functions.
    pub fn iota(&self, xi: &VField<S>) -> Result<Self> {
        self.chart.check_same(&xi.chart, "interior product")?;
        if self.degree == 0 {
            return Ok(KForm::zero(&self.chart, 0));
        }
        let mut out = KForm::zero(&self.chart, self.degree - 1);
        for (idx, f) in &self.comps {
            for p in 0..idx.len() {
                let c = &xi.comps[idx[p]];
                if c.is_zero() {
                    continue;
                }
                let mut rest = idx.clone();
                rest.remove(p);
                let t = c * f;
                out.add_component(rest, if p % 2 == 1 { -t } else { t });
            }
        }
        Ok(out)
    }

    /// Lie derivative by Cartan's formula `d ι_ξ + ι_ξ d`.
    pub fn lie(&self, xi: &VField<S>) -> Result<Self> {
        let a = self.iota(xi)?.d();
        let b = self.d().iota(xi)?;
        if self.degree == 0 {
            return Ok(b);
        }
        a.add(&b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rat;

    fn chart() -> Chart {
        Chart::numbered("R3", "x", 3)
    }

    #[test]
    fn sign_normalization() {
        let c = chart();
        let a = KForm::<Rat>::dx(&c, 0).wedge(&KForm::dx(&c, 1)).unwrap();
        let b = KForm::<Rat>::dx(&c, 1).wedge(&KForm::dx(&c, 0)).unwrap();
        assert_eq!(a, b.neg());
        assert!(KForm::<Rat>::dx(&c, 0).wedge(&KForm::dx(&c, 0)).unwrap().is_zero());
    }

    #[test]
    fn interior_product_examples() {
        let c = chart();
        let w = KForm::<Rat>::dx(&c, 0).wedge(&KForm::dx(&c, 1)).unwrap();
        assert_eq!(w.iota(&VField::coord(&c, 0)).unwrap(), KForm::dx(&c, 1));
        assert!(KForm::<Rat>::dx(&c, 0).iota(&VField::coord(&c, 1)).unwrap().is_zero());
    }

    #[test]
    fn bracket_example() {
        let c = chart();
        let d1 = VField::<Rat>::coord(&c, 0);
        let x1d2 = VField::coord(&c, 1).scale(&Poly::var(3, 0));
        assert_eq!(d1.bracket(&x1d2).unwrap(), VField::coord(&c, 1));
    }
}
