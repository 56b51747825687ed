use super::{Chart, KForm, Poly, VField};
use crate::error::{Error, Result};
use crate::scalar::Field;

/// Polynomial map `f: Y → X` between affine charts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChartMap<S> {
    pub source: Chart,
    pub target: Chart,
    /// `target.dim()` polynomials over the source chart.
    pub comps: Vec<Poly<S>>,
}

/// Shape of a coordinate embedding: which target coordinates are zeroed
/// and which source coordinate feeds each kept target coordinate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmbeddingShape {
    pub zeroed: Vec<usize>,
    pub source_of: Vec<Option<usize>>,
}

impl<S: Field> ChartMap<S> {
    pub fn new(source: &Chart, target: &Chart, comps: Vec<Poly<S>>) -> Result<Self> {
        if comps.len() != target.dim() {
            return Err(Error::dim(format!(
                "map {}→{} needs {} components, got {}",
                source.name(),
                target.name(),
                target.dim(),
                comps.len()
            )));
        }
        if comps.iter().any(|c| c.nvars() != source.dim()) {
            return Err(Error::dim("map components must be polynomials over the source chart"));
        }
        Ok(ChartMap { source: source.clone(), target: target.clone(), comps })
    }

    pub fn identity(chart: &Chart) -> Self {
        let n = chart.dim();
        ChartMap { source: chart.clone(), target: chart.clone(), comps: (0..n).map(|i| Poly::var(n, i)).collect() }
    }

    /// `self ∘ inner` where `inner: Z → Y` and `self: Y → X`.
    pub fn compose(&self, inner: &ChartMap<S>) -> Result<ChartMap<S>> {
        inner.target.check_same(&self.source, "map composition")?;
        let comps = self.comps.iter().map(|c| c.compose(&inner.comps)).collect();
        Ok(ChartMap { source: inner.source.clone(), target: self.target.clone(), comps })
    }

    /// `f*g` for a function `g` on the target.
    pub fn pull(&self, g: &Poly<S>) -> Poly<S> {
        if self.target.dim() == 0 {
            return Poly::constant(self.source.dim(), g.as_constant().unwrap_or_else(S::zero));
        }
        g.compose(&self.comps)
    }

    /// Jacobian entries `∂f_j/∂y_i` indexed `[j][i]`.
    pub fn jacobian(&self) -> Vec<Vec<Poly<S>>> {
        self.comps
            .iter()
            .map(|f| (0..self.source.dim()).map(|i| f.deriv(i)).collect())
            .collect()
    }

    /// `df(ξ)` as a section of `f*T_X`.
    pub fn dmap(&self, xi: &VField<S>) -> Result<Vec<Poly<S>>> {
        self.source.check_same(&xi.chart, "dmap")?;
        Ok(self.comps.iter().map(|f| xi.apply(f)).collect())
    }

    /// `df∨(α) = Σ α_j d(f_j)` for `α` given by coefficients over the source.
    pub fn dmap_dual(&self, alpha: &[Poly<S>]) -> Result<KForm<S>> {
        if alpha.len() != self.target.dim() {
            return Err(Error::dim("dmap_dual expects one coefficient per target coordinate"));
        }
        let mut out = KForm::zero(&self.source, 1);
        for (a, f) in alpha.iter().zip(&self.comps) {
            if a.is_zero() {
                continue;
            }
            out = out.add(&KForm::function(&self.source, f.clone()).d().scale(a))?;
        }
        Ok(out)
    }

    pub fn pullback_form(&self, w: &KForm<S>) -> Result<KForm<S>> {
        self.target.check_same(&w.chart, "pullback of form")?;
        let dfs: Vec<KForm<S>> =
            self.comps.iter().map(|f| KForm::function(&self.source, f.clone()).d()).collect();
        let mut out = KForm::zero(&self.source, w.degree());
        for (idx, c) in w.components() {
            let mut t = KForm::function(&self.source, self.pull(c));
            for &i in idx {
                t = t.wedge(&dfs[i])?;
            }
            out = out.add(&t)?;
        }
        Ok(out)
    }

    pub fn is_identity(&self) -> bool {
        self.source == self.target && *self == ChartMap::identity(&self.source)
    }

    fn single_var(p: &Poly<S>) -> Option<usize> {
        if p.num_terms() != 1 {
            return None;
        }
        let (m, c) = p.leading()?;
        if *c != S::one() || m.degree() != 1 {
            return None;
        }
        m.0.iter().position(|&e| e == 1)
    }

    /// Recognizes maps sending each source coordinate to a distinct target
    /// coordinate and every other target coordinate to zero.
    pub fn embedding_shape(&self) -> Option<EmbeddingShape> {
        let mut used = vec![false; self.source.dim()];
        let mut zeroed = Vec::new();
        let mut source_of = Vec::new();
        for (j, c) in self.comps.iter().enumerate() {
            if c.is_zero() {
                zeroed.push(j);
                source_of.push(None);
                continue;
            }
            let i = Self::single_var(c)?;
            if used[i] {
                return None;
            }
            used[i] = true;
            source_of.push(Some(i));
        }
        if used.iter().all(|&u| u) {
            Some(EmbeddingShape { zeroed, source_of })
        } else {
            None
        }
    }

    /// Recognizes projections: each target coordinate is a distinct source
    /// coordinate. Returns the source index for each target coordinate.
    pub fn submersion_shape(&self) -> Option<Vec<usize>> {
        let mut used = vec![false; self.source.dim()];
        let mut out = Vec::new();
        for c in &self.comps {
            let i = Self::single_var(c)?;
            if used[i] {
                return None;
            }
            used[i] = true;
            out.push(i);
        }
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rat;

    #[test]
    fn parabola_pullback() {
        let y = Chart::numbered("R", "t", 1);
        let x = Chart::numbered("R2", "x", 2);
        let t = Poly::<Rat>::var(1, 0);
        let f = ChartMap::new(&y, &x, vec![t.clone(), &t * &t]).unwrap();
        let w = KForm::dx(&x, 1).scale(&Poly::var(2, 0));
        let pulled = f.pullback_form(&w).unwrap();
        assert_eq!(pulled, KForm::dx(&y, 0).scale(&(&(&t * &t) * &Poly::from_i64(1, 2))));
        assert_eq!(f.dmap(&VField::coord(&y, 0)).unwrap(), vec![Poly::one(1), &t * &Poly::from_i64(1, 2)]);
    }

    #[test]
    fn shapes() {
        let z = Chart::numbered("Z", "z", 1);
        let x = Chart::numbered("R2", "x", 2);
        let i = ChartMap::<Rat>::new(&z, &x, vec![Poly::var(1, 0), Poly::zero(1)]).unwrap();
        let s = i.embedding_shape().unwrap();
        assert_eq!(s.zeroed, vec![1]);
        assert!(i.submersion_shape().is_none());
        let p = ChartMap::<Rat>::new(&x, &z, vec![Poly::var(2, 1)]).unwrap();
        assert_eq!(p.submersion_shape(), Some(vec![1]));
    }
}
