use crate::error::{Error, Result};
use crate::scalar::Field;
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::atomic::{AtomicU32, Ordering as AtomicOrdering};

static MAX_DEGREE: AtomicU32 = AtomicU32::new(16);

/// Sets the total-degree cap enforced by polynomial multiplication.
pub fn set_max_degree(d: u32) {
    MAX_DEGREE.store(d, AtomicOrdering::Relaxed);
}

pub fn max_degree() -> u32 {
    MAX_DEGREE.load(AtomicOrdering::Relaxed)
}

/// Panic payload raised when a product would exceed the degree cap.
#[derive(Debug, Clone, Copy)]
pub struct DegreeCapExceeded(pub u32);

/// Runs `f`, converting a degree-cap panic into `Error::DegreeCap`.
pub fn with_degree_guard<T>(f: impl FnOnce() -> Result<T>) -> Result<T> {
    match std::panic::catch_unwind(std::panic::AssertUnwindSafe(f)) {
        Ok(r) => r,
        Err(payload) => match payload.downcast_ref::<DegreeCapExceeded>() {
            Some(DegreeCapExceeded(d)) => Err(Error::DegreeCap(*d)),
            None => std::panic::resume_unwind(payload),
        },
    }
}

/// Exponent vector ordered graded-lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Mono(pub Vec<u32>);

impl Mono {
    pub fn one(n: usize) -> Self {
        Mono(vec![0; n])
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    fn mul(&self, other: &Mono) -> Mono {
        Mono(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    fn divides(&self, other: &Mono) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    fn div(&self, other: &Mono) -> Mono {
        Mono(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }
}

impl Ord for Mono {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Multivariate polynomial with exact coefficients in `n` variables.
///
/// Zero coefficients are never stored, so structural equality is
/// mathematical equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Poly<S> {
    n: usize,
    terms: BTreeMap<Mono, S>,
}

impl<S: Field> Poly<S> {
    pub fn zero(n: usize) -> Self {
        Poly { n, terms: BTreeMap::new() }
    }

    pub fn constant(n: usize, c: S) -> Self {
        let mut p = Poly::zero(n);
        if !c.is_zero() {
            p.terms.insert(Mono::one(n), c);
        }
        p
    }

    pub fn one(n: usize) -> Self {
        Poly::constant(n, S::one())
    }

    pub fn from_i64(n: usize, c: i64) -> Self {
        Poly::constant(n, S::from_i64(c))
    }

    /// The coordinate function `x_i`.
    pub fn var(n: usize, i: usize) -> Self {
        let mut e = vec![0; n];
        e[i] = 1;
        Poly::monomial(Mono(e), S::one())
    }

    pub fn monomial(m: Mono, c: S) -> Self {
        let n = m.0.len();
        let mut p = Poly::zero(n);
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    pub fn from_terms(n: usize, terms: impl IntoIterator<Item = (Mono, S)>) -> Self {
        let mut p = Poly::zero(n);
        for (m, c) in terms {
            assert_eq!(m.0.len(), n, "exponent length mismatch");
            p.add_term(m, c);
        }
        p
    }

    fn add_term(&mut self, m: Mono, c: S) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(v) => {
                let s = v.clone() + c;
                if s.is_zero() {
                    self.terms.remove(&m);
                } else {
                    *v = s;
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in descending graded-lex order.
    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &S)> {
        self.terms.iter().rev()
    }

    pub fn leading(&self) -> Option<(&Mono, &S)> {
        self.terms.iter().next_back()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Mono::degree).max().unwrap_or(0)
    }

    /// The value if the polynomial is constant (zero counts as constant).
    pub fn as_constant(&self) -> Option<S> {
        match self.terms.len() {
            0 => Some(S::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                if m.degree() == 0 {
                    Some(c.clone())
                } else {
                    None
                }
            }
            _ => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.as_constant().is_some()
    }

    pub fn scale(&self, c: &S) -> Self {
        if c.is_zero() {
            return Poly::zero(self.n);
        }
        Poly {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(m, v)| (m.clone(), v.clone() * c.clone()))
                .collect(),
        }
    }

    fn check_vars(&self, other: &Self) {
        assert_eq!(self.n, other.n, "polynomials over charts of different dimension");
    }

    pub fn add_ref(&self, other: &Self) -> Self {
        self.check_vars(other);
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub_ref(&self, other: &Self) -> Self {
        self.check_vars(other);
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }

    pub fn neg_ref(&self) -> Self {
        Poly {
            n: self.n,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }

    pub fn mul_ref(&self, other: &Self) -> Self {
        self.check_vars(other);
        if self.is_zero() || other.is_zero() {
            return Poly::zero(self.n);
        }
        let cap = max_degree();
        if self.degree() + other.degree() > cap {
            std::panic::panic_any(DegreeCapExceeded(cap));
        }
        let mut out = Poly::zero(self.n);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca.clone() * cb.clone());
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut out = Poly::one(self.n);
        for _ in 0..e {
            out = out.mul_ref(self);
        }
        out
    }

    /// Partial derivative with respect to variable `i`.
    pub fn deriv(&self, i: usize) -> Self {
        let mut out = Poly::zero(self.n);
        for (m, c) in &self.terms {
            let e = m.0[i];
            if e == 0 {
                continue;
            }
            let mut m2 = m.clone();
            m2.0[i] -= 1;
            out.add_term(m2, c.clone() * S::from_i64(e as i64));
        }
        out
    }

    pub fn eval(&self, point: &[S]) -> S {
        assert_eq!(point.len(), self.n);
        let mut acc = S::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (x, &e) in point.iter().zip(&m.0) {
                for _ in 0..e {
                    t = t * x.clone();
                }
            }
            acc = acc + t;
        }
        acc
    }

    /// Substitutes `args[i]` for variable `i`; all `args` share one chart.
    pub fn compose(&self, args: &[Poly<S>]) -> Poly<S> {
        assert_eq!(args.len(), self.n, "substitution arity mismatch");
        let m = args.first().map(|a| a.n).unwrap_or(0);
        if self.n == 0 {
            return Poly::constant(m, self.as_constant().unwrap_or_else(S::zero));
        }
        let mut cache: Vec<Vec<Poly<S>>> = args.iter().map(|a| vec![Poly::one(a.n), a.clone()]).collect();
        let mut out = Poly::zero(m);
        for (mono, c) in &self.terms {
            let mut t = Poly::constant(m, c.clone());
            for (i, &e) in mono.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while cache[i].len() <= e as usize {
                    let next = cache[i].last().unwrap().mul_ref(&args[i]);
                    cache[i].push(next);
                }
                t = t.mul_ref(&cache[i][e as usize]);
            }
            out = out.add_ref(&t);
        }
        out
    }

    /// Re-expresses the polynomial in a chart with `n` variables, sending
    /// variable `i` to variable `map[i]`.
    pub fn embed(&self, n: usize, map: &[usize]) -> Poly<S> {
        assert_eq!(map.len(), self.n);
        let mut out = Poly::zero(n);
        for (m, c) in &self.terms {
            let mut e = vec![0; n];
            for (i, &k) in m.0.iter().enumerate() {
                e[map[i]] += k;
            }
            out.add_term(Mono(e), c.clone());
        }
        out
    }

    /// Restriction to the coordinate subspace spanned by the `keep`
    /// variables (all other variables set to zero).
    pub fn restrict(&self, keep: &[usize]) -> Poly<S> {
        let mut out = Poly::zero(keep.len());
        'terms: for (m, c) in &self.terms {
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 && !keep.contains(&i) {
                    continue 'terms;
                }
            }
            let e = keep.iter().map(|&k| m.0[k]).collect();
            out.add_term(Mono(e), c.clone());
        }
        out
    }

    /// Exact division; `None` if `d` does not divide `self`.
    pub fn div_exact(&self, d: &Poly<S>) -> Option<Poly<S>> {
        self.check_vars(d);
        let (dm, dc) = d.leading()?;
        let (dm, dc) = (dm.clone(), dc.clone());
        let mut rem = self.clone();
        let mut q = Poly::zero(self.n);
        while let Some((rm, rc)) = rem.leading() {
            if !dm.divides(rm) {
                return None;
            }
            let t = Poly::monomial(rm.div(&dm), rc.clone() / dc.clone());
            rem = rem.sub_ref(&t.mul_ref(d));
            q = q.add_ref(&t);
        }
        Some(q)
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $f:ident) => {
        impl<'a, S: Field> $tr<&'a Poly<S>> for &'a Poly<S> {
            type Output = Poly<S>;
            fn $m(self, rhs: &'a Poly<S>) -> Poly<S> {
                self.$f(rhs)
            }
        }
        impl<S: Field> $tr<Poly<S>> for Poly<S> {
            type Output = Poly<S>;
            fn $m(self, rhs: Poly<S>) -> Poly<S> {
                self.$f(&rhs)
            }
        }
        impl<'a, S: Field> $tr<&'a Poly<S>> for Poly<S> {
            type Output = Poly<S>;
            fn $m(self, rhs: &'a Poly<S>) -> Poly<S> {
                self.$f(rhs)
            }
        }
    };
}

binop!(Add, add, add_ref);
binop!(Sub, sub, sub_ref);
binop!(Mul, mul, mul_ref);

impl<S: Field> Neg for Poly<S> {
    type Output = Poly<S>;
    fn neg(self) -> Poly<S> {
        self.neg_ref()
    }
}

impl<'a, S: Field> Neg for &'a Poly<S> {
    type Output = Poly<S>;
    fn neg(self) -> Poly<S> {
        self.neg_ref()
    }
}
