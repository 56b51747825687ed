//! Seeded random polynomials and sections for identity checks.
//!
//! Each polynomial has at most three terms of total degree at most 2 with
//! coefficients drawn from {-2, ..., 2}.

use crate::scalar::Field;
use crate::symcalc::{Chart, KForm, Mono, Poly, VField};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const DEFAULT_SEED: u64 = 0;
pub const DEFAULT_SAMPLES: usize = 100;
const MAX_TERMS: usize = 3;

fn monomials(n: usize, max_deg: u32) -> Vec<Mono> {
    let mut out = vec![Mono::one(n)];
    let mut frontier = vec![Mono::one(n)];
    for _ in 0..max_deg {
        let mut next = Vec::new();
        for m in &frontier {
            let start = m.0.iter().rposition(|&e| e > 0).unwrap_or(0);
            for i in start..n {
                let mut e = m.0.clone();
                e[i] += 1;
                next.push(Mono(e));
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

pub struct Sampler {
    rng: ChaCha8Rng,
    max_deg: u32,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler { rng: ChaCha8Rng::seed_from_u64(seed), max_deg: 2 }
    }

    pub fn coeff<S: Field>(&mut self) -> S {
        S::from_i64(self.rng.gen_range(-2..=2))
    }

    pub fn poly<S: Field>(&mut self, n: usize) -> Poly<S> {
        let monos = monomials(n, self.max_deg);
        let count = self.rng.gen_range(1..=MAX_TERMS);
        let terms: Vec<(Mono, S)> = (0..count)
            .map(|_| {
                let m = monos[self.rng.gen_range(0..monos.len())].clone();
                (m, self.coeff())
            })
            .collect();
        Poly::from_terms(n, terms)
    }

    pub fn section<S: Field>(&mut self, n: usize, rank: usize) -> Vec<Poly<S>> {
        (0..rank).map(|_| self.poly(n)).collect()
    }

    pub fn vfield<S: Field>(&mut self, chart: &Chart) -> VField<S> {
        VField { chart: chart.clone(), comps: self.section(chart.dim(), chart.dim()) }
    }

    pub fn form<S: Field>(&mut self, chart: &Chart, degree: usize) -> KForm<S> {
        let n = chart.dim();
        let mut w = KForm::zero(chart, degree);
        for idx in increasing_tuples(n, degree) {
            let p = self.poly(n);
            w.add_component(idx, p);
        }
        w
    }
}

/// All strictly increasing index tuples of length `k` below `n`.
pub fn increasing_tuples(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rat;

    #[test]
    fn monomial_count() {
        assert_eq!(monomials(3, 2).len(), 10);
        assert_eq!(increasing_tuples(4, 2).len(), 6);
    }

    #[test]
    fn same_seed_same_samples() {
        let a: Poly<Rat> = Sampler::new(7).poly(3);
        let b: Poly<Rat> = Sampler::new(7).poly(3);
        assert_eq!(a, b);
    }
}
