use super::data::CourantData;
use crate::error::{Error, Result};
use crate::linalg::{vec_add, vec_scale, Solver};
use crate::scalar::Field;
use crate::symcalc::{print_poly, KForm, Poly, VField};

/// Isotropic right inverse of the anchor, `∇(∂_i) = sections[i]`.
#[derive(Clone, Debug)]
pub struct Connection<S> {
    pub sections: Vec<Vec<Poly<S>>>,
}

impl<S: Field> Connection<S> {
    pub fn new(q: &CourantData<S>, sections: Vec<Vec<Poly<S>>>) -> Result<Self> {
        let n = q.nvars();
        if sections.len() != n || sections.iter().any(|s| s.len() != q.rank) {
            return Err(Error::dim("connection needs one section per coordinate"));
        }
        for (i, s) in sections.iter().enumerate() {
            if q.anchor_of(s) != VField::coord(&q.chart, i) {
                return Err(Error::invalid(format!("π∇(∂{}) ≠ ∂{}", i + 1, i + 1)));
            }
        }
        for i in 0..n {
            for j in i..n {
                let w = q.pair(&sections[i], &sections[j]);
                if !w.is_zero() {
                    return Err(Error::invalid(format!(
                        "connection is not isotropic: ⟨∇∂{}, ∇∂{}⟩ = {}",
                        i + 1,
                        j + 1,
                        print_poly(&w, &q.chart)
                    )));
                }
            }
        }
        Ok(Connection { sections })
    }

    /// The splitting of `q` as a connection.
    pub fn from_splitting(q: &CourantData<S>) -> Result<Self> {
        Connection::new(q, q.splitting_or_derive()?)
    }

    /// `ξ ↦ ∇ξ`.
    pub fn apply(&self, q: &CourantData<S>, xi: &VField<S>) -> Vec<Poly<S>> {
        let mut out = q.zero_section();
        for (c, s) in xi.comps.iter().zip(&self.sections) {
            if !c.is_zero() {
                out = vec_add(&out, &vec_scale(c, s));
            }
        }
        out
    }
}

/// `ξ ↦ ∇ξ + π†(ι_ξ B)`.
pub fn connection_shift<S: Field>(q: &CourantData<S>, conn: &Connection<S>, b: &KForm<S>) -> Result<Connection<S>> {
    b.chart.check_same(&q.chart, "connection shift")?;
    if b.degree() != 2 {
        return Err(Error::dim(format!("shift must be a 2-form, got degree {}", b.degree())));
    }
    let sections = conn
        .sections
        .iter()
        .enumerate()
        .map(|(i, s)| Ok(vec_add(s, &q.coanchor_form(&b.iota(&VField::coord(&q.chart, i))?))))
        .collect::<Result<Vec<_>>>()?;
    Connection::new(q, sections)
}

/// Curvature 3-form `c(∇)(ξ,η,ζ) = ⟨{∇ξ,∇η} - ∇[ξ,η], ∇ζ⟩` on coordinate
/// fields. Each defect must lie in `π†Ω¹`.
pub fn curvature<S: Field>(q: &CourantData<S>, conn: &Connection<S>) -> Result<KForm<S>> {
    let n = q.nvars();
    let cols: Vec<Vec<Poly<S>>> = (0..n).map(|i| q.coanchor.iter().map(|row| row[i].clone()).collect()).collect();
    let coanchor = Solver::new(n, cols, q.rank)?;
    let s = &conn.sections;
    let mut h = KForm::zero(&q.chart, 3);
    for i in 0..n {
        for j in i + 1..n {
            let defect = q.bracket(&s[i], &s[j]);
            if !q.anchor_of(&defect).is_zero() || coanchor.solve(&defect).is_err() {
                return Err(Error::invalid(format!(
                    "defect of (∂{}, ∂{}) is not in the coanchor image: {}",
                    i + 1,
                    j + 1,
                    q.section_string(&defect)
                )));
            }
            for k in j + 1..n {
                h.add_component(vec![i, j, k], q.pair(&defect, &s[k]));
            }
        }
    }
    Ok(h)
}
