//! Exact fits of q-series into the ring generated by `E2`, `E4`, `E6`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::graph::{FeynmanGraph, GenusFunction};
use crate::propagators::eisenstein;
use crate::series::QSeries;
use crate::{Error, Rational, Result};

/// Overdetermination margin: a fit uses `q^0..q^q_order` with
/// `q_order >= basis size + FIT_MARGIN`.
pub const FIT_MARGIN: usize = 5;

/// `E2^e2 E4^e4 E6^e6`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EMonomial {
    pub e2: u32,
    pub e4: u32,
    pub e6: u32,
}

impl EMonomial {
    pub const fn new(e2: u32, e4: u32, e6: u32) -> Self {
        EMonomial { e2, e4, e6 }
    }

    pub fn weight(&self) -> u32 {
        2 * self.e2 + 4 * self.e4 + 6 * self.e6
    }

    pub fn expand(&self, q_order: usize) -> QSeries {
        let mut s = QSeries::zero(q_order);
        s.set(0, Rational::one());
        for (w, e) in [(2, self.e2), (4, self.e4), (6, self.e6)] {
            let ew = eisenstein(w, q_order).expect("supported weight");
            for _ in 0..e {
                s = s.mul(&ew);
            }
        }
        s
    }
}

impl fmt::Display for EMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (name, e) in [("E2", self.e2), ("E4", self.e4), ("E6", self.e6)] {
            match e {
                0 => {}
                1 => parts.push(name.to_string()),
                _ => parts.push(format!("{name}^{e}")),
            }
        }
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join("*"))
        }
    }
}

/// Monomials of weight at most `max_weight`, by weight and then by
/// decreasing power of `E2`.
pub fn basis_monomials(max_weight: u32) -> Vec<EMonomial> {
    let mut out = Vec::new();
    for e6 in 0..=max_weight / 6 {
        for e4 in 0..=(max_weight - 6 * e6) / 4 {
            for e2 in 0..=(max_weight - 6 * e6 - 4 * e4) / 2 {
                out.push(EMonomial::new(e2, e4, e6));
            }
        }
    }
    out.sort_by_key(|m| (m.weight(), std::cmp::Reverse(m.e2), std::cmp::Reverse(m.e4)));
    out
}

/// Every basis monomial expanded through `q^q_order`.
pub fn basis(max_weight: u32, q_order: usize) -> Vec<(EMonomial, QSeries)> {
    basis_monomials(max_weight).into_par_iter().map(|m| (m, m.expand(q_order))).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuasimodularFit {
    /// Nonzero coefficients only.
    pub coefficients: BTreeMap<EMonomial, Rational>,
    pub max_weight: u32,
    /// The polynomial reproduces every supplied coefficient.
    pub residual_ok: bool,
    pub weight_profile: BTreeSet<u32>,
}

impl QuasimodularFit {
    pub fn is_homogeneous(&self) -> bool {
        self.weight_profile.len() <= 1
    }

    pub fn coefficient(&self, m: EMonomial) -> Rational {
        self.coefficients.get(&m).cloned().unwrap_or_else(Rational::zero)
    }

    /// The q-expansion of the polynomial.
    pub fn expand(&self, q_order: usize) -> QSeries {
        let mut total = QSeries::zero(q_order);
        for (m, c) in &self.coefficients {
            total = total.add(&m.expand(q_order).scale(c));
        }
        total
    }
}

impl fmt::Display for QuasimodularFit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coefficients.is_empty() {
            return write!(f, "0");
        }
        let mut terms: Vec<_> = self.coefficients.iter().collect();
        terms.sort_by_key(|(m, _)| (m.weight(), std::cmp::Reverse(m.e2), std::cmp::Reverse(m.e4)));
        for (i, (m, c)) in terms.into_iter().enumerate() {
            let sign = if c.is_negative() { "-" } else { "+" };
            if i == 0 {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            let abs = c.abs();
            match (abs.is_one(), m.weight() == 0) {
                (true, false) => write!(f, "{m}")?,
                (_, true) => write!(f, "{abs}")?,
                (false, false) => write!(f, "{abs}*{m}")?,
            }
        }
        Ok(())
    }
}

/// Solves `series = sum c_m m` using the coefficients `q^0..q^q_order`;
/// `q_order` must be at least the basis size plus [`FIT_MARGIN`].
pub fn fit(series: &QSeries, max_weight: u32, q_order: usize) -> Result<QuasimodularFit> {
    let monomials = basis(max_weight, q_order);
    let m = monomials.len();
    if q_order < m + FIT_MARGIN {
        return Err(Error::Underdetermined(format!(
            "q_order {q_order} for {m} basis monomials; need at least {}",
            m + FIT_MARGIN
        )));
    }
    if series.order() < q_order {
        return Err(Error::Underdetermined(format!("series known through q^{} only, fit needs q^{q_order}", series.order())));
    }
    let rows = q_order + 1;
    // augmented matrix, one row per coefficient
    let mut a: Vec<Vec<Rational>> = (0..rows)
        .map(|d| {
            let mut row: Vec<Rational> = monomials.iter().map(|(_, s)| s.coeff(d)).collect();
            row.push(series.coeff(d));
            row
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..m {
        let Some(p) = (r..rows).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let inv = a[r][col].recip();
        for x in a[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows {
            if i != r && !a[i][col].is_zero() {
                let factor = a[i][col].clone();
                for j in col..=m {
                    let delta = &factor * &a[r][j];
                    a[i][j] -= delta;
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    if pivots.len() < m {
        return Err(Error::Underdetermined(format!("basis has rank {} < {m} at order {q_order}", pivots.len())));
    }
    let consistent = a[r..].iter().all(|row| row[m].is_zero());
    let mut coefficients = BTreeMap::new();
    for (i, &col) in pivots.iter().enumerate() {
        if !a[i][m].is_zero() {
            coefficients.insert(monomials[col].0, a[i][m].clone());
        }
    }
    let weight_profile = coefficients.keys().map(|k: &EMonomial| k.weight()).collect();
    let mut result = QuasimodularFit { coefficients, max_weight, residual_ok: false, weight_profile };
    result.residual_ok = consistent && result.expand(q_order) == series.truncate(q_order);
    Ok(result)
}

/// Highest weight that can occur: `2 (r + sum g_i)`.
pub fn weight_bound(graph: &FeynmanGraph, gf: &GenusFunction) -> u32 {
    2 * (graph.edge_count() as u32 + gf.total())
}
