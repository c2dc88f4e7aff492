//! Finite-dimensional coefficient algebras k[t_1..t_r]/(t_1^n, ..., t_r^n).
//!
//! These carry the group directions of loop and Cartan models: t_j = w_j - z_j at
//! level n of a completion tower, or the Lie coordinates ξ_j truncated at ξ^n.

use crate::scalar::{Field, Scalar};
use std::collections::HashMap;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoeffAlgebra {
    pub r: usize,
    pub n: u32,
    pub var: String,
    /// Cohomological degree carried by each variable (0, or 2 for ξ in topological grading).
    pub var_deg: i32,
    pub field: Field,
    basis: Vec<Vec<u32>>,
    index: HashMap<Vec<u32>, usize>,
}

/// Element of a coefficient algebra: coordinates in the monomial basis.
pub type CElem = Vec<Scalar>;

impl CoeffAlgebra {
    pub fn new(r: usize, n: u32, var: &str, var_deg: i32, field: Field) -> Self {
        assert!(n >= 1);
        let n_eff = if r == 0 { 1 } else { n };
        let mut basis: Vec<Vec<u32>> = vec![vec![]];
        for _ in 0..r {
            basis = basis
                .into_iter()
                .flat_map(|b| {
                    (0..n_eff).map(move |k| {
                        let mut b2 = b.clone();
                        b2.push(k);
                        b2
                    })
                })
                .collect();
        }
        basis.sort_by_key(|e| (e.iter().sum::<u32>(), e.clone()));
        let index = basis.iter().enumerate().map(|(i, e)| (e.clone(), i)).collect();
        CoeffAlgebra { r, n: n_eff, var: var.into(), var_deg, field, basis, index }
    }

    /// The ground field itself.
    pub fn ground(field: Field) -> Self {
        CoeffAlgebra::new(0, 1, "t", 0, field)
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self, i: usize) -> &[u32] {
        &self.basis[i]
    }

    pub fn basis_deg(&self, i: usize) -> i32 {
        self.var_deg * self.basis[i].iter().sum::<u32>() as i32
    }

    pub fn basis_label(&self, i: usize) -> String {
        let parts: Vec<String> = self.basis[i]
            .iter()
            .enumerate()
            .filter(|(_, &k)| k > 0)
            .map(|(j, &k)| {
                let v = if self.r == 1 { self.var.clone() } else { format!("{}{}", self.var, j + 1) };
                if k == 1 {
                    v
                } else {
                    format!("{v}^{k}")
                }
            })
            .collect();
        parts.join("*")
    }

    pub fn zero(&self) -> CElem {
        vec![Scalar::zero(); self.dim()]
    }

    pub fn constant(&self, c: Scalar) -> CElem {
        let mut e = self.zero();
        e[0] = c;
        e
    }

    pub fn one(&self) -> CElem {
        self.constant(Scalar::one())
    }

    pub fn var(&self, j: usize) -> CElem {
        let mut e = self.zero();
        let mut m = vec![0; self.r];
        m[j] = 1;
        if let Some(&i) = self.index.get(&m) {
            e[i] = Scalar::one();
        }
        e
    }

    pub fn is_zero(&self, a: &CElem) -> bool {
        a.iter().all(|x| x.is_zero())
    }

    pub fn is_unit(&self, a: &CElem) -> bool {
        !a[0].is_zero()
    }

    pub fn add(&self, a: &CElem, b: &CElem) -> CElem {
        a.iter().zip(b).map(|(x, y)| x + y).collect()
    }

    pub fn sub(&self, a: &CElem, b: &CElem) -> CElem {
        a.iter().zip(b).map(|(x, y)| x - y).collect()
    }

    pub fn scale(&self, a: &CElem, c: &Scalar) -> CElem {
        a.iter().map(|x| x * c).collect()
    }

    pub fn mul(&self, a: &CElem, b: &CElem) -> CElem {
        let mut out = self.zero();
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                let e: Vec<u32> = self.basis[i].iter().zip(&self.basis[j]).map(|(p, q)| p + q).collect();
                if let Some(&k) = self.index.get(&e) {
                    out[k] = &out[k] + &(x * y);
                }
            }
        }
        out
    }

    /// Σ c_k y^k for nilpotent y, stopping once powers vanish.
    fn series(&self, y: &CElem, coeff: impl Fn(usize) -> Scalar) -> CElem {
        assert!(y[0].is_zero(), "series argument must be nilpotent");
        let mut acc = self.constant(coeff(0));
        let mut p = self.one();
        for k in 1.. {
            p = self.mul(&p, y);
            if self.is_zero(&p) {
                break;
            }
            acc = self.add(&acc, &self.scale(&p, &coeff(k)));
        }
        acc
    }

    pub fn inv(&self, a: &CElem) -> CElem {
        assert!(self.is_unit(a), "inverse of a non-unit coefficient");
        let c = a[0].inv();
        let y = self.sub(&self.scale(a, &c), &self.one());
        let s = self.series(&y, |k| if k % 2 == 0 { Scalar::one() } else { Scalar::int(-1) });
        self.scale(&s, &c)
    }

    pub fn pow(&self, a: &CElem, e: i64) -> CElem {
        if e < 0 {
            return self.pow(&self.inv(a), -e);
        }
        let mut acc = self.one();
        for _ in 0..e {
            acc = self.mul(&acc, a);
        }
        acc
    }

    /// log(1 + y) for nilpotent y.
    pub fn log1p(&self, y: &CElem) -> CElem {
        self.series(y, |k| {
            if k == 0 {
                Scalar::zero()
            } else if k % 2 == 1 {
                Scalar::rat(1, k as i64)
            } else {
                Scalar::rat(-1, k as i64)
            }
        })
    }

    /// log(1 + y) / y for nilpotent y.
    pub fn log1p_over(&self, y: &CElem) -> CElem {
        self.series(y, |k| {
            let s = if k % 2 == 0 { 1 } else { -1 };
            Scalar::rat(s, k as i64 + 1)
        })
    }

    /// Reduction map to the algebra with a smaller truncation level.
    pub fn project_to(&self, a: &CElem, lower: &CoeffAlgebra) -> CElem {
        let mut out = lower.zero();
        for (i, x) in a.iter().enumerate() {
            if let Some(&k) = lower.index.get(&self.basis[i]) {
                out[k] = x.clone();
            }
        }
        out
    }

    pub fn display(&self, a: &CElem) -> String {
        let parts: Vec<String> = a
            .iter()
            .enumerate()
            .filter(|(_, x)| !x.is_zero())
            .map(|(i, x)| {
                let l = self.basis_label(i);
                if l.is_empty() {
                    format!("{x}")
                } else {
                    format!("({x})*{l}")
                }
            })
            .collect();
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }
}
