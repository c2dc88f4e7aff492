//! Commutative polynomials in named even variables with exact coefficients,
//! used for relation generators of presentations.

use crate::scalar::{Q, Scalar};
use num_bigint::BigInt;
use std::collections::BTreeMap;
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Poly {
    pub nvars: usize,
    pub terms: BTreeMap<Vec<u32>, Scalar>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly { nvars, terms: BTreeMap::new() }
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        let mut p = Poly::zero(nvars);
        p.terms.insert(e, Scalar::one());
        p
    }

    pub fn add_term(&mut self, e: Vec<u32>, c: Scalar) {
        let slot = self.terms.entry(e.clone()).or_default();
        *slot = &*slot + &c;
        if slot.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (a, x) in &self.terms {
            for (b, y) in &o.terms {
                let e: Vec<u32> = a.iter().zip(b).map(|(p, q)| p + q).collect();
                out.add_term(e, x * y);
            }
        }
        out
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let mut out = self.clone();
        for (e, c) in &o.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Scalar) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (e, x) in &self.terms {
            out.add_term(e.clone(), x * c);
        }
        out
    }

    pub fn derivative(&self, i: usize) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[i] > 0 {
                let mut e2 = e.clone();
                e2[i] -= 1;
                out.add_term(e2, c * &Scalar::int(e[i] as i64));
            }
        }
        out
    }

    /// Common (weight, aux) of all terms, or None if inhomogeneous or zero.
    pub fn multidegree(&self, weights: &[Vec<i32>], aux: &[u32]) -> Option<(Vec<i32>, u32)> {
        let r = weights.first().map_or(0, |w| w.len());
        let mut found: Option<(Vec<i32>, u32)> = None;
        for e in self.terms.keys() {
            let mut w = vec![0i32; r];
            let mut a = 0u32;
            for (i, &k) in e.iter().enumerate() {
                for (wj, lj) in w.iter_mut().zip(&weights[i]) {
                    *wj += lj * k as i32;
                }
                a += aux[i] * k;
            }
            match &found {
                None => found = Some((w, a)),
                Some(f) if *f == (w.clone(), a) => {}
                Some(_) => return None,
            }
        }
        found
    }

    pub fn display(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for (e, c) in self.terms.iter().rev() {
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(i, &k)| if k == 1 { names[i].clone() } else { format!("{}^{}", names[i], k) })
                .collect();
            let m = mono.join("*");
            parts.push(match (m.is_empty(), c.is_one()) {
                (true, _) => format!("{c}"),
                (false, true) => m,
                (false, false) => format!("({c})*{m}"),
            });
        }
        parts.join(" + ")
    }

    /// Parse `2*x^2*y - 3/4*z + 1` over the given variable names.
    pub fn parse(s: &str, names: &[String]) -> Result<Poly, String> {
        let n = names.len();
        let mut out = Poly::zero(n);
        let cleaned: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if cleaned.is_empty() {
            return Err("empty polynomial".into());
        }
        // split into signed terms
        let mut terms: Vec<(bool, String)> = Vec::new();
        let mut cur = String::new();
        let mut neg = false;
        for (k, ch) in cleaned.chars().enumerate() {
            if (ch == '+' || ch == '-') && k > 0 && !cur.ends_with('^') {
                terms.push((neg, std::mem::take(&mut cur)));
                neg = ch == '-';
            } else if (ch == '+' || ch == '-') && k == 0 {
                neg = ch == '-';
            } else {
                cur.push(ch);
            }
        }
        terms.push((neg, cur));
        for (neg, t) in terms {
            if t.is_empty() {
                return Err(format!("dangling sign in `{s}`"));
            }
            let mut coeff = Scalar::one();
            let mut e = vec![0u32; n];
            for f in t.split('*') {
                let (base, pow) = match f.split_once('^') {
                    Some((b, p)) => (b, p.parse::<u32>().map_err(|_| format!("bad exponent in `{f}`"))?),
                    None => (f, 1),
                };
                if let Some(i) = names.iter().position(|x| x == base) {
                    e[i] += pow;
                } else {
                    let c = parse_rational(base).ok_or(format!("unknown symbol `{base}`"))?;
                    coeff = &coeff * &Scalar::from(c).pow(pow as i64);
                }
            }
            if neg {
                coeff = -coeff;
            }
            out.add_term(e, coeff);
        }
        Ok(out)
    }
}

pub fn parse_rational(s: &str) -> Option<Q> {
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().ok()?;
    let d: BigInt = d.parse().ok()?;
    if d == BigInt::from(0) {
        return None;
    }
    Some(Q::new(n, d))
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (0..self.nvars).map(|i| format!("x{i}")).collect();
        write!(f, "{}", self.display(&names))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names() -> Vec<String> {
        vec!["x".into(), "y".into()]
    }

    #[test]
    fn parse_and_derive() {
        let p = Poly::parse("2*x^2*y - 3/4*y + x*y", &names()).unwrap();
        assert_eq!(p.terms.len(), 3);
        let dx = p.derivative(0);
        assert_eq!(dx, Poly::parse("4*x*y + y", &names()).unwrap());
    }

    #[test]
    fn homogeneity() {
        let w = vec![vec![1], vec![-1]];
        let a = vec![1, 1];
        let p = Poly::parse("x*y - 1", &names()).unwrap();
        assert_eq!(p.multidegree(&w, &a), None);
        let p = Poly::parse("x*y", &names()).unwrap();
        assert_eq!(p.multidegree(&w, &a), Some((vec![0], 2)));
    }

    #[test]
    fn parse_errors() {
        assert!(Poly::parse("x + z", &names()).is_err());
        assert!(Poly::parse("x +", &names()).is_err());
    }
}
