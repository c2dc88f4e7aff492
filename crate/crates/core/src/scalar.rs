//! Exact scalars: rationals and elements of cyclotomic fields Q(ζ_m).
//!
//! A cyclotomic element is a coefficient vector of length φ(m) in powers of ζ_m,
//! always reduced modulo Φ_m. Rationals mix freely with any cyclotomic field;
//! two different conductors never do.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

pub type Q = BigRational;

/// Scalar backend of a computation session.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Field {
    Rational,
    Cyclotomic(u32),
}

impl Field {
    /// Join of two backends; `None` when conductors differ.
    pub fn join(self, other: Field) -> Option<Field> {
        match (self, other) {
            (Field::Rational, f) | (f, Field::Rational) => Some(f),
            (Field::Cyclotomic(a), Field::Cyclotomic(b)) if a == b => Some(self),
            _ => None,
        }
    }

    pub fn zero(self) -> Scalar {
        Scalar::zero()
    }

    pub fn one(self) -> Scalar {
        Scalar::one()
    }

    /// ζ_m^k in this field (rational backend only accepts trivial roots).
    pub fn zeta_pow(self, k: i64) -> Scalar {
        match self {
            Field::Rational => Scalar::one(),
            Field::Cyclotomic(m) => Scalar::zeta(m, k),
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Rational => write!(f, "rational"),
            Field::Cyclotomic(m) => write!(f, "cyclotomic({m})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Scalar {
    Rat(Q),
    Cyc { m: u32, c: Vec<Q> },
}

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qf(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

// ---------- Q[x] helpers (coefficients low to high) ----------

fn trim(p: &mut Vec<Q>) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

fn pmul(a: &[Q], b: &[Q]) -> Vec<Q> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Q::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if !y.is_zero() {
                out[i + j] += x * y;
            }
        }
    }
    trim(&mut out);
    out
}

fn psub(a: &[Q], b: &[Q]) -> Vec<Q> {
    let n = a.len().max(b.len());
    let mut out: Vec<Q> = (0..n)
        .map(|i| {
            let x = a.get(i).cloned().unwrap_or_else(Q::zero);
            let y = b.get(i).cloned().unwrap_or_else(Q::zero);
            x - y
        })
        .collect();
    trim(&mut out);
    out
}

fn pdivrem(a: &[Q], b: &[Q]) -> (Vec<Q>, Vec<Q>) {
    let mut r: Vec<Q> = a.to_vec();
    trim(&mut r);
    let db = b.len() - 1;
    let lead = b[db].clone();
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let mut quo = vec![Q::zero(); r.len() - db];
    while r.len() > db && !r.is_empty() {
        let k = r.len() - 1 - db;
        let c = r.last().unwrap() / &lead;
        for (j, bj) in b.iter().enumerate() {
            r[k + j] -= &c * bj;
        }
        quo[k] = c;
        trim(&mut r);
    }
    trim(&mut quo);
    (quo, r)
}

fn cyclotomic_poly_uncached(m: u32) -> Vec<Q> {
    // x^m - 1 divided by Φ_d for every proper divisor d.
    let mut p = vec![Q::zero(); m as usize + 1];
    p[0] = q(-1);
    p[m as usize] = q(1);
    for d in 1..m {
        if m % d == 0 {
            let (quo, rem) = pdivrem(&p, &cyclotomic_poly(d));
            debug_assert!(rem.is_empty());
            p = quo;
        }
    }
    p
}

/// Φ_m with rational coefficients, low to high; cached per conductor.
pub fn cyclotomic_poly(m: u32) -> Arc<Vec<Q>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<Vec<Q>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(p) = cache.lock().unwrap().get(&m) {
        return p.clone();
    }
    let p = Arc::new(cyclotomic_poly_uncached(m));
    cache.lock().unwrap().insert(m, p.clone());
    p
}

pub fn euler_phi(m: u32) -> usize {
    cyclotomic_poly(m).len() - 1
}

fn reduce(m: u32, mut p: Vec<Q>) -> Vec<Q> {
    let phi = cyclotomic_poly(m);
    let n = phi.len() - 1;
    trim(&mut p);
    if p.len() > n {
        p = pdivrem(&p, &phi).1;
    }
    p.resize(n, Q::zero());
    p
}

impl Scalar {
    pub fn zero() -> Scalar {
        Scalar::Rat(Q::zero())
    }

    pub fn one() -> Scalar {
        Scalar::Rat(Q::one())
    }

    pub fn int(n: i64) -> Scalar {
        Scalar::Rat(q(n))
    }

    pub fn rat(n: i64, d: i64) -> Scalar {
        Scalar::Rat(qf(n, d))
    }

    /// ζ_m^k reduced modulo Φ_m.
    pub fn zeta(m: u32, k: i64) -> Scalar {
        assert!(m >= 1);
        let k = k.rem_euclid(m as i64) as usize;
        let mut p = vec![Q::zero(); k + 1];
        p[k] = Q::one();
        Scalar::Cyc { m, c: reduce(m, p) }
    }

    /// Build a cyclotomic element from coefficients in powers of ζ_m.
    pub fn cyc(m: u32, coeffs: &[Q]) -> Scalar {
        Scalar::Cyc { m, c: reduce(m, coeffs.to_vec()) }
    }

    pub fn field(&self) -> Field {
        match self {
            Scalar::Rat(_) => Field::Rational,
            Scalar::Cyc { m, .. } => Field::Cyclotomic(*m),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rat(x) => x.is_zero(),
            Scalar::Cyc { c, .. } => c.iter().all(|x| x.is_zero()),
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Rat(x) => x.is_one(),
            Scalar::Cyc { c, .. } => {
                !c.is_empty() && c[0].is_one() && c[1..].iter().all(|x| x.is_zero())
            }
        }
    }

    /// The rational value, if this element lies in Q.
    pub fn as_rational(&self) -> Option<Q> {
        match self {
            Scalar::Rat(x) => Some(x.clone()),
            Scalar::Cyc { c, .. } => {
                if c[1..].iter().all(|x| x.is_zero()) {
                    Some(c[0].clone())
                } else {
                    None
                }
            }
        }
    }

    fn coeffs_in(&self, m: u32) -> Vec<Q> {
        match self {
            Scalar::Rat(x) => reduce(m, vec![x.clone()]),
            Scalar::Cyc { m: m2, c } => {
                assert_eq!(*m2, m, "mixed cyclotomic conductors");
                c.clone()
            }
        }
    }

    fn common(&self, other: &Scalar) -> Option<u32> {
        match self.field().join(other.field()) {
            Some(Field::Rational) => None,
            Some(Field::Cyclotomic(m)) => Some(m),
            None => panic!("scalar backend mismatch: {} vs {}", self.field(), other.field()),
        }
    }

    pub fn inv(&self) -> Scalar {
        assert!(!self.is_zero(), "inverse of zero");
        match self {
            Scalar::Rat(x) => Scalar::Rat(x.recip()),
            Scalar::Cyc { m, c } => {
                // extended Euclid: s*a + t*Φ = 1
                let phi = cyclotomic_poly(*m).to_vec();
                let mut a = c.clone();
                trim(&mut a);
                let (mut r0, mut r1) = (phi, a);
                let (mut s0, mut s1): (Vec<Q>, Vec<Q>) = (Vec::new(), vec![Q::one()]);
                while !r1.is_empty() {
                    let (quo, rem) = pdivrem(&r0, &r1);
                    let s2 = psub(&s0, &pmul(&quo, &s1));
                    r0 = std::mem::replace(&mut r1, rem);
                    s0 = std::mem::replace(&mut s1, s2);
                }
                // r0 is a nonzero constant because Φ_m is irreducible
                debug_assert_eq!(r0.len(), 1);
                let k = r0[0].recip();
                let s: Vec<Q> = s0.into_iter().map(|x| x * &k).collect();
                Scalar::Cyc { m: *m, c: reduce(*m, s) }
            }
        }
    }

    pub fn pow(&self, e: i64) -> Scalar {
        if e < 0 {
            return self.inv().pow(-e);
        }
        let mut acc = Scalar::one();
        let mut base = self.clone();
        let mut e = e as u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    pub fn div(&self, other: &Scalar) -> Scalar {
        self * &other.inv()
    }

    /// Scale to a canonical representative for row normalization; returns the factor used.
    pub(crate) fn content_factor(row: &[&Scalar]) -> Scalar {
        let lead = row.iter().find(|s| !s.is_zero()).expect("nonzero row");
        match lead {
            Scalar::Cyc { .. } => lead.inv(),
            Scalar::Rat(_) => {
                let mut den_lcm = BigInt::one();
                let mut num_gcd = BigInt::zero();
                for s in row {
                    if let Scalar::Rat(x) = s {
                        den_lcm = den_lcm.lcm(x.denom());
                    } else {
                        return lead.inv();
                    }
                }
                for s in row {
                    if let Scalar::Rat(x) = s {
                        let v = x.numer() * (&den_lcm / x.denom());
                        num_gcd = num_gcd.gcd(&v);
                    }
                }
                let Scalar::Rat(l) = lead else { unreachable!() };
                let mut f = Q::new(den_lcm, num_gcd);
                if l.is_negative() {
                    f = -f;
                }
                Scalar::Rat(f)
            }
        }
    }
}

impl Default for Scalar {
    fn default() -> Self {
        Scalar::zero()
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::int(n)
    }
}

impl From<Q> for Scalar {
    fn from(x: Q) -> Self {
        Scalar::Rat(x)
    }
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, o: &Scalar) -> Scalar {
        match (self, o) {
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(a + b),
            _ => {
                let m = self.common(o).unwrap();
                let (a, b) = (self.coeffs_in(m), o.coeffs_in(m));
                Scalar::Cyc { m, c: a.iter().zip(&b).map(|(x, y)| x + y).collect() }
            }
        }
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, o: &Scalar) -> Scalar {
        self + &(-o)
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Rat(a) => Scalar::Rat(-a),
            Scalar::Cyc { m, c } => Scalar::Cyc { m: *m, c: c.iter().map(|x| -x).collect() },
        }
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, o: &Scalar) -> Scalar {
        match (self, o) {
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(a * b),
            (Scalar::Rat(a), Scalar::Cyc { m, c }) | (Scalar::Cyc { m, c }, Scalar::Rat(a)) => {
                Scalar::Cyc { m: *m, c: c.iter().map(|x| x * a).collect() }
            }
            (Scalar::Cyc { .. }, Scalar::Cyc { .. }) => {
                let m = self.common(o).unwrap();
                Scalar::Cyc { m, c: reduce(m, pmul(&self.coeffs_in(m), &o.coeffs_in(m))) }
            }
        }
    }
}

macro_rules! owned_ops {
    ($tr:ident, $f:ident) => {
        impl $tr for Scalar {
            type Output = Scalar;
            fn $f(self, o: Scalar) -> Scalar {
                (&self).$f(&o)
            }
        }
        impl $tr<&Scalar> for Scalar {
            type Output = Scalar;
            fn $f(self, o: &Scalar) -> Scalar {
                (&self).$f(o)
            }
        }
    };
}
owned_ops!(Add, add);
owned_ops!(Sub, sub);
owned_ops!(Mul, mul);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rat(x) => write!(f, "{x}"),
            Scalar::Cyc { m, c } => {
                let mut first = true;
                for (k, x) in c.iter().enumerate() {
                    if x.is_zero() {
                        continue;
                    }
                    if !first {
                        write!(f, " + ")?;
                    }
                    first = false;
                    match k {
                        0 => write!(f, "{x}")?,
                        1 => write!(f, "({x})*z{m}")?,
                        _ => write!(f, "({x})*z{m}^{k}")?,
                    }
                }
                if first {
                    write!(f, "0")?;
                }
                Ok(())
            }
        }
    }
}
