//! Presentations of weight-graded affine spaces with a diagonalizable group action,
//! torus points, and classical fixed loci.

use crate::poly::{parse_rational, Poly};
use crate::scalar::{Field, Q, Scalar};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PresentationError {
    #[error("generator `{0}` has weight vector of length {1}, expected {2}")]
    WeightLength(String, usize, usize),
    #[error("generator `{0}` must have aux degree >= 1")]
    ZeroAux(String),
    #[error("relation `{0}` is not homogeneous in (weight, aux)")]
    Inhomogeneous(String),
    #[error("duplicate generator `{0}`")]
    Duplicate(String),
    #[error("point has {0} coordinates, expected {1}")]
    PointLength(usize, usize),
    #[error("mixed cyclotomic conductors {0} and {1}")]
    MixedConductors(u32, u32),
    #[error("bad point token `{0}`")]
    BadToken(String),
}

/// The torus 𝔾ₘ^r; r = 0 is the trivial group.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TorusData {
    pub rank: usize,
}

/// z = (q_j ζ^{θ_j}) with q_j a nonzero rational and θ_j ∈ Q/Z.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorusPoint {
    pub coords: Vec<(Q, Q)>,
}

fn frac(x: &Q) -> Q {
    x - Q::from_integer(x.floor().to_integer())
}

impl TorusPoint {
    pub fn identity(r: usize) -> Self {
        TorusPoint { coords: vec![(Q::one(), Q::zero()); r] }
    }

    pub fn rational(vals: &[i64]) -> Self {
        TorusPoint { coords: vals.iter().map(|&v| (Q::from_integer(BigInt::from(v)), Q::zero())).collect() }
    }

    pub fn new(coords: Vec<(Q, Q)>) -> Self {
        assert!(coords.iter().all(|(q, _)| !q.is_zero()), "torus coordinates are nonzero");
        TorusPoint { coords: coords.into_iter().map(|(q, t)| (q, frac(&t))).collect() }
    }

    pub fn rank(&self) -> usize {
        self.coords.len()
    }

    /// λ(z) in Q_{>0} × Q/Z (signs folded into the angle).
    pub fn character(&self, lambda: &[i32]) -> (Q, Q) {
        let mut mag = Q::one();
        let mut ang = Q::zero();
        for ((q, t), &l) in self.coords.iter().zip(lambda) {
            let qa = q.abs();
            let half = if q.is_negative() { Q::new(BigInt::from(1), BigInt::from(2)) } else { Q::zero() };
            let p = if l >= 0 { num_traits::pow(qa, l as usize) } else { num_traits::pow(qa.recip(), (-l) as usize) };
            mag *= p;
            ang += (t + half) * Q::from_integer(BigInt::from(l));
        }
        (mag, frac(&ang))
    }

    pub fn character_is_one(&self, lambda: &[i32]) -> bool {
        let (m, a) = self.character(lambda);
        m.is_one() && a.is_zero()
    }

    /// Scalar backend needed to write the coordinates down.
    pub fn field(&self) -> Field {
        let mut m = BigInt::one();
        for (_, t) in &self.coords {
            m = m.lcm(t.denom());
        }
        let m: u32 = m.try_into().expect("conductor fits u32");
        if m == 1 {
            Field::Rational
        } else {
            Field::Cyclotomic(m)
        }
    }

    /// Coordinates as scalars q_j ζ_m^{m θ_j}.
    pub fn scalars(&self) -> Vec<Scalar> {
        let f = self.field();
        self.coords
            .iter()
            .map(|(q, t)| {
                let base = Scalar::Rat(q.clone());
                match f {
                    Field::Rational => base,
                    Field::Cyclotomic(m) => {
                        let k = (t * Q::from_integer(BigInt::from(m))).to_integer();
                        let k: i64 = k.try_into().unwrap();
                        &base * &Scalar::zeta(m, k)
                    }
                }
            })
            .collect()
    }

    /// Parse tokens like `2`, `-1`, `3/2*zeta(4)^3`, `zeta(3)`.
    pub fn parse(tokens: &[&str]) -> Result<TorusPoint, PresentationError> {
        let mut coords = Vec::new();
        let mut conductor: Option<u32> = None;
        for tok in tokens {
            let tok = tok.trim();
            let bad = || PresentationError::BadToken(tok.to_string());
            let (qpart, zpart) = match tok.find("zeta(") {
                Some(pos) => {
                    let q = tok[..pos].trim_end_matches('*');
                    (if q.is_empty() { "1" } else { q }, Some(&tok[pos..]))
                }
                None => (tok, None),
            };
            let qv = if qpart == "-" { Q::from_integer(BigInt::from(-1)) } else { parse_rational(qpart).ok_or_else(bad)? };
            if qv.is_zero() {
                return Err(bad());
            }
            let mut theta = Q::zero();
            if let Some(z) = zpart {
                let close = z.find(')').ok_or_else(bad)?;
                let m: u32 = z[5..close].parse().map_err(|_| bad())?;
                if m == 0 {
                    return Err(bad());
                }
                let k: i64 = match z[close + 1..].strip_prefix('^') {
                    Some(e) => e.parse().map_err(|_| bad())?,
                    None if z.len() == close + 1 => 1,
                    None => return Err(bad()),
                };
                if let Some(c) = conductor {
                    if c != m {
                        return Err(PresentationError::MixedConductors(c, m));
                    }
                }
                conductor = Some(m);
                theta = Q::new(BigInt::from(k), BigInt::from(m));
            }
            coords.push((qv, theta));
        }
        Ok(TorusPoint::new(coords))
    }
}

impl fmt::Display for TorusPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .coords
            .iter()
            .map(|(q, t)| if t.is_zero() { format!("{q}") } else { format!("{q}*e({t})") })
            .collect();
        write!(f, "({})", parts.join(", "))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraPresentation {
    pub names: Vec<String>,
    pub weights: Vec<Vec<i32>>,
    pub aux: Vec<u32>,
    pub relations: Vec<Poly>,
    /// Multidegree (weight, aux) of each relation.
    pub rel_degrees: Vec<(Vec<i32>, u32)>,
    pub asserted_regular_sequence: bool,
    pub asserted_smooth: bool,
    pub rank: usize,
}

impl AlgebraPresentation {
    pub fn new(rank: usize, gens: &[(&str, Vec<i32>, u32)]) -> Result<Self, PresentationError> {
        let mut p = AlgebraPresentation {
            names: Vec::new(),
            weights: Vec::new(),
            aux: Vec::new(),
            relations: Vec::new(),
            rel_degrees: Vec::new(),
            asserted_regular_sequence: true,
            asserted_smooth: true,
            rank,
        };
        for (n, w, a) in gens {
            if w.len() != rank {
                return Err(PresentationError::WeightLength(n.to_string(), w.len(), rank));
            }
            if *a == 0 {
                return Err(PresentationError::ZeroAux(n.to_string()));
            }
            if p.names.iter().any(|x| x == n) {
                return Err(PresentationError::Duplicate(n.to_string()));
            }
            p.names.push(n.to_string());
            p.weights.push(w.clone());
            p.aux.push(*a);
        }
        Ok(p)
    }

    /// Affine space with the given weights (rank 1 when every weight has length 1).
    pub fn affine(weights: &[Vec<i32>]) -> Self {
        let rank = weights.first().map_or(0, |w| w.len());
        let names: Vec<String> = (0..weights.len())
            .map(|i| if weights.len() <= 3 { ["x", "y", "z"][i].to_string() } else { format!("x{}", i + 1) })
            .collect();
        let gens: Vec<(&str, Vec<i32>, u32)> =
            names.iter().zip(weights).map(|(n, w)| (n.as_str(), w.clone(), 1)).collect();
        AlgebraPresentation::new(rank, &gens).unwrap()
    }

    pub fn n(&self) -> usize {
        self.names.len()
    }

    pub fn add_relation(&mut self, f: Poly) -> Result<(), PresentationError> {
        let deg = f
            .multidegree(&self.weights, &self.aux)
            .ok_or_else(|| PresentationError::Inhomogeneous(f.display(&self.names)))?;
        self.relations.push(f);
        self.rel_degrees.push(deg);
        Ok(())
    }

    pub fn add_relation_str(&mut self, s: &str) -> Result<(), PresentationError> {
        let f = Poly::parse(s, &self.names).map_err(|_| PresentationError::Inhomogeneous(s.to_string()))?;
        self.add_relation(f)
    }

    /// Index i if relation j is the single coordinate x_i.
    pub fn coordinate_relation(&self, j: usize) -> Option<usize> {
        let f = &self.relations[j];
        if f.terms.len() != 1 {
            return None;
        }
        let (e, c) = f.terms.iter().next().unwrap();
        if !c.is_one() || e.iter().sum::<u32>() != 1 {
            return None;
        }
        e.iter().position(|&k| k == 1)
    }

    pub fn relation_strings(&self) -> Vec<String> {
        self.relations.iter().map(|f| f.display(&self.names)).collect()
    }
}

/// Generators whose character does not vanish at z, i.e. the coordinates cut out by X^z.
pub fn moving_coordinates(p: &AlgebraPresentation, z: &TorusPoint) -> Vec<usize> {
    (0..p.n()).filter(|&i| !z.character_is_one(&p.weights[i])).collect()
}

/// Classical fixed locus: adds the relation x_i for every coordinate with λ_i(z) ≠ 1.
pub fn fixed_points(p: &AlgebraPresentation, z: &TorusPoint) -> AlgebraPresentation {
    let mut out = p.clone();
    for i in moving_coordinates(p, z) {
        out.add_relation(Poly::var(p.n(), i)).expect("coordinate relations are homogeneous");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn point_parsing_and_characters() {
        let z = TorusPoint::parse(&["zeta(2)"]).unwrap();
        assert!(z.character_is_one(&[2]));
        assert!(!z.character_is_one(&[1]));
        let z = TorusPoint::parse(&["-1"]).unwrap();
        assert!(z.character_is_one(&[2]));
        assert_eq!(z.field(), Field::Rational);
        let z = TorusPoint::parse(&["3/2*zeta(4)^3"]).unwrap();
        assert_eq!(z.field(), Field::Cyclotomic(4));
        assert!(matches!(
            TorusPoint::parse(&["zeta(3)", "zeta(4)"]),
            Err(PresentationError::MixedConductors(3, 4))
        ));
    }

    #[test]
    fn fixed_loci() {
        let a1 = AlgebraPresentation::affine(&[vec![1]]);
        assert_eq!(fixed_points(&a1, &TorusPoint::rational(&[2])).relations.len(), 1);
        let a2 = AlgebraPresentation::affine(&[vec![1], vec![2]]);
        let f = fixed_points(&a2, &TorusPoint::rational(&[-1]));
        assert_eq!(f.relation_strings(), vec!["x".to_string()]);
        let w2 = AlgebraPresentation::affine(&[vec![2]]);
        let z = TorusPoint::parse(&["zeta(2)"]).unwrap();
        assert!(fixed_points(&w2, &z).relations.is_empty());
        assert_eq!(fixed_points(&a2, &TorusPoint::identity(1)), a2);
    }

    #[test]
    fn inhomogeneous_relation_rejected() {
        let mut p = AlgebraPresentation::affine(&[vec![1], vec![2]]);
        assert!(p.add_relation_str("x*y + y").is_err());
        assert!(p.add_relation_str("x^2*y").is_ok());
    }
}
