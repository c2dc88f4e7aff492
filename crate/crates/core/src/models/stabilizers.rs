//! Stabilizer subgroups of a linear torus action and the open set of points whose
//! fixed locus sits inside that of a given point.

use super::presentation::{fixed_points, AlgebraPresentation, TorusPoint};
use crate::scalar::Q;
use num_bigint::BigInt;
use std::collections::BTreeSet;
use std::fmt;

/// ∩_{λ ∈ L} ker λ for a sublattice L of characters, stored as its Hermite normal form.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Subgroup {
    pub rank: usize,
    pub lattice: Vec<Vec<i64>>,
}

impl Subgroup {
    pub fn contains(&self, z: &TorusPoint) -> bool {
        self.lattice.iter().all(|row| {
            let l: Vec<i32> = row.iter().map(|&x| x as i32).collect();
            z.character_is_one(&l)
        })
    }

    /// Dimension of the subgroup.
    pub fn dim(&self) -> usize {
        self.rank - self.lattice.len()
    }
}

impl fmt::Display for Subgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.lattice.is_empty() {
            return write!(f, "full torus");
        }
        if self.rank == 1 {
            let g = self.lattice[0][0];
            return if g == 1 { write!(f, "trivial") } else { write!(f, "mu_{g}") };
        }
        let rows: Vec<String> = self
            .lattice
            .iter()
            .map(|r| format!("({})", r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")))
            .collect();
        if self.lattice.len() == self.rank && self.lattice.iter().enumerate().all(|(i, r)| r[i] == 1) {
            return write!(f, "trivial");
        }
        write!(f, "ker[{}]", rows.join(" "))
    }
}

/// Row Hermite normal form of an integer matrix (zero rows dropped).
pub fn hermite(rows: &[Vec<i64>], ncols: usize) -> Vec<Vec<i64>> {
    let mut m: Vec<Vec<i64>> = rows.to_vec();
    let mut out: Vec<Vec<i64>> = Vec::new();
    let mut top = 0;
    for col in 0..ncols {
        // gcd-reduce column `col` among rows top..
        loop {
            let nz: Vec<usize> = (top..m.len()).filter(|&i| m[i][col] != 0).collect();
            if nz.len() <= 1 {
                break;
            }
            let p = *nz.iter().min_by_key(|&&i| m[i][col].abs()).unwrap();
            for &i in &nz {
                if i != p {
                    let q = m[i][col].div_euclid(m[p][col]);
                    for c in 0..ncols {
                        m[i][c] -= q * m[p][c];
                    }
                }
            }
        }
        if let Some(p) = (top..m.len()).find(|&i| m[i][col] != 0) {
            m.swap(top, p);
            if m[top][col] < 0 {
                for c in 0..ncols {
                    m[top][c] = -m[top][c];
                }
            }
            // reduce rows above
            for i in 0..top {
                let q = m[i][col].div_euclid(m[top][col]);
                for c in 0..ncols {
                    m[i][c] -= q * m[top][c];
                }
            }
            top += 1;
        }
    }
    for r in m.into_iter().take(top) {
        if r.iter().any(|&x| x != 0) {
            out.push(r);
        }
    }
    out
}

/// Subgroups ∩_{λ∈S} ker λ over all subsets S of the weights, deduplicated, largest first.
pub fn stabilizer_subgroups(rank: usize, weights: &[Vec<i32>]) -> Vec<Subgroup> {
    let n = weights.len();
    assert!(n < 20, "subset enumeration over {n} weights");
    let mut seen = BTreeSet::new();
    for mask in 0u32..(1 << n) {
        let rows: Vec<Vec<i64>> =
            (0..n).filter(|i| mask >> i & 1 == 1).map(|i| weights[i].iter().map(|&x| x as i64).collect()).collect();
        seen.insert(Subgroup { rank, lattice: hermite(&rows, rank) });
    }
    let mut v: Vec<Subgroup> = seen.into_iter().collect();
    v.sort_by(|a, b| b.dim().cmp(&a.dim()).then_with(|| a.lattice.cmp(&b.lattice)));
    v
}

/// The stabilizers deleted to form U: those not containing z.
pub fn localization_open_set(rank: usize, weights: &[Vec<i32>], z: &TorusPoint) -> Vec<Subgroup> {
    stabilizer_subgroups(rank, weights).into_iter().filter(|h| !h.contains(z)).collect()
}

/// Deterministic sample of points of U: small rationals and roots of unity, in a fixed order.
pub fn sample_open_set(rank: usize, deleted: &[Subgroup], count: usize) -> Vec<TorusPoint> {
    let mut cands: Vec<(Q, Q)> = Vec::new();
    for v in [1i64, -1, 2, 3, -2, -3, 5, 7] {
        cands.push((Q::from_integer(BigInt::from(v)), Q::from_integer(BigInt::from(0))));
    }
    for (n, d) in [(1i64, 2i64), (-1, 3), (2, 3)] {
        cands.push((Q::new(BigInt::from(n), BigInt::from(d)), Q::from_integer(BigInt::from(0))));
    }
    for m in [3i64, 4, 6] {
        cands.push((Q::from_integer(BigInt::from(1)), Q::new(BigInt::from(1), BigInt::from(m))));
    }
    let mut out = Vec::new();
    let total = cands.len().pow(rank as u32);
    for k in 0..total {
        let mut idx = k;
        let coords: Vec<(Q, Q)> = (0..rank)
            .map(|_| {
                let c = cands[idx % cands.len()].clone();
                idx /= cands.len();
                c
            })
            .collect();
        let w = TorusPoint::new(coords);
        if deleted.iter().all(|h| !h.contains(&w)) {
            out.push(w);
            if out.len() == count {
                break;
            }
        }
    }
    out
}

/// For each sampled w in U: whether the relations of X^w contain those of X^z.
pub fn containment_on_sample(p: &AlgebraPresentation, z: &TorusPoint, count: usize) -> Vec<(TorusPoint, bool)> {
    let deleted = localization_open_set(p.rank, &p.weights, z);
    let fz: BTreeSet<String> = fixed_points(p, z).relation_strings().into_iter().collect();
    sample_open_set(p.rank, &deleted, count)
        .into_iter()
        .map(|w| {
            let fw: BTreeSet<String> = fixed_points(p, &w).relation_strings().into_iter().collect();
            let ok = fz.is_subset(&fw);
            (w, ok)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(v: &[Subgroup]) -> Vec<String> {
        v.iter().map(|h| h.to_string()).collect()
    }

    #[test]
    fn rank_one_lists() {
        assert_eq!(names(&stabilizer_subgroups(1, &[vec![1]])), ["full torus", "trivial"]);
        assert_eq!(names(&stabilizer_subgroups(1, &[vec![2]])), ["full torus", "mu_2"]);
        assert_eq!(names(&stabilizer_subgroups(1, &[vec![1], vec![-1]])), ["full torus", "trivial"]);
    }

    #[test]
    fn hermite_rank_two() {
        let h = hermite(&[vec![2, 4], vec![1, 3]], 2);
        assert_eq!(h, vec![vec![1, 1], vec![0, 2]]);
        assert_eq!(names(&stabilizer_subgroups(2, &[vec![1, 0], vec![0, 1]])).len(), 4);
    }

    #[test]
    fn open_sets() {
        assert_eq!(names(&localization_open_set(1, &[vec![1]], &TorusPoint::rational(&[2]))), ["trivial"]);
        assert!(localization_open_set(1, &[vec![1]], &TorusPoint::rational(&[1])).is_empty());
        assert!(localization_open_set(1, &[vec![2]], &TorusPoint::rational(&[-1])).is_empty());
    }

    #[test]
    fn sample_respects_containment() {
        let p = AlgebraPresentation::affine(&[vec![1], vec![2]]);
        for z in [-1, 3, 2] {
            let s = containment_on_sample(&p, &TorusPoint::rational(&[z]), 10);
            assert_eq!(s.len(), 10);
            assert!(s.iter().all(|(_, ok)| *ok));
        }
    }
}
