//! Windowed multigraded complexes and Hilbert tables.
//!
//! The internal differential preserves (weight, aux, upow), so a complex is stored
//! as independent *columns*, each a finite cochain complex in cohdeg. A column may
//! be open below or above when it is a truncation of something larger; the outermost
//! degrees of an open column are edge bins.

use crate::sparse::{cohomology_dims, KernelError, SparseMatrix};
use rayon::prelude::*;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Multidegree {
    pub cohdeg: i32,
    pub weight: Vec<i32>,
    pub aux: u32,
    pub upow: i32,
}

impl Multidegree {
    pub fn new(cohdeg: i32, weight: Vec<i32>, aux: u32, upow: i32) -> Self {
        Multidegree { cohdeg, weight, aux, upow }
    }
}

impl fmt::Display for Multidegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let w: Vec<String> = self.weight.iter().map(|x| x.to_string()).collect();
        write!(f, "{};{};{};{}", self.cohdeg, w.join(","), self.aux, self.upow)
    }
}

/// Key of a column: everything but cohdeg.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ColKey {
    pub weight: Vec<i32>,
    pub aux: u32,
    pub upow: i32,
}

impl ColKey {
    pub fn new(weight: Vec<i32>, aux: u32, upow: i32) -> Self {
        ColKey { weight, aux, upow }
    }

    pub fn at(&self, cohdeg: i32) -> Multidegree {
        Multidegree::new(cohdeg, self.weight.clone(), self.aux, self.upow)
    }
}

impl fmt::Display for ColKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let w: Vec<String> = self.weight.iter().map(|x| x.to_string()).collect();
        write!(f, "w=({}) a={} p={}", w.join(","), self.aux, self.upow)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Window {
    pub cohdeg: (i32, i32),
    pub weight: Vec<(i32, i32)>,
    pub aux: (u32, u32),
    pub upow: (i32, i32),
}

impl Window {
    pub fn new(cohdeg: (i32, i32), weight: Vec<(i32, i32)>, aux_max: u32, u: i32) -> Self {
        Window { cohdeg, weight, aux: (0, aux_max), upow: (-u, u) }
    }

    pub fn contains_key(&self, k: &ColKey) -> bool {
        k.weight.len() == self.weight.len()
            && k.weight.iter().zip(&self.weight).all(|(w, (lo, hi))| lo <= w && w <= hi)
            && self.aux.0 <= k.aux
            && k.aux <= self.aux.1
            && self.upow.0 <= k.upow
            && k.upow <= self.upow.1
    }

    pub fn contains_cohdeg(&self, i: i32) -> bool {
        self.cohdeg.0 <= i && i <= self.cohdeg.1
    }
}

/// One finite cochain complex C^lo -> C^{lo+1} -> ... with basis labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Column {
    pub lo: i32,
    pub labels: Vec<Vec<String>>,
    /// d[k] maps degree lo+k to lo+k+1.
    pub d: Vec<SparseMatrix>,
    pub open_below: bool,
    pub open_above: bool,
}

impl Column {
    pub fn new(lo: i32, labels: Vec<Vec<String>>, d: Vec<SparseMatrix>) -> Self {
        let c = Column { lo, labels, d, open_below: false, open_above: false };
        c.check_shapes();
        c
    }

    fn check_shapes(&self) {
        assert_eq!(self.d.len() + 1, self.labels.len().max(1), "column needs n-1 differentials");
        for (k, m) in self.d.iter().enumerate() {
            assert_eq!(m.cols(), self.labels[k].len(), "d[{k}] domain");
            assert_eq!(m.rows(), self.labels[k + 1].len(), "d[{k}] codomain");
        }
    }

    pub fn hi(&self) -> i32 {
        self.lo + self.labels.len() as i32 - 1
    }

    pub fn dim(&self, i: i32) -> usize {
        if i < self.lo || i > self.hi() {
            return 0;
        }
        self.labels[(i - self.lo) as usize].len()
    }

    /// Differential out of degree i (possibly an empty matrix).
    pub fn d_out(&self, i: i32) -> SparseMatrix {
        if i >= self.lo && i < self.hi() {
            self.d[(i - self.lo) as usize].clone()
        } else {
            SparseMatrix::zeros(self.dim(i + 1), self.dim(i))
        }
    }

    pub fn d_in(&self, i: i32) -> SparseMatrix {
        self.d_out(i - 1)
    }

    pub fn is_edge(&self, i: i32) -> bool {
        (self.open_below && i <= self.lo) || (self.open_above && i >= self.hi())
    }

    /// d∘d = 0 on every interior degree.
    pub fn check_d_squared(&self, key: &ColKey) -> Result<(), KernelError> {
        for k in 1..self.d.len() {
            let comp = self.d[k].mul(&self.d[k - 1])?;
            if !comp.is_zero() {
                return Err(KernelError::NotAComplex {
                    bin: format!("{} cohdeg {}", key, self.lo + k as i32 - 1),
                    nonzero: comp.nnz(),
                });
            }
        }
        Ok(())
    }

    /// Per-degree cohomology dims with edge flags.
    pub fn cohomology(&self, key: &ColKey) -> Result<Vec<(i32, usize, bool)>, KernelError> {
        let mut out = Vec::new();
        for i in self.lo..=self.hi() {
            let h = cohomology_dims(&self.d_in(i), &self.d_out(i), &key.at(i).to_string())?;
            out.push((i, h, self.is_edge(i)));
        }
        Ok(out)
    }

    pub fn euler_chain(&self) -> i64 {
        (self.lo..=self.hi()).map(|i| sign(i) * self.dim(i) as i64).sum()
    }
}

fn sign(i: i32) -> i64 {
    if i.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedComplex {
    pub window: Window,
    pub columns: BTreeMap<ColKey, Column>,
}

impl GradedComplex {
    pub fn new(window: Window) -> Self {
        GradedComplex { window, columns: BTreeMap::new() }
    }

    pub fn insert(&mut self, key: ColKey, col: Column) {
        if self.window.contains_key(&key) {
            self.columns.insert(key, col);
        }
    }

    pub fn check_d_squared(&self) -> Result<(), KernelError> {
        self.columns.iter().try_for_each(|(k, c)| c.check_d_squared(k))
    }

    /// Hilbert table of cohomology; degrees outside the cohdeg window are skipped.
    pub fn cohomology(&self) -> Result<HilbertTable, KernelError> {
        let parts: Vec<Result<Vec<(i32, usize, bool)>, KernelError>> = self
            .columns
            .par_iter()
            .map(|(k, c)| {
                c.check_d_squared(k)?;
                c.cohomology(k)
            })
            .collect();
        let mut table = HilbertTable::default();
        for ((key, _), part) in self.columns.iter().zip(parts) {
            for (i, h, edge) in part? {
                if !self.window.contains_cohdeg(i) {
                    continue;
                }
                table.set(key.at(i), h);
                if edge {
                    table.mark_edge(key.at(i));
                }
            }
        }
        Ok(table)
    }

    /// Euler characteristic consistency on every closed column; returns offending keys.
    pub fn euler_violations(&self) -> Result<Vec<ColKey>, KernelError> {
        let mut bad = Vec::new();
        for (k, c) in &self.columns {
            if c.open_below || c.open_above {
                continue;
            }
            let h: i64 = c.cohomology(k)?.iter().map(|(i, h, _)| sign(*i) * *h as i64).sum();
            if h != c.euler_chain() {
                bad.push(k.clone());
            }
        }
        Ok(bad)
    }

    /// Subcomplex of bins with exact weight `w`.
    pub fn weight_component(&self, w: &[i32]) -> GradedComplex {
        let mut out = GradedComplex::new(self.window.clone());
        for (k, c) in &self.columns {
            if k.weight == w {
                out.columns.insert(k.clone(), c.clone());
            }
        }
        out
    }

    /// Tensor product with graded Leibniz differential d(a⊗b) = da⊗b + (-1)^|a| a⊗db.
    pub fn tensor(&self, other: &GradedComplex) -> GradedComplex {
        let mut parts: BTreeMap<ColKey, Vec<(&ColKey, &Column, &ColKey, &Column)>> = BTreeMap::new();
        for (k1, c1) in &self.columns {
            for (k2, c2) in &other.columns {
                let weight: Vec<i32> = k1.weight.iter().zip(&k2.weight).map(|(a, b)| a + b).collect();
                let key = ColKey::new(weight, k1.aux + k2.aux, k1.upow + k2.upow);
                if self.window.contains_key(&key) {
                    parts.entry(key).or_default().push((k1, c1, k2, c2));
                }
            }
        }
        let mut out = GradedComplex::new(self.window.clone());
        for (key, list) in parts {
            out.columns.insert(key, tensor_column(&list));
        }
        out
    }
}

fn tensor_column(list: &[(&ColKey, &Column, &ColKey, &Column)]) -> Column {
    let lo = list.iter().map(|(_, a, _, b)| a.lo + b.lo).min().unwrap();
    let hi = list.iter().map(|(_, a, _, b)| a.hi() + b.hi()).max().unwrap();
    // basis of degree n: (part, i, j, index_a, index_b)
    let mut index: Vec<BTreeMap<(usize, i32, usize, usize), usize>> = vec![BTreeMap::new(); (hi - lo + 1) as usize];
    let mut labels: Vec<Vec<String>> = vec![Vec::new(); (hi - lo + 1) as usize];
    for (p, (_, a, _, b)) in list.iter().enumerate() {
        for i in a.lo..=a.hi() {
            for j in b.lo..=b.hi() {
                let n = (i + j - lo) as usize;
                for ia in 0..a.dim(i) {
                    for jb in 0..b.dim(j) {
                        index[n].insert((p, i, ia, jb), labels[n].len());
                        let la = &a.labels[(i - a.lo) as usize][ia];
                        let lb = &b.labels[(j - b.lo) as usize][jb];
                        labels[n].push(format!("{la}|{lb}"));
                    }
                }
            }
        }
    }
    let mut d = Vec::new();
    for n in lo..hi {
        let src = &index[(n - lo) as usize];
        let tgt = &index[(n + 1 - lo) as usize];
        let mut trip = Vec::new();
        for (&(p, i, ia, jb), &col) in src {
            let (_, a, _, b) = list[p];
            let j = n - i;
            // da ⊗ b
            let da = a.d_out(i);
            for (r, c, v) in da.entries() {
                if c == ia {
                    // target index in degree (i+1, j)
                    let t = tgt[&(p, i + 1, r, jb)];
                    trip.push((t, col, v.clone()));
                }
            }
            // (-1)^i a ⊗ db
            let db = b.d_out(j);
            for (r, c, v) in db.entries() {
                if c == jb {
                    let t = tgt[&(p, i, ia, r)];
                    let v = if i.rem_euclid(2) == 0 { v.clone() } else { -v };
                    trip.push((t, col, v));
                }
            }
        }
        d.push(SparseMatrix::from_triplets(labels[(n + 1 - lo) as usize].len(), labels[(n - lo) as usize].len(), trip));
    }
    let mut col = Column::new(lo, labels, d);
    col.open_below = list.iter().any(|(_, a, _, b)| a.open_below || b.open_below);
    col.open_above = list.iter().any(|(_, a, _, b)| a.open_above || b.open_above);
    col
}

/// Map from bins to cohomology dimensions, with the set of edge bins.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct HilbertTable {
    dims: BTreeMap<Multidegree, usize>,
    edge: BTreeSet<Multidegree>,
}

impl HilbertTable {
    pub fn set(&mut self, k: Multidegree, v: usize) {
        if v == 0 {
            self.dims.remove(&k);
        } else {
            self.dims.insert(k, v);
        }
    }

    pub fn add(&mut self, k: Multidegree, v: usize) {
        let cur = self.get(&k);
        self.set(k, cur + v);
    }

    pub fn mark_edge(&mut self, k: Multidegree) {
        self.edge.insert(k);
    }

    pub fn get(&self, k: &Multidegree) -> usize {
        self.dims.get(k).copied().unwrap_or(0)
    }

    pub fn is_edge(&self, k: &Multidegree) -> bool {
        self.edge.contains(k)
    }

    pub fn nonzero(&self) -> impl Iterator<Item = (&Multidegree, &usize)> {
        self.dims.iter()
    }

    pub fn edges(&self) -> impl Iterator<Item = &Multidegree> {
        self.edge.iter()
    }

    pub fn total(&self) -> usize {
        self.dims.values().sum()
    }

    /// Restrict to bins satisfying `keep`.
    pub fn filter(&self, keep: impl Fn(&Multidegree) -> bool) -> HilbertTable {
        HilbertTable {
            dims: self.dims.iter().filter(|(k, _)| keep(k)).map(|(k, v)| (k.clone(), *v)).collect(),
            edge: self.edge.iter().filter(|k| keep(k)).cloned().collect(),
        }
    }

    /// Re-key every bin; colliding bins add up and edges propagate.
    pub fn rekey(&self, f: impl Fn(&Multidegree) -> Multidegree) -> HilbertTable {
        let mut out = HilbertTable::default();
        for (k, v) in &self.dims {
            out.add(f(k), *v);
        }
        for k in &self.edge {
            out.mark_edge(f(k));
        }
        out
    }

    /// Bins where the tables differ, ignoring bins that are edge in either.
    pub fn diff_non_edge(&self, other: &HilbertTable) -> Vec<(Multidegree, usize, usize)> {
        let keys: BTreeSet<&Multidegree> = self.dims.keys().chain(other.dims.keys()).collect();
        keys.into_iter()
            .filter(|k| !self.is_edge(k) && !other.is_edge(k))
            .filter_map(|k| {
                let (a, b) = (self.get(k), other.get(k));
                (a != b).then(|| (k.clone(), a, b))
            })
            .collect()
    }

    /// Sorted text block, one line per bin: `i;w1,...,wr;a;p -> dim`.
    pub fn serialize(&self) -> String {
        let keys: BTreeSet<&Multidegree> = self.dims.keys().chain(self.edge.iter()).collect();
        let mut s = String::new();
        for k in keys {
            s.push_str(&format!("{} -> {}", k, self.get(k)));
            if self.is_edge(k) {
                s.push_str(" edge");
            }
            s.push('\n');
        }
        s
    }

    pub fn parse(text: &str) -> Result<HilbertTable, String> {
        let mut t = HilbertTable::default();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
            let (lhs, rhs) = line.split_once("->").ok_or(format!("bad line: {line}"))?;
            let mut rhs = rhs.split_whitespace();
            let v: usize = rhs.next().ok_or("missing dim")?.parse().map_err(|e| format!("{e}"))?;
            let edge = rhs.next() == Some("edge");
            let f: Vec<&str> = lhs.trim().split(';').collect();
            if f.len() != 4 {
                return Err(format!("bad key: {lhs}"));
            }
            let num = |s: &str| s.parse::<i32>().map_err(|e| format!("{e}: {s}"));
            let weight = if f[1].is_empty() {
                Vec::new()
            } else {
                f[1].split(',').map(num).collect::<Result<_, _>>()?
            };
            let k = Multidegree::new(num(f[0])?, weight, num(f[2])? as u32, num(f[3])?);
            t.set(k.clone(), v);
            if edge {
                t.mark_edge(k);
            }
        }
        Ok(t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Scalar;

    fn lab(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("e{i}")).collect()
    }

    fn win() -> Window {
        Window::new((-10, 10), vec![(-10, 10)], 10, 0)
    }

    #[test]
    fn two_term_zero_map() {
        let mut c = GradedComplex::new(win());
        c.insert(ColKey::new(vec![0], 0, 0), Column::new(0, vec![lab(1), lab(1)], vec![SparseMatrix::zeros(1, 1)]));
        let t = c.cohomology().unwrap();
        assert_eq!(t.get(&Multidegree::new(0, vec![0], 0, 0)), 1);
        assert_eq!(t.get(&Multidegree::new(1, vec![0], 0, 0)), 1);
    }

    #[test]
    fn contractible_factor_kills_tensor() {
        let mut unit = GradedComplex::new(win());
        unit.insert(ColKey::new(vec![0], 0, 0), Column::new(0, vec![lab(1)], vec![]));
        let mut cone = GradedComplex::new(win());
        cone.insert(ColKey::new(vec![0], 0, 0), Column::new(-1, vec![lab(1), lab(1)], vec![SparseMatrix::identity(1)]));
        let mut c = GradedComplex::new(win());
        c.insert(ColKey::new(vec![1], 1, 0), Column::new(0, vec![lab(2), lab(1)], vec![SparseMatrix::from_ints(&[&[1, 0]])]));
        assert_eq!(c.tensor(&unit).cohomology().unwrap(), c.cohomology().unwrap());
        assert_eq!(c.tensor(&cone).cohomology().unwrap().total(), 0);
    }

    #[test]
    fn serialize_roundtrip_sorted() {
        let mut t = HilbertTable::default();
        t.set(Multidegree::new(1, vec![0, 2], 3, -1), 2);
        t.set(Multidegree::new(-1, vec![1, 0], 0, 0), 5);
        t.mark_edge(Multidegree::new(0, vec![0, 0], 0, 0));
        let s = t.serialize();
        assert_eq!(s, "-1;1,0;0;0 -> 5\n0;0,0;0;0 -> 0 edge\n1;0,2;3;-1 -> 2\n");
        assert_eq!(HilbertTable::parse(&s).unwrap(), t);
    }

    #[test]
    fn open_column_flags_edges() {
        let mut col = Column::new(0, vec![lab(1), lab(1), lab(1)], vec![SparseMatrix::zeros(1, 1), SparseMatrix::zeros(1, 1)]);
        col.open_above = true;
        let r = col.cohomology(&ColKey::new(vec![], 0, 0)).unwrap();
        assert_eq!(r.iter().map(|x| x.2).collect::<Vec<_>>(), vec![false, false, true]);
        let _ = Scalar::one();
    }
}
