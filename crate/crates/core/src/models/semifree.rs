//! Free graded-commutative dg algebras over a finite coefficient algebra, and their
//! instantiation into finite per-(weight, aux) columns.

use crate::coeff::{CElem, CoeffAlgebra};
use crate::graded::{ColKey, Column, GradedComplex, Window};
use crate::mixed::MixedComplex;
use crate::scalar::Scalar;
use crate::sparse::SparseMatrix;
use rayon::prelude::*;
use std::collections::{BTreeMap, HashMap};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gen {
    pub name: String,
    pub cohdeg: i32,
    pub weight: Vec<i32>,
    pub aux: u32,
}

impl Gen {
    pub fn new(name: impl Into<String>, cohdeg: i32, weight: Vec<i32>, aux: u32) -> Self {
        Gen { name: name.into(), cohdeg, weight, aux }
    }

    pub fn odd(&self) -> bool {
        self.cohdeg.rem_euclid(2) == 1
    }
}

pub type Mono = Vec<u32>;
pub type MPoly = BTreeMap<Mono, CElem>;

#[derive(Clone, Debug)]
pub struct SemifreeModel {
    pub gens: Vec<Gen>,
    pub coeff: CoeffAlgebra,
    pub rank: usize,
    /// d(g) for each generator.
    pub d: Vec<MPoly>,
    /// Optional mixed derivation of degree -1.
    pub mixed: Option<Vec<MPoly>>,
}

/// Basis of one bin: for each cohdeg, sorted (monomial, coefficient basis index).
pub type BinBasis = BTreeMap<i32, Vec<(Mono, usize)>>;

impl SemifreeModel {
    pub fn new(gens: Vec<Gen>, coeff: CoeffAlgebra, rank: usize) -> Self {
        for g in &gens {
            assert!(g.aux >= 1, "generator {} needs aux >= 1 so bins stay finite", g.name);
            assert_eq!(g.weight.len(), rank, "generator {} weight length", g.name);
        }
        let n = gens.len();
        SemifreeModel { gens, coeff, rank, d: vec![MPoly::new(); n], mixed: None }
    }

    pub fn n(&self) -> usize {
        self.gens.len()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.gens.iter().position(|g| g.name == name)
    }

    // ----- polynomial arithmetic -----

    pub fn mono_gen(&self, i: usize) -> Mono {
        let mut m = vec![0; self.n()];
        m[i] = 1;
        m
    }

    pub fn mono_one(&self) -> Mono {
        vec![0; self.n()]
    }

    pub fn poly_gen(&self, i: usize) -> MPoly {
        MPoly::from([(self.mono_gen(i), self.coeff.one())])
    }

    pub fn poly_const(&self, c: CElem) -> MPoly {
        let mut p = MPoly::new();
        if !self.coeff.is_zero(&c) {
            p.insert(self.mono_one(), c);
        }
        p
    }

    /// c·g_i as a polynomial.
    pub fn term(&self, c: CElem, i: usize) -> MPoly {
        let mut p = MPoly::new();
        if !self.coeff.is_zero(&c) {
            p.insert(self.mono_gen(i), c);
        }
        p
    }

    /// Product of monomials with its Koszul sign, or None if an odd generator repeats.
    pub fn mono_mul(&self, a: &Mono, b: &Mono) -> Option<(bool, Mono)> {
        let mut neg = false;
        let mut odd_after = 0u32; // odd generators of `a` with index > current
        let odd_a: Vec<usize> = (0..self.n()).filter(|&i| self.gens[i].odd() && a[i] == 1).collect();
        let mut out = a.clone();
        for j in 0..self.n() {
            if b[j] == 0 {
                continue;
            }
            if self.gens[j].odd() {
                if a[j] == 1 {
                    return None;
                }
                odd_after = odd_a.iter().filter(|&&i| i > j).count() as u32;
                if odd_after % 2 == 1 {
                    neg = !neg;
                }
            }
            out[j] += b[j];
        }
        let _ = odd_after;
        Some((neg, out))
    }

    pub fn poly_add_into(&self, acc: &mut MPoly, m: Mono, c: CElem) {
        match acc.get_mut(&m) {
            Some(x) => {
                *x = self.coeff.add(x, &c);
                if self.coeff.is_zero(x) {
                    acc.remove(&m);
                }
            }
            None => {
                if !self.coeff.is_zero(&c) {
                    acc.insert(m, c);
                }
            }
        }
    }

    pub fn poly_add(&self, p: &MPoly, q: &MPoly) -> MPoly {
        let mut out = p.clone();
        for (m, c) in q {
            self.poly_add_into(&mut out, m.clone(), c.clone());
        }
        out
    }

    pub fn poly_scale(&self, p: &MPoly, c: &CElem) -> MPoly {
        let mut out = MPoly::new();
        for (m, x) in p {
            self.poly_add_into(&mut out, m.clone(), self.coeff.mul(x, c));
        }
        out
    }

    pub fn poly_neg(&self, p: &MPoly) -> MPoly {
        self.poly_scale(p, &self.coeff.constant(Scalar::int(-1)))
    }

    pub fn poly_mul(&self, p: &MPoly, q: &MPoly) -> MPoly {
        let mut out = MPoly::new();
        for (a, x) in p {
            for (b, y) in q {
                if let Some((neg, m)) = self.mono_mul(a, b) {
                    let mut c = self.coeff.mul(x, y);
                    if neg {
                        c = self.coeff.scale(&c, &Scalar::int(-1));
                    }
                    self.poly_add_into(&mut out, m, c);
                }
            }
        }
        out
    }

    /// Apply an odd derivation given by its values on generators to a monomial.
    pub fn derive_mono(&self, der: &[MPoly], m: &Mono) -> MPoly {
        let mut out = MPoly::new();
        let mut prefix_odd = 0u32;
        for k in 0..self.n() {
            let e = m[k];
            if e == 0 {
                continue;
            }
            if !der[k].is_empty() {
                // prefix * g_k^{e-1}, then D(g_k), then suffix
                let mut left = vec![0; self.n()];
                left[..k].copy_from_slice(&m[..k]);
                left[k] = e - 1;
                let mut right = vec![0; self.n()];
                right[k + 1..].copy_from_slice(&m[k + 1..]);
                let mut c = self.coeff.constant(Scalar::int(e as i64));
                if prefix_odd % 2 == 1 {
                    c = self.coeff.scale(&c, &Scalar::int(-1));
                }
                let l = MPoly::from([(left, c)]);
                let r = MPoly::from([(right, self.coeff.one())]);
                let t = self.poly_mul(&self.poly_mul(&l, &der[k]), &r);
                out = self.poly_add(&out, &t);
            }
            if self.gens[k].odd() {
                prefix_odd += e;
            }
        }
        out
    }

    pub fn derive(&self, der: &[MPoly], p: &MPoly) -> MPoly {
        let mut out = MPoly::new();
        for (m, c) in p {
            let t = self.poly_scale(&self.derive_mono(der, m), c);
            out = self.poly_add(&out, &t);
        }
        out
    }

    /// Generators on which d∘d fails to vanish.
    pub fn d_squared_violations(&self) -> Vec<String> {
        (0..self.n())
            .filter(|&i| !self.derive(&self.d, &self.d[i]).is_empty())
            .map(|i| self.gens[i].name.clone())
            .collect()
    }

    /// Generators on which ε∘ε fails to vanish.
    pub fn mixed_squared_violations(&self) -> Vec<String> {
        let Some(b) = &self.mixed else { return Vec::new() };
        (0..self.n())
            .filter(|&i| !self.derive(b, &b[i]).is_empty())
            .map(|i| self.gens[i].name.clone())
            .collect()
    }

    pub fn mono_degree(&self, m: &Mono) -> (i32, Vec<i32>, u32) {
        let mut c = 0;
        let mut w = vec![0; self.rank];
        let mut a = 0;
        for (g, &e) in self.gens.iter().zip(m) {
            c += g.cohdeg * e as i32;
            for (x, y) in w.iter_mut().zip(&g.weight) {
                *x += y * e as i32;
            }
            a += g.aux * e;
        }
        (c, w, a)
    }

    pub fn mono_label(&self, m: &Mono) -> String {
        let parts: Vec<String> = m
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, &e)| if e == 1 { self.gens[i].name.clone() } else { format!("{}^{}", self.gens[i].name, e) })
            .collect();
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join("*")
        }
    }

    pub fn poly_display(&self, p: &MPoly) -> String {
        if p.is_empty() {
            return "0".into();
        }
        p.iter()
            .map(|(m, c)| format!("[{}]*{}", self.coeff.display(c), self.mono_label(m)))
            .collect::<Vec<_>>()
            .join(" + ")
    }

    /// All monomials of aux degree <= max_aux, bucketed by (weight, aux).
    pub fn monomials(&self, max_aux: u32) -> BTreeMap<(Vec<i32>, u32), Vec<Mono>> {
        let mut out: BTreeMap<(Vec<i32>, u32), Vec<Mono>> = BTreeMap::new();
        let mut cur = vec![0u32; self.n()];
        self.enum_rec(0, max_aux, &mut cur, &mut out);
        out
    }

    fn enum_rec(&self, k: usize, left: u32, cur: &mut Mono, out: &mut BTreeMap<(Vec<i32>, u32), Vec<Mono>>) {
        if k == self.n() {
            let (_, w, a) = self.mono_degree(cur);
            out.entry((w, a)).or_default().push(cur.clone());
            return;
        }
        let g = &self.gens[k];
        let max_e = if g.odd() { 1 } else { left / g.aux };
        for e in 0..=max_e.min(left / g.aux) {
            cur[k] = e;
            self.enum_rec(k + 1, left - e * g.aux, cur, out);
        }
        cur[k] = 0;
    }

    pub fn bin_basis(&self, monos: &[Mono]) -> BinBasis {
        let mut out: BinBasis = BTreeMap::new();
        for m in monos {
            let (c, _, _) = self.mono_degree(m);
            for b in 0..self.coeff.dim() {
                out.entry(c + self.coeff.basis_deg(b)).or_default().push((m.clone(), b));
            }
        }
        for v in out.values_mut() {
            v.sort_by_key(|(m, b)| self.basis_label(m, *b));
        }
        out
    }

    pub fn basis_label(&self, m: &Mono, b: usize) -> String {
        let cl = self.coeff.basis_label(b);
        let ml = self.mono_label(m);
        if cl.is_empty() {
            ml
        } else if ml == "1" {
            cl
        } else {
            format!("{ml}*{cl}")
        }
    }

    /// Matrix of an R-linear map given on monomials, from `src` basis to `tgt` basis.
    fn matrix_of(&self, src: &[(Mono, usize)], tgt: &[(Mono, usize)], image: impl Fn(&Mono) -> MPoly) -> SparseMatrix {
        let idx: HashMap<(&Mono, usize), usize> = tgt.iter().enumerate().map(|(i, (m, b))| ((m, *b), i)).collect();
        let mut cache: HashMap<&Mono, MPoly> = HashMap::new();
        let mut trip = Vec::new();
        for (col, (m, b)) in src.iter().enumerate() {
            let img = cache.entry(m).or_insert_with(|| image(m));
            let basis_b = {
                let mut e = self.coeff.zero();
                e[*b] = Scalar::one();
                e
            };
            for (m2, c) in img.iter() {
                let prod = self.coeff.mul(c, &basis_b);
                for (b2, x) in prod.iter().enumerate() {
                    if x.is_zero() {
                        continue;
                    }
                    let row = *idx.get(&(m2, b2)).unwrap_or_else(|| {
                        panic!("image {} leaves its bin", self.basis_label(m2, b2))
                    });
                    trip.push((row, col, x.clone()));
                }
            }
        }
        SparseMatrix::from_triplets(tgt.len(), src.len(), trip)
    }

    /// One finite column with its mixed operator (if any).
    pub fn instantiate_bin(&self, monos: &[Mono]) -> (Column, Option<Vec<SparseMatrix>>) {
        let basis = self.bin_basis(monos);
        let (lo, hi) = match (basis.keys().next(), basis.keys().last()) {
            (Some(&a), Some(&b)) => (a, b),
            _ => return (Column::new(0, vec![], vec![]), self.mixed.as_ref().map(|_| vec![])),
        };
        let empty = Vec::new();
        let piece = |i: i32| basis.get(&i).unwrap_or(&empty);
        let labels: Vec<Vec<String>> =
            (lo..=hi).map(|i| piece(i).iter().map(|(m, b)| self.basis_label(m, *b)).collect()).collect();
        let d: Vec<SparseMatrix> = (lo..hi)
            .map(|i| self.matrix_of(piece(i), piece(i + 1), |m| self.derive_mono(&self.d, m)))
            .collect();
        let eps = self.mixed.as_ref().map(|b| {
            (lo..=hi)
                .map(|i| self.matrix_of(piece(i), piece(i - 1), |m| self.derive_mono(b, m)))
                .collect()
        });
        (Column::new(lo, labels, d), eps)
    }

    /// All bins inside the window, built in parallel.
    pub fn complex(&self, window: &Window) -> MixedComplex {
        let monos = self.monomials(window.aux.1);
        let keys: Vec<(&(Vec<i32>, u32), &Vec<Mono>)> = monos
            .iter()
            .filter(|((w, a), _)| window.contains_key(&ColKey::new(w.clone(), *a, 0)))
            .collect();
        let built: Vec<(ColKey, Column, Option<Vec<SparseMatrix>>)> = keys
            .par_iter()
            .map(|((w, a), ms)| {
                let (c, e) = self.instantiate_bin(ms);
                (ColKey::new(w.clone(), *a, 0), c, e)
            })
            .collect();
        let mut complex = GradedComplex::new(window.clone());
        let mut eps = BTreeMap::new();
        for (k, c, e) in built {
            if let Some(e) = e {
                eps.insert(k.clone(), e);
            }
            complex.columns.insert(k, c);
        }
        MixedComplex { complex, eps: self.mixed.as_ref().map(|_| eps) }
    }

    /// Matrices of an algebra map to another model on one bin, per cohdeg.
    /// `images[i]` is the image of generator i in `tgt`; coefficients pass through `coeff_map`.
    pub fn map_bin(
        &self,
        tgt: &SemifreeModel,
        images: &[MPoly],
        coeff_map: &dyn Fn(&CElem) -> CElem,
        src_monos: &[Mono],
        tgt_monos: &[Mono],
    ) -> BTreeMap<i32, SparseMatrix> {
        let sb = self.bin_basis(src_monos);
        let tb = tgt.bin_basis(tgt_monos);
        let idx: BTreeMap<i32, HashMap<(&Mono, usize), usize>> = tb
            .iter()
            .map(|(i, v)| (*i, v.iter().enumerate().map(|(k, (m, b))| ((m, *b), k)).collect()))
            .collect();
        let mut out = BTreeMap::new();
        let degrees: std::collections::BTreeSet<i32> = sb.keys().chain(tb.keys()).copied().collect();
        for i in degrees {
            let src = sb.get(&i).map(|v| v.as_slice()).unwrap_or(&[]);
            let ntgt = tb.get(&i).map_or(0, |v| v.len());
            let mut trip = Vec::new();
            for (col, (m, b)) in src.iter().enumerate() {
                // image of the monomial: ordered product of generator images
                let mut img = tgt.poly_const(tgt.coeff.one());
                for (k, &e) in m.iter().enumerate() {
                    for _ in 0..e {
                        img = tgt.poly_mul(&img, &images[k]);
                    }
                }
                let mut cb = self.coeff.zero();
                cb[*b] = Scalar::one();
                let cb = coeff_map(&cb);
                for (m2, c) in &img {
                    let prod = tgt.coeff.mul(c, &cb);
                    for (b2, x) in prod.iter().enumerate() {
                        if x.is_zero() {
                            continue;
                        }
                        let row = *idx
                            .get(&i)
                            .and_then(|h| h.get(&(m2, b2)))
                            .unwrap_or_else(|| panic!("map image {} leaves its bin", tgt.basis_label(m2, b2)));
                        trip.push((row, col, x.clone()));
                    }
                }
            }
            out.insert(i, SparseMatrix::from_triplets(ntgt, src.len(), trip));
        }
        out
    }
}
