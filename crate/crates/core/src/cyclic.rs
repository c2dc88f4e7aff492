//! The cyclic bar complex of a monomial algebra, optionally equivariant for a torus
//! with coefficients completed at a point, and its Connes operator.
//!
//! C_n = A^{⊗n+1} sits in cohdeg −n. Only monomial relations are supported, so the
//! basis of A is the set of standard monomials and products are monomial.

use crate::coeff::{CElem, CoeffAlgebra};
use crate::graded::{ColKey, Column, GradedComplex, Window};
use crate::mixed::MixedComplex;
use crate::models::presentation::{AlgebraPresentation, TorusPoint};
use crate::models::semifree::{MPoly, SemifreeModel};
use crate::scalar::{Field, Scalar};
use crate::sparse::{kernel_basis, rank, KernelError, SparseMatrix};
use rayon::prelude::*;
use std::collections::{BTreeMap, HashMap};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BarError {
    #[error("relation `{0}` is not a monomial; the bar complex needs monomial relations")]
    NotMonomial(String),
}

type Mono = Vec<u32>;
type Tuple = Vec<Mono>;

/// Monomial algebra k[x]/(monomials) with weights and aux degrees.
#[derive(Clone, Debug)]
pub struct MonomialAlgebra {
    pub names: Vec<String>,
    pub weights: Vec<Vec<i32>>,
    pub aux: Vec<u32>,
    pub rank: usize,
    forbidden: Vec<Mono>,
}

impl MonomialAlgebra {
    pub fn from_presentation(p: &AlgebraPresentation) -> Result<Self, BarError> {
        let mut forbidden = Vec::new();
        for (f, s) in p.relations.iter().zip(p.relation_strings()) {
            if f.terms.len() != 1 {
                return Err(BarError::NotMonomial(s));
            }
            forbidden.push(f.terms.keys().next().unwrap().clone());
        }
        Ok(MonomialAlgebra {
            names: p.names.clone(),
            weights: p.weights.clone(),
            aux: p.aux.clone(),
            rank: p.rank,
            forbidden,
        })
    }

    fn n(&self) -> usize {
        self.names.len()
    }

    fn is_standard(&self, m: &Mono) -> bool {
        !self.forbidden.iter().any(|f| f.iter().zip(m).all(|(a, b)| a <= b))
    }

    pub fn mul(&self, a: &Mono, b: &Mono) -> Option<Mono> {
        let m: Mono = a.iter().zip(b).map(|(x, y)| x + y).collect();
        self.is_standard(&m).then_some(m)
    }

    pub fn weight(&self, m: &Mono) -> Vec<i32> {
        let mut w = vec![0; self.rank];
        for (i, &e) in m.iter().enumerate() {
            for (x, l) in w.iter_mut().zip(&self.weights[i]) {
                *x += l * e as i32;
            }
        }
        w
    }

    pub fn aux_of(&self, m: &Mono) -> u32 {
        m.iter().zip(&self.aux).map(|(e, a)| e * a).sum()
    }

    /// Standard monomials of aux ≤ cap.
    fn basis(&self, cap: u32) -> Vec<Mono> {
        let mut out = Vec::new();
        let mut cur = vec![0u32; self.n()];
        self.basis_rec(0, cap, &mut cur, &mut out);
        out.sort();
        out
    }

    fn basis_rec(&self, k: usize, left: u32, cur: &mut Mono, out: &mut Vec<Mono>) {
        if k == self.n() {
            if self.is_standard(cur) {
                out.push(cur.clone());
            }
            return;
        }
        for e in 0..=left / self.aux[k] {
            cur[k] = e;
            self.basis_rec(k + 1, left - e * self.aux[k], cur, out);
        }
        cur[k] = 0;
    }

    pub fn label(&self, m: &Mono) -> String {
        let parts: Vec<String> = m
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, &e)| if e == 1 { self.names[i].clone() } else { format!("{}^{}", self.names[i], e) })
            .collect();
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join("*")
        }
    }
}

/// Coefficients of the equivariant version: R = k[t]/t^L at z with w_j = z_j + t_j.
#[derive(Clone, Debug)]
pub struct BarCoeffs {
    pub r: CoeffAlgebra,
    zs: Vec<Scalar>,
    equivariant: bool,
}

impl BarCoeffs {
    pub fn ground() -> Self {
        BarCoeffs { r: CoeffAlgebra::ground(Field::Rational), zs: Vec::new(), equivariant: false }
    }

    pub fn at_point(z: &TorusPoint, level: u32) -> Self {
        BarCoeffs { r: CoeffAlgebra::new(z.rank(), level, "t", 0, z.field()), zs: z.scalars(), equivariant: true }
    }

    /// w^λ, the coaction factor of a monomial of weight λ.
    fn w_pow(&self, lambda: &[i32]) -> CElem {
        if !self.equivariant {
            return self.r.one();
        }
        let mut acc = self.r.one();
        for (j, &l) in lambda.iter().enumerate() {
            let w = self.r.add(&self.r.constant(self.zs[j].clone()), &self.r.var(j));
            acc = self.r.mul(&acc, &self.r.pow(&w, l as i64));
        }
        acc
    }
}

/// One (weight, aux) bin: tuples per level n, unnormalized and normalized.
#[derive(Clone, Debug)]
pub struct BarBin {
    pub tuples: Vec<Vec<Tuple>>,
    pub normalized: Vec<Vec<usize>>,
}

#[derive(Clone, Debug)]
pub struct CyclicLevels {
    pub alg: MonomialAlgebra,
    pub depth: usize,
    pub coeffs: BarCoeffs,
    pub window: Window,
    pub bins: BTreeMap<ColKey, BarBin>,
}

/// A linear combination of tuples with coefficient multipliers.
type Image = Vec<(Tuple, CElem)>;

impl CyclicLevels {
    fn build(alg: MonomialAlgebra, depth: usize, coeffs: BarCoeffs, window: &Window, only_weight_zero: bool) -> Self {
        let cap = window.aux.1;
        let basis = alg.basis(cap);
        let mut bins: BTreeMap<ColKey, BarBin> = BTreeMap::new();
        for n in 0..=depth {
            let mut cur: Tuple = Vec::new();
            let mut found: Vec<Tuple> = Vec::new();
            enum_tuples(&alg, &basis, n + 1, cap, &mut cur, &mut found);
            for t in found {
                let w = t.iter().fold(vec![0; alg.rank], |acc, m| {
                    acc.iter().zip(alg.weight(m)).map(|(a, b)| a + b).collect()
                });
                if only_weight_zero && w.iter().any(|&x| x != 0) {
                    continue;
                }
                let a: u32 = t.iter().map(|m| alg.aux_of(m)).sum();
                let key = ColKey::new(w, a, 0);
                if !window.contains_key(&key) {
                    continue;
                }
                let bin = bins
                    .entry(key)
                    .or_insert_with(|| BarBin { tuples: vec![Vec::new(); depth + 1], normalized: vec![Vec::new(); depth + 1] });
                bin.tuples[n].push(t);
            }
        }
        for bin in bins.values_mut() {
            for n in 0..=depth {
                bin.tuples[n].sort();
                let unit = vec![0u32; alg.n()];
                bin.normalized[n] =
                    (0..bin.tuples[n].len()).filter(|&k| bin.tuples[n][k][1..].iter().all(|m| *m != unit)).collect();
            }
        }
        CyclicLevels { alg, depth, coeffs, window: window.clone(), bins }
    }

    fn unit(&self) -> Mono {
        vec![0; self.alg.n()]
    }

    /// Face d_i on a tuple of length n+1.
    fn face(&self, t: &Tuple, i: usize) -> Image {
        let n = t.len() - 1;
        let r = &self.coeffs.r;
        if i < n {
            match self.alg.mul(&t[i], &t[i + 1]) {
                Some(m) => {
                    let mut out = t[..i].to_vec();
                    out.push(m);
                    out.extend_from_slice(&t[i + 2..]);
                    vec![(out, r.one())]
                }
                None => vec![],
            }
        } else {
            // last face wraps around through the coaction
            match self.alg.mul(&t[n], &t[0]) {
                Some(m) => {
                    let mut out = vec![m];
                    out.extend_from_slice(&t[1..n]);
                    vec![(out, self.coeffs.w_pow(&self.alg.weight(&t[n])))]
                }
                None => vec![],
            }
        }
    }

    fn degeneracy(&self, t: &Tuple, i: usize) -> Image {
        let mut out = t[..=i].to_vec();
        out.push(self.unit());
        out.extend_from_slice(&t[i + 1..]);
        vec![(out, self.coeffs.r.one())]
    }

    fn cyclic(&self, t: &Tuple) -> Image {
        let n = t.len() - 1;
        let mut out = vec![t[n].clone()];
        out.extend_from_slice(&t[..n]);
        vec![(out, self.coeffs.w_pow(&self.alg.weight(&t[n])))]
    }

    /// Matrix of an operator C_n → C_m on the unnormalized basis ⊗ coefficient basis.
    fn op_matrix(&self, key: &ColKey, n: usize, m: usize, op: &dyn Fn(&Tuple) -> Image) -> SparseMatrix {
        let r = &self.coeffs.r;
        let dim = r.dim();
        let src = &self.bins[key].tuples[n];
        let empty = Vec::new();
        let tgt_list = self.bins[key].tuples.get(m).unwrap_or(&empty);
        let idx: HashMap<&Tuple, usize> = tgt_list.iter().enumerate().map(|(i, t)| (t, i)).collect();
        let mut trip = Vec::new();
        for (col, t) in src.iter().enumerate() {
            for (t2, c) in op(t) {
                let row = *idx.get(&t2).unwrap_or_else(|| panic!("operator leaves bin {key}"));
                for b in 0..dim {
                    let mut e = r.zero();
                    e[b] = Scalar::one();
                    for (b2, x) in r.mul(&c, &e).into_iter().enumerate() {
                        if !x.is_zero() {
                            trip.push((row * dim + b2, col * dim + b, x));
                        }
                    }
                }
            }
        }
        SparseMatrix::from_triplets(tgt_list.len() * dim, src.len() * dim, trip)
    }

    pub fn face_matrix(&self, key: &ColKey, n: usize, i: usize) -> SparseMatrix {
        self.op_matrix(key, n, n - 1, &|t| self.face(t, i))
    }

    pub fn degeneracy_matrix(&self, key: &ColKey, n: usize, i: usize) -> SparseMatrix {
        self.op_matrix(key, n, n + 1, &|t| self.degeneracy(t, i))
    }

    pub fn cyclic_matrix(&self, key: &ColKey, n: usize) -> SparseMatrix {
        self.op_matrix(key, n, n, &|t| self.cyclic(t))
    }

    /// b = Σ (−1)^i d_i on C_n.
    pub fn b_matrix(&self, key: &ColKey, n: usize) -> SparseMatrix {
        let mut acc = SparseMatrix::zeros(self.dim_un(key, n - 1), self.dim_un(key, n));
        for i in 0..=n {
            let f = self.face_matrix(key, n, i);
            acc = if i % 2 == 0 { acc.add(&f) } else { acc.sub(&f) };
        }
        acc
    }

    fn dim_un(&self, key: &ColKey, n: usize) -> usize {
        self.bins[key].tuples.get(n).map_or(0, |v| v.len()) * self.coeffs.r.dim()
    }

    /// (1 − λ) s N : C_n → C_{n+1} with λ = (−1)^n t and s the extra degeneracy.
    pub fn connes_unnormalized(&self, key: &ColKey, n: usize) -> SparseMatrix {
        let dn = self.dim_un(key, n);
        let lam = |k: usize| {
            let t = self.cyclic_matrix(key, k);
            if k % 2 == 0 {
                t
            } else {
                t.scaled(&Scalar::int(-1))
            }
        };
        let ln = lam(n);
        let mut nsum = SparseMatrix::identity(dn);
        let mut p = SparseMatrix::identity(dn);
        for _ in 0..n {
            p = ln.mul(&p).unwrap();
            nsum = nsum.add(&p);
        }
        // extra degeneracy: insert 1 in front
        let s = self.op_matrix(key, n, n + 1, &|t| {
            let mut out = vec![self.unit()];
            out.extend_from_slice(t);
            vec![(out, self.coeffs.r.one())]
        });
        let sn = s.mul(&nsum).unwrap();
        sn.sub(&lam(n + 1).mul(&sn).unwrap())
    }

    /// Inclusion of normalized basis into C_n and projection back.
    fn norm_incl(&self, key: &ColKey, n: usize) -> SparseMatrix {
        let dim = self.coeffs.r.dim();
        let nz = &self.bins[key].normalized[n];
        let trip = nz
            .iter()
            .enumerate()
            .flat_map(|(k, &i)| (0..dim).map(move |b| (i * dim + b, k * dim + b, Scalar::one())))
            .collect::<Vec<_>>();
        SparseMatrix::from_triplets(self.dim_un(key, n), nz.len() * dim, trip)
    }

    fn norm_proj(&self, key: &ColKey, n: usize) -> SparseMatrix {
        if n > self.depth {
            return SparseMatrix::zeros(0, 0);
        }
        self.norm_incl(key, n).transpose()
    }

    fn norm_labels(&self, key: &ColKey, n: usize) -> Vec<String> {
        let r = &self.coeffs.r;
        let bin = &self.bins[key];
        let mut out = Vec::new();
        for &i in &bin.normalized[n] {
            let t: Vec<String> = bin.tuples[n][i].iter().map(|m| self.alg.label(m)).collect();
            for b in 0..r.dim() {
                let cl = r.basis_label(b);
                let base = t.join("|");
                out.push(if cl.is_empty() { base } else { format!("{base}*{cl}") });
            }
        }
        out
    }

    /// Identity violations: simplicial, cyclic, b², and the normalized B laws.
    pub fn identity_violations(&self) -> Vec<String> {
        let keys: Vec<&ColKey> = self.bins.keys().collect();
        keys.par_iter()
            .flat_map_iter(|key| {
                let mut bad = Vec::new();
                for n in 0..=self.depth {
                    if self.dim_un(key, n) == 0 {
                        continue;
                    }
                    for j in 0..=n {
                        for i in 0..j {
                            if n >= 2 {
                                let l = self.face_matrix(key, n - 1, i).mul(&self.face_matrix(key, n, j)).unwrap();
                                let r = self.face_matrix(key, n - 1, j - 1).mul(&self.face_matrix(key, n, i)).unwrap();
                                if !l.sub(&r).is_zero() {
                                    bad.push(format!("d{i} d{j} at {} n={n}", key.at(-(n as i32))));
                                }
                            }
                        }
                    }
                    if n < self.depth {
                        for i in 0..=n {
                            let ds = self.face_matrix(key, n + 1, i).mul(&self.degeneracy_matrix(key, n, i)).unwrap();
                            if !ds.sub(&SparseMatrix::identity(self.dim_un(key, n))).is_zero() {
                                bad.push(format!("d{i} s{i} at {} n={n}", key.at(-(n as i32))));
                            }
                        }
                    }
                    let t = self.cyclic_matrix(key, n);
                    let mut p = SparseMatrix::identity(self.dim_un(key, n));
                    for _ in 0..=n {
                        p = t.mul(&p).unwrap();
                    }
                    if !p.sub(&SparseMatrix::identity(self.dim_un(key, n))).is_zero() {
                        bad.push(format!("t^(n+1) at {} n={n}", key.at(-(n as i32))));
                    }
                    if n >= 2 && !self.b_matrix(key, n - 1).mul(&self.b_matrix(key, n)).unwrap().is_zero() {
                        bad.push(format!("b^2 at {} n={n}", key.at(-(n as i32))));
                    }
                }
                bad
            })
            .collect()
    }

    /// Normalized mixed complex (b, B). Bins with aux > depth are open below.
    pub fn connes_b(&self) -> MixedComplex {
        let parts: Vec<(ColKey, Column, Vec<SparseMatrix>)> = self
            .bins
            .par_iter()
            .map(|(key, _)| {
                let top = self.depth;
                let lo = -(top as i32);
                let labels: Vec<Vec<String>> = (0..=top).rev().map(|n| self.norm_labels(key, n)).collect();
                let mut d = Vec::new();
                for n in (1..=top).rev() {
                    let b = self.norm_proj(key, n - 1).mul(&self.b_matrix(key, n)).unwrap().mul(&self.norm_incl(key, n)).unwrap();
                    d.push(b);
                }
                let mut eps = Vec::new();
                for n in (0..=top).rev() {
                    let m = if n < top {
                        self.norm_proj(key, n + 1)
                            .mul(&self.connes_unnormalized(key, n))
                            .unwrap()
                            .mul(&self.norm_incl(key, n))
                            .unwrap()
                    } else {
                        SparseMatrix::zeros(0, labels[0].len())
                    };
                    eps.push(m);
                }
                let mut col = Column::new(lo, labels, d);
                col.open_below = key.aux as usize > self.depth;
                (key.clone(), col, eps)
            })
            .collect();
        let mut g = GradedComplex::new(self.window.clone());
        let mut eps = BTreeMap::new();
        for (k, c, e) in parts {
            eps.insert(k.clone(), e);
            g.columns.insert(k, c);
        }
        MixedComplex { complex: g, eps: Some(eps) }
    }

    /// The HKR map a_0 ⊗ a_1 ⊗ … ⊗ a_n ↦ a_0 da_1 ⋯ da_n / n! into a model whose
    /// generators are the algebra variables followed by their odd partners `eps[i]`,
    /// per bin and per level n, as matrices into the model's bin basis (given by labels).
    pub fn hkr_matrix(
        &self,
        key: &ColKey,
        n: usize,
        model: &SemifreeModel,
        x: &[usize],
        eps: &[usize],
        target_labels: &[String],
    ) -> SparseMatrix {
        let r = &self.coeffs.r;
        let idx: HashMap<&str, usize> = target_labels.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect();
        let bin = &self.bins[key];
        let lift = |m: &Mono| -> MPoly {
            let mut mono = vec![0u32; model.n()];
            for (i, &e) in m.iter().enumerate() {
                mono[x[i]] = e;
            }
            MPoly::from([(mono, model.coeff.one())])
        };
        let dd = |m: &Mono| -> MPoly {
            let mut out = MPoly::new();
            for i in 0..m.len() {
                if m[i] == 0 {
                    continue;
                }
                let mut m2 = m.clone();
                m2[i] -= 1;
                let t = model.poly_mul(&lift(&m2), &model.poly_gen(eps[i]));
                out = model.poly_add(&out, &model.poly_scale(&t, &model.coeff.constant(Scalar::int(m[i] as i64))));
            }
            out
        };
        let fact: i64 = (1..=n as i64).product();
        let mut trip = Vec::new();
        for (k, &i) in bin.normalized[n].iter().enumerate() {
            let t = &bin.tuples[n][i];
            let mut img = lift(&t[0]);
            for m in &t[1..] {
                img = model.poly_mul(&img, &dd(m));
            }
            img = model.poly_scale(&img, &model.coeff.constant(Scalar::rat(1, fact)));
            for b in 0..r.dim() {
                for (mono, c) in &img {
                    let mut e = r.zero();
                    e[b] = Scalar::one();
                    for (b2, v) in r.mul(c, &e).into_iter().enumerate() {
                        if v.is_zero() {
                            continue;
                        }
                        let lab = model.basis_label(mono, b2);
                        let row = *idx.get(lab.as_str()).unwrap_or_else(|| panic!("HKR image {lab} not in target bin"));
                        trip.push((row, k * r.dim() + b, v));
                    }
                }
            }
        }
        SparseMatrix::from_triplets(target_labels.len(), bin.normalized[n].len() * r.dim(), trip)
    }
}

fn enum_tuples(alg: &MonomialAlgebra, basis: &[Mono], len: usize, left: u32, cur: &mut Tuple, out: &mut Vec<Tuple>) {
    if cur.len() == len {
        out.push(cur.clone());
        return;
    }
    for m in basis {
        let a = alg.aux_of(m);
        if a <= left {
            cur.push(m.clone());
            enum_tuples(alg, basis, len, left - a, cur, out);
            cur.pop();
        }
    }
}

/// Plain cyclic bar complex up to simplicial depth N.
pub fn cyclic_bar(p: &AlgebraPresentation, depth: usize, window: &Window) -> Result<CyclicLevels, BarError> {
    Ok(CyclicLevels::build(MonomialAlgebra::from_presentation(p)?, depth, BarCoeffs::ground(), window, false))
}

/// Weight-zero part of (A^{⊗n+1} ⊗ k[G]) with k[G] completed at z to level L.
pub fn equivariant_cyclic_bar(
    p: &AlgebraPresentation,
    z: &TorusPoint,
    level: u32,
    depth: usize,
    window: &Window,
) -> Result<CyclicLevels, BarError> {
    Ok(CyclicLevels::build(MonomialAlgebra::from_presentation(p)?, depth, BarCoeffs::at_point(z, level), window, true))
}

/// Per bin and degree: compare the maps B and ε induced on cohomology, transported
/// along a chain map h from the bar side. Returns violations (bins where no invertible
/// scalar α gives h∘B ≡ α·ε∘h modulo boundaries).
pub fn fit_b_against_eps(
    bar: &MixedComplex,
    model: &MixedComplex,
    hkr: &BTreeMap<(ColKey, i32), SparseMatrix>,
) -> Result<Vec<String>, KernelError> {
    let mut bad = Vec::new();
    for (key, col) in &bar.complex.columns {
        let Some(mcol) = model.complex.columns.get(key) else { continue };
        let beps = bar.eps_of(key).unwrap();
        let meps = model.eps_of(key).unwrap();
        for c in col.lo..=col.hi() {
            if col.is_edge(c) || col.is_edge(c - 1) {
                continue;
            }
            let (Some(h_c), Some(h_c1)) = (hkr.get(&(key.clone(), c)), hkr.get(&(key.clone(), c - 1))) else {
                continue;
            };
            let z = kernel_basis(&col.d_out(c))?;
            if z.is_empty() {
                continue;
            }
            let zm = SparseMatrix::from_columns(col.dim(c), &z);
            let b_out = crate::mixed::eps_out(col, beps, c);
            let e_out = crate::mixed::eps_out(mcol, meps, c);
            let lhs = h_c1.mul(&b_out)?.mul(&zm)?;
            let rhs = e_out.mul(h_c)?.mul(&zm)?;
            let bd = mcol.d_in(c - 1);
            // α from the first column where rhs is nonzero modulo boundaries
            let rb = rank(&bd)?;
            let alpha = (0..rhs.cols()).find_map(|j| {
                let rj = rhs.select_cols(&[j]);
                let lj = lhs.select_cols(&[j]);
                if rank(&rj.hcat(&bd)).ok()? == rb {
                    return None;
                }
                // solve lj ≡ α rj: pick a coordinate where rj is nonzero
                let (r0, _, v) = rj.entries().next()?;
                Some(lj.get(r0, 0).div(v))
            });
            let alpha = alpha.unwrap_or_else(Scalar::one);
            let diff = lhs.sub(&rhs.scaled(&alpha));
            let excess = rank(&diff.hcat(&bd))? - rb;
            let rank_l = rank(&lhs.hcat(&bd))? - rb;
            let rank_r = rank(&rhs.hcat(&bd))? - rb;
            if excess != 0 || rank_l != rank_r || (rank_r > 0 && alpha.is_zero()) {
                bad.push(format!("B vs eps at {}: ranks {rank_l}/{rank_r}, residual {excess}", key.at(c)));
            }
        }
    }
    Ok(bad)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graded::Multidegree;

    fn line(weight: i32) -> AlgebraPresentation {
        AlgebraPresentation::affine(&[vec![weight]])
    }

    fn win(aux: u32) -> Window {
        Window::new((-8, 8), vec![(-10, 10)], aux, 0)
    }

    #[test]
    fn ground_field_bar() {
        let p = AlgebraPresentation::new(1, &[]).unwrap();
        let bar = cyclic_bar(&p, 3, &win(3)).unwrap();
        let t = bar.connes_b().cohomology().unwrap();
        assert_eq!(t.total(), 1);
        assert_eq!(t.get(&Multidegree::new(0, vec![0], 0, 0)), 1);
    }

    #[test]
    fn polynomial_line_hh() {
        let bar = cyclic_bar(&line(1), 4, &win(3)).unwrap();
        assert!(bar.identity_violations().is_empty());
        let mc = bar.connes_b();
        assert!(mc.law_violations().is_empty());
        let t = mc.cohomology().unwrap();
        let rows: Vec<(i32, i32)> = t.nonzero().map(|(m, _)| (m.cohdeg, m.weight[0])).collect();
        assert_eq!(rows, vec![(-1, 1), (-1, 2), (-1, 3), (0, 0), (0, 1), (0, 2), (0, 3)]);
    }

    #[test]
    fn dual_numbers_tail() {
        let mut p = line(1);
        p.add_relation_str("x^2").unwrap();
        let bar = cyclic_bar(&p, 4, &win(4)).unwrap();
        assert!(bar.identity_violations().is_empty());
        let t = bar.connes_b().cohomology().unwrap();
        for n in 0..4 {
            let tot: usize = t.nonzero().filter(|(m, _)| m.cohdeg == -n && !t.is_edge(m)).map(|(_, d)| d).sum();
            assert!(tot > 0, "HH^-{n} vanished");
        }
    }

    #[test]
    fn equivariant_point_is_laurent_level() {
        let p = AlgebraPresentation::new(1, &[]).unwrap();
        let bar = equivariant_cyclic_bar(&p, &TorusPoint::rational(&[2]), 3, 2, &win(2)).unwrap();
        assert!(bar.identity_violations().is_empty());
        let t = bar.connes_b().cohomology().unwrap();
        assert_eq!(t.get(&Multidegree::new(0, vec![0], 0, 0)), 3);
        assert_eq!(t.total(), 3);
    }

    #[test]
    fn equivariant_twisted_cyclic_closes_up() {
        let p = AlgebraPresentation::affine(&[vec![1], vec![-1]]);
        let bar = equivariant_cyclic_bar(&p, &TorusPoint::rational(&[3]), 2, 3, &Window::new((-8, 8), vec![(0, 0)], 2, 0)).unwrap();
        assert!(bar.identity_violations().is_empty());
        assert!(bar.connes_b().law_violations().is_empty());
    }
}
