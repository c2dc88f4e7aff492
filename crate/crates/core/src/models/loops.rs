//! Koszul, loop-space and Cartan models of a presentation.
//!
//! All three share one generator layout: ambient x_i, Koszul η_j for relations,
//! loop variables ε_i (the odd partners of x_i) and θ_j (the even partners of η_j):
//!
//!   dε_i = c(λ_i) x_i,   dη_j = f_j,   dθ_j = c(μ_j) η_j − Σ_i Δ_ij ε_i
//!
//! where c(λ) is w^λ − 1 over the group coefficients (or λ(ξ) in the Cartan model)
//! and Δ_ij is a divided difference with Σ_i Δ_ij c(λ_i) x_i = c(μ_j) f_j.

use super::presentation::AlgebraPresentation;
use super::semifree::{Gen, MPoly, Mono, SemifreeModel};
use crate::coeff::{CElem, CoeffAlgebra};
use crate::models::presentation::TorusPoint;
use crate::poly::Poly;
use crate::scalar::{Field, Scalar};

/// The group directions of a model.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroupCoeffs {
    /// No group: coefficients are the ground field and w ≡ 1.
    Trivial,
    /// k[w^±]/(w − z)^n written as k[t]/t^n with w_j = z_j + t_j.
    AtPoint { z: TorusPoint, n: u32 },
    /// Sym 𝔤* truncated at ξ^n; `topological` gives ξ degree 2.
    Cartan { r: usize, n: u32, topological: bool },
}

impl GroupCoeffs {
    pub fn algebra(&self) -> CoeffAlgebra {
        match self {
            GroupCoeffs::Trivial => CoeffAlgebra::ground(Field::Rational),
            GroupCoeffs::AtPoint { z, n } => CoeffAlgebra::new(z.rank(), *n, "t", 0, z.field()),
            GroupCoeffs::Cartan { r, n, topological } => {
                CoeffAlgebra::new(*r, *n, "xi", if *topological { 2 } else { 0 }, Field::Rational)
            }
        }
    }
}

/// The scalar functions c, s of a character over given coefficients.
pub struct Characters<'a> {
    pub g: &'a GroupCoeffs,
    pub r: &'a CoeffAlgebra,
    zs: Vec<Scalar>,
}

impl<'a> Characters<'a> {
    pub fn new(g: &'a GroupCoeffs, r: &'a CoeffAlgebra) -> Self {
        let zs = match g {
            GroupCoeffs::AtPoint { z, .. } => z.scalars(),
            _ => Vec::new(),
        };
        Characters { g, r, zs }
    }

    fn w_pow(&self, lambda: &[i32]) -> CElem {
        let mut acc = self.r.one();
        for (j, &l) in lambda.iter().enumerate() {
            let w = self.r.add(&self.r.constant(self.zs[j].clone()), &self.r.var(j));
            acc = self.r.mul(&acc, &self.r.pow(&w, l as i64));
        }
        acc
    }

    /// λ·F with F_j = log(w_j / z_j).
    fn log_char(&self, lambda: &[i32]) -> CElem {
        let mut acc = self.r.zero();
        for (j, &l) in lambda.iter().enumerate() {
            let y = self.r.scale(&self.r.var(j), &self.zs[j].inv());
            acc = self.r.add(&acc, &self.r.scale(&self.r.log1p(&y), &Scalar::int(l as i64)));
        }
        acc
    }

    pub fn c(&self, lambda: &[i32]) -> CElem {
        match self.g {
            GroupCoeffs::Trivial => self.r.zero(),
            GroupCoeffs::AtPoint { .. } => self.r.sub(&self.w_pow(lambda), &self.r.one()),
            GroupCoeffs::Cartan { .. } => lambda
                .iter()
                .enumerate()
                .fold(self.r.zero(), |acc, (j, &l)| self.r.add(&acc, &self.r.scale(&self.r.var(j), &Scalar::int(l as i64)))),
        }
    }

    /// The factor in B(x) = s(λ) ε, chosen so that s(λ)·c(λ) = λ·F.
    pub fn s(&self, lambda: &[i32]) -> CElem {
        match self.g {
            GroupCoeffs::AtPoint { z, .. } if lambda.iter().any(|&l| l != 0) => {
                let y = self.c(lambda);
                if z.character_is_one(lambda) {
                    self.r.log1p_over(&y)
                } else {
                    self.r.mul(&self.log_char(lambda), &self.r.inv(&y))
                }
            }
            _ => self.r.one(),
        }
    }

    /// Prefix factor w^{Σ_{j<i} λ_j a_j} and the geometric sum Σ_{k<a} w^{λ k}.
    fn telescoping(&self, weights: &[Vec<i32>], e: &[u32], i: usize) -> CElem {
        let rank = self.r.r;
        let mut pre = vec![0i32; rank];
        for j in 0..i {
            for (p, l) in pre.iter_mut().zip(&weights[j]) {
                *p += l * e[j] as i32;
            }
        }
        let mut geo = self.r.zero();
        for k in 0..e[i] {
            let lk: Vec<i32> = weights[i].iter().map(|l| l * k as i32).collect();
            geo = self.r.add(&geo, &self.w_pow(&lk));
        }
        self.r.mul(&self.w_pow(&pre), &geo)
    }
}

/// Which pieces of the layout to include.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Layout {
    Koszul,
    Loop,
    CartanTopological,
}

pub struct BuiltModel {
    pub model: SemifreeModel,
    /// Index of x_i, η_j, ε_i, θ_j in the model.
    pub x: Vec<usize>,
    pub eta: Vec<usize>,
    pub eps: Vec<usize>,
    pub theta: Vec<usize>,
    /// Relations for which the mixed structure could not be attached.
    pub mixed_obstructions: Vec<String>,
}

fn lift_poly(m: &SemifreeModel, f: &Poly, x: &[usize], coeff: &dyn Fn(&Scalar) -> CElem) -> MPoly {
    let mut out = MPoly::new();
    for (e, c) in &f.terms {
        let mut mono: Mono = vec![0; m.n()];
        for (i, &k) in e.iter().enumerate() {
            mono[x[i]] = k;
        }
        m.poly_add_into(&mut out, mono, coeff(c));
    }
    out
}

fn build(p: &AlgebraPresentation, g: &GroupCoeffs, layout: Layout) -> BuiltModel {
    let r = g.algebra();
    let ch = Characters::new(g, &r);
    let eps_name = |n: &str| match g {
        GroupCoeffs::Cartan { .. } => format!("d{n}"),
        _ => format!("eps_{n}"),
    };
    let (odd_eps, even_theta) = match layout {
        Layout::CartanTopological => (1, 0),
        _ => (-1, -2),
    };
    let mut gens = Vec::new();
    let mut x = Vec::new();
    let mut eta = Vec::new();
    let mut eps = Vec::new();
    let mut theta = Vec::new();
    for i in 0..p.n() {
        x.push(gens.len());
        gens.push(Gen::new(p.names[i].clone(), 0, p.weights[i].clone(), p.aux[i]));
    }
    for j in 0..p.relations.len() {
        let (w, a) = &p.rel_degrees[j];
        eta.push(gens.len());
        gens.push(Gen::new(format!("eta{}", j + 1), -1, w.clone(), *a));
    }
    if layout != Layout::Koszul {
        for i in 0..p.n() {
            eps.push(gens.len());
            gens.push(Gen::new(eps_name(&p.names[i]), odd_eps, p.weights[i].clone(), p.aux[i]));
        }
        for j in 0..p.relations.len() {
            let (w, a) = &p.rel_degrees[j];
            theta.push(gens.len());
            let name = match g {
                GroupCoeffs::Cartan { .. } => format!("deta{}", j + 1),
                _ => format!("theta{}", j + 1),
            };
            gens.push(Gen::new(name, even_theta, w.clone(), *a));
        }
    }
    let mut m = SemifreeModel::new(gens, r.clone(), p.rank);
    let konst = |c: &Scalar| r.constant(c.clone());
    let fs: Vec<MPoly> = p.relations.iter().map(|f| lift_poly(&m, f, &x, &konst)).collect();
    for j in 0..fs.len() {
        m.d[eta[j]] = fs[j].clone();
    }
    let mut obstructions = Vec::new();
    if layout != Layout::Koszul {
        let s: Vec<CElem> = p.weights.iter().map(|l| ch.s(l)).collect();
        for i in 0..p.n() {
            let c = ch.c(&p.weights[i]);
            m.d[eps[i]] = m.poly_mul(&m.poly_const(c), &m.poly_gen(x[i]));
        }
        let mut mixed = vec![MPoly::new(); m.n()];
        for i in 0..p.n() {
            mixed[x[i]] = m.term(s[i].clone(), eps[i]);
        }
        for j in 0..fs.len() {
            let f = &p.relations[j];
            let mu = &p.rel_degrees[j].0;
            let sigma = ch.s(mu);
            let partials: Vec<MPoly> = (0..p.n()).map(|i| lift_poly(&m, &f.derivative(i), &x, &konst)).collect();
            let delta: Vec<MPoly> = if r.is_unit(&sigma) {
                let si = r.inv(&sigma);
                (0..p.n()).map(|i| m.poly_scale(&partials[i], &r.mul(&s[i], &si))).collect()
            } else {
                (0..p.n())
                    .map(|i| {
                        let mut out = MPoly::new();
                        for (e, c) in &f.terms {
                            if e[i] == 0 {
                                continue;
                            }
                            let mut e2 = e.clone();
                            e2[i] -= 1;
                            let mut mono = vec![0; m.n()];
                            for (k, &v) in e2.iter().enumerate() {
                                mono[x[k]] = v;
                            }
                            let coef = r.scale(&ch.telescoping(&p.weights, e, i), c);
                            m.poly_add_into(&mut out, mono, coef);
                        }
                        out
                    })
                    .collect()
            };
            let mut dth = m.poly_mul(&m.poly_const(ch.c(mu)), &m.poly_gen(eta[j]));
            for i in 0..p.n() {
                let t = m.poly_mul(&delta[i], &m.poly_gen(eps[i]));
                dth = m.poly_add(&dth, &m.poly_neg(&t));
            }
            m.d[theta[j]] = dth;
            mixed[eta[j]] = m.term(sigma.clone(), theta[j]);
            let ok = (0..p.n()).all(|i| {
                m.poly_scale(&delta[i], &sigma) == m.poly_scale(&partials[i], &s[i])
            });
            if !ok {
                obstructions.push(p.relation_strings()[j].clone());
            }
        }
        if layout == Layout::CartanTopological {
            // single differential d_Cartan + d_dR
            for k in 0..m.n() {
                m.d[k] = m.poly_add(&m.d[k], &mixed[k]);
            }
        } else if obstructions.is_empty() {
            m.mixed = Some(mixed);
        }
    }
    BuiltModel { model: m, x, eta, eps, theta, mixed_obstructions: obstructions }
}

/// Koszul resolution: x_i and η_j with dη_j = f_j over the ground field.
pub fn koszul_model(p: &AlgebraPresentation) -> BuiltModel {
    build(p, &GroupCoeffs::Trivial, Layout::Koszul)
}

/// Functions on the loop space of X/G before invariants, over the given group coefficients.
/// The mixed structure is attached when it exists; on weight 0 it squares to a complex
/// with d (its failure elsewhere is the weight derivation scaled by log w/z).
pub fn loop_model(p: &AlgebraPresentation, g: &GroupCoeffs) -> BuiltModel {
    build(p, g, Layout::Loop)
}

/// Cartan model over Sym 𝔤*/ξ^n with algebraic grading (Ω^i in cohdeg −i), ε = d_dR.
pub fn cartan_model(p: &AlgebraPresentation, n: u32) -> BuiltModel {
    build(p, &GroupCoeffs::Cartan { r: p.rank, n, topological: false }, Layout::Loop)
}

/// The Cartan complex in topological grading (Ω^i in degree +i, ξ in degree 2) with
/// the single differential d_Cartan + d_dR; a complex on weight 0.
pub fn cartan_topological(p: &AlgebraPresentation, n: u32) -> BuiltModel {
    build(p, &GroupCoeffs::Cartan { r: p.rank, n, topological: true }, Layout::CartanTopological)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graded::{Multidegree, Window};

    fn a1() -> AlgebraPresentation {
        AlgebraPresentation::affine(&[vec![1]])
    }

    fn w0(aux: u32) -> Window {
        Window::new((-8, 8), vec![(0, 0)], aux, 0)
    }

    #[test]
    fn koszul_of_coordinate() {
        let mut p = a1();
        p.add_relation_str("x").unwrap();
        let k = koszul_model(&p);
        let c = k.model.complex(&Window::new((-4, 4), vec![(-5, 5)], 4, 0));
        let t = c.cohomology().unwrap();
        assert_eq!(t.total(), 1);
        assert_eq!(t.get(&Multidegree::new(0, vec![0], 0, 0)), 1);
    }

    #[test]
    fn koszul_of_square() {
        let mut p = a1();
        p.add_relation_str("x^2").unwrap();
        let t = koszul_model(&p).model.complex(&Window::new((-4, 4), vec![(-5, 5)], 4, 0)).cohomology().unwrap();
        let h0: Vec<u32> = t.nonzero().filter(|(m, _)| m.cohdeg == 0).map(|(m, _)| m.aux).collect();
        assert_eq!(h0, vec![0, 1]);
        assert!(t.nonzero().all(|(m, _)| m.cohdeg == 0));
    }

    #[test]
    fn koszul_of_xy() {
        let mut p = AlgebraPresentation::affine(&[vec![1], vec![2]]);
        p.add_relation_str("x*y").unwrap();
        let t = koszul_model(&p).model.complex(&Window::new((-4, 4), vec![(-10, 10)], 5, 0)).cohomology().unwrap();
        assert!(t.nonzero().all(|(m, _)| m.cohdeg == 0));
        // k[x,y]/(xy) has x^a, y^a: aux a ≥ 1 gives two bins
        assert_eq!(t.nonzero().filter(|(m, _)| m.aux == 3).count(), 2);
    }

    #[test]
    fn loop_models_square_to_zero() {
        let mut p = AlgebraPresentation::affine(&[vec![1], vec![2]]);
        p.add_relation_str("x^2*y").unwrap();
        for g in [
            GroupCoeffs::Trivial,
            GroupCoeffs::AtPoint { z: TorusPoint::rational(&[2]), n: 3 },
            GroupCoeffs::AtPoint { z: TorusPoint::rational(&[-1]), n: 3 },
            GroupCoeffs::AtPoint { z: TorusPoint::parse(&["zeta(3)"]).unwrap(), n: 2 },
            GroupCoeffs::Cartan { r: 1, n: 3, topological: false },
        ] {
            let b = loop_model(&p, &g);
            assert!(b.model.d_squared_violations().is_empty(), "{g:?}");
        }
    }

    #[test]
    fn a1_loop_weight_zero_at_two() {
        for n in 1..=4 {
            let b = loop_model(&a1(), &GroupCoeffs::AtPoint { z: TorusPoint::rational(&[2]), n });
            let mc = b.model.complex(&w0(6));
            let t = mc.cohomology().unwrap();
            assert_eq!(t.total(), n as usize);
            assert_eq!(t.get(&Multidegree::new(0, vec![0], 0, 0)), n as usize);
            assert!(mc.law_violations().is_empty());
        }
    }

    #[test]
    fn point_mod_gm_is_laurent() {
        let p = AlgebraPresentation::new(1, &[]).unwrap();
        let b = loop_model(&p, &GroupCoeffs::AtPoint { z: TorusPoint::rational(&[1]), n: 3 });
        let t = b.model.complex(&w0(2)).cohomology().unwrap();
        assert_eq!(t.get(&Multidegree::new(0, vec![0], 0, 0)), 3);
    }

    #[test]
    fn cartan_weight_zero_line() {
        // X = A^1 weight 1: weight 0 is only aux 0, i.e. the ξ-tower
        let b = cartan_model(&a1(), 4);
        let t = b.model.complex(&w0(5)).cohomology().unwrap();
        assert_eq!(t.total(), 4);
        // trivial group: k[x] ⊕ k[x]dx
        let p = AlgebraPresentation::new(0, &[("x", vec![], 1)]).unwrap();
        let t = cartan_model(&p, 1).model.complex(&Window::new((-4, 4), vec![], 3, 0)).cohomology().unwrap();
        let rows: Vec<(i32, u32)> = t.nonzero().map(|(m, _)| (m.cohdeg, m.aux)).collect();
        assert_eq!(rows, vec![(-1, 1), (-1, 2), (-1, 3), (0, 0), (0, 1), (0, 2), (0, 3)]);
    }

    #[test]
    fn mixed_structure_on_weight_zero() {
        let p = AlgebraPresentation::affine(&[vec![1], vec![-1]]);
        let fixed = super::super::presentation::fixed_points(&p, &TorusPoint::rational(&[3]));
        for q in [&p, &fixed] {
            let b = loop_model(q, &GroupCoeffs::AtPoint { z: TorusPoint::rational(&[3]), n: 3 });
            assert!(b.mixed_obstructions.is_empty());
            let mc = b.model.complex(&w0(4));
            assert!(mc.law_violations().is_empty(), "{:?}", mc.law_violations());
        }
    }
}
