//! Mixed complexes and their S¹ constructions as windowed u-series complexes.
//!
//! For a column V with d and ε, the flavors are all quotients of subcomplexes of
//! V((u)) with total differential d + uε; in total degree c the piece is
//! ⊕_p V^{c-2p} u^p over a finite range of p. Each flavor is a strategy in the
//! registry below; finite windows flag the bins the truncation can reach.

use crate::graded::{ColKey, Column, GradedComplex, HilbertTable, Multidegree, Window};
use crate::scalar::Scalar;
use crate::sparse::{column_space, induced_rank, kernel_basis, rank, KernelError, SparseMatrix, SparseVec};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::sync::Arc;

/// Graded complex plus ε, stored per column: eps[k] maps degree lo+k to lo+k-1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MixedComplex {
    pub complex: GradedComplex,
    pub eps: Option<BTreeMap<ColKey, Vec<SparseMatrix>>>,
}

impl MixedComplex {
    pub fn without_eps(complex: GradedComplex) -> Self {
        MixedComplex { complex, eps: None }
    }

    /// ε ≡ 0 on every column.
    pub fn with_zero_eps(complex: GradedComplex) -> Self {
        let eps = complex.columns.iter().map(|(k, c)| (k.clone(), zero_eps(c))).collect();
        MixedComplex { complex, eps: Some(eps) }
    }

    pub fn eps_of(&self, k: &ColKey) -> Option<&Vec<SparseMatrix>> {
        self.eps.as_ref().and_then(|e| e.get(k))
    }

    pub fn weight_component(&self, w: &[i32]) -> MixedComplex {
        let complex = self.complex.weight_component(w);
        let eps = self
            .eps
            .as_ref()
            .map(|e| e.iter().filter(|(k, _)| k.weight == w).map(|(k, v)| (k.clone(), v.clone())).collect());
        MixedComplex { complex, eps }
    }

    /// Structural laws per column: d², ε², dε + εd. Returns named violations.
    pub fn law_violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (k, c) in &self.complex.columns {
            if let Err(e) = c.check_d_squared(k) {
                out.push(format!("d^2 at {e}"));
            }
            if let Some(eps) = self.eps_of(k) {
                out.extend(column_mixed_violations(k, c, eps));
            }
        }
        out
    }

    pub fn cohomology(&self) -> Result<HilbertTable, KernelError> {
        self.complex.cohomology()
    }
}

pub fn zero_eps(c: &Column) -> Vec<SparseMatrix> {
    (c.lo..=c.hi()).map(|i| SparseMatrix::zeros(c.dim(i - 1), c.dim(i))).collect()
}

/// ε out of degree i (possibly empty).
pub fn eps_out(c: &Column, eps: &[SparseMatrix], i: i32) -> SparseMatrix {
    if i >= c.lo && i <= c.hi() && !c.labels.is_empty() {
        eps[(i - c.lo) as usize].clone()
    } else {
        SparseMatrix::zeros(c.dim(i - 1), c.dim(i))
    }
}

fn column_mixed_violations(k: &ColKey, c: &Column, eps: &[SparseMatrix]) -> Vec<String> {
    let mut out = Vec::new();
    if c.labels.is_empty() {
        return out;
    }
    for i in c.lo..=c.hi() {
        let e = eps_out(c, eps, i);
        let ee = eps_out(c, eps, i - 1).mul(&e).expect("ε shapes");
        if !ee.is_zero() {
            out.push(format!("eps^2 at {}", k.at(i)));
        }
        let de = c.d_out(i - 1).mul(&e).expect("shapes");
        let ed = eps_out(c, eps, i + 1).mul(&c.d_out(i)).expect("shapes");
        if !de.add(&ed).is_zero() {
            out.push(format!("d eps + eps d at {}", k.at(i)));
        }
    }
    out
}

// ---------- flavors ----------

/// Range of u-powers; None means unbounded on that side.
pub type PRange = (Option<i32>, Option<i32>);

/// An S¹ construction on a mixed complex, realized inside V((u)).
pub trait S1Flavor: Send + Sync {
    fn name(&self) -> String;
    /// Range of u-powers the flavor really contains.
    fn true_range(&self) -> PRange;
    /// Range actually built for u-window U.
    fn built_range(&self, u: i32) -> (i32, i32);
    /// Whether the flavor needs V bounded below / above to be represented.
    fn needs_bounded(&self) -> (bool, bool) {
        (false, false)
    }
}

pub struct Tate;
pub struct OplusTate;
pub struct ProdTate;
pub struct Invariants;
pub struct Coinvariants;
/// (V[u]/u^n, d + uε).
pub struct InvariantsLevel(pub i32);

impl S1Flavor for Tate {
    fn name(&self) -> String {
        "tate".into()
    }
    fn true_range(&self) -> PRange {
        (None, None)
    }
    fn built_range(&self, u: i32) -> (i32, i32) {
        (-u, u)
    }
}

impl S1Flavor for OplusTate {
    fn name(&self) -> String {
        "oplus-tate".into()
    }
    fn true_range(&self) -> PRange {
        (None, None)
    }
    fn built_range(&self, u: i32) -> (i32, i32) {
        (-u, u)
    }
    fn needs_bounded(&self) -> (bool, bool) {
        (true, false)
    }
}

impl S1Flavor for ProdTate {
    fn name(&self) -> String {
        "prod-tate".into()
    }
    fn true_range(&self) -> PRange {
        (None, None)
    }
    fn built_range(&self, u: i32) -> (i32, i32) {
        (-u, u)
    }
    fn needs_bounded(&self) -> (bool, bool) {
        (false, true)
    }
}

impl S1Flavor for Invariants {
    fn name(&self) -> String {
        "invariants".into()
    }
    fn true_range(&self) -> PRange {
        (Some(0), None)
    }
    fn built_range(&self, u: i32) -> (i32, i32) {
        (0, u)
    }
}

impl S1Flavor for Coinvariants {
    fn name(&self) -> String {
        "coinvariants".into()
    }
    fn true_range(&self) -> PRange {
        (None, Some(0))
    }
    fn built_range(&self, u: i32) -> (i32, i32) {
        (-u, 0)
    }
}

impl S1Flavor for InvariantsLevel {
    fn name(&self) -> String {
        format!("invariants-level-{}", self.0)
    }
    fn true_range(&self) -> PRange {
        (Some(0), Some(self.0 - 1))
    }
    fn built_range(&self, _u: i32) -> (i32, i32) {
        (0, self.0 - 1)
    }
}

/// Flavors by name.
pub struct FlavorRegistry {
    entries: BTreeMap<String, Arc<dyn S1Flavor>>,
}

impl Default for FlavorRegistry {
    fn default() -> Self {
        let mut r = FlavorRegistry { entries: BTreeMap::new() };
        r.register(Arc::new(Tate));
        r.register(Arc::new(OplusTate));
        r.register(Arc::new(ProdTate));
        r.register(Arc::new(Invariants));
        r.register(Arc::new(Coinvariants));
        r
    }
}

impl FlavorRegistry {
    pub fn register(&mut self, f: Arc<dyn S1Flavor>) {
        self.entries.insert(f.name(), f);
    }

    /// Lookup; `invariants-level-<n>` is synthesized on demand.
    pub fn get(&self, name: &str) -> Option<Arc<dyn S1Flavor>> {
        if let Some(f) = self.entries.get(name) {
            return Some(f.clone());
        }
        let n: i32 = name.strip_prefix("invariants-level-")?.parse().ok()?;
        (n >= 1).then(|| Arc::new(InvariantsLevel(n)) as Arc<dyn S1Flavor>)
    }

    pub fn names(&self) -> Vec<String> {
        self.entries.keys().cloned().collect()
    }
}

// ---------- u-series columns ----------

/// Total complex of one column over a range of u-powers.
#[derive(Clone, Debug)]
pub struct UColumn {
    pub plo: i32,
    pub phi: i32,
    /// Per total degree: the (p, offset) blocks, V^{c-2p} placed at offset.
    pub blocks: BTreeMap<i32, Vec<(i32, usize, usize)>>,
    pub d: BTreeMap<i32, SparseMatrix>,
    pub dims: BTreeMap<i32, usize>,
}

impl UColumn {
    pub fn build(col: &Column, eps: &[SparseMatrix], plo: i32, phi: i32, cdeg: (i32, i32)) -> UColumn {
        let mut blocks = BTreeMap::new();
        let mut dims = BTreeMap::new();
        if col.labels.is_empty() || plo > phi {
            return UColumn { plo, phi, blocks, d: BTreeMap::new(), dims };
        }
        let (clo, chi) = (cdeg.0 - 1, cdeg.1 + 1);
        for c in clo..=chi + 1 {
            let mut off = 0;
            let mut v = Vec::new();
            for p in plo..=phi {
                let n = col.dim(c - 2 * p);
                if n > 0 {
                    v.push((p, off, n));
                    off += n;
                }
            }
            dims.insert(c, off);
            blocks.insert(c, v);
        }
        let mut d = BTreeMap::new();
        for c in clo..=chi {
            let src = &blocks[&c];
            let tgt = &blocks[&(c + 1)];
            let find = |p: i32| tgt.iter().find(|b| b.0 == p).map(|b| b.1);
            let mut trip = Vec::new();
            for &(p, off, _) in src {
                let i = c - 2 * p;
                if let Some(toff) = find(p) {
                    for (r, cc, x) in col.d_out(i).entries() {
                        trip.push((toff + r, off + cc, x.clone()));
                    }
                }
                if let Some(toff) = find(p + 1) {
                    for (r, cc, x) in eps_out(col, eps, i).entries() {
                        trip.push((toff + r, off + cc, x.clone()));
                    }
                }
            }
            d.insert(c, SparseMatrix::from_triplets(dims[&(c + 1)], dims[&c], trip));
        }
        UColumn { plo, phi, blocks, d, dims }
    }

    pub fn d_out(&self, c: i32) -> &SparseMatrix {
        &self.d[&c]
    }

    pub fn d_in(&self, c: i32) -> &SparseMatrix {
        &self.d[&(c - 1)]
    }

    /// First coordinate with u-power >= p in total degree c.
    fn filtration_start(&self, c: i32, p: i32) -> usize {
        self.blocks[&c].iter().find(|b| b.0 >= p).map_or(self.dims[&c], |b| b.1)
    }

    /// dim gr^p H^c for each p with nonzero value. Blocks are laid out by increasing p,
    /// so F^p is a coordinate suffix; with echelon bases of cycles Z and boundaries B,
    /// dim F^p H = #{Z leads in the suffix} − #{B leads in the suffix}.
    pub fn graded_cohomology(&self, c: i32) -> Result<BTreeMap<i32, usize>, KernelError> {
        let dd = self.d_out(c).mul(self.d_in(c))?;
        if !dd.is_zero() {
            return Err(KernelError::NotAComplex { bin: format!("u-series total degree {c}"), nonzero: dd.nnz() });
        }
        let z = kernel_basis(self.d_out(c))?;
        let b = column_space(self.d_in(c))?;
        let count = |vs: &[SparseVec], k: usize| vs.iter().filter(|v| v[0].0 >= k).count();
        let f = |p: i32| {
            let k = self.filtration_start(c, p);
            count(&z, k) - count(&b, k)
        };
        let mut out = BTreeMap::new();
        for p in self.plo..=self.phi {
            let g = f(p) - f(p + 1);
            if g > 0 {
                out.insert(p, g);
            }
        }
        Ok(out)
    }

    /// The chain map of multiplication by u from degree c to c+2.
    pub fn u_map(&self, c: i32) -> SparseMatrix {
        let src = &self.blocks[&c];
        let tgt = &self.blocks[&(c + 2)];
        let mut trip = Vec::new();
        for &(p, off, n) in src {
            if let Some(&(_, toff, _)) = tgt.iter().find(|b| b.0 == p + 1) {
                for k in 0..n {
                    trip.push((toff + k, off + k, Scalar::one()));
                }
            }
        }
        SparseMatrix::from_triplets(self.dims[&(c + 2)], self.dims[&c], trip)
    }
}

/// Matrix in total degree c of the map induced by per-cohdeg maps `f` of the columns.
pub fn useries_map(src: &UColumn, tgt: &UColumn, f: &BTreeMap<i32, SparseMatrix>, c: i32) -> SparseMatrix {
    let mut trip = Vec::new();
    for &(p, off, _) in &src.blocks[&c] {
        let Some(&(_, toff, _)) = tgt.blocks[&c].iter().find(|b| b.0 == p) else { continue };
        if let Some(m) = f.get(&(c - 2 * p)) {
            for (r, cc, x) in m.entries() {
                trip.push((toff + r, off + cc, x.clone()));
            }
        }
    }
    SparseMatrix::from_triplets(tgt.dims[&c], src.dims[&c], trip)
}

/// p-range of V^{c-2p} nonzero for a column [lo, hi].
fn support(lo: i32, hi: i32, c: i32) -> (i32, i32) {
    ((c - hi).div_euclid(2) + i32::from((c - hi).rem_euclid(2) != 0), (c - lo).div_euclid(2))
}

/// Whether the built window represents the flavor exactly in total degree c.
fn exact_at(col: &Column, f: &dyn S1Flavor, built: (i32, i32), c: i32) -> bool {
    if col.labels.is_empty() {
        return true;
    }
    let (bl, ba) = f.needs_bounded();
    if (bl && col.open_below) || (ba && col.open_above) {
        return false;
    }
    let (tl, th) = f.true_range();
    for cc in [c - 1, c, c + 1] {
        let (mut a, mut b) = support(col.lo, col.hi(), cc);
        if let Some(t) = tl {
            a = a.max(t);
        }
        if let Some(t) = th {
            b = b.min(t);
        }
        if a > b {
            continue;
        }
        // degrees touching an open end of V are not trustworthy either
        let touches_open = (a..=b).any(|p| col.is_edge(cc - 2 * p));
        if a < built.0 || b > built.1 || touches_open {
            return false;
        }
    }
    true
}

/// Result of applying a flavor to a mixed complex.
#[derive(Clone, Debug)]
pub struct USeriesResult {
    pub flavor: String,
    pub table: HilbertTable,
    pub columns: BTreeMap<ColKey, UColumn>,
    /// Boundedness of V inside the window: (below, above).
    pub bounded: (bool, bool),
}

pub fn apply_flavor(v: &MixedComplex, f: &dyn S1Flavor, window: &Window) -> Result<USeriesResult, KernelError> {
    let eps_all = v.eps.as_ref().expect("flavor needs a mixed structure");
    let u = window.upow.1;
    let built = f.built_range(u);
    let cdeg = window.cohdeg;
    let parts: Vec<Result<(ColKey, UColumn, HilbertTable), KernelError>> = v
        .complex
        .columns
        .par_iter()
        .map(|(k, col)| {
            let uc = UColumn::build(col, &eps_all[k], built.0, built.1, cdeg);
            let mut t = HilbertTable::default();
            for c in cdeg.0..=cdeg.1 {
                if col.labels.is_empty() {
                    continue;
                }
                let exact = exact_at(col, f, built, c);
                let gr = uc.graded_cohomology(c)?;
                for (p, dim) in &gr {
                    let key = Multidegree::new(c, k.weight.clone(), k.aux, *p);
                    t.set(key.clone(), *dim);
                    if !exact {
                        t.mark_edge(key);
                    }
                }
                if !exact {
                    // flag the whole total degree even where nothing survived
                    for p in built.0..=built.1 {
                        t.mark_edge(Multidegree::new(c, k.weight.clone(), k.aux, p));
                    }
                }
            }
            Ok((k.clone(), uc, t))
        })
        .collect();
    let mut table = HilbertTable::default();
    let mut columns = BTreeMap::new();
    for part in parts {
        let (k, uc, t) = part?;
        for (m, d) in t.nonzero() {
            table.set(m.clone(), *d);
        }
        for m in t.edges() {
            table.mark_edge(m.clone());
        }
        columns.insert(k, uc);
    }
    let bounded = (
        v.complex.columns.values().all(|c| !c.open_below),
        v.complex.columns.values().all(|c| !c.open_above),
    );
    Ok(USeriesResult { flavor: f.name(), table, columns, bounded })
}

/// Tables summed over u-power: the plain total-degree view.
pub fn collapse_upow(t: &HilbertTable) -> HilbertTable {
    t.rekey(|m| Multidegree::new(m.cohdeg, m.weight.clone(), m.aux, 0))
}

/// (d + uε)² = 0 on every built u-column.
pub fn useries_violations(r: &USeriesResult) -> Vec<String> {
    let mut out = Vec::new();
    for (k, uc) in &r.columns {
        for (c, m) in &uc.d {
            if let Some(next) = uc.d.get(&(c + 1)) {
                if !next.mul(m).expect("shapes").is_zero() {
                    out.push(format!("(d+u eps)^2 at {} flavor {}", k.at(*c), r.flavor));
                }
            }
        }
    }
    out
}

/// u: H^c → H^{c+2} must be bijective whenever both degrees are non-edge.
pub fn connes_periodicity_check(v: &MixedComplex, window: &Window) -> Result<Vec<String>, KernelError> {
    let r = apply_flavor(v, &Tate, window)?;
    let mut bad = Vec::new();
    for (k, uc) in &r.columns {
        let col = &v.complex.columns[k];
        if col.labels.is_empty() {
            continue;
        }
        for c in window.cohdeg.0..=window.cohdeg.1 - 2 {
            let ok_c = (r.table.edges()).all(|m| !(m.cohdeg == c && k.weight == m.weight && k.aux == m.aux));
            let ok_c2 = (r.table.edges()).all(|m| !(m.cohdeg == c + 2 && k.weight == m.weight && k.aux == m.aux));
            if !ok_c || !ok_c2 {
                continue;
            }
            let h1: usize = uc.graded_cohomology(c)?.values().sum();
            let h2: usize = uc.graded_cohomology(c + 2)?.values().sum();
            let rk = induced_rank(&uc.u_map(c), uc.d_out(c), uc.d_in(c + 2))?;
            if !(h1 == h2 && rk == h1) {
                bad.push(format!("u-map at {} : {h1} -> {h2} rank {rk}", k.at(c)));
            }
        }
    }
    Ok(bad)
}

/// Both clauses of the Tate comparison for bounded V, on non-edge bins.
pub fn tate_prod_check(v: &MixedComplex, window: &Window) -> Result<Vec<String>, KernelError> {
    let tate = apply_flavor(v, &Tate, window)?;
    let mut bad = Vec::new();
    if tate.bounded.0 {
        let o = apply_flavor(v, &OplusTate, window)?;
        for (m, a, b) in tate.table.diff_non_edge(&o.table) {
            bad.push(format!("oplus-tate differs from tate at {m}: {a} vs {b}"));
        }
    }
    if tate.bounded.1 {
        let p = apply_flavor(v, &ProdTate, window)?;
        for (m, a, b) in tate.table.diff_non_edge(&p.table) {
            bad.push(format!("prod-tate differs from tate at {m}: {a} vs {b}"));
        }
    }
    Ok(bad)
}

// ---------- presets ----------

fn single_column(lo: i32, dims: &[usize], d: Vec<SparseMatrix>, eps: Vec<SparseMatrix>, window: &Window) -> MixedComplex {
    let labels: Vec<Vec<String>> =
        dims.iter().enumerate().map(|(k, &n)| (0..n).map(|j| format!("e{}_{j}", lo + k as i32)).collect()).collect();
    let mut g = GradedComplex::new(window.clone());
    let key = ColKey::new(vec![0; window.weight.len()], 0, 0);
    g.insert(key.clone(), Column::new(lo, labels, d));
    MixedComplex { complex: g, eps: Some(BTreeMap::from([(key, eps)])) }
}

/// k in degree 0 with ε = 0.
pub fn point_mixed(window: &Window) -> MixedComplex {
    single_column(0, &[1], vec![], vec![SparseMatrix::zeros(0, 1)], window)
}

/// k ⊕ k[-1]: degree 0 and 1 with d = 0 and ε the identity from degree 1 to 0.
pub fn circle_cone(window: &Window) -> MixedComplex {
    single_column(
        0,
        &[1, 1],
        vec![SparseMatrix::zeros(1, 1)],
        vec![SparseMatrix::zeros(0, 1), SparseMatrix::identity(1)],
        window,
    )
}

/// The B𝔾ₐ presets: k[x, η] with |x| = 0, |η| = 1, d = 0 and ε = x ∂/∂η.
/// x and η have weight -1 and aux 1. With `truncate = Some(D)` x^D = 0 (the
/// completed side), and the bins reaching the truncation are open.
pub fn bga_preset(truncate: Option<u32>, window: &Window) -> MixedComplex {
    let mut g = GradedComplex::new(window.clone());
    let mut eps = BTreeMap::new();
    for a in window.aux.0..=window.aux.1 {
        let key = ColKey::new(vec![-(a as i32)], a, 0);
        let has_x = truncate.map_or(true, |d| a < d);
        let has_eta = a >= 1 && truncate.map_or(true, |d| a - 1 < d);
        let l0: Vec<String> = if has_x { vec![format!("x^{a}")] } else { vec![] };
        let l1: Vec<String> = if has_eta { vec![format!("x^{}*eta", a - 1)] } else { vec![] };
        let (n0, n1) = (l0.len(), l1.len());
        let col_eps = if n0 == 1 && n1 == 1 { SparseMatrix::identity(1) } else { SparseMatrix::zeros(n0, n1) };
        let mut col = Column::new(0, vec![l0, l1], vec![SparseMatrix::zeros(n1, n0)]);
        if truncate.is_some_and(|d| a >= d) {
            col.open_below = true;
            col.open_above = true;
        }
        if window.contains_key(&key) {
            eps.insert(key.clone(), vec![SparseMatrix::zeros(0, n0), col_eps]);
            g.insert(key, col);
        }
    }
    MixedComplex { complex: g, eps: Some(eps) }
}

/// Dimension of the fiber at x = 1 of the x-direction of a B𝔾ₐ preset, computed as the
/// cokernel of multiplication by (x - 1) on functions of aux < cap.
pub fn bga_fiber_at_one(truncate: Option<u32>, cap: u32) -> Result<usize, KernelError> {
    // source k[x]_{<cap}, target k[x]_{<cap+1} (or k[x]/x^D for the truncated side)
    let (ns, nt) = match truncate {
        None => (cap as usize, cap as usize + 1),
        Some(d) => (d as usize, d as usize),
    };
    let mut trip = Vec::new();
    for j in 0..ns {
        trip.push((j, j, Scalar::int(-1)));
        if j + 1 < nt {
            trip.push((j + 1, j, Scalar::one()));
        }
    }
    let m = SparseMatrix::from_triplets(nt, ns, trip);
    Ok(nt - rank(&m)?)
}

/// Random small mixed complex on one column: a sum of standard blocks conjugated
/// by random invertible changes of basis in each degree.
pub fn random_mixed(seed: u64, window: &Window) -> MixedComplex {
    let mut rng = StdRng::seed_from_u64(seed);
    let lo = rng.gen_range(-2..=0);
    let len = rng.gen_range(2..=4usize);
    let mut dims = vec![0usize; len];
    // (kind, degree offset): 0 = lone k, 1 = d-pair, 2 = ε-pair, 3 = square
    let mut blocks: Vec<(u8, usize, usize)> = Vec::new(); // (kind, degree, first index)
    for _ in 0..rng.gen_range(1..=5) {
        let kind = rng.gen_range(0..4u8);
        let i = rng.gen_range(0..len);
        let ok = match kind {
            0 => true,
            1 => i + 1 < len,
            2 => i >= 1,
            _ => i >= 1 && i + 1 < len,
        };
        if !ok {
            continue;
        }
        blocks.push((kind, i, 0));
    }
    // assign indices
    let mut d_trip: Vec<Vec<(usize, usize, Scalar)>> = vec![Vec::new(); len];
    let mut e_trip: Vec<Vec<(usize, usize, Scalar)>> = vec![Vec::new(); len];
    let take = |dims: &mut Vec<usize>, i: usize| {
        dims[i] += 1;
        dims[i] - 1
    };
    for (kind, i, _) in &blocks {
        let i = *i;
        match kind {
            0 => {
                take(&mut dims, i);
            }
            1 => {
                let a = take(&mut dims, i);
                let b = take(&mut dims, i + 1);
                d_trip[i].push((b, a, Scalar::one()));
            }
            2 => {
                let a = take(&mut dims, i);
                let b = take(&mut dims, i - 1);
                e_trip[i].push((b, a, Scalar::one()));
            }
            _ => {
                // a in i; εa = b in i-1; da = c in i+1; db = e in i; εc = -e
                let a = take(&mut dims, i);
                let b = take(&mut dims, i - 1);
                let c = take(&mut dims, i + 1);
                let e = take(&mut dims, i);
                e_trip[i].push((b, a, Scalar::one()));
                d_trip[i].push((c, a, Scalar::one()));
                d_trip[i - 1].push((e, b, Scalar::one()));
                e_trip[i + 1].push((e, c, Scalar::int(-1)));
            }
        }
    }
    let mut d: Vec<SparseMatrix> = (0..len.saturating_sub(1))
        .map(|i| SparseMatrix::from_triplets(dims[i + 1], dims[i], d_trip[i].clone()))
        .collect();
    let mut eps: Vec<SparseMatrix> = (0..len)
        .map(|i| SparseMatrix::from_triplets(if i == 0 { 0 } else { dims[i - 1] }, dims[i], e_trip[i].clone()))
        .collect();
    // conjugate by g_i = unipotent with small random entries, both ways
    let mut g = Vec::new();
    let mut ginv = Vec::new();
    for &n in &dims {
        let mut trip = Vec::new();
        for r in 0..n {
            trip.push((r, r, Scalar::one()));
            for c in r + 1..n {
                let v = rng.gen_range(-2..=2i64);
                if v != 0 {
                    trip.push((r, c, Scalar::int(v)));
                }
            }
        }
        let m = SparseMatrix::from_triplets(n, n, trip);
        ginv.push(unipotent_inverse(&m));
        g.push(m);
    }
    for i in 0..d.len() {
        d[i] = g[i + 1].mul(&d[i]).unwrap().mul(&ginv[i]).unwrap();
    }
    for i in 1..len {
        eps[i] = g[i - 1].mul(&eps[i]).unwrap().mul(&ginv[i]).unwrap();
    }
    single_column(lo, &dims, d, eps, window)
}

/// Inverse of an upper unitriangular matrix by back substitution.
fn unipotent_inverse(m: &SparseMatrix) -> SparseMatrix {
    let n = m.rows();
    let mut inv: Vec<Vec<Scalar>> = vec![vec![Scalar::zero(); n]; n];
    for c in 0..n {
        for r in (0..n).rev() {
            let mut s = if r == c { Scalar::one() } else { Scalar::zero() };
            for k in r + 1..n {
                s = &s - &(&m.get(r, k) * &inv[k][c]);
            }
            inv[r][c] = s;
        }
    }
    SparseMatrix::from_dense(&inv)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn win(u: i32) -> Window {
        Window::new((-6, 6), vec![(-10, 10)], 8, u)
    }

    fn by_total(t: &HilbertTable) -> BTreeMap<i32, usize> {
        let mut out = BTreeMap::new();
        for (m, d) in t.nonzero() {
            if !t.is_edge(m) {
                *out.entry(m.cohdeg).or_insert(0) += d;
            }
        }
        out
    }

    #[test]
    fn invariants_of_point_level_three() {
        let v = point_mixed(&win(4));
        let r = apply_flavor(&v, &InvariantsLevel(3), &win(4)).unwrap();
        let got: Vec<(i32, i32, usize)> = r.table.nonzero().map(|(m, d)| (m.cohdeg, m.upow, *d)).collect();
        assert_eq!(got, vec![(0, 0, 1), (2, 1, 1), (4, 2, 1)]);
    }

    #[test]
    fn level_one_recovers_v() {
        let w = win(2);
        let v = bga_preset(None, &w);
        let r = apply_flavor(&v, &InvariantsLevel(1), &w).unwrap();
        assert_eq!(collapse_upow(&r.table), v.cohomology().unwrap());
    }

    #[test]
    fn circle_cone_levels() {
        // level n: degree 0 survives only at u^{n-1}... brute force gives H^0 = 1, H^{2n-1}.. none
        let w = win(6);
        let v = circle_cone(&w);
        for n in 1..=3 {
            let r = apply_flavor(&v, &InvariantsLevel(n), &w).unwrap();
            let t = by_total(&r.table);
            // frozen from a dense hand elimination: k in degree 0 and k in degree 2n-1
            let mut expect = BTreeMap::from([(0, 1)]);
            if 2 * n - 1 <= 6 {
                expect.insert(2 * n - 1, 1);
            }
            assert_eq!(t, expect, "level {n}");
        }
    }

    #[test]
    fn tate_of_zero_eps_is_two_periodic_spread() {
        let w = win(4);
        let v = point_mixed(&w);
        let r = apply_flavor(&v, &Tate, &w).unwrap();
        for c in -6..=6 {
            let m = Multidegree::new(c, vec![0], 0, c.div_euclid(2));
            assert_eq!(r.table.get(&m), usize::from(c % 2 == 0), "degree {c}");
        }
        assert!(connes_periodicity_check(&v, &w).unwrap().is_empty());
    }

    #[test]
    fn bga_tate_even_pattern() {
        let w = Window::new((-6, 6), vec![(-10, 10)], 6, 4);
        for trunc in [None, Some(4)] {
            let v = bga_preset(trunc, &w);
            assert!(v.law_violations().is_empty());
            let r = apply_flavor(&v, &Tate, &w).unwrap();
            let t = by_total(&r.table);
            let expect: BTreeMap<i32, usize> = (-3..=3).map(|p| (2 * p, 1)).collect();
            assert_eq!(t, expect);
            assert!(connes_periodicity_check(&v, &w).unwrap().is_empty());
        }
    }

    #[test]
    fn bga_fiber_certificate() {
        assert_eq!(bga_fiber_at_one(None, 5).unwrap(), 1);
        assert_eq!(bga_fiber_at_one(Some(5), 5).unwrap(), 0);
    }

    #[test]
    fn registry_lookup() {
        let r = FlavorRegistry::default();
        assert_eq!(r.names().len(), 5);
        assert_eq!(r.get("invariants-level-3").unwrap().built_range(9), (0, 2));
        assert!(r.get("nope").is_none());
    }

    #[test]
    fn random_complexes_obey_laws() {
        let w = win(3);
        for seed in 0..20 {
            let v = random_mixed(seed, &w);
            assert!(v.law_violations().is_empty(), "seed {seed}");
            let r = apply_flavor(&v, &Tate, &w).unwrap();
            assert!(useries_violations(&r).is_empty());
            assert!(tate_prod_check(&v, &w).unwrap().is_empty());
        }
    }
}
