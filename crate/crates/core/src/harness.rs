//! Both sides of the localization statements on concrete instances, compared as
//! truncated Hilbert tables plus the rank of the induced comparison map.

use crate::completion::{chain_map_violations, model_map, pro_graded_compare, tower_of_models, BinMaps, LoopTower};
use crate::graded::{ColKey, HilbertTable, Multidegree, Window};
use crate::mixed::{apply_flavor, bga_fiber_at_one, bga_preset, useries_map, FlavorRegistry, MixedComplex, S1Flavor, Tate};
use crate::models::loops::{cartan_topological, loop_model, BuiltModel, Characters, GroupCoeffs};
use crate::models::presentation::{fixed_points, moving_coordinates, AlgebraPresentation, TorusPoint};
use crate::models::semifree::{MPoly, SemifreeModel};
use crate::models::stabilizers::{containment_on_sample, localization_open_set, stabilizer_subgroups};
use crate::scalar::Scalar;
use crate::sparse::{induced_rank, KernelError, SparseMatrix};
use std::collections::BTreeMap;
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Verdict {
    Pass,
    Inconclusive,
    Fail,
}

impl Verdict {
    /// FAIL dominates INCONCLUSIVE dominates PASS.
    pub fn and(self, other: Verdict) -> Verdict {
        self.max(other)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Inconclusive => "INCONCLUSIVE",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Truncation {
    pub aux_max: u32,
    pub tower_levels: u32,
    pub bar_depth: u32,
    pub u_window: i32,
    pub cohdeg: (i32, i32),
}

impl Default for Truncation {
    fn default() -> Self {
        Truncation { aux_max: 4, tower_levels: 4, bar_depth: 5, u_window: 4, cohdeg: (-6, 6) }
    }
}

#[derive(Clone, Debug)]
pub struct LocalizationInstance {
    pub p: AlgebraPresentation,
    pub z: TorusPoint,
    pub trunc: Truncation,
    /// Generator of the loop model whose differential is replaced by zero (negative control).
    pub corrupt: Option<String>,
}

impl LocalizationInstance {
    pub fn new(p: AlgebraPresentation, z: TorusPoint, trunc: Truncation) -> Self {
        LocalizationInstance { p, z, trunc, corrupt: None }
    }

    fn weight0_window(&self) -> Window {
        Window::new(self.trunc.cohdeg, vec![(0, 0); self.p.rank], self.trunc.aux_max, self.trunc.u_window)
    }

    /// Every weight reachable within the aux cap.
    fn full_window(&self) -> Window {
        let m = self.p.weights.iter().flatten().map(|w| w.unsigned_abs()).max().unwrap_or(0) as i32;
        let b = m * self.trunc.aux_max as i32;
        Window::new(self.trunc.cohdeg, vec![(-b, b); self.p.rank], self.trunc.aux_max, self.trunc.u_window)
    }

    fn echo(&self) -> Vec<String> {
        let mut v = Vec::new();
        for i in 0..self.p.n() {
            v.push(format!("generator {} weight {:?} aux {}", self.p.names[i], self.p.weights[i], self.p.aux[i]));
        }
        for r in self.p.relation_strings() {
            v.push(format!("relation {r}"));
        }
        v.push(format!("point {}", self.z));
        let t = &self.trunc;
        v.push(format!(
            "truncation aux_max={} tower_levels={} bar_depth={} u_window={} cohdeg=[{},{}]",
            t.aux_max, t.tower_levels, t.bar_depth, t.u_window, t.cohdeg.0, t.cohdeg.1
        ));
        if let Some(g) = &self.corrupt {
            v.push(format!("corrupted differential of {g}"));
        }
        v
    }

    fn corrupt_model(&self, b: &mut BuiltModel) {
        if let Some(i) = self.corrupt.as_deref().and_then(|g| b.model.index_of(g)) {
            b.model.d[i] = MPoly::new();
        }
    }

    fn lhs_tower(&self, window: &Window) -> LoopTower {
        let models = (1..=self.trunc.tower_levels)
            .map(|n| {
                let mut b = loop_model(&self.p, &GroupCoeffs::AtPoint { z: self.z.clone(), n });
                self.corrupt_model(&mut b);
                b
            })
            .collect();
        tower_of_models(models, window)
    }

    fn rhs_tower(&self, window: &Window) -> LoopTower {
        let f = fixed_points(&self.p, &self.z);
        let models = (1..=self.trunc.tower_levels)
            .map(|n| loop_model(&f, &GroupCoeffs::AtPoint { z: self.z.clone(), n }))
            .collect();
        tower_of_models(models, window)
    }
}

/// Structured text report of one check.
#[derive(Clone, Debug)]
pub struct Report {
    pub check: String,
    pub lines: Vec<String>,
    pub verdict: Verdict,
    pub reasons: Vec<String>,
}

impl Report {
    fn new(check: &str, echo: Vec<String>) -> Self {
        Report { check: check.into(), lines: echo, verdict: Verdict::Pass, reasons: Vec::new() }
    }

    fn fail(&mut self, why: impl Into<String>) {
        self.verdict = self.verdict.and(Verdict::Fail);
        self.reasons.push(why.into());
    }

    fn inconclusive(&mut self, why: impl Into<String>) {
        self.verdict = self.verdict.and(Verdict::Inconclusive);
        self.reasons.push(why.into());
    }

    fn table(&mut self, title: &str, t: &HilbertTable) {
        self.lines.push(format!("table {title}"));
        self.lines.extend(t.serialize().lines().map(|l| format!("  {l}")));
    }

    pub fn render(&self) -> String {
        let mut s = format!("check {}\n", self.check);
        for l in &self.lines {
            s.push_str(l);
            s.push('\n');
        }
        for r in &self.reasons {
            s.push_str(&format!("reason {r}\n"));
        }
        s.push_str(&format!("verdict {}\n", self.verdict));
        s
    }

    /// Kernel failures that mean "not a complex" are a FAIL naming the bin; others propagate.
    fn absorb<T>(&mut self, r: Result<T, KernelError>) -> Result<Option<T>, KernelError> {
        match r {
            Ok(x) => Ok(Some(x)),
            Err(KernelError::NotAComplex { bin, nonzero }) => {
                self.fail(format!("not a complex at {bin} ({nonzero} nonzero entries in d^2)"));
                Ok(None)
            }
            Err(e) => Err(e),
        }
    }
}

fn map_at(f: &BinMaps, key: &ColKey, c: i32, rows: usize, cols: usize) -> SparseMatrix {
    f.get(key).and_then(|m| m.get(&c)).cloned().unwrap_or_else(|| SparseMatrix::zeros(rows, cols))
}

/// Bins where the induced map is not an isomorphism between the two (non-edge) tables.
fn iso_deficits(
    src: &MixedComplex,
    tgt: &MixedComplex,
    f: &BinMaps,
    ts: &HilbertTable,
    tt: &HilbertTable,
    cohdeg: (i32, i32),
) -> Result<Vec<String>, KernelError> {
    let mut bad = Vec::new();
    let keys: std::collections::BTreeSet<&ColKey> =
        src.complex.columns.keys().chain(tgt.complex.columns.keys()).collect();
    for key in keys {
        for c in cohdeg.0..=cohdeg.1 {
            let m = key.at(c);
            if ts.is_edge(&m) || tt.is_edge(&m) {
                continue;
            }
            let (hs, ht) = (ts.get(&m), tt.get(&m));
            if hs == 0 && ht == 0 {
                continue;
            }
            let r = match (src.complex.columns.get(key), tgt.complex.columns.get(key)) {
                (Some(sc), Some(tc)) => {
                    let fm = map_at(f, key, c, tc.dim(c), sc.dim(c));
                    induced_rank(&fm, &sc.d_out(c), &tc.d_in(c))?
                }
                _ => 0,
            };
            if r != hs || r != ht {
                bad.push(format!("map at {m}: rank {r} between dims {hs} and {ht}"));
            }
        }
    }
    Ok(bad)
}

/// Whether some (column, total degree) of the table is decided inside the window.
fn has_decided_bin(v: &MixedComplex, t: &HilbertTable, cohdeg: (i32, i32), plo: i32) -> bool {
    v.complex.columns.iter().any(|(k, col)| {
        !col.labels.is_empty()
            && (cohdeg.0..=cohdeg.1).any(|c| !t.is_edge(&Multidegree::new(c, k.weight.clone(), k.aux, plo)))
    })
}

fn edge_list(t: &HilbertTable) -> String {
    let e: Vec<String> = t.edges().take(8).map(|m| m.to_string()).collect();
    let more = t.edges().count().saturating_sub(8);
    if more > 0 {
        format!("{} (+{more} more)", e.join(", "))
    } else {
        e.join(", ")
    }
}

/// Inclusion of the loop model into that of the fixed locus, generator by name.
fn inclusion_images(src: &SemifreeModel, tgt: &SemifreeModel) -> Vec<MPoly> {
    (0..src.n())
        .map(|i| {
            let j = tgt.index_of(&src.gens[i].name).expect("fixed-locus model contains every generator");
            tgt.poly_gen(j)
        })
        .collect()
}

fn inclusion_maps(lhs: &LoopTower, rhs: &LoopTower, window: &Window) -> Vec<BinMaps> {
    let id = |c: &Vec<Scalar>| c.clone();
    lhs.models
        .iter()
        .zip(&rhs.models)
        .zip(&lhs.tower.levels)
        .map(|((l, r), lc)| model_map(&l.model, &r.model, &inclusion_images(&l.model, &r.model), &id, lc, window))
        .collect()
}

fn require_smooth(inst: &LocalizationInstance, rep: &mut Report) -> bool {
    if !inst.p.asserted_smooth {
        rep.inconclusive("localization checks need asserted smooth = true");
        return false;
    }
    true
}

/// Weight-0 loop towers of X at z and of X^z at z, compared levelwise.
pub fn check_hh_localization(inst: &LocalizationInstance) -> Result<Report, KernelError> {
    let mut rep = Report::new("hh-localization", inst.echo());
    if !require_smooth(inst, &mut rep) {
        return Ok(rep);
    }
    let w = inst.weight0_window();
    let (lhs, rhs) = rayon::join(|| inst.lhs_tower(&w), || inst.rhs_tower(&w));
    for v in lhs.tower.transition_violations().into_iter().chain(rhs.tower.transition_violations()) {
        rep.fail(v);
    }
    let maps = inclusion_maps(&lhs, &rhs, &w);
    let mut decided = false;
    for n in 0..lhs.tower.len() {
        let level = n + 1;
        let (l, r) = (&lhs.tower.levels[n], &rhs.tower.levels[n]);
        let bad = chain_map_violations(l, r, &maps[n]);
        if !bad.is_empty() {
            for b in bad {
                rep.fail(format!("level {level}: comparison {b}"));
            }
            continue;
        }
        let (Some(tl), Some(tr)) = (rep.absorb(l.cohomology())?, rep.absorb(r.cohomology())?) else { continue };
        rep.table(&format!("lhs level {level}"), &tl);
        rep.table(&format!("rhs level {level}"), &tr);
        for (m, a, b) in tl.diff_non_edge(&tr) {
            rep.fail(format!("level {level}: tables differ at {m}: {a} vs {b}"));
        }
        let def = iso_deficits(l, r, &maps[n], &tl, &tr, w.cohdeg)?;
        rep.lines.push(format!("map level {level}: {} deficient bins", def.len()));
        for d in def {
            rep.fail(format!("level {level}: {d}"));
        }
        decided |= has_decided_bin(l, &tl, w.cohdeg, 0);
        if !decided && n + 1 == lhs.tower.len() {
            rep.inconclusive(format!("every bin is edge: {}", edge_list(&tl)));
        }
    }
    Ok(rep)
}

/// The same comparison after each S¹ flavor, with the map ranks taken on u-series.
pub fn check_hc_variants(inst: &LocalizationInstance, flavors: &[&str]) -> Result<Report, KernelError> {
    let mut rep = Report::new("hc-variants", inst.echo());
    if !require_smooth(inst, &mut rep) {
        return Ok(rep);
    }
    let w = inst.weight0_window();
    let (lhs, rhs) = rayon::join(|| inst.lhs_tower(&w), || inst.rhs_tower(&w));
    for (side, t) in [("lhs", &lhs), ("rhs", &rhs)] {
        if let Some(o) = t.models.first().map(|m| &m.mixed_obstructions).filter(|o| !o.is_empty()) {
            rep.inconclusive(format!("{side}: no mixed structure for relations {}", o.join(", ")));
            return Ok(rep);
        }
    }
    for v in lhs.tower.transition_violations().into_iter().chain(rhs.tower.transition_violations()) {
        rep.fail(v);
    }
    let maps = inclusion_maps(&lhs, &rhs, &w);
    let registry = FlavorRegistry::default();
    for name in flavors {
        let Some(fl) = registry.get(name) else {
            rep.inconclusive(format!("unknown flavor {name}"));
            continue;
        };
        let built = fl.built_range(w.upow.1);
        let mut decided = false;
        let mut edges = HilbertTable::default();
        for n in 0..lhs.tower.len() {
            let level = n + 1;
            let (l, r) = (&lhs.tower.levels[n], &rhs.tower.levels[n]);
            for b in chain_map_violations(l, r, &maps[n]) {
                rep.fail(format!("{name} level {level}: comparison {b}"));
            }
            let (Some(ul), Some(ur)) = (rep.absorb(apply_flavor(l, fl.as_ref(), &w))?, rep.absorb(apply_flavor(r, fl.as_ref(), &w))?)
            else {
                continue;
            };
            rep.table(&format!("{name} lhs level {level}"), &ul.table);
            rep.table(&format!("{name} rhs level {level}"), &ur.table);
            for (m, a, b) in ul.table.diff_non_edge(&ur.table) {
                rep.fail(format!("{name} level {level}: tables differ at {m}: {a} vs {b}"));
            }
            let mut deficits = 0;
            for (key, sc) in &ul.columns {
                let Some(tc) = ur.columns.get(key) else { continue };
                let empty = BTreeMap::new();
                let f = maps[n].get(key).unwrap_or(&empty);
                for c in w.cohdeg.0..=w.cohdeg.1 {
                    let at = |p| Multidegree::new(c, key.weight.clone(), key.aux, p);
                    if (built.0..=built.1).any(|p| ul.table.is_edge(&at(p)) || ur.table.is_edge(&at(p))) {
                        continue;
                    }
                    decided = true;
                    let hs: usize = (built.0..=built.1).map(|p| ul.table.get(&at(p))).sum();
                    let ht: usize = (built.0..=built.1).map(|p| ur.table.get(&at(p))).sum();
                    if hs == 0 && ht == 0 {
                        continue;
                    }
                    let fm = useries_map(sc, tc, f, c);
                    let rk = induced_rank(&fm, sc.d_out(c), tc.d_in(c))?;
                    if rk != hs || rk != ht {
                        deficits += 1;
                        rep.fail(format!("{name} level {level}: map at {} total {c}: rank {rk} between {hs} and {ht}", key));
                    }
                }
            }
            rep.lines.push(format!("{name} map level {level}: {deficits} deficient bins"));
            edges = ul.table.filter(|m| ul.table.is_edge(m));
        }
        if !decided {
            rep.inconclusive(format!("{name}: every bin is edge: {}", edge_list(&edges)));
        }
    }
    Ok(rep)
}

fn ceil_half(c: i32) -> i32 {
    c.div_euclid(2) + c.rem_euclid(2)
}

/// H ⊗ k((u)) of a single-differential table, sheared so that a class of degree c_in
/// multiplied by u^q sits in total degree c_in + 2q with u-power q + ⌈c_in/2⌉.
pub fn sheared_tate(h: &HilbertTable, cohdeg: (i32, i32), u: i32) -> HilbertTable {
    let mut out = HilbertTable::default();
    for (m, d) in h.nonzero() {
        for total in cohdeg.0..=cohdeg.1 {
            if (total - m.cohdeg).rem_euclid(2) != 0 {
                continue;
            }
            let q = (total - m.cohdeg) / 2;
            let p = q + ceil_half(m.cohdeg);
            if (-u..=u).contains(&p) {
                out.add(Multidegree::new(total, m.weight.clone(), m.aux, p), *d);
            }
        }
    }
    out
}

/// Tate tables of the loop tower at z against the sheared Cartan tower of the fixed locus.
pub fn check_hp_completion(inst: &LocalizationInstance) -> Result<Report, KernelError> {
    let mut rep = Report::new("hp-completion", inst.echo());
    if !require_smooth(inst, &mut rep) {
        return Ok(rep);
    }
    let w = inst.weight0_window();
    let fixed = fixed_points(&inst.p, &inst.z);
    let (lhs, oracle) = rayon::join(
        || inst.lhs_tower(&w),
        || (1..=inst.trunc.tower_levels).map(|n| cartan_topological(&fixed, n).model.complex(&w)).collect::<Vec<_>>(),
    );
    if let Some(o) = lhs.models.first().map(|m| &m.mixed_obstructions).filter(|o| !o.is_empty()) {
        rep.inconclusive(format!("no mixed structure for relations {}", o.join(", ")));
        return Ok(rep);
    }
    let built = Tate.built_range(w.upow.1);
    let mut decided = false;
    let mut last = HilbertTable::default();
    for n in 0..lhs.tower.len() {
        let level = n + 1;
        let Some(t) = rep.absorb(apply_flavor(&lhs.tower.levels[n], &Tate, &w))? else { continue };
        let Some(h) = rep.absorb(oracle[n].cohomology())? else { continue };
        let rhs = sheared_tate(&h, w.cohdeg, w.upow.1);
        rep.table(&format!("tate lhs level {level}"), &t.table);
        rep.table(&format!("oracle rhs level {level}"), &rhs);
        for (m, a, b) in t.table.diff_non_edge(&rhs) {
            rep.fail(format!("level {level}: tables differ at {m}: {a} vs {b}"));
        }
        decided |= has_decided_bin(&lhs.tower.levels[n], &t.table, w.cohdeg, built.0);
        last = t.table.filter(|m| t.table.is_edge(m));
    }
    if !decided {
        rep.inconclusive(format!("every bin is edge: {}", edge_list(&last)));
    }
    Ok(rep)
}

/// Level-1 loop model at z against the untwisted loop model of X^z, plus the
/// Tate specialization against the de Rham oracle of X^z.
pub fn check_derived_fixed_fiber(inst: &LocalizationInstance) -> Result<Report, KernelError> {
    let mut rep = Report::new("derived-fixed-fiber", inst.echo());
    if !require_smooth(inst, &mut rep) {
        return Ok(rep);
    }
    if !inst.p.relations.is_empty() {
        rep.inconclusive("fiber comparison map is built for presentations without relations");
        return Ok(rep);
    }
    let w = inst.full_window();
    let fixed = fixed_points(&inst.p, &inst.z);
    let g1 = GroupCoeffs::AtPoint { z: inst.z.clone(), n: 1 };
    let mut lhs = loop_model(&inst.p, &g1);
    inst.corrupt_model(&mut lhs);
    let rhs = loop_model(&fixed, &GroupCoeffs::Trivial);
    let moving = moving_coordinates(&inst.p, &inst.z);
    let mut images = inclusion_images(&lhs.model, &rhs.model);
    let r = lhs.model.coeff.clone();
    let ch = Characters::new(&g1, &r);
    for (k, &i) in moving.iter().enumerate() {
        let c = ch.c(&inst.p.weights[i]);
        images[lhs.eps[i]] = rhs.model.term(vec![c[0].clone()], rhs.eta[k]);
    }
    let (lc, rc) = rayon::join(|| lhs.model.complex(&w), || rhs.model.complex(&w));
    let id = |c: &Vec<Scalar>| c.clone();
    let f = model_map(&lhs.model, &rhs.model, &images, &id, &lc, &w);
    let (lp, rp) = (MixedComplex::without_eps(lc.complex.clone()), MixedComplex::without_eps(rc.complex.clone()));
    let bad = chain_map_violations(&lp, &rp, &f);
    for b in &bad {
        rep.fail(format!("fiber comparison {b}"));
    }
    if let (Some(tl), Some(tr)) = (rep.absorb(lp.cohomology())?, rep.absorb(rp.cohomology())?) {
        rep.table("fiber", &tl);
        rep.table("fixed locus loops", &tr);
        for (m, a, b) in tl.diff_non_edge(&tr) {
            rep.fail(format!("fiber tables differ at {m}: {a} vs {b}"));
        }
        if bad.is_empty() {
            let def = iso_deficits(&lp, &rp, &f, &tl, &tr, w.cohdeg)?;
            rep.lines.push(format!("fiber map: {} deficient bins", def.len()));
            for d in def {
                rep.fail(d);
            }
        }
    }
    // Tate specialization against de Rham cohomology of the fixed locus
    if lc.eps.is_none() {
        rep.inconclusive(format!("no mixed structure on the fiber: {}", lhs.mixed_obstructions.join(", ")));
        return Ok(rep);
    }
    let oracle = cartan_topological(&fixed, 1).model.complex(&w);
    if let (Some(t), Some(h)) = (rep.absorb(apply_flavor(&lc, &Tate, &w))?, rep.absorb(oracle.cohomology())?) {
        let rhs_t = sheared_tate(&h, w.cohdeg, w.upow.1);
        rep.table("fiber tate", &t.table);
        rep.table("de rham oracle", &rhs_t);
        for (m, a, b) in t.table.diff_non_edge(&rhs_t) {
            rep.fail(format!("tate specialization differs at {m}: {a} vs {b}"));
        }
        if !has_decided_bin(&lc, &t.table, w.cohdeg, Tate.built_range(w.upow.1).0) {
            rep.inconclusive(format!("every tate bin is edge: {}", edge_list(&t.table)));
        }
    }
    Ok(rep)
}

/// Truncation and windows of the built-in unipotent presets.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct UnipotentSetup {
    /// x^D = 0 on the completed side.
    pub truncate: u32,
    pub aux_max: u32,
    pub u_window: i32,
    pub cohdeg: (i32, i32),
}

impl Default for UnipotentSetup {
    fn default() -> Self {
        UnipotentSetup { truncate: 4, aux_max: 6, u_window: 4, cohdeg: (-6, 6) }
    }
}

/// Polynomial against completed B𝔾ₐ preset: per-weight equal, globally different, equal after Tate.
pub fn check_unipotent_formal_tate(s: &UnipotentSetup) -> Result<Report, KernelError> {
    let mut rep = Report::new(
        "unipotent-formal-tate",
        vec![format!(
            "presets k[x,eta] and k[x,eta]/x^{} with eps = x d/d(eta); aux_max={} u_window={} cohdeg=[{},{}]",
            s.truncate, s.aux_max, s.u_window, s.cohdeg.0, s.cohdeg.1
        )],
    );
    let w = Window::new(s.cohdeg, vec![(-(s.aux_max as i32), 0)], s.aux_max, s.u_window);
    let poly = bga_preset(None, &w);
    let comp = bga_preset(Some(s.truncate), &w);
    for v in poly.law_violations().into_iter().chain(comp.law_violations()) {
        rep.fail(v);
    }
    let (tp, tc) = (poly.cohomology()?, comp.cohomology()?);
    rep.table("polynomial", &tp);
    rep.table("completed", &tc);
    let pg = pro_graded_compare(&tp, &tc);
    if !pg.per_weight_equal() {
        rep.fail(format!("weights with different tables: {:?}", pg.weight_mismatches));
    }
    rep.lines.push(format!("per-weight equal: {}", pg.per_weight_equal()));
    let (f_poly, f_comp) = (bga_fiber_at_one(None, s.aux_max)?, bga_fiber_at_one(Some(s.truncate), s.aux_max)?);
    rep.lines.push(format!("fiber at x=1 in degree 0: polynomial {f_poly}, completed {f_comp}"));
    if f_poly == f_comp {
        rep.fail("global tables agree at x = 1");
    }
    let (up, uc) = (apply_flavor(&poly, &Tate, &w)?, apply_flavor(&comp, &Tate, &w)?);
    rep.table("tate polynomial", &up.table);
    rep.table("tate completed", &uc.table);
    for (m, a, b) in up.table.diff_non_edge(&uc.table) {
        rep.fail(format!("tate tables differ at {m}: {a} vs {b}"));
    }
    for (name, t) in [("polynomial", &up.table), ("completed", &uc.table)] {
        for c in s.cohdeg.0..=s.cohdeg.1 {
            let bins: Vec<(&Multidegree, &usize)> = t.nonzero().filter(|(m, _)| m.cohdeg == c).collect();
            if bins.iter().any(|(m, _)| t.is_edge(m)) {
                continue;
            }
            let total: usize = bins.iter().map(|(_, d)| **d).sum();
            let want = usize::from(c.rem_euclid(2) == 0);
            if total != want {
                rep.fail(format!("tate {name} total degree {c}: dim {total}, expected {want}"));
            }
        }
    }
    Ok(rep)
}

/// Subgroup list, deleted set and sampled containment of fixed loci.
pub fn check_stabilizers(p: &AlgebraPresentation, z: &TorusPoint, sample: usize) -> Report {
    let mut rep = Report::new("stabilizers", vec![format!("weights {:?}", p.weights), format!("point {z}")]);
    let subs = stabilizer_subgroups(p.rank, &p.weights);
    rep.lines.push(format!("subgroups {}", subs.iter().map(|h| h.to_string()).collect::<Vec<_>>().join("; ")));
    let del = localization_open_set(p.rank, &p.weights, z);
    rep.lines.push(format!("deleted {}", del.iter().map(|h| h.to_string()).collect::<Vec<_>>().join("; ")));
    let s = containment_on_sample(p, z, sample);
    if s.len() < sample {
        rep.inconclusive(format!("only {} sample points found in U", s.len()));
    }
    for (w, ok) in s {
        rep.lines.push(format!("sample {w} contained {ok}"));
        if !ok {
            rep.fail(format!("fixed locus at {w} not inside that at z"));
        }
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inst(weights: &[Vec<i32>], z: i64, levels: u32) -> LocalizationInstance {
        let t = Truncation { tower_levels: levels, ..Truncation::default() };
        LocalizationInstance::new(AlgebraPresentation::affine(weights), TorusPoint::rational(&[z]), t)
    }

    #[test]
    fn hh_examples_pass() {
        for (w, z) in [(vec![vec![1]], 2), (vec![vec![1]], 1), (vec![vec![1], vec![2]], -1)] {
            let r = check_hh_localization(&inst(&w, z, 3)).unwrap();
            assert_eq!(r.verdict, Verdict::Pass, "{}", r.render());
        }
    }

    #[test]
    fn hh_level_dims() {
        let r = check_hh_localization(&inst(&[vec![1]], 2, 4)).unwrap();
        let text = r.render();
        for n in 1..=4 {
            assert!(text.contains(&format!("table lhs level {n}\n  0;0;0;0 -> {n}\n")), "{text}");
        }
    }

    #[test]
    fn corrupted_fails_with_bin() {
        let mut i = LocalizationInstance::new(
            AlgebraPresentation::affine(&[vec![1], vec![-1]]),
            TorusPoint::rational(&[3]),
            Truncation { tower_levels: 2, ..Truncation::default() },
        );
        i.corrupt = Some("eps_x".into());
        let r = check_hh_localization(&i).unwrap();
        assert_eq!(r.verdict, Verdict::Fail);
        assert!(r.reasons.iter().any(|s| s.contains("at -1;0;2;0")), "{}", r.render());
    }

    #[test]
    fn hp_examples_pass() {
        for (w, z) in [(vec![vec![1]], 2), (vec![vec![1]], 1)] {
            let r = check_hp_completion(&inst(&w, z, 3)).unwrap();
            assert_eq!(r.verdict, Verdict::Pass, "{}", r.render());
        }
    }

    #[test]
    fn tiny_window_is_inconclusive() {
        let mut i = inst(&[vec![1]], 2, 2);
        i.trunc.u_window = 0;
        i.trunc.cohdeg = (2, 4);
        assert_eq!(check_hp_completion(&i).unwrap().verdict, Verdict::Inconclusive);
    }

    #[test]
    fn fiber_examples_pass() {
        for (w, z) in [(vec![vec![1]], 2), (vec![vec![1]], 1), (vec![vec![1], vec![2]], -1)] {
            let r = check_derived_fixed_fiber(&inst(&w, z, 1)).unwrap();
            assert_eq!(r.verdict, Verdict::Pass, "{}", r.render());
        }
    }

    #[test]
    fn unipotent_preset() {
        let r = check_unipotent_formal_tate(&UnipotentSetup::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Pass, "{}", r.render());
    }

    #[test]
    fn sheared_point() {
        let mut h = HilbertTable::default();
        h.set(Multidegree::new(0, vec![0], 0, 0), 1);
        h.set(Multidegree::new(2, vec![0], 0, 0), 1);
        let t = sheared_tate(&h, (-2, 2), 4);
        assert_eq!(t.get(&Multidegree::new(2, vec![0], 0, 1)), 2);
        assert_eq!(t.get(&Multidegree::new(-2, vec![0], 0, -1)), 2);
    }

    #[test]
    fn hc_examples_pass() {
        let all = ["invariants", "coinvariants", "tate"];
        for (w, z) in [(vec![vec![1]], 2), (vec![vec![1], vec![-1]], 3)] {
            let r = check_hc_variants(&inst(&w, z, 3), &all).unwrap();
            assert_eq!(r.verdict, Verdict::Pass, "{}", r.render());
        }
    }

    #[test]
    fn stabilizer_report() {
        let r = check_stabilizers(&AlgebraPresentation::affine(&[vec![1], vec![2]]), &TorusPoint::rational(&[-1]), 10);
        assert_eq!(r.verdict, Verdict::Pass);
    }
}
