//! Acceptance suite: one line per criterion, nonzero exit if any fails.

use loopcoh::completion::{
    cech_local_cohomology, laurent_koszul_tower, laurent_quotient_level, loop_tower, pro_graded_compare,
    stabilization_violations, BinMaps, LaurentModule,
};
use loopcoh::cyclic::{cyclic_bar, equivariant_cyclic_bar, fit_b_against_eps, CyclicLevels};
use loopcoh::graded::{ColKey, Column, HilbertTable, Multidegree, Window};
use loopcoh::harness::{
    check_derived_fixed_fiber, check_hh_localization, check_hp_completion, check_unipotent_formal_tate,
    sheared_tate, LocalizationInstance, Truncation, UnipotentSetup, Verdict,
};
use loopcoh::mixed::{
    apply_flavor, bga_fiber_at_one, bga_preset, connes_periodicity_check, random_mixed, tate_prod_check,
    MixedComplex, Tate,
};
use loopcoh::models::loops::{cartan_model, cartan_topological, loop_model, GroupCoeffs};
use loopcoh::models::presentation::{fixed_points, AlgebraPresentation, TorusPoint};
use loopcoh::models::stabilizers::{containment_on_sample, localization_open_set, stabilizer_subgroups};
use loopcoh::sparse::{induced_rank, SparseMatrix};
use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

type Outcome = Result<(), Vec<String>>;

fn affine(w: &[i32]) -> AlgebraPresentation {
    AlgebraPresentation::affine(&w.iter().map(|&x| vec![x]).collect::<Vec<_>>())
}

fn md(c: i32, w: i32, a: u32, p: i32) -> Multidegree {
    Multidegree::new(c, vec![w], a, p)
}

fn table(entries: &[(Multidegree, usize)]) -> HilbertTable {
    let mut t = HilbertTable::default();
    for (m, d) in entries {
        t.set(m.clone(), *d);
    }
    t
}

fn expect(errs: &mut Vec<String>, ok: bool, what: impl Into<String>) {
    if !ok {
        errs.push(what.into());
    }
}

fn finish(errs: Vec<String>) -> Outcome {
    if errs.is_empty() {
        Ok(())
    } else {
        Err(errs)
    }
}

fn inst(w: &[i32], z: i64, trunc: Truncation) -> LocalizationInstance {
    LocalizationInstance::new(affine(w), TorusPoint::rational(&[z]), trunc)
}

fn w0(aux: u32, u: i32) -> Window {
    Window::new((-6, 6), vec![(0, 0)], aux, u)
}

// ---------- 1 ----------

fn hh_localization_line() -> Outcome {
    let mut e = Vec::new();
    let t0 = Instant::now();
    let p = affine(&[1]);
    let z = TorusPoint::rational(&[2]);
    let w = w0(4, 0);
    let lhs = loop_tower(&p, &z, 4, &w);
    let rhs = loop_tower(&fixed_points(&p, &z), &z, 4, &w);
    for (side, t) in [("lhs", &lhs), ("rhs", &rhs)] {
        for (k, tab) in t.tower.tables().unwrap().iter().enumerate() {
            let n = k + 1;
            let want = table(&[(md(0, 0, 0, 0), n)]);
            expect(&mut e, *tab == want, format!("{side} level {n}: {}", tab.serialize()));
        }
    }
    let r = check_hh_localization(&inst(&[1], 2, Truncation { tower_levels: 4, ..Truncation::default() })).unwrap();
    expect(&mut e, r.verdict == Verdict::Pass, format!("harness verdict {}", r.verdict));
    expect(&mut e, r.lines.iter().filter(|l| l.ends_with(": 0 deficient bins")).count() == 4, "map not full rank at every level");
    let secs = t0.elapsed().as_secs_f64();
    expect(&mut e, secs < 10.0, format!("runtime {secs:.1}s"));
    finish(e)
}

// ---------- 2 ----------

fn hp_completion_line() -> Outcome {
    let mut e = Vec::new();
    let p = affine(&[1]);
    let z = TorusPoint::rational(&[2]);
    let w = w0(4, 4);
    let lhs = loop_tower(&p, &z, 4, &w);
    let fixed = fixed_points(&p, &z);
    for n in 1..=4usize {
        // dims n in each even total degree, u-power half the degree
        let want = table(&(-3..=3).map(|q| (md(2 * q, 0, 0, q), n)).collect::<Vec<_>>());
        let t = apply_flavor(&lhs.tower.levels[n - 1], &Tate, &w).unwrap().table;
        expect(&mut e, t.edges().next().is_none(), format!("level {n}: unexpected edge bins"));
        expect(&mut e, t == want, format!("loop side level {n}:\n{}", t.serialize()));
        let h = cartan_topological(&fixed, n as u32).model.complex(&w).cohomology().unwrap();
        let o = sheared_tate(&h, w.cohdeg, 4);
        expect(&mut e, o == want, format!("oracle level {n}:\n{}", o.serialize()));
    }
    let r = check_hp_completion(&inst(&[1], 2, Truncation { tower_levels: 4, ..Truncation::default() })).unwrap();
    expect(&mut e, r.verdict == Verdict::Pass, format!("harness verdict {}", r.verdict));
    finish(e)
}

// ---------- 3 ----------

/// de Rham-free HKR table of the fixed locus: functions and one-forms of y (weight 2)
/// for z = -1, the point for z = 3.
fn fixed_hkr_table(z: i64, aux: u32) -> HilbertTable {
    let mut v = vec![(md(0, 0, 0, 0), 1)];
    if z == -1 {
        for k in 1..=aux {
            v.push((md(0, 2 * k as i32, k, 0), 1));
            v.push((md(-1, 2 * k as i32, k, 0), 1));
        }
    }
    table(&v)
}

fn fixed_locus_jump() -> Outcome {
    let mut e = Vec::new();
    let trunc = Truncation { tower_levels: 3, ..Truncation::default() };
    for z in [-1, 3] {
        let i = inst(&[1, 2], z, trunc.clone());
        let hh = check_hh_localization(&i).unwrap();
        expect(&mut e, hh.verdict == Verdict::Pass, format!("z={z}: hh {}", hh.verdict));
        let hp = check_hp_completion(&i).unwrap();
        expect(&mut e, hp.verdict == Verdict::Pass, format!("z={z}: hp {}", hp.verdict));
        let ff = check_derived_fixed_fiber(&i).unwrap();
        expect(&mut e, ff.verdict == Verdict::Pass, format!("z={z}: fiber {}", ff.verdict));
        let w = Window::new((-6, 6), vec![(-8, 8)], 4, 4);
        let fiber = loop_model(&i.p, &GroupCoeffs::AtPoint { z: i.z.clone(), n: 1 }).model.complex(&w);
        let t = fiber.cohomology().unwrap();
        let want = fixed_hkr_table(z, 4);
        expect(&mut e, t == want, format!("z={z}: fiber table\n{}", t.serialize()));
    }
    finish(e)
}

// ---------- 4 ----------

fn unipotent_vs_formal() -> Outcome {
    let mut e = Vec::new();
    let s = UnipotentSetup::default();
    let w = Window::new(s.cohdeg, vec![(-(s.aux_max as i32), 0)], s.aux_max, s.u_window);
    let (poly, comp) = (bga_preset(None, &w), bga_preset(Some(s.truncate), &w));
    let (tp, tc) = (poly.cohomology().unwrap(), comp.cohomology().unwrap());
    let pg = pro_graded_compare(&tp, &tc);
    expect(&mut e, pg.per_weight_equal(), format!("weights differ: {:?}", pg.weight_mismatches));
    for wt in -(s.aux_max as i32)..=0 {
        let a = tp.filter(|m| m.weight == [wt]);
        let b = tc.filter(|m| m.weight == [wt]);
        expect(&mut e, a.diff_non_edge(&b).is_empty(), format!("weight {wt} differs"));
    }
    let (f1, f2) = (bga_fiber_at_one(None, s.aux_max).unwrap(), bga_fiber_at_one(Some(s.truncate), s.aux_max).unwrap());
    expect(&mut e, (f1, f2) == (1, 0), format!("global fibers at x=1: {f1} vs {f2}"));
    for (name, mc) in [("polynomial", &poly), ("completed", &comp)] {
        let t = apply_flavor(mc, &Tate, &w).unwrap().table;
        for c in s.cohdeg.0..=s.cohdeg.1 {
            let bins: Vec<_> = t.nonzero().filter(|(m, _)| m.cohdeg == c).collect();
            if t.edges().any(|m| m.cohdeg == c && bins.iter().any(|(b, _)| b.weight == m.weight)) {
                continue;
            }
            let total: usize = bins.iter().map(|(_, d)| **d).sum();
            let want = usize::from(c % 2 == 0);
            expect(&mut e, total == want, format!("{name} tate degree {c}: {total}"));
        }
    }
    let r = check_unipotent_formal_tate(&s).unwrap();
    expect(&mut e, r.verdict == Verdict::Pass, format!("harness verdict {}", r.verdict));
    finish(e)
}

// ---------- 5 ----------

fn labels_at(col: &Column, c: i32) -> Vec<String> {
    if c < col.lo || c > col.hi() {
        return Vec::new();
    }
    col.labels[(c - col.lo) as usize].clone()
}

/// HKR matrices bar → model keyed by (bin, cohdeg).
fn hkr_maps(
    bar: &CyclicLevels,
    bar_mc: &MixedComplex,
    model: &loopcoh::models::loops::BuiltModel,
    model_mc: &MixedComplex,
) -> (BTreeMap<(ColKey, i32), SparseMatrix>, BinMaps) {
    let mut by_deg = BTreeMap::new();
    let mut bins = BinMaps::new();
    for (key, col) in &bar_mc.complex.columns {
        let Some(mcol) = model_mc.complex.columns.get(key) else { continue };
        for c in col.lo..=col.hi() {
            let n = (-c) as usize;
            let m = bar.hkr_matrix(key, n, &model.model, &model.x, &model.eps, &labels_at(mcol, c));
            by_deg.insert((key.clone(), c), m.clone());
            bins.entry(key.clone()).or_default().insert(c, m);
        }
    }
    (by_deg, bins)
}

fn oracle_pair(
    e: &mut Vec<String>,
    tag: &str,
    bar: &CyclicLevels,
    model: &loopcoh::models::loops::BuiltModel,
    w: &Window,
    objects: &mut Vec<(String, MixedComplex)>,
) {
    expect(e, bar.identity_violations().is_empty(), format!("{tag}: simplicial identities"));
    let bar_mc = bar.connes_b();
    let model_mc = model.model.complex(w);
    let (tb, tm) = (bar_mc.cohomology().unwrap(), model_mc.cohomology().unwrap());
    expect(e, tb.total() > 0, format!("{tag}: empty bar table"));
    expect(e, tb.edges().next().is_none(), format!("{tag}: bar has edge bins"));
    expect(e, tb == tm, format!("{tag}: tables\n{}\nvs\n{}", tb.serialize(), tm.serialize()));
    let (by_deg, bins) = hkr_maps(bar, &bar_mc, model, &model_mc);
    let plain = |m: &MixedComplex| MixedComplex::without_eps(m.complex.clone());
    let cm = loopcoh::completion::chain_map_violations(&plain(&bar_mc), &plain(&model_mc), &bins);
    expect(e, cm.is_empty(), format!("{tag}: HKR not a chain map: {cm:?}"));
    // quasi-isomorphism on every bin
    for (key, col) in &bar_mc.complex.columns {
        let Some(mcol) = model_mc.complex.columns.get(key) else { continue };
        for c in col.lo..=col.hi() {
            let h = tb.get(&key.at(c));
            let r = induced_rank(&by_deg[&(key.clone(), c)], &col.d_out(c), &mcol.d_in(c)).unwrap();
            expect(e, r == h, format!("{tag}: HKR rank {r} vs {h} at {}", key.at(c)));
        }
    }
    let fit = fit_b_against_eps(&bar_mc, &model_mc, &by_deg).unwrap();
    expect(e, fit.is_empty(), format!("{tag}: B vs eps {fit:?}"));
    objects.push((format!("{tag} bar"), bar_mc));
    objects.push((format!("{tag} model"), model_mc));
}

fn oracle_equivalence(objects: &mut Vec<(String, MixedComplex)>) -> Outcome {
    let mut e = Vec::new();
    let p = affine(&[1]);
    let w = Window::new((-6, 6), vec![(0, 4)], 4, 0);
    let bar = cyclic_bar(&p, 5, &w).unwrap();
    oracle_pair(&mut e, "k[x]", &bar, &cartan_model(&p, 1), &w, objects);
    let z = TorusPoint::rational(&[2]);
    let w0 = Window::new((-6, 6), vec![(0, 0)], 4, 0);
    for level in 1..=3 {
        let eb = equivariant_cyclic_bar(&p, &z, level, 5, &w0).unwrap();
        let lm = loop_model(&p, &GroupCoeffs::AtPoint { z: z.clone(), n: level });
        oracle_pair(&mut e, &format!("k[x] at z=2 level {level}"), &eb, &lm, &w0, objects);
    }
    finish(e)
}

// ---------- 6 ----------

fn useries_square_violations(mc: &MixedComplex, w: &Window) -> Vec<String> {
    let r = apply_flavor(mc, &Tate, w);
    match r {
        Err(err) => vec![err.to_string()],
        Ok(r) => {
            let mut bad = Vec::new();
            for (k, uc) in &r.columns {
                for (c, d) in &uc.d {
                    if let Some(d2) = uc.d.get(&(c + 1)) {
                        if !d2.mul(d).unwrap().is_zero() {
                            bad.push(format!("(d+u eps)^2 at {k} total {c}"));
                        }
                    }
                }
            }
            bad
        }
    }
}

fn structural_laws(objects: &[(String, MixedComplex)]) -> Outcome {
    let mut e = Vec::new();
    let wu = Window::new((-6, 6), vec![(-10, 10)], 6, 4);
    let mut all: Vec<(String, MixedComplex, Window)> =
        objects.iter().map(|(n, m)| (n.clone(), m.clone(), m.complex.window.clone())).collect();
    // towers and models of criteria 1-3
    for (wts, z) in [(vec![1], 2), (vec![1, 2], -1), (vec![1, 2], 3), (vec![1], 1)] {
        let p = affine(&wts);
        let zz = TorusPoint::rational(&[z]);
        let w = w0(4, 4);
        for (side, q) in [("x", p.clone()), ("fixed", fixed_points(&p, &zz))] {
            let t = loop_tower(&q, &zz, 3, &w);
            expect(&mut e, t.tower.transition_violations().is_empty(), format!("{wts:?} z={z} {side}: transitions"));
            for (k, l) in t.tower.levels.iter().enumerate() {
                all.push((format!("{wts:?} z={z} {side} level {}", k + 1), l.clone(), w.clone()));
            }
        }
        let wf = Window::new((-6, 6), vec![(-8, 8)], 4, 4);
        let fiber = loop_model(&p, &GroupCoeffs::AtPoint { z: zz.clone(), n: 1 }).model.complex(&wf);
        all.push((format!("{wts:?} z={z} fiber"), fiber, wf.clone()));
        for n in 1..=3 {
            let cart = cartan_topological(&fixed_points(&p, &zz), n).model.complex(&w);
            all.push((format!("{wts:?} z={z} cartan {n}"), cart, w.clone()));
        }
    }
    let wb = Window::new((-6, 6), vec![(-6, 0)], 6, 4);
    all.push(("bga polynomial".into(), bga_preset(None, &wb), wb.clone()));
    all.push(("bga completed".into(), bga_preset(Some(4), &wb), wb.clone()));
    for seed in 0..50 {
        all.push((format!("random {seed}"), random_mixed(seed, &wu), wu.clone()));
    }
    expect(&mut e, all.len() > 80, format!("only {} objects", all.len()));
    for (name, mc, w) in &all {
        for v in mc.law_violations() {
            e.push(format!("{name}: {v}"));
        }
        match mc.complex.euler_violations() {
            Ok(v) if v.is_empty() => {}
            Ok(v) => e.push(format!("{name}: euler characteristic at {v:?}")),
            Err(err) => e.push(format!("{name}: {err}")),
        }
        if mc.eps.is_none() {
            continue;
        }
        let w = Window { upow: (-4, 4), ..w.clone() };
        for v in useries_square_violations(mc, &w) {
            e.push(format!("{name}: {v}"));
        }
        for v in tate_prod_check(mc, &w).unwrap() {
            e.push(format!("{name}: {v}"));
        }
        for v in connes_periodicity_check(mc, &w).unwrap() {
            e.push(format!("{name}: {v}"));
        }
    }
    finish(e)
}

// ---------- 7 ----------

fn completion_fixtures() -> Outcome {
    let mut e = Vec::new();
    let w = Window::new((-3, 3), vec![(-8, 8)], 0, 0);
    let torsion = LaurentModule::laurent_mod_polynomial();
    let levels = 6;
    let tower = laurent_koszul_tower(&torsion, levels, &w);
    expect(&mut e, tower.transition_violations().is_empty(), "tower transitions");
    let tables = tower.tables().unwrap();
    for (k, t) in tables.iter().enumerate() {
        let n = k as i32 + 1;
        let want = table(&(0..n).map(|wt| (md(-1, wt, 0, 0), 1)).collect::<Vec<_>>());
        expect(&mut e, *t == want, format!("level {n}:\n{}", t.serialize()));
    }
    let stab = stabilization_violations(&tables, |n, m| n >= torsion.stable_from(m.weight[0]));
    expect(&mut e, stab.is_empty(), format!("declared-stable bins moved: {stab:?}"));
    // the stabilized part is the completion of k[x] moved to cohdeg -1
    let free = laurent_quotient_level(&LaurentModule::polynomial(), levels, &w).cohomology().unwrap();
    let shifted = free.rekey(|m| Multidegree::new(m.cohdeg - 1, m.weight.clone(), m.aux, m.upow));
    expect(&mut e, tables[levels as usize - 1] == shifted, "shifted k[[x]] table");
    let cech = cech_local_cohomology(&LaurentModule::polynomial(), &w).cohomology().unwrap();
    expect(&mut e, cech.nonzero().all(|(m, _)| m.cohdeg == 1), "cech outside cohdeg 1");
    let want = table(&(-8..=-1).map(|wt| (md(1, wt, 0, 0), 1)).collect::<Vec<_>>());
    expect(&mut e, cech == want, format!("cech table\n{}", cech.serialize()));
    finish(e)
}

// ---------- 8 ----------

fn stabilizer_enumeration() -> Outcome {
    let mut e = Vec::new();
    let names = |v: Vec<loopcoh::models::stabilizers::Subgroup>| v.iter().map(|h| h.to_string()).collect::<Vec<_>>();
    let cases: [(&[i32], &[&str]); 3] =
        [(&[1], &["full torus", "trivial"]), (&[2], &["full torus", "mu_2"]), (&[1, -1], &["full torus", "trivial"])];
    for (wts, want) in cases {
        let got = names(stabilizer_subgroups(1, &affine(wts).weights));
        expect(&mut e, got == want, format!("weights {wts:?}: {got:?}"));
    }
    let open: [(&[i32], i64, &[&str]); 4] =
        [(&[1], 2, &["trivial"]), (&[1], 1, &[]), (&[2], -1, &[]), (&[1, -1], 3, &["trivial"])];
    for (wts, z, want) in open {
        let got = names(localization_open_set(1, &affine(wts).weights, &TorusPoint::rational(&[z])));
        expect(&mut e, got == want, format!("weights {wts:?} z={z}: deleted {got:?}"));
        let s = containment_on_sample(&affine(wts), &TorusPoint::rational(&[z]), 10);
        expect(&mut e, s.len() == 10, format!("weights {wts:?} z={z}: {} sample points", s.len()));
        for (w, ok) in s {
            expect(&mut e, ok, format!("weights {wts:?} z={z}: containment fails at {w}"));
        }
    }
    finish(e)
}

fn main() {
    let mut objects: Vec<(String, MixedComplex)> = Vec::new();
    let mut results: Vec<(usize, &str, Outcome, f64)> = Vec::new();
    let mut run = |n: usize, title: &'static str, f: &mut dyn FnMut() -> Outcome| {
        let t0 = Instant::now();
        let r = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(vec![format!("panic: {}", msg.unwrap_or_default())])
        });
        let secs = t0.elapsed().as_secs_f64();
        let tag = if r.is_ok() { "PASS" } else { "FAIL" };
        println!("criterion {n}: {tag} ({secs:.2}s) {title}");
        if let Err(errs) = &r {
            for m in errs.iter().take(12) {
                println!("    {m}");
            }
        }
        results.push((n, title, r, secs));
    };
    run(1, "Hochschild localization tower for the affine line at z = 2", &mut hh_localization_line);
    run(2, "Tate tower at z = 2 against the sheared Cartan oracle", &mut hp_completion_line);
    run(3, "fixed-locus jump on the plane with weights (1,2)", &mut fixed_locus_jump);
    run(4, "unipotent vs formal Tate on the additive-group presets", &mut unipotent_vs_formal);
    run(5, "cyclic bar vs Cartan and loop models, B vs eps", &mut || oracle_equivalence(&mut objects));
    let objs = objects.clone();
    run(6, "structural laws on constructed and 50 random mixed complexes", &mut || structural_laws(&objs));
    run(7, "completion and local cohomology fixtures", &mut completion_fixtures);
    run(8, "stabilizer enumeration and sampled containment", &mut stabilizer_enumeration);
    let failed = results.iter().filter(|r| r.2.is_err()).count();
    println!("acceptance: {} of {} criteria pass", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
