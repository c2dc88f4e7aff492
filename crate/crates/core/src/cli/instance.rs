//! INI-style instance files. Comments are whole lines starting with `#` or `;`.
//! A generator line reads `name weights aux` with comma-separated weights (`-` for
//! rank 0); the point lists one token per torus coordinate, such as `2` or
//! `3/2*zeta(4)^3`. Missing truncation keys take the defaults.
//!
//! ```text
//! # 𝔸² with weights (1, 2) at z = -1
//! [space]
//! gen = x 1 1
//! gen = y 2 1
//! [group]
//! rank = 1
//! [point]
//! z = -1
//! [truncation]
//! aux_max = 4
//! tower_levels = 4
//! bar_depth = 5
//! u_window = 4
//! cohdeg_min = -6
//! cohdeg_max = 6
//! [assert]
//! smooth = true
//! regular_sequence = true
//! [debug]
//! corrupt = eps_x
//! ```
//!
//! `relation = ...` lines in `[space]` add relations; `[debug] corrupt` zeroes the
//! differential of one loop-model generator.

use crate::harness::{LocalizationInstance, Truncation};
use crate::models::presentation::{AlgebraPresentation, PresentationError, TorusPoint};
use ini::{Ini, ParseOption};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum InstanceError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Presentation(#[from] PresentationError),
}

impl InstanceError {
    /// Backend mismatches get their own exit code.
    pub fn is_backend(&self) -> bool {
        matches!(self, InstanceError::Presentation(PresentationError::MixedConductors(..)))
    }
}

const SECTIONS: [&str; 6] = ["space", "group", "point", "truncation", "assert", "debug"];

fn perr(s: impl Into<String>) -> InstanceError {
    InstanceError::Parse(s.into())
}

/// Parsed file in canonical form: sections and keys in file order, values trimmed.
/// Comments and blank lines do not survive, so this is what the cache hashes.
pub fn canonical(text: &str) -> Result<(Ini, String), InstanceError> {
    let opt = ParseOption { enabled_quote: false, enabled_escape: false, ..ParseOption::default() };
    let ini = Ini::load_from_str_opt(text, opt).map_err(|e| perr(e.to_string()))?;
    let mut s = String::new();
    for (sec, props) in ini.iter() {
        let Some(sec) = sec else {
            if props.iter().next().is_some() {
                return Err(perr("keys before the first section"));
            }
            continue;
        };
        if !SECTIONS.contains(&sec) {
            return Err(perr(format!("unknown section [{sec}]")));
        }
        s.push_str(&format!("[{sec}]\n"));
        for (k, v) in props.iter() {
            let v: Vec<&str> = v.split_whitespace().collect();
            s.push_str(&format!("{}={}\n", k.trim(), v.join(" ")));
        }
    }
    Ok((ini, s))
}

fn get<'a>(ini: &'a Ini, sec: &str, key: &str) -> Option<&'a str> {
    ini.section(Some(sec)).and_then(|p| p.get(key)).map(str::trim)
}

fn num<T: std::str::FromStr>(ini: &Ini, sec: &str, key: &str, default: T) -> Result<T, InstanceError> {
    match get(ini, sec, key) {
        None => Ok(default),
        Some(v) => v.parse().map_err(|_| perr(format!("[{sec}] {key} = {v} is not a number"))),
    }
}

fn flag(ini: &Ini, key: &str) -> Result<bool, InstanceError> {
    match get(ini, "assert", key) {
        None | Some("true") | Some("yes") => Ok(true),
        Some("false") | Some("no") => Ok(false),
        Some(v) => Err(perr(format!("[assert] {key} = {v} is not a boolean"))),
    }
}

/// Apply `key=value` truncation overrides.
pub fn override_truncation(t: &mut Truncation, kv: &str) -> Result<(), InstanceError> {
    let (k, v) = kv.split_once('=').ok_or_else(|| perr(format!("window override `{kv}` is not key=value")))?;
    let bad = || perr(format!("window override `{kv}` has a bad value"));
    match k.trim() {
        "aux_max" => t.aux_max = v.trim().parse().map_err(|_| bad())?,
        "tower_levels" => t.tower_levels = v.trim().parse().map_err(|_| bad())?,
        "bar_depth" => t.bar_depth = v.trim().parse().map_err(|_| bad())?,
        "u_window" => t.u_window = v.trim().parse().map_err(|_| bad())?,
        "cohdeg_min" => t.cohdeg.0 = v.trim().parse().map_err(|_| bad())?,
        "cohdeg_max" => t.cohdeg.1 = v.trim().parse().map_err(|_| bad())?,
        other => return Err(perr(format!("unknown window key `{other}`"))),
    }
    Ok(())
}

pub fn parse_instance(text: &str) -> Result<LocalizationInstance, InstanceError> {
    let (ini, _) = canonical(text)?;
    let rank: usize = num(&ini, "group", "rank", 1)?;
    let space = ini.section(Some("space"));
    let mut gens: Vec<(String, Vec<i32>, u32)> = Vec::new();
    for g in space.map(|p| p.get_all("gen").collect::<Vec<_>>()).unwrap_or_default() {
        let parts: Vec<&str> = g.split_whitespace().collect();
        let [name, w, a] = parts[..] else {
            return Err(perr(format!("gen `{g}` needs: name weights aux")));
        };
        let weight: Vec<i32> = if w == "-" {
            Vec::new()
        } else {
            w.split(',').map(|x| x.trim().parse()).collect::<Result<_, _>>().map_err(|_| perr(format!("bad weight `{w}`")))?
        };
        let aux: u32 = a.parse().map_err(|_| perr(format!("bad aux `{a}`")))?;
        gens.push((name.to_string(), weight, aux));
    }
    let refs: Vec<(&str, Vec<i32>, u32)> = gens.iter().map(|(n, w, a)| (n.as_str(), w.clone(), *a)).collect();
    let mut p = AlgebraPresentation::new(rank, &refs)?;
    for r in space.map(|p| p.get_all("relation").collect::<Vec<_>>()).unwrap_or_default() {
        p.add_relation_str(r)?;
    }
    p.asserted_smooth = flag(&ini, "smooth")?;
    p.asserted_regular_sequence = flag(&ini, "regular_sequence")?;
    let toks: Vec<&str> = get(&ini, "point", "z").map(|z| z.split_whitespace().collect()).unwrap_or_default();
    let z = if toks.is_empty() && rank > 0 { TorusPoint::identity(rank) } else { TorusPoint::parse(&toks)? };
    if z.rank() != rank {
        return Err(PresentationError::PointLength(z.rank(), rank).into());
    }
    let d = Truncation::default();
    let trunc = Truncation {
        aux_max: num(&ini, "truncation", "aux_max", d.aux_max)?,
        tower_levels: num(&ini, "truncation", "tower_levels", d.tower_levels)?,
        bar_depth: num(&ini, "truncation", "bar_depth", d.bar_depth)?,
        u_window: num(&ini, "truncation", "u_window", d.u_window)?,
        cohdeg: (num(&ini, "truncation", "cohdeg_min", d.cohdeg.0)?, num(&ini, "truncation", "cohdeg_max", d.cohdeg.1)?),
    };
    if trunc.tower_levels == 0 || trunc.cohdeg.0 > trunc.cohdeg.1 {
        return Err(perr("truncation needs tower_levels >= 1 and cohdeg_min <= cohdeg_max"));
    }
    let mut inst = LocalizationInstance::new(p, z, trunc);
    inst.corrupt = get(&ini, "debug", "corrupt").map(str::to_string);
    Ok(inst)
}

#[cfg(test)]
mod tests {
    use super::*;

    const A2: &str = "# comment\n[space]\ngen = x 1 1\ngen = y 2 1\n[group]\nrank = 1\n[point]\nz = -1\n[truncation]\naux_max = 3\n";

    #[test]
    fn parses_and_defaults() {
        let i = parse_instance(A2).unwrap();
        assert_eq!(i.p.weights, vec![vec![1], vec![2]]);
        assert_eq!(i.trunc.aux_max, 3);
        assert_eq!(i.trunc.tower_levels, 4);
        assert!(i.p.asserted_smooth);
    }

    #[test]
    fn comments_do_not_change_canonical_form() {
        let other = A2.replace("# comment", "; another remark\n\n# and more");
        assert_eq!(canonical(A2).unwrap().1, canonical(&other).unwrap().1);
        assert_ne!(canonical(A2).unwrap().1, canonical(&A2.replace("aux_max = 3", "aux_max = 4")).unwrap().1);
    }

    #[test]
    fn errors() {
        let inh = A2.replace("gen = y 2 1", "gen = y 2 1\nrelation = x^2 - y^2");
        assert!(matches!(parse_instance(&inh), Err(InstanceError::Presentation(PresentationError::Inhomogeneous(_)))));
        let wl = A2.replace("gen = y 2 1", "gen = y 2,1 1");
        assert!(matches!(parse_instance(&wl), Err(InstanceError::Presentation(PresentationError::WeightLength(..)))));
        let mixed = A2.replace("rank = 1", "rank = 2").replace("gen = x 1 1", "gen = x 1,0 1").replace("gen = y 2 1", "gen = y 0,1 1");
        let e = parse_instance(&mixed.replace("z = -1", "z = zeta(3) zeta(4)")).unwrap_err();
        assert!(e.is_backend());
        assert!(matches!(parse_instance("[nonsense]\n"), Err(InstanceError::Parse(_))));
    }

    #[test]
    fn trivial_group_point() {
        let i = parse_instance("[space]\n[group]\nrank = 0\n[point]\n").unwrap();
        assert_eq!(i.p.n(), 0);
        assert_eq!(i.z.rank(), 0);
    }
}
