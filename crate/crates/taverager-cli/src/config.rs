//! JSON configuration schema and loading.
//!
//! Example:
//! ```json
//! {
//!   "preset": { "family": "A2" },
//!   "window": { "lo": -1, "hi": 2 },
//!   "t_structures": [
//!     { "name": "ts1", "generators": ["M[dv=1,1]@d0"], "sigma_stable": true }
//!   ],
//!   "group": { "generators": [ { "maps": [[1, 3], [2, 2], [3, 1]] } ] },
//!   "options": { "order": [0, 1, 2], "budget": 64 }
//! }
//! ```
//! Vertices in group maps and domestic trace patterns are 1-based, matching
//! the textual object names.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use anyhow::{anyhow, bail, Context};
use serde::Deserialize;

use taverager::action::{GroupAction, Perm};
use taverager::aisle::TStructure;
use taverager::domestic::{DomesticTSTrace, EventuallyPeriodicSet, TubeTrace};
use taverager::engine::Engine;
use taverager::id::{IndecId, Obj};
use taverager::quiver::{Family, QuiverPreset};
use taverager::tube::TubeObj;
use taverager::window::{ARWindow, Caps};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub preset: PresetCfg,
    pub window: WindowCfg,
    #[serde(default)]
    pub t_structures: Vec<TStructureCfg>,
    #[serde(default)]
    pub group: Option<GroupCfg>,
    #[serde(default)]
    pub traces: Vec<TraceCfg>,
    #[serde(default)]
    pub options: Options,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PresetCfg {
    pub family: String,
    /// Arrow list overriding the default orientation, 1-based vertex pairs.
    #[serde(default)]
    pub orientation: Option<Vec<(usize, usize)>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowCfg {
    pub lo: i32,
    pub hi: i32,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TStructureCfg {
    pub name: String,
    pub generators: Vec<String>,
    #[serde(default)]
    pub sigma_stable: bool,
    /// Claim that the generator list is already the full aisle closure;
    /// validation fails with a witness when the claim is wrong.
    #[serde(default)]
    pub closed: bool,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupCfg {
    pub generators: Vec<GroupGenCfg>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupGenCfg {
    /// Total vertex permutation as [src, dst] pairs, 1-based.
    pub maps: Vec<(usize, usize)>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceCfg {
    pub name: String,
    pub components: Vec<ComponentTraceCfg>,
    #[serde(default)]
    pub tubes: Vec<TubeTraceCfg>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentTraceCfg {
    /// "N" (preinjective) or "P" (postprojective).
    pub component: String,
    pub degree: i32,
    /// Pairs [vertex (1-based), residue of the τ-exponent mod period].
    #[serde(default)]
    pub pattern: Vec<(usize, usize)>,
    #[serde(default = "one")]
    pub period: usize,
    #[serde(default)]
    pub threshold: u32,
    #[serde(default)]
    pub explicit: Vec<String>,
}

fn one() -> usize {
    1
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TubeTraceCfg {
    pub tube: String,
    /// "cofinite" or "wing-complement".
    pub kind: String,
    /// Anchor object for wing complements, e.g. "T[s=1;l=1]".
    #[serde(default)]
    pub anchor: Option<String>,
    #[serde(default = "one")]
    pub rho: usize,
}

#[derive(Debug, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct Options {
    /// Indices into t_structures fixing the truncation order.
    #[serde(default)]
    pub order: Option<Vec<usize>>,
    #[serde(default)]
    pub budget: Option<usize>,
}

impl Config {
    pub fn load(path: &Path) -> anyhow::Result<Config> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        let cfg: Config = serde_json::from_str(&text)
            .with_context(|| format!("schema error in {}", path.display()))?;
        Ok(cfg)
    }

    pub fn preset(&self) -> anyhow::Result<QuiverPreset> {
        let family = Family::parse(&self.preset.family)?;
        Ok(match &self.preset.orientation {
            Some(arrows) => {
                let zero_based: Vec<(usize, usize)> = arrows
                    .iter()
                    .map(|&(s, t)| {
                        if s == 0 || t == 0 {
                            bail!("orientation vertices are 1-based");
                        }
                        Ok((s - 1, t - 1))
                    })
                    .collect::<anyhow::Result<_>>()?;
                QuiverPreset::with_orientation(family, zero_based)
            }
            None => QuiverPreset::new(family),
        })
    }

    pub fn engine(&self) -> anyhow::Result<Engine> {
        let w = ARWindow::build(self.preset()?, self.window.lo, self.window.hi, Caps::default())?;
        Ok(Engine::new(w)?)
    }

    pub fn t_structures(&self, eng: &Engine) -> anyhow::Result<Vec<TStructure>> {
        self.t_structures
            .iter()
            .map(|cfg| {
                let gens: Vec<IndecId> = cfg
                    .generators
                    .iter()
                    .map(|s| Ok(IndecId::parse(s)?))
                    .collect::<anyhow::Result<_>>()?;
                for g in &gens {
                    if !eng.window.contains(g) {
                        bail!("t-structure `{}`: generator {g} is not in the window", cfg.name);
                    }
                }
                Ok(TStructure::from_generators(eng, &cfg.name, &gens, cfg.sigma_stable)?)
            })
            .collect()
    }

    pub fn group(&self, win: &ARWindow) -> anyhow::Result<Option<GroupAction>> {
        let Some(gcfg) = &self.group else { return Ok(None) };
        let mut generators = Vec::new();
        for gen in &gcfg.generators {
            let zero_based: Vec<(usize, usize)> = gen
                .maps
                .iter()
                .map(|&(s, t)| {
                    if s == 0 || t == 0 {
                        bail!("group map vertices are 1-based");
                    }
                    Ok((s - 1, t - 1))
                })
                .collect::<anyhow::Result<_>>()?;
            generators.push(Perm::from_vertex_map(win, &zero_based)?);
        }
        Ok(Some(GroupAction { generators }))
    }

    pub fn traces(&self) -> anyhow::Result<Vec<DomesticTSTrace>> {
        self.traces
            .iter()
            .map(|t| {
                let mut components = BTreeMap::new();
                for c in &t.components {
                    let key = (c.component.clone(), c.degree);
                    let mut pattern = BTreeSet::new();
                    for &(v, r) in &c.pattern {
                        if v == 0 {
                            bail!("pattern vertices are 1-based");
                        }
                        pattern.insert((v - 1, r));
                    }
                    let mut set =
                        EventuallyPeriodicSet::new(key.clone(), pattern, c.period, c.threshold);
                    for e in &c.explicit {
                        set.explicit.insert(IndecId::parse(e)?);
                    }
                    if components.insert(key.clone(), set).is_some() {
                        bail!("duplicate component trace {}@d{}", key.0, key.1);
                    }
                }
                let mut tubes = BTreeMap::new();
                for tc in &t.tubes {
                    let trace = match tc.kind.as_str() {
                        "cofinite" => TubeTrace::Cofinite,
                        "wing-complement" => {
                            let anchor = tc
                                .anchor
                                .as_deref()
                                .ok_or_else(|| anyhow!("wing-complement needs an anchor"))?;
                            TubeTrace::WingComplement(parse_tube_obj(anchor, tc.rho)?)
                        }
                        other => bail!("unknown tube trace kind `{other}`"),
                    };
                    tubes.insert(tc.tube.clone(), trace);
                }
                Ok(DomesticTSTrace { name: t.name.clone(), components, tubes })
            })
            .collect()
    }

    /// T-structures arranged by the configured or requested order.
    pub fn ordered<'a>(
        &self,
        all: &'a [TStructure],
        cli_order: Option<&[usize]>,
    ) -> anyhow::Result<Vec<&'a TStructure>> {
        let order: Vec<usize> = match cli_order.or(self.options.order.as_deref()) {
            Some(o) => o.to_vec(),
            None => (0..all.len()).collect(),
        };
        order
            .iter()
            .map(|&i| all.get(i).ok_or_else(|| anyhow!("order index {i} out of range")))
            .collect()
    }
}

/// Formal sums of object names joined by `+`; `0` is the zero object.
pub fn parse_obj(s: &str) -> anyhow::Result<Obj> {
    let s = s.trim();
    if s == "0" {
        return Ok(Obj::zero());
    }
    let ids: Vec<IndecId> = s
        .split('+')
        .map(|p| Ok(IndecId::parse(p.trim())?))
        .collect::<anyhow::Result<_>>()?;
    Ok(Obj::from_vec(ids))
}

/// Tube objects in the textual form `T[s=a;l=n]` (optionally `@d...`), with
/// the rank supplied separately.
pub fn parse_tube_obj(s: &str, rho: usize) -> anyhow::Result<TubeObj> {
    let id = IndecId::parse(&normalize_tube_name(s))?;
    match id {
        IndecId::Tube { socle, length, degree, .. } => {
            if socle == 0 || length == 0 {
                bail!("socle and length are 1-based in `{s}`");
            }
            if rho == 0 {
                bail!("tube rank must be positive");
            }
            Ok(TubeObj::new(rho, socle as i64, length as usize, degree))
        }
        _ => bail!("`{s}` is not a tube object"),
    }
}

/// Accepts both quasi-simple shorthands `s2` and full names `T[s=2;l=1]`.
fn normalize_tube_name(s: &str) -> String {
    let s = s.trim();
    if let Some(ix) = s.strip_prefix('s') {
        if ix.chars().all(|c| c.is_ascii_digit()) && !ix.is_empty() {
            return format!("T[λ;s={ix};l=1]");
        }
    }
    if s.starts_with("T[") && !s.contains('λ') && !s.contains("lambda") {
        return s.replacen("T[", "T[λ;", 1);
    }
    s.to_string()
}
