//! Searches for BB codes of the restricted form
//! `a = x^a0 + y^b0 + y^c0`, `b = y^d0 + x^e0 + x^f0`, and for coprime-BB
//! codes `a(π), b(π)` with a prescribed `gcd(a, b, π^N + 1) = g`.
//!
//! Candidates are pruned to one representative per equivalence class before
//! the expensive steps (rank, connectivity, distance probing).

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::ops::Range;

use itertools::Itertools;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::codes::{
    build_checks, dimension, equivalent_transforms, is_connected, CodeForm, CodeParams, CodeSpec,
    SpecDocument,
};
use crate::decoder::DecoderConfig;
use crate::distance::{distance_upperbound, LogicalTestContext, ProbeConfig};
use crate::error::{Error, Result};
use crate::polyring::{circulant_gcd, divisors, factorize_circulant, gcd_usize, BivPoly, UniPoly};
use crate::seeding::derive_seed;

/// Which divisors `g` of `π^N + 1` the coprime search visits.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub enum GRestriction {
    /// Every divisor with `τ_k ≤ 2 deg g ≤ N`.
    #[default]
    AllDivisors,
    /// Only irreducible factors of `π^N + 1`.
    Irreducible,
    /// Divisors with degree in the inclusive range.
    Degrees { min: usize, max: usize },
    /// One fixed divisor.
    Exactly(UniPoly),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchConfig {
    pub l: usize,
    pub m: usize,
    pub tau_k: usize,
    pub tau_d: usize,
    pub term_weight: usize,
    pub probe_trials: usize,
    pub probe_decoder: DecoderConfig,
    pub seed: u64,
    pub g_restriction: GRestriction,
    /// Discard codes whose Tanner graph is disconnected.
    pub connectivity_filter: bool,
    /// Keep one candidate per equivalence class.
    pub deduplicate: bool,
    /// Index of the first deduplicated candidate to evaluate.
    pub offset: usize,
    /// Maximum number of candidates to evaluate, starting at `offset`.
    pub limit: Option<usize>,
}

impl SearchConfig {
    pub fn new(l: usize, m: usize, tau_k: usize, tau_d: usize) -> Self {
        let probe = ProbeConfig::default();
        Self {
            l,
            m,
            tau_k,
            tau_d,
            term_weight: 3,
            probe_trials: probe.trials,
            probe_decoder: probe.decoder,
            seed: 0,
            g_restriction: GRestriction::AllDivisors,
            connectivity_filter: true,
            deduplicate: true,
            offset: 0,
            limit: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.l < 2 || self.m < 2 {
            return Err(Error::InvalidArgument(format!(
                "l = {}, m = {}; both must be at least 2",
                self.l, self.m
            )));
        }
        if self.tau_k < 2 || !self.tau_k.is_multiple_of(2) {
            return Err(Error::InvalidArgument(format!(
                "tau_k = {} must be even and at least 2",
                self.tau_k
            )));
        }
        if self.tau_d < 1 {
            return Err(Error::InvalidArgument("tau_d must be at least 1".into()));
        }
        if self.term_weight < 1 {
            return Err(Error::InvalidArgument(
                "term_weight must be at least 1".into(),
            ));
        }
        self.probe_decoder.validate()
    }

    fn probe_config(&self, candidate: usize) -> ProbeConfig {
        ProbeConfig {
            trials: self.probe_trials,
            tau_d: self.tau_d,
            decoder: self.probe_decoder,
            seed: derive_seed(self.seed, candidate as u64),
            ..ProbeConfig::default()
        }
    }
}

/// Dedup key shared by all members of an equivalence class.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CanonicalKey(String);

impl CanonicalKey {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for CanonicalKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchHit {
    pub spec: CodeSpec,
    pub params: CodeParams,
    pub canonical_key: CanonicalKey,
    /// The prescribed gcd for coprime hits.
    pub g: Option<UniPoly>,
}

/// The JSON form of a hit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HitRecord {
    pub spec: SpecDocument,
    pub n: usize,
    pub k: usize,
    pub d_upper: Option<usize>,
    pub witness_weight: Option<usize>,
    pub canonical_key: CanonicalKey,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub g: Option<String>,
}

impl SearchHit {
    pub fn record(&self) -> HitRecord {
        HitRecord {
            spec: self.spec.to_document(),
            n: self.params.n,
            k: self.params.k,
            d_upper: self.params.d_upper,
            witness_weight: self.params.d_upper,
            canonical_key: self.canonical_key.clone(),
            g: self.g.as_ref().map(|g| g.to_text('p')),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchOutcome {
    /// Hits sorted by canonical key.
    pub hits: Vec<SearchHit>,
    /// Number of candidates after deduplication.
    pub candidates: usize,
    /// Candidate indices evaluated in this run.
    pub evaluated: Range<usize>,
    /// Offset to pass to resume, when candidates remain.
    pub next_offset: Option<usize>,
}

/// All pairs of the restricted weight-3 form, in lexicographic exponent order.
/// Terms that coincide cancel, so a few pairs contain lighter polynomials.
pub fn enumerate_vanilla(l: usize, m: usize) -> Vec<(BivPoly, BivPoly)> {
    enumerate_vanilla_weighted(l, m, 3)
}

/// Generalization to `weight` terms: one pure-`x` term plus `weight − 1`
/// distinct pure-`y` terms in `a`, and the mirror image in `b`.
pub fn enumerate_vanilla_weighted(l: usize, m: usize, weight: usize) -> Vec<(BivPoly, BivPoly)> {
    let inner = weight.saturating_sub(1);
    let a_polys: Vec<BivPoly> = (0..l)
        .cartesian_product((0..m).combinations(inner).collect_vec())
        .map(|(a0, ys)| {
            BivPoly::from_terms(
                l,
                m,
                std::iter::once((a0, 0)).chain(ys.into_iter().map(|j| (0, j))),
            )
        })
        .collect();
    let b_polys: Vec<BivPoly> = (0..m)
        .cartesian_product((0..l).combinations(inner).collect_vec())
        .map(|(d0, xs)| {
            BivPoly::from_terms(
                l,
                m,
                std::iter::once((0, d0)).chain(xs.into_iter().map(|i| (i, 0))),
            )
        })
        .collect();
    a_polys
        .iter()
        .cartesian_product(&b_polys)
        .map(|(a, b)| (a.clone(), b.clone()))
        .collect()
}

/// The lexicographically smallest rotation `π^s p(π)`, as sorted exponents.
fn rotation_minimum(p: &UniPoly, n: usize) -> Vec<usize> {
    let exps = p.exponents();
    exps.iter()
        .map(|&s| {
            let mut rotated: Vec<usize> = exps.iter().map(|&e| (e + n - s) % n).collect();
            rotated.sort_unstable();
            rotated
        })
        .min()
        .unwrap_or_default()
}

fn join<T: fmt::Display>(items: impl IntoIterator<Item = T>) -> String {
    items.into_iter().map(|t| t.to_string()).join(",")
}

/// Smallest representation over the four equivalent transforms. For the `π`
/// form each polynomial is first reduced to its smallest rotation, since
/// `π^i a` and `π^j b` define an equivalent code.
pub fn canonical_key(spec: &CodeSpec) -> CanonicalKey {
    let (l, m) = (spec.l, spec.m);
    let transforms = equivalent_transforms(spec).expect("transforms of a valid spec are valid");
    match spec.form {
        CodeForm::Xy => {
            let best = transforms
                .iter()
                .map(|t| (t.a.terms().collect_vec(), t.b.terms().collect_vec()))
                .min()
                .unwrap();
            let fmt_terms =
                |ts: &[(usize, usize)]| join(ts.iter().map(|(i, j)| format!("{i}.{j}")));
            CanonicalKey(format!(
                "xy:{l}x{m}:{}|{}",
                fmt_terms(&best.0),
                fmt_terms(&best.1)
            ))
        }
        CodeForm::Pi { .. } => {
            let n = l * m;
            let best = transforms
                .iter()
                .map(|t| {
                    let (a, b) = t.univariate().expect("coprime spec has a univariate form");
                    (rotation_minimum(&a, n), rotation_minimum(&b, n))
                })
                .min()
                .unwrap();
            CanonicalKey(format!("pi:{l}x{m}:{}|{}", join(&best.0), join(&best.1)))
        }
    }
}

/// Keeps the first candidate of each equivalence class, preserving order.
pub fn remove_equivalent(candidates: Vec<CodeSpec>) -> Vec<CodeSpec> {
    let mut seen = HashSet::new();
    candidates
        .into_iter()
        .filter(|s| seen.insert(canonical_key(s)))
        .collect()
}

/// A candidate that passed the cheap filters and awaits distance probing.
struct Admitted {
    index: usize,
    spec: CodeSpec,
    k: usize,
    ctx: LogicalTestContext,
    g: Option<UniPoly>,
}

/// Runs connectivity and dimension filters on `specs[window]`; coprime
/// candidates must have `k = 2 deg g`.
fn admit(
    cfg: &SearchConfig,
    specs: &[(CodeSpec, Option<UniPoly>)],
    window: Range<usize>,
) -> Result<Vec<Admitted>> {
    let admitted: Vec<Option<Admitted>> = window
        .into_par_iter()
        .map(|index| -> Result<Option<Admitted>> {
            let (spec, g) = &specs[index];
            if cfg.connectivity_filter && !is_connected(spec)? {
                return Ok(None);
            }
            let pc = build_checks(spec)?;
            let k = dimension(&pc)?;
            if let Some(g) = g {
                let predicted = 2 * g.degree().unwrap_or(0);
                if predicted != k {
                    return Err(Error::Integrity(format!(
                        "{}: 2 deg g = {predicted} but rank gives k = {k}",
                        spec.to_document().a
                    )));
                }
            }
            if k < cfg.tau_k {
                return Ok(None);
            }
            Ok(Some(Admitted {
                index,
                spec: spec.clone(),
                k,
                ctx: LogicalTestContext::from_checks(&pc),
                g: g.clone(),
            }))
        })
        .collect::<Result<_>>()?;
    let mut admitted: Vec<Admitted> = admitted.into_iter().flatten().collect();
    // Highest rate first: the expensive probes run in this order.
    admitted.sort_by(|a, b| b.k.cmp(&a.k).then(a.index.cmp(&b.index)));
    Ok(admitted)
}

fn probe_and_emit(cfg: &SearchConfig, admitted: Vec<Admitted>) -> Vec<SearchHit> {
    let mut hits: Vec<SearchHit> = admitted
        .into_par_iter()
        .filter_map(|c| {
            let report = distance_upperbound(&c.ctx, &cfg.probe_config(c.index));
            if report.d_upper.is_some_and(|d| d < cfg.tau_d) {
                return None;
            }
            Some(SearchHit {
                params: CodeParams {
                    n: c.spec.n(),
                    k: c.k,
                    d_upper: report.d_upper,
                    d_exact: None,
                },
                canonical_key: canonical_key(&c.spec),
                spec: c.spec,
                g: c.g,
            })
        })
        .collect();
    hits.sort_by(|a, b| a.canonical_key.cmp(&b.canonical_key));
    hits
}

fn run(cfg: &SearchConfig, specs: Vec<(CodeSpec, Option<UniPoly>)>) -> Result<SearchOutcome> {
    let specs = if cfg.deduplicate {
        let mut seen = HashSet::new();
        specs
            .into_iter()
            .filter(|(s, _)| seen.insert(canonical_key(s)))
            .collect()
    } else {
        specs
    };
    let total = specs.len();
    let start = cfg.offset.min(total);
    let end = cfg
        .limit
        .map_or(total, |lim| start.saturating_add(lim).min(total));
    let admitted = admit(cfg, &specs, start..end)?;
    Ok(SearchOutcome {
        hits: probe_and_emit(cfg, admitted),
        candidates: total,
        evaluated: start..end,
        next_offset: (end < total).then_some(end),
    })
}

/// Vanilla BB search: enumerate the restricted form, prune equivalent pairs,
/// keep connected codes with `k ≥ τ_k` whose distance probe does not find a
/// logical lighter than `τ_d`.
pub fn search_bb(cfg: &SearchConfig) -> Result<SearchOutcome> {
    cfg.validate()?;
    if cfg.tau_k > cfg.l * cfg.m * 2 {
        return Ok(SearchOutcome {
            hits: Vec::new(),
            candidates: 0,
            evaluated: 0..0,
            next_offset: None,
        });
    }
    let specs = enumerate_vanilla_weighted(cfg.l, cfg.m, cfg.term_weight)
        .into_iter()
        .filter(|(a, b)| !a.is_empty() && !b.is_empty())
        .map(|(a, b)| CodeSpec::bivariate(cfg.l, cfg.m, a, b).map(|s| (s, None)))
        .collect::<Result<Vec<_>>>()?;
    run(cfg, specs)
}

/// The divisors `g` the coprime search visits, ascending by degree.
pub fn admissible_divisors(cfg: &SearchConfig) -> Result<Vec<UniPoly>> {
    let n = cfg.l * cfg.m;
    let min_deg = cfg.tau_k.div_ceil(2).max(1);
    let max_deg = n / 2;
    let fact = factorize_circulant(n);
    let gs = match &cfg.g_restriction {
        GRestriction::AllDivisors => divisors(&fact, min_deg, max_deg),
        GRestriction::Degrees { min, max } => divisors(&fact, min_deg.max(*min), max_deg.min(*max)),
        GRestriction::Irreducible => {
            let mut gs: Vec<UniPoly> = fact
                .factors
                .iter()
                .map(|(f, _)| f.clone())
                .filter(|f| (min_deg..=max_deg).contains(&f.degree().unwrap()))
                .collect();
            gs.sort();
            gs
        }
        GRestriction::Exactly(g) => {
            let deg = g.degree().ok_or(Error::ZeroPolynomial)?;
            if !UniPoly::circulant_modulus(n).rem(g)?.is_zero() {
                return Err(Error::InvalidArgument(format!(
                    "g = {g} does not divide π^{n} + 1"
                )));
            }
            if 2 * deg < cfg.tau_k {
                Vec::new()
            } else {
                vec![g.clone()]
            }
        }
    };
    Ok(gs)
}

/// Coprime-BB search: for each admissible `g`, pair weight-`w` multiples of
/// `g` (one per rotation class) whose common divisor with `π^N + 1` is
/// exactly `g`, so that every candidate has `k = 2 deg g`.
pub fn search_coprime(cfg: &SearchConfig) -> Result<SearchOutcome> {
    cfg.validate()?;
    let (l, m) = (cfg.l, cfg.m);
    if gcd_usize(l, m) != 1 {
        return Err(Error::NotCoprime { l, m });
    }
    let n = l * m;
    let gs = admissible_divisors(cfg)?;
    // Every weight-w polynomial up to rotation, with its gcd against π^N + 1.
    let w = cfg.term_weight;
    let reps: BTreeSet<Vec<usize>> = (1..n)
        .combinations(w.saturating_sub(1))
        .map(|rest| {
            let exps: Vec<usize> = std::iter::once(0).chain(rest).collect();
            rotation_minimum(&UniPoly::from_exponents(&exps), n)
        })
        .collect();
    let with_gcd: Vec<(UniPoly, UniPoly)> = reps
        .into_iter()
        .map(|exps| {
            let c = UniPoly::from_exponents(&exps);
            let h = circulant_gcd(&c, &c, n);
            (c, h)
        })
        .collect();
    let mut specs = Vec::new();
    for g in gs {
        let multiples: Vec<&(UniPoly, UniPoly)> = with_gcd
            .iter()
            .filter(|(_, h)| h.rem(&g).is_ok_and(|r| r.is_zero()))
            .collect();
        for (a, ha) in &multiples {
            for (b, hb) in &multiples {
                if ha.gcd(hb) == g {
                    specs.push((CodeSpec::coprime(l, m, a, b)?, Some(g.clone())));
                }
            }
        }
    }
    run(cfg, specs)
}

/// Distinct `[[n, k, d]]` triples among the hits, with `d` the probe bound.
pub fn parameter_triples(hits: &[SearchHit]) -> BTreeMap<(usize, usize, Option<usize>), usize> {
    let mut out = BTreeMap::new();
    for h in hits {
        *out.entry((h.params.n, h.params.k, h.params.d_upper))
            .or_insert(0) += 1;
    }
    out
}
