//! Minimum distance of CSS codes: exhaustive enumeration for small codes and
//! a decoder-driven randomized upper bound for the rest.
//!
//! A Z-type logical operator is a vector in `ker H_X` outside the rowspace
//! of `H_Z`; X-type is symmetric.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::codes::ParityChecks;
use crate::decoder::{channel_llr, BpOsdDecoder, DecoderConfig};
use crate::error::{Error, Result};
use crate::gf2::{
    flip_bit, pack_bits, popcount, unpack_bits, words_for, xor_into, BinMatrix, RowEchelon,
};
use crate::seeding::batch_rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LogicalKind {
    X,
    Z,
}

impl LogicalKind {
    pub const BOTH: [LogicalKind; 2] = [LogicalKind::Z, LogicalKind::X];
}

/// Check matrices with cached rowspace echelon forms.
#[derive(Clone, Debug)]
pub struct LogicalTestContext {
    h_x: BinMatrix,
    h_z: BinMatrix,
    x_rowspace: RowEchelon,
    z_rowspace: RowEchelon,
    /// `(l, m)` when both blocks commute with the torus translations, which
    /// lets enumeration pin one support element.
    translation: Option<(usize, usize)>,
}

impl LogicalTestContext {
    pub fn new(h_x: &BinMatrix, h_z: &BinMatrix) -> Result<Self> {
        if h_x.cols() != h_z.cols() {
            return Err(Error::DimensionMismatch(format!(
                "H_X has {} columns, H_Z has {}",
                h_x.cols(),
                h_z.cols()
            )));
        }
        if !h_x.matmul(&h_z.transpose())?.is_zero() {
            return Err(Error::Integrity("H_X H_Z^T != 0".into()));
        }
        Ok(Self {
            x_rowspace: RowEchelon::new(h_x),
            z_rowspace: RowEchelon::new(h_z),
            h_x: h_x.clone(),
            h_z: h_z.clone(),
            translation: None,
        })
    }

    /// Context for a BB code, with the translation symmetry enabled.
    pub fn from_checks(pc: &ParityChecks) -> Self {
        let mut ctx = Self::new(&pc.h_x, &pc.h_z).expect("BB checks satisfy the CSS condition");
        ctx.translation = Some((pc.spec.l, pc.spec.m));
        ctx
    }

    pub fn n(&self) -> usize {
        self.h_x.cols()
    }

    pub fn k(&self) -> usize {
        self.n() - self.x_rowspace.rank() - self.z_rowspace.rank()
    }

    pub fn h_x(&self) -> &BinMatrix {
        &self.h_x
    }

    pub fn h_z(&self) -> &BinMatrix {
        &self.h_z
    }

    /// The matrix a logical of this kind must be annihilated by, and the
    /// stabilizer generators of the same kind.
    pub fn checks_for(&self, kind: LogicalKind) -> (&BinMatrix, &BinMatrix) {
        match kind {
            LogicalKind::Z => (&self.h_x, &self.h_z),
            LogicalKind::X => (&self.h_z, &self.h_x),
        }
    }

    fn stabilizers(&self, kind: LogicalKind) -> &RowEchelon {
        match kind {
            LogicalKind::Z => &self.z_rowspace,
            LogicalKind::X => &self.x_rowspace,
        }
    }

    pub fn is_logical(&self, v: &[u8], kind: LogicalKind) -> Result<bool> {
        if v.len() != self.n() {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} for a code of length {}",
                v.len(),
                self.n()
            )));
        }
        Ok(self.is_logical_words(&pack_bits(v), kind))
    }

    pub(crate) fn is_logical_words(&self, v: &[u64], kind: LogicalKind) -> bool {
        let (check, _) = self.checks_for(kind);
        check.mul_words(v).iter().all(|&w| w == 0) && !self.stabilizers(kind).contains(v)
    }

    pub(crate) fn in_stabilizer_space(&self, v: &[u64], kind: LogicalKind) -> bool {
        self.stabilizers(kind).contains(v)
    }

    /// Representatives of a basis of logical operators of `kind`.
    pub fn logical_basis(&self, kind: LogicalKind) -> Vec<Vec<u64>> {
        let (check, _) = self.checks_for(kind);
        let kernel = check.kernel_basis();
        let mut span = self.stabilizers(kind).clone();
        let mut out = Vec::new();
        for r in 0..kernel.rows() {
            let v = pack_bits(&kernel.row_bits(r));
            if span.insert(&v) {
                out.push(v);
            }
        }
        debug_assert_eq!(out.len(), self.k());
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExactDistance {
    Found {
        distance: usize,
        witness: Vec<u8>,
        kind: LogicalKind,
    },
    /// No logical operator of weight up to `w_max` exists.
    Exceeds(usize),
}

/// Default cap on the number of enumerated partial supports.
pub const DEFAULT_EXACT_BUDGET: u64 = 20_000_000_000;

fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc.min(u64::MAX as u128) as u64
}

/// Exhaustive minimum distance over both logical kinds, searching weights
/// `1..=w_max` in increasing order.
///
/// Supports of weight `w` are enumerated as ascending `(w-1)`-subsets; the
/// final element is looked up by syndrome. Under the BB translation
/// symmetry the smallest element is pinned to the first qubit of a block.
pub fn exact_distance(
    ctx: &LogicalTestContext,
    w_max: usize,
    budget: u64,
) -> Result<ExactDistance> {
    exact_distance_of_kinds(ctx, &LogicalKind::BOTH, w_max, budget)
}

/// As [`exact_distance`], restricted to logicals of the given kinds.
pub fn exact_distance_of_kinds(
    ctx: &LogicalTestContext,
    kinds: &[LogicalKind],
    w_max: usize,
    budget: u64,
) -> Result<ExactDistance> {
    if w_max == 0 {
        return Err(Error::InvalidArgument("w_max must be at least 1".into()));
    }
    if ctx.k() == 0 {
        return Err(Error::NoLogicals);
    }
    let n = ctx.n();
    let mut spent: u64 = 0;
    let searchers: Vec<KindSearch> = kinds
        .iter()
        .map(|&kind| KindSearch::new(ctx, kind))
        .collect::<Result<_>>()?;
    for w in 1..=w_max.min(n) {
        let cost = match (ctx.translation, w) {
            (_, 1) => n as u64,
            (Some((l, m)), _) => binomial(n - 1, w - 2) + binomial(l * m - 1, w - 2),
            (None, _) => binomial(n, w - 1),
        } * kinds.len() as u64;
        spent = spent.saturating_add(cost);
        if spent > budget {
            return Err(Error::BudgetExceeded(format!(
                "weight {w} needs {spent} enumeration steps in total, budget is {budget}"
            )));
        }
        for s in &searchers {
            if let Some(support) = s.search_weight(ctx, w) {
                let mut witness = vec![0u8; n];
                for q in support {
                    witness[q] = 1;
                }
                return Ok(ExactDistance::Found {
                    distance: w,
                    witness,
                    kind: s.kind,
                });
            }
        }
    }
    Ok(ExactDistance::Exceeds(w_max))
}

struct KindSearch {
    kind: LogicalKind,
    col_syndrome: Vec<u128>,
    by_syndrome: HashMap<u128, Vec<usize>>,
}

impl KindSearch {
    fn new(ctx: &LogicalTestContext, kind: LogicalKind) -> Result<Self> {
        let (check, _) = ctx.checks_for(kind);
        if check.rows() > 128 {
            return Err(Error::InvalidArgument(format!(
                "exhaustive search supports at most 128 checks, got {}",
                check.rows()
            )));
        }
        let col_syndrome: Vec<u128> = (0..check.cols())
            .map(|c| {
                (0..check.rows())
                    .filter(|&r| check.get(r, c))
                    .fold(0u128, |acc, r| acc | 1 << r)
            })
            .collect();
        let mut by_syndrome: HashMap<u128, Vec<usize>> = HashMap::new();
        for (c, &s) in col_syndrome.iter().enumerate() {
            by_syndrome.entry(s).or_default().push(c);
        }
        Ok(Self {
            kind,
            col_syndrome,
            by_syndrome,
        })
    }

    /// Lexicographically first logical support of weight exactly `w`.
    fn search_weight(&self, ctx: &LogicalTestContext, w: usize) -> Option<Vec<usize>> {
        let n = ctx.n();
        if w == 1 {
            return (0..n).find_map(|c| self.try_complete(ctx, &[], 0, c));
        }
        let starts: Vec<usize> = match ctx.translation {
            Some((l, m)) => vec![0, l * m],
            None => (0..n).collect(),
        };
        starts.iter().find_map(|&first| {
            let acc = self.col_syndrome[first];
            if w == 2 {
                return self.lookup(ctx, &[first], acc);
            }
            (first + 1..n).into_par_iter().find_map_first(|second| {
                let mut chosen = vec![first, second];
                self.descend(
                    ctx,
                    w - 2,
                    second + 1,
                    acc ^ self.col_syndrome[second],
                    &mut chosen,
                )
            })
        })
    }

    /// `remaining` more elements to place, the last one by lookup.
    fn descend(
        &self,
        ctx: &LogicalTestContext,
        remaining: usize,
        from: usize,
        acc: u128,
        chosen: &mut Vec<usize>,
    ) -> Option<Vec<usize>> {
        if remaining == 1 {
            return self.lookup(ctx, chosen, acc);
        }
        let n = ctx.n();
        for i in from..n.saturating_sub(remaining - 1) {
            chosen.push(i);
            let hit = self.descend(
                ctx,
                remaining - 1,
                i + 1,
                acc ^ self.col_syndrome[i],
                chosen,
            );
            chosen.pop();
            if hit.is_some() {
                return hit;
            }
        }
        None
    }

    fn lookup(&self, ctx: &LogicalTestContext, chosen: &[usize], acc: u128) -> Option<Vec<usize>> {
        let last = *chosen.last().expect("nonempty prefix");
        let cands = self.by_syndrome.get(&acc)?;
        let start = cands.partition_point(|&c| c <= last);
        cands[start..]
            .iter()
            .find_map(|&c| self.try_complete(ctx, chosen, acc, c))
    }

    fn try_complete(
        &self,
        ctx: &LogicalTestContext,
        chosen: &[usize],
        acc: u128,
        c: usize,
    ) -> Option<Vec<usize>> {
        if acc != self.col_syndrome[c] {
            return None;
        }
        let mut words = vec![0u64; words_for(ctx.n())];
        for &q in chosen.iter().chain(std::iter::once(&c)) {
            flip_bit(&mut words, q);
        }
        if ctx.in_stabilizer_space(&words, self.kind) {
            return None;
        }
        let mut support = chosen.to_vec();
        support.push(c);
        Some(support)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DistanceMethod {
    Exhaustive,
    DecoderProbe,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProbeStatus {
    Completed,
    /// Stopped early because a logical lighter than the threshold was found.
    BelowThreshold,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistanceReport {
    pub d_upper: Option<usize>,
    pub d_exact: Option<usize>,
    pub witness: Option<Vec<u8>>,
    pub witness_kind: Option<LogicalKind>,
    pub trials_used: usize,
    pub method: DistanceMethod,
    pub status: ProbeStatus,
}

impl DistanceReport {
    /// Checks that the witness is a logical operator of the reported weight.
    pub fn verify(&self, ctx: &LogicalTestContext) -> Result<()> {
        match (&self.witness, self.d_upper, self.witness_kind) {
            (None, None, _) => Ok(()),
            (Some(w), Some(d), Some(kind)) => {
                let weight = w.iter().filter(|&&b| b == 1).count();
                if weight != d || !ctx.is_logical(w, kind)? {
                    return Err(Error::Integrity(format!(
                        "witness of weight {weight} does not certify d <= {d}"
                    )));
                }
                Ok(())
            }
            _ => Err(Error::Integrity(
                "witness and bound are inconsistent".into(),
            )),
        }
    }
}

/// Wraps an exhaustive result as a report.
pub fn exact_report(ctx: &LogicalTestContext, w_max: usize, budget: u64) -> Result<DistanceReport> {
    let report = match exact_distance(ctx, w_max, budget)? {
        ExactDistance::Found {
            distance,
            witness,
            kind,
        } => DistanceReport {
            d_upper: Some(distance),
            d_exact: Some(distance),
            witness: Some(witness),
            witness_kind: Some(kind),
            trials_used: 0,
            method: DistanceMethod::Exhaustive,
            status: ProbeStatus::Completed,
        },
        ExactDistance::Exceeds(_) => DistanceReport {
            d_upper: None,
            d_exact: None,
            witness: None,
            witness_kind: None,
            trials_used: 0,
            method: DistanceMethod::Exhaustive,
            status: ProbeStatus::Completed,
        },
    };
    Ok(report)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeConfig {
    pub trials: usize,
    /// Stop as soon as a logical lighter than this is found.
    pub tau_d: usize,
    pub decoder: DecoderConfig,
    pub seed: u64,
    pub batch_size: usize,
    /// Batches evaluated between early-exit checks. Fixed so that results do
    /// not depend on the thread count.
    pub batches_per_round: usize,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        Self {
            trials: 10_000,
            tau_d: 1,
            decoder: DecoderConfig {
                max_iterations: 50,
                ..DecoderConfig::default()
            },
            seed: 0,
            batch_size: 64,
            batches_per_round: 16,
        }
    }
}

/// Per-kind data shared by all probe trials.
struct ProbeKind {
    kind: LogicalKind,
    decoder: BpOsdDecoder,
    stabilizer_rows: Vec<Vec<u64>>,
    dual_logicals: Vec<Vec<u64>>,
}

/// Decoder-driven upper bound on the distance.
///
/// Each trial targets one logical kind and runs one of two probes:
/// * random error: sample an error (iid flips at a rate from a fixed grid, or
///   a uniformly random support of a small fixed weight), decode its
///   syndrome, and keep the residual when it is a logical operator;
/// * constrained decode: pick a random nontrivial logical `L` of the other
///   kind and decode the system `[H; L] v = (0, 1)` under randomly perturbed
///   priors. Every solution anticommutes with `L`, so it is a logical.
///
/// Candidates are then shortened greedily by adding stabilizer generators.
pub fn distance_upperbound(ctx: &LogicalTestContext, cfg: &ProbeConfig) -> DistanceReport {
    let kinds: Vec<ProbeKind> = LogicalKind::BOTH
        .iter()
        .map(|&kind| {
            let (check, stab) = ctx.checks_for(kind);
            let dual = match kind {
                LogicalKind::Z => LogicalKind::X,
                LogicalKind::X => LogicalKind::Z,
            };
            ProbeKind {
                kind,
                decoder: BpOsdDecoder::new(check, cfg.decoder),
                stabilizer_rows: (0..stab.rows())
                    .map(|r| pack_bits(&stab.row_bits(r)))
                    .collect(),
                dual_logicals: ctx.logical_basis(dual),
            }
        })
        .collect();
    let mut best: Option<(usize, Vec<u64>, LogicalKind)> = None;
    let batch_size = cfg.batch_size.max(1);
    let total_batches = cfg.trials.div_ceil(batch_size);
    let mut trials_used = 0;
    let mut status = ProbeStatus::Completed;
    if ctx.k() > 0 {
        let mut batch = 0;
        while batch < total_batches {
            let end = (batch + cfg.batches_per_round.max(1)).min(total_batches);
            let results: Vec<Option<(usize, Vec<u64>, LogicalKind)>> = (batch..end)
                .into_par_iter()
                .map(|b| {
                    let first = b * batch_size;
                    let count = batch_size.min(cfg.trials - first);
                    run_batch(ctx, &kinds, cfg, b as u64, first, count)
                })
                .collect();
            trials_used += (batch..end)
                .map(|b| batch_size.min(cfg.trials - b * batch_size))
                .sum::<usize>();
            for r in results.into_iter().flatten() {
                if best.as_ref().is_none_or(|(w, _, _)| r.0 < *w) {
                    best = Some(r);
                }
            }
            batch = end;
            if best.as_ref().is_some_and(|(w, _, _)| *w < cfg.tau_d) {
                status = ProbeStatus::BelowThreshold;
                break;
            }
        }
    }
    let n = ctx.n();
    let report = DistanceReport {
        d_upper: best.as_ref().map(|(w, _, _)| *w),
        d_exact: None,
        witness: best.as_ref().map(|(_, v, _)| unpack_bits(v, n)),
        witness_kind: best.as_ref().map(|(_, _, k)| *k),
        trials_used,
        method: DistanceMethod::DecoderProbe,
        status,
    };
    debug_assert!(report.verify(ctx).is_ok());
    report
}

fn run_batch(
    ctx: &LogicalTestContext,
    kinds: &[ProbeKind],
    cfg: &ProbeConfig,
    batch: u64,
    first_trial: usize,
    count: usize,
) -> Option<(usize, Vec<u64>, LogicalKind)> {
    let mut rng = batch_rng(cfg.seed, batch);
    let mut best: Option<(usize, Vec<u64>, LogicalKind)> = None;
    for t in first_trial..first_trial + count {
        let pk = &kinds[t % 2];
        let candidate = if (t / 2) % 2 == 0 {
            constrained_probe(ctx, pk, cfg, &mut rng)
        } else {
            random_error_probe(ctx, pk, cfg, &mut rng)
        };
        if let Some(mut v) = candidate {
            shorten(&mut v, &pk.stabilizer_rows);
            let w = popcount(&v);
            if best.as_ref().is_none_or(|(bw, _, _)| w < *bw) {
                best = Some((w, v, pk.kind));
            }
        }
    }
    best
}

const ERROR_RATE_GRID: [f64; 4] = [0.02, 0.05, 0.08, 0.12];

fn random_error_probe(
    ctx: &LogicalTestContext,
    pk: &ProbeKind,
    cfg: &ProbeConfig,
    rng: &mut ChaCha8Rng,
) -> Option<Vec<u64>> {
    let n = ctx.n();
    let mut e = vec![0u8; n];
    if rng.gen_bool(0.5) {
        let p = ERROR_RATE_GRID[rng.gen_range(0..ERROR_RATE_GRID.len())];
        for b in e.iter_mut() {
            *b = rng.gen_bool(p) as u8;
        }
    } else {
        let hi = cfg.tau_d.max(2).min(n);
        let w = rng.gen_range((hi / 2).max(1)..=hi);
        let mut idx: Vec<usize> = (0..n).collect();
        idx.shuffle(rng);
        for &q in &idx[..w] {
            e[q] = 1;
        }
    }
    let check = pk.decoder.matrix();
    let syndrome = check.mul_bits(&e).ok()?;
    let out = pk.decoder.decode(&syndrome);
    let mut residual = pack_bits(&e);
    xor_into(&mut residual, &pack_bits(&out.estimate));
    ctx.is_logical_words(&residual, pk.kind).then_some(residual)
}

fn constrained_probe(
    ctx: &LogicalTestContext,
    pk: &ProbeKind,
    cfg: &ProbeConfig,
    rng: &mut ChaCha8Rng,
) -> Option<Vec<u64>> {
    let n = ctx.n();
    let k = pk.dual_logicals.len();
    if k == 0 {
        return None;
    }
    let mut dual = vec![0u64; words_for(n)];
    while dual.iter().all(|&w| w == 0) {
        for l in &pk.dual_logicals {
            if rng.gen_bool(0.5) {
                xor_into(&mut dual, l);
            }
        }
    }
    let check = pk.decoder.matrix();
    let augmented = check
        .vstack(&BinMatrix::row_vector(&unpack_bits(&dual, n)))
        .ok()?;
    let mut syndrome = vec![0u8; augmented.rows()];
    *syndrome.last_mut().unwrap() = 1;
    let base = channel_llr(cfg.decoder.prior_p);
    let llr: Vec<f64> = (0..n).map(|_| base * rng.gen_range(0.25..1.75)).collect();
    let out = BpOsdDecoder::new(&augmented, cfg.decoder).decode_with_llr(&syndrome, &llr);
    let v = pack_bits(&out.estimate);
    ctx.is_logical_words(&v, pk.kind).then_some(v)
}

/// Greedily adds stabilizer generators while that lowers the weight.
fn shorten(v: &mut [u64], generators: &[Vec<u64>]) {
    let mut weight = popcount(v);
    let mut scratch = v.to_vec();
    loop {
        let mut improved = false;
        for g in generators {
            scratch.copy_from_slice(v);
            xor_into(&mut scratch, g);
            let w = popcount(&scratch);
            if w < weight {
                v.copy_from_slice(&scratch);
                weight = w;
                improved = true;
            }
        }
        if !improved {
            break;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::{build_checks, CodeSpec};

    fn ctx(l: usize, m: usize, a: &str, b: &str, form: &str) -> LogicalTestContext {
        LogicalTestContext::from_checks(
            &build_checks(&CodeSpec::parse(l, m, a, b, form).unwrap()).unwrap(),
        )
    }

    #[test]
    fn stabilizers_are_not_logical() {
        let c = ctx(3, 3, "1+x+y", "1+x2+y2", "xy");
        assert!(!c.is_logical(&[0; 18], LogicalKind::Z).unwrap());
        for r in 0..c.h_z().rows() {
            assert!(!c.is_logical(&c.h_z().row_bits(r), LogicalKind::Z).unwrap());
            assert!(!c.is_logical(&c.h_x().row_bits(r), LogicalKind::X).unwrap());
        }
        assert!(c.is_logical(&[0; 5], LogicalKind::Z).is_err());
        assert_eq!(c.logical_basis(LogicalKind::Z).len(), 4);
    }

    #[test]
    fn exact_18_4_4() {
        let c = ctx(3, 3, "1+x+y", "1+x2+y2", "xy");
        match exact_distance(&c, 6, DEFAULT_EXACT_BUDGET).unwrap() {
            ExactDistance::Found {
                distance,
                witness,
                kind,
            } => {
                assert_eq!(distance, 4);
                assert!(c.is_logical(&witness, kind).unwrap());
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(
            exact_distance(&c, 3, DEFAULT_EXACT_BUDGET).unwrap(),
            ExactDistance::Exceeds(3)
        );
    }

    #[test]
    fn symmetric_and_plain_enumeration_agree() {
        let sym = ctx(3, 3, "1+x+y", "1+x2+y2", "xy");
        let plain = LogicalTestContext::new(sym.h_x(), sym.h_z()).unwrap();
        let d = |c: &LogicalTestContext| match exact_distance(c, 6, DEFAULT_EXACT_BUDGET).unwrap() {
            ExactDistance::Found { distance, .. } => distance,
            other => panic!("{other:?}"),
        };
        assert_eq!(d(&sym), d(&plain));
    }

    #[test]
    fn trivial_code_has_no_logicals() {
        let c = ctx(3, 4, "x", "y2", "xy");
        assert!(matches!(
            exact_distance(&c, 3, DEFAULT_EXACT_BUDGET),
            Err(Error::NoLogicals)
        ));
    }

    #[test]
    fn budget_is_enforced() {
        let c = ctx(3, 5, "1+p+p2", "p+p3+p8", "pi");
        assert!(matches!(
            exact_distance(&c, 6, 1000),
            Err(Error::BudgetExceeded(_))
        ));
    }

    #[test]
    fn probe_bound_is_sound_and_deterministic() {
        let c = ctx(3, 3, "1+x+y", "1+x2+y2", "xy");
        let cfg = ProbeConfig {
            trials: 400,
            seed: 17,
            ..ProbeConfig::default()
        };
        let a = distance_upperbound(&c, &cfg);
        let b = distance_upperbound(&c, &cfg);
        assert_eq!(a, b);
        a.verify(&c).unwrap();
        assert_eq!(a.d_upper, Some(4));
        assert_eq!(a.status, ProbeStatus::Completed);
    }

    #[test]
    fn probe_stops_below_threshold() {
        let c = ctx(3, 3, "1+x+y", "1+x2+y2", "xy");
        let cfg = ProbeConfig {
            trials: 100_000,
            tau_d: 6,
            seed: 1,
            ..ProbeConfig::default()
        };
        let r = distance_upperbound(&c, &cfg);
        assert_eq!(r.status, ProbeStatus::BelowThreshold);
        assert!(r.trials_used < cfg.trials);
        assert!(r.d_upper.unwrap() >= 4);
    }

    #[test]
    fn shorten_reduces_weight() {
        let gens = vec![vec![0b0111u64]];
        let mut v = vec![0b0110u64];
        shorten(&mut v, &gens);
        assert_eq!(v, vec![0b0001]);
    }
}
