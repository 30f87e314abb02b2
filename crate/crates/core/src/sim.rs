//! Code-capacity Monte Carlo: iid bit and phase flips on the data qubits,
//! perfect syndromes, independent decoding of each error type.

use std::io::Write;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::codes::{build_checks, CodeSpec};
use crate::decoder::{BpOsdDecoder, DecoderConfig, OsdMode};
use crate::distance::{LogicalKind, LogicalTestContext};
use crate::error::{Error, Result};
use crate::gf2::{pack_bits, xor_into};
use crate::seeding::{batch_rng, derive_seed};

/// Two-sided 95% normal quantile.
pub const Z_95: f64 = 1.959964;

/// Which error types are sampled.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Channel {
    /// Independent X and Z flips, each with probability `p`.
    #[default]
    BitAndPhase,
    /// X flips only.
    BitOnly,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CapacityRun {
    pub spec: CodeSpec,
    pub p: f64,
    /// Decoder settings; the prior is replaced by `p`.
    pub decoder: DecoderConfig,
    pub stop_at_logical_errors: usize,
    pub max_shots: usize,
    pub seed: u64,
    pub channel: Channel,
    pub batch_size: usize,
    /// Batches run in parallel between stop checks.
    pub batches_per_round: usize,
}

impl CapacityRun {
    pub fn new(spec: CodeSpec, p: f64, seed: u64) -> Self {
        Self {
            spec,
            p,
            decoder: DecoderConfig::default(),
            stop_at_logical_errors: 100,
            max_shots: 10_000_000,
            seed,
            channel: Channel::BitAndPhase,
            batch_size: 64,
            batches_per_round: 32,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p > 0.0 && self.p < 0.5) {
            return Err(Error::InvalidArgument(format!(
                "p = {} must lie in (0, 0.5)",
                self.p
            )));
        }
        if self.stop_at_logical_errors < 1 {
            return Err(Error::InvalidArgument(
                "stop_at_logical_errors must be at least 1".into(),
            ));
        }
        if self.max_shots < 1 || self.batch_size < 1 || self.batches_per_round < 1 {
            return Err(Error::InvalidArgument(
                "max_shots, batch_size and batches_per_round must be positive".into(),
            ));
        }
        self.decoder.validate()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub p: f64,
    pub shots: usize,
    pub logical_errors: usize,
    pub ler: f64,
    pub wilson_ci: (f64, f64),
    /// Shots whose X-error residual was a logical.
    pub x_failures: usize,
    /// Shots whose Z-error residual was a logical.
    pub z_failures: usize,
    pub seed: u64,
}

/// What one shot produced.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ShotOutcome {
    pub x_failed: bool,
    pub z_failed: bool,
}

impl ShotOutcome {
    pub fn failed(&self) -> bool {
        self.x_failed || self.z_failed
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Tally {
    pub shots: usize,
    pub logical_errors: usize,
    pub x_failures: usize,
    pub z_failures: usize,
}

impl Tally {
    fn record(&mut self, o: ShotOutcome) {
        self.shots += 1;
        self.logical_errors += o.failed() as usize;
        self.x_failures += o.x_failed as usize;
        self.z_failures += o.z_failed as usize;
    }

    fn merge(&mut self, other: &Tally) {
        self.shots += other.shots;
        self.logical_errors += other.logical_errors;
        self.x_failures += other.x_failures;
        self.z_failures += other.z_failures;
    }
}

/// Wilson score interval for `successes` out of `trials`.
pub fn wilson_interval(successes: usize, trials: usize, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let phat = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (phat + z2 / (2.0 * n)) / denom;
    let half = z * (phat * (1.0 - phat) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let lo = if successes == 0 {
        0.0
    } else {
        (center - half).max(0.0)
    };
    let hi = if successes >= trials {
        1.0
    } else {
        (center + half).min(1.0)
    };
    (lo, hi)
}

/// Parameters of the stopping rule and batching.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StopRule {
    pub stop_at_logical_errors: usize,
    pub max_shots: usize,
    pub batch_size: usize,
    pub batches_per_round: usize,
}

/// Runs shots in seeded batches until `stop_at_logical_errors` failures or
/// `max_shots` shots. Batches of a round run in parallel, but the tallies are
/// merged in batch order and the rule is checked after every batch, so the
/// result depends only on the seed and batch size.
pub fn monte_carlo<F>(seed: u64, rule: StopRule, shot: F) -> Result<Tally>
where
    F: Fn(&mut ChaCha8Rng) -> Result<ShotOutcome> + Sync,
{
    let batch_size = rule.batch_size.max(1);
    let mut total = Tally::default();
    let mut batch = 0usize;
    let done =
        |t: &Tally| t.logical_errors >= rule.stop_at_logical_errors || t.shots >= rule.max_shots;
    while !done(&total) {
        let remaining = rule.max_shots - total.shots;
        let round = rule
            .batches_per_round
            .max(1)
            .min(remaining.div_ceil(batch_size));
        let tallies: Vec<Tally> = (batch..batch + round)
            .into_par_iter()
            .map(|b| {
                let mut rng = batch_rng(seed, b as u64);
                let first = (b - batch) * batch_size;
                let count = batch_size.min(remaining - first);
                let mut t = Tally::default();
                for _ in 0..count {
                    t.record(shot(&mut rng)?);
                }
                Ok(t)
            })
            .collect::<Result<_>>()?;
        batch += round;
        for t in &tallies {
            total.merge(t);
            if done(&total) {
                break;
            }
        }
    }
    Ok(total)
}

/// One error type: its decoder and the logical kind its residual is tested as.
struct Side {
    decoder: BpOsdDecoder,
    kind: LogicalKind,
}

impl Side {
    fn sample_and_decode(
        &self,
        ctx: &LogicalTestContext,
        p: f64,
        rng: &mut ChaCha8Rng,
    ) -> Result<bool> {
        let h = self.decoder.matrix();
        let e: Vec<u8> = (0..h.cols()).map(|_| rng.gen_bool(p) as u8).collect();
        if e.iter().all(|&b| b == 0) {
            return Ok(false);
        }
        let syndrome = h.mul_bits(&e)?;
        let out = self.decoder.decode(&syndrome);
        let mut residual = pack_bits(&e);
        xor_into(&mut residual, &pack_bits(&out.estimate));
        if h.mul_words(&residual).iter().any(|&w| w != 0) {
            if self.decoder.config().osd != OsdMode::None {
                return Err(Error::Integrity(
                    "decoder output does not match the syndrome".into(),
                ));
            }
            // Without OSD a non-converged BP output is simply a failure.
            return Ok(true);
        }
        Ok(!ctx.in_stabilizer_space(&residual, self.kind))
    }
}

/// Logical error rate of a code under the code-capacity model.
pub fn run_capacity(run: &CapacityRun) -> Result<SimResult> {
    run.validate()?;
    let pc = build_checks(&run.spec)?;
    let ctx = LogicalTestContext::from_checks(&pc);
    if ctx.k() == 0 {
        return Err(Error::NoLogicals);
    }
    let decoder = DecoderConfig {
        prior_p: run.p,
        ..run.decoder
    };
    // X errors are seen by H_Z; Z errors by H_X.
    let x_side = Side {
        decoder: BpOsdDecoder::new(&pc.h_z, decoder),
        kind: LogicalKind::X,
    };
    let z_side = Side {
        decoder: BpOsdDecoder::new(&pc.h_x, decoder),
        kind: LogicalKind::Z,
    };
    let rule = StopRule {
        stop_at_logical_errors: run.stop_at_logical_errors,
        max_shots: run.max_shots,
        batch_size: run.batch_size,
        batches_per_round: run.batches_per_round,
    };
    let tally = monte_carlo(run.seed, rule, |rng| {
        let x_failed = x_side.sample_and_decode(&ctx, run.p, rng)?;
        let z_failed = match run.channel {
            Channel::BitAndPhase => z_side.sample_and_decode(&ctx, run.p, rng)?,
            Channel::BitOnly => false,
        };
        Ok(ShotOutcome { x_failed, z_failed })
    })?;
    Ok(result_from(run.p, run.seed, &tally))
}

fn result_from(p: f64, seed: u64, t: &Tally) -> SimResult {
    SimResult {
        p,
        shots: t.shots,
        logical_errors: t.logical_errors,
        ler: if t.shots == 0 {
            0.0
        } else {
            t.logical_errors as f64 / t.shots as f64
        },
        wilson_ci: wilson_interval(t.logical_errors, t.shots, Z_95),
        x_failures: t.x_failures,
        z_failures: t.z_failures,
        seed,
    }
}

/// One run per `p`, each with its own seed derived from `base.seed`.
pub fn sweep(base: &CapacityRun, p_list: &[f64]) -> Result<Vec<SimResult>> {
    if p_list.is_empty() {
        return Err(Error::InvalidArgument("empty list of error rates".into()));
    }
    p_list
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            run_capacity(&CapacityRun {
                p,
                seed: derive_seed(base.seed, i as u64),
                ..base.clone()
            })
        })
        .collect()
}

/// Parses `start:stop:step` (inclusive of `stop` up to rounding) or a
/// comma-separated list.
pub fn parse_p_list(text: &str) -> Result<Vec<f64>> {
    let bad = |why: &str| Error::Parse {
        text: text.to_string(),
        reason: why.to_string(),
    };
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad("not a number"));
    let parts: Vec<&str> = text.split(':').collect();
    let values = match parts.as_slice() {
        [start, stop, step] => {
            let (start, stop, step) = (num(start)?, num(stop)?, num(step)?);
            if step <= 0.0 || stop < start {
                return Err(bad("need start <= stop and step > 0"));
            }
            let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
            (0..count).map(|i| start + i as f64 * step).collect()
        }
        [_] => text.split(',').map(num).collect::<Result<Vec<_>>>()?,
        _ => return Err(bad("expected start:stop:step or a comma-separated list")),
    };
    if values.is_empty() {
        return Err(bad("no values"));
    }
    Ok(values)
}

#[derive(Serialize)]
struct CsvRow {
    p: f64,
    shots: usize,
    logical_errors: usize,
    ler: f64,
    ci_low: f64,
    ci_high: f64,
    x_failures: usize,
    z_failures: usize,
    seed: u64,
}

pub fn write_csv<W: Write>(results: &[SimResult], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in results {
        w.serialize(CsvRow {
            p: r.p,
            shots: r.shots,
            logical_errors: r.logical_errors,
            ler: r.ler,
            ci_low: r.wilson_ci.0,
            ci_high: r.wilson_ci.1,
            x_failures: r.x_failures,
            z_failures: r.z_failures,
            seed: r.seed,
        })
        .map_err(|e| Error::InvalidArgument(format!("csv: {e}")))?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn code_30() -> CodeSpec {
        CodeSpec::parse(3, 5, "1+p+p2", "p+p3+p8", "pi").unwrap()
    }

    #[test]
    fn wilson_examples() {
        let (lo, hi) = wilson_interval(0, 100, Z_95);
        assert_eq!(lo, 0.0);
        assert!((hi - 0.037).abs() < 1e-3);
        let (lo, hi) = wilson_interval(50, 100, Z_95);
        assert!((lo - 0.4038).abs() < 1e-3 && (hi - 0.5962).abs() < 1e-3);
        assert_eq!(wilson_interval(0, 0, Z_95), (0.0, 1.0));
    }

    #[test]
    fn interval_covers_a_known_rate() {
        let q = 0.03;
        let covered = (0..100u64)
            .filter(|&run| {
                let rule = StopRule {
                    stop_at_logical_errors: 100,
                    max_shots: 1_000_000,
                    batch_size: 64,
                    batches_per_round: 8,
                };
                let t = monte_carlo(run, rule, |rng| {
                    Ok(ShotOutcome {
                        x_failed: rng.gen_bool(q),
                        z_failed: false,
                    })
                })
                .unwrap();
                let (lo, hi) = wilson_interval(t.logical_errors, t.shots, Z_95);
                lo <= q && q <= hi
            })
            .count();
        assert!(covered >= 93, "coverage {covered}/100");
    }

    #[test]
    fn stop_rule_is_independent_of_round_size() {
        let run = |round| {
            let rule = StopRule {
                stop_at_logical_errors: 20,
                max_shots: 100_000,
                batch_size: 16,
                batches_per_round: round,
            };
            monte_carlo(5, rule, |rng| {
                Ok(ShotOutcome {
                    x_failed: rng.gen_bool(0.01),
                    z_failed: rng.gen_bool(0.01),
                })
            })
            .unwrap()
        };
        let t = run(1);
        assert!(t.logical_errors >= 20);
        assert_eq!(run(7), t);
        assert_eq!(run(64), t);
    }

    #[test]
    fn max_shots_caps_the_run() {
        let rule = StopRule {
            stop_at_logical_errors: 1000,
            max_shots: 100,
            batch_size: 64,
            batches_per_round: 4,
        };
        let t = monte_carlo(0, rule, |_| Ok(ShotOutcome::default())).unwrap();
        assert_eq!(t.shots, 100);
        assert_eq!(t.logical_errors, 0);
    }

    #[test]
    fn tiny_noise_never_fails() {
        let mut run = CapacityRun::new(code_30(), 1e-4, 1);
        run.max_shots = 2000;
        let r = run_capacity(&run).unwrap();
        assert_eq!(r.shots, 2000);
        assert_eq!(r.logical_errors, 0);
        assert!(r.wilson_ci.0 <= r.ler && r.ler <= r.wilson_ci.1);
    }

    #[test]
    fn runs_are_reproducible() {
        let mut run = CapacityRun::new(code_30(), 0.06, 9);
        run.stop_at_logical_errors = 20;
        run.decoder.max_iterations = 100;
        let a = run_capacity(&run).unwrap();
        assert_eq!(a, run_capacity(&run).unwrap());
        assert!(a.logical_errors >= 20);
        assert!(a.x_failures + a.z_failures >= a.logical_errors);
    }

    #[test]
    fn weak_decoders_still_give_valid_rates() {
        let mut run = CapacityRun::new(code_30(), 0.05, 2);
        run.stop_at_logical_errors = 10;
        run.decoder = DecoderConfig {
            max_iterations: 1,
            osd: OsdMode::Osd0,
            ..DecoderConfig::default()
        };
        let r = run_capacity(&run).unwrap();
        assert!((0.0..=1.0).contains(&r.ler));
        run.decoder.osd = OsdMode::None;
        let r = run_capacity(&run).unwrap();
        assert!((0.0..=1.0).contains(&r.ler));
    }

    #[test]
    fn zero_dimension_is_rejected() {
        let spec = CodeSpec::parse(3, 3, "1", "x", "xy").unwrap();
        assert!(matches!(
            run_capacity(&CapacityRun::new(spec, 0.01, 0)),
            Err(Error::NoLogicals)
        ));
        assert!(CapacityRun::new(code_30(), 0.5, 0).validate().is_err());
    }

    #[test]
    fn p_lists() {
        let ps = parse_p_list("0.01:0.10:0.01").unwrap();
        assert_eq!(ps.len(), 10);
        assert!((ps[9] - 0.10).abs() < 1e-12);
        assert_eq!(parse_p_list("0.05,0.07").unwrap(), vec![0.05, 0.07]);
        assert!(parse_p_list("0.1:0.01:0.01").is_err());
        assert!(parse_p_list("a").is_err());
    }

    #[test]
    fn sweep_writes_csv() {
        let mut base = CapacityRun::new(code_30(), 0.01, 3);
        base.stop_at_logical_errors = 5;
        base.max_shots = 500;
        base.decoder.max_iterations = 50;
        let results = sweep(&base, &[0.04, 0.04]).unwrap();
        assert_ne!(results[0].seed, results[1].seed);
        let mut buf = Vec::new();
        write_csv(&results, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "p,shots,logical_errors,ler,ci_low,ci_high,x_failures,z_failures,seed"
        );
        assert_eq!(lines.count(), 2);
        assert!(sweep(&base, &[]).is_err());
    }
}
