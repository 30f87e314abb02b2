//! Min-sum belief propagation with ordered-statistics post-processing.
//!
//! Messages are log-likelihood ratios (positive favours 0) exchanged on the
//! Tanner graph of a parity-check matrix under a flooding schedule. When BP
//! fails to satisfy the syndrome, OSD ranks columns by their posterior LLR,
//! takes the least reliable independent columns as pivots, and solves for
//! them.

use serde::{Deserialize, Serialize};

use crate::gf2::{get_bit, popcount, words_for, xor_into, BinMatrix};

/// Magnitude clamp for every LLR held by the decoder.
pub const LLR_CLAMP: f64 = 50.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Scaling {
    /// Constant normalisation factor in (0, 1].
    Fixed(f64),
    /// `1 - 2^{-t}` at iteration `t` (1-based).
    Variable,
}

impl Scaling {
    fn factor(self, iteration: usize) -> f64 {
        match self {
            Scaling::Fixed(a) => a,
            Scaling::Variable => 1.0 - 0.5f64.powi(iteration.min(60) as i32),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum OsdMode {
    None,
    Osd0,
    /// All weight-one flips of non-pivot bits plus weight-two flips among the
    /// `order` least reliable non-pivot bits.
    CombinationSweep(usize),
}

impl std::str::FromStr for OsdMode {
    type Err = crate::Error;
    fn from_str(s: &str) -> crate::Result<Self> {
        let s = s.to_ascii_lowercase();
        match s.as_str() {
            "none" => Ok(OsdMode::None),
            "osd0" | "0" => Ok(OsdMode::Osd0),
            _ => s
                .strip_prefix("cs")
                .and_then(|o| o.parse().ok())
                .map(OsdMode::CombinationSweep)
                .ok_or_else(|| {
                    crate::Error::InvalidArgument(format!(
                        "unknown OSD mode {s:?}; use none, osd0 or csN"
                    ))
                }),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecoderConfig {
    pub max_iterations: usize,
    pub scaling: Scaling,
    pub osd: OsdMode,
    pub prior_p: f64,
}

impl Default for DecoderConfig {
    /// 1,000 min-sum iterations, variable scaling, OSD-CS of order 7.
    fn default() -> Self {
        Self {
            max_iterations: 1000,
            scaling: Scaling::Variable,
            osd: OsdMode::CombinationSweep(7),
            prior_p: 0.01,
        }
    }
}

impl DecoderConfig {
    pub fn validate(&self) -> crate::Result<()> {
        if self.max_iterations == 0 {
            return Err(crate::Error::InvalidArgument(
                "max_iterations must be at least 1".into(),
            ));
        }
        if !(self.prior_p > 0.0 && self.prior_p < 0.5) {
            return Err(crate::Error::InvalidArgument(format!(
                "prior_p = {} outside (0, 0.5)",
                self.prior_p
            )));
        }
        if let Scaling::Fixed(a) = self.scaling {
            if !(a > 0.0 && a <= 1.0) {
                return Err(crate::Error::InvalidArgument(format!(
                    "scaling factor {a} outside (0, 1]"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecodeOutcome {
    pub estimate: Vec<u8>,
    pub bp_converged: bool,
    pub iterations_run: usize,
    /// Posterior LLRs after the last BP iteration.
    pub soft_reliabilities: Vec<f64>,
}

pub fn channel_llr(p: f64) -> f64 {
    ((1.0 - p) / p).ln().clamp(-LLR_CLAMP, LLR_CLAMP)
}

/// A decoder bound to one parity-check matrix, reusable across syndromes.
#[derive(Clone, Debug)]
pub struct BpOsdDecoder {
    h: BinMatrix,
    config: DecoderConfig,
    /// Edge endpoints, grouped by check.
    edge_var: Vec<usize>,
    check_start: Vec<usize>,
    /// Edge indices incident to each variable.
    var_edges: Vec<Vec<usize>>,
}

impl BpOsdDecoder {
    pub fn new(h: &BinMatrix, config: DecoderConfig) -> Self {
        let mut edge_var = Vec::new();
        let mut check_start = vec![0];
        let mut var_edges = vec![Vec::new(); h.cols()];
        for r in 0..h.rows() {
            for c in h.row_support(r) {
                var_edges[c].push(edge_var.len());
                edge_var.push(c);
            }
            check_start.push(edge_var.len());
        }
        Self {
            h: h.clone(),
            config,
            edge_var,
            check_start,
            var_edges,
        }
    }

    pub fn matrix(&self) -> &BinMatrix {
        &self.h
    }

    pub fn config(&self) -> &DecoderConfig {
        &self.config
    }

    /// BP, then OSD on the soft output if BP did not converge.
    pub fn decode(&self, syndrome: &[u8]) -> DecodeOutcome {
        let llr = vec![channel_llr(self.config.prior_p); self.h.cols()];
        self.decode_with_llr(syndrome, &llr)
    }

    /// As [`decode`](Self::decode) with per-bit channel LLRs.
    pub fn decode_with_llr(&self, syndrome: &[u8], llr: &[f64]) -> DecodeOutcome {
        let mut out = self.min_sum(syndrome, llr);
        if !out.bp_converged && self.config.osd != OsdMode::None {
            out.estimate =
                osd_postprocess(&self.h, syndrome, &out.soft_reliabilities, self.config.osd);
        }
        out
    }

    // Index loops mirror the edge layout; iterator chains obscure it here.
    #[allow(clippy::needless_range_loop)]
    pub fn min_sum(&self, syndrome: &[u8], llr: &[f64]) -> DecodeOutcome {
        assert_eq!(syndrome.len(), self.h.rows(), "syndrome length");
        assert_eq!(llr.len(), self.h.cols(), "prior length");
        let n = self.h.cols();
        let edges = self.edge_var.len();
        let mut v2c: Vec<f64> = self.edge_var.iter().map(|&v| llr[v]).collect();
        let mut c2v = vec![0.0f64; edges];
        let mut posterior = llr.to_vec();
        let mut hard = vec![0u8; n];
        for it in 1..=self.config.max_iterations {
            let alpha = self.config.scaling.factor(it);
            for c in 0..syndrome.len() {
                let (lo, hi) = (self.check_start[c], self.check_start[c + 1]);
                if lo == hi {
                    continue;
                }
                let mut negative = syndrome[c] & 1 == 1;
                let (mut min1, mut min2, mut arg) = (f64::INFINITY, f64::INFINITY, lo);
                for e in lo..hi {
                    let m = v2c[e];
                    if m < 0.0 {
                        negative = !negative;
                    }
                    let a = m.abs();
                    if a < min1 {
                        min2 = min1;
                        min1 = a;
                        arg = e;
                    } else if a < min2 {
                        min2 = a;
                    }
                }
                for e in lo..hi {
                    let mag = if e == arg { min2 } else { min1 };
                    let mag = if mag.is_finite() { mag } else { LLR_CLAMP };
                    let sign_neg = negative ^ (v2c[e] < 0.0);
                    let msg = alpha * mag;
                    c2v[e] = if sign_neg { -msg } else { msg };
                }
            }
            for v in 0..n {
                let total = llr[v] + self.var_edges[v].iter().map(|&e| c2v[e]).sum::<f64>();
                posterior[v] = total.clamp(-LLR_CLAMP, LLR_CLAMP);
                hard[v] = (total < 0.0) as u8;
                for &e in &self.var_edges[v] {
                    v2c[e] = (total - c2v[e]).clamp(-LLR_CLAMP, LLR_CLAMP);
                }
            }
            if self.satisfies(&hard, syndrome) {
                return DecodeOutcome {
                    estimate: hard,
                    bp_converged: true,
                    iterations_run: it,
                    soft_reliabilities: posterior,
                };
            }
        }
        DecodeOutcome {
            estimate: hard,
            bp_converged: false,
            iterations_run: self.config.max_iterations,
            soft_reliabilities: posterior,
        }
    }

    fn satisfies(&self, estimate: &[u8], syndrome: &[u8]) -> bool {
        (0..syndrome.len()).all(|c| {
            let parity = self.edge_var[self.check_start[c]..self.check_start[c + 1]]
                .iter()
                .fold(0u8, |acc, &v| acc ^ estimate[v]);
            parity == syndrome[c] & 1
        })
    }
}

/// Runs min-sum BP alone.
pub fn min_sum_bp(h: &BinMatrix, syndrome: &[u8], config: &DecoderConfig) -> DecodeOutcome {
    let dec = BpOsdDecoder::new(h, *config);
    let llr = vec![channel_llr(config.prior_p); h.cols()];
    dec.min_sum(syndrome, &llr)
}

/// BP followed by OSD when BP does not converge.
pub fn decode(h: &BinMatrix, syndrome: &[u8], config: &DecoderConfig) -> DecodeOutcome {
    BpOsdDecoder::new(h, *config).decode(syndrome)
}

/// Ordered-statistics decoding given per-bit LLRs (lower means more likely
/// flipped). Returns the lowest-weight candidate; ties keep the earlier one.
/// With `OsdMode::None` this degenerates to OSD-0.
pub fn osd_postprocess(
    h: &BinMatrix,
    syndrome: &[u8],
    reliabilities: &[f64],
    osd: OsdMode,
) -> Vec<u8> {
    assert_eq!(reliabilities.len(), h.cols(), "reliability length");
    assert_eq!(syndrome.len(), h.rows(), "syndrome length");
    let (m, n) = (h.rows(), h.cols());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        reliabilities[a]
            .total_cmp(&reliabilities[b])
            .then(a.cmp(&b))
    });

    // Rows of [H_perm | s], eliminated on the first n columns only.
    let stride = words_for(n + 1);
    let mut rows: Vec<Vec<u64>> = (0..m)
        .map(|r| {
            let mut row = vec![0u64; stride];
            for (pos, &c) in order.iter().enumerate() {
                if h.get(r, c) {
                    row[pos / 64] |= 1 << (pos % 64);
                }
            }
            if syndrome[r] & 1 == 1 {
                row[n / 64] |= 1 << (n % 64);
            }
            row
        })
        .collect();
    let mut pivots: Vec<usize> = Vec::new();
    for pos in 0..n {
        let rank = pivots.len();
        if rank == m {
            break;
        }
        let Some(p) = (rank..m).find(|&r| get_bit(&rows[r], pos)) else {
            continue;
        };
        rows.swap(rank, p);
        let pivot_row = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && get_bit(row, pos) {
                xor_into(row, &pivot_row);
            }
        }
        pivots.push(pos);
    }
    let rank = pivots.len();
    let mut is_pivot = vec![false; n];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    let non_pivots: Vec<usize> = (0..n).filter(|&p| !is_pivot[p]).collect();

    // Column vectors over the `rank` pivot rows.
    let rw = words_for(rank.max(1));
    let column_bits = |pos: usize| {
        let mut v = vec![0u64; rw];
        for (r, row) in rows.iter().take(rank).enumerate() {
            if get_bit(row, pos) {
                v[r / 64] |= 1 << (r % 64);
            }
        }
        v
    };
    let base = column_bits(n);

    let mut best_flips: Vec<usize> = Vec::new();
    let mut best_weight = popcount(&base);
    if let OsdMode::CombinationSweep(order_lambda) = osd {
        let cols: Vec<Vec<u64>> = non_pivots.iter().map(|&p| column_bits(p)).collect();
        let mut scratch = vec![0u64; rw];
        for (i, col) in cols.iter().enumerate() {
            scratch.copy_from_slice(&base);
            xor_into(&mut scratch, col);
            let w = 1 + popcount(&scratch);
            if w < best_weight {
                best_weight = w;
                best_flips = vec![i];
            }
        }
        let lambda = order_lambda.min(cols.len());
        for i in 0..lambda {
            for j in i + 1..lambda {
                scratch.copy_from_slice(&base);
                xor_into(&mut scratch, &cols[i]);
                xor_into(&mut scratch, &cols[j]);
                let w = 2 + popcount(&scratch);
                if w < best_weight {
                    best_weight = w;
                    best_flips = vec![i, j];
                }
            }
        }
    }

    let mut solution = base;
    let mut out = vec![0u8; n];
    for &i in &best_flips {
        xor_into(&mut solution, &column_bits(non_pivots[i]));
        out[order[non_pivots[i]]] = 1;
    }
    for (r, &p) in pivots.iter().enumerate() {
        if get_bit(&solution, r) {
            out[order[p]] = 1;
        }
    }
    out
}
