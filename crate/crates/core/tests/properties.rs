//! Cross-module properties exercised through the public API.

use bbcode::codes::{build_checks, dimension, CodeSpec};
use bbcode::decoder::{decode, DecoderConfig};
use bbcode::distance::{
    distance_upperbound, exact_distance, exact_distance_of_kinds, ExactDistance, LogicalKind,
    LogicalTestContext, ProbeConfig, DEFAULT_EXACT_BUDGET,
};
use bbcode::fixtures;
use bbcode::matrix_io::{read_check_pair, write_check_pair, MatrixFormat};
use bbcode::polyring::BivPoly;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn context(spec: &CodeSpec) -> LogicalTestContext {
    LogicalTestContext::from_checks(&build_checks(spec).unwrap())
}

fn distance_of(result: ExactDistance) -> Option<usize> {
    match result {
        ExactDistance::Found { distance, .. } => Some(distance),
        ExactDistance::Exceeds(_) => None,
    }
}

fn random_bb(rng: &mut ChaCha8Rng, max_lm: usize) -> CodeSpec {
    loop {
        let (l, m) = (rng.gen_range(2..=7), rng.gen_range(2..=7));
        if l * m > max_lm {
            continue;
        }
        let mut poly = || {
            BivPoly::from_terms(
                l,
                m,
                (0..3)
                    .map(|_| (rng.gen_range(0..l), rng.gen_range(0..m)))
                    .collect::<Vec<_>>(),
            )
        };
        let (a, b) = (poly(), poly());
        if let Ok(spec) = CodeSpec::bivariate(l, m, a, b) {
            return spec;
        }
    }
}

#[test]
fn x_and_z_distances_agree_on_bb_codes() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut checked = 0;
    while checked < 20 {
        let spec = random_bb(&mut rng, 21);
        let ctx = context(&spec);
        if ctx.k() == 0 {
            continue;
        }
        checked += 1;
        let n = ctx.n();
        let dx = distance_of(
            exact_distance_of_kinds(&ctx, &[LogicalKind::X], n, DEFAULT_EXACT_BUDGET).unwrap(),
        );
        let dz = distance_of(
            exact_distance_of_kinds(&ctx, &[LogicalKind::Z], n, DEFAULT_EXACT_BUDGET).unwrap(),
        );
        assert_eq!(dx, dz, "{:?}", spec.to_document());
    }
}

#[test]
fn probe_never_undercuts_the_exact_distance() {
    for id in ["III:1", "IV:1", "II:1", "IV:3"] {
        let row = fixtures::find(id).unwrap();
        let ctx = context(&row.spec().unwrap());
        let exact =
            distance_of(exact_distance(&ctx, row.d, DEFAULT_EXACT_BUDGET).unwrap()).unwrap();
        for seed in 0..20 {
            let report = distance_upperbound(
                &ctx,
                &ProbeConfig {
                    trials: 128,
                    seed,
                    ..ProbeConfig::default()
                },
            );
            report.verify(&ctx).unwrap();
            assert!(report.d_upper.unwrap() >= exact, "{id} seed {seed}");
        }
    }
}

#[test]
fn exhaustive_search_is_monotone_in_w_max() {
    let ctx = context(&fixtures::find("II:1").unwrap().spec().unwrap());
    let mut last = None;
    for w in 1..=8 {
        let d = distance_of(exact_distance(&ctx, w, DEFAULT_EXACT_BUDGET).unwrap());
        if w < 6 {
            assert_eq!(d, None);
        } else {
            assert_eq!(d, Some(6));
        }
        if let (Some(prev), Some(cur)) = (last, d) {
            assert!(cur >= prev);
        }
        last = d.or(last);
    }
}

#[test]
fn check_pair_files_round_trip() {
    for row in fixtures::all_rows() {
        let pc = build_checks(&row.spec().unwrap()).unwrap();
        for format in [MatrixFormat::Dense, MatrixFormat::Alist] {
            let (h_x, h_z) = read_check_pair(&write_check_pair(&pc.h_x, &pc.h_z, format)).unwrap();
            assert_eq!((&h_x, &h_z), (&pc.h_x, &pc.h_z), "{} {format:?}", row.id());
        }
    }
}

#[test]
fn fixture_documents_round_trip_through_json() {
    for row in fixtures::all_rows() {
        let spec = row.spec().unwrap();
        let text = serde_json::to_string(&spec.to_document()).unwrap();
        let back = CodeSpec::from_json(&text).unwrap();
        assert_eq!(back, spec);
        assert_eq!(
            dimension(&build_checks(&back).unwrap()).unwrap(),
            dimension(&build_checks(&spec).unwrap()).unwrap()
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn decoding_bb_syndromes_is_syndrome_consistent(seed in any::<u64>(), p in 0.01f64..0.2) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let spec = random_bb(&mut rng, 30);
        let pc = build_checks(&spec).unwrap();
        for h in [&pc.h_x, &pc.h_z] {
            let e: Vec<u8> = (0..h.cols()).map(|_| rng.gen_bool(p) as u8).collect();
            let s = h.mul_bits(&e).unwrap();
            let cfg = DecoderConfig { max_iterations: 30, ..DecoderConfig::default() };
            let out = decode(h, &s, &cfg);
            prop_assert_eq!(h.mul_bits(&out.estimate).unwrap(), s);
        }
    }

    #[test]
    fn probe_reports_are_sound(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let spec = random_bb(&mut rng, 30);
        let ctx = context(&spec);
        let report = distance_upperbound(&ctx, &ProbeConfig { trials: 64, seed, ..ProbeConfig::default() });
        prop_assert!(report.verify(&ctx).is_ok());
        prop_assert_eq!(report.d_upper.is_none(), ctx.k() == 0);
    }
}
