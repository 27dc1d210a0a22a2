//! End-to-end checks across construction, decomposition and decoding.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use polar_seq::baselines::{ml_decode, sc_decode, scl_decode};
use polar_seq::bsda::{decode, decode_sda, estimate_bias, BiasTable, DecodeStatus, DecoderConfig};
use polar_seq::codespec::{attach_crc, construct_frozen_set, ebch_check_matrix, from_check_matrix, CodeSpec, Crc};
use polar_seq::decomposition::{build_tree, TreePolicy};
use polar_seq::sim::channel_llrs;

fn codes() -> Vec<(&'static str, CodeSpec)> {
    let polar = |m, k| CodeSpec::polar(m, construct_frozen_set(m, k, 2.0)).unwrap();
    vec![
        ("polar(16,10)", CodeSpec::polar(4, vec![0, 4, 8, 9, 10, 12]).unwrap()),
        ("polar(64,32)", polar(6, 32)),
        ("polar(256,200)", polar(8, 200)),
        ("polar(128,64)+crc8", attach_crc(&polar(7, 72), Some(Crc::crc8()), 2.0).unwrap().spec),
        ("ebch(32,16)", from_check_matrix(&ebch_check_matrix(5, 8).unwrap()).unwrap()),
        ("ebch(64,24)", from_check_matrix(&ebch_check_matrix(6, 16).unwrap()).unwrap()),
    ]
}

fn random_info(rng: &mut ChaCha8Rng, k: usize) -> Vec<u8> {
    (0..k).map(|_| rng.gen_range(0..2)).collect()
}

#[test]
fn every_decoder_recovers_noiseless_frames() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for (name, spec) in codes() {
        let tree = build_tree(&spec, &TreePolicy::default());
        let config = DecoderConfig::new(4, 32, BiasTable::zero(spec.n()));
        for _ in 0..5 {
            let info = random_info(&mut rng, spec.k());
            let c = spec.encode(&info).unwrap();
            assert!(spec.is_codeword(&c), "{name}");
            let llrs: Vec<f64> = c.iter().map(|&b| if b == 0 { 2.5 } else { -2.5 }).collect();
            assert_eq!(sc_decode(&spec, &llrs).unwrap().info, info, "{name} sc");
            assert_eq!(scl_decode(&spec, 4, None, &llrs).unwrap().info, info, "{name} scl");
            let res = decode(&spec, &tree, &config, &llrs).unwrap();
            assert_eq!(res.status, DecodeStatus::Ok, "{name}");
            assert_eq!(res.info, info, "{name} bsda");
            assert_eq!(decode_sda(&spec, &config, &llrs).unwrap().info, info, "{name} sda");
            if spec.k() <= 16 {
                assert_eq!(ml_decode(&spec, &llrs).unwrap().2, info, "{name} ml");
            }
        }
    }
}

/// Cost of computing the LLRs of layer `lambda`, phase `phi`, from the
/// nearest layer already valid.
fn lambda_cost(m: usize, lambda: usize, phi: usize) -> u64 {
    if lambda == 0 {
        return 0;
    }
    let d = if phi == 0 { lambda - 1 } else { (phi.trailing_zeros() as usize).min(lambda - 1) };
    (1u64 << (m - lambda)) * ((1u64 << (d + 1)) - 1)
}

#[test]
fn llr_op_count_matches_prediction_without_backtracking() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for (name, spec) in codes() {
        let m = spec.m();
        for policy in [TreePolicy::default(), TreePolicy::symbolwise()] {
            let tree = build_tree(&spec, &policy);
            let predicted: u64 = tree
                .leaves()
                .iter()
                .map(|l| lambda_cost(m, l.layer(m), l.r()))
                .sum();
            let info = random_info(&mut rng, spec.k());
            let c = spec.encode(&info).unwrap();
            let llrs: Vec<f64> = c.iter().map(|&b| if b == 0 { 4.0 } else { -4.0 }).collect();
            let config = DecoderConfig::new(4, 32, BiasTable::zero(spec.n()));
            let res = decode(&spec, &tree, &config, &llrs).unwrap();
            assert_eq!(res.iterations, tree.leaf_count() as u64 + 1, "{name}");
            assert_eq!(res.llr_ops.total(), predicted, "{name}");
            assert!(predicted <= (m << m) as u64);
        }
    }
}

#[test]
fn scl_errors_do_not_grow_with_list_size() {
    let spec = CodeSpec::polar(6, construct_frozen_set(6, 32, 2.0)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let frames: Vec<(Vec<u8>, Vec<f64>)> = (0..600)
        .map(|_| {
            let info = random_info(&mut rng, spec.k());
            let llrs = channel_llrs(&spec.encode(&info).unwrap(), 1.5, spec.rate(), &mut rng);
            (info, llrs)
        })
        .collect();
    let errors: Vec<usize> = [1, 2, 4, 8, 16]
        .iter()
        .map(|&l| {
            frames
                .iter()
                .filter(|(info, llrs)| &scl_decode(&spec, l, None, llrs).unwrap().info != info)
                .count()
        })
        .collect();
    assert!(errors.windows(2).all(|w| w[1] <= w[0]), "{errors:?}");
    assert!(errors[0] > errors[4], "{errors:?}");
}

#[test]
fn bsda_tracks_scl_on_a_crc_code() {
    let spec = CodeSpec::polar(6, construct_frozen_set(6, 40, 2.5)).unwrap();
    let crc = Crc::new(0x7).unwrap();
    let bias = estimate_bias(&spec, 2.5, 5000, 4).unwrap();
    let mut config = DecoderConfig::new(8, 64, bias);
    config.crc = Some(crc);
    let tree = build_tree(&spec, &TreePolicy::default());
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut bsda_err, mut scl_err) = (0, 0);
    for _ in 0..2000 {
        let data = random_info(&mut rng, spec.k() - crc.degree());
        let info = crc.append(&data);
        let llrs = channel_llrs(&spec.encode(&info).unwrap(), 2.5, spec.rate(), &mut rng);
        let res = decode(&spec, &tree, &config, &llrs).unwrap();
        bsda_err += usize::from(res.status != DecodeStatus::Ok || res.info != info);
        scl_err += usize::from(scl_decode(&spec, 8, Some(&crc), &llrs).unwrap().info != info);
    }
    assert!(scl_err > 5, "too few errors to compare: {scl_err}");
    let ratio = bsda_err as f64 / scl_err as f64;
    assert!((0.5..2.0).contains(&ratio), "BSDA {bsda_err} vs SCL {scl_err}");
}

#[test]
fn bias_table_survives_a_file_round_trip() {
    let spec = CodeSpec::polar(4, vec![0, 4, 8, 9, 10, 12]).unwrap();
    let t = estimate_bias(&spec, 3.0, 5000, 5).unwrap();
    let path = std::env::temp_dir().join(format!("polar-seq-bias-{}.txt", std::process::id()));
    t.save_file(&path).unwrap();
    let back = BiasTable::load_file(&path, spec.n()).unwrap();
    std::fs::remove_file(&path).ok();
    assert!(t.values().iter().zip(back.values()).all(|(a, b)| (a - b).abs() < 1e-8));
}
