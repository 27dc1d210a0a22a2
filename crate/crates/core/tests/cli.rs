//! Runs the `polar-seq` binary.

use std::path::PathBuf;
use std::process::{Command, Output};

use polar_seq::codespec::CodeSpec;

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polar-seq")).args(args).output().expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = bin(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn code16() -> String {
    concat!(env!("CARGO_MANIFEST_DIR"), "/../../codes/polar16_10.txt").to_string()
}

fn scratch(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("polar-seq-cli-{}-{name}", std::process::id()))
}

#[test]
fn dump_tree_lists_three_leaves() {
    let text = stdout(&["dump-tree", "--code", &code16()]);
    let leaves: Vec<&str> = text.lines().skip_while(|l| *l != "leaves:").skip(1).collect();
    assert_eq!(leaves, ["  [0,3] spc", "  [4,7] spc", "  [8,15] rm1"]);
}

#[test]
fn construct_then_encode() {
    let path = scratch("p32.txt");
    let p = path.to_str().unwrap();
    stdout(&["construct", "--m", "5", "--k", "16", "--design-snr", "1.5", "--out", p]);
    let spec = CodeSpec::load_file(&path).unwrap();
    assert_eq!((spec.n(), spec.k()), (32, 16));
    let info = "1011001110001111";
    let text = stdout(&["encode", "--code", p, "--info", info]);
    std::fs::remove_file(&path).ok();
    let word: Vec<u8> = text
        .lines()
        .find_map(|l| l.strip_prefix("codeword "))
        .unwrap()
        .trim()
        .bytes()
        .map(|b| b - b'0')
        .collect();
    let bits: Vec<u8> = info.bytes().map(|b| b - b'0').collect();
    assert_eq!(word, spec.encode(&bits).unwrap());
}

#[test]
fn construct_variants() {
    let crc = stdout(&["construct", "--m", "6", "--k", "40", "--crc", "0x107"]);
    let spec = CodeSpec::from_text(&crc).unwrap();
    assert_eq!(spec.k(), 32);
    assert_eq!(spec.dynamic_count(), 8);
    let ebch = CodeSpec::from_text(&stdout(&["construct", "--m", "5", "--ebch-distance", "8"])).unwrap();
    assert_eq!((ebch.n(), ebch.k()), (32, 16));
}

#[test]
fn bias_file_has_reference_values() {
    let text = stdout(&["bias", "--code", &code16(), "--snr", "5.0", "--samples", "200000"]);
    let t = polar_seq::bsda::BiasTable::from_text(&text, 16).unwrap();
    for (phi, want) in [(3, -0.47), (7, -0.52), (15, -0.56)] {
        assert!((t.at(phi) - want).abs() <= 0.05, "Ψ({phi}) = {}", t.at(phi));
    }
}

#[test]
fn simulate_is_deterministic_and_worker_independent() {
    let args = |workers: &'static str| {
        vec![
            "simulate", "--decoder", "bsda", "--L", "4", "--snr", "1.0:1.0:3.0", "--max-frames", "600",
            "--target-errors", "20", "--seed", "7", "--workers", workers,
        ]
    };
    let code = code16();
    let run = |w| {
        let mut a = args(w);
        a.extend(["--code", &code]);
        stdout(&a)
    };
    let one = run("1");
    assert_eq!(one, run("1"));
    assert_eq!(one, run("3"));
    let lines: Vec<&str> = one.lines().collect();
    assert_eq!(lines[0], "snr_db,frames,frame_errors,bit_errors,fer,ber,avg_add,avg_cmp,avg_iter,peak_pool,seconds");
    assert_eq!(lines.len(), 4);
}

#[test]
fn simulate_json_and_bias_file() {
    let bias = scratch("psi.txt");
    let b = bias.to_str().unwrap();
    stdout(&["bias", "--code", &code16(), "--snr", "3", "--samples", "2000", "--out", b]);
    let out = scratch("res.json");
    let o = out.to_str().unwrap();
    stdout(&[
        "simulate", "--code", &code16(), "--decoder", "sda", "--snr", "2", "--max-frames", "300", "--bias-file", b,
        "--format", "json", "--out", o,
    ]);
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    std::fs::remove_file(&bias).ok();
    std::fs::remove_file(&out).ok();
    assert_eq!(v["config"]["decoder"], "sda");
    assert_eq!(v["points"].as_array().unwrap().len(), 1);
    assert_eq!(v["points"][0]["frames"], 300);
}

#[test]
fn every_decoder_runs_from_the_cli() {
    for d in ["sc", "scl", "sda", "bsda", "ml"] {
        let text = stdout(&["simulate", "--code", &code16(), "--decoder", d, "--snr", "4", "--max-frames", "100"]);
        assert_eq!(text.lines().count(), 2, "{d}");
    }
    let crc = stdout(&[
        "simulate", "--code", &code16(), "--decoder", "scl", "--crc", "0x7", "--snr", "4", "--max-frames", "100",
    ]);
    assert_eq!(crc.lines().count(), 2);
}

#[test]
fn bad_input_fails() {
    assert!(!bin(&["simulate", "--code", &code16(), "--snr", "x"]).status.success());
    assert!(!bin(&["simulate", "--code", "/nonexistent", "--snr", "1"]).status.success());
    assert!(!bin(&["encode", "--code", &code16(), "--info", "012"]).status.success());
    assert!(!bin(&["construct", "--m", "5"]).status.success());
    assert!(!bin(&["frobnicate"]).status.success());
}
