//! BPSK/AWGN Monte-Carlo simulation.
//!
//! Frame `f` of grid point `i` draws its information bits and noise from a
//! ChaCha stream keyed by `(seed, i)` with stream number `f`, so results do
//! not depend on how frames are spread over workers. Frames run in fixed
//! batches and the stopping rule is checked between batches.

use std::fmt::Write as _;
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::baselines::{ml_decode, sc_decode, scl_decode};
use crate::bsda::{estimate_bias, BiasTable, Bsda, DecodeResult, DecodeStatus, DecoderConfig};
use crate::codespec::{CodeSpec, Crc};
use crate::decomposition::{build_tree, TreePolicy};
use crate::{Error, Result};

const BATCH: u64 = 256;

/// Noise standard deviation for Eb/N0 `snr_db` at code rate `rate`.
pub fn noise_sigma(snr_db: f64, rate: f64) -> f64 {
    (1.0 / (2.0 * rate * 10f64.powf(snr_db / 10.0))).sqrt()
}

/// BPSK over AWGN: `x = 1 - 2c`, `y = x + N(0, σ²)`, LLR `2y/σ²`.
pub fn channel_llrs(codeword: &[u8], snr_db: f64, rate: f64, rng: &mut impl Rng) -> Vec<f64> {
    let sigma = noise_sigma(snr_db, rate);
    let scale = 2.0 / (sigma * sigma);
    codeword
        .iter()
        .map(|&c| {
            let z: f64 = StandardNormal.sample(rng);
            scale * (1.0 - 2.0 * f64::from(c) + sigma * z)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DecoderKind {
    Sc,
    Scl,
    Sda,
    Bsda,
    Ml,
}

impl FromStr for DecoderKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "sc" => DecoderKind::Sc,
            "scl" => DecoderKind::Scl,
            "sda" => DecoderKind::Sda,
            "bsda" => DecoderKind::Bsda,
            "ml" => DecoderKind::Ml,
            _ => return Err(Error::InvalidArgument(format!("unknown decoder {s:?}"))),
        })
    }
}

/// Parses `lo:step:hi` (inclusive) or a single value.
pub fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let bad = || Error::InvalidArgument(format!("bad SNR grid {s:?}, expected lo:step:hi"));
    let parts: Vec<f64> = s
        .split(':')
        .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<Result<_>>()?;
    match parts[..] {
        [x] => Ok(vec![x]),
        [lo, step, hi] if step > 0.0 && hi >= lo => {
            let count = ((hi - lo) / step + 1e-9).floor() as usize;
            Ok((0..=count).map(|i| lo + step * i as f64).collect())
        }
        _ => Err(bad()),
    }
}

/// A simulation campaign over an Eb/N0 grid.
#[derive(Debug, Clone, Serialize)]
pub struct Campaign {
    pub code_path: Option<String>,
    #[serde(skip)]
    pub spec: CodeSpec,
    #[serde(skip)]
    pub policy: TreePolicy,
    pub tree_policy: String,
    pub decoder: DecoderKind,
    pub list: usize,
    pub max_paths: usize,
    pub pool_capacity: Option<usize>,
    pub design_snr_db: Option<f64>,
    pub bias_samples: usize,
    pub bias_file: Option<String>,
    #[serde(skip)]
    pub bias: Option<BiasTable>,
    /// Hex CRC polynomial; the last `degree` information bits carry the CRC.
    pub crc: Option<String>,
    pub snr_db: Vec<f64>,
    pub max_frames: u64,
    pub target_errors: u64,
    /// A point also needs `min_frames_factor · target_errors` frames to stop.
    pub min_frames_factor: u64,
    pub seed: u64,
    pub workers: usize,
    /// Fills the `seconds` column; off by default so output is reproducible.
    pub timing: bool,
}

impl Campaign {
    pub fn new(spec: CodeSpec, decoder: DecoderKind, snr_db: Vec<f64>) -> Self {
        Campaign {
            code_path: None,
            spec,
            policy: TreePolicy::default(),
            tree_policy: String::new(),
            decoder,
            list: 8,
            max_paths: 64,
            pool_capacity: None,
            design_snr_db: None,
            bias_samples: 10_000,
            bias_file: None,
            bias: None,
            crc: None,
            snr_db,
            max_frames: 10_000,
            target_errors: 100,
            min_frames_factor: 10,
            seed: 1,
            workers: 1,
            timing: false,
        }
    }

    fn crc(&self) -> Result<Option<Crc>> {
        self.crc.as_deref().map(Crc::parse_hex).transpose()
    }

    /// Bias table used by the sequential decoders: the given table, else one
    /// estimated at the design SNR (the first grid point by default).
    pub fn bias_table(&self) -> Result<BiasTable> {
        if let Some(b) = &self.bias {
            return Ok(b.clone());
        }
        if let Some(path) = &self.bias_file {
            return BiasTable::load_file(path, self.spec.n());
        }
        let snr = self.design_snr_db.or(self.snr_db.first().copied()).unwrap_or(0.0);
        estimate_bias(&self.spec, snr, self.bias_samples.max(1), self.seed)
    }

    fn validate(&self) -> Result<()> {
        if self.snr_db.is_empty() {
            return Err(Error::InvalidArgument("empty SNR grid".into()));
        }
        if self.max_frames == 0 {
            return Err(Error::InvalidArgument("max frames must be at least 1".into()));
        }
        if self.workers == 0 {
            return Err(Error::InvalidArgument("at least one worker is needed".into()));
        }
        if let Some(crc) = self.crc()? {
            if crc.degree() >= self.spec.k() {
                return Err(Error::InvalidArgument("CRC longer than the information block".into()));
            }
        }
        Ok(())
    }

    /// Runs every grid point.
    pub fn run(&self) -> Result<Vec<PointStats>> {
        self.validate()?;
        let bias = match self.decoder {
            DecoderKind::Sda | DecoderKind::Bsda => Some(self.bias_table()?),
            _ => None,
        };
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.workers)
            .build()
            .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
        pool.install(|| {
            self.snr_db
                .iter()
                .enumerate()
                .map(|(i, &snr)| self.run_point(i, snr, bias.as_ref()))
                .collect()
        })
    }

    fn decoder(&self, bias: Option<&BiasTable>) -> Result<FrameDecoder> {
        let crc = self.crc()?;
        Ok(match self.decoder {
            DecoderKind::Sc => FrameDecoder::Sc,
            DecoderKind::Ml => FrameDecoder::Ml,
            DecoderKind::Scl => FrameDecoder::Scl(self.list, crc),
            DecoderKind::Sda | DecoderKind::Bsda => {
                let mut config = DecoderConfig::new(
                    self.list,
                    self.max_paths,
                    bias.cloned().unwrap_or_else(|| BiasTable::zero(self.spec.n())),
                );
                config.pool_capacity = self.pool_capacity;
                config.crc = crc;
                let bsda = if self.decoder == DecoderKind::Sda {
                    Bsda::sda(&self.spec, config)?
                } else {
                    Bsda::new(&self.spec, build_tree(&self.spec, &self.policy), config)?
                };
                FrameDecoder::Bsda(Box::new(bsda))
            }
        })
    }

    /// Simulates grid point `index` at `snr_db`.
    pub fn run_point(&self, index: usize, snr_db: f64, bias: Option<&BiasTable>) -> Result<PointStats> {
        let start = Instant::now();
        let crc = self.crc()?;
        let key = self.seed ^ (index as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
        let mut acc = Totals::default();
        let chunks = self.workers as u64;
        while acc.frames < self.max_frames {
            let lo = acc.frames;
            let hi = (lo + BATCH).min(self.max_frames);
            let per = (hi - lo).div_ceil(chunks);
            let parts: Vec<Totals> = (0..chunks)
                .into_par_iter()
                .map(|c| -> Result<Totals> {
                    let a = lo + c * per;
                    let b = (a + per).min(hi);
                    let mut t = Totals::default();
                    if a >= b {
                        return Ok(t);
                    }
                    let mut dec = self.decoder(bias)?;
                    for f in a..b {
                        let mut rng = ChaCha8Rng::seed_from_u64(key);
                        rng.set_stream(f);
                        t.add(&self.frame(&mut dec, crc.as_ref(), snr_db, &mut rng)?);
                    }
                    Ok(t)
                })
                .collect::<Result<_>>()?;
            for p in parts {
                acc.merge(&p);
            }
            if self.target_errors > 0
                && acc.frame_errors >= self.target_errors
                && acc.frames >= self.min_frames_factor * self.target_errors
            {
                break;
            }
        }
        let frames = acc.frames as f64;
        Ok(PointStats {
            snr_db,
            frames: acc.frames,
            frame_errors: acc.frame_errors,
            bit_errors: acc.bit_errors,
            fer: acc.frame_errors as f64 / frames,
            ber: acc.bit_errors as f64 / (frames * self.spec.k() as f64),
            avg_ops_add: acc.add as f64 / frames,
            avg_ops_cmp: acc.cmp as f64 / frames,
            avg_queue_ops: acc.queue as f64 / frames,
            avg_iterations: acc.iterations as f64 / frames,
            peak_pool: acc.peak_pool,
            max_llr_ops: acc.max_llr_ops,
            wall_time: if self.timing { start.elapsed().as_secs_f64() } else { 0.0 },
        })
    }

    fn frame(&self, dec: &mut FrameDecoder, crc: Option<&Crc>, snr: f64, rng: &mut ChaCha8Rng) -> Result<FrameOutcome> {
        let k = self.spec.k();
        let info = match crc {
            Some(crc) => {
                let data: Vec<u8> = (0..k - crc.degree()).map(|_| rng.gen_range(0..2)).collect();
                crc.append(&data)
            }
            None => (0..k).map(|_| rng.gen_range(0..2)).collect(),
        };
        let codeword = self.spec.encode(&info)?;
        let llrs = channel_llrs(&codeword, snr, self.spec.rate(), rng);
        let res = dec.decode(&self.spec, &llrs)?;
        let bit_errors = res.info.iter().zip(&info).filter(|(a, b)| a != b).count() as u64;
        Ok(FrameOutcome {
            error: bit_errors > 0 || res.status != DecodeStatus::Ok,
            bit_errors,
            res,
        })
    }
}

enum FrameDecoder {
    Sc,
    Scl(usize, Option<Crc>),
    Bsda(Box<Bsda>),
    Ml,
}

impl FrameDecoder {
    fn decode(&mut self, spec: &CodeSpec, llrs: &[f64]) -> Result<DecodeResult> {
        match self {
            FrameDecoder::Sc => sc_decode(spec, llrs),
            FrameDecoder::Scl(list, crc) => scl_decode(spec, *list, crc.as_ref(), llrs),
            FrameDecoder::Bsda(d) => d.decode(llrs),
            FrameDecoder::Ml => {
                let (codeword, _, info) = ml_decode(spec, llrs)?;
                Ok(DecodeResult {
                    codeword,
                    info,
                    iterations: 1,
                    ..DecodeResult::default()
                })
            }
        }
    }
}

struct FrameOutcome {
    error: bool,
    bit_errors: u64,
    res: DecodeResult,
}

#[derive(Debug, Default, Clone, Copy)]
struct Totals {
    frames: u64,
    frame_errors: u64,
    bit_errors: u64,
    add: u64,
    cmp: u64,
    queue: u64,
    iterations: u64,
    peak_pool: usize,
    max_llr_ops: u64,
}

impl Totals {
    fn add(&mut self, o: &FrameOutcome) {
        self.frames += 1;
        self.frame_errors += u64::from(o.error);
        self.bit_errors += o.bit_errors;
        self.add += o.res.ops.add;
        self.cmp += o.res.ops.cmp;
        self.queue += o.res.queue_ops;
        self.iterations += o.res.iterations;
        self.peak_pool = self.peak_pool.max(o.res.peak_pool);
        self.max_llr_ops = self.max_llr_ops.max(o.res.llr_ops.total());
    }

    fn merge(&mut self, o: &Totals) {
        self.frames += o.frames;
        self.frame_errors += o.frame_errors;
        self.bit_errors += o.bit_errors;
        self.add += o.add;
        self.cmp += o.cmp;
        self.queue += o.queue;
        self.iterations += o.iterations;
        self.peak_pool = self.peak_pool.max(o.peak_pool);
        self.max_llr_ops = self.max_llr_ops.max(o.max_llr_ops);
    }
}

/// Statistics of one grid point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointStats {
    pub snr_db: f64,
    pub frames: u64,
    pub frame_errors: u64,
    pub bit_errors: u64,
    pub fer: f64,
    pub ber: f64,
    pub avg_ops_add: f64,
    pub avg_ops_cmp: f64,
    /// Priority queue comparisons, reported apart from the arithmetic.
    pub avg_queue_ops: f64,
    pub avg_iterations: f64,
    pub peak_pool: usize,
    /// Largest LLR-recursion operation count of any single frame.
    pub max_llr_ops: u64,
    pub wall_time: f64,
}

pub const CSV_HEADER: &str = "snr_db,frames,frame_errors,bit_errors,fer,ber,avg_add,avg_cmp,avg_iter,peak_pool,seconds";

pub fn to_csv(points: &[PointStats]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for p in points {
        let _ = writeln!(
            out,
            "{},{},{},{},{:e},{:e},{:.3},{:.3},{:.4},{},{:.3}",
            p.snr_db,
            p.frames,
            p.frame_errors,
            p.bit_errors,
            p.fer,
            p.ber,
            p.avg_ops_add,
            p.avg_ops_cmp,
            p.avg_iterations,
            p.peak_pool,
            p.wall_time
        );
    }
    out
}

pub fn to_json(campaign: &Campaign, points: &[PointStats]) -> Result<String> {
    #[derive(Serialize)]
    struct Report<'a> {
        config: &'a Campaign,
        n: usize,
        k: usize,
        points: &'a [PointStats],
    }
    let report = Report {
        config: campaign,
        n: campaign.spec.n(),
        k: campaign.spec.k(),
        points,
    };
    serde_json::to_string_pretty(&report).map_err(|e| Error::InvalidArgument(format!("json: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codespec::construct_frozen_set;

    #[test]
    fn llr_moments() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let zero = vec![0u8; 1_000_000];
        let rate = 0.5;
        let llr = channel_llrs(&zero, 1.0, rate, &mut rng);
        let sigma = noise_sigma(1.0, rate);
        let mean = llr.iter().sum::<f64>() / llr.len() as f64;
        let var = llr.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / llr.len() as f64;
        let s2 = sigma * sigma;
        assert!((mean / (2.0 / s2) - 1.0).abs() < 0.01, "{mean}");
        assert!((var / (4.0 / s2) - 1.0).abs() < 0.01, "{var}");
    }

    #[test]
    fn quiet_channel_keeps_signs() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let c: Vec<u8> = (0..64).map(|i| (i % 3 == 0) as u8).collect();
        let llr = channel_llrs(&c, 80.0, 0.5, &mut rng);
        assert!(c.iter().zip(&llr).all(|(&b, &x)| (x < 0.0) == (b == 1)));
        let mut a = ChaCha8Rng::seed_from_u64(9);
        let mut b = ChaCha8Rng::seed_from_u64(9);
        assert_eq!(channel_llrs(&c, 1.0, 0.5, &mut a), channel_llrs(&c, 1.0, 0.5, &mut b));
    }

    #[test]
    fn grid_parsing() {
        assert_eq!(parse_grid("1.0:0.5:2.0").unwrap(), vec![1.0, 1.5, 2.0]);
        assert_eq!(parse_grid("3").unwrap(), vec![3.0]);
        assert_eq!(parse_grid("1.0:0.25:3.0").unwrap().len(), 9);
        assert!(parse_grid("1:0:2").is_err());
        assert!(parse_grid("a").is_err());
        assert!(parse_grid("1:2").is_err());
    }

    fn small_campaign(decoder: DecoderKind) -> Campaign {
        let spec = CodeSpec::polar(5, construct_frozen_set(5, 16, 2.0)).unwrap();
        let mut c = Campaign::new(spec, decoder, vec![1.0, 2.0]);
        c.max_frames = 300;
        c.target_errors = 0;
        c.bias_samples = 500;
        c
    }

    #[test]
    fn zero_target_runs_max_frames_and_is_reproducible() {
        for kind in [DecoderKind::Sc, DecoderKind::Scl, DecoderKind::Bsda, DecoderKind::Sda, DecoderKind::Ml] {
            let c = small_campaign(kind);
            let a = c.run().unwrap();
            assert!(a.iter().all(|p| p.frames == 300));
            assert_eq!(a, c.run().unwrap());
        }
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let mut c = small_campaign(DecoderKind::Bsda);
        c.target_errors = 5;
        let one = to_csv(&c.run().unwrap());
        c.workers = 3;
        assert_eq!(one, to_csv(&c.run().unwrap()));
    }

    #[test]
    fn noiseless_point_has_no_errors() {
        let mut c = small_campaign(DecoderKind::Bsda);
        c.snr_db = vec![60.0];
        c.bias = Some(BiasTable::zero(32));
        c.max_frames = 50;
        let p = &c.run().unwrap()[0];
        assert_eq!(p.frame_errors, 0);
        let blocks = build_tree(&c.spec, &c.policy).leaf_count() as f64;
        assert_eq!(p.avg_iterations, blocks + 1.0);
    }

    #[test]
    fn crc_campaign_and_outputs() {
        let mut c = small_campaign(DecoderKind::Scl);
        c.crc = Some("0x107".into());
        c.snr_db = vec![3.0];
        let pts = c.run().unwrap();
        let csv = to_csv(&pts);
        assert!(csv.starts_with(CSV_HEADER));
        assert_eq!(csv.lines().count(), 2);
        let json = to_json(&c, &pts).unwrap();
        assert!(json.contains("\"crc\": \"0x107\""));
        c.snr_db.clear();
        assert!(c.run().is_err());
    }
}
