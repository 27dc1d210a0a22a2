use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use polar_seq::bsda::{estimate_bias, BiasTable};
use polar_seq::codespec::{attach_crc, construct_frozen_set, ebch_check_matrix, from_check_matrix, CodeSpec, Crc};
use polar_seq::decomposition::{build_tree, TreePolicy};
use polar_seq::sim::{parse_grid, to_csv, to_json, Campaign, DecoderKind};
use polar_seq::{Error, Result};

#[derive(Parser)]
#[command(name = "polar-seq", version, about = "Sequential decoding of polar codes")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Monte-Carlo FER/BER simulation over an Eb/N0 grid
    Simulate(SimulateArgs),
    /// Encode information bits
    Encode(EncodeArgs),
    /// Build a code description file
    Construct(ConstructArgs),
    /// Estimate the bias table of a code
    Bias(BiasArgs),
    /// Print the decomposition tree of a code
    DumpTree(DumpTreeArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Decoder {
    Sc,
    Scl,
    Sda,
    Bsda,
    Ml,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    code: PathBuf,
    #[arg(long, value_enum, default_value = "bsda")]
    decoder: Decoder,
    /// Visit limit (list size for SCL)
    #[arg(long = "L", default_value_t = 8)]
    list: usize,
    /// Queue capacity
    #[arg(long = "D")]
    max_paths: Option<usize>,
    /// Memory pool capacity in entries
    #[arg(long)]
    lambda: Option<usize>,
    /// Eb/N0 grid in dB, `lo:step:hi` or a single value
    #[arg(long, allow_hyphen_values = true)]
    snr: String,
    /// Eb/N0 used to estimate the bias table (default: first grid point)
    #[arg(long, allow_hyphen_values = true)]
    design_snr: Option<f64>,
    #[arg(long)]
    bias_file: Option<PathBuf>,
    #[arg(long, default_value_t = 10_000)]
    bias_samples: usize,
    #[arg(long, default_value_t = 100_000)]
    max_frames: u64,
    #[arg(long, default_value_t = 100)]
    target_errors: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// CRC polynomial in hex with the leading term, e.g. 0x107; the last
    /// information bits carry the checksum
    #[arg(long)]
    crc: Option<String>,
    /// Decomposition caps, e.g. `spc=32,rate1=16,rm1=64,cosets=2,leaf=1`
    #[arg(long, default_value = "")]
    tree_policy: String,
    /// Record wall time per point (makes output non-reproducible)
    #[arg(long)]
    timing: bool,
}

#[derive(Args)]
struct EncodeArgs {
    #[arg(long)]
    code: PathBuf,
    /// Information bits as a 0/1 string; random when absent
    #[arg(long)]
    info: Option<String>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Args)]
struct ConstructArgs {
    /// log2 of the code length
    #[arg(long)]
    m: usize,
    /// Dimension (polar codes)
    #[arg(long)]
    k: Option<usize>,
    /// Design Eb/N0 for the Gaussian-approximation construction
    #[arg(long, default_value_t = 2.0, allow_hyphen_values = true)]
    design_snr: f64,
    /// Embed this CRC as dynamic frozen symbols
    #[arg(long)]
    crc: Option<String>,
    /// Build the extended BCH code with this designed distance instead
    #[arg(long)]
    ebch_distance: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BiasArgs {
    #[arg(long)]
    code: PathBuf,
    #[arg(long, allow_hyphen_values = true)]
    snr: f64,
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DumpTreeArgs {
    #[arg(long)]
    code: PathBuf,
    #[arg(long, default_value = "")]
    tree_policy: String,
}

fn emit(out: Option<&PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(p) => Ok(std::fs::write(p, text)?),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn bits(s: &str) -> Result<Vec<u8>> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            _ => Err(Error::InvalidArgument(format!("bad bit {c:?}"))),
        })
        .collect()
}

fn show(b: &[u8]) -> String {
    b.iter().map(|x| char::from(b'0' + x)).collect()
}

fn simulate(a: SimulateArgs) -> Result<()> {
    let spec = CodeSpec::load_file(&a.code)?;
    let decoder = match a.decoder {
        Decoder::Sc => DecoderKind::Sc,
        Decoder::Scl => DecoderKind::Scl,
        Decoder::Sda => DecoderKind::Sda,
        Decoder::Bsda => DecoderKind::Bsda,
        Decoder::Ml => DecoderKind::Ml,
    };
    let mut c = Campaign::new(spec, decoder, parse_grid(&a.snr)?);
    c.code_path = Some(a.code.display().to_string());
    c.policy = TreePolicy::parse(&a.tree_policy)?;
    c.tree_policy = a.tree_policy;
    c.list = a.list;
    c.max_paths = a.max_paths.unwrap_or(8 * a.list).max(4);
    c.pool_capacity = a.lambda;
    c.design_snr_db = a.design_snr;
    c.bias_samples = a.bias_samples;
    c.bias_file = a.bias_file.map(|p| p.display().to_string());
    c.crc = a.crc;
    c.max_frames = a.max_frames;
    c.target_errors = a.target_errors;
    c.seed = a.seed;
    c.workers = a.workers;
    c.timing = a.timing;
    let points = c.run()?;
    let text = match a.format {
        Format::Csv => to_csv(&points),
        Format::Json => to_json(&c, &points)? + "\n",
    };
    emit(a.out.as_ref(), &text)
}

fn encode(a: EncodeArgs) -> Result<()> {
    let spec = CodeSpec::load_file(&a.code)?;
    let info = match a.info {
        Some(s) => bits(&s)?,
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
            (0..spec.k()).map(|_| rng.gen_range(0..2)).collect()
        }
    };
    let c = spec.encode(&info)?;
    println!("info     {}", show(&info));
    println!("codeword {}", show(&c));
    Ok(())
}

fn construct(a: ConstructArgs) -> Result<()> {
    let spec = match (a.ebch_distance, a.k) {
        (Some(d), None) => from_check_matrix(&ebch_check_matrix(a.m, d)?)?,
        (None, Some(k)) => {
            let base = CodeSpec::polar(a.m, construct_frozen_set(a.m, k, a.design_snr))?;
            match a.crc {
                Some(p) => attach_crc(&base, Some(Crc::parse_hex(&p)?), a.design_snr)?.spec,
                None => base,
            }
        }
        _ => return Err(Error::InvalidArgument("give exactly one of --k and --ebch-distance".into())),
    };
    emit(a.out.as_ref(), &spec.to_text())
}

fn bias(a: BiasArgs) -> Result<()> {
    let spec = CodeSpec::load_file(&a.code)?;
    let t: BiasTable = estimate_bias(&spec, a.snr, a.samples, a.seed)?;
    emit(a.out.as_ref(), &t.to_text())
}

fn dump_tree(a: DumpTreeArgs) -> Result<()> {
    let spec = CodeSpec::load_file(&a.code)?;
    let tree = build_tree(&spec, &TreePolicy::parse(&a.tree_policy)?);
    print!("{}", tree.dump());
    println!("leaves:");
    for leaf in tree.leaves() {
        println!("  [{},{}] {}", leaf.start, leaf.last_phase(), leaf.kind().name());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let r = match cli.cmd {
        Cmd::Simulate(a) => simulate(a),
        Cmd::Encode(a) => encode(a),
        Cmd::Construct(a) => construct(a),
        Cmd::Bias(a) => bias(a),
        Cmd::DumpTree(a) => dump_tree(a),
    };
    match r {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
