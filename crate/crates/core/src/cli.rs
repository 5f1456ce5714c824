//! `medlink` command line.
//!
//! Exit codes: 0 success, 1 an infeasible link with `--require-feasible`,
//! 2 usage or I/O errors, 3 codec failures.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::codec::{self, bitstream, CompressOptions, CompressedBitstream};
use crate::image::GrayImage;
use crate::macsim::{self, MacParameters, ReportRow, Scenario};
use crate::metrics::{self, QualityReport};
use crate::pgm;
use crate::synth::{self, SynthSpec};
use crate::transport::{self, BlockSize};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{input}: {message}")]
    Input { input: String, message: String },
    #[error("{input}: {source}")]
    Codec {
        input: String,
        #[source]
        source: codec::CodecError,
    },
    #[error("{0}")]
    Infeasible(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Infeasible(_) => 1,
            CliError::Usage(_) | CliError::Io { .. } | CliError::Input { .. } => 2,
            CliError::Codec { .. } => 3,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "medlink", version, about = "Compress medical images and check 802.11 delivery at a frame cadence")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compress images to `.wbc` and report their quality.
    Compress(CompressArgs),
    /// Decode `.wbc` files back to PGM.
    Decompress(DecompressArgs),
    /// Simulate image delivery under the 802.11 access scenarios.
    Simulate(SimulateArgs),
    /// Rate-distortion and blocksize sweeps.
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
pub struct CodecArgs {
    /// Target compression ratio.
    #[arg(long, default_value_t = codec::DEFAULT_TARGET_CR)]
    pub cr: f64,
    /// Wavelet decomposition levels.
    #[arg(long, default_value_t = codec::DEFAULT_LEVELS)]
    pub levels: u8,
}

#[derive(Debug, Args)]
pub struct CompressArgs {
    /// PGM file or `synth:<kind>:<W>x<H>[:<bits>[:<seed>]]`.
    #[arg(long, required = true)]
    pub input: Vec<String>,
    #[command(flatten)]
    pub codec: CodecArgs,
    /// Skip rate control and code losslessly.
    #[arg(long)]
    pub lossless: bool,
    /// Also write the reconstruction as `<name>.decoded.pgm`.
    #[arg(long)]
    pub write_decoded: bool,
    /// Output directory, created if missing.
    #[arg(long, default_value = "medlink-out")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct DecompressArgs {
    /// Compressed `.wbc` files.
    #[arg(long, required = true)]
    pub input: Vec<PathBuf>,
    /// Write ASCII (P2) instead of binary (P5) PGM.
    #[arg(long)]
    pub ascii: bool,
    /// Output directory, created if missing.
    #[arg(long, default_value = "medlink-out")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScenarioArg {
    Dcf,
    DcfRts,
    Pcf,
    All,
}

#[derive(Debug, Args)]
pub struct LinkArgs {
    /// TFTP blocksize in bytes: 512, 1024 or 2048.
    #[arg(long, value_delimiter = ',', default_value = "512", value_parser = parse_blocksize)]
    pub blocksize: Vec<BlockSize>,
    /// Access scenarios to run.
    #[arg(long, value_enum, value_delimiter = ',', default_value = "all")]
    pub scenario: Vec<ScenarioArg>,
    /// MAC profiles: 11b, 11b-std or 11g.
    #[arg(long, value_delimiter = ',', env = "MEDLINK_PROFILE", default_value = "11b,11g")]
    pub phy: Vec<String>,
    /// key = value MAC parameter file; replaces the `--phy` profiles.
    #[arg(long)]
    pub mac_config: Option<PathBuf>,
    /// Use a CWmin/2 mean backoff instead of none.
    #[arg(long)]
    pub cwmin_backoff: bool,
    /// Model one TFTP ACK per DATA packet.
    #[arg(long)]
    pub tftp_acks: bool,
    /// Required image delivery rate in images per second.
    #[arg(long, default_value_t = 10.0)]
    pub fps: f64,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Images or `.wbc` files; defaults to the 256², 512² and 2000² 16-bit
    /// reference sizes at the target ratio.
    #[arg(long)]
    pub input: Vec<String>,
    #[command(flatten)]
    pub codec: CodecArgs,
    #[command(flatten)]
    pub link: LinkArgs,
    /// Exit with status 1 when any run misses the frame rate.
    #[arg(long)]
    pub require_feasible: bool,
    /// Output directory, created if missing.
    #[arg(long, default_value = "medlink-out")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Image used for both sweeps.
    #[arg(long, default_value = "synth:phantom:512x512:16:0")]
    pub input: String,
    /// Compression ratios of the rate-distortion sweep, ascending.
    #[arg(long, value_delimiter = ',', num_args = 1.., default_value = "2,10,20,55")]
    pub cr_points: Vec<f64>,
    #[command(flatten)]
    pub codec: CodecArgs,
    /// Blocksizes of the fragmentation sweep.
    #[arg(long, value_delimiter = ',', default_value = "512,1024,2048", value_parser = parse_blocksize)]
    pub blocksize: Vec<BlockSize>,
    /// MAC profile for the fragmentation sweep.
    #[arg(long, value_delimiter = ',', env = "MEDLINK_PROFILE", default_value = "11b")]
    pub phy: Vec<String>,
    /// key = value MAC parameter file; replaces `--phy`.
    #[arg(long)]
    pub mac_config: Option<PathBuf>,
    /// Output directory, created if missing.
    #[arg(long, default_value = "medlink-out")]
    pub out: PathBuf,
}

fn parse_blocksize(s: &str) -> Result<BlockSize, String> {
    let v: u32 = s.trim().parse().map_err(|_| format!("not a number: {s:?}"))?;
    BlockSize::try_from(v).map_err(|e| e.to_string())
}

/// Parses the process arguments, runs the command and maps errors to exit codes.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("medlink: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Compress(a) => cmd_compress(&a),
        Command::Decompress(a) => cmd_decompress(&a),
        Command::Simulate(a) => cmd_simulate(&a),
        Command::Sweep(a) => cmd_sweep(&a),
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.to_path_buf(), source }
}

/// Writes `bytes` to `path` through a temporary sibling and a rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = dir.join(format!(".{name}.{}.tmp", std::process::id()));
    let result = fs::File::create(&tmp)
        .and_then(|mut f| {
            f.write_all(bytes)?;
            f.sync_all()
        })
        .and_then(|()| fs::rename(&tmp, path));
    if let Err(e) = result {
        let _ = fs::remove_file(&tmp);
        return Err(io_err(path)(e));
    }
    Ok(())
}

/// A decoded input image with a file-name-safe label.
pub struct Input {
    pub label: String,
    pub image: GrayImage,
}

fn label_for(input: &str) -> String {
    if input.starts_with(synth::PREFIX) {
        input.replace(':', "-")
    } else {
        Path::new(input).file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| input.to_string())
    }
}

pub fn load_input(input: &str) -> Result<Input, CliError> {
    let bad = |message: String| CliError::Input { input: input.to_string(), message };
    let image = if input.starts_with(synth::PREFIX) {
        let spec: SynthSpec = input.parse().map_err(|e: synth::SynthError| CliError::Usage(e.to_string()))?;
        spec.generate().map_err(|e| bad(e.to_string()))?
    } else {
        let path = Path::new(input);
        let bytes = fs::read(path).map_err(io_err(path))?;
        pgm::load_pgm(&bytes).map_err(|e| bad(e.to_string()))?
    };
    Ok(Input { label: label_for(input), image })
}

fn check_codec_args(c: &CodecArgs) -> Result<(), CliError> {
    if !(c.cr >= 1.0 && c.cr.is_finite()) {
        return Err(CliError::Usage(format!("--cr must be a finite ratio >= 1, got {}", c.cr)));
    }
    if c.levels == 0 {
        return Err(CliError::Usage("--levels must be at least 1".into()));
    }
    Ok(())
}

fn compress_input(inp: &Input, c: &CodecArgs, lossless: bool) -> Result<CompressedBitstream, CliError> {
    let result = if lossless {
        codec::compress_lossless(&inp.image, c.levels)
    } else {
        let opts = CompressOptions::with_target(c.cr).levels(c.levels);
        codec::compress(&inp.image, &opts)
    };
    result.map_err(|source| CliError::Codec { input: inp.label.clone(), source })
}

/// Runs `f` over `items` on scoped threads, keeping input order.
fn parallel_map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    std::thread::scope(|s| {
        let handles: Vec<_> = items.iter().map(|it| s.spawn(|| f(it))).collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    })
}

pub const QUALITY_CSV_HEADER: &str =
    "input,width,height,bit_depth,levels,bits_original,bits_compressed,bytes,cr,entropy_h0,mse,psnr_db,ppsnr_db";

type CompressOutcome = (String, Vec<u8>, Option<Vec<u8>>);

fn cmd_compress(a: &CompressArgs) -> Result<(), CliError> {
    if !a.lossless {
        check_codec_args(&a.codec)?;
    }
    let outcomes = parallel_map(&a.input, |input| -> Result<CompressOutcome, CliError> {
        let inp = load_input(input)?;
        let bs = compress_input(&inp, &a.codec, a.lossless)?;
        let codec_err = |source| CliError::Codec { input: inp.label.clone(), source };
        let rec = codec::decompress(&bs).map_err(codec_err)?;
        let report = QualityReport::measure(&inp.image, &rec, bs.compressed_bits()).expect("decoder preserves shape");
        let bytes = bs.to_bytes();
        let row = format!(
            "{},{},{},{},{},{},{},{},{}",
            inp.label,
            inp.image.width(),
            inp.image.height(),
            inp.image.bit_depth().bits(),
            bs.header.levels,
            report.bits_original,
            report.bits_compressed,
            bytes.len(),
            report.csv_row()
        ) + &format!(",{}", report.ppsnr_db.map(metrics::format_db).unwrap_or_default());
        println!(
            "{}: {} -> {} bits ({:.1} kbit), CR {:.3}, PSNR {} dB",
            inp.label,
            report.bits_original,
            report.bits_compressed,
            crate::units::kbit(report.bits_compressed as f64),
            report.cr,
            metrics::format_db(report.psnr_db)
        );
        let decoded = a.write_decoded.then(|| pgm::save_pgm(&rec, false));
        write_atomic(&a.out.join(format!("{}.wbc", inp.label)), &bytes)?;
        if let Some(d) = &decoded {
            write_atomic(&a.out.join(format!("{}.decoded.pgm", inp.label)), d)?;
        }
        Ok((row, bytes, decoded))
    });
    let mut csv = format!("{QUALITY_CSV_HEADER}\n");
    for o in outcomes {
        csv.push_str(&o?.0);
        csv.push('\n');
    }
    write_atomic(&a.out.join("quality.csv"), csv.as_bytes())
}

fn cmd_decompress(a: &DecompressArgs) -> Result<(), CliError> {
    for path in &a.input {
        let bytes = fs::read(path).map_err(io_err(path))?;
        let label = label_for(&path.to_string_lossy());
        let img = codec::decompress_bytes(&bytes)
            .map_err(|source| CliError::Codec { input: path.display().to_string(), source })?;
        write_atomic(&a.out.join(format!("{label}.pgm")), &pgm::save_pgm(&img, a.ascii))?;
        println!("{}: {}x{} {}", path.display(), img.width(), img.height(), img.bit_depth());
    }
    Ok(())
}

fn mac_profiles(
    phy: &[String],
    mac_config: Option<&Path>,
    cwmin: bool,
) -> Result<Vec<(String, MacParameters)>, CliError> {
    let mut profiles = match mac_config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(io_err(path))?;
            let p = MacParameters::from_config(&text)
                .map_err(|e| CliError::Input { input: path.display().to_string(), message: e.to_string() })?;
            vec![(path.display().to_string(), p)]
        }
        None => phy
            .iter()
            .map(|name| {
                MacParameters::profile(name.trim())
                    .map(|p| (name.trim().to_string(), p))
                    .map_err(|e| CliError::Usage(e.to_string()))
            })
            .collect::<Result<_, _>>()?,
    };
    if profiles.is_empty() {
        return Err(CliError::Usage("no MAC profile selected".into()));
    }
    if cwmin {
        for (_, p) in &mut profiles {
            *p = p.clone().with_cwmin_backoff();
        }
    }
    Ok(profiles)
}

fn scenarios(args: &[ScenarioArg]) -> Result<Vec<Scenario>, CliError> {
    let mut out = Vec::new();
    for a in args {
        let picked: &[Scenario] = match a {
            ScenarioArg::Dcf => &[Scenario::Dcf],
            ScenarioArg::DcfRts => &[Scenario::DcfRts],
            ScenarioArg::Pcf => &[Scenario::Pcf],
            ScenarioArg::All => &Scenario::ALL,
        };
        for s in picked {
            if !out.contains(s) {
                out.push(*s);
            }
        }
    }
    if out.is_empty() {
        return Err(CliError::Usage("at least one scenario is required".into()));
    }
    Ok(out)
}

/// The reference image sizes: 256², 512² and 2000² at 16 bits.
pub const REFERENCE_IMAGES: [(&str, u64); 3] =
    [("mri-256x256", 256), ("mri-512x512", 512), ("radiography-2000x2000", 2000)];

/// Bytes of a `side × side` 16-bit image at compression ratio `cr`.
pub fn reference_bytes(side: u64, cr: f64) -> u64 {
    ((side * side * 16) as f64 / cr / 8.0).floor() as u64
}

fn image_sizes(a: &SimulateArgs) -> Result<Vec<(String, u64)>, CliError> {
    if a.input.is_empty() {
        return Ok(REFERENCE_IMAGES.iter().map(|&(l, s)| (l.to_string(), reference_bytes(s, a.codec.cr))).collect());
    }
    parallel_map(&a.input, |input| {
        if !input.starts_with(synth::PREFIX) {
            let path = Path::new(input);
            let bytes = fs::read(path).map_err(io_err(path))?;
            if bytes.starts_with(&bitstream::MAGIC) {
                return Ok((label_for(input), bytes.len() as u64));
            }
        }
        let inp = load_input(input)?;
        let bs = compress_input(&inp, &a.codec, false)?;
        Ok((inp.label, bs.to_bytes().len() as u64))
    })
    .into_iter()
    .collect()
}

pub const SUPERFRAME_CSV_HEADER: &str = "image,phy_mbps,blocksize,beacon_ms,cfp_ms,dcf_remainder_ms,feasible";

fn cmd_simulate(a: &SimulateArgs) -> Result<(), CliError> {
    check_codec_args(&a.codec)?;
    let fps = a.link.fps;
    if !(fps > 0.0 && fps.is_finite()) {
        return Err(CliError::Usage(format!("--fps must be positive, got {fps}")));
    }
    let profiles = mac_profiles(&a.link.phy, a.link.mac_config.as_deref(), a.link.cwmin_backoff)?;
    let scens = scenarios(&a.link.scenario)?;
    let sizes = image_sizes(a)?;

    let mut rows = Vec::new();
    let mut superframes = format!("{SUPERFRAME_CSV_HEADER}\n");
    for (label, bytes) in &sizes {
        for (_, p) in &profiles {
            for &bs in &a.link.blocksize {
                let plan = transport::fragment_with(*bytes, bs, a.link.tftp_acks)
                    .map_err(|e| CliError::Input { input: label.clone(), message: e.to_string() })?;
                for &s in &scens {
                    let result = macsim::simulate(s, &plan, p);
                    if s == Scenario::Pcf {
                        let b = macsim::budget_superframe(result.total_time, p.beacon_interval, p.slot_time)
                            .map_err(|e| CliError::Usage(e.to_string()))?;
                        superframes.push_str(&format!(
                            "{label},{},{},{:.3},{:.3},{:.3},{}\n",
                            p.phy_rate as f64 / 1e6,
                            bs.bytes(),
                            b.beacon_interval.as_millis(),
                            b.cfp_duration.as_millis(),
                            b.dcf_remainder.as_millis(),
                            b.feasible
                        ));
                    }
                    rows.push(ReportRow {
                        image: label.clone(),
                        phy_rate: p.phy_rate,
                        blocksize: bs.bytes(),
                        image_bytes: *bytes,
                        packets: plan.data_packet_count,
                        meets_fps: result.meets_fps(fps),
                        result,
                    });
                }
            }
        }
    }
    let table = macsim::results_table(&rows);
    print!("{table}");
    write_atomic(&a.out.join("simulate.csv"), macsim::results_csv(&rows).as_bytes())?;
    write_atomic(&a.out.join("simulate.txt"), table.as_bytes())?;
    if scens.contains(&Scenario::Pcf) {
        write_atomic(&a.out.join("superframe.csv"), superframes.as_bytes())?;
    }
    let misses: Vec<String> = rows
        .iter()
        .filter(|r| !r.meets_fps)
        .map(|r| format!("{} {} at {} Mb/s", r.image, r.result.scenario, r.phy_rate as f64 / 1e6))
        .collect();
    if a.require_feasible && !misses.is_empty() {
        return Err(CliError::Infeasible(format!("{fps} images/s not sustained by: {}", misses.join(", "))));
    }
    Ok(())
}

pub const FRAGMENTATION_CSV_HEADER: &str =
    "image_bytes,blocksize,packets,overhead_bytes,phy_mbps,scenario,total_ms,throughput_mbps";

fn cmd_sweep(a: &SweepArgs) -> Result<(), CliError> {
    check_codec_args(&a.codec)?;
    if a.cr_points.is_empty() {
        return Err(CliError::Usage("--cr-points needs at least one ratio".into()));
    }
    if a.blocksize.is_empty() {
        return Err(CliError::Usage("--blocksize needs at least one size".into()));
    }
    let profiles = mac_profiles(&a.phy, a.mac_config.as_deref(), false)?;
    let inp = load_input(&a.input)?;
    let base = CompressOptions::default().levels(a.codec.levels);
    let points = metrics::rate_distortion_sweep(&inp.image, &a.cr_points, &base)
        .map_err(|e| CliError::Usage(format!("--cr-points: {e}")))?;
    write_atomic(&a.out.join("rd.csv"), metrics::sweep_csv(&points).as_bytes())?;

    let bs = compress_input(&inp, &a.codec, false)?;
    let bytes = bs.to_bytes().len() as u64;
    let mut csv = format!("{FRAGMENTATION_CSV_HEADER}\n");
    for (_, p) in &profiles {
        for &b in &a.blocksize {
            let plan = transport::fragment(bytes, b).expect("nonempty bitstream");
            for s in Scenario::ALL {
                let r = macsim::simulate(s, &plan, p);
                csv.push_str(&format!(
                    "{bytes},{},{},{},{},{s},{:.3},{:.3}\n",
                    b.bytes(),
                    plan.data_packet_count,
                    plan.total_overhead_bytes,
                    p.phy_rate as f64 / 1e6,
                    r.total_time.as_millis(),
                    r.effective_throughput / 1e6
                ));
            }
        }
    }
    write_atomic(&a.out.join("fragmentation.csv"), csv.as_bytes())?;
    println!("{}: {} RD points, {} blocksizes; wrote {}", inp.label, points.len(), a.blocksize.len(), a.out.display());
    Ok(())
}
