//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

use std::time::{Duration, Instant};

use medlink::cli::reference_bytes;
use medlink::codec::{self, dwt_forward, dwt_inverse, huffman, CompressOptions};
use medlink::macsim::{self, budget_superframe, MacParameters, Nanos, Scenario};
use medlink::metrics;
use medlink::synth;
use medlink::transport::{self, required_throughput, BlockSize};
use medlink::units;
use medlink::{BitDepth, GrayImage};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Accepted compression ratio window at target 20.
const CR_WINDOW: (f64, f64) = (19.0, 25.0);
const CODEC_TIME_LIMIT: Duration = Duration::from_secs(5);
/// Relative tolerance on the reference transmission times and throughput.
const TIMING_TOLERANCE: f64 = 0.15;
const SIM_TIME_LIMIT: Duration = Duration::from_secs(1);
const REFERENCE_THROUGHPUT_MBPS: f64 = 3.16;
const MIN_DCF_REMAINDER_MS: f64 = 30.0;
const CFP_WINDOW_MS: (f64, f64) = (60.0, 75.0);

struct Outcome {
    pass: bool,
    detail: String,
}

type Criterion = (&'static str, fn() -> Outcome);

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn reference_sizes() -> Outcome {
    let limits_kbit = [(256, 51.2), (512, 204.8), (2000, 3125.0)];
    let mut pass = true;
    let mut notes = Vec::new();
    for (side, limit) in limits_kbit {
        let images = [
            ("phantom", synth::phantom(side, side, BitDepth::Sixteen, 65535.0 * 0.005, 1).unwrap()),
            ("blobs", synth::blobs(side, side, BitDepth::Sixteen, 12, 2).unwrap()),
        ];
        for (kind, img) in images {
            let start = Instant::now();
            let bs = codec::compress(&img, &CompressOptions::with_target(20.0)).unwrap();
            let elapsed = start.elapsed();
            let rec = codec::decompress(&bs).unwrap();
            let bits = bs.compressed_bits();
            let cr = metrics::compression_ratio(img.raw_bits(), bits).unwrap();
            let psnr = metrics::psnr(&img, &rec).unwrap();
            let ok = units::kbit(bits as f64) <= limit
                && (CR_WINDOW.0..=CR_WINDOW.1).contains(&cr)
                && elapsed < CODEC_TIME_LIMIT
                && psnr.is_finite();
            pass &= ok;
            notes.push(format!(
                "{kind} {side}²: {:.1} kbit CR {cr:.2} PSNR {psnr:.1} dB {:.2}s",
                units::kbit(bits as f64),
                elapsed.as_secs_f64()
            ));
        }
    }
    outcome(pass, notes.join("; "))
}

fn throughput_arithmetic() -> Outcome {
    let t256 = required_throughput(units::from_kbit(51.2), 10.0).unwrap();
    let t512 = required_throughput(units::from_kbit(204.8), 10.0).unwrap();
    let t2000 = required_throughput(units::from_kbit(3125.0), 10.0).unwrap();
    let pass = units::kbit(t256) == 512.0
        && units::mbit(t512) == 2.0
        && units::kbit(t2000) == 31_250.0
        && (units::mbit(t2000) * 10.0).round() / 10.0 == 30.5;
    outcome(
        pass,
        format!("{} kbit/s, {} Mbit/s, {:.3} Mbit/s", units::kbit(t256), units::mbit(t512), units::mbit(t2000)),
    )
}

fn within(value: f64, reference: f64) -> bool {
    (value - reference).abs() <= TIMING_TOLERANCE * reference
}

fn plan(side: u64) -> transport::FragmentationPlan {
    transport::fragment(reference_bytes(side, 20.0), BlockSize::B512).unwrap()
}

fn reference_timing() -> Outcome {
    let p = MacParameters::dot11b();
    let references: [(u64, Scenario, f64); 8] = [
        (256, Scenario::Dcf, 16.6),
        (512, Scenario::Dcf, 66.4),
        (2000, Scenario::Dcf, 1006.3),
        (512, Scenario::DcfRts, 65.6),
        (2000, Scenario::DcfRts, 991.0),
        (256, Scenario::Pcf, 16.5),
        (512, Scenario::Pcf, 65.5),
        (2000, Scenario::Pcf, 990.9),
    ];
    let start = Instant::now();
    let mut pass = true;
    let mut notes = Vec::new();
    for (side, s, reference) in references {
        let ms = macsim::simulate(s, &plan(side), &p).total_time.as_millis();
        pass &= within(ms, reference);
        notes.push(format!("{s} {side}² {ms:.1}/{reference}"));
    }
    let dcf512 = macsim::simulate_dcf(&plan(512), &p);
    let mbps = dcf512.effective_throughput / 1e6;
    pass &= within(mbps, REFERENCE_THROUGHPUT_MBPS);
    let elapsed = start.elapsed();
    pass &= elapsed < SIM_TIME_LIMIT;
    notes.push(format!("throughput {mbps:.2}/{REFERENCE_THROUGHPUT_MBPS} Mb/s, {:.1} ms", elapsed.as_secs_f64() * 1e3));
    outcome(pass, notes.join("; "))
}

fn feasibility() -> Outcome {
    let p = MacParameters::dot11b();
    let mut pass = true;
    let mut notes = Vec::new();
    for (side, expected) in [(256, true), (512, true), (2000, false)] {
        let verdicts: Vec<bool> =
            Scenario::ALL.iter().map(|&s| macsim::simulate(s, &plan(side), &p).meets_10fps).collect();
        pass &= verdicts.iter().all(|&v| v == expected);
        notes.push(format!("{side}²: {verdicts:?}"));
    }
    outcome(pass, notes.join("; "))
}

fn superframe() -> Outcome {
    let p = MacParameters::dot11b();
    let pcf = macsim::simulate_pcf(&plan(512), &p);
    let b = budget_superframe(pcf.total_time, Nanos::from_millis(100), p.slot_time).unwrap();
    let cfp = b.cfp_duration.as_millis();
    let rem = b.dcf_remainder.as_millis();
    let pass = b.feasible && rem >= MIN_DCF_REMAINDER_MS && (CFP_WINDOW_MS.0..=CFP_WINDOW_MS.1).contains(&cfp);
    outcome(pass, format!("CFP {cfp:.2} ms, DCF remainder {rem:.2} ms"))
}

fn random_image(rng: &mut ChaCha8Rng) -> GrayImage {
    let w = rng.random_range(2..=48);
    let h = rng.random_range(2..=48);
    let depth = if rng.random_bool(0.5) { BitDepth::Eight } else { BitDepth::Sixteen };
    let seed = rng.random();
    match rng.random_range(0..3) {
        0 => synth::noise(w, h, depth, seed).unwrap(),
        1 => synth::phantom(w, h, depth, 20.0, seed).unwrap(),
        _ => synth::blobs(w, h, depth, 4, seed).unwrap(),
    }
}

fn max_levels(img: &GrayImage) -> u8 {
    (usize::BITS - 1 - img.width().min(img.height()).leading_zeros()) as u8
}

fn random_params(rng: &mut ChaCha8Rng) -> MacParameters {
    let slot = rng.random_range(1..=50u64);
    let sifs = Nanos::from_micros(rng.random_range(1..=2 * slot));
    let slot = Nanos::from_micros(slot);
    let rate = [1_000_000, 2_000_000, 5_500_000, 11_000_000, 54_000_000][rng.random_range(0..5)];
    MacParameters {
        phy_rate: rate,
        control_rate: if rng.random_bool(0.5) { rate } else { 1_000_000 },
        slot_time: slot,
        sifs,
        pifs: sifs + slot,
        difs: sifs + slot * 2,
        plcp_overhead: Nanos::from_micros(rng.random_range(0..=200)),
        mac_header_bytes: rng.random_range(10..=40),
        mean_backoff_slots: rng.random_range(0.0..20.0),
        retx_factor: rng.random_range(1..=4),
        ..MacParameters::dot11b()
    }
}

fn property_suites() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut failures = Vec::new();

    let mut lossless_ok = 0;
    let mut dwt_ok = 0;
    for _ in 0..100 {
        let img = random_image(&mut rng);
        let levels = rng.random_range(1..=max_levels(&img));
        let bs = codec::compress_lossless(&img, levels).unwrap();
        if codec::decompress_bytes(&bs.to_bytes()).unwrap() == img {
            lossless_ok += 1;
        }
        if dwt_inverse(&dwt_forward(&img, levels).unwrap()).unwrap() == img {
            dwt_ok += 1;
        }
    }
    if lossless_ok != 100 {
        failures.push(format!("lossless {lossless_ok}/100"));
    }
    if dwt_ok != 100 {
        failures.push(format!("dwt {dwt_ok}/100"));
    }

    let mut huff_ok = 0;
    for _ in 0..100 {
        let n = rng.random_range(2..=64);
        let mut freqs: Vec<u64> = (0..n).map(|_| rng.random_range(0..1000u64)).collect();
        freqs[0] += 1;
        freqs[n - 1] += 1;
        let code = huffman::huffman_build(&freqs).unwrap();
        let avg = code.average_length(&freqs);
        let h0 = huffman::entropy_bits(&freqs);
        if h0 <= avg + 1e-12 && avg < h0 + 1.0 {
            huff_ok += 1;
        }
    }
    if huff_ok != 100 {
        failures.push(format!("huffman {huff_ok}/100"));
    }

    let mut oracle_ok = 0;
    for _ in 0..100 {
        let (w, h) = (rng.random_range(1..=8), rng.random_range(1..=8));
        let depth = if rng.random_bool(0.5) { BitDepth::Eight } else { BitDepth::Sixteen };
        let a = synth::noise(w, h, depth, rng.random()).unwrap();
        let b = synth::noise(w, h, depth, rng.random()).unwrap();
        let mut sum = 0.0;
        let mut counts = std::collections::BTreeMap::new();
        for y in 0..h {
            for x in 0..w {
                let d = f64::from(a.pixel(x, y)) - f64::from(b.pixel(x, y));
                sum += d * d;
                *counts.entry(a.pixel(x, y)).or_insert(0u32) += 1;
            }
        }
        let n = (w * h) as f64;
        let entropy: f64 = counts.values().map(|&c| -(f64::from(c) / n) * (f64::from(c) / n).log2()).sum();
        let mse_ok = metrics::mse(&a, &b).unwrap() == sum / n;
        let h_ok = (metrics::entropy_h0(&a) - entropy).abs() < 1e-12;
        if mse_ok && h_ok {
            oracle_ok += 1;
        }
    }
    if oracle_ok != 100 {
        failures.push(format!("mse/entropy oracle {oracle_ok}/100"));
    }

    let mut order_ok = 0;
    for _ in 0..50 {
        let p = random_params(&mut rng);
        let bs = BlockSize::ALL[rng.random_range(0..3)];
        let plan = transport::fragment(rng.random_range(4096..600_000), bs).unwrap();
        let dcf = macsim::simulate_dcf(&plan, &p).total_time;
        let rts = macsim::simulate_dcf_rts(&plan, &p).total_time;
        let pcf = macsim::simulate_pcf(&plan, &p).total_time;
        if pcf <= dcf && dcf <= rts {
            order_ok += 1;
        }
    }
    if order_ok != 50 {
        failures.push(format!("scenario ordering {order_ok}/50"));
    }

    let mut frag_ok = 0;
    for _ in 0..1000 {
        let bytes = rng.random_range(1..3_000_000u64);
        let bs = BlockSize::ALL[rng.random_range(0..3)];
        let plan = transport::fragment(bytes, bs).unwrap();
        let total: u64 = plan.blocks.iter().map(|&b| u64::from(b)).sum();
        if total == bytes && plan.data_packet_count as u64 == bytes / u64::from(bs.bytes()) + 1 {
            frag_ok += 1;
        }
    }
    if frag_ok != 1000 {
        failures.push(format!("fragmentation {frag_ok}/1000"));
    }

    if failures.is_empty() {
        outcome(
            true,
            "lossless 100/100, dwt 100/100, huffman 100/100, oracles 100/100, ordering 50/50, reassembly 1000/1000"
                .into(),
        )
    } else {
        outcome(false, failures.join(", "))
    }
}

fn main() {
    let criteria: [Criterion; 6] = [
        ("reference-sizes", reference_sizes),
        ("throughput-arithmetic", throughput_arithmetic),
        ("reference-timing", reference_timing),
        ("feasibility-verdicts", feasibility),
        ("superframe", superframe),
        ("property-suites", property_suites),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let o = check();
        println!("{} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        failed += usize::from(!o.pass);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
