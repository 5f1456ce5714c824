//! Analytic 802.11 airtime model for one image transfer.
//!
//! Three access scenarios are modeled, each applying a systematic
//! retransmission factor `r` to every data frame:
//!
//! * **DCF**: one channel acquisition per packet (`DIFS` + mean backoff),
//!   then `r` SIFS-separated copies of `DATA, SIFS, ACK`.
//! * **DCF + RTS/CTS**: as DCF, with `RTS, SIFS, CTS, SIFS` after each
//!   acquisition.
//! * **PCF**: one `PIFS` opens the contention-free period, then `r` copies
//!   of `DATA+CF-Poll, SIFS, CF-ACK, SIFS` per packet.
//!
//! All durations are integer nanoseconds, so results are bit-reproducible.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use thiserror::Error;

use crate::transport::FragmentationPlan;

/// A duration in integer nanoseconds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Nanos(pub u64);

impl Nanos {
    pub const ZERO: Nanos = Nanos(0);

    pub fn from_micros(us: u64) -> Nanos {
        Nanos(us * 1_000)
    }

    pub fn from_millis(ms: u64) -> Nanos {
        Nanos(ms * 1_000_000)
    }

    /// Rounds a fractional microsecond count to the nearest nanosecond.
    pub fn from_micros_f64(us: f64) -> Option<Nanos> {
        let ns = (us * 1_000.0).round();
        (ns.is_finite() && ns >= 0.0 && ns < u64::MAX as f64).then_some(Nanos(ns as u64))
    }

    pub fn as_micros(self) -> f64 {
        self.0 as f64 / 1_000.0
    }

    pub fn as_millis(self) -> f64 {
        self.0 as f64 / 1_000_000.0
    }

    pub fn as_secs(self) -> f64 {
        self.0 as f64 / 1_000_000_000.0
    }

    /// Smallest multiple of `unit` that is at least `self`.
    pub fn round_up_to(self, unit: Nanos) -> Nanos {
        if unit.0 == 0 {
            self
        } else {
            Nanos(self.0.div_ceil(unit.0) * unit.0)
        }
    }
}

impl std::ops::Add for Nanos {
    type Output = Nanos;
    fn add(self, o: Nanos) -> Nanos {
        Nanos(self.0 + o.0)
    }
}

impl std::ops::AddAssign for Nanos {
    fn add_assign(&mut self, o: Nanos) {
        self.0 += o.0;
    }
}

impl std::ops::Mul<u64> for Nanos {
    type Output = Nanos;
    fn mul(self, k: u64) -> Nanos {
        Nanos(self.0 * k)
    }
}

impl std::iter::Sum for Nanos {
    fn sum<I: Iterator<Item = Nanos>>(iter: I) -> Nanos {
        Nanos(iter.map(|n| n.0).sum())
    }
}

impl fmt::Display for Nanos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.3} ms", self.as_millis())
    }
}

/// How retransmitted copies of a data frame reach the medium.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RetxMode {
    /// Copies follow each other SIFS-separated inside one acquisition.
    #[default]
    Burst,
    /// Every copy contends for the medium again.
    Reacquire,
}

impl FromStr for RetxMode {
    type Err = MacError;
    fn from_str(s: &str) -> Result<Self, MacError> {
        match s {
            "burst" => Ok(RetxMode::Burst),
            "reacquire" => Ok(RetxMode::Reacquire),
            _ => Err(MacError::Config { line: 0, message: format!("unknown retx_mode {s:?}") }),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MacError {
    #[error("invalid MAC parameters: {0}")]
    Invalid(&'static str),
    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },
    #[error("unknown MAC profile {0:?}; expected 11b, 11b-std or 11g")]
    UnknownProfile(String),
    #[error("superframe budget needs a positive image time and beacon interval")]
    ZeroDuration,
}

/// PHY and MAC timing constants.
#[derive(Debug, Clone, PartialEq)]
pub struct MacParameters {
    /// Data rate, bit/s.
    pub phy_rate: u64,
    /// Rate of ACK, RTS, CTS and CF-ACK frames, bit/s.
    pub control_rate: u64,
    pub slot_time: Nanos,
    pub sifs: Nanos,
    pub difs: Nanos,
    pub pifs: Nanos,
    /// PHY preamble and header airtime prepended to every frame.
    pub plcp_overhead: Nanos,
    /// MAC header plus FCS.
    pub mac_header_bytes: u32,
    pub ack_bytes: u32,
    pub rts_bytes: u32,
    pub cts_bytes: u32,
    pub cf_poll_extra_bytes: u32,
    pub mean_backoff_slots: f64,
    /// Transmissions of every data frame.
    pub retx_factor: u32,
    pub retx_mode: RetxMode,
    pub cw_min: u32,
    pub beacon_interval: Nanos,
}

impl Default for MacParameters {
    fn default() -> Self {
        MacParameters::dot11b()
    }
}

impl MacParameters {
    /// 802.11b at 11 Mb/s with a 72 µs PLCP, calibrated against the
    /// reference transmission times.
    pub fn dot11b() -> Self {
        MacParameters {
            phy_rate: 11_000_000,
            control_rate: 11_000_000,
            slot_time: Nanos::from_micros(20),
            sifs: Nanos::from_micros(10),
            difs: Nanos::from_micros(50),
            pifs: Nanos::from_micros(30),
            plcp_overhead: Nanos::from_micros(72),
            mac_header_bytes: 28,
            ack_bytes: 14,
            rts_bytes: 20,
            cts_bytes: 14,
            cf_poll_extra_bytes: 0,
            mean_backoff_slots: 0.0,
            retx_factor: 2,
            retx_mode: RetxMode::Burst,
            cw_min: 31,
            beacon_interval: Nanos::from_millis(100),
        }
    }

    /// 802.11b with the short-preamble 96 µs PLCP.
    pub fn dot11b_standard() -> Self {
        MacParameters { plcp_overhead: Nanos::from_micros(96), ..MacParameters::dot11b() }
    }

    /// 802.11g ERP-OFDM at 54 Mb/s: 20 µs PLCP plus 6 µs signal extension.
    pub fn dot11g() -> Self {
        MacParameters {
            phy_rate: 54_000_000,
            control_rate: 54_000_000,
            slot_time: Nanos::from_micros(9),
            sifs: Nanos::from_micros(10),
            difs: Nanos::from_micros(28),
            pifs: Nanos::from_micros(19),
            plcp_overhead: Nanos::from_micros(26),
            cw_min: 15,
            ..MacParameters::dot11b()
        }
    }

    /// Looks up a named profile: `11b`, `11b-std` or `11g`.
    pub fn profile(name: &str) -> Result<Self, MacError> {
        match name {
            "11b" => Ok(MacParameters::dot11b()),
            "11b-std" => Ok(MacParameters::dot11b_standard()),
            "11g" => Ok(MacParameters::dot11g()),
            other => Err(MacError::UnknownProfile(other.to_string())),
        }
    }

    /// Sets the expected backoff to `CWmin / 2` slots.
    pub fn with_cwmin_backoff(mut self) -> Self {
        self.mean_backoff_slots = f64::from(self.cw_min) / 2.0;
        self
    }

    pub fn validate(&self) -> Result<(), MacError> {
        if self.phy_rate == 0 || self.control_rate == 0 {
            return Err(MacError::Invalid("rates must be positive"));
        }
        if !(self.sifs > Nanos::ZERO && self.pifs > self.sifs && self.difs > self.pifs) {
            return Err(MacError::Invalid("need difs > pifs > sifs > 0"));
        }
        if self.retx_factor == 0 {
            return Err(MacError::Invalid("retx_factor must be at least 1"));
        }
        if !(self.mean_backoff_slots >= 0.0 && self.mean_backoff_slots.is_finite()) {
            return Err(MacError::Invalid("mean_backoff_slots must be finite and non-negative"));
        }
        Ok(())
    }

    /// Expected contention delay before a DCF transmission.
    pub fn backoff(&self) -> Nanos {
        Nanos((self.mean_backoff_slots * self.slot_time.0 as f64).round() as u64)
    }

    /// Parses `key = value` lines over a base profile. A `profile` key, if
    /// present, must come first. Blank lines and `#` comments are skipped.
    pub fn from_config(text: &str) -> Result<Self, MacError> {
        let mut p = MacParameters::dot11b();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let err = |message: String| MacError::Config { line: line_no, message };
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| err(format!("expected key = value, got {line:?}")))?;
            let num = || -> Result<f64, MacError> {
                value
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite() && *v >= 0.0)
                    .ok_or_else(|| err(format!("{key}: expected a non-negative number, got {value:?}")))
            };
            let micros = || -> Result<Nanos, MacError> {
                Nanos::from_micros_f64(num()?).ok_or_else(|| err(format!("{key}: duration out of range")))
            };
            let int = || -> Result<u32, MacError> {
                value.parse::<u32>().map_err(|_| err(format!("{key}: expected an unsigned integer, got {value:?}")))
            };
            match key {
                "profile" => {
                    if i != 0 && text.lines().take(i).any(|l| !l.split('#').next().unwrap_or("").trim().is_empty()) {
                        return Err(err("profile must be the first setting".into()));
                    }
                    p = MacParameters::profile(value).map_err(|e| err(e.to_string()))?;
                }
                "phy_rate" => p.phy_rate = num()? as u64,
                "control_rate" => p.control_rate = num()? as u64,
                "slot_us" => p.slot_time = micros()?,
                "sifs_us" => p.sifs = micros()?,
                "difs_us" => p.difs = micros()?,
                "pifs_us" => p.pifs = micros()?,
                "plcp_us" => p.plcp_overhead = micros()?,
                "beacon_interval_us" => p.beacon_interval = micros()?,
                "mac_header_bytes" => p.mac_header_bytes = int()?,
                "ack_bytes" => p.ack_bytes = int()?,
                "rts_bytes" => p.rts_bytes = int()?,
                "cts_bytes" => p.cts_bytes = int()?,
                "cf_poll_extra_bytes" => p.cf_poll_extra_bytes = int()?,
                "cw_min" => p.cw_min = int()?,
                "mean_backoff_slots" if value == "cwmin/2" => p = p.with_cwmin_backoff(),
                "mean_backoff_slots" => p.mean_backoff_slots = num()?,
                "retx_factor" => p.retx_factor = int()?,
                "retx_mode" => {
                    p.retx_mode = value
                        .parse()
                        .map_err(|_| err(format!("retx_mode: expected burst or reacquire, got {value:?}")))?
                }
                other => return Err(err(format!("unknown key {other:?}"))),
            }
        }
        p.validate()?;
        Ok(p)
    }

    /// Renders every field in the format [`MacParameters::from_config`] reads.
    pub fn to_config(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "phy_rate = {}", self.phy_rate);
        let _ = writeln!(s, "control_rate = {}", self.control_rate);
        for (k, v) in [
            ("slot_us", self.slot_time),
            ("sifs_us", self.sifs),
            ("difs_us", self.difs),
            ("pifs_us", self.pifs),
            ("plcp_us", self.plcp_overhead),
            ("beacon_interval_us", self.beacon_interval),
        ] {
            let _ = writeln!(s, "{k} = {}", v.as_micros());
        }
        for (k, v) in [
            ("mac_header_bytes", self.mac_header_bytes),
            ("ack_bytes", self.ack_bytes),
            ("rts_bytes", self.rts_bytes),
            ("cts_bytes", self.cts_bytes),
            ("cf_poll_extra_bytes", self.cf_poll_extra_bytes),
            ("cw_min", self.cw_min),
            ("retx_factor", self.retx_factor),
        ] {
            let _ = writeln!(s, "{k} = {v}");
        }
        let _ = writeln!(s, "mean_backoff_slots = {}", self.mean_backoff_slots);
        let mode = match self.retx_mode {
            RetxMode::Burst => "burst",
            RetxMode::Reacquire => "reacquire",
        };
        let _ = writeln!(s, "retx_mode = {mode}");
        s
    }
}

fn bits_airtime(bits: u64, rate: u64) -> Nanos {
    let ns = (u128::from(bits) * 1_000_000_000 + u128::from(rate) / 2) / u128::from(rate);
    Nanos(ns as u64)
}

/// `plcp + 8 · (mac_header + msdu) / rate`.
pub fn frame_airtime(p: &MacParameters, msdu_bytes: u32, rate: u64) -> Nanos {
    p.plcp_overhead + bits_airtime(8 * u64::from(p.mac_header_bytes + msdu_bytes), rate)
}

/// `plcp + 8 · bytes / control_rate`, for ACK, RTS, CTS and CF-ACK frames.
pub fn control_airtime(p: &MacParameters, frame_bytes: u32) -> Nanos {
    p.plcp_overhead + bits_airtime(8 * u64::from(frame_bytes), p.control_rate)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scenario {
    Dcf,
    DcfRts,
    Pcf,
}

impl Scenario {
    pub const ALL: [Scenario; 3] = [Scenario::Dcf, Scenario::DcfRts, Scenario::Pcf];

    pub fn label(self) -> &'static str {
        match self {
            Scenario::Dcf => "dcf",
            Scenario::DcfRts => "dcf-rts",
            Scenario::Pcf => "pcf",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Scenario {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "dcf" => Ok(Scenario::Dcf),
            "dcf-rts" => Ok(Scenario::DcfRts),
            "pcf" => Ok(Scenario::Pcf),
            other => Err(format!("unknown scenario {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioResult {
    pub scenario: Scenario,
    pub per_packet_times: Vec<Nanos>,
    pub total_time: Nanos,
    /// Image bits divided by total time, bit/s.
    pub effective_throughput: f64,
    /// Images per second the link sustains.
    pub fps_capacity: f64,
    pub meets_10fps: bool,
}

impl ScenarioResult {
    fn new(scenario: Scenario, per_packet_times: Vec<Nanos>, payload_bits: u64) -> Self {
        let total_time: Nanos = per_packet_times.iter().copied().sum();
        let secs = total_time.as_secs();
        ScenarioResult {
            scenario,
            per_packet_times,
            total_time,
            effective_throughput: payload_bits as f64 / secs,
            fps_capacity: 1.0 / secs,
            meets_10fps: total_time <= Nanos::from_millis(100),
        }
    }

    /// Whether one image fits in the `1 / fps` frame period.
    pub fn meets_fps(&self, fps: f64) -> bool {
        self.total_time.as_secs() <= 1.0 / fps
    }
}

/// One DATA exchange and, if modeled, the TFTP ACK flowing back.
fn exchange_msdus(plan: &FragmentationPlan, msdu: u32) -> impl Iterator<Item = u32> {
    std::iter::once(msdu).chain(plan.ack_msdu())
}

fn dcf_times(plan: &FragmentationPlan, p: &MacParameters, rts: bool) -> Vec<Nanos> {
    let r = u64::from(p.retx_factor);
    let acquire = p.difs + p.backoff();
    let reservation = if rts {
        control_airtime(p, p.rts_bytes) + p.sifs + control_airtime(p, p.cts_bytes) + p.sifs
    } else {
        Nanos::ZERO
    };
    let ack = control_airtime(p, p.ack_bytes);
    plan.packet_payloads
        .iter()
        .map(|&msdu| {
            exchange_msdus(plan, msdu)
                .map(|m| {
                    let copy = frame_airtime(p, m, p.phy_rate) + p.sifs + ack;
                    match p.retx_mode {
                        RetxMode::Burst => acquire + reservation + copy * r + p.sifs * (r - 1),
                        RetxMode::Reacquire => (acquire + reservation + copy) * r,
                    }
                })
                .sum()
        })
        .collect()
}

pub fn simulate_dcf(plan: &FragmentationPlan, p: &MacParameters) -> ScenarioResult {
    ScenarioResult::new(Scenario::Dcf, dcf_times(plan, p, false), plan.payload_bits())
}

pub fn simulate_dcf_rts(plan: &FragmentationPlan, p: &MacParameters) -> ScenarioResult {
    ScenarioResult::new(Scenario::DcfRts, dcf_times(plan, p, true), plan.payload_bits())
}

/// Contention-free transfer. The opening PIFS is charged to the first packet.
///
/// The result is no slower than [`simulate_dcf`] whenever
/// `PIFS + n·r·airtime(cf_poll_extra) <= n·(DIFS - SIFS + backoff)` for `n`
/// packets, which holds for every standard profile once `n >= 2`.
pub fn simulate_pcf(plan: &FragmentationPlan, p: &MacParameters) -> ScenarioResult {
    let r = u64::from(p.retx_factor);
    let cf_ack = control_airtime(p, p.ack_bytes);
    let mut times: Vec<Nanos> = plan
        .packet_payloads
        .iter()
        .map(|&msdu| {
            exchange_msdus(plan, msdu)
                .map(|m| (frame_airtime(p, m + p.cf_poll_extra_bytes, p.phy_rate) + p.sifs + cf_ack + p.sifs) * r)
                .sum()
        })
        .collect();
    if let Some(first) = times.first_mut() {
        *first += p.pifs;
    }
    ScenarioResult::new(Scenario::Pcf, times, plan.payload_bits())
}

pub fn simulate(scenario: Scenario, plan: &FragmentationPlan, p: &MacParameters) -> ScenarioResult {
    match scenario {
        Scenario::Dcf => simulate_dcf(plan, p),
        Scenario::DcfRts => simulate_dcf_rts(plan, p),
        Scenario::Pcf => simulate_pcf(plan, p),
    }
}

/// Split of one beacon interval between the contention-free period that
/// carries an image and what is left for DCF traffic.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SuperframeBudget {
    pub beacon_interval: Nanos,
    pub cfp_duration: Nanos,
    /// Zero when the image does not fit.
    pub dcf_remainder: Nanos,
    pub feasible: bool,
}

/// Sizes the CFP to `image_time` rounded up to a whole slot.
pub fn budget_superframe(
    image_time: Nanos,
    beacon_interval: Nanos,
    slot_time: Nanos,
) -> Result<SuperframeBudget, MacError> {
    if image_time == Nanos::ZERO || beacon_interval == Nanos::ZERO {
        return Err(MacError::ZeroDuration);
    }
    let cfp_duration = image_time.round_up_to(slot_time);
    let feasible = cfp_duration <= beacon_interval;
    Ok(SuperframeBudget {
        beacon_interval,
        cfp_duration,
        dcf_remainder: Nanos(beacon_interval.0.saturating_sub(cfp_duration.0)),
        feasible,
    })
}

/// One labeled simulation run, as emitted by the reports below.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub image: String,
    pub phy_rate: u64,
    pub blocksize: u32,
    pub image_bytes: u64,
    pub packets: usize,
    pub result: ScenarioResult,
    pub meets_fps: bool,
}

pub const CSV_HEADER: &str =
    "image,phy_mbps,scenario,blocksize,image_bytes,packets,total_ms,throughput_mbps,fps_capacity,meets_fps";

fn mbps(rate: f64) -> f64 {
    rate / 1e6
}

/// CSV with [`CSV_HEADER`] columns. Rates are decimal Mb/s.
pub fn results_csv(rows: &[ReportRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{:.3},{:.3},{:.3},{}",
            r.image,
            mbps(r.phy_rate as f64),
            r.result.scenario,
            r.blocksize,
            r.image_bytes,
            r.packets,
            r.result.total_time.as_millis(),
            mbps(r.result.effective_throughput),
            r.result.fps_capacity,
            r.meets_fps
        );
    }
    out
}

/// Plain-text table with one line per image and rate, one column per scenario.
pub fn results_table(rows: &[ReportRow]) -> String {
    let mut keys: Vec<(String, u64)> = Vec::new();
    for r in rows {
        let k = (r.image.clone(), r.phy_rate);
        if !keys.contains(&k) {
            keys.push(k);
        }
    }
    let mut out = String::new();
    let _ = writeln!(out, "{:<22} {:>9} {:>12} {:>12} {:>12}", "image", "phy Mb/s", "DCF ms", "DCF+RTS ms", "PCF ms");
    for (image, rate) in keys {
        let cell = |s: Scenario| {
            rows.iter()
                .find(|r| r.image == image && r.phy_rate == rate && r.result.scenario == s)
                .map(|r| format!("{:.1}", r.result.total_time.as_millis()))
                .unwrap_or_else(|| "-".to_string())
        };
        let _ = writeln!(
            out,
            "{:<22} {:>9} {:>12} {:>12} {:>12}",
            image,
            mbps(rate as f64),
            cell(Scenario::Dcf),
            cell(Scenario::DcfRts),
            cell(Scenario::Pcf)
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transport::{fragment, fragment_with, BlockSize};
    use proptest::prelude::*;

    fn mri512() -> FragmentationPlan {
        fragment(26_214, BlockSize::B512).unwrap()
    }

    #[test]
    fn airtime_examples() {
        let p = MacParameters { mac_header_bytes: 34, ..MacParameters::dot11b_standard() };
        assert_eq!(frame_airtime(&p, 0, 11_000_000), Nanos(96_000 + 24_727));
        let fast = MacParameters { plcp_overhead: Nanos::ZERO, ..p.clone() };
        assert_eq!(frame_airtime(&fast, 1000, 11_000_000), Nanos(2 * frame_airtime(&fast, 1000, 22_000_000).0));
        let ack = control_airtime(&MacParameters::dot11b(), 14);
        assert_eq!(ack, Nanos(72_000 + 10_182));
    }

    #[test]
    fn profiles_are_valid() {
        for name in ["11b", "11b-std", "11g"] {
            MacParameters::profile(name).unwrap().validate().unwrap();
        }
        assert!(MacParameters::profile("11n").is_err());
        assert_eq!(MacParameters::dot11b().with_cwmin_backoff().mean_backoff_slots, 15.5);
        assert_eq!(MacParameters::dot11g().with_cwmin_backoff().mean_backoff_slots, 7.5);
    }

    #[test]
    fn config_round_trip() {
        let p = MacParameters { mean_backoff_slots: 3.25, retx_mode: RetxMode::Reacquire, ..MacParameters::dot11g() };
        assert_eq!(MacParameters::from_config(&p.to_config()).unwrap(), p);
        let q = MacParameters::from_config("profile = 11g\n# comment\nretx_factor = 3 # inline\n").unwrap();
        assert_eq!(q.retx_factor, 3);
        assert_eq!(q.phy_rate, 54_000_000);
        let c = MacParameters::from_config("mean_backoff_slots = cwmin/2").unwrap();
        assert_eq!(c.mean_backoff_slots, 15.5);
    }

    #[test]
    fn config_errors_carry_line_numbers() {
        let e = MacParameters::from_config("sifs_us = 10\nbogus = 1").unwrap_err();
        assert!(matches!(e, MacError::Config { line: 2, .. }));
        let e = MacParameters::from_config("\nslot_us = -3").unwrap_err();
        assert!(matches!(e, MacError::Config { line: 2, .. }));
        let e = MacParameters::from_config("retx_factor = 1\nprofile = 11g").unwrap_err();
        assert!(matches!(e, MacError::Config { line: 2, .. }));
        assert!(matches!(MacParameters::from_config("pifs_us = 60"), Err(MacError::Invalid(_))));
    }

    #[test]
    fn dcf_per_packet_formula() {
        let p = MacParameters::dot11b();
        let plan = fragment(600, BlockSize::B512).unwrap();
        let res = simulate_dcf(&plan, &p);
        let ack = control_airtime(&p, 14);
        let first = frame_airtime(&p, 552, p.phy_rate);
        let expected = p.difs + (first + p.sifs + ack) * 2 + p.sifs;
        assert_eq!(res.per_packet_times[0], expected);
        assert_eq!(res.total_time, res.per_packet_times.iter().copied().sum());
    }

    #[test]
    fn rts_adds_handshake_per_packet() {
        let p = MacParameters::dot11b();
        let plan = mri512();
        let extra = control_airtime(&p, p.rts_bytes) + control_airtime(&p, p.cts_bytes) + p.sifs * 2;
        let dcf = simulate_dcf(&plan, &p).total_time;
        let rts = simulate_dcf_rts(&plan, &p).total_time;
        assert_eq!(rts, dcf + extra * plan.data_packet_count as u64);
    }

    #[test]
    fn retx_linearity() {
        let plan = mri512();
        let t = |r: u32| {
            let p = MacParameters { retx_factor: r, ..MacParameters::dot11b() };
            simulate_dcf(&plan, &p).total_time.0
        };
        let (t1, t2, t3) = (t(1), t(2), t(3));
        assert_eq!(t3 - t2, t2 - t1);
    }

    #[test]
    fn reacquire_costs_more() {
        let plan = mri512();
        let burst = MacParameters::dot11b();
        let re = MacParameters { retx_mode: RetxMode::Reacquire, ..MacParameters::dot11b() };
        assert!(simulate_dcf(&plan, &re).total_time > simulate_dcf(&plan, &burst).total_time);
    }

    #[test]
    fn tftp_acks_cost_more() {
        let p = MacParameters::dot11b();
        let plain = simulate_pcf(&fragment(10_000, BlockSize::B512).unwrap(), &p);
        let acked = simulate_pcf(&fragment_with(10_000, BlockSize::B512, true).unwrap(), &p);
        assert!(acked.total_time > plain.total_time);
        assert!(acked.effective_throughput < plain.effective_throughput);
    }

    #[test]
    fn superframe_examples() {
        let slot = Nanos::from_micros(20);
        let beacon = Nanos::from_millis(100);
        let b = budget_superframe(Nanos(66_400_000), beacon, slot).unwrap();
        assert!(b.feasible);
        assert_eq!(b.cfp_duration, Nanos(66_400_000));
        assert!(b.dcf_remainder < Nanos::from_millis(50));
        assert_eq!(b.cfp_duration + b.dcf_remainder, beacon);
        let b = budget_superframe(Nanos::from_millis(991), beacon, slot).unwrap();
        assert!(!b.feasible);
        assert_eq!(b.dcf_remainder, Nanos::ZERO);
        let b = budget_superframe(beacon, beacon, slot).unwrap();
        assert!(b.feasible && b.dcf_remainder == Nanos::ZERO);
        let b = budget_superframe(Nanos(1), beacon, slot).unwrap();
        assert_eq!(b.cfp_duration, slot);
        assert_eq!(budget_superframe(Nanos::ZERO, beacon, slot), Err(MacError::ZeroDuration));
    }

    #[test]
    fn report_formats() {
        let p = MacParameters::dot11b();
        let plan = mri512();
        let rows: Vec<ReportRow> = Scenario::ALL
            .iter()
            .map(|&s| {
                let result = simulate(s, &plan, &p);
                ReportRow {
                    image: "mri-512x512".into(),
                    phy_rate: p.phy_rate,
                    blocksize: 512,
                    image_bytes: plan.total_payload_bytes,
                    packets: plan.data_packet_count,
                    meets_fps: result.meets_fps(10.0),
                    result,
                }
            })
            .collect();
        let csv = results_csv(&rows);
        assert_eq!(csv.lines().count(), 4);
        assert!(csv.lines().nth(1).unwrap().starts_with("mri-512x512,11,dcf,512,26214,52,"));
        let table = results_table(&rows);
        assert_eq!(table.lines().count(), 2);
        assert!(!table.contains(" - "));
    }

    /// Random but internally consistent parameters: PIFS = SIFS + slot,
    /// DIFS = SIFS + 2 slots, SIFS at most two slots.
    fn params() -> impl Strategy<Value = MacParameters> {
        (
            prop_oneof![Just(1_000_000u64), Just(2_000_000), Just(5_500_000), Just(11_000_000), Just(54_000_000)],
            (1u64..=50).prop_flat_map(|slot| (Just(slot), 1..=2 * slot)),
            0u64..=200,
            10u32..=40,
            1u32..=4,
            0.0f64..20.0,
            any::<bool>(),
        )
            .prop_map(|(rate, (slot, sifs), plcp, hdr, r, backoff, basic)| {
                let (slot, sifs) = (Nanos::from_micros(slot), Nanos::from_micros(sifs));
                MacParameters {
                    phy_rate: rate,
                    control_rate: if basic { 1_000_000 } else { rate },
                    slot_time: slot,
                    sifs,
                    pifs: sifs + slot,
                    difs: sifs + slot * 2,
                    plcp_overhead: Nanos::from_micros(plcp),
                    mac_header_bytes: hdr,
                    mean_backoff_slots: backoff,
                    retx_factor: r,
                    ..MacParameters::dot11b()
                }
            })
    }

    fn blocksize() -> impl Strategy<Value = BlockSize> {
        prop_oneof![Just(BlockSize::B512), Just(BlockSize::B1024), Just(BlockSize::B2048)]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(50))]

        #[test]
        fn scenario_ordering(p in params(), bytes in 4096u64..600_000, bs in blocksize()) {
            let plan = fragment(bytes, bs).unwrap();
            let dcf = simulate_dcf(&plan, &p);
            let rts = simulate_dcf_rts(&plan, &p);
            let pcf = simulate_pcf(&plan, &p);
            prop_assert!(pcf.total_time <= dcf.total_time);
            prop_assert!(dcf.total_time <= rts.total_time);
            for res in [&dcf, &rts, &pcf] {
                prop_assert!(res.effective_throughput < p.phy_rate as f64);
                prop_assert_eq!(res.total_time, res.per_packet_times.iter().copied().sum::<Nanos>());
            }
        }

        #[test]
        fn monotone_in_retx_and_size(p in params(), bytes in 1u64..200_000, bs in blocksize()) {
            let plan = fragment(bytes, bs).unwrap();
            let bigger = fragment(bytes + u64::from(bs.bytes()), bs).unwrap();
            let more = MacParameters { retx_factor: p.retx_factor + 1, ..p.clone() };
            let slower = MacParameters { plcp_overhead: p.plcp_overhead + Nanos(1_000), ..p.clone() };
            for s in Scenario::ALL {
                let base = simulate(s, &plan, &p).total_time;
                prop_assert!(simulate(s, &plan, &more).total_time > base);
                prop_assert!(simulate(s, &bigger, &p).total_time > base);
                prop_assert!(simulate(s, &plan, &slower).total_time > base);
            }
        }

        #[test]
        fn larger_blocks_never_slower(p in params(), bytes in 1u64..300_000) {
            for s in Scenario::ALL {
                let times: Vec<Nanos> = BlockSize::ALL
                    .iter()
                    .map(|&b| simulate(s, &fragment(bytes, b).unwrap(), &p).total_time)
                    .collect();
                prop_assert!(times[1] <= times[0] && times[2] <= times[1], "{:?} {:?}", s, times);
            }
        }

        #[test]
        fn deterministic(p in params(), bytes in 1u64..100_000) {
            let plan = fragment(bytes, BlockSize::B1024).unwrap();
            for s in Scenario::ALL {
                prop_assert_eq!(simulate(s, &plan, &p), simulate(s, &plan, &p.clone()));
            }
        }
    }
}
