use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn medlink(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_medlink"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env_remove("MEDLINK_PROFILE")
        .output()
        .expect("spawn medlink")
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path).unwrap().lines().skip(1).map(|l| l.split(',').map(str::to_string).collect()).collect()
}

fn column(path: &Path, name: &str) -> usize {
    let text = fs::read_to_string(path).unwrap();
    text.lines().next().unwrap().split(',').position(|c| c == name).unwrap()
}

#[test]
fn compress_reference_image() {
    let dir = tempfile::tempdir().unwrap();
    let o = medlink(&["compress", "--input", "synth:phantom:512x512:16:1", "--write-decoded"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let q = dir.path().join("quality.csv");
    let rows = csv_rows(&q);
    assert_eq!(rows.len(), 1);
    let bits: u64 = rows[0][column(&q, "bits_compressed")].parse().unwrap();
    assert!(bits as f64 <= 204.8 * 1024.0, "{bits}");
    assert!(dir.path().join("synth-phantom-512x512-16-1.wbc").exists());
    assert!(dir.path().join("synth-phantom-512x512-16-1.decoded.pgm").exists());
}

#[test]
fn lossless_reports_infinite_psnr_and_decodes() {
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("tiny.pgm");
    fs::write(&src, b"P2\n4 2\n255\n0 10 20 30\n40 50 60 255\n").unwrap();
    let o = medlink(&["compress", "--input", src.to_str().unwrap(), "--lossless", "--levels", "1"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let q = dir.path().join("quality.csv");
    assert_eq!(csv_rows(&q)[0][column(&q, "psnr_db")], "inf");

    let out = dir.path().join("decoded");
    let wbc = dir.path().join("tiny.wbc");
    let o = medlink(&["decompress", "--input", wbc.to_str().unwrap(), "--ascii"], &out);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(out.join("tiny.pgm")).unwrap();
    let samples: Vec<&str> = text.split_whitespace().skip(4).collect();
    assert_eq!(samples, ["0", "10", "20", "30", "40", "50", "60", "255"]);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let o = medlink(&["compress", "--input", "/no/such/file.pgm"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(!o.stderr.is_empty());

    let o = medlink(&["compress", "--input", "synth:noise:64x64:8:1", "--cr", "5000"], dir.path());
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unreachable"));

    let o = medlink(&["simulate", "--require-feasible"], dir.path());
    assert_eq!(o.status.code(), Some(1));

    let o = medlink(&["sweep", "--cr-points", ""], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let o = medlink(&["simulate", "--blocksize", "700"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let o = medlink(&["simulate", "--fps", "0"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn default_simulation_has_eighteen_rows() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    assert!(medlink(&["simulate"], a.path()).status.success());
    assert!(medlink(&["simulate"], b.path()).status.success());
    let csv = a.path().join("simulate.csv");
    assert_eq!(fs::read(&csv).unwrap(), fs::read(b.path().join("simulate.csv")).unwrap());

    let rows = csv_rows(&csv);
    assert_eq!(rows.len(), 18);
    let (img, phy, meets) = (column(&csv, "image"), column(&csv, "phy_mbps"), column(&csv, "meets_fps"));
    for r in rows.iter().filter(|r| r[phy] == "11") {
        let expected = if r[img].starts_with("mri") { "true" } else { "false" };
        assert_eq!(r[meets], expected, "{r:?}");
    }
    let sf = csv_rows(&a.path().join("superframe.csv"));
    assert_eq!(sf.len(), 6);
}

#[test]
fn profile_from_env_and_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_medlink"))
        .args(["simulate", "--scenario", "pcf", "--out"])
        .arg(dir.path())
        .env("MEDLINK_PROFILE", "11g")
        .output()
        .unwrap();
    assert!(o.status.success());
    let csv = dir.path().join("simulate.csv");
    let rows = csv_rows(&csv);
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| r[column(&csv, "phy_mbps")] == "54"));

    let cfg = dir.path().join("mac.conf");
    fs::write(&cfg, "profile = 11b\nretx_factor = 1\n").unwrap();
    let out = dir.path().join("cfg");
    let o = medlink(&["simulate", "--mac-config", cfg.to_str().unwrap(), "--scenario", "dcf"], &out);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(csv_rows(&out.join("simulate.csv")).len(), 3);

    fs::write(&cfg, "slot_us = fast\n").unwrap();
    let o = medlink(&["simulate", "--mac-config", cfg.to_str().unwrap()], &out);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 1"));
}

#[test]
fn simulate_accepts_compressed_files() {
    let dir = tempfile::tempdir().unwrap();
    assert!(medlink(&["compress", "--input", "synth:blobs:256x256:16:3"], dir.path()).status.success());
    let wbc = dir.path().join("synth-blobs-256x256-16-3.wbc");
    let size = fs::metadata(&wbc).unwrap().len().to_string();
    let out = dir.path().join("sim");
    let o = medlink(&["simulate", "--input", wbc.to_str().unwrap(), "--phy", "11b"], &out);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = out.join("simulate.csv");
    let rows = csv_rows(&csv);
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| r[column(&csv, "image_bytes")] == size));
}

#[test]
fn sweep_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let o = medlink(&["sweep", "--input", "synth:phantom:256x256:16:4", "--cr-points", "2,10,20,55"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rd = dir.path().join("rd.csv");
    let rows = csv_rows(&rd);
    assert_eq!(rows.len(), 4);
    let mse: Vec<f64> = rows.iter().map(|r| r[column(&rd, "mse")].parse().unwrap()).collect();
    assert!(mse.windows(2).all(|w| w[0] <= w[1] + 1e-9), "{mse:?}");

    let frag = dir.path().join("fragmentation.csv");
    let (bs, sc, tp) = (column(&frag, "blocksize"), column(&frag, "scenario"), column(&frag, "throughput_mbps"));
    let rows = csv_rows(&frag);
    assert_eq!(rows.len(), 9);
    for s in ["dcf", "dcf-rts", "pcf"] {
        let mut pts: Vec<(u32, f64)> =
            rows.iter().filter(|r| r[sc] == s).map(|r| (r[bs].parse().unwrap(), r[tp].parse().unwrap())).collect();
        pts.sort_by_key(|p| p.0);
        assert!(pts.windows(2).all(|w| w[0].1 <= w[1].1), "{s}: {pts:?}");
    }
}
