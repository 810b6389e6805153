//! Behavior tests for the `bci` binary: exit codes, record contents, mode
//! agreement, and the QQ export format.

use std::path::Path;
use std::process::Command;

use bci_core::io::write_image;
use bci_core::synth::{gradient_image, lognormal_image};
use bci_core::ImageBuffer;

fn bci_bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bci"))
}

fn record(path: &Path) -> serde_json::Value {
    serde_json::from_slice(&std::fs::read(path).unwrap()).unwrap()
}

#[test]
fn exit_codes() {
    // 2: bad arguments
    let status = bci_bin()
        .args(["enhance", "x.png", "--out", "o", "--lo=3", "--hi=-3"])
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(2));
    let status = bci_bin().args(["enhance"]).output().unwrap();
    assert_eq!(status.status.code(), Some(2), "missing inputs is a usage error");

    // 3: unreadable input
    let tmp = tempfile::tempdir().unwrap();
    let status = bci_bin()
        .args(["analyze", "definitely-missing.png"])
        .current_dir(tmp.path())
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(3));

    // 0: success
    let img_path = tmp.path().join("ok.png");
    write_image(&lognormal_image(32, 32, 0.0, 1.0, 5), &img_path).unwrap();
    let status = bci_bin()
        .arg("analyze")
        .arg(&img_path)
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(0));
}

#[test]
fn enhance_records_constant_image_as_degenerate() {
    let tmp = tempfile::tempdir().unwrap();
    let constant = ImageBuffer::new(16, 16, 1, 8, vec![0.5; 256]).unwrap();
    let input = tmp.path().join("flat.png");
    write_image(&constant, &input).unwrap();

    let status = bci_bin()
        .arg("enhance")
        .arg(&input)
        .arg("--out")
        .arg(tmp.path().join("out"))
        .status()
        .unwrap();
    assert!(status.success(), "degeneracies are recorded, not fatal");

    let rec = record(&tmp.path().join("out/flat_bci.json"));
    assert_eq!(rec["degenerate"], serde_json::Value::Bool(true));
    assert_eq!(rec["lambda"], serde_json::json!(1.0));

    // output is byte-identical to the input image
    let in_bytes = std::fs::read(&input).unwrap();
    let out_bytes = std::fs::read(tmp.path().join("out/flat_bci.png")).unwrap();
    assert_eq!(in_bytes, out_bytes);
}

#[test]
fn enhance_record_shows_gradient_brightening() {
    let tmp = tempfile::tempdir().unwrap();
    let input = tmp.path().join("gradient.png");
    write_image(&gradient_image(257, 64), &input).unwrap();

    let status = bci_bin()
        .arg("enhance")
        .arg(&input)
        .arg("--out")
        .arg(tmp.path().join("out"))
        .status()
        .unwrap();
    assert!(status.success());

    let rec = record(&tmp.path().join("out/gradient_bci.json"));
    let mean_in = rec["mean_in"].as_f64().unwrap();
    let mean_out = rec["mean_out"].as_f64().unwrap();
    assert!(mean_out > mean_in, "record must show brightening: {mean_in} -> {mean_out}");
    assert_eq!(rec["lambda_clamped"], serde_json::Value::Bool(true));
}

#[test]
fn weighted_and_full_data_modes_agree() {
    let tmp = tempfile::tempdir().unwrap();
    let input = tmp.path().join("img.png");
    write_image(&lognormal_image(64, 64, 0.0, 1.0, 21), &input).unwrap();

    let lambda_for = |mode: &str, dir: &str| {
        let out = tmp.path().join(dir);
        let status = bci_bin()
            .arg("enhance")
            .arg(&input)
            .arg("--out")
            .arg(&out)
            .args(["--mode", mode, "--tol", "1e-4"])
            .status()
            .unwrap();
        assert!(status.success());
        record(&out.join("img_bci.json"))["lambda"].as_f64().unwrap()
    };

    let weighted = lambda_for("weighted", "w");
    let full = lambda_for("full-data", "f");
    assert!(
        (weighted - full).abs() <= 1e-3,
        "weighted ({weighted}) and full-data ({full}) estimates must agree"
    );
}

#[test]
fn qq_export_format_and_perfect_fit() {
    // an image whose gray values are exactly Rayleigh quantiles
    let n = 64 * 64;
    let sigma = 0.18;
    let data: Vec<f64> = (0..n)
        .map(|i| {
            let p = (i as f64 + 0.5) / n as f64;
            (sigma * (-2.0 * (1.0 - p).ln()).sqrt()).min(1.0)
        })
        .collect();
    let img = ImageBuffer::new(64, 64, 1, 16, data).unwrap();
    let tmp = tempfile::tempdir().unwrap();
    let input = tmp.path().join("rayleigh.png");
    write_image(&img, &input).unwrap();

    let out = tmp.path().join("qq.tsv");
    let status = bci_bin()
        .arg("qq")
        .arg(&input)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());

    let text = std::fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    assert!(header.starts_with("# rayleigh_sigma="));
    let corr: f64 = header
        .split("qq_corr=")
        .nth(1)
        .unwrap()
        .parse()
        .unwrap();
    assert!(corr > 0.999_999, "quantile fixture must sit on the line, got {corr}");
    assert_eq!(lines.next().unwrap(), "empirical\ttheoretical");
    let mut rows = 0;
    for line in lines {
        let mut cols = line.split('\t');
        let e: f64 = cols.next().unwrap().parse().unwrap();
        let t: f64 = cols.next().unwrap().parse().unwrap();
        assert!(cols.next().is_none());
        assert!(e.is_finite() && t.is_finite());
        rows += 1;
    }
    assert_eq!(rows, n);
}

#[test]
fn analyze_json_reference_metrics() {
    let tmp = tempfile::tempdir().unwrap();
    let input = tmp.path().join("img.png");
    write_image(&lognormal_image(32, 32, 0.0, 1.0, 9), &input).unwrap();

    let output = bci_bin()
        .arg("analyze")
        .arg(&input)
        .arg("--reference")
        .arg(&input)
        .args(["--format", "json"])
        .output()
        .unwrap();
    assert!(output.status.success());
    let rows: serde_json::Value = serde_json::from_slice(&output.stdout).unwrap();
    let row = &rows.as_array().unwrap()[0];
    // identical input and reference: the documented PSNR sentinel and
    // perfect correlation
    assert_eq!(row["psnr_db"], serde_json::json!("inf"));
    assert_eq!(row["pearson"], serde_json::json!(1.0));
    assert!(row["skew"].as_f64().unwrap() > 0.5);
}
