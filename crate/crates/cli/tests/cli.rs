use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use reupload::checkpoint::Checkpoint;
use reupload::experiment::load_digits;
use tempfile::TempDir;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_reupload"));
    cmd.env_remove("REUPLOAD_OUTPUT_DIR").env_remove("REUPLOAD_THREADS");
    cmd
}

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

const REGRESSION: &str = "\
[task]
kind = regression
grid_points = 20

[circuit]
dim = 3
layers = 1
arch = euler

[train]
loss = mse
epochs = 15

[run]
seeds = 4
output = out
";

const STRIPES: &str = "\
[task]
kind = stripes
train_samples = 40
test_samples = 20
classes = 3

[circuit]
dim = 3
layers = 1, 2
arch = euler

[train]
epochs = 10

[run]
seeds = 1..6
output = out
";

fn run_ok(config: &Path) {
    let out = bin().arg("run").arg(config).output().unwrap();
    assert!(out.status.success(), "run failed: {}", stderr(&out));
}

#[test]
fn minimal_run_writes_one_row_and_checkpoint() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "r.conf", REGRESSION);
    run_ok(&cfg);
    let runs = fs::read_to_string(dir.path().join("out/runs.csv")).unwrap();
    let lines: Vec<&str> = runs.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[1].contains(",4,ok,"), "{}", lines[1]);
    let cp = Checkpoint::load(&dir.path().join("out/checkpoints/layers-1-seed-4.json")).unwrap();
    assert_eq!(cp.seed, 4);
    assert_eq!(cp.params().unwrap().as_slice().len(), 5);
    assert_eq!(cp.spec.arch, "euler");
    assert!(dir.path().join("out/manifest.json").exists());
    assert!(dir.path().join("out/summary.csv").exists());
}

#[test]
fn rerun_is_byte_identical() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "s.conf", STRIPES);
    let files = ["runs.csv", "summary.csv", "manifest.json", "checkpoints/layers-2-seed-3.json"];
    run_ok(&cfg);
    let first: Vec<Vec<u8>> = files.iter().map(|f| fs::read(dir.path().join("out").join(f)).unwrap()).collect();
    let out = bin().arg("run").arg(&cfg).env("REUPLOAD_THREADS", "1").output().unwrap();
    assert!(out.status.success());
    for (f, bytes) in files.iter().zip(&first) {
        assert_eq!(&fs::read(dir.path().join("out").join(f)).unwrap(), bytes, "{f} changed");
    }
}

fn percentile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

#[test]
fn summary_recomputes_from_runs() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "s.conf", STRIPES);
    run_ok(&cfg);
    let runs = fs::read_to_string(dir.path().join("out/runs.csv")).unwrap();
    let header: Vec<&str> = runs.lines().next().unwrap().split(',').collect();
    let col = |name: &str| header.iter().position(|h| *h == name).unwrap();
    let (layers_col, metric_col) = (col("layers"), col("test_metric"));

    let summary = fs::read_to_string(dir.path().join("out/summary.csv")).unwrap();
    let sheader: Vec<&str> = summary.lines().next().unwrap().split(',').collect();
    let scol = |name: &str| sheader.iter().position(|h| *h == name).unwrap();
    let rows: Vec<Vec<&str>> = summary.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 2);
    for row in rows {
        let layers = row[scol("layers")];
        let mut values: Vec<f64> = runs
            .lines()
            .skip(1)
            .map(|l| l.split(',').collect::<Vec<_>>())
            .filter(|r| r[layers_col] == layers)
            .map(|r| r[metric_col].parse().unwrap())
            .collect();
        assert_eq!(values.len(), 6);
        values.sort_by(f64::total_cmp);
        let expected = [
            values[0],
            percentile(&values, 0.25),
            percentile(&values, 0.5),
            percentile(&values, 0.75),
            values[5],
        ];
        for (name, want) in ["min", "p25", "median", "p75", "max"].iter().zip(expected) {
            let got: f64 = row[scol(name)].parse().unwrap();
            assert!((got - want).abs() <= 1e-15, "{name}: {got} vs {want}");
        }
        assert_eq!(row[scol("metric")], "test_accuracy");
        assert_eq!(row[scol("runs")], "6");
    }
}

#[test]
fn validate_reports_line_and_field() {
    let dir = TempDir::new().unwrap();
    let text = STRIPES.replace("epochs = 10", "epochs = 10\nmomentum = 0.5");
    let cfg = write_config(dir.path(), "bad.conf", &text);
    let out = bin().arg("validate").arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let msg = stderr(&out);
    assert!(msg.contains("line 14"), "{msg}");
    assert!(msg.contains("train.momentum"), "{msg}");

    let good = write_config(dir.path(), "good.conf", STRIPES);
    let out = bin().arg("validate").arg(&good).output().unwrap();
    assert!(out.status.success());
    assert!(!dir.path().join("out").exists());
}

#[test]
fn missing_digits_file_is_an_io_error() {
    let dir = TempDir::new().unwrap();
    let text = "\
[task]
kind = digits
digits_path = nowhere.csv
digits = 0, 1, 2

[circuit]
dim = 3
layers = 1
arch = euler

[run]
seeds = 1
output = out
";
    let cfg = write_config(dir.path(), "d.conf", text);
    let out = bin().arg("run").arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
}

#[test]
fn bad_thread_count_is_a_config_error() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "r.conf", REGRESSION);
    for value in ["0", "many"] {
        let out = bin().arg("run").arg(&cfg).env("REUPLOAD_THREADS", value).output().unwrap();
        assert_eq!(out.status.code(), Some(1));
        assert!(stderr(&out).contains("REUPLOAD_THREADS"));
    }
    assert!(!dir.path().join("out").exists());
}

#[test]
fn unknown_subcommand_is_a_usage_error() {
    let out = bin().arg("train").output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn output_dir_override() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "r.conf", REGRESSION);
    let elsewhere = dir.path().join("elsewhere");
    let out = bin().arg("run").arg(&cfg).env("REUPLOAD_OUTPUT_DIR", &elsewhere).output().unwrap();
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(elsewhere.join("runs.csv").exists());
    assert!(!dir.path().join("out").exists());
}

/// Returns (width, height, pixels) of a binary PPM.
fn read_ppm(bytes: &[u8]) -> (usize, usize, Vec<[u8; 3]>) {
    let mut fields = Vec::new();
    let mut pos = 0;
    while fields.len() < 4 {
        while bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        let start = pos;
        while !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        fields.push(std::str::from_utf8(&bytes[start..pos]).unwrap().to_string());
    }
    assert_eq!(fields[0], "P6");
    assert_eq!(fields[3], "255");
    let (w, h): (usize, usize) = (fields[1].parse().unwrap(), fields[2].parse().unwrap());
    let data = &bytes[pos + 1..];
    assert_eq!(data.len(), 3 * w * h);
    (w, h, data.chunks(3).map(|c| [c[0], c[1], c[2]]).collect())
}

#[test]
fn zero_parameters_render_uniform_regions() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "s.conf", &STRIPES.replace("seeds = 1..6", "seeds = 2"));
    run_ok(&cfg);
    let trained = dir.path().join("out/checkpoints/layers-2-seed-2.json");
    let mut cp = Checkpoint::load(&trained).unwrap();
    cp.params.iter_mut().for_each(|p| *p = "0".into());
    let zero = dir.path().join("zero.json");
    fs::write(&zero, cp.to_json()).unwrap();

    let render = |out: &str| {
        let target = dir.path().join(out);
        let status = bin().args(["render-regions", "--grid", "24", "-o"]).arg(&target).arg(&zero).status().unwrap();
        assert!(status.success());
        fs::read(target).unwrap()
    };
    let a = render("a.ppm");
    let (w, h, pixels) = read_ppm(&a);
    assert_eq!((w, h), (24, 24));
    assert!(pixels.iter().all(|p| *p == pixels[0]));
    assert_eq!(a, render("b.ppm"));

    let status = bin().arg("render-regions").arg(&trained).status().unwrap();
    assert!(status.success());
    assert!(dir.path().join("out/checkpoints/layers-2-seed-2.regions.ppm").exists());
}

fn husimi(dir: &Path, state: &str, resolution: usize) -> (usize, usize, Vec<f64>) {
    let target = dir.join(format!("{}.ppm", state.replace(':', "_")));
    let out = bin()
        .args(["render-husimi", "--state", state, "--resolution", &resolution.to_string(), "-o"])
        .arg(&target)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr(&out));
    let (w, h, pixels) = read_ppm(&fs::read(target).unwrap());
    assert!(pixels.iter().all(|p| p[0] == p[1] && p[1] == p[2]));
    (w, h, pixels.iter().map(|p| p[0] as f64).collect())
}

#[test]
fn husimi_peaks_at_coherent_direction() {
    use std::f64::consts::PI;
    let dir = TempDir::new().unwrap();
    let res = 32;
    for (polar, azimuth) in [(1.0, 0.7), (2.3, -2.0), (0.4, 3.0)] {
        let (w, h, q) = husimi(dir.path(), &format!("coherent:6:{polar}:{azimuth}"), res);
        assert_eq!((w, h), (2 * res, res));
        let idx = (0..q.len()).max_by(|&a, &b| q[a].total_cmp(&q[b])).unwrap();
        let (row, col) = (idx / w, idx % w);
        let pixel = PI / res as f64;
        let row_polar = (row as f64 + 0.5) * pixel;
        let col_azimuth = -PI + (col as f64 + 0.5) * pixel;
        let mut dphi = (col_azimuth - azimuth).abs();
        dphi = dphi.min(2.0 * PI - dphi);
        assert!((row_polar - polar).abs() <= pixel, "polar {row_polar} vs {polar}");
        assert!(dphi <= pixel, "azimuth {col_azimuth} vs {azimuth}");
    }
    let (_, _, q) = husimi(dir.path(), "basis:4:0", 16);
    assert!(q[..32].iter().all(|&v| v == 255.0));
}

/// Smallest eigenvalue of the Husimi weight's spread in the tangent plane at +x.
fn tangent_min_variance(w: usize, h: usize, q: &[f64]) -> f64 {
    use std::f64::consts::PI;
    let (mut s, mut sy, mut sz, mut syy, mut szz, mut syz) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
    for row in 0..h {
        let polar = PI * (row as f64 + 0.5) / h as f64;
        for col in 0..w {
            let azimuth = -PI + PI * (col as f64 + 0.5) / h as f64;
            let weight = q[row * w + col] * polar.sin();
            let (y, z) = (polar.sin() * azimuth.sin(), polar.cos());
            s += weight;
            sy += weight * y;
            sz += weight * z;
            syy += weight * y * y;
            szz += weight * z * z;
            syz += weight * y * z;
        }
    }
    let (my, mz) = (sy / s, sz / s);
    let (a, b, c) = (syy / s - my * my, szz / s - mz * mz, syz / s - my * mz);
    0.5 * (a + b) - (0.25 * (a - b).powi(2) + c * c).sqrt()
}

#[test]
fn squeezing_narrows_the_husimi_blob() {
    let dir = TempDir::new().unwrap();
    let res = 48;
    let (w, h, coherent) = husimi(dir.path(), "coherent:11:1.5707963267948966:0", res);
    let (_, _, squeezed) = husimi(dir.path(), "squeezed:11:0.08:1.5707963267948966:0", res);
    let before = tangent_min_variance(w, h, &coherent);
    let after = tangent_min_variance(w, h, &squeezed);
    assert!(after < 0.9 * before, "{after} vs {before}");
}

#[test]
fn spectrum_csv() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "r.conf", REGRESSION);
    run_ok(&cfg);
    let cp = dir.path().join("out/checkpoints/layers-1-seed-4.json");
    let out = bin().args(["spectrum", "--grid", "64"]).arg(&cp).output().unwrap();
    assert!(out.status.success(), "{}", stderr(&out));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("frequency,magnitude"));
    let rows: Vec<(i64, f64)> = lines
        .map(|l| {
            let (k, m) = l.split_once(',').unwrap();
            (k.parse().unwrap(), m.parse().unwrap())
        })
        .collect();
    assert!(!rows.is_empty());
    assert!(rows.iter().all(|&(_, m)| m >= 0.0 && m.is_finite()));
    assert!(rows.windows(2).all(|p| p[0].0 < p[1].0));

    let file = dir.path().join("spec.csv");
    let status = bin().args(["spectrum", "--grid", "64", "-o"]).arg(&file).arg(&cp).status().unwrap();
    assert!(status.success());
    assert_eq!(fs::read_to_string(file).unwrap(), text);
}

fn fixture() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data/digits_fixture.csv")
}

#[test]
fn digits_fixture_loads_and_runs() {
    let data = load_digits(&fixture()).unwrap();
    assert_eq!(data.len(), 60);
    assert_eq!(data.input_dim(), 64);

    let dir = TempDir::new().unwrap();
    let text = format!(
        "\
[task]
kind = digits
digits_path = {}
digits = 0, 1, 2
train_samples = 12
test_samples = 6
pca_dim = 2

[circuit]
dim = 3
layers = 1
arch = simplified

[train]
epochs = 5

[run]
seeds = 1
output = out
",
        fixture().display()
    );
    let cfg = write_config(dir.path(), "d.conf", &text);
    run_ok(&cfg);
    let cp = Checkpoint::load(&dir.path().join("out/checkpoints/layers-1-seed-1.json")).unwrap();
    assert_eq!(cp.spec.input_dim, 2);
    assert_eq!(cp.classes, 3);
}
