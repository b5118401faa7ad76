use rndf_core::geometry::sample_curve;
use rndf_core::series::{eval_phi, EvalConfig};
use rndf_core::time::TimePoint;
use serde_json::Value;
use std::f64::consts::PI;
use std::process::{Command, Output};

fn rndf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rndf")).args(args).output().unwrap()
}

fn json(args: &[&str]) -> Value {
    let o = rndf(args);
    assert!(o.status.success(), "{:?}: {}", args, String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn read_csv(path: &std::path::Path) -> Vec<(f64, f64, f64)> {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("param,re,im"));
    lines
        .map(|l| {
            let v: Vec<f64> = l.split(',').map(|x| x.parse().unwrap()).collect();
            (v[0], v[1], v[2])
        })
        .collect()
}

#[test]
fn eval_origin() {
    let v = json(&["eval", "--t", "0"]);
    let tol = 1e-8;
    assert!(v["re"].as_f64().unwrap().abs() <= tol);
    assert_eq!(v["im"].as_f64().unwrap(), 0.0);
    assert!(v["err_bound"].as_f64().unwrap() <= tol);
}

#[test]
fn eval_one_period() {
    let v = json(&["eval", "--x", "1", "--tol", "1e-8"]);
    let lib = eval_phi(&TimePoint::t(1.0 / (2.0 * PI)).unwrap(), &EvalConfig::with_tol(1e-8)).unwrap();
    assert!((v["im"].as_f64().unwrap() - lib.im).abs() < 3e-8);
    assert!((v["re"].as_f64().unwrap() - lib.re).abs() < 3e-8);
    assert!((v["im"].as_f64().unwrap() - 0.159154).abs() < 1e-6);
}

#[test]
fn usage_errors() {
    assert_eq!(code(&rndf(&["eval", "--t", "0", "--x", "1"])), 2);
    assert_eq!(code(&rndf(&["eval"])), 2);
    assert_eq!(code(&rndf(&["classify", "2/4"])), 2);
    assert_eq!(code(&rndf(&["classify", "half"])), 2);
    assert_eq!(code(&rndf(&["eval", "--t", "0", "--tol", "-1"])), 2);
    let o = Command::new(env!("CARGO_BIN_EXE_rndf")).args(["eval", "--t", "0"]).env("RNDF_THREADS", "many").output().unwrap();
    assert_eq!(code(&o), 2);
}

#[test]
fn threads_from_env() {
    let o = Command::new(env!("CARGO_BIN_EXE_rndf")).args(["eval", "--t", "0.1"]).env("RNDF_THREADS", "1").output().unwrap();
    assert!(o.status.success());
}

#[test]
fn numeric_failure() {
    assert_eq!(code(&rndf(&["eval", "--t", "0.1", "--tol", "1e-30"])), 5);
}

#[test]
fn classify_spiral() {
    let v = json(&["classify", "1/6"]);
    assert_eq!(v["klass"], "spiral");
    assert_eq!(v["verdict"], "spiral");
    assert_eq!(v["q_tilde"], 3);
    let v = json(&["classify", "1/3", "--fit"]);
    assert_eq!(v["klass"], "corner");
    assert!(v["e_residual"].as_f64().unwrap() < 0.2);
}

#[test]
fn probe_corner() {
    let v = json(&["probe", "--rational", "1/8"]);
    assert_eq!(v["verdict"], "CornerMismatch");
    assert!((v["angle_diff"].as_f64().unwrap() - PI / 2.0).abs() < 1e-3);
}

#[test]
fn probe_inconclusive_exit() {
    let o = rndf(&["probe", "--x", "1/123456789"]);
    assert_eq!(code(&o), 4, "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["verdict"], "Inconclusive");
}

#[test]
fn cf_pi() {
    let v = json(&["cf", "pi-3", "--n", "4"]);
    let pq: Vec<(String, String)> = v["convergents"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| (c["p"].as_str().unwrap().to_string(), c["q"].as_str().unwrap().to_string()))
        .collect();
    assert!(pq.contains(&("1".into(), "7".into())));
    assert!(pq.contains(&("16".into(), "113".into())));
    assert_eq!(v["partial_quotients"][0], "7");
}

#[test]
fn csv_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let o = rndf(&["plot", "--from", "0", "--to", "0.1", "--n", "101", "--format", "csv", "--out", p.to_str().unwrap()]);
        assert!(o.status.success());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let rows = read_csv(&a);
    assert_eq!(rows.len(), 101);
    assert_eq!(rows[0], (0.0, rows[0].1, rows[0].2));
    assert!(rows[0].1.abs() < 1e-8 && rows[0].2.abs() < 1e-8);
}

#[test]
fn io_failure_exit() {
    let o = rndf(&["plot", "--n", "10", "--out", "/nonexistent-dir/x.svg"]);
    assert_eq!(code(&o), 3);
}

/// `(min x, min y, width, height)` of the view box and the path coordinates.
fn parse_svg(text: &str) -> ([f64; 4], Vec<(f64, f64)>) {
    assert_eq!(text.matches("<path").count(), 1);
    let vb = text.split("viewBox=\"").nth(1).unwrap().split('"').next().unwrap();
    let vb: Vec<f64> = vb.split(' ').map(|x| x.parse().unwrap()).collect();
    let d = text.split(" d=\"").nth(1).unwrap().split('"').next().unwrap();
    let nums: Vec<f64> = d.split(|c: char| c == 'M' || c == 'L' || c == ' ').filter(|s| !s.is_empty()).map(|x| x.parse().unwrap()).collect();
    (vb.try_into().unwrap(), nums.chunks(2).map(|c| (c[0], c[1])).collect())
}

#[test]
fn svg_full_period() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("period.svg");
    let o = rndf(&["plot", "--n", "20001", "--format", "svg", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    let (vb, pts) = parse_svg(&text);
    assert_eq!(pts.len(), 20001);
    // margin of 5% on each side
    let (x0, x1) = pts.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(p.0), b.max(p.0)));
    let (y0, y1) = pts.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(p.1), b.max(p.1)));
    assert!((vb[2] - 1.1 * (x1 - x0)).abs() < 1e-6 * vb[2]);
    assert!((vb[0] - (x0 - 0.05 * (x1 - x0))).abs() < 1e-6 * vb[2]);
    // aspect against a finer independent sample
    let fine = sample_curve(0.0, 1.0 / (2.0 * PI), 200_001, &EvalConfig::with_tol(1e-8)).unwrap();
    let ext = |f: fn(&rndf_core::Complex64) -> f64| {
        fine.points.iter().map(f).fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)))
    };
    let (r0, r1) = ext(|z| z.re);
    let (i0, i1) = ext(|z| z.im);
    let aspect = (x1 - x0) / (y1 - y0);
    let reference = (r1 - r0) / (i1 - i0);
    assert!((aspect / reference - 1.0).abs() < 0.1, "{} {}", aspect, reference);
}

fn zoom(center: f64, w: f64, n: usize) -> Vec<(f64, f64, f64)> {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("zoom.csv");
    let (a, b) = (format!("{}", center - w), format!("{}", center + w));
    let o = rndf(&["plot", "--from", &a, "--to", &b, "--n", &n.to_string(), "--tol", "1e-6", "--format", "csv", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    read_csv(&out)
}

#[test]
fn spiral_zoom_winds() {
    let c = 0.5 / (2.0 * PI);
    let rows = zoom(c, 2e-3, 20001);
    let mid = rows.len() / 2;
    let (re0, im0) = (rows[mid].1, rows[mid].2);
    let angles: Vec<f64> = rows[mid..]
        .iter()
        .filter(|r| r.0 - c >= 5e-4)
        .map(|r| (r.2 - im0).atan2(r.1 - re0))
        .collect();
    let mut total = 0.0;
    for w in angles.windows(2) {
        let mut d = w[1] - w[0];
        d -= (d / (2.0 * PI)).round() * 2.0 * PI;
        assert!(d.abs() < 1.0);
        total += d;
    }
    assert!(total.abs() > 4.0 * PI, "{}", total);
}

#[test]
fn corner_zoom_clusters() {
    let c = 0.125 / (2.0 * PI);
    let rows = zoom(c, 1e-6, 2001);
    let mid = rows.len() / 2;
    let (re0, im0) = (rows[mid].1, rows[mid].2);
    let mean_dir = |it: &mut dyn Iterator<Item = &(f64, f64, f64)>| {
        let (mut x, mut y) = (0.0, 0.0);
        for r in it {
            let (dx, dy) = (r.1 - re0, r.2 - im0);
            let n = dx.hypot(dy);
            x += dx / n;
            y += dy / n;
        }
        let n = x.hypot(y);
        (x / n, y / n)
    };
    let right = mean_dir(&mut rows[mid + 100..].iter());
    let left = mean_dir(&mut rows[..mid - 100].iter());
    let angle = (right.0 * left.0 + right.1 * left.1).clamp(-1.0, 1.0).acos();
    assert!((angle - PI / 2.0).abs() < 0.05, "{}", angle);
}

#[test]
fn dim_report() {
    let v = json(&["dim", "--n", "20001", "--eps-lo", "1e-2", "--eps-hi", "1e-1"]);
    assert_eq!(v["verdict"], "ok");
    let s = v["slope"].as_f64().unwrap();
    assert!(s > 0.8 && s < 1.6, "{}", s);
}
