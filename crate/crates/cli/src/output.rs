use rndf_core::Polyline64;
use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

/// Write through a temporary file in the target directory, then rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

/// Nine significant digits.
fn sig9(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    format!("{:.8e}", x)
}

pub fn plot_csv(poly: &Polyline64) -> String {
    let mut s = String::from("param,re,im\n");
    for (t, z) in poly.params.iter().zip(&poly.points) {
        let _ = writeln!(s, "{},{},{}", t, z.re, z.im);
    }
    s
}

pub fn plot_json(poly: &Polyline64) -> String {
    let rows: Vec<serde_json::Value> = poly
        .params
        .iter()
        .zip(&poly.points)
        .map(|(t, z)| serde_json::json!({ "param": t, "re": z.re, "im": z.im }))
        .collect();
    serde_json::to_string(&rows).expect("json")
}

/// One path; the imaginary axis points up, the view box is the data extent plus 5%.
pub fn plot_svg(poly: &Polyline64) -> String {
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for z in &poly.points {
        x0 = x0.min(z.re);
        x1 = x1.max(z.re);
        y0 = y0.min(-z.im);
        y1 = y1.max(-z.im);
    }
    let (w, h) = ((x1 - x0).max(f64::MIN_POSITIVE), (y1 - y0).max(f64::MIN_POSITIVE));
    let (mx, my) = (0.05 * w, 0.05 * h);
    let mut d = String::new();
    for (i, z) in poly.points.iter().enumerate() {
        let _ = write!(d, "{}{} {}", if i == 0 { "M" } else { " L" }, sig9(z.re), sig9(-z.im));
    }
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{} {} {} {}\">\n<path d=\"{}\" fill=\"none\" stroke=\"black\" stroke-width=\"{}\" vector-effect=\"non-scaling-stroke\"/>\n</svg>\n",
        sig9(x0 - mx),
        sig9(y0 - my),
        sig9(w + 2.0 * mx),
        sig9(h + 2.0 * my),
        d,
        1
    )
}
