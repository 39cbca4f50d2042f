//! Deterministic report formatting: JSON with sorted keys and floats cut to
//! nine significant digits, CSV point sets and SVG point figures.

use std::fmt::Write as _;

use nalgebra::DVector;
use serde::Serialize;
use serde_json::Value;

/// Significant digits of every printed float.
pub const SIG_DIGITS: usize = 9;

/// `x` rounded to nine significant digits.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", SIG_DIGITS - 1, x).parse().unwrap_or(x)
}

/// Shortest decimal text of `round_sig(x)`.
pub fn fmt_sig(x: f64) -> String {
    let r = round_sig(x);
    if r == 0.0 {
        return "0".into();
    }
    if (1e-4..1e15).contains(&r.abs()) {
        format!("{r}")
    } else {
        format!("{r:e}")
    }
}

fn round_value(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().expect("f64");
            serde_json::Number::from_f64(round_sig(x)).map_or(Value::Null, Value::Number)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(round_value).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, round_value(v))).collect()),
        other => other,
    }
}

/// Pretty JSON with sorted keys and rounded floats.
pub fn to_json<T: Serialize + ?Sized>(report: &T) -> serde_json::Result<String> {
    let v = round_value(serde_json::to_value(report)?);
    let mut s = serde_json::to_string_pretty(&v)?;
    s.push('\n');
    Ok(s)
}

/// CSV with a header row; `None` cells stay empty.
pub fn to_csv(header: &[String], rows: &[Vec<Option<String>>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for r in rows {
        let cells: Vec<&str> = r.iter().map(|c| c.as_deref().unwrap_or("")).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// One layer of a figure: points drawn as dots in one color.
#[derive(Debug, Clone)]
pub struct Layer {
    pub label: String,
    pub color: String,
    pub radius: f64,
    pub points: Vec<DVector<f64>>,
}

/// Planar SVG of dot layers inside `[xmin, xmax] x [ymin, ymax]`, y upward.
/// Points outside the window are dropped.
pub fn svg_dots(layers: &[Layer], window: [f64; 4], width: u32) -> String {
    let [xmin, xmax, ymin, ymax] = window;
    let scale = f64::from(width) / (xmax - xmin);
    let height = ((ymax - ymin) * scale).round();
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{}" viewBox="0 0 {width} {}">"#,
        fmt_sig(height),
        fmt_sig(height)
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for layer in layers {
        let _ = writeln!(s, r#"<g fill="{}"><title>{}</title>"#, layer.color, layer.label);
        for p in &layer.points {
            if p.len() < 2 || !(xmin..=xmax).contains(&p[0]) || !(ymin..=ymax).contains(&p[1]) {
                continue;
            }
            let cx = (p[0] - xmin) * scale;
            let cy = (ymax - p[1]) * scale;
            let _ = writeln!(s, r#"<circle cx="{}" cy="{}" r="{}"/>"#, fmt_sig(cx), fmt_sig(cy), fmt_sig(layer.radius));
        }
        s.push_str("</g>\n");
    }
    s.push_str("</svg>\n");
    s
}

/// Window containing the points with a 5% margin, squared up.
pub fn bounding_window(points: &[DVector<f64>]) -> [f64; 4] {
    let mut w = [f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY];
    for p in points.iter().filter(|p| p.len() >= 2 && p[0].is_finite() && p[1].is_finite()) {
        w[0] = w[0].min(p[0]);
        w[1] = w[1].max(p[0]);
        w[2] = w[2].min(p[1]);
        w[3] = w[3].max(p[1]);
    }
    if !w[0].is_finite() {
        return [-1.0, 1.0, -1.0, 1.0];
    }
    let side = (w[1] - w[0]).max(w[3] - w[2]).max(1e-9) * 1.1;
    let (cx, cy) = (0.5 * (w[0] + w[1]), 0.5 * (w[2] + w[3]));
    [cx - side / 2.0, cx + side / 2.0, cy - side / 2.0, cy + side / 2.0]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding() {
        assert_eq!(fmt_sig(3f64.ln()), "1.09861229");
        assert_eq!(fmt_sig(8f64.ln()), "2.07944154");
        assert_eq!(fmt_sig(0.0), "0");
        assert_eq!(fmt_sig(1e-12 / 3.0), "3.33333333e-13");
        assert_eq!(round_sig(f64::INFINITY), f64::INFINITY);
    }

    #[test]
    fn json_keys_sorted_and_rounded() {
        #[derive(Serialize)]
        struct R {
            zeta: f64,
            alpha: Vec<f64>,
        }
        let s = to_json(&R { zeta: 1.0 / 3.0, alpha: vec![2.0, f64::NAN] }).unwrap();
        assert!(s.find("alpha").unwrap() < s.find("zeta").unwrap());
        assert!(s.contains("0.333333333") && !s.contains("0.3333333333"));
        assert!(s.contains("null"));
    }

    #[test]
    fn svg_is_deterministic_and_clipped() {
        let layer = Layer {
            label: "a".into(),
            color: "black".into(),
            radius: 1.5,
            points: vec![DVector::from_vec(vec![0.5, 0.5]), DVector::from_vec(vec![5.0, 0.0])],
        };
        let a = svg_dots(std::slice::from_ref(&layer), [0.0, 1.0, 0.0, 1.0], 100);
        assert_eq!(a, svg_dots(&[layer], [0.0, 1.0, 0.0, 1.0], 100));
        assert_eq!(a.matches("<circle").count(), 1);
    }
}
