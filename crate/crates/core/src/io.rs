//! File formats: CSV ingestion for spaces, clouds, measures and
//! correspondences; JSON/CSV/SVG export for diagrams; JSON-lines export
//! for filtered complexes; JSON export for transport plans.
//!
//! All floating output is printed with 12 significant digits and a
//! locale-independent decimal point, so identical runs produce identical
//! bytes.

use std::sync::Arc;

use thiserror::Error;

use crate::filtration::FilteredComplex;
use crate::metric::{Correspondence, FiniteMetricSpace, MetricError, PointCloud};
use crate::persistence::{Interval, PersistenceDiagram};
use crate::transport::TransportPlan;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("ParseError: line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("FormatError: {0}")]
    Format(String),
    #[error(transparent)]
    Metric(#[from] MetricError),
}

/// Formats with 12 significant digits, trimming trailing zeros.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    let exponent = x.abs().log10().floor() as i32;
    let decimals = (11 - exponent).clamp(0, 17) as usize;
    let mut s = format!("{:.*}", decimals, x);
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    s
}

fn lines_of(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| !l.trim().is_empty())
}

fn is_number(token: &str) -> bool {
    token.trim().parse::<f64>().is_ok()
}

fn parse_row(line: usize, text: &str) -> Result<Vec<f64>, IoError> {
    text.split(',')
        .map(|tok| {
            tok.trim().parse::<f64>().map_err(|_| IoError::Parse {
                line,
                reason: format!("not a number: {:?}", tok.trim()),
            })
        })
        .collect()
}

/// Parses a distance-matrix CSV: n rows of n comma-separated decimals. A
/// header line is detected by a non-numeric first token and skipped.
pub fn parse_distance_matrix(text: &str) -> Result<Arc<FiniteMetricSpace>, IoError> {
    let mut rows = Vec::new();
    for (line, content) in lines_of(text) {
        let first = content.split(',').next().unwrap_or("");
        if rows.is_empty() && !is_number(first) {
            continue; // header
        }
        rows.push(parse_row(line, content)?);
    }
    if rows.is_empty() {
        return Err(IoError::Format("no rows in distance matrix".into()));
    }
    Ok(FiniteMetricSpace::from_distance_matrix(rows)?)
}

/// Parses a point-cloud CSV: one point per row.
pub fn parse_point_cloud(text: &str) -> Result<PointCloud, IoError> {
    let mut rows = Vec::new();
    for (line, content) in lines_of(text) {
        let first = content.split(',').next().unwrap_or("");
        if rows.is_empty() && !is_number(first) {
            continue;
        }
        rows.push(parse_row(line, content)?);
    }
    if rows.is_empty() {
        return Err(IoError::Format("no rows in point cloud".into()));
    }
    Ok(PointCloud::new(rows)?)
}

/// Parses a measure file: either a CSV row of weights or JSON of the form
/// `{"weights": [...]}`. Index alignment with the space file is positional.
pub fn parse_weights(text: &str) -> Result<Vec<f64>, IoError> {
    let trimmed = text.trim();
    if trimmed.starts_with('{') {
        let value: serde_json::Value = serde_json::from_str(trimmed)
            .map_err(|e| IoError::Format(format!("invalid JSON: {e}")))?;
        let weights = value
            .get("weights")
            .and_then(|w| w.as_array())
            .ok_or_else(|| IoError::Format("missing \"weights\" array".into()))?;
        return weights
            .iter()
            .map(|v| {
                v.as_f64()
                    .ok_or_else(|| IoError::Format("weights must be numbers".into()))
            })
            .collect();
    }
    let (line, content) = lines_of(trimmed)
        .next()
        .ok_or_else(|| IoError::Format("empty measure file".into()))?;
    parse_row(line, content)
}

/// Parses a correspondence CSV with columns `phi, psi`; the columns may
/// have different lengths, shorter one padded with blanks.
pub fn parse_correspondence(text: &str) -> Result<Correspondence, IoError> {
    let mut phi = Vec::new();
    let mut psi = Vec::new();
    for (line, content) in lines_of(text) {
        let mut parts = content.split(',');
        let first = parts.next().unwrap_or("").trim();
        let second = parts.next().unwrap_or("").trim();
        if phi.is_empty() && psi.is_empty() && !first.is_empty() && !is_number(first) {
            continue; // header
        }
        let parse_index = |tok: &str| -> Result<usize, IoError> {
            tok.parse::<usize>().map_err(|_| IoError::Parse {
                line,
                reason: format!("not an index: {tok:?}"),
            })
        };
        if !first.is_empty() {
            phi.push(parse_index(first)?);
        }
        if !second.is_empty() {
            psi.push(parse_index(second)?);
        }
    }
    if phi.is_empty() || psi.is_empty() {
        return Err(IoError::Format("correspondence needs both phi and psi columns".into()));
    }
    Ok(Correspondence::new(phi, psi))
}

/// Serializes a diagram as a JSON array of per-degree objects
/// `{"degree": k, "intervals": [[birth, death-or-"inf"], ...]}`.
pub fn diagram_to_json(diagram: &PersistenceDiagram) -> String {
    let mut out = String::from("[\n");
    let mut first = true;
    for (degree, intervals) in diagram.degrees() {
        if !first {
            out.push_str(",\n");
        }
        first = false;
        out.push_str(&format!("  {{\"degree\": {degree}, \"intervals\": ["));
        for (i, iv) in intervals.iter().enumerate() {
            if i > 0 {
                out.push_str(", ");
            }
            let death = if iv.is_infinite() {
                "\"inf\"".to_string()
            } else {
                fmt_sig(iv.death)
            };
            out.push_str(&format!("[{}, {}]", fmt_sig(iv.birth), death));
        }
        out.push_str("]}");
    }
    out.push_str("\n]\n");
    out
}

/// Parses a diagram from the JSON produced by [`diagram_to_json`].
pub fn diagram_from_json(text: &str) -> Result<PersistenceDiagram, IoError> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| IoError::Format(format!("invalid JSON: {e}")))?;
    let degrees = value
        .as_array()
        .ok_or_else(|| IoError::Format("expected a JSON array of degree objects".into()))?;
    let mut diagram = PersistenceDiagram::new();
    for entry in degrees {
        let degree = entry
            .get("degree")
            .and_then(|d| d.as_u64())
            .ok_or_else(|| IoError::Format("missing degree".into()))? as usize;
        let intervals = entry
            .get("intervals")
            .and_then(|v| v.as_array())
            .ok_or_else(|| IoError::Format("missing intervals".into()))?;
        for pair in intervals {
            let pair = pair
                .as_array()
                .filter(|p| p.len() == 2)
                .ok_or_else(|| IoError::Format("interval must be a [birth, death] pair".into()))?;
            let birth = pair[0]
                .as_f64()
                .ok_or_else(|| IoError::Format("birth must be a number".into()))?;
            let death = match &pair[1] {
                serde_json::Value::String(s) if s == "inf" => f64::INFINITY,
                other => other
                    .as_f64()
                    .ok_or_else(|| IoError::Format("death must be a number or \"inf\"".into()))?,
            };
            diagram.push(degree, Interval::new(birth, death));
        }
    }
    diagram.finish();
    Ok(diagram)
}

/// Serializes a diagram as CSV rows `degree,birth,death`.
pub fn diagram_to_csv(diagram: &PersistenceDiagram) -> String {
    let mut out = String::from("degree,birth,death\n");
    for (degree, intervals) in diagram.degrees() {
        for iv in intervals {
            let death = if iv.is_infinite() {
                "inf".to_string()
            } else {
                fmt_sig(iv.death)
            };
            out.push_str(&format!("{degree},{},{}\n", fmt_sig(iv.birth), death));
        }
    }
    out
}

/// Parses the CSV produced by [`diagram_to_csv`].
pub fn diagram_from_csv(text: &str) -> Result<PersistenceDiagram, IoError> {
    let mut diagram = PersistenceDiagram::new();
    for (line, content) in lines_of(text) {
        let parts: Vec<&str> = content.split(',').map(str::trim).collect();
        if parts.first().is_some_and(|t| !is_number(t)) {
            continue; // header
        }
        if parts.len() != 3 {
            return Err(IoError::Parse { line, reason: "expected degree,birth,death".into() });
        }
        let degree: usize = parts[0].parse().map_err(|_| IoError::Parse {
            line,
            reason: "degree must be an integer".into(),
        })?;
        let birth: f64 = parts[1].parse().map_err(|_| IoError::Parse {
            line,
            reason: "birth must be a number".into(),
        })?;
        let death = if parts[2] == "inf" {
            f64::INFINITY
        } else {
            parts[2].parse().map_err(|_| IoError::Parse {
                line,
                reason: "death must be a number or inf".into(),
            })?
        };
        diagram.push(degree, Interval::new(birth, death));
    }
    diagram.finish();
    Ok(diagram)
}

/// Renders a persistence diagram as a static SVG: axes, the diagonal,
/// one dot per finite interval, and infinite deaths drawn as crosses on a
/// dashed line at 1.1 times the largest finite value.
pub fn diagram_to_svg(diagram: &PersistenceDiagram) -> String {
    const SIZE: f64 = 480.0;
    const MARGIN: f64 = 50.0;
    const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

    let mut max_finite = 0.0f64;
    for (_, intervals) in diagram.degrees() {
        for iv in intervals {
            max_finite = max_finite.max(iv.birth);
            if !iv.is_infinite() {
                max_finite = max_finite.max(iv.death);
            }
        }
    }
    if max_finite <= 0.0 {
        max_finite = 1.0;
    }
    let ceiling = 1.1 * max_finite;
    let scale = |v: f64| MARGIN + (v / ceiling) * SIZE;
    let flip = |v: f64| MARGIN + SIZE - (v / ceiling) * SIZE;

    let mut svg = String::new();
    let total = SIZE + 2.0 * MARGIN;
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{total}\" height=\"{total}\" viewBox=\"0 0 {total} {total}\">\n"
    ));
    svg.push_str(&format!(
        "  <rect x=\"0\" y=\"0\" width=\"{total}\" height=\"{total}\" fill=\"white\"/>\n"
    ));
    // Axes.
    svg.push_str(&format!(
        "  <line x1=\"{m}\" y1=\"{b}\" x2=\"{r}\" y2=\"{b}\" stroke=\"black\"/>\n",
        m = MARGIN,
        b = MARGIN + SIZE,
        r = MARGIN + SIZE
    ));
    svg.push_str(&format!(
        "  <line x1=\"{m}\" y1=\"{b}\" x2=\"{m}\" y2=\"{t}\" stroke=\"black\"/>\n",
        m = MARGIN,
        b = MARGIN + SIZE,
        t = MARGIN
    ));
    // Diagonal.
    svg.push_str(&format!(
        "  <line x1=\"{m}\" y1=\"{b}\" x2=\"{r}\" y2=\"{t}\" stroke=\"#999999\" stroke-width=\"0.5\"/>\n",
        m = MARGIN,
        b = MARGIN + SIZE,
        r = MARGIN + SIZE,
        t = MARGIN
    ));
    // Infinity line.
    let inf_y = flip(max_finite * 1.1);
    svg.push_str(&format!(
        "  <line x1=\"{m}\" y1=\"{inf_y}\" x2=\"{r}\" y2=\"{inf_y}\" stroke=\"#999999\" stroke-dasharray=\"4 3\" stroke-width=\"0.5\"/>\n",
        m = MARGIN,
        r = MARGIN + SIZE
    ));
    svg.push_str(&format!(
        "  <text x=\"{x}\" y=\"{y}\" font-size=\"12\">inf</text>\n",
        x = MARGIN + SIZE + 4.0,
        y = inf_y + 4.0
    ));
    svg.push_str(&format!(
        "  <text x=\"{x}\" y=\"{y}\" font-size=\"12\">birth</text>\n",
        x = MARGIN + SIZE / 2.0 - 14.0,
        y = MARGIN + SIZE + 32.0
    ));
    svg.push_str(&format!(
        "  <text x=\"{x}\" y=\"{y}\" font-size=\"12\" transform=\"rotate(-90 {x} {y})\">death</text>\n",
        x = 16.0,
        y = MARGIN + SIZE / 2.0 + 16.0
    ));

    for (degree, intervals) in diagram.degrees() {
        let color = COLORS[degree % COLORS.len()];
        for iv in intervals {
            let x = scale(iv.birth);
            if iv.is_infinite() {
                let y = inf_y;
                svg.push_str(&format!(
                    "  <path d=\"M {x0} {y0} L {x1} {y1} M {x0} {y1} L {x1} {y0}\" stroke=\"{color}\" stroke-width=\"1.5\"/>\n",
                    x0 = x - 4.0,
                    y0 = y - 4.0,
                    x1 = x + 4.0,
                    y1 = y + 4.0
                ));
            } else {
                let y = flip(iv.death);
                svg.push_str(&format!(
                    "  <circle cx=\"{x}\" cy=\"{y}\" r=\"3\" fill=\"{color}\" fill-opacity=\"0.75\"/>\n"
                ));
            }
        }
    }
    svg.push_str("</svg>\n");
    svg
}

/// Serializes a filtered complex as JSON lines, one simplex per line.
pub fn complex_to_jsonl(fc: &FilteredComplex) -> String {
    let mut out = String::new();
    for (simplex, value) in fc.entries() {
        let verts: Vec<String> = simplex.vertices().iter().map(|v| v.to_string()).collect();
        out.push_str(&format!(
            "{{\"simplex\": [{}], \"value\": {}}}\n",
            verts.join(", "),
            fmt_sig(*value)
        ));
    }
    out
}

/// Serializes a transport plan with its index labels.
pub fn plan_to_json(plan: &TransportPlan) -> String {
    let n = plan.n();
    let labels: Vec<String> = (0..n).map(|i| i.to_string()).collect();
    let mut out = String::from("{\n");
    out.push_str(&format!("  \"rows\": [{}],\n", labels.join(", ")));
    out.push_str(&format!("  \"cols\": [{}],\n", labels.join(", ")));
    out.push_str("  \"plan\": [\n");
    for (i, row) in plan.matrix().iter().enumerate() {
        let cells: Vec<String> = row.iter().map(|&v| fmt_sig(v)).collect();
        out.push_str(&format!(
            "    [{}]{}\n",
            cells.join(", "),
            if i + 1 < n { "," } else { "" }
        ));
    }
    out.push_str("  ]\n}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digit_formatting() {
        assert_eq!(fmt_sig(0.0), "0");
        assert_eq!(fmt_sig(0.5), "0.5");
        assert_eq!(fmt_sig(2.0 / 3.0), "0.666666666667");
        assert_eq!(fmt_sig(2.0f64.sqrt()), "1.41421356237");
        assert_eq!(fmt_sig(f64::INFINITY), "inf");
        assert_eq!(fmt_sig(-1.5), "-1.5");
    }

    #[test]
    fn parses_matrix_with_header_and_crlf() {
        let text = "a,b,c\r\n0,1,1\r\n1,0,1\r\n1,1,0\r\n";
        let space = parse_distance_matrix(text).unwrap();
        assert_eq!(space.len(), 3);
        assert_eq!(space.dist(0, 2), 1.0);
    }

    #[test]
    fn parses_weights_both_formats() {
        assert_eq!(parse_weights("0.25, 0.75").unwrap(), vec![0.25, 0.75]);
        assert_eq!(
            parse_weights("{\"weights\": [0.1, 0.9]}").unwrap(),
            vec![0.1, 0.9]
        );
    }

    #[test]
    fn parses_correspondence_with_ragged_columns() {
        let text = "phi,psi\n0,0\n1,1\n,1\n";
        let c = parse_correspondence(text).unwrap();
        assert_eq!(c.phi, vec![0, 1]);
        assert_eq!(c.psi, vec![0, 1, 1]);
    }

    #[test]
    fn diagram_round_trips_through_json_and_csv() {
        let mut d = PersistenceDiagram::new();
        d.push(0, Interval::new(0.0, 0.5));
        d.push(0, Interval::new(0.0, f64::INFINITY));
        d.push(1, Interval::new(0.5, 2.0 / 3.0));
        d.finish();

        let json = diagram_to_json(&d);
        let back = diagram_from_json(&json).unwrap();
        assert_eq!(diagram_to_json(&back), json);

        let csv = diagram_to_csv(&d);
        let back = diagram_from_csv(&csv).unwrap();
        assert_eq!(diagram_to_csv(&back), csv);
    }

    #[test]
    fn svg_contains_points_and_axes() {
        let mut d = PersistenceDiagram::new();
        d.push(1, Interval::new(0.5, 0.8));
        d.push(0, Interval::new(0.0, f64::INFINITY));
        d.finish();
        let svg = diagram_to_svg(&d);
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains("<circle"));
        assert!(svg.contains("stroke-dasharray"));
    }
}
