//! The manifold definition file format.
//!
//! A flat key/value text document with sections (see
//! `docs/manifold-format.md` for the normative description):
//!
//! ```text
//! [manifold]     name, dim, optional coords (default x1..x{2n})
//! [domain]       one open constraint per line, e.g. `x2 > 0.1`
//! [metric]       entries `g_1_1 = 1/x2^2`; unspecified entries are 0
//! [J]            entries `J_3_1 = 1/x2^4` (component J^i_j, 1-based)
//! [conformal]    optional `f = 2*ln(x2)`
//! [sampler]      optional per-coordinate boxes `x2 = 0.5, 3`
//! ```
//!
//! `#` starts a comment. This format is the contract between the CLI, the
//! built-in fixture set, and external manifold files.

use crate::chart::{ChartManifold, Cmp, Constraint};
use crate::error::{GeomError, Result};
use crate::expr::Expr;

fn err(line: usize, message: impl Into<String>) -> GeomError {
    GeomError::Manifest {
        line,
        message: message.into(),
    }
}

struct RawLine {
    number: usize,
    text: String,
}

pub fn parse_manifest(source: &str) -> Result<ChartManifold> {
    let mut sections: Vec<(String, Vec<RawLine>)> = Vec::new();
    for (idx, raw) in source.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            sections.push((name.trim().to_string(), Vec::new()));
        } else {
            match sections.last_mut() {
                Some((_, lines)) => lines.push(RawLine {
                    number: idx + 1,
                    text: line.to_string(),
                }),
                None => return Err(err(idx + 1, "content before any [section] header")),
            }
        }
    }

    let get = |name: &str| -> Option<&Vec<RawLine>> {
        sections.iter().find(|(n, _)| n == name).map(|(_, l)| l)
    };

    // [manifold]
    let head = get("manifold").ok_or_else(|| err(0, "missing [manifold] section"))?;
    let mut name = None;
    let mut dim = None;
    let mut coords: Option<Vec<String>> = None;
    for l in head {
        let (k, v) = split_kv(l)?;
        match k.as_str() {
            "name" => name = Some(v),
            "dim" => {
                dim = Some(
                    v.parse::<usize>()
                        .map_err(|_| err(l.number, format!("bad dim `{v}`")))?,
                )
            }
            "coords" => {
                coords = Some(v.split(',').map(|s| s.trim().to_string()).collect())
            }
            other => return Err(err(l.number, format!("unknown manifold key `{other}`"))),
        }
    }
    let name = name.ok_or_else(|| err(0, "missing `name` in [manifold]"))?;
    let dim = dim.ok_or_else(|| err(0, "missing `dim` in [manifold]"))?;
    let coord_names =
        coords.unwrap_or_else(|| (1..=dim).map(|i| format!("x{i}")).collect());
    if coord_names.len() != dim {
        return Err(err(0, "coords count does not match dim"));
    }
    let names: Vec<&str> = coord_names.iter().map(|s| s.as_str()).collect();

    let parse_expr = |line: &RawLine, src: &str| -> Result<Expr> {
        Expr::parse(src, &names).map_err(|e| err(line.number, e.to_string()))
    };

    // [domain]
    let mut constraints = Vec::new();
    if let Some(lines) = get("domain") {
        for l in lines {
            let (op_pos, op) = match (l.text.find('>'), l.text.find('<')) {
                (Some(g), None) => (g, Cmp::Gt),
                (None, Some(s)) => (s, Cmp::Lt),
                _ => {
                    return Err(err(
                        l.number,
                        "constraint must contain exactly one of `>` or `<`",
                    ))
                }
            };
            let lhs = parse_expr(l, &l.text[..op_pos])?;
            let rhs = parse_expr(l, &l.text[op_pos + 1..])?;
            constraints.push(Constraint {
                lhs,
                op,
                rhs,
                source: l.text.clone(),
            });
        }
    }

    // [metric]
    let zero = Expr::Const(0.0);
    let mut metric = vec![vec![zero.clone(); dim]; dim];
    let mut metric_set = vec![vec![false; dim]; dim];
    let lines = get("metric").ok_or_else(|| err(0, "missing [metric] section"))?;
    for l in lines {
        let (k, v) = split_kv(l)?;
        let (i, j) = parse_indexed_key(&k, "g", dim, l.number)?;
        let e = parse_expr(l, &v)?;
        if metric_set[i][j] && metric[i][j] != e {
            return Err(err(
                l.number,
                format!("conflicting value for symmetric entry g_{}_{}", i + 1, j + 1),
            ));
        }
        metric[i][j] = e.clone();
        metric[j][i] = e;
        metric_set[i][j] = true;
        metric_set[j][i] = true;
    }

    // [J]
    let j_exprs = match get("J") {
        Some(lines) if !lines.is_empty() => {
            let mut j = vec![vec![zero.clone(); dim]; dim];
            for l in lines {
                let (k, v) = split_kv(l)?;
                let (i, jj) = parse_indexed_key(&k, "J", dim, l.number)?;
                j[i][jj] = parse_expr(l, &v)?;
            }
            Some(j)
        }
        _ => None,
    };

    // [conformal]
    let mut f_expr = None;
    if let Some(lines) = get("conformal") {
        for l in lines {
            let (k, v) = split_kv(l)?;
            if k != "f" {
                return Err(err(l.number, format!("unknown conformal key `{k}`")));
            }
            f_expr = Some(parse_expr(l, &v)?);
        }
    }

    // [sampler]
    let mut sample_box = vec![(-1.0, 1.0); dim];
    if let Some(lines) = get("sampler") {
        for l in lines {
            let (k, v) = split_kv(l)?;
            let axis = coord_names
                .iter()
                .position(|c| *c == k)
                .ok_or_else(|| err(l.number, format!("unknown coordinate `{k}`")))?;
            let parts: Vec<&str> = v.split(',').map(|s| s.trim()).collect();
            if parts.len() != 2 {
                return Err(err(l.number, "sampler box needs `lo, hi`"));
            }
            let lo: f64 = parts[0]
                .parse()
                .map_err(|_| err(l.number, "bad box bound"))?;
            let hi: f64 = parts[1]
                .parse()
                .map_err(|_| err(l.number, "bad box bound"))?;
            sample_box[axis] = (lo, hi);
        }
    }

    ChartManifold::new(
        name,
        coord_names,
        metric,
        j_exprs,
        f_expr,
        constraints,
        sample_box,
    )
}

fn split_kv(l: &RawLine) -> Result<(String, String)> {
    match l.text.split_once('=') {
        Some((k, v)) => Ok((k.trim().to_string(), v.trim().to_string())),
        None => Err(err(l.number, "expected `key = value`")),
    }
}

fn parse_indexed_key(
    key: &str,
    prefix: &str,
    dim: usize,
    line: usize,
) -> Result<(usize, usize)> {
    let body = key
        .strip_prefix(prefix)
        .and_then(|s| s.strip_prefix('_'))
        .ok_or_else(|| err(line, format!("expected key `{prefix}_i_j`, got `{key}`")))?;
    let (a, b) = body
        .split_once('_')
        .ok_or_else(|| err(line, format!("expected key `{prefix}_i_j`, got `{key}`")))?;
    let i: usize = a.parse().map_err(|_| err(line, "bad index"))?;
    let j: usize = b.parse().map_err(|_| err(line, "bad index"))?;
    if i == 0 || j == 0 || i > dim || j > dim {
        return Err(err(line, format!("index out of range in `{key}`")));
    }
    Ok((i - 1, j - 1))
}

/// Render a chart back to the definition format; `parse_manifest` of the
/// output reconstructs an equivalent chart.
pub fn to_manifest(chart: &ChartManifold) -> String {
    let names = &chart.coord_names;
    let mut out = String::new();
    out.push_str("[manifold]\n");
    out.push_str(&format!("name = {}\n", chart.name));
    out.push_str(&format!("dim = {}\n", chart.dim()));
    out.push_str(&format!("coords = {}\n", names.join(", ")));

    if !chart.constraints.is_empty() {
        out.push_str("\n[domain]\n");
        for c in &chart.constraints {
            let op = match c.op {
                crate::chart::Cmp::Gt => ">",
                crate::chart::Cmp::Lt => "<",
            };
            out.push_str(&format!(
                "{} {} {}\n",
                c.lhs.pretty(names),
                op,
                c.rhs.pretty(names)
            ));
        }
    }

    out.push_str("\n[metric]\n");
    for i in 0..chart.dim() {
        for j in i..chart.dim() {
            let e = &chart.metric_exprs[i][j];
            if *e != Expr::Const(0.0) {
                out.push_str(&format!("g_{}_{} = {}\n", i + 1, j + 1, e.pretty(names)));
            }
        }
    }

    if let Some(jm) = &chart.j_exprs {
        out.push_str("\n[J]\n");
        for i in 0..chart.dim() {
            for j in 0..chart.dim() {
                let e = &jm[i][j];
                if *e != Expr::Const(0.0) {
                    out.push_str(&format!(
                        "J_{}_{} = {}\n",
                        i + 1,
                        j + 1,
                        e.pretty(names)
                    ));
                }
            }
        }
    }

    if let Some(f) = &chart.f_expr {
        out.push_str("\n[conformal]\n");
        out.push_str(&format!("f = {}\n", f.pretty(names)));
    }

    out.push_str("\n[sampler]\n");
    for (a, (lo, hi)) in chart.sample_box.iter().enumerate() {
        out.push_str(&format!("{} = {}, {}\n", names[a], lo, hi));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::Point;

    const SAMPLE: &str = "\
# warped product chart
[manifold]
name = sample
dim = 4
coords = x1, x2, y1, y2

[domain]
x2 > 0.1
abs(x1) > 0.1

[metric]
g_1_1 = 1/x2^2
g_2_2 = 1/x2^2
g_3_3 = x2^6
g_4_4 = x2^6

[J]
J_3_1 = 1/x2^4
J_4_2 = -1/x2^4
J_1_3 = -x2^4
J_2_4 = x2^4

[conformal]
f = 2*ln(x2)

[sampler]
x1 = 0.5, 2
x2 = 0.5, 3
";

    #[test]
    fn parses_and_evaluates() {
        let m = parse_manifest(SAMPLE).unwrap();
        assert_eq!(m.name, "sample");
        assert_eq!(m.dim(), 4);
        let p = Point::new(vec![1.0, 2.0, 0.0, 0.0]);
        let g = m.metric_matrix(&p).unwrap();
        assert!((g[(0, 0)] - 0.25).abs() < 1e-15);
        assert!((g[(2, 2)] - 64.0).abs() < 1e-15);
        let f = m.f_at(&p).unwrap();
        assert!((f - 2.0 * 2.0f64.ln()).abs() < 1e-15);
        assert_eq!(m.sample_box[0], (0.5, 2.0));
        assert_eq!(m.sample_box[3], (-1.0, 1.0));
    }

    #[test]
    fn manifest_roundtrip_preserves_values() {
        let m = parse_manifest(SAMPLE).unwrap();
        let text = to_manifest(&m);
        let m2 = parse_manifest(&text).unwrap();
        let p = Point::new(vec![0.7, 1.7, 0.3, -0.2]);
        assert_eq!(
            m.metric_matrix(&p).unwrap(),
            m2.metric_matrix(&p).unwrap()
        );
        assert_eq!(m.j_matrix(&p).unwrap(), m2.j_matrix(&p).unwrap());
        assert_eq!(m.f_at(&p).unwrap(), m2.f_at(&p).unwrap());
        assert_eq!(m.constraints.len(), m2.constraints.len());
    }

    #[test]
    fn error_carries_line_number() {
        let bad = "[manifold]\nname = x\ndim = 4\n\n[metric]\ng_1_1 = 1/\n";
        match parse_manifest(bad) {
            Err(GeomError::Manifest { line, .. }) => assert_eq!(line, 6),
            other => panic!("expected manifest error, got {other:?}"),
        }
    }

    #[test]
    fn asymmetric_metric_rejected() {
        let bad = "\
[manifold]
name = x
dim = 4

[metric]
g_1_1 = 1
g_2_2 = 1
g_3_3 = 1
g_4_4 = 1
g_1_2 = x1
g_2_1 = x2
";
        assert!(parse_manifest(bad).is_err());
    }
}
