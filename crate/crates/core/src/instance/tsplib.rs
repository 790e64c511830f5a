//! TSPLIB keyword format, restricted to `EXPLICIT`/`FULL_MATRIX` and `EUC_2D`.

use super::Instance;
use crate::error::{Error, Result};

#[derive(Debug, Default)]
struct Header {
    name: Option<String>,
    kind: Option<String>,
    dimension: Option<(usize, usize)>,
    weight_type: Option<(String, usize)>,
    weight_format: Option<(String, usize)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Section {
    None,
    Weights,
    Coords,
}

/// TSPLIB EUC_2D: Euclidean distance rounded to the nearest integer,
/// halves away from zero.
pub fn euc2d_cost(p: (f64, f64), q: (f64, f64)) -> i64 {
    let dx = p.0 - q.0;
    let dy = p.1 - q.1;
    (dx * dx + dy * dy).sqrt().round() as i64
}

fn is_keyword_line(line: &str) -> bool {
    line.chars()
        .next()
        .map(|c| c.is_ascii_alphabetic())
        .unwrap_or(false)
}

fn split_keyword(line: &str) -> (String, String) {
    match line.find(':') {
        Some(pos) => (
            line[..pos].trim().to_ascii_uppercase(),
            line[pos + 1..].trim().to_string(),
        ),
        None => {
            let mut it = line.splitn(2, char::is_whitespace);
            let key = it.next().unwrap_or("").trim().to_ascii_uppercase();
            let rest = it.next().unwrap_or("").trim().to_string();
            (key, rest)
        }
    }
}

pub fn parse_tsplib(text: &str) -> Result<Instance> {
    let mut header = Header::default();
    let mut section = Section::None;
    let mut weights: Vec<(i64, usize)> = Vec::new();
    let mut coords: Vec<(usize, f64, f64)> = Vec::new();
    let mut weight_line = 0usize;
    let mut coord_line = 0usize;

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if is_keyword_line(line) {
            section = Section::None;
            let (key, value) = split_keyword(line);
            match key.as_str() {
                "NAME" => header.name = Some(value),
                "TYPE" => header.kind = Some(value.to_ascii_uppercase()),
                "DIMENSION" => {
                    let d = value.parse::<usize>().map_err(|_| {
                        Error::parse(lineno, format!("malformed DIMENSION {value:?}"))
                    })?;
                    header.dimension = Some((d, lineno));
                }
                "EDGE_WEIGHT_TYPE" => {
                    header.weight_type = Some((value.to_ascii_uppercase(), lineno))
                }
                "EDGE_WEIGHT_FORMAT" => {
                    header.weight_format = Some((value.to_ascii_uppercase(), lineno))
                }
                "EDGE_WEIGHT_SECTION" => {
                    section = Section::Weights;
                    weight_line = lineno;
                }
                "NODE_COORD_SECTION" => {
                    section = Section::Coords;
                    coord_line = lineno;
                }
                "EOF" => break,
                "COMMENT" | "CAPACITY" | "DISPLAY_DATA_TYPE" | "NODE_COORD_TYPE" => {}
                _ => {
                    return Err(Error::parse(
                        lineno,
                        format!("unsupported keyword or section {key:?}"),
                    ))
                }
            }
            continue;
        }
        match section {
            Section::Weights => {
                for tok in line.split_whitespace() {
                    let v = parse_weight(tok)
                        .ok_or_else(|| Error::parse(lineno, format!("bad weight {tok:?}")))?;
                    weights.push((v, lineno));
                }
            }
            Section::Coords => {
                let toks: Vec<&str> = line.split_whitespace().collect();
                if toks.len() != 3 {
                    return Err(Error::parse(
                        lineno,
                        "coordinate line must be `id x y`",
                    ));
                }
                let id: usize = toks[0]
                    .parse()
                    .map_err(|_| Error::parse(lineno, format!("bad node id {:?}", toks[0])))?;
                let x: f64 = toks[1]
                    .parse()
                    .map_err(|_| Error::parse(lineno, format!("bad coordinate {:?}", toks[1])))?;
                let y: f64 = toks[2]
                    .parse()
                    .map_err(|_| Error::parse(lineno, format!("bad coordinate {:?}", toks[2])))?;
                if !x.is_finite() || !y.is_finite() {
                    return Err(Error::parse(lineno, "non-finite coordinate"));
                }
                coords.push((id, x, y));
            }
            Section::None => {
                return Err(Error::parse(
                    lineno,
                    format!("data outside of a section: {line:?}"),
                ))
            }
        }
    }

    let (n, dim_line) = header
        .dimension
        .ok_or_else(|| Error::parse(0, "missing DIMENSION"))?;
    if n < 3 {
        return Err(Error::TooSmall(n));
    }
    let symmetric = match header.kind.as_deref() {
        Some("TSP") => true,
        Some("ATSP") => false,
        Some(other) => return Err(Error::parse(0, format!("unsupported TYPE {other:?}"))),
        None => return Err(Error::parse(0, "missing TYPE")),
    };
    let name = header.name.unwrap_or_else(|| "unnamed".to_string());
    let (wtype, wtype_line) = header
        .weight_type
        .ok_or_else(|| Error::parse(0, "missing EDGE_WEIGHT_TYPE"))?;

    let instance = match wtype.as_str() {
        "EXPLICIT" => {
            match header.weight_format {
                Some((ref f, _)) if f == "FULL_MATRIX" => {}
                Some((f, line)) => {
                    return Err(Error::parse(
                        line,
                        format!("unsupported EDGE_WEIGHT_FORMAT {f:?}"),
                    ))
                }
                None => return Err(Error::parse(0, "missing EDGE_WEIGHT_FORMAT")),
            }
            if weight_line == 0 {
                return Err(Error::parse(0, "missing EDGE_WEIGHT_SECTION"));
            }
            if weights.len() != n * n {
                let line = weights.last().map(|w| w.1).unwrap_or(weight_line);
                return Err(Error::Parse {
                    line,
                    message: Error::LengthMismatch {
                        expected: n * n,
                        found: weights.len(),
                    }
                    .to_string(),
                });
            }
            Instance::from_fn(name, n, |i, j| weights[i * n + j].0).map_err(|e| match e {
                Error::InvalidArgument(m) => Error::parse(weight_line, m),
                other => other,
            })?
        }
        "EUC_2D" => {
            if coord_line == 0 {
                return Err(Error::parse(0, "missing NODE_COORD_SECTION"));
            }
            if coords.len() != n {
                return Err(Error::parse(
                    dim_line,
                    format!(
                        "matrix length mismatch: DIMENSION {n} but {} coordinates",
                        coords.len()
                    ),
                ));
            }
            let mut pts = vec![None; n];
            for &(id, x, y) in &coords {
                if id == 0 || id > n || pts[id - 1].is_some() {
                    return Err(Error::parse(coord_line, format!("bad or duplicate node id {id}")));
                }
                pts[id - 1] = Some((x, y));
            }
            let pts: Vec<(f64, f64)> = pts.into_iter().map(|p| p.unwrap()).collect();
            Instance::from_fn(name, n, |i, j| euc2d_cost(pts[i], pts[j]))?
        }
        other => {
            return Err(Error::parse(
                wtype_line,
                format!("unsupported EDGE_WEIGHT_TYPE {other:?}"),
            ))
        }
    };
    Ok(if symmetric { instance.mirrored() } else { instance })
}

fn parse_weight(tok: &str) -> Option<i64> {
    if let Ok(v) = tok.parse::<i64>() {
        return Some(v);
    }
    let f: f64 = tok.parse().ok()?;
    (f.is_finite() && f.fract() == 0.0).then_some(f as i64)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = "NAME: small\nTYPE: ATSP\nCOMMENT: test\nDIMENSION: 3\n\
        EDGE_WEIGHT_TYPE: EXPLICIT\nEDGE_WEIGHT_FORMAT: FULL_MATRIX\n\
        EDGE_WEIGHT_SECTION\n0 5 9\n4 0 7\n3 8 0\nEOF\n";

    #[test]
    fn euc2d_examples() {
        assert_eq!(euc2d_cost((0.0, 0.0), (3.0, 4.0)), 5);
        assert_eq!(euc2d_cost((0.0, 0.0), (1.0, 1.0)), 1);
        assert_eq!(euc2d_cost((0.0, 0.0), (0.5, 0.0)), 1);
    }

    #[test]
    fn full_matrix_row_major() {
        let inst = parse_tsplib(SMALL).unwrap();
        assert_eq!(inst.n(), 3);
        assert_eq!(inst.cost(0, 1), 5);
        assert_eq!(inst.cost(1, 0), 4);
        assert_eq!(inst.cost(2, 1), 8);
        assert_eq!(inst.cost(1, 1), inst.penalty());
        assert!(!inst.is_symmetric());
        assert_eq!(inst.name(), "small");
    }

    #[test]
    fn length_mismatch() {
        let text = SMALL.replace("3 8 0", "3 8");
        let err = parse_tsplib(&text).unwrap_err();
        assert!(err.to_string().contains("matrix length mismatch"), "{err}");
        assert!(matches!(err, Error::Parse { line: 10, .. }), "{err:?}");
    }

    #[test]
    fn tsp_type_is_mirrored() {
        let text = SMALL.replace("TYPE: ATSP", "TYPE: TSP");
        let inst = parse_tsplib(&text).unwrap();
        assert!(inst.is_symmetric());
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(inst.cost(i, j), inst.cost(j, i));
            }
        }
    }

    #[test]
    fn euc2d_section() {
        let text = "NAME : sq\nTYPE : TSP\nDIMENSION : 4\nEDGE_WEIGHT_TYPE : EUC_2D\n\
            NODE_COORD_SECTION\n1 0 0\n2 3 0\n3 3 4\n4 0 4\nEOF\n";
        let inst = parse_tsplib(text).unwrap();
        assert_eq!(inst.cost(0, 2), 5);
        assert_eq!(inst.cost(1, 3), 5);
        assert_eq!(inst.cost(0, 1), 3);
        assert!(inst.is_symmetric());
    }

    #[test]
    fn unsupported_format_reports_line() {
        let text = SMALL.replace("FULL_MATRIX", "LOWER_DIAG_ROW");
        let err = parse_tsplib(&text).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 6, .. }), "{err:?}");
        let text = SMALL.replace("EXPLICIT", "GEO");
        assert!(parse_tsplib(&text).unwrap_err().to_string().contains("GEO"));
    }

    #[test]
    fn malformed_header() {
        let text = SMALL.replace("DIMENSION: 3", "DIMENSION: three");
        assert!(matches!(
            parse_tsplib(&text).unwrap_err(),
            Error::Parse { line: 4, .. }
        ));
        let text = SMALL.replace("DIMENSION: 3\n", "");
        assert!(parse_tsplib(&text).is_err());
    }
}
