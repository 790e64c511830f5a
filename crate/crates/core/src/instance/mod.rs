//! Problem instances: complete directed cost matrices with a penalized diagonal.
//!
//! Vertices are 0-based inside the library. Text formats and everything a
//! user sees (tour listings, fixture descriptions) use 1-based labels.

mod fixtures;
mod tsplib;

pub use fixtures::{figure3_instance, figure3_tour, figure5_instance, figure5_tour, fixture};
pub use tsplib::{euc2d_cost, parse_tsplib};

use crate::error::{Error, Result};

/// Square integer cost matrix over `n ≥ 3` vertices.
///
/// The diagonal always holds `penalty = n · max_offdiag + 1`, so a tour or
/// patch that uses a self arc can never beat one that does not.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    name: String,
    n: usize,
    cost: Vec<i64>,
    penalty: i64,
    symmetric: bool,
}

impl Instance {
    /// Builds an instance from full rows. Diagonal entries are ignored and
    /// replaced by the penalty.
    pub fn from_rows(name: impl Into<String>, rows: &[Vec<i64>]) -> Result<Self> {
        let n = rows.len();
        if n < 3 {
            return Err(Error::TooSmall(n));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::parse(
                    i + 1,
                    format!("ragged row: expected {n} entries, found {}", row.len()),
                ));
            }
        }
        Self::from_fn(name, n, |i, j| rows[i][j])
    }

    /// Builds an instance by evaluating `f(i, j)` on every off-diagonal pair.
    pub fn from_fn(
        name: impl Into<String>,
        n: usize,
        mut f: impl FnMut(usize, usize) -> i64,
    ) -> Result<Self> {
        if n < 3 {
            return Err(Error::TooSmall(n));
        }
        let mut cost = vec![0i64; n * n];
        let mut max = 0i64;
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let c = f(i, j);
                if c < 0 {
                    return Err(Error::InvalidArgument(format!(
                        "negative arc cost {c} on ({}, {})",
                        i + 1,
                        j + 1
                    )));
                }
                max = max.max(c);
                cost[i * n + j] = c;
            }
        }
        let penalty = (n as i64)
            .checked_mul(max)
            .and_then(|p| p.checked_add(1))
            .ok_or(Error::CostOverflow)?;
        // Separated-graph sentinels are 2n · penalty; keep that representable.
        penalty
            .checked_mul(2 * n as i64)
            .and_then(|s| s.checked_mul(4))
            .ok_or(Error::CostOverflow)?;
        for i in 0..n {
            cost[i * n + i] = penalty;
        }
        let symmetric = (0..n).all(|i| (i + 1..n).all(|j| cost[i * n + j] == cost[j * n + i]));
        Ok(Instance {
            name: name.into(),
            n,
            cost,
            penalty,
            symmetric,
        })
    }

    /// Forces `c[j][i] = c[i][j]` for `i < j` (upper triangle wins).
    pub(crate) fn mirrored(mut self) -> Self {
        let n = self.n;
        for i in 0..n {
            for j in i + 1..n {
                self.cost[j * n + i] = self.cost[i * n + j];
            }
        }
        self.symmetric = true;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn cost(&self, i: usize, j: usize) -> i64 {
        self.cost[i * self.n + j]
    }

    pub fn penalty(&self) -> i64 {
        self.penalty
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn max_arc_cost(&self) -> i64 {
        (self.penalty - 1) / self.n as i64
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.cost[i * self.n..(i + 1) * self.n]
    }

    /// Comma-separated full matrix with a zero diagonal, one row per line.
    /// `parse_matrix_csv` reads it back to an identical cost matrix.
    pub fn to_matrix_csv(&self) -> String {
        let mut out = String::new();
        for i in 0..self.n {
            let row: Vec<String> = (0..self.n)
                .map(|j| if i == j { "0".into() } else { self.cost(i, j).to_string() })
                .collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    /// TSPLIB `EXPLICIT` / `FULL_MATRIX` rendering.
    pub fn to_tsplib(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("NAME: {}\n", self.name));
        out.push_str(&format!(
            "TYPE: {}\n",
            if self.symmetric { "TSP" } else { "ATSP" }
        ));
        out.push_str(&format!("DIMENSION: {}\n", self.n));
        out.push_str("EDGE_WEIGHT_TYPE: EXPLICIT\n");
        out.push_str("EDGE_WEIGHT_FORMAT: FULL_MATRIX\n");
        out.push_str("EDGE_WEIGHT_SECTION\n");
        for i in 0..self.n {
            let row: Vec<String> = (0..self.n)
                .map(|j| if i == j { "0".into() } else { self.cost(i, j).to_string() })
                .collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out.push_str("EOF\n");
        out
    }
}

/// Reads `n` rows of `n` integers separated by commas and/or whitespace.
/// Blank lines and lines starting with `#` are skipped.
pub fn parse_matrix_csv(text: &str) -> Result<Instance> {
    let mut rows: Vec<Vec<i64>> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut row = Vec::new();
        for tok in line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
        {
            let v: i64 = tok
                .parse()
                .map_err(|_| Error::parse(lineno + 1, format!("non-numeric token {tok:?}")))?;
            row.push(v);
        }
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(Error::parse(
                    lineno + 1,
                    format!(
                        "ragged row: expected {} entries, found {}",
                        first.len(),
                        row.len()
                    ),
                ));
            }
        }
        rows.push(row);
    }
    if rows.len() < 3 {
        return Err(Error::TooSmall(rows.len()));
    }
    if rows[0].len() != rows.len() {
        return Err(Error::LengthMismatch {
            expected: rows.len() * rows.len(),
            found: rows.len() * rows[0].len(),
        });
    }
    Instance::from_rows("matrix", &rows)
}

/// Picks the TSPLIB parser when the text carries a `DIMENSION` keyword,
/// the plain matrix parser otherwise.
pub fn parse_auto(text: &str) -> Result<Instance> {
    let looks_tsplib = text
        .lines()
        .any(|l| l.trim_start().to_ascii_uppercase().starts_with("DIMENSION"));
    if looks_tsplib {
        parse_tsplib(text)
    } else {
        parse_matrix_csv(text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym3() -> &'static str {
        "0,1,2\n1,0,3\n2,3,0\n"
    }

    #[test]
    fn csv_rejects_two_vertices() {
        assert_eq!(parse_matrix_csv("0,2\n2,0"), Err(Error::TooSmall(2)));
    }

    #[test]
    fn csv_symmetry_flag() {
        assert!(parse_matrix_csv(sym3()).unwrap().is_symmetric());
        let asym = parse_matrix_csv("0 1 2\n4 0 3\n2 3 0").unwrap();
        assert!(!asym.is_symmetric());
    }

    #[test]
    fn csv_ragged_and_non_numeric() {
        let e = parse_matrix_csv("0,1,2\n1,0\n2,3,0").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }), "{e}");
        let e = parse_matrix_csv("0,1,x\n1,0,3\n2,3,0").unwrap_err();
        assert!(e.to_string().contains("non-numeric"), "{e}");
    }

    #[test]
    fn penalty_rule() {
        let inst = parse_matrix_csv(sym3()).unwrap();
        assert_eq!(inst.penalty(), 3 * 3 + 1);
        for i in 0..3 {
            assert_eq!(inst.cost(i, i), inst.penalty());
        }
        assert_eq!(inst.max_arc_cost(), 3);
    }

    #[test]
    fn csv_round_trip() {
        let inst = parse_matrix_csv("0 5 9\n4 0 7\n3 8 0").unwrap();
        let again = parse_matrix_csv(&inst.to_matrix_csv()).unwrap();
        assert_eq!(inst.cost, again.cost);
        let again = parse_tsplib(&inst.to_tsplib()).unwrap();
        assert_eq!(inst.cost, again.cost);
    }

    #[test]
    fn negative_costs_rejected() {
        assert!(parse_matrix_csv("0,-1,2\n1,0,3\n2,3,0").is_err());
    }

    #[test]
    fn auto_detects_format() {
        assert_eq!(parse_auto(sym3()).unwrap().n(), 3);
        let t = "NAME: t\nTYPE: ATSP\nDIMENSION: 3\nEDGE_WEIGHT_TYPE: EXPLICIT\n\
                 EDGE_WEIGHT_FORMAT: FULL_MATRIX\nEDGE_WEIGHT_SECTION\n0 5 9\n4 0 7\n3 8 0\nEOF\n";
        assert_eq!(parse_auto(t).unwrap().name(), "t");
    }
}
