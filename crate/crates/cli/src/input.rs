//! Parsing of the flag values shared by several subcommands.

use std::collections::BTreeMap;
use std::fmt;

use gaussmap::calculus::{GraphExpr, Rect};

/// A usage or input error. Exits with status 2.
#[derive(Debug)]
pub struct Failure(pub String);

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

pub fn bad(flag: &str, msg: impl fmt::Display) -> Failure {
    Failure(format!("{flag}: {msg}"))
}

/// `a:b:N`, inclusive of both ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub a: f64,
    pub b: f64,
    pub n: usize,
}

impl Axis {
    pub fn at(&self, k: usize) -> f64 {
        if self.n == 1 {
            self.a
        } else {
            self.a + (self.b - self.a) * k as f64 / (self.n - 1) as f64
        }
    }
}

fn number(flag: &str, s: &str) -> Result<f64, Failure> {
    let x: f64 = s.trim().parse().map_err(|_| bad(flag, format!("`{s}` is not a number")))?;
    if !x.is_finite() {
        return Err(bad(flag, format!("`{s}` is not finite")));
    }
    Ok(x)
}

pub fn parse_axis(flag: &str, s: &str) -> Result<Axis, Failure> {
    let parts: Vec<&str> = s.split(':').collect();
    let [a, b, n] = parts[..] else {
        return Err(bad(flag, format!("expected a:b:N, got `{s}`")));
    };
    let (a, b) = (number(flag, a)?, number(flag, b)?);
    let n: usize = n.trim().parse().map_err(|_| bad(flag, format!("`{n}` is not a sample count")))?;
    if n == 0 {
        return Err(bad(flag, "need at least one sample"));
    }
    if n > 1 && a >= b {
        return Err(bad(flag, format!("need a < b, got {a} and {b}")));
    }
    Ok(Axis { a, b, n })
}

/// `a:b:NXc:d:M` (the separator is a lower-case `x`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid2 {
    pub u: Axis,
    pub v: Axis,
}

impl Grid2 {
    /// Nodes `(i, j, u, v)` with `i` fastest.
    pub fn nodes(&self) -> Vec<(usize, usize, f64, f64)> {
        (0..self.v.n).flat_map(|j| (0..self.u.n).map(move |i| (i, j, self.u.at(i), self.v.at(j)))).collect()
    }

    /// The rectangle the grid spans; a single-sample axis gets a small
    /// interval around its value.
    pub fn rect(&self) -> Rect {
        let span = |a: &Axis| {
            if a.n == 1 {
                let r = 1e-3 * (1.0 + a.a.abs());
                (a.a - r, a.a + r)
            } else {
                (a.a, a.b)
            }
        };
        let ((u0, u1), (v0, v1)) = (span(&self.u), span(&self.v));
        Rect::new(u0, u1, v0, v1).expect("axes are nonempty")
    }
}

pub fn parse_grid(flag: &str, s: &str) -> Result<Grid2, Failure> {
    let Some((u, v)) = s.split_once('x') else {
        return Err(bad(flag, format!("expected a:b:Nxc:d:M, got `{s}`")));
    };
    Ok(Grid2 { u: parse_axis(flag, u)?, v: parse_axis(flag, v)? })
}

pub fn parse_point(flag: &str, s: &str) -> Result<(f64, f64), Failure> {
    let Some((u, v)) = s.split_once(',') else {
        return Err(bad(flag, format!("expected u,v, got `{s}`")));
    };
    Ok((number(flag, u)?, number(flag, v)?))
}

/// `u0:u1:v0:v1`.
pub fn parse_domain(flag: &str, s: &str) -> Result<Rect, Failure> {
    let parts: Vec<&str> = s.split(':').collect();
    let [a, b, c, d] = parts[..] else {
        return Err(bad(flag, format!("expected u0:u1:v0:v1, got `{s}`")));
    };
    Rect::new(number(flag, a)?, number(flag, b)?, number(flag, c)?, number(flag, d)?).map_err(|e| bad(flag, e))
}

pub fn parse_params(flag: &str, items: &[String]) -> Result<BTreeMap<String, f64>, Failure> {
    let mut out = BTreeMap::new();
    for item in items {
        let Some((k, v)) = item.split_once('=') else {
            return Err(bad(flag, format!("expected name=value, got `{item}`")));
        };
        if out.insert(k.trim().to_string(), number(flag, v)?).is_some() {
            return Err(bad(flag, format!("`{}` given twice", k.trim())));
        }
    }
    Ok(out)
}

pub fn parse_expr(flag: &str, s: &str) -> Result<GraphExpr, Failure> {
    GraphExpr::parse(s).map_err(|e| bad(flag, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axes_include_both_ends() {
        let a = parse_axis("--u", "0.5:2:16").unwrap();
        assert_eq!((a.at(0), a.at(15)), (0.5, 2.0));
        assert_eq!(parse_axis("--u", "-1:1:1").unwrap().at(0), -1.0);
    }

    #[test]
    fn grids_split_on_x() {
        let g = parse_grid("--grid", "0.1:0.9:9x-1:1:3").unwrap();
        assert_eq!(g.nodes().len(), 27);
        assert_eq!(g.nodes()[1], (1, 0, 0.2, -1.0));
        assert_eq!(g.rect(), Rect::new(0.1, 0.9, -1.0, 1.0).unwrap());
        let p = parse_grid("--grid", "1:1:1x0:1:2").unwrap().rect();
        assert!(p.u0 < 1.0 && p.u1 > 1.0);
    }

    #[test]
    fn malformed_values_name_the_flag() {
        for (f, s) in [("--u", "1:2"), ("--u", "2:1:4"), ("--u", "0:1:0"), ("--u", "a:1:3")] {
            assert!(parse_axis(f, s).unwrap_err().0.starts_with("--u: "));
        }
        assert!(parse_grid("--grid", "0:1:3").is_err());
        assert!(parse_domain("--domain", "0:1:1:0").is_err());
        assert!(parse_params("--param", &["c".into()]).is_err());
        assert!(parse_params("--param", &["c=1".into(), "c=2".into()]).is_err());
        assert_eq!(parse_point("--at", "0.5,-1").unwrap(), (0.5, -1.0));
    }
}
