//! Point CSV: `i,j,u,v,x1,x2,x3`, one row per grid node, empty coordinates
//! where a sample was dropped.

use std::fs;
use std::io;
use std::path::Path;

pub const HEADER: &str = "i,j,u,v,x1,x2,x3";

#[derive(Debug, Clone, PartialEq)]
pub struct PointRow {
    pub i: usize,
    pub j: usize,
    pub u: f64,
    pub v: f64,
    pub x: Option<[f64; 3]>,
}

pub fn render(rows: &[PointRow]) -> String {
    let mut s = String::from(HEADER);
    s.push('\n');
    for r in rows {
        s += &format!("{},{},{:?},{:?},", r.i, r.j, r.u, r.v);
        match r.x {
            Some([a, b, c]) => s += &format!("{a:?},{b:?},{c:?}\n"),
            None => s += ",,\n",
        }
    }
    s
}

pub fn write_points(path: &Path, rows: &[PointRow]) -> io::Result<()> {
    fs::write(path, render(rows))
}

/// Grid of optional points read back from a point CSV. Any extra columns
/// are ignored; missing nodes become holes.
#[derive(Debug, Clone, PartialEq)]
pub struct PointGrid {
    pub nu: usize,
    pub nv: usize,
    /// Row-major, `i` fastest.
    pub points: Vec<Option<[f64; 3]>>,
}

pub fn parse_points(text: &str) -> Result<PointGrid, String> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header: Vec<&str> = lines.next().ok_or("empty file")?.split(',').map(str::trim).collect();
    let col = |name: &str| header.iter().position(|h| *h == name).ok_or(format!("missing column `{name}`"));
    let (ci, cj) = (col("i")?, col("j")?);
    let cx = [col("x1")?, col("x2")?, col("x3")?];
    let mut entries = vec![];
    for (n, line) in lines.enumerate() {
        let f: Vec<&str> = line.split(',').map(str::trim).collect();
        let get = |c: usize| f.get(c).copied().ok_or(format!("line {}: too few fields", n + 2));
        let index = |c: usize| -> Result<usize, String> {
            let s = get(c)?;
            s.parse().map_err(|_| format!("line {}: bad index `{s}`", n + 2))
        };
        let (i, j) = (index(ci)?, index(cj)?);
        let raw = [get(cx[0])?, get(cx[1])?, get(cx[2])?];
        let x = if raw.iter().all(|s| s.is_empty()) {
            None
        } else {
            let mut p = [0.0; 3];
            for (k, s) in raw.iter().enumerate() {
                p[k] = s.parse().map_err(|_| format!("line {}: bad coordinate `{s}`", n + 2))?;
            }
            Some(p)
        };
        entries.push((i, j, x));
    }
    if entries.is_empty() {
        return Err("empty grid".into());
    }
    let nu = entries.iter().map(|e| e.0).max().unwrap_or(0) + 1;
    let nv = entries.iter().map(|e| e.1).max().unwrap_or(0) + 1;
    let mut points = vec![None; nu * nv];
    for (i, j, x) in entries {
        points[j * nu + i] = x;
    }
    Ok(PointGrid { nu, nv, points })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows_round_trip() {
        let rows = vec![
            PointRow { i: 0, j: 0, u: 0.1, v: -2.0, x: Some([1.0, 1e-7, 3.25]) },
            PointRow { i: 1, j: 0, u: 0.2, v: -2.0, x: None },
        ];
        let text = render(&rows);
        assert_eq!(text, "i,j,u,v,x1,x2,x3\n0,0,0.1,-2.0,1.0,1e-7,3.25\n1,0,0.2,-2.0,,,\n");
        let g = parse_points(&text).unwrap();
        assert_eq!((g.nu, g.nv), (2, 1));
        assert_eq!(g.points, vec![Some([1.0, 1e-7, 3.25]), None]);
    }

    #[test]
    fn bad_files_are_rejected() {
        assert!(parse_points("").is_err());
        assert!(parse_points("i,j,x1,x2,x3\n").is_err());
        assert!(parse_points("i,j,x1,x2\n0,0,1,2\n").is_err());
        assert!(parse_points("i,j,x1,x2,x3\n0,0,1,b,2\n").is_err());
    }
}
