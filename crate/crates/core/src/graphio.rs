//! Graph sources: path graphs, seeded Erdős–Rényi graphs, edge lists and
//! Matrix Market files.
//!
//! Files and generators describe arcs `src → dst` as entry `(src, dst)`. The
//! `In` orientation transposes this so that arc `j → i` sits at `(i, j)`, the
//! layout expected by Lindblad operators.

use std::collections::VecDeque;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{CsrMatrix, Operator};

/// Seed used when a random graph spec omits one.
pub const DEFAULT_SEED: u64 = 0;

#[derive(Clone, Debug, PartialEq)]
pub enum GraphSpec {
    /// Undirected path on `n` vertices.
    Path { n: usize },
    /// Each arc (directed) or edge (undirected) present independently with
    /// probability `p`; no self-loops.
    ErdosRenyi {
        n: usize,
        p: f64,
        directed: bool,
        seed: u64,
    },
    /// Edge list, or Matrix Market when the extension is `.mtx`.
    File { path: PathBuf },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Orientation {
    /// Arc `j → i` at entry `(i, j)`.
    In,
    /// Arc `i → j` at entry `(i, j)`.
    Out,
    /// Symmetric adjacency of the underlying undirected graph.
    Undirected,
}

impl GraphSpec {
    /// Whether the graph carries arc directions.
    pub fn is_directed(&self) -> bool {
        match self {
            GraphSpec::Path { .. } => false,
            GraphSpec::ErdosRenyi { directed, .. } => *directed,
            GraphSpec::File { .. } => true,
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            GraphSpec::Path { n } | GraphSpec::ErdosRenyi { n, .. } if *n == 0 => {
                Err(Error::arg("graph must have at least one vertex"))
            }
            GraphSpec::ErdosRenyi { p, .. } if !(0.0..=1.0).contains(p) => {
                Err(Error::arg(format!("edge probability {p} outside [0, 1]")))
            }
            _ => Ok(()),
        }
    }
}

impl FromStr for GraphSpec {
    type Err = Error;

    /// `path:N`, `er:N:P[:SEED]` (directed), `uer:N:P[:SEED]` (undirected) or
    /// `file:PATH`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || {
            Error::arg(format!(
                "graph spec '{s}' is not one of path:N, er:N:P[:SEED], uer:N:P[:SEED], file:PATH"
            ))
        };
        let (kind, rest) = s.split_once(':').ok_or_else(bad)?;
        let spec = match kind {
            "path" => GraphSpec::Path {
                n: rest.parse().map_err(|_| bad())?,
            },
            "er" | "uer" => {
                let parts: Vec<&str> = rest.split(':').collect();
                if !(2..=3).contains(&parts.len()) {
                    return Err(bad());
                }
                GraphSpec::ErdosRenyi {
                    n: parts[0].parse().map_err(|_| bad())?,
                    p: parts[1].parse().map_err(|_| bad())?,
                    directed: kind == "er",
                    seed: match parts.get(2) {
                        Some(x) => x.parse().map_err(|_| bad())?,
                        None => DEFAULT_SEED,
                    },
                }
            }
            "file" if !rest.is_empty() => GraphSpec::File { path: rest.into() },
            _ => return Err(bad()),
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// The adjacency matrix of `spec` in the requested orientation.
pub fn adjacency(spec: &GraphSpec, orientation: Orientation) -> Result<Operator> {
    spec.validate()?;
    if !spec.is_directed() && orientation != Orientation::Undirected {
        return Err(Error::arg(format!(
            "orientation {orientation:?} needs a directed graph; use Undirected"
        )));
    }
    let out = match spec {
        GraphSpec::Path { n } => path_graph(*n),
        GraphSpec::ErdosRenyi {
            n,
            p,
            directed,
            seed,
        } => erdos_renyi(*n, *p, *directed, *seed)?,
        GraphSpec::File { path } => read_graph_file(path)?,
    };
    Ok(orient(&out, orientation))
}

/// Reorients an out-convention adjacency matrix.
pub fn orient(out: &Operator, orientation: Orientation) -> Operator {
    match orientation {
        Orientation::Out => out.clone(),
        Orientation::In => out.transpose(),
        Orientation::Undirected => symmetrize(out),
    }
}

/// Entry `(i, j)` becomes `max(|a_ij|, |a_ji|)`.
fn symmetrize(a: &Operator) -> Operator {
    let n = a.dim();
    let triplets = a.entries().into_iter().flat_map(|(r, c, v)| {
        let w = C64::new(v.norm().max(a.get(c, r).norm()), 0.0);
        [(r, c, w), (c, r, w)]
    });
    let mut entries: Vec<(usize, usize, C64)> = triplets.collect();
    entries.sort_by_key(|&(r, c, _)| (r, c));
    entries.dedup_by_key(|e| (e.0, e.1));
    Operator::Sparse(CsrMatrix::from_triplets(n, n, entries))
}

pub fn path_graph(n: usize) -> Operator {
    let one = C64::new(1.0, 0.0);
    let triplets = (1..n).flat_map(|k| [(k - 1, k, one), (k, k - 1, one)]);
    Operator::Sparse(CsrMatrix::from_triplets(n, n, triplets))
}

/// Seeded random graph in the out convention. Pairs are visited in row-major
/// order with one uniform draw each, so equal seeds give equal graphs on every
/// platform.
pub fn erdos_renyi(n: usize, p: f64, directed: bool, seed: u64) -> Result<Operator> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::arg(format!("edge probability {p} outside [0, 1]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let one = C64::new(1.0, 0.0);
    let mut triplets = Vec::new();
    for i in 0..n {
        let start = if directed { 0 } else { i + 1 };
        for j in start..n {
            if i == j {
                continue;
            }
            if rng.random::<f64>() < p {
                triplets.push((i, j, one));
                if !directed {
                    triplets.push((j, i, one));
                }
            }
        }
    }
    Ok(Operator::Sparse(CsrMatrix::from_triplets(n, n, triplets)))
}

/// Whether every vertex reaches every other along arcs.
pub fn is_strongly_connected(a: &Operator) -> bool {
    let n = a.dim();
    if n == 0 {
        return true;
    }
    let reaches_all = |m: &CsrMatrix| {
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        while let Some(v) = queue.pop_front() {
            for (w, _) in m.row(v) {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    };
    let m = a.to_sparse();
    reaches_all(&m) && reaches_all(&m.transpose())
}

fn read_graph_file(path: &Path) -> Result<Operator> {
    let text = std::fs::read_to_string(path)?;
    if path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("mtx"))
    {
        parse_matrix_market(&text)
    } else {
        parse_edge_list(&text)
    }
}

fn parse_f64(field: &str, line: usize, what: &str) -> Result<f64> {
    field
        .parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| Error::parse(line, format!("{what} '{field}' is not a finite number")))
}

fn parse_index(field: &str, line: usize, what: &str) -> Result<usize> {
    match field.parse::<usize>() {
        Ok(k) if k >= 1 => Ok(k),
        _ => Err(Error::parse(
            line,
            format!("{what} '{field}' is not a positive integer"),
        )),
    }
}

/// Whitespace-separated `src dst [weight]` lines with 1-based vertices;
/// `#` starts a comment. The vertex count is the largest index seen, or the
/// value of a `# vertices N` line if present.
pub fn parse_edge_list(text: &str) -> Result<Operator> {
    let mut declared = None;
    let mut max_index = 0;
    let mut triplets: Vec<(usize, usize, C64)> = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let (body, comment) = match raw.split_once('#') {
            Some((b, c)) => (b, Some(c)),
            None => (raw, None),
        };
        if let Some(c) = comment {
            let words: Vec<&str> = c.split_whitespace().collect();
            if let ["vertices", n] = words.as_slice() {
                declared =
                    Some(n.parse::<usize>().map_err(|_| {
                        Error::parse(line, format!("vertex count '{n}' is invalid"))
                    })?);
            }
        }
        let fields: Vec<&str> = body.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        if !(2..=3).contains(&fields.len()) {
            return Err(Error::parse(
                line,
                format!("expected 'src dst [weight]', found {} fields", fields.len()),
            ));
        }
        let src = parse_index(fields[0], line, "source vertex")?;
        let dst = parse_index(fields[1], line, "target vertex")?;
        let w = match fields.get(2) {
            Some(f) => parse_f64(f, line, "weight")?,
            None => 1.0,
        };
        max_index = max_index.max(src).max(dst);
        triplets.push((src - 1, dst - 1, C64::new(w, 0.0)));
    }
    let n = match declared {
        Some(n) if n < max_index => {
            return Err(Error::parse(
                0,
                format!("declared {n} vertices but vertex {max_index} appears"),
            ))
        }
        Some(n) => n,
        None => max_index,
    };
    if n == 0 {
        return Err(Error::parse(0, "edge list contains no vertices"));
    }
    check_duplicates(&mut triplets)?;
    Ok(Operator::Sparse(CsrMatrix::from_triplets(n, n, triplets)))
}

fn check_duplicates(triplets: &mut [(usize, usize, C64)]) -> Result<()> {
    triplets.sort_by_key(|&(r, c, _)| (r, c));
    if let Some(w) = triplets
        .windows(2)
        .find(|w| (w[0].0, w[0].1) == (w[1].0, w[1].1))
    {
        return Err(Error::parse(
            0,
            format!(
                "entry ({}, {}) appears more than once",
                w[0].0 + 1,
                w[0].1 + 1
            ),
        ));
    }
    Ok(())
}

#[derive(Clone, Copy, PartialEq)]
enum Field {
    Real,
    Complex,
    Pattern,
}

#[derive(Clone, Copy, PartialEq)]
enum Symmetry {
    General,
    Symmetric,
    SkewSymmetric,
    Hermitian,
}

/// Matrix Market coordinate format with real, integer, complex or pattern
/// fields and general, symmetric, skew-symmetric or Hermitian symmetry.
pub fn parse_matrix_market(text: &str) -> Result<Operator> {
    let mut lines = text.lines().enumerate().map(|(k, l)| (k + 1, l));
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::parse(1, "empty Matrix Market file"))?;
    let words: Vec<String> = header.split_whitespace().map(str::to_lowercase).collect();
    if words.len() != 5 || words[0] != "%%matrixmarket" || words[1] != "matrix" {
        return Err(Error::parse(
            1,
            format!("invalid Matrix Market header '{header}'"),
        ));
    }
    if words[2] != "coordinate" {
        return Err(Error::parse(
            1,
            format!("unsupported format '{}'", words[2]),
        ));
    }
    let field = match words[3].as_str() {
        "real" | "integer" | "double" => Field::Real,
        "complex" => Field::Complex,
        "pattern" => Field::Pattern,
        other => return Err(Error::parse(1, format!("unsupported field '{other}'"))),
    };
    let symmetry = match words[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        "skew-symmetric" => Symmetry::SkewSymmetric,
        "hermitian" => Symmetry::Hermitian,
        other => return Err(Error::parse(1, format!("unsupported symmetry '{other}'"))),
    };

    let mut body = lines.filter(|(_, l)| {
        let t = l.trim();
        !t.is_empty() && !t.starts_with('%')
    });
    let (size_line, size) = body
        .next()
        .ok_or_else(|| Error::parse(1, "missing size line"))?;
    let dims: Vec<&str> = size.split_whitespace().collect();
    if dims.len() != 3 {
        return Err(Error::parse(
            size_line,
            "size line must be 'rows cols nonzeros'",
        ));
    }
    let parse_count = |f: &str| {
        f.parse::<usize>()
            .map_err(|_| Error::parse(size_line, format!("invalid count '{f}'")))
    };
    let (rows, cols, nnz) = (
        parse_count(dims[0])?,
        parse_count(dims[1])?,
        parse_count(dims[2])?,
    );
    if rows != cols || rows == 0 {
        return Err(Error::parse(
            size_line,
            format!("adjacency must be square and nonempty, got {rows}x{cols}"),
        ));
    }

    let expected_fields = match field {
        Field::Pattern => 2,
        Field::Real => 3,
        Field::Complex => 4,
    };
    let mut triplets = Vec::with_capacity(nnz);
    let mut count = 0;
    for (line, l) in body {
        count += 1;
        if count > nnz {
            return Err(Error::parse(
                line,
                format!("more than the declared {nnz} entries"),
            ));
        }
        let f: Vec<&str> = l.split_whitespace().collect();
        if f.len() != expected_fields {
            return Err(Error::parse(
                line,
                format!("expected {expected_fields} fields, found {}", f.len()),
            ));
        }
        let r = parse_index(f[0], line, "row index")?;
        let c = parse_index(f[1], line, "column index")?;
        if r > rows || c > cols {
            return Err(Error::parse(
                line,
                format!("entry ({r}, {c}) outside {rows}x{cols}"),
            ));
        }
        let v = match field {
            Field::Pattern => C64::new(1.0, 0.0),
            Field::Real => C64::new(parse_f64(f[2], line, "value")?, 0.0),
            Field::Complex => C64::new(
                parse_f64(f[2], line, "real part")?,
                parse_f64(f[3], line, "imaginary part")?,
            ),
        };
        let (r, c) = (r - 1, c - 1);
        if symmetry != Symmetry::General && c > r {
            return Err(Error::parse(
                line,
                "symmetric storage lists only the lower triangle",
            ));
        }
        triplets.push((r, c, v));
        if r != c {
            match symmetry {
                Symmetry::General => {}
                Symmetry::Symmetric => triplets.push((c, r, v)),
                Symmetry::SkewSymmetric => triplets.push((c, r, -v)),
                Symmetry::Hermitian => triplets.push((c, r, v.conj())),
            }
        }
    }
    if count != nnz {
        return Err(Error::parse(
            0,
            format!("header declares {nnz} entries but {count} are present"),
        ));
    }
    check_duplicates(&mut triplets)?;
    Ok(Operator::Sparse(CsrMatrix::from_triplets(
        rows, cols, triplets,
    )))
}

/// Edge-list text for a real matrix, one `src dst weight` line per entry
/// preceded by a `# vertices N` line.
pub fn write_edge_list(a: &Operator) -> Result<String> {
    let mut out = format!("# vertices {}\n", a.dim());
    for (r, c, v) in a.entries() {
        if v.im != 0.0 {
            return Err(Error::arg(format!(
                "entry ({}, {}) is complex; edge lists hold real weights",
                r + 1,
                c + 1
            )));
        }
        writeln!(out, "{} {} {:?}", r + 1, c + 1, v.re).expect("writing to a String");
    }
    Ok(out)
}

/// Matrix Market coordinate text, `real` when every entry is real and
/// `complex` otherwise.
pub fn write_matrix_market(a: &Operator) -> String {
    let entries = a.entries();
    let complex = entries.iter().any(|(_, _, v)| v.im != 0.0);
    let n = a.dim();
    let mut out = format!(
        "%%MatrixMarket matrix coordinate {} general\n{n} {n} {}\n",
        if complex { "complex" } else { "real" },
        entries.len()
    );
    for (r, c, v) in entries {
        if complex {
            writeln!(out, "{} {} {:?} {:?}", r + 1, c + 1, v.re, v.im)
        } else {
            writeln!(out, "{} {} {:?}", r + 1, c + 1, v.re)
        }
        .expect("writing to a String");
    }
    out
}
