//! Nonmoralizing correction: each vertex is blown up into a subspace of
//! copies so that Lindblad operators built from a directed graph no longer
//! couple vertices that merely share a successor.
//!
//! Vertex `i` receives `d_i` copies, where `d_i` is the number of entries in
//! row `i` of the input matrix with modulus at least `epsilon` (at least one).

use std::collections::{BTreeMap, BTreeSet};
use std::ops::Index;

use ndarray::Array2;
use num_complex::Complex64 as C64;

use crate::analysis::MeasurementDistribution;
use crate::error::{Error, Result};
use crate::linalg::{dense, fourier_matrix, CsrMatrix, DensityState, Operator, Storage};

const ORTHOGONALITY_TOL: f64 = 1e-10;
const HERMITIAN_TOL: f64 = 1e-10;
const TRACE_TOL: f64 = 1e-10;
const PSD_FLOOR: f64 = -1e-10;

/// The subspace of the enlarged space that represents one original vertex,
/// given by its 1-based basis labels.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
pub struct Vertex {
    labels: Vec<usize>,
}

impl Vertex {
    /// Labels must be nonempty, 1-based, contiguous and increasing.
    pub fn new(labels: Vec<usize>) -> Result<Self> {
        let ok =
            !labels.is_empty() && labels[0] >= 1 && labels.windows(2).all(|w| w[1] == w[0] + 1);
        if !ok {
            return Err(Error::arg(format!(
                "vertex labels {labels:?} are not a nonempty contiguous 1-based range"
            )));
        }
        Ok(Vertex { labels })
    }

    fn range(first: usize, len: usize) -> Self {
        Vertex {
            labels: (first..first + len).collect(),
        }
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    /// Number of copies, the dimension of the vertex subspace.
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// 0-based offset of the first label.
    fn offset(&self) -> usize {
        self.labels[0] - 1
    }
}

/// Ordered partition of `{1, …, size}` into vertex subspaces; entry `i` is
/// original vertex `i + 1`.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct VertexSet {
    vertices: Vec<Vertex>,
}

impl VertexSet {
    /// Partition with consecutive blocks of the given sizes.
    pub fn from_sizes(sizes: &[usize]) -> Result<Self> {
        if let Some(k) = sizes.iter().position(|&d| d == 0) {
            return Err(Error::arg(format!("vertex {} has zero copies", k + 1)));
        }
        let mut next = 1;
        let vertices = sizes
            .iter()
            .map(|&d| {
                let v = Vertex::range(next, d);
                next += d;
                v
            })
            .collect();
        Ok(VertexSet { vertices })
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    /// Number of original vertices.
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Dimension of the enlarged space.
    pub fn size(&self) -> usize {
        self.vertices.iter().map(Vertex::len).sum()
    }

    fn position(&self, v: &Vertex) -> Option<usize> {
        let k = self
            .vertices
            .binary_search_by_key(&v.labels[0], |w| w.labels[0])
            .ok()?;
        (self.vertices[k] == *v).then_some(k)
    }
}

impl Index<usize> for VertexSet {
    type Output = Vertex;

    fn index(&self, i: usize) -> &Vertex {
        &self.vertices[i]
    }
}

/// Per-vertex block choices: the built-in default, a table keyed by the
/// relevant dimension(s), or a table keyed by the vertex (or vertex pair).
#[derive(Clone, Debug, Default)]
pub enum Blocks<D: Ord, V: Ord, M = Operator> {
    #[default]
    Default,
    ByDegree(BTreeMap<D, M>),
    ByVertex(BTreeMap<V, M>),
}

/// Blocks for single vertices, keyed by subspace dimension or by vertex.
pub type VertexBlocks = Blocks<usize, Vertex>;
/// Rectangular blocks for vertex pairs, keyed by `(d_i, d_j)` shape or by
/// `(v_i, v_j)`.
pub type PairBlocks = Blocks<(usize, usize), (Vertex, Vertex), Array2<C64>>;

fn check_square(a: &Operator) -> Result<()> {
    if a.dim() == 0 {
        return Err(Error::arg("matrix must have at least one vertex"));
    }
    Ok(())
}

/// Column indices of row `i` with `|a[i,j]| >= epsilon`, with their values,
/// sorted by column.
fn significant_rows(a: &Operator, epsilon: f64) -> Vec<Vec<(usize, C64)>> {
    let mut rows = vec![Vec::new(); a.dim()];
    for (r, c, v) in a.entries() {
        if v.norm() >= epsilon {
            rows[r].push((c, v));
        }
    }
    rows
}

pub fn make_vertex_set(a: &Operator, epsilon: f64) -> Result<VertexSet> {
    check_square(a)?;
    let sizes: Vec<usize> = significant_rows(a, epsilon)
        .iter()
        .map(|row| row.len().max(1))
        .collect();
    VertexSet::from_sizes(&sizes)
}

pub fn vertexsetsize(vs: &VertexSet) -> usize {
    vs.size()
}

fn lookup_vertex_block<'a>(
    blocks: &'a VertexBlocks,
    v: &Vertex,
    what: &str,
) -> Result<Option<&'a Operator>> {
    let found = match blocks {
        Blocks::Default => return Ok(None),
        Blocks::ByDegree(map) => map.get(&v.len()),
        Blocks::ByVertex(map) => map.get(v),
    };
    found.map(Some).ok_or_else(|| {
        Error::arg(format!(
            "no {what} supplied for vertex {:?} of dimension {}",
            v.labels,
            v.len()
        ))
    })
}

fn check_orthogonal_columns(m: &Operator, v: &Vertex) -> Result<()> {
    let gram = &m.adjoint() * m;
    let scale = gram.diagonal().iter().map(|z| z.norm()).fold(1.0, f64::max);
    for (r, c, z) in gram.entries() {
        if r != c && z.norm() > ORTHOGONALITY_TOL * scale {
            return Err(Error::arg(format!(
                "elementary matrix for vertex {:?} has non-orthogonal columns {} and {}",
                v.labels,
                r + 1,
                c + 1
            )));
        }
    }
    Ok(())
}

/// Builds the single corrected Lindblad operator on the enlarged space.
///
/// The block from vertex `j` into vertex `i` has every column equal to
/// `a[i,j]` times column `p` of the elementary matrix `A_i`, where `p` is the
/// rank of `j` among the significant columns of row `i`. The default `A_i`
/// is the `d_i`-dimensional Fourier matrix.
pub fn nm_lind(a: &Operator, linds: &VertexBlocks, epsilon: f64) -> Result<(Operator, VertexSet)> {
    let vs = make_vertex_set(a, epsilon)?;
    let rows = significant_rows(a, epsilon);
    let size = vs.size();
    let mut triplets = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        if row.is_empty() {
            continue;
        }
        let vi = &vs[i];
        let d = vi.len();
        let elementary = match lookup_vertex_block(linds, vi, "elementary matrix")? {
            Some(m) => {
                if m.dim() != d {
                    return Err(Error::arg(format!(
                        "elementary matrix for vertex {:?} has dimension {}, expected {d}",
                        vi.labels,
                        m.dim()
                    )));
                }
                check_orthogonal_columns(m, vi)?;
                m.to_dense()
            }
            None => fourier_matrix(d)?.to_dense(),
        };
        for (pos, &(j, weight)) in row.iter().enumerate() {
            let vj = &vs[j];
            for k in 0..d {
                let value = weight * elementary[[k, pos]];
                if value == C64::new(0.0, 0.0) {
                    continue;
                }
                for l in 0..vj.len() {
                    triplets.push((vi.offset() + k, vj.offset() + l, value));
                }
            }
        }
    }
    let l = Operator::Sparse(CsrMatrix::from_triplets(size, size, triplets));
    Ok((l, vs))
}

/// Global Hamiltonian on the enlarged space for a symmetric `a`. Each edge
/// `{i, j}` becomes the block `a[i,j]·B_ij` (default all-ones `d_i×d_j`) and
/// its adjoint; vertex-diagonal blocks are zero.
pub fn nm_glob_ham(a: &Operator, hams: &PairBlocks, epsilon: f64) -> Result<Operator> {
    check_square(a)?;
    nm_glob_ham_on(a, &make_vertex_set(a, epsilon)?, hams, epsilon)
}

/// As [`nm_glob_ham`] but on a given partition, such as the one produced by
/// [`nm_lind`] for a directed graph whose underlying undirected graph is `a`.
pub fn nm_glob_ham_on(
    a: &Operator,
    vs: &VertexSet,
    hams: &PairBlocks,
    epsilon: f64,
) -> Result<Operator> {
    check_square(a)?;
    if a.dim() != vs.len() {
        return Err(Error::arg(format!(
            "matrix has {} vertices but the vertex set has {}",
            a.dim(),
            vs.len()
        )));
    }
    let asym = a.max_abs_diff(&a.adjoint());
    if asym > HERMITIAN_TOL {
        return Err(Error::arg(format!(
            "global Hamiltonian requires a symmetric matrix (max asymmetry {asym:.3e})"
        )));
    }
    let size = vs.size();
    let mut triplets = Vec::new();
    for (i, row) in significant_rows(a, epsilon).iter().enumerate() {
        for &(j, weight) in row.iter().filter(|(j, _)| *j > i) {
            let (vi, vj) = (&vs[i], &vs[j]);
            let block = pair_block(hams, vi, vj)?;
            for r in 0..vi.len() {
                for c in 0..vj.len() {
                    let value = weight * block.as_ref().map_or(C64::new(1.0, 0.0), |b| b[[r, c]]);
                    if value != C64::new(0.0, 0.0) {
                        triplets.push((vi.offset() + r, vj.offset() + c, value));
                        triplets.push((vj.offset() + c, vi.offset() + r, value.conj()));
                    }
                }
            }
        }
    }
    Ok(Operator::Sparse(CsrMatrix::from_triplets(
        size, size, triplets,
    )))
}

/// The `d_i×d_j` block for the vertex pair, from the table or its reversed
/// key by adjoint; `None` means all ones.
fn pair_block(hams: &PairBlocks, vi: &Vertex, vj: &Vertex) -> Result<Option<Array2<C64>>> {
    let adjoint = |m: &Array2<C64>| m.t().mapv(|z| z.conj());
    let found = match hams {
        Blocks::Default => return Ok(None),
        Blocks::ByDegree(map) => map
            .get(&(vi.len(), vj.len()))
            .cloned()
            .or_else(|| map.get(&(vj.len(), vi.len())).map(adjoint)),
        Blocks::ByVertex(map) => map
            .get(&(vi.clone(), vj.clone()))
            .cloned()
            .or_else(|| map.get(&(vj.clone(), vi.clone())).map(adjoint)),
    };
    let block = found.ok_or_else(|| {
        Error::arg(format!(
            "no block supplied for vertex pair {:?}, {:?}",
            vi.labels, vj.labels
        ))
    })?;
    if block.dim() != (vi.len(), vj.len()) {
        return Err(Error::arg(format!(
            "block for vertex pair {:?}, {:?} has shape {:?}, expected ({}, {})",
            vi.labels,
            vj.labels,
            block.dim(),
            vi.len(),
            vj.len()
        )));
    }
    Ok(Some(block))
}

/// Tridiagonal block with `+i` above and `-i` below the diagonal.
pub fn default_nm_loc_ham(size: usize) -> Result<Operator> {
    if size == 0 {
        return Err(Error::arg("local Hamiltonian size must be positive"));
    }
    let triplets = (0..size - 1).flat_map(|k| {
        [
            (k, k + 1, C64::new(0.0, 1.0)),
            (k + 1, k, C64::new(0.0, -1.0)),
        ]
    });
    Ok(Operator::Sparse(CsrMatrix::from_triplets(
        size, size, triplets,
    )))
}

/// Block-diagonal local Hamiltonian over the partition.
pub fn nm_loc_ham(vs: &VertexSet, hams: &VertexBlocks) -> Result<Operator> {
    let size = vs.size();
    let mut triplets = Vec::new();
    for v in vs.vertices() {
        let block = match lookup_vertex_block(hams, v, "local Hamiltonian")? {
            Some(h) => {
                if h.dim() != v.len() {
                    return Err(Error::arg(format!(
                        "local Hamiltonian for vertex {:?} has dimension {}, expected {}",
                        v.labels,
                        h.dim(),
                        v.len()
                    )));
                }
                let err = h.hermiticity_error();
                if err > HERMITIAN_TOL {
                    return Err(Error::arg(format!(
                        "local Hamiltonian for vertex {:?} is not Hermitian ({err:.3e})",
                        v.labels
                    )));
                }
                h.clone()
            }
            None => default_nm_loc_ham(v.len())?,
        };
        triplets.extend(
            block
                .entries()
                .into_iter()
                .map(|(r, c, z)| (v.offset() + r, v.offset() + c, z)),
        );
    }
    Ok(Operator::Sparse(CsrMatrix::from_triplets(
        size, size, triplets,
    )))
}

/// Uniform initial state over the chosen vertices: vertex `v` receives the
/// block `I/(d_v·k)` for `k` chosen vertices.
pub fn nm_init(vertices: &[Vertex], vs: &VertexSet) -> Result<DensityState> {
    if vertices.is_empty() {
        return Err(Error::arg("at least one initial vertex is required"));
    }
    let mut seen = BTreeSet::new();
    let k = vertices.len() as f64;
    let mut triplets = Vec::new();
    for v in vertices {
        if vs.position(v).is_none() {
            return Err(Error::arg(format!(
                "vertex {:?} is not in the vertex set",
                v.labels
            )));
        }
        if !seen.insert(v) {
            return Err(Error::arg(format!("vertex {:?} listed twice", v.labels)));
        }
        let w = C64::new(1.0 / (v.len() as f64 * k), 0.0);
        triplets.extend((0..v.len()).map(|r| (v.offset() + r, v.offset() + r, w)));
    }
    let size = vs.size();
    let m = Operator::Sparse(CsrMatrix::from_triplets(size, size, triplets));
    Ok(DensityState::new_unchecked(m))
}

/// Initial state with the given blocks placed on their vertices.
pub fn nm_init_blocks(blocks: &BTreeMap<Vertex, Operator>, vs: &VertexSet) -> Result<DensityState> {
    let mut trace = C64::new(0.0, 0.0);
    let mut triplets = Vec::new();
    for (v, block) in blocks {
        if vs.position(v).is_none() {
            return Err(Error::arg(format!(
                "vertex {:?} is not in the vertex set",
                v.labels
            )));
        }
        if block.dim() != v.len() {
            return Err(Error::arg(format!(
                "block for vertex {:?} has dimension {}, expected {}",
                v.labels,
                block.dim(),
                v.len()
            )));
        }
        let err = block.hermiticity_error();
        if err > HERMITIAN_TOL {
            return Err(Error::arg(format!(
                "block for vertex {:?} is not Hermitian ({err:.3e})",
                v.labels
            )));
        }
        let min = dense::hermitian_eigenvalues(&block.to_dense())?
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        if min < PSD_FLOOR {
            return Err(Error::arg(format!(
                "block for vertex {:?} has negative eigenvalue {min:.3e}",
                v.labels
            )));
        }
        trace += block.trace();
        triplets.extend(
            block
                .entries()
                .into_iter()
                .map(|(r, c, z)| (v.offset() + r, v.offset() + c, z)),
        );
    }
    if (trace - 1.0).norm() > TRACE_TOL {
        return Err(Error::arg(format!(
            "block traces sum to {trace}, expected 1"
        )));
    }
    let size = vs.size();
    let storage = blocks
        .values()
        .fold(Storage::Sparse, |acc, b| acc.join(b.storage()));
    let m = Operator::Sparse(CsrMatrix::from_triplets(size, size, triplets)).into_storage(storage);
    Ok(DensityState::new_unchecked(m))
}

/// Vertex probabilities: diagonal entries summed over each vertex subspace.
pub fn nm_measurement(state: &DensityState, vs: &VertexSet) -> Result<MeasurementDistribution> {
    if state.dim() != vs.size() {
        return Err(Error::arg(format!(
            "state dimension {} does not match vertex set size {}",
            state.dim(),
            vs.size()
        )));
    }
    let diag: Vec<f64> = state.matrix().diagonal().iter().map(|z| z.re).collect();
    nm_measurement_probs(&diag, vs)
}

/// Sums a probability vector on the enlarged space over each vertex.
pub fn nm_measurement_probs(probs: &[f64], vs: &VertexSet) -> Result<MeasurementDistribution> {
    if probs.len() != vs.size() {
        return Err(Error::arg(format!(
            "probability vector length {} does not match vertex set size {}",
            probs.len(),
            vs.size()
        )));
    }
    let out = vs
        .vertices()
        .iter()
        .map(|v| probs[v.offset()..v.offset() + v.len()].iter().sum())
        .collect();
    Ok(MeasurementDistribution::new(out))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_parent() -> Operator {
        Operator::from_real_rows(&[&[0.0, 0.0, 0.0], &[0.0, 0.0, 0.0], &[1.0, 1.0, 0.0]]).unwrap()
    }

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn vertex_labels_validated() {
        assert!(Vertex::new(vec![]).is_err());
        assert!(Vertex::new(vec![0]).is_err());
        assert!(Vertex::new(vec![2, 4]).is_err());
        assert!(Vertex::new(vec![3, 4]).is_ok());
    }

    #[test]
    fn vertex_set_sizes() {
        let vs = make_vertex_set(&two_parent(), f64::EPSILON).unwrap();
        assert_eq!(
            vs.vertices(),
            &[
                Vertex::new(vec![1]).unwrap(),
                Vertex::new(vec![2]).unwrap(),
                Vertex::new(vec![3, 4]).unwrap()
            ]
        );
        assert_eq!(vertexsetsize(&vs), 4);

        let id = Operator::identity(3, Storage::Dense);
        assert_eq!(
            vertexsetsize(&make_vertex_set(&id, f64::EPSILON).unwrap()),
            3
        );

        let ones = Operator::from_real_rows(&[&[1.0; 3], &[1.0; 3], &[1.0; 3]]).unwrap();
        let vs = make_vertex_set(&ones, f64::EPSILON).unwrap();
        assert_eq!(vertexsetsize(&vs), 9);
        assert_eq!(vs[2].labels(), &[7, 8, 9]);

        let zero = Operator::zeros(2, Storage::Sparse);
        assert_eq!(
            vertexsetsize(&make_vertex_set(&zero, f64::EPSILON).unwrap()),
            2
        );
    }

    #[test]
    fn two_parent_lindblad_blocks_are_orthogonal() {
        let (l, vs) = nm_lind(&two_parent(), &Blocks::Default, f64::EPSILON).unwrap();
        assert_eq!(vs.size(), 4);
        let expected = Operator::from_real_rows(&[
            &[0.0, 0.0, 0.0, 0.0],
            &[0.0, 0.0, 0.0, 0.0],
            &[1.0, 1.0, 0.0, 0.0],
            &[1.0, -1.0, 0.0, 0.0],
        ])
        .unwrap();
        assert!(l.max_abs_diff(&expected) < 1e-15);
        let ll = &l.adjoint() * &l;
        assert_eq!(ll.get(0, 1), c(0.0, 0.0));
    }

    #[test]
    fn single_entry_rows_reproduce_input() {
        let a = Operator::from_real_rows(&[&[0.0, 2.0, 0.0], &[0.0, 0.0, 0.5], &[3.0, 0.0, 0.0]])
            .unwrap();
        let (l, vs) = nm_lind(&a, &Blocks::Default, f64::EPSILON).unwrap();
        assert_eq!(vs.size(), 3);
        assert!(l.max_abs_diff(&a) < 1e-15);
    }

    #[test]
    fn lindblad_dictionary_validation() {
        let mut bad_dim = BTreeMap::new();
        bad_dim.insert(2, Operator::identity(3, Storage::Dense));
        bad_dim.insert(1, Operator::identity(1, Storage::Dense));
        assert!(nm_lind(&two_parent(), &Blocks::ByDegree(bad_dim), f64::EPSILON).is_err());

        let mut non_orth = BTreeMap::new();
        non_orth.insert(
            2,
            Operator::from_real_rows(&[&[1.0, 1.0], &[0.0, 1.0]]).unwrap(),
        );
        assert!(nm_lind(&two_parent(), &Blocks::ByDegree(non_orth), f64::EPSILON).is_err());

        let mut missing = BTreeMap::new();
        missing.insert(1, Operator::identity(1, Storage::Dense));
        assert!(nm_lind(&two_parent(), &Blocks::ByDegree(missing), f64::EPSILON).is_err());

        let mut by_vertex = BTreeMap::new();
        by_vertex.insert(
            Vertex::new(vec![3, 4]).unwrap(),
            Operator::from_real_rows(&[&[1.0, 1.0], &[-1.0, 1.0]]).unwrap(),
        );
        let (l, _) = nm_lind(&two_parent(), &Blocks::ByVertex(by_vertex), f64::EPSILON).unwrap();
        assert_eq!(l.get(3, 0), c(-1.0, 0.0));
        assert_eq!(l.get(3, 1), c(1.0, 0.0));
    }

    #[test]
    fn glob_ham_on_short_paths() {
        let p2 = Operator::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        let h = nm_glob_ham(&p2, &Blocks::Default, f64::EPSILON).unwrap();
        assert!(h.max_abs_diff(&p2) < 1e-15);

        let p3 = Operator::from_real_rows(&[&[0.0, 1.0, 0.0], &[1.0, 0.0, 1.0], &[0.0, 1.0, 0.0]])
            .unwrap();
        let h = nm_glob_ham(&p3, &Blocks::Default, f64::EPSILON).unwrap();
        let expected = Operator::from_real_rows(&[
            &[0.0, 1.0, 1.0, 0.0],
            &[1.0, 0.0, 0.0, 1.0],
            &[1.0, 0.0, 0.0, 1.0],
            &[0.0, 1.0, 1.0, 0.0],
        ])
        .unwrap();
        assert!(h.max_abs_diff(&expected) < 1e-15);
        assert!(nm_glob_ham(&two_parent(), &Blocks::Default, f64::EPSILON).is_err());
    }

    #[test]
    fn glob_ham_on_directed_partition() {
        let (_, vs) = nm_lind(&two_parent(), &Blocks::Default, f64::EPSILON).unwrap();
        let und = Operator::from_real_rows(&[&[0.0, 0.0, 1.0], &[0.0, 0.0, 1.0], &[1.0, 1.0, 0.0]])
            .unwrap();
        let h = nm_glob_ham_on(&und, &vs, &Blocks::Default, f64::EPSILON).unwrap();
        assert_eq!(h.dim(), 4);
        assert_eq!(h.nnz(), 8);
        assert_eq!(h.get(0, 1), C64::new(0.0, 0.0));
        let small = VertexSet::from_sizes(&[1, 1]).unwrap();
        assert!(nm_glob_ham_on(&und, &small, &Blocks::Default, f64::EPSILON).is_err());
    }

    #[test]
    fn glob_ham_reversed_shape_key_uses_adjoint() {
        // Star centred on vertex 1: two copies there, one on each leaf.
        let star =
            Operator::from_real_rows(&[&[0.0, 1.0, 1.0], &[1.0, 0.0, 0.0], &[1.0, 0.0, 0.0]])
                .unwrap();
        let mut shapes = BTreeMap::new();
        shapes.insert((1, 2), ndarray::arr2(&[[c(0.0, 1.0), c(2.0, 0.0)]]));
        let h = nm_glob_ham(&star, &Blocks::ByDegree(shapes), f64::EPSILON).unwrap();
        assert_eq!(h.dim(), 4);
        assert_eq!(h.get(0, 2), c(0.0, -1.0));
        assert_eq!(h.get(1, 2), c(2.0, 0.0));
        assert_eq!(h.get(2, 0), c(0.0, 1.0));
        assert!(h.hermiticity_error() < 1e-15);

        let mut wrong = BTreeMap::new();
        wrong.insert((2, 1), Array2::zeros((1, 1)));
        assert!(nm_glob_ham(&star, &Blocks::ByDegree(wrong), f64::EPSILON).is_err());
    }

    #[test]
    fn local_hamiltonian_blocks() {
        assert_eq!(default_nm_loc_ham(1).unwrap().nnz(), 0);
        let h2 = default_nm_loc_ham(2).unwrap();
        assert_eq!(h2.get(0, 1), c(0.0, 1.0));
        assert_eq!(h2.get(1, 0), c(0.0, -1.0));
        assert!(default_nm_loc_ham(0).is_err());

        let vs = make_vertex_set(&two_parent(), f64::EPSILON).unwrap();
        let h = nm_loc_ham(&vs, &Blocks::Default).unwrap();
        assert_eq!(h.dim(), 4);
        assert_eq!(h.entries(), vec![(2, 3, c(0.0, 1.0)), (3, 2, c(0.0, -1.0))]);

        let mut bad = BTreeMap::new();
        bad.insert(1, Operator::zeros(1, Storage::Dense));
        bad.insert(
            2,
            Operator::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap(),
        );
        assert!(nm_loc_ham(&vs, &Blocks::ByDegree(bad)).is_err());
    }

    #[test]
    fn initial_states() {
        let vs = make_vertex_set(&two_parent(), f64::EPSILON).unwrap();
        let rho = nm_init(&[vs[2].clone()], &vs).unwrap();
        assert_eq!(
            rho.matrix().diagonal(),
            vec![c(0.0, 0.0), c(0.0, 0.0), c(0.5, 0.0), c(0.5, 0.0)]
        );

        let rho = nm_init(&[vs[0].clone()], &vs).unwrap();
        assert!(
            rho.matrix()
                .max_abs_diff(&crate::linalg::proj(1, 4).unwrap())
                < 1e-15
        );

        let rho = nm_init(&[vs[0].clone(), vs[1].clone()], &vs).unwrap();
        assert_eq!(
            rho.matrix().diagonal(),
            vec![c(0.5, 0.0), c(0.5, 0.0), c(0.0, 0.0), c(0.0, 0.0)]
        );

        assert!(nm_init(&[], &vs).is_err());
        assert!(nm_init(&[Vertex::new(vec![2, 3]).unwrap()], &vs).is_err());
        assert!(nm_init(&[vs[0].clone(), vs[0].clone()], &vs).is_err());
    }

    #[test]
    fn block_initial_states() {
        let vs = make_vertex_set(&two_parent(), f64::EPSILON).unwrap();
        let mut blocks = BTreeMap::new();
        blocks.insert(vs[0].clone(), Operator::from_real_rows(&[&[0.5]]).unwrap());
        blocks.insert(
            vs[2].clone(),
            Operator::from_real_rows(&[&[0.25, 0.25], &[0.25, 0.25]]).unwrap(),
        );
        let rho = nm_init_blocks(&blocks, &vs).unwrap();
        assert_eq!(rho.matrix().get(2, 3), c(0.25, 0.0));
        assert!((rho.trace() - 1.0).norm() < 1e-15);

        blocks.insert(vs[1].clone(), Operator::from_real_rows(&[&[0.1]]).unwrap());
        assert!(nm_init_blocks(&blocks, &vs).is_err());

        let mut negative = BTreeMap::new();
        negative.insert(
            vs[2].clone(),
            Operator::from_real_rows(&[&[0.5, 1.0], &[1.0, 0.5]]).unwrap(),
        );
        assert!(nm_init_blocks(&negative, &vs).is_err());

        let mut wrong = BTreeMap::new();
        wrong.insert(vs[2].clone(), Operator::from_real_rows(&[&[1.0]]).unwrap());
        assert!(nm_init_blocks(&wrong, &vs).is_err());
    }

    #[test]
    fn measurement_sums_vertex_blocks() {
        let vs = make_vertex_set(&two_parent(), f64::EPSILON).unwrap();
        let mixed =
            DensityState::new(Operator::identity(4, Storage::Dense).scale(c(0.25, 0.0))).unwrap();
        let p = nm_measurement(&mixed, &vs).unwrap();
        assert_eq!(p.probs(), &[0.25, 0.25, 0.5]);
        assert!(nm_measurement_probs(&[1.0, 0.0], &vs).is_err());
        let p = nm_measurement_probs(&[0.1, 0.2, 0.3, 0.4], &vs).unwrap();
        assert!((p.probs()[2] - 0.7).abs() < 1e-15);
    }
}
