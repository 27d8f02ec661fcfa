//! Z/2-graded chain complexes, short exact sequences, their long exact sequences and cones.

use crate::equivariant::CartanComplex;
use crate::error::{Error, Result};
use crate::linalg::{kernel_basis, rank, solve_in_image, Echelon, ImageMembership, SparseMatrix, SubspaceBasis};
use crate::scalar::int;
use crate::sparse::SparseVec;

use super::morphism::ExtendedMorphism;

/// `d[p]` maps the parity-`p` space to the parity-`(1 − p)` space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainComplex {
    pub name: String,
    pub d: [SparseMatrix; 2],
}

impl ChainComplex {
    pub fn new(name: &str, d: [SparseMatrix; 2]) -> Result<Self> {
        let c = Self { name: name.into(), d };
        for p in 0..2 {
            if c.d[p].rows() != c.d[1 - p].cols() {
                return Err(Error::Structural(format!("{name}: differential dimensions disagree")));
            }
        }
        for p in 0..2 {
            if !c.d[1 - p].compose(&c.d[p]).is_zero() {
                return Err(Error::DSquaredNonzero(format!("{name}, parity {p}")));
            }
        }
        Ok(c)
    }

    pub fn from_cartan(c: &CartanComplex) -> Self {
        Self { name: c.model().name().to_string(), d: [c.differential(0).clone(), c.differential(1).clone()] }
    }

    pub fn zero(name: &str) -> Self {
        Self { name: name.into(), d: [SparseMatrix::zeros(0, 0), SparseMatrix::zeros(0, 0)] }
    }

    pub fn dim(&self, p: usize) -> usize {
        self.d[p].cols()
    }

    /// Parity shift with negated differential.
    pub fn shifted(&self) -> Self {
        Self {
            name: format!("{}[-1]", self.name),
            d: [self.d[1].scaled(&int(-1)), self.d[0].scaled(&int(-1))],
        }
    }
}

/// Class representatives and boundaries of a complex.
#[derive(Clone, Debug)]
pub struct Homology {
    pub representatives: [Vec<SparseVec>; 2],
    pub boundaries: [SubspaceBasis; 2],
}

impl Homology {
    pub fn of(c: &ChainComplex) -> Result<Self> {
        let mut representatives = [Vec::new(), Vec::new()];
        let mut boundaries = [SubspaceBasis::empty(0), SubspaceBasis::empty(0)];
        for p in 0..2 {
            let cycles = kernel_basis(&c.d[p]);
            let bnd = SubspaceBasis::span(c.dim(p), c.d[1 - p].columns());
            representatives[p] = crate::linalg::quotient_basis(&cycles, &bnd)?;
            boundaries[p] = bnd;
        }
        Ok(Self { representatives, boundaries })
    }

    pub fn rank(&self, p: usize) -> usize {
        self.representatives[p].len()
    }

    /// Class coordinates of a cycle.
    pub fn coordinates(&self, p: usize, z: &SparseVec) -> Option<SparseVec> {
        let nb = self.boundaries[p].dim();
        let mut ech = Echelon::from_vectors(self.boundaries[p].vectors());
        for r in &self.representatives[p] {
            ech.insert(r);
        }
        ech.solve(z).map(|c| c.filter_map_indices(|t| t.checked_sub(nb)))
    }
}

pub fn is_chain_map(from: &ChainComplex, to: &ChainComplex, f: &[SparseMatrix; 2]) -> bool {
    (0..2).all(|p| {
        f[p].rows() == to.dim(p)
            && f[p].cols() == from.dim(p)
            && to.d[p].compose(&f[p]) == f[1 - p].compose(&from.d[p])
    })
}

#[derive(Clone, Debug)]
pub struct ShortExactSequence {
    pub a: ChainComplex,
    pub b: ChainComplex,
    pub c: ChainComplex,
    pub f: [SparseMatrix; 2],
    pub g: [SparseMatrix; 2],
}

impl ShortExactSequence {
    /// Validates `0 → A → B → C → 0` exactly at the chain level.
    pub fn new(a: ChainComplex, b: ChainComplex, c: ChainComplex, f: [SparseMatrix; 2], g: [SparseMatrix; 2]) -> Result<Self> {
        if !is_chain_map(&a, &b, &f) {
            return Err(Error::NotExact("A → B is not a chain map".into()));
        }
        if !is_chain_map(&b, &c, &g) {
            return Err(Error::NotExact("B → C is not a chain map".into()));
        }
        for p in 0..2 {
            if !g[p].compose(&f[p]).is_zero() {
                return Err(Error::NotExact(format!("composite is nonzero in parity {p}")));
            }
            let rf = rank(&f[p]);
            if rf != a.dim(p) {
                return Err(Error::NotExact(format!("A → B is not injective in parity {p}")));
            }
            let rg = rank(&g[p]);
            if rg != c.dim(p) {
                return Err(Error::NotExact(format!("B → C is not surjective in parity {p}")));
            }
            if rf + rg != b.dim(p) {
                return Err(Error::NotExact(format!("not exact at B in parity {p}")));
            }
        }
        Ok(Self { a, b, c, f, g })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LesMap {
    pub label: String,
    /// In class coordinates.
    pub matrix: SparseMatrix,
    pub rank: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LongExactReport {
    /// `ranks[i][p]` for `i` in A, B, C.
    pub ranks: [[usize; 2]; 3],
    /// Six maps around the hexagon: `f_0, g_0, δ_0, f_1, g_1, δ_1`.
    pub maps: Vec<LesMap>,
    /// Exactness at the six nodes `H0(B), H0(C), H1(A), H1(B), H1(C), H0(A)`.
    pub exact: Vec<bool>,
}

impl LongExactReport {
    pub fn is_exact(&self) -> bool {
        self.exact.iter().all(|e| *e)
    }

    pub fn connecting_ranks(&self) -> [usize; 2] {
        [self.maps[2].rank, self.maps[5].rank]
    }
}

fn induced(h_from: &Homology, h_to: &Homology, f: &SparseMatrix, p: usize) -> Result<SparseMatrix> {
    let cols = h_from.representatives[p]
        .iter()
        .map(|z| {
            h_to.coordinates(p, &f.apply(z)).ok_or_else(|| Error::NotExact("induced map sends a cycle to a non-cycle".into()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SparseMatrix::from_columns(h_to.rank(p), cols))
}

/// Connecting map `H^p(C) → H^{1−p}(A)` by the zig-zag: lift, differentiate, pull back.
fn connecting(s: &ShortExactSequence, ha: &Homology, hc: &Homology, p: usize) -> Result<SparseMatrix> {
    let mut cols = Vec::new();
    for z in &hc.representatives[p] {
        let lift = match solve_in_image(&s.g[p], z) {
            ImageMembership::Preimage(x) => x,
            ImageMembership::NotInImage(_) => return Err(Error::NotExact("cannot lift through B → C".into())),
        };
        let db = s.b.d[p].apply(&lift);
        let a = match solve_in_image(&s.f[1 - p], &db) {
            ImageMembership::Preimage(x) => x,
            ImageMembership::NotInImage(_) => return Err(Error::NotExact("d(lift) is not in the image of A".into())),
        };
        cols.push(ha.coordinates(1 - p, &a).ok_or_else(|| Error::NotExact("connecting image is not a cycle".into()))?);
    }
    Ok(SparseMatrix::from_columns(ha.rank(1 - p), cols))
}

pub fn long_exact_sequence(s: &ShortExactSequence) -> Result<LongExactReport> {
    let ha = Homology::of(&s.a)?;
    let hb = Homology::of(&s.b)?;
    let hc = Homology::of(&s.c)?;
    let mut maps = Vec::new();
    for p in 0..2 {
        let f = induced(&ha, &hb, &s.f[p], p)?;
        let g = induced(&hb, &hc, &s.g[p], p)?;
        let d = connecting(s, &ha, &hc, p)?;
        for (label, m) in [(format!("f_{p}"), f), (format!("g_{p}"), g), (format!("δ_{p}"), d)] {
            let r = rank(&m);
            maps.push(LesMap { label, matrix: m, rank: r });
        }
    }
    // node k sits between maps[k] (incoming) and maps[k+1] (outgoing)
    let dims = [hb.rank(0), hc.rank(0), ha.rank(1), hb.rank(1), hc.rank(1), ha.rank(0)];
    let mut exact = Vec::new();
    for k in 0..6 {
        let incoming = &maps[k];
        let outgoing = &maps[(k + 1) % 6];
        let composite_zero = outgoing.matrix.compose(&incoming.matrix).is_zero();
        exact.push(composite_zero && incoming.rank + outgoing.rank == dims[k]);
    }
    Ok(LongExactReport {
        ranks: [[ha.rank(0), ha.rank(1)], [hb.rank(0), hb.rank(1)], [hc.rank(0), hc.rank(1)]],
        maps,
        exact,
    })
}

/// Cone of a chain map `φ: M → F`: parity `p` is `M_p ⊕ F_{1−p}` with `d(ω, θ) = (dω, φω − dθ)`.
pub fn cone(m: &ChainComplex, f: &ChainComplex, phi: &[SparseMatrix; 2]) -> Result<ChainComplex> {
    if !is_chain_map(m, f, phi) {
        return Err(Error::NotExact("cone input is not a chain map".into()));
    }
    let mut d = [SparseMatrix::zeros(0, 0), SparseMatrix::zeros(0, 0)];
    for p in 0..2 {
        let (mp, fq) = (m.dim(p), f.dim(1 - p));
        let (mq, fp) = (m.dim(1 - p), f.dim(p));
        let mut cols = Vec::new();
        for i in 0..mp {
            let e = SparseVec::unit(i);
            let top = m.d[p].apply(&e);
            let bottom = phi[p].apply(&e);
            cols.push(top.sum(&bottom.filter_map_indices(|k| Some(mq + k))));
        }
        for i in 0..fq {
            let bottom = f.d[1 - p].apply(&SparseVec::unit(i)).negated();
            cols.push(bottom.filter_map_indices(|k| Some(mq + k)));
        }
        d[p] = SparseMatrix::from_columns(mq + fp, cols);
    }
    ChainComplex::new(&format!("cone({} → {})", m.name, f.name), d)
}

/// `0 → F[−1] → cone → M → 0`
pub fn cone_sequence(m: &ChainComplex, f: &ChainComplex, phi: &[SparseMatrix; 2]) -> Result<ShortExactSequence> {
    let c = cone(m, f, phi)?;
    let shifted = f.shifted();
    let mut inc = [SparseMatrix::zeros(0, 0), SparseMatrix::zeros(0, 0)];
    let mut proj = [SparseMatrix::zeros(0, 0), SparseMatrix::zeros(0, 0)];
    for p in 0..2 {
        let mp = m.dim(p);
        let fq = f.dim(1 - p);
        inc[p] = SparseMatrix::from_columns(mp + fq, (0..fq).map(|i| SparseVec::unit(mp + i)).collect());
        let cols = (0..mp)
            .map(SparseVec::unit)
            .chain((0..fq).map(|_| SparseVec::new()))
            .collect();
        proj[p] = SparseMatrix::from_columns(mp, cols);
    }
    ShortExactSequence::new(shifted, c, m.clone(), inc, proj)
}

#[derive(Clone, Debug)]
pub struct PairReport {
    pub relative_ranks: [usize; 2],
    pub cone: ChainComplex,
    pub sequence: LongExactReport,
}

/// Relative complex of an equivariant morphism `i: F → M` at truncation `n`, with the long exact
/// sequence of the pair.
pub fn pair_complex(i: &ExtendedMorphism, n: usize) -> Result<PairReport> {
    let report = super::morphism::equivariance_check(i)?;
    if let Some(w) = report.witness {
        return Err(Error::NotEquivariant(w));
    }
    let cm = CartanComplex::new(i.target(), n)?;
    let cf = CartanComplex::new(i.source(), n)?;
    let phi = [i.cartan_matrix(&cm, &cf, 0)?, i.cartan_matrix(&cm, &cf, 1)?];
    let m = ChainComplex::from_cartan(&cm);
    let f = ChainComplex::from_cartan(&cf);
    let seq = cone_sequence(&m, &f, &phi)?;
    let les = long_exact_sequence(&seq)?;
    let relative_ranks = les.ranks[1];
    Ok(PairReport { relative_ranks, cone: seq.b.clone(), sequence: les })
}

/// Simplicial cochains of a cycle graph: parity 0 holds vertex cochains, parity 1 edge cochains.
/// `vertices` lists the vertices; `edges` are pairs of positions in that list.
fn graph_cochains(name: &str, vertices: usize, edges: &[(usize, usize)]) -> ChainComplex {
    let mut cols = Vec::new();
    for v in 0..vertices {
        let mut col = SparseVec::new();
        for (e, &(a, b)) in edges.iter().enumerate() {
            if b == v {
                col.add_at(e, &int(1));
            }
            if a == v {
                col.add_at(e, &int(-1));
            }
        }
        cols.push(col);
    }
    ChainComplex {
        name: name.into(),
        d: [SparseMatrix::from_columns(edges.len(), cols), SparseMatrix::zeros(vertices, edges.len())],
    }
}

fn restriction(from_vertices: &[usize], from_edges: &[(usize, usize)], to_vertices: &[usize], to_edges: &[(usize, usize)]) -> [SparseMatrix; 2] {
    let vmap = SparseMatrix::from_columns(
        to_vertices.len(),
        from_vertices
            .iter()
            .map(|v| to_vertices.iter().position(|w| w == v).map(SparseVec::unit).unwrap_or_default())
            .collect(),
    );
    let emap = SparseMatrix::from_columns(
        to_edges.len(),
        from_edges
            .iter()
            .map(|e| to_edges.iter().position(|w| w == e).map(SparseVec::unit).unwrap_or_default())
            .collect(),
    );
    [vmap, emap]
}

/// Mayer-Vietoris sequence `0 → C(X) → C(U) ⊕ C(V) → C(U ∩ V) → 0` for a hexagon covered by two
/// overlapping arcs meeting in two vertices.
pub fn cech_circle_sequence() -> Result<ShortExactSequence> {
    let x_vertices: Vec<usize> = (0..6).collect();
    let x_edges: Vec<(usize, usize)> = (0..6).map(|i| (i, (i + 1) % 6)).collect();
    let u_vertices = vec![0, 1, 2, 3];
    let u_edges = vec![(0, 1), (1, 2), (2, 3)];
    let v_vertices = vec![3, 4, 5, 0];
    let v_edges = vec![(3, 4), (4, 5), (5, 0)];
    let w_vertices = vec![0, 3];
    let w_edges: Vec<(usize, usize)> = Vec::new();
    let local = |vs: &[usize], es: &[(usize, usize)]| -> Vec<(usize, usize)> {
        es.iter()
            .map(|(a, b)| (vs.iter().position(|v| v == a).unwrap(), vs.iter().position(|v| v == b).unwrap()))
            .collect()
    };
    let x = graph_cochains("X", 6, &local(&x_vertices, &x_edges));
    let u = graph_cochains("U", 4, &local(&u_vertices, &u_edges));
    let v = graph_cochains("V", 4, &local(&v_vertices, &v_edges));
    let w = graph_cochains("U∩V", 2, &local(&w_vertices, &w_edges));
    // U ⊕ V as a direct sum
    let stack = |a: &SparseMatrix, b: &SparseMatrix| {
        let rows = a.rows() + b.rows();
        let mut cols: Vec<SparseVec> = a.columns().to_vec();
        cols.extend(b.columns().iter().map(|c| c.filter_map_indices(|i| Some(a.rows() + i))));
        SparseMatrix::from_columns(rows, cols)
    };
    let uv = ChainComplex { name: "U⊕V".into(), d: [stack(&u.d[0], &v.d[0]), stack(&u.d[1], &v.d[1])] };
    let to_u = restriction(&x_vertices, &x_edges, &u_vertices, &u_edges);
    let to_v = restriction(&x_vertices, &x_edges, &v_vertices, &v_edges);
    let f: [SparseMatrix; 2] = [0, 1].map(|p| {
        let rows = to_u[p].rows() + to_v[p].rows();
        let cols = (0..to_u[p].cols())
            .map(|i| to_u[p].column(i).sum(&to_v[p].column(i).filter_map_indices(|k| Some(to_u[p].rows() + k))))
            .collect();
        SparseMatrix::from_columns(rows, cols)
    });
    let u_to_w = restriction(&u_vertices, &u_edges, &w_vertices, &w_edges);
    let v_to_w = restriction(&v_vertices, &v_edges, &w_vertices, &w_edges);
    let g: [SparseMatrix; 2] = [0, 1].map(|p| {
        let mut cols: Vec<SparseVec> = u_to_w[p].columns().to_vec();
        cols.extend(v_to_w[p].columns().iter().map(|c| c.negated()));
        SparseMatrix::from_columns(u_to_w[p].rows(), cols)
    });
    ShortExactSequence::new(x, uv, w, f, g)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cech_sequence_is_exact() {
        let s = cech_circle_sequence().unwrap();
        let les = long_exact_sequence(&s).unwrap();
        assert!(les.is_exact());
        assert_eq!(les.ranks, [[1, 1], [2, 0], [2, 0]]);
        assert_eq!(les.connecting_ranks(), [1, 0]);
    }

    #[test]
    fn zero_third_term() {
        let s = cech_circle_sequence().unwrap();
        let id = [SparseMatrix::identity(s.a.dim(0)), SparseMatrix::identity(s.a.dim(1))];
        let z = ChainComplex::zero("0");
        let g = [SparseMatrix::zeros(0, s.a.dim(0)), SparseMatrix::zeros(0, s.a.dim(1))];
        let seq = ShortExactSequence::new(s.a.clone(), s.a.clone(), z, id, g).unwrap();
        let les = long_exact_sequence(&seq).unwrap();
        assert!(les.is_exact());
        assert_eq!(les.connecting_ranks(), [0, 0]);
        assert_eq!(les.maps[0].rank, les.ranks[0][0]);
    }
}
