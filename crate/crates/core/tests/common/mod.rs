//! Dense elimination oracles, independent of the sparse machinery in the library.

#![allow(dead_code)]

use cartanext::model::CdgaModel;
use cartanext::morphisms::ShortExactSequence;
use cartanext::sparse::SparseVec;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub type Q = BigRational;
pub type Vector = Vec<Q>;

/// Row-reduces a copy of `rows` and returns the number of pivots.
pub fn rank(rows: &[Vector]) -> usize {
    let mut m: Vec<Vector> = rows.to_vec();
    let cols = m.first().map_or(0, |r| r.len());
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                let pivot = m[r].clone();
                for (x, y) in m[i].iter_mut().zip(&pivot) {
                    *x -= &f * y;
                }
            }
        }
        r += 1;
    }
    r
}

/// Basis of `{x : A x = 0}` where `a` lists the columns of `A` (each of length `rows`).
pub fn nullspace(columns: &[Vector], rows: usize) -> Vec<Vector> {
    let n = columns.len();
    let mut m: Vec<Vector> = (0..rows).map(|i| columns.iter().map(|c| c[i].clone()).collect()).collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..n {
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                let pivot = m[r].clone();
                for (x, y) in m[i].iter_mut().zip(&pivot) {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    let mut out = Vec::new();
    for free in (0..n).filter(|c| !pivots.contains(c)) {
        let mut v = vec![Q::zero(); n];
        v[free] = Q::one();
        for (row, &pc) in pivots.iter().enumerate() {
            v[pc] = -m[row][free].clone();
        }
        out.push(v);
    }
    out
}

/// Some `x` with `A x = b`, if one exists.
pub fn solve(columns: &[Vector], rows: usize, b: &Vector) -> Option<Vector> {
    let mut aug = columns.to_vec();
    aug.push(b.iter().map(|x| -x.clone()).collect());
    let ns = nullspace(&aug, rows);
    let last = columns.len();
    let v = ns.into_iter().find(|v| !v[last].is_zero())?;
    let s = v[last].recip();
    Some(v[..last].iter().map(|x| x * &s).collect())
}

pub fn apply(columns: &[Vector], rows: usize, x: &Vector) -> Vector {
    let mut out = vec![Q::zero(); rows];
    for (c, coef) in columns.iter().zip(x) {
        if coef.is_zero() {
            continue;
        }
        for (o, v) in out.iter_mut().zip(c) {
            *o += v * coef;
        }
    }
    out
}

pub fn dense(v: &SparseVec, len: usize) -> Vector {
    v.to_dense(len)
}

fn stack(a: &[Vector], b: &[Vector]) -> Vec<Vector> {
    a.iter().chain(b).cloned().collect()
}

/// Columns of a form-level operator, built by applying `op` to each basis element.
pub fn form_operator(m: &CdgaModel, op: impl Fn(&SparseVec) -> SparseVec) -> Vec<Vector> {
    (0..m.dim()).map(|i| dense(&op(&SparseVec::unit(i)), m.dim())).collect()
}

/// De Rham ranks of `d` on the model, by parity.
pub fn de_rham_ranks(m: &CdgaModel) -> [usize; 2] {
    let d = form_operator(m, |a| m.differential(a).unwrap());
    let parity = |p: usize| -> Vec<usize> { (0..m.dim()).filter(|&i| m.degree(i) % 2 == p).collect() };
    let mut out = [0; 2];
    for p in 0..2 {
        let cols: Vec<Vector> = parity(p).iter().map(|&i| d[i].clone()).collect();
        let kernel = nullspace(&cols, m.dim()).len();
        let incoming: Vec<Vector> = parity(1 - p).iter().map(|&i| d[i].clone()).collect();
        out[p] = kernel - rank(&incoming);
    }
    out
}

/// The truncated extended Cartan complex of a single-generator model, assembled densely on
/// forms ⊗ u^k with ambient index `k · dim + b`.
pub struct DenseComplex {
    pub dim: usize,
    pub n: usize,
    /// Invariant forms of each parity.
    pub invariant: [Vec<Vector>; 2],
    /// Columns of the differential on the ambient space.
    pub d: Vec<Vector>,
}

impl DenseComplex {
    pub fn new(m: &CdgaModel, n: usize) -> Self {
        assert_eq!(m.generator_count(), 1, "oracle handles one generator");
        let dim = m.dim();
        let d = form_operator(m, |a| m.differential(a).unwrap());
        let h = form_operator(m, |a| m.wedge(m.h(), a).unwrap());
        let iota = form_operator(m, |a| m.iota(0, a).unwrap());
        let xi = form_operator(m, |a| m.wedge(m.xi(0), a).unwrap());
        let defect = m.differential(m.xi(0)).unwrap().difference(&m.iota(0, m.h()).unwrap());
        let lt: Vec<Vector> = (0..dim)
            .map(|c| {
                let e = SparseVec::unit(c);
                let lie = m.iota(0, &m.differential(&e).unwrap()).unwrap().sum(&m.differential(&m.iota(0, &e).unwrap()).unwrap());
                dense(&lie.sum(&m.wedge(&defect, &e).unwrap()), dim)
            })
            .collect();
        let mut invariant = [Vec::new(), Vec::new()];
        for p in 0..2 {
            let idx: Vec<usize> = (0..dim).filter(|&i| m.degree(i) % 2 == p).collect();
            let cols: Vec<Vector> = idx.iter().map(|&i| lt[i].clone()).collect();
            for v in nullspace(&cols, dim) {
                let mut full = vec![Q::zero(); dim];
                for (k, &i) in idx.iter().enumerate() {
                    full[i] = v[k].clone();
                }
                invariant[p].push(full);
            }
        }
        let total = dim * (n + 1);
        let mut big = vec![vec![Q::zero(); total]; total];
        for k in 0..=n {
            for c in 0..dim {
                let col = &mut big[k * dim + c];
                for r in 0..dim {
                    col[k * dim + r] = &d[c][r] - &h[c][r];
                    if k < n {
                        col[(k + 1) * dim + r] = -(&iota[c][r] + &xi[c][r]);
                    }
                }
            }
        }
        DenseComplex { dim, n, invariant, d: big }
    }

    pub fn total(&self) -> usize {
        self.dim * (self.n + 1)
    }

    /// Invariant cochains of parity `p` with every term of u-degree at least `m`.
    pub fn cochains(&self, p: usize, m: usize) -> Vec<Vector> {
        let mut out = Vec::new();
        for k in m..=self.n {
            for v in &self.invariant[p] {
                let mut x = vec![Q::zero(); self.total()];
                x[k * self.dim..(k + 1) * self.dim].clone_from_slice(v);
                out.push(x);
            }
        }
        out
    }

    pub fn cycles(&self, p: usize, m: usize) -> Vec<Vector> {
        let basis = self.cochains(p, m);
        let images: Vec<Vector> = basis.iter().map(|x| apply(&self.d, self.total(), x)).collect();
        nullspace(&images, self.total()).iter().map(|c| apply(&basis, self.total(), c)).collect()
    }

    pub fn boundaries(&self, p: usize) -> Vec<Vector> {
        self.cochains(1 - p, 0).iter().map(|x| apply(&self.d, self.total(), x)).collect()
    }

    /// `d² = 0` on invariant cochains.
    pub fn squares_to_zero(&self) -> bool {
        (0..2).all(|p| {
            self.cochains(p, 0).iter().all(|x| {
                let y = apply(&self.d, self.total(), &apply(&self.d, self.total(), x));
                y.iter().all(|q| q.is_zero())
            })
        })
    }
}

/// Class counts per parity and u-degree, from the filtration by lowest u-degree.
pub fn ranks_by_u_degree(m: &CdgaModel, n: usize) -> [Vec<usize>; 2] {
    let c = DenseComplex::new(m, n);
    let mut out = [vec![0; n + 1], vec![0; n + 1]];
    for p in 0..2 {
        let b = c.boundaries(p);
        let rb = rank(&b);
        let level: Vec<usize> = (0..=n + 1)
            .map(|lvl| if lvl > n { 0 } else { rank(&stack(&c.cycles(p, lvl), &b)) - rb })
            .collect();
        for deg in 0..=n {
            out[p][deg] = level[deg] - level[deg + 1];
        }
    }
    out
}

/// Counts of classes at truncation `n` that lift to truncation `n + 1`, per parity and u-degree.
pub fn stable_ranks_by_u_degree(m: &CdgaModel, n: usize) -> [Vec<usize>; 2] {
    let low = DenseComplex::new(m, n);
    let high = DenseComplex::new(m, n + 1);
    let mut out = [vec![0; n + 1], vec![0; n + 1]];
    for p in 0..2 {
        let b = low.boundaries(p);
        let rb = rank(&b);
        let lifted: Vec<Vector> = high.cycles(p, 0).into_iter().map(|z| z[..low.total()].to_vec()).collect();
        let a = stack(&lifted, &b);
        let ra = rank(&a);
        let level: Vec<usize> = (0..=n + 1)
            .map(|lvl| {
                if lvl > n {
                    return 0;
                }
                let c = stack(&low.cycles(p, lvl), &b);
                ra + rank(&c) - rank(&stack(&a, &c)) - rb
            })
            .collect();
        for deg in 0..=n {
            out[p][deg] = level[deg] - level[deg + 1];
        }
    }
    out
}

fn columns_of(m: &cartanext::linalg::SparseMatrix) -> Vec<Vector> {
    (0..m.cols()).map(|j| dense(m.column(j), m.rows())).collect()
}

/// Ranks of the connecting maps `H^p(C) → H^{1−p}(A)` by an explicit zig-zag on dense matrices.
pub fn connecting_ranks(s: &ShortExactSequence) -> [usize; 2] {
    let mut out = [0; 2];
    for p in 0..2 {
        let dc = columns_of(&s.c.d[p]);
        let dc_in = columns_of(&s.c.d[1 - p]);
        let (nc, na) = (s.c.dim(p), s.a.dim(1 - p));
        let cycles = nullspace(&dc, s.c.dim(1 - p));
        // representatives of H^p(C): cycles independent modulo boundaries
        let mut basis: Vec<Vector> = dc_in.clone();
        let mut reps = Vec::new();
        for z in cycles {
            let trial = stack(&basis, std::slice::from_ref(&z));
            if rank(&trial) > rank(&basis) {
                basis = trial;
                reps.push(z);
            }
        }
        let g = columns_of(&s.g[p]);
        let db = columns_of(&s.b.d[p]);
        let f = columns_of(&s.f[1 - p]);
        let mut images = Vec::new();
        for z in reps {
            let lift = solve(&g, nc, &z).expect("g is onto");
            let d_lift = apply(&db, s.b.dim(1 - p), &lift);
            images.push(solve(&f, s.b.dim(1 - p), &d_lift).expect("d(lift) comes from A"));
        }
        let boundaries_a: Vec<Vector> = columns_of(&s.a.d[p]);
        let _ = na;
        out[p] = rank(&stack(&images, &boundaries_a)) - rank(&boundaries_a);
    }
    out
}
