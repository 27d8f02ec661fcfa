//! Cohomology of the Cartan complex: ranks by u-degree, stabilization, the u-module structure
//! and torsion.

use serde::Serialize;

use super::complex::CartanComplex;
use super::element::EquivariantElement;
use crate::error::{Error, Result};
use crate::linalg::{kernel_basis, kernel_ordered, Echelon, SparseMatrix, SubspaceBasis};
use crate::model::{CdgaModel, FormElement};
use crate::operators::equivariant_b_transform_model;
use crate::sparse::SparseVec;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassInfo {
    pub u_degree: usize,
    /// Cycle coordinates in the invariant basis of the class's parity.
    pub representative: SparseVec,
    /// `None` when stability was not computed.
    pub stable: Option<bool>,
}

#[derive(Clone, Debug)]
pub struct CohomologyResult {
    complex: CartanComplex,
    boundaries: [SubspaceBasis; 2],
    classes: [Vec<ClassInfo>; 2],
}

/// Cycles of a parity block and their boundaries.
fn cycles_and_boundaries(c: &CartanComplex, p: usize) -> (Vec<(usize, SparseVec)>, SubspaceBasis) {
    let d = c.differential(p);
    let mut order: Vec<usize> = (0..c.dim(p)).collect();
    order.sort_by_key(|&i| std::cmp::Reverse(c.u_degree(p, i)));
    let cycles = kernel_ordered(d, &order);
    let boundaries = SubspaceBasis::span(c.dim(p), c.differential(1 - p).columns());
    (cycles, boundaries)
}

pub fn cohomology(c: &CartanComplex) -> CohomologyResult {
    let mut classes: [Vec<ClassInfo>; 2] = [Vec::new(), Vec::new()];
    let mut boundaries = [SubspaceBasis::empty(0), SubspaceBasis::empty(0)];
    for p in 0..2 {
        let (cycles, bnd) = cycles_and_boundaries(c, p);
        let mut ech = Echelon::from_vectors(bnd.vectors());
        for m in (0..=c.truncation()).rev() {
            for (free, z) in &cycles {
                if c.u_degree(p, *free) == m && ech.insert(z) {
                    classes[p].push(ClassInfo { u_degree: m, representative: z.clone(), stable: None });
                }
            }
        }
        boundaries[p] = bnd;
    }
    for list in classes.iter_mut() {
        list.sort_by_key(|k| k.u_degree);
    }
    CohomologyResult { complex: c.clone(), boundaries, classes }
}

impl CohomologyResult {
    pub fn complex(&self) -> &CartanComplex {
        &self.complex
    }

    pub fn model(&self) -> &CdgaModel {
        self.complex.model()
    }

    pub fn truncation(&self) -> usize {
        self.complex.truncation()
    }

    pub fn classes(&self, parity: usize) -> &[ClassInfo] {
        &self.classes[parity]
    }

    pub fn boundaries(&self, parity: usize) -> &SubspaceBasis {
        &self.boundaries[parity]
    }

    pub fn rank(&self, parity: usize) -> usize {
        self.classes[parity].len()
    }

    /// Ranks indexed by u-degree `0..=N`.
    pub fn ranks_by_u_degree(&self, parity: usize) -> Vec<usize> {
        let mut out = vec![0; self.truncation() + 1];
        for k in &self.classes[parity] {
            out[k.u_degree] += 1;
        }
        out
    }

    pub fn stable_ranks_by_u_degree(&self, parity: usize) -> Vec<usize> {
        let mut out = vec![0; self.truncation() + 1];
        for k in &self.classes[parity] {
            if k.stable == Some(true) {
                out[k.u_degree] += 1;
            }
        }
        out
    }

    pub fn stable_rank(&self, parity: usize) -> usize {
        self.classes[parity].iter().filter(|k| k.stable == Some(true)).count()
    }

    pub fn stable_classes(&self, parity: usize) -> Vec<(usize, &ClassInfo)> {
        self.classes[parity].iter().enumerate().filter(|(_, k)| k.stable == Some(true)).collect()
    }

    pub fn representative(&self, parity: usize, class: usize) -> EquivariantElement {
        self.complex.element(parity, &self.classes[parity][class].representative)
    }

    pub fn is_cycle(&self, parity: usize, coords: &SparseVec) -> bool {
        self.complex.differential(parity).apply(coords).is_zero()
    }

    pub fn is_boundary(&self, parity: usize, coords: &SparseVec) -> bool {
        self.boundaries[parity].contains(coords)
    }

    /// Coordinates of the class of a cycle in terms of the class list; `None` for non-cycles.
    pub fn class_coordinates(&self, parity: usize, coords: &SparseVec) -> Option<SparseVec> {
        if !self.is_cycle(parity, coords) {
            return None;
        }
        let nb = self.boundaries[parity].dim();
        let mut ech = Echelon::from_vectors(self.boundaries[parity].vectors());
        for k in &self.classes[parity] {
            ech.insert(&k.representative);
        }
        let combo = ech.solve(coords)?;
        Some(combo.filter_map_indices(|t| t.checked_sub(nb)))
    }

    pub fn class_coordinates_of_element(&self, parity: usize, e: &EquivariantElement) -> Result<Option<SparseVec>> {
        let coords = self.complex.coordinates(parity, e)?;
        Ok(self.class_coordinates(parity, &coords))
    }
}

/// Cohomology at `N` restricted to classes in the image of truncation from `N + 1`.
pub fn stable_cohomology(model: &CdgaModel, n: usize) -> Result<CohomologyResult> {
    let low = CartanComplex::new(model, n)?;
    let high = CartanComplex::new(model, n + 1)?;
    let h_low = cohomology(&low);
    let h_high = cohomology(&high);
    stabilize(h_low, &h_high)
}

fn stabilize(mut low: CohomologyResult, high: &CohomologyResult) -> Result<CohomologyResult> {
    for p in 0..2 {
        let dim_low = low.complex.dim(p);
        // truncation keeps the prefix of basis vectors of u-degree ≤ N
        for i in 0..dim_low {
            if low.complex.basis(p)[i].ambient != high.complex.basis(p)[i].ambient {
                return Err(Error::Structural("truncation does not preserve the invariant basis".into()));
            }
        }
        let mut w_vectors = Vec::new();
        for k in &high.classes[p] {
            let truncated = k.representative.filter_map_indices(|i| (i < dim_low).then_some(i));
            let coords = low
                .class_coordinates(p, &truncated)
                .ok_or_else(|| Error::Structural("truncated class is not a cycle".into()))?;
            w_vectors.push(coords);
        }
        let r = low.classes[p].len();
        let w = SparseMatrix::from_columns(r, w_vectors);
        let old = std::mem::take(&mut low.classes[p]);
        let mut picked = Echelon::new();
        let mut adapted: Vec<ClassInfo> = Vec::new();
        let rep_of = |coords: &SparseVec| {
            let mut v = SparseVec::new();
            for (i, c) in coords.iter() {
                v.add_scaled(c, &old[i].representative);
            }
            v
        };
        for m in (0..=low.truncation()).rev() {
            // W ∩ V_m: combinations of W with zero coordinates on classes of u-degree < m
            let restricted = SparseMatrix::from_columns(
                r,
                w.columns().iter().map(|c| c.filter_map_indices(|i| (old[i].u_degree < m).then_some(i))).collect(),
            );
            for combo in kernel_basis(&restricted).vectors() {
                let v = w.apply(combo);
                if picked.insert(&v) {
                    adapted.push(ClassInfo { u_degree: m, representative: rep_of(&v), stable: Some(true) });
                }
            }
            for (i, k) in old.iter().enumerate() {
                if k.u_degree == m && picked.insert(&SparseVec::unit(i)) {
                    adapted.push(ClassInfo { u_degree: m, representative: k.representative.clone(), stable: Some(false) });
                }
            }
        }
        adapted.sort_by_key(|k| k.u_degree);
        low.classes[p] = adapted;
    }
    Ok(low)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuleAction {
    pub generator: usize,
    /// Per parity: column `i` holds the class coordinates of `u_j · [x_i]`.
    pub matrices: [SparseMatrix; 2],
    /// Per parity and class: terms of `u_j · x_i` were dropped by the truncation.
    pub edge: [Vec<bool>; 2],
}

/// Matrix of `[x] ↦ [u_j x]` on the classes of a result.
pub fn module_action(result: &CohomologyResult, j: usize) -> Result<ModuleAction> {
    let model = result.model();
    if j >= model.generator_count() {
        return Err(Error::UnknownGenerator(j));
    }
    let n = result.truncation();
    let mut matrices = [SparseMatrix::zeros(0, 0), SparseMatrix::zeros(0, 0)];
    let mut edge = [Vec::new(), Vec::new()];
    for p in 0..2 {
        let mut cols = Vec::new();
        for k in 0..result.rank(p) {
            let x = result.representative(p, k);
            let full = x.times_u(j);
            let kept = full.truncated(n);
            edge[p].push(kept != full);
            let coords = result
                .class_coordinates_of_element(p, &kept)?
                .ok_or_else(|| Error::Structural("u times a cycle is not a cycle".into()))?;
            cols.push(coords);
        }
        matrices[p] = SparseMatrix::from_columns(result.rank(p), cols);
    }
    Ok(ModuleAction { generator: j, matrices, edge })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TorsionOutcome {
    /// Smallest `k` with `u^k [x] = 0`.
    Torsion(usize),
    FreeUpToTruncation,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorsionEntry {
    pub parity: usize,
    pub class: usize,
    pub u_degree: usize,
    pub outcome: TorsionOutcome,
}

/// Smallest annihilating power of `u` for one cycle, valid while no term is pushed past `N`.
pub fn annihilator(result: &CohomologyResult, parity: usize, x: &EquivariantElement) -> Result<TorsionOutcome> {
    let n = result.truncation();
    let top = x.max_u_degree().unwrap_or(0);
    if x.is_zero() {
        return Ok(TorsionOutcome::Torsion(0));
    }
    let mut y = x.clone();
    for k in 1..=n {
        if top + k > n {
            break;
        }
        y = y.times_u(0);
        let coords = result.complex().coordinates(parity, &y)?;
        if result.is_boundary(parity, &coords) {
            return Ok(TorsionOutcome::Torsion(k));
        }
    }
    Ok(TorsionOutcome::FreeUpToTruncation)
}

/// Torsion analysis over the stable classes (all classes when stability was not computed).
pub fn torsion_analysis(result: &CohomologyResult) -> Result<Vec<TorsionEntry>> {
    let g = result.model().generator_count();
    if g != 1 {
        return Err(Error::MultiVariableUnsupported(g));
    }
    let mut out = Vec::new();
    for p in 0..2 {
        for (i, k) in result.classes(p).iter().enumerate() {
            if k.stable == Some(false) {
                continue;
            }
            let x = result.representative(p, i);
            out.push(TorsionEntry { parity: p, class: i, u_degree: k.u_degree, outcome: annihilator(result, p, &x)? });
        }
    }
    Ok(out)
}

/// Stable cohomology of the data transformed by `B + Σ u_j f_j`, checked against the original.
pub fn equivariant_b_transform(
    model: &CdgaModel,
    b: &FormElement,
    f: &[FormElement],
    n: usize,
) -> Result<CohomologyResult> {
    let transformed = equivariant_b_transform_model(model, b, f)?;
    let before = stable_cohomology(model, n)?;
    let after = stable_cohomology(&transformed, n)?;
    for p in 0..2 {
        if before.stable_ranks_by_u_degree(p) != after.stable_ranks_by_u_degree(p)
            || before.ranks_by_u_degree(p) != after.ranks_by_u_degree(p)
        {
            return Err(Error::NonInvariantData(format!(
                "ranks changed in parity {p}: {:?} vs {:?}",
                before.stable_ranks_by_u_degree(p),
                after.stable_ranks_by_u_degree(p)
            )));
        }
    }
    Ok(after)
}

/// Ranks and representatives of `d_H` on the whole model (no action involved).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwistedCohomology {
    pub ranks: [usize; 2],
    pub representatives: [Vec<FormElement>; 2],
}

pub fn twisted_cohomology(model: &CdgaModel, h: &FormElement) -> Result<TwistedCohomology> {
    let dh = model.operator_matrix(|a| crate::operators::twisted_differential(model, a, h))?;
    let idx: [Vec<usize>; 2] = [0, 1].map(|p| (0..model.dim()).filter(|&i| model.degree(i) % 2 == p).collect());
    let mut ranks = [0, 0];
    let mut representatives = [Vec::new(), Vec::new()];
    for p in 0..2 {
        let rows_other: Vec<usize> = idx[1 - p].clone();
        let restrict = |cols: &[usize], rows: &[usize]| {
            let pos = |i: usize| rows.iter().position(|&r| r == i);
            SparseMatrix::from_columns(
                rows.len(),
                cols.iter().map(|&c| dh.column(c).filter_map_indices(pos)).collect(),
            )
        };
        let d_out = restrict(&idx[p], &rows_other);
        let d_in = restrict(&idx[1 - p], &idx[p]);
        let cycles = kernel_basis(&d_out);
        let bnd = SubspaceBasis::span(idx[p].len(), d_in.columns());
        let reps = crate::linalg::quotient_basis(&cycles, &bnd)?;
        ranks[p] = reps.len();
        representatives[p] = reps.iter().map(|v| v.filter_map_indices(|i| Some(idx[p][i]))).collect();
    }
    Ok(TwistedCohomology { ranks, representatives })
}
