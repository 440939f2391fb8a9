//! Dense symmetric eigendecomposition with deterministic tie handling, and
//! the mean-field change of basis in which every diagnostic is defined.

use std::ops::Range;

use faer::{Mat, Side};

use crate::basis::SectorBasis;
use crate::error::{Error, Result};
use crate::hamiltonian::{self, ModelSpec, SymMatrix};

/// Two eigenvalues closer than this (relative to max(1, |e|)) belong to one
/// degenerate multiplet; wide enough for exact symmetry-induced degeneracies,
/// far narrower than physical level spacings at desk scale.
const DEGENERACY_REL_TOL: f64 = 1e-9;

/// Components below this magnitude are ignored when picking the leading
/// entry that orders vectors inside a multiplet.
const SIGNIFICANT_COMPONENT: f64 = 1e-8;

pub fn degeneracy_tolerance(e: f64) -> f64 {
    DEGENERACY_REL_TOL * e.abs().max(1.0)
}

/// Eigenvalues ascending; eigenvector column alpha matches values[alpha].
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub values: Vec<f64>,
    pub vectors: Mat<f64>,
}

/// Index ranges of degenerate multiplets (including singletons), chained by
/// the successive-gap test.
pub fn degenerate_multiplets(values: &[f64]) -> Vec<Range<usize>> {
    let mut groups = Vec::new();
    let mut start = 0;
    for i in 1..=values.len() {
        let same = i < values.len()
            && (values[i] - values[i - 1]).abs() < degeneracy_tolerance(values[i - 1]);
        if !same {
            groups.push(start..i);
            start = i;
        }
    }
    groups
}

/// Full eigendecomposition of a real symmetric matrix.
///
/// Deterministic given deterministic backend output: eigenvalues ascending,
/// vectors inside a degenerate multiplet ordered by descending magnitude of
/// their first significant component, every vector's largest-magnitude
/// component made positive.
pub fn diagonalize(h: &SymMatrix) -> Result<Spectrum> {
    let n = h.order();
    if n == 0 {
        return Ok(Spectrum { values: Vec::new(), vectors: Mat::zeros(0, 0) });
    }
    if !h.is_finite() {
        return Err(Error::EigenFailure(format!(
            "matrix of order {n} contains non-finite entries"
        )));
    }
    let evd = h.as_mat().selfadjoint_eigendecomposition(Side::Lower);
    let diag = evd.s().column_vector();
    let u = evd.u();

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| diag[a].total_cmp(&diag[b]));
    let mut values: Vec<f64> = order.iter().map(|&k| diag[k]).collect();
    let mut vectors = Mat::<f64>::from_fn(n, n, |i, j| u[(i, order[j])]);

    for v in &values {
        if !v.is_finite() {
            return Err(Error::EigenFailure(format!(
                "eigensolver returned non-finite eigenvalues (order {n}, max |H| = {})",
                h.max_abs()
            )));
        }
    }

    canonicalize(&mut values, &mut vectors);
    Ok(Spectrum { values, vectors })
}

/// Eigenvalues only, ascending.
pub fn eigenvalues_only(h: &SymMatrix) -> Result<Vec<f64>> {
    let n = h.order();
    if n == 0 {
        return Ok(Vec::new());
    }
    if !h.is_finite() {
        return Err(Error::EigenFailure(format!(
            "matrix of order {n} contains non-finite entries"
        )));
    }
    let mut values: Vec<f64> = h.as_mat().selfadjoint_eigenvalues(Side::Lower);
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::EigenFailure(format!(
            "eigensolver returned non-finite eigenvalues (order {n}, max |H| = {})",
            h.max_abs()
        )));
    }
    values.sort_by(f64::total_cmp);
    Ok(values)
}

fn canonicalize(values: &mut [f64], vectors: &mut Mat<f64>) {
    let n = values.len();
    for group in degenerate_multiplets(values) {
        if group.len() < 2 {
            continue;
        }
        let mut keyed: Vec<(f64, usize)> = group
            .clone()
            .map(|j| {
                let mag = (0..n)
                    .map(|i| vectors[(i, j)].abs())
                    .find(|&m| m > SIGNIFICANT_COMPONENT)
                    .unwrap_or(0.0);
                (mag, j)
            })
            .collect();
        keyed.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
        let perm: Vec<usize> = keyed.iter().map(|&(_, j)| j).collect();
        if perm.iter().enumerate().all(|(k, &j)| j == group.start + k) {
            continue;
        }
        let vals: Vec<f64> = perm.iter().map(|&j| values[j]).collect();
        let cols: Vec<Vec<f64>> = perm
            .iter()
            .map(|&j| (0..n).map(|i| vectors[(i, j)]).collect())
            .collect();
        for (k, j) in group.clone().enumerate() {
            values[j] = vals[k];
            for i in 0..n {
                vectors[(i, j)] = cols[k][i];
            }
        }
    }
    for j in 0..n {
        let mut best = 0;
        for i in 1..n {
            if vectors[(i, j)].abs() > vectors[(best, j)].abs() {
                best = i;
            }
        }
        if vectors[(best, j)] < 0.0 {
            for i in 0..n {
                vectors[(i, j)] = -vectors[(i, j)];
            }
        }
    }
}

/// The total Hamiltonian rotated into the eigenbasis of its unperturbed
/// part, plus that basis's spectrum data: unperturbed energies epsilon
/// (ascending), rotated matrix H~, exact energies E, and the coefficients
/// C[(n, alpha)] = <n|alpha> expanding exact eigenstates over the
/// mean-field basis.
#[derive(Debug, Clone)]
pub struct MeanFieldRep {
    pub spec: ModelSpec,
    pub epsilon: Vec<f64>,
    pub h_tilde: SymMatrix,
    pub energies: Vec<f64>,
    pub coeff: Mat<f64>,
}

impl MeanFieldRep {
    pub fn dim(&self) -> usize {
        self.epsilon.len()
    }

    /// w_n^alpha = C[n][alpha]^2.
    pub fn weight(&self, n: usize, alpha: usize) -> f64 {
        let c = self.coeff[(n, alpha)];
        c * c
    }

    /// Weights of mean-field row n over all exact eigenstates.
    pub fn row_weights(&self, n: usize) -> Vec<f64> {
        (0..self.dim()).map(|alpha| self.weight(n, alpha)).collect()
    }

    /// Weights of exact eigenstate alpha over all mean-field rows.
    pub fn state_weights(&self, alpha: usize) -> Vec<f64> {
        (0..self.dim()).map(|n| self.weight(n, alpha)).collect()
    }
}

/// Builds the mean-field representation: diagonalize the unperturbed part,
/// rotate the total Hamiltonian into that basis, then diagonalize the
/// rotated matrix.
pub fn mean_field_representation(spec: &ModelSpec, basis: &SectorBasis) -> Result<MeanFieldRep> {
    let unpert = hamiltonian::unperturbed_operator(spec, basis)?;
    let total = hamiltonian::compose_model(spec, basis)?;
    let base = diagonalize(&unpert)?;
    representation_in_frame(spec, base.values, &base.vectors, &total)
}

/// Second half of `mean_field_representation`, split out so callers can
/// substitute a custom unperturbed eigenbasis (e.g. re-rotated degenerate
/// multiplets in stability checks).
pub fn representation_in_frame(
    spec: &ModelSpec,
    epsilon: Vec<f64>,
    u: &Mat<f64>,
    total: &SymMatrix,
) -> Result<MeanFieldRep> {
    if u.nrows() != total.order() || epsilon.len() != total.order() {
        return Err(Error::DimensionMismatch { expected: total.order(), got: u.nrows() });
    }
    let rotated = u.transpose() * total.as_mat() * u;
    let h_tilde = SymMatrix::new_symmetrized(rotated);
    let exact = diagonalize(&h_tilde)?;
    Ok(MeanFieldRep {
        spec: *spec,
        epsilon,
        h_tilde,
        energies: exact.values,
        coeff: exact.vectors,
    })
}

/// Unperturbed eigenbasis plus the unit-coupling perturbation rotated into
/// it. Supports coupling scans: H~(g) = diag(epsilon) + g * v_tilde, no
/// further diagonalization required.
#[derive(Debug, Clone)]
pub struct MeanFieldFrame {
    pub epsilon: Vec<f64>,
    pub u: Mat<f64>,
    pub v_tilde: SymMatrix,
}

pub fn mean_field_frame(spec: &ModelSpec, basis: &SectorBasis) -> Result<MeanFieldFrame> {
    let unpert = hamiltonian::unperturbed_operator(spec, basis)?;
    let v = hamiltonian::perturbation_operator(spec, basis)?;
    let base = diagonalize(&unpert)?;
    let rotated = base.vectors.transpose() * v.as_mat() * &base.vectors;
    Ok(MeanFieldFrame {
        epsilon: base.values,
        u: base.vectors,
        v_tilde: SymMatrix::new_symmetrized(rotated),
    })
}

impl MeanFieldFrame {
    /// Materializes H~(g) = diag(epsilon) + g * v_tilde.
    pub fn h_tilde_at(&self, g: f64) -> SymMatrix {
        let n = self.epsilon.len();
        let mut m = Mat::<f64>::zeros(n, n);
        for j in 0..n {
            for i in 0..n {
                m[(i, j)] = g * self.v_tilde.get(i, j);
            }
            m[(j, j)] += self.epsilon[j];
        }
        SymMatrix::new_symmetrized(m)
    }
}
