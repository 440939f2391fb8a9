//! Dense symmetric assembly of the chain Hamiltonians in a parity-adapted
//! sector basis.
//!
//! Both models are sums of two-site terms on bonds (i, i+r):
//!   hopping: (Sx Sx + Sy Sy), off-diagonal 1/2 between configurations that
//!            differ by exchanging two anti-aligned spins on the bond;
//!   Ising:   Sz Sz, diagonal +1/4 (aligned) or -1/4 (anti-aligned).
//! Model 1 couples nearest neighbors: hopping + mu * Ising. Model 2 adds
//! next-nearest bonds scaled by lambda, with the same mu anisotropy inside.

use std::io::Write;

use faer::Mat;

use crate::basis::{Parity, SectorBasis};
use crate::error::{Error, Result};

const SQRT_2: f64 = std::f64::consts::SQRT_2;

/// Dense real symmetric matrix. `mat[(i, j)] == mat[(j, i)]` holds exactly:
/// assembly fills the upper triangle once and mirrors it.
#[derive(Debug, Clone)]
pub struct SymMatrix {
    mat: Mat<f64>,
}

impl SymMatrix {
    /// Wraps a matrix that is symmetric by construction.
    pub(crate) fn from_exact(mat: Mat<f64>) -> Self {
        debug_assert_eq!(mat.nrows(), mat.ncols());
        SymMatrix { mat }
    }

    /// Forces exact symmetry on a square matrix by averaging with its
    /// transpose. Used after orthogonal rotations, which are symmetric only
    /// up to rounding.
    pub fn new_symmetrized(m: Mat<f64>) -> Self {
        assert_eq!(m.nrows(), m.ncols(), "symmetrize needs a square matrix");
        let n = m.nrows();
        let mut out = Mat::<f64>::zeros(n, n);
        for i in 0..n {
            out[(i, i)] = m[(i, i)];
            for j in i + 1..n {
                let v = 0.5 * (m[(i, j)] + m[(j, i)]);
                out[(i, j)] = v;
                out[(j, i)] = v;
            }
        }
        SymMatrix { mat: out }
    }

    pub fn order(&self) -> usize {
        self.mat.nrows()
    }

    pub fn as_mat(&self) -> &Mat<f64> {
        &self.mat
    }

    pub fn into_mat(self) -> Mat<f64> {
        self.mat
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.mat[(i, j)]
    }

    pub fn trace(&self) -> f64 {
        (0..self.order()).map(|i| self.mat[(i, i)]).sum()
    }

    pub fn max_abs(&self) -> f64 {
        let mut m = 0.0f64;
        for j in 0..self.mat.ncols() {
            for i in 0..self.mat.nrows() {
                m = m.max(self.mat[(i, j)].abs());
            }
        }
        m
    }

    pub fn is_finite(&self) -> bool {
        for j in 0..self.mat.ncols() {
            for i in 0..self.mat.nrows() {
                if !self.mat[(i, j)].is_finite() {
                    return false;
                }
            }
        }
        true
    }

    /// Upper-triangle triplet view (i <= j) of entries with |value| above
    /// `threshold`, for connectivity counting and sparse cross-checks.
    pub fn triplets(&self, threshold: f64) -> Vec<(usize, usize, f64)> {
        let n = self.order();
        let mut out = Vec::new();
        for i in 0..n {
            for j in i..n {
                let v = self.mat[(i, j)];
                if v.abs() > threshold {
                    out.push((i, j, v));
                }
            }
        }
        out
    }

    /// Binary dump: 8-byte magic "SHSPEC01", order as little-endian u64,
    /// then row-major little-endian f64 entries.
    pub fn write_binary<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        w.write_all(b"SHSPEC01")?;
        w.write_all(&(self.order() as u64).to_le_bytes())?;
        for i in 0..self.order() {
            for j in 0..self.order() {
                w.write_all(&self.mat[(i, j)].to_le_bytes())?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TermKind {
    Hopping,
    Ising,
}

/// One two-site term `coeff * op(i, j)` of the Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Term {
    pub i: usize,
    pub j: usize,
    pub kind: TermKind,
    pub coeff: f64,
}

/// The four elementary operators the models are built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorKind {
    NnHopping,
    NnIsing,
    NnnHopping,
    NnnIsing,
}

impl OperatorKind {
    fn range(self) -> usize {
        match self {
            OperatorKind::NnHopping | OperatorKind::NnIsing => 1,
            OperatorKind::NnnHopping | OperatorKind::NnnIsing => 2,
        }
    }

    fn kind(self) -> TermKind {
        match self {
            OperatorKind::NnHopping | OperatorKind::NnnHopping => TermKind::Hopping,
            OperatorKind::NnIsing | OperatorKind::NnnIsing => TermKind::Ising,
        }
    }

    /// Unit-coefficient terms on an open chain.
    pub fn terms(self, sites: usize) -> Result<Vec<Term>> {
        bond_terms(sites, self.range(), self.kind(), 1.0)
    }
}

fn bond_terms(sites: usize, range: usize, kind: TermKind, coeff: f64) -> Result<Vec<Term>> {
    if sites < range + 1 {
        return Err(Error::ChainTooShort { sites, needed: range + 1 });
    }
    Ok((0..sites - range)
        .map(|i| Term { i, j: i + range, kind, coeff })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelId {
    One,
    Two,
}

/// Full parameterization of one Hamiltonian: which model, chain geometry,
/// and the couplings mu (nearest-neighbor anisotropy) and lambda
/// (next-nearest-neighbor strength, Model 2 only).
#[derive(Debug, Clone, Copy)]
pub struct ModelSpec {
    pub model: ModelId,
    pub sites: usize,
    pub n_up: usize,
    pub mu: f64,
    pub lambda: f64,
    pub allow_isotropic: bool,
}

/// Default filling: one up-spin per three sites, rounded.
pub fn default_n_up(sites: usize) -> usize {
    ((sites as f64) / 3.0).round() as usize
}

impl ModelSpec {
    pub fn model1(sites: usize, n_up: usize, mu: f64) -> Self {
        ModelSpec { model: ModelId::One, sites, n_up, mu, lambda: 0.0, allow_isotropic: false }
    }

    pub fn model2(sites: usize, n_up: usize, mu: f64, lambda: f64) -> Self {
        ModelSpec { model: ModelId::Two, sites, n_up, mu, lambda, allow_isotropic: false }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.mu.is_finite() || !self.lambda.is_finite() {
            return Err(Error::Domain("couplings must be finite".into()));
        }
        if self.mu == 1.0 && !self.allow_isotropic {
            return Err(Error::Domain(
                "mu = 1 is the isotropic point with extra total-spin degeneracies; \
                 set allow_isotropic to force it"
                    .into(),
            ));
        }
        let needed = match self.model {
            ModelId::One => 2,
            ModelId::Two => 3,
        };
        if self.sites < needed {
            return Err(Error::ChainTooShort { sites: self.sites, needed });
        }
        Ok(())
    }

    /// The single knob that drives each model through its transition:
    /// mu for Model 1, lambda for Model 2.
    pub fn coupling(&self) -> f64 {
        match self.model {
            ModelId::One => self.mu,
            ModelId::Two => self.lambda,
        }
    }

    pub fn with_coupling(&self, g: f64) -> Self {
        let mut s = *self;
        match self.model {
            ModelId::One => s.mu = g,
            ModelId::Two => s.lambda = g,
        }
        s
    }

    /// Terms of the full Hamiltonian.
    /// Model 1: hop1 + mu * ising1. Model 2: adds lambda * (hop2 + mu * ising2).
    pub fn terms(&self) -> Result<Vec<Term>> {
        let mut t = self.unperturbed_terms()?;
        let g = self.coupling();
        for mut p in self.perturbation_terms()? {
            p.coeff *= g;
            t.push(p);
        }
        Ok(t)
    }

    /// Terms of the part that defines the mean-field basis:
    /// Model 1 -> nearest-neighbor hopping alone; Model 2 -> the full Model 1
    /// Hamiltonian at the same mu.
    pub fn unperturbed_terms(&self) -> Result<Vec<Term>> {
        self.validate()?;
        let mut t = bond_terms(self.sites, 1, TermKind::Hopping, 1.0)?;
        if self.model == ModelId::Two {
            t.extend(bond_terms(self.sites, 1, TermKind::Ising, self.mu)?);
        }
        Ok(t)
    }

    /// Terms of the perturbation at unit coupling strength; scaling by
    /// `coupling()` recovers the full Hamiltonian.
    pub fn perturbation_terms(&self) -> Result<Vec<Term>> {
        self.validate()?;
        match self.model {
            ModelId::One => bond_terms(self.sites, 1, TermKind::Ising, 1.0),
            ModelId::Two => {
                let mut t = bond_terms(self.sites, 2, TermKind::Hopping, 1.0)?;
                t.extend(bond_terms(self.sites, 2, TermKind::Ising, self.mu)?);
                Ok(t)
            }
        }
    }
}

/// Applies one term to a product configuration. Returns the image
/// configuration and amplitude, or None when the term annihilates it.
fn apply_term(term: &Term, c: u64) -> Option<(u64, f64)> {
    let bi = (c >> term.i) & 1;
    let bj = (c >> term.j) & 1;
    match term.kind {
        TermKind::Hopping => {
            if bi != bj {
                Some((c ^ ((1u64 << term.i) | (1u64 << term.j)), 0.5 * term.coeff))
            } else {
                None
            }
        }
        TermKind::Ising => {
            let sign = if bi == bj { 0.25 } else { -0.25 };
            Some((c, sign * term.coeff))
        }
    }
}

/// Assembles a term list in the plain product basis given by `configs`,
/// which must be sorted ascending and closed under the terms' hopping moves.
/// Oracle route and full-space cross-checks; production uses `assemble` on a
/// parity basis.
pub fn assemble_in_product_basis(configs: &[u64], terms: &[Term]) -> Mat<f64> {
    let n = configs.len();
    let mut h = Mat::<f64>::zeros(n, n);
    for (jb, &c) in configs.iter().enumerate() {
        for term in terms {
            if let Some((image, t)) = apply_term(term, c) {
                let ja = configs
                    .binary_search(&image)
                    .expect("term image must stay inside the configuration list");
                h[(ja, jb)] += t;
            }
        }
    }
    h
}

/// Assembles a term list in a parity-adapted basis.
///
/// Column jb with representative b is processed by applying every term to
/// |b> alone; reflection symmetry folds the partner's images back onto
/// canonical representatives with weight r(a)/r(b), r = sqrt(2) for
/// palindromic states and 1 for paired ones (even sector), or with the
/// orientation sign (odd sector, palindromic images dropped). Only the
/// upper triangle is accumulated; mirroring makes symmetry exact.
pub fn assemble(basis: &SectorBasis, terms: &[Term]) -> SymMatrix {
    let n = basis.dim();
    let even = basis.parity() == Parity::Even;
    let mut h = Mat::<f64>::zeros(n, n);
    for (jb, sb) in basis.states().iter().enumerate() {
        let rb = if sb.paired { 1.0 } else { SQRT_2 };
        for term in terms {
            if let Some((image, t)) = apply_term(term, sb.rep) {
                let Some((ja, sign)) = basis.locate(image) else {
                    continue;
                };
                if ja > jb {
                    continue;
                }
                let w = if even {
                    let ra = if basis.states()[ja].paired { 1.0 } else { SQRT_2 };
                    ra / rb
                } else {
                    sign
                };
                h[(ja, jb)] += w * t;
            }
        }
    }
    for j in 0..n {
        for i in 0..j {
            h[(j, i)] = h[(i, j)];
        }
    }
    SymMatrix::from_exact(h)
}

/// One elementary operator in the parity basis.
pub fn build_operator(kind: OperatorKind, basis: &SectorBasis) -> Result<SymMatrix> {
    Ok(assemble(basis, &kind.terms(basis.sites())?))
}

/// The full model Hamiltonian in the parity basis.
pub fn compose_model(spec: &ModelSpec, basis: &SectorBasis) -> Result<SymMatrix> {
    check_basis(spec, basis)?;
    Ok(assemble(basis, &spec.terms()?))
}

/// The mean-field-defining part of the model.
pub fn unperturbed_operator(spec: &ModelSpec, basis: &SectorBasis) -> Result<SymMatrix> {
    check_basis(spec, basis)?;
    Ok(assemble(basis, &spec.unperturbed_terms()?))
}

/// The unit-strength perturbation of the model.
pub fn perturbation_operator(spec: &ModelSpec, basis: &SectorBasis) -> Result<SymMatrix> {
    check_basis(spec, basis)?;
    Ok(assemble(basis, &spec.perturbation_terms()?))
}

fn check_basis(spec: &ModelSpec, basis: &SectorBasis) -> Result<()> {
    if basis.sites() != spec.sites || basis.n_up() != spec.n_up {
        return Err(Error::DimensionMismatch { expected: spec.sites, got: basis.sites() });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::SectorBasis;

    fn max_entry_diff(a: &SymMatrix, b: &SymMatrix) -> f64 {
        assert_eq!(a.order(), b.order());
        let mut m = 0.0f64;
        for i in 0..a.order() {
            for j in 0..a.order() {
                m = m.max((a.get(i, j) - b.get(i, j)).abs());
            }
        }
        m
    }

    #[test]
    fn two_site_hopping_block() {
        let basis = SectorBasis::build(2, 1).unwrap();
        let h = build_operator(OperatorKind::NnHopping, &basis).unwrap();
        assert_eq!(h.order(), 1);
        assert_eq!(h.get(0, 0), 0.5);
    }

    #[test]
    fn two_site_ising_block() {
        let basis = SectorBasis::build(2, 1).unwrap();
        let v = build_operator(OperatorKind::NnIsing, &basis).unwrap();
        assert_eq!(v.get(0, 0), -0.25);
    }

    #[test]
    fn three_site_even_hopping_couples_palindrome_to_pair() {
        let basis = SectorBasis::build(3, 1).unwrap();
        let h = build_operator(OperatorKind::NnHopping, &basis).unwrap();
        let x = 1.0 / SQRT_2;
        assert_eq!(h.get(0, 0), 0.0);
        assert_eq!(h.get(1, 1), 0.0);
        assert!((h.get(0, 1) - x).abs() < 1e-15);
        assert_eq!(h.get(0, 1), h.get(1, 0));
    }

    #[test]
    fn three_site_odd_hopping_vanishes() {
        let basis = SectorBasis::build_with_parity(3, 1, crate::basis::Parity::Odd).unwrap();
        let h = build_operator(OperatorKind::NnHopping, &basis).unwrap();
        assert_eq!(h.order(), 1);
        assert_eq!(h.get(0, 0), 0.0);
    }

    #[test]
    fn model1_composition_is_linear_in_mu() {
        let basis = SectorBasis::build(2, 1).unwrap();
        let spec = ModelSpec::model1(2, 1, 0.3);
        let h = compose_model(&spec, &basis).unwrap();
        assert!((h.get(0, 0) - (0.5 + 0.3 * -0.25)).abs() < 1e-15);
    }

    #[test]
    fn model2_at_zero_lambda_equals_model1() {
        let basis = SectorBasis::build(6, 2).unwrap();
        let m1 = compose_model(&ModelSpec::model1(6, 2, 0.5), &basis).unwrap();
        let m2 = compose_model(&ModelSpec::model2(6, 2, 0.5, 0.0), &basis).unwrap();
        assert_eq!(max_entry_diff(&m1, &m2), 0.0);
    }

    #[test]
    fn model1_at_zero_mu_is_pure_hopping() {
        let basis = SectorBasis::build(6, 2).unwrap();
        let h = compose_model(&ModelSpec::model1(6, 2, 0.0), &basis).unwrap();
        let hop = build_operator(OperatorKind::NnHopping, &basis).unwrap();
        assert_eq!(max_entry_diff(&h, &hop), 0.0);
    }

    #[test]
    fn assembly_is_exactly_symmetric() {
        let basis = SectorBasis::build(10, 3).unwrap();
        let h = compose_model(&ModelSpec::model2(10, 3, 0.5, 1.0), &basis).unwrap();
        for i in 0..h.order() {
            for j in 0..h.order() {
                assert_eq!(h.get(i, j), h.get(j, i));
            }
        }
    }

    #[test]
    fn next_nearest_terms_need_three_sites() {
        assert!(matches!(
            OperatorKind::NnnHopping.terms(2),
            Err(Error::ChainTooShort { needed: 3, .. })
        ));
    }

    #[test]
    fn isotropic_point_needs_override() {
        let spec = ModelSpec::model1(6, 2, 1.0);
        assert!(spec.validate().is_err());
        let mut forced = spec;
        forced.allow_isotropic = true;
        assert!(forced.validate().is_ok());
    }

    #[test]
    fn triplet_view_lists_upper_triangle() {
        let basis = SectorBasis::build(2, 1).unwrap();
        let h = build_operator(OperatorKind::NnHopping, &basis).unwrap();
        assert_eq!(h.triplets(1e-12), vec![(0, 0, 0.5)]);
    }

    #[test]
    fn binary_dump_layout() {
        let basis = SectorBasis::build(3, 1).unwrap();
        let h = build_operator(OperatorKind::NnHopping, &basis).unwrap();
        let mut buf = Vec::new();
        h.write_binary(&mut buf).unwrap();
        assert_eq!(&buf[..8], b"SHSPEC01");
        assert_eq!(u64::from_le_bytes(buf[8..16].try_into().unwrap()), 2);
        assert_eq!(buf.len(), 16 + 4 * 8);
        let h01 = f64::from_le_bytes(buf[24..32].try_into().unwrap());
        assert!((h01 - 1.0 / SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn symmetrize_averages_off_diagonal() {
        let mut m = Mat::<f64>::zeros(2, 2);
        m[(0, 1)] = 1.0;
        m[(1, 0)] = 3.0;
        let s = SymMatrix::new_symmetrized(m);
        assert_eq!(s.get(0, 1), 2.0);
        assert_eq!(s.get(1, 0), 2.0);
    }
}
