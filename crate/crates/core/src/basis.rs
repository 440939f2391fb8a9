//! Fixed-magnetization spin-1/2 configurations and the parity-adapted basis.
//!
//! A configuration is a bit pattern: bit i set means an up-spin on site i
//! (sites are 0-indexed from the chain's left end). The chain has a single
//! spatial symmetry, site reflection, so each magnetization sector splits
//! into an even and an odd parity subspace. The even one is used throughout;
//! the odd one exists for completeness and for full-spectrum cross-checks.

use std::collections::HashMap;

use crate::error::{Error, Result};

pub const MAX_SITES: usize = 63;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

/// One symmetry-adapted basis vector, identified by its representative
/// configuration: the numerically smaller of {c, reflect(c)}.
///
/// Palindromic (`paired == false`): the vector is |c> itself.
/// Paired: the vector is (|c> + |reflect(c)>)/sqrt(2) in the even sector,
/// (|c> - |reflect(c)>)/sqrt(2) in the odd sector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BasisState {
    pub rep: u64,
    pub paired: bool,
}

/// Parity-adapted basis of one (sites, n_up) sector. States are ordered by
/// ascending representative, so two builds with equal inputs are identical.
#[derive(Debug, Clone)]
pub struct SectorBasis {
    sites: usize,
    n_up: usize,
    parity: Parity,
    states: Vec<BasisState>,
    index: HashMap<u64, u32>,
}

/// All configurations with `n_up` set bits among `sites` bits, in strictly
/// increasing numeric order.
pub fn enumerate_sector(sites: usize, n_up: usize) -> Result<Vec<u64>> {
    check_sector(sites, n_up)?;
    if n_up == 0 {
        return Ok(vec![0]);
    }
    // Gosper's hack walks same-popcount patterns in increasing order.
    let limit: u64 = if sites == MAX_SITES {
        u64::MAX
    } else {
        (1u64 << sites) - 1
    };
    let mut configs = Vec::new();
    let mut c: u64 = (1u64 << n_up) - 1;
    while c <= limit {
        configs.push(c);
        let low = c & c.wrapping_neg();
        let ripple = c + low;
        if ripple == 0 {
            break;
        }
        c = ripple | (((c ^ ripple) / low) >> 2);
    }
    Ok(configs)
}

/// Site reflection: bit i moves to bit sites-1-i. Involution.
pub fn reflect(config: u64, sites: usize) -> u64 {
    debug_assert!(sites >= 1 && sites <= MAX_SITES);
    config.reverse_bits() >> (64 - sites)
}

fn check_sector(sites: usize, n_up: usize) -> Result<()> {
    if sites == 0 || sites > MAX_SITES {
        return Err(Error::Domain(format!(
            "site count {sites} outside supported range 1..={MAX_SITES}"
        )));
    }
    if n_up > sites {
        return Err(Error::Domain(format!(
            "cannot place {n_up} up-spins on {sites} sites"
        )));
    }
    Ok(())
}

impl SectorBasis {
    /// Even-parity basis, the default sector for every analysis.
    pub fn build(sites: usize, n_up: usize) -> Result<Self> {
        Self::build_with_parity(sites, n_up, Parity::Even)
    }

    pub fn build_with_parity(sites: usize, n_up: usize, parity: Parity) -> Result<Self> {
        let configs = enumerate_sector(sites, n_up)?;
        let mut states = Vec::new();
        for &c in &configs {
            let r = reflect(c, sites);
            if c == r {
                if parity == Parity::Even {
                    states.push(BasisState { rep: c, paired: false });
                }
                // Palindromes have no odd-parity component.
            } else if c < r {
                states.push(BasisState { rep: c, paired: true });
            }
            // c > reflect(c): partner of an earlier representative.
        }
        let index = states
            .iter()
            .enumerate()
            .map(|(j, s)| (s.rep, j as u32))
            .collect();
        Ok(SectorBasis { sites, n_up, parity, states, index })
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn n_up(&self) -> usize {
        self.n_up
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[BasisState] {
        &self.states
    }

    pub fn palindrome_count(&self) -> usize {
        self.states.iter().filter(|s| !s.paired).count()
    }

    /// Basis position of a representative configuration, if present.
    pub fn position(&self, rep: u64) -> Option<usize> {
        self.index.get(&rep).map(|&j| j as usize)
    }

    /// Position of the symmetry-adapted vector containing configuration `c`,
    /// together with the sign carried when `c` is the reflected partner
    /// (-1 only in the odd sector).
    pub fn locate(&self, c: u64) -> Option<(usize, f64)> {
        let r = reflect(c, self.sites);
        let rep = c.min(r);
        let j = self.position(rep)?;
        let sign = if self.parity == Parity::Odd && c != rep {
            -1.0
        } else {
            1.0
        };
        Some((j, sign))
    }

    /// Dense embedding into the product basis of the magnetization sector:
    /// rows follow `sector` order, column j holds the amplitudes of basis
    /// vector j. Columns are orthonormal.
    pub fn embedding(&self, sector: &[u64]) -> faer::Mat<f64> {
        let pos: HashMap<u64, usize> =
            sector.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        let mut e = faer::Mat::<f64>::zeros(sector.len(), self.dim());
        let half = 0.5f64.sqrt();
        for (j, s) in self.states.iter().enumerate() {
            if s.paired {
                let partner = reflect(s.rep, self.sites);
                e[(pos[&s.rep], j)] = half;
                e[(pos[&partner], j)] = if self.parity == Parity::Even { half } else { -half };
            } else {
                e[(pos[&s.rep], j)] = 1.0;
            }
        }
        e
    }
}
