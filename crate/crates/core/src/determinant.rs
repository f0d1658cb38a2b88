//! Occupation strings, canonical determinant ordering, and excitation algebra.
//!
//! A determinant is stored as a pair of bitmasks over spatial orbitals, one
//! per spin. Its phase is fixed by the creation-operator product
//!
//! ```text
//! a†(α, i1) … a†(α, ik) a†(β, j1) … a†(β, jm) |vac⟩,   i1 < … < ik,  j1 < … < jm
//! ```
//!
//! i.e. alpha spin-orbitals precede beta ones and indices ascend within each
//! spin block. Every module that produces coefficients or overlaps uses this
//! ordering; mixing conventions silently corrupts the relative signs that
//! enter `ρ·S`.
//!
//! Within a spin, strings are ordered lexicographically on their ascending
//! index lists. Determinants are ordered alpha-major: the determinant built
//! from alpha string `a` and beta string `b` sits at `a * n_beta_strings + b`.

use std::fmt;

use crate::error::{Error, Result};

/// Largest supported number of spatial orbitals (one machine word per spin).
pub const MAX_ORBITALS: usize = 64;

/// `n` choose `k`, exact for the sizes admitted by [`MAX_ORBITALS`] at desk scale.
pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as usize
}

/// Ascending list of set bit positions.
pub fn mask_indices(mask: u64) -> Vec<usize> {
    let mut out = Vec::with_capacity(mask.count_ones() as usize);
    let mut m = mask;
    while m != 0 {
        out.push(m.trailing_zeros() as usize);
        m &= m - 1;
    }
    out
}

fn indices_to_mask(n_orbitals: usize, indices: &[usize]) -> Result<u64> {
    let mut mask = 0u64;
    let mut prev: Option<usize> = None;
    for &i in indices {
        if i >= n_orbitals {
            return Err(Error::domain(format!(
                "orbital index {i} out of range for {n_orbitals} orbitals"
            )));
        }
        if let Some(p) = prev {
            if i <= p {
                return Err(Error::domain(format!(
                    "occupied indices must be strictly ascending, got {p} then {i}"
                )));
            }
        }
        prev = Some(i);
        mask |= 1u64 << i;
    }
    Ok(mask)
}

fn check_orbital_count(n_orbitals: usize) -> Result<()> {
    if n_orbitals > MAX_ORBITALS {
        return Err(Error::domain(format!(
            "{n_orbitals} orbitals exceeds the supported maximum of {MAX_ORBITALS}"
        )));
    }
    Ok(())
}

fn low_mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Alpha and beta occupied spatial orbitals of one Slater determinant.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct OccupationString {
    alpha: u64,
    beta: u64,
    n_orbitals: usize,
}

impl OccupationString {
    /// Builds a string from ascending 0-based index lists.
    pub fn new(n_orbitals: usize, alpha: &[usize], beta: &[usize]) -> Result<Self> {
        check_orbital_count(n_orbitals)?;
        Ok(Self {
            alpha: indices_to_mask(n_orbitals, alpha)?,
            beta: indices_to_mask(n_orbitals, beta)?,
            n_orbitals,
        })
    }

    pub fn from_masks(n_orbitals: usize, alpha: u64, beta: u64) -> Result<Self> {
        check_orbital_count(n_orbitals)?;
        let valid = low_mask(n_orbitals);
        if alpha & !valid != 0 || beta & !valid != 0 {
            return Err(Error::domain(format!(
                "occupation mask has bits beyond {n_orbitals} orbitals"
            )));
        }
        Ok(Self {
            alpha,
            beta,
            n_orbitals,
        })
    }

    pub fn alpha_mask(&self) -> u64 {
        self.alpha
    }

    pub fn beta_mask(&self) -> u64 {
        self.beta
    }

    pub fn n_orbitals(&self) -> usize {
        self.n_orbitals
    }

    pub fn n_alpha(&self) -> usize {
        self.alpha.count_ones() as usize
    }

    pub fn n_beta(&self) -> usize {
        self.beta.count_ones() as usize
    }

    pub fn alpha_indices(&self) -> Vec<usize> {
        mask_indices(self.alpha)
    }

    pub fn beta_indices(&self) -> Vec<usize> {
        mask_indices(self.beta)
    }
}

impl fmt::Debug for OccupationString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "α{:?}β{:?}", self.alpha_indices(), self.beta_indices())
    }
}

/// All `k`-subsets of `n` orbitals for one spin, in lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpinStrings {
    n_orbitals: usize,
    n_electrons: usize,
    masks: Vec<u64>,
}

impl SpinStrings {
    pub fn enumerate(n_orbitals: usize, n_electrons: usize) -> Result<Self> {
        check_orbital_count(n_orbitals)?;
        if n_electrons > n_orbitals {
            return Err(Error::domain(format!(
                "{n_electrons} electrons of one spin do not fit in {n_orbitals} orbitals"
            )));
        }
        let mut masks = Vec::with_capacity(binomial(n_orbitals, n_electrons));
        let mut combo: Vec<usize> = (0..n_electrons).collect();
        loop {
            masks.push(combo.iter().fold(0u64, |m, &i| m | (1u64 << i)));
            // advance to the next combination in lexicographic order
            let mut i = n_electrons;
            loop {
                if i == 0 {
                    return Ok(Self {
                        n_orbitals,
                        n_electrons,
                        masks,
                    });
                }
                i -= 1;
                if combo[i] < n_orbitals - n_electrons + i {
                    break;
                }
            }
            combo[i] += 1;
            for j in i + 1..n_electrons {
                combo[j] = combo[j - 1] + 1;
            }
        }
    }

    pub fn len(&self) -> usize {
        self.masks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masks.is_empty()
    }

    pub fn n_electrons(&self) -> usize {
        self.n_electrons
    }

    pub fn masks(&self) -> &[u64] {
        &self.masks
    }

    /// Lexicographic rank via the combinatorial number system.
    pub fn rank(&self, mask: u64) -> Result<usize> {
        if mask.count_ones() as usize != self.n_electrons || mask & !low_mask(self.n_orbitals) != 0 {
            return Err(Error::domain(format!(
                "string {:?} is not a {}-of-{} occupation",
                mask_indices(mask),
                self.n_electrons,
                self.n_orbitals
            )));
        }
        let n = self.n_orbitals;
        let k = self.n_electrons;
        let mut rank = 0;
        let mut next = 0;
        for (i, c) in mask_indices(mask).into_iter().enumerate() {
            for j in next..c {
                rank += binomial(n - 1 - j, k - 1 - i);
            }
            next = c + 1;
        }
        Ok(rank)
    }
}

/// Full determinant space for fixed orbital and per-spin electron counts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeterminantSpace {
    n_orbitals: usize,
    alpha: SpinStrings,
    beta: SpinStrings,
}

impl DeterminantSpace {
    /// All determinants with `n_alpha` alpha and `n_beta` beta electrons, canonically ordered.
    pub fn enumerate(n_orbitals: usize, n_alpha: usize, n_beta: usize) -> Result<Self> {
        Ok(Self {
            n_orbitals,
            alpha: SpinStrings::enumerate(n_orbitals, n_alpha)?,
            beta: SpinStrings::enumerate(n_orbitals, n_beta)?,
        })
    }

    pub fn n_orbitals(&self) -> usize {
        self.n_orbitals
    }

    pub fn n_alpha(&self) -> usize {
        self.alpha.n_electrons
    }

    pub fn n_beta(&self) -> usize {
        self.beta.n_electrons
    }

    pub fn n_electrons(&self) -> usize {
        self.n_alpha() + self.n_beta()
    }

    pub fn alpha_strings(&self) -> &SpinStrings {
        &self.alpha
    }

    pub fn beta_strings(&self) -> &SpinStrings {
        &self.beta
    }

    pub fn len(&self) -> usize {
        self.alpha.len() * self.beta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Position of the determinant built from alpha rank `a` and beta rank `b`.
    pub fn index(&self, a: usize, b: usize) -> usize {
        a * self.beta.len() + b
    }

    /// Inverse of [`DeterminantSpace::rank`].
    pub fn get(&self, index: usize) -> Option<OccupationString> {
        if index >= self.len() {
            return None;
        }
        let nb = self.beta.len();
        Some(OccupationString {
            alpha: self.alpha.masks[index / nb],
            beta: self.beta.masks[index % nb],
            n_orbitals: self.n_orbitals,
        })
    }

    pub fn rank(&self, string: &OccupationString) -> Result<usize> {
        if string.n_orbitals != self.n_orbitals {
            return Err(Error::domain(format!(
                "string over {} orbitals queried in a {}-orbital space",
                string.n_orbitals, self.n_orbitals
            )));
        }
        let a = self.alpha.rank(string.alpha)?;
        let b = self.beta.rank(string.beta)?;
        Ok(self.index(a, b))
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = OccupationString> + '_ {
        (0..self.len()).map(move |i| self.get(i).expect("index in range"))
    }

    /// True when both spaces have the same orbital and electron counts.
    pub fn same_shape(&self, other: &DeterminantSpace) -> bool {
        self.n_orbitals == other.n_orbitals && self.n_alpha() == other.n_alpha() && self.n_beta() == other.n_beta()
    }
}

/// Holes (occupied in the ket only) and particles (occupied in the bra only) of one spin.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SpinExcitation {
    pub holes: u64,
    pub particles: u64,
}

impl SpinExcitation {
    pub fn degree(&self) -> usize {
        self.holes.count_ones() as usize
    }

    pub fn hole_indices(&self) -> Vec<usize> {
        mask_indices(self.holes)
    }

    pub fn particle_indices(&self) -> Vec<usize> {
        mask_indices(self.particles)
    }
}

/// Relation between a bra and a ket determinant.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExcitationInfo {
    /// Number of substituted electrons, summed over spins.
    pub degree: usize,
    pub alpha: SpinExcitation,
    pub beta: SpinExcitation,
    /// Parity (+1 or −1) of bringing the substituted ket into the bra's canonical order.
    pub sign: i8,
}

/// Parity of sorting `ket` after replacing its holes by particles pairwise in ascending order.
fn substitution_parity(ket: u64, holes: u64, particles: u64) -> i8 {
    let mut list = [0usize; MAX_ORBITALS];
    let mut len = 0;
    let mut m = ket;
    while m != 0 {
        list[len] = m.trailing_zeros() as usize;
        len += 1;
        m &= m - 1;
    }
    let mut h = holes;
    let mut p = particles;
    while h != 0 {
        let hi = h.trailing_zeros() as usize;
        let pi = p.trailing_zeros() as usize;
        let slot = list[..len].iter().position(|&x| x == hi).expect("hole occupied in ket");
        list[slot] = pi;
        h &= h - 1;
        p &= p - 1;
    }
    let mut inversions = 0usize;
    for i in 0..len {
        for j in i + 1..len {
            if list[i] > list[j] {
                inversions += 1;
            }
        }
    }
    if inversions.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Number of substitutions between two determinants, without phase work.
pub fn excitation_degree(bra: &OccupationString, ket: &OccupationString) -> usize {
    ((bra.alpha ^ ket.alpha).count_ones() + (bra.beta ^ ket.beta).count_ones()) as usize / 2
}

/// Excitation taking `ket` to `bra`, with the permutation sign under the canonical phase convention.
pub fn excitation(bra: &OccupationString, ket: &OccupationString) -> Result<ExcitationInfo> {
    if bra.n_orbitals != ket.n_orbitals || bra.n_alpha() != ket.n_alpha() || bra.n_beta() != ket.n_beta() {
        return Err(Error::domain(format!(
            "excitation between mismatched determinants {bra:?} and {ket:?}"
        )));
    }
    let alpha = SpinExcitation {
        holes: ket.alpha & !bra.alpha,
        particles: bra.alpha & !ket.alpha,
    };
    let beta = SpinExcitation {
        holes: ket.beta & !bra.beta,
        particles: bra.beta & !ket.beta,
    };
    let sign = substitution_parity(ket.alpha, alpha.holes, alpha.particles)
        * substitution_parity(ket.beta, beta.holes, beta.particles);
    Ok(ExcitationInfo {
        degree: alpha.degree() + beta.degree(),
        alpha,
        beta,
        sign,
    })
}
