//! Partial traces and purities for arbitrary qubit subsets.
//!
//! This is the brute-force reference: every closed-form expression in the
//! crate is checked against it. The partial trace works directly on basis
//! indices by splitting each index into kept bits `x` and traced bits `z`,
//! so `⟨x|ρ_A|y⟩ = Σ_z a(x,z) a*(y,z)`.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qstate::{qubit_mask, PureState};

/// A sorted, duplicate-free set of 1-based qubit labels.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QubitSet(Vec<usize>);

impl QubitSet {
    /// Canonicalize `qubits` (sort, reject duplicates and zero).
    pub fn new(qubits: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut v: Vec<usize> = qubits.into_iter().collect();
        v.sort_unstable();
        if v.first() == Some(&0) {
            return Err(Error::Subset("qubit labels start at 1".into()));
        }
        if v.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Subset(format!("duplicate qubit in {v:?}")));
        }
        Ok(QubitSet(v))
    }

    pub fn qubits(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, qubit: usize) -> bool {
        self.0.binary_search(&qubit).is_ok()
    }

    /// Qubits of `1..=n` not in `self`.
    pub fn complement(&self, n_qubits: usize) -> QubitSet {
        QubitSet((1..=n_qubits).filter(|q| !self.contains(*q)).collect())
    }

    /// Map key used in reports: concatenated digits (`"12"`), or
    /// comma-separated labels once any label has two digits.
    pub fn key(&self) -> String {
        if self.0.iter().all(|&q| q < 10) {
            self.0.iter().map(|q| q.to_string()).collect()
        } else {
            self.0.iter().map(|q| q.to_string()).collect::<Vec<_>>().join(",")
        }
    }
}

impl fmt::Display for QubitSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.key())
    }
}

/// All `size`-element subsets of `1..=n`, lexicographically ordered.
pub fn subsets_of_size(n_qubits: usize, size: usize) -> Vec<QubitSet> {
    fn rec(start: usize, n: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<QubitSet>) {
        if left == 0 {
            out.push(QubitSet(cur.clone()));
            return;
        }
        for q in start..=n {
            if n - q + 1 < left {
                break;
            }
            cur.push(q);
            rec(q + 1, n, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if size <= n_qubits {
        rec(1, n_qubits, size, &mut Vec::with_capacity(size), &mut out);
    }
    out
}

/// Subsets of size `⌊n/2⌋`, complements included.
pub fn balanced_subsets(n_qubits: usize) -> Vec<QubitSet> {
    subsets_of_size(n_qubits, n_qubits / 2)
}

/// Index bookkeeping for splitting an `n`-qubit register into kept and
/// traced qubits.
///
/// `row[i]` is the kept-bit pattern of basis index `i` (first kept qubit most
/// significant) and `col[i]` the traced-bit pattern, so the state reshapes to
/// a `2^|A| × 2^(n-|A|)` matrix `M` with `M[row[i]][col[i]] = a[i]` and
/// `ρ_A = M M†`.
#[derive(Debug, Clone)]
pub struct Split {
    keep: QubitSet,
    n_qubits: usize,
    row: Vec<usize>,
    col: Vec<usize>,
}

impl Split {
    pub fn new(n_qubits: usize, keep: &QubitSet) -> Result<Self> {
        if keep.is_empty() {
            return Err(Error::Subset("kept subset is empty".into()));
        }
        if let Some(&q) = keep.qubits().iter().find(|&&q| q > n_qubits) {
            return Err(Error::QubitIndex { qubit: q, n_qubits });
        }
        if keep.len() == n_qubits {
            return Err(Error::Subset("kept subset is the whole register".into()));
        }
        let traced = keep.complement(n_qubits);
        let gather = |set: &QubitSet, i: usize| {
            set.qubits()
                .iter()
                .fold(0usize, |acc, &q| (acc << 1) | usize::from(i & qubit_mask(n_qubits, q) != 0))
        };
        let dim = 1usize << n_qubits;
        let row = (0..dim).map(|i| gather(keep, i)).collect();
        let col = (0..dim).map(|i| gather(&traced, i)).collect();
        Ok(Split {
            keep: keep.clone(),
            n_qubits,
            row,
            col,
        })
    }

    pub fn keep(&self) -> &QubitSet {
        &self.keep
    }

    pub fn rows(&self) -> usize {
        1 << self.keep.len()
    }

    pub fn cols(&self) -> usize {
        1 << (self.n_qubits - self.keep.len())
    }

    pub fn row_of(&self, index: usize) -> usize {
        self.row[index]
    }

    pub fn col_of(&self, index: usize) -> usize {
        self.col[index]
    }

    /// Row-major `M` with `M[x][z] = a(x,z)`.
    pub fn reshape(&self, amps: &[Complex64]) -> Vec<Complex64> {
        let cols = self.cols();
        let mut m = vec![Complex64::new(0.0, 0.0); self.rows() * cols];
        for (i, &a) in amps.iter().enumerate() {
            m[self.row[i] * cols + self.col[i]] = a;
        }
        m
    }

    /// Row-major `ρ = M M†` for (possibly unnormalized) amplitudes.
    pub fn reduce(&self, amps: &[Complex64]) -> Vec<Complex64> {
        let m = self.reshape(amps);
        let (r, c) = (self.rows(), self.cols());
        let mut rho = vec![Complex64::new(0.0, 0.0); r * r];
        for x in 0..r {
            let mx = &m[x * c..(x + 1) * c];
            for y in x..r {
                let my = &m[y * c..(y + 1) * c];
                let v: Complex64 = mx.iter().zip(my).map(|(a, b)| a * b.conj()).sum();
                rho[x * r + y] = v;
                rho[y * r + x] = v.conj();
            }
        }
        rho
    }
}

/// Reduced state of a kept qubit subset.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    kept: QubitSet,
    dim: usize,
    entries: Vec<Complex64>,
}

impl DensityMatrix {
    /// Wrap a row-major matrix; no physical validation is done here.
    pub fn from_entries(kept: QubitSet, entries: Vec<Complex64>) -> Result<Self> {
        let dim = 1usize << kept.len();
        if entries.len() != dim * dim {
            return Err(Error::Dimension {
                n_qubits: kept.len(),
                expected: dim * dim,
                found: entries.len(),
            });
        }
        Ok(DensityMatrix { kept, dim, entries })
    }

    pub fn kept(&self) -> &QubitSet {
        &self.kept
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// Largest `|ρ_ij - ρ_ji*|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.dim {
            for j in i..self.dim {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }
}

/// `ρ_A = Tr_Ā |ψ⟩⟨ψ|` for the kept subset `keep`.
pub fn reduced_density(state: &PureState, keep: &QubitSet) -> Result<DensityMatrix> {
    let split = Split::new(state.n_qubits(), keep)?;
    DensityMatrix::from_entries(keep.clone(), split.reduce(state.amplitudes()))
}

/// `Tr ρ² = Σ_ij |ρ_ij|²`.
pub fn purity(rho: &DensityMatrix) -> f64 {
    frobenius_sqr(rho.entries())
}

pub(crate) fn frobenius_sqr(entries: &[Complex64]) -> f64 {
    entries.iter().map(|z| z.norm_sqr()).sum()
}

/// `π_A` for every subset `A` of size `⌊n/2⌋`, keyed by canonical subset.
pub fn all_balanced_purities(state: &PureState) -> Result<BTreeMap<QubitSet, f64>> {
    let n = state.n_qubits();
    if n < 2 {
        return Err(Error::Arity { min: 2, found: n });
    }
    balanced_subsets(n)
        .into_iter()
        .map(|keep| {
            let rho = reduced_density(state, &keep)?;
            Ok((keep, purity(&rho)))
        })
        .collect()
}
