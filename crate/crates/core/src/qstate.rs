//! Pure n-qubit states, the named four-qubit catalog, and single-qubit gates.
//!
//! Amplitude index `i` written in binary with `n` bits carries qubit 1 in the
//! most significant bit and qubit `n` in the least significant bit, so for
//! four qubits `a[1]` multiplies `|0001>` and `a[8]` multiplies `|1000>`.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on `|‖a‖ - 1|` accepted by [`NormalizePolicy::Strict`].
pub const STRICT_NORM_TOL: f64 = 1e-9;

/// Tolerance on `U†U = I` accepted by [`apply_local_unitary`].
pub const UNITARY_TOL: f64 = 1e-12;

/// What to do with an input vector that is not unit norm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NormalizePolicy {
    /// Reject inputs whose norm is off by more than [`STRICT_NORM_TOL`].
    #[default]
    Strict,
    /// Scale the input by `1/‖a‖`.
    Renormalize,
}

/// A normalized pure state of `n_qubits` qubits.
///
/// Immutable after construction; every value satisfies `len == 2^n` and unit
/// norm.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl PureState {
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amplitudes[index]
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    /// Squared norm `Σ|aᵢ|²`.
    pub fn norm_sqr(&self) -> f64 {
        norm_sqr(&self.amplitudes)
    }

    /// Computational basis state `|index>`.
    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        check_qubit_count(n_qubits)?;
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(Error::Dimension {
                n_qubits,
                expected: dim,
                found: index + 1,
            });
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(PureState {
            n_qubits,
            amplitudes,
        })
    }

    /// Haar-random state: i.i.d. standard normal real and imaginary parts,
    /// then normalized.
    pub fn random<R: Rng + ?Sized>(n_qubits: usize, rng: &mut R) -> Self {
        assert!((1..usize::BITS as usize).contains(&n_qubits));
        loop {
            let amplitudes: Vec<Complex64> = (0..1usize << n_qubits)
                .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
                .collect();
            if let Ok(s) = make_state(n_qubits, amplitudes, NormalizePolicy::Renormalize) {
                return s;
            }
        }
    }

    /// Relabel qubits: qubit `q` of `self` becomes qubit `perm[q - 1]` of the
    /// result (both 1-based). `perm` must be a permutation of `1..=n`.
    pub fn permute_qubits(&self, perm: &[usize]) -> Result<Self> {
        let n = self.n_qubits;
        let mut seen = vec![false; n];
        if perm.len() != n {
            return Err(Error::Subset(format!("permutation of length {} for {n} qubits", perm.len())));
        }
        for &p in perm {
            if p == 0 || p > n || seen[p - 1] {
                return Err(Error::Subset(format!("{perm:?} is not a permutation of 1..={n}")));
            }
            seen[p - 1] = true;
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim()];
        for (index, &a) in self.amplitudes.iter().enumerate() {
            let mut target = 0usize;
            for (q, &p) in perm.iter().enumerate() {
                if index & qubit_mask(n, q + 1) != 0 {
                    target |= qubit_mask(n, p);
                }
            }
            out[target] = a;
        }
        Ok(PureState {
            n_qubits: n,
            amplitudes: out,
        })
    }

    /// Read the JSON state-file format:
    /// `{"n": 4, "amplitudes": [[re, im], ...]}`.
    pub fn from_json_str(text: &str, policy: NormalizePolicy) -> Result<Self> {
        let file: StateFile =
            serde_json::from_str(text).map_err(|e| Error::StateFile(e.to_string()))?;
        let amplitudes = file
            .amplitudes
            .into_iter()
            .map(|[re, im]| Complex64::new(re, im))
            .collect();
        make_state(file.n, amplitudes, policy)
    }

    pub fn to_json_string(&self) -> String {
        let file = StateFile {
            n: self.n_qubits,
            amplitudes: self.amplitudes.iter().map(|a| [a.re, a.im]).collect(),
        };
        serde_json::to_string(&file).expect("state file serialization is infallible")
    }
}

/// On-disk JSON representation of a [`PureState`].
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub n: usize,
    pub amplitudes: Vec<[f64; 2]>,
}

fn norm_sqr(amps: &[Complex64]) -> f64 {
    amps.iter().map(|a| a.norm_sqr()).sum()
}

fn check_qubit_count(n_qubits: usize) -> Result<()> {
    if n_qubits == 0 {
        return Err(Error::Arity { min: 1, found: 0 });
    }
    // 2^n must fit in memory-addressable index space.
    if n_qubits >= usize::BITS as usize - 1 {
        return Err(Error::Dimension {
            n_qubits,
            expected: usize::MAX,
            found: 0,
        });
    }
    Ok(())
}

/// Bit mask of 1-based `qubit` inside an `n`-qubit basis index.
#[inline]
pub fn qubit_mask(n_qubits: usize, qubit: usize) -> usize {
    debug_assert!((1..=n_qubits).contains(&qubit));
    1usize << (n_qubits - qubit)
}

/// Build a validated state from raw amplitudes.
pub fn make_state(
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
    policy: NormalizePolicy,
) -> Result<PureState> {
    check_qubit_count(n_qubits)?;
    let expected = 1usize << n_qubits;
    if amplitudes.len() != expected {
        return Err(Error::Dimension {
            n_qubits,
            expected,
            found: amplitudes.len(),
        });
    }
    if amplitudes.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
        return Err(Error::Normalization {
            norm: f64::NAN,
            tol: STRICT_NORM_TOL,
        });
    }
    let nsq = norm_sqr(&amplitudes);
    if nsq == 0.0 {
        return Err(Error::DegenerateState);
    }
    if !nsq.is_finite() {
        return Err(Error::Normalization {
            norm: f64::INFINITY,
            tol: STRICT_NORM_TOL,
        });
    }
    let amplitudes = match policy {
        NormalizePolicy::Strict => {
            if (nsq.sqrt() - 1.0).abs() > STRICT_NORM_TOL {
                return Err(Error::Normalization {
                    norm: nsq.sqrt(),
                    tol: STRICT_NORM_TOL,
                });
            }
            amplitudes
        }
        NormalizePolicy::Renormalize => {
            let inv = 1.0 / nsq.sqrt();
            if !inv.is_finite() {
                return Err(Error::DegenerateState);
            }
            amplitudes.into_iter().map(|a| a * inv).collect()
        }
    };
    Ok(PureState {
        n_qubits,
        amplitudes,
    })
}

/// 2×2 complex matrix in row-major order.
pub type Matrix2 = [[Complex64; 2]; 2];

/// Conjugate transpose of a 2×2 matrix.
pub fn dagger(u: &Matrix2) -> Matrix2 {
    [
        [u[0][0].conj(), u[1][0].conj()],
        [u[0][1].conj(), u[1][1].conj()],
    ]
}

/// Largest entry of `|U†U - I|`.
pub fn unitarity_defect(u: &Matrix2) -> f64 {
    let ud = dagger(u);
    let mut worst: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            let mut s = ud[i][0] * u[0][j] + ud[i][1] * u[1][j];
            if i == j {
                s -= 1.0;
            }
            worst = worst.max(s.norm());
        }
    }
    worst
}

/// Haar-random 2×2 unitary (QR of a complex Ginibre matrix with phase fix).
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R) -> Matrix2 {
    let mut g = |_: ()| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
    let c0 = [g(()), g(())];
    let c1 = [g(()), g(())];
    // Gram-Schmidt on the columns.
    let n0 = (c0[0].norm_sqr() + c0[1].norm_sqr()).sqrt();
    let q0 = [c0[0] / n0, c0[1] / n0];
    let proj = q0[0].conj() * c1[0] + q0[1].conj() * c1[1];
    let r1 = [c1[0] - proj * q0[0], c1[1] - proj * q0[1]];
    let n1 = (r1[0].norm_sqr() + r1[1].norm_sqr()).sqrt();
    let q1 = [r1[0] / n1, r1[1] / n1];
    [[q0[0], q1[0]], [q0[1], q1[1]]]
}

/// Apply `u` to 1-based `qubit`.
pub fn apply_local_unitary(state: &PureState, qubit: usize, u: &Matrix2) -> Result<PureState> {
    let n = state.n_qubits;
    if qubit == 0 || qubit > n {
        return Err(Error::QubitIndex { qubit, n_qubits: n });
    }
    let defect = unitarity_defect(u);
    if !(defect <= UNITARY_TOL) {
        return Err(Error::NotUnitary(defect));
    }
    let mask = qubit_mask(n, qubit);
    let mut out = state.amplitudes.clone();
    for i0 in (0..state.dim()).filter(|i| i & mask == 0) {
        let i1 = i0 | mask;
        let (a0, a1) = (state.amplitudes[i0], state.amplitudes[i1]);
        out[i0] = u[0][0] * a0 + u[0][1] * a1;
        out[i1] = u[1][0] * a0 + u[1][1] * a1;
    }
    Ok(PureState {
        n_qubits: n,
        amplitudes: out,
    })
}

/// One named state from the four-qubit catalog.
#[derive(Clone, Copy)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub variant: &'static str,
    pub description: &'static str,
    builder: fn() -> Vec<(usize, Complex64)>,
}

impl CatalogEntry {
    /// `name/variant`.
    pub fn key(&self) -> String {
        format!("{}/{}", self.name, self.variant)
    }

    pub fn build(&self) -> PureState {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 16];
        for (i, a) in (self.builder)() {
            amplitudes[i] = a;
        }
        PureState {
            n_qubits: 4,
            amplitudes,
        }
    }
}

impl fmt::Debug for CatalogEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CatalogEntry")
            .field("name", &self.name)
            .field("variant", &self.variant)
            .finish()
    }
}

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn inv_sqrt6() -> f64 {
    (1.0f64 / 6.0).sqrt()
}

fn inv_2sqrt2() -> f64 {
    FRAC_1_SQRT_2 / 2.0
}

/// Primitive cube root of unity `e^{2iπ/3}`.
pub fn omega() -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI / 3.0)
}

fn uniform(indices: &[usize], value: f64) -> Vec<(usize, Complex64)> {
    indices.iter().map(|&i| (i, re(value))).collect()
}

static CATALOG: &[CatalogEntry] = &[
    CatalogEntry {
        name: "hs",
        variant: "omega",
        description: "Higuchi-Sudbery state built from cube roots of unity",
        builder: || {
            let c = inv_sqrt6();
            let w = omega();
            let w2 = w * w;
            vec![
                (3, re(c)),
                (12, re(c)),
                (5, w * c),
                (10, w * c),
                (6, w2 * c),
                (9, w2 * c),
            ]
        },
    },
    CatalogEntry {
        name: "eq7",
        variant: "uniform",
        description: "equal weights on the six weight-2 basis kets",
        builder: || uniform(&[3, 5, 6, 9, 10, 12], inv_sqrt6()),
    },
    CatalogEntry {
        name: "yc",
        variant: "signs",
        description: "Yeo-Chua genuine four-qubit entangled state (sign pattern)",
        builder: || {
            let c = inv_2sqrt2();
            vec![
                (0, re(c)),
                (3, re(-c)),
                (5, re(-c)),
                (6, re(c)),
                (9, re(c)),
                (10, re(c)),
                (12, re(c)),
                (15, re(c)),
            ]
        },
    },
    CatalogEntry {
        name: "yc",
        variant: "phases",
        description: "Yeo-Chua support with phases 1, e^{iπ/4}, e^{iπ/2}, e^{3iπ/4}",
        builder: || {
            let c = inv_2sqrt2();
            let p1 = Complex64::from_polar(c, PI / 4.0);
            let p2 = Complex64::new(0.0, c);
            let p3 = Complex64::from_polar(c, 3.0 * PI / 4.0);
            vec![
                (0, re(c)),
                (15, re(c)),
                (3, p1),
                (12, p1),
                (5, p2),
                (10, p2),
                (6, p3),
                (9, p3),
            ]
        },
    },
    CatalogEntry {
        name: "eq9",
        variant: "uniform",
        description: "equal weights on the eight even-parity basis kets",
        builder: || uniform(&[0, 3, 5, 6, 9, 10, 12, 15], inv_2sqrt2()),
    },
    CatalogEntry {
        name: "cluster",
        variant: "sign",
        description: "four-qubit cluster state (|0000>+|0101>+|1010>-|1111>)/2",
        builder: || vec![(0, re(0.5)), (5, re(0.5)), (10, re(0.5)), (15, re(-0.5))],
    },
    CatalogEntry {
        name: "cluster",
        variant: "phase",
        description: "cluster support with a5 = a10 = i/2",
        builder: || {
            let ih = Complex64::new(0.0, 0.5);
            vec![(0, re(0.5)), (15, re(0.5)), (5, ih), (10, ih)]
        },
    },
    CatalogEntry {
        name: "eq11",
        variant: "uniform",
        description: "equal weights on |0000>, |0101>, |1010>, |1111>",
        builder: || uniform(&[0, 5, 10, 15], 0.5),
    },
    CatalogEntry {
        name: "brown",
        variant: "phases",
        description: "Brown-type state with a6 = a11 = i/(2√2)",
        builder: || {
            let c = inv_2sqrt2();
            vec![
                (0, re(0.5)),
                (13, re(0.5)),
                (3, re(c)),
                (14, re(c)),
                (6, Complex64::new(0.0, c)),
                (11, Complex64::new(0.0, c)),
            ]
        },
    },
    CatalogEntry {
        name: "brown",
        variant: "signs",
        description: "Brown-type state with a14 = -1/(2√2)",
        builder: || {
            let c = inv_2sqrt2();
            vec![
                (0, re(0.5)),
                (13, re(0.5)),
                (3, re(c)),
                (6, re(c)),
                (11, re(c)),
                (14, re(-c)),
            ]
        },
    },
    CatalogEntry {
        name: "eq13",
        variant: "uniform",
        description: "equal weights on the Brown-type support",
        builder: || uniform(&[0, 3, 6, 11, 13, 14], inv_sqrt6()),
    },
];

/// Every catalog entry, in a stable order.
pub fn catalog() -> &'static [CatalogEntry] {
    CATALOG
}

/// Look up a catalog state by `name` and `variant`.
pub fn catalog_state(name: &str, variant: &str) -> Result<PureState> {
    CATALOG
        .iter()
        .find(|e| e.name == name && e.variant == variant)
        .map(CatalogEntry::build)
        .ok_or_else(|| Error::CatalogMiss(format!("{name}/{variant}")))
}

/// Look up a catalog state by its `name/variant` key.
pub fn catalog_lookup(key: &str) -> Result<PureState> {
    let (name, variant) = key
        .split_once('/')
        .ok_or_else(|| Error::CatalogMiss(key.to_string()))?;
    catalog_state(name, variant)
}
