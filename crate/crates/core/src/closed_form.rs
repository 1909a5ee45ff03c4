//! Explicit four-qubit formulas for the six balanced purities and for the
//! criterion polynomial `K = K₁ + K₂`.
//!
//! Nothing here calls into [`crate::reduction`]; the two routes are compared
//! in tests.
//!
//! # Purities
//!
//! For a kept pair `A` with traced pair `Ā`, write the state as four blocks
//! of four amplitudes that share the kept bits. Then
//!
//! ```text
//! π_A = Σ_x (Σ_z |a(x,z)|²)²  +  2 Σ_{x<y} |Σ_z a(x,z) a*(y,z)|²
//! ```
//!
//! The block index sets for every pair are stored in [`PRINTED_PAIR_TABLES`]
//! exactly as published (group order and cross-term order included).
//!
//! # The criterion polynomial
//!
//! `K₂` is the sum of all 36 doubled cross-overlaps (six per pair); it is
//! generated from the bit structure by [`k2_terms`]. `K₁` is the diagonal
//! quartic
//!
//! ```text
//! K₁ = 4 Σ_i |a_i|⁴ + Σ_{i<j} w(d_ij) |a_i|² |a_j|²,   w = (+2, −2, −4, −4) for d = 1..4
//! ```
//!
//! where `d_ij` is the Hamming distance of the 4-bit indices. A pair at
//! distance `d` shares a block in `C(4−d, 2)` of the six bipartitions, which
//! together with `(Σ|a_i|²)² = 1` gives those weights. The published `K₁`
//! table drops the `|a₁₂|²` row and has six coefficients that disagree with
//! the rule; [`k1_printed_report`] lists them.
//!
//! With these definitions `K₁ + K₂ = 2(3π_ME − 1)` identically on normalized
//! states ([`K_SCALE`]). This is the normalization under which the published
//! example values (`K = 1`, `K = 5/9`, `K = 0`) hold, so `K = 0` exactly when
//! `π_ME = 1/3`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qstate::PureState;

/// `K₁ + K₂ = K_SCALE · (3π_ME − 1)` on every normalized four-qubit state.
pub const K_SCALE: f64 = 2.0;

/// Block index sets for one kept pair: four groups of four amplitudes
/// (same kept bits), and the six cross-overlaps `Σ_k a[left_k] a*[right_k]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairTable {
    pub pair: (usize, usize),
    pub groups: [[usize; 4]; 4],
    pub crosses: [([usize; 4], [usize; 4]); 6],
}

/// The published block structure of `π₁₂, π₁₃, π₁₄, π₂₃, π₂₄, π₃₄`.
pub const PRINTED_PAIR_TABLES: [PairTable; 6] = [
    PairTable {
        pair: (1, 2),
        groups: [[0, 1, 2, 3], [4, 5, 6, 7], [8, 9, 10, 11], [12, 13, 14, 15]],
        crosses: [
            ([0, 1, 2, 3], [4, 5, 6, 7]),
            ([0, 1, 2, 3], [8, 9, 10, 11]),
            ([0, 1, 2, 3], [12, 13, 14, 15]),
            ([4, 5, 6, 7], [8, 9, 10, 11]),
            ([4, 5, 6, 7], [12, 13, 14, 15]),
            ([8, 9, 10, 11], [12, 13, 14, 15]),
        ],
    },
    PairTable {
        pair: (1, 3),
        groups: [[0, 1, 4, 5], [2, 3, 6, 7], [8, 9, 12, 13], [10, 11, 14, 15]],
        crosses: [
            ([0, 1, 4, 5], [2, 3, 6, 7]),
            ([0, 1, 4, 5], [8, 9, 12, 13]),
            ([2, 3, 6, 7], [8, 9, 12, 13]),
            ([2, 3, 6, 7], [10, 11, 14, 15]),
            ([0, 1, 4, 5], [10, 11, 14, 15]),
            ([8, 9, 12, 13], [10, 11, 14, 15]),
        ],
    },
    PairTable {
        pair: (1, 4),
        groups: [[0, 2, 4, 6], [1, 3, 5, 7], [8, 10, 12, 14], [9, 11, 13, 15]],
        crosses: [
            ([0, 2, 4, 6], [1, 3, 5, 7]),
            ([0, 2, 4, 6], [8, 10, 12, 14]),
            ([1, 3, 5, 7], [8, 10, 12, 14]),
            ([1, 3, 5, 7], [9, 11, 13, 15]),
            ([0, 2, 4, 6], [9, 11, 13, 15]),
            ([8, 10, 12, 14], [9, 11, 13, 15]),
        ],
    },
    PairTable {
        pair: (2, 3),
        groups: [[0, 1, 8, 9], [2, 3, 10, 11], [4, 5, 12, 13], [6, 7, 14, 15]],
        crosses: [
            ([0, 1, 8, 9], [4, 5, 12, 13]),
            ([0, 1, 8, 9], [2, 3, 10, 11]),
            ([2, 3, 10, 11], [4, 5, 12, 13]),
            ([4, 5, 12, 13], [6, 7, 14, 15]),
            ([0, 1, 8, 9], [6, 7, 14, 15]),
            ([2, 3, 10, 11], [6, 7, 14, 15]),
        ],
    },
    PairTable {
        pair: (2, 4),
        groups: [[0, 2, 8, 10], [1, 3, 9, 11], [4, 6, 12, 14], [5, 7, 13, 15]],
        crosses: [
            ([0, 2, 8, 10], [4, 6, 12, 14]),
            ([0, 2, 8, 10], [1, 3, 9, 11]),
            ([1, 3, 9, 11], [4, 6, 12, 14]),
            ([4, 6, 12, 14], [5, 7, 13, 15]),
            ([0, 2, 8, 10], [5, 7, 13, 15]),
            ([1, 3, 9, 11], [5, 7, 13, 15]),
        ],
    },
    PairTable {
        pair: (3, 4),
        groups: [[0, 4, 8, 12], [1, 5, 9, 13], [2, 6, 10, 14], [3, 7, 11, 15]],
        crosses: [
            ([0, 4, 8, 12], [2, 6, 10, 14]),
            ([0, 4, 8, 12], [1, 5, 9, 13]),
            ([1, 5, 9, 13], [2, 6, 10, 14]),
            ([2, 6, 10, 14], [3, 7, 11, 15]),
            ([0, 4, 8, 12], [3, 7, 11, 15]),
            ([1, 5, 9, 13], [3, 7, 11, 15]),
        ],
    },
];

/// The six balanced purities of a four-qubit state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairPurities {
    pub pi12: f64,
    pub pi13: f64,
    pub pi14: f64,
    pub pi23: f64,
    pub pi24: f64,
    pub pi34: f64,
}

impl PairPurities {
    /// `(pair, value)` in the order 12, 13, 14, 23, 24, 34.
    pub fn entries(&self) -> [((usize, usize), f64); 6] {
        [
            ((1, 2), self.pi12),
            ((1, 3), self.pi13),
            ((1, 4), self.pi14),
            ((2, 3), self.pi23),
            ((2, 4), self.pi24),
            ((3, 4), self.pi34),
        ]
    }

    pub fn mean(&self) -> f64 {
        (self.pi12 + self.pi13 + self.pi14 + self.pi23 + self.pi24 + self.pi34) / 6.0
    }
}

/// `K₁`, `K₂` and their sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KDecomposition {
    pub k1: f64,
    pub k2: f64,
    pub k_total: f64,
}

fn require_four(state: &PureState) -> Result<&[Complex64]> {
    if state.n_qubits() != 4 {
        return Err(Error::WrongQubitCount {
            expected: 4,
            found: state.n_qubits(),
        });
    }
    Ok(state.amplitudes())
}

#[inline]
fn overlap(a: &[Complex64], left: &[usize; 4], right: &[usize; 4]) -> Complex64 {
    left.iter().zip(right).map(|(&l, &r)| a[l] * a[r].conj()).sum()
}

fn table_purity(a: &[Complex64], t: &PairTable) -> f64 {
    let diag: f64 = t
        .groups
        .iter()
        .map(|g| g.iter().map(|&i| a[i].norm_sqr()).sum::<f64>().powi(2))
        .sum();
    let cross: f64 = t
        .crosses
        .iter()
        .map(|(l, r)| 2.0 * overlap(a, l, r).norm_sqr())
        .sum();
    diag + cross
}

/// The six purities from the published block formulas.
pub fn pair_purities(state: &PureState) -> Result<PairPurities> {
    let a = require_four(state)?;
    let [p12, p13, p14, p23, p24, p34] = PRINTED_PAIR_TABLES.map(|t| table_purity(a, &t));
    Ok(PairPurities {
        pi12: p12,
        pi13: p13,
        pi14: p14,
        pi23: p23,
        pi24: p24,
        pi34: p34,
    })
}

/// One doubled cross-overlap `2|Σ_k a[left_k] a*[right_k]|²` of `K₂`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OverlapTerm {
    pub pair: (usize, usize),
    pub left: [usize; 4],
    pub right: [usize; 4],
}

/// Basis index with kept bits `x` on qubits `pair` and traced bits `z` on the
/// other two (each pattern's first qubit most significant).
fn compose(pair: (usize, usize), x: usize, z: usize) -> usize {
    let traced: Vec<usize> = (1..=4).filter(|&q| q != pair.0 && q != pair.1).collect();
    let bit = |q: usize| 1usize << (4 - q);
    let mut i = 0;
    if x & 2 != 0 {
        i |= bit(pair.0);
    }
    if x & 1 != 0 {
        i |= bit(pair.1);
    }
    if z & 2 != 0 {
        i |= bit(traced[0]);
    }
    if z & 1 != 0 {
        i |= bit(traced[1]);
    }
    i
}

/// The 36 cross-overlap terms of `K₂`, six per kept pair (pairs in the order
/// 12, 13, 14, 23, 24, 34; within a pair, `(x, y)` with `x < y`).
pub fn k2_terms() -> Vec<OverlapTerm> {
    let mut terms = Vec::with_capacity(36);
    for p in 1..=4 {
        for q in p + 1..=4 {
            for x in 0..4 {
                for y in x + 1..4 {
                    let left = [0, 1, 2, 3].map(|z| compose((p, q), x, z));
                    let right = [0, 1, 2, 3].map(|z| compose((p, q), y, z));
                    terms.push(OverlapTerm {
                        pair: (p, q),
                        left,
                        right,
                    });
                }
            }
        }
    }
    terms
}

/// `K₂ = Σ 2|overlap|²` over [`k2_terms`]; always `≥ 0`.
pub fn k2_value(state: &PureState) -> Result<f64> {
    let a = require_four(state)?;
    Ok(k2_terms()
        .iter()
        .map(|t| 2.0 * overlap(a, &t.left, &t.right).norm_sqr())
        .sum())
}

/// Coefficient of `|a_i|²|a_j|²` (`i ≠ j`) in `K₁`, by Hamming distance.
pub fn k1_pair_weight(i: usize, j: usize) -> i32 {
    match (i ^ j).count_ones() {
        1 => 2,
        2 => -2,
        3 | 4 => -4,
        d => panic!("pair weight undefined for Hamming distance {d}"),
    }
}

/// `K₁` from the Hamming-distance rule.
pub fn k1_value(state: &PureState) -> Result<f64> {
    let a = require_four(state)?;
    let p: Vec<f64> = a.iter().map(|z| z.norm_sqr()).collect();
    let quartic: f64 = 4.0 * p.iter().map(|x| x * x).sum::<f64>();
    let mut pairs = 0.0;
    for i in 0..16 {
        for j in i + 1..16 {
            pairs += f64::from(k1_pair_weight(i, j)) * p[i] * p[j];
        }
    }
    Ok(quartic + pairs)
}

/// `K₁`, `K₂` and `K = K₁ + K₂` from closed forms only.
pub fn k_total(state: &PureState) -> Result<KDecomposition> {
    let k1 = k1_value(state)?;
    let k2 = k2_value(state)?;
    Ok(KDecomposition {
        k1,
        k2,
        k_total: k1 + k2,
    })
}

/// Published `K₁` pair coefficients, row `i` listing `j = i+1..15`.
/// Row 12 is absent from the published table.
pub const PRINTED_K1_ROWS: [(usize, &[i32]); 15] = [
    (0, &[2, 2, -2, 2, -2, -2, -4, 2, -2, -2, -4, -2, -4, -4, -4]),
    (1, &[-2, 2, -2, 2, -4, -2, -2, 2, -4, -2, -4, -2, -4, -4]),
    (2, &[2, -2, -4, 2, -2, -2, -4, 2, -2, -4, -4, -2, -4]),
    (3, &[-4, -2, -2, 2, -4, -2, -2, 2, -4, -4, -4, -2]),
    (4, &[2, 2, -2, -2, -4, -4, -4, 2, -2, -2, -4]),
    (5, &[-2, 2, -4, -2, -4, -4, -2, 2, -4, -2]),
    (6, &[2, -4, -4, -4, -4, -4, -2, -2, 2]),
    (7, &[-4, -4, -4, -2, -4, -2, -2, 2]),
    (8, &[2, 2, -2, 2, -2, -2, -4]),
    (9, &[-2, 2, -2, 2, -4, -2]),
    (10, &[2, -2, -4, 2, -2]),
    (11, &[-4, -2, -2, 2]),
    (12, &[]),
    (13, &[-2, -2]),
    (14, &[2]),
];

/// Published `K₁` coefficient of `|a_i|²|a_j|²` (`i < j`), or `None` when the
/// term does not appear.
pub fn printed_k1_weight(i: usize, j: usize) -> Option<i32> {
    let (_, row) = PRINTED_K1_ROWS.iter().find(|(r, _)| *r == i)?;
    row.get(j.checked_sub(i + 1)?).copied()
}

/// One disagreement between the published `K₁` table and the rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct K1Discrepancy {
    pub i: usize,
    pub j: usize,
    pub hamming: u32,
    /// `None` when the term is missing from the published table.
    pub printed: Option<i32>,
    pub rule: i32,
}

/// Term-by-term comparison of the published `K₁` pair coefficients with
/// [`k1_pair_weight`], in `(i, j)` order.
pub fn k1_printed_report() -> Vec<K1Discrepancy> {
    let mut out = Vec::new();
    for i in 0..16 {
        for j in i + 1..16 {
            let rule = k1_pair_weight(i, j);
            let printed = printed_k1_weight(i, j);
            if printed != Some(rule) {
                out.push(K1Discrepancy {
                    i,
                    j,
                    hamming: (i ^ j).count_ones(),
                    printed,
                    rule,
                });
            }
        }
    }
    out
}

/// Two cross-overlaps, each a pair of index quadruples.
pub type CrossPair = [([usize; 4], [usize; 4]); 2];

/// First and last published `K₂` cross-term of each six-term block.
pub const PRINTED_K2_BLOCK_ENDS: [((usize, usize), CrossPair); 6] = [
    ((1, 2), [([0, 1, 2, 3], [4, 5, 6, 7]), ([8, 9, 10, 11], [12, 13, 14, 15])]),
    ((1, 3), [([0, 1, 4, 5], [2, 3, 6, 7]), ([8, 9, 12, 13], [10, 11, 14, 15])]),
    ((1, 4), [([0, 2, 4, 6], [1, 3, 5, 7]), ([8, 10, 12, 14], [9, 11, 13, 15])]),
    ((2, 3), [([0, 1, 8, 9], [4, 5, 12, 13]), ([2, 3, 10, 11], [6, 7, 14, 15])]),
    ((2, 4), [([0, 2, 8, 10], [4, 6, 12, 14]), ([1, 3, 9, 11], [5, 7, 13, 15])]),
    ((3, 4), [([0, 4, 8, 12], [2, 6, 10, 14]), ([1, 5, 9, 13], [3, 7, 11, 15])]),
];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::{catalog_lookup, make_state, NormalizePolicy};
    use std::collections::BTreeSet;
    use std::f64::consts::FRAC_1_SQRT_2;

    /// Orientation-free form of an overlap: the set of `{l, r}` index pairs.
    fn pairs_of(l: &[usize; 4], r: &[usize; 4]) -> BTreeSet<(usize, usize)> {
        l.iter().zip(r).map(|(&a, &b)| (a.min(b), a.max(b))).collect()
    }

    #[test]
    fn generated_k2_terms_match_printed_tables() {
        let terms = k2_terms();
        assert_eq!(terms.len(), 36);
        for table in PRINTED_PAIR_TABLES {
            let generated: BTreeSet<_> = terms
                .iter()
                .filter(|t| t.pair == table.pair)
                .map(|t| pairs_of(&t.left, &t.right))
                .collect();
            let printed: BTreeSet<_> = table.crosses.iter().map(|(l, r)| pairs_of(l, r)).collect();
            assert_eq!(generated, printed, "pair {:?}", table.pair);
            // Printed groups are exactly the generated left/right blocks.
            let gen_groups: BTreeSet<[usize; 4]> = terms
                .iter()
                .filter(|t| t.pair == table.pair)
                .flat_map(|t| [t.left, t.right])
                .collect();
            let printed_groups: BTreeSet<[usize; 4]> = table.groups.into_iter().collect();
            assert_eq!(gen_groups, printed_groups);
        }
    }

    #[test]
    fn generated_k2_terms_contain_printed_block_ends() {
        let terms = k2_terms();
        for (pair, ends) in PRINTED_K2_BLOCK_ENDS {
            for (l, r) in ends {
                assert!(
                    terms.iter().any(|t| t.pair == pair && pairs_of(&t.left, &t.right) == pairs_of(&l, &r)),
                    "{pair:?}: {l:?} / {r:?}"
                );
            }
        }
    }

    #[test]
    fn printed_k1_comparison_report() {
        let report = k1_printed_report();
        let got: Vec<(usize, usize, Option<i32>, i32)> =
            report.iter().map(|d| (d.i, d.j, d.printed, d.rule)).collect();
        assert_eq!(
            got,
            vec![
                (6, 10, Some(-4), -2),
                (6, 12, Some(-4), -2),
                (6, 13, Some(-2), -4),
                (6, 14, Some(-2), 2),
                (6, 15, Some(2), -2),
                (12, 13, None, 2),
                (12, 14, None, 2),
                (12, 15, None, -2),
                (13, 15, Some(-2), 2),
            ]
        );
        for row in PRINTED_K1_ROWS {
            if row.0 != 12 {
                assert_eq!(row.1.len(), 15 - row.0);
            }
        }
    }

    #[test]
    fn rule_weights_follow_shared_block_counts() {
        // weight = 2·C(4-d, 2) - 4, from the diagonal blocks and (Σp)² = 1.
        let choose2 = |m: i32| m * (m - 1) / 2;
        for i in 0..16usize {
            for j in i + 1..16 {
                let d = (i ^ j).count_ones() as i32;
                assert_eq!(k1_pair_weight(i, j), 2 * choose2(4 - d) - 4);
            }
        }
    }

    #[test]
    fn k_values_on_examples() {
        let zero = PureState::basis(4, 0).unwrap();
        assert_eq!(k2_value(&zero).unwrap(), 0.0);
        assert_eq!(k1_value(&zero).unwrap(), 4.0);

        let mut a = vec![Complex64::new(0.0, 0.0); 16];
        a[0] = Complex64::new(FRAC_1_SQRT_2, 0.0);
        a[15] = Complex64::new(FRAC_1_SQRT_2, 0.0);
        let ghz = make_state(4, a, NormalizePolicy::Strict).unwrap();
        assert!((k1_value(&ghz).unwrap() - 1.0).abs() < 1e-15);
        assert!(k2_value(&ghz).unwrap().abs() < 1e-15);

        let eq7 = catalog_lookup("eq7/uniform").unwrap();
        assert!((k2_value(&eq7).unwrap() - 4.0 / 3.0).abs() < 1e-14);
        assert!((k_total(&eq7).unwrap().k_total - 1.0).abs() < 1e-12);

        let hs = catalog_lookup("hs/omega").unwrap();
        assert!(k_total(&hs).unwrap().k_total.abs() < 1e-12);
        let e13 = catalog_lookup("eq13/uniform").unwrap();
        assert!((k_total(&e13).unwrap().k_total - 5.0 / 9.0).abs() < 1e-12);
        let e11 = catalog_lookup("eq11/uniform").unwrap();
        assert!((k_total(&e11).unwrap().k_total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pair_purities_on_examples() {
        let hs = pair_purities(&catalog_lookup("hs/omega").unwrap()).unwrap();
        for (_, v) in hs.entries() {
            assert!((v - 1.0 / 3.0).abs() < 1e-15);
        }
        let yc = pair_purities(&catalog_lookup("yc/signs").unwrap()).unwrap();
        assert!((yc.pi12 - 0.25).abs() < 1e-15);
        assert!((yc.pi13 - 0.25).abs() < 1e-15);
        assert!((yc.pi14 - 0.5).abs() < 1e-15);
        let eq7 = pair_purities(&catalog_lookup("eq7/uniform").unwrap()).unwrap();
        for (_, v) in eq7.entries() {
            assert!((v - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn arity_errors() {
        let s = PureState::basis(3, 0).unwrap();
        assert!(matches!(pair_purities(&s), Err(Error::WrongQubitCount { expected: 4, found: 3 })));
        assert!(k1_value(&s).is_err());
        assert!(k2_value(&s).is_err());
        assert!(k_total(&s).is_err());
    }
}
