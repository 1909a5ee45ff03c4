//! The potential of multipartite entanglement and the four-qubit MMES verdict.
//!
//! `π_ME` averages the purity `π_A = Tr ρ_A²` over every subset `A` of size
//! `⌊n/2⌋`, complements included, so for four qubits it is the mean of the
//! six pair purities. It is minimized by maximally multipartite entangled
//! states; for four qubits the minimum is `1/3`, reached exactly when the
//! closed-form `K = K₁ + K₂` vanishes.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::closed_form::{self, K_SCALE};
use crate::error::{Error, Result};
use crate::numfmt::fmt_sig;
use crate::qstate::PureState;
use crate::reduction::all_balanced_purities;

/// Default tolerance on `K` (four qubits) or `π_ME − bound` for an MMES verdict.
pub const DEFAULT_TOL: f64 = 1e-8;

/// Best known minimum of `π_ME`, where one is registered.
pub fn known_lower_bound(n_qubits: usize) -> Option<f64> {
    match n_qubits {
        4 => Some(1.0 / 3.0),
        _ => None,
    }
}

/// Mean balanced purity, computed through explicit partial traces.
pub fn pi_me(state: &PureState) -> Result<f64> {
    let n = state.n_qubits();
    if n < 2 {
        return Err(Error::Arity { min: 2, found: n });
    }
    let purities = all_balanced_purities(state)?;
    Ok(purities.values().sum::<f64>() / purities.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Mmes,
    NotMmes,
}

/// Everything known about one state's balanced bipartitions.
///
/// Serializes to
/// `{n, purities: {"12": x, ...}, pi_me, k1, k2, k_total, verdict, tol, ...}`;
/// the K fields are `null` unless `n = 4`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BipartitionReport {
    pub n: usize,
    pub purities: BTreeMap<String, f64>,
    pub pi_me: f64,
    pub k1: Option<f64>,
    pub k2: Option<f64>,
    pub k_total: Option<f64>,
    pub verdict: Verdict,
    pub tol: f64,
    /// `3π_ME − 1`; equals `k_total / 2` for four qubits.
    pub three_pi_me_minus_one: f64,
    pub lower_bound: Option<f64>,
    /// Set when no verdict could be grounded in a known bound.
    pub note: Option<String>,
}

impl BipartitionReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization is infallible")
    }

    /// Human-readable summary, numbers to 12 significant digits.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "qubits: {}", self.n);
        for (k, v) in &self.purities {
            let _ = writeln!(s, "  pi_{k} = {}", fmt_sig(*v, 12));
        }
        let _ = writeln!(s, "pi_ME = {}", fmt_sig(self.pi_me, 12));
        let _ = writeln!(s, "3*pi_ME - 1 = {}", fmt_sig(self.three_pi_me_minus_one, 12));
        if let (Some(k1), Some(k2), Some(k)) = (self.k1, self.k2, self.k_total) {
            let _ = writeln!(s, "K1 = {}", fmt_sig(k1, 12));
            let _ = writeln!(s, "K2 = {}", fmt_sig(k2, 12));
            let _ = writeln!(s, "K = K1 + K2 = {}", fmt_sig(k, 12));
        }
        let verdict = match self.verdict {
            Verdict::Mmes => "mmes",
            Verdict::NotMmes => "not_mmes",
        };
        let _ = writeln!(s, "verdict: {verdict} (tol {:e})", self.tol);
        if let Some(note) = &self.note {
            let _ = writeln!(s, "note: {note}");
        }
        s
    }
}

/// Build the full report. For four qubits the verdict is `K ≤ tol`; for
/// other sizes it is `π_ME − bound ≤ tol` when a bound is registered.
pub fn analyze(state: &PureState, tol: f64) -> Result<BipartitionReport> {
    let n = state.n_qubits();
    if n < 2 {
        return Err(Error::Arity { min: 2, found: n });
    }
    if !(tol > 0.0) {
        return Err(Error::Config(format!("tolerance must be positive, got {tol}")));
    }
    let map = all_balanced_purities(state)?;
    let pi_me = map.values().sum::<f64>() / map.len() as f64;
    let purities: BTreeMap<String, f64> = map.into_iter().map(|(k, v)| (k.key(), v)).collect();
    let lower_bound = known_lower_bound(n);

    let (k1, k2, k_total) = if n == 4 {
        let k = closed_form::k_total(state)?;
        (Some(k.k1), Some(k.k2), Some(k.k_total))
    } else {
        (None, None, None)
    };

    let (verdict, note) = match (k_total, lower_bound) {
        (Some(k), _) => (if k <= tol { Verdict::Mmes } else { Verdict::NotMmes }, None),
        (None, Some(bound)) => (
            if pi_me - bound <= tol { Verdict::Mmes } else { Verdict::NotMmes },
            None,
        ),
        (None, None) => (
            Verdict::NotMmes,
            Some(format!("no known lower bound for n = {n}; verdict not established")),
        ),
    };

    Ok(BipartitionReport {
        n,
        purities,
        pi_me,
        k1,
        k2,
        k_total,
        verdict,
        tol,
        three_pi_me_minus_one: 3.0 * pi_me - 1.0,
        lower_bound,
        note,
    })
}

/// `K` reconstructed from `π_ME` via the scale identity.
pub fn k_from_pi_me(pi_me: f64) -> f64 {
    K_SCALE * (3.0 * pi_me - 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::{apply_local_unitary, catalog_lookup, random_unitary};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn pi_me_examples() {
        assert_eq!(pi_me(&PureState::basis(4, 0).unwrap()).unwrap(), 1.0);
        let hs = catalog_lookup("hs/omega").unwrap();
        assert!((pi_me(&hs).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        let eq7 = catalog_lookup("eq7/uniform").unwrap();
        assert!((pi_me(&eq7).unwrap() - 0.5).abs() < 1e-15);
        assert!(matches!(
            pi_me(&PureState::basis(1, 0).unwrap()),
            Err(Error::Arity { min: 2, found: 1 })
        ));
    }

    #[test]
    fn analyze_examples() {
        let r = analyze(&catalog_lookup("hs/omega").unwrap(), DEFAULT_TOL).unwrap();
        assert_eq!(r.verdict, Verdict::Mmes);
        assert!(r.k_total.unwrap().abs() < 1e-12);
        assert!((r.pi_me - 1.0 / 3.0).abs() < 1e-12);

        let r = analyze(&catalog_lookup("eq9/uniform").unwrap(), DEFAULT_TOL).unwrap();
        assert_eq!(r.verdict, Verdict::NotMmes);
        assert!((r.k_total.unwrap() - 1.0).abs() < 1e-12);

        let r = analyze(&catalog_lookup("brown/signs").unwrap(), DEFAULT_TOL).unwrap();
        assert_eq!(r.verdict, Verdict::Mmes);
        assert!(r.k_total.unwrap().abs() < 1e-12);
    }

    #[test]
    fn report_mean_and_scale() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let s = PureState::random(4, &mut rng);
            let r = analyze(&s, DEFAULT_TOL).unwrap();
            let mean = r.purities.values().sum::<f64>() / r.purities.len() as f64;
            assert!((r.pi_me - mean).abs() < 1e-12);
            assert!((r.k_total.unwrap() - k_from_pi_me(r.pi_me)).abs() < 1e-9);
            assert_eq!(r.verdict, Verdict::NotMmes);
        }
    }

    #[test]
    fn other_sizes_report_without_verdict_claim() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let s = PureState::random(5, &mut rng);
        let r = analyze(&s, DEFAULT_TOL).unwrap();
        assert_eq!(r.purities.len(), 10);
        assert!(r.k_total.is_none());
        assert_eq!(r.verdict, Verdict::NotMmes);
        assert!(r.note.is_some());
        assert!(analyze(&s, 0.0).is_err());
    }

    #[test]
    fn json_shape() {
        let r = analyze(&catalog_lookup("yc/signs").unwrap(), DEFAULT_TOL).unwrap();
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["n"], 4);
        assert_eq!(v["purities"]["14"].as_f64().unwrap(), r.purities["14"]);
        assert_eq!(v["verdict"], "mmes");
        for key in ["pi_me", "k1", "k2", "k_total", "tol"] {
            assert!(v[key].is_number(), "{key}");
        }
        let back: BipartitionReport = serde_json::from_value(v).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn invariant_under_local_unitaries_and_relabeling() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..50 {
            let n = rng.random_range(2..=6);
            let s = PureState::random(n, &mut rng);
            let base = pi_me(&s).unwrap();
            let mut t = s.clone();
            for q in 1..=n {
                t = apply_local_unitary(&t, q, &random_unitary(&mut rng)).unwrap();
            }
            assert!((pi_me(&t).unwrap() - base).abs() < 1e-10);

            let mut perm: Vec<usize> = (1..=n).collect();
            for i in (1..n).rev() {
                perm.swap(i, rng.random_range(0..=i));
            }
            let p = s.permute_qubits(&perm).unwrap();
            assert!((pi_me(&p).unwrap() - base).abs() < 1e-12);
        }
    }
}
