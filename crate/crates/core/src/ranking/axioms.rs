//! Empirical verification of the oracle axioms.
//!
//! Antisymmetry, totality, and autosimilarity are checked directly;
//! transitivity through chained triples. Everything is exhaustive for
//! n <= 30 (a full transitivity sweep is O(n^4)), sampled above that.
//! Violations are report content, not errors.

use std::cmp::Ordering;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::Serialize;

use crate::error::{Axiom, Error, Result};
use crate::ranking::oracle::TripletOracle;

const EXHAUSTIVE_LIMIT: usize = 30;
const MAX_RECORDED: usize = 64;

#[derive(Debug, Clone, Serialize)]
pub struct ViolationRecord {
    pub axiom: String,
    pub x: usize,
    pub y: usize,
    pub z: usize,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize, Default)]
pub struct AxiomReport {
    pub exhaustive: bool,
    pub checks: u64,
    pub violation_count: u64,
    /// At most the first 64 witnesses.
    pub violations: Vec<ViolationRecord>,
}

impl AxiomReport {
    pub fn is_clean(&self) -> bool {
        self.violation_count == 0
    }

    fn record(&mut self, axiom: Axiom, x: usize, y: usize, z: usize, detail: String) {
        self.violation_count += 1;
        if self.violations.len() < MAX_RECORDED {
            self.violations.push(ViolationRecord {
                axiom: axiom.to_string(),
                x,
                y,
                z,
                detail,
            });
        }
    }
}

fn sign(o: Ordering) -> i8 {
    match o {
        Ordering::Less => -1,
        Ordering::Equal => 0,
        Ordering::Greater => 1,
    }
}

/// Draw `samples` random probes per axiom (or sweep exhaustively for
/// n <= 30) and report every violation with a witness triple.
pub fn verify_axioms(oracle: &TripletOracle, samples: usize, seed: u64) -> Result<AxiomReport> {
    if samples == 0 {
        return Err(Error::InvalidInput("samples must be >= 1".into()));
    }
    let n = oracle.n();
    if n < 2 {
        return Err(Error::InvalidInput("need at least 2 points".into()));
    }
    let mut report = AxiomReport {
        exhaustive: n <= EXHAUSTIVE_LIMIT,
        ..AxiomReport::default()
    };
    if report.exhaustive {
        exhaustive(oracle, &mut report);
    } else {
        sampled(oracle, samples, seed, &mut report);
    }
    Ok(report)
}

fn check_antisymmetry(oracle: &TripletOracle, r: &mut AxiomReport, x: usize, y: usize, z: usize) {
    let fwd = oracle.query(x, y, z);
    let bwd = oracle.query(x, z, y);
    r.checks += 1;
    if sign(fwd) != -sign(bwd) {
        r.record(
            Axiom::Antisymmetry,
            x,
            y,
            z,
            format!("sign(x;y,z) = {}, sign(x;z,y) = {}", sign(fwd), sign(bwd)),
        );
    }
    if y != z && fwd == Ordering::Equal {
        r.record(Axiom::Totality, x, y, z, "tie between distinct points".into());
    }
}

fn check_totality_self(oracle: &TripletOracle, r: &mut AxiomReport, x: usize, y: usize) {
    r.checks += 1;
    if oracle.query(x, y, y) != Ordering::Equal {
        r.record(Axiom::Totality, x, y, y, "compare(x; y, y) != 0".into());
    }
}

fn check_autosimilarity(oracle: &TripletOracle, r: &mut AxiomReport, x: usize, y: usize) {
    r.checks += 1;
    if oracle.query(x, x, y) != Ordering::Less {
        r.record(
            Axiom::Autosimilarity,
            x,
            x,
            y,
            "compare(x; x, y) must be negative".into(),
        );
    }
}

fn check_transitivity(
    oracle: &TripletOracle,
    r: &mut AxiomReport,
    x: usize,
    a: usize,
    b: usize,
    c: usize,
) {
    r.checks += 1;
    if oracle.query(x, a, b) == Ordering::Less
        && oracle.query(x, b, c) == Ordering::Less
        && oracle.query(x, a, c) != Ordering::Less
    {
        r.record(
            Axiom::Transitivity,
            x,
            a,
            c,
            format!("{a} < {b} < {c} under point {x}, but not {a} < {c}"),
        );
    }
}

fn exhaustive(oracle: &TripletOracle, r: &mut AxiomReport) {
    let n = oracle.n();
    for x in 0..n {
        for y in 0..n {
            if y != x {
                check_autosimilarity(oracle, r, x, y);
            }
            check_totality_self(oracle, r, x, y);
            for z in (y + 1)..n {
                check_antisymmetry(oracle, r, x, y, z);
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if a != b && b != c && a != c {
                        check_transitivity(oracle, r, x, a, b, c);
                    }
                }
            }
        }
    }
}

fn sampled(oracle: &TripletOracle, samples: usize, seed: u64, r: &mut AxiomReport) {
    let n = oracle.n();
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let distinct = |rng: &mut ChaCha12Rng, taken: &[usize]| loop {
        let v = rng.random_range(0..n);
        if !taken.contains(&v) {
            return v;
        }
    };
    for _ in 0..samples {
        let x = rng.random_range(0..n);
        let y = distinct(&mut rng, &[x]);
        let z = distinct(&mut rng, &[x, y]);
        check_antisymmetry(oracle, r, x, y, z);
        check_totality_self(oracle, r, x, y);
        check_autosimilarity(oracle, r, x, y);
        let a = distinct(&mut rng, &[x]);
        let b = distinct(&mut rng, &[x, a]);
        let c = distinct(&mut rng, &[x, a, b]);
        check_transitivity(oracle, r, x, a, b, c);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ranking::{gen_euclidean, gen_random_tournament};

    #[test]
    fn metric_system_is_clean() {
        let rs = gen_euclidean(12, 2, 5).unwrap();
        let report = verify_axioms(rs.oracle(), 1, 0).unwrap();
        assert!(report.exhaustive);
        assert!(report.is_clean(), "violations: {:?}", report.violations);
    }

    #[test]
    fn tournament_is_clean_even_if_non_concordant() {
        let rs = gen_random_tournament(15, 3).unwrap();
        let report = verify_axioms(rs.oracle(), 1, 0).unwrap();
        assert!(report.is_clean(), "violations: {:?}", report.violations);
    }

    #[test]
    fn always_greater_oracle_fails_antisymmetry() {
        struct AlwaysGreater;
        impl crate::ranking::oracle::Comparator for AlwaysGreater {
            fn compare(&self, _: usize, _: usize, _: usize) -> Ordering {
                Ordering::Greater
            }
        }
        let oracle = TripletOracle::new(8, Box::new(AlwaysGreater));
        let report = verify_axioms(&oracle, 1, 0).unwrap();
        assert!(!report.is_clean());
        assert!(report
            .violations
            .iter()
            .any(|v| v.axiom == Axiom::Antisymmetry.to_string()));
    }

    #[test]
    fn sampled_mode_used_above_limit() {
        let rs = gen_euclidean(40, 2, 1).unwrap();
        let report = verify_axioms(rs.oracle(), 500, 11).unwrap();
        assert!(!report.exhaustive);
        assert!(report.is_clean());
    }
}
