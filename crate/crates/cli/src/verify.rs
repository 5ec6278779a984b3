//! Built-in invariant suites run by the `verify` task.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use stargraph::herglotz::HerglotzRep;
use stargraph::measure::ScalarMeasure;
use stargraph::pasting::{matrix_weyl, rank_md, PastedSystem};
use stargraph::spectra::{aronszajn_donoghue_check, verify_kac};
use std::f64::consts::PI;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteResult {
    pub name: String,
    pub cases: usize,
    pub failures: usize,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub first_failure: Option<String>,
}

#[derive(Default)]
struct Tally {
    cases: usize,
    failures: usize,
    first: Option<String>,
}

impl Tally {
    fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures += 1;
            if self.first.is_none() {
                self.first = Some(what());
            }
        }
    }

    fn finish(self, name: &str) -> SuiteResult {
        SuiteResult {
            name: name.into(),
            cases: self.cases,
            failures: self.failures,
            passed: self.failures == 0,
            first_failure: self.first,
        }
    }
}

/// Atomic measure with `1..=max` atoms on a grid of quarter integers in `(-span, span)`.
pub fn random_atomic(rng: &mut ChaCha8Rng, max: usize, span: i32) -> ScalarMeasure {
    let k = rng.gen_range(1..=max);
    let mut xs: Vec<i32> = (0..k).map(|_| rng.gen_range(-4 * span + 1..4 * span)).collect();
    xs.sort();
    xs.dedup();
    let atoms = xs.iter().map(|&x| (x as f64 / 4.0, rng.gen_range(1..=16) as f64 / 8.0)).collect();
    ScalarMeasure::new(atoms, vec![]).expect("valid random measure")
}

pub fn kac(seed: u64, trials: usize) -> SuiteResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = Tally::default();
    for trial in 0..trials {
        let a = random_atomic(&mut rng, 6, 4);
        let mut b = random_atomic(&mut rng, 6, 4);
        // Force at least one shared atom.
        let shared = a.atoms()[0].position;
        if b.atom_mass_at(shared).is_none() {
            b = b.add(&ScalarMeasure::atom(shared, 1.0).expect("atom"));
        }
        let sys = PastedSystem::from_reps(vec![HerglotzRep::from_measure(a), HerglotzRep::from_measure(b)]).expect("two edges");
        match verify_kac(&sys, (-5.0, 5.0)) {
            Ok(r) => t.record(r.passed, || format!("trial {trial}: {:?} {:?}", r.counterexamples, r.unresolved)),
            Err(e) => t.record(false, || format!("trial {trial}: {e}")),
        }
    }
    t.finish("kac")
}

pub fn aronszajn_donoghue(seed: u64, trials: usize) -> SuiteResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let mut t = Tally::default();
    for trial in 0..trials {
        let m = random_atomic(&mut rng, 6, 4);
        let a = rng.gen_range(-2.0..2.0);
        let h = HerglotzRep::new(a, 0.0, m).expect("valid representation");
        let a1 = rng.gen_range(0.0..PI);
        let mut a2 = rng.gen_range(0.0..PI);
        while (a1 - a2).abs() < 1e-3 {
            a2 = rng.gen_range(0.0..PI);
        }
        match aronszajn_donoghue_check(&h, a1, a2) {
            Ok(ok) => t.record(ok, || format!("trial {trial}: angles {a1}, {a2}")),
            Err(e) => t.record(false, || format!("trial {trial}: {e}")),
        }
    }
    t.finish("aronszajn-donoghue")
}

pub fn rank_lemma(seed: u64, trials: usize) -> SuiteResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xbada55);
    let mut t = Tally::default();
    for trial in 0..trials {
        let n = rng.gen_range(1..=6);
        let b: Vec<f64> = (0..n)
            .map(|_| {
                let v = rng.gen_range(1..=64) as f64 / 8.0;
                if rng.gen_bool(0.2) { -v } else { v }
            })
            .collect();
        let total: f64 = b.iter().sum();
        let d = if rng.gen_bool(0.5) && total != 0.0 { total } else { rng.gen_range(1..=200) as f64 / 8.0 };
        let expect = if d == total { n - 1 } else { n };
        match rank_md(&b, d) {
            Ok(r) => t.record(r == expect, || format!("trial {trial}: b={b:?} d={d} rank {r}, expected {expect}")),
            Err(e) => t.record(false, || format!("trial {trial}: {e}")),
        }
    }
    t.finish("rank-lemma")
}

/// Smallest eigenvalue of `Im M = (M − M*)/2i`.
pub fn min_imag_eigenvalue(m: &DMatrix<Complex64>) -> f64 {
    let im = (m - m.adjoint()) * Complex64::new(0.0, -0.5);
    nalgebra::SymmetricEigen::new(im).eigenvalues.iter().fold(f64::INFINITY, |a, &v| a.min(v))
}

pub fn herglotz_psd(seed: u64, trials: usize) -> SuiteResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xfeed);
    let mut t = Tally::default();
    for trial in 0..trials {
        let n = rng.gen_range(2..=5);
        let reps = (0..n).map(|_| HerglotzRep::from_measure(random_atomic(&mut rng, 5, 3))).collect();
        let sys = PastedSystem::from_reps(reps).expect("valid system");
        let z = Complex64::new(rng.gen_range(-4.0..4.0), rng.gen_range(0.05..3.0));
        match matrix_weyl(&sys, z) {
            Ok(m) => {
                let min = min_imag_eigenvalue(&m);
                t.record(min >= -1e-12, || format!("trial {trial}: min eigenvalue {min:e} at {z}"));
            }
            Err(e) => t.record(false, || format!("trial {trial}: {e}")),
        }
    }
    t.finish("herglotz-psd")
}

pub fn system_kac(sys: &PastedSystem, window: (f64, f64)) -> SuiteResult {
    let mut t = Tally::default();
    match verify_kac(sys, window) {
        Ok(r) => t.record(r.passed, || format!("{:?} {:?}", r.counterexamples, r.unresolved)),
        Err(e) => t.record(false, || e.to_string()),
    }
    t.finish("kac-system")
}
