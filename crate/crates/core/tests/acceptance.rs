//! End-to-end acceptance checks with pinned tolerances. Prints one line per
//! criterion and exits nonzero if any of them fails.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64 as C;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stargraph::herglotz::{atom_weight, atom_weight_eps, EpsSchedule, FnHerglotz, Herglotz, HerglotzRep};
use stargraph::measure::ScalarMeasure;
use stargraph::pasting::{
    interface_blocks, matrix_weyl, multiplicity_at, rank_md, trace_weyl, PastedSystem,
};
use stargraph::schrodinger::Edge;
use stargraph::spectra::*;
use std::f64::consts::PI;
use std::time::{Duration, Instant};

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Atoms on a quarter-integer lattice with masses `k/8`.
fn random_atomic(rng: &mut ChaCha8Rng, max_atoms: usize, span: i32) -> Vec<(f64, f64)> {
    let k = rng.gen_range(1..=max_atoms);
    let mut xs: Vec<i32> = (0..k).map(|_| rng.gen_range(-4 * span..=4 * span)).collect();
    xs.sort();
    xs.dedup();
    xs.into_iter().map(|x| (x as f64 / 4.0, rng.gen_range(1..=16) as f64 / 8.0)).collect()
}

fn rep(atoms: &[(f64, f64)]) -> HerglotzRep {
    HerglotzRep::from_measure(ScalarMeasure::new(atoms.to_vec(), vec![]).unwrap())
}

fn equilateral_star_vs_oracle() -> Outcome {
    let start = Instant::now();
    let window = (0.1, 10.0);
    let sys = equilateral_star(3, PI, 0.0).map_err(|e| e.to_string())?;
    let ps = find_point_spectrum(&sys, window).map_err(|e| e.to_string())?;
    let fd = fd_oracle(&vec![Edge::free(PI, 0.0).unwrap(); 3], 4000, window).map_err(|e| e.to_string())?;
    let expect = [(0.25, 1), (1.0, 2), (2.25, 1), (4.0, 2), (6.25, 1), (9.0, 2)];
    let engine: Vec<(f64, usize)> = ps.eigenvalues.iter().map(|e| (e.x, e.multiplicity)).collect();
    ensure(ps.unresolved.is_empty(), || format!("unresolved {:?}", ps.unresolved))?;
    ensure(engine.len() == expect.len(), || format!("engine {engine:?}"))?;
    for (e, x) in engine.iter().zip(expect) {
        ensure((e.0 - x.0).abs() <= 1e-8 * x.0 && e.1 == x.1, || format!("engine {e:?} vs {x:?}"))?;
    }
    ensure(fd.clusters.len() == engine.len() && !fd.coarse_grid, || format!("oracle {:?}", fd.clusters))?;
    let mut worst = 0.0f64;
    for (e, c) in engine.iter().zip(&fd.clusters) {
        let rel = (e.0 - c.value).abs() / e.0;
        worst = worst.max(rel);
        ensure(rel <= 1e-3 && e.1 == c.multiplicity, || format!("engine {e:?} vs oracle {c:?}"))?;
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(60), || format!("took {elapsed:?}"))?;
    Ok(format!("6 eigenvalues, worst oracle rel err {worst:.1e}, {:.1}s", elapsed.as_secs_f64()))
}

/// Fraction-free elimination over integers.
fn bareiss_rank(mut a: Vec<Vec<i128>>) -> usize {
    let n = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut rank = 0;
    let mut prev = 1i128;
    for c in 0..cols {
        let Some(p) = (rank..n).find(|&r| a[r][c] != 0) else { continue };
        a.swap(rank, p);
        for r in rank + 1..n {
            for k in c + 1..cols {
                a[r][k] = (a[r][k] * a[rank][c] - a[r][c] * a[rank][k]) / prev;
            }
            a[r][c] = 0;
        }
        prev = a[rank][c];
        rank += 1;
    }
    rank
}

fn rank_lemma() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let start = Instant::now();
    let mut singular = 0;
    for trial in 0..1000 {
        let n = rng.gen_range(1..=6);
        let b: Vec<i64> = (0..n)
            .map(|_| {
                let k = rng.gen_range(1..=40i64);
                if rng.gen_bool(0.2) { -k } else { k }
            })
            .collect();
        let sum: i64 = b.iter().sum();
        let mut d = if trial % 2 == 0 { sum } else { rng.gen_range(-80..=80) };
        if d == 0 {
            d = sum + 1;
            if d == 0 {
                d = 1;
            }
        }
        let rows = (0..n)
            .map(|i| (0..n).map(|j| if i == j { (b[i] * (d - b[i])) as i128 } else { -(b[i] * b[j]) as i128 }).collect())
            .collect();
        let oracle = bareiss_rank(rows);
        let bf: Vec<f64> = b.iter().map(|&x| x as f64 / 8.0).collect();
        let got = rank_md(&bf, d as f64 / 8.0).map_err(|e| e.to_string())?;
        let expect = if d == sum { n - 1 } else { n };
        singular += usize::from(d == sum);
        ensure(got == oracle && got == expect, || format!("b={b:?} d={d}: got {got}, elimination {oracle}, expected {expect}"))?;
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(1), || format!("took {elapsed:?}"))?;
    Ok(format!("1000 instances ({singular} on d = Σb), {:.0}ms", elapsed.as_secs_f64() * 1e3))
}

fn herglotz_matrix() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut min_eig, mut worst_id, mut worst_sym) = (f64::INFINITY, 0.0f64, 0.0f64);
    for _ in 0..1000 {
        let n = rng.gen_range(2..=5);
        let reps: Vec<HerglotzRep> = (0..n)
            .map(|_| {
                let atoms = random_atomic(&mut rng, 4, 3);
                let m = ScalarMeasure::new(atoms, vec![]).unwrap();
                HerglotzRep::new(rng.gen_range(-2.0..2.0), rng.gen_range(0.0..1.0), m).unwrap()
            })
            .collect();
        let sys = PastedSystem::from_reps(reps).map_err(|e| e.to_string())?;
        let z = C::new(rng.gen_range(-3.0..3.0), rng.gen_range(0.05..3.0));
        let m = matrix_weyl(&sys, z).map_err(|e| e.to_string())?;
        let im = (&m - m.adjoint()) / C::new(0.0, 2.0);
        let eig = SymmetricEigen::new(im).eigenvalues.min();
        min_eig = min_eig.min(eig);
        let vals = sys.values(z).map_err(|e| e.to_string())?;
        let mt = DMatrix::from_diagonal(&DVector::from_row_slice(&vals));
        let [w11, w12, w21, w22] = interface_blocks(n).map(|b| b.map(|v| C::new(v, 0.0)));
        worst_id = worst_id.max((&m * (&w11 + &w12 * &mt) - (&w21 + &w22 * &mt)).norm());
        let mc = matrix_weyl(&sys, z.conj()).map_err(|e| e.to_string())?;
        worst_sym = worst_sym.max((mc - m.adjoint()).norm());
    }
    ensure(min_eig >= -1e-12 && worst_id <= 1e-12 && worst_sym <= 1e-12, || {
        format!("min eig {min_eig:.2e}, identity {worst_id:.2e}, symmetry {worst_sym:.2e}")
    })?;
    Ok(format!("1000 systems, min eig {min_eig:.2e}, identity {worst_id:.1e}, symmetry {worst_sym:.1e}"))
}

fn k74_levels() -> Outcome {
    let window = (0.0, 9.0);
    let ms = build_example_k74(window, 4).map_err(|e| e.to_string())?;
    let sys = system_from_measures(&ms).map_err(|e| e.to_string())?;
    let rep = classify_spectrum(&ms, &sys, window).map_err(|e| e.to_string())?;
    let level = |lo: f64, hi: f64| {
        let mut v: Vec<usize> = rep.sac_items.iter().filter(|s| lo < s.x && s.x < hi).map(|s| s.multiplicity).collect();
        v.sort();
        v.dedup();
        v
    };
    for (lo, hi, n) in [(2.0, 3.0, 1), (3.0, 4.0, 2), (4.0, 5.0, 1), (5.0, 6.0, 1), (6.0, 7.0, 3)] {
        ensure(level(lo, hi) == vec![n], || format!("({lo},{hi}) levels {:?}, expected [{n}]", level(lo, hi)))?;
    }
    ensure(level(0.0, 2.0).is_empty() && level(7.0, 9.0).is_empty(), || "stray singular items".into())?;
    for x in &rep.vanished {
        ensure(rep.eigenvalues.iter().all(|e| e.x != *x) && rep.sac_items.iter().all(|s| s.x != *x), || {
            format!("r = 1 location {x} reported")
        })?;
    }
    let ac = &rep.ac_regions;
    ensure(ac.len() == 1 && ac[0].lo == 4.5 && ac[0].hi == 9.0 && ac[0].r == 4 && ac[0].multiplicity == Some(4), || {
        format!("ac regions {ac:?}")
    })?;
    ensure(rep.unresolved.is_empty(), || format!("unresolved {:?}", rep.unresolved))?;
    Ok(format!("{} singular items at levels 1/2/1/1/3, {} vanished, ac r = 4", rep.sac_items.len(), rep.vanished.len()))
}

fn kac_simplicity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut checked = 0;
    for trial in 0..100 {
        let mut a1 = random_atomic(&mut rng, 5, 3);
        let a2 = random_atomic(&mut rng, 5, 3);
        if trial % 2 == 0 {
            a1.push(a2[0]);
            a1.sort_by(|p, q| p.0.total_cmp(&q.0));
            a1.dedup_by(|p, q| p.0 == q.0);
        }
        let sys = PastedSystem::from_reps(vec![rep(&a1), rep(&a2)]).map_err(|e| e.to_string())?;
        let report = verify_kac(&sys, (-5.0, 5.0)).map_err(|e| e.to_string())?;
        ensure(report.passed, || format!("trial {trial}: {:?} {:?}", report.counterexamples, report.unresolved))?;
        checked += report.eigenvalues.len();
    }
    Ok(format!("100 pairs, {checked} eigenvalues all simple"))
}

fn aronszajn_donoghue() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for trial in 0..100 {
        let m = rep(&random_atomic(&mut rng, 6, 3));
        let a1 = rng.gen_range(0.0..PI);
        let mut a2 = rng.gen_range(0.0..PI);
        while (a1 - a2).abs() < 1e-3 {
            a2 = rng.gen_range(0.0..PI);
        }
        let disjoint = aronszajn_donoghue_check(&m, a1, a2).map_err(|e| e.to_string())?;
        ensure(disjoint, || format!("trial {trial}: angles {a1}, {a2} share an atom"))?;
    }
    Ok("100 measures, atom sets disjoint".into())
}

fn symmetric_trace_formula() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let n = rng.gen_range(2..=5);
        let r = rep(&random_atomic(&mut rng, 4, 2));
        let sys = PastedSystem::from_reps(vec![r.clone(); n]).map_err(|e| e.to_string())?;
        let z = C::new(rng.gen_range(-3.0..3.0), rng.gen_range(0.1..3.0));
        let m0 = r.eval(z).map_err(|e| e.to_string())?;
        let nf = n as f64;
        let expect = ((nf - 1.0).powi(2) * m0 - 1.0 / m0) / nf;
        let t = trace_weyl(&sys, z).map_err(|e| e.to_string())?;
        worst = worst.max((t - expect).norm());
    }
    ensure(worst <= 1e-12, || format!("residual {worst:.2e}"))?;
    Ok(format!("100 points, residual {worst:.1e}"))
}

fn kirchhoff_zero() -> Outcome {
    let sys = PastedSystem::from_reps(vec![rep(&[(-1.0, 1.0)]), rep(&[(1.0, 1.0)])]).map_err(|e| e.to_string())?;
    let ps = find_point_spectrum(&sys, (-2.0, 2.0)).map_err(|e| e.to_string())?;
    ensure(ps.eigenvalues.len() == 1 && ps.unresolved.is_empty(), || format!("{ps:?}"))?;
    let e = &ps.eigenvalues[0];
    ensure(e.x.abs() <= 1e-12 && e.multiplicity == 1 && e.provenance == Provenance::KirchhoffZero, || format!("{e:?}"))?;
    let tr = FnHerglotz(|z: C| trace_weyl(&sys, z).unwrap());
    let w = atom_weight_eps(&tr, 0.0, &EpsSchedule::default()).map_err(|e| e.to_string())?;
    let w = w.value.finite().map_or(f64::NAN, |v| v.re);
    ensure(w > 0.0, || format!("trace atom weight {w}"))?;
    let mult = multiplicity_at(&sys, 0.0).map_err(|e| e.to_string())?;
    ensure(mult == 1, || format!("multiplicity_at = {mult}"))?;
    Ok(format!("one eigenvalue at {:.1e}, N = 1, trace weight {w:.6}", e.x))
}

fn atom_weight_extrapolation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst = 0.0f64;
    let mut count = 0;
    for _ in 0..100 {
        let atoms = random_atomic(&mut rng, 6, 3);
        let mut m = ScalarMeasure::new(atoms.clone(), vec![]).unwrap();
        if rng.gen_bool(0.5) {
            m = m.add(&ScalarMeasure::density(-1.0, 1.0, &[rng.gen_range(0.1..2.0)]).unwrap());
        }
        let h = HerglotzRep::new(rng.gen_range(-1.0..1.0), 0.0, m).unwrap();
        for &(x, w) in &atoms {
            let got = atom_weight_eps(&h, x, &EpsSchedule::default()).map_err(|e| e.to_string())?;
            let got = got.value.finite().map_or(f64::NAN, |v| v.re);
            let rel = (got - w).abs() / w;
            ensure(rel <= 1e-6 && atom_weight(&h, x) == w, || format!("atom at {x}: {got} vs {w}"))?;
            worst = worst.max(rel);
            count += 1;
        }
    }
    Ok(format!("{count} atoms, worst rel err {worst:.1e}"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("equilateral star vs finite differences", equilateral_star_vs_oracle),
        ("rank lemma", rank_lemma),
        ("herglotz matrix property", herglotz_matrix),
        ("k74 multiplicity levels", k74_levels),
        ("kac simplicity", kac_simplicity),
        ("aronszajn-donoghue disjointness", aronszajn_donoghue),
        ("symmetric trace formula", symmetric_trace_formula),
        ("kirchhoff-zero eigenvalue", kirchhoff_zero),
        ("atom weight extrapolation", atom_weight_extrapolation),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("[PASS] {} {name}: {detail}", k + 1),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] {} {name}: {detail}", k + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
