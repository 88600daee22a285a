//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use knotgate_core::algebra::{distance, Mat2, Mat4, Quaternion, C64};
use knotgate_core::compile::{coverage, haar_targets, Compiler};
use knotgate_core::diagram::{catalog, wirtinger_presentation};
use knotgate_core::fpgroup::{equivalent_up_to_renaming, Letter, Presentation, Word};
use knotgate_core::holonomy::{connection_from_rep, loop_transport, plaquette_defect, word_holonomy, Loop, SpinFamily, Transport, TransportMode};
use knotgate_core::linkgate::{evolve, link_hamiltonian, LinkGateSpec, TwoQubitGate};
use knotgate_core::reps::{fibonacci_rep, kl_family, modular_image, rep_solve_multi, KLParams, Representation, SolveOptions};
use knotgate_core::IntMatrix2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

// 1

fn wirtinger_pipeline() -> Outcome {
    let cases = [("trefoil", "babABA"), ("figure8", "baBabABaBA"), ("hopf", "abAB")];
    for (name, relator) in cases {
        let raw = wirtinger_presentation(&catalog(name).map_err(|e| e.to_string())?.pd);
        let reduced = raw.simplify();
        let expected = Presentation::parse(2, &[relator]).map_err(|e| e.to_string())?;
        ensure(equivalent_up_to_renaming(&reduced, &expected, true), || format!("{name}: got {reduced}, want {expected}"))?;
    }
    Ok("trefoil, figure8 and hopf match".into())
}

// 2

fn braid_defect(a: &Mat2, b: &Mat2) -> f64 {
    (*a * *b * *a - *b * *a * *b).op_norm()
}

fn braid_residuals() -> Outcome {
    let fib = fibonacci_rep();
    let mut worst = braid_defect(&fib.image(0), &fib.image(1));
    let mut feasible = 0;
    for k in 1..400 {
        let theta = PI * k as f64 / 400.0;
        for (nc, ns) in [(false, false), (true, false), (false, true), (true, true)] {
            let Ok(params) = KLParams::with_branch(theta, nc, ns) else { continue };
            let rep = kl_family(&params).map_err(|e| e.to_string())?;
            worst = worst.max(braid_defect(&rep.image(0), &rep.image(1)));
            feasible += 1;
        }
    }
    ensure(feasible >= 50, || format!("only {feasible} feasible samples"))?;
    ensure(worst <= 1e-10, || format!("max defect {worst:e}"))?;
    Ok(format!("{feasible} samples, max defect {worst:.1e}"))
}

// 3

fn modular_homomorphism() -> Outcome {
    let img = |s: &str| modular_image(&Word::parse(s).map_err(|e| e.to_string())?).map_err(|e| e.to_string());
    let s = IntMatrix2([[0, 1], [-1, 0]]);
    let u = IntMatrix2([[1, 1], [-1, 0]]);
    let minus_one = IntMatrix2([[-1, 0], [0, -1]]);
    ensure(img("aba")? == s, || "aba is not S".into())?;
    ensure(img("ab")? == u, || "ab is not U".into())?;
    let cube = img("ababab")?;
    ensure(cube == minus_one, || format!("(ab)^3 = {cube:?}"))?;
    for g in ["a", "b"] {
        let m = img(g)?;
        let (l, r) = (cube.checked_mul(&m).map_err(|e| e.to_string())?, m.checked_mul(&cube).map_err(|e| e.to_string())?);
        ensure(l == r, || format!("(ab)^3 does not commute with {g}"))?;
    }
    ensure(img("abaBAB")? == IntMatrix2::IDENTITY, || "braid relator is not I".into())?;
    Ok("S, U, -I and relator exact".into())
}

// 4

fn quaternion_residual(p: &Presentation, qs: &[Quaternion]) -> f64 {
    p.relators()
        .iter()
        .map(|r| {
            let q = r.letters().iter().fold(Quaternion::from([1.0, 0.0, 0.0, 0.0]), |acc, l| {
                let g = qs[l.gen];
                acc * if l.inv { g.conj() } else { g }
            });
            // ‖Q - 1‖ as a matrix equals the quaternion norm of Q - 1
            Quaternion::from([q.a - 1.0, q.b, q.c, q.d]).norm()
        })
        .fold(0.0, f64::max)
}

fn figure8_solve() -> Result<(u64, Representation), String> {
    let p = catalog("figure8").map_err(|e| e.to_string())?.expected_presentation;
    let seeds: Vec<u64> = (0..10).collect();
    let (best, log) = rep_solve_multi(&p, &seeds, &SolveOptions::default(), |r| r.commutator_defect() > 0.1);
    best.ok_or_else(|| format!("no non-abelian solution: {log:?}"))
}

fn figure8_representation() -> Outcome {
    let (seed, rep) = figure8_solve()?;
    let independent = quaternion_residual(rep.presentation(), &rep.quaternions());
    ensure(independent <= 1e-10, || format!("residual {independent:e}"))?;
    ensure(rep.commutator_defect() > 0.1, || "abelian solution".into())?;
    Ok(format!("seed {seed}, residual {independent:.1e}, commutator {:.3}", rep.commutator_defect()))
}

// 5

fn random_word(rng: &mut ChaCha8Rng, len: usize) -> Vec<Letter> {
    (0..len).map(|_| Letter::new(rng.random_range(0..2), rng.random())).collect()
}

fn homotopy_invariance() -> Outcome {
    let rep = fibonacci_rep();
    let conn = connection_from_rep(&rep).map_err(|e| e.to_string())?;
    let relator = rep.presentation().relators()[0].clone();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = 0.0f64;
    for i in 0..1000 {
        let len = rng.random_range(0..40);
        let base = random_word(&mut rng, len);
        let h = word_holonomy(&conn, &Word(base.clone()));

        let mut padded = base.clone();
        for _ in 0..rng.random_range(1..5) {
            let at = rng.random_range(0..=padded.len());
            let l = Letter::new(rng.random_range(0..2), rng.random());
            padded.splice(at..at, [l, l.inverse()]);
        }
        let hp = word_holonomy(&conn, &Word(padded));
        ensure(hp.0 == h.0, || format!("word {i}: backtrack insertion changed the holonomy"))?;

        let conj = Word(random_word(&mut rng, 3));
        let r = if rng.random() { relator.clone() } else { relator.inverse() };
        let inserted = conj.concat(&r).concat(&conj.inverse());
        let at = rng.random_range(0..=base.len());
        let mut with_rel = base[..at].to_vec();
        with_rel.extend_from_slice(inserted.letters());
        with_rel.extend_from_slice(&base[at..]);
        worst = worst.max((word_holonomy(&conn, &Word(with_rel)) - h).op_norm());
    }
    ensure(worst <= 1e-10, || format!("relator substitution moved holonomy by {worst:e}"))?;
    Ok(format!("1000 words, relator shift {worst:.1e}"))
}

// 6

fn flatness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut min_ratio = f64::INFINITY;
    for _ in 0..20 {
        let x = [rng.random_range(0.3..PI - 0.3), rng.random_range(0.0..2.0 * PI)];
        let mut delta = 1e-2;
        let mut prev = plaquette_defect(&SpinFamily, &x, delta).map_err(|e| e.to_string())?;
        for _ in 0..3 {
            delta *= 0.5;
            let cur = plaquette_defect(&SpinFamily, &x, delta).map_err(|e| e.to_string())?;
            let ratio = prev / cur;
            ensure(ratio >= 3.0, || format!("at {x:?}, delta {delta}: ratio {ratio}"))?;
            min_ratio = min_ratio.min(ratio);
            prev = cur;
        }
    }
    let mut worst = 0.0f64;
    for steps in [1_000, 10_000] {
        let lp = Loop::latitude(1.1, steps);
        let Transport::Full(u) = loop_transport(&SpinFamily, &lp, TransportMode::Full).map_err(|e| e.to_string())? else {
            return Err("full mode returned a phase".into());
        };
        worst = worst.max((u - Mat2::identity()).op_norm());
    }
    ensure(worst <= 1e-10, || format!("closed-loop transport off identity by {worst:e}"))?;
    Ok(format!("min halving ratio {min_ratio:.2}, loop defect {worst:.1e}"))
}

// 7

fn abelian_contrast() -> Outcome {
    let lp = Loop::equator(10_000);
    let Transport::Abelian(z) = loop_transport(&SpinFamily, &lp, TransportMode::Abelian(0)).map_err(|e| e.to_string())? else {
        return Err("abelian mode returned a matrix".into());
    };
    let err = (z - C64::new(-1.0, 0.0)).norm();
    ensure(err <= 1e-6, || format!("phase {z}, off by {err:e}"))?;
    Ok(format!("phase {:+.9}{:+.1e}i", z.re, z.im))
}

// 8

fn explicit_hamiltonian(scale: f64) -> Mat4 {
    // σx⊗σz − σz⊗σx written out by hand
    let rows = [[0.0, -1.0, 1.0, 0.0], [-1.0, 0.0, 0.0, -1.0], [1.0, 0.0, 0.0, 1.0], [0.0, -1.0, 1.0, 0.0]];
    let mut m = Mat4([[C64::new(0.0, 0.0); 4]; 4]);
    for (i, row) in rows.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            m.0[i][j] = C64::new(scale * v, 0.0);
        }
    }
    m
}

/// Smaller eigenvalue of the reduced density matrix of `U|00⟩`.
fn schmidt_oracle(gate: &TwoQubitGate) -> f64 {
    let psi = gate.unitary.column(0);
    let mut rho = [[C64::new(0.0, 0.0); 2]; 2];
    for (i, row) in rho.iter_mut().enumerate() {
        for (j, r) in row.iter_mut().enumerate() {
            *r = (0..2).map(|k| psi[2 * i + k] * psi[2 * j + k].conj()).sum();
        }
    }
    let tr = (rho[0][0] + rho[1][1]).re;
    let gap = ((rho[0][0] - rho[1][1]).re.powi(2) + 4.0 * rho[0][1].norm_sqr()).sqrt();
    (tr - gap) / 2.0
}

fn link_gates() -> Outcome {
    let hopf = LinkGateSpec::from_catalog("hopf").map_err(|e| e.to_string())?;
    let white = LinkGateSpec::from_catalog("whitehead").map_err(|e| e.to_string())?;
    ensure(link_hamiltonian(&hopf).0 == explicit_hamiltonian(1.0).0, || "H(hopf) differs".into())?;
    ensure(link_hamiltonian(&white).0 == explicit_hamiltonian(2.0).0, || "H(whitehead) differs".into())?;
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut gap, mut unitarity) = (0.0f64, 0.0f64);
    for _ in 0..20 {
        let t: f64 = rng.random_range(-PI..PI);
        let w = evolve(&white, t).map_err(|e| e.to_string())?;
        let h = evolve(&hopf, 2.0 * t).map_err(|e| e.to_string())?;
        gap = gap.max((w.unitary - h.unitary).max_abs());
        unitarity = unitarity.max(w.unitary.unitarity_defect()).max(h.unitary.unitarity_defect());
    }
    ensure(gap <= 1e-12, || format!("whitehead(t) vs hopf(2t) differ by {gap:e}"))?;
    ensure(unitarity <= 1e-12, || format!("unitarity defect {unitarity:e}"))?;
    let lambda = schmidt_oracle(&evolve(&hopf, PI / 4.0).map_err(|e| e.to_string())?);
    ensure(lambda > 0.05, || format!("lambda_min {lambda}"))?;
    Ok(format!("doubling gap {gap:.1e}, unitarity {unitarity:.1e}, lambda_min {lambda:.6}"))
}

// 9

fn enumeration_minimum(rep: &Representation, target: &Mat2, max_len: usize) -> f64 {
    fn walk(rep: &Representation, target: &Mat2, acc: Mat2, last: Option<Letter>, left: usize, best: &mut f64) {
        *best = best.min(distance(&acc, target));
        if left == 0 {
            return;
        }
        for g in 0..2 {
            for inv in [false, true] {
                let l = Letter::new(g, inv);
                if last.is_some_and(|p| p.cancels(l)) {
                    continue;
                }
                let m = rep.evaluate(&Word(vec![l]));
                walk(rep, target, acc * m, Some(l), left - 1, best);
            }
        }
    }
    let mut best = f64::INFINITY;
    walk(rep, target, Mat2::identity(), None, max_len, &mut best);
    best
}

#[derive(serde::Serialize)]
struct CompileRun {
    words: Vec<String>,
    dists: Vec<f64>,
    coverage: Vec<f64>,
}

fn compile_run() -> Result<CompileRun, String> {
    let rep = fibonacci_rep();
    let targets = haar_targets(100, 9);
    let mut run = CompileRun { words: Vec::new(), dists: Vec::new(), coverage: Vec::new() };
    for max_len in 1..=6 {
        let compiler = Compiler::new(&rep, max_len).map_err(|e| e.to_string())?;
        for (i, t) in targets.iter().enumerate() {
            let r = compiler.compile(t, 0.0).map_err(|e| e.to_string())?;
            let oracle = enumeration_minimum(&rep, t, max_len);
            ensure(r.dist == oracle, || format!("max_len {max_len}, target {i}: {} vs enumeration {oracle}", r.dist))?;
            if max_len == 6 {
                run.words.push(r.word.to_string());
                run.dists.push(r.dist);
            }
        }
    }
    for max_len in [6, 8, 10] {
        let report = coverage(&rep, 0.15, max_len, 100, 9).map_err(|e| e.to_string())?;
        run.coverage.push(report.covered_fraction);
    }
    ensure(run.coverage.windows(2).all(|w| w[0] <= w[1]), || format!("coverage not monotone: {:?}", run.coverage))?;
    Ok(run)
}

fn compiler_oracle() -> Outcome {
    let run = compile_run()?;
    Ok(format!("600 exact matches, coverage {:?}", run.coverage))
}

// 10

fn determinism() -> Outcome {
    let once = || -> Result<String, String> {
        let (seed, rep) = figure8_solve()?;
        let compile = compile_run()?;
        serde_json::to_string(&(seed, rep, compile)).map_err(|e| e.to_string())
    };
    let (a, b) = (once()?, once()?);
    ensure(a == b, || "repeated runs differ".into())?;
    Ok(format!("{} identical bytes", a.len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome, u64); 10] = [
        ("wirtinger pipeline", wirtinger_pipeline, 1),
        ("braid relation residual", braid_residuals, 1),
        ("modular homomorphism", modular_homomorphism, 1),
        ("figure-8 representation", figure8_representation, 10),
        ("holonomy homotopy invariance", homotopy_invariance, 5),
        ("flatness", flatness, 30),
        ("abelian contrast", abelian_contrast, 10),
        ("link gates", link_gates, 5),
        ("compiler oracle equivalence", compiler_oracle, 60),
        ("determinism", determinism, 120),
    ];
    let mut failed = 0;
    for (i, (name, f, budget)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = f();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(d) if elapsed > Duration::from_secs(budget) => Err(format!("{d}; exceeded {budget} s budget")),
            other => other,
        };
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} ({:.2} s)", i + 1, elapsed.as_secs_f64()),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why} ({:.2} s)", i + 1, elapsed.as_secs_f64());
            }
        }
    }
    println!("{} of 10 criteria passed", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
