//! Acceptance criteria. Runs every criterion in sequence, prints one
//! PASS/FAIL line per criterion, and fails if any criterion fails.

mod common;

use std::time::{Duration, Instant};

use bdg_lab::cert::{count_roots_in, lemma2_interval};
use bdg_lab::constants::{proved_constants, DEFAULT_TOL};
use bdg_lab::hermite::hermite_coeffs;
use bdg_lab::poly::{int, rat, ExactRational};
use bdg_lab::sim::{
    holder_check, martingale_identity_check, moment_estimates, simulate_batch_with_threads, z_ratio,
    DriverSpec, IntegrandSpec, MomentSummary, PathSample, SimConfig, SIGMA_MARGIN,
};
use bdg_lab::RationalPoly;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use rand::Rng;

use common::{double_factorial_odd, factorial, random_class_pair, random_squarefree, rng, sign_scan_count};

const SEED: u64 = 42;
const N2_C1: f64 = 0.303_061_543_300_931_5; // (3 - sqrt 6)^2
const N2_C2: f64 = 29.696_938_456_699_07; // (3 + sqrt 6)^2

type Outcome = Result<String, String>;

struct Report {
    lines: Vec<String>,
    failures: usize,
}

impl Report {
    fn run(&mut self, id: u32, name: &str, limit: Duration, check: impl FnOnce() -> Outcome) {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let (ok, detail) = match outcome {
            Ok(d) if elapsed <= limit => (true, d),
            Ok(d) => (false, format!("{d}; runtime {elapsed:.2?} exceeds {limit:?}")),
            Err(d) => (false, d),
        };
        let line = format!(
            "[{}] criterion {id:>2}: {name} ({elapsed:.2?}, limit {limit:?}) -- {detail}",
            if ok { "PASS" } else { "FAIL" }
        );
        println!("{line}");
        if !ok {
            self.failures += 1;
        }
        self.lines.push(line);
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn reference_config(driver: DriverSpec) -> SimConfig {
    SimConfig {
        t: 1.0,
        steps: 1_000,
        paths: 100_000,
        seed: SEED,
        n: 2,
        integrand: IntegrandSpec::constant(1.0),
        driver,
    }
}

fn bits(m: &MomentSummary) -> Vec<u64> {
    [m.m2n, m.qn]
        .iter()
        .chain(&m.cross)
        .flat_map(|e| [e.value.to_bits(), e.stderr.to_bits(), e.count as u64])
        .collect()
}

#[test]
fn acceptance_criteria() {
    let mut report = Report { lines: Vec::new(), failures: 0 };
    let mut batches: Vec<(String, Vec<PathSample>)> = Vec::new();

    report.run(1, "coefficient exactness, n = 1..12", Duration::from_secs(1), || {
        let mut checked = 0;
        for n in 1..=12u32 {
            let h = hermite_coeffs(n).map_err(|e| e.to_string())?;
            for (k, a) in h.coeffs().iter().enumerate() {
                let k = k as u64;
                let scale = (BigInt::one() << k) * factorial(k) * factorial(2 * n as u64 - 2 * k);
                ensure((a * BigRational::from_integer(scale)).is_one(), || format!("n={n} k={k}: a_k = {a}"))?;
                checked += 1;
            }
        }
        Ok(format!("{checked} coefficients exact"))
    });

    report.run(2, "n = 2 closed form", Duration::from_secs(1), || {
        let r = proved_constants(2, DEFAULT_TOL).map_err(|e| e.to_string())?;
        let s6 = 6f64.sqrt();
        let (c1, c2) = ((3.0 - s6).powi(2), (3.0 + s6).powi(2));
        ensure((c1 - N2_C1).abs() < 1e-15 && (c2 - N2_C2).abs() < 1e-13, || "closed form drift".into())?;
        for (name, got, want) in [
            ("C1_proved", r.c1_proved, c1),
            ("C2_proved", r.c2_proved, c2),
            ("C1_sharp", r.c1_sharp, c1),
            ("C2_sharp", r.c2_sharp, c2),
        ] {
            ensure((got - want).abs() <= 1e-9, || format!("{name} = {got}, expected {want}"))?;
        }
        Ok(format!("C1 = {:.12}, C2 = {:.10}", r.c1_proved, r.c2_proved))
    });

    report.run(3, "sandwich, n = 2..8", Duration::from_secs(5), || {
        for n in 2..=8 {
            let r = proved_constants(n, DEFAULT_TOL).map_err(|e| e.to_string())?;
            ensure(r.c1_proved <= r.c1_sharp + 1e-9, || format!("n={n}: C1_proved {} > C1_sharp {}", r.c1_proved, r.c1_sharp))?;
            ensure(r.c2_sharp <= r.c2_proved + 1e-9, || format!("n={n}: C2_sharp {} > C2_proved {}", r.c2_sharp, r.c2_proved))?;
        }
        Ok("C1_proved <= C1_sharp and C2_sharp <= C2_proved for all n".into())
    });

    report.run(4, "Gaussian moment containment, n = 2..8", Duration::from_secs(1), || {
        for n in 2..=8u32 {
            let (l, r) = bdg_lab::constants::sharp_roots(n, DEFAULT_TOL).map_err(|e| e.to_string())?;
            let df = BigRational::from_integer(double_factorial_odd(n as u64));
            let lo = num_traits::pow(l.lo.clone(), 2 * n as usize);
            let hi = num_traits::pow(r.hi.clone(), 2 * n as usize);
            ensure(lo <= df && df <= hi, || format!("n={n}: (2n-1)!! = {df} outside [{}, {}]", lo.to_f64().unwrap(), hi.to_f64().unwrap()))?;
        }
        Ok("C1_sharp <= (2n-1)!! <= C2_sharp exactly".into())
    });

    report.run(5, "Sturm counts vs sign-scan oracle, 200 polynomials", Duration::from_secs(10), || {
        let mut r = rng(2024);
        let polys = random_squarefree(&mut r, 200, 8, 9);
        let mut total = 0;
        for c in &polys {
            let p = RationalPoly::from_integers(c);
            let sturm = count_roots_in(&p, &int(-100), &int(100)).map_err(|e| e.to_string())?;
            let oracle = sign_scan_count(c, -100.0, 100.0, 1e-4);
            ensure(sturm == oracle, || format!("{c:?}: Sturm {sturm}, scan {oracle}"))?;
            total += sturm;
        }
        Ok(format!("{} polynomials, {total} roots, all counts agree", polys.len()))
    });

    report.run(6, "interval solver exterior certification, 100 pairs", Duration::from_secs(10), || {
        let mut r = rng(7);
        let (mut nonempty, mut empty) = (0, 0);
        for _ in 0..100 {
            let (p1, p2) = random_class_pair(&mut r);
            let iv = lemma2_interval(&p1, &p2, DEFAULT_TOL).map_err(|e| e.to_string())?;
            let d = &p2.to_poly() - &p1.to_poly();
            let negative = |x: &ExactRational| d.eval(x) < int(0);
            if iv.is_empty() {
                empty += 1;
                for _ in 0..100 {
                    let x = BigRational::new(r.random_range(0..100_000).into(), 1000.into());
                    ensure(negative(&x), || format!("empty result but D({x}) >= 0"))?;
                }
            } else {
                nonempty += 1;
                ensure(iv.lo > int(0), || "lo must be positive".into())?;
                ensure(negative(&int(-1)), || "D(-1) >= 0".into())?;
                let width = &iv.hi - &iv.lo;
                for _ in 0..50 {
                    let below = &iv.lo * rat(r.random_range(0..1_000_000), 1_000_000);
                    ensure(negative(&below), || format!("D({below}) >= 0 below lo"))?;
                    let above = &iv.hi + &width * rat(r.random_range(1..=9_000_000), 1_000_000);
                    ensure(negative(&above), || format!("D({above}) >= 0 above hi"))?;
                }
            }
        }
        ensure(nonempty > 0 && empty > 0, || format!("need both kinds: {nonempty} nonempty, {empty} empty"))?;
        Ok(format!("{nonempty} nonempty and {empty} empty results certified"))
    });

    report.run(7, "Monte Carlo BDG check, Constant(1)/Wiener, n = 2", Duration::from_secs(30), || {
        let batch = simulate_batch_with_threads(&reference_config(DriverSpec::Wiener), 1).map_err(|e| e.to_string())?;
        let m = moment_estimates(&batch, 2).map_err(|e| e.to_string())?;
        let bounds = proved_constants(2, DEFAULT_TOL).map_err(|e| e.to_string())?;
        let z = z_ratio(&m.m2n, &m.qn, 2).map_err(|e| e.to_string())?;
        let zn = z * z;
        batches.push(("criterion 7".into(), batch));
        ensure((m.m2n.value - 3.0).abs() <= SIGMA_MARGIN * m.m2n.stderr, || format!("E W^4 = {:?} not within 4 se of 3", m.m2n))?;
        ensure(bounds.c1_sharp <= zn && zn <= bounds.c2_sharp, || format!("z^2 = {zn} outside sharp bounds"))?;
        Ok(format!("E W^4 = {:.4} +- {:.4}, z^2 = {zn:.4} in [{:.4}, {:.3}]", m.m2n.value, m.m2n.stderr, bounds.c1_sharp, bounds.c2_sharp))
    });

    report.run(8, "martingale identity, n = 1, 2, 3", Duration::from_secs(60), || {
        let batch = &batches[0].1;
        let mut parts = Vec::new();
        for n in 1..=3 {
            let rho = martingale_identity_check(batch, n).map_err(|e| e.to_string())?;
            ensure(rho.value.abs() <= SIGMA_MARGIN * rho.stderr, || format!("n={n}: {rho:?}"))?;
            parts.push(format!("n={n}: {:.2e} +- {:.2e}", rho.value, rho.stderr));
        }
        Ok(parts.join(", "))
    });

    report.run(10, "time-changed Wiener a(t) = t^2, n = 2", Duration::from_secs(30), || {
        let batch = simulate_batch_with_threads(&reference_config(DriverSpec::TimeChangedWiener { q: 2.0 }), 1)
            .map_err(|e| e.to_string())?;
        let m = moment_estimates(&batch, 2).map_err(|e| e.to_string())?;
        let bounds = proved_constants(2, DEFAULT_TOL).map_err(|e| e.to_string())?;
        let zn = z_ratio(&m.m2n, &m.qn, 2).map_err(|e| e.to_string())?.powi(2);
        batches.push(("criterion 10".into(), batch));
        ensure((m.m2n.value - 3.0).abs() <= SIGMA_MARGIN * m.m2n.stderr, || format!("E M(1)^4 = {:?} not within 4 se of 3", m.m2n))?;
        ensure(bounds.c1_sharp <= zn && zn <= bounds.c2_sharp, || format!("z^2 = {zn} outside sharp bounds"))?;
        Ok(format!("E M(1)^4 = {:.4} +- {:.4}, z^2 = {zn:.4}", m.m2n.value, m.m2n.stderr))
    });

    report.run(11, "determinism across 1, 2, 8 threads", Duration::from_secs(90), || {
        let cfg = reference_config(DriverSpec::Wiener);
        let reference = moment_estimates(&batches[0].1, 2).map_err(|e| e.to_string())?;
        for threads in [2, 8] {
            let batch = simulate_batch_with_threads(&cfg, threads).map_err(|e| e.to_string())?;
            let m = moment_estimates(&batch, 2).map_err(|e| e.to_string())?;
            ensure(bits(&m) == bits(&reference), || format!("{threads} threads changed the estimates"))?;
            ensure(batch == batches[0].1, || format!("{threads} threads changed the batch"))?;
            batches.push((format!("criterion 11, {threads} threads"), batch));
        }
        Ok("moment estimates bit-identical".into())
    });

    report.run(9, "empirical Hölder on every suite batch, 1 <= k <= n <= 4", Duration::from_secs(60), || {
        let mut checks = 0;
        for (label, batch) in &batches {
            for n in 1..=4 {
                for k in 1..=n {
                    let h = holder_check(batch, n, k).map_err(|e| e.to_string())?;
                    ensure(h.holds, || format!("{label}: {h:?}"))?;
                    checks += 1;
                }
            }
        }
        ensure(!batches.is_empty(), || "no batches generated".into())?;
        Ok(format!("{checks} checks over {} batches", batches.len()))
    });

    println!("{} of {} criteria passed", report.lines.len() - report.failures, report.lines.len());
    assert_eq!(report.failures, 0, "failing criteria:\n{}", report.lines.join("\n"));
}
