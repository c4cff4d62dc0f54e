//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each, and
//! exits non-zero if any fails.

mod common;

use std::f64::consts::{FRAC_PI_3, FRAC_PI_4, PI, SQRT_2};
use std::time::{Duration, Instant};

use nalgebra::{Complex, DMatrix};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use unruh_bell::fockspace::{outer, partial_trace, partial_transpose, tensor_op};
use unruh_bell::rindler::{acceleration_from_squeeze, squeeze_from_acceleration};
use unruh_bell::sweep::{count_crossings, find_crossing, run_sweep};
use unruh_bell::wigner::{
    chsh, chsh_from_density, entanglement_curve, faithful_factors, post_measurement_state,
    region_i_density,
};
use unruh_bell::{
    BobObservables, DensityOperator, ExperimentConfig, FactorDims, SqueezeParameter, SweepSpec,
    TruncationSpec,
};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

const TSIRELSON: f64 = 2.0 * SQRT_2;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn sq(r: f64) -> SqueezeParameter {
    SqueezeParameter::new(r).unwrap()
}

fn best_of<T>(runs: usize, mut f: impl FnMut() -> T) -> (T, Duration) {
    let mut best = Duration::MAX;
    let mut out = None;
    for _ in 0..runs {
        let t = Instant::now();
        let v = f();
        best = best.min(t.elapsed());
        out = Some(v);
    }
    (out.unwrap(), best)
}

fn inertial_maximal_violation() -> Check {
    let (res, dt) = best_of(5, || chsh(&ExperimentConfig::inertial()));
    let s = res.map_err(|e| e.to_string())?.s;
    ensure((s - TSIRELSON).abs() < 1e-9, format!("S = {s:.15}"))?;
    ensure(dt < Duration::from_millis(1), format!("took {dt:?}"))?;
    Ok(format!("S = {s:.12}, {dt:?}"))
}

fn zero_acceleration_endpoint() -> Check {
    let cfg = ExperimentConfig::compat(TruncationSpec::Fixed(3), SqueezeParameter::ZERO);
    let (res, dt) = best_of(5, || chsh(&cfg));
    let s = res.map_err(|e| e.to_string())?.s;
    ensure((s - TSIRELSON).abs() < 1e-9, format!("S = {s:.15}"))?;
    ensure(dt < Duration::from_millis(10), format!("took {dt:?}"))?;
    Ok(format!("S = {s:.12}, {dt:?}"))
}

fn classicality_crossing() -> Check {
    let spec = SweepSpec::default();
    let t = Instant::now();
    let rows = run_sweep(&spec).map_err(|e| e.to_string())?;
    let dt = t.elapsed();
    ensure(rows.len() == 200, format!("{} rows", rows.len()))?;
    let n = count_crossings(&rows, 2.0);
    ensure(n == 1, format!("{n} crossings"))?;
    let c = find_crossing(&rows, 2.0)
        .map_err(|e| e.to_string())?
        .ok_or("no crossing")?;
    ensure(
        (c.a_cross - 5.3).abs() <= 0.3,
        format!("a_cross = {}", c.a_cross),
    )?;
    ensure(dt < Duration::from_secs(5), format!("sweep took {dt:?}"))?;
    Ok(format!(
        "a/|k|c = {:.4} (r = {:.4}), {dt:?}",
        c.a_cross, c.r_cross
    ))
}

fn region_i_closed_form() -> Check {
    let mut worst_fro = 0.0f64;
    let mut worst_s = 0.0f64;
    for (n, r, theta) in [
        (3, 0.5, FRAC_PI_4),
        (3, 1.0, FRAC_PI_4),
        (4, 0.3, FRAC_PI_3),
    ] {
        let cfg =
            ExperimentConfig::faithful(TruncationSpec::Fixed(n), sq(r), BobObservables::Reduced)
                .with_theta(theta);
        let run = || -> unruh_bell::Result<(f64, f64)> {
            let psi = post_measurement_state(&cfg)?;
            let generic = partial_trace(&outer(&psi, &psi)?, &[faithful_factors::BOB_REGION_II])?;
            let closed = region_i_density(&cfg)?;
            let fro = closed.frobenius_distance(&generic)?;
            let ds = (chsh_from_density(&cfg, &closed)?.s - chsh(&cfg)?.s).abs();
            Ok((fro, ds))
        };
        let (fro, ds) = run().map_err(|e| e.to_string())?;
        ensure(fro < 1e-12, format!("(N={n}, r={r}) Frobenius {fro:e}"))?;
        ensure(ds < 1e-10, format!("(N={n}, r={r}) |dS| = {ds:e}"))?;
        worst_fro = worst_fro.max(fro);
        worst_s = worst_s.max(ds);
    }
    Ok(format!(
        "max Frobenius {worst_fro:.2e}, max |dS| {worst_s:.2e}"
    ))
}

fn acceleration_mapping() -> Check {
    let mut worst = 0.0f64;
    for r in [0.1, 0.5, 1.0, 2.0, 6.0] {
        let back = squeeze_from_acceleration(acceleration_from_squeeze(sq(r))).value();
        let rel = ((back - r) / r).abs();
        ensure(rel < 1e-10, format!("r = {r}: relative error {rel:e}"))?;
        worst = worst.max(rel);
    }
    let a = acceleration_from_squeeze(sq((-PI).exp().atanh())).value();
    ensure(
        (a - 1.0).abs() < 1e-10,
        format!("a(artanh e^-pi) = {a:.15}"),
    )?;
    Ok(format!(
        "max round-trip error {worst:.2e}, a(artanh e^-pi) = {a:.12}"
    ))
}

fn script_regression() -> Check {
    let mut worst = 0.0f64;
    for r in [0.0, 0.5, 1.0, 1.5, 1.99] {
        let ours = chsh(&ExperimentConfig::compat(TruncationSpec::Fixed(3), sq(r)))
            .map_err(|e| e.to_string())?
            .s;
        let oracle = common::script_s(3, r, FRAC_PI_4);
        let d = (ours - oracle).abs();
        ensure(d < 1e-9, format!("r = {r}: {ours} vs {oracle}"))?;
        worst = worst.max(d);
    }
    Ok(format!("max |dS| {worst:.2e}"))
}

fn entanglement_cross_check() -> Check {
    let mut values = Vec::new();
    for r in [0.0, 0.25, 0.5, 1.0] {
        let cfg =
            ExperimentConfig::faithful(TruncationSpec::Fixed(10), sq(r), BobObservables::Reduced);
        values.push(entanglement_curve(&cfg).map_err(|e| e.to_string())?);
    }
    ensure(
        values.windows(2).all(|w| w[1] < w[0]),
        format!("not strictly decreasing: {values:?}"),
    )?;
    let oracle = common::inertial_negativity_oracle(FRAC_PI_4);
    ensure(
        (values[0] - oracle).abs() < 1e-9,
        format!("r=0: {} vs oracle {oracle}", values[0]),
    )?;
    let shown: Vec<String> = values.iter().map(|v| format!("{v:.4}")).collect();
    Ok(format!("E_N = [{}], oracle {oracle:.6}", shown.join(", ")))
}

fn random_op(rng: &mut StdRng, dim: usize) -> DensityOperator {
    let m = DMatrix::from_fn(dim, dim, |_, _| {
        Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    DensityOperator::new(m, FactorDims::single(dim).unwrap()).unwrap()
}

fn random_state(rng: &mut StdRng, dims: &[usize]) -> DensityOperator {
    let n: usize = dims.iter().product();
    let m = DMatrix::from_fn(n, n, |_, _| {
        Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    let rho =
        DensityOperator::new(&m * m.adjoint(), FactorDims::new(dims.to_vec()).unwrap()).unwrap();
    rho.normalize_trace().unwrap()
}

fn algebra_properties() -> Check {
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let err = |e: unruh_bell::Error| e.to_string();

    let mut worst_trace = 0.0f64;
    let mut worst_herm = 0.0f64;
    for _ in 0..20 {
        let dims: Vec<usize> = (0..3).map(|_| rng.gen_range(2..=3)).collect();
        let rho = random_state(&mut rng, &dims);
        for discard in [
            vec![0],
            vec![1],
            vec![2],
            vec![0, 1],
            vec![0, 2],
            vec![1, 2],
        ] {
            let red = partial_trace(&rho, &discard).map_err(err)?;
            worst_trace = worst_trace.max((red.trace() - rho.trace()).norm());
            worst_herm = worst_herm.max(red.max_hermitian_deviation());
        }
        for k in 0..3 {
            let pt = partial_transpose(&rho, k).map_err(err)?;
            worst_herm = worst_herm.max(pt.max_hermitian_deviation());
        }
    }
    ensure(worst_trace < 1e-12, format!("trace drift {worst_trace:e}"))?;
    ensure(
        worst_herm < 1e-12,
        format!("hermiticity drift {worst_herm:e}"),
    )?;

    let mut worst_mixed = 0.0f64;
    for _ in 0..20 {
        let (da, db) = (rng.gen_range(2..=3), rng.gen_range(2..=3));
        let (a, c) = (random_op(&mut rng, da), random_op(&mut rng, da));
        let (b, d) = (random_op(&mut rng, db), random_op(&mut rng, db));
        let lhs = tensor_op(&[&a, &b])
            .and_then(|ab| ab.compose(&tensor_op(&[&c, &d])?))
            .map_err(err)?;
        let rhs = tensor_op(&[&a.compose(&c).map_err(err)?, &b.compose(&d).map_err(err)?])
            .map_err(err)?;
        let diff = (lhs.matrix() - rhs.matrix()).camax();
        worst_mixed = worst_mixed.max(diff);
    }
    ensure(
        worst_mixed < 1e-12,
        format!("mixed-product residual {worst_mixed:e}"),
    )?;

    let spec = SweepSpec::default();
    let mut worst_corr = 0.0f64;
    for r in spec.grid().map_err(err)? {
        let res = chsh(&spec.config_at(r).map_err(err)?).map_err(err)?;
        for e in res.correlators {
            worst_corr = worst_corr.max(e.abs());
        }
    }
    ensure(
        worst_corr <= 1.0 + 1e-9,
        format!("max |<AiBj>| = {worst_corr}"),
    )?;

    Ok(format!(
        "trace {worst_trace:.1e}, hermiticity {worst_herm:.1e}, mixed product {worst_mixed:.1e}, max |<AiBj>| {worst_corr:.6}"
    ))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("inertial maximal violation", inertial_maximal_violation),
        ("zero-acceleration endpoint", zero_acceleration_endpoint),
        ("classicality crossing", classicality_crossing),
        ("region-I density closed form", region_i_closed_form),
        ("acceleration <-> squeeze mapping", acceleration_mapping),
        ("script regression", script_regression),
        ("entanglement cross-check", entanglement_cross_check),
        ("algebra property suite", algebra_properties),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        match std::panic::catch_unwind(check) {
            Ok(Ok(detail)) => println!("PASS  {name}: {detail}"),
            Ok(Err(why)) => {
                failed += 1;
                println!("FAIL  {name}: {why}");
            }
            Err(_) => {
                failed += 1;
                println!("FAIL  {name}: panicked");
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
