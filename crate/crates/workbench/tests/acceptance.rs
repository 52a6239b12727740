//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each
//! and exits non-zero if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use lorenz_anticontrol::equilibria::{DEFAULT_RESIDUAL_TOL, P_DEGENERACY_TOL};
use lorenz_anticontrol::integrator::DEFAULT_CAPTURE_RADIUS;
use lorenz_anticontrol::sign::DEFAULT_SIGN_TOL;
use lorenz_anticontrol::{
    branch_symmetry_deviation, certificate, classify_origin, corollary_check, find_equilibria, from_preset,
    hypotheses_check, integrate, integrate_to_equilibrium, largest_lyapunov_exponent, lyapunov_coefficients,
    origin_eigenvalues, suggest_anticontrol, trace_heteroclinic, vector_field, Branch, EquilibriumKind,
    IntegratorSettings, LleConfig, OriginClass, ParamName, Preset, State, SystemParams, TrajectoryStatus,
};
use lorenz_workbench::emit::{render, Format};
use lorenz_workbench::sweep::{run_sweep, Axis, SweepSpec, Task, TaskOutput};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome, u64);

fn check(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn uniform_state(r: &mut ChaCha8Rng, half: f64) -> State {
    State::new(r.gen_range(-half..half), r.gen_range(-half..half), r.gen_range(-half..half))
}

/// Parameters satisfying the Lyapunov-function hypotheses with `P < 1` and
/// `b >= 2a`, so that the function is bounded below.
fn lemma_params(r: &mut ChaCha8Rng) -> SystemParams {
    let a = r.gen_range(0.2..3.0);
    SystemParams {
        a,
        b: 2.0 * a + r.gen_range(0.0..5.0),
        c: r.gen_range(-5.0..5.0),
        m: r.gen_range(-5.0..5.0),
        n: a + 1.0 - r.gen_range(0.0..3.0),
        p: r.gen_range(-1.0..0.9),
    }
}

fn eigen_oracle(p: &SystemParams) -> OriginClass {
    let eigs = origin_eigenvalues(p);
    let stable = eigs.iter().filter(|z| z.re < 0.0).count();
    let unstable = eigs.iter().filter(|z| z.re > 0.0).count();
    match (stable, unstable) {
        (3, 0) => OriginClass::Attractor,
        (2, 1) => OriginClass::SaddleWs2Wu1,
        (1, 2) => OriginClass::SaddleWs1Wu2,
        _ => OriginClass::NonHyperbolic,
    }
}

fn c1_origin_classification() -> Outcome {
    let mut r = rng(1);
    let mut done = 0;
    let mut seen = [0usize; 3];
    while done < 10_000 {
        let p = SystemParams {
            a: r.gen_range(-10.0..10.0),
            b: r.gen_range(1e-3..10.0),
            c: r.gen_range(-30.0..30.0),
            m: r.gen_range(-30.0..30.0),
            n: r.gen_range(-30.0..30.0),
            p: r.gen_range(-2.0..2.0),
        };
        let det_term = p.a * p.pitchfork_gap();
        let trace_term = p.n - p.a - 1.0;
        if det_term.abs() < 1e-3 || trace_term.abs() < 1e-3 {
            continue;
        }
        let got = classify_origin(&p, DEFAULT_SIGN_TOL);
        let want = eigen_oracle(&p);
        check(got == want, format!("{p:?}: classify_origin {got:?}, eigenvalues say {want:?}"))?;
        match got {
            OriginClass::SaddleWs2Wu1 => seen[0] += 1,
            OriginClass::SaddleWs1Wu2 => seen[1] += 1,
            OriginClass::Attractor => seen[2] += 1,
            _ => {}
        }
        done += 1;
    }
    check(seen.iter().all(|&n| n > 0), format!("class coverage {seen:?}"))?;
    Ok(format!("10000/10000 agree (Ws2Wu1 {}, Ws1Wu2 {}, attractor {})", seen[0], seen[1], seen[2]))
}

fn c2_equilibrium_residual() -> Outcome {
    let mut r = rng(2);
    let mut done = 0;
    let mut worst = 0.0f64;
    while done < 1_000 {
        let p = SystemParams {
            a: r.gen_range(0.1..20.0),
            b: r.gen_range(0.1..10.0),
            c: r.gen_range(-30.0..30.0),
            m: r.gen_range(-30.0..30.0),
            n: r.gen_range(-30.0..30.0),
            p: r.gen_range(-2.0..2.0),
        };
        let set = find_equilibria(&p, DEFAULT_RESIDUAL_TOL).map_err(|e| format!("{p:?}: {e}"))?;
        if set.kind != EquilibriumKind::Triple {
            continue;
        }
        let pair = set.pair.ok_or("Triple without a pair")?;
        for e in [pair.plus.location, pair.minus.location] {
            let ratio = vector_field(&p, &e).norm() / (1e-10 * (1.0 + e.norm()));
            worst = worst.max(ratio);
            check(ratio <= 1.0, format!("{p:?}: residual at {e:?} exceeds bound"))?;
        }
        done += 1;
    }
    Ok(format!("1000 Triple draws, worst residual {worst:.2e} of bound"))
}

/// Gradient of the function with the middle term written `(z - x²/b)²`.
fn literal_gradient(p: &SystemParams, s: &State) -> State {
    let k = lyapunov_coefficients(p).unwrap();
    let w = s.z - s.x * s.x / p.b;
    let q = s.x * s.x - k.k;
    State::new(
        2.0 * k.a_coef * (s.x - s.y) - 4.0 * s.x * w / p.b + 4.0 * k.b_coef * s.x * q,
        -2.0 * k.a_coef * (s.x - s.y),
        2.0 * w,
    )
}

fn printed_closed_form(p: &SystemParams, s: &State) -> f64 {
    let (a, b) = (p.a, p.b);
    let d = s.x - s.y;
    let w = b * s.z - s.x * s.x;
    -2.0 * b * (b - 2.0 * a) * (a + 1.0 - p.n) / (1.0 - p.p) * d * d - 2.0 * b * w * w
}

fn dot_scale(g: &State, f: &State) -> f64 {
    (g.x * f.x).abs() + (g.y * f.y).abs() + (g.z * f.z).abs()
}

fn c3_lyapunov_consistency() -> Outcome {
    let mut r = rng(3);
    let mut done = 0;
    let mut literal_fail = 0;
    let mut worst = 0.0f64;
    while done < 10_000 {
        let a = r.gen_range(0.1..10.0);
        let p_val = r.gen_range(-3.0..3.0);
        let b = if p_val < 1.0 {
            2.0 * a + r.gen_range(0.0..10.0)
        } else {
            r.gen_range(1e-3..2.0 * a)
        };
        let p = SystemParams {
            a,
            b,
            c: r.gen_range(-30.0..30.0),
            m: r.gen_range(-30.0..30.0),
            n: a + 1.0 - r.gen_range(0.0..10.0),
            p: p_val,
        };
        if !hypotheses_check(&p).lemma_ok {
            continue;
        }
        let s = uniform_state(&mut r, 20.0);
        let k = lyapunov_coefficients(&p).map_err(|e| e.to_string())?;
        let f = vector_field(&p, &s);
        let closed = printed_closed_form(&p, &s);

        let g = k.gradient(&p, &s);
        let chain = k.derivative(&p, &s);
        let scale = dot_scale(&g, &f).max(closed.abs());
        let rel = (chain - closed).abs() / scale.max(f64::MIN_POSITIVE);
        worst = worst.max(rel);
        check(rel <= 1e-9, format!("{p:?} at {s:?}: chain rule {chain}, closed form {closed}"))?;

        let gl = literal_gradient(&p, &s);
        let literal = gl.dot(&f);
        let lscale = dot_scale(&gl, &f).max(closed.abs());
        if (literal - closed).abs() > 1e-9 * lscale {
            literal_fail += 1;
        }
        done += 1;
    }
    check(
        literal_fail >= 9_900,
        format!("literal middle term matched on {} of 10000 draws", 10_000 - literal_fail),
    )?;
    Ok(format!(
        "corrected form: worst relative error {worst:.2e}; literal form mismatches on {literal_fail}/10000"
    ))
}

/// Sum of the magnitudes of the terms of V, bounding its evaluation error.
fn v_magnitude(p: &SystemParams, k: &lorenz_anticontrol::LyapunovCoefficients, s: &State) -> f64 {
    let d = s.x - s.y;
    let w = p.b * s.z;
    let q = s.x * s.x;
    k.a_coef * d * d + (w.abs() + q) * (w.abs() + q) + k.b_coef.abs() * (q + k.k.abs()) * (q + k.k.abs())
}

fn c4_monotone_decrease() -> Outcome {
    let mut r = rng(4);
    let mut steps = 0usize;
    let mut worst = 0.0f64;
    let settings = IntegratorSettings {
        t_max: 20.0,
        ..IntegratorSettings::default()
    };
    for _ in 0..100 {
        let p = lemma_params(&mut r);
        check(hypotheses_check(&p).lemma_ok, format!("{p:?} drawn outside the hypotheses"))?;
        let k = lyapunov_coefficients(&p).map_err(|e| e.to_string())?;
        let u0 = uniform_state(&mut r, 20.0);
        let tr = integrate(&p, u0, &settings).map_err(|e| e.to_string())?;
        check(
            tr.status == TrajectoryStatus::CompletedTspan,
            format!("{p:?} from {u0:?}: {:?}", tr.status),
        )?;
        for pair in tr.states.windows(2) {
            let (s0, s1) = (pair[0], pair[1]);
            let rise = k.value(&p, &s1) - k.value(&p, &s0);
            let grad = k.gradient(&p, &s0).norm().max(k.gradient(&p, &s1).norm());
            let roundoff = 8.0 * f64::EPSILON * v_magnitude(&p, &k, &s0).max(v_magnitude(&p, &k, &s1));
            let allowance =
                10.0 * settings.step_tolerance(s0.norm().max(s1.norm())) * (1.0 + grad) + roundoff;
            worst = worst.max(rise / allowance);
            check(rise <= allowance, format!("{p:?}: V rose by {rise:e} (allowance {allowance:e}) at {s1:?}"))?;
            steps += 1;
        }
    }
    Ok(format!("100 runs, {steps} steps, largest rise {worst:.2e} of allowance"))
}

fn c5_global_convergence() -> Outcome {
    let p = SystemParams::lorenz(1.0, 3.0, 2.0);
    let eqs = find_equilibria(&p, DEFAULT_RESIDUAL_TOL).map_err(|e| e.to_string())?;
    let settings = IntegratorSettings::default();
    let mut r = rng(5);
    let mut counts = [0usize; 3];
    let mut latest = 0.0f64;
    for _ in 0..100 {
        let u0 = uniform_state(&mut r, 10.0);
        let out = integrate_to_equilibrium(&p, u0, &eqs, DEFAULT_CAPTURE_RADIUS, &settings)
            .map_err(|e| e.to_string())?;
        let t_end = *out.trajectory.times.last().unwrap();
        check(
            out.trajectory.status == TrajectoryStatus::CapturedEquilibrium,
            format!("{u0:?}: {:?}", out.trajectory.status),
        )?;
        check(t_end <= 200.0, format!("{u0:?}: captured at t = {t_end}"))?;
        check(out.final_distance <= 1e-6, format!("{u0:?}: distance {}", out.final_distance))?;
        let loc = out.terminal.ok_or("no terminal equilibrium")?.location;
        match loc {
            l if l == eqs.origin.location => counts[0] += 1,
            l if l.x > 0.0 => counts[1] += 1,
            _ => counts[2] += 1,
        }
        latest = latest.max(t_end);
    }
    Ok(format!(
        "100/100 captured (O {}, E+ {}, E- {}), latest capture t = {latest:.1}",
        counts[0], counts[1], counts[2]
    ))
}

fn c6_heteroclinic() -> Outcome {
    let p = SystemParams::lorenz(1.0, 3.0, 2.0);
    let target = State::new(3f64.sqrt(), 3f64.sqrt(), 1.0);
    let settings = IntegratorSettings::default();
    let mut detail = Vec::new();
    for eps in [1e-4, 1e-6, 1e-8] {
        let res = trace_heteroclinic(&p, Branch::PlusX, eps, &settings).map_err(|e| e.to_string())?;
        let end = res.terminal.ok_or(format!("eps {eps:e}: not captured"))?.location;
        let d = end.distance(&target);
        check(res.success && d <= 1e-6, format!("eps {eps:e}: terminal {end:?}, distance {d:e}"))?;
        check(res.extremal_x > 0.0, format!("eps {eps:e}: min x = {}", res.extremal_x))?;
        detail.push(format!("eps {eps:e}: min_x {:.1e}", res.extremal_x));
    }
    let fixed = IntegratorSettings::fixed(1e-2, 200.0);
    let plus = trace_heteroclinic(&p, Branch::PlusX, 1e-6, &fixed).map_err(|e| e.to_string())?;
    let minus = trace_heteroclinic(&p, Branch::MinusX, 1e-6, &fixed).map_err(|e| e.to_string())?;
    let dev = branch_symmetry_deviation(&plus, &minus).map_err(|e| e.to_string())?;
    check(dev == 0.0, format!("mirrored branch deviation {dev:e}"))?;
    Ok(format!("{}; mirrored RK4 deviation 0", detail.join(", ")))
}

fn sweep(base: SystemParams, axis: &str, tasks: Vec<Task>) -> Result<lorenz_workbench::sweep::SweepResult, String> {
    let axis: Axis = axis.parse().map_err(|e| format!("{e}"))?;
    run_sweep(&SweepSpec::new(base, vec![axis], tasks), Some(2)).map_err(|e| e.to_string())
}

fn c7_pitchfork_sweep() -> Outcome {
    use OriginClass::*;
    let base = SystemParams::lorenz(10.0, 8.0 / 3.0, 0.5);
    let res = sweep(base, "c:0.5:1.5:11", vec![Task::OriginClass])?;
    for row in &res.rows {
        let c = row.axis_values[0];
        let want = if c < 1.0 {
            Attractor
        } else if c == 1.0 {
            NonHyperbolic
        } else {
            SaddleWs2Wu1
        };
        check(
            row.outputs[0] == TaskOutput::OriginClass { class: want },
            format!("c = {c}: {:?}, expected {want:?}", row.outputs[0]),
        )?;
    }
    check(res.rows[5].axis_values[0] == 1.0, "grid misses c = 1")?;
    for (c, want) in [(1.0 - 1e-9, Attractor), (1.0, NonHyperbolic), (1.0 + 1e-9, SaddleWs2Wu1)] {
        let got = classify_origin(&base.with(ParamName::C, c), DEFAULT_SIGN_TOL);
        check(got == want, format!("c = {c}: {got:?}, expected {want:?}"))?;
    }

    let res = sweep(base, "M:0:1:11", vec![Task::Equilibria])?;
    for row in &res.rows {
        let m = row.axis_values[0];
        let want = if m > 0.5 { 3 } else { 1 };
        match &row.outputs[0] {
            TaskOutput::Equilibria { count, .. } => {
                check(*count == Some(want), format!("M = {m}: count {count:?}, expected {want}"))?
            }
            other => return Err(format!("M = {m}: {other:?}")),
        }
    }
    for (m, want) in [(0.5 - 1e-9, Some(1)), (0.5, Some(1)), (0.5 + 1e-9, Some(3))] {
        let set = find_equilibria(&base.with(ParamName::M, m), DEFAULT_RESIDUAL_TOL).map_err(|e| e.to_string())?;
        check(set.count() == want, format!("M = {m}: count {:?}", set.count()))?;
    }
    Ok("origin Attractor -> NonHyperbolic -> SaddleWs2Wu1 at c = 1; count 1 -> 3 at M = 0.5".into())
}

fn c8_chaos_detection() -> Outcome {
    let settings = IntegratorSettings::default();
    let cfg = LleConfig::default();
    let u0 = State::new(1.0, 1.0, 1.0);
    let chaotic = largest_lyapunov_exponent(&SystemParams::lorenz(10.0, 8.0 / 3.0, 28.0), u0, &settings, &cfg)
        .map_err(|e| e.to_string())?
        .lambda1;
    let stable = largest_lyapunov_exponent(&SystemParams::lorenz(10.0, 8.0 / 3.0, 0.5), u0, &settings, &cfg)
        .map_err(|e| e.to_string())?
        .lambda1;
    check((0.8..=1.0).contains(&chaotic), format!("LLE at c = 28 is {chaotic}"))?;
    check((-0.55..=-0.40).contains(&stable), format!("LLE at c = 0.5 is {stable}"))?;
    Ok(format!("LLE(c = 28) = {chaotic:.4}, LLE(c = 0.5) = {stable:.4}"))
}

fn c9_anticontrol() -> Outcome {
    let s = suggest_anticontrol(10.0, 8.0 / 3.0, 0.5, 28.0).map_err(|e| e.to_string())?;
    check(s.necessary_condition_holds, "b < 2a not reported")?;
    check(s.params.b < 2.0 * s.params.a, "b < 2a fails")?;
    check(!s.chaos_guaranteed, "suggestion claims chaos")?;
    let lle = largest_lyapunov_exponent(
        &s.params,
        State::new(1.0, 1.0, 1.0),
        &IntegratorSettings::default(),
        &LleConfig::default(),
    )
    .map_err(|e| e.to_string())?
    .lambda1;
    check((0.8..=1.1).contains(&lle), format!("controlled LLE {lle}"))?;
    Ok(format!("M = {}, LLE = {lle:.4}, b < 2a holds", s.params.m))
}

fn c10_corollaries() -> Outcome {
    let e = |r: lorenz_anticontrol::Result<bool>| r.map_err(|e| e.to_string());
    check(e(corollary_check(Preset::Lorenz, 1.0, 3.0, 2.0))?, "Lorenz (1,3,2) should hold")?;
    check(!e(corollary_check(Preset::Chen, 35.0, 3.0, 28.0))?, "Chen (35,3,28) should fail")?;
    let (a, b, c) = (1.0, 1.5, 2.0);
    let t = e(corollary_check(Preset::TSystem, a, b, c))?;
    check(t == (c - a > 0.0 && b - 2.0 * a <= 0.0), "T-system condition not evaluated as stated")?;
    check(
        !e(corollary_check(Preset::TSystem, 1.0, 3.0, 2.0))?,
        "T-system with b > 2a should fail",
    )?;
    check(corollary_check(Preset::Lu, 1.0, 3.0, 2.0).is_err(), "Lu corollary should be unsupported")?;

    let mut r = rng(10);
    let mut counts = [0usize; 3];
    for _ in 0..10_000 {
        let a = r.gen_range(-1.0..5.0);
        let pick = |r: &mut ChaCha8Rng, v: f64, lo: f64, hi: f64| if r.gen_bool(0.1) { v } else { r.gen_range(lo..hi) };
        let p = SystemParams {
            a,
            b: pick(&mut r, 2.0 * a, -1.0, 12.0),
            c: r.gen_range(-10.0..10.0),
            m: r.gen_range(-10.0..10.0),
            n: pick(&mut r, a + 1.0, -10.0, 10.0),
            p: pick(&mut r, 1.0, -2.0, 2.0),
        };
        let cert = certificate(&p);
        let f = cert.flags;
        check(!f.het_ok || f.conv_ok, format!("{p:?}: het_ok without conv_ok"))?;
        check(!f.conv_ok || f.lemma_ok, format!("{p:?}: conv_ok without lemma_ok"))?;
        check(
            cert.no_closed_orbits == f.lemma_ok
                && cert.converges_to_equilibria == f.conv_ok
                && cert.heteroclinic_pair == f.het_ok,
            format!("{p:?}: conclusions do not follow flags"),
        )?;
        check(!(f.conv_ok && cert.chaos_possible), format!("{p:?}: chaos possible under convergence"))?;
        check(
            !f.lemma_ok || (1.0 - p.p).abs() > P_DEGENERACY_TOL * (1.0 + p.p.abs()),
            format!("{p:?}: lemma_ok at P = 1"),
        )?;
        counts[0] += f.lemma_ok as usize;
        counts[1] += f.conv_ok as usize;
        counts[2] += f.het_ok as usize;
    }
    check(counts.iter().all(|&n| n > 0), format!("flag coverage {counts:?}"))?;
    Ok(format!(
        "corollaries reproduced; nesting holds on 10000 draws (lemma {}, conv {}, het {})",
        counts[0], counts[1], counts[2]
    ))
}

fn c11_determinism() -> Outcome {
    let base = from_preset(Preset::Lorenz, 10.0, 8.0 / 3.0, 28.0);
    let mut spec = SweepSpec::new(
        base,
        vec!["c:0.5:30:6".parse().unwrap(), "M:0:2:4".parse().unwrap()],
        vec![Task::Equilibria, Task::OriginClass, Task::Certificate, Task::Regime, Task::Lle],
    );
    spec.seed = 7;
    spec.lle = LleConfig {
        renorm_interval: 1.0,
        transient: 5.0,
        horizon: 20.0,
    };
    let csv = |w: usize| -> Result<String, String> {
        render(&run_sweep(&spec, Some(w)).map_err(|e| e.to_string())?, Format::Csv).map_err(|e| e.to_string())
    };
    let reference = csv(1)?;
    for w in [2, 3, 8] {
        check(csv(w)? == reference, format!("CSV with {w} workers differs from 1 worker"))?;
    }
    check(csv(1)? == reference, "repeat run with 1 worker differs")?;
    Ok(format!("{} bytes identical across 1, 2, 3, 8 workers", reference.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("origin classification matches eigenvalue oracle", c1_origin_classification, 5),
        ("equilibrium residuals", c2_equilibrium_residual, 1),
        ("Lyapunov derivative closed form", c3_lyapunov_consistency, 5),
        ("monotone Lyapunov function", c4_monotone_decrease, 30),
        ("global convergence of Lorenz(1,3,2)", c5_global_convergence, 30),
        ("heteroclinic pair", c6_heteroclinic, 10),
        ("pitchfork sweep", c7_pitchfork_sweep, 5),
        ("chaos detection", c8_chaos_detection, 60),
        ("anticontrol demonstration", c9_anticontrol, 60),
        ("certificate corollaries and nesting", c10_corollaries, 5),
        ("sweep determinism", c11_determinism, 10),
    ];
    let mut failed = 0;
    for (i, (name, run, limit)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let mut result = run();
        let elapsed = start.elapsed();
        if result.is_ok() && elapsed > Duration::from_secs(limit) {
            result = Err(format!("took {:.2}s, limit {limit}s", elapsed.as_secs_f64()));
        }
        let secs = elapsed.as_secs_f64();
        match result {
            Ok(msg) => println!("acceptance {:>2} PASS  {name} [{secs:.2}s] {msg}", i + 1),
            Err(msg) => {
                failed += 1;
                println!("acceptance {:>2} FAIL  {name} [{secs:.2}s] {msg}", i + 1)
            }
        }
    }
    println!("{} passed, {failed} failed", 11 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
