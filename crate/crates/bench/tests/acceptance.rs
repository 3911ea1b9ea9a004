//! One PASS/FAIL line per acceptance criterion. Exits nonzero if any fails.

use std::collections::BTreeSet;
use std::f64::consts::TAU;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use socnav_bench::metrics::{run_episode, run_trials};
use socnav_bench::protocol::{Response, Session};
use socnav_bench::server::serve_stream;
use socnav_core::env::{
    compute_reward, DoneStatus, Env, EnvConfig, COLLISION_PENALTY, DISCOMFORT_PENALTY,
};
use socnav_core::geometry::{
    min_margin_distances, ray_cast, CircleEntity, Emotion, EntityKind, Pose, Vec2,
};
use socnav_core::grid::{build_lgm, build_ogm, polar_index, CellClass, EmotionProfile, GridSpec};
use socnav_core::lip::{lip_step, LipParams};
use socnav_core::orca::{solve_velocity_lp, step_pedestrians, HalfPlane, OrcaAgent, OrcaParams};
use socnav_core::planners::{greedy_policy, DwaPolicy, GreedyPolicy};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn run(name: &str, budget: Duration, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        let msg = p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_default();
        Err(format!("panicked: {msg}"))
    });
    let took = start.elapsed();
    let result = result.and_then(|detail| {
        if took <= budget {
            Ok(detail)
        } else {
            Err(format!("{detail}; runtime {:.1}s over {}s budget", took.as_secs_f64(), budget.as_secs()))
        }
    });
    match &result {
        Ok(detail) => println!("PASS {name}: {detail} [{:.2}s]", took.as_secs_f64()),
        Err(detail) => println!("FAIL {name}: {detail} [{:.2}s]", took.as_secs_f64()),
    }
    result.is_ok()
}

// ---- LIP ----

fn series_cosh_sinh(x: f64) -> (f64, f64) {
    let mut terms = Vec::with_capacity(60);
    let mut t = 1.0;
    for n in 0..60 {
        terms.push(t);
        t *= x / (n + 1) as f64;
    }
    let even: f64 = terms.iter().step_by(2).rev().sum();
    let odd: f64 = terms.iter().skip(1).step_by(2).rev().sum();
    (even, odd)
}

fn lip_suite() -> Outcome {
    let p = LipParams::default();
    let w = (p.g / p.com_height).sqrt();
    let (c, s) = series_cosh_sinh(w * p.step_time);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let v = rng.random_range(0.0..=p.u_v_max);
        let u = rng.random_range(0.0..=p.u_v_max);
        let out = lip_step(v, u, &p);
        // Pendulum solution started at -d, foot placed so the switch speed is u.
        let d = (v * c - u) / (w * s);
        let dx = -d * c + v / w * s + d;
        worst = worst.max((out.delta_x - dx).abs()).max((out.foot_distance - d).abs());
    }
    ensure(worst <= 1e-9, || format!("max error {worst:e} on random pairs"))?;
    let mut steady: f64 = 0.0;
    for k in 0..=100 {
        let v = p.u_v_max * k as f64 / 100.0;
        let wt = w * p.step_time;
        let closed = 2.0 * v * (wt.cosh() - 1.0) / (w * wt.sinh());
        steady = steady.max((lip_step(v, v, &p).delta_x - closed).abs());
    }
    ensure(steady <= 1e-12, || format!("steady-state error {steady:e}"))?;
    Ok(format!("1000 pairs max err {worst:.1e}, steady-state max err {steady:.1e}"))
}

// ---- Grid ----

fn entry(dir: Vec2, c: Vec2, r: f64) -> Option<f64> {
    let b = -2.0 * c.dot(dir);
    let cc = c.dot(c) - r * r;
    let disc = b * b - 4.0 * cc;
    if disc < 0.0 {
        return None;
    }
    let q = -0.5 * (b + b.signum() * disc.sqrt());
    let (t1, t2) = if q == 0.0 { (0.0, 0.0) } else { (q, cc / q) };
    let (lo, hi) = (t1.min(t2), t1.max(t2));
    if lo >= 0.0 {
        Some(lo)
    } else if hi >= 0.0 && cc <= 0.0 {
        Some(0.0)
    } else {
        None
    }
}

fn extra(profile: &EmotionProfile, e: &CircleEntity) -> f64 {
    match e.kind {
        EntityKind::Static => profile.d_static,
        EntityKind::Pedestrian => match e.emotion.unwrap() {
            Emotion::Happy => profile.happy,
            Emotion::Neutral => profile.neutral,
            Emotion::Negative => profile.negative,
        },
        EntityKind::Robot => unreachable!(),
    }
}

fn lgm_oracle(entities: &[CircleEntity], profile: &EmotionProfile, spec: &GridSpec) -> Vec<CellClass> {
    let m = spec.size;
    let w = spec.max_range / m as f64;
    let per = spec.beams / m;
    let mut cells = vec![CellClass::Free; m * m];
    for beam in 0..spec.beams {
        let seg = beam / per;
        let dir = Vec2::from_angle(TAU * beam as f64 / spec.beams as f64);
        let hit = entities
            .iter()
            .filter_map(|e| entry(dir, e.center, e.radius).map(|t| (t, e)))
            .min_by(|a, b| a.0.total_cmp(&b.0));
        let Some((rho, e)) = hit else { continue };
        if rho >= spec.max_range {
            continue;
        }
        let outer = e.radius + extra(profile, e);
        for ring in 1..=m {
            let (lo, hi) = ((ring - 1) as f64 * w, ring as f64 * w);
            let cell = &mut cells[(ring - 1) * m + seg];
            if (lo < rho || ring == 1) && rho <= hi {
                *cell = CellClass::Collision;
            } else if lo < rho && *cell == CellClass::Free {
                let t = e.center.dot(dir).clamp(lo, hi.min(rho));
                if (dir * t - e.center).length() <= outer {
                    *cell = CellClass::Discomfort;
                }
            }
        }
    }
    cells
}

fn ogm_oracle(entities: &[CircleEntity], profile: &EmotionProfile, spec: &GridSpec) -> Vec<CellClass> {
    let m = spec.size;
    let side = 2.0 * spec.max_range / m as f64;
    let mut cells = vec![CellClass::Free; m * m];
    for row in 0..m {
        for col in 0..m {
            let p = Vec2::new(
                -spec.max_range + side * (col as f64 + 0.5),
                spec.max_range - side * (row as f64 + 0.5),
            );
            let within = |e: &CircleEntity, r: f64| p.distance(e.center) <= r;
            cells[row * m + col] = if entities.iter().any(|e| within(e, e.radius)) {
                CellClass::Collision
            } else if entities.iter().any(|e| within(e, e.radius + extra(profile, e))) {
                CellClass::Discomfort
            } else {
                CellClass::Free
            };
        }
    }
    cells
}

fn random_scene(rng: &mut ChaCha8Rng) -> Vec<CircleEntity> {
    (0..rng.random_range(1..=6))
        .map(|_| {
            let radius = rng.random_range(0.1..0.6);
            let center = Vec2::from_angle(rng.random_range(0.0..TAU)) * rng.random_range(radius + 0.05..7.0);
            if rng.random_bool(0.4) {
                CircleEntity::new_static(center, radius)
            } else {
                CircleEntity::new_pedestrian(center, radius, Emotion::ALL[rng.random_range(0..3)])
            }
        })
        .collect()
}

fn grid_suite() -> Outcome {
    let spec = GridSpec::default();
    let profile = EmotionProfile::default();
    let scan = ray_cast(Pose::default(), &[], spec.scan_spec()).unwrap();
    let empty = build_lgm(&scan, &[], &profile, &spec, 0).unwrap();
    ensure(empty.cells.len() == 10_000, || format!("{} cells", empty.cells.len()))?;
    let ring1 = (0..spec.size).filter(|&j| empty.polar(1, j) == CellClass::Free).count();
    ensure(ring1 == 100, || format!("ring 1 has {ring1} cells"))?;

    let mut seen = BTreeSet::new();
    for ring in 1..=spec.size {
        for seg in 0..spec.size {
            let back = polar_index(spec.polar_cell_center(ring, seg), &spec);
            ensure(back == Some((ring, seg)), || format!("({ring},{seg}) maps to {back:?}"))?;
            seen.insert((ring, seg));
        }
    }
    ensure(seen.len() == 10_000, || "polar_index is not injective".into())?;

    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let mut cells = 0;
    for scene in 0..100 {
        let entities = random_scene(&mut rng);
        let scan = ray_cast(Pose::default(), &entities, spec.scan_spec()).unwrap();
        let lgm = build_lgm(&scan, &entities, &profile, &spec, 0).unwrap();
        let bad = lgm.cells.iter().zip(lgm_oracle(&entities, &profile, &spec)).filter(|(a, b)| **a != *b).count();
        ensure(bad == 0, || format!("LGM scene {scene}: {bad} cells disagree"))?;
        let ogm = build_ogm(&entities, &profile, &spec, 0);
        let bad = ogm.cells.iter().zip(ogm_oracle(&entities, &profile, &spec)).filter(|(a, b)| **a != *b).count();
        ensure(bad == 0, || format!("OGM scene {scene}: {bad} cells disagree"))?;
        cells += lgm.cells.len() + ogm.cells.len();
    }
    Ok(format!("10000 cells, ring 1 = 100, bijection ok, 100 scenes / {cells} cells agree"))
}

// ---- Reward ----

fn reward_suite() -> Outcome {
    let r = 0.3;
    let robot = CircleEntity::new_robot(Vec2::ZERO, r);
    let profile = EmotionProfile::default();
    let at = |e: CircleEntity, emo: &[Emotion], prev: f64, cur: f64| {
        let d = min_margin_distances(&robot, &[e]);
        compute_reward(prev, cur, &d, emo, &profile, r, 0.1)
    };
    let mut branches = 0;
    let col = at(CircleEntity::new_static(Vec2::new(0.5, 0.0), 0.3), &[], 3.0, 3.0);
    ensure(col.r_col == COLLISION_PENALTY, || format!("collision branch {col:?}"))?;
    branches += 1;
    let stat = at(CircleEntity::new_static(Vec2::new(0.75, 0.0), 0.3), &[], 3.0, 3.0);
    ensure(stat.r_col == -0.1 && stat.r_emo == 0.0, || format!("static discomfort {stat:?}"))?;
    branches += 1;
    for (emotion, penalized) in [(Emotion::Happy, false), (Emotion::Neutral, true), (Emotion::Negative, true)] {
        let e = at(CircleEntity::new_pedestrian(Vec2::new(0.9, 0.0), 0.3, emotion), &[emotion], 3.0, 3.0);
        ensure((e.r_emo == DISCOMFORT_PENALTY) == penalized, || format!("{emotion:?} band {e:?}"))?;
        branches += 1;
    }
    let far = CircleEntity::new_static(Vec2::new(5.0, 0.0), 0.3);
    let goal = at(far, &[], 0.2, 0.1);
    ensure(goal.r_goal == 0.5, || format!("goal bonus {goal:?}"))?;
    let prog = at(far, &[], 2.0, 1.9);
    ensure((prog.r_goal - 0.03).abs() < 1e-15, || format!("progress {prog:?}"))?;
    let back = at(far, &[], 1.9, 2.0);
    ensure((back.r_goal + 0.03).abs() < 1e-15, || format!("regress {back:?}"))?;
    ensure(back.r_col == 0.0 && back.r_emo == 0.0, || format!("free space {back:?}"))?;
    branches += 4;

    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let (mut doubles, mut overlaps) = (0, 0);
    for _ in 0..10_000 {
        let place = |rng: &mut ChaCha8Rng, lo: f64, hi: f64| Vec2::from_angle(rng.random_range(0.0..TAU)) * rng.random_range(lo..hi);
        let s = CircleEntity::new_static(place(&mut rng, 0.45, 1.1), rng.random_range(0.1..0.4));
        let emotion = Emotion::ALL[rng.random_range(0..3)];
        let q = CircleEntity::new_pedestrian(place(&mut rng, 0.5, 1.4), 0.3, emotion);
        let d = min_margin_distances(&robot, &[s, q]);
        let prev = rng.random_range(1.0..8.0);
        let cur = prev - rng.random_range(-0.15..0.15);
        let rw = compute_reward(prev, cur, &d, &[emotion], &profile, r, 0.1);
        if rw.r_col != COLLISION_PENALTY && rw.total - rw.r_goal < -0.1 - 1e-12 {
            doubles += 1;
        }
        if rw.discomfort_counted_once {
            overlaps += 1;
        }
    }
    ensure(doubles == 0, || format!("{doubles} double penalties"))?;
    ensure(overlaps > 500, || format!("only {overlaps} overlapping-zone steps"))?;

    let mut worst: f64 = 0.0;
    for seed in 0..20 {
        let (mut env, first) = Env::reset_with(EnvConfig::default(), seed).unwrap();
        let (goal, lip) = (env.config().robot_goal, env.config().lip);
        let (d0, mut last, mut sum) = (first.goal_state.distance, first.goal_state.distance, 0.0);
        loop {
            let a = greedy_policy(env.robot(), goal, &lip);
            let step = env.step(a.u_v, a.u_dtheta).unwrap();
            if step.done == DoneStatus::Goal {
                break;
            }
            sum += step.reward.r_goal;
            last = step.goal_state.distance;
            if step.done.is_done() {
                break;
            }
        }
        worst = worst.max((sum - 0.3 * (d0 - last)).abs());
    }
    ensure(worst <= 1e-12, || format!("telescoping error {worst:e}"))?;
    Ok(format!(
        "{branches} branches, 10000 adversarial steps / {overlaps} overlapping / 0 doubles, telescoping err {worst:.1e}"
    ))
}

// ---- ORCA ----

fn max_violation(planes: &[HalfPlane], v: Vec2) -> f64 {
    planes.iter().map(|p| p.violation(v)).fold(f64::NEG_INFINITY, f64::max)
}

/// Minimizes `objective` over the disk of radius `max_speed`: a lattice with
/// two refinement passes, plus dense samples along the disk edge and along
/// every constraint line, where constrained optima sit.
fn sample_min(planes: &[HalfPlane], max_speed: f64, objective: impl Fn(Vec2) -> f64) -> (Vec2, f64) {
    let mut best = (Vec2::ZERO, objective(Vec2::ZERO));
    let mut consider = |v: Vec2, best: &mut (Vec2, f64)| {
        let f = objective(v);
        if f < best.1 {
            *best = (v, f);
        }
    };
    let scan = |center: Vec2, half: f64, step: f64, best: &mut (Vec2, f64), consider: &mut dyn FnMut(Vec2, &mut (Vec2, f64))| {
        let n = (half / step).ceil() as i64;
        for i in -n..=n {
            for j in -n..=n {
                let v = center + Vec2::new(i as f64 * step, j as f64 * step);
                if v.length() <= max_speed {
                    consider(v, best);
                }
            }
        }
    };
    scan(Vec2::ZERO, max_speed, 0.01, &mut best, &mut consider);
    for (half, step) in [(0.15, 0.002), (0.006, 0.0002)] {
        let center = best.0;
        scan(center, half, step, &mut best, &mut consider);
    }
    let edge = max_speed * (1.0 - 1e-12);
    for k in 0..20_000 {
        consider(Vec2::from_angle(TAU * k as f64 / 20_000.0) * edge, &mut best);
    }
    for p in planes {
        let dir = Vec2::new(-p.normal.y, p.normal.x);
        // |point + t dir| <= edge on the chord t in [mid - half, mid + half].
        let mid = -p.point.dot(dir);
        let foot = p.point + dir * mid;
        let half_sq = edge * edge - foot.dot(foot);
        if half_sq < 0.0 {
            continue;
        }
        let half = half_sq.sqrt();
        let n = (2.0 * half / 1e-4).ceil() as i64;
        for k in 0..=n {
            let t = mid - half + 2.0 * half * k as f64 / n.max(1) as f64;
            let v = p.point + dir * t;
            if v.length() <= max_speed {
                consider(v, &mut best);
            }
        }
    }
    best
}

fn orca_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let mut worst: f64 = 0.0;
    for case in 0..500 {
        let planes: Vec<HalfPlane> = (0..rng.random_range(1..=6))
            .map(|_| {
                let point = Vec2::from_angle(rng.random_range(0.0..TAU)) * rng.random_range(0.0..1.2);
                HalfPlane::new(point, Vec2::from_angle(rng.random_range(0.0..TAU)))
            })
            .collect();
        let max_speed = rng.random_range(0.5..2.0);
        let pref = Vec2::from_angle(rng.random_range(0.0..TAU)) * rng.random_range(0.0..2.5);
        let got = solve_velocity_lp(&planes, pref, max_speed);
        let (best, dist) = sample_min(&planes, max_speed, |v| {
            if max_violation(&planes, v) <= 1e-12 {
                v.distance(pref)
            } else {
                f64::INFINITY
            }
        });
        let err = if dist.is_finite() {
            got.distance(best)
        } else {
            let (_, viol) = sample_min(&planes, max_speed, |v| max_violation(&planes, v));
            (max_violation(&planes, got) - viol).abs()
        };
        worst = worst.max(err);
        ensure(err <= 0.02, || format!("LP case {case}: error {err:.4}"))?;
    }

    let params = OrcaParams::default();
    let ped = |p: Vec2, g: Vec2| OrcaAgent::new(p, g, 0.3, 1.0, 1.2);
    let mut agents: Vec<OrcaAgent> = (0..8)
        .map(|k| {
            let p = Vec2::from_angle(k as f64 * TAU / 8.0) * 4.0;
            ped(p, -p)
        })
        .collect();
    let mut gap = f64::INFINITY;
    let mut done_at = None;
    for k in 1..=(15.0 / params.dt).round() as usize {
        step_pedestrians(&mut agents, &[], None, &params);
        for i in 0..8 {
            for j in i + 1..8 {
                gap = gap.min(agents[i].position.distance(agents[j].position) - 0.6);
            }
        }
        if done_at.is_none() && agents.iter().all(|a| a.arrivals >= 1) {
            done_at = Some(k as f64 * params.dt);
        }
    }
    ensure(gap > 0.0, || format!("circle overlap {gap:.4}"))?;
    let done_at = done_at.ok_or("circle: not all agents reached their goals within 15 s")?;

    let a = Vec2::new(-2.0, 0.1);
    let mut pair = [ped(a, -a), ped(-a, a)];
    let mut drift: f64 = 0.0;
    for _ in 0..400 {
        step_pedestrians(&mut pair, &[], None, &params);
        drift = drift.max((pair[0].position + pair[1].position).length());
    }
    ensure(drift < 1e-6, || format!("mirror drift {drift:e}"))?;
    Ok(format!(
        "500 LP sets max err {worst:.4}, circle done at {done_at:.2}s min gap {gap:.3}, drift {drift:.1e}"
    ))
}

// ---- DWA benchmark ----

fn dwa_benchmark() -> Outcome {
    let report = run_trials(&DwaPolicy::default(), &EnvConfig::default(), 500, 0);
    let nt = report.nt_mean.unwrap_or(f64::NAN);
    let line = format!(
        "SR {:.3} ({} ok, {} collisions, {} timeouts, {} failures), NT {nt:.2}s, DT {}",
        report.sr, report.successes, report.collisions, report.timeouts, report.failures, report.dt
    );
    ensure(report.n_trials == 500, || format!("{} trials", report.n_trials))?;
    ensure(report.sr >= 0.85, || line.clone())?;
    ensure((20.0..=45.0).contains(&nt), || line.clone())?;
    ensure(report.dt > 0, || line.clone())?;
    Ok(line)
}

// ---- Emotion nesting ----

fn emotion_nesting() -> Outcome {
    let cfg = EnvConfig::default();
    let mut totals = [0usize; 3];
    for seed in 0..50 {
        let (_, trace) = run_episode(&GreedyPolicy, &cfg, seed);
        let trace = trace.ok_or_else(|| format!("seed {seed}: no trace"))?;
        let sets: Vec<BTreeSet<usize>> = [0.2, 0.35, 0.5]
            .iter()
            .map(|&d| {
                trace
                    .replay_intrusions(&EmotionProfile::uniform(d, 0.2))
                    .iter()
                    .enumerate()
                    .filter(|(_, i)| i.any())
                    .map(|(k, _)| k)
                    .collect()
            })
            .collect();
        ensure(sets[0].is_subset(&sets[1]) && sets[1].is_subset(&sets[2]), || format!("seed {seed}: sets do not nest"))?;
        for (t, s) in totals.iter_mut().zip(&sets) {
            *t += s.len();
        }
    }
    let report = run_trials(&GreedyPolicy, &cfg, 50, 0);
    let idt: u64 = report.idt.iter().sum();
    ensure(idt == report.dt, || format!("IDT sums to {idt}, DT {}", report.dt))?;
    Ok(format!(
        "50 traces nest, DT(0.2/0.35/0.5) = {}/{}/{}, IDT {:?} sums to DT {}",
        totals[0], totals[1], totals[2], report.idt, report.dt
    ))
}

// ---- Determinism ----

const BIN: &str = env!("CARGO_BIN_EXE_socnav");

fn socnav(args: &[&str]) -> Result<Vec<u8>, String> {
    let out = Command::new(BIN).args(args).output().map_err(|e| e.to_string())?;
    ensure(out.status.success(), || format!("{args:?}: {}", String::from_utf8_lossy(&out.stderr)))?;
    Ok(out.stdout)
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = |name: &str| dir.path().join(name).to_string_lossy().into_owned();
    let mut bytes = 0;
    for policy in ["dwa", "greedy"] {
        for seed in ["0", "11"] {
            let (a, b) = (path("a.jsonl"), path("b.jsonl"));
            for out in [&a, &b] {
                socnav(&["episode", "--policy", policy, "--seed", seed, "--out", out])?;
            }
            let (ta, tb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
            ensure(!ta.is_empty() && ta == tb, || format!("{policy} seed {seed}: traces differ"))?;
            let ca = socnav(&["export", "--trace", &a, "--format", "csv"])?;
            let cb = socnav(&["export", "--trace", &b, "--format", "csv"])?;
            ensure(ca == cb, || format!("{policy} seed {seed}: csv exports differ"))?;
            bytes += ta.len() + ca.len();
        }
    }
    let args = ["bench", "--trials", "20", "--seed", "5"];
    let (ra, rb) = (socnav(&args)?, socnav(&args)?);
    ensure(!ra.is_empty() && ra == rb, || "bench reports differ".into())?;
    Ok(format!("4 episodes ({bytes} export bytes) and a 20-trial report identical across processes"))
}

// ---- Protocol ----

fn golden(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

fn protocol() -> Outcome {
    let script = std::fs::read(golden("session.requests.jsonl")).map_err(|e| e.to_string())?;
    let want = std::fs::read(golden("session.responses.jsonl")).map_err(|e| e.to_string())?;
    let mut got = Vec::new();
    serve_stream(EnvConfig::default(), &script[..], &mut got).map_err(|e| e.to_string())?;
    ensure(got == want, || "in-process transcript differs from golden".into())?;

    let mut child = Command::new(BIN)
        .args(["serve", "--listen", "stdio"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .map_err(|e| e.to_string())?;
    std::io::Write::write_all(&mut child.stdin.take().unwrap(), &script).map_err(|e| e.to_string())?;
    let out = child.wait_with_output().map_err(|e| e.to_string())?;
    ensure(out.stdout == want, || "stdio transcript differs from golden".into())?;

    let mut s = Session::new(EnvConfig::default());
    s.handle_line(r#"{"cmd":"reset","seed":7,"config":{"grid":{"K":72,"M":6,"N":2}}}"#);
    let bad = [
        "{",
        "[]",
        "null",
        r#"{"cmd":"fly"}"#,
        r#"{"cmd":"step"}"#,
        r#"{"cmd":"step","action":[0.1]}"#,
        r#"{"cmd":"step","action":["a",0.0]}"#,
        r#"{"cmd":"step","action":[0.1,0.0],"x":1}"#,
        r#"{"cmd":"close","x":1}"#,
        r#"{"cmd":"reset","seed":-1}"#,
        r#"{"cmd":"reset","seed":1,"config":{"bogus":1}}"#,
    ];
    for line in bad {
        let r = s.handle_line(line);
        ensure(r.error_code().is_some(), || format!("{line} accepted: {r:?}"))?;
        ensure(!s.is_closed(), || format!("{line} closed the session"))?;
    }
    let r = s.handle_line(r#"{"cmd":"step","action":[0.4,0.0]}"#);
    let Response::Step(msg) = r else {
        return Err(format!("session lost after malformed input: {r:?}"));
    };
    ensure(msg.info.step == 1, || format!("episode did not continue: step {}", msg.info.step))?;
    let lines = want.iter().filter(|&&b| b == b'\n').count();
    Ok(format!("{lines}-line golden transcript matches in-process and over stdio, {} malformed inputs survived", bad.len()))
}

fn main() {
    let secs = Duration::from_secs;
    let results = [
        run("lip_oracle_suite", secs(1), lip_suite),
        run("grid_structure_suite", secs(30), grid_suite),
        run("reward_suite", secs(10), reward_suite),
        run("orca_suite", secs(60), orca_suite),
        run("dwa_benchmark", secs(300), dwa_benchmark),
        run("emotion_nesting", Duration::MAX, emotion_nesting),
        run("determinism", Duration::MAX, determinism),
        run("protocol_conformance", Duration::MAX, protocol),
    ];
    let failed = results.iter().filter(|ok| !**ok).count();
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
