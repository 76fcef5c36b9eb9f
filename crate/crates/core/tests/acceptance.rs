//! End-to-end acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::f64::consts::{E, PI};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use majorana::analysis::{dicke_entanglement, hausdorff_angle, moment_report};
use majorana::classical::{classical_points, congruence_distance, thomson_energy, ClassicalConfig, ClassicalProblem};
use majorana::io::{reference_cell, TableColumn};
use majorana::majorana::{integrate_amplitude_sq, points_to_state, state_to_points, MajoranaPoints, QuadratureSpec};
use majorana::mbqc::{dicke_family_asymptotic, eta_threshold};
use majorana::platonic::{cube_vertices, platonic_state, PlatonicSolid};
use majorana::search::{evaluate_candidate, search_max, search_scan, SearchConfig, SearchMode};
use majorana::solver::{find_cpps, geometric_entanglement, verify_cpp_structure, SolverConfig};
use majorana::{BlochPoint, Result, SymmetricState};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Result<Outcome> {
    Ok(Outcome {
        passed,
        detail: detail.into(),
    })
}

fn eg(state: &SymmetricState) -> Result<f64> {
    Ok(geometric_entanglement(state, &SolverConfig::default())?.eg_log2)
}

/// Outward unit normals of the faces of the convex hull of points on the sphere.
fn face_normals(points: &[BlochPoint]) -> Vec<BlochPoint> {
    let v: Vec<[f64; 3]> = points.iter().map(|p| p.to_vector()).collect();
    let sub = |a: [f64; 3], b: [f64; 3]| [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
    let dot = |a: [f64; 3], b: [f64; 3]| a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    let mut normals: Vec<BlochPoint> = Vec::new();
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            for k in j + 1..v.len() {
                let (a, b) = (sub(v[j], v[i]), sub(v[k], v[i]));
                let mut nrm = [
                    a[1] * b[2] - a[2] * b[1],
                    a[2] * b[0] - a[0] * b[2],
                    a[0] * b[1] - a[1] * b[0],
                ];
                let len = dot(nrm, nrm).sqrt();
                if len < 1e-9 {
                    continue;
                }
                nrm = nrm.map(|c| c / len);
                let mut d = dot(nrm, v[i]);
                if d < 0.0 {
                    nrm = nrm.map(|c| -c);
                    d = -d;
                }
                if v.iter().all(|p| dot(nrm, *p) <= d + 1e-9) {
                    let p = BlochPoint::from_vector(nrm);
                    if normals.iter().all(|q| q.angle_to(&p) > 1e-6) {
                        normals.push(p);
                    }
                }
            }
        }
    }
    normals
}

fn closed_forms() -> Result<Outcome> {
    let bell = SymmetricState::from_sparse(2, &[(0, 1.0), (2, 1.0)])?;
    let ghz = SymmetricState::from_sparse(3, &[(0, 1.0), (3, 1.0)])?;
    let w = SymmetricState::dicke(3, 1)?;
    let mut worst: f64 = 0.0;
    worst = worst.max((eg(&bell)? - 1.0).abs());
    worst = worst.max((eg(&ghz)? - 1.0).abs());
    worst = worst.max((eg(&w)? - (9.0f64 / 4.0).log2()).abs());
    for n in 2..=12 {
        let cell = reference_cell(n, TableColumn::Dicke).expect("dicke column covers 2..=12");
        worst = worst.max((dicke_entanglement(n, n / 2) - cell.value).abs());
    }
    outcome(worst < 1e-9, format!("max error {worst:.2e}"))
}

fn platonic_values() -> Result<Outcome> {
    let cases = [
        (PlatonicSolid::Tetrahedron, 3f64.log2()),
        (PlatonicSolid::Octahedron, 4.5f64.log2()),
        (PlatonicSolid::Icosahedron, (243.0f64 / 28.0).log2()),
    ];
    let mut worst: f64 = 0.0;
    for (solid, exact) in cases {
        worst = worst.max((eg(&platonic_state(solid))? - exact).abs());
    }
    outcome(worst < 1e-7, format!("max error {worst:.2e}"))
}

fn cpp_geometry() -> Result<Outcome> {
    let cfg = SolverConfig::default();
    let mut ok = true;
    let mut parts = Vec::new();
    for (solid, count) in [
        (PlatonicSolid::Tetrahedron, 4),
        (PlatonicSolid::Octahedron, 8),
        (PlatonicSolid::Icosahedron, 20),
        (PlatonicSolid::Dodecahedron, 12),
    ] {
        let state = platonic_state(solid);
        let mps = state_to_points(&state)?;
        let set = find_cpps(&state, &cfg)?;
        // The tetrahedron is self-dual: its face normals are the antipodes of its vertices
        // and its CPPs sit on the MPs themselves.
        let dual = if solid == PlatonicSolid::Tetrahedron {
            mps.points().to_vec()
        } else {
            face_normals(mps.points())
        };
        let d = hausdorff_angle(&set.cpps, &dual);
        let tol = if solid == PlatonicSolid::Tetrahedron {
            1e-6
        } else {
            1e-5
        };
        ok &= set.cpps.len() == count && dual.len() == count && d < tol;
        parts.push(format!("{solid} {} CPPs, {d:.1e}", set.cpps.len()));
    }
    outcome(ok, parts.join("; "))
}

fn sphere_integral() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst: f64 = 0.0;
    for n in 1..=12 {
        let target = 4.0 * PI / (n + 1) as f64;
        for _ in 0..100 {
            let s = SymmetricState::random(n, &mut rng);
            let v = integrate_amplitude_sq(&s, QuadratureSpec::default_for(n))?;
            worst = worst.max((v - target).abs() / target);
        }
    }
    outcome(worst < 1e-8, format!("max relative error {worst:.2e} over 1200 states"))
}

fn round_trip() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut tested, mut skipped) = (0, 0);
    let mut worst: f64 = 0.0;
    while tested < 1000 {
        let n = rng.random_range(1..=12);
        let s = SymmetricState::random(n, &mut rng);
        let pts = state_to_points(&s)?;
        if pts.min_separation() <= 1e-3 {
            skipped += 1;
            continue;
        }
        worst = worst.max(1.0 - points_to_state(&pts).fidelity(&s)?);
        tested += 1;
    }
    outcome(
        worst <= 1e-8,
        format!("max infidelity {worst:.2e}, {skipped} near-degenerate draws skipped"),
    )
}

fn search_reproduction() -> Result<Outcome> {
    let mut ok = true;
    let mut parts = Vec::new();
    for n in 4..=8 {
        let mut cfg = SearchConfig::new(n, SearchMode::Positive);
        cfg.outer_restarts = 96;
        let r = search_max(&cfg)?;
        let target = reference_cell(n, TableColumn::Positive)
            .expect("positive column covers 4..=8")
            .value;
        let err = (r.entanglement.eg_log2 - target).abs();
        ok &= err < 1e-4 && r.converged();
        parts.push(format!(
            "n={n} {:.9} ({}/{})",
            r.entanglement.eg_log2, r.restarts_agreeing, r.restarts
        ));
    }
    let mut stretch = Vec::new();
    for n in 9..=12 {
        let mut cfg = SearchConfig::new(n, SearchMode::Positive);
        cfg.outer_restarts = 48;
        cfg.max_evals = 10_000;
        stretch.push(stretch_target(n, TableColumn::Positive, &cfg, &[2, 3, 4, 5])?);
    }
    for n in 10..=12 {
        let mut cfg = SearchConfig::new(n, SearchMode::General);
        cfg.outer_restarts = 8;
        if n == 12 {
            cfg.rot_order = Some(5);
            cfg.rot_offset = Some(1);
            cfg.pin_north = false;
        }
        stretch.push(stretch_target(n, TableColumn::General, &cfg, &[])?);
    }
    outcome(ok, format!("{}; stretch: {}", parts.join(", "), stretch.join(", ")))
}

/// Stretch targets never fail the criterion; they report OK, EXCEEDS (a better state
/// than the reference) or UNCONVERGED.
fn stretch_target(n: usize, column: TableColumn, cfg: &SearchConfig, orders: &[usize]) -> Result<String> {
    let start = Instant::now();
    let r = if cfg.rot_order.is_some() {
        search_max(cfg)?
    } else {
        search_scan(cfg, orders)?
    };
    let target = reference_cell(n, column).map(|c| c.value).unwrap_or(f64::NAN);
    let v = r.entanglement.eg_log2;
    let status = match () {
        _ if !r.converged() => "UNCONVERGED",
        _ if (v - target).abs() < 1e-3 => "OK",
        _ if v > target => "EXCEEDS",
        _ => "UNCONVERGED",
    };
    Ok(format!(
        "{} n={n} {v:.6} vs {target:.6} {status} ({:.0}s)",
        column.name(),
        start.elapsed().as_secs_f64()
    ))
}

fn classical_baselines() -> Result<Outcome> {
    let mut ok = true;
    let mut parts = Vec::new();
    let thomson = |n| classical_points(&ClassicalConfig::new(n, ClassicalProblem::Thomson));
    for (n, solid) in [
        (4, PlatonicSolid::Tetrahedron),
        (6, PlatonicSolid::Octahedron),
        (12, PlatonicSolid::Icosahedron),
    ] {
        let pts = thomson(n)?;
        let d = congruence_distance(pts.points(), state_to_points(&platonic_state(solid))?.points());
        ok &= d < 1e-5;
        parts.push(format!("n={n} {d:.1e}"));
    }
    let bipyramid = MajoranaPoints::new(vec![
        BlochPoint::north(),
        BlochPoint::south(),
        BlochPoint::new(PI / 2.0, 0.0),
        BlochPoint::new(PI / 2.0, 2.0 * PI / 3.0),
        BlochPoint::new(PI / 2.0, 4.0 * PI / 3.0),
    ])?;
    let five = thomson(5)?;
    let d5 = congruence_distance(five.points(), bipyramid.points());
    let e5 = evaluate_candidate(&bipyramid, &SolverConfig::default())?
        .entanglement
        .eg_log2;
    ok &= d5 < 1e-5 && e5 < 1.742268948 - 1e-3;
    parts.push(format!("bipyramid {d5:.1e}, Eg {e5:.6}"));

    let toth = classical_points(&ClassicalConfig::new(8, ClassicalProblem::Toth))?;
    let cube = MajoranaPoints::new(cube_vertices())?;
    let better_angle = toth.min_separation() > cube.min_separation() + 1e-6;
    let better_energy = thomson_energy(toth.points()) < thomson_energy(cube.points());
    ok &= better_angle && better_energy;
    parts.push(format!(
        "Toth n=8 min angle {:.4} deg vs cube {:.4} deg",
        toth.min_separation().to_degrees(),
        cube.min_separation().to_degrees()
    ));
    outcome(ok, parts.join("; "))
}

fn positive_structure() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let cfg = SolverConfig::default();
    let mut failures = Vec::new();
    let mut checked = 0;
    let mut mirror_worst: f64 = 0.0;
    for n in 4..=8 {
        for i in 0..200 {
            let support = loop {
                let support: Vec<usize> = match i % 4 {
                    0 => (0..=n).collect(),
                    1 => (0..=n).filter(|_| rng.random_bool(0.5)).collect(),
                    2 => {
                        let m = rng.random_range(2..=n);
                        let r = rng.random_range(0..m);
                        (0..=n).filter(|k| k % m == r).collect()
                    }
                    _ => {
                        let mut s: Vec<usize> = (1..n).filter(|_| rng.random_bool(0.4)).collect();
                        s.extend([0, n]);
                        s
                    }
                };
                if support.len() >= 2 {
                    break support;
                }
            };
            let s = SymmetricState::random_positive(n, &support, &mut rng);
            let set = find_cpps(&s, &cfg)?;
            let rep = verify_cpp_structure(&s, &set)?;
            checked += 1;
            if !rep.passed() {
                failures.push(format!("n={n} support {support:?}: {:?}", rep.failures));
            }

            let real = SymmetricState::random_real(n, &mut rng);
            let pts = state_to_points(&real)?;
            if pts.min_separation() > 1e-3 {
                let mirrored: Vec<BlochPoint> = pts.points().iter().map(|p| p.conjugate()).collect();
                mirror_worst = mirror_worst.max(hausdorff_angle(pts.points(), &mirrored));
            }
        }
    }
    let ok = failures.is_empty() && mirror_worst < 1e-8;
    let mut detail = format!(
        "{checked} positive states, {} violations, mirror asymmetry {mirror_worst:.1e}",
        failures.len()
    );
    if let Some(f) = failures.first() {
        detail.push_str(&format!("; first: {f}"));
    }
    outcome(ok, detail)
}

fn anticoherence() -> Result<Outcome> {
    let pyramid = SymmetricState::from_sparse(5, &[(0, 0.5467167667), (4, 0.8373176082)])?;
    let p = moment_report(&state_to_points(&pyramid)?).spin_norm();
    let o = moment_report(&state_to_points(&platonic_state(PlatonicSolid::Octahedron))?).spin_norm();
    let i = moment_report(&state_to_points(&platonic_state(PlatonicSolid::Icosahedron))?).spin_norm();
    outcome(
        p > 0.01 && o < 1e-10 && i < 1e-10,
        format!("square pyramid {p:.4}, octahedron {o:.1e}, icosahedron {i:.1e}"),
    )
}

fn mbqc() -> Result<Outcome> {
    let eta = eta_threshold(1)?.eta_threshold;
    let n = 10_000;
    let finite = 1.0 - 2f64.powf(-dicke_entanglement(n, 1));
    let limit = dicke_family_asymptotic(1)?;
    let ok = (0.001 / 3.0..=0.003).contains(&eta)
        && (finite - (1.0 - 1.0 / E)).abs() < 1e-3
        && (limit - (1.0 - 1.0 / E)).abs() < 1e-12;
    outcome(
        ok,
        format!("eta* = {eta:.3e}, E_G(n=1e4) = {finite:.6}, limit {limit:.6}"),
    )
}

fn main() {
    let criteria: [(&str, Duration, fn() -> Result<Outcome>); 10] = [
        ("closed-form fixtures", Duration::from_secs(1), closed_forms),
        ("Platonic entanglement", Duration::from_secs(10), platonic_values),
        ("CPP geometry and duality", Duration::from_secs(30), cpp_geometry),
        ("integral of f^2", Duration::from_secs(10), sphere_integral),
        ("coefficient/point round trip", Duration::from_secs(10), round_trip),
        (
            "search reproduces the table",
            Duration::from_secs(600),
            search_reproduction,
        ),
        ("classical baselines", Duration::from_secs(60), classical_baselines),
        ("positive-state structure", Duration::from_secs(120), positive_structure),
        ("anticoherence", Duration::from_secs(1), anticoherence),
        ("MBQC threshold", Duration::from_secs(1), mbqc),
    ];
    let mut failed = 0;
    for (i, (name, budget, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = run();
        let elapsed = start.elapsed();
        let (passed, detail) = match result {
            Ok(o) => (o.passed && elapsed <= *budget, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !passed {
            failed += 1;
        }
        println!(
            "{} {:>2} {name} [{:.2}s / {}s]: {detail}",
            if passed { "PASS" } else { "FAIL" },
            i + 1,
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
