//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Run with `cargo test -p soliton-core --test acceptance`.

use std::f64::consts::{E, FRAC_PI_2, FRAC_PI_6, PI};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use soliton_core::entropy::{blowdown_of_mesh, check_additivity, huisken_monotonicity_check};
use soliton_core::geometry::ShapeDiagnostics;
use soliton_core::models::{
    make_bowl, make_grim_reaper, make_round_cylinder, make_saddle_test, make_tilted_grim_reaper, make_vertical_plane,
    SaddleKind, StripSpec,
};
use soliton_core::nodal::{contractibility_check, h_equation_residual, nodal_pde_residual, plane_section, SNAP_TOL};
use soliton_core::pde::DeltaWing;
use soliton_core::{
    apply_motion, compute_diagnostics, entropy, make_delta_wing, DeltaWingSpec, EntropySearch, PlaneSpec, RigidMotion,
    SurfaceMesh, Vec3,
};

type Outcome = Result<String, String>;

fn cylinder_entropy() -> f64 {
    (2.0 * PI / E).sqrt()
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

/// Recomputes H, K and |A|² from the principal curvatures and checks the
/// identity `|A|² + 2K − H² = 0` at every vertex.
fn identity_defect(d: &ShapeDiagnostics) -> f64 {
    let mut worst = 0.0f64;
    for v in 0..d.len() {
        let (k1, k2) = (d.kappa1[v], d.kappa2[v]);
        let recomputed = [(k1 + k2, d.mean[v]), (k1 * k2, d.gauss[v]), (k1 * k1 + k2 * k2, d.a_norm_sq[v])];
        for (a, b) in recomputed {
            worst = worst.max((a - b).abs() / (1.0 + a.abs()));
        }
        worst = worst.max((d.a_norm_sq[v] + 2.0 * d.gauss[v] - d.mean[v] * d.mean[v]).abs());
    }
    worst
}

fn grim_reaper_blowdown_mesh() -> SurfaceMesh {
    let spec = StripSpec::grim_reaper(30.0, 0.25, 55.0).unwrap();
    make_grim_reaper(&spec, FRAC_PI_2).unwrap()
}

fn c1_plane() -> Outcome {
    let t = Instant::now();
    let mesh = make_vertical_plane(10.0, 0.05).map_err(err)?;
    let r = entropy(&mesh, &EntropySearch::default()).map_err(err)?;
    let el = t.elapsed();
    let diff = (r.value - 1.0).abs();
    check(
        diff < 1e-3 + r.tail_bound && el < Duration::from_secs(10),
        format!("lambda = {:.6}, |diff| = {diff:.2e}, tail = {:.1e}, {:.1}s", r.value, r.tail_bound, el.as_secs_f64()),
    )
}

fn c2_cylinder() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for r in [0.5, 1.0, 2.0] {
        let t = Instant::now();
        let mesh = make_round_cylinder(r, 24.0 * r, r / 16.0).map_err(err)?;
        let res = entropy(&mesh, &EntropySearch::default()).map_err(err)?;
        let el = t.elapsed();
        let diff = (res.value - cylinder_entropy()).abs();
        let t_ratio = res.argmax.t0 / (0.5 * r * r);
        ok &= diff < 1e-2 + res.tail_bound && el < Duration::from_secs(60) && (t_ratio - 1.0).abs() < 0.1;
        parts.push(format!("r={r}: {:.5} (t0/(r^2/2) = {t_ratio:.3}, {:.1}s)", res.value, el.as_secs_f64()));
    }
    check(ok, parts.join("; "))
}

fn c3_bowl() -> Outcome {
    let t = Instant::now();
    let mesh = make_bowl(10.9, 0.05).map_err(err)?;
    let cap = mesh.meta.height_cap.unwrap_or(0.0);
    let mut values = Vec::new();
    for tau in [2.0, 3.0, 4.0, 5.0] {
        values.push(blowdown_of_mesh(&mesh, tau).map_err(err)?);
    }
    let el = t.elapsed();
    let last = values[3];
    let diff = (last.value - cylinder_entropy()).abs();
    let seq: Vec<String> = values.iter().map(|f| format!("{:.4}", f.value)).collect();
    check(
        cap >= 55.0 && diff < 5e-2 && el < Duration::from_secs(300),
        format!("cap {cap:.1}, F by tau=2..5: [{}], |F(5) - 1.5203| = {diff:.3e}, {:.1}s", seq.join(", "), el.as_secs_f64()),
    )
}

fn c4_grim_reaper(mesh: &SurfaceMesh) -> Outcome {
    let taus = [2.0, 3.0, 4.0, 5.0];
    let mut values = Vec::new();
    for tau in taus {
        values.push(blowdown_of_mesh(mesh, tau).map_err(err)?.value);
    }
    let nondecreasing = values.windows(2).all(|w| w[1] >= w[0]);
    let diff = (values[3] - 2.0).abs();
    // doubled-plane value of the centered strip at scale τ
    let oracle = 2.0 * (-PI * PI / (16.0 * 25.0)).exp();
    let seq: Vec<String> = values.iter().map(|v| format!("{v:.4}")).collect();
    check(
        nondecreasing && diff < 5e-2,
        format!("F: [{}], |F(5) - 2| = {diff:.3e}, oracle(5) = {oracle:.4}", seq.join(", ")),
    )
}

fn c5_residuals() -> Outcome {
    let hs = [0.04, 0.02, 0.01];
    type Gen = Box<dyn Fn(f64) -> soliton_core::Result<SurfaceMesh>>;
    let gens: Vec<(&str, Gen)> = vec![
        ("grim reaper", Box::new(|h| make_grim_reaper(&StripSpec::grim_reaper(0.5, h, 3.0)?, 0.0))),
        ("tilted grim reaper", Box::new(|h| make_tilted_grim_reaper(FRAC_PI_6, &StripSpec::grim_reaper(0.5, h, 3.0)?))),
        ("bowl", Box::new(|h| make_bowl(1.0, h))),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, g) in &gens {
        let mut res = Vec::new();
        for &h in &hs {
            let m = g(h).map_err(err)?;
            res.push(compute_diagnostics(&m).map_err(err)?.max_interior_residual());
        }
        let ratios = [res[0] / res[1], res[1] / res[2]];
        ok &= res[2] < 5e-3 && ratios.iter().all(|&r| r >= 1.7);
        parts.push(format!("{name}: {:.2e} (ratios {:.2}, {:.2})", res[2], ratios[0], ratios[1]));
    }
    check(ok, parts.join("; "))
}

fn c6_delta_wing(wing: &DeltaWing, h: f64, elapsed: Duration) -> Outcome {
    let d = compute_diagnostics(&wing.mesh).map_err(err)?;
    let min_h = d.interior().map(|v| d.mean[v]).fold(f64::INFINITY, f64::min);
    let min_k = d.interior().map(|v| d.kappa1[v].min(d.kappa2[v])).fold(f64::INFINITY, f64::min);
    check(
        wing.report.residual < 1e-3 && min_h > 0.0 && min_k >= -5.0 * h && elapsed < Duration::from_secs(300),
        format!(
            "grid {}x{}, residual {:.2e}, min H {min_h:.4}, min kappa {min_k:.4} (>= {:.4}), stage diffs {:?}, {:.1}s",
            wing.patch.nx,
            wing.patch.ny,
            wing.report.residual,
            -5.0 * h,
            wing.stage_differences.iter().map(|x| format!("{x:.3e}")).collect::<Vec<_>>(),
            elapsed.as_secs_f64()
        ),
    )
}

fn c7_quasiconformal(meshes: &[(&str, &SurfaceMesh)]) -> Outcome {
    let mut worst = 0.0f64;
    for (_, m) in meshes {
        worst = worst.max(identity_defect(&compute_diagnostics(m).map_err(err)?));
    }
    check(worst < 1e-8, format!("max defect {worst:.2e} over {} meshes", meshes.len()))
}

fn c8_nodal(simply_connected: &[(&str, &SurfaceMesh, Vec<PlaneSpec>)]) -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for (kind, m_expected) in [(SaddleKind::Quadratic, 2), (SaddleKind::Monkey, 3)] {
        let m = make_saddle_test(kind, 1.0, 0.05).map_err(err)?;
        let s = plane_section(&m, &PlaneSpec::new(Vec3::zeros(), Vec3::z()).map_err(err)?, SNAP_TOL).map_err(err)?;
        let ms: Vec<usize> = s.singular_points.iter().map(|p| p.multiplicity).collect();
        ok &= ms == vec![m_expected];
        parts.push(format!("{kind:?}: m = {ms:?}"));
    }
    let mut sections = 0;
    for (name, mesh, planes) in simply_connected {
        for p in planes {
            let s = plane_section(mesh, p, SNAP_TOL).map_err(err)?;
            let c = contractibility_check(&s, mesh);
            sections += 1;
            if !c.acyclic {
                ok = false;
                parts.push(format!("{name} section {p:?} has a cycle"));
            }
        }
    }
    parts.push(format!("{sections} sections acyclic"));
    check(ok, parts.join("; "))
}

fn c9_refinement() -> Outcome {
    let hs = [0.04, 0.02, 0.01];
    let mut parts = Vec::new();
    let mut ok = true;
    let cases: [(&str, PlaneSpec); 2] = [
        ("grim reaper", PlaneSpec::vertical(Vec3::new(-1.5, 0.0, 0.0), Vec3::new(0.8, 0.6, 0.0)).map_err(err)?),
        ("bowl", PlaneSpec::vertical(Vec3::new(0.1, 0.0, 0.0), Vec3::new(0.8, 0.6, 0.0)).map_err(err)?),
    ];
    for (name, plane) in &cases {
        let (mut nodal, mut heq) = (Vec::new(), Vec::new());
        for &h in &hs {
            let m = if *name == "bowl" {
                make_bowl(1.0, h)
            } else {
                make_grim_reaper(&StripSpec::grim_reaper(0.5, h, 3.0).map_err(err)?, 0.0)
            }
            .map_err(err)?;
            let d = compute_diagnostics(&m).map_err(err)?;
            nodal.push(nodal_pde_residual(&m, plane).map_err(err)?.max);
            heq.push(h_equation_residual(&m, &d).map_err(err)?);
        }
        let dec = |v: &[f64]| v.windows(2).all(|w| w[1] < w[0]);
        ok &= dec(&nodal) && dec(&heq);
        let f = |v: &[f64]| v.iter().map(|x| format!("{x:.2e}")).collect::<Vec<_>>().join(" > ");
        parts.push(format!("{name}: nodal {}, H-eq {}", f(&nodal), f(&heq)));
    }
    check(ok, parts.join("; "))
}

fn c10_additivity(gr: &SurfaceMesh) -> Outcome {
    let sep = 0.01;
    let plane = make_vertical_plane(10.0, 0.2).map_err(err)?;
    let m1 = apply_motion(&plane, &RigidMotion::translation(Vec3::new(-0.5 * sep, 0.0, 0.0)));
    let m2 = apply_motion(&plane, &RigidMotion::translation(Vec3::new(0.5 * sep, 0.0, 0.0)));
    let search = EntropySearch {
        t_max: 1e4 * sep * sep,
        ..EntropySearch::default()
    };
    let add = check_additivity(&m1, &m2, &search, 5e-2).map_err(err)?;
    let hk = huisken_monotonicity_check(gr, Vec3::zeros(), 1.0, &[0.0, 1.0, 2.0, 4.0, 8.0], 5e-2).map_err(err)?;
    let seq: Vec<String> = hk.values.iter().map(|f| format!("{:.4}", f.value)).collect();
    check(
        (add.lambda_union - 2.0).abs() < 5e-2 && hk.is_nondecreasing(1e-3) && hk.warning.is_none(),
        format!(
            "lambda(union) = {:.5}, defect {:.2e}; Huisken [{}], max decrease {:.1e}",
            add.lambda_union,
            add.defect,
            seq.join(", "),
            hk.max_decrease()
        ),
    )
}

fn main() -> ExitCode {
    let mut results: Vec<(usize, &str, Outcome)> = Vec::new();
    let mut record = |id, name, o: Outcome| {
        println!("{} [{id}] {name}: {}", if o.is_ok() { "PASS" } else { "FAIL" }, o.as_ref().unwrap_or_else(|e| e));
        results.push((id, name, o));
    };

    record(1, "vertical plane entropy", c1_plane());
    record(2, "round cylinder entropy", c2_cylinder());
    record(3, "bowl blow-down", c3_bowl());
    let gr = grim_reaper_blowdown_mesh();
    record(4, "grim reaper blow-down", c4_grim_reaper(&gr));
    record(5, "translator residuals", c5_residuals());

    let b = 1.2 * PI;
    let h = b / 200.0;
    let t = Instant::now();
    let wing = make_delta_wing(&DeltaWingSpec::new(b, vec![5.0, 10.0, 20.0], h, 1e-6));
    let el = t.elapsed();
    record(6, "delta wing solve", wing.as_ref().map_err(err).and_then(|w| c6_delta_wing(w, h, el)));

    let small_gr = make_grim_reaper(&StripSpec::grim_reaper(1.0, 0.05, 6.0).unwrap(), 0.0).unwrap();
    let tilted = make_tilted_grim_reaper(FRAC_PI_6, &StripSpec::grim_reaper(1.0, 0.05, 6.0).unwrap()).unwrap();
    let bowl = make_bowl(2.0, 0.05).unwrap();
    let plane = make_vertical_plane(2.0, 0.1).unwrap();
    let cyl = make_round_cylinder(1.0, 4.0, 0.1).unwrap();
    let mut qc: Vec<(&str, &SurfaceMesh)> =
        vec![("grim reaper", &small_gr), ("tilted", &tilted), ("bowl", &bowl), ("plane", &plane), ("cylinder", &cyl)];
    if let Ok(w) = &wing {
        qc.push(("delta wing", &w.mesh));
    }
    record(7, "quasiconformal identity", c7_quasiconformal(&qc));

    let vert = |x: f64, y: f64, n: Vec3| PlaneSpec::vertical(Vec3::new(x, y, 0.0), n).unwrap();
    // Vertical planes only: ⟨x, V⟩ with V horizontal solves Δf + ⟨∇f, e₃⟩ = 0
    // on a translator, which rules out closed nodal loops. Horizontal sections
    // (level sets of x₃, circles on the bowl) are not covered.
    let diag = Vec3::new(0.6, 0.8, 0.0);
    let mut sc: Vec<(&str, &SurfaceMesh, Vec<PlaneSpec>)> = vec![
        ("grim reaper", &small_gr, vec![vert(0.0, 0.0, Vec3::y()), vert(-1.0, 0.0, Vec3::x()), vert(-1.5, 0.0, diag)]),
        ("tilted", &tilted, vec![vert(0.0, 0.0, Vec3::y()), vert(0.3, 0.0, diag)]),
        ("bowl", &bowl, vec![vert(0.0, 0.0, Vec3::x()), vert(0.4, 0.2, diag)]),
    ];
    if let Ok(w) = &wing {
        sc.push(("delta wing", &w.mesh, vec![vert(0.0, 0.0, Vec3::x()), vert(0.0, 0.0, Vec3::y()), vert(0.5, 0.0, diag)]));
    }
    record(8, "nodal structure", c8_nodal(&sc));
    record(9, "PDE residual refinement", c9_refinement());
    record(10, "additivity and monotonicity", c10_additivity(&gr));

    let failed = results.iter().filter(|r| r.2.is_err()).count();
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
