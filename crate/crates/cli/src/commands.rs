use std::f64::consts::{FRAC_PI_6, PI};
use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use soliton_core::entropy::{blowdown_of_mesh, huisken_monotonicity_check, HuiskenReport};
use soliton_core::geometry::{compute_diagnostics, quasiconformal_defect};
use soliton_core::io::{diagnostics_csv, load_mesh, save_mesh, write_atomic};
use soliton_core::models::{
    make_bowl, make_grim_reaper, make_round_cylinder, make_saddle_test, make_sphere, make_tilted_grim_reaper,
    make_torus, make_vertical_plane, SaddleKind, StripSpec,
};
use soliton_core::nodal::{
    contractibility_check, h_equation_residual, nodal_pde_residual, plane_section, ContractibilityReport, NodalResidual,
    NodalSet, PlaneSpec, SNAP_TOL,
};
use soliton_core::pde::{make_delta_wing, DeltaWingSpec, SolverReport};
use soliton_core::slab::{boundary_approach_sequences, boundary_growth_profile, classify_mesh, ApproachReport, GrowthProfile, HullClassification};
use soliton_core::{EntropyResult, EntropySearch, GaussianWeight, SurfaceMesh, Vec3};

use crate::config::{Config, FloatList};
use crate::svg::{curve_plot, line_plot, Series};
use crate::{
    BlowdownArgs, CliError, DiagnoseArgs, EntropyArgs, GenerateArgs, ModelKind, SectionArgs, SlabArgs, SolveArgs,
    SCHEMA,
};

#[derive(Serialize)]
struct Doc<'a, T: Serialize> {
    schema: u64,
    kind: &'a str,
    #[serde(flatten)]
    body: T,
}

pub(crate) fn write_doc<T: Serialize>(path: &Path, kind: &str, body: T) -> Result<(), CliError> {
    let mut s = serde_json::to_string_pretty(&Doc {
        schema: SCHEMA,
        kind,
        body,
    })?;
    s.push('\n');
    write_atomic(path, s.as_bytes())?;
    Ok(())
}

fn load(path: &Path) -> Result<SurfaceMesh, CliError> {
    let mesh = load_mesh(path)?;
    mesh.validate()?;
    Ok(mesh)
}

fn label(path: &Path) -> String {
    path.display().to_string()
}

pub fn generate(a: &GenerateArgs, cfg: &Config) -> Result<String, CliError> {
    let h = cfg.pick(a.h, "h", 0.05)?;
    let extent = |d: f64| cfg.pick(a.extent, "extent", d);
    let cap = cfg.pick(a.cap, "cap", 20.0)?;
    let radius = cfg.pick(a.radius, "radius", 1.0)?;
    let mesh = match a.kind {
        ModelKind::VerticalPlane => make_vertical_plane(extent(10.0)?, h)?,
        ModelKind::GrimReaper => {
            let spec = StripSpec::grim_reaper(extent(5.0)?, h, cap)?;
            make_grim_reaper(&spec, cfg.pick(a.shift, "shift", 0.0)?)?
        }
        ModelKind::TiltedGrimReaper => {
            let spec = StripSpec::grim_reaper(extent(5.0)?, h, cap)?;
            make_tilted_grim_reaper(cfg.pick(a.theta, "theta", FRAC_PI_6)?, &spec)?
        }
        ModelKind::Bowl => make_bowl(cfg.pick(a.r_max, "r_max", 5.0)?, h)?,
        ModelKind::Cylinder => make_round_cylinder(radius, cfg.pick(a.height, "height", 24.0 * radius)?, h)?,
        ModelKind::Sphere => make_sphere(radius, cfg.pick(a.subdivisions, "subdivisions", 4)?)?,
        ModelKind::Torus => make_torus(cfg.pick(a.major_radius, "major_radius", 2.0)?, cfg.pick(a.radius, "radius", 0.5)?, h)?,
        ModelKind::Saddle => make_saddle_test(SaddleKind::Quadratic, extent(1.0)?, h)?,
        ModelKind::MonkeySaddle => make_saddle_test(SaddleKind::Monkey, extent(1.0)?, h)?,
    };
    save_mesh(&mesh, &a.output)?;
    Ok(format!(
        "generate: {} with {} vertices and {} triangles -> {}",
        mesh.meta.generator,
        mesh.vertices.len(),
        mesh.triangles.len(),
        label(&a.output)
    ))
}

#[derive(Serialize)]
struct DiagnosticsDoc {
    input: String,
    generator: String,
    vertices: usize,
    triangles: usize,
    interior_vertices: usize,
    max_interior_residual: f64,
    qc_identity_defect: f64,
    qc_inequality_slack: f64,
    min_interior_h: f64,
    max_interior_h: f64,
    min_interior_kappa: f64,
    h_equation_residual: Option<f64>,
    nodal_pde_residual: Option<NodalResidual>,
}

pub fn diagnose(a: &DiagnoseArgs, cfg: &Config) -> Result<String, CliError> {
    let mesh = load(&a.input)?;
    let d = compute_diagnostics(&mesh)?;
    let qc = quasiconformal_defect(&d);
    let interior: Vec<usize> = d.interior().collect();
    let fold = |f: &dyn Fn(usize) -> f64, init: f64, op: fn(f64, f64) -> f64| interior.iter().map(|&v| f(v)).fold(init, op);
    let plane = cfg.pick_opt(a.plane, "plane")?;
    let translator = mesh.meta.translator;
    let doc = DiagnosticsDoc {
        input: label(&a.input),
        generator: mesh.meta.generator.clone(),
        vertices: mesh.vertices.len(),
        triangles: mesh.triangles.len(),
        interior_vertices: interior.len(),
        max_interior_residual: d.max_interior_residual(),
        qc_identity_defect: qc.identity_defect,
        qc_inequality_slack: qc.inequality_slack,
        min_interior_h: fold(&|v| d.mean[v], f64::INFINITY, f64::min),
        max_interior_h: fold(&|v| d.mean[v], f64::NEG_INFINITY, f64::max),
        min_interior_kappa: fold(&|v| d.kappa1[v].min(d.kappa2[v]), f64::INFINITY, f64::min),
        h_equation_residual: if translator { Some(h_equation_residual(&mesh, &d)?) } else { None },
        nodal_pde_residual: match (plane, translator) {
            (Some(p), true) => Some(nodal_pde_residual(&mesh, &p)?),
            _ => None,
        },
    };
    write_doc(&a.output, "diagnostics", &doc)?;
    if let Some(csv) = &a.csv {
        write_atomic(csv, diagnostics_csv(&mesh, &d).as_bytes())?;
    }
    Ok(format!(
        "diagnose: {} max interior |H + <nu,e3>| = {:.3e}, QC defect {:.1e} -> {}",
        doc.generator,
        doc.max_interior_residual,
        doc.qc_identity_defect,
        label(&a.output)
    ))
}

#[derive(Serialize)]
struct SolveDoc<'a> {
    width: f64,
    schedule: &'a [f64],
    h: f64,
    tol: f64,
    grid: [usize; 2],
    report: &'a SolverReport,
    stage_differences: &'a [f64],
    max_interior_residual: f64,
    min_interior_h: f64,
    min_interior_kappa: f64,
    hull: HullClassification,
}

pub fn solve(a: &SolveArgs, cfg: &Config) -> Result<String, CliError> {
    let width = cfg.pick(a.width, "width", 1.2 * PI)?;
    let schedule = cfg.pick(a.schedule.clone(), "schedule", FloatList(vec![5.0, 10.0, 20.0]))?.0;
    let h = cfg.pick(a.h, "h", width / 200.0)?;
    let tol = cfg.pick(a.tol, "tol", 1e-6)?;
    let wing = make_delta_wing(&DeltaWingSpec::new(width, schedule.clone(), h, tol))?;
    let d = compute_diagnostics(&wing.mesh)?;
    let hull = classify_mesh(&wing.mesh, None)?;
    let doc = SolveDoc {
        width,
        schedule: &schedule,
        h,
        tol,
        grid: [wing.patch.nx, wing.patch.ny],
        report: &wing.report,
        stage_differences: &wing.stage_differences,
        max_interior_residual: d.max_interior_residual(),
        min_interior_h: d.interior().map(|v| d.mean[v]).fold(f64::INFINITY, f64::min),
        min_interior_kappa: d.interior().map(|v| d.kappa1[v].min(d.kappa2[v])).fold(f64::INFINITY, f64::min),
        hull,
    };
    save_mesh(&wing.mesh, &a.output)?;
    if let Some(json) = &a.json {
        write_doc(json, "solve", &doc)?;
    }
    if let Some(csv) = &a.csv {
        write_atomic(csv, wing.patch.to_csv().as_bytes())?;
    }
    Ok(format!(
        "solve: delta wing b = {width:.4} on {}x{} grid, {} Newton steps, residual {:.2e}, min H {:.3e} -> {}",
        wing.patch.nx,
        wing.patch.ny,
        wing.report.iterations,
        wing.report.residual,
        doc.min_interior_h,
        label(&a.output)
    ))
}

#[derive(Serialize)]
struct EntropyDoc<'a> {
    input: String,
    generator: String,
    params: &'a std::collections::BTreeMap<String, f64>,
    value: f64,
    tail_bound: f64,
    max_tail_bound: f64,
    argmax: GaussianWeight,
    t_range: (f64, f64),
    evaluations: usize,
    search: &'a EntropySearch,
    seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    trace: Option<&'a EntropyResult>,
}

pub fn entropy(a: &EntropyArgs, cfg: &Config) -> Result<String, CliError> {
    let mesh = load(&a.input)?;
    let d = EntropySearch::default();
    let search = EntropySearch {
        t_max: cfg.pick(a.tmax, "tmax", d.t_max)?,
        t_min: cfg.pick(a.tmin, "tmin", d.t_min)?,
        grid: cfg.pick(a.grid, "grid", d.grid)?,
        t_samples: cfg.pick(a.t_samples, "t_samples", d.t_samples)?,
        starts: cfg.pick(a.starts, "starts", d.starts)?,
        ..d
    };
    let seed = cfg.pick(a.seed, "seed", 0)?;
    let r = soliton_core::entropy(&mesh, &search)?;
    let doc = EntropyDoc {
        input: label(&a.input),
        generator: mesh.meta.generator.clone(),
        params: &mesh.meta.params,
        value: r.value,
        tail_bound: r.tail_bound,
        max_tail_bound: r.max_tail_bound,
        argmax: r.argmax,
        t_range: r.t_range,
        evaluations: r.search_trace.len(),
        search: &search,
        seed,
        trace: a.trace.then_some(&r),
    };
    write_doc(&a.output, "entropy", &doc)?;
    Ok(format!(
        "entropy: {} lambda = {:.6} (tail bound {:.2e}, t0 = {:.4}) -> {}",
        doc.generator,
        r.value,
        r.tail_bound,
        r.argmax.t0,
        label(&a.output)
    ))
}

#[derive(Serialize)]
struct BlowdownDoc {
    input: String,
    generator: String,
    taus: Vec<f64>,
    values: Vec<f64>,
    tail_bounds: Vec<f64>,
    nondecreasing: bool,
    huisken: Option<HuiskenReport>,
}

pub fn blowdown(a: &BlowdownArgs, cfg: &Config) -> Result<String, CliError> {
    let mesh = load(&a.input)?;
    let taus = cfg.pick(a.taus.clone(), "taus", FloatList(vec![2.0, 3.0, 4.0, 5.0]))?.0;
    let threshold = cfg.pick(a.residual_threshold, "residual_threshold", 5e-2)?;
    let t0 = cfg.pick(a.t0, "t0", 1.0)?;
    let fv = taus
        .iter()
        .map(|&t| blowdown_of_mesh(&mesh, t))
        .collect::<Result<Vec<_>, _>>()?;
    let huisken = match cfg.pick_opt(a.huisken_taus.clone(), "huisken_taus")? {
        Some(ts) => Some(huisken_monotonicity_check(&mesh, Vec3::zeros(), t0, &ts.0, threshold)?),
        None => None,
    };
    let values: Vec<f64> = fv.iter().map(|f| f.value).collect();
    let doc = BlowdownDoc {
        input: label(&a.input),
        generator: mesh.meta.generator.clone(),
        nondecreasing: values.windows(2).all(|w| w[1] >= w[0]),
        tail_bounds: fv.iter().map(|f| f.tail_bound).collect(),
        taus: taus.clone(),
        values,
        huisken,
    };
    write_doc(&a.output, "blowdown", &doc)?;
    if let Some(svg) = &a.svg {
        let mut series = vec![Series {
            name: "blow-down F(0,1)".into(),
            points: taus.iter().copied().zip(doc.values.iter().copied()).collect(),
        }];
        if let Some(hr) = &doc.huisken {
            series.push(Series {
                name: "F(tau e3, t0 + tau)".into(),
                points: hr.taus.iter().zip(&hr.values).map(|(&t, f)| (t, f.value)).collect(),
            });
        }
        write_atomic(svg, line_plot(&doc.generator, "tau", "F", &series, None).as_bytes())?;
    }
    let mut s = format!("blowdown: {}", doc.generator);
    for (t, v) in doc.taus.iter().zip(&doc.values) {
        let _ = write!(s, " tau={t}: {v:.4}");
    }
    let _ = write!(s, " -> {}", label(&a.output));
    Ok(s)
}

/// In-plane coordinates: horizontal and vertical for vertical planes.
fn plane_frame(p: &PlaneSpec) -> (Vec3, Vec3) {
    let n = p.normal();
    if p.is_vertical() {
        (n.cross(&Vec3::z()).normalize(), Vec3::z())
    } else {
        let u = (Vec3::x() - n * n.x).normalize();
        (u, n.cross(&u))
    }
}

#[derive(Serialize)]
struct SectionDoc<'a> {
    input: String,
    generator: String,
    plane: PlaneSpec,
    arcs: usize,
    components: usize,
    singular_points: usize,
    nodal: &'a NodalSet,
    contractibility: ContractibilityReport,
    nodal_pde_residual: Option<NodalResidual>,
}

pub fn section(a: &SectionArgs, cfg: &Config) -> Result<String, CliError> {
    let mesh = load(&a.input)?;
    let plane = cfg
        .pick_opt(a.plane, "plane")?
        .ok_or_else(|| CliError::config("section needs --plane"))?;
    let tol = cfg.pick(a.tol, "tol", SNAP_TOL)?;
    let nodal = plane_section(&mesh, &plane, tol)?;
    let doc = SectionDoc {
        input: label(&a.input),
        generator: mesh.meta.generator.clone(),
        plane,
        arcs: nodal.arcs.len(),
        components: nodal.components.len(),
        singular_points: nodal.singular_points.len(),
        nodal: &nodal,
        contractibility: contractibility_check(&nodal, &mesh),
        nodal_pde_residual: if mesh.meta.translator && plane.is_vertical() {
            Some(nodal_pde_residual(&mesh, &plane)?)
        } else {
            None
        },
    };
    write_doc(&a.output, "section", &doc)?;
    if let Some(svg) = &a.svg {
        let (u, w) = plane_frame(&plane);
        let base = plane.base();
        let to2 = |p: &[f64; 3]| {
            let d = Vec3::from(*p) - base;
            (d.dot(&u), d.dot(&w))
        };
        let curves: Vec<Vec<(f64, f64)>> = nodal
            .arcs
            .iter()
            .map(|arc| {
                let mut c: Vec<_> = arc.points.iter().map(to2).collect();
                if arc.closed {
                    c.push(c[0]);
                }
                c
            })
            .collect();
        let marks: Vec<(f64, f64)> = nodal.singular_points.iter().map(|s| to2(&s.point)).collect();
        let title = format!("{} section", doc.generator);
        write_atomic(svg, curve_plot(&title, "in-plane u", "in-plane w", &curves, &marks).as_bytes())?;
    }
    Ok(format!(
        "section: {} {} arcs, {} components, {} singular points, acyclic = {} -> {}",
        doc.generator,
        doc.arcs,
        doc.components,
        doc.singular_points,
        doc.contractibility.acyclic,
        label(&a.output)
    ))
}

#[derive(Serialize)]
struct SlabDoc {
    input: String,
    generator: String,
    classification: HullClassification,
    growth: Option<GrowthProfile>,
    approach: Option<ApproachReport>,
}

pub fn slab(a: &SlabArgs, cfg: &Config) -> Result<String, CliError> {
    let mesh = load(&a.input)?;
    let tol = cfg.pick_opt(a.tol, "tol")?;
    let classification = classify_mesh(&mesh, tol)?;
    let growth = match cfg.pick_opt(a.q.clone(), "q")? {
        Some(FloatList(q)) => {
            let [x1, x2] = q[..] else {
                return Err(CliError::config("q needs two coordinates x1,x2"));
            };
            let rho = cfg.pick(a.rho.clone(), "rho", FloatList(vec![0.1, 0.5, 1.0]))?.0;
            Some(boundary_growth_profile(&mesh, [x1, x2], &rho, tol)?)
        }
        None => None,
    };
    let approach = match cfg.pick_opt(a.plane, "plane")? {
        Some(p) => Some(boundary_approach_sequences(&mesh, &p, tol)?),
        None => None,
    };
    if let (Some(csv), Some(g)) = (&a.csv, &growth) {
        let mut s = String::from("rho,sup_x3,saturated\n");
        for ((r, sup), sat) in g.rho.iter().zip(&g.sup_x3).zip(&g.saturated) {
            let sup = sup.map_or(String::new(), |v| v.to_string());
            let _ = writeln!(s, "{r},{sup},{}", u8::from(*sat));
        }
        write_atomic(csv, s.as_bytes())?;
    }
    let doc = SlabDoc {
        input: label(&a.input),
        generator: mesh.meta.generator.clone(),
        classification,
        growth,
        approach,
    };
    write_doc(&a.output, "slab", &doc)?;
    Ok(format!(
        "slab: {} hull {:?} width {:.4} -> {}",
        doc.generator,
        doc.classification.kind,
        doc.classification.width,
        label(&a.output)
    ))
}
