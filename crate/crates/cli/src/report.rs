//! Markdown summary of result documents with SVG plots of blow-down and
//! monotonicity sequences.

use std::f64::consts::{E, PI};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde_json::Value;
use soliton_core::io::write_atomic;

use crate::svg::{line_plot, Series};
use crate::{CliError, ReportArgs, SCHEMA};

pub const KINDS: &[&str] = &["entropy", "diagnostics", "solve", "blowdown", "section", "slab"];

/// Known entropy of the complete surface a generator approximates.
pub fn entropy_target(generator: &str) -> Option<f64> {
    let cylinder = (2.0 * PI / E).sqrt();
    match generator {
        "vertical-plane" => Some(1.0),
        "round-cylinder" | "bowl" => Some(cylinder),
        "grim-reaper" | "tilted-grim-reaper" => Some(2.0),
        "sphere" => Some(4.0 / E),
        _ => None,
    }
}

#[derive(Clone, Debug)]
pub struct Input {
    pub name: String,
    pub doc: Value,
}

impl Input {
    fn kind(&self) -> &str {
        self.doc["kind"].as_str().unwrap_or("")
    }

    fn str(&self, key: &str) -> String {
        self.doc[key].as_str().unwrap_or("-").to_string()
    }

    fn num(&self, key: &str) -> Result<f64, CliError> {
        self.doc[key]
            .as_f64()
            .ok_or_else(|| CliError::schema(format!("{}: {} document lacks numeric {key:?}", self.name, self.kind())))
    }

    fn nums(&self, key: &str) -> Result<Vec<f64>, CliError> {
        self.doc[key]
            .as_array()
            .and_then(|a| a.iter().map(Value::as_f64).collect::<Option<Vec<_>>>())
            .ok_or_else(|| CliError::schema(format!("{}: {} document lacks numeric list {key:?}", self.name, self.kind())))
    }
}

/// Checks the schema version and kind of every document.
pub fn validate(inputs: &[Input]) -> Result<(), CliError> {
    for i in inputs {
        match i.doc.get("schema").and_then(Value::as_u64) {
            Some(SCHEMA) => {}
            other => {
                return Err(CliError::schema(format!(
                    "{}: schema {} but this build reads schema {SCHEMA}",
                    i.name,
                    other.map_or("missing".to_string(), |v| v.to_string())
                )))
            }
        }
        if !KINDS.contains(&i.kind()) {
            return Err(CliError::schema(format!("{}: unknown document kind {:?}", i.name, i.doc["kind"])));
        }
        if i.kind() == "entropy" {
            if i.doc["tail_bound"].as_f64().is_none() {
                return Err(CliError::schema(format!("{}: entropy value without tail_bound", i.name)));
            }
            i.num("value")?;
        }
    }
    Ok(())
}

fn fmt(v: f64) -> String {
    if v == 0.0 || (1e-2..1e5).contains(&v.abs()) {
        format!("{v:.6}")
    } else {
        format!("{v:.3e}")
    }
}

fn opt(v: &Value) -> String {
    v.as_f64().map_or("-".into(), fmt)
}

/// Markdown text and `(file name suffix, svg)` plots.
pub fn render(inputs: &[Input]) -> Result<(String, Vec<(&'static str, String)>), CliError> {
    validate(inputs)?;
    let mut md = String::from("# soliton-lab report\n");
    let mut plots = Vec::new();
    if inputs.is_empty() {
        md.push_str("\nNo inputs.\n");
        return Ok((md, plots));
    }
    let of = |k: &'static str| inputs.iter().filter(move |i| i.kind() == k);

    if of("entropy").next().is_some() {
        md.push_str("\n## Entropies\n\n| input | generator | λ | tail bound | target | λ − target | t₀ at argmax |\n|---|---|---|---|---|---|---|\n");
        for i in of("entropy") {
            let g = i.str("generator");
            let v = i.num("value")?;
            let (target, diff) = match entropy_target(&g) {
                Some(t) => (fmt(t), format!("{:+.3e}", v - t)),
                None => ("-".into(), "-".into()),
            };
            let _ = writeln!(
                md,
                "| {} | {g} | {} | {} | {target} | {diff} | {} |",
                i.name,
                fmt(v),
                fmt(i.num("tail_bound")?),
                opt(&i.doc["argmax"]["t0"])
            );
        }
    }

    if of("diagnostics").next().is_some() {
        md.push_str("\n## Residuals\n\n| input | generator | max interior \\|H + ⟨ν,e₃⟩\\| | QC identity defect | min H | H-equation residual | section residual |\n|---|---|---|---|---|---|---|\n");
        for i in of("diagnostics") {
            let _ = writeln!(
                md,
                "| {} | {} | {} | {} | {} | {} | {} |",
                i.name,
                i.str("generator"),
                fmt(i.num("max_interior_residual")?),
                fmt(i.num("qc_identity_defect")?),
                opt(&i.doc["min_interior_h"]),
                opt(&i.doc["h_equation_residual"]),
                opt(&i.doc["nodal_pde_residual"]["max"])
            );
        }
    }

    if of("solve").next().is_some() {
        md.push_str("\n## Δ-wing solves\n\n| input | width | grid | Newton steps | PDE residual | stage differences | min H | min κ | hull |\n|---|---|---|---|---|---|---|---|---|\n");
        for i in of("solve") {
            let grid = i.nums("grid")?;
            let diffs: Vec<String> = i.nums("stage_differences")?.into_iter().map(fmt).collect();
            let _ = writeln!(
                md,
                "| {} | {} | {}×{} | {} | {} | {} | {} | {} | {} {} |",
                i.name,
                fmt(i.num("width")?),
                grid.first().copied().unwrap_or(0.0),
                grid.get(1).copied().unwrap_or(0.0),
                i.doc["report"]["iterations"],
                opt(&i.doc["report"]["residual"]),
                diffs.join(", "),
                fmt(i.num("min_interior_h")?),
                fmt(i.num("min_interior_kappa")?),
                i.doc["hull"]["kind"].as_str().unwrap_or("-"),
                opt(&i.doc["hull"]["width"])
            );
        }
    }

    if of("slab").next().is_some() {
        md.push_str("\n## Hull classifications\n\n| input | generator | kind | width | tolerance |\n|---|---|---|---|---|\n");
        for i in of("slab") {
            let c = &i.doc["classification"];
            let _ = writeln!(
                md,
                "| {} | {} | {} | {} | {} |",
                i.name,
                i.str("generator"),
                c["kind"].as_str().unwrap_or("-"),
                opt(&c["width"]),
                opt(&c["tol"])
            );
        }
        let growth: Vec<&Input> = of("slab").filter(|i| i.doc["growth"].is_object()).collect();
        if !growth.is_empty() {
            md.push_str("\n### Growth profiles\n\n| input | q | ρ | sup x₃ | height cap | saturated |\n|---|---|---|---|---|---|\n");
            for i in growth {
                let g = &i.doc["growth"];
                let q = format!("({}, {})", opt(&g["q"][0]), opt(&g["q"][1]));
                let rho = g["rho"].as_array().cloned().unwrap_or_default();
                for (k, r) in rho.iter().enumerate() {
                    let _ = writeln!(
                        md,
                        "| {} | {q} | {} | {} | {} | {} |",
                        i.name,
                        opt(r),
                        opt(&g["sup_x3"][k]),
                        opt(&g["height_cap"]),
                        g["saturated"][k].as_bool().unwrap_or(false)
                    );
                }
            }
        }
    }

    if of("section").next().is_some() {
        md.push_str("\n## Sections\n\n| input | generator | arcs | components | singular points (m) | acyclic |\n|---|---|---|---|---|---|\n");
        for i in of("section") {
            let ms: Vec<String> = i.doc["nodal"]["singular_points"]
                .as_array()
                .map(|a| a.iter().map(|s| s["multiplicity"].to_string()).collect())
                .unwrap_or_default();
            let _ = writeln!(
                md,
                "| {} | {} | {} | {} | {} [{}] | {} |",
                i.name,
                i.str("generator"),
                i.doc["arcs"],
                i.doc["components"],
                i.doc["singular_points"],
                ms.join(", "),
                i.doc["contractibility"]["acyclic"]
            );
        }
    }

    if of("blowdown").next().is_some() {
        md.push_str("\n## Blow-downs\n\n| input | generator | τ | F₍₀,₁₎ | tail bound | target |\n|---|---|---|---|---|---|\n");
        let mut series = Vec::new();
        let mut mono = Vec::new();
        for i in of("blowdown") {
            let g = i.str("generator");
            let (taus, values, tails) = (i.nums("taus")?, i.nums("values")?, i.nums("tail_bounds")?);
            let target = entropy_target(&g).map_or("-".into(), fmt);
            for k in 0..taus.len().min(values.len()).min(tails.len()) {
                let _ = writeln!(md, "| {} | {g} | {} | {} | {} | {target} |", i.name, taus[k], fmt(values[k]), fmt(tails[k]));
            }
            series.push(Series {
                name: format!("{} ({g})", i.name),
                points: taus.iter().copied().zip(values.iter().copied()).collect(),
            });
            let h = &i.doc["huisken"];
            if h.is_object() {
                let ht: Vec<f64> = h["taus"].as_array().map(|a| a.iter().filter_map(Value::as_f64).collect()).unwrap_or_default();
                let hv: Vec<f64> = h["values"]
                    .as_array()
                    .map(|a| a.iter().filter_map(|v| v["value"].as_f64()).collect())
                    .unwrap_or_default();
                mono.push((i.name.clone(), g.clone(), ht, hv, h["warning"].as_str().map(str::to_string)));
            }
        }
        md.push_str("\n![blow-down convergence](BLOWDOWN_SVG)\n");
        plots.push(("blowdown.svg", line_plot("Blow-down convergence", "tau", "F(0,1)", &series, None)));
        if !mono.is_empty() {
            md.push_str("\n## Monotonicity sequences\n\n| input | generator | τ | F₍τe₃, t₀+τ₎ | nondecreasing | warning |\n|---|---|---|---|---|---|\n");
            let mut ms = Vec::new();
            for (name, g, ht, hv, warning) in mono {
                let nondecreasing = hv.windows(2).all(|w| w[1] >= w[0]);
                for (t, v) in ht.iter().zip(&hv) {
                    let _ = writeln!(
                        md,
                        "| {name} | {g} | {t} | {} | {nondecreasing} | {} |",
                        fmt(*v),
                        warning.as_deref().unwrap_or("-")
                    );
                }
                ms.push(Series {
                    name: format!("{name} ({g})"),
                    points: ht.into_iter().zip(hv).collect(),
                });
            }
            md.push_str("\n![monotonicity](MONOTONICITY_SVG)\n");
            plots.push(("monotonicity.svg", line_plot("Monotonicity along tau", "tau", "F", &ms, None)));
        }
    }
    Ok((md, plots))
}

fn sibling(output: &Path, suffix: &str) -> PathBuf {
    let stem = output.file_stem().map_or("report".into(), |s| s.to_string_lossy().into_owned());
    output.with_file_name(format!("{stem}.{suffix}"))
}

pub fn run(a: &ReportArgs) -> Result<String, CliError> {
    let mut inputs = Vec::with_capacity(a.inputs.len());
    for p in &a.inputs {
        let text = fs::read_to_string(p)?;
        let doc: Value = serde_json::from_str(&text)
            .map_err(|e| CliError::schema(format!("{}: not a JSON document: {e}", p.display())))?;
        inputs.push(Input {
            name: p.file_name().map_or(p.display().to_string(), |n| n.to_string_lossy().into_owned()),
            doc,
        });
    }
    let (mut md, plots) = render(&inputs)?;
    for (suffix, svg) in &plots {
        let path = sibling(&a.output, suffix);
        let name = path.file_name().unwrap().to_string_lossy().into_owned();
        let marker = if *suffix == "blowdown.svg" { "BLOWDOWN_SVG" } else { "MONOTONICITY_SVG" };
        md = md.replace(marker, &name);
        write_atomic(&path, svg.as_bytes())?;
    }
    write_atomic(&a.output, md.as_bytes())?;
    Ok(format!(
        "report: {} inputs, {} plots -> {}",
        inputs.len(),
        plots.len(),
        a.output.display()
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn input(name: &str, doc: Value) -> Input {
        Input { name: name.into(), doc }
    }

    #[test]
    fn empty_report() {
        let (md, plots) = render(&[]).unwrap();
        assert!(md.contains("No inputs"));
        assert!(plots.is_empty());
    }

    #[test]
    fn tabulates_entropies_against_targets() {
        let docs = vec![
            input("p.json", json!({"schema": 1, "kind": "entropy", "generator": "vertical-plane", "value": 1.0001, "tail_bound": 1e-9, "argmax": {"t0": 3.0}})),
            input("g.json", json!({"schema": 1, "kind": "entropy", "generator": "grim-reaper", "value": 1.98, "tail_bound": 0.01})),
        ];
        let (md, _) = render(&docs).unwrap();
        assert!(md.contains("| p.json | vertical-plane | 1.000100 | 1.000e-9 | 1.000000 | +1.000e-4 | 3.000000 |"), "{md}");
        assert!(md.contains("| g.json | grim-reaper | 1.980000 | 0.010000 | 2.000000 | -2.000e-2 | - |"), "{md}");
    }

    #[test]
    fn refuses_missing_tail_bounds_and_mixed_schemas() {
        let bare = input("e.json", json!({"schema": 1, "kind": "entropy", "generator": "bowl", "value": 1.5}));
        let err = render(&[bare]).unwrap_err();
        assert_eq!(err.kind(), "SchemaMismatch");
        let docs = vec![
            input("a.json", json!({"schema": 1, "kind": "slab", "classification": {}})),
            input("b.json", json!({"schema": 2, "kind": "slab", "classification": {}})),
        ];
        assert_eq!(render(&docs).unwrap_err().kind(), "SchemaMismatch");
        let odd = input("c.json", json!({"schema": 1, "kind": "weather"}));
        assert_eq!(render(&[odd]).unwrap_err().kind(), "SchemaMismatch");
    }

    #[test]
    fn blowdown_plots() {
        let doc = json!({
            "schema": 1, "kind": "blowdown", "generator": "grim-reaper",
            "taus": [2.0, 3.0], "values": [1.68, 1.85], "tail_bounds": [0.0, 0.001],
            "huisken": {"taus": [0.0, 1.0], "values": [{"value": 1.07, "tail_bound": 0.0}, {"value": 1.35, "tail_bound": 0.0}], "warning": null}
        });
        let (md, plots) = render(&[input("b.json", doc)]).unwrap();
        assert_eq!(plots.len(), 2);
        assert!(md.contains("| b.json | grim-reaper | 3 | 1.850000 | 1.000e-3 | 2.000000 |"), "{md}");
        assert!(md.contains("| b.json | grim-reaper | 1 | 1.350000 | true | - |"), "{md}");
    }
}
