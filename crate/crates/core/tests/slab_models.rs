use std::f64::consts::{FRAC_PI_2, FRAC_PI_6, PI};

use soliton_core::models::{make_bowl, make_grim_reaper, make_tilted_grim_reaper, make_vertical_plane, StripSpec};
use soliton_core::slab::{boundary_approach_sequences, boundary_growth_profile, classify_mesh};
use soliton_core::{make_delta_wing, DeltaWingSpec, HullKind, PlaneSpec, Vec3};

fn wing(m: &[f64]) -> soliton_core::pde::DeltaWing {
    let b = 1.2 * PI;
    make_delta_wing(&DeltaWingSpec::new(b, m.to_vec(), b / 40.0, 1e-8)).unwrap()
}

#[test]
fn strip_generators_have_their_width() {
    let h = 0.1;
    let gr = make_grim_reaper(&StripSpec::grim_reaper(4.0, h, 12.0).unwrap(), 0.0).unwrap();
    let c = classify_mesh(&gr, None).unwrap();
    assert_eq!(c.kind, HullKind::Strip);
    assert!((c.width - PI).abs() < 2.0 * h, "{}", c.width);

    let tilted = make_tilted_grim_reaper(FRAC_PI_6, &StripSpec::grim_reaper(4.0, h, 12.0).unwrap()).unwrap();
    let c = classify_mesh(&tilted, None).unwrap();
    assert_eq!(c.kind, HullKind::Strip);
    let expected = PI / FRAC_PI_6.cos();
    assert!((c.width - expected).abs() < 2.0 * h, "{} vs {expected}", c.width);

    let plane = make_vertical_plane(3.0, h).unwrap();
    assert_eq!(classify_mesh(&plane, None).unwrap().kind, HullKind::Line);
    let bowl = make_bowl(2.0, h).unwrap();
    assert_eq!(classify_mesh(&bowl, None).unwrap().kind, HullKind::Plane);
}

#[test]
fn delta_wing_is_a_strip_that_reaches_its_cap_at_the_walls() {
    let b = 1.2 * PI;
    let h = b / 40.0;
    let schedule = [3.0, 6.0, 12.0];
    let rho = [0.2, 0.5, 1.0];
    let q = [0.0, 0.5 * b];
    let mut prev: Option<Vec<f64>> = None;
    for k in 1..=schedule.len() {
        let w = wing(&schedule[..k]);
        let c = classify_mesh(&w.mesh, None).unwrap();
        assert_eq!(c.kind, HullKind::Strip);
        assert!((c.width - b).abs() < h, "{}", c.width);

        let g = boundary_growth_profile(&w.mesh, q, &rho, None).unwrap();
        assert!(g.saturated.iter().all(|&s| s), "{g:?}");
        let sup: Vec<f64> = g.sup_x3.iter().map(|s| s.unwrap()).collect();
        assert!(sup.windows(2).all(|p| p[1] >= p[0]));
        if let Some(p) = &prev {
            assert!(sup.iter().zip(p).all(|(a, b)| a >= b), "{sup:?} after {p:?}");
        }
        prev = Some(sup);
    }
}

#[test]
fn delta_wing_has_two_approach_tails() {
    let w = wing(&[4.0, 8.0]);
    let plane = PlaneSpec::new(Vec3::zeros(), Vec3::x()).unwrap();
    let r = boundary_approach_sequences(&w.mesh, &plane, None).unwrap();
    assert_eq!(r.sequences.len(), 2);
    for s in &r.sequences {
        assert!(s.x3.windows(2).all(|p| p[1] > p[0]));
        assert!(s.dist.windows(2).all(|p| p[1] < p[0]));
    }
}

#[test]
fn shifted_grim_reaper_growth_matches_graph() {
    let h = 0.05;
    let cap = 10.0;
    let m = make_grim_reaper(&StripSpec::grim_reaper(2.5, h, cap).unwrap(), FRAC_PI_2).unwrap();
    let c = classify_mesh(&m, None).unwrap();
    // foot of the perpendicular from the origin onto a wall
    let l = &c.boundary_lines[0];
    let q = [l.normal[0] * l.offset, l.normal[1] * l.offset];
    let g = boundary_growth_profile(&m, q, &[0.05, 1.0], None).unwrap();
    assert_eq!(g.saturated, vec![true, true]);
    assert!(g.sup_x3.iter().all(|s| (s.unwrap() - cap).abs() < 1e-9));
}
