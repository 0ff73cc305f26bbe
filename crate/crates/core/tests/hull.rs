//! Hull design checks against an independent panel-mesh pressure integration.

use hullsweep::hull::*;
use hullsweep::slow::mooring::MooringConfig;
use hullsweep::slow::turbine::TurbineConfig;
use proptest::prelude::*;

mod common;
use common::*;

fn basis() -> DesignBasis {
    DesignBasis {
        mooring_vertical_load: MooringConfig::default().static_vertical_load().unwrap(),
        ..Default::default()
    }
}

#[test]
fn mesh_volume_matches_closed_form() {
    let d = solve_draft_for_c55(ShapeParams::new(24.0, 4.5).unwrap(), C55_TARGET, &basis(), &TurbineConfig::default()).unwrap();
    let sh = &d.shape;
    let tris: Vec<[P3; 3]> = sh
        .columns
        .iter()
        .flat_map(|c| column_mesh(c[0], c[1], sh.column_radius, sh.plate_radius, -sh.draft, sh.plate_top(), 15.0, 256))
        .collect();
    let (fz, _) = pressure_loads(&tris);
    let (v, _) = displacement(sh);
    assert!((fz / (RHO_WATER * GRAVITY) / v - 1.0).abs() < 1e-3);
}

#[test]
fn restoring_matches_mesh_oracle_on_all_designs() {
    let b = basis();
    let t = TurbineConfig::default();
    let designs = feasible_designs(&DesignGrid::default(), &b, &t);
    assert_eq!(designs.len(), 30);
    for d in &designs {
        let oracle = mesh_c55(d, 256);
        let rel = (d.hydrostatics.c55 - oracle).abs() / oracle;
        assert!(rel < 0.01, "{}: {:.4e} vs mesh {:.4e}", d.id, d.hydrostatics.c55, oracle);
        assert!((d.hydrostatics.c55 / C55_TARGET - 1.0).abs() < 1e-3, "{}", d.id);
    }
}

#[test]
fn drafts_fall_with_spacing() {
    let b = basis();
    let t = TurbineConfig::default();
    for h in [1.0, 4.5, 8.0] {
        let drafts: Vec<f64> = (15..=24)
            .map(|d| solve_draft_for_c55(ShapeParams::new(d as f64, h).unwrap(), C55_TARGET, &b, &t).unwrap().shape.draft)
            .collect();
        assert!(drafts.windows(2).all(|w| w[1] < w[0]), "h = {h}: {drafts:?}");
    }
}

#[test]
fn optimum_ballast_below_column_top() {
    let b = basis();
    let d = solve_draft_for_c55(ShapeParams::new(24.0, 4.5).unwrap(), C55_TARGET, &b, &TurbineConfig::default()).unwrap();
    let keel_lid = -d.shape.draft + b.materials.plate_lid_thickness;
    assert!(keel_lid + d.mass.ballast_fill_height < b.freeboard);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn restoring_increases_with_draft(d in 15.0f64..24.0, h in 1.0f64..8.0) {
        let b = basis();
        let t = TurbineConfig::default();
        let p = ShapeParams::new(d, h).unwrap();
        let design = solve_draft_for_c55(p, C55_TARGET, &b, &t);
        prop_assume!(design.is_ok());
        let t0 = design.unwrap().shape.draft;
        let samples: Vec<f64> = (0..6)
            .filter_map(|i| c55_at_draft(p, t0 - 1.0 + 0.4 * i as f64, &b, &t))
            .collect();
        prop_assert!(samples.len() == 6);
        prop_assert!(samples.windows(2).all(|w| w[1] > w[0]));
    }
}
