//! Parametric hull design: geometry from (column spacing, heave plate height),
//! structural mass distribution, zero-trim ballasting, hydrostatics, cost, and the
//! draft root-finder that enforces the pitch restoring constraint.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};
use crate::numerics::bisect;
use crate::slow::turbine::TurbineConfig;

pub const RHO_WATER: f64 = 1025.0;
pub const GRAVITY: f64 = 9.81;
/// Column radius as a fraction of the radius at which the columns touch.
pub const RADIUS_FRACTION: f64 = 0.52;
pub const MAX_DRAFT: f64 = 80.0;
/// Pitch restoring constraint applied across the design space [N m/rad].
pub const C55_TARGET: f64 = 2.255e9;
/// Draft tolerance of the restoring root-finder [m].
pub const DRAFT_TOLERANCE: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShapeParams {
    /// Column spacing from the platform centerline [m].
    pub column_spacing: f64,
    /// Heave plate height [m].
    pub plate_height: f64,
    /// Target heave-plate-to-column radius ratio.
    pub plate_ratio_target: f64,
}

impl ShapeParams {
    pub fn new(column_spacing: f64, plate_height: f64) -> Result<Self> {
        Self::with_ratio(column_spacing, plate_height, 2.0)
    }

    pub fn with_ratio(column_spacing: f64, plate_height: f64, plate_ratio_target: f64) -> Result<Self> {
        ensure!(column_spacing > 0.0, InvalidParameter, "column spacing must be positive");
        ensure!(plate_height > 0.0, InvalidParameter, "heave plate height must be positive");
        ensure!(
            plate_ratio_target > 1.0,
            InvalidParameter,
            "heave plate ratio must exceed 1"
        );
        Ok(Self {
            column_spacing,
            plate_height,
            plate_ratio_target,
        })
    }

    pub fn id(&self) -> String {
        format!("d{:.1}_h{:.1}", self.column_spacing, self.plate_height)
    }
}

/// Saturating heave-plate ratio: approaches `target` when `max_ratio` is large and
/// never exceeds `max_ratio`.
pub fn saturated_plate_ratio(target: f64, max_ratio: f64) -> f64 {
    let span = max_ratio - 1.0;
    1.0 + span * (1.0 - (-(target - 1.0) / span).exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HullShape {
    pub params: ShapeParams,
    pub column_radius: f64,
    pub plate_radius: f64,
    pub draft: f64,
    /// Plan-view column centers; the first sits on the downwind x-axis.
    pub columns: [[f64; 2]; 3],
}

impl HullShape {
    pub fn spacing(&self) -> f64 {
        self.params.column_spacing
    }

    pub fn plate_height(&self) -> f64 {
        self.params.plate_height
    }

    pub fn plate_ratio(&self) -> f64 {
        self.plate_radius / self.column_radius
    }

    /// Elevation of the heave plate top (column bottom).
    pub fn plate_top(&self) -> f64 {
        -self.draft + self.params.plate_height
    }

    pub fn column_xs(&self) -> [f64; 3] {
        [self.columns[0][0], self.columns[1][0], self.columns[2][0]]
    }
}

/// Hull geometry for a shape at a given draft.
pub fn derive_geometry(params: ShapeParams, draft: f64) -> Result<HullShape> {
    if !(draft >= params.plate_height && draft <= MAX_DRAFT) {
        return Err(Error::Constraint(format!(
            "draft {draft:.3} m outside [{:.3}, {MAX_DRAFT}] m",
            params.plate_height
        )));
    }
    let d = params.column_spacing;
    let touching_radius = d * 3f64.sqrt() / 2.0;
    let column_radius = RADIUS_FRACTION * touching_radius;
    let ratio = saturated_plate_ratio(params.plate_ratio_target, 1.0 / RADIUS_FRACTION);
    let columns = [0.0f64, 2.0 * PI / 3.0, 4.0 * PI / 3.0].map(|a| [d * a.cos(), d * a.sin()]);
    Ok(HullShape {
        params,
        column_radius,
        plate_radius: ratio * column_radius,
        draft,
        columns,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MaterialProps {
    pub concrete_density: f64,
    pub steel_density: f64,
    pub ballast_density: f64,
    /// [EUR/t]
    pub steel_cost: f64,
    /// [EUR/t]
    pub concrete_cost: f64,
    pub column_wall_thickness: f64,
    pub plate_lid_thickness: f64,
}

impl Default for MaterialProps {
    fn default() -> Self {
        Self {
            concrete_density: 2750.0,
            steel_density: 7750.0,
            ballast_density: 2500.0,
            steel_cost: 4500.0,
            concrete_cost: 399.0,
            column_wall_thickness: 0.6,
            plate_lid_thickness: 0.4,
        }
    }
}

impl MaterialProps {
    pub fn validate(&self) -> Result<()> {
        let all = [
            self.concrete_density,
            self.steel_density,
            self.ballast_density,
            self.steel_cost,
            self.concrete_cost,
            self.column_wall_thickness,
            self.plate_lid_thickness,
        ];
        ensure!(
            all.iter().all(|&v| v > 0.0),
            InvalidParameter,
            "material properties must be strictly positive"
        );
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TripodProps {
    pub strut_width: f64,
    pub wall_thickness_mm: f64,
    pub mass: f64,
}

const TRIPOD_MIN: (f64, TripodProps) = (
    10.0,
    TripodProps {
        strut_width: 5.0,
        wall_thickness_mm: 50.0,
        mass: 447.0e3,
    },
);
const TRIPOD_MAX: (f64, TripodProps) = (
    35.0,
    TripodProps {
        strut_width: 7.0,
        wall_thickness_mm: 60.0,
        mass: 1716.0e3,
    },
);

/// Steel tripod dimensions interpolated linearly between the parametric endpoints.
pub fn tripod_properties(spacing: f64) -> Result<TripodProps> {
    let (d0, a) = TRIPOD_MIN;
    let (d1, b) = TRIPOD_MAX;
    if !(d0..=d1).contains(&spacing) {
        return Err(Error::OutOfRange(format!(
            "tripod parameterization covers d in [{d0}, {d1}] m, got {spacing}"
        )));
    }
    let s = (spacing - d0) / (d1 - d0);
    let lerp = |x: f64, y: f64| x + s * (y - x);
    Ok(TripodProps {
        strut_width: lerp(a.strut_width, b.strut_width),
        wall_thickness_mm: lerp(a.wall_thickness_mm, b.wall_thickness_mm),
        mass: lerp(a.mass, b.mass),
    })
}

/// Mass, elevation of its center, and pitch inertia about the SWL centerline point.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct MassItem {
    pub mass: f64,
    pub z_cm: f64,
    pub pitch_inertia: f64,
}

impl MassItem {
    fn combine(items: &[MassItem]) -> MassItem {
        let mass: f64 = items.iter().map(|i| i.mass).sum();
        let moment: f64 = items.iter().map(|i| i.mass * i.z_cm).sum();
        MassItem {
            mass,
            z_cm: if mass > 0.0 { moment / mass } else { 0.0 },
            pitch_inertia: items.iter().map(|i| i.pitch_inertia).sum(),
        }
    }

    /// Solid or hollow cylinder segment with axis vertical, replicated at the three
    /// columns (mean squared lever arm `x2`).
    fn cylinders(mass: f64, r_out: f64, r_in: f64, z0: f64, z1: f64, x2: f64) -> MassItem {
        let h = z1 - z0;
        let zc = 0.5 * (z0 + z1);
        let own = mass * (3.0 * (r_out * r_out + r_in * r_in) + h * h) / 12.0;
        MassItem {
            mass,
            z_cm: zc,
            pitch_inertia: own + mass * (zc * zc + x2),
        }
    }

    /// Pitch inertia about the item's own center of mass.
    pub fn central_inertia(&self) -> f64 {
        self.pitch_inertia - self.mass * self.z_cm * self.z_cm
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MassBreakdown {
    pub columns: MassItem,
    pub heave_plates: MassItem,
    pub tripod: MassItem,
    pub tower: MassItem,
    pub rna: MassItem,
    pub ballast: MassItem,
    /// Ballast fill height per column above the bottom lid [m].
    pub ballast_fill_height: f64,
}

impl MassBreakdown {
    /// Columns, heave plates and tripod.
    pub fn structure(&self) -> MassItem {
        MassItem::combine(&[self.columns, self.heave_plates, self.tripod])
    }

    /// Floater including ballast.
    pub fn platform(&self) -> MassItem {
        MassItem::combine(&[self.columns, self.heave_plates, self.tripod, self.ballast])
    }

    pub fn turbine(&self) -> MassItem {
        MassItem::combine(&[self.tower, self.rna])
    }

    /// Whole floating system.
    pub fn system(&self) -> MassItem {
        MassItem::combine(&[
            self.columns,
            self.heave_plates,
            self.tripod,
            self.tower,
            self.rna,
            self.ballast,
        ])
    }

    pub fn total_mass(&self) -> f64 {
        self.system().mass
    }
}

/// Settings shared by all designs in a sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct DesignBasis {
    pub materials: MaterialProps,
    /// Column top above SWL [m].
    pub freeboard: f64,
    pub fairlead_elevation: f64,
    pub fairlead_radius: f64,
    /// Static vertical mooring load at the fairleads [N].
    pub mooring_vertical_load: f64,
    pub include_mooring_load: bool,
    pub c55_target: f64,
}

impl Default for DesignBasis {
    fn default() -> Self {
        Self {
            materials: MaterialProps::default(),
            freeboard: 11.0,
            fairlead_elevation: 8.7,
            fairlead_radius: 26.0,
            mooring_vertical_load: 0.0,
            include_mooring_load: true,
            c55_target: C55_TARGET,
        }
    }
}

impl DesignBasis {
    pub fn effective_mooring_load(&self) -> f64 {
        if self.include_mooring_load {
            self.mooring_vertical_load
        } else {
            0.0
        }
    }
}

/// Structural masses excluding ballast (ballast entry zeroed).
pub fn structural_mass(
    shape: &HullShape,
    mat: &MaterialProps,
    turbine: &TurbineConfig,
    freeboard: f64,
) -> Result<MassBreakdown> {
    let r = shape.column_radius;
    let rp = shape.plate_radius;
    let w = mat.column_wall_thickness;
    let lid = mat.plate_lid_thickness;
    if w >= r {
        return Err(Error::Infeasible(format!(
            "wall thickness {w} m not below column radius {r:.3} m"
        )));
    }
    let ri = r - w;
    let x2 = 0.5 * shape.spacing().powi(2);
    let rho_c = mat.concrete_density;
    let z_keel = -shape.draft;
    let z_plate_top = shape.plate_top();

    // columns: open-topped walls from the plate top to the freeboard
    let wall_volume = 3.0 * PI * (r * r - ri * ri) * (freeboard - z_plate_top);
    let columns = MassItem::cylinders(wall_volume * rho_c, r, ri, z_plate_top, freeboard, x2);

    // heave plates: concrete rings of height h_hp flush with the column ends
    let h = shape.plate_height();
    let heave_plates = if h <= 2.0 * lid {
        MassItem::cylinders(3.0 * PI * rp * rp * h * rho_c, rp, 0.0, z_keel, z_plate_top, x2)
    } else {
        let band = h - 2.0 * lid;
        let rpi = (rp - w).max(r);
        let mut parts = vec![
            // bottom lid over the full plate
            MassItem::cylinders(3.0 * PI * rp * rp * lid * rho_c, rp, 0.0, z_keel, z_keel + lid, x2),
            // upper lid annulus around the column
            MassItem::cylinders(
                3.0 * PI * (rp * rp - r * r) * lid * rho_c,
                rp,
                r,
                z_plate_top - lid,
                z_plate_top,
                x2,
            ),
            // column wall continued through the plate band
            MassItem::cylinders(
                3.0 * PI * (r * r - ri * ri) * band * rho_c,
                r,
                ri,
                z_keel + lid,
                z_plate_top - lid,
                x2,
            ),
        ];
        if rp > rpi {
            parts.push(MassItem::cylinders(
                3.0 * PI * (rp * rp - rpi * rpi) * band * rho_c,
                rp,
                rpi,
                z_keel + lid,
                z_plate_top - lid,
                x2,
            ));
        }
        MassItem::combine(&parts)
    };

    let tp = tripod_properties(shape.spacing())?;
    let z_tripod = freeboard + 0.5 * tp.strut_width;
    let tripod = MassItem {
        mass: tp.mass,
        z_cm: z_tripod,
        // three struts from the centerline to the columns
        pitch_inertia: tp.mass * (z_tripod * z_tripod + shape.spacing().powi(2) / 6.0),
    };

    let lumps = turbine.tower_lumps(50);
    let tower = MassItem {
        mass: turbine.tower_mass,
        z_cm: lumps.iter().map(|(z, m)| z * m).sum::<f64>() / turbine.tower_mass,
        pitch_inertia: turbine.tower_mass * turbine.tower_length().powi(2) / 12.0
            + lumps.iter().map(|(z, m)| m * z * z).sum::<f64>(),
    };
    let rna = MassItem {
        mass: turbine.rna_mass,
        z_cm: turbine.hub_height,
        pitch_inertia: turbine.rna_mass * turbine.hub_height.powi(2),
    };

    Ok(MassBreakdown {
        columns,
        heave_plates,
        tripod,
        tower,
        rna,
        ballast: MassItem::default(),
        ballast_fill_height: 0.0,
    })
}

/// Displaced volume [m^3] and its centroid elevation.
pub fn displacement(shape: &HullShape) -> (f64, f64) {
    let r = shape.column_radius;
    let rp = shape.plate_radius;
    let h = shape.plate_height();
    let col_len = shape.draft - h;
    let v_col = 3.0 * PI * r * r * col_len;
    let v_plate = 3.0 * PI * rp * rp * h;
    let z_col = -0.5 * col_len;
    let z_plate = -shape.draft + 0.5 * h;
    let v = v_col + v_plate;
    (v, (v_col * z_col + v_plate * z_plate) / v)
}

/// Fill the three columns equally with ballast so that displacement balances weight.
pub fn solve_ballast(
    shape: &HullShape,
    mass: &MassBreakdown,
    mat: &MaterialProps,
    mooring_vertical_load: f64,
    freeboard: f64,
) -> Result<MassBreakdown> {
    let (volume, _) = displacement(shape);
    let others = mass.structure().mass + mass.turbine().mass;
    let ballast = RHO_WATER * volume - others - mooring_vertical_load / GRAVITY;
    if ballast < 0.0 {
        return Err(Error::Infeasible(format!(
            "negative ballast {ballast:.3e} kg at draft {:.3} m",
            shape.draft
        )));
    }
    let r = shape.column_radius;
    let ri = r - mat.column_wall_thickness;
    let lid = mat.plate_lid_thickness;
    let x2 = 0.5 * shape.spacing().powi(2);
    let z0 = -shape.draft + lid;
    // the hollow heave-plate ring communicates with the column interior
    let band_top = shape.plate_top() - lid;
    let ring_outer = (shape.plate_radius - mat.column_wall_thickness).max(r);
    let ring_area = if band_top > z0 { PI * (ring_outer * ring_outer - r * r) } else { 0.0 };
    let core_area = PI * ri * ri;
    let per_column = ballast / mat.ballast_density / 3.0;
    let lower_capacity = (core_area + ring_area) * (band_top - z0).max(0.0);
    let fill = if per_column <= lower_capacity {
        per_column / (core_area + ring_area)
    } else {
        (band_top - z0).max(0.0) + (per_column - lower_capacity) / core_area
    };
    let capacity = freeboard - z0;
    if fill >= capacity {
        return Err(Error::Infeasible(format!(
            "ballast fill {fill:.2} m exceeds column capacity {capacity:.2} m"
        )));
    }
    let ring_top = (z0 + fill).min(band_top.max(z0));
    let ring_mass = 3.0 * ring_area * (ring_top - z0) * mat.ballast_density;
    let mut parts = vec![MassItem::cylinders(ballast - ring_mass, ri, 0.0, z0, z0 + fill, x2)];
    if ring_mass > 0.0 {
        parts.push(MassItem::cylinders(ring_mass, ring_outer, r, z0, ring_top, x2));
    }
    let mut out = *mass;
    out.ballast = MassItem::combine(&parts);
    out.ballast_fill_height = fill;
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hydrostatics {
    pub volume: f64,
    pub z_buoyancy: f64,
    pub waterplane_area: f64,
    pub waterplane_inertia: f64,
    pub metacentric_height: f64,
    pub c33: f64,
    pub c55: f64,
}

/// Small-angle hydrostatics of the ballasted system (all masses, turbine included).
pub fn hydrostatics(shape: &HullShape, mass: &MassBreakdown) -> Result<Hydrostatics> {
    let (volume, z_b) = displacement(shape);
    let r = shape.column_radius;
    let d = shape.spacing();
    let area = 3.0 * PI * r * r;
    let inertia = 3.0 * PI * r.powi(4) / 4.0 + 1.5 * PI * r * r * d * d;
    let gm = z_b + inertia / volume - mass.system().z_cm;
    let h = Hydrostatics {
        volume,
        z_buoyancy: z_b,
        waterplane_area: area,
        waterplane_inertia: inertia,
        metacentric_height: gm,
        c33: RHO_WATER * GRAVITY * area,
        c55: RHO_WATER * GRAVITY * volume * gm,
    };
    if gm <= 0.0 {
        return Err(Error::Infeasible(format!("unstable design, GM = {gm:.3} m")));
    }
    Ok(h)
}

/// Processed-material cost [EUR]: steel tripod plus concrete columns and heave plates.
pub fn estimate_cost(mass: &MassBreakdown, mat: &MaterialProps) -> f64 {
    mat.steel_cost * mass.tripod.mass / 1000.0
        + mat.concrete_cost * (mass.columns.mass + mass.heave_plates.mass) / 1000.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MooringAttachment {
    pub fairlead_elevation: f64,
    pub fairlead_radius: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Design {
    pub id: String,
    pub shape: HullShape,
    pub mass: MassBreakdown,
    pub hydrostatics: Hydrostatics,
    pub mooring: MooringAttachment,
    pub cost: f64,
    pub tripod: TripodProps,
}

impl Design {
    pub fn to_json(&self) -> Result<String> {
        let mut v = serde_json::to_value(self)?;
        if let Some(obj) = v.as_object_mut() {
            obj.insert("schema".into(), serde_json::json!("hullsweep/design/v1"));
        }
        Ok(serde_json::to_string_pretty(&v)?)
    }
}

/// Complete design at a fixed draft (no restoring constraint applied).
pub fn design_at_draft(
    params: ShapeParams,
    draft: f64,
    basis: &DesignBasis,
    turbine: &TurbineConfig,
) -> Result<Design> {
    let shape = derive_geometry(params, draft)?;
    let structure = structural_mass(&shape, &basis.materials, turbine, basis.freeboard)?;
    let mass = solve_ballast(
        &shape,
        &structure,
        &basis.materials,
        basis.effective_mooring_load(),
        basis.freeboard,
    )?;
    let hydrostatics = hydrostatics(&shape, &mass)?;
    Ok(Design {
        id: params.id(),
        shape,
        mass,
        hydrostatics,
        mooring: MooringAttachment {
            fairlead_elevation: basis.fairlead_elevation,
            fairlead_radius: basis.fairlead_radius,
        },
        cost: estimate_cost(&mass, &basis.materials),
        tripod: tripod_properties(params.column_spacing)?,
    })
}

/// Pitch restoring at a draft; infeasible drafts (negative ballast, GM <= 0) map to `None`.
pub fn c55_at_draft(
    params: ShapeParams,
    draft: f64,
    basis: &DesignBasis,
    turbine: &TurbineConfig,
) -> Option<f64> {
    let shape = derive_geometry(params, draft).ok()?;
    let structure = structural_mass(&shape, &basis.materials, turbine, basis.freeboard).ok()?;
    let mass = solve_ballast(
        &shape,
        &structure,
        &basis.materials,
        basis.effective_mooring_load(),
        basis.freeboard,
    )
    .ok()?;
    let (volume, z_b) = displacement(&shape);
    let r = shape.column_radius;
    let inertia = 3.0 * PI * r.powi(4) / 4.0 + 1.5 * PI * r * r * shape.spacing().powi(2);
    let gm = z_b + inertia / volume - mass.system().z_cm;
    Some(RHO_WATER * GRAVITY * volume * gm)
}

/// Bisection on the draft for the target pitch restoring.
pub fn solve_draft_for_c55(
    params: ShapeParams,
    c55_target: f64,
    basis: &DesignBasis,
    turbine: &TurbineConfig,
) -> Result<Design> {
    ensure!(c55_target > 0.0, InvalidParameter, "C55 target must be positive");
    let lo = params.plate_height + 1.0;
    let hi = MAX_DRAFT;
    let residual = |t: f64| match c55_at_draft(params, t, basis, turbine) {
        Some(c) => c - c55_target,
        None => -c55_target,
    };
    let draft = bisect(residual, lo, hi, DRAFT_TOLERANCE, 200).map_err(|_| {
        Error::Infeasible(format!(
            "{}: restoring target not bracketed on draft [{lo:.2}, {hi:.2}] m",
            params.id()
        ))
    })?;
    let design = design_at_draft(params, draft, basis, turbine)?;
    let rel = (design.hydrostatics.c55 - c55_target).abs() / c55_target;
    if rel > 1e-3 {
        return Err(Error::Constraint(format!(
            "{}: C55 residual {rel:.2e} after root-finding",
            params.id()
        )));
    }
    Ok(design)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct DesignGrid {
    pub spacings: Vec<f64>,
    pub plate_heights: Vec<f64>,
}

impl Default for DesignGrid {
    fn default() -> Self {
        Self {
            spacings: (0..10).map(|i| 15.0 + i as f64).collect(),
            plate_heights: vec![1.0, 4.5, 8.0],
        }
    }
}

impl DesignGrid {
    pub fn points(&self) -> Vec<(f64, f64)> {
        self.plate_heights
            .iter()
            .flat_map(|&h| self.spacings.iter().map(move |&d| (d, h)))
            .collect()
    }
}

/// Outcome of one grid point.
#[derive(Debug)]
pub struct GridOutcome {
    pub spacing: f64,
    pub plate_height: f64,
    pub design: Result<Design>,
}

/// Evaluate every grid point; infeasible points carry their error.
pub fn build_design_space(
    grid: &DesignGrid,
    basis: &DesignBasis,
    turbine: &TurbineConfig,
) -> Vec<GridOutcome> {
    grid.points()
        .into_iter()
        .map(|(d, h)| GridOutcome {
            spacing: d,
            plate_height: h,
            design: ShapeParams::new(d, h)
                .and_then(|p| solve_draft_for_c55(p, basis.c55_target, basis, turbine)),
        })
        .collect()
}

/// Accepted designs of the grid, in grid order.
pub fn feasible_designs(grid: &DesignGrid, basis: &DesignBasis, turbine: &TurbineConfig) -> Vec<Design> {
    build_design_space(grid, basis, turbine)
        .into_iter()
        .filter_map(|o| o.design.ok())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn basis() -> DesignBasis {
        DesignBasis::default()
    }

    #[test]
    fn optimum_geometry() {
        let s = derive_geometry(ShapeParams::new(24.0, 4.5).unwrap(), 21.94).unwrap();
        assert!((s.column_radius - 10.81).abs() < 0.01, "{}", s.column_radius);
        assert!((s.plate_radius - 17.4).abs() < 0.1, "{}", s.plate_radius);
        assert!((s.plate_ratio() - 1.610).abs() < 0.005);
    }

    #[test]
    fn ratio_collapses_without_target_enlargement() {
        let r = saturated_plate_ratio(1.0 + 1e-12, 1.0 / RADIUS_FRACTION);
        assert!((r - 1.0).abs() < 1e-9);
        // large cap recovers the target
        assert!((saturated_plate_ratio(2.0, 1e6) - 2.0).abs() < 1e-5);
    }

    #[test]
    fn draft_bounds_enforced() {
        let p = ShapeParams::new(20.0, 4.5).unwrap();
        assert!(matches!(derive_geometry(p, 3.0), Err(Error::Constraint(_))));
        assert!(matches!(derive_geometry(p, 81.0), Err(Error::Constraint(_))));
    }

    #[test]
    fn tripod_endpoints_and_midpoint() {
        let a = tripod_properties(10.0).unwrap();
        assert_eq!((a.strut_width, a.wall_thickness_mm, a.mass), (5.0, 50.0, 447.0e3));
        let b = tripod_properties(35.0).unwrap();
        assert_eq!((b.strut_width, b.wall_thickness_mm, b.mass), (7.0, 60.0, 1716.0e3));
        let m = tripod_properties(22.5).unwrap();
        assert!((m.mass - 1081.5e3).abs() < 1e-6);
        assert!(tripod_properties(9.0).is_err());
        assert!(tripod_properties(36.0).is_err());
    }

    #[test]
    fn concrete_density_scales_concrete_items() {
        let t = TurbineConfig::default();
        let s = derive_geometry(ShapeParams::new(20.0, 4.5).unwrap(), 25.0).unwrap();
        let mut mat = MaterialProps::default();
        let a = structural_mass(&s, &mat, &t, 10.0).unwrap();
        mat.concrete_density *= 2.0;
        let b = structural_mass(&s, &mat, &t, 10.0).unwrap();
        assert!((b.columns.mass / a.columns.mass - 2.0).abs() < 1e-12);
        assert!((b.heave_plates.mass / a.heave_plates.mass - 2.0).abs() < 1e-12);
        assert_eq!(a.tripod.mass, b.tripod.mass);
    }

    #[test]
    fn wall_thicker_than_radius_is_infeasible() {
        let t = TurbineConfig::default();
        let s = derive_geometry(ShapeParams::new(20.0, 4.5).unwrap(), 25.0).unwrap();
        let mat = MaterialProps {
            column_wall_thickness: 20.0,
            ..Default::default()
        };
        assert!(matches!(structural_mass(&s, &mat, &t, 10.0), Err(Error::Infeasible(_))));
    }

    #[test]
    fn degenerate_plate_is_lids_plus_wall() {
        let t = TurbineConfig::default();
        let p = ShapeParams::with_ratio(20.0, 4.5, 1.0 + 1e-15).unwrap();
        let s = derive_geometry(p, 25.0).unwrap();
        let mat = MaterialProps::default();
        let m = structural_mass(&s, &mat, &t, 10.0).unwrap();
        let r = s.column_radius;
        let ri = r - mat.column_wall_thickness;
        let expected = 3.0
            * mat.concrete_density
            * PI
            * (r * r * mat.plate_lid_thickness + (r * r - ri * ri) * (4.5 - 0.8));
        assert!((m.heave_plates.mass - expected).abs() / expected < 1e-6);
    }

    #[test]
    fn ballast_balances_displacement() {
        let t = TurbineConfig::default();
        let s = derive_geometry(ShapeParams::new(24.0, 4.5).unwrap(), 21.94).unwrap();
        let mat = MaterialProps::default();
        let m = structural_mass(&s, &mat, &t, 10.0).unwrap();
        let b = solve_ballast(&s, &m, &mat, 0.0, 10.0).unwrap();
        let (v, _) = displacement(&s);
        assert!((b.system().mass - RHO_WATER * v).abs() < 1e-6 * RHO_WATER * v);
        assert!(b.ballast.mass >= 0.0);
    }

    #[test]
    fn ballast_zero_when_structure_matches_displacement() {
        let t = TurbineConfig::default();
        let s = derive_geometry(ShapeParams::new(24.0, 4.5).unwrap(), 21.94).unwrap();
        let mat = MaterialProps::default();
        let mut m = structural_mass(&s, &mat, &t, 10.0).unwrap();
        let (v, _) = displacement(&s);
        let deficit = RHO_WATER * v - m.structure().mass - m.turbine().mass;
        m.columns.mass += deficit;
        let b = solve_ballast(&s, &m, &mat, 0.0, 10.0).unwrap();
        assert!(b.ballast.mass.abs() < 1e-6);
    }

    #[test]
    fn unit_restoring_product() {
        assert!((RHO_WATER * GRAVITY * 1.0 * 1.0 - 1.006e4).abs() < 5.0);
    }

    #[test]
    fn cost_rates() {
        let mat = MaterialProps::default();
        let mut m = MassBreakdown {
            columns: MassItem::default(),
            heave_plates: MassItem::default(),
            tripod: MassItem::default(),
            tower: MassItem::default(),
            rna: MassItem::default(),
            ballast: MassItem::default(),
            ballast_fill_height: 0.0,
        };
        assert_eq!(estimate_cost(&m, &mat), 0.0);
        m.tripod.mass = 1000.0;
        assert!((estimate_cost(&m, &mat) - 4500.0).abs() < 1e-9);
        m.tripod.mass = 0.0;
        m.columns.mass = 1000.0;
        assert!((estimate_cost(&m, &mat) - 399.0).abs() < 1e-9);
        m.ballast.mass = 1e9;
        assert!((estimate_cost(&m, &mat) - 399.0).abs() < 1e-9);
    }

    #[test]
    fn draft_solver_fixed_point() {
        let t = TurbineConfig::default();
        let b = basis();
        let p = ShapeParams::new(20.0, 4.5).unwrap();
        let target = c55_at_draft(p, 30.0, &b, &t).unwrap();
        let d = solve_draft_for_c55(p, target, &b, &t).unwrap();
        assert!((d.shape.draft - 30.0).abs() < 2e-3, "{}", d.shape.draft);
    }

    #[test]
    fn empty_grid_is_empty() {
        let grid = DesignGrid {
            spacings: vec![],
            plate_heights: vec![4.5],
        };
        assert!(build_design_space(&grid, &basis(), &TurbineConfig::default()).is_empty());
    }
}
