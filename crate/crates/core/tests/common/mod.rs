//! Panel-mesh pressure integration used as an independent hydrostatic oracle.

use std::f64::consts::PI;

use hullsweep::hull::*;

pub type P3 = [f64; 3];

/// Outward-oriented triangles of one column with its heave plate, extended to `top`.
pub fn column_mesh(cx: f64, cy: f64, r: f64, rp: f64, keel: f64, plate_top: f64, top: f64, n: usize) -> Vec<[P3; 3]> {
    let mut tris = Vec::new();
    let ring = |rad: f64, z: f64, i: usize| -> P3 {
        let a = 2.0 * PI * (i % n) as f64 / n as f64;
        [cx + rad * a.cos(), cy + rad * a.sin(), z]
    };
    let bands = 8;
    let wall = |tris: &mut Vec<[P3; 3]>, rad: f64, z0: f64, z1: f64| {
        for b in 0..bands {
            let za = z0 + (z1 - z0) * b as f64 / bands as f64;
            let zb = z0 + (z1 - z0) * (b + 1) as f64 / bands as f64;
            for i in 0..n {
                let (p0, p1, p2, p3) = (ring(rad, za, i), ring(rad, za, i + 1), ring(rad, zb, i + 1), ring(rad, zb, i));
                tris.push([p0, p1, p2]);
                tris.push([p0, p2, p3]);
            }
        }
    };
    wall(&mut tris, r, plate_top, top);
    wall(&mut tris, rp, keel, plate_top);
    let c_keel = [cx, cy, keel];
    let c_top = [cx, cy, top];
    for i in 0..n {
        // keel disk faces down, deck disk up
        tris.push([c_keel, ring(rp, keel, i + 1), ring(rp, keel, i)]);
        tris.push([c_top, ring(r, top, i), ring(r, top, i + 1)]);
        // plate top annulus faces up
        let (a, b, c, d) = (ring(r, plate_top, i), ring(rp, plate_top, i), ring(rp, plate_top, i + 1), ring(r, plate_top, i + 1));
        tris.push([a, b, c]);
        tris.push([a, c, d]);
    }
    tris
}

fn sub(a: P3, b: P3) -> P3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn cross(a: P3, b: P3) -> P3 {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn lerp(a: P3, b: P3, s: f64) -> P3 {
    [a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1]), a[2] + s * (b[2] - a[2])]
}

/// Part of a triangle below z = 0.
fn clip(t: [P3; 3]) -> Vec<[P3; 3]> {
    let mut poly: Vec<P3> = Vec::with_capacity(4);
    for i in 0..3 {
        let (a, b) = (t[i], t[(i + 1) % 3]);
        if a[2] <= 0.0 {
            poly.push(a);
        }
        if (a[2] < 0.0) != (b[2] < 0.0) && a[2] != b[2] {
            poly.push(lerp(a, b, a[2] / (a[2] - b[2])));
        }
    }
    (1..poly.len().saturating_sub(1)).map(|i| [poly[0], poly[i], poly[i + 1]]).collect()
}

/// Hydrostatic force z-component and pitch moment `z Fx - x Fz` of the wetted part.
pub fn pressure_loads(tris: &[[P3; 3]]) -> (f64, f64) {
    let rg = RHO_WATER * GRAVITY;
    let (mut fz, mut my) = (0.0, 0.0);
    for t in tris.iter().flat_map(|t| clip(*t)) {
        // area vector
        let s = cross(sub(t[1], t[0]), sub(t[2], t[0]));
        let s = [0.5 * s[0], 0.5 * s[1], 0.5 * s[2]];
        // edge midpoints integrate quadratics exactly
        let mids = [lerp(t[0], t[1], 0.5), lerp(t[1], t[2], 0.5), lerp(t[2], t[0], 0.5)];
        for m in mids {
            let p = -rg * m[2];
            let f = [-p * s[0] / 3.0, 0.0, -p * s[2] / 3.0];
            fz += f[2];
            my += m[2] * f[0] - m[0] * f[2];
        }
    }
    (fz, my)
}

fn rotate(tris: &[[P3; 3]], beta: f64) -> Vec<[P3; 3]> {
    let (c, s) = (beta.cos(), beta.sin());
    tris.iter()
        .map(|t| t.map(|p| [p[0] * c + p[2] * s, p[1], -p[0] * s + p[2] * c]))
        .collect()
}

/// C55 from pressure integration on the inclined mesh plus the weight lever.
pub fn mesh_c55(design: &Design, n: usize) -> f64 {
    let sh = &design.shape;
    let tris: Vec<[P3; 3]> = sh
        .columns
        .iter()
        .flat_map(|c| column_mesh(c[0], c[1], sh.column_radius, sh.plate_radius, -sh.draft, sh.plate_top(), 15.0, n))
        .collect();
    let (buoyancy, _) = pressure_loads(&tris);
    let h = 1e-3;
    let (_, m_plus) = pressure_loads(&rotate(&tris, h));
    let (_, m_minus) = pressure_loads(&rotate(&tris, -h));
    let weight_lever = buoyancy * design.mass.system().z_cm;
    -(m_plus - m_minus) / (2.0 * h) - weight_lever
}
