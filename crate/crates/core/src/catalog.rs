//! Built-in example systems, identical to the bundled JSON fixtures.

use crate::geometry::{pt, Point, Polyhedron, Similarity};
use crate::validator::PolyhedralSystem;

fn scalings(poly: Polyhedron, ratio: f64, translations: &[Point]) -> PolyhedralSystem {
    let maps = translations
        .iter()
        .map(|t| Similarity::scaling(ratio, t.clone()).expect("valid ratio"))
        .collect();
    PolyhedralSystem::new(poly, maps).expect("well-formed catalog system")
}

/// `{x/2, x/2 + 1/2}` on `[0, 1]`.
pub fn interval() -> PolyhedralSystem {
    scalings(Polyhedron::interval(0.0, 1.0).unwrap(), 0.5, &[pt(&[0.0]), pt(&[0.5])])
}

/// Vicsek cross: four corner maps and one central map of ratio 1/3 on the unit square.
pub fn vicsek() -> PolyhedralSystem {
    let t = 1.0 / 3.0;
    let u = 2.0 / 3.0;
    scalings(
        Polyhedron::unit_square(),
        t,
        &[pt(&[0.0, 0.0]), pt(&[u, 0.0]), pt(&[u, u]), pt(&[0.0, u]), pt(&[t, t])],
    )
}

/// Sierpinski gasket: satisfies D1–D3 but its pieces form a cycle.
pub fn gasket() -> PolyhedralSystem {
    let h = 3f64.sqrt() / 2.0;
    let tri = Polyhedron::polygon(vec![pt(&[0.0, 0.0]), pt(&[1.0, 0.0]), pt(&[0.5, h])]).unwrap();
    scalings(tri, 0.5, &[pt(&[0.0, 0.0]), pt(&[0.5, 0.0]), pt(&[0.25, h / 2.0])])
}

/// Four corner maps of ratio 0.6 whose images overlap; only D2 fails.
pub fn overlap() -> PolyhedralSystem {
    scalings(
        Polyhedron::unit_square(),
        0.6,
        &[pt(&[0.0, 0.0]), pt(&[0.4, 0.0]), pt(&[0.4, 0.4]), pt(&[0.0, 0.4])],
    )
}

/// Three-dimensional Vicsek analogue: the eight corner cubes and the central cube.
pub fn vicsek3d() -> PolyhedralSystem {
    let t = 1.0 / 3.0;
    let mut ts = Vec::new();
    for &z in &[0.0, 2.0 * t] {
        for &(x, y) in &[(0.0, 0.0), (2.0 * t, 0.0), (2.0 * t, 2.0 * t), (0.0, 2.0 * t)] {
            ts.push(pt(&[x, y, z]));
        }
    }
    ts.push(pt(&[t, t, t]));
    scalings(Polyhedron::unit_cube(), t, &ts)
}

pub fn by_name(name: &str) -> Option<PolyhedralSystem> {
    match name {
        "interval" => Some(interval()),
        "vicsek" => Some(vicsek()),
        "gasket" => Some(gasket()),
        "overlap" => Some(overlap()),
        "vicsek3d" => Some(vicsek3d()),
        _ => None,
    }
}
