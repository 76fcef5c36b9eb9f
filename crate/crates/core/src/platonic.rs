//! Symmetric states whose Majorana points form Platonic solids.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::majorana::{points_to_state, MajoranaPoints};
use crate::state::{BlochPoint, SymmetricState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlatonicSolid {
    Tetrahedron,
    Octahedron,
    Cube,
    Icosahedron,
    Dodecahedron,
}

impl PlatonicSolid {
    pub const ALL: [PlatonicSolid; 5] = [
        PlatonicSolid::Tetrahedron,
        PlatonicSolid::Octahedron,
        PlatonicSolid::Cube,
        PlatonicSolid::Icosahedron,
        PlatonicSolid::Dodecahedron,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PlatonicSolid::Tetrahedron => "tetrahedron",
            PlatonicSolid::Octahedron => "octahedron",
            PlatonicSolid::Cube => "cube",
            PlatonicSolid::Icosahedron => "icosahedron",
            PlatonicSolid::Dodecahedron => "dodecahedron",
        }
    }

    pub fn vertices(self) -> usize {
        match self {
            PlatonicSolid::Tetrahedron => 4,
            PlatonicSolid::Octahedron => 6,
            PlatonicSolid::Cube => 8,
            PlatonicSolid::Icosahedron => 12,
            PlatonicSolid::Dodecahedron => 20,
        }
    }

    /// The dual solid: vertices and face centres exchanged.
    pub fn dual(self) -> Self {
        match self {
            PlatonicSolid::Tetrahedron => PlatonicSolid::Tetrahedron,
            PlatonicSolid::Octahedron => PlatonicSolid::Cube,
            PlatonicSolid::Cube => PlatonicSolid::Octahedron,
            PlatonicSolid::Icosahedron => PlatonicSolid::Dodecahedron,
            PlatonicSolid::Dodecahedron => PlatonicSolid::Icosahedron,
        }
    }
}

impl fmt::Display for PlatonicSolid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PlatonicSolid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PlatonicSolid::ALL
            .into_iter()
            .find(|p| p.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::domain(format!("unknown Platonic solid '{s}'")))
    }
}

/// Vertices of the cube whose faces carry the octahedron state's Majorana points.
pub fn cube_vertices() -> Vec<BlochPoint> {
    let t = (1.0 / 3f64.sqrt()).acos();
    [t, PI - t]
        .into_iter()
        .flat_map(|theta| (0..4).map(move |r| BlochPoint::new(theta, FRAC_PI_2 * r as f64)))
        .collect()
}

pub fn platonic_state(solid: PlatonicSolid) -> SymmetricState {
    let s = |n: usize, terms: &[(usize, f64)]| {
        SymmetricState::from_sparse(n, terms).expect("catalog coefficients are valid")
    };
    match solid {
        PlatonicSolid::Tetrahedron => s(4, &[(0, 1.0 / 3f64.sqrt()), (3, (2.0f64 / 3.0).sqrt())]),
        PlatonicSolid::Octahedron => s(6, &[(1, 1.0), (5, 1.0)]),
        PlatonicSolid::Cube => points_to_state(&MajoranaPoints::new(cube_vertices()).expect("eight vertices")),
        PlatonicSolid::Icosahedron => s(12, &[(1, 7f64.sqrt()), (6, -(11f64.sqrt())), (11, -(7f64.sqrt()))]),
        PlatonicSolid::Dodecahedron => s(
            20,
            &[
                (0, 187f64.sqrt()),
                (5, 627f64.sqrt()),
                (10, 247f64.sqrt()),
                (15, -(627f64.sqrt())),
                (20, 187f64.sqrt()),
            ],
        ),
    }
}

/// Platonic state by name.
pub fn platonic_state_by_name(name: &str) -> Result<SymmetricState> {
    Ok(platonic_state(name.parse()?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::majorana::state_to_points;

    #[test]
    fn catalog_coefficients() {
        let t = platonic_state(PlatonicSolid::Tetrahedron);
        assert!((t.amp(0).re - 1.0 / 3f64.sqrt()).abs() < 1e-15);
        assert!((t.amp(3).re - (2.0f64 / 3.0).sqrt()).abs() < 1e-15);
        let i = platonic_state(PlatonicSolid::Icosahedron);
        assert!((i.amp(1).re - 7f64.sqrt() / 5.0).abs() < 1e-15);
        assert!((i.amp(6).re + 11f64.sqrt() / 5.0).abs() < 1e-15);
        let d = platonic_state(PlatonicSolid::Dodecahedron);
        assert_eq!(d.support(1e-12), vec![0, 5, 10, 15, 20]);
        assert!(platonic_state_by_name("hexagon").is_err());
        assert_eq!("Cube".parse::<PlatonicSolid>().unwrap(), PlatonicSolid::Cube);
    }

    #[test]
    fn majorana_points_are_regular() {
        // Each solid has a fixed nearest-neighbour angle and vertex valence.
        let cases = [
            (PlatonicSolid::Tetrahedron, (-1.0f64 / 3.0).acos(), 3),
            (PlatonicSolid::Octahedron, FRAC_PI_2, 4),
            (PlatonicSolid::Cube, (1.0f64 / 3.0).acos(), 3),
            (PlatonicSolid::Icosahedron, (1.0 / 5f64.sqrt()).acos(), 5),
            (PlatonicSolid::Dodecahedron, (5f64.sqrt() / 3.0).acos(), 3),
        ];
        for (solid, edge, valence) in cases {
            let pts = state_to_points(&platonic_state(solid)).unwrap();
            assert_eq!(pts.n(), solid.vertices());
            for p in pts.points() {
                let near = pts
                    .points()
                    .iter()
                    .filter(|q| (p.angle_to(q) - edge).abs() < 1e-7)
                    .count();
                assert_eq!(near, valence, "{solid}");
            }
        }
    }
}
