use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{classify_intersection, IntersectionClass, Point, Polyhedron};
use crate::validator::{build_incidence_graph, IncidenceGraph, IncidenceNode, PolyhedralSystem};

/// Level-1 pieces consecutively meeting in single points.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Chain {
    pub pieces: Vec<usize>,
    pub junctions: Vec<Point>,
}

fn pieces_containing(sys: &PolyhedralSystem, pieces: &[Polyhedron], x: &Point) -> Vec<IncidenceNode> {
    pieces
        .iter()
        .enumerate()
        .filter(|(_, q)| q.contains_point(x, sys.eps(q.diameter())))
        .map(|(i, _)| IncidenceNode::Piece(i))
        .collect()
}

fn chain_in(sys: &PolyhedralSystem, g: &IncidenceGraph, pieces: &[Polyhedron], x: &Point, y: &Point) -> Result<Chain> {
    let from = pieces_containing(sys, pieces, x);
    let to = pieces_containing(sys, pieces, y);
    let path = g.path(&from, &to).ok_or(Error::Unreachable)?;
    let mut chain = Chain {
        pieces: Vec::new(),
        junctions: Vec::new(),
    };
    for node in path {
        match node {
            IncidenceNode::Piece(i) => chain.pieces.push(i),
            IncidenceNode::Point(p) => chain.junctions.push(g.points[p].clone()),
        }
    }
    Ok(chain)
}

/// Path of pieces joining `x` and `y` in the incidence tree.
pub fn chain_between(sys: &PolyhedralSystem, x: &Point, y: &Point) -> Result<Chain> {
    let g = build_incidence_graph(sys)?;
    chain_in(sys, &g, &sys.pieces(), x, y)
}

/// One map `S_piece` of a component equation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ZipperMap {
    pub piece: usize,
    /// Vertex of P sent to the node where the sub-arc starts.
    pub entry: usize,
    /// Vertex of P sent to the node where the sub-arc ends.
    pub exit: usize,
    pub target: usize,
    /// 0 when the target's first endpoint goes to the entry node, 1 otherwise.
    pub signature: u8,
}

/// The arc `γ_ab` between vertices `A_a` and `A_b`, `a < b`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Component {
    pub endpoints: (usize, usize),
    pub maps: Vec<ZipperMap>,
    pub nodes: Vec<Point>,
    pub class: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Multizipper {
    pub components: Vec<Component>,
    pub class_count: usize,
}

impl Multizipper {
    pub fn component_index(&self, a: usize, b: usize) -> Option<usize> {
        let key = (a.min(b), a.max(b));
        self.components.iter().position(|c| c.endpoints == key)
    }

    /// The chain of component `(from, to)` traversed from `A_from`, as
    /// `(piece, entry, exit)` triples.
    pub fn oriented(&self, from: usize, to: usize) -> Vec<(usize, usize, usize)> {
        let c = &self.components[self.component_index(from, to).expect("component exists")];
        let fwd = c.maps.iter().map(|m| (m.piece, m.entry, m.exit));
        if from < to {
            fwd.collect()
        } else {
            fwd.rev().map(|(p, a, b)| (p, b, a)).collect()
        }
    }

    /// Directed graph of components: `u → v` when a map of `u` targets `v`.
    pub fn successors(&self) -> Vec<Vec<usize>> {
        self.components
            .iter()
            .map(|c| {
                let mut t: Vec<usize> = c.maps.iter().map(|m| m.target).collect();
                t.sort_unstable();
                t.dedup();
                t
            })
            .collect()
    }
}

pub fn build_multizipper(sys: &PolyhedralSystem) -> Result<Multizipper> {
    let g = build_incidence_graph(sys)?;
    let pieces = sys.pieces();
    let verts = sys.polyhedron().vertices();
    let n = verts.len();
    let mut pairs = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            pairs.push((a, b));
        }
    }
    let index: HashMap<(usize, usize), usize> = pairs.iter().enumerate().map(|(k, &p)| (p, k)).collect();

    let mut components = Vec::new();
    for &(a, b) in &pairs {
        let chain = chain_in(sys, &g, &pieces, &verts[a], &verts[b])?;
        let mut nodes = vec![verts[a].clone()];
        nodes.extend(chain.junctions.iter().cloned());
        nodes.push(verts[b].clone());
        let mut maps = Vec::new();
        for (k, &i) in chain.pieces.iter().enumerate() {
            let q = &pieces[i];
            let eps = sys.eps(q.diameter());
            let locate = |z: &Point| {
                q.vertex_index(z, eps).ok_or_else(|| Error::EntryNotAVertex {
                    piece: i,
                    junction: z.to_string(),
                })
            };
            let entry = locate(&nodes[k])?;
            let exit = locate(&nodes[k + 1])?;
            maps.push(ZipperMap {
                piece: i,
                entry,
                exit,
                target: index[&(entry.min(exit), entry.max(exit))],
                signature: u8::from(entry > exit),
            });
        }
        components.push(Component {
            endpoints: (a, b),
            maps,
            nodes,
            class: 0,
        });
    }
    let class_count = assign_classes(sys, &mut components);
    Ok(Multizipper {
        components,
        class_count,
    })
}

/// Coarsest partition of components that separates arcs with different
/// endpoint distances or map ratios and is stable under the component
/// equations (each map's target class).
fn assign_classes(sys: &PolyhedralSystem, components: &mut [Component]) -> usize {
    let verts = sys.polyhedron().vertices();
    let eps = sys.eps(sys.polyhedron().diameter());
    let mut lengths: Vec<f64> = Vec::new();
    let mut length_class = |d: f64| -> u64 {
        match lengths.iter().position(|&l| (l - d).abs() <= eps) {
            Some(k) => k as u64,
            None => {
                lengths.push(d);
                (lengths.len() - 1) as u64
            }
        }
    };
    let initial = components
        .iter()
        .map(|c| {
            let mut key = vec![length_class(verts[c.endpoints.0].dist(&verts[c.endpoints.1]))];
            key.extend(c.maps.iter().map(|m| sys.maps()[m.piece].ratio().to_bits()));
            (key, Vec::new())
        })
        .collect();
    let mut classes = renumber(initial);
    loop {
        let keyed = components
            .iter()
            .enumerate()
            .map(|(k, c)| {
                (
                    vec![classes[k] as u64],
                    c.maps.iter().map(|m| classes[m.target]).collect::<Vec<_>>(),
                )
            })
            .collect();
        let next = renumber(keyed);
        let stable = next.iter().max() == classes.iter().max();
        classes = next;
        if stable {
            break;
        }
    }
    for (c, k) in components.iter_mut().zip(&classes) {
        c.class = *k;
    }
    classes.iter().max().map_or(0, |m| m + 1)
}

fn renumber(keys: Vec<(Vec<u64>, Vec<usize>)>) -> Vec<usize> {
    let mut seen: Vec<&(Vec<u64>, Vec<usize>)> = Vec::new();
    keys.iter()
        .map(|k| match seen.iter().position(|s| *s == k) {
            Some(p) => p,
            None => {
                seen.push(k);
                seen.len() - 1
            }
        })
        .collect()
}

/// Pieces `k < l` of one component's chain that meet improperly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct JordanWitness {
    pub component: usize,
    pub k: usize,
    pub l: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct JordanCheck {
    pub holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<JordanWitness>,
}

/// Non-adjacent chain pieces must be disjoint and adjacent ones must share
/// exactly their common node.
pub fn verify_jordan_conditions(z: &Multizipper, sys: &PolyhedralSystem) -> JordanCheck {
    let pieces = sys.pieces();
    for (ci, c) in z.components.iter().enumerate() {
        for k in 0..c.maps.len() {
            for l in k + 1..c.maps.len() {
                let class = classify_intersection(&pieces[c.maps[k].piece], &pieces[c.maps[l].piece], sys.tolerance());
                let ok = match (l - k, class) {
                    (1, IntersectionClass::SharedVertex { point, .. }) => {
                        point.dist(&c.nodes[l]) <= sys.eps(sys.polyhedron().diameter())
                    }
                    (1, _) => false,
                    (_, class) => class == IntersectionClass::Disjoint,
                };
                if !ok {
                    return JordanCheck {
                        holds: false,
                        witness: Some(JordanWitness { component: ci, k, l }),
                    };
                }
            }
        }
    }
    JordanCheck {
        holds: true,
        witness: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::geometry::pt;

    const T: f64 = 1.0 / 3.0;

    fn close(a: &Point, b: &[f64]) -> bool {
        a.dist(&pt(b)) < 1e-12
    }

    #[test]
    fn vicsek_chains() {
        let v = catalog::vicsek();
        let c = chain_between(&v, &pt(&[0.0, 0.0]), &pt(&[1.0, 1.0])).unwrap();
        assert_eq!(c.pieces, vec![0, 4, 2]);
        assert!(close(&c.junctions[0], &[T, T]) && close(&c.junctions[1], &[2.0 * T, 2.0 * T]));
        let c = chain_between(&v, &pt(&[0.0, 0.0]), &pt(&[1.0, 0.0])).unwrap();
        assert_eq!(c.pieces, vec![0, 4, 1]);
        assert!(close(&c.junctions[1], &[2.0 * T, T]));
        let c = chain_between(&catalog::interval(), &pt(&[0.0]), &pt(&[1.0])).unwrap();
        assert_eq!(c.pieces, vec![0, 1]);
        assert!(close(&c.junctions[0], &[0.5]));
    }

    #[test]
    fn interval_zipper() {
        let z = build_multizipper(&catalog::interval()).unwrap();
        assert_eq!(z.components.len(), 1);
        let c = &z.components[0];
        assert_eq!(
            c.maps.iter().map(|m| (m.target, m.signature)).collect::<Vec<_>>(),
            vec![(0, 0), (0, 0)]
        );
        assert!(close(&c.nodes[1], &[0.5]));
    }

    #[test]
    fn vicsek_zipper_classes() {
        let z = build_multizipper(&catalog::vicsek()).unwrap();
        assert_eq!(z.components.len(), 6);
        assert_eq!(z.class_count, 2);
        let diag = &z.components[z.component_index(0, 2).unwrap()];
        let adj = &z.components[z.component_index(0, 1).unwrap()];
        assert_ne!(diag.class, adj.class);
        let is_diag = |t: usize| z.components[t].class == diag.class;
        assert!(diag.maps.iter().all(|m| is_diag(m.target)));
        assert_eq!(
            adj.maps.iter().map(|m| is_diag(m.target)).collect::<Vec<_>>(),
            vec![true, false, true]
        );
        // S_2 pulls ((2/3,1/3), (1,0)) back to (A_4, A_2)
        assert_eq!((adj.maps[2].entry, adj.maps[2].exit), (3, 1));
        assert_eq!(adj.maps[2].signature, 1);
        let expected = [[0.0, 0.0], [T, T], [2.0 * T, 2.0 * T], [1.0, 1.0]];
        assert!(diag.nodes.iter().zip(&expected).all(|(p, e)| close(p, e)));
    }

    #[test]
    fn component_equations_hold() {
        for sys in [catalog::vicsek(), catalog::interval()] {
            let z = build_multizipper(&sys).unwrap();
            let verts = sys.polyhedron().vertices();
            for c in &z.components {
                for (k, m) in c.maps.iter().enumerate() {
                    let (t0, t1) = z.components[m.target].endpoints;
                    let s = &sys.maps()[m.piece];
                    let (a, b) = (s.apply(&verts[t0]).unwrap(), s.apply(&verts[t1]).unwrap());
                    let (first, second) = if m.signature == 0 { (a, b) } else { (b, a) };
                    assert!(first.dist(&c.nodes[k]) < 1e-12 && second.dist(&c.nodes[k + 1]) < 1e-12);
                }
            }
        }
    }

    #[test]
    fn jordan_conditions() {
        let v = catalog::vicsek();
        assert!(verify_jordan_conditions(&build_multizipper(&v).unwrap(), &v).holds);
        let iv = catalog::interval();
        assert!(verify_jordan_conditions(&build_multizipper(&iv).unwrap(), &iv).holds);

        // a pinwheel of three gasket pieces: the first and the third touch
        let g = catalog::gasket();
        let map = |piece, target| ZipperMap {
            piece,
            entry: 0,
            exit: 1,
            target,
            signature: 0,
        };
        let broken = Multizipper {
            components: vec![Component {
                endpoints: (0, 1),
                maps: vec![map(0, 0), map(2, 0), map(1, 0)],
                nodes: vec![
                    pt(&[0.0, 0.0]),
                    pt(&[0.25, 3f64.sqrt() / 4.0]),
                    pt(&[0.75, 3f64.sqrt() / 4.0]),
                    pt(&[1.0, 0.0]),
                ],
                class: 0,
            }],
            class_count: 1,
        };
        let check = verify_jordan_conditions(&broken, &g);
        assert!(!check.holds);
        assert_eq!(
            check.witness,
            Some(JordanWitness {
                component: 0,
                k: 0,
                l: 2
            })
        );
    }
}
