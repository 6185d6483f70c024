use serde::Serialize;

use super::skeleton::{MainTree, TreeSkeleton};
use crate::address::{addresses_of_point, vertex_angles, PointAddresses, DEFAULT_MAX_DEPTH};
use crate::error::{Error, Result};
use crate::geometry::{full_angle, Point};
use crate::validator::PolyhedralSystem;

pub const DEFAULT_STABILIZATION_DEPTH: usize = 12;

pub const BOUND_NOTE: &str = "paperBound uses (nP-1)(ceil(theta/thetaMin)-1) and can undercount \
(e.g. the interval midpoint); safeBound uses (nP-1)*floor(theta/thetaMin) and is the asserted bound";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PointClass {
    EndPoint,
    CutPoint,
    RamificationPoint,
}

impl PointClass {
    pub fn from_order(order: usize) -> Self {
        match order {
            0 | 1 => PointClass::EndPoint,
            2 => PointClass::CutPoint,
            _ => PointClass::RamificationPoint,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct OrderReport {
    pub point: Point,
    pub order_in_tree: usize,
    pub order_in_k: usize,
    pub paper_bound: usize,
    pub safe_bound: usize,
    pub classification: PointClass,
    /// Number of addresses; 1 off the vertex images.
    pub address_count: usize,
    pub vertex_image: bool,
    pub stable: bool,
    /// Depth at which the skeleton degree was last compared.
    pub stabilization_depth: usize,
    pub note: &'static str,
}

/// Computes orders at skeleton nodes, reusing skeletons across queries.
#[derive(Debug)]
pub struct OrderAnalyzer<'a> {
    sys: &'a PolyhedralSystem,
    tree: MainTree,
    skeletons: Vec<TreeSkeleton>,
    exhausted: bool,
    angles: Vec<f64>,
}

impl<'a> OrderAnalyzer<'a> {
    pub fn new(sys: &'a PolyhedralSystem) -> Result<Self> {
        Ok(OrderAnalyzer {
            sys,
            tree: MainTree::new(sys)?,
            skeletons: Vec::new(),
            exhausted: false,
            angles: vertex_angles(sys.polyhedron())?,
        })
    }

    pub fn main_tree(&self) -> &MainTree {
        &self.tree
    }

    /// Skeleton at depth `n`, or `None` past the piece budget.
    pub fn skeleton(&mut self, n: usize) -> Result<Option<&TreeSkeleton>> {
        while self.skeletons.len() <= n && !self.exhausted {
            match self.tree.skeleton(self.sys, self.skeletons.len()) {
                Ok(s) => self.skeletons.push(s),
                Err(Error::DepthTooLarge { .. }) => self.exhausted = true,
                Err(e) => return Err(e),
            }
        }
        Ok(self.skeletons.get(n))
    }

    fn degree_at(&mut self, x: &Point, n: usize) -> Result<Option<Option<usize>>> {
        let eps = self.sys.eps(self.sys.polyhedron().diameter());
        Ok(self.skeleton(n)?.map(|s| s.find_node(x, eps).map(|k| s.degree(k))))
    }

    /// First depth at which `x` is a node, and its degree once two consecutive
    /// depths agree.
    fn stable_degree(&mut self, x: &Point, n_stab: usize) -> Result<(usize, bool, usize)> {
        let mut prev: Option<usize> = None;
        for n in 0..=n_stab {
            match self.degree_at(x, n)? {
                None => break,
                Some(None) => continue,
                Some(Some(d)) => {
                    if prev == Some(d) {
                        return Ok((d, true, n));
                    }
                    prev = Some(d);
                }
            }
        }
        let last = self.skeletons.len().saturating_sub(1);
        match prev {
            Some(d) => Ok((d, false, last)),
            None => Err(Error::NotANode(n_stab.min(last))),
        }
    }

    pub fn point_order(&mut self, x: &Point, n_stab: usize) -> Result<OrderReport> {
        let sys = self.sys;
        if x.dim() != sys.dim() {
            return Err(Error::DimensionMismatch {
                expected: sys.dim(),
                actual: x.dim(),
            });
        }
        let (order_in_tree, stable, depth) = self.stable_degree(x, n_stab)?;
        let n_p = sys.polyhedron().vertex_count();
        let theta_min = self.angles.iter().copied().fold(f64::INFINITY, f64::min);
        let addresses: Option<PointAddresses> = match addresses_of_point(sys, x, DEFAULT_MAX_DEPTH) {
            Ok(a) => Some(a),
            Err(Error::NotAVertexPoint { .. }) => None,
            Err(e) => return Err(e),
        };
        let vertex = sys.polyhedron().vertex_index(x, sys.eps(sys.polyhedron().diameter()));
        let theta = vertex.map_or(full_angle(sys.dim()), |k| self.angles[k]);
        let ratio = theta / theta_min;
        let safe_bound = (n_p - 1) * (ratio * (1.0 + 1e-12)).floor() as usize;

        let (order_in_k, paper_bound, address_count) = match &addresses {
            None => (order_in_tree, n_p, 1),
            Some(a) => {
                let mut sum = 0;
                for b in &a.branches {
                    let v = &sys.polyhedron().vertices()[b.cycle_vertex];
                    let (d, _, _) = self.stable_degree(v, n_stab)?;
                    sum += d;
                }
                let ceil = (ratio * (1.0 - 1e-12)).ceil() as usize;
                (sum, (n_p - 1) * ceil.saturating_sub(1), a.count())
            }
        };
        Ok(OrderReport {
            point: x.clone(),
            order_in_tree,
            order_in_k,
            paper_bound,
            safe_bound,
            classification: PointClass::from_order(order_in_k),
            address_count,
            vertex_image: addresses.is_some(),
            stable,
            stabilization_depth: depth,
            note: BOUND_NOTE,
        })
    }

    /// Orders of every node of the depth-`n` skeleton.
    pub fn all_orders(&mut self, n: usize, n_stab: usize) -> Result<Vec<OrderReport>> {
        let nodes = match self.skeleton(n)? {
            Some(s) => s.nodes.clone(),
            None => {
                self.sys.check_budget(n)?;
                unreachable!("budget check fails whenever the skeleton is missing")
            }
        };
        nodes.iter().map(|x| self.point_order(x, n_stab.max(n + 1))).collect()
    }
}

pub fn point_order(sys: &PolyhedralSystem, x: &Point, n_stab: usize) -> Result<OrderReport> {
    OrderAnalyzer::new(sys)?.point_order(x, n_stab)
}
