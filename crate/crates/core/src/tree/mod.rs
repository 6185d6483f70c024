//! The main tree: the union of the arcs in the attractor joining the vertices
//! of P, built as the attractor of a multizipper whose components are those
//! arcs.

mod order;
mod skeleton;
mod zipper;

pub use order::{point_order, OrderAnalyzer, OrderReport, PointClass, BOUND_NOTE, DEFAULT_STABILIZATION_DEPTH};
pub use skeleton::{
    arc_contains, arc_position, build_main_tree, median, tree_skeleton, MainTree, Median, SkeletonEdge,
    SqueezeViolation, TreeSkeleton,
};
pub use zipper::{
    build_multizipper, chain_between, verify_jordan_conditions, Chain, Component, JordanCheck, JordanWitness,
    Multizipper, ZipperMap,
};
