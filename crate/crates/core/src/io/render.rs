use std::fmt::Write;

use crate::address::ExpansionLevel;
use crate::error::{Error, Result};
use crate::tree::TreeSkeleton;

const SIZE: f64 = 800.0;
const MARGIN: f64 = 20.0;
const BAR_HEIGHT: f64 = 24.0;

struct Frame {
    lo: Vec<f64>,
    scale: f64,
    dim: usize,
}

impl Frame {
    fn new(level: &ExpansionLevel) -> Self {
        let dim = level.entries[0].cylinder.dim();
        let mut lo = vec![f64::INFINITY; dim];
        let mut hi = vec![f64::NEG_INFINITY; dim];
        for e in &level.entries {
            let (l, h) = e.cylinder.bounding_box();
            for k in 0..dim {
                lo[k] = lo[k].min(l[k]);
                hi[k] = hi[k].max(h[k]);
            }
        }
        let span = (0..dim).map(|k| hi[k] - lo[k]).fold(0.0, f64::max);
        Frame {
            lo,
            scale: (SIZE - 2.0 * MARGIN) / span,
            dim,
        }
    }

    /// Screen coordinates, y pointing down.
    fn xy(&self, c: &[f64]) -> (f64, f64) {
        let x = MARGIN + (c[0] - self.lo[0]) * self.scale;
        let y = if self.dim == 1 {
            SIZE / 2.0
        } else {
            SIZE - MARGIN - (c[1] - self.lo[1]) * self.scale
        };
        (x, y)
    }
}

/// Deterministic SVG of an expansion with an optional skeleton overlay.
/// Intervals are drawn as bars; three-dimensional systems are refused.
pub fn render_svg(level: &ExpansionLevel, skeleton: Option<&TreeSkeleton>) -> Result<String> {
    let dim = level.entries.first().map_or(2, |e| e.cylinder.dim());
    if dim == 3 {
        return Err(Error::UnsupportedDimension(3));
    }
    let f = Frame::new(level);
    let mut s = String::new();
    let _ = writeln!(s, r##"<?xml version="1.0" encoding="UTF-8"?>"##);
    let _ = writeln!(
        s,
        r##"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"##
    );
    let _ = writeln!(
        s,
        r##"<g id="cylinders" fill="#dde6f0" stroke="#34495e" stroke-width="0.5">"##
    );
    for e in &level.entries {
        let v = e.cylinder.vertices();
        if dim == 1 {
            let (x0, y) = f.xy(v[0].coords());
            let (x1, _) = f.xy(v[1].coords());
            let _ = writeln!(
                s,
                r##"<rect x="{:.3}" y="{:.3}" width="{:.3}" height="{BAR_HEIGHT}"/>"##,
                x0.min(x1),
                y - BAR_HEIGHT / 2.0,
                (x1 - x0).abs()
            );
        } else {
            let pts: Vec<String> = v
                .iter()
                .map(|p| {
                    let (x, y) = f.xy(p.coords());
                    format!("{x:.3},{y:.3}")
                })
                .collect();
            let _ = writeln!(s, r##"<polygon points="{}"/>"##, pts.join(" "));
        }
    }
    let _ = writeln!(s, "</g>");
    if let Some(sk) = skeleton {
        let _ = writeln!(
            s,
            r##"<g id="skeleton" stroke="#c0392b" stroke-width="1.5" fill="none">"##
        );
        for e in &sk.edges {
            let (x0, y0) = f.xy(sk.nodes[e.a].coords());
            let (x1, y1) = f.xy(sk.nodes[e.b].coords());
            let _ = writeln!(s, r##"<polyline points="{x0:.3},{y0:.3} {x1:.3},{y1:.3}"/>"##);
        }
        let _ = writeln!(s, "</g>");
        let _ = writeln!(s, r##"<g id="nodes" font-family="sans-serif" font-size="9">"##);
        let degrees = sk.degrees();
        for (k, p) in sk.nodes.iter().enumerate() {
            let (x, y) = f.xy(p.coords());
            let _ = writeln!(s, r##"<circle cx="{x:.3}" cy="{y:.3}" r="2.5" fill="#c0392b"/>"##);
            let _ = writeln!(
                s,
                r##"<text x="{:.3}" y="{:.3}">{}</text>"##,
                x + 3.0,
                y - 3.0,
                degrees[k]
            );
        }
        let _ = writeln!(s, "</g>");
    }
    let _ = writeln!(s, "</svg>");
    Ok(s)
}

/// Wavefront-style polygon soup of every cylinder, one-based face indices.
pub fn export_obj(level: &ExpansionLevel) -> String {
    let mut s = String::new();
    let mut base = 1;
    for e in &level.entries {
        let _ = writeln!(s, "g {}", e.word);
        for v in e.cylinder.vertices() {
            let c = v.coords();
            let coord = |k: usize| c.get(k).copied().unwrap_or(0.0);
            let _ = writeln!(s, "v {:.9} {:.9} {:.9}", coord(0), coord(1), coord(2));
        }
        let faces: Vec<Vec<usize>> = if e.cylinder.faces().is_empty() {
            vec![(0..e.cylinder.vertex_count()).collect()]
        } else {
            e.cylinder.faces().to_vec()
        };
        for face in faces {
            let idx: Vec<String> = face.iter().map(|k| (k + base).to_string()).collect();
            let _ = writeln!(s, "f {}", idx.join(" "));
        }
        base += e.cylinder.vertex_count();
    }
    s
}
