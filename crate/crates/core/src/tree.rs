//! Parameter-space exploration as a p-ary disk tree.
//!
//! Starting from a root parameter disk, each node is first attacked with
//! the whole-disk classifier; nodes it cannot settle are split into their
//! p children (the depth-one subdisks) until a depth limit. Frontier nodes
//! sample a few member parameters pointwise. A node is colored black or
//! white only with a certificate in hand; it is gray only when it provably
//! contains parameters of both kinds; otherwise it stays unknown.

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::ball::{BallRadius, PadicBall};
use crate::dynamics::{ClassifyOptions, PcbVerdict};
use crate::error::{Error, Result};
use crate::family::{classify_disk, classify_parameter, DiskColor, DiskOptions, PolynomialFamily};
use crate::scalar::PadicScalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TreeColor {
    /// Certified: every parameter in the disk is post-critically bounded.
    Black,
    /// Certified: no parameter in the disk is post-critically bounded.
    White,
    /// Certified mixed: witnesses of both kinds exist in the disk.
    Gray,
    /// Not settled within budget.
    Unknown,
}

impl TreeColor {
    pub fn as_str(&self) -> &'static str {
        match self {
            TreeColor::Black => "black",
            TreeColor::White => "white",
            TreeColor::Gray => "gray",
            TreeColor::Unknown => "unknown",
        }
    }

    fn letter(&self) -> char {
        match self {
            TreeColor::Black => 'B',
            TreeColor::White => 'W',
            TreeColor::Gray => 'G',
            TreeColor::Unknown => 'U',
        }
    }
}

/// One explored disk. The label is the smallest non-negative residue of
/// the center modulo p^n (radius p^{-n}), matching how subdisks of the
/// unit disk are usually drawn; the disk itself is recoverable from the
/// label and the depth given the root disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeNode {
    pub label: String,
    pub depth: u32,
    pub color: TreeColor,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub certificate: Option<Value>,
    pub children: Vec<TreeNode>,
}

impl TreeNode {
    pub fn leaf_count(&self) -> u64 {
        if self.children.is_empty() {
            1
        } else {
            self.children.iter().map(|c| c.leaf_count()).sum()
        }
    }
}

/// Budgets for exploration. The per-node iteration budget grows with
/// depth as max(50, 2·depth) so deeper (smaller) disks, whose behavior
/// takes longer to develop, get proportionally more iterations.
#[derive(Debug, Clone, Copy)]
pub struct ExploreOptions {
    pub precision: u32,
    pub degree_cap: usize,
    /// Number of member parameters sampled at uncertified frontier nodes.
    pub frontier_samples: u64,
    /// Iteration budget for pointwise sampling.
    pub point_max_iter: u64,
}

impl Default for ExploreOptions {
    fn default() -> Self {
        ExploreOptions { precision: 128, degree_cap: 24, frontier_samples: 5, point_max_iter: 200 }
    }
}

fn node_budget(depth: u32) -> u64 {
    (2 * depth as u64).max(50)
}

fn radius_exponent(disk: &PadicBall) -> i64 {
    match disk.radius() {
        BallRadius::Exp(r) if r.is_integer() => r.to_integer(),
        _ => panic!("exploration needs disks with integer radius exponent"),
    }
}

fn power_of_p(prime: u64, n: i64) -> BigRational {
    let base = BigInt::from(prime);
    if n >= 0 {
        BigRational::from_integer(base.pow(n as u32))
    } else {
        BigRational::new(BigInt::from(1), base.pow((-n) as u32))
    }
}

struct Outcome {
    node: TreeNode,
    black_witness: Option<Value>,
    white_witness: Option<Value>,
}

fn sample_points(
    family: &PolynomialFamily,
    center: &PadicScalar,
    scale: &BigRational,
    opts: &ExploreOptions,
) -> (Option<Value>, Option<Value>) {
    let mut black = None;
    let mut white = None;
    let popts = ClassifyOptions { max_iter: opts.point_max_iter, precision: opts.precision };
    for j in 0..opts.frontier_samples {
        if black.is_some() && white.is_some() {
            break;
        }
        let offset = PadicScalar::exact(
            family.prime(),
            scale * BigRational::from_integer(BigInt::from(j)),
        );
        let Ok(t) = center.add(&offset) else { continue };
        let Ok(ans) = classify_parameter(family, &t, &popts) else { continue };
        match ans.verdict {
            PcbVerdict::Pcb if black.is_none() => {
                black = Some(json!({ "parameter": t.to_string() }));
            }
            PcbVerdict::NotPcb if white.is_none() => {
                white = Some(json!({ "parameter": t.to_string() }));
            }
            _ => {}
        }
    }
    (black, white)
}

fn explore_rec(
    family: &PolynomialFamily,
    disk: &PadicBall,
    depth: u32,
    max_depth: u32,
    opts: &ExploreOptions,
) -> Outcome {
    let reduced = disk.reduce_center();
    let label = reduced.center().to_string();
    let disk_opts = DiskOptions {
        max_iter: node_budget(depth),
        precision: opts.precision,
        degree_cap: opts.degree_cap,
    };
    let res = classify_disk(family, &reduced, &disk_opts);
    match res.color {
        DiskColor::Black => {
            let witness = Some(json!({ "disk": label }));
            return Outcome {
                node: TreeNode {
                    label,
                    depth,
                    color: TreeColor::Black,
                    certificate: res.certificate,
                    children: Vec::new(),
                },
                black_witness: witness,
                white_witness: None,
            };
        }
        DiskColor::White => {
            let witness = Some(json!({ "disk": label }));
            return Outcome {
                node: TreeNode {
                    label,
                    depth,
                    color: TreeColor::White,
                    certificate: res.certificate,
                    children: Vec::new(),
                },
                black_witness: None,
                white_witness: witness,
            };
        }
        DiskColor::Unknown => {}
    }

    let n = -radius_exponent(&reduced);
    if depth == max_depth {
        // frontier: sample member parameters for mixed-disk evidence
        let scale = power_of_p(family.prime(), n);
        let (black, white) = sample_points(family, reduced.center(), &scale, opts);
        let (color, certificate) = if black.is_some() && white.is_some() {
            (
                TreeColor::Gray,
                Some(json!({
                    "type": "mixed",
                    "pcb_witness": black.clone().unwrap(),
                    "not_pcb_witness": white.clone().unwrap(),
                })),
            )
        } else {
            (TreeColor::Unknown, None)
        };
        return Outcome {
            node: TreeNode { label, depth, color, certificate, children: Vec::new() },
            black_witness: black,
            white_witness: white,
        };
    }

    let step = power_of_p(family.prime(), n);
    let child_exp = -(n + 1);
    let p = family.prime();
    let outcomes: Vec<Outcome> = (0..p)
        .into_par_iter()
        .map(|j| {
            let offset = PadicScalar::exact(
                p,
                &step * BigRational::from_integer(BigInt::from(j)),
            );
            let center = reduced
                .center()
                .add(&offset)
                .expect("same-prime scalar addition cannot fail");
            let child = PadicBall::new(center, BallRadius::integer(child_exp));
            explore_rec(family, &child, depth + 1, max_depth, opts)
        })
        .collect();

    let mut black = None;
    let mut white = None;
    let mut children = Vec::with_capacity(outcomes.len());
    let mut all_black = true;
    let mut all_white = true;
    for o in outcomes {
        if black.is_none() {
            black = o.black_witness;
        }
        if white.is_none() {
            white = o.white_witness;
        }
        all_black &= o.node.color == TreeColor::Black;
        all_white &= o.node.color == TreeColor::White;
        children.push(o.node);
    }
    let (color, certificate) = if all_black {
        // the children partition this disk, so their certificates cover it
        (TreeColor::Black, Some(json!({ "type": "partition", "color": "black" })))
    } else if all_white {
        (TreeColor::White, Some(json!({ "type": "partition", "color": "white" })))
    } else if black.is_some() && white.is_some() {
        (
            TreeColor::Gray,
            Some(json!({
                "type": "mixed",
                "pcb_witness": black.clone().unwrap(),
                "not_pcb_witness": white.clone().unwrap(),
            })),
        )
    } else {
        (TreeColor::Unknown, None)
    };
    Outcome {
        node: TreeNode { label, depth, color, certificate, children },
        black_witness: black,
        white_witness: white,
    }
}

/// Explore a parameter disk to the given depth.
pub fn explore(
    family: &PolynomialFamily,
    root: &PadicBall,
    max_depth: u32,
    opts: &ExploreOptions,
) -> TreeNode {
    explore_rec(family, root, 0, max_depth, opts).node
}

/// Aggregate counts over a finished tree.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct TreeStats {
    pub total_nodes: u64,
    pub black: u64,
    pub white: u64,
    pub gray: u64,
    pub unknown: u64,
    pub max_depth: u32,
    /// (depth, number of nodes certified black or white at that depth)
    pub certified_by_depth: Vec<(u32, u64)>,
    /// Unknown nodes left at the deepest level.
    pub unresolved_frontier: u64,
}

pub fn tree_stats(root: &TreeNode) -> TreeStats {
    use std::collections::BTreeMap;
    let mut stats = TreeStats::default();
    let mut by_depth: BTreeMap<u32, u64> = BTreeMap::new();
    let mut stack = vec![root];
    while let Some(node) = stack.pop() {
        stats.total_nodes += 1;
        stats.max_depth = stats.max_depth.max(node.depth);
        match node.color {
            TreeColor::Black => stats.black += 1,
            TreeColor::White => stats.white += 1,
            TreeColor::Gray => stats.gray += 1,
            TreeColor::Unknown => stats.unknown += 1,
        }
        if matches!(node.color, TreeColor::Black | TreeColor::White) && node.children.is_empty() {
            *by_depth.entry(node.depth).or_default() += 1;
        }
        stack.extend(node.children.iter());
    }
    let mut unresolved = 0;
    let mut stack = vec![root];
    while let Some(node) = stack.pop() {
        if node.depth == stats.max_depth && node.color == TreeColor::Unknown {
            unresolved += 1;
        }
        stack.extend(node.children.iter());
    }
    stats.unresolved_frontier = unresolved;
    stats.certified_by_depth = by_depth.into_iter().collect();
    stats
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmitFormat {
    Ascii,
    Dot,
    Json,
}

impl std::str::FromStr for EmitFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ascii" => Ok(EmitFormat::Ascii),
            "dot" => Ok(EmitFormat::Dot),
            "json" => Ok(EmitFormat::Json),
            other => Err(Error::Parse(format!("unknown format '{other}' (expected ascii, dot, or json)"))),
        }
    }
}

fn emit_ascii(node: &TreeNode, out: &mut String) {
    for _ in 0..node.depth {
        out.push_str("  ");
    }
    out.push_str(&node.label);
    out.push_str(" [");
    out.push(node.color.letter());
    out.push_str("]\n");
    for c in &node.children {
        emit_ascii(c, out);
    }
}

fn dot_style(color: TreeColor) -> &'static str {
    match color {
        TreeColor::Black => "style=filled, fillcolor=black",
        TreeColor::White => "style=filled, fillcolor=white",
        TreeColor::Gray => "style=filled, fillcolor=gray",
        TreeColor::Unknown => "style=\"filled,diagonals\", fillcolor=lightgray",
    }
}

fn emit_dot(root: &TreeNode) -> String {
    // labels repeat across depths (e.g. "1" under "1"), so ids get a
    // depth suffix whenever a label is not globally unique
    use std::collections::HashMap;
    let mut counts: HashMap<&str, u32> = HashMap::new();
    let mut stack = vec![root];
    while let Some(n) = stack.pop() {
        *counts.entry(n.label.as_str()).or_default() += 1;
        stack.extend(n.children.iter());
    }
    let id_of = |n: &TreeNode| -> String {
        if counts[n.label.as_str()] == 1 {
            n.label.clone()
        } else {
            format!("{}@{}", n.label, n.depth)
        }
    };
    let mut out = String::from("digraph disks {\n  node [shape=circle];\n");
    fn walk(
        node: &TreeNode,
        id_of: &dyn Fn(&TreeNode) -> String,
        out: &mut String,
    ) {
        let id = id_of(node);
        if id == node.label {
            out.push_str(&format!("  \"{}\" [{}]\n", id, dot_style(node.color)));
        } else {
            out.push_str(&format!(
                "  \"{}\" [{}, label=\"{}\"]\n",
                id,
                dot_style(node.color),
                node.label
            ));
        }
        for c in &node.children {
            out.push_str(&format!("  \"{}\" -> \"{}\";\n", id, id_of(c)));
            walk(c, id_of, out);
        }
    }
    walk(root, &id_of, &mut out);
    out.push_str("}\n");
    out
}

/// Serialize a tree; byte-deterministic for a given tree.
pub fn emit(tree: &TreeNode, format: EmitFormat) -> String {
    match format {
        EmitFormat::Ascii => {
            let mut out = String::new();
            emit_ascii(tree, &mut out);
            out
        }
        EmitFormat::Dot => emit_dot(tree),
        EmitFormat::Json => {
            let mut s = serde_json::to_string_pretty(tree).expect("tree serialization");
            s.push('\n');
            s
        }
    }
}

/// Parse a tree from its JSON form; inverse of `emit(_, Json)`.
pub fn from_json(text: &str) -> Result<TreeNode> {
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("invalid tree JSON: {e}")))
}
