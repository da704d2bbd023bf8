//! Property tests for tree emission and statistics, plus a real
//! exploration determinism check.

use padicmandel::{
    emit, explore, from_json, tree_stats, BallRadius, EmitFormat, ExploreOptions, PadicBall,
    PadicScalar, PolynomialFamily, TreeColor, TreeNode,
};
use proptest::prelude::*;

fn color() -> impl Strategy<Value = TreeColor> {
    prop_oneof![
        Just(TreeColor::Black),
        Just(TreeColor::White),
        Just(TreeColor::Gray),
        Just(TreeColor::Unknown),
    ]
}

fn node(depth: u32) -> BoxedStrategy<TreeNode> {
    let leaf = ("[0-9]{1,6}", color()).prop_map(move |(label, color)| TreeNode {
        label,
        depth,
        color,
        certificate: None,
        children: Vec::new(),
    });
    if depth >= 3 {
        return leaf.boxed();
    }
    (
        "[0-9]{1,6}",
        color(),
        proptest::collection::vec(node(depth + 1), 0..=2),
    )
        .prop_map(move |(label, color, children)| TreeNode {
            label,
            depth,
            color,
            certificate: None,
            children,
        })
        .boxed()
}

fn count(node: &TreeNode) -> u64 {
    1 + node.children.iter().map(count).sum::<u64>()
}

fn certified_leaves(node: &TreeNode) -> u64 {
    let here = u64::from(
        node.children.is_empty()
            && matches!(node.color, TreeColor::Black | TreeColor::White),
    );
    here + node.children.iter().map(certified_leaves).sum::<u64>()
}

proptest! {
    #[test]
    fn json_roundtrip_is_identity(tree in node(0)) {
        let text = emit(&tree, EmitFormat::Json);
        let back = from_json(&text).unwrap();
        prop_assert_eq!(back, tree);
    }

    #[test]
    fn stats_partition_the_nodes(tree in node(0)) {
        let stats = tree_stats(&tree);
        prop_assert_eq!(stats.total_nodes, count(&tree));
        prop_assert_eq!(
            stats.black + stats.white + stats.gray + stats.unknown,
            stats.total_nodes
        );
        let certified: u64 = stats.certified_by_depth.iter().map(|&(_, n)| n).sum();
        prop_assert_eq!(certified, certified_leaves(&tree));
    }

    #[test]
    fn ascii_emits_one_line_per_node(tree in node(0)) {
        let text = emit(&tree, EmitFormat::Ascii);
        prop_assert_eq!(text.lines().count() as u64, count(&tree));
    }

    #[test]
    fn dot_output_is_structurally_balanced(tree in node(0)) {
        let text = emit(&tree, EmitFormat::Dot);
        prop_assert!(text.starts_with("digraph"));
        prop_assert_eq!(
            text.matches('{').count(),
            text.matches('}').count()
        );
        // one node statement per tree node, each carrying a fill style
        prop_assert_eq!(
            text.lines().filter(|l| l.contains("fillcolor=")).count() as u64,
            count(&tree)
        );
    }
}

#[test]
fn exploration_is_deterministic_and_roundtrips() {
    let family = PolynomialFamily::cubic2();
    // a White ladder disk: certifies at the root, so this stays cheap
    let root = PadicBall::new(PadicScalar::from_ratio(2, 17, 1), BallRadius::integer(-5));
    let opts = ExploreOptions::default();
    let first = explore(&family, &root, 2, &opts);
    let second = explore(&family, &root, 2, &opts);
    assert_eq!(first, second);
    assert_eq!(first.color, TreeColor::White);
    assert_eq!(
        emit(&first, EmitFormat::Json),
        emit(&second, EmitFormat::Json)
    );
    let parsed = from_json(&emit(&first, EmitFormat::Json)).unwrap();
    assert_eq!(parsed, first);
}
