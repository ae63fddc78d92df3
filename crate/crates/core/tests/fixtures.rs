mod common;

use std::collections::BTreeSet;

use cgel_core::format::{parse_corpus, serialize, FeatureKey, Style};
use cgel_core::grammar::{ConstituentGraph, FunctionBase};
use cgel_core::render::{bracket_balance, render_forest, RenderOptions};
use cgel_core::stats::CorpusStats;
use cgel_core::text::{check_headers, corrected_sentence, reconstruct_sent, reconstruct_text};
use cgel_core::validate::{validate, RuleCode, Severity, ValidateOptions};

use common::*;

#[test]
fn example_trees_are_canonical_and_round_trip() {
    let all = fixtures("trees");
    assert!(all.len() >= 15, "only {} fixtures", all.len());
    for (name, text) in &all {
        let tree = single_tree(text);
        let out = serialize(&tree, Style::Canonical);
        assert_eq!(&out, text, "{name} is not in canonical form");
        let again = single_tree(&out);
        assert!(tree.structurally_eq(&again), "{name} changed on round trip");
    }
}

#[test]
fn named_examples_are_present() {
    let names: BTreeSet<String> = fixtures("trees").into_iter().map(|(n, _)| n).collect();
    for required in [
        "wh-movement", "det-head", "relNP", "Etc", "doublegap", "subjaux", "delayed", "gapped1",
        "Flat", "120M", "LetItBe",
    ] {
        assert!(names.contains(required), "missing {required}");
    }
}

#[test]
fn example_trees_have_no_errors() {
    for (name, text) in fixtures("trees") {
        let (tree, graph) = graph_of(&text);
        let mut diags = validate(&graph, &ValidateOptions { strict_lexicon: true });
        diags.extend(check_headers(&tree, &graph));
        let errors: Vec<_> = diags.iter().filter(|d| d.is_error()).collect();
        assert!(errors.is_empty(), "{name}: {errors:?}");
        let warnings: Vec<RuleCode> = diags
            .iter()
            .filter(|d| d.severity == Severity::Warning)
            .map(|d| d.code)
            .collect();
        match name.as_str() {
            "doublegap" => assert_eq!(warnings, [RuleCode::R12, RuleCode::R12]),
            _ => assert!(warnings.is_empty(), "{name}: {warnings:?}"),
        }
    }
}

#[test]
fn negative_fixtures_stay_inside_their_entailment_sets() {
    let all = fixtures("negative");
    assert_eq!(all.len(), 14);
    for (name, text) in all {
        let (tree, graph) = graph_of(&text);
        let expect = tree.header("expect").expect("expect header");
        let allowed: BTreeSet<&str> = tree.header("entails").unwrap().split_whitespace().collect();
        let found: BTreeSet<&str> = validate(&graph, &ValidateOptions::default())
            .iter()
            .map(|d| d.code.as_str())
            .collect();
        assert_eq!(expect, name);
        assert!(found.contains(expect), "{name}: {found:?}");
        assert!(found.is_subset(&allowed), "{name}: {found:?} not within {allowed:?}");
    }
}

#[test]
fn wh_movement_fusion_edges() {
    let (_, graph) = wh_movement();
    let edges: Vec<(String, String, FunctionBase)> = graph
        .fused_nodes()
        .map(|n| {
            let e = n.fused_parent.unwrap();
            (n.path.to_string(), graph.node(e.parent).path.to_string(), e.role)
        })
        .collect();
    assert_eq!(
        edges,
        [
            (
                "/Head[1]/Subj[0]/Head[0]/Det-Head[0]".to_string(),
                "/Head[1]/Subj[0]".to_string(),
                FunctionBase::Det
            ),
            (
                "/Head[1]/Head[1]/PredComp[1]/Head[0]/Mod[0]/Head-Prenucleus[0]".to_string(),
                "/Head[1]/Head[1]/PredComp[1]/Head[0]".to_string(),
                FunctionBase::Head
            ),
        ]
    );
}

#[test]
fn layered_det_head_takes_the_nearest_nom() {
    let (_, graph) = graph_of(&fixture("trees", "fused-2postmods"));
    let fused: Vec<_> = graph.fused_nodes().collect();
    assert_eq!(fused.len(), 1);
    let parent = graph.node(fused[0].fused_parent.unwrap().parent);
    assert_eq!(parent.category_token, "Nom");
    assert_eq!(fused[0].depth - parent.depth, 2);
}

#[test]
fn sent_headers_match_reconstruction() {
    for (name, text) in fixtures("trees") {
        let (tree, graph) = graph_of(&text);
        let header = tree.header("sent").expect("sent header");
        assert_eq!(
            reconstruct_sent(&graph).to_lowercase(),
            header.to_lowercase(),
            "{name}"
        );
        let squash = |s: &str| s.split_whitespace().collect::<String>().to_lowercase();
        assert_eq!(
            squash(&reconstruct_text(&graph).text),
            squash(tree.header("text").unwrap()),
            "{name}"
        );
    }
}

#[test]
fn sent_token_count_oracle() {
    // Independent count from the raw tree: one token per leaf that is a gap
    // or carries :t or a non-empty :correct.
    for (name, text) in fixtures("trees") {
        let (tree, graph) = graph_of(&text);
        let expected = raw_leaves(&tree.root)
            .into_iter()
            .filter(|l| {
                l.category == "GAP"
                    || l.feature(FeatureKey::T).is_some()
                    || l.feature(FeatureKey::Correct).is_some_and(|c| !c.is_empty())
            })
            .count();
        assert_eq!(reconstruct_sent(&graph).split(' ').count(), expected, "{name}");
        assert!(!corrected_sentence(&graph).contains("--"));
    }
}

#[test]
fn header_mismatches_are_reported() {
    let text = fixture("trees", "wh-movement");
    let dropped = text.replace("# sent = is that -- what", "# sent = is that what");
    let (tree, graph) = graph_of(&dropped);
    let diags = check_headers(&tree, &graph);
    assert_eq!(diags.iter().map(|d| d.code).collect::<Vec<_>>(), [RuleCode::H1]);

    let shouting = text.replace(
        "# text = Is that what you call WH-movement?",
        "# text = IS THAT WHAT YOU CALL WH-MOVEMENT?",
    );
    let (tree, graph) = graph_of(&shouting);
    assert!(check_headers(&tree, &graph).is_empty());
}

#[test]
fn wh_movement_render_matches_golden() {
    let (_, graph) = wh_movement();
    let out = render_forest(&graph, &RenderOptions::default()).unwrap();
    let golden = include_str!("golden/wh-movement.tex");
    assert_eq!(out, golden);
    assert_eq!(out.matches("no edge").count(), 2);
    assert_eq!(out.matches("before drawing tree={x+=").count(), 2);
    assert_eq!(out.matches("\\draw[-]").count(), 4);
    assert_eq!(bracket_balance(&out), (0, 0));
}

#[test]
fn every_fixture_renders_balanced() {
    for (name, text) in fixtures("trees") {
        let (_, graph) = graph_of(&text);
        let fused = graph.fused_nodes().count();
        for collapse_depth in [None, Some(2)] {
            let options = RenderOptions {
                collapse_depth,
                preamble: true,
                ..RenderOptions::default()
            };
            let out = render_forest(&graph, &options).unwrap();
            assert_eq!(bracket_balance(&out), (0, 0), "{name}");
            if collapse_depth.is_none() {
                assert_eq!(out.matches(", no edge").count(), fused, "{name}");
                assert_eq!(out.matches("\\draw[-]").count(), 2 * fused, "{name}");
            }
        }
    }
}

#[test]
fn draw_anchor_length_is_the_tree_distance() {
    for (name, text) in fixtures("trees") {
        let (tree, graph) = graph_of(&text);
        let plan = cgel_core::render::plan_render(&graph, &RenderOptions::default()).unwrap();
        for placement in &plan.fused {
            let node = graph.node(placement.node);
            let target = node.fused_parent.unwrap().parent;
            let distance = graph.ancestors(node.id).position(|a| a == target).unwrap() + 1;
            assert_eq!(placement.anchors[0].len(), distance + 1, "{name}");
        }
        assert_eq!(plan.fused.len(), raw_fused_count(&tree.root), "{name}");
    }
}

#[test]
fn stats_agree_with_raw_counts() {
    let mut total = CorpusStats::default();
    let (mut fused, mut gaps) = (0, 0);
    for (_, text) in fixtures("trees") {
        let trees = parse_corpus(&text).unwrap();
        for tree in &trees {
            total.add_graph(&ConstituentGraph::from_tree(tree));
            fused += raw_fused_count(&tree.root);
            gaps += raw_gap_count(&tree.root);
        }
    }
    assert_eq!(total.fused, fused);
    assert_eq!(total.gaps, gaps);
    assert_eq!(total.categories.values().sum::<usize>(), total.nodes);
}
