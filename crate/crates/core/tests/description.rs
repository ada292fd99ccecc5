mod oracles;

use std::collections::BTreeSet;

use graph_instruct_core::description::{
    boilerplate_cost, DescriptionRenderer, DescriptionTemplate, TargetField,
};
use graph_instruct_core::energy::{compute_energies, LogBase};
use graph_instruct_core::graph::{AttributedGraph, GraphBuilder, Node, NodeIx, Traversal};
use graph_instruct_core::selection::{select_for_target, KeyNeighborSet, SelectionConfig};
use graph_instruct_core::tokenize::{count_tokens, TokenizerConfig};

struct Parsed {
    ego: BTreeSet<String>,
    one_hop: Vec<String>,
    walks: Vec<Vec<(String, String)>>,
}

fn between<'a>(text: &'a str, header: &str) -> &'a str {
    let start = text.find(&format!("{header}: {{")).unwrap() + header.len() + 3;
    let end = start + text[start..].find("}.").unwrap();
    &text[start..end]
}

/// Recovers the sections of a rendered description. Names must not contain
/// `,`, `;`, `[`, `]` or relation names.
fn parse(text: &str, target_name: &str, relations: &[String]) -> Parsed {
    let mut ego = BTreeSet::new();
    let body = between(text, "Ego graph nodes");
    if !body.is_empty() {
        for group in body.split("; ") {
            let list = &group[group.find('[').unwrap() + 1..group.len() - 1];
            ego.extend(list.split(", ").map(str::to_string));
        }
    }
    let body = between(text, "One-hop neighbors");
    let one_hop = if body.is_empty() {
        vec![]
    } else {
        body.split(", ").map(str::to_string).collect()
    };
    let body = between(text, "Random walks");
    let mut walks = Vec::new();
    let mut k = 1;
    let mut rest = body;
    while !rest.is_empty() {
        let prefix = format!("{k}. {target_name}");
        assert!(rest.starts_with(&prefix), "walk {k} in {rest:?}");
        rest = &rest[prefix.len()..];
        let end = rest
            .find(&format!(". {}. ", k + 1))
            .unwrap_or(rest.len() - 1);
        let mut walk_text = &rest[..end];
        rest = rest[end + 1..].trim_start();
        let mut steps = Vec::new();
        while !walk_text.is_empty() {
            let (rel, after) = relations
                .iter()
                .filter_map(|r| {
                    walk_text
                        .strip_prefix(&format!(" {r} "))
                        .map(|a| (r.clone(), a))
                })
                .next()
                .unwrap();
            let next = relations
                .iter()
                .filter_map(|r| after.find(&format!(" {r} ")))
                .min()
                .unwrap_or(after.len());
            steps.push((rel, after[..next].to_string()));
            walk_text = &after[next..];
        }
        walks.push(steps);
        k += 1;
    }
    Parsed {
        ego,
        one_hop,
        walks,
    }
}

#[test]
fn rendered_text_round_trips_to_the_selection() {
    let tok = TokenizerConfig::default();
    let tmpl = DescriptionTemplate::title_abstract();
    let mut walks_seen = 0;
    for case in 0..60u64 {
        let g = oracles::random_graph(3000 + case, 30);
        let e = compute_energies(&g, &tok, LogBase::E);
        let r = DescriptionRenderer::new(&g, &tmpl, &tok);
        let name = |n: NodeIx| g.node(n).attribute("title").unwrap().to_string();
        for t in g.node_ids() {
            let cfg = SelectionConfig {
                rng_seed: case,
                ..Default::default()
            };
            let sel = select_for_target(&r, &e, t, 400, &cfg).unwrap();
            let d = r.render(t, &sel.neighbors, &sel.walks).unwrap();
            let p = parse(&d.text, &name(t), g.relations());
            let want_hop: Vec<String> = sel.neighbors.members.iter().map(|m| name(m.0)).collect();
            assert_eq!(p.one_hop, want_hop);
            let want_walks: Vec<Vec<(String, String)>> = sel
                .walks
                .iter()
                .map(|w| {
                    w.steps
                        .iter()
                        .map(|&(rel, n)| (g.relation_name(rel).to_string(), name(n)))
                        .collect()
                })
                .collect();
            assert_eq!(p.walks, want_walks);
            let mut want_ego: BTreeSet<String> = want_hop.into_iter().collect();
            want_ego.extend(want_walks.iter().flatten().map(|s| s.1.clone()));
            assert_eq!(p.ego, want_ego);
            walks_seen += sel.walks.len();
        }
    }
    assert!(walks_seen > 100, "fixture too sparse: {walks_seen} walks");
}

fn small() -> AttributedGraph {
    let mut b = GraphBuilder::new("small");
    b.add_node(
        Node::new("p", "PAPER")
            .with_attribute("title", "Graph Tuning")
            .with_attribute("abstract", "We tune."),
    )
    .unwrap();
    b.add_node(
        Node::new("q", "PAPER")
            .with_attribute("title", "Walks")
            .with_attribute("abstract", ""),
    )
    .unwrap();
    b.add_edge("p", "q", "CITES", false).unwrap();
    b.build(Traversal::Undirected)
}

#[test]
fn empty_selection_costs_the_boilerplate() {
    let g = small();
    let tok = TokenizerConfig::default();
    let tmpl = DescriptionTemplate::title_abstract();
    let r = DescriptionRenderer::new(&g, &tmpl, &tok);
    let p = g.lookup("p").unwrap();
    let empty = KeyNeighborSet {
        target: p,
        members: vec![],
        token_cost: 0,
    };
    let d = r.render(p, &empty, &[]).unwrap();
    assert_eq!(
        d.text,
        "The compact graph description of this PAPER is listed as follows: Title: Graph Tuning. \
         Abstract: We tune. Ego graph nodes: {}. One-hop neighbors: {}. Random walks: {}."
    );
    assert_eq!(d.token_count, boilerplate_cost(&tmpl, p, &g, &tok).unwrap());
    assert_eq!(d.token_count, count_tokens(&d.text, &tok));
}

#[test]
fn header_word_adds_one_token() {
    let g = small();
    let tok = TokenizerConfig::default();
    let p = g.lookup("p").unwrap();
    let base = DescriptionTemplate::title_abstract();
    let mut longer = base.clone();
    longer.walks_header = "Random graph walks".into();
    assert_eq!(
        boilerplate_cost(&longer, p, &g, &tok).unwrap(),
        boilerplate_cost(&base, p, &g, &tok).unwrap() + 1
    );
}

#[test]
fn headers_only_template_counts_headers() {
    let mut b = GraphBuilder::new("bare");
    b.add_node(Node::new("x", "PAPER")).unwrap();
    let g = b.build(Traversal::Undirected);
    let tok = TokenizerConfig::default();
    let tmpl = DescriptionTemplate {
        preamble: String::new(),
        target_fields: vec![],
        ..Default::default()
    };
    let x = g.lookup("x").unwrap();
    // Ego graph nodes : { } . / One - hop neighbors : { } . / Random walks : { } .
    assert_eq!(boilerplate_cost(&tmpl, x, &g, &tok).unwrap(), 7 + 8 + 6);
}

#[test]
fn missing_attribute_names_node_and_field() {
    let g = small();
    let tok = TokenizerConfig::default();
    let mut tmpl = DescriptionTemplate::title_abstract();
    tmpl.target_fields.push(TargetField {
        label: "Venue".into(),
        attribute: "venue".into(),
    });
    let err = boilerplate_cost(&tmpl, g.lookup("q").unwrap(), &g, &tok).unwrap_err();
    let msg = err.to_string();
    assert!(msg.contains("`q`") && msg.contains("`venue`"), "{msg}");
}
