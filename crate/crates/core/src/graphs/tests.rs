use super::*;

fn brute_cartesian(g: &Graph, a: (usize, usize), b: (usize, usize)) -> bool {
    let ((i, c), (j, d)) = (a, b);
    (g.is_edge(i, j) && c == d) || (i == j && c != d)
}

fn brute_star(g: &Graph, a: (usize, usize), b: (usize, usize)) -> bool {
    let ((c, i), (d, j)) = (a, b);
    (c != d && i == j) || (c == d && i != j) || (c != d && g.is_edge(i, j))
}

fn small_graphs() -> Vec<Graph> {
    let mut out = Vec::new();
    for n in 1..=4usize {
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .collect();
        for mask in 0u32..(1 << pairs.len()) {
            let e: Vec<_> = pairs
                .iter()
                .enumerate()
                .filter(|(b, _)| mask >> b & 1 == 1)
                .map(|(_, &p)| p)
                .collect();
            out.push(Graph::from_edges(n, &e).unwrap());
        }
    }
    out
}

#[test]
fn products_match_definitions_exhaustively() {
    for g in small_graphs() {
        let n = g.n();
        for k in 1..=3 {
            let cp = g.cartesian_product(k);
            let sp = g.star_product(k);
            assert_eq!(cp.n(), n * k);
            assert_eq!(sp.n(), n * k);
            for i in 0..n {
                for c in 0..k {
                    for j in 0..n {
                        for d in 0..k {
                            if (i, c) == (j, d) {
                                continue;
                            }
                            assert_eq!(
                                cp.is_edge(i * k + c, j * k + d),
                                brute_cartesian(&g, (i, c), (j, d))
                            );
                            assert_eq!(
                                sp.is_edge(i * k + c, j * k + d),
                                brute_star(&g, (c, i), (d, j))
                            );
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn cartesian_examples() {
    let c4 = Graph::complete(2).cartesian_product(2);
    assert_eq!(c4.edge_count(), 4);
    assert!(c4.neighbors(0).len() == 2 && (0..4).all(|v| c4.neighbors(v).len() == 2));
    assert_eq!(Graph::complete(3).cartesian_product(3).edge_count(), 18);
    let c5 = Graph::cycle(5);
    assert_eq!(c5.cartesian_product(1), c5);
}

#[test]
fn star_examples() {
    let g = Graph::cycle(5);
    assert_eq!(g.star_product(1), Graph::complete(5));
    assert_eq!(Graph::empty(1).star_product(2), Graph::complete(2));
    assert_eq!(Graph::complete(2).star_product(2), Graph::complete(4));
}

#[test]
fn c5_is_self_complementary() {
    let c = Graph::cycle(5).complement();
    // the complement of C5 is the cycle 0-2-4-1-3
    let relabel = [0usize, 2, 4, 1, 3];
    for i in 0..5 {
        assert!(c.is_edge(relabel[i], relabel[(i + 1) % 5]));
    }
    assert_eq!(c.edge_count(), 5);
}

#[test]
fn clique_examples() {
    let m = maximal_cliques(&Graph::cycle(5), DEFAULT_CLIQUE_CAP).unwrap();
    assert_eq!(
        m.cliques,
        vec![vec![0, 1], vec![0, 4], vec![1, 2], vec![2, 3], vec![3, 4]]
    );
    let all = all_cliques(&Graph::complete(4), 4, DEFAULT_CLIQUE_CAP).unwrap();
    assert_eq!(all.len(), 15);
    assert!(all.cliques.iter().all(|c| Graph::complete(4).is_clique(c)));
    assert!(matches!(
        all_cliques(&Graph::complete(4), 4, 10),
        Err(crate::Error::Resource { cap: 10, .. })
    ));
}

#[test]
fn maximal_cliques_agree_with_brute_force() {
    for g in small_graphs() {
        let n = g.n();
        let mut brute = Vec::new();
        for mask in 1u32..(1 << n) {
            let s: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
            if !g.is_clique(&s) {
                continue;
            }
            let maximal = (0..n).all(|v| s.contains(&v) || !s.iter().all(|&u| g.is_edge(u, v)));
            if maximal {
                brute.push(s);
            }
        }
        brute.sort();
        assert_eq!(
            maximal_cliques(&g, DEFAULT_CLIQUE_CAP).unwrap().cliques,
            brute
        );
    }
}

#[test]
fn exact_parameters_of_small_graphs() {
    assert_eq!(Graph::cycle(5).stability_number(), 2);
    assert_eq!(Graph::cycle(5).chromatic_number(), 3);
    assert_eq!(Graph::complete(4).chromatic_number(), 4);
    assert_eq!(Graph::empty(4).stability_number(), 4);
    let g = Graph::cycle(7);
    assert!(g.is_coloring(&g.greedy_coloring()));
    assert!(g.is_stable(&g.greedy_stable_set()));
}

#[test]
fn dimacs_and_json_round_trip() {
    let g = Graph::cycle(5);
    assert_eq!(parse_dimacs(&to_dimacs(&g)).unwrap(), g);
    assert_eq!(parse_json(&to_json(&g)).unwrap(), g);
    assert_eq!(
        parse_graph("c comment\np edge 3 1\ne 1 3\n")
            .unwrap()
            .edges(),
        vec![(0, 2)]
    );
}

#[test]
fn parsers_reject_loops_and_duplicates_with_positions() {
    match parse_dimacs("p edge 3 2\ne 1 2\ne 2 1\n") {
        Err(crate::Error::Parse { line, .. }) => assert_eq!(line, 3),
        other => panic!("{other:?}"),
    }
    match parse_dimacs("p edge 3 1\ne 2 2\n") {
        Err(crate::Error::Parse { line, .. }) => assert_eq!(line, 2),
        other => panic!("{other:?}"),
    }
    match parse_json(r#"{"n": 3, "edges": [[0, 1], [1, 1]]}"#) {
        Err(crate::Error::Parse { message, .. }) => assert!(message.contains("edges[1]")),
        other => panic!("{other:?}"),
    }
    assert!(parse_json(r#"{"n": 3, "edges": [[0, 1], [1, 0]]}"#).is_err());
}
