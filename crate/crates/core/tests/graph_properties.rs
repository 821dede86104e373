mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use taut_core::{automorphism_count, canonicalize, is_isomorphic, DecoratedGraph, Label};

/// Counts half-edge permutations that respect edges, markings, ψ powers and
/// induce a bijection of vertices preserving genus and κ.
fn brute_force_automorphisms(g: &DecoratedGraph) -> u64 {
    fn extend(g: &DecoratedGraph, partners: &[Option<usize>], image: &mut Vec<usize>, used: &mut Vec<bool>, vmap: &mut Vec<Option<usize>>) -> u64 {
        let h = image.len();
        if h == g.half_edges.len() {
            return 1;
        }
        let src = g.half_edges[h];
        let mut total = 0;
        for t in 0..g.half_edges.len() {
            let dst = g.half_edges[t];
            if used[t] || dst.psi != src.psi {
                continue;
            }
            match (src.label, dst.label) {
                (Label::External(a), Label::External(b)) if a == b => {}
                (Label::Internal(_), Label::Internal(_)) => {}
                _ => continue,
            }
            if let Some(p) = partners[h] {
                if p < h && partners[image[p]] != Some(t) {
                    continue;
                }
            }
            let (v, w) = (src.vertex, dst.vertex);
            let fresh = vmap[v].is_none();
            match vmap[v] {
                Some(x) if x != w => continue,
                None if vmap.contains(&Some(w)) || g.vertices[v] != g.vertices[w] => continue,
                _ => {}
            }
            vmap[v] = Some(w);
            used[t] = true;
            image.push(t);
            total += extend(g, partners, image, used, vmap);
            image.pop();
            used[t] = false;
            if fresh {
                vmap[v] = None;
            }
        }
        total
    }
    let partners = g.partners();
    extend(g, &partners, &mut Vec::new(), &mut vec![false; g.half_edges.len()], &mut vec![None; g.vertices.len()])
}

fn local_dimension_ok(g: &DecoratedGraph) -> bool {
    g.components().iter().all(|comp| comp.iter().map(|&v| g.vertex_dimension(v)).sum::<i64>() >= 0)
}

#[test]
fn automorphisms_of_known_graphs() {
    use taut_core::gwi::parse_graph;
    for (text, expected) in [
        ("<1 e0 e0>_0", 2),
        ("<e0 e0 e1>_0 <1 2 3 4 e1>_0", 2),
        ("<e0 e1 e2>_0 <e0 e1 e2>_0", 12),
        ("<e0 e0 e1 e1>_0", 8),
        ("<1 2 3 4>_0", 1),
        ("<e0>_1 <e0>_1", 2),
    ] {
        let g = parse_graph(text).unwrap();
        assert_eq!(automorphism_count(&g), expected, "{text}");
        assert_eq!(brute_force_automorphisms(&g), expected, "{text}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn automorphisms_match_brute_force(seed in any::<u64>()) {
        let g = common::seeded_graph(seed, 10, 2);
        prop_assert_eq!(automorphism_count(&g), brute_force_automorphisms(&g));
    }

    #[test]
    fn canonical_form_is_idempotent_and_orbit_constant(seed in any::<u64>(), shuffle in any::<u64>()) {
        let g = common::seeded_graph(seed, 12, 3);
        let c = canonicalize(&g);
        prop_assert_eq!(&canonicalize(&c), &c);
        let h = common::shuffled(&g, shuffle);
        prop_assert_eq!(&canonicalize(&h), &c);
        prop_assert!(is_isomorphic(&g, &h));
        prop_assert_eq!(g.dimension(), h.dimension());
        prop_assert_eq!(c.dimension(), g.dimension());
        prop_assert_eq!(automorphism_count(&h), automorphism_count(&g));
    }

    #[test]
    fn validity_is_stability_and_dimension(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = common::random_shape(&mut rng, 2);
        let stable = (0..g.vertices.len()).all(|v| 2 * g.vertices[v].genus as i64 - 2 + g.valence(v) as i64 > 0);
        prop_assert_eq!(g.is_valid(), stable && local_dimension_ok(&g));
    }

    #[test]
    fn relabeling_markings_changes_the_form_consistently(seed in any::<u64>()) {
        let g = common::seeded_graph(seed, 10, 2);
        let labels = g.external_labels();
        let map = labels.iter().map(|&l| (l, l + 10)).collect();
        let moved = g.relabel_external(&map);
        let back = labels.iter().map(|&l| (l + 10, l)).collect();
        prop_assert_eq!(canonicalize(&canonicalize(&moved).relabel_external(&back)), canonicalize(&g));
    }
}
