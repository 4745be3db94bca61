use crisis_leaders::concerns::{chi_square_independence, ContingencyTable};
use crisis_leaders::corpus::{normalize_text, PreprocessConfig};
use crisis_leaders::graph::{pagerank, PageRankConfig, RetweetGraph};
use proptest::prelude::*;

fn table(cells: &[Vec<u64>]) -> ContingencyTable {
    let rows = (0..cells.len()).map(|i| format!("r{i}")).collect();
    let cols = (0..cells[0].len()).map(|j| format!("c{j}")).collect();
    ContingencyTable::new(rows, cols, cells.to_vec()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pagerank_is_stochastic_and_relabel_invariant(
        edges in prop::collection::vec((0usize..12, 0usize..12, 1u64..4), 1..40)
    ) {
        let name = |i: usize| format!("u{i:02}");
        // Reverse the lexicographic order of handles to permute node indices.
        let renamed = |i: usize| format!("v{:02}", 11 - i);
        let g = RetweetGraph::from_edges((0..12).map(name), edges.iter().map(|&(a, b, w)| (name(a), name(b), w)));
        let h = RetweetGraph::from_edges((0..12).map(renamed), edges.iter().map(|&(a, b, w)| (renamed(a), renamed(b), w)));
        let cfg = PageRankConfig::default();
        let (pg, ph) = (pagerank(&g, &cfg).unwrap(), pagerank(&h, &cfg).unwrap());
        prop_assert!((pg.scores.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        for i in 0..12 {
            let a = pg.score_of(&name(i)).unwrap();
            let b = ph.score_of(&renamed(i)).unwrap();
            prop_assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn chi_square_scales_and_permutes(
        cells in prop::collection::vec(prop::collection::vec(1u64..50, 3), 3),
        m in 2u64..5,
    ) {
        let base = chi_square_independence(&table(&cells), 0.05).unwrap();
        let scaled: Vec<Vec<u64>> = cells.iter().map(|r| r.iter().map(|c| c * m).collect()).collect();
        let s = chi_square_independence(&table(&scaled), 0.05).unwrap();
        prop_assert!((s.statistic - m as f64 * base.statistic).abs() <= 1e-9 * s.statistic.max(1.0));
        let mut permuted = cells.clone();
        permuted.reverse();
        for r in &mut permuted {
            r.rotate_left(1);
        }
        let p = chi_square_independence(&table(&permuted), 0.05).unwrap();
        prop_assert!((p.statistic - base.statistic).abs() <= 1e-9 * base.statistic.max(1.0));
    }

    #[test]
    fn cleaning_is_idempotent(text in "[ -~😷]{0,80}") {
        let cfg = PreprocessConfig::default();
        let once = normalize_text(&text, &cfg);
        prop_assert_eq!(normalize_text(&once, &cfg), once);
    }
}
