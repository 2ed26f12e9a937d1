use axisprobe::axis::{build_axis, AxisSpec, PoleSpec};
use axisprobe::embedding::SubwordTable;
use axisprobe::lexicon::{intersect_with_model, LexiconKind, SentimentLexicon};
use axisprobe::stats::{pearson, spearman};
use axisprobe::{EmbeddingModel, Fallback};
use proptest::prelude::*;

fn non_constant(v: &[f64]) -> bool {
    v.iter().any(|&x| x != v[0])
}

fn paired(max: usize) -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (3..max).prop_flat_map(|n| {
        (
            prop::collection::vec(-100.0..100.0f64, n),
            prop::collection::vec(-100.0..100.0f64, n),
        )
    })
}

fn model(words: usize, dim: usize) -> impl Strategy<Value = EmbeddingModel> {
    prop::collection::vec(-1.0f32..1.0, words * dim)
        .prop_filter("rows need length", move |v| {
            v.chunks(dim).all(|r| r.iter().map(|x| x * x).sum::<f32>() > 1e-3)
        })
        .prop_map(move |v| {
            let names = (0..words).map(|i| format!("w{i}")).collect();
            EmbeddingModel::from_rows("p", dim, names, v).unwrap()
        })
}

proptest! {
    #[test]
    fn spearman_is_symmetric((x, y) in paired(40)) {
        prop_assume!(non_constant(&x) && non_constant(&y));
        let a = spearman(&x, &y).unwrap().coefficient;
        let b = spearman(&y, &x).unwrap().coefficient;
        prop_assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn spearman_ignores_monotone_maps((x, y) in paired(40)) {
        prop_assume!(non_constant(&x) && non_constant(&y));
        let a = spearman(&x, &y).unwrap().coefficient;
        let fx: Vec<f64> = x.iter().map(|v| (v / 50.0).exp() * 3.0 + 1.0).collect();
        prop_assume!(non_constant(&fx));
        let b = spearman(&fx, &y).unwrap().coefficient;
        prop_assert!((a - b).abs() < 1e-12, "{} vs {}", a, b);
    }

    #[test]
    fn pearson_affine_invariant((x, y) in paired(40), scale in 0.1..10.0f64, shift in -5.0..5.0f64) {
        prop_assume!(non_constant(&x) && non_constant(&y));
        let a = pearson(&x, &y).unwrap().coefficient;
        let sx: Vec<f64> = x.iter().map(|v| v * scale + shift).collect();
        let b = pearson(&sx, &y).unwrap().coefficient;
        prop_assert!((a - b).abs() < 1e-9);
        let nx: Vec<f64> = x.iter().map(|v| -v).collect();
        let c = pearson(&nx, &y).unwrap().coefficient;
        prop_assert!((a + c).abs() < 1e-12);
    }

    #[test]
    fn projections_stay_in_unit_interval(m in model(8, 5)) {
        let spec = AxisSpec::new("a", PoleSpec::new("p", ["w0", "w1"]), PoleSpec::new("q", ["w2", "w3"]));
        if let Ok(ax) = build_axis(&m, &spec, Fallback::Exact) {
            let norm: f64 = ax.direction.iter().map(|x| x * x).sum::<f64>().sqrt();
            prop_assert!((norm - 1.0).abs() < 1e-9);
            for i in 0..m.vocab_size() {
                let p = ax.project(m.row(i)).unwrap();
                prop_assert!((-1.0..=1.0).contains(&p));
            }
            let sw = build_axis(&m, &spec.swapped(), Fallback::Exact).unwrap();
            for (a, b) in ax.direction.iter().zip(&sw.direction) {
                prop_assert_eq!(*a, -*b);
            }
        }
    }

    #[test]
    fn restrict_top_k_is_idempotent(m in model(12, 3), k in 1usize..20) {
        let once = m.restrict_top_k(k).unwrap();
        let twice = once.restrict_top_k(k).unwrap();
        prop_assert_eq!(once.words(), twice.words());
        prop_assert_eq!(once.vocab_size(), k.min(12));
        for i in 0..once.vocab_size() {
            prop_assert_eq!(once.row(i), m.row(i));
        }
        let first_hidden = format!("w{}", k.min(12));
        prop_assert!(k >= 12 || once.index_of(&first_hidden).is_none());
    }

    #[test]
    fn coverage_grows_with_vocabulary(m in model(15, 3), picks in prop::collection::btree_set(0usize..20, 1..12)) {
        let lex = SentimentLexicon::from_pairs(
            "l",
            LexiconKind::Binary,
            picks.iter().map(|&i| (format!("w{i}"), if i % 2 == 0 { 1.0 } else { -1.0 })),
        )
        .unwrap();
        let mut last = 0;
        for k in 1..=15 {
            let found = intersect_with_model(&lex, &m.restrict_top_k(k).unwrap(), Fallback::Exact)
                .map(|i| i.words.len())
                .unwrap_or(0);
            prop_assert!(found >= last);
            last = found;
        }
    }

    #[test]
    fn subword_composition_ignores_ngram_order(
        rows in prop::collection::vec(prop::collection::vec(-1.0f32..1.0, 4), 6),
        seed in any::<u64>(),
    ) {
        let mut table = SubwordTable::new(3, 4, 64, 4).unwrap();
        let grams = ["<ca", "cat", "at>", "<cat", "cat>", "dog"];
        for (g, r) in grams.iter().zip(&rows) {
            table.insert(g, r).unwrap();
        }
        let mut bag: Vec<String> = table.ngrams("cat");
        let a = table.compose_from(&bag);
        let n = bag.len();
        for i in 0..n {
            bag.swap(i, (seed as usize).wrapping_add(i * 7) % n);
        }
        let b = table.compose_from(&bag);
        match (a, b) {
            (Some(a), Some(b)) => {
                for (x, y) in a.iter().zip(&b) {
                    prop_assert!((x - y).abs() < 1e-6);
                }
            }
            (a, b) => prop_assert_eq!(a.is_none(), b.is_none()),
        }
    }
}
