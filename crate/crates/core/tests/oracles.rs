use axisprobe::antonym::{sentiment_filtered_alignment, AntonymPair};
use axisprobe::axis::{build_axis, AxisSpec, PoleSpec};
use axisprobe::lexicon::{LexiconKind, Polarity, SentimentLexicon};
use axisprobe::screening::{ensemble_summary, ground_truth_correlation, ScreenOptions};
use axisprobe::synthetic::{build_planted, lexicon_word, PlantedConfig};
use axisprobe::{EmbeddingModel, Fallback};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn planted_alignment_orients_negative_words_to_pole1() {
    let p = build_planted(&PlantedConfig {
        rho: 0.5,
        seed: 21,
        ..Default::default()
    })
    .unwrap();
    let axis = build_axis(&p.model, &p.axis, Fallback::Exact).unwrap();
    let pairs: Vec<AntonymPair> = (0..p.lexicon.len() / 2)
        .map(|i| AntonymPair::new(lexicon_word(2 * i), lexicon_word(2 * i + 1)))
        .collect();
    let r = sentiment_filtered_alignment(&p.model, &axis, &pairs, &p.lexicon, Some(10), Fallback::Exact).unwrap();
    assert_eq!(r.entries.len(), 10);
    let oriented = r
        .strip_points()
        .iter()
        .filter(|s| s.polarity == Some(Polarity::Negative))
        .filter(|s| s.position < 0.0)
        .count();
    assert!(oriented >= 9, "{oriented} of 10 negative words sit toward pole1");
}

#[test]
fn ensemble_agreement_tracks_lexicon_signal() {
    let size = 2000;
    let axis = build_planted(&PlantedConfig {
        lexicon_size: 2,
        ..Default::default()
    })
    .unwrap()
    .axis;
    let models: Vec<EmbeddingModel> = (0..20)
        .map(|i| {
            let rho = -0.5 + i as f64 / 19.0;
            build_planted(&PlantedConfig {
                rho,
                seed: 300 + i,
                lexicon_size: size,
                ..Default::default()
            })
            .unwrap()
            .model
            .with_name(format!("m{i:02}"))
        })
        .collect();
    let label = |i: usize| if i.is_multiple_of(2) { 1.0 } else { -1.0 };
    let full = SentimentLexicon::from_pairs(
        "full",
        LexiconKind::Binary,
        (0..size).map(|i| (lexicon_word(i), label(i))),
    )
    .unwrap();
    let half = SentimentLexicon::from_pairs(
        "half",
        LexiconKind::Binary,
        (0..size / 2).map(|i| (lexicon_word(i), label(i))),
    )
    .unwrap();
    let mut scores: Vec<f64> = (0..size).map(label).collect();
    scores.shuffle(&mut ChaCha8Rng::seed_from_u64(9));
    let shuffled = SentimentLexicon::from_pairs(
        "shuffled",
        LexiconKind::Binary,
        (0..size).map(|i| (lexicon_word(i), scores[i])),
    )
    .unwrap();
    let e = ensemble_summary(&models, &[axis], &[full, half, shuffled], &ScreenOptions::default()).unwrap();
    assert_eq!(e.matrices[0].family_size, 60);
    let agree = |i: usize, j: usize| e.lexicon_agreement[i][j].unwrap();
    assert!(agree(0, 1) > 0.9, "full vs half {}", agree(0, 1));
    assert!(agree(0, 2).abs() < 0.5, "full vs shuffled {}", agree(0, 2));
    assert!(agree(1, 2).abs() < 0.5, "half vs shuffled {}", agree(1, 2));
}

#[test]
fn ground_truth_matches_direct_pearson() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let dim = 6;
    let mut words: Vec<String> = vec!["he".into(), "she".into()];
    words.extend((0..20).map(|i| format!("job{i}")));
    let vectors: Vec<f32> = (0..words.len() * dim).map(|_| rng.random_range(-1.0f32..1.0)).collect();
    let m = EmbeddingModel::from_rows("gt", dim, words.clone(), vectors).unwrap();
    let spec = AxisSpec::new("g", PoleSpec::new("m", ["he"]), PoleSpec::new("f", ["she"]));
    let ax = build_axis(&m, &spec, Fallback::Exact).unwrap();
    let targets: Vec<(String, f64)> = (0..20)
        .map(|i| (format!("job{i}"), rng.random_range(0.0..1.0)))
        .collect();
    let r = ground_truth_correlation(&m, &ax, &targets, Fallback::Exact).unwrap();
    assert_eq!(r.points.len(), 20);

    // direction by hand: each single-word pole is renormalized in f64, then normalize(she - he)
    let unit = |r: &[f32]| {
        let n = r.iter().map(|&x| x as f64 * x as f64).sum::<f64>().sqrt();
        r.iter().map(|&x| x as f64 / n).collect::<Vec<f64>>()
    };
    let (he, she) = (unit(m.row(0)), unit(m.row(1)));
    let diff: Vec<f64> = (0..dim).map(|k| she[k] - he[k]).collect();
    let n = diff.iter().map(|x| x * x).sum::<f64>().sqrt();
    let xs: Vec<f64> = (0..20)
        .map(|i| (0..dim).map(|k| m.row(i + 2)[k] as f64 * diff[k] / n).sum())
        .collect();
    let ys: Vec<f64> = targets.iter().map(|t| t.1).collect();
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let (mx, my) = (mean(&xs), mean(&ys));
    let cov: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let vx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let vy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let oracle = cov / (vx * vy).sqrt();
    assert!(
        (r.pearson.coefficient - oracle).abs() < 1e-12,
        "{} vs {oracle}",
        r.pearson.coefficient
    );
    for (p, x) in r.points.iter().zip(&xs) {
        assert!((p.projection - x).abs() < 1e-12);
    }
}
