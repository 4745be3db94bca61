use std::collections::HashMap;

use super::TopicModel;

/// UMass coherence of every topic over its `n` most probable words.
///
/// For words `w_1..w_n` in descending probability, each pair `l < m`
/// contributes `ln((D(w_m, w_l) + 1) / D(w_l))`, where `D` counts documents
/// of `docs` containing all listed words. A zero document frequency in a
/// denominator makes the topic score `-inf`.
pub fn umass_coherence<S: AsRef<str>>(model: &TopicModel, docs: &[Vec<S>], n: usize) -> Vec<f64> {
    let tops: Vec<Vec<String>> = (0..model.num_topics())
        .map(|t| model.top_words(t, n).into_iter().map(|(w, _)| w).collect())
        .collect();

    let mut postings: HashMap<&str, Vec<usize>> = HashMap::new();
    for w in tops.iter().flatten() {
        postings.entry(w.as_str()).or_default();
    }
    for (d, doc) in docs.iter().enumerate() {
        for w in doc {
            if let Some(list) = postings.get_mut(w.as_ref()) {
                if list.last() != Some(&d) {
                    list.push(d);
                }
            }
        }
    }

    tops.iter()
        .map(|words| {
            let mut score = 0.0;
            for m in 1..words.len() {
                for l in 0..m {
                    let dl = &postings[words[l].as_str()];
                    if dl.is_empty() {
                        return f64::NEG_INFINITY;
                    }
                    let joint = intersection_len(dl, &postings[words[m].as_str()]);
                    score += ((joint as f64 + 1.0) / dl.len() as f64).ln();
                }
            }
            score
        })
        .collect()
}

/// Size of the intersection of two sorted lists.
fn intersection_len(a: &[usize], b: &[usize]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topics::{fit_lda, LdaConfig};

    fn single_topic(docs: &[Vec<&str>]) -> TopicModel {
        let cfg = LdaConfig {
            k: 1,
            iterations: 5,
            burn_in: 1,
            min_count: 1,
            ..Default::default()
        };
        fit_lda(docs, &cfg).unwrap()
    }

    #[test]
    fn always_together() {
        let docs: Vec<Vec<&str>> = (0..10).map(|_| vec!["a", "a", "b"]).collect();
        let model = single_topic(&docs);
        let c = umass_coherence(&model, &docs, 2);
        assert!((c[0] - (11.0f64 / 10.0).ln()).abs() < 1e-12);
        assert!((c[0] - 0.0953).abs() < 1e-4);
    }

    #[test]
    fn never_together() {
        let mut docs: Vec<Vec<&str>> = (0..10).map(|_| vec!["a", "a"]).collect();
        docs.extend((0..10).map(|_| vec!["b"]));
        let model = single_topic(&docs);
        let c = umass_coherence(&model, &docs, 2);
        assert!((c[0] - (0.1f64).ln()).abs() < 1e-12);
    }

    #[test]
    fn one_word_has_no_pairs() {
        let docs = vec![vec!["a", "b"], vec!["a"]];
        let model = single_topic(&docs);
        assert_eq!(umass_coherence(&model, &docs, 1), vec![0.0]);
    }

    #[test]
    fn unseen_reference_words_are_sentinel() {
        let docs = vec![vec!["a", "b"], vec!["a"]];
        let model = single_topic(&docs);
        let other: Vec<Vec<&str>> = vec![vec!["zzz"]];
        assert_eq!(umass_coherence(&model, &other, 2), vec![f64::NEG_INFINITY]);
    }

    #[test]
    fn intersection() {
        assert_eq!(intersection_len(&[1, 3, 5, 7], &[3, 4, 5, 8]), 2);
        assert_eq!(intersection_len(&[], &[1]), 0);
    }
}
