use std::cmp::Ordering;

use crate::error::{Error, Result};

/// Binary ROC AUC by the rank statistic; tied scores count one half.
/// `None` when either class is absent.
pub fn binary_auc(positive: &[bool], scores: &[f64]) -> Option<f64> {
    assert_eq!(
        positive.len(),
        scores.len(),
        "labels and scores differ in length"
    );
    let n_pos = positive.iter().filter(|&&p| p).count();
    let n_neg = positive.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return None;
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].partial_cmp(&scores[b]).unwrap_or(Ordering::Equal));
    let mut rank_sum = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        // midrank of the tie group, ranks counted from 1
        let mid = (i + j) as f64 / 2.0 + 1.0;
        rank_sum += mid * order[i..=j].iter().filter(|&&k| positive[k]).count() as f64;
        i = j + 1;
    }
    let np = n_pos as f64;
    Some((rank_sum - np * (np + 1.0) / 2.0) / (np * n_neg as f64))
}

/// Unweighted mean of one-vs-rest AUCs. Classes without positives or
/// negatives in `y_true` are skipped with a warning.
pub fn macro_auc_ovr(y_true: &[usize], proba: &[Vec<f64>]) -> Result<f64> {
    if y_true.len() != proba.len() {
        return Err(Error::RowMismatch(format!(
            "{} labels for {} probability rows",
            y_true.len(),
            proba.len()
        )));
    }
    let classes = proba.first().map_or(0, Vec::len);
    let mut total = 0.0;
    let mut used = 0;
    for c in 0..classes {
        let pos: Vec<bool> = y_true.iter().map(|&y| y == c).collect();
        let scores: Vec<f64> = proba.iter().map(|p| p[c]).collect();
        match binary_auc(&pos, &scores) {
            Some(a) => {
                total += a;
                used += 1;
            }
            None => log::warn!("class {c} lacks positives or negatives; skipped in AUC"),
        }
    }
    if used == 0 {
        return Err(Error::invalid("no class has both positives and negatives"));
    }
    Ok(total / used as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn examples() {
        let y = [true, true, false, false];
        assert_eq!(binary_auc(&y, &[0.9, 0.8, 0.2, 0.1]), Some(1.0));
        assert_eq!(binary_auc(&y, &[0.5; 4]), Some(0.5));
        assert_eq!(binary_auc(&y, &[0.9, 0.4, 0.6, 0.2]), Some(0.75));
        assert_eq!(binary_auc(&[true, true], &[0.1, 0.2]), None);
    }

    #[test]
    fn macro_skips_missing_classes() {
        let y = [0, 0, 1, 1];
        let p = vec![
            vec![0.9, 0.1, 0.0],
            vec![0.8, 0.2, 0.0],
            vec![0.3, 0.7, 0.0],
            vec![0.1, 0.9, 0.0],
        ];
        assert_eq!(macro_auc_ovr(&y, &p).unwrap(), 1.0);
        assert!(macro_auc_ovr(&[0, 0], &[vec![1.0], vec![1.0]]).is_err());
    }

    /// Fraction of concordant (positive, negative) pairs, ties one half.
    fn pair_oracle(pos: &[bool], s: &[f64]) -> f64 {
        let mut num = 0.0;
        let mut den = 0.0;
        for i in 0..s.len() {
            for j in 0..s.len() {
                if pos[i] && !pos[j] {
                    den += 1.0;
                    num += if s[i] > s[j] {
                        1.0
                    } else if s[i] == s[j] {
                        0.5
                    } else {
                        0.0
                    };
                }
            }
        }
        num / den
    }

    proptest! {
        #[test]
        fn matches_pairs_and_monotone_invariant(
            data in proptest::collection::vec((any::<bool>(), 0u8..10), 2..40)
        ) {
            let pos: Vec<bool> = data.iter().map(|d| d.0).collect();
            let s: Vec<f64> = data.iter().map(|d| d.1 as f64 / 10.0).collect();
            if let Some(a) = binary_auc(&pos, &s) {
                prop_assert!((a - pair_oracle(&pos, &s)).abs() < 1e-12);
                let t: Vec<f64> = s.iter().map(|x| (3.0 * x).exp() - 7.0).collect();
                prop_assert_eq!(Some(a), binary_auc(&pos, &t));
            }
        }
    }
}
