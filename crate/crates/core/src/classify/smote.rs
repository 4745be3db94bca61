use std::collections::{BTreeMap, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::Matrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct SmoteConfig {
    pub k_neighbors: usize,
    pub seed: u64,
}

impl Default for SmoteConfig {
    fn default() -> Self {
        SmoteConfig {
            k_neighbors: 5,
            seed: 0,
        }
    }
}

/// How a synthetic row was made: `base + u * (neighbor - base)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Synthetic {
    pub base: usize,
    pub neighbor: usize,
    pub u: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SmoteOutput {
    /// Original rows first, unchanged, then the synthetic ones.
    pub x: Matrix,
    pub y: Vec<usize>,
    /// One entry per synthetic row, in row order.
    pub synthetic: Vec<Synthetic>,
}

/// Oversample every class up to the majority count by interpolating
/// between a random member and one of its `k` nearest same-class
/// neighbours (Euclidean).
pub fn smote_oversample(x: &Matrix, y: &[usize], config: &SmoteConfig) -> Result<SmoteOutput> {
    if x.rows() != y.len() {
        return Err(Error::RowMismatch(format!(
            "{} rows, {} labels",
            x.rows(),
            y.len()
        )));
    }
    if config.k_neighbors == 0 {
        return Err(Error::invalid("k_neighbors must be at least 1"));
    }
    let mut by_class: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, &c) in y.iter().enumerate() {
        by_class.entry(c).or_default().push(i);
    }
    let majority = by_class.values().map(Vec::len).max().unwrap_or(0);
    for (&class, members) in &by_class {
        if members.len() < 2 && members.len() < majority {
            return Err(Error::InsufficientMinority {
                class,
                count: members.len(),
            });
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut out = x.clone();
    let mut labels = y.to_vec();
    let mut synthetic = Vec::new();
    let mut row = vec![0.0; x.cols()];
    for (&class, members) in &by_class {
        let need = majority - members.len();
        if need == 0 {
            continue;
        }
        let k = config.k_neighbors.min(members.len() - 1);
        let mut finder = NeighborFinder::new(x, members);
        for _ in 0..need {
            let b = rng.gen_range(0..members.len());
            let nb = finder.neighbors(b, k)[rng.gen_range(0..k)];
            let u: f64 = rng.gen();
            let (base, neighbor) = (members[b], members[nb]);
            for ((r, &a), &n) in row.iter_mut().zip(x.row(base)).zip(x.row(neighbor)) {
                *r = a + u * (n - a);
            }
            out.push_row(&row);
            labels.push(class);
            synthetic.push(Synthetic { base, neighbor, u });
        }
    }
    Ok(SmoteOutput {
        x: out,
        y: labels,
        synthetic,
    })
}

/// Nearest neighbours within one class, computed on demand. Distances run
/// over sparse copies of the rows.
struct NeighborFinder {
    sparse: Vec<Vec<(usize, f64)>>,
    cache: HashMap<usize, Vec<usize>>,
}

impl NeighborFinder {
    fn new(x: &Matrix, members: &[usize]) -> Self {
        let sparse = members
            .iter()
            .map(|&i| {
                x.row(i)
                    .iter()
                    .enumerate()
                    .filter(|(_, &v)| v != 0.0)
                    .map(|(j, &v)| (j, v))
                    .collect()
            })
            .collect();
        NeighborFinder {
            sparse,
            cache: HashMap::new(),
        }
    }

    /// The `k` closest other members to member `i`, ties by position.
    fn neighbors(&mut self, i: usize, k: usize) -> &[usize] {
        let sparse = &self.sparse;
        self.cache.entry(i).or_insert_with(|| {
            let mut d: Vec<(f64, usize)> = (0..sparse.len())
                .filter(|&j| j != i)
                .map(|j| (sq_dist(&sparse[i], &sparse[j]), j))
                .collect();
            let k = k.min(d.len());
            let by = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
            if k < d.len() {
                d.select_nth_unstable_by(k - 1, by);
                d.truncate(k);
            }
            d.sort_by(by);
            d.into_iter().map(|(_, j)| j).collect()
        })
    }
}

fn sq_dist(a: &[(usize, f64)], b: &[(usize, f64)]) -> f64 {
    let (mut i, mut j, mut s) = (0, 0, 0.0);
    while i < a.len() || j < b.len() {
        let d = match (a.get(i), b.get(j)) {
            (Some(&(ia, va)), Some(&(ib, vb))) if ia == ib => {
                i += 1;
                j += 1;
                va - vb
            }
            (Some(&(ia, va)), Some(&(ib, _))) if ia < ib => {
                i += 1;
                va
            }
            (Some(&(_, va)), None) => {
                i += 1;
                va
            }
            (_, Some(&(_, vb))) => {
                j += 1;
                vb
            }
            (None, None) => unreachable!(),
        };
        s += d * d;
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn counts(y: &[usize]) -> BTreeMap<usize, usize> {
        let mut m = BTreeMap::new();
        for &c in y {
            *m.entry(c).or_default() += 1;
        }
        m
    }

    #[test]
    fn two_point_minority_stays_on_segment() {
        let mut rows = vec![[0.0, 0.0], [1.0, 1.0]];
        rows.extend((0..10).map(|i| [5.0 + i as f64, -3.0]));
        let mut y = vec![1, 1];
        y.extend(vec![0; 10]);
        let x = Matrix::from_rows(&rows).unwrap();
        let out = smote_oversample(
            &x,
            &y,
            &SmoteConfig {
                k_neighbors: 1,
                seed: 9,
            },
        )
        .unwrap();
        assert_eq!(counts(&out.y)[&1], 10);
        for r in 12..out.x.rows() {
            let p = out.x.row(r);
            assert_eq!(p[0], p[1]);
            assert!((0.0..=1.0).contains(&p[0]));
        }
    }

    #[test]
    fn balances_to_majority() {
        let rows: Vec<[f64; 2]> = (0..130).map(|i| [i as f64, (i * 7 % 13) as f64]).collect();
        let y: Vec<usize> = (0..130).map(|i| usize::from(i >= 100)).collect();
        let x = Matrix::from_rows(&rows).unwrap();
        let out = smote_oversample(&x, &y, &SmoteConfig::default()).unwrap();
        assert_eq!(counts(&out.y), BTreeMap::from([(0, 100), (1, 100)]));
        for i in 0..130 {
            assert_eq!(out.x.row(i), x.row(i));
        }
        for (s, r) in out.synthetic.iter().zip(130..) {
            assert_eq!(y[s.base], 1);
            assert_eq!(y[s.neighbor], 1);
            assert_ne!(s.base, s.neighbor);
            for j in 0..2 {
                let a = x.get(s.base, j);
                assert_eq!(out.x.get(r, j), a + s.u * (x.get(s.neighbor, j) - a));
            }
        }
    }

    #[test]
    fn neighbours_are_nearest() {
        let rows = vec![[0.0], [0.1], [5.0], [5.2], [9.0], [20.0], [21.0], [22.0]];
        let x = Matrix::from_rows(&rows).unwrap();
        let members: Vec<usize> = (0..5).collect();
        let mut f = NeighborFinder::new(&x, &members);
        assert_eq!(f.neighbors(0, 2), &[1, 2]);
        assert_eq!(f.neighbors(3, 1), &[2]);
        assert_eq!(sq_dist(&[(0, 1.0), (3, 2.0)], &[(1, 1.0), (3, 1.0)]), 3.0);
    }

    #[test]
    fn singleton_minority_rejected() {
        let x = Matrix::from_rows(&[[0.0], [1.0], [2.0]]).unwrap();
        assert!(matches!(
            smote_oversample(&x, &[0, 0, 1], &SmoteConfig::default()),
            Err(Error::InsufficientMinority { class: 1, count: 1 })
        ));
    }

    #[test]
    fn seeded() {
        let rows: Vec<[f64; 1]> = (0..20).map(|i| [i as f64]).collect();
        let y: Vec<usize> = (0..20).map(|i| usize::from(i < 5)).collect();
        let x = Matrix::from_rows(&rows).unwrap();
        let a = smote_oversample(&x, &y, &SmoteConfig::default()).unwrap();
        let b = smote_oversample(&x, &y, &SmoteConfig::default()).unwrap();
        assert_eq!(a, b);
    }
}
