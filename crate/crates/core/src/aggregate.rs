//! Representative-subperiod selection by k-means clustering.
//!
//! Each candidate subperiod becomes one point: the concatenation of all
//! input series (demand and availability columns), each series min-max
//! normalized over the full horizon. Lloyd's algorithm runs from a seeded
//! k-means++ initialization; the representative of a cluster is its medoid
//! (the member closest to the final centroid), so real data enters the
//! model. Weights are cluster sizes.

use thiserror::Error;

use crate::model::{Subperiod, SystemSpec};

#[derive(Debug, Error)]
pub enum AggregateError {
    #[error("k = {k} is outside 1..={n}")]
    BadK { k: usize, n: usize },
    #[error("series do not cover an integer number of subperiods")]
    RaggedHorizon,
    #[error("partition covers {got} subperiods, system has {want}")]
    Mismatch { got: usize, want: usize },
}

/// Result of clustering: representatives, weights and the chronological
/// assignment map.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    /// Original subperiod positions chosen as representatives, ascending.
    pub representatives: Vec<usize>,
    /// Cluster size per representative.
    pub weights: Vec<usize>,
    /// Original subperiod position -> index into `representatives`.
    pub assignment: Vec<usize>,
}

impl Partition {
    pub fn identity(n: usize) -> Self {
        Partition {
            representatives: (0..n).collect(),
            weights: vec![1; n],
            assignment: (0..n).collect(),
        }
    }

    pub fn k(&self) -> usize {
        self.representatives.len()
    }

    /// Serializes as `week,representative,weight` lines with a header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("week,representative,weight\n");
        for (i, &rep) in self.assignment.iter().enumerate() {
            out.push_str(&format!(
                "{i},{},{}\n",
                self.representatives[rep], self.weights[rep]
            ));
        }
        out
    }
}

/// Deterministic splitmix64; enough randomness for seeding k-means++.
struct SplitMix(u64);

impl SplitMix {
    fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Builds the feature matrix: one row per original subperiod.
fn feature_rows(spec: &SystemSpec) -> Result<Vec<Vec<f64>>, AggregateError> {
    let len = spec
        .index_sets
        .subperiods
        .first()
        .map(|sp| sp.hours.len())
        .unwrap_or(0);
    if len == 0 {
        return Err(AggregateError::RaggedHorizon);
    }

    let mut series: Vec<&[f64]> = Vec::new();
    for d in &spec.demand {
        series.push(&d.values);
    }
    for table in &spec.series {
        for (_, col) in &table.columns {
            series.push(col);
        }
    }
    let horizon = series.iter().map(|s| s.len()).min().unwrap_or(0);
    if horizon == 0 || horizon % len != 0 {
        return Err(AggregateError::RaggedHorizon);
    }
    if series.iter().any(|s| s.len() != horizon) {
        return Err(AggregateError::RaggedHorizon);
    }
    let n_weeks = horizon / len;

    let mut rows = vec![Vec::with_capacity(series.len() * len); n_weeks];
    for s in &series {
        let lo = s.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = s.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let span = hi - lo;
        for (w, row) in rows.iter_mut().enumerate() {
            for t in 0..len {
                let v = s[w * len + t];
                row.push(if span > 0.0 { (v - lo) / span } else { 0.0 });
            }
        }
    }
    Ok(rows)
}

/// Clusters the spec's original subperiods into `k` representatives.
///
/// Deterministic for a fixed seed. Empty clusters are re-seeded at the
/// point farthest from its assigned centroid.
pub fn cluster_weeks(spec: &SystemSpec, k: usize, seed: u64) -> Result<Partition, AggregateError> {
    let rows = feature_rows(spec)?;
    let n = rows.len();
    if k == 0 || k > n {
        return Err(AggregateError::BadK { k, n });
    }
    if k == n {
        return Ok(Partition::identity(n));
    }

    let dim = rows[0].len();
    let mut rng = SplitMix(seed.wrapping_mul(0x9e3779b97f4a7c15).wrapping_add(1));

    // k-means++ seeding.
    let mut centroids: Vec<Vec<f64>> = Vec::with_capacity(k);
    let first = (rng.next_f64() * n as f64) as usize % n;
    centroids.push(rows[first].clone());
    let mut d2: Vec<f64> = rows.iter().map(|r| sq_dist(r, &centroids[0])).collect();
    while centroids.len() < k {
        let total: f64 = d2.iter().sum();
        let pick = if total > 0.0 {
            let mut target = rng.next_f64() * total;
            let mut chosen = 0;
            for (i, &d) in d2.iter().enumerate() {
                target -= d;
                chosen = i;
                if target <= 0.0 {
                    break;
                }
            }
            chosen
        } else {
            // All points coincide with some centroid; take the first
            // point not yet chosen.
            (0..n)
                .find(|i| centroids.iter().all(|c| sq_dist(&rows[*i], c) > 0.0))
                .unwrap_or(0)
        };
        centroids.push(rows[pick].clone());
        for (i, row) in rows.iter().enumerate() {
            d2[i] = d2[i].min(sq_dist(row, centroids.last().unwrap()));
        }
    }

    // Lloyd iterations.
    let mut assign = vec![0usize; n];
    for _ in 0..200 {
        let mut changed = false;
        for (i, row) in rows.iter().enumerate() {
            let mut best = 0;
            let mut best_d = f64::INFINITY;
            for (c, centroid) in centroids.iter().enumerate() {
                let d = sq_dist(row, centroid);
                if d < best_d {
                    best_d = d;
                    best = c;
                }
            }
            if assign[i] != best {
                assign[i] = best;
                changed = true;
            }
        }

        // Recompute centroids; re-seed empties at the farthest point.
        let mut sums = vec![vec![0.0; dim]; k];
        let mut counts = vec![0usize; k];
        for (i, row) in rows.iter().enumerate() {
            counts[assign[i]] += 1;
            for (a, b) in sums[assign[i]].iter_mut().zip(row) {
                *a += b;
            }
        }
        for c in 0..k {
            if counts[c] == 0 {
                let far = (0..n)
                    .max_by(|&a, &b| {
                        let da = sq_dist(&rows[a], &centroids[assign[a]]);
                        let db = sq_dist(&rows[b], &centroids[assign[b]]);
                        da.partial_cmp(&db).unwrap()
                    })
                    .unwrap();
                centroids[c] = rows[far].clone();
                assign[far] = c;
                counts[c] = 1;
                changed = true;
            } else {
                for (j, v) in centroids[c].iter_mut().enumerate() {
                    *v = sums[c][j] / counts[c] as f64;
                }
            }
        }
        if !changed {
            break;
        }
    }

    // Medoids: the member week closest to each centroid.
    let mut medoid = vec![usize::MAX; k];
    let mut medoid_d = vec![f64::INFINITY; k];
    for (i, row) in rows.iter().enumerate() {
        let c = assign[i];
        let d = sq_dist(row, &centroids[c]);
        if d < medoid_d[c] {
            medoid_d[c] = d;
            medoid[c] = i;
        }
    }

    // Re-order clusters by their medoid position for a canonical result.
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by_key(|&c| medoid[c]);
    let mut remap = vec![0usize; k];
    for (new_c, &old_c) in order.iter().enumerate() {
        remap[old_c] = new_c;
    }
    let representatives: Vec<usize> = order.iter().map(|&c| medoid[c]).collect();
    let mut weights = vec![0usize; k];
    let assignment: Vec<usize> = assign.iter().map(|&c| remap[c]).collect();
    for &a in &assignment {
        weights[a] += 1;
    }
    Ok(Partition {
        representatives,
        weights,
        assignment,
    })
}

/// Applies a partition: restricts the spec to the representative
/// subperiods, scales their weights (which scale operational costs and
/// emission coefficients during assembly), and stores the chronological
/// assignment used by long-duration storage linking.
pub fn apply_weights(spec: &SystemSpec, partition: &Partition) -> Result<SystemSpec, AggregateError> {
    let len = spec
        .index_sets
        .subperiods
        .first()
        .map(|sp| sp.hours.len())
        .unwrap_or(0);
    if len == 0 {
        return Err(AggregateError::RaggedHorizon);
    }
    let n_original = partition.assignment.len();
    // The partition indexes original chronological slots; the spec being
    // aggregated must still be on its natural horizon.
    if spec.index_sets.subperiods.len() != n_original
        || spec.assignment.len() != n_original
    {
        return Err(AggregateError::Mismatch {
            got: n_original,
            want: spec.index_sets.subperiods.len(),
        });
    }

    let mut out = spec.clone();
    out.index_sets.subperiods = partition
        .representatives
        .iter()
        .zip(&partition.weights)
        .map(|(&rep, &weight)| Subperiod {
            id: spec.index_sets.subperiods[rep].id.clone(),
            hours: spec.index_sets.subperiods[rep].hours.clone(),
            weight: weight as f64,
        })
        .collect();
    out.assignment = partition.assignment.clone();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{DemandSeries, IndexSets, SystemSpec};

    fn spec_with_weeks(weeks: &[Vec<f64>]) -> SystemSpec {
        let len = weeks[0].len();
        let idx = IndexSets {
            zones: vec!["z1".into()],
            sectors: vec!["power".into()],
            vectors: vec!["elec".into()],
            subperiods: SystemSpec::uniform_subperiods(weeks.len(), len),
        };
        let mut spec = SystemSpec::new("agg", idx);
        spec.demand.push(DemandSeries {
            vector: "elec".into(),
            zone: "z1".into(),
            sector: "power".into(),
            values: weeks.concat(),
        });
        spec
    }

    #[test]
    fn k_equal_weeks_is_identity() {
        let spec = spec_with_weeks(&[vec![1.0, 2.0], vec![3.0, 4.0], vec![5.0, 6.0]]);
        let p = cluster_weeks(&spec, 3, 7).unwrap();
        assert_eq!(p, Partition::identity(3));
    }

    #[test]
    fn k_one_collects_everything() {
        let spec = spec_with_weeks(&[vec![1.0, 2.0], vec![3.0, 4.0], vec![5.0, 6.0]]);
        let p = cluster_weeks(&spec, 1, 7).unwrap();
        assert_eq!(p.weights, vec![3]);
        assert_eq!(p.assignment, vec![0, 0, 0]);
    }

    /// Brute-force oracle: enumerate all 2-partitions of 4 points and pick
    /// the one minimizing within-cluster squared distance.
    fn best_two_partition(rows: &[Vec<f64>]) -> Vec<usize> {
        let n = rows.len();
        let mut best_cost = f64::INFINITY;
        let mut best = vec![0; n];
        for mask in 1..(1u32 << n) - 1 {
            let groups: Vec<usize> = (0..n).map(|i| ((mask >> i) & 1) as usize).collect();
            let mut cost = 0.0;
            for g in 0..2 {
                let members: Vec<&Vec<f64>> =
                    rows.iter().zip(&groups).filter(|(_, &gg)| gg == g).map(|(r, _)| r).collect();
                if members.is_empty() {
                    continue;
                }
                let dim = members[0].len();
                let mut centroid = vec![0.0; dim];
                for m in &members {
                    for (c, v) in centroid.iter_mut().zip(m.iter()) {
                        *c += v;
                    }
                }
                centroid.iter_mut().for_each(|c| *c /= members.len() as f64);
                for m in &members {
                    cost += sq_dist(m, &centroid);
                }
            }
            if cost < best_cost {
                best_cost = cost;
                best = groups;
            }
        }
        best
    }

    #[test]
    fn duplicate_pairs_recover_weights_two_two() {
        let weeks = vec![
            vec![1.0, 0.0, 1.0],
            vec![1.0, 0.0, 1.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 1.0, 0.0],
        ];
        let spec = spec_with_weeks(&weeks);
        // Oracle agrees the best 2-partition splits the pairs.
        let oracle = best_two_partition(&feature_rows(&spec).unwrap());
        assert_eq!(oracle[0], oracle[1]);
        assert_eq!(oracle[2], oracle[3]);
        assert_ne!(oracle[0], oracle[2]);

        for seed in [0, 1, 42] {
            let p = cluster_weeks(&spec, 2, seed).unwrap();
            assert_eq!(p.weights, vec![2, 2], "seed {seed}");
            assert_eq!(p.assignment[0], p.assignment[1]);
            assert_eq!(p.assignment[2], p.assignment[3]);
            assert!(p.representatives[0] < 2 && p.representatives[1] >= 2);
        }
    }

    #[test]
    fn clustering_is_deterministic_per_seed() {
        let weeks: Vec<Vec<f64>> = (0..6)
            .map(|w| (0..4).map(|t| ((w * 7 + t * 3) % 5) as f64).collect())
            .collect();
        let spec = spec_with_weeks(&weeks);
        let a = cluster_weeks(&spec, 3, 11).unwrap();
        let b = cluster_weeks(&spec, 3, 11).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn apply_weights_restricts_and_scales() {
        let spec = spec_with_weeks(&[vec![1.0, 2.0], vec![3.0, 4.0], vec![1.1, 2.1]]);
        let p = Partition {
            representatives: vec![0, 1],
            weights: vec![2, 1],
            assignment: vec![0, 1, 0],
        };
        let out = apply_weights(&spec, &p).unwrap();
        assert_eq!(out.index_sets.subperiods.len(), 2);
        assert_eq!(out.index_sets.subperiods[0].weight, 2.0);
        assert_eq!(out.index_sets.subperiods[0].id, "w0");
        assert_eq!(out.index_sets.subperiods[1].weight, 1.0);
        assert_eq!(out.assignment, vec![0, 1, 0]);
    }
}
