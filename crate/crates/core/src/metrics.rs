//! External clustering validity indices: accuracy (via optimal label
//! matching), normalized mutual information, purity, and the adjusted Rand
//! index. All four are computed from a shared contingency table and are
//! invariant under bijective relabeling of either argument.

// Contingency-table traversals pair the (i, j) cell index across two
// structures; the range-loop form keeps the double subscripts aligned.
#![allow(clippy::needless_range_loop)]

use crate::error::{Error, Result};
use crate::kkm::ClusterAssignment;

/// Joint label-count table: `counts[i][j]` is how many samples fall in
/// predicted cluster `i` and true class `j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContingencyTable {
    counts: Vec<u64>,
    k_pred: usize,
    k_true: usize,
    n: usize,
}

impl ContingencyTable {
    /// Tabulates two equally long assignments.
    pub fn from_assignments(
        pred: &ClusterAssignment,
        truth: &ClusterAssignment,
    ) -> Result<Self> {
        if pred.len() != truth.len() {
            return Err(Error::DimensionMismatch {
                context: "ContingencyTable::from_assignments",
                expected: truth.len(),
                found: pred.len(),
            });
        }
        let k_pred = pred.clusters();
        let k_true = truth.clusters();
        let mut counts = vec![0_u64; k_pred * k_true];
        for (&p, &t) in pred.labels().iter().zip(truth.labels()) {
            counts[p * k_true + t] += 1;
        }
        Ok(Self {
            counts,
            k_pred,
            k_true,
            n: pred.len(),
        })
    }

    /// Count of samples in predicted cluster `i` and true class `j`.
    pub fn count(&self, i: usize, j: usize) -> u64 {
        self.counts[i * self.k_true + j]
    }

    /// Number of predicted clusters.
    pub fn k_pred(&self) -> usize {
        self.k_pred
    }

    /// Number of true classes.
    pub fn k_true(&self) -> usize {
        self.k_true
    }

    /// Total sample count.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Per-predicted-cluster totals.
    pub fn row_sums(&self) -> Vec<u64> {
        (0..self.k_pred)
            .map(|i| (0..self.k_true).map(|j| self.count(i, j)).sum())
            .collect()
    }

    /// Per-true-class totals.
    pub fn col_sums(&self) -> Vec<u64> {
        (0..self.k_true)
            .map(|j| (0..self.k_pred).map(|i| self.count(i, j)).sum())
            .collect()
    }
}

/// Minimum-cost perfect matching on a square cost matrix (potentials +
/// shortest augmenting paths). Returns the optimal total cost.
fn assignment_min_cost(cost: &[Vec<i64>]) -> i64 {
    let s = cost.len();
    let inf = i64::MAX / 4;
    let mut u = vec![0_i64; s + 1];
    let mut v = vec![0_i64; s + 1];
    let mut matched_row = vec![0_usize; s + 1];
    let mut way = vec![0_usize; s + 1];
    for i in 1..=s {
        matched_row[0] = i;
        let mut j0 = 0_usize;
        let mut minv = vec![inf; s + 1];
        let mut used = vec![false; s + 1];
        loop {
            used[j0] = true;
            let i0 = matched_row[j0];
            let mut delta = inf;
            let mut j1 = 0;
            for j in 1..=s {
                if !used[j] {
                    let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=s {
                if used[j] {
                    u[matched_row[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if matched_row[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            matched_row[j0] = matched_row[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    -v[0]
}

/// Clustering accuracy: the largest fraction of agreeing samples over all
/// bijective relabelings, found by optimal assignment on the (negated,
/// square-padded) contingency table.
pub fn accuracy(pred: &ClusterAssignment, truth: &ClusterAssignment) -> Result<f64> {
    let table = ContingencyTable::from_assignments(pred, truth)?;
    let s = table.k_pred().max(table.k_true());
    let mut cost = vec![vec![0_i64; s]; s];
    for i in 0..table.k_pred() {
        for j in 0..table.k_true() {
            cost[i][j] = -(table.count(i, j) as i64);
        }
    }
    let matched = -assignment_min_cost(&cost);
    Ok(matched as f64 / table.n() as f64)
}

/// Entropy normalization used by [`nmi_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NmiNormalization {
    /// `sqrt(H(pred) * H(truth))` — the default convention.
    #[default]
    Geometric,
    /// `(H(pred) + H(truth)) / 2`.
    Arithmetic,
    /// `min(H(pred), H(truth))`.
    Min,
}

fn entropy(sums: &[u64], n: f64) -> f64 {
    sums.iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.ln()
        })
        .sum()
}

/// Normalized mutual information with geometric-mean normalization.
pub fn nmi(pred: &ClusterAssignment, truth: &ClusterAssignment) -> Result<f64> {
    nmi_with(pred, truth, NmiNormalization::Geometric)
}

/// Normalized mutual information (natural-log entropies).
///
/// When both marginal entropies vanish (both partitions trivial) the value
/// is defined as 1.0; when exactly one vanishes, as 0.0. The result is
/// clamped to `[0, 1]`.
pub fn nmi_with(
    pred: &ClusterAssignment,
    truth: &ClusterAssignment,
    normalization: NmiNormalization,
) -> Result<f64> {
    let table = ContingencyTable::from_assignments(pred, truth)?;
    let n = table.n() as f64;
    let rows = table.row_sums();
    let cols = table.col_sums();
    let h_pred = entropy(&rows, n);
    let h_true = entropy(&cols, n);
    if h_pred == 0.0 && h_true == 0.0 {
        return Ok(1.0);
    }

    let mut mutual_information = 0.0;
    for i in 0..table.k_pred() {
        for j in 0..table.k_true() {
            let c = table.count(i, j);
            if c == 0 {
                continue;
            }
            let p_joint = c as f64 / n;
            let p_marginal = (rows[i] as f64 / n) * (cols[j] as f64 / n);
            mutual_information += p_joint * (p_joint / p_marginal).ln();
        }
    }

    let denom = match normalization {
        NmiNormalization::Geometric => (h_pred * h_true).sqrt(),
        NmiNormalization::Arithmetic => 0.5 * (h_pred + h_true),
        NmiNormalization::Min => h_pred.min(h_true),
    };
    if denom <= 0.0 {
        return Ok(0.0);
    }
    Ok((mutual_information / denom).clamp(0.0, 1.0))
}

/// Purity: the fraction of samples covered by each predicted cluster's
/// majority true class.
pub fn purity(pred: &ClusterAssignment, truth: &ClusterAssignment) -> Result<f64> {
    let table = ContingencyTable::from_assignments(pred, truth)?;
    let mut covered = 0_u64;
    for i in 0..table.k_pred() {
        covered += (0..table.k_true()).map(|j| table.count(i, j)).max().unwrap_or(0);
    }
    Ok(covered as f64 / table.n() as f64)
}

/// Adjusted Rand index with its degeneracy flag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AriScore {
    /// `(RI - E[RI]) / (max RI - E[RI])`, or 0.0 when degenerate.
    pub value: f64,
    /// True when `max RI = E[RI]` leaves the index undefined.
    pub degenerate: bool,
}

fn choose2(x: u64) -> u128 {
    let x = x as u128;
    x * x.saturating_sub(1) / 2
}

/// Adjusted Rand index via pair counting on the contingency table.
pub fn ari(pred: &ClusterAssignment, truth: &ClusterAssignment) -> Result<AriScore> {
    let table = ContingencyTable::from_assignments(pred, truth)?;
    let mut index = 0_u128;
    for i in 0..table.k_pred() {
        for j in 0..table.k_true() {
            index += choose2(table.count(i, j));
        }
    }
    let a: u128 = table.row_sums().iter().map(|&s| choose2(s)).sum();
    let b: u128 = table.col_sums().iter().map(|&s| choose2(s)).sum();
    let pairs = choose2(table.n() as u64);
    if pairs == 0 {
        // A single sample has no pairs; every partition is equally vacuous.
        return Ok(AriScore {
            value: 0.0,
            degenerate: true,
        });
    }
    let expected = a as f64 * b as f64 / pairs as f64;
    let max_index = 0.5 * (a as f64 + b as f64);
    let denom = max_index - expected;
    if denom.abs() < 1e-12 {
        return Ok(AriScore {
            value: 0.0,
            degenerate: true,
        });
    }
    Ok(AriScore {
        value: (index as f64 - expected) / denom,
        degenerate: false,
    })
}

/// All four indices of one prediction against ground truth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricScores {
    /// Clustering accuracy in `[0, 1]`.
    pub acc: f64,
    /// Normalized mutual information (geometric normalization) in `[0, 1]`.
    pub nmi: f64,
    /// Purity in `(0, 1]`.
    pub purity: f64,
    /// Adjusted Rand index in `[-1, 1]` (0.0 when degenerate).
    pub ari: f64,
    /// Degeneracy flag of the adjusted Rand index.
    pub ari_degenerate: bool,
}

/// Computes ACC, NMI, Purity, and ARI in one pass.
pub fn score_all(pred: &ClusterAssignment, truth: &ClusterAssignment) -> Result<MetricScores> {
    let ari_score = ari(pred, truth)?;
    Ok(MetricScores {
        acc: accuracy(pred, truth)?,
        nmi: nmi(pred, truth)?,
        purity: purity(pred, truth)?,
        ari: ari_score.value,
        ari_degenerate: ari_score.degenerate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::Rng;
    use rand::SeedableRng;

    fn assignment(labels: &[usize], k: usize) -> ClusterAssignment {
        ClusterAssignment::new(labels.to_vec(), k).unwrap()
    }

    /// Exhaustive maximum agreement over injective cluster relabelings.
    fn brute_force_accuracy(pred: &ClusterAssignment, truth: &ClusterAssignment) -> f64 {
        let table = ContingencyTable::from_assignments(pred, truth).unwrap();
        let s = table.k_pred().max(table.k_true());
        let mut slots: Vec<usize> = (0..s).collect();
        let mut best = 0_u64;
        permute(&mut slots, 0, &mut |perm| {
            let mut total = 0_u64;
            for (i, &j) in perm.iter().enumerate() {
                if i < table.k_pred() && j < table.k_true() {
                    total += table.count(i, j);
                }
            }
            best = best.max(total);
        });
        best as f64 / table.n() as f64
    }

    fn permute(items: &mut Vec<usize>, start: usize, visit: &mut impl FnMut(&[usize])) {
        if start == items.len() {
            visit(items);
            return;
        }
        for i in start..items.len() {
            items.swap(start, i);
            permute(items, start + 1, visit);
            items.swap(start, i);
        }
    }

    #[test]
    fn identical_labelings_score_perfectly() {
        let a = assignment(&[0, 0, 1, 1, 2], 3);
        assert_eq!(accuracy(&a, &a).unwrap(), 1.0);
        assert_relative_eq!(nmi(&a, &a).unwrap(), 1.0, epsilon = 1e-12);
        assert_eq!(purity(&a, &a).unwrap(), 1.0);
        let s = ari(&a, &a).unwrap();
        assert_eq!(s.value, 1.0);
        assert!(!s.degenerate);
    }

    #[test]
    fn permuted_labels_leave_all_indices_unchanged() {
        let pred = assignment(&[0, 0, 1, 1], 2);
        let flipped = assignment(&[1, 1, 0, 0], 2);
        let truth = assignment(&[0, 1, 1, 1], 2);
        assert_eq!(accuracy(&pred, &truth).unwrap(), accuracy(&flipped, &truth).unwrap());
        assert_eq!(nmi(&pred, &truth).unwrap(), nmi(&flipped, &truth).unwrap());
        assert_eq!(
            ari(&pred, &truth).unwrap().value,
            ari(&flipped, &truth).unwrap().value
        );
        assert_eq!(accuracy(&pred, &flipped).unwrap(), 1.0);
        assert_relative_eq!(nmi(&pred, &flipped).unwrap(), 1.0, epsilon = 1e-12);
        assert_eq!(ari(&pred, &flipped).unwrap().value, 1.0);
    }

    #[test]
    fn accuracy_matches_hand_worked_case() {
        let pred = assignment(&[0, 0, 1, 1], 2);
        let truth = assignment(&[0, 1, 1, 1], 2);
        assert_eq!(accuracy(&pred, &truth).unwrap(), 0.75);
        assert_eq!(brute_force_accuracy(&pred, &truth), 0.75);
    }

    #[test]
    fn purity_matches_hand_worked_cases() {
        let pred = assignment(&[0, 0, 1, 1], 2);
        let truth = assignment(&[0, 1, 1, 1], 2);
        assert_eq!(purity(&pred, &truth).unwrap(), 0.75);

        let lumped = assignment(&[0, 0, 0, 0], 1);
        let balanced = assignment(&[0, 0, 1, 1], 2);
        assert_eq!(purity(&lumped, &balanced).unwrap(), 0.5);
    }

    #[test]
    fn nmi_of_independent_partitions_is_zero() {
        let pred = assignment(&[0, 1, 0, 1], 2);
        let truth = assignment(&[0, 0, 1, 1], 2);
        assert_eq!(nmi(&pred, &truth).unwrap(), 0.0);
    }

    #[test]
    fn nmi_trivial_partition_conventions() {
        let trivial = assignment(&[0, 0, 0], 1);
        let informative = assignment(&[0, 1, 2], 3);
        assert_eq!(nmi(&trivial, &trivial).unwrap(), 1.0);
        assert_eq!(nmi(&trivial, &informative).unwrap(), 0.0);
        assert_eq!(nmi(&informative, &trivial).unwrap(), 0.0);
    }

    #[test]
    fn nmi_normalization_variants_are_ordered() {
        let pred = assignment(&[0, 0, 1, 1], 2);
        let truth = assignment(&[0, 1, 1, 1], 2);
        // Mutual information reduces to 0.75 * ln(4/3) by hand; entropies
        // are ln 2 and (0.25 ln 4 + 0.75 ln(4/3)).
        let mi = 0.75 * (4.0_f64 / 3.0).ln();
        let h_pred = (2.0_f64).ln();
        let h_true = 0.25 * (4.0_f64).ln() + 0.75 * (4.0_f64 / 3.0).ln();
        let geo = nmi_with(&pred, &truth, NmiNormalization::Geometric).unwrap();
        let ari_mean = nmi_with(&pred, &truth, NmiNormalization::Arithmetic).unwrap();
        let min = nmi_with(&pred, &truth, NmiNormalization::Min).unwrap();
        assert_relative_eq!(geo, mi / (h_pred * h_true).sqrt(), epsilon = 1e-12);
        assert_relative_eq!(ari_mean, mi / (0.5 * (h_pred + h_true)), epsilon = 1e-12);
        assert_relative_eq!(min, mi / h_true, epsilon = 1e-12);
        assert!(min >= geo && geo >= ari_mean);
    }

    #[test]
    fn ari_matches_hand_counted_pairs() {
        // pred = (0,1,0,1) vs truth = (0,0,1,1): of the 6 sample pairs,
        // none agree in both partitions (Index = 0), row/column pair sums
        // are 2 and 2, so Expected = 2*2/6 = 2/3 and Max = 2, giving
        // (0 - 2/3) / (2 - 2/3) = -1/2.
        let pred = assignment(&[0, 1, 0, 1], 2);
        let truth = assignment(&[0, 0, 1, 1], 2);
        let s = ari(&pred, &truth).unwrap();
        assert!(!s.degenerate);
        assert_relative_eq!(s.value, -0.5, epsilon = 1e-15);
    }

    #[test]
    fn ari_degenerate_cases_flag_and_zero() {
        let single = assignment(&[0, 0, 0], 1);
        let s = ari(&single, &single).unwrap();
        assert_eq!(s.value, 0.0);
        assert!(s.degenerate);

        let lone_pred = assignment(&[0], 1);
        let lone_truth = assignment(&[0], 1);
        let s = ari(&lone_pred, &lone_truth).unwrap();
        assert!(s.degenerate);
    }

    #[test]
    fn accuracy_agrees_with_exhaustive_bijections_on_random_cases() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
        for _ in 0..60 {
            let n = rng.random_range(2..12);
            let kp = rng.random_range(1..5);
            let kt = rng.random_range(1..5);
            let pred = assignment(
                &(0..n).map(|_| rng.random_range(0..kp)).collect::<Vec<_>>(),
                kp,
            );
            let truth = assignment(
                &(0..n).map(|_| rng.random_range(0..kt)).collect::<Vec<_>>(),
                kt,
            );
            let fast = accuracy(&pred, &truth).unwrap();
            let slow = brute_force_accuracy(&pred, &truth);
            assert_eq!(fast, slow, "pred {:?} truth {:?}", pred.labels(), truth.labels());
        }
    }

    #[test]
    fn all_indices_stay_in_range_on_random_labelings() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let n = rng.random_range(2..30);
            let kp = rng.random_range(1..6);
            let kt = rng.random_range(1..6);
            let pred = assignment(
                &(0..n).map(|_| rng.random_range(0..kp)).collect::<Vec<_>>(),
                kp,
            );
            let truth = assignment(
                &(0..n).map(|_| rng.random_range(0..kt)).collect::<Vec<_>>(),
                kt,
            );
            let scores = score_all(&pred, &truth).unwrap();
            assert!((0.0..=1.0).contains(&scores.acc));
            assert!((0.0..=1.0).contains(&scores.nmi));
            assert!(scores.purity > 0.0 && scores.purity <= 1.0);
            assert!((-1.0..=1.0).contains(&scores.ari));
        }
    }

    #[test]
    fn length_mismatch_is_rejected() {
        let a = assignment(&[0, 1], 2);
        let b = assignment(&[0, 1, 0], 2);
        assert!(matches!(
            accuracy(&a, &b),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn contingency_table_tabulates_counts() {
        let pred = assignment(&[0, 0, 1, 1], 2);
        let truth = assignment(&[0, 1, 1, 1], 2);
        let t = ContingencyTable::from_assignments(&pred, &truth).unwrap();
        assert_eq!(t.count(0, 0), 1);
        assert_eq!(t.count(0, 1), 1);
        assert_eq!(t.count(1, 0), 0);
        assert_eq!(t.count(1, 1), 2);
        assert_eq!(t.row_sums(), vec![2, 2]);
        assert_eq!(t.col_sums(), vec![1, 3]);
        assert_eq!(t.n(), 4);
    }
}
