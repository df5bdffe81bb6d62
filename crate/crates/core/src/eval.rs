//! Confusion matrices, per-class accuracies, and hyperparameter grid
//! selection.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::mat::Mat;

/// Row-major `K x K` count matrix; rows are true classes, columns are
/// predicted classes.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConfusionMatrix {
    counts: Vec<u64>,
    k: usize,
    pub class_names: Vec<String>,
}

impl ConfusionMatrix {
    /// Empty matrix for streaming accumulation.
    pub fn new(k: usize) -> Self {
        ConfusionMatrix {
            counts: vec![0; k * k],
            k,
            class_names: Vec::new(),
        }
    }

    pub fn with_class_names(mut self, names: Vec<String>) -> Self {
        self.class_names = names;
        self
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Records one (true, predicted) observation.
    pub fn add(&mut self, truth: usize, predicted: usize) -> Result<()> {
        if truth >= self.k {
            return Err(Error::LabelOutOfRange {
                label: truth,
                k: self.k,
            });
        }
        if predicted >= self.k {
            return Err(Error::LabelOutOfRange {
                label: predicted,
                k: self.k,
            });
        }
        self.counts[truth * self.k + predicted] += 1;
        Ok(())
    }

    #[inline]
    pub fn count(&self, truth: usize, predicted: usize) -> u64 {
        self.counts[truth * self.k + predicted]
    }

    pub fn row_sum(&self, truth: usize) -> u64 {
        self.counts[truth * self.k..(truth + 1) * self.k]
            .iter()
            .sum()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn trace(&self) -> u64 {
        (0..self.k).map(|i| self.count(i, i)).sum()
    }
}

/// Batch construction from parallel label sequences.
pub fn confusion(y_true: &[usize], y_pred: &[usize], k: usize) -> Result<ConfusionMatrix> {
    if y_true.len() != y_pred.len() {
        return Err(Error::DimensionMismatch {
            expected: y_true.len(),
            got: y_pred.len(),
        });
    }
    let mut cm = ConfusionMatrix::new(k);
    for (&t, &p) in y_true.iter().zip(y_pred) {
        cm.add(t, p)?;
    }
    Ok(cm)
}

/// Accuracy summary of a confusion matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct AccuracyReport {
    /// Diagonal over row sum, one entry per class.
    pub per_class: Vec<f64>,
    /// Unweighted mean of the per-class accuracies.
    pub mean_per_class: f64,
    /// Plain accuracy: trace over total.
    pub overall: f64,
}

/// Per-class and mean accuracies. Every class must have at least one true
/// sample.
pub fn accuracies(cm: &ConfusionMatrix) -> Result<AccuracyReport> {
    let k = cm.k();
    let mut per_class = Vec::with_capacity(k);
    for class in 0..k {
        let row = cm.row_sum(class);
        if row == 0 {
            return Err(Error::EmptyClass { class });
        }
        per_class.push(cm.count(class, class) as f64 / row as f64);
    }
    let mean_per_class = per_class.iter().sum::<f64>() / k as f64;
    let overall = cm.trace() as f64 / cm.total() as f64;
    Ok(AccuracyReport {
        per_class,
        mean_per_class,
        overall,
    })
}

/// One grid point's outcome.
#[derive(Clone, Debug, PartialEq)]
pub struct GridRow<P> {
    pub params: P,
    pub mean_per_class_accuracy: f64,
}

/// Trains one model per grid point, scores each on the held-out set by
/// mean per-class accuracy, and returns the best (ties resolved toward
/// the earlier grid entry) together with the full score table.
#[allow(clippy::too_many_arguments)]
pub fn grid_select<P: Clone, M>(
    grid: &[P],
    x_train: &Mat,
    y_train: &[usize],
    x_holdout: &Mat,
    y_holdout: &[usize],
    class_count: usize,
    mut train: impl FnMut(&P, &Mat, &[usize]) -> Result<M>,
    mut predict: impl FnMut(&M, &[f64]) -> Result<usize>,
) -> Result<(P, M, Vec<GridRow<P>>)> {
    if grid.is_empty() {
        return Err(Error::InvalidParameter("parameter grid is empty"));
    }
    let mut report = Vec::with_capacity(grid.len());
    let mut best: Option<(usize, f64, M)> = None;
    for (i, params) in grid.iter().enumerate() {
        let model = train(params, x_train, y_train)?;
        let mut y_pred = Vec::with_capacity(y_holdout.len());
        for r in 0..x_holdout.rows() {
            y_pred.push(predict(&model, x_holdout.row(r))?);
        }
        let cm = confusion(y_holdout, &y_pred, class_count)?;
        let score = accuracies(&cm)?.mean_per_class;
        report.push(GridRow {
            params: params.clone(),
            mean_per_class_accuracy: score,
        });
        let better = match &best {
            None => true,
            Some((_, best_score, _)) => score > *best_score,
        };
        if better {
            best = Some((i, score, model));
        }
    }
    let (idx, _, model) = best.expect("nonempty grid");
    Ok((grid[idx].clone(), model, report))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_predictions_are_diagonal() {
        let y = [0usize, 1, 2, 1, 0, 2, 2];
        let cm = confusion(&y, &y, 3).unwrap();
        assert_eq!(cm.trace(), 7);
        assert_eq!(cm.total(), 7);
        let acc = accuracies(&cm).unwrap();
        assert_eq!(acc.per_class, vec![1.0, 1.0, 1.0]);
        assert_eq!(acc.mean_per_class, 1.0);
        assert_eq!(acc.overall, 1.0);
    }

    #[test]
    fn single_offdiagonal_sample() {
        let cm = confusion(&[0], &[3], 4).unwrap();
        assert_eq!(cm.count(0, 3), 1);
        assert_eq!(cm.total(), 1);
        assert_eq!(cm.trace(), 0);
    }

    #[test]
    fn row_sums_match_true_counts() {
        let y_true = [0usize, 0, 1, 1, 1, 2];
        let y_pred = [1usize, 0, 1, 2, 1, 2];
        let cm = confusion(&y_true, &y_pred, 3).unwrap();
        assert_eq!(cm.row_sum(0), 2);
        assert_eq!(cm.row_sum(1), 3);
        assert_eq!(cm.row_sum(2), 1);
    }

    #[test]
    fn hand_worked_two_class_accuracies() {
        // [[3,1],[2,2]] -> per-class 0.75 and 0.5, mean 0.625
        let mut cm = ConfusionMatrix::new(2);
        for _ in 0..3 {
            cm.add(0, 0).unwrap();
        }
        cm.add(0, 1).unwrap();
        cm.add(1, 0).unwrap();
        cm.add(1, 0).unwrap();
        for _ in 0..2 {
            cm.add(1, 1).unwrap();
        }
        let acc = accuracies(&cm).unwrap();
        assert_eq!(acc.per_class, vec![0.75, 0.5]);
        assert_eq!(acc.mean_per_class, 0.625);
        assert!((acc.overall - 5.0 / 8.0).abs() < 1e-15);
    }

    #[test]
    fn streaming_equals_batch() {
        let y_true = [0usize, 1, 2, 0, 1, 2, 2, 0];
        let y_pred = [0usize, 2, 2, 1, 1, 0, 2, 0];
        let batch = confusion(&y_true, &y_pred, 3).unwrap();
        let mut stream = ConfusionMatrix::new(3);
        for (&t, &p) in y_true.iter().zip(&y_pred) {
            stream.add(t, p).unwrap();
        }
        assert_eq!(batch, stream);
        assert_eq!(accuracies(&batch).unwrap(), accuracies(&stream).unwrap());
    }

    #[test]
    fn duplicating_a_class_leaves_mean_unchanged() {
        let y_true = [0usize, 0, 1, 1, 1];
        let y_pred = [0usize, 1, 1, 1, 0];
        let base = accuracies(&confusion(&y_true, &y_pred, 2).unwrap()).unwrap();
        // duplicate every class-0 sample
        let y_true2 = [0usize, 0, 0, 0, 1, 1, 1];
        let y_pred2 = [0usize, 1, 0, 1, 1, 1, 0];
        let dup = accuracies(&confusion(&y_true2, &y_pred2, 2).unwrap()).unwrap();
        assert!((base.mean_per_class - dup.mean_per_class).abs() < 1e-15);
        assert!(base.overall != dup.overall);
    }

    #[test]
    fn empty_class_and_bad_labels_rejected() {
        let cm = confusion(&[0usize, 0], &[0, 1], 3).unwrap();
        assert!(matches!(accuracies(&cm), Err(Error::EmptyClass { class: 1 })));
        assert!(matches!(
            confusion(&[5], &[0], 3),
            Err(Error::LabelOutOfRange { label: 5, k: 3 })
        ));
        assert!(confusion(&[0, 1], &[0], 2).is_err());
    }

    #[test]
    fn table_count_multiset_reproduces_mean_accuracy() {
        // the 10-class count table whose per-class accuracies average to
        // 0.807, i.e. 81% to table precision
        let rows: [[u64; 10]; 10] = [
            [41, 0, 2, 8, 7, 0, 4, 0, 0, 0],
            [1, 49, 2, 0, 3, 1, 0, 0, 1, 0],
            [1, 2, 45, 2, 1, 0, 1, 0, 0, 0],
            [5, 0, 0, 39, 1, 0, 3, 1, 0, 0],
            [3, 0, 2, 1, 36, 0, 7, 2, 1, 0],
            [0, 1, 0, 0, 2, 53, 1, 0, 1, 1],
            [0, 0, 1, 4, 4, 0, 33, 2, 2, 0],
            [3, 0, 0, 1, 0, 0, 2, 48, 4, 0],
            [1, 3, 3, 0, 1, 1, 4, 2, 46, 0],
            [0, 0, 0, 0, 0, 0, 0, 0, 0, 54],
        ];
        let mut y_true = Vec::new();
        let mut y_pred = Vec::new();
        for (t, row) in rows.iter().enumerate() {
            for (p, &n) in row.iter().enumerate() {
                for _ in 0..n {
                    y_true.push(t);
                    y_pred.push(p);
                }
            }
        }
        let acc = accuracies(&confusion(&y_true, &y_pred, 10).unwrap()).unwrap();
        assert_eq!(libm::round(acc.mean_per_class * 100.0) as i64, 81);
    }

    #[test]
    fn grid_select_prefers_better_and_breaks_ties_in_order() {
        // fake "model": predicts (sample index + shift) % 2; shift 0 is
        // perfect on identity labels, shift 1 is never right
        let x = Mat::from_fn(8, 1, |r, _| r as f64);
        let y: Vec<usize> = (0..8).map(|i| i % 2).collect();
        let grid = [1usize, 0, 2];
        let (best, _, report) = grid_select(
            &grid,
            &x,
            &y,
            &x,
            &y,
            2,
            |&shift, _, _| Ok(shift),
            |&shift, row| Ok(((row[0] as usize) + shift) % 2),
        )
        .unwrap();
        assert_eq!(best, 0);
        assert_eq!(report.len(), 3);
        assert_eq!(report[1].mean_per_class_accuracy, 1.0);

        // tie: identical scores pick the first grid entry
        let (best, _, _) = grid_select(
            &grid,
            &x,
            &y,
            &x,
            &y,
            2,
            |&shift, _, _| Ok(shift),
            |_, row| Ok((row[0] as usize) % 2),
        )
        .unwrap();
        assert_eq!(best, 1);
    }

    #[test]
    fn single_point_grid_returns_it() {
        let x = Mat::from_fn(4, 1, |r, _| r as f64);
        let y = [0usize, 1, 0, 1];
        let (best, _, report) = grid_select(
            &[42usize],
            &x,
            &y,
            &x,
            &y,
            2,
            |&p, _, _| Ok(p),
            |_, row| Ok((row[0] as usize) % 2),
        )
        .unwrap();
        assert_eq!(best, 42);
        assert_eq!(report.len(), 1);
    }
}
