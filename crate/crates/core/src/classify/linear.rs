use super::{validate_samples, Label, LabeledSample};
use crate::error::{Error, Result};
use crate::features::FeatureVector;

/// One-vs-rest linear scorer: one weight row per class over `[x; 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearModel {
    classes: Vec<Label>,
    dim: usize,
    ridge: f64,
    /// Row-major, `classes.len()` rows of `dim + 1` (bias last).
    weights: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LinearPrediction {
    pub label: Label,
    pub scores: Vec<(Label, f64)>,
}

/// Fits each class row by ridge regression onto +1 (class) / -1 (rest)
/// targets, solving `(X^T X + ridge I) w = X^T y` with X the bias-augmented
/// design matrix.
pub fn linear_train(samples: &[LabeledSample], ridge: f64) -> Result<LinearModel> {
    let dim = validate_samples(samples)?;
    if !(ridge >= 0.0 && ridge.is_finite()) {
        return Err(Error::Config(format!("ridge must be finite and >= 0, got {ridge}")));
    }
    let mut classes: Vec<Label> = samples.iter().map(|s| s.label).collect();
    classes.sort_unstable();
    classes.dedup();
    if classes.len() < 2 {
        return Err(Error::Config(
            "linear classifier needs at least two classes".into(),
        ));
    }

    let (mut gram, mut rhs) = normal_equations(samples, &classes, ridge);
    let n = dim + 1;
    cholesky_solve(&mut gram, n, &mut rhs, classes.len())?;

    // rhs holds the solution as n x classes; store one row per class
    let mut weights = vec![0.0; classes.len() * n];
    for j in 0..n {
        for c in 0..classes.len() {
            weights[c * n + j] = rhs[j * classes.len() + c];
        }
    }
    Ok(LinearModel {
        classes,
        dim,
        ridge,
        weights,
    })
}

/// `X^T X + ridge I` (n x n) and `X^T Y` (n x classes), row-major.
fn normal_equations(samples: &[LabeledSample], classes: &[Label], ridge: f64) -> (Vec<f64>, Vec<f64>) {
    let n = samples[0].features.dim() + 1;
    let nc = classes.len();
    let mut gram = vec![0.0; n * n];
    let mut rhs = vec![0.0; n * nc];
    let mut x = vec![1.0; n];
    for s in samples {
        x[..n - 1].copy_from_slice(s.features.as_slice());
        for i in 0..n {
            let xi = x[i];
            if xi == 0.0 {
                continue;
            }
            let row = &mut gram[i * n..(i + 1) * n];
            for j in 0..=i {
                row[j] += xi * x[j];
            }
            for (c, &label) in classes.iter().enumerate() {
                rhs[i * nc + c] += if label == s.label { xi } else { -xi };
            }
        }
    }
    for i in 0..n {
        for j in 0..i {
            gram[j * n + i] = gram[i * n + j];
        }
        gram[i * n + i] += ridge;
    }
    (gram, rhs)
}

/// In-place Cholesky factorization and solve for `nrhs` right-hand sides.
fn cholesky_solve(a: &mut [f64], n: usize, b: &mut [f64], nrhs: usize) -> Result<()> {
    let max_diag = (0..n).map(|i| a[i * n + i].abs()).fold(0.0, f64::max);
    let tol = max_diag * n as f64 * f64::EPSILON;
    for j in 0..n {
        let mut d = a[j * n + j];
        for k in 0..j {
            d -= a[j * n + k] * a[j * n + k];
        }
        if d.partial_cmp(&tol) != Some(std::cmp::Ordering::Greater) {
            return Err(Error::IllConditioned);
        }
        let d = d.sqrt();
        a[j * n + j] = d;
        for i in j + 1..n {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= a[i * n + k] * a[j * n + k];
            }
            a[i * n + j] = s / d;
        }
    }
    for c in 0..nrhs {
        // L y = b
        for i in 0..n {
            let mut s = b[i * nrhs + c];
            for k in 0..i {
                s -= a[i * n + k] * b[k * nrhs + c];
            }
            b[i * nrhs + c] = s / a[i * n + i];
        }
        // L^T x = y
        for i in (0..n).rev() {
            let mut s = b[i * nrhs + c];
            for k in i + 1..n {
                s -= a[k * n + i] * b[k * nrhs + c];
            }
            b[i * nrhs + c] = s / a[i * n + i];
        }
    }
    Ok(())
}

impl LinearModel {
    /// Builds a model from explicit weight rows (bias last).
    pub fn from_weights(classes: Vec<Label>, dim: usize, ridge: f64, weights: Vec<f64>) -> Result<Self> {
        if classes.is_empty() || weights.len() != classes.len() * (dim + 1) {
            return Err(Error::Parse(format!(
                "{} weights for {} classes of dimension {dim}",
                weights.len(),
                classes.len()
            )));
        }
        if classes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Parse("linear model classes must be strictly increasing".into()));
        }
        Ok(Self {
            classes,
            dim,
            ridge,
            weights,
        })
    }

    pub fn classes(&self) -> &[Label] {
        &self.classes
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ridge(&self) -> f64 {
        self.ridge
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Weight row of the `i`-th class, bias last.
    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.dim + 1;
        &self.weights[i * n..(i + 1) * n]
    }

    /// Argmax of `w_c . [x; 1]`; ties go to the smaller class id.
    pub fn predict(&self, x: &FeatureVector) -> Result<LinearPrediction> {
        if x.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.dim(),
            });
        }
        let scores: Vec<(Label, f64)> = self
            .classes
            .iter()
            .enumerate()
            .map(|(i, &label)| {
                let w = self.row(i);
                let dot: f64 = w[..self.dim].iter().zip(x.as_slice()).map(|(a, b)| a * b).sum();
                (label, dot + w[self.dim])
            })
            .collect();
        let mut best = 0;
        for (i, s) in scores.iter().enumerate() {
            if s.1 > scores[best].1 {
                best = i;
            }
        }
        Ok(LinearPrediction {
            label: scores[best].0,
            scores,
        })
    }
}
