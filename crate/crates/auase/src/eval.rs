//! Downstream evaluation: k-nearest-neighbour classification, temporal
//! train/test splits, classification metrics, link prediction, and
//! alpha selection by temporal cross-validation.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use thiserror::Error;

use crate::embedding::{auase, EmbedError, EmbeddingSequence};
use crate::mat::DenseMatrix;
use crate::model::DynamicAttributedNetwork;
use crate::svd::SvdOptions;
use crate::util::derive_seed;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("labels and points disagree in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("empty input")]
    Empty,
    #[error("k must be >= 1")]
    BadK,
    #[error("train fraction must lie in (0, 1), got {0}")]
    BadFraction(f64),
    #[error("need at least two intervals, got {0}")]
    TooFewIntervals(usize),
    #[error("interval {0} has no positive examples")]
    NoPositives(usize),
    #[error("could not sample enough non-edges for interval {0}")]
    NegativesExhausted(usize),
    #[error("scores and labels disagree in length ({0} vs {1})")]
    ScoreMismatch(usize, usize),
    #[error("AUC needs both classes present")]
    OneClassOnly,
    #[error(transparent)]
    Embed(#[from] EmbedError),
}

pub const DEFAULT_KNN: usize = 15;

/// Split `intervals` into train and test: train is the first
/// ceil(frac * intervals), test the rest. Both parts are non-empty.
pub fn temporal_split(intervals: usize, frac: f64) -> Result<(Vec<usize>, Vec<usize>), EvalError> {
    if !(0.0..1.0).contains(&frac) || frac <= 0.0 || !frac.is_finite() {
        return Err(EvalError::BadFraction(frac));
    }
    if intervals < 2 {
        return Err(EvalError::TooFewIntervals(intervals));
    }
    let cut = ((frac * intervals as f64).ceil() as usize).clamp(1, intervals - 1);
    Ok(((0..cut).collect(), (cut..intervals).collect()))
}

/// Classify each query row by majority vote among its `k` nearest training
/// rows (Euclidean distance). Distance ties break toward the lower training
/// index, vote ties toward the smallest class label.
pub fn knn_classify(
    train: &DenseMatrix,
    labels: &[usize],
    query: &DenseMatrix,
    k: usize,
) -> Result<Vec<usize>, EvalError> {
    let votes = knn_votes(train, labels, query, k)?;
    Ok(votes
        .into_iter()
        .map(|counts| {
            counts
                .into_iter()
                .enumerate()
                .max_by(|(ca, va), (cb, vb)| va.cmp(vb).then(cb.cmp(ca)))
                .map(|(c, _)| c)
                .unwrap()
        })
        .collect())
}

/// For binary labels, the fraction of the `k` nearest training rows labeled
/// 1 — a score in [0, 1] suitable for ranking metrics.
pub fn knn_score(
    train: &DenseMatrix,
    labels: &[usize],
    query: &DenseMatrix,
    k: usize,
) -> Result<Vec<f64>, EvalError> {
    let k_eff = k.min(train.rows());
    let votes = knn_votes(train, labels, query, k)?;
    Ok(votes
        .into_iter()
        .map(|counts| counts.get(1).copied().unwrap_or(0) as f64 / k_eff as f64)
        .collect())
}

fn knn_votes(
    train: &DenseMatrix,
    labels: &[usize],
    query: &DenseMatrix,
    k: usize,
) -> Result<Vec<Vec<usize>>, EvalError> {
    if k == 0 {
        return Err(EvalError::BadK);
    }
    if train.rows() != labels.len() {
        return Err(EvalError::LengthMismatch(train.rows(), labels.len()));
    }
    if train.rows() == 0 || query.rows() == 0 {
        return Err(EvalError::Empty);
    }
    let n_classes = labels.iter().copied().max().unwrap() + 1;
    let k = k.min(train.rows());
    let mut all_votes = Vec::with_capacity(query.rows());
    for q in 0..query.rows() {
        let qrow = query.row(q);
        let mut dists: Vec<(f64, usize)> = (0..train.rows())
            .map(|i| {
                let d: f64 = train
                    .row(i)
                    .iter()
                    .zip(qrow)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum();
                (d, i)
            })
            .collect();
        dists.select_nth_unstable_by(k - 1, |a, b| {
            a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1))
        });
        let mut counts = vec![0usize; n_classes];
        for &(_, i) in dists.iter().take(k) {
            counts[labels[i]] += 1;
        }
        all_votes.push(counts);
    }
    Ok(all_votes)
}

pub fn accuracy(pred: &[usize], truth: &[usize]) -> Result<f64, EvalError> {
    if pred.len() != truth.len() {
        return Err(EvalError::LengthMismatch(pred.len(), truth.len()));
    }
    if pred.is_empty() {
        return Err(EvalError::Empty);
    }
    let hits = pred.iter().zip(truth).filter(|(a, b)| a == b).count();
    Ok(hits as f64 / pred.len() as f64)
}

/// Accuracy of always predicting the most common training label.
/// Ties break toward the smallest label.
pub fn majority_baseline(train_labels: &[usize], truth: &[usize]) -> Result<f64, EvalError> {
    if train_labels.is_empty() || truth.is_empty() {
        return Err(EvalError::Empty);
    }
    let n_classes = train_labels.iter().copied().max().unwrap() + 1;
    let mut counts = vec![0usize; n_classes];
    for &l in train_labels {
        counts[l] += 1;
    }
    let majority = counts
        .iter()
        .enumerate()
        .max_by(|(ca, va), (cb, vb)| va.cmp(vb).then(cb.cmp(ca)))
        .map(|(c, _)| c)
        .unwrap();
    let pred = vec![majority; truth.len()];
    accuracy(&pred, truth)
}

#[derive(Debug, Clone)]
pub struct F1Report {
    pub micro: f64,
    pub macro_: f64,
    pub weighted: f64,
    pub per_class: Vec<f64>,
}

/// Per-class, micro-, macro- and support-weighted F1. Classes absent from
/// the truth are excluded from the macro and weighted averages.
pub fn f1_scores(pred: &[usize], truth: &[usize]) -> Result<F1Report, EvalError> {
    if pred.len() != truth.len() {
        return Err(EvalError::LengthMismatch(pred.len(), truth.len()));
    }
    if pred.is_empty() {
        return Err(EvalError::Empty);
    }
    let n_classes = pred.iter().chain(truth).copied().max().unwrap() + 1;
    let mut tp = vec![0usize; n_classes];
    let mut fp = vec![0usize; n_classes];
    let mut fnn = vec![0usize; n_classes];
    for (&p, &t) in pred.iter().zip(truth) {
        if p == t {
            tp[p] += 1;
        } else {
            fp[p] += 1;
            fnn[t] += 1;
        }
    }
    let f1 = |tp: usize, fp: usize, fnn: usize| -> f64 {
        let denom = 2 * tp + fp + fnn;
        if denom == 0 {
            0.0
        } else {
            2.0 * tp as f64 / denom as f64
        }
    };
    let per_class: Vec<f64> = (0..n_classes).map(|c| f1(tp[c], fp[c], fnn[c])).collect();
    let support: Vec<usize> = (0..n_classes).map(|c| tp[c] + fnn[c]).collect();
    let present: Vec<usize> = (0..n_classes).filter(|&c| support[c] > 0).collect();
    let macro_ = present.iter().map(|&c| per_class[c]).sum::<f64>() / present.len() as f64;
    let total: usize = support.iter().sum();
    let weighted = present
        .iter()
        .map(|&c| per_class[c] * support[c] as f64 / total as f64)
        .sum::<f64>();
    let tp_sum: usize = tp.iter().sum();
    let fp_sum: usize = fp.iter().sum();
    let fn_sum: usize = fnn.iter().sum();
    let micro = f1(tp_sum, fp_sum, fn_sum);
    Ok(F1Report { micro, macro_, weighted, per_class })
}

/// Area under the ROC curve via the Mann-Whitney statistic with average
/// ranks for tied scores. Labels must be 0/1 with both classes present.
pub fn auc_roc(scores: &[f64], labels: &[usize]) -> Result<f64, EvalError> {
    if scores.len() != labels.len() {
        return Err(EvalError::ScoreMismatch(scores.len(), labels.len()));
    }
    if scores.is_empty() {
        return Err(EvalError::Empty);
    }
    let n_pos = labels.iter().filter(|&&l| l == 1).count();
    let n_neg = labels.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(EvalError::OneClassOnly);
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].partial_cmp(&scores[b]).unwrap());
    let mut ranks = vec![0.0f64; scores.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        let avg_rank = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            ranks[idx] = avg_rank;
        }
        i = j + 1;
    }
    let rank_sum_pos: f64 = ranks
        .iter()
        .zip(labels)
        .filter(|(_, &l)| l == 1)
        .map(|(&r, _)| r)
        .sum();
    let u = rank_sum_pos - n_pos as f64 * (n_pos as f64 + 1.0) / 2.0;
    Ok(u / (n_pos as f64 * n_neg as f64))
}

/// A node pair at some interval, labeled by whether an edge appears in the
/// next interval's adjacency matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LinkSample {
    pub i: usize,
    pub j: usize,
    pub interval: usize,
    pub label: usize,
}

/// Build a balanced link-prediction sample for `interval`: every edge of the
/// next interval (i < j, optionally capped) as positives, and an equal
/// number of uniformly sampled non-edges as negatives. Rejection sampling
/// gives up after 100x oversampling.
pub fn link_samples(
    network: &DynamicAttributedNetwork,
    interval: usize,
    cap: Option<usize>,
    seed: u64,
) -> Result<Vec<LinkSample>, EvalError> {
    let t_max = network.intervals();
    if interval + 1 >= t_max {
        return Err(EvalError::TooFewIntervals(t_max));
    }
    let next = &network.adjacency[interval + 1];
    let n = network.n();
    let mut positives: Vec<(usize, usize)> = next
        .to_triplets()
        .into_iter()
        .filter(|&(i, j, _)| i < j)
        .map(|(i, j, _)| (i, j))
        .collect();
    if positives.is_empty() {
        return Err(EvalError::NoPositives(interval));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    if let Some(cap) = cap {
        if positives.len() > cap {
            // deterministic subsample: partial Fisher-Yates
            for idx in 0..cap {
                let swap = rng.gen_range(idx..positives.len());
                positives.swap(idx, swap);
            }
            positives.truncate(cap);
            positives.sort_unstable();
        }
    }
    let is_edge = |i: usize, j: usize| next.row_entries(i).any(|(c, _)| c == j);
    let mut negatives = Vec::with_capacity(positives.len());
    let mut attempts = 0usize;
    let budget = 100 * positives.len();
    while negatives.len() < positives.len() {
        attempts += 1;
        if attempts > budget {
            return Err(EvalError::NegativesExhausted(interval));
        }
        let i = rng.gen_range(0..n);
        let j = rng.gen_range(0..n);
        if i == j {
            continue;
        }
        let (i, j) = (i.min(j), i.max(j));
        if !is_edge(i, j) {
            negatives.push((i, j));
        }
    }
    let mut out = Vec::with_capacity(2 * positives.len());
    for (i, j) in positives {
        out.push(LinkSample { i, j, interval, label: 1 });
    }
    for (i, j) in negatives {
        out.push(LinkSample { i, j, interval, label: 0 });
    }
    Ok(out)
}

/// Pair feature for link prediction: element-wise product of the two node
/// embeddings concatenated with their absolute difference.
fn pair_features(emb: &EmbeddingSequence, samples: &[LinkSample]) -> DenseMatrix {
    let d = emb.dim();
    let mut data = Vec::with_capacity(samples.len() * 2 * d);
    for s in samples {
        let yi = emb.block(s.interval).row(s.i);
        let yj = emb.block(s.interval).row(s.j);
        for k in 0..d {
            data.push(yi[k] * yj[k]);
        }
        for k in 0..d {
            data.push((yi[k] - yj[k]).abs());
        }
    }
    DenseMatrix::from_row_major(samples.len(), 2 * d, data).unwrap()
}

#[derive(Debug, Clone)]
pub struct LinkPredictionReport {
    pub aucs: Vec<f64>,
    pub mean_auc: f64,
    /// Normal-approximation 90% confidence interval for the mean.
    pub ci_low: f64,
    pub ci_high: f64,
}

/// Link prediction: embed the network without its final interval, train a
/// k-NN scorer on pairs from intervals 0..T-3 labeled by the following
/// interval's edges, and measure ROC AUC on pairs at interval T-2 labeled by
/// the held-out final adjacency matrix. Repeated `reps` times with fresh
/// pair samples.
pub fn link_prediction_experiment(
    network: &DynamicAttributedNetwork,
    d: usize,
    alpha: f64,
    opts: &SvdOptions,
    reps: usize,
    train_cap: Option<usize>,
    seed: u64,
) -> Result<LinkPredictionReport, EvalError> {
    let t_max = network.intervals();
    if t_max < 3 {
        return Err(EvalError::TooFewIntervals(t_max));
    }
    // hide the final interval from the embedding; its edges are the test
    // labels
    let visible = DynamicAttributedNetwork::new(
        network.adjacency[..t_max - 1].to_vec(),
        network.covariates[..t_max - 1].to_vec(),
    )
    .expect("prefix of a valid network is valid");
    let emb = auase(&visible, d, alpha, opts)?;

    let mut aucs = Vec::with_capacity(reps);
    for rep in 0..reps {
        let rep_seed = derive_seed(seed, rep as u64);
        let mut train_samples = Vec::new();
        for t in 0..t_max - 2 {
            train_samples.extend(link_samples(
                network,
                t,
                train_cap,
                derive_seed(rep_seed, t as u64),
            )?);
        }
        let test_samples =
            link_samples(network, t_max - 2, train_cap, derive_seed(rep_seed, 0xffff))?;
        let train_x = pair_features(&emb, &train_samples);
        let train_y: Vec<usize> = train_samples.iter().map(|s| s.label).collect();
        let test_x = pair_features(&emb, &test_samples);
        let test_y: Vec<usize> = test_samples.iter().map(|s| s.label).collect();
        let scores = knn_score(&train_x, &train_y, &test_x, DEFAULT_KNN)?;
        aucs.push(auc_roc(&scores, &test_y)?);
    }
    let mean = aucs.iter().sum::<f64>() / reps as f64;
    let var = if reps > 1 {
        aucs.iter().map(|a| (a - mean) * (a - mean)).sum::<f64>() / (reps - 1) as f64
    } else {
        0.0
    };
    let half = 1.645 * (var / reps as f64).sqrt();
    Ok(LinkPredictionReport { aucs, mean_auc: mean, ci_low: mean - half, ci_high: mean + half })
}

/// Node classification over a temporal split: train k-NN on all (node,
/// interval) rows from the train intervals and report accuracy and F1 on the
/// test intervals. `labels[t][i]` is node i's label at interval t.
pub fn classification_experiment(
    emb: &EmbeddingSequence,
    labels: &[Vec<usize>],
    frac: f64,
    k: usize,
) -> Result<(f64, F1Report), EvalError> {
    if labels.len() != emb.intervals() {
        return Err(EvalError::LengthMismatch(labels.len(), emb.intervals()));
    }
    let (train_ts, test_ts) = temporal_split(emb.intervals(), frac)?;
    let gather = |ts: &[usize]| -> (DenseMatrix, Vec<usize>) {
        let blocks: Vec<&DenseMatrix> = ts.iter().map(|&t| emb.block(t)).collect();
        let x = DenseMatrix::vstack(&blocks).unwrap();
        let y: Vec<usize> = ts.iter().flat_map(|&t| labels[t].iter().copied()).collect();
        (x, y)
    };
    let (train_x, train_y) = gather(&train_ts);
    let (test_x, test_y) = gather(&test_ts);
    let pred = knn_classify(&train_x, &train_y, &test_x, k)?;
    let acc = accuracy(&pred, &test_y)?;
    let f1 = f1_scores(&pred, &test_y)?;
    Ok((acc, f1))
}

/// Choose alpha by temporal cross-validation: embed the network once per
/// candidate, train on the early train intervals, validate on the last
/// train interval, and return the candidate with the best validation
/// accuracy (ties go to the smaller alpha).
pub fn cross_validate_alpha(
    network: &DynamicAttributedNetwork,
    labels: &[Vec<usize>],
    d: usize,
    alphas: &[f64],
    opts: &SvdOptions,
    frac: f64,
    k: usize,
) -> Result<(f64, Vec<f64>), EvalError> {
    if alphas.is_empty() {
        return Err(EvalError::Empty);
    }
    let (train_ts, _) = temporal_split(network.intervals(), frac)?;
    if train_ts.len() < 2 {
        return Err(EvalError::TooFewIntervals(train_ts.len()));
    }
    let (fit_ts, val_t) = (&train_ts[..train_ts.len() - 1], train_ts[train_ts.len() - 1]);
    let mut accs = Vec::with_capacity(alphas.len());
    for &alpha in alphas {
        let emb = auase(network, d, alpha, opts)?;
        let blocks: Vec<&DenseMatrix> = fit_ts.iter().map(|&t| emb.block(t)).collect();
        let train_x = DenseMatrix::vstack(&blocks).unwrap();
        let train_y: Vec<usize> =
            fit_ts.iter().flat_map(|&t| labels[t].iter().copied()).collect();
        let pred = knn_classify(&train_x, &train_y, emb.block(val_t), k)?;
        accs.push(accuracy(&pred, &labels[val_t])?);
    }
    let mut best = 0;
    for i in 1..accs.len() {
        if accs[i] > accs[best] + 1e-12 {
            best = i;
        }
    }
    Ok((alphas[best], accs))
}
