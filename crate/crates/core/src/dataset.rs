//! EEG data structures: continuous recordings, stimulus logs, and the
//! channel-subtrial matrix the classifiers consume.
//!
//! A *subtrial* is one stimulus presentation; its epoch spans all channels.
//! A *channel-subtrial* is a single channel's one-second post-stimulus window
//! treated as an independent classification row. Slicing a recording with
//! `C` channels and `S` onsets yields `S * C` rows, onset-major and
//! channel-minor, all rows of one subtrial sharing a `group_id` (the onset
//! index) and a label.
//!
//! Splits and class balancing always operate on whole subtrial groups so a
//! subtrial's channels never straddle the train/test boundary.

use ndarray::{Array2, ArrayView1};
use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::seed::stream_rng;

/// Continuous multi-channel EEG, `n_channels x n_timepoints`.
#[derive(Debug, Clone, PartialEq)]
pub struct Recording {
    samples: Array2<f64>,
    sampling_rate_hz: f64,
    channel_names: Vec<String>,
}

impl Recording {
    pub fn new(
        samples: Array2<f64>,
        sampling_rate_hz: f64,
        channel_names: Vec<String>,
    ) -> Result<Self> {
        if samples.nrows() == 0 || samples.ncols() == 0 {
            return Err(Error::Schema(format!(
                "recording must be non-empty, got {}x{}",
                samples.nrows(),
                samples.ncols()
            )));
        }
        if !(sampling_rate_hz > 0.0) {
            return Err(Error::Schema(format!(
                "sampling rate must be positive, got {sampling_rate_hz}"
            )));
        }
        if channel_names.len() != samples.nrows() {
            return Err(Error::Schema(format!(
                "{} channel names for {} channels",
                channel_names.len(),
                samples.nrows()
            )));
        }
        let mut seen = std::collections::HashSet::new();
        for name in &channel_names {
            if !seen.insert(name.as_str()) {
                return Err(Error::Schema(format!("duplicate channel name '{name}'")));
            }
        }
        Ok(Self {
            samples,
            sampling_rate_hz,
            channel_names,
        })
    }

    pub fn samples(&self) -> &Array2<f64> {
        &self.samples
    }

    pub fn n_channels(&self) -> usize {
        self.samples.nrows()
    }

    pub fn n_timepoints(&self) -> usize {
        self.samples.ncols()
    }

    pub fn sampling_rate_hz(&self) -> f64 {
        self.sampling_rate_hz
    }

    pub fn channel_names(&self) -> &[String] {
        &self.channel_names
    }

    pub fn channel(&self, index: usize) -> ArrayView1<'_, f64> {
        self.samples.row(index)
    }

    /// Same recording with `samples` replaced (used by the filter stage).
    pub fn with_samples(&self, samples: Array2<f64>) -> Result<Self> {
        Self::new(samples, self.sampling_rate_hz, self.channel_names.clone())
    }

    /// Keeps only the named channels, in the order given.
    pub fn select_channels(&self, names: &[String]) -> Result<Self> {
        let mut rows = Vec::with_capacity(names.len());
        for name in names {
            let idx = self
                .channel_names
                .iter()
                .position(|n| n == name)
                .ok_or_else(|| Error::Schema(format!("no channel named '{name}'")))?;
            rows.push(idx);
        }
        let samples = ndarray::stack(
            ndarray::Axis(0),
            &rows.iter().map(|&i| self.samples.row(i)).collect::<Vec<_>>(),
        )
        .expect("rows share length");
        Self::new(samples, self.sampling_rate_hz, names.to_vec())
    }
}

/// Stimulus onsets (sample indices) with their binary labels
/// (1 = target, 0 = non-target).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StimulusLog {
    onsets: Vec<usize>,
    labels: Vec<usize>,
}

impl StimulusLog {
    pub fn new(onsets: Vec<usize>, labels: Vec<usize>) -> Result<Self> {
        if onsets.len() != labels.len() {
            return Err(Error::Schema(format!(
                "{} onsets but {} labels",
                onsets.len(),
                labels.len()
            )));
        }
        if onsets.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Schema("onsets must be strictly increasing".into()));
        }
        if labels.iter().any(|&l| l > 1) {
            return Err(Error::Schema("labels must be 0 or 1".into()));
        }
        Ok(Self { onsets, labels })
    }

    pub fn len(&self) -> usize {
        self.onsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.onsets.is_empty()
    }

    pub fn onsets(&self) -> &[usize] {
        &self.onsets
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    /// Checks that every onset leaves room for a `window_samples`-long epoch.
    pub fn validate_against(&self, rec: &Recording, window_samples: usize) -> Result<()> {
        for &onset in &self.onsets {
            if onset + window_samples > rec.n_timepoints() {
                return Err(Error::Range(format!(
                    "onset {onset} + window {window_samples} exceeds {} timepoints",
                    rec.n_timepoints()
                )));
            }
        }
        Ok(())
    }
}

/// Matrix of channel-subtrial rows with per-row label, subtrial group id,
/// and channel index.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSubtrialDataset {
    x: Array2<f64>,
    y: Vec<usize>,
    group_id: Vec<usize>,
    channel_index: Vec<usize>,
    n_channels: usize,
}

impl ChannelSubtrialDataset {
    pub fn new(
        x: Array2<f64>,
        y: Vec<usize>,
        group_id: Vec<usize>,
        channel_index: Vec<usize>,
        n_channels: usize,
    ) -> Result<Self> {
        let n = x.nrows();
        if y.len() != n || group_id.len() != n || channel_index.len() != n {
            return Err(Error::Schema(format!(
                "row metadata lengths {}/{}/{} do not match {} rows",
                y.len(),
                group_id.len(),
                channel_index.len(),
                n
            )));
        }
        if n_channels == 0 || n % n_channels != 0 {
            return Err(Error::Schema(format!(
                "{n} rows is not a multiple of {n_channels} channels"
            )));
        }
        let mut group_count = std::collections::HashMap::new();
        let mut group_label = std::collections::HashMap::new();
        for i in 0..n {
            *group_count.entry(group_id[i]).or_insert(0usize) += 1;
            match group_label.entry(group_id[i]) {
                std::collections::hash_map::Entry::Vacant(e) => {
                    e.insert(y[i]);
                }
                std::collections::hash_map::Entry::Occupied(e) => {
                    if *e.get() != y[i] {
                        return Err(Error::Schema(format!(
                            "group {} mixes labels {} and {}",
                            group_id[i],
                            e.get(),
                            y[i]
                        )));
                    }
                }
            }
            if channel_index[i] >= n_channels {
                return Err(Error::Schema(format!(
                    "channel index {} out of 0..{}",
                    channel_index[i], n_channels
                )));
            }
        }
        if group_count.values().any(|&c| c != n_channels) {
            return Err(Error::Schema(format!(
                "every group must contain exactly {n_channels} rows"
            )));
        }
        Ok(Self {
            x,
            y,
            group_id,
            channel_index,
            n_channels,
        })
    }

    pub fn x(&self) -> &Array2<f64> {
        &self.x
    }

    pub fn y(&self) -> &[usize] {
        &self.y
    }

    pub fn group_ids(&self) -> &[usize] {
        &self.group_id
    }

    pub fn channel_indices(&self) -> &[usize] {
        &self.channel_index
    }

    pub fn n_rows(&self) -> usize {
        self.x.nrows()
    }

    pub fn n_features(&self) -> usize {
        self.x.ncols()
    }

    pub fn n_channels(&self) -> usize {
        self.n_channels
    }

    pub fn n_subtrials(&self) -> usize {
        self.n_rows() / self.n_channels
    }

    /// Distinct group ids in first-appearance (onset) order, with labels.
    pub fn groups(&self) -> Vec<(usize, usize)> {
        let mut seen = std::collections::HashSet::new();
        let mut out = Vec::new();
        for i in 0..self.n_rows() {
            if seen.insert(self.group_id[i]) {
                out.push((self.group_id[i], self.y[i]));
            }
        }
        out
    }

    /// Rows whose group is in `keep`, preserving original row order.
    pub fn filter_groups(&self, keep: &std::collections::HashSet<usize>) -> Result<Self> {
        let rows: Vec<usize> = (0..self.n_rows())
            .filter(|&i| keep.contains(&self.group_id[i]))
            .collect();
        self.take_rows(&rows)
    }

    /// Same dataset with feature matrix replaced (e.g. after normalization
    /// or projection metadata is not meaningful, where `x` keeps row order).
    pub fn with_x(&self, x: Array2<f64>) -> Result<Self> {
        if x.nrows() != self.n_rows() {
            return Err(Error::Dim(format!(
                "replacement has {} rows, dataset has {}",
                x.nrows(),
                self.n_rows()
            )));
        }
        Ok(Self {
            x,
            y: self.y.clone(),
            group_id: self.group_id.clone(),
            channel_index: self.channel_index.clone(),
            n_channels: self.n_channels,
        })
    }

    fn take_rows(&self, rows: &[usize]) -> Result<Self> {
        let mut x = Array2::<f64>::zeros((rows.len(), self.n_features()));
        let mut y = Vec::with_capacity(rows.len());
        let mut g = Vec::with_capacity(rows.len());
        let mut c = Vec::with_capacity(rows.len());
        for (out_i, &i) in rows.iter().enumerate() {
            x.row_mut(out_i).assign(&self.x.row(i));
            y.push(self.y[i]);
            g.push(self.group_id[i]);
            c.push(self.channel_index[i]);
        }
        Self::new(x, y, g, c, self.n_channels)
    }

    fn groups_of_class(&self, label: usize) -> Vec<usize> {
        self.groups()
            .into_iter()
            .filter(|&(_, l)| l == label)
            .map(|(g, _)| g)
            .collect()
    }
}

/// Cuts one epoch per (onset, channel) pair from the continuous recording.
///
/// Row order is onset-major, channel-minor; each row is the raw window
/// `[onset, onset + window_s * fs)` of one channel; `group_id` is the onset
/// index into `log`.
pub fn slice_channel_subtrials(
    rec: &Recording,
    log: &StimulusLog,
    window_s: f64,
) -> Result<ChannelSubtrialDataset> {
    if !(window_s > 0.0) {
        return Err(Error::Range(format!("window must be positive, got {window_s}")));
    }
    let window = (window_s * rec.sampling_rate_hz()).round() as usize;
    if window == 0 {
        return Err(Error::Range("window shorter than one sample".into()));
    }
    log.validate_against(rec, window)?;
    let n_ch = rec.n_channels();
    let n_rows = log.len() * n_ch;
    let mut x = Array2::<f64>::zeros((n_rows, window));
    let mut y = Vec::with_capacity(n_rows);
    let mut group = Vec::with_capacity(n_rows);
    let mut chan = Vec::with_capacity(n_rows);
    for (onset_idx, (&onset, &label)) in log.onsets().iter().zip(log.labels()).enumerate() {
        for ch in 0..n_ch {
            let row = onset_idx * n_ch + ch;
            x.row_mut(row)
                .assign(&rec.samples().slice(ndarray::s![ch, onset..onset + window]));
            y.push(label);
            group.push(onset_idx);
            chan.push(ch);
        }
    }
    ChannelSubtrialDataset::new(x, y, group, chan, n_ch)
}

/// Downsamples the majority class (at subtrial granularity) to the minority
/// count. Under the oddball paradigm targets are the scarce class, so this
/// keeps every target subtrial and draws a seeded uniform subset of
/// non-targets. Whole groups are kept or dropped; row order is preserved.
pub fn balance_classes(ds: &ChannelSubtrialDataset, seed: u64) -> Result<ChannelSubtrialDataset> {
    let targets = ds.groups_of_class(1);
    let nontargets = ds.groups_of_class(0);
    if targets.is_empty() {
        return Err(Error::EmptyClass("no target subtrials".into()));
    }
    if nontargets.is_empty() {
        return Err(Error::EmptyClass("no non-target subtrials".into()));
    }
    let keep_count = targets.len().min(nontargets.len());
    let mut keep: std::collections::HashSet<usize> = std::collections::HashSet::new();
    let mut rng = stream_rng(seed, "balance", 0);
    for (groups, label_count) in [(targets, keep_count), (nontargets, keep_count)] {
        if groups.len() == label_count {
            keep.extend(groups);
        } else {
            let mut shuffled = groups;
            shuffled.shuffle(&mut rng);
            keep.extend(shuffled.into_iter().take(label_count));
        }
    }
    ds.filter_groups(&keep)
}

/// Stratified 80:20-style split at subtrial granularity.
///
/// Per class, `round(test_fraction * n)` groups go to the test set; the
/// assignment is a seeded shuffle, so it is deterministic for a fixed seed
/// and no group appears on both sides.
pub fn grouped_split(
    ds: &ChannelSubtrialDataset,
    test_fraction: f64,
    seed: u64,
) -> Result<(ChannelSubtrialDataset, ChannelSubtrialDataset)> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::Split(format!(
            "test fraction must lie in (0, 1), got {test_fraction}"
        )));
    }
    let mut rng = stream_rng(seed, "split", 0);
    let mut test_groups = std::collections::HashSet::new();
    let mut train_groups = std::collections::HashSet::new();
    for class in [0usize, 1] {
        let mut groups = ds.groups_of_class(class);
        if groups.len() < 2 {
            return Err(Error::Split(format!(
                "class {class} has {} subtrials, need at least 2",
                groups.len()
            )));
        }
        let n_test = (test_fraction * groups.len() as f64).round() as usize;
        if n_test < 1 || n_test >= groups.len() {
            return Err(Error::Split(format!(
                "class {class}: {} subtrials at fraction {test_fraction} leaves an empty partition",
                groups.len()
            )));
        }
        groups.shuffle(&mut rng);
        test_groups.extend(groups.iter().take(n_test).copied());
        train_groups.extend(groups.iter().skip(n_test).copied());
    }
    Ok((
        ds.filter_groups(&train_groups)?,
        ds.filter_groups(&test_groups)?,
    ))
}

/// Stratified grouped k-fold assignment for cross-validation.
///
/// Per class, groups are shuffled once (seeded) and dealt round-robin, so
/// every fold holds roughly `n/k` subtrials of each class. Returns, per fold,
/// the group-id sets `(train, validation)`.
pub fn stratified_group_folds(
    ds: &ChannelSubtrialDataset,
    folds: usize,
    seed: u64,
) -> Result<Vec<(std::collections::HashSet<usize>, std::collections::HashSet<usize>)>> {
    if folds < 2 {
        return Err(Error::Split(format!("need at least 2 folds, got {folds}")));
    }
    let mut rng = stream_rng(seed, "folds", 0);
    let mut fold_members: Vec<std::collections::HashSet<usize>> =
        vec![std::collections::HashSet::new(); folds];
    for class in [0usize, 1] {
        let mut groups = ds.groups_of_class(class);
        if groups.len() < folds {
            return Err(Error::Split(format!(
                "class {class} has {} subtrials for {folds} folds",
                groups.len()
            )));
        }
        groups.shuffle(&mut rng);
        for (i, g) in groups.into_iter().enumerate() {
            fold_members[i % folds].insert(g);
        }
    }
    let all: std::collections::HashSet<usize> =
        ds.groups().into_iter().map(|(g, _)| g).collect();
    Ok(fold_members
        .into_iter()
        .map(|val| {
            let train: std::collections::HashSet<usize> =
                all.difference(&val).copied().collect();
            (train, val)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::Array2;

    fn toy_recording(n_ch: usize, n_t: usize, fs: f64) -> Recording {
        let samples = Array2::from_shape_fn((n_ch, n_t), |(c, t)| (c * 10_000 + t) as f64);
        let names = (0..n_ch).map(|c| format!("ch{c}")).collect();
        Recording::new(samples, fs, names).unwrap()
    }

    fn toy_dataset(n_target: usize, n_nontarget: usize, n_ch: usize, d: usize) -> ChannelSubtrialDataset {
        let n_groups = n_target + n_nontarget;
        let mut x = Array2::<f64>::zeros((n_groups * n_ch, d));
        let mut y = Vec::new();
        let mut g = Vec::new();
        let mut c = Vec::new();
        for gi in 0..n_groups {
            let label = usize::from(gi < n_target);
            for ch in 0..n_ch {
                let row = gi * n_ch + ch;
                x[(row, 0)] = row as f64;
                y.push(label);
                g.push(gi);
                c.push(ch);
            }
        }
        ChannelSubtrialDataset::new(x, y, g, c, n_ch).unwrap()
    }

    #[test]
    fn recording_rejects_duplicate_channel_names() {
        let samples = Array2::zeros((2, 4));
        let err = Recording::new(samples, 256.0, vec!["Cz".into(), "Cz".into()]);
        assert!(matches!(err, Err(Error::Schema(_))));
    }

    #[test]
    fn slicing_produces_onset_major_channel_minor_rows() {
        // 8 channels, 80 onsets at 256 Hz -> 640 x 256.
        let rec = toy_recording(8, 256 * 90, 256.0);
        let onsets: Vec<usize> = (0..80).map(|i| i * 256).collect();
        let labels = vec![0; 80];
        let log = StimulusLog::new(onsets, labels).unwrap();
        let ds = slice_channel_subtrials(&rec, &log, 1.0).unwrap();
        assert_eq!(ds.x().shape(), &[640, 256]);
        assert_eq!(ds.group_ids()[9], 1);
        assert_eq!(ds.channel_indices()[9], 1);
    }

    #[test]
    fn slicing_single_onset_is_the_raw_window() {
        let rec = toy_recording(1, 600, 256.0);
        let log = StimulusLog::new(vec![100], vec![1]).unwrap();
        let ds = slice_channel_subtrials(&rec, &log, 1.0).unwrap();
        assert_eq!(ds.x().shape(), &[1, 256]);
        for t in 0..256 {
            assert_eq!(ds.x()[(0, t)], rec.samples()[(0, 100 + t)]);
        }
    }

    #[test]
    fn slicing_240_hz_matches_shape() {
        let rec = toy_recording(8, 240 * 200, 240.0);
        let onsets: Vec<usize> = (0..180).map(|i| i * 240).collect();
        let log = StimulusLog::new(onsets, vec![0; 180]).unwrap();
        let ds = slice_channel_subtrials(&rec, &log, 1.0).unwrap();
        assert_eq!(ds.x().shape(), &[1440, 240]);
    }

    #[test]
    fn slicing_rejects_window_past_end() {
        let rec = toy_recording(2, 2500, 256.0);
        let log = StimulusLog::new(vec![2400], vec![0]).unwrap();
        assert!(matches!(
            slice_channel_subtrials(&rec, &log, 1.0),
            Err(Error::Range(_))
        ));
    }

    #[test]
    fn slice_round_trip_reproduces_channel_windows() {
        let rec = toy_recording(3, 4000, 256.0);
        let onsets = vec![0, 300, 900, 2000];
        let log = StimulusLog::new(onsets.clone(), vec![1, 0, 0, 1]).unwrap();
        let ds = slice_channel_subtrials(&rec, &log, 1.0).unwrap();
        for (row, (&g, &c)) in ds.group_ids().iter().zip(ds.channel_indices()).enumerate() {
            let onset = onsets[g];
            for t in 0..256 {
                assert_eq!(ds.x()[(row, t)], rec.samples()[(c, onset + t)]);
            }
        }
    }

    #[test]
    fn balance_downsamples_nontargets_keeping_all_targets() {
        // 20 target / 60 non-target -> 20/20 subtrials = 320 rows at 8 channels.
        let ds = toy_dataset(20, 60, 8, 4);
        let balanced = balance_classes(&ds, 42).unwrap();
        assert_eq!(balanced.n_subtrials(), 40);
        assert_eq!(balanced.n_rows(), 320);
        let groups = balanced.groups();
        assert_eq!(groups.iter().filter(|&&(_, l)| l == 1).count(), 20);
        assert_eq!(groups.iter().filter(|&&(_, l)| l == 0).count(), 20);
        // all original targets survive
        for gi in 0..20 {
            assert!(groups.iter().any(|&(g, _)| g == gi));
        }
    }

    #[test]
    fn balance_is_identity_on_balanced_input() {
        let ds = toy_dataset(30, 30, 8, 4);
        let balanced = balance_classes(&ds, 7).unwrap();
        assert_eq!(&balanced, &ds);
    }

    #[test]
    fn balance_is_deterministic_per_seed() {
        let ds = toy_dataset(10, 40, 4, 4);
        let a = balance_classes(&ds, 3).unwrap();
        let b = balance_classes(&ds, 3).unwrap();
        assert_eq!(a, b);
        let c = balance_classes(&ds, 4).unwrap();
        assert_ne!(a.groups(), c.groups());
    }

    #[test]
    fn balance_rejects_empty_class() {
        let ds = toy_dataset(0, 10, 2, 4);
        assert!(matches!(balance_classes(&ds, 0), Err(Error::EmptyClass(_))));
    }

    #[test]
    fn balance_equalizes_for_all_seeds() {
        let ds = toy_dataset(5, 17, 2, 3);
        for seed in 0..50 {
            let b = balance_classes(&ds, seed).unwrap();
            let groups = b.groups();
            let targets = groups.iter().filter(|&&(_, l)| l == 1).count();
            assert_eq!(targets * 2, groups.len());
            assert_eq!(b.n_rows(), groups.len() * 2);
        }
    }

    #[test]
    fn split_is_stratified_80_20() {
        let ds = toy_dataset(20, 20, 8, 4);
        let (train, test) = grouped_split(&ds, 0.2, 11).unwrap();
        assert_eq!(train.n_subtrials(), 32);
        assert_eq!(test.n_subtrials(), 8);
        for part in [&train, &test] {
            let groups = part.groups();
            let t = groups.iter().filter(|&&(_, l)| l == 1).count();
            assert_eq!(t * 2, groups.len());
        }
    }

    #[test]
    fn split_partitions_are_disjoint_and_groups_intact() {
        let ds = toy_dataset(10, 10, 8, 4);
        let (train, test) = grouped_split(&ds, 0.2, 5).unwrap();
        let tg: std::collections::HashSet<_> = train.groups().into_iter().map(|(g, _)| g).collect();
        let sg: std::collections::HashSet<_> = test.groups().into_iter().map(|(g, _)| g).collect();
        assert!(tg.is_disjoint(&sg));
        // 8 rows per group preserved in both outputs (checked by the
        // constructor, re-asserted here).
        assert_eq!(train.n_rows(), train.n_subtrials() * 8);
        assert_eq!(test.n_rows(), test.n_subtrials() * 8);
    }

    #[test]
    fn split_stratification_holds_for_every_seed_on_toy_instance() {
        // 6 subtrials (3 per class): every seed must put exactly 1 subtrial
        // of each class in the test set (round(0.2 * 3) = 1), and seeds must
        // produce more than one distinct partition.
        let ds = toy_dataset(3, 3, 2, 3);
        let mut partitions = std::collections::HashSet::new();
        for seed in 0..100 {
            let (train, test) = grouped_split(&ds, 0.2, seed).unwrap();
            let test_groups = test.groups();
            assert_eq!(test_groups.len(), 2);
            assert_eq!(test_groups.iter().filter(|&&(_, l)| l == 1).count(), 1);
            assert_eq!(train.n_subtrials(), 4);
            let mut ids: Vec<usize> = test_groups.iter().map(|&(g, _)| g).collect();
            ids.sort_unstable();
            partitions.insert(ids);
        }
        assert!(partitions.len() > 1);
    }

    #[test]
    fn split_rejects_degenerate_sizes() {
        let ds = toy_dataset(1, 1, 2, 3);
        assert!(matches!(grouped_split(&ds, 0.2, 0), Err(Error::Split(_))));
        let ds = toy_dataset(3, 3, 2, 3);
        assert!(matches!(grouped_split(&ds, 0.0, 0), Err(Error::Split(_))));
    }

    #[test]
    fn folds_are_stratified_and_cover_everything() {
        let ds = toy_dataset(9, 9, 2, 3);
        let folds = stratified_group_folds(&ds, 3, 21).unwrap();
        assert_eq!(folds.len(), 3);
        let mut seen = std::collections::HashSet::new();
        for (train, val) in &folds {
            assert!(train.is_disjoint(val));
            assert_eq!(train.len() + val.len(), 18);
            assert_eq!(val.len(), 6);
            for g in val {
                assert!(seen.insert(*g), "group {g} validated twice");
            }
            let val_ds = ds.filter_groups(val).unwrap();
            let t = val_ds.groups().iter().filter(|&&(_, l)| l == 1).count();
            assert_eq!(t, 3);
        }
        assert_eq!(seen.len(), 18);
    }

    #[test]
    fn folds_reject_too_few_groups() {
        let ds = toy_dataset(2, 2, 2, 3);
        assert!(matches!(
            stratified_group_folds(&ds, 3, 0),
            Err(Error::Split(_))
        ));
    }
}
