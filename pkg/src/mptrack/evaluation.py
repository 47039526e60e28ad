#
# Copyright (C) 2020 The mptrack authors. All rights reserved.
#
# Licensed under the Universal Permissive License v 1.0 as shown at https://oss.oracle.com/licenses/upl
#
# Please see LICENSE.txt file included in the top-level directory of the
# appropriate download for a copy of the license and additional information.
#

from concurrent.futures import ThreadPoolExecutor
from csv import writer
from json import dump
from math import isnan, sqrt
from threading import Lock

from numpy import (
    argmax, array, asarray, atleast_2d, clip, minimum, ndarray)
from numpy.linalg import eigh
from numpy.random import default_rng
from scipy.optimize import linear_sum_assignment
from scipy.spatial.distance import cdist

from .common import (
    CheckValue, ClutterMode, LogUtils, TrackStatus, synchronized)
from .exception import DataFormatException, IllegalArgumentException
from .measurement import measurement_residual
from .scenarios import build_scenario, simulate
from .tracker import Tracker, default_logger

# OSPA order and cutoff in m; the cutoff also gates track-to-truth matching.
OSPA_ORDER = 2
OSPA_CUTOFF = 631.0
# Consecutive unmatched scans after which a confirmed track counts as false.
FALSE_TRACK_SCANS = 3
# Centroid error, in the mixed km and degree units of measurement space, under
# which an estimated component counts as a hit on a true one.
CENTROID_GATE = 1.0


def _positions(points):
    return atleast_2d(asarray(points, dtype=float)).reshape(-1, 2)


def ospa(truth, estimate, p=OSPA_ORDER, c=OSPA_CUTOFF):
    """
    The optimal subpattern assignment distance between two finite sets of
    planar positions: the p-order mean of the cut-off distances of the
    optimal pairing, with c charged for each unpaired point.

    :param truth: the true positions, an (N, 2) array_like.
    :type truth: array_like
    :param estimate: the estimated positions, an (M, 2) array_like.
    :type estimate: array_like
    :param p: the order, at least 1.
    :type p: float
    :param c: the cutoff, positive.
    :type c: float
    :returns: the distance in [0, c]; 0 when both sets are empty.
    :rtype: float
    """
    CheckValue.check_range(p, 'p', 1, None)
    CheckValue.check_float_gt_zero(c, 'c')
    x = _positions(truth)
    y = _positions(estimate)
    n, m = x.shape[0], y.shape[0]
    if n == 0 and m == 0:
        return 0.0
    if n == 0 or m == 0:
        return float(c)
    cost = minimum(cdist(x, y), c) ** p
    rows, cols = linear_sum_assignment(cost)
    total = cost[rows, cols].sum() + c ** p * abs(n - m)
    return float((total / max(n, m)) ** (1.0 / p))


def match_positions(truth, estimate, gate=OSPA_CUTOFF):
    """
    Pairs true and estimated positions by the assignment of least total
    distance and keeps the pairs closer than the gate.

    :returns: (truth row, estimate row, distance) for each kept pair.
    :rtype: list(tuple)
    """
    x = _positions(truth)
    y = _positions(estimate)
    if x.shape[0] == 0 or y.shape[0] == 0:
        return []
    distances = cdist(x, y)
    rows, cols = linear_sum_assignment(minimum(distances, gate))
    return [(int(i), int(j), float(distances[i, j]))
            for i, j in zip(rows, cols) if distances[i, j] <= gate]


def car(truth, estimate):
    """
    The correct association rate: the fraction of entries whose estimated
    measurement equals the true one. A miss, None or -1, is correct when the
    target went undetected.

    :param truth: the true measurement index per entry, None for a miss.
    :type truth: list
    :param estimate: the estimated index per entry, or the association
        marginals as an (N, M + 1) array with the miss in column 0, in which
        case the estimate is the argmax.
    :type estimate: list or ndarray
    :returns: the rate, nan for no entries.
    :rtype: float
    :raises IllegalArgumentException: raises the exception if the lengths
        differ.
    """
    if isinstance(estimate, ndarray) and estimate.ndim == 2:
        estimate = [int(j) - 1 for j in argmax(estimate, axis=1)]
    if len(truth) != len(estimate):
        raise IllegalArgumentException(
            'truth and estimate must have the same length. Got ' +
            str(len(truth)) + ' and ' + str(len(estimate)))
    if len(truth) == 0:
        return float('nan')
    correct = 0
    for true, guess in zip(truth, estimate):
        true = -1 if true is None else int(true)
        guess = -1 if guess is None else int(guess)
        correct += true == guess
    return float(correct) / len(truth)


def rse(true_snr, estimated_snr):
    """
    The relative SNR error |σ̂ - σ| / σ, element-wise.
    """
    true_snr = asarray(true_snr, dtype=float)
    if (true_snr <= 0).any():
        raise IllegalArgumentException('true_snr must be positive.')
    return abs(asarray(estimated_snr, dtype=float) - true_snr) / true_snr


def nft(track_scans, truth_scans, gate=OSPA_CUTOFF,
        min_scans=FALSE_TRACK_SCANS):
    """
    Counts false tracks. A confirmed track with no true target within the
    gate for min_scans consecutive scans or more is a false track; each such
    run counts once. At each scan the count is the number of tracks inside a
    run that has reached min_scans.

    :param track_scans: scan mapped to {track_id: (x, y)} of the confirmed
        tracks.
    :type track_scans: dict
    :param truth_scans: scan mapped to the (N, 2) true positions.
    :type truth_scans: dict
    :param gate: the gate in m.
    :type gate: float
    :param min_scans: the run length, positive.
    :type min_scans: int
    :returns: the per-scan counts and the number of false runs.
    :rtype: tuple(dict, int)
    """
    CheckValue.check_int_gt_zero(min_scans, 'min_scans')
    runs = {}
    per_scan = {}
    false_runs = 0
    for scan in sorted(set(truth_scans) | set(track_scans)):
        tracks = track_scans.get(scan, {})
        truth = _positions(truth_scans.get(scan, []))
        count = 0
        current = {}
        for track_id, position in tracks.items():
            unmatched = (truth.shape[0] == 0 or
                         cdist(_positions(position), truth).min() > gate)
            if not unmatched:
                continue
            current[track_id] = runs.get(track_id, 0) + 1
            if current[track_id] == min_scans:
                false_runs += 1
            if current[track_id] >= min_scans:
                count += 1
        runs = current
        per_scan[scan] = count
    return per_scan, false_runs


def tnnc(truth, components):
    """
    The number of estimated and of true nonuniform clutter components at a
    scan.

    :param truth: the scan truth.
    :type truth: ScanTruth
    :param components: the component estimates of the scan.
    :type components: list(ComponentEstimate)
    :returns: (estimated, true).
    :rtype: tuple(int, int)
    """
    return (sum(1 for c in components if not c.is_uniform()),
            sum(1 for c in truth.get_clutter() if not c.is_uniform()))


def centroid_errors(true_means, estimated_means):
    """
    Pairs true and estimated component centroids, given in (km, deg), by the
    assignment of least total distance.

    :returns: (truth row, estimate row, error) for each pair.
    :rtype: list(tuple)
    """
    x = _positions(true_means)
    y = _positions(estimated_means)
    if x.shape[0] == 0 or y.shape[0] == 0:
        return []
    distances = array([[sqrt((measurement_residual(a, b) ** 2).sum())
                        for b in y] for a in x])
    rows, cols = linear_sum_assignment(distances)
    return [(int(i), int(j), float(distances[i, j]))
            for i, j in zip(rows, cols)]


def rmse(errors):
    """
    The root mean square of centroid errors, nan for none.
    """
    errors = asarray(errors, dtype=float)
    if errors.size == 0:
        return float('nan')
    return float(sqrt((errors ** 2).mean()))


def _sqrt_spd(matrix):
    values, vectors = eigh(matrix)
    return (vectors * clip(values, 0, None) ** 0.5).dot(vectors.T)


def wasserstein_gaussian(mean, covariance, estimated_mean,
                         estimated_covariance):
    """
    The squared 2-Wasserstein distance between two Gaussians,
    ‖x - x̂‖² + tr(Σ + Σ̂ - 2(√Σ Σ̂ √Σ)^½), with the azimuth difference of
    the means wrapped. Matrix square roots come from the symmetric
    eigendecomposition. Units are those of measurement space, km and deg
    mixed.

    :param mean: the true mean (range km, azimuth deg).
    :type mean: array_like
    :param covariance: the true covariance.
    :type covariance: array_like
    :param estimated_mean: the estimated mean.
    :type estimated_mean: array_like
    :param estimated_covariance: the estimated covariance.
    :type estimated_covariance: array_like
    :returns: the squared distance, not negative.
    :rtype: float
    :raises IllegalArgumentException: raises the exception if a covariance
        is not symmetric positive-definite or the shapes differ.
    """
    mean = CheckValue.check_vector(mean, 'mean')
    estimated_mean = CheckValue.check_vector(
        estimated_mean, 'estimated_mean', mean.shape[0])
    sigma = CheckValue.check_spd(covariance, 'covariance')
    sigma_hat = CheckValue.check_spd(
        estimated_covariance, 'estimated_covariance')
    if sigma.shape != sigma_hat.shape or sigma.shape[0] != mean.shape[0]:
        raise IllegalArgumentException(
            'Means and covariances must share one dimension.')
    if mean.shape[0] == 2:
        diff = measurement_residual(mean, estimated_mean)
    else:
        diff = mean - estimated_mean
    root = _sqrt_spd(sigma)
    cross = _sqrt_spd(root.dot(sigma_hat).dot(root))
    value = diff.dot(diff) + (sigma + sigma_hat - 2 * cross).trace()
    return float(max(value, 0.0))


class ScanMetrics(object):
    """
    The raw sums one run contributes to one scan of a report. Ratios are kept
    as numerator and denominator so that reports merge exactly.
    """
    STATS = ('ospa', 'car_correct', 'car_total', 'nft', 'rse_sum',
             'rse_count', 'tnnc_est', 'tnnc_true', 'sq_error_sum',
             'centroid_count', 'clutter_hits', 'wd_sum', 'wd_count')

    def __init__(self):
        for stat in ScanMetrics.STATS:
            setattr(self, stat, 0.0)


class MetricsReport(object):
    """
    Per-scan metrics accumulated over Monte Carlo runs. Reports hold sums,
    so :py:meth:`merge` is associative and independent of the run order,
    and a report of N runs equals the merge of its parts.

    Reports may be filled from several threads; :py:meth:`add_run` and
    :py:meth:`merge` are synchronized.
    """
    CSV_COLUMNS = ('scan', 'runs', 'ospa', 'car', 'nft', 'rse', 'tnnc_est',
                   'tnnc_true', 'rmse', 'wd')
    _RUN_STATS = ('false_tracks', 'tracked_targets', 'true_targets')

    def __init__(self):
        self.lock = Lock()
        self._runs = 0
        self._seeds = []
        self._scans = {}
        self._counts = {}
        self._run_totals = dict((stat, 0.0) for stat in
                                MetricsReport._RUN_STATS)

    def __str__(self):
        return ('MetricsReport(runs=' + str(self._runs) + ', scans=' +
                str(len(self._scans)) + ')')

    @synchronized
    def add_run(self, scans, run_stats=None, seed=None):
        """
        Adds the metrics of one run.

        :param scans: scan mapped to the ScanMetrics of the run.
        :type scans: dict
        :param run_stats: per-run totals: false_tracks, tracked_targets and
            true_targets.
        :type run_stats: dict
        :param seed: the seed of the run.
        :type seed: int
        :returns: self.
        """
        for scan, metrics in scans.items():
            totals = self._scans.setdefault(scan, ScanMetrics())
            for stat in ScanMetrics.STATS:
                setattr(totals, stat,
                        getattr(totals, stat) + getattr(metrics, stat))
            self._counts[scan] = self._counts.get(scan, 0) + 1
        for stat, value in (run_stats or {}).items():
            self._run_totals[stat] += value
        self._runs += 1
        if seed is not None:
            self._seeds.append(seed)
        return self

    @synchronized
    def merge(self, other):
        """
        Adds every run of another report.

        :param other: the other report.
        :type other: MetricsReport
        :returns: self.
        """
        if not isinstance(other, MetricsReport):
            raise IllegalArgumentException(
                'other must be an instance of MetricsReport.')
        with other.lock:
            for scan, metrics in other._scans.items():
                totals = self._scans.setdefault(scan, ScanMetrics())
                for stat in ScanMetrics.STATS:
                    setattr(totals, stat,
                            getattr(totals, stat) + getattr(metrics, stat))
                self._counts[scan] = (self._counts.get(scan, 0) +
                                      other._counts[scan])
            for stat, value in other._run_totals.items():
                self._run_totals[stat] += value
            self._runs += other._runs
            self._seeds.extend(other._seeds)
        return self

    def get_runs(self):
        return self._runs

    def get_scans(self):
        return sorted(self._scans)

    def get_seeds(self):
        return sorted(self._seeds)

    def get_scan_metrics(self, scan):
        """
        Returns the metrics of one scan averaged over the runs that cover it.

        :param scan: the scan.
        :type scan: int
        :returns: column name mapped to value; undefined ratios are nan.
        :rtype: dict
        """
        totals = self._scans[scan]
        runs = float(self._counts[scan])
        return {'scan': scan,
                'runs': int(runs),
                'ospa': totals.ospa / runs,
                'car': _ratio(totals.car_correct, totals.car_total),
                'nft': totals.nft / runs,
                'rse': _ratio(totals.rse_sum, totals.rse_count),
                'tnnc_est': totals.tnnc_est / runs,
                'tnnc_true': totals.tnnc_true / runs,
                'rmse': _root(_ratio(totals.sq_error_sum,
                                     totals.centroid_count)),
                'wd': _ratio(totals.wd_sum, totals.wd_count)}

    def get_series(self, metric):
        """
        Returns one column over the scans.

        :param metric: a column of :py:attr:`CSV_COLUMNS`.
        :type metric: str
        :returns: the scans and the values.
        :rtype: tuple(list, list)
        """
        if metric not in MetricsReport.CSV_COLUMNS:
            raise IllegalArgumentException('Unknown metric ' + str(metric))
        scans = self.get_scans()
        return scans, [self.get_scan_metrics(s)[metric] for s in scans]

    def get_summary(self, first=None, last=None):
        """
        Returns the metrics pooled over the runs and the scans in
        [first, last]. OSPA, NFT and TNNC are per-scan means; CAR, RSE, RMSE
        and WD pool their numerators and denominators. Undefined values are
        None.

        :param first: the first scan, unbounded when None.
        :type first: int
        :param last: the last scan, unbounded when None.
        :type last: int
        :returns: the summary.
        :rtype: dict
        """
        pooled = ScanMetrics()
        entries = 0
        scans = [s for s in self.get_scans()
                 if (first is None or s >= first) and
                 (last is None or s <= last)]
        for scan in scans:
            for stat in ScanMetrics.STATS:
                setattr(pooled, stat, getattr(pooled, stat) +
                        getattr(self._scans[scan], stat))
            entries += self._counts[scan]
        runs = float(self._runs) if self._runs else float('nan')
        summary = {
            'runs': self._runs,
            'seeds': self.get_seeds(),
            'scans': [scans[0], scans[-1]] if scans else None,
            'ospa': _ratio(pooled.ospa, entries),
            'car': _ratio(pooled.car_correct, pooled.car_total),
            'nft': _ratio(pooled.nft, entries),
            'rse': _ratio(pooled.rse_sum, pooled.rse_count),
            'tnnc': {'estimated': _ratio(pooled.tnnc_est, entries),
                     'true': _ratio(pooled.tnnc_true, entries)},
            'rmse': _root(_ratio(pooled.sq_error_sum, pooled.centroid_count)),
            'wd': _ratio(pooled.wd_sum, pooled.wd_count),
            'clutter_hit_rate': _ratio(pooled.clutter_hits,
                                       pooled.centroid_count),
            'false_tracks': self._run_totals['false_tracks'] / runs,
            'tracked_targets': self._run_totals['tracked_targets'] / runs,
            'true_targets': self._run_totals['true_targets'] / runs}
        return _nan_to_none(summary)

    def write_csv(self, path):
        """
        Writes the per-scan series, one row per scan.
        """
        with open(path, 'w', newline='') as f:
            out = writer(f)
            out.writerow(MetricsReport.CSV_COLUMNS)
            for scan in self.get_scans():
                metrics = self.get_scan_metrics(scan)
                out.writerow(['' if _is_nan(metrics[c]) else metrics[c]
                              for c in MetricsReport.CSV_COLUMNS])

    def write_json(self, path, first=None, last=None):
        with open(path, 'w') as f:
            dump(self.get_summary(first, last), f, indent=2, sort_keys=True)


def _is_nan(value):
    return isinstance(value, float) and isnan(value)


def _nan_to_none(value):
    if isinstance(value, dict):
        return dict((k, _nan_to_none(v)) for k, v in value.items())
    return None if _is_nan(value) else value


def _ratio(numerator, denominator):
    if denominator == 0:
        return float('nan')
    return float(numerator) / denominator


def _root(value):
    return value if isnan(value) else sqrt(value)


def _group_by_scan(records):
    grouped = {}
    for record in records:
        grouped.setdefault(record.scan, []).append(record)
    return grouped


def evaluate_run(truths, tracks, components, seed=None, cutoff=OSPA_CUTOFF,
                 order=OSPA_ORDER):
    """
    Scores one run. Only confirmed tracks are scored. Per scan, confirmed
    tracks are matched to the true targets by the assignment of least total
    distance gated at the cutoff; a matched pair is correctly associated when
    the track's argmax measurement is the target's own detection, and adds
    its relative SNR error. True nonuniform components are paired with
    estimated ones by centroid distance for RMSE, WD and the hit rate.

    :param truths: the scan truths with frames attached.
    :type truths: list(ScanTruth)
    :param tracks: the track estimates.
    :type tracks: list(TrackEstimate)
    :param components: the component estimates.
    :type components: list(ComponentEstimate)
    :param seed: the seed recorded with the run.
    :type seed: int
    :param cutoff: the OSPA cutoff and matching gate in m.
    :type cutoff: float
    :param order: the OSPA order.
    :type order: float
    :returns: a report holding the run.
    :rtype: MetricsReport
    :raises DataFormatException: raises the exception if an estimate refers
        to a scan without truth.
    """
    by_scan = dict((truth.get_scan(), truth) for truth in truths)
    track_groups = _group_by_scan(tracks)
    component_groups = _group_by_scan(components)
    stray = (set(track_groups) | set(component_groups)) - set(by_scan)
    if stray:
        raise DataFormatException(
            'Estimates cover scans without truth: ' +
            str(sorted(stray)[:10]))
    scans = {}
    confirmed_scans = {}
    truth_positions = {}
    tracked = set()
    for scan, truth in sorted(by_scan.items()):
        metrics = ScanMetrics()
        targets = truth.get_targets()
        true_xy = array([[t.get_state()[0], t.get_state()[2]]
                         for t in targets]).reshape(-1, 2)
        confirmed = [t for t in track_groups.get(scan, [])
                     if t.status == TrackStatus.CONFIRMED]
        track_xy = array([t.get_position() for t in confirmed]).reshape(-1, 2)
        metrics.ospa = ospa(true_xy, track_xy, order, cutoff)
        for row, col, _ in match_positions(true_xy, track_xy, cutoff):
            target = targets[row]
            estimate = confirmed[col]
            tracked.add(target.get_target_id())
            metrics.car_total += 1
            metrics.car_correct += car(
                [truth.get_detection(target.get_target_id())],
                [estimate.assoc])
            metrics.rse_sum += float(rse(target.get_snr(), estimate.snr_mean))
            metrics.rse_count += 1
        estimated_components = component_groups.get(scan, [])
        metrics.tnnc_est, metrics.tnnc_true = tnnc(
            truth, estimated_components)
        true_clutter = [c for c in truth.get_clutter() if not c.is_uniform()]
        estimated_clutter = [c for c in estimated_components
                             if not c.is_uniform()]
        pairs = centroid_errors([c.get_mean() for c in true_clutter],
                                [c.position for c in estimated_clutter])
        for row, col, error in pairs:
            metrics.sq_error_sum += error * error
            metrics.centroid_count += 1
            metrics.clutter_hits += error < CENTROID_GATE
            true = true_clutter[row]
            estimate = estimated_clutter[col]
            metrics.wd_sum += wasserstein_gaussian(
                true.get_mean(), true.get_covariance(), estimate.position,
                estimate.to_belief().expected_covariance())
            metrics.wd_count += 1
        scans[scan] = metrics
        confirmed_scans[scan] = dict(
            (t.track_id, t.get_position()) for t in confirmed)
        truth_positions[scan] = true_xy
    per_scan, false_runs = nft(confirmed_scans, truth_positions, cutoff)
    for scan, count in per_scan.items():
        scans[scan].nft = count
    true_targets = set(t.get_target_id() for truth in truths
                       for t in truth.get_targets())
    report = MetricsReport()
    report.add_run(scans, {'false_tracks': false_runs,
                           'tracked_targets': len(tracked),
                           'true_targets': len(true_targets)}, seed)
    return report


def run_seeds(seed, runs):
    """
    The seeds of the runs of a Monte Carlo sweep: seed, seed + 1, ...
    """
    CheckValue.check_int_ge_zero(seed, 'seed')
    CheckValue.check_int_gt_zero(runs, 'runs')
    return [seed + index for index in range(runs)]


def run_single(scenario, tracker_config, seed):
    """
    Simulates, tracks and scores one seeded run. In known-clutter mode the
    tracker is given the simulated clutter parameters.

    :param scenario: the scenario.
    :type scenario: Scenario
    :param tracker_config: the tracker configuration.
    :type tracker_config: TrackerConfig
    :param seed: the seed of the run's random stream.
    :type seed: int
    :returns: the report of the run.
    :rtype: MetricsReport
    """
    rng = default_rng(seed)
    frames, truths = simulate(scenario, tracker_config.get_sensor(), rng)
    tracker = Tracker(tracker_config)
    if tracker_config.get_clutter_mode() == ClutterMode.KNOWN:
        tracker.set_known_clutter(
            dict((t.get_scan(), t.get_clutter()) for t in truths))
    tracks, components = tracker.run(frames)
    return evaluate_run(truths, tracks, components, seed)


def run_monte_carlo(run_config, logger=None):
    """
    Runs the Monte Carlo sweep of a run configuration: independent seeded
    runs on a thread pool capped at the configured thread count, merged into
    one report.

    :param run_config: the run configuration.
    :type run_config: RunConfig
    :param logger: the logger for per-run progress, also given to the
        trackers when their configuration has none.
    :type logger: logging.Logger
    :returns: the merged report.
    :rtype: MetricsReport
    """
    scenario = build_scenario(run_config.get_scenario())
    tracker_config = run_config.get_tracker_config()
    if tracker_config.get_logger() is None:
        tracker_config = tracker_config.clone().set_logger(
            default_logger() if logger is None else logger)
    logutils = LogUtils(logger)
    seeds = run_seeds(run_config.get_seed(), run_config.get_runs())
    report = MetricsReport()

    def task(seed):
        result = run_single(scenario, tracker_config, seed)
        summary = result.get_summary()
        logutils.log_info(
            'Run with seed ' + str(seed) + ' done: MOSPA ' +
            str(summary['ospa']) + ', CAR ' + str(summary['car']))
        report.merge(result)

    threads = min(run_config.get_threads(), len(seeds))
    with ThreadPoolExecutor(max_workers=threads) as executor:
        for future in [executor.submit(task, seed) for seed in seeds]:
            future.result()
    return report
