#
# Copyright (C) 2020 The mptrack authors. All rights reserved.
#
# Licensed under the Universal Permissive License v 1.0 as shown at https://oss.oracle.com/licenses/upl
#
# Please see LICENSE.txt file included in the top-level directory of the
# appropriate download for a copy of the license and additional information.
#

from logging import DEBUG, FileHandler, WARNING, getLogger
from math import cos, pi, radians, sin, sqrt
from os import getcwd, makedirs, path
from threading import Lock

from numpy import (
    abs as np_abs, append, array, concatenate, cos as np_cos, delete, nonzero,
    radians as np_radians, sin as np_sin, zeros)
from numpy.linalg import det, inv
from sklearn.mixture import BayesianGaussianMixture

from .association import (
    ClutterSource, TargetSource, build_evidence, dump_association_csv,
    run_bp)
from .common import CheckValue, ClutterMode, LogUtils, TrackStatus
from .config import TrackerConfig
from .distributions import (
    DirichletBelief, GaussianBelief, GaussianWishartBelief,
    InverseGammaBelief, detection_probability)
from .dynamics import (
    cv_predict, dirichlet_predict, gw_predict, ig_predict, visibility_predict)
from .exception import (
    DataFormatException, IllegalArgumentException, IllegalStateException)
from .measurement import MeasurementFrame
from .smoothers import (
    estimated_counts, dirichlet_backward, dirichlet_smooth, dirichlet_update,
    gw_backward, gw_smooth, gw_statistics, gw_update, hmm_forward_backward,
    ig_backward, ig_smooth, ig_update, ig_update_counts, synthetic_measurement,
    ukf_update, urtss_smooth, visibility_evidence)
from .track import (
    ClutterComponent, ComponentEstimate, TargetTrack, TrackEstimate,
    TrackLifecycle)

# A measurement is free for initialization when the targets hold less than
# CLAIM_TARGET of it and the nonuniform components less than CLAIM_CLUTTER.
CLAIM_TARGET = 0.2
CLAIM_CLUTTER = 0.5
# Expected points per scan under which a component counts as empty.
MIN_COMPONENT_COUNT = 1.0
CLUSTER_SEED = 0
# Concentration of beliefs pinned to known clutter parameters.
_PINNED = 1e6
_DEFAULT_LOGGER_LOCK = Lock()


def polar_to_cartesian(position, noise):
    """
    Converts a measurement position to Cartesian coordinates in m and
    propagates the measurement noise through the Jacobian of the conversion.

    :param position: (range km, azimuth deg).
    :type position: array_like
    :param noise: the measurement noise in (km², deg²).
    :type noise: ndarray
    :returns: the position (x, y) in m and its 2x2 covariance.
    :rtype: tuple(ndarray, ndarray)
    """
    rho = 1000.0 * float(position[0])
    theta = radians(float(position[1]))
    jacobian = array([[1000.0 * cos(theta), -rho * sin(theta) * radians(1)],
                      [1000.0 * sin(theta), rho * cos(theta) * radians(1)]])
    return (array([rho * cos(theta), rho * sin(theta)]),
            jacobian.dot(noise).dot(jacobian.T))


def two_point_belief(first, second, lag, period, noise):
    """
    The two-point kinematic estimate at the later of two measurements: the
    position of the later one and the velocity of the displacement over
    lag·T.

    :param first: the earlier measurement position (range km, azimuth deg).
    :type first: array_like
    :param second: the later measurement position.
    :type second: array_like
    :param lag: the number of scans between the two.
    :type lag: int
    :param period: T in seconds.
    :type period: float
    :param noise: the measurement noise in (km², deg²).
    :type noise: ndarray
    :returns: the belief over (x, ẋ, y, ẏ).
    :rtype: GaussianBelief
    """
    CheckValue.check_int_gt_zero(lag, 'lag')
    p1, c1 = polar_to_cartesian(first, noise)
    p2, c2 = polar_to_cartesian(second, noise)
    dt = lag * period
    velocity = (p2 - p1) / dt
    mean = array([p2[0], velocity[0], p2[1], velocity[1]])
    covariance = zeros((4, 4))
    pos = [0, 2]
    vel = [1, 3]
    for a in range(2):
        for b in range(2):
            covariance[pos[a], pos[b]] = c2[a, b]
            covariance[pos[a], vel[b]] = c2[a, b] / dt
            covariance[vel[a], pos[b]] = c2[a, b] / dt
            covariance[vel[a], vel[b]] = (c1[a, b] + c2[a, b]) / (dt * dt)
    return GaussianBelief(mean, covariance)


def initial_power_belief(strengths, shape):
    """
    Returns IG(α, (α - 1)·Σm²/N), the belief whose mean power is the mean
    squared strength. With α = 3 this is IG(3, 2Σm²/N).
    """
    strengths = array(strengths, dtype=float)
    if strengths.size == 0:
        raise IllegalArgumentException('strengths must not be empty.')
    return InverseGammaBelief(shape, (shape - 1.0) *
                              float((strengths ** 2).mean()))


class ClutterCluster(object):
    """
    A cluster found by the mixture fit: its mean and covariance in
    measurement space, the expected number of points per scan and the
    strengths of its points.
    """

    def __init__(self, mean, covariance, count, strengths):
        self.mean = mean
        self.covariance = covariance
        self.count = float(count)
        self.strengths = strengths


def fit_clutter_clusters(positions, strengths, num_scans, volume, background,
                         init_config, budget, random_state=CLUSTER_SEED):
    """
    Clusters measurement positions with a variational Bayesian Gaussian
    mixture and keeps the clusters that look like nonuniform clutter. A
    cluster is pruned when its weight is below 1/(2N), it holds fewer than 2
    points, it has fewer expected points per scan than the configured minimum
    or its peak density is less than the configured ratio above the
    background density.

    :param positions: the (N, 2) positions.
    :type positions: ndarray
    :param strengths: the N strengths.
    :type strengths: ndarray
    :param num_scans: the number of scans the points come from.
    :type num_scans: int
    :param volume: V_G.
    :type volume: float
    :param background: the number of points per scan over the whole region.
    :type background: float
    :param init_config: the initialization parameters.
    :type init_config: InitConfig
    :param budget: the largest number of clusters to return.
    :type budget: int
    :param random_state: the seed of the mixture fit.
    :type random_state: int
    :returns: the surviving clusters, largest first.
    :rtype: list(ClutterCluster)
    """
    positions = array(positions, dtype=float).reshape(-1, 2)
    count = positions.shape[0]
    if budget <= 0 or count < 2 or num_scans <= 0:
        return []
    mixture = BayesianGaussianMixture(
        n_components=min(init_config.get_max_components() + 1, count),
        covariance_type='full',
        weight_concentration_prior_type='dirichlet_process',
        max_iter=500, random_state=random_state)
    labels = mixture.fit(positions).predict(positions)
    density_floor = init_config.get_density_ratio() * background / volume
    clusters = []
    for index in range(mixture.n_components):
        members = labels == index
        points = int(members.sum())
        per_scan = points / float(num_scans)
        if (mixture.weights_[index] < 1.0 / (2 * count) or points < 2 or
                per_scan < init_config.get_min_points_per_scan()):
            continue
        covariance = mixture.covariances_[index]
        peak = per_scan / (2 * pi * sqrt(det(covariance)))
        if peak < density_floor:
            continue
        clusters.append(ClutterCluster(
            mixture.means_[index], covariance, per_scan,
            array(strengths)[members]))
    clusters.sort(key=lambda c: -c.count)
    return clusters[:budget]


def default_logger():
    """
    Returns the logger of trackers configured without one: the Tracker logger
    at WARNING, writing logs/tracker.log under the current directory. The
    handler is added once, also when trackers are built concurrently.

    :returns: the logger.
    :rtype: Logger
    """
    with _DEFAULT_LOGGER_LOCK:
        logger = getLogger(Tracker.__name__)
        if not logger.handlers:
            logger.setLevel(WARNING)
            log_dir = path.join(getcwd(), 'logs')
            makedirs(log_dir, exist_ok=True)
            logger.addHandler(
                FileHandler(path.join(log_dir, 'tracker.log')))
    return logger


class WindowState(object):
    """
    The frames of the current window and the per-scan association results of
    the latest closed-loop iteration.
    """

    def __init__(self, frames, first_new_scan, first_window=False):
        self.frames = list(frames)
        self.first_new_scan = first_new_scan
        self.first_window = first_window
        # scan -> (track id -> row, AssociationBeliefs)
        self.associations = {}
        self.iterations = 0

    def get_scans(self):
        return [frame.get_scan() for frame in self.frames]

    def get_start(self):
        return self.frames[0].get_scan()


class Tracker(object):
    """
    Multitarget tracker with clutter estimation over a sliding window.

    Each window runs up to r_max closed-loop iterations. An iteration
    associates every scan by belief propagation using the beliefs of the
    previous iteration, then updates the clutter mixing weights, the target
    visibilities, the clutter components and the targets, each by a forward
    pass and a backward smoothing pass over the window. The first iteration
    starts from the dynamics predictions of the window priors. Tracks are
    initialized from free measurement pairs after the first association and
    take part in the association from the second iteration on; nonuniform
    clutter components are found by clustering free measurements.

    When the window slides by s scans, the first s scans are finalized: their
    smoothed beliefs become the output and the lifecycle of every track
    advances. The priors of the next window are the dynamics predictions of
    the smoothed beliefs at the scan before its first scan.

    :param config: the configuration, defaults when None.
    :type config: TrackerConfig
    :raises IllegalArgumentException: raises the exception if config is not
        a TrackerConfig.
    """

    def __init__(self, config=None):
        if config is None:
            config = TrackerConfig()
        if not isinstance(config, TrackerConfig):
            raise IllegalArgumentException(
                'config must be an instance of TrackerConfig.')
        self._config = config.clone()
        self._logutils = LogUtils(self._get_logger(config))
        self._known_clutter = None
        self._dump_directory = None
        self.reset()

    def reset(self):
        """
        Forgets every track, component and window.
        """
        self._state = None
        self._tracks = []
        self._components = []
        self._weight_prior = None
        self._weights = {}
        self._next_track_id = 1
        self._next_comp_id = 1
        return self

    def get_components(self):
        return list(self._components)

    def get_config(self):
        return self._config

    def get_tracks(self):
        return list(self._tracks)

    def get_weights(self, scan):
        return self._weights.get(scan)

    def get_window_state(self):
        return self._state

    def set_dump_directory(self, directory):
        """
        Makes the tracker append the evidence and marginals of every
        association to CSV files in the directory, one file per window and
        iteration.

        :param directory: an existing directory or None to stop dumping.
        :type directory: str
        :returns: self.
        """
        if directory is not None and not path.isdir(directory):
            raise IllegalArgumentException(
                'Dump directory ' + str(directory) + ' does not exist.')
        self._dump_directory = directory
        return self

    def set_known_clutter(self, clutter):
        """
        Supplies the clutter parameters used in known-clutter mode.

        :param clutter: scan mapped to the list of ClutterTruth active at it.
        :type clutter: dict
        :returns: self.
        """
        CheckValue.check_dict(clutter, 'clutter')
        self._known_clutter = clutter
        return self

    def run(self, frames):
        """
        Tracks a whole sequence of frames: processes the first window, slides
        by the configured step until the frames are exhausted and flushes the
        last window.

        :param frames: the frames of consecutive scans in order.
        :type frames: list(MeasurementFrame)
        :returns: the track estimates and the component estimates, each scan
            exactly once.
        :rtype: tuple(list(TrackEstimate), list(ComponentEstimate))
        :raises DataFormatException: raises the exception if the scans are not
            consecutive.
        """
        CheckValue.check_list(frames, 'frames')
        for frame in frames:
            if not isinstance(frame, MeasurementFrame):
                raise IllegalArgumentException(
                    'frames must contain MeasurementFrame instances.')
        for before, after in zip(frames, frames[1:]):
            if after.get_scan() != before.get_scan() + 1:
                raise DataFormatException(
                    'Frames must cover consecutive scans. Got scan ' +
                    str(after.get_scan()) + ' after ' +
                    str(before.get_scan()))
        self.reset()
        tracks = []
        components = []
        if len(frames) == 0:
            return tracks, components
        window = self._config.get_window_config()
        length = window.get_length()
        step = window.get_step()
        self.process_window(frames[:length])
        position = length
        while position < len(frames):
            new = frames[position:position + step]
            position += len(new)
            finalized = self.slide(new)
            tracks.extend(finalized[0])
            components.extend(finalized[1])
        finalized = self.flush()
        tracks.extend(finalized[0])
        components.extend(finalized[1])
        return tracks, components

    def process_window(self, frames=None):
        """
        Runs the closed-loop iterations over a window. The first call takes
        the frames of the first window; later windows are set up by
        :py:meth:`slide`.

        :param frames: the frames of the first window.
        :type frames: list(MeasurementFrame)
        :returns: the number of iterations run.
        :rtype: int
        :raises IllegalStateException: raises the exception if frames are
            given for a later window or missing for the first one.
        """
        if frames is not None:
            if self._state is not None:
                raise IllegalStateException(
                    'The window is already set, use slide.')
            if len(frames) == 0:
                raise IllegalArgumentException('frames must not be empty.')
            if len(frames) > self._config.get_window_config().get_length():
                raise IllegalArgumentException(
                    'frames exceed the window length.')
            self._state = WindowState(frames, frames[0].get_scan(), True)
            self._init_first_window()
        if self._state is None:
            raise IllegalStateException('No window to process.')
        state = self._state
        window = self._config.get_window_config()
        self._predict_window()
        previous = self._smoothed_means()
        iterations = 0
        for iteration in range(1, window.get_mp_max_iterations() + 1):
            iterations = iteration
            self._associate_window(iteration)
            joined_tracks = []
            joined_components = []
            if iteration == 1:
                joined_tracks = self.init_tracks(
                    state.frames, state.associations,
                    min_scan=state.first_new_scan)
                if (self._config.get_clutter_mode() == ClutterMode.ESTIMATE
                        and not state.first_window):
                    joined_components = self.init_clutter_components(
                        state.frames, state.associations)
            self._update_weights()
            self._update_visibility()
            self._update_clutter()
            self._update_targets()
            if joined_tracks or joined_components:
                self._join(joined_tracks, joined_components)
            current = self._smoothed_means()
            delta = _rms_change(previous, current)
            previous = current
            self._logutils.log_info(
                'Window ' + str(state.get_start()) + ' iteration ' +
                str(iteration) + ': ' + str(len(self._tracks)) +
                ' tracks, ' + str(len(self._components)) +
                ' components, RMS change ' + str(delta))
            if (delta < window.get_mp_tolerance() and not joined_tracks and
                    not joined_components):
                break
        state.iterations = iterations
        return iterations

    def slide(self, frames):
        """
        Finalizes the oldest scans of the window, appends the new frames,
        carries the priors forward and processes the new window.

        :param frames: the new frames, at most s of them, continuing the
            scans of the window.
        :type frames: list(MeasurementFrame)
        :returns: the estimates of the finalized scans.
        :rtype: tuple(list(TrackEstimate), list(ComponentEstimate))
        :raises IllegalStateException: raises the exception if no window has
            been processed.
        """
        if self._state is None:
            raise IllegalStateException('No window has been processed.')
        step = self._config.get_window_config().get_step()
        if len(frames) == 0:
            return [], []
        if len(frames) > step:
            raise IllegalArgumentException(
                'At most ' + str(step) + ' frames can be appended. Got:' +
                str(len(frames)))
        scans = self._state.get_scans()
        if frames[0].get_scan() != scans[-1] + 1:
            raise DataFormatException(
                'Frame of scan ' + str(frames[0].get_scan()) +
                ' does not continue the window ending at ' + str(scans[-1]))
        count = len(frames)
        finalized = self._finalize(scans[:count])
        self._retire_components()
        kept = self._state.frames[count:] + list(frames)
        start = kept[0].get_scan()
        self._carry_priors(start)
        self._state = WindowState(kept, frames[0].get_scan())
        self.process_window()
        return finalized

    def flush(self):
        """
        Finalizes every scan of the current window. The tracker is empty
        afterwards.

        :returns: the estimates of the finalized scans.
        :rtype: tuple(list(TrackEstimate), list(ComponentEstimate))
        """
        if self._state is None:
            return [], []
        finalized = self._finalize(self._state.get_scans())
        self._state = None
        return finalized

    def init_tracks(self, frames, associations=None, min_scan=None):
        """
        Two-point track initialization. Every pair of free measurements at
        scans k and k + δ, 0 < δ <= L_max, whose per-axis Cartesian
        displacement is at most δ·v_max·T gives a candidate. Candidates are
        taken greedily by lag and then by distance, each measurement at most
        once. A new track is born at the later scan with the two-point
        kinematic estimate, IG(3, 2Σm²/N) over its two strengths and the
        initial visibility. Every free measurement within reach of the later
        measurement under the same speed bound is consumed with it.

        :param frames: the frames of the window.
        :type frames: list(MeasurementFrame)
        :param associations: scan mapped to (track rows, AssociationBeliefs);
            None treats every measurement as free.
        :type associations: dict
        :param min_scan: the earliest scan a later measurement may come from.
        :type min_scan: int
        :returns: the new tentative tracks.
        :rtype: list(TargetTrack)
        """
        init = self._config.get_init_config()
        motion = self._config.get_motion()
        noise = self._config.get_sensor().get_noise_covariance()
        by_scan = dict((frame.get_scan(), frame) for frame in frames)
        free = {}
        cartesian = {}
        for frame in frames:
            scan = frame.get_scan()
            free[scan] = array(self._free_measurements(
                frame, None if associations is None else
                associations.get(scan)), dtype=int)
            cartesian[scan] = _cartesian_positions(frame.get_positions())
        candidates = []
        for frame in frames:
            later = frame.get_scan()
            if min_scan is not None and later < min_scan:
                continue
            for lag in range(1, init.get_max_misses() + 1):
                earlier = later - lag
                if earlier not in by_scan:
                    continue
                bound = lag * init.get_max_speed() * motion.get_period()
                first = cartesian[earlier][free[earlier]]
                second = cartesian[later][free[later]]
                shift = np_abs(second[None, :, :] - first[:, None, :])
                for a, b in zip(*nonzero((shift <= bound).all(-1))):
                    candidates.append((lag, float(shift[a, b].sum()),
                                       earlier, int(free[earlier][a]),
                                       later, int(free[later][b])))
        candidates.sort()
        used = set()
        tracks = []
        for lag, _, earlier, j1, later, j2 in candidates:
            if (earlier, j1) in used or (later, j2) in used:
                continue
            used.add((earlier, j1))
            used.add((later, j2))
            origin = cartesian[later][j2]
            for scan in free:
                reach = (abs(scan - later) * init.get_max_speed() *
                         motion.get_period())
                shift = np_abs(cartesian[scan][free[scan]] - origin)
                for j in free[scan][(shift <= reach).all(-1)]:
                    used.add((scan, int(j)))
            kinematics = two_point_belief(
                by_scan[earlier].get_positions()[j1],
                by_scan[later].get_positions()[j2], lag,
                motion.get_period(), noise)
            snr = initial_power_belief(
                [by_scan[earlier].get_strengths()[j1],
                 by_scan[later].get_strengths()[j2]],
                init.get_initial_shape())
            track = TargetTrack(
                self._next_track_id, later, kinematics, snr,
                init.get_initial_visibility(),
                TrackLifecycle(later, self._config.get_confirm_threshold(),
                               self._config.get_delete_threshold()))
            self._next_track_id += 1
            tracks.append(track)
            self._logutils.log_info(
                'Track ' + str(track.track_id) + ' born at scan ' +
                str(later) + ' from scan ' + str(earlier))
        return tracks

    def init_clutter_components(self, frames, associations=None):
        """
        Finds nonuniform clutter components among the free measurements of
        the window, up to the remaining component budget. Each surviving
        cluster seeds a Gaussian-Wishart belief with x̂ at the cluster mean,
        β the points per scan, υ = β + 3 and W = Σ⁻¹/υ, and an Inverse-Gamma
        belief over its strengths.

        :param frames: the frames of the window.
        :type frames: list(MeasurementFrame)
        :param associations: scan mapped to (track rows, AssociationBeliefs);
            None treats every measurement as free.
        :type associations: dict
        :returns: the new components.
        :rtype: list(ClutterComponent)
        """
        init = self._config.get_init_config()
        sensor = self._config.get_sensor()
        budget = init.get_max_components() - (len(self._components) - 1
                                              if self._components else 0)
        if len(frames) == 0 or budget <= 0:
            return []
        positions = []
        strengths = []
        total = 0
        for frame in frames:
            total += len(frame)
            rows = self._free_measurements(
                frame, None if associations is None else
                associations.get(frame.get_scan()))
            positions.extend(frame.get_positions()[rows])
            strengths.extend(frame.get_strengths()[rows])
        clusters = fit_clutter_clusters(
            array(positions).reshape(-1, 2), array(strengths), len(frames),
            sensor.get_volume(), total / float(len(frames)), init, budget)
        start = frames[0].get_scan()
        components = []
        for cluster in clusters:
            dof = cluster.count + 3.0
            spatial = GaussianWishartBelief(
                cluster.mean, cluster.count, inv(cluster.covariance) / dof,
                dof)
            component = ClutterComponent(
                self._next_comp_id, start, spatial,
                initial_power_belief(cluster.strengths,
                                     init.get_initial_shape()))
            component.initial_count = cluster.count
            self._next_comp_id += 1
            components.append(component)
            self._logutils.log_info(
                'Clutter component ' + str(component.comp_id) + ' born at ' +
                str(cluster.mean.tolist()) + ' with ' + str(cluster.count) +
                ' points per scan')
        return components

    def _get_logger(self, config):
        """
        Returns the logger used for the tracker. If no logger is specified,
        the shared default logger is used.
        """
        if config.get_logger() is not None:
            return config.get_logger()
        return default_logger()

    def _free_measurements(self, frame, association):
        if association is None:
            return list(range(len(frame)))
        beliefs = association[1]
        target = beliefs.get_target()[:, 1:].sum(0)
        clutter = beliefs.get_clutter()[1:, 1:].sum(0)
        return [j for j in range(len(frame))
                if target[j] < CLAIM_TARGET and clutter[j] < CLAIM_CLUTTER]

    def _init_first_window(self):
        frames = self._state.frames
        mode = self._config.get_clutter_mode()
        init = self._config.get_init_config()
        strengths = concatenate([frame.get_strengths() for frame in frames])
        threshold = self._config.get_sensor().get_swerling().get_threshold()
        if strengths.size == 0:
            strengths = array([threshold * 1.5])
        start = self._state.get_start()
        uniform = ClutterComponent(
            0, start, None,
            initial_power_belief(strengths, init.get_initial_shape()))
        self._components = [uniform]
        self._weight_prior = array([1.0])
        if mode == ClutterMode.KNOWN:
            return
        if mode == ClutterMode.ESTIMATE:
            components = self.init_clutter_components(frames)
            for component in components:
                self._components.append(component)
            per_scan = (sum(len(frame) for frame in frames) /
                        float(len(frames)))
            counts = [c.initial_count for c in components]
            self._weight_prior = array(
                [max(per_scan - sum(counts), 1.0)] + counts)

    def _predict_window(self):
        # Iteration-0 beliefs: the priors predicted through the window.
        scans = self._state.get_scans()
        start = scans[0]
        if self._config.get_clutter_mode() == ClutterMode.KNOWN:
            self._pin_known_clutter()
        else:
            for component in self._components:
                self._predict_component(component, scans)
            for scan in scans:
                self._weights[scan] = DirichletBelief(self._weight_prior)
        for track in self._tracks:
            self._predict_track(track, [k for k in scans
                                        if k >= track.first_scan(start)])

    def _predict_track(self, track, scans):
        forgetting = self._config.get_forgetting()
        kinematics = track.prior_kinematics
        snr = track.prior_snr
        visibility = track.prior_visibility
        for index, scan in enumerate(scans):
            if index > 0:
                kinematics = cv_predict(kinematics,
                                        self._config.get_motion())
                snr = ig_predict(snr, forgetting.get_snr()).floored()
                visibility = visibility_predict(
                    visibility, self._config.get_visibility_chain())
            for family, belief in (('kinematics', kinematics), ('snr', snr),
                                   ('visibility', visibility)):
                track.beliefs.set_filtered(family, scan, belief)
                track.beliefs.set_smoothed(family, scan, belief)

    def _predict_component(self, component, scans):
        forgetting = self._config.get_forgetting()
        spatial = component.prior_spatial
        cnr = component.prior_cnr
        for index, scan in enumerate(scans):
            if index > 0:
                cnr = ig_predict(cnr, forgetting.get_cnr()).floored()
                if spatial is not None:
                    spatial = gw_predict(spatial, forgetting.get_spatial(),
                                         logutils=self._logutils)
            for family, belief in (('spatial', spatial), ('cnr', cnr)):
                component.beliefs.set_filtered(family, scan, belief)
                component.beliefs.set_smoothed(family, scan, belief)

    def _pin_known_clutter(self):
        if self._known_clutter is None:
            raise IllegalStateException(
                'Known-clutter mode needs the clutter parameters, use ' +
                'set_known_clutter.')
        scans = self._state.get_scans()
        truths = {}
        for scan in scans:
            for truth in self._known_clutter.get(scan, []):
                truths.setdefault(truth.get_comp_id(), truth)
        ids = sorted(truths)
        if 0 not in ids:
            ids.insert(0, 0)
        components = []
        existing = dict((c.comp_id, c) for c in self._components)
        for comp_id in ids:
            component = existing.get(comp_id)
            truth = truths.get(comp_id)
            spatial = None if truth is None or truth.is_uniform() else \
                _pinned_spatial(truth)
            cnr = _pinned_power(1.0 if truth is None else truth.get_cnr())
            if component is None:
                component = ClutterComponent(comp_id, scans[0], spatial, cnr)
            component.estimated = True
            components.append(component)
        self._components = components
        for scan in scans:
            active = dict((truth.get_comp_id(), truth) for truth in
                          self._known_clutter.get(scan, []))
            rates = []
            for component in components:
                truth = active.get(component.comp_id)
                previous = component.beliefs.get_smoothed(
                    'spatial', scan - 1, component.prior_spatial)
                if truth is None:
                    rates.append(0.0)
                    spatial = previous
                    cnr = component.beliefs.get_smoothed(
                        'cnr', scan - 1, component.prior_cnr)
                else:
                    rates.append(truth.get_rate())
                    spatial = (None if truth.is_uniform() else
                               _pinned_spatial(truth))
                    cnr = _pinned_power(truth.get_cnr())
                component.beliefs.set_smoothed('spatial', scan, spatial)
                component.beliefs.set_smoothed('cnr', scan, cnr)
            rates = array(rates) * _PINNED
            if rates.sum() <= 0:
                rates[0] = 1.0
            self._weights[scan] = DirichletBelief(rates)
        self._weight_prior = self._weights[scans[0]].get_concentration()

    def _associate_window(self, iteration):
        state = self._state
        window = self._config.get_window_config()
        sensor = self._config.get_sensor()
        start = state.get_start()
        state.associations = {}
        for frame in state.frames:
            scan = frame.get_scan()
            tracks = [t for t in self._tracks
                      if t.is_associated_at(scan, start)]
            sources = [TargetSource(
                t.beliefs.get_smoothed('kinematics', scan),
                t.beliefs.get_smoothed('snr', scan),
                t.beliefs.get_smoothed('visibility', scan)) for t in tracks]
            clutter = [ClutterSource(
                c.beliefs.get_smoothed('spatial', scan),
                c.beliefs.get_smoothed('cnr', scan))
                for c in self._components]
            evidence = build_evidence(
                frame, sources, clutter, self._weights[scan], sensor,
                self._config.get_invisible_detection(),
                self._config.get_gate(), self._config.get_use_strength())
            bp_state, beliefs = run_bp(
                evidence, window.get_damping(), window.get_bp_tolerance(),
                window.get_bp_max_iterations())
            if not bp_state.converged:
                self._logutils.log_warning(
                    'Belief propagation did not converge at scan ' +
                    str(scan) + ' after ' + str(bp_state.iterations) +
                    ' iterations, largest change ' +
                    str(bp_state.max_delta))
            elif self._logutils.is_enabled_for(DEBUG):
                self._logutils.log_debug(
                    'Scan ' + str(scan) + ' associated in ' +
                    str(bp_state.iterations) + ' iterations')
            rows = dict((t.track_id, i) for i, t in enumerate(tracks))
            state.associations[scan] = (rows, beliefs)
            if self._dump_directory is not None:
                dump_association_csv(
                    path.join(self._dump_directory,
                              'association_' + str(start) + '_' +
                              str(iteration) + '.csv'),
                    scan, evidence, beliefs)

    def _update_weights(self):
        if self._config.get_clutter_mode() == ClutterMode.KNOWN:
            return
        balance = self._config.get_forgetting().get_balance()
        filtered = []
        counts = []
        totals = []
        predicted = DirichletBelief(self._weight_prior)
        for index, frame in enumerate(self._state.frames):
            beliefs = self._state.associations[frame.get_scan()][1]
            total = beliefs.clutter_count()
            if index > 0:
                predicted = dirichlet_predict(filtered[-1], balance, total,
                                              logutils=self._logutils)
            block = beliefs.get_clutter()
            filtered.append(dirichlet_update(predicted, block))
            counts.append(block[:, 1:].sum(1))
            totals.append(total)
        smoothed = dirichlet_smooth(
            filtered, dirichlet_backward(counts, totals, balance))
        for frame, belief in zip(self._state.frames, smoothed):
            self._weights[frame.get_scan()] = belief

    def _update_visibility(self):
        state = self._state
        start = state.get_start()
        swerling = self._config.get_sensor().get_swerling()
        chain = self._config.get_visibility_chain()
        epsilon = self._config.get_invisible_detection()
        for track in self._tracks:
            scans = [k for k in state.get_scans()
                     if k >= track.first_scan(start)]
            evidence = []
            for scan in scans:
                p_d = detection_probability(
                    track.beliefs.get_smoothed('snr', scan).snr_mean(),
                    swerling)
                miss = 0.0
                if track.is_associated_at(scan, start):
                    rows, beliefs = state.associations[scan]
                    miss = beliefs.get_target()[rows[track.track_id], 0]
                evidence.append(visibility_evidence(miss, p_d, epsilon))
            smoothed = hmm_forward_backward(evidence, chain,
                                            track.prior_visibility)
            for scan, probability in zip(scans, smoothed):
                track.beliefs.set_smoothed('visibility', scan, probability)

    def _update_clutter(self):
        if self._config.get_clutter_mode() == ClutterMode.KNOWN:
            return
        forgetting = self._config.get_forgetting()
        swerling = self._config.get_sensor().get_swerling()
        use_strength = self._config.get_use_strength()
        frames = self._state.frames
        for tau, component in enumerate(self._components):
            cnr_predicted = []
            cnr_filtered = []
            spatial_filtered = []
            statistics = []
            cnr = component.prior_cnr
            spatial = component.prior_spatial
            for index, frame in enumerate(frames):
                weights = self._state.associations[frame.get_scan()][1] \
                    .get_clutter()[tau, 1:]
                if index > 0:
                    cnr = ig_predict(cnr_filtered[-1],
                                     forgetting.get_cnr()).floored()
                cnr_predicted.append(cnr)
                cnr_filtered.append(ig_update_counts(
                    cnr, frame.get_strengths(), weights, swerling).floored()
                    if use_strength else cnr)
                if spatial is None:
                    continue
                if index > 0:
                    spatial = gw_predict(spatial_filtered[-1],
                                         forgetting.get_spatial(),
                                         logutils=self._logutils)
                statistics.append(gw_statistics(
                    frame.get_positions(), weights, spatial.get_location()))
                spatial_filtered.append(gw_update(
                    spatial, frame.get_positions(), weights))
            cnr_smoothed = ig_smooth(cnr_filtered, ig_backward(
                cnr_predicted, cnr_filtered, forgetting.get_cnr()))
            spatial_smoothed = (
                gw_smooth(spatial_filtered, gw_backward(
                    statistics, forgetting.get_spatial()))
                if spatial is not None else [None] * len(frames))
            for index, frame in enumerate(frames):
                scan = frame.get_scan()
                component.beliefs.set_filtered('cnr', scan,
                                               cnr_filtered[index])
                component.beliefs.set_smoothed(
                    'cnr', scan, cnr_smoothed[index].floored())
                if spatial is not None:
                    component.beliefs.set_filtered(
                        'spatial', scan, spatial_filtered[index])
                component.beliefs.set_smoothed('spatial', scan,
                                               spatial_smoothed[index])
            component.estimated = True

    def _update_targets(self):
        state = self._state
        start = state.get_start()
        motion = self._config.get_motion()
        forgetting = self._config.get_forgetting()
        sensor = self._config.get_sensor()
        noise = sensor.get_noise_covariance()
        by_scan = dict((frame.get_scan(), frame) for frame in state.frames)
        for track in self._tracks:
            scans = [k for k in state.get_scans()
                     if k >= track.first_scan(start)]
            filtered = []
            snr_predicted = []
            snr_filtered = []
            kinematics = track.prior_kinematics
            snr = track.prior_snr
            for index, scan in enumerate(scans):
                if index > 0:
                    kinematics = cv_predict(filtered[-1], motion)
                    snr = ig_predict(snr_filtered[-1],
                                     forgetting.get_snr()).floored()
                snr_predicted.append(snr)
                if not track.is_associated_at(scan, start):
                    filtered.append(kinematics)
                    snr_filtered.append(snr)
                    continue
                rows, beliefs = state.associations[scan]
                row = beliefs.get_target()[rows[track.track_id]]
                frame = by_scan[scan]
                filtered.append(ukf_update(kinematics, synthetic_measurement(
                    row, frame.get_positions(), noise)))
                snr_filtered.append(ig_update(
                    snr, frame.get_strengths(), row,
                    sensor.get_swerling()).floored()
                    if self._config.get_use_strength() else snr)
            smoothed = urtss_smooth(filtered, motion)
            snr_smoothed = ig_smooth(snr_filtered, ig_backward(
                snr_predicted, snr_filtered, forgetting.get_snr()))
            for index, scan in enumerate(scans):
                track.beliefs.set_filtered('kinematics', scan,
                                           filtered[index])
                track.beliefs.set_smoothed('kinematics', scan,
                                           smoothed[index])
                track.beliefs.set_filtered('snr', scan, snr_filtered[index])
                track.beliefs.set_smoothed('snr', scan,
                                           snr_smoothed[index].floored())
            track.estimated = True

    def _join(self, tracks, components):
        scans = self._state.get_scans()
        start = scans[0]
        for track in tracks:
            self._predict_track(track, [k for k in scans
                                        if k >= track.first_scan(start)])
            self._tracks.append(track)
        if not components:
            return
        counts = array([c.initial_count for c in components])
        for component in components:
            self._predict_component(component, scans)
            self._components.append(component)
        prior = self._weight_prior.copy()
        prior[0] = max(prior[0] - counts.sum(), 1.0)
        self._weight_prior = append(prior, counts)
        for scan in scans:
            self._weights[scan] = DirichletBelief(append(
                self._weights[scan].get_concentration(), counts))

    def _smoothed_means(self):
        means = {}
        for track in self._tracks:
            for scan in track.beliefs.scans('kinematics'):
                belief = track.beliefs.get_smoothed('kinematics', scan)
                means[(track.track_id, scan)] = belief.get_mean()
        return means

    def _finalize(self, scans):
        track_estimates = []
        component_estimates = []
        for scan in scans:
            association = self._state.associations.get(scan)
            for track in self._tracks:
                if track.lifecycle.is_deleted() or not track.estimated:
                    continue
                kinematics = track.beliefs.get_smoothed('kinematics', scan)
                if kinematics is None:
                    continue
                visibility = track.beliefs.get_smoothed('visibility', scan)
                status = track.lifecycle.update(scan, visibility)
                if status == TrackStatus.DELETED:
                    self._logutils.log_info(
                        'Track ' + str(track.track_id) + ' deleted at scan ' +
                        str(scan))
                elif (status == TrackStatus.CONFIRMED and
                      track.lifecycle.get_confirmed_scan() == scan):
                    self._logutils.log_info(
                        'Track ' + str(track.track_id) +
                        ' confirmed at scan ' + str(scan))
                track_estimates.append(TrackEstimate(
                    scan, track.track_id, kinematics.get_mean(),
                    track.beliefs.get_smoothed('snr', scan).snr_mean(),
                    visibility, status, _argmax_measurement(
                        association, track.track_id)))
            weights = self._weights.get(scan)
            total = 0.0 if association is None else \
                association[1].clutter_count()
            counts = estimated_counts(weights, total)
            means = weights.mean_weights()
            for tau, component in enumerate(self._components):
                spatial = component.beliefs.get_smoothed('spatial', scan)
                cnr = component.beliefs.get_smoothed('cnr', scan)
                if cnr is None or tau >= weights.get_size():
                    continue
                component_estimates.append(ComponentEstimate(
                    scan, component.comp_id,
                    None if spatial is None else spatial.get_location(),
                    None if spatial is None else spatial.get_wishart(),
                    None if spatial is None else spatial.get_dof(),
                    cnr.snr_mean(), means[tau], counts[tau]))
        self._tracks = [t for t in self._tracks
                        if not t.lifecycle.is_deleted()]
        return track_estimates, component_estimates

    def _retire_components(self):
        if self._config.get_clutter_mode() != ClutterMode.ESTIMATE:
            return
        scans = self._state.get_scans()
        retired = []
        for tau in range(len(self._components) - 1, 0, -1):
            component = self._components[tau]
            if not component.estimated:
                continue
            empty = True
            for scan in scans:
                association = self._state.associations.get(scan)
                total = 0.0 if association is None else \
                    association[1].clutter_count()
                weights = self._weights[scan]
                if (tau < weights.get_size() and
                        estimated_counts(weights, total)[tau] >=
                        MIN_COMPONENT_COUNT):
                    empty = False
                    break
            if empty:
                retired.append(tau)
        for tau in retired:
            component = self._components.pop(tau)
            self._weight_prior = delete(self._weight_prior, tau)
            for scan in scans:
                self._weights[scan] = DirichletBelief(delete(
                    self._weights[scan].get_concentration(), tau))
            self._logutils.log_info(
                'Clutter component ' + str(component.comp_id) +
                ' removed, fewer than ' + str(MIN_COMPONENT_COUNT) +
                ' expected points per scan over the window')

    def _carry_priors(self, start):
        last = start - 1
        motion = self._config.get_motion()
        forgetting = self._config.get_forgetting()
        chain = self._config.get_visibility_chain()
        for track in self._tracks:
            kinematics = track.beliefs.get_smoothed('kinematics', last)
            if track.estimated and kinematics is not None:
                track.set_prior(
                    start, cv_predict(kinematics, motion),
                    ig_predict(track.beliefs.get_smoothed('snr', last),
                               forgetting.get_snr()).floored(),
                    visibility_predict(
                        track.beliefs.get_smoothed('visibility', last),
                        chain))
                track.birth_pending = False
            elif track.prior_scan < start:
                kinematics = track.prior_kinematics
                snr = track.prior_snr
                visibility = track.prior_visibility
                for _ in range(start - track.prior_scan):
                    kinematics = cv_predict(kinematics, motion)
                    snr = ig_predict(snr, forgetting.get_snr()).floored()
                    visibility = visibility_predict(visibility, chain)
                track.set_prior(start, kinematics, snr, visibility)
                track.birth_pending = False
            track.beliefs.drop_before(start)
        if self._config.get_clutter_mode() == ClutterMode.KNOWN:
            for component in self._components:
                component.beliefs.drop_before(start)
            self._drop_weights_before(start)
            return
        for component in self._components:
            spatial = component.beliefs.get_smoothed('spatial', last)
            cnr = component.beliefs.get_smoothed('cnr', last)
            if not component.estimated or cnr is None:
                spatial = component.prior_spatial
                cnr = component.prior_cnr
                steps = start - component.prior_scan
            else:
                steps = 1
            for _ in range(steps):
                cnr = ig_predict(cnr, forgetting.get_cnr()).floored()
                if spatial is not None:
                    spatial = gw_predict(spatial, forgetting.get_spatial(),
                                         logutils=self._logutils)
            component.set_prior(start, spatial, cnr)
            component.beliefs.drop_before(start)
        association = self._state.associations.get(last)
        total = 0.0 if association is None else association[1].clutter_count()
        weights = self._weights.get(last)
        if weights is not None:
            self._weight_prior = dirichlet_predict(
                weights, forgetting.get_balance(), total,
                logutils=self._logutils).get_concentration().copy()
        self._drop_weights_before(start)

    def _drop_weights_before(self, start):
        for scan in [k for k in self._weights if k < start]:
            del self._weights[scan]


def _pinned_spatial(truth):
    return GaussianWishartBelief(truth.get_mean(), _PINNED,
                                 inv(truth.get_covariance()) / _PINNED,
                                 _PINNED)


def _pinned_power(ratio):
    return InverseGammaBelief(_PINNED, (_PINNED - 1.0) * (ratio + 1.0))


def _argmax_measurement(association, track_id):
    if association is None:
        return None
    rows, beliefs = association
    if track_id not in rows:
        return None
    best = int(beliefs.get_target()[rows[track_id]].argmax())
    return None if best == 0 else best - 1


def _rms_change(previous, current):
    common = [key for key in current if key in previous]
    if not common:
        return 0.0
    total = 0.0
    for key in common:
        diff = current[key] - previous[key]
        total += float(diff.dot(diff))
    return sqrt(total / len(common))


def _cartesian_positions(positions):
    theta = np_radians(positions[:, 1])
    rho = 1000.0 * positions[:, 0]
    return array([rho * np_cos(theta), rho * np_sin(theta)]).T.reshape(-1, 2)
