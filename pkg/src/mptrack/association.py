#
# Copyright (C) 2020 The mptrack authors. All rights reserved.
#
# Licensed under the Universal Permissive License v 1.0 as shown at https://oss.oracle.com/licenses/upl
#
# Please see LICENSE.txt file included in the top-level directory of the
# appropriate download for a copy of the license and additional information.
#

import csv
from itertools import product
from math import log

from numpy import (
    abs as np_abs, array, asarray, exp, isnan, isposinf, log1p,
    maximum, minimum, ones, vstack, where, zeros)
from numpy.linalg import solve

from .common import CheckValue
from .distributions import (
    DirichletBelief, GaussianBelief, GaussianWishartBelief, InverseGammaBelief,
    detection_probability, dirichlet_log_expectations)
from .exception import IllegalArgumentException, SizeLimitException
from .measurement import (
    MeasurementFrame, SensorModel, expected_log_clutter_spatial,
    expected_log_strength, expected_log_target_spatial, linearize,
    measurement_residual)

# Detection probability of an invisible target.
INVISIBLE_DETECTION = 0.01

# Bounds that keep message products finite.
_TINY = 1e-300
_HUGE = 1e150

# Combinatorial guard of the exact enumeration.
MAX_ENUM_TARGETS = 4
MAX_ENUM_COMPONENTS = 2
MAX_ENUM_MEASUREMENTS = 6


class TargetSource(object):
    """
    The beliefs of one target that enter the association evidence at a scan:
    the kinematic belief, the mean-power belief and the latest visible
    probability.

    :param kinematics: the kinematic belief.
    :type kinematics: GaussianBelief
    :param snr: the mean-power belief, shape above 2.
    :type snr: InverseGammaBelief
    :param visibility: the visible probability.
    :type visibility: float
    """

    def __init__(self, kinematics, snr, visibility):
        if not isinstance(kinematics, GaussianBelief):
            raise IllegalArgumentException(
                'kinematics must be an instance of GaussianBelief.')
        if not isinstance(snr, InverseGammaBelief):
            raise IllegalArgumentException(
                'snr must be an instance of InverseGammaBelief.')
        CheckValue.check_probability(visibility, 'visibility')
        self.kinematics = kinematics
        self.snr = snr
        self.visibility = float(visibility)


class ClutterSource(object):
    """
    The beliefs of one clutter component that enter the association evidence:
    the spatial belief (None for the uniform component) and the mean-power
    belief.

    :param spatial: the spatial belief or None.
    :type spatial: GaussianWishartBelief
    :param cnr: the mean-power belief, shape above 2.
    :type cnr: InverseGammaBelief
    """

    def __init__(self, spatial, cnr):
        if spatial is not None and not isinstance(
                spatial, GaussianWishartBelief):
            raise IllegalArgumentException(
                'spatial must be None or a GaussianWishartBelief.')
        if not isinstance(cnr, InverseGammaBelief):
            raise IllegalArgumentException(
                'cnr must be an instance of InverseGammaBelief.')
        self.spatial = spatial
        self.cnr = cnr


class EvidenceMatrix(object):
    """
    The log evidence of one scan. Row i of the target block holds ln θᵗ for
    target i against the miss hypothesis (column 0) and each measurement;
    row τ of the clutter block holds ln θᶜ for component τ, the uniform
    component first, with column 0 the empty-component term.

    :param log_target: an (N_T, M + 1) array.
    :type log_target: array_like
    :param log_clutter: an (N_C + 1, M + 1) array.
    :type log_clutter: array_like
    :raises IllegalArgumentException: raises the exception if the shapes do
        not agree or an entry is NaN or +inf.
    """

    def __init__(self, log_target, log_clutter):
        log_target = array(log_target, dtype=float)
        log_clutter = array(log_clutter, dtype=float)
        if log_clutter.ndim != 2 or log_clutter.shape[0] < 1:
            raise IllegalArgumentException(
                'log_clutter must be a 2-D array with at least the uniform ' +
                'component row.')
        columns = log_clutter.shape[1]
        if log_target.size == 0:
            log_target = log_target.reshape(0, columns)
        if log_target.ndim != 2 or log_target.shape[1] != columns:
            raise IllegalArgumentException(
                'log_target must have ' + str(columns) + ' columns. Got:' +
                str(log_target.shape))
        for block in (log_target, log_clutter):
            if isnan(block).any() or isposinf(block).any():
                raise IllegalArgumentException(
                    'Evidence must be finite or -inf.')
        self._log_target = log_target
        self._log_clutter = log_clutter

    def get_log_clutter(self):
        return self._log_clutter

    def get_log_target(self):
        return self._log_target

    def get_num_components(self):
        """
        Returns N_C + 1, the number of clutter rows including the uniform
        component.
        """
        return self._log_clutter.shape[0]

    def get_num_measurements(self):
        return self._log_clutter.shape[1] - 1

    def get_num_targets(self):
        return self._log_target.shape[0]

    def get_theta(self):
        """
        Returns the linear evidence (θᵗ, θᶜ). Each measurement column is
        rescaled so that its largest entry is one; association marginals are
        invariant to that rescaling.

        :returns: the target and clutter blocks.
        :rtype: tuple
        """
        log_target = self._log_target.copy()
        log_clutter = self._log_clutter.copy()
        if log_clutter.shape[1] > 1:
            scale = vstack([log_target[:, 1:], log_clutter[:, 1:]]).max(0)
            scale = where(scale == float('-inf'), 0.0, scale)
            log_target[:, 1:] -= scale
            log_clutter[:, 1:] -= scale
        return exp(log_target), exp(log_clutter)


class BpState(object):
    """
    The final messages of a belief propagation run and its diagnostics.
    """

    def __init__(self, beta_target, beta_clutter, eta_target, eta_clutter,
                 iterations, converged, max_delta):
        self.beta_target = beta_target
        self.beta_clutter = beta_clutter
        self.eta_target = eta_target
        self.eta_clutter = eta_clutter
        self.iterations = iterations
        self.converged = converged
        self.max_delta = max_delta

    def __repr__(self):
        return ('BpState(iterations=' + str(self.iterations) +
                ', converged=' + str(self.converged) + ', max_delta=' +
                str(self.max_delta) + ')')


class AssociationBeliefs(object):
    """
    Marginal association probabilities of one scan.

    The target block âᵗ has one row per target over (miss, measurements); each
    row sums to one. The clutter block âᶜ has one row per component, the
    uniform component first; column 0 holds the probability that the
    component generated no measurement. For every measurement the target and
    clutter probabilities sum to one.
    """

    def __init__(self, target, clutter):
        self._target = asarray(target, dtype=float)
        self._clutter = asarray(clutter, dtype=float)

    def get_clutter(self):
        return self._clutter

    def get_num_measurements(self):
        return self._clutter.shape[1] - 1

    def get_target(self):
        return self._target

    def clutter_count(self, index=None):
        """
        Returns the expected number of clutter points of the scan, or of one
        component when index is given.
        """
        if index is None:
            return float(self._clutter[:, 1:].sum())
        return float(self._clutter[index, 1:].sum())

    def normalization_errors(self):
        """
        Returns the largest deviations from one of the target row sums and of
        the measurement column sums.

        :returns: (row error, column error).
        :rtype: tuple
        """
        row = (float(np_abs(self._target.sum(1) - 1).max())
               if self._target.shape[0] > 0 else 0.0)
        if self._clutter.shape[1] > 1:
            totals = (self._target[:, 1:].sum(0) +
                      self._clutter[:, 1:].sum(0))
            column = float(np_abs(totals - 1).max())
        else:
            column = 0.0
        return row, column

    def target_argmax(self):
        """
        Returns the most probable hypothesis of each target, 0 for a miss
        and j for measurement j.
        """
        if self._target.shape[0] == 0:
            return []
        return [int(j) for j in self._target.argmax(1)]


def build_evidence(frame, tracks, clutter, weights, sensor,
                   invisible_detection=INVISIBLE_DETECTION, gate=None,
                   use_strength=True):
    """
    Builds the log evidence of one scan.

    For target i with visible probability q and detection probability p̂_D at
    its mean SNR, ln θᵗ_i0 = ln(q(1 - p̂_D) + (1 - q)(1 - ε)) and ln θᵗ_ij
    = ln(q·p̂_D + (1 - q)ε) + E[ln p(y_j | x_i)] + E[ln p(m_j; σ_i)]. For
    component τ, ln θᶜ_τj = E[ln f_τ(y_j)] + E[ln p(m_j; σ_τ)] + E[ln π_τ] and
    ln θᶜ_τ0 = 0. Without strengths the E[ln p(m_j; σ)] terms are left out
    and only the kinematic and spatial terms compete.

    :param frame: the detections.
    :type frame: MeasurementFrame
    :param tracks: one entry per target.
    :type tracks: list(TargetSource)
    :param clutter: one entry per component, the uniform component first.
    :type clutter: list(ClutterSource)
    :param weights: the mixing-weight belief, one concentration per
        component.
    :type weights: DirichletBelief
    :param sensor: the sensor.
    :type sensor: SensorModel
    :param invisible_detection: ε, the detection probability of an invisible
        target.
    :type invisible_detection: float
    :param gate: a Mahalanobis gate on target measurement pairs, None for no
        gating.
    :type gate: float
    :param use_strength: False to leave the strength terms out.
    :type use_strength: bool
    :returns: the evidence.
    :rtype: EvidenceMatrix
    :raises IllegalArgumentException: raises the exception if the weights do
        not match the components.
    """
    if not isinstance(frame, MeasurementFrame):
        raise IllegalArgumentException(
            'frame must be an instance of MeasurementFrame.')
    if not isinstance(sensor, SensorModel):
        raise IllegalArgumentException(
            'sensor must be an instance of SensorModel.')
    if not isinstance(weights, DirichletBelief):
        raise IllegalArgumentException(
            'weights must be an instance of DirichletBelief.')
    if len(clutter) == 0 or len(clutter) != weights.get_size():
        raise IllegalArgumentException(
            'weights must have one concentration per clutter component. ' +
            'Got ' + str(weights.get_size()) + ' for ' + str(len(clutter)))
    if clutter[0].spatial is not None:
        raise IllegalArgumentException(
            'The first clutter component must be the uniform one.')
    CheckValue.check_probability(invisible_detection, 'invisible_detection')
    CheckValue.check_boolean(use_strength, 'use_strength')
    swerling = sensor.get_swerling()
    positions = frame.get_positions()
    strengths = frame.get_strengths()
    count = len(frame)
    log_target = zeros((len(tracks), count + 1))
    for i, track in enumerate(tracks):
        q = track.visibility
        p_d = detection_probability(track.snr.snr_mean(), swerling)
        log_target[i, 0] = log(max(
            q * (1 - p_d) + (1 - q) * (1 - invisible_detection), _TINY))
        if count == 0:
            continue
        linearization = linearize(track.kinematics)
        log_target[i, 1:] = (
            log(max(q * p_d + (1 - q) * invisible_detection, _TINY)) +
            expected_log_target_spatial(
                track.kinematics, positions, sensor, linearization,
                normalized=True))
        if use_strength:
            log_target[i, 1:] += expected_log_strength(
                track.snr, strengths, swerling, normalized=True)
        if gate is not None:
            innovation = (linearization.get_projected_covariance() +
                          sensor.get_noise_covariance())
            diff = measurement_residual(
                positions, linearization.get_predicted())
            distance = (diff * solve(innovation, diff.T).T).sum(1)
            log_target[i, 1:] = where(distance > gate * gate,
                                      float('-inf'), log_target[i, 1:])
    log_weights = dirichlet_log_expectations(weights)
    log_clutter = zeros((len(clutter), count + 1))
    if count > 0:
        for tau, component in enumerate(clutter):
            if log_weights[tau] == float('-inf'):
                log_clutter[tau, 1:] = float('-inf')
                continue
            log_clutter[tau, 1:] = (
                expected_log_clutter_spatial(
                    component.spatial, positions, sensor) +
                log_weights[tau])
            if use_strength:
                log_clutter[tau, 1:] += expected_log_strength(
                    component.cnr, strengths, swerling, normalized=True)
    return EvidenceMatrix(log_target, log_clutter)


def _bounded(messages):
    return messages / (1.0 + messages)


def _proportional_fit(p_target, p_clutter, sweeps=200, tolerance=1e-12):
    # Alternate measurement column and target row normalizations.
    for _ in range(sweeps):
        if p_clutter.shape[1] > 1:
            totals = p_target[:, 1:].sum(0) + p_clutter[:, 1:].sum(0)
            totals = maximum(totals, _TINY)
            p_target[:, 1:] /= totals
            p_clutter[:, 1:] /= totals
        if p_target.shape[0] > 0:
            p_target /= maximum(p_target.sum(1), _TINY)[:, None]
        if p_clutter.shape[1] <= 1:
            break
        totals = p_target[:, 1:].sum(0) + p_clutter[:, 1:].sum(0)
        if np_abs(totals - 1).max() < tolerance:
            break
    return p_target, p_clutter


def _clutter_eta(beta_clutter):
    # Message of the non-empty constraint of each nonuniform component.
    eta = ones(beta_clutter.shape)
    if beta_clutter.shape[0] <= 1:
        return eta
    beta = beta_clutter[1:]
    logs = log1p(beta[:, 1:])
    total = logs.sum(1)
    eta[1:, 0] = exp(-total)
    excluded = total[:, None] - logs
    eta[1:, 1:] = 1.0 / (1.0 + beta[:, 0:1] * exp(-excluded))
    return eta


def run_bp(evidence, damping=0.9, tolerance=1e-6, max_iterations=1000):
    """
    Runs damped loopy belief propagation on the association constraints of
    one scan: each target takes at most one measurement, each measurement has
    exactly one source and an empty nonuniform component generates no
    measurement. Messages start at one, are updated in parallel and damped as
    μ ← γ·μ_old + (1 - γ)·μ_new. The run stops when the largest change of
    any message, measured as μ/(1 + μ), falls below the tolerance.

    The marginals come from the odds β·η of every association variable,
    followed by iterative proportional fitting over target rows and
    measurement columns.

    :param evidence: the evidence.
    :type evidence: EvidenceMatrix
    :param damping: γ in [0, 1).
    :type damping: float
    :param tolerance: δ, positive.
    :type tolerance: float
    :param max_iterations: the iteration cap.
    :type max_iterations: int
    :returns: the final state and the marginals. A run that hits the cap
        returns converged False with its last iterate.
    :rtype: tuple(BpState, AssociationBeliefs)
    :raises IllegalArgumentException: raises the exception if a parameter is
        out of range.
    """
    CheckValue.check_range(damping, 'damping', 0, 1, high_open=True)
    CheckValue.check_float_gt_zero(tolerance, 'tolerance')
    CheckValue.check_int_gt_zero(max_iterations, 'max_iterations')
    theta_t, theta_c = evidence.get_theta()
    beta_t = ones(theta_t.shape)
    beta_c = ones(theta_c.shape)
    eta_t = ones(theta_t.shape)
    eta_c = ones(theta_c.shape)
    iterations = 0
    converged = True
    max_delta = 0.0
    if evidence.get_num_measurements() > 0:
        converged = False
        max_delta = float('inf')
        while iterations < max_iterations:
            iterations += 1
            rho_t = theta_t[:, 1:] * eta_t[:, 1:]
            rho_c = theta_c[:, 1:] * eta_c[:, 1:]
            totals = rho_t.sum(0) + rho_c.sum(0)
            new_beta_t = theta_t.copy()
            new_beta_t[:, 1:] = theta_t[:, 1:] / maximum(
                totals - rho_t, _TINY)
            new_beta_c = theta_c.copy()
            new_beta_c[:, 1:] = theta_c[:, 1:] / maximum(
                totals - rho_c, _TINY)
            new_beta_t = minimum(new_beta_t, _HUGE)
            new_beta_c = minimum(new_beta_c, _HUGE)
            row_totals = beta_t.sum(1)[:, None]
            new_eta_t = minimum(
                1.0 / maximum(row_totals - beta_t, _TINY), _HUGE)
            new_eta_c = _clutter_eta(beta_c)
            max_delta = 0.0
            for old, new in ((beta_t, new_beta_t), (beta_c, new_beta_c),
                             (eta_t, new_eta_t), (eta_c, new_eta_c)):
                damped = damping * old + (1 - damping) * new
                if old.size > 0:
                    max_delta = max(max_delta, float(np_abs(
                        _bounded(damped) - _bounded(old)).max()))
                old[...] = damped
            if max_delta < tolerance:
                converged = True
                break
    p_target = _bounded(minimum(beta_t * eta_t, _HUGE))
    p_clutter = _bounded(minimum(beta_c * eta_c, _HUGE))
    p_target, p_clutter = _proportional_fit(p_target, p_clutter)
    p_clutter[0, 0] = float((1.0 - p_clutter[0, 1:]).clip(0, 1).prod())
    state = BpState(beta_t, beta_c, eta_t, eta_c, iterations, converged,
                    max_delta)
    return state, AssociationBeliefs(p_target, p_clutter)


def enumerate_exact(evidence):
    """
    Computes the exact association marginals by summing the joint weight of
    every feasible association event: each measurement has one source, each
    target takes at most one measurement (the miss term θᵗ_i0 applies
    otherwise) and a nonuniform component may be flagged empty (weight θᶜ_τ0)
    only when it generated no measurement.

    :param evidence: the evidence, at most 4 targets, 2 nonuniform components
        and 6 measurements.
    :type evidence: EvidenceMatrix
    :returns: the exact marginals.
    :rtype: AssociationBeliefs
    :raises SizeLimitException: raises the exception if the instance exceeds
        the limits.
    """
    num_targets = evidence.get_num_targets()
    num_components = evidence.get_num_components()
    count = evidence.get_num_measurements()
    if (num_targets > MAX_ENUM_TARGETS or
            num_components - 1 > MAX_ENUM_COMPONENTS or
            count > MAX_ENUM_MEASUREMENTS):
        raise SizeLimitException(
            'Exact enumeration supports at most ' + str(MAX_ENUM_TARGETS) +
            ' targets, ' + str(MAX_ENUM_COMPONENTS) + ' components and ' +
            str(MAX_ENUM_MEASUREMENTS) + ' measurements. Got ' +
            str(num_targets) + ', ' + str(num_components - 1) + ', ' +
            str(count))
    theta_t, theta_c = evidence.get_theta()
    sources = num_targets + num_components
    events = array(list(product(range(sources), repeat=count)),
                   dtype=int).reshape(sources ** count, count)
    theta = vstack([theta_t[:, 1:], theta_c[:, 1:]])
    weight = ones(events.shape[0])
    for j in range(count):
        weight *= theta[events[:, j], j]
    unassigned = []
    for i in range(num_targets):
        hits = (events == i).sum(1)
        weight = where(hits > 1, 0.0, weight)
        unassigned.append(hits == 0)
        weight = weight * where(hits == 0, theta_t[i, 0], 1.0)
    unused = [(events == num_targets).sum(1) == 0]
    for tau in range(1, num_components):
        empty = (events == num_targets + tau).sum(1) == 0
        unused.append(empty)
        weight = weight * where(empty, 1.0 + theta_c[tau, 0], 1.0)
    normalizer = weight.sum()
    if normalizer <= 0:
        raise IllegalArgumentException(
            'No association event has positive weight.')
    p_target = zeros(theta_t.shape)
    p_clutter = zeros(theta_c.shape)
    for i in range(num_targets):
        p_target[i, 0] = weight[unassigned[i]].sum() / normalizer
        for j in range(count):
            p_target[i, j + 1] = weight[events[:, j] == i].sum() / normalizer
    for tau in range(num_components):
        empty_mass = weight[unused[tau]].sum() / normalizer
        if tau == 0:
            p_clutter[tau, 0] = empty_mass
        else:
            share = theta_c[tau, 0] / (1.0 + theta_c[tau, 0])
            p_clutter[tau, 0] = empty_mass * share
        for j in range(count):
            p_clutter[tau, j + 1] = (
                weight[events[:, j] == num_targets + tau].sum() / normalizer)
    return AssociationBeliefs(p_target, p_clutter)


def dump_association_csv(path, scan, evidence, beliefs):
    """
    Appends the evidence and marginals of one scan to a CSV file with the
    columns scan, source, index, measurement, log_theta, a_hat.

    :param path: the CSV file.
    :type path: str
    :param scan: the scan index.
    :type scan: int
    :param evidence: the evidence.
    :type evidence: EvidenceMatrix
    :param beliefs: the marginals.
    :type beliefs: AssociationBeliefs
    """
    with open(path, 'a') as f:
        writer = csv.writer(f)
        for source, logs, marginals in (
                ('target', evidence.get_log_target(), beliefs.get_target()),
                ('clutter', evidence.get_log_clutter(),
                 beliefs.get_clutter())):
            for index in range(logs.shape[0]):
                for j in range(logs.shape[1]):
                    writer.writerow([scan, source, index, j,
                                     repr(float(logs[index, j])),
                                     repr(float(marginals[index, j]))])
