#
# Copyright (C) 2020 The mptrack authors. All rights reserved.
#
# Licensed under the Universal Permissive License v 1.0 as shown at https://oss.oracle.com/licenses/upl
#
# Please see LICENSE.txt file included in the top-level directory of the
# appropriate download for a copy of the license and additional information.
#

from filterpy.kalman import UnscentedKalmanFilter
from numpy import array, asarray, outer, zeros
from numpy.linalg import inv

from .common import CheckValue
from .distributions import (
    DirichletBelief, GaussianBelief, GaussianWishartBelief, InverseGammaBelief,
    nearest_spd)
from .dynamics import CvModel, ig_predict
from .exception import IllegalArgumentException
from .measurement import (
    measurement_mean, measurement_residual, observe, sigma_points,
    wrap_degrees)

# Association mass below which a source counts as unobserved at a scan.
MIN_ASSOCIATION = 1e-6
MIN_CLUTTER_COUNT = 1e-9


class WindowBeliefs(object):
    """
    The per-scan beliefs of one track or clutter component over the current
    window, kept separately for the filtered and the smoothed pass. Families
    are 'kinematics', 'snr', 'visibility', 'spatial', 'cnr' and 'weights'.
    """
    FAMILIES = ('kinematics', 'snr', 'visibility', 'spatial', 'cnr',
                'weights')

    def __init__(self):
        self._filtered = dict((family, {}) for family in self.FAMILIES)
        self._smoothed = dict((family, {}) for family in self.FAMILIES)

    def drop_before(self, scan):
        """
        Forgets every belief of a scan before the given one.
        """
        for store in (self._filtered, self._smoothed):
            for beliefs in store.values():
                for k in [k for k in beliefs if k < scan]:
                    del beliefs[k]

    def get_filtered(self, family, scan, default=None):
        return self._filtered[self._check(family)].get(scan, default)

    def get_smoothed(self, family, scan, default=None):
        return self._smoothed[self._check(family)].get(scan, default)

    def scans(self, family):
        return sorted(self._smoothed[self._check(family)])

    def set_filtered(self, family, scan, belief):
        self._filtered[self._check(family)][scan] = belief

    def set_smoothed(self, family, scan, belief):
        self._smoothed[self._check(family)][scan] = belief

    def _check(self, family):
        if family not in self._filtered:
            raise IllegalArgumentException(
                'Unknown belief family: ' + str(family))
        return family


class SyntheticMeasurement(object):
    """
    The single pseudo measurement that summarizes the association-weighted
    detections of a target at one scan: ȳ = Σ â_j y_j/(1 - â₀) with the noise
    inflated to R/(1 - â₀).
    """

    def __init__(self, value, noise, weight):
        self._value = asarray(value, dtype=float)
        self._noise = asarray(noise, dtype=float)
        self._weight = float(weight)

    def get_noise(self):
        return self._noise

    def get_value(self):
        return self._value

    def get_weight(self):
        return self._weight


def synthetic_measurement(row, positions, noise):
    """
    Builds the synthetic measurement of a target from its association row.
    Azimuths are averaged as wrapped offsets from the most probable
    measurement.

    :param row: âᵗ over (miss, measurements).
    :type row: array_like
    :param positions: the (M, 2) measurement positions.
    :type positions: ndarray
    :param noise: the measurement noise R.
    :type noise: ndarray
    :returns: the synthetic measurement, None when 1 - â₀ is negligible.
    :rtype: SyntheticMeasurement
    """
    row = asarray(row, dtype=float)
    weight = 1.0 - row[0]
    if weight <= MIN_ASSOCIATION or positions.shape[0] == 0:
        return None
    probs = row[1:]
    reference = positions[probs.argmax()]
    offsets = measurement_residual(positions, reference)
    value = reference + probs.dot(offsets) / weight
    value[1] = wrap_degrees(value[1])
    return SyntheticMeasurement(value, asarray(noise) / weight, weight)


def _identity(x, dt):
    return x


def ukf_update(predicted, synthetic, hx=None, residual_fn=None,
               mean_fn=None):
    """
    Updates a kinematic belief against a synthetic measurement with the
    unscented Kalman filter.

    :param predicted: the predicted belief.
    :type predicted: GaussianBelief
    :param synthetic: the synthetic measurement, None for a miss.
    :type synthetic: SyntheticMeasurement
    :param hx: the measurement function, :py:func:`observe` by default.
    :type hx: callable
    :param residual_fn: the measurement residual, wrapped by default.
    :type residual_fn: callable
    :param mean_fn: the measurement mean, circular by default.
    :type mean_fn: callable
    :returns: the updated belief, the prediction itself for a miss.
    :rtype: GaussianBelief
    """
    if synthetic is None or synthetic.get_weight() <= MIN_ASSOCIATION:
        return predicted
    if hx is None:
        hx = observe
        residual_fn = measurement_residual if residual_fn is None else \
            residual_fn
        mean_fn = measurement_mean if mean_fn is None else mean_fn
    dim = predicted.get_dimension()
    z = synthetic.get_value()
    ukf = UnscentedKalmanFilter(
        dim_x=dim, dim_z=z.shape[0], dt=1.0, hx=hx, fx=_identity,
        points=sigma_points(dim), z_mean_fn=mean_fn, residual_z=residual_fn)
    ukf.x = array(predicted.get_mean())
    ukf.P = array(predicted.get_covariance())
    ukf.Q = zeros((dim, dim))
    ukf.sigmas_f = ukf.points_fn.sigma_points(ukf.x, ukf.P)
    ukf.update(z, R=synthetic.get_noise())
    return GaussianBelief(ukf.x, nearest_spd(ukf.P))


def urtss_smooth(filtered, model, hx=None):
    """
    Runs the unscented Rauch-Tung-Striebel smoother backwards over a filtered
    sequence. The last smoothed belief equals the last filtered one.

    :param filtered: the filtered beliefs in scan order.
    :type filtered: list(GaussianBelief)
    :param model: the motion model the filter predicted with.
    :type model: CvModel
    :param hx: the measurement function the filter updated with,
        :py:func:`observe` by default.
    :type hx: callable
    :returns: the smoothed beliefs.
    :rtype: list(GaussianBelief)
    :raises IllegalArgumentException: raises the exception if the sequence is
        empty.
    """
    if len(filtered) == 0:
        raise IllegalArgumentException('filtered must not be empty.')
    if not isinstance(model, CvModel):
        raise IllegalArgumentException(
            'model must be an instance of CvModel.')
    if len(filtered) == 1:
        return list(filtered)
    dim = filtered[0].get_dimension()
    if hx is None:
        hx = observe
        dim_z = 2
    else:
        dim_z = asarray(hx(filtered[0].get_mean())).size
    ukf = UnscentedKalmanFilter(
        dim_x=dim, dim_z=dim_z, dt=model.get_period(), hx=hx,
        fx=model.transition, points=sigma_points(dim))
    ukf.Q = model.process_noise()
    xs = array([b.get_mean() for b in filtered])
    ps = array([b.get_covariance() for b in filtered])
    xs, ps, _ = ukf.rts_smoother(xs, ps)
    return [GaussianBelief(x, nearest_spd(p)) for x, p in zip(xs, ps)]


def ig_update(predicted, strengths, row, model):
    """
    Updates a target's mean-power belief against its association row. Each
    measurement proposes the conjugate posterior (α + n, β + n·m_j² - n·d²)
    and the proposals are averaged with weights â_j/(1 - â₀).

    :param predicted: the predicted belief.
    :type predicted: InverseGammaBelief
    :param strengths: the M strengths of the scan.
    :type strengths: array_like
    :param row: âᵗ over (miss, measurements).
    :type row: array_like
    :param model: the strength model.
    :type model: SwerlingModel
    :returns: the updated belief, the prediction itself when 1 - â₀ is
        negligible.
    :rtype: InverseGammaBelief
    """
    row = asarray(row, dtype=float)
    strengths = asarray(strengths, dtype=float)
    if row.shape[0] != strengths.shape[0] + 1:
        raise IllegalArgumentException(
            'row must have one entry per measurement plus the miss entry.')
    weight = 1.0 - row[0]
    if weight <= MIN_ASSOCIATION:
        return predicted
    n = model.get_order()
    d2 = model.get_threshold() ** 2
    probs = row[1:] / weight
    shape = probs.sum() * (predicted.get_shape() + n)
    scale = probs.dot(predicted.get_scale() + n * strengths ** 2 - n * d2)
    return InverseGammaBelief(shape, scale)


def ig_update_counts(predicted, strengths, weights, model):
    """
    Updates a clutter component's mean-power belief. A component explains
    many measurements per scan, so the weighted sufficient statistics
    accumulate: α + n·Σw_j and β + n·Σw_j·(m_j² - d²).

    :param predicted: the predicted belief.
    :type predicted: InverseGammaBelief
    :param strengths: the M strengths of the scan.
    :type strengths: array_like
    :param weights: âᶜ of the component for each measurement.
    :type weights: array_like
    :param model: the strength model.
    :type model: SwerlingModel
    :returns: the updated belief.
    :rtype: InverseGammaBelief
    """
    weights = asarray(weights, dtype=float)
    strengths = asarray(strengths, dtype=float)
    total = weights.sum()
    if total <= MIN_CLUTTER_COUNT:
        return predicted
    n = model.get_order()
    d2 = model.get_threshold() ** 2
    return InverseGammaBelief(
        predicted.get_shape() + n * total,
        predicted.get_scale() + n * weights.dot(strengths ** 2 - d2))


class IgMessage(object):
    """
    A backward message on a mean power, σ^-(α+1)·exp(-β/σ). The uninformative
    message has α = -1 and β = 0.
    """

    def __init__(self, shape=-1.0, scale=0.0):
        self.shape = float(shape)
        self.scale = float(scale)

    def get_scale(self):
        return self.scale

    def get_shape(self):
        return self.shape

    def is_flat(self):
        return self.shape == -1.0 and self.scale == 0.0


def ig_backward(predicted, filtered, factor):
    """
    Computes the backward messages of the Inverse-Gamma smoother. The
    likelihood of scan k + 1 is recovered as the difference between its
    filtered and predicted parameters and combined with the backward message
    of scan k + 1. The combination is carried one scan back by
    :py:func:`mptrack.dynamics.ig_predict` in reverse. The message of the
    last scan is uninformative, and so is every message with no likelihood
    after it.

    :param predicted: the predicted beliefs in scan order.
    :type predicted: list(InverseGammaBelief)
    :param filtered: the filtered beliefs in scan order.
    :type filtered: list(InverseGammaBelief)
    :param factor: the forgetting factor u.
    :type factor: float
    :returns: the backward messages.
    :rtype: list(IgMessage)
    """
    if len(predicted) != len(filtered):
        raise IllegalArgumentException(
            'predicted and filtered must be aligned.')
    CheckValue.check_range(factor, 'factor', 1, None)
    messages = [IgMessage() for _ in filtered]
    for k in range(len(filtered) - 2, -1, -1):
        after = messages[k + 1]
        combined = IgMessage(
            after.shape + (filtered[k + 1].get_shape() -
                           predicted[k + 1].get_shape()),
            after.scale + (filtered[k + 1].get_scale() -
                           predicted[k + 1].get_scale()))
        if not combined.is_flat():
            messages[k] = ig_predict(combined, factor, reverse=True)
    return messages


def ig_smooth(filtered, backward):
    """
    Combines filtered beliefs with backward messages:
    α = α_f + α_b + 1 and β = β_f + β_b.

    :param filtered: the filtered beliefs in scan order.
    :type filtered: list(InverseGammaBelief)
    :param backward: the backward messages, None entries are uninformative.
    :type backward: list(IgMessage)
    :returns: the smoothed beliefs.
    :rtype: list(InverseGammaBelief)
    """
    if len(filtered) != len(backward):
        raise IllegalArgumentException(
            'filtered and backward must be aligned.')
    smoothed = []
    for belief, message in zip(filtered, backward):
        if message is None or message.is_flat():
            smoothed.append(belief)
            continue
        smoothed.append(InverseGammaBelief(
            max(belief.get_shape() + message.shape + 1.0, 1e-9),
            max(belief.get_scale() + message.scale, 1e-12)))
    return smoothed


class GwStatistics(object):
    """
    The association-weighted statistics of one scan for a clutter
    component: the count Nᶜ, the mean x̄ and the scatter Ξ.
    """

    def __init__(self, count, mean, scatter):
        self.count = float(count)
        self.mean = mean
        self.scatter = scatter


def gw_statistics(positions, weights, reference):
    """
    Computes the weighted statistics of measurement positions. Azimuths are
    taken as wrapped offsets from the reference point.

    :param positions: the (M, 2) measurement positions.
    :type positions: ndarray
    :param weights: the M association weights.
    :type weights: array_like
    :param reference: the point the azimuth offsets are taken from.
    :type reference: array_like
    :returns: the statistics, None when the count is negligible.
    :rtype: GwStatistics
    """
    weights = asarray(weights, dtype=float)
    count = weights.sum()
    if count < MIN_CLUTTER_COUNT:
        return None
    offsets = measurement_residual(positions, reference)
    mean_offset = weights.dot(offsets) / count
    centred = offsets - mean_offset
    scatter = (centred * weights[:, None]).T.dot(centred) / count
    mean = asarray(reference, dtype=float) + mean_offset
    return GwStatistics(count, mean, 0.5 * (scatter + scatter.T))


def _gw_combine(location, beta, wishart_inv, dof, stats):
    count = stats.count
    diff = measurement_residual(stats.mean, location)
    new_beta = beta + count
    new_location = location + count * diff / new_beta
    new_location[1] = wrap_degrees(new_location[1])
    new_inv = (wishart_inv + count * stats.scatter +
               (beta * count / new_beta) * outer(diff, diff))
    return new_location, new_beta, new_inv, dof + count


def gw_update(predicted, positions, weights):
    """
    Updates a clutter component's spatial belief with the weighted
    measurements of a scan: β' = β + Nᶜ, υ' = υ + Nᶜ,
    x̂' = (β·x̂ + Nᶜ·x̄)/β' and
    W'⁻¹ = W⁻¹ + Nᶜ·Ξ + (β·Nᶜ/(β + Nᶜ))(x̄ - x̂)(x̄ - x̂)ᵀ.

    :param predicted: the predicted belief.
    :type predicted: GaussianWishartBelief
    :param positions: the (M, 2) measurement positions.
    :type positions: ndarray
    :param weights: âᶜ of the component for each measurement.
    :type weights: array_like
    :returns: the updated belief, the prediction itself when Nᶜ is
        negligible.
    :rtype: GaussianWishartBelief
    """
    positions = asarray(positions, dtype=float).reshape(-1, 2)
    stats = gw_statistics(positions, weights, predicted.get_location())
    if stats is None:
        return predicted
    location, beta, wishart_inv, dof = _gw_combine(
        array(predicted.get_location()), predicted.get_beta(),
        inv(predicted.get_wishart()), predicted.get_dof(), stats)
    return GaussianWishartBelief(
        location, beta, nearest_spd(inv(nearest_spd(wishart_inv))), dof)


class GwMessage(object):
    """
    A backward message on a clutter component's centroid and precision, held
    in the parameters of a Gaussian-Wishart density with the inverse scale
    matrix. The uninformative message has β = 0, W⁻¹ = 0 and υ = m + 1.
    """

    def __init__(self, location=None, beta=0.0, wishart_inv=None, dof=3.0):
        self.location = (zeros(2) if location is None else
                         asarray(location, dtype=float))
        self.beta = float(beta)
        self.wishart_inv = (zeros((2, 2)) if wishart_inv is None else
                            asarray(wishart_inv, dtype=float))
        self.dof = float(dof)

    def is_flat(self):
        return self.beta == 0.0 and not self.wishart_inv.any()


def gw_backward(statistics, factor):
    """
    Computes the backward messages of the Gaussian-Wishart smoother from the
    per-scan statistics. The message of scan k combines the statistics of
    scan k + 1 with the message of scan k + 1 and applies the spreading
    transition, W⁻¹/ξ and υ ← ξ(υ - m - 1) + m + 1, which leaves the
    uninformative message unchanged.

    :param statistics: the per-scan statistics in scan order, None for
        scans without associated mass.
    :type statistics: list(GwStatistics)
    :param factor: the forgetting factor ξ.
    :type factor: float
    :returns: the backward messages.
    :rtype: list(GwMessage)
    """
    CheckValue.check_range(factor, 'factor', 0, 1, low_open=True)
    dim = 2
    messages = [GwMessage() for _ in statistics]
    for k in range(len(statistics) - 2, -1, -1):
        after = messages[k + 1]
        stats = statistics[k + 1]
        if stats is None:
            location, beta, wishart_inv, dof = (
                after.location, after.beta, after.wishart_inv, after.dof)
        else:
            location, beta, wishart_inv, dof = _gw_combine(
                array(after.location), after.beta, after.wishart_inv,
                after.dof, stats)
        messages[k] = GwMessage(
            location, beta, wishart_inv / factor,
            factor * (dof - dim - 1) + dim + 1)
    return messages


def gw_smooth(filtered, backward):
    """
    Combines filtered beliefs with backward messages: β = β_f + β_b,
    x̂ = (β_f·x̂_f + β_b·x̂_b)/β, W⁻¹ = W_f⁻¹ + W_b⁻¹ and
    υ = υ_f + υ_b - m - 1.

    :param filtered: the filtered beliefs in scan order.
    :type filtered: list(GaussianWishartBelief)
    :param backward: the backward messages, None entries are uninformative.
    :type backward: list(GwMessage)
    :returns: the smoothed beliefs.
    :rtype: list(GaussianWishartBelief)
    """
    if len(filtered) != len(backward):
        raise IllegalArgumentException(
            'filtered and backward must be aligned.')
    smoothed = []
    for belief, message in zip(filtered, backward):
        if message is None or message.is_flat():
            smoothed.append(belief)
            continue
        dim = belief.get_dimension()
        beta = belief.get_beta() + message.beta
        diff = measurement_residual(message.location, belief.get_location())
        location = belief.get_location() + message.beta * diff / beta
        location[1] = wrap_degrees(location[1])
        wishart_inv = inv(belief.get_wishart()) + message.wishart_inv
        dof = belief.get_dof() + message.dof - dim - 1
        smoothed.append(GaussianWishartBelief(
            location, beta, nearest_spd(inv(nearest_spd(wishart_inv))),
            max(dof, dim - 1 + 1e-6)))
    return smoothed


def visibility_evidence(miss, detection, invisible_detection):
    """
    Returns the emission (ξ(0), ξ(1)) of the visibility chain at one scan,
    from the miss probability â₀ of the target:
    ξ(1) = (1 - p_D)·â₀ + p_D·(1 - â₀) and ξ(0) = (1 - ε)·â₀ + ε·(1 - â₀).
    """
    return ((1 - invisible_detection) * miss + invisible_detection *
            (1 - miss),
            (1 - detection) * miss + detection * (1 - miss))


def hmm_forward_backward(evidence, chain, initial):
    """
    Smooths the visibility chain over a window with the forward-backward
    algorithm.

    :param evidence: one (ξ(0), ξ(1)) pair per scan.
    :type evidence: list(tuple)
    :param chain: the visibility chain.
    :type chain: VisibilityChain
    :param initial: the prior visible probability at the first scan.
    :type initial: float
    :returns: the smoothed visible probability of every scan.
    :rtype: list(float)
    :raises IllegalArgumentException: raises the exception if an emission is
        negative.
    """
    CheckValue.check_probability(initial, 'initial')
    emissions = array(evidence, dtype=float).reshape(-1, 2)
    if (emissions < 0).any():
        raise IllegalArgumentException('evidence must not be negative.')
    emissions[emissions.sum(1) <= 0] = 1.0
    transition = chain.transition_matrix()
    count = emissions.shape[0]
    forward = zeros((count, 2))
    state = array([1.0 - initial, initial])
    for k in range(count):
        if k > 0:
            state = transition.dot(forward[k - 1])
        state = state * emissions[k]
        forward[k] = state / state.sum()
    backward = zeros((count, 2))
    message = array([1.0, 1.0])
    for k in range(count - 1, -1, -1):
        backward[k] = message
        message = transition.T.dot(emissions[k] * message)
        message = message / message.sum()
    smoothed = forward * backward
    smoothed = smoothed / smoothed.sum(1)[:, None]
    return [float(p) for p in smoothed[:, 1]]


def dirichlet_update(predicted, block):
    """
    Updates the mixing-weight belief: α'_τ = α_τ + Σ_j âᶜ[τ][j].

    :param predicted: the predicted belief.
    :type predicted: DirichletBelief
    :param block: âᶜ over (empty, measurements), one row per component.
    :type block: ndarray
    :returns: the updated belief.
    :rtype: DirichletBelief
    """
    block = asarray(block, dtype=float)
    if block.shape[0] != predicted.get_size():
        raise IllegalArgumentException(
            'block must have one row per component.')
    return DirichletBelief(predicted.get_concentration() +
                           block[:, 1:].sum(1))


def dirichlet_backward(counts, totals, balance):
    """
    Computes the backward messages of the weight smoother. The message of
    scan k adds the associated counts of scan k + 1 to the message of scan
    k + 1 and rescales the result to the total κ·M_{k+1}.

    :param counts: per scan, the associated count of each component.
    :type counts: list(ndarray)
    :param totals: per scan, the estimated clutter count M.
    :type totals: list(float)
    :param balance: κ.
    :type balance: float
    :returns: the backward concentration increments, zero at the last scan.
    :rtype: list(ndarray)
    """
    CheckValue.check_float_gt_zero(balance, 'balance')
    messages = [zeros(len(c)) for c in counts]
    for k in range(len(counts) - 2, -1, -1):
        combined = messages[k + 1] + asarray(counts[k + 1], dtype=float)
        total = combined.sum()
        if total > 0:
            messages[k] = balance * totals[k + 1] * combined / total
    return messages


def dirichlet_smooth(filtered, backward):
    """
    Combines filtered weight beliefs with backward messages by adding the
    concentrations.

    :param filtered: the filtered beliefs in scan order.
    :type filtered: list(DirichletBelief)
    :param backward: the backward concentration increments.
    :type backward: list(ndarray)
    :returns: the smoothed beliefs.
    :rtype: list(DirichletBelief)
    """
    if len(filtered) != len(backward):
        raise IllegalArgumentException(
            'filtered and backward must be aligned.')
    return [DirichletBelief(belief.get_concentration() + asarray(message))
            for belief, message in zip(filtered, backward)]


def estimated_counts(belief, total):
    """
    Returns M_{τ,k} = M_k·α_τ/Σα, the estimated number of points of each
    component at a scan.

    :param belief: the smoothed weight belief of the scan.
    :type belief: DirichletBelief
    :param total: M_k, the expected number of clutter points of the scan.
    :type total: float
    :returns: one count per component.
    :rtype: ndarray
    """
    return total * belief.mean_weights()
