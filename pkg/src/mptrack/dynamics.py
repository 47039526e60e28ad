#
# Copyright (C) 2020 The mptrack authors. All rights reserved.
#
# Licensed under the Universal Permissive License v 1.0 as shown at https://oss.oracle.com/licenses/upl
#
# Please see LICENSE.txt file included in the top-level directory of the
# appropriate download for a copy of the license and additional information.
#

from filterpy.common import Q_discrete_white_noise
from numpy import array
from scipy.linalg import block_diag

from .common import CheckValue
from .distributions import (
    DirichletBelief, GaussianBelief, GaussianWishartBelief, InverseGammaBelief,
    nearest_spd)
from .exception import IllegalArgumentException

# Kinematic state layout, fixed project-wide: (x, ẋ, y, ẏ) in m and m/s.
STATE_DIM = 4


class CvModel(object):
    """
    Nearly constant velocity motion in the plane, with white noise
    acceleration of intensity σ_v² on each axis.

    :param period: the sampling period T in seconds, positive.
    :type period: float
    :param noise_intensity: the process noise intensity σ_v², not negative.
    :type noise_intensity: float
    :raises IllegalArgumentException: raises the exception if a parameter is
        out of range.
    """

    def __init__(self, period=1.25, noise_intensity=0.01):
        CheckValue.check_float_gt_zero(period, 'period')
        CheckValue.check_float_ge_zero(noise_intensity, 'noise_intensity')
        self._period = float(period)
        self._noise_intensity = float(noise_intensity)

    def __repr__(self):
        return ('CvModel(period=' + str(self._period) + ', noise_intensity=' +
                str(self._noise_intensity) + ')')

    def get_noise_intensity(self):
        return self._noise_intensity

    def get_period(self):
        return self._period

    def process_noise(self, period=None):
        """
        Returns Q = σ_v²·I₂ ⊗ [[T⁴/4, T³/2], [T³/2, T²]].

        :param period: the step, defaults to the model period.
        :type period: float
        :returns: the 4x4 process noise covariance.
        :rtype: ndarray
        """
        dt = self._period if period is None else period
        return Q_discrete_white_noise(
            dim=2, dt=dt, var=self._noise_intensity, block_size=2,
            order_by_dim=True)

    def transition(self, state, period=None):
        """
        Propagates a single state vector. Used as the process model of the
        unscented smoother.
        """
        return self.transition_matrix(period).dot(state)

    def transition_matrix(self, period=None):
        """
        Returns F = I₂ ⊗ [[1, T], [0, 1]].

        :param period: the step, defaults to the model period.
        :type period: float
        :returns: the 4x4 transition matrix.
        :rtype: ndarray
        """
        dt = self._period if period is None else period
        block = array([[1.0, dt], [0.0, 1.0]])
        return block_diag(block, block)


class ForgettingFactors(object):
    """
    The forgetting factors of the slowly varying parameters.

    :param snr: uᵗ, the target SNR factor, at least 1.
    :type snr: float
    :param cnr: uᶜ, the clutter CNR factor, at least 1.
    :type cnr: float
    :param spatial: ξ, the clutter spatial factor in (0, 1].
    :type spatial: float
    :param balance: κ, the balance of the Dirichlet weight transition,
        positive.
    :type balance: float
    :raises IllegalArgumentException: raises the exception if a factor is
        out of range.
    """

    def __init__(self, snr=1.05, cnr=1.05, spatial=0.99, balance=5.0):
        CheckValue.check_range(snr, 'snr', 1, None)
        CheckValue.check_range(cnr, 'cnr', 1, None)
        CheckValue.check_range(spatial, 'spatial', 0, 1, low_open=True)
        CheckValue.check_float_gt_zero(balance, 'balance')
        self._snr = float(snr)
        self._cnr = float(cnr)
        self._spatial = float(spatial)
        self._balance = float(balance)

    def __repr__(self):
        return ('ForgettingFactors(snr=' + str(self._snr) + ', cnr=' +
                str(self._cnr) + ', spatial=' + str(self._spatial) +
                ', balance=' + str(self._balance) + ')')

    def get_balance(self):
        return self._balance

    def get_cnr(self):
        return self._cnr

    def get_snr(self):
        return self._snr

    def get_spatial(self):
        return self._spatial


class VisibilityChain(object):
    """
    The two-state Markov chain of target visibility.

    :param survival: p_s, the probability a visible target stays visible.
    :type survival: float
    :param birth: p_b, the probability an invisible target becomes visible.
    :type birth: float
    :raises IllegalArgumentException: raises the exception if a probability
        is out of [0, 1].
    """

    def __init__(self, survival=0.8, birth=0.15):
        CheckValue.check_probability(survival, 'survival')
        CheckValue.check_probability(birth, 'birth')
        self._survival = float(survival)
        self._birth = float(birth)

    def __repr__(self):
        return ('VisibilityChain(survival=' + str(self._survival) +
                ', birth=' + str(self._birth) + ')')

    def get_birth(self):
        return self._birth

    def get_survival(self):
        return self._survival

    def stationary(self):
        """
        Returns the stationary visible probability p_b/(1 - p_s + p_b).
        """
        denominator = 1.0 - self._survival + self._birth
        if denominator <= 0:
            return 1.0
        return self._birth / denominator

    def transition_matrix(self):
        """
        Returns the matrix A with A[s', s] = p(s' | s), state 0 invisible and
        state 1 visible. Columns sum to one.

        :returns: the 2x2 transition matrix.
        :rtype: ndarray
        """
        return array([[1.0 - self._birth, 1.0 - self._survival],
                      [self._birth, self._survival]])


def cv_predict(belief, model):
    """
    Predicts a kinematic belief one sampling period ahead.

    :param belief: the belief over (x, ẋ, y, ẏ).
    :type belief: GaussianBelief
    :param model: the motion model.
    :type model: CvModel
    :returns: the predicted belief.
    :rtype: GaussianBelief
    :raises IllegalArgumentException: raises the exception if the belief is
        not four dimensional.
    """
    if belief.get_dimension() != STATE_DIM:
        raise IllegalArgumentException(
            'cv_predict requires a state of dimension ' + str(STATE_DIM) +
            '. Got:' + str(belief.get_dimension()))
    f = model.transition_matrix()
    covariance = f.dot(belief.get_covariance()).dot(f.T) + model.process_noise()
    return GaussianBelief(f.dot(belief.get_mean()), nearest_spd(covariance))


def ig_predict(belief, factor, reverse=False):
    """
    Applies the forgetting transition α' = (α + u - 1)/u, β' = β/u. The
    reverse prediction of the backward smoothing pass uses the same rule; the
    backward messages of :py:func:`mptrack.smoothers.ig_backward` go through
    this function with reverse set. The result has the type of the argument,
    so a backward message that is not yet a proper density is carried back
    by the same algebra.

    :param belief: the belief or backward message.
    :type belief: InverseGammaBelief or IgMessage
    :param factor: the forgetting factor u, at least 1.
    :type factor: float
    :param reverse: True for a backward prediction.
    :type reverse: bool
    :returns: the predicted belief or message.
    :rtype: InverseGammaBelief or IgMessage
    """
    CheckValue.check_range(factor, 'factor', 1, None)
    CheckValue.check_boolean(reverse, 'reverse')
    return belief.__class__(
        (belief.get_shape() + factor - 1.0) / factor,
        belief.get_scale() / factor)


def gw_predict(belief, factor, reverse=False, logutils=None):
    """
    Applies the spreading transition of the clutter spatial state: the
    location and its scale factor are kept, W' = ξW and
    υ' = ξ(υ - m - 1) + m + 1. Degrees of freedom at or below m - 1 are
    floored at m - 1 + 1e-6.

    :param belief: the belief.
    :type belief: GaussianWishartBelief
    :param factor: the forgetting factor ξ in (0, 1].
    :type factor: float
    :param reverse: True for a backward prediction.
    :type reverse: bool
    :param logutils: receives a warning when the floor applies.
    :type logutils: LogUtils
    :returns: the predicted belief.
    :rtype: GaussianWishartBelief
    """
    CheckValue.check_range(factor, 'factor', 0, 1, low_open=True)
    CheckValue.check_boolean(reverse, 'reverse')
    dim = belief.get_dimension()
    dof = factor * (belief.get_dof() - dim - 1) + dim + 1
    if dof <= dim - 1:
        if logutils is not None:
            logutils.log_warning(
                'Wishart degrees of freedom ' + str(dof) + ' floored at ' +
                str(dim - 1 + 1e-6))
        dof = dim - 1 + 1e-6
    return GaussianWishartBelief(
        belief.get_location(), belief.get_beta(),
        factor * belief.get_wishart(), dof)


def dirichlet_predict(belief, balance, count, reverse=False, logutils=None):
    """
    Applies the weight transition α'_τ = κ·M·α_τ/Σα, where M is the estimated
    number of clutter points at the neighbouring scan. The proportions are
    preserved. When κ·M is zero the belief resets to the flat prior.

    :param belief: the belief.
    :type belief: DirichletBelief
    :param balance: κ, positive.
    :type balance: float
    :param count: M, the estimated clutter count, not negative.
    :type count: float
    :param reverse: True for a backward prediction.
    :type reverse: bool
    :param logutils: receives a warning when the belief resets.
    :type logutils: LogUtils
    :returns: the predicted belief.
    :rtype: DirichletBelief
    """
    CheckValue.check_float_gt_zero(balance, 'balance')
    CheckValue.check_float_ge_zero(count, 'count')
    CheckValue.check_boolean(reverse, 'reverse')
    alpha = belief.get_concentration()
    total = balance * count
    if total <= 0:
        if logutils is not None:
            logutils.log_warning(
                'Dirichlet belief reset to the flat prior, no clutter count.')
        return DirichletBelief.uniform(alpha.shape[0])
    return DirichletBelief(total * alpha / alpha.sum())


def visibility_predict(probability, chain):
    """
    Returns p' = p_s·p + p_b·(1 - p).

    :param probability: the visible probability.
    :type probability: float
    :param chain: the visibility chain.
    :type chain: VisibilityChain
    :returns: the predicted visible probability.
    :rtype: float
    """
    CheckValue.check_probability(probability, 'probability')
    return (chain.get_survival() * probability +
            chain.get_birth() * (1.0 - probability))
