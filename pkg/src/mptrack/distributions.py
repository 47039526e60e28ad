#
# Copyright (C) 2020 The mptrack authors. All rights reserved.
#
# Licensed under the Universal Permissive License v 1.0 as shown at https://oss.oracle.com/licenses/upl
#
# Please see LICENSE.txt file included in the top-level directory of the
# appropriate download for a copy of the license and additional information.
#

from math import exp as math_exp, log

from numpy import (
    array, asarray, exp, isfinite, log as np_log, ndim, ones, sqrt,
    zeros)
from numpy.linalg import eigh, inv, slogdet
from scipy.special import digamma
from scipy.stats import gamma

from .common import CheckValue
from .exception import IllegalArgumentException, SamplerException

# Dimension of the clutter measurement space (range km, azimuth deg).
MEASUREMENT_DIM = 2


def _freeze(data):
    frozen = array(data, dtype=float)
    frozen.flags.writeable = False
    return frozen


def nearest_spd(matrix, floor=1e-12):
    """
    Returns the symmetric part of matrix with its eigenvalues clipped from
    below at floor times the largest eigenvalue.

    :param matrix: a square matrix.
    :type matrix: ndarray
    :param floor: the relative eigenvalue floor.
    :type floor: float
    :returns: a symmetric positive-definite matrix.
    :rtype: ndarray
    """
    sym = 0.5 * (asarray(matrix, dtype=float) + asarray(matrix, dtype=float).T)
    values, vectors = eigh(sym)
    top = max(values.max(), 1e-300)
    if values.min() > floor * top:
        return sym
    values = values.clip(min=floor * top)
    result = (vectors * values).dot(vectors.T)
    return 0.5 * (result + result.T)


class SwerlingModel(object):
    """
    The generalized Rayleigh strength model. The order selects the
    fluctuation model and the threshold is the detection threshold on the
    strength ratio.

    :param order: 1 for Swerling-I, 2 for Swerling-III.
    :type order: int
    :param threshold: the detection threshold d, not negative.
    :type threshold: float
    :raises IllegalArgumentException: raises the exception if order is not 1
        or 2, or threshold is negative.
    """
    SWERLING_I = 1
    SWERLING_III = 2

    def __init__(self, order=SWERLING_III, threshold=0.715):
        if order not in (SwerlingModel.SWERLING_I, SwerlingModel.SWERLING_III):
            raise IllegalArgumentException(
                'order must be 1 (Swerling-I) or 2 (Swerling-III). Got:' +
                str(order))
        CheckValue.check_float_ge_zero(threshold, 'threshold')
        self._order = int(order)
        self._threshold = float(threshold)

    def __repr__(self):
        return ('SwerlingModel(order=' + str(self._order) + ', threshold=' +
                str(self._threshold) + ')')

    def get_order(self):
        """
        Returns the order n.

        :returns: the order.
        :rtype: int
        """
        return self._order

    def get_threshold(self):
        """
        Returns the detection threshold d.

        :returns: the threshold.
        :rtype: float
        """
        return self._threshold


class GaussianBelief(object):
    """
    A Gaussian belief over a state vector. Instances are immutable.

    :param mean: the mean vector.
    :type mean: array_like
    :param covariance: the covariance, symmetric positive-definite.
    :type covariance: array_like
    :raises IllegalArgumentException: raises the exception if the dimensions
        do not agree or the covariance is not symmetric positive-definite.
    """

    def __init__(self, mean, covariance):
        mean = CheckValue.check_vector(mean, 'mean')
        covariance = CheckValue.check_spd(covariance, 'covariance')
        if covariance.shape[0] != mean.shape[0]:
            raise IllegalArgumentException(
                'covariance must be ' + str(mean.shape[0]) + 'x' +
                str(mean.shape[0]) + '. Got:' + str(covariance.shape))
        self._mean = _freeze(mean)
        self._covariance = _freeze(covariance)

    def __repr__(self):
        return ('GaussianBelief(mean=' + str(self._mean.tolist()) +
                ', covariance=' + str(self._covariance.tolist()) + ')')

    def get_covariance(self):
        return self._covariance

    def get_dimension(self):
        return self._mean.shape[0]

    def get_mean(self):
        return self._mean


class InverseGammaBelief(object):
    """
    An Inverse-Gamma belief over a mean power ratio. The believed variable is
    the mean received power including noise, that is the SNR (or CNR) plus
    one, which is the variable the strength likelihood is conjugate in.

    The constructor accepts any proper density (shape and scale positive).
    Moments used by the expectation terms require a shape above 2; the
    tracker floors the shape with :py:meth:`floored` after each update.

    :param shape: the shape α.
    :type shape: float
    :param scale: the scale β.
    :type scale: float
    :raises IllegalArgumentException: raises the exception if shape or scale
        is not positive.
    """
    MIN_SHAPE = 2 + 1e-6

    def __init__(self, shape, scale):
        CheckValue.check_float_gt_zero(shape, 'shape')
        CheckValue.check_float_gt_zero(scale, 'scale')
        self._shape = float(shape)
        self._scale = float(scale)

    def __repr__(self):
        return ('InverseGammaBelief(shape=' + str(self._shape) + ', scale=' +
                str(self._scale) + ')')

    def floored(self, min_shape=MIN_SHAPE):
        """
        Returns this belief with its shape raised to at least min_shape. The
        mean is preserved when the shape is raised.

        :param min_shape: the shape floor.
        :type min_shape: float
        :returns: the floored belief, self if no floor applies.
        :rtype: InverseGammaBelief
        """
        if self._shape >= min_shape:
            return self
        mean = (self._scale / (self._shape - 1) if self._shape > 1 else
                self._scale)
        return InverseGammaBelief(min_shape, mean * (min_shape - 1))

    def get_scale(self):
        return self._scale

    def get_shape(self):
        return self._shape

    def power_mean(self):
        """
        Returns E[σ + 1], the mean received power ratio.

        :returns: the mean power ratio.
        :rtype: float
        :raises IllegalArgumentException: raises the exception if the shape
            is not above 1.
        """
        if self._shape <= 1:
            raise IllegalArgumentException(
                'Mean of an Inverse-Gamma belief requires shape > 1. Got:' +
                str(self._shape))
        return self._scale / (self._shape - 1)

    def snr_mean(self):
        """
        Returns the point estimate of the SNR (or CNR), E[σ + 1] - 1 floored
        at a small positive value.

        :returns: the mean SNR ratio.
        :rtype: float
        """
        return max(self.power_mean() - 1.0, 1e-6)


class GaussianWishartBelief(object):
    """
    A Gaussian-Wishart belief over the centroid and precision of a
    nonuniform clutter component in measurement space (range km, azimuth
    deg).

    :param location: the location x̂.
    :type location: array_like
    :param beta: the scale factor of the location precision.
    :type beta: float
    :param wishart: the Wishart scale matrix W, SPD.
    :type wishart: array_like
    :param dof: the Wishart degrees of freedom, greater than m - 1.
    :type dof: float
    :raises IllegalArgumentException: raises the exception if any parameter
        violates its domain.
    """

    def __init__(self, location, beta, wishart, dof):
        location = CheckValue.check_vector(location, 'location')
        CheckValue.check_float_gt_zero(beta, 'beta')
        wishart = CheckValue.check_spd(wishart, 'wishart')
        dim = location.shape[0]
        if wishart.shape[0] != dim:
            raise IllegalArgumentException(
                'wishart must be ' + str(dim) + 'x' + str(dim) + '. Got:' +
                str(wishart.shape))
        CheckValue.check_float(dof, 'dof')
        if dof <= dim - 1:
            raise IllegalArgumentException(
                'dof must be greater than ' + str(dim - 1) + '. Got:' +
                str(dof))
        self._location = _freeze(location)
        self._beta = float(beta)
        self._wishart = _freeze(wishart)
        self._dof = float(dof)

    def __repr__(self):
        return ('GaussianWishartBelief(location=' +
                str(self._location.tolist()) + ', beta=' + str(self._beta) +
                ', wishart=' + str(self._wishart.tolist()) + ', dof=' +
                str(self._dof) + ')')

    def get_beta(self):
        return self._beta

    def get_dimension(self):
        return self._location.shape[0]

    def get_dof(self):
        return self._dof

    def get_location(self):
        return self._location

    def get_wishart(self):
        return self._wishart

    def expected_covariance(self):
        """
        Returns the spread estimate (υW)⁻¹, the inverse of the expected
        precision.

        :returns: the covariance in measurement space.
        :rtype: ndarray
        """
        return nearest_spd(inv(self._dof * self._wishart))


class DirichletBelief(object):
    """
    A Dirichlet belief over the clutter mixing weights, indexed with the
    uniform component at 0.

    :param concentration: the concentrations, not negative, at least one
        positive.
    :type concentration: array_like
    :raises IllegalArgumentException: raises the exception if a
        concentration is negative or all are zero.
    """

    def __init__(self, concentration):
        concentration = CheckValue.check_vector(
            concentration, 'concentration')
        if concentration.shape[0] == 0:
            raise IllegalArgumentException(
                'concentration must have at least one component.')
        if (concentration < 0).any():
            raise IllegalArgumentException(
                'concentration must not be negative. Got:' +
                str(concentration.tolist()))
        if concentration.sum() <= 0:
            raise IllegalArgumentException(
                'concentration must have at least one positive entry.')
        self._concentration = _freeze(concentration)

    def __repr__(self):
        return ('DirichletBelief(' + str(self._concentration.tolist()) + ')')

    def get_concentration(self):
        return self._concentration

    def get_size(self):
        return self._concentration.shape[0]

    def mean_weights(self):
        return self._concentration / self._concentration.sum()

    @staticmethod
    def uniform(size):
        """
        Returns the flat prior with all concentrations equal to one.

        :param size: the number of components including the uniform one.
        :type size: int
        :returns: the flat belief.
        :rtype: DirichletBelief
        """
        CheckValue.check_int_gt_zero(size, 'size')
        return DirichletBelief(ones(size))


def _check_strength(m, model):
    m = asarray(m, dtype=float)
    if not isfinite(m).all() or (m <= model.get_threshold()).any():
        raise IllegalArgumentException(
            'strength must exceed the threshold ' +
            str(model.get_threshold()) + '. Got:' + str(m.tolist()))
    return m


def _check_snr(sigma, name='sigma'):
    if ndim(sigma) != 0:
        raise IllegalArgumentException(name + ' must be a scalar.')
    CheckValue.check_float_gt_zero(sigma, name)
    return float(sigma)


def _power_distribution(power, model):
    # The received power u = m² is Gamma(n, (σ + 1)/n) before thresholding.
    order = model.get_order()
    return gamma(order, scale=power / order)


def rayleigh_thresholded_logpdf(m, sigma, model):
    """
    Returns the log density of the strength ratio of a detection, the
    generalized Rayleigh density truncated to strengths above the threshold.

    :param m: the strength ratio, scalar or array, above the threshold.
    :type m: float or ndarray
    :param sigma: the mean SNR (or CNR) ratio, positive.
    :type sigma: float
    :param model: the strength model.
    :type model: SwerlingModel
    :returns: the log density, with the shape of m.
    :rtype: float or ndarray
    :raises IllegalArgumentException: raises the exception if m is not above
        the threshold or sigma is not positive.
    """
    _check_snr(sigma)
    m = _check_strength(m, model)
    dist = _power_distribution(sigma + 1.0, model)
    result = (log(2.0) + np_log(m) + dist.logpdf(m * m) -
              dist.logsf(model.get_threshold() ** 2))
    return float(result) if result.ndim == 0 else result


def rayleigh_thresholded_pdf(m, sigma, model):
    """
    Returns the density of the strength ratio of a detection. For Swerling-I
    this is 2m/(σ+1)·exp(-(m² - d²)/(σ+1)). The density integrates to one
    over (d, ∞) for both orders.

    :param m: the strength ratio, scalar or array, above the threshold.
    :type m: float or ndarray
    :param sigma: the mean SNR (or CNR) ratio, positive.
    :type sigma: float
    :param model: the strength model.
    :type model: SwerlingModel
    :returns: the density.
    :rtype: float or ndarray
    :raises IllegalArgumentException: raises the exception if m is not above
        the threshold or sigma is not positive.
    """
    return exp(rayleigh_thresholded_logpdf(m, sigma, model))


def detection_probability(sigma, model):
    """
    Returns the closed-form detection probability exp(-n·d²/(σ+1)). It is the
    exact tail probability for Swerling-I and an approximation for
    Swerling-III, see :py:func:`exact_detection_probability`.

    :param sigma: the mean SNR ratio, positive.
    :type sigma: float
    :param model: the strength model.
    :type model: SwerlingModel
    :returns: the detection probability in (0, 1].
    :rtype: float
    :raises IllegalArgumentException: raises the exception if sigma is not
        positive.
    """
    sigma = _check_snr(sigma)
    return math_exp(
        -model.get_order() * model.get_threshold() ** 2 / (sigma + 1.0))


def exact_detection_probability(sigma, model):
    """
    Returns the exact probability that the received power exceeds the
    squared threshold.

    :param sigma: the mean SNR ratio, positive.
    :type sigma: float
    :param model: the strength model.
    :type model: SwerlingModel
    :returns: the tail probability.
    :rtype: float
    """
    sigma = _check_snr(sigma)
    return float(_power_distribution(sigma + 1.0, model).sf(
        model.get_threshold() ** 2))


def sample_strength(sigma, model, rng, size=None, max_attempts=1000):
    """
    Draws detection strength ratios. Swerling-I uses inversion,
    m = sqrt(d² - (σ+1)·ln u); Swerling-III uses acceptance-rejection from
    the untruncated Gamma power distribution.

    :param sigma: the mean SNR (or CNR) ratio, positive.
    :type sigma: float
    :param model: the strength model.
    :type model: SwerlingModel
    :param rng: the random stream.
    :type rng: numpy.random.Generator
    :param size: the number of draws, None for a single float.
    :type size: int
    :param max_attempts: the bound on acceptance-rejection rounds.
    :type max_attempts: int
    :returns: the strengths, all above the threshold.
    :rtype: float or ndarray
    :raises IllegalArgumentException: raises the exception if sigma is not
        positive.
    :raises SamplerException: raises the exception if some draw is still
        rejected after max_attempts rounds.
    """
    sigma = _check_snr(sigma)
    if size is not None:
        CheckValue.check_int_ge_zero(size, 'size')
    count = 1 if size is None else size
    power = sigma + 1.0
    d2 = model.get_threshold() ** 2
    if model.get_order() == SwerlingModel.SWERLING_I:
        u = 1.0 - rng.random(count)
        result = sqrt(d2 - power * np_log(u))
    else:
        order = model.get_order()
        result = zeros(count)
        pending = ones(count, dtype=bool)
        attempts = 0
        while pending.any():
            if attempts >= max_attempts:
                raise SamplerException(
                    'Strength sampler rejected ' + str(int(pending.sum())) +
                    ' draws after ' + str(max_attempts) +
                    ' attempts, sigma=' + str(sigma) + ', threshold=' +
                    str(model.get_threshold()))
            draws = rng.gamma(order, power / order, int(pending.sum()))
            accepted = draws > d2
            index = pending.nonzero()[0]
            result[index[accepted]] = sqrt(draws[accepted])
            pending[index[accepted]] = False
            attempts += 1
    # Strengths equal to the threshold are possible in floating point.
    if d2 > 0:
        result = result.clip(min=model.get_threshold() * (1 + 1e-12))
    return float(result[0]) if size is None else result


def ig_moments(belief):
    """
    Returns (E[1/σ], E[σ], E[σ²]) of an Inverse-Gamma belief.

    :param belief: the belief, shape above 2.
    :type belief: InverseGammaBelief
    :returns: the three moments.
    :rtype: tuple
    :raises IllegalArgumentException: raises the exception if the shape is
        not above 2.
    """
    a = belief.get_shape()
    b = belief.get_scale()
    if a <= 2:
        raise IllegalArgumentException(
            'Inverse-Gamma moments require shape > 2. Got:' + str(a))
    return a / b, b / (a - 1), b * b / ((a - 1) * (a - 2))


def gw_expectations(belief, y):
    """
    Returns the expectations E[ln|D|] and E[(y - x)ᵀD(y - x)] under a
    Gaussian-Wishart belief over (x, D).

    :param belief: the belief.
    :type belief: GaussianWishartBelief
    :param y: a point in measurement space. Callers that work with wrapped
        coordinates pass the already wrapped displacement plus the location.
    :type y: array_like
    :returns: the log-determinant and quadratic expectations.
    :rtype: tuple
    """
    dim = belief.get_dimension()
    y = CheckValue.check_vector(y, 'y', dim)
    dof = belief.get_dof()
    wishart = belief.get_wishart()
    sign, logdet = slogdet(wishart)
    log_det = sum(digamma((dof + 1 - j) / 2.0) for j in range(1, dim + 1))
    log_det += dim * log(2.0) + logdet
    diff = y - belief.get_location()
    quad = dim / belief.get_beta() + dof * diff.dot(wishart).dot(diff)
    return float(log_det), float(quad)


def dirichlet_log_expectation(belief, index):
    """
    Returns E[ln π_τ] = ψ(α_τ) - ψ(Σα) under a Dirichlet belief, or -inf for
    a component with zero concentration.

    :param belief: the belief.
    :type belief: DirichletBelief
    :param index: the component index τ.
    :type index: int
    :returns: the log expectation.
    :rtype: float
    :raises IllegalArgumentException: raises the exception if index is out of
        range.
    """
    CheckValue.check_int_ge_zero(index, 'index')
    alpha = belief.get_concentration()
    if index >= alpha.shape[0]:
        raise IllegalArgumentException(
            'index must be less than ' + str(alpha.shape[0]) + '. Got:' +
            str(index))
    if alpha[index] <= 0:
        return float('-inf')
    return float(digamma(alpha[index]) - digamma(alpha.sum()))


def dirichlet_log_expectations(belief):
    """
    Returns E[ln π_τ] for every component as an array, -inf where the
    concentration is zero.
    """
    alpha = belief.get_concentration()
    result = zeros(alpha.shape[0])
    total = digamma(alpha.sum())
    for index, value in enumerate(alpha):
        result[index] = (float('-inf') if value <= 0 else
                         digamma(value) - total)
    return result
