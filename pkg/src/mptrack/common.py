#
# Copyright (C) 2020 The mptrack authors. All rights reserved.
#
# Licensed under the Universal Permissive License v 1.0 as shown at https://oss.oracle.com/licenses/upl
#
# Please see LICENSE.txt file included in the top-level directory of the
# appropriate download for a copy of the license and additional information.
#

from functools import wraps
from logging import Logger
from numbers import Integral, Real
from time import ctime

from numpy import abs as np_abs, asarray, isfinite
from numpy.linalg import LinAlgError, eigvalsh

from .exception import IllegalArgumentException


def synchronized(func):
    @wraps(func)
    def wrapper(self, *args, **kwargs):
        with self.lock:
            return func(self, *args, **kwargs)
    return wrapper


class CheckValue(object):
    @staticmethod
    def check_boolean(data, name):
        if data is not True and data is not False:
            raise IllegalArgumentException(name + ' must be True or False.')

    @staticmethod
    def check_dict(data, name):
        if data is not None and not isinstance(data, dict):
            raise IllegalArgumentException(name + ' must be a dict.')

    @staticmethod
    def check_float(data, name):
        if not CheckValue.is_digit(data) or not isfinite(data):
            raise IllegalArgumentException(
                name + ' must be a finite number. Got:' + str(data))

    @staticmethod
    def check_float_ge_zero(data, name):
        if not CheckValue.is_digit(data) or not isfinite(data) or data < 0:
            raise IllegalArgumentException(
                name + ' must be a number that is not negative. Got:' +
                str(data))

    @staticmethod
    def check_float_gt_zero(data, name):
        if not CheckValue.is_digit(data) or not isfinite(data) or data <= 0:
            raise IllegalArgumentException(
                name + ' must be a positive number. Got:' + str(data))

    @staticmethod
    def check_int(data, name):
        if not CheckValue.is_int(data):
            raise IllegalArgumentException(
                name + ' must be an integer. Got:' + str(data))

    @staticmethod
    def check_int_ge_zero(data, name):
        if not CheckValue.is_int(data) or data < 0:
            raise IllegalArgumentException(
                name + ' must be an integer that is not negative. Got:' +
                str(data))

    @staticmethod
    def check_int_gt_zero(data, name):
        if not CheckValue.is_int(data) or data <= 0:
            raise IllegalArgumentException(
                name + ' must be a positive integer. Got:' + str(data))

    @staticmethod
    def check_list(data, name):
        if not isinstance(data, (list, tuple)):
            raise IllegalArgumentException(name + ' must be a list.')

    @staticmethod
    def check_logger(data, name):
        if not isinstance(data, Logger):
            raise IllegalArgumentException(name + ' must be a Logger.')

    @staticmethod
    def check_not_none(data, name):
        if data is None:
            raise IllegalArgumentException(name + ' must be not-none.')

    @staticmethod
    def check_probability(data, name):
        if not CheckValue.is_digit(data) or not 0 <= data <= 1:
            raise IllegalArgumentException(
                name + ' must be a probability in [0, 1]. Got:' + str(data))

    @staticmethod
    def check_range(data, name, low, high, low_open=False, high_open=False):
        # Bounds of None are unbounded.
        CheckValue.check_float(data, name)
        if (low is not None and (data < low or low_open and data == low) or
                high is not None and
                (data > high or high_open and data == high)):
            raise IllegalArgumentException(
                name + ' must be in ' + ('(' if low_open else '[') +
                str(low) + ', ' + str(high) + (')' if high_open else ']') +
                '. Got:' + str(data))

    @staticmethod
    def check_spd(data, name, rtol=1e-10):
        """
        Checks that data is a finite, symmetric positive-definite square
        matrix.

        :param data: the matrix.
        :type data: array_like
        :param name: the name used in the exception message.
        :type name: str
        :param rtol: the relative symmetry tolerance.
        :type rtol: float
        :returns: the matrix as a float ndarray.
        :rtype: ndarray
        :raises IllegalArgumentException: raises the exception if data is not
            symmetric positive-definite.
        """
        matrix = CheckValue.check_matrix(data, name)
        scale = np_abs(matrix).max() if matrix.size > 0 else 0.0
        if np_abs(matrix - matrix.T).max() > rtol * max(scale, 1e-300):
            raise IllegalArgumentException(name + ' must be symmetric.')
        try:
            eigenvalues = eigvalsh(matrix)
        except LinAlgError as e:
            raise IllegalArgumentException(
                name + ' must be positive definite.', e)
        if eigenvalues.min() <= 0:
            raise IllegalArgumentException(
                name + ' must be positive definite. Got eigenvalues:' +
                str(eigenvalues))
        return matrix

    @staticmethod
    def check_matrix(data, name, shape=None):
        CheckValue.check_not_none(data, name)
        matrix = asarray(data, dtype=float)
        if (matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1] or
                shape is not None and matrix.shape != shape):
            raise IllegalArgumentException(
                name + ' must be a square matrix' +
                ('' if shape is None else ' of shape ' + str(shape)) +
                '. Got shape:' + str(matrix.shape))
        if not isfinite(matrix).all():
            raise IllegalArgumentException(name + ' must be finite.')
        return matrix

    @staticmethod
    def check_vector(data, name, dim=None):
        CheckValue.check_not_none(data, name)
        vector = asarray(data, dtype=float)
        if vector.ndim != 1 or dim is not None and vector.shape[0] != dim:
            raise IllegalArgumentException(
                name + ' must be a vector' +
                ('' if dim is None else ' of length ' + str(dim)) +
                '. Got shape:' + str(vector.shape))
        if not isfinite(vector).all():
            raise IllegalArgumentException(name + ' must be finite.')
        return vector

    @staticmethod
    def check_str(data, name, allow_none=False):
        if (not allow_none and data is None or data is not None and
                (not CheckValue.is_str(data) or len(data) == 0)):
            raise IllegalArgumentException(
                name + ' must be a string that is not empty.')

    @staticmethod
    def is_digit(data):
        return isinstance(data, Real) and not isinstance(data, bool)

    @staticmethod
    def is_int(data):
        return isinstance(data, Integral) and not isinstance(data, bool)

    @staticmethod
    def is_str(data):
        return isinstance(data, str)


class ClutterMode(object):
    """
    Selects how the tracker treats clutter.
    """
    ESTIMATE = 'estimate'
    """
    Estimate the uniform background and the nonuniform components jointly with
    the targets. This is the default.
    """
    UNIFORM_ONLY = 'uniform_only'
    """
    Model all clutter as the uniform background; no nonuniform component is
    ever initialized.
    """
    KNOWN = 'known'
    """
    Pin the clutter beliefs to known per-scan parameters, for example the
    simulator's truth.
    """

    @staticmethod
    def values():
        return (ClutterMode.ESTIMATE, ClutterMode.UNIFORM_ONLY,
                ClutterMode.KNOWN)


class ClutterType(object):
    """
    The spatial type of a clutter component.
    """
    UNIFORM = 'uniform'
    """Uniform over the surveillance region."""
    GAUSSIAN = 'gaussian'
    """Gaussian in measurement space (range km, azimuth deg)."""

    @staticmethod
    def values():
        return ClutterType.UNIFORM, ClutterType.GAUSSIAN


class TimeVariation(object):
    """
    How the rate and covariance of a simulated clutter component evolve over
    its lifetime.
    """
    CONSTANT = 'constant'
    """Rate and covariance are fixed."""
    SINUSOIDAL = 'sinusoidal'
    """
    The rate swells along half a sine period up to 1.5 times its base value
    while the covariance grows linearly from one third to four thirds of its
    base value.
    """

    @staticmethod
    def values():
        return TimeVariation.CONSTANT, TimeVariation.SINUSOIDAL


class TrackStatus(object):
    """
    Lifecycle status of a target track.
    """
    TENTATIVE = 'tentative'
    """Initialized but not yet confirmed."""
    CONFIRMED = 'confirmed'
    """Smoothed visibility reached the confirmation threshold."""
    DELETED = 'deleted'
    """Smoothed visibility fell below the deletion threshold. Terminal."""


class LogUtils(object):
    # Utility methods to facilitate Logging.
    def __init__(self, logger=None):
        self._logger = logger

    def get_logger(self):
        return self._logger

    def log_error(self, msg):
        if self._logger is not None:
            self._logger.error(ctime() + '[ERROR]' + msg)

    def log_warning(self, msg):
        if self._logger is not None:
            self._logger.warning(ctime() + '[WARNING]' + msg)

    def log_info(self, msg):
        if self._logger is not None:
            self._logger.info(ctime() + '[INFO]' + msg)

    def log_debug(self, msg):
        if self._logger is not None:
            self._logger.debug(ctime() + '[DEBUG]' + msg)

    def is_enabled_for(self, level):
        return self._logger is not None and self._logger.isEnabledFor(level)
