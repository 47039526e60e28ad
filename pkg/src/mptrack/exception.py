#
# Copyright (C) 2020 The mptrack authors. All rights reserved.
#
# Licensed under the Universal Permissive License v 1.0 as shown at https://oss.oracle.com/licenses/upl
#
# Please see LICENSE.txt file included in the top-level directory of the
# appropriate download for a copy of the license and additional information.
#


class IllegalArgumentException(RuntimeError):
    """
    Exception class that is used when an invalid argument was passed, this could
    mean that the type is not the expected or the value is outside the domain
    of the operation, for example a strength ratio below the detection
    threshold or a covariance that is not positive definite.
    """

    def __init__(self, message=None, cause=None):
        self._message = message
        self._cause = cause

    def __str__(self):
        return self._message

    def get_cause(self):
        """
        Get the cause of the exception.

        :returns: the cause of the exception.
        :rtype: RuntimeError
        """
        return self._cause


class IllegalStateException(RuntimeError):
    """
    Exception that is thrown when a method has been invoked on an object that
    is not in the state the method requires, for example sliding a window that
    has not been processed yet.
    """

    def __init__(self, message=None, cause=None):
        self._message = message
        self._cause = cause

    def __str__(self):
        return self._message

    def get_cause(self):
        """
        Get the cause of the exception.

        :returns: the cause of the exception.
        :rtype: RuntimeError
        """
        return self._cause


class MpTrackException(RuntimeError):
    """
    A base class for the domain failures raised by the tracking engine and its
    simulation harness.
    """

    def __init__(self, message=None, cause=None):
        self._message = message
        self._cause = cause

    def __str__(self):
        return self._message

    def get_cause(self):
        """
        Get the cause of the exception.

        :returns: the cause of the exception.
        :rtype: RuntimeError
        """
        return self._cause


class ConfigException(MpTrackException):
    """
    Thrown when a configuration file or an inline scenario description is
    malformed: unknown keys, a schema version that is not supported, or values
    outside their documented ranges.
    """

    def __init__(self, message=None, cause=None):
        super(ConfigException, self).__init__(message, cause)


class DataFormatException(MpTrackException):
    """
    Thrown when a JSON-lines input file does not match the expected record
    schema, or when truth and estimate files cover different scans.
    """

    def __init__(self, message=None, cause=None):
        super(DataFormatException, self).__init__(message, cause)


class SamplerException(MpTrackException):
    """
    Thrown when the acceptance-rejection strength sampler exhausts its bounded
    attempt count without accepting a draw.
    """

    def __init__(self, message=None, cause=None):
        super(SamplerException, self).__init__(message, cause)


class SizeLimitException(MpTrackException):
    """
    Thrown when an association problem is too large for exact enumeration.
    """

    def __init__(self, message=None, cause=None):
        super(SizeLimitException, self).__init__(message, cause)
