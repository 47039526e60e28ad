#
# Copyright (C) 2020 The mptrack authors. All rights reserved.
#
# Licensed under the Universal Permissive License v 1.0 as shown at https://oss.oracle.com/licenses/upl
#
# Please see LICENSE.txt file included in the top-level directory of the
# appropriate download for a copy of the license and additional information.
#

from unittest import TestCase

from numpy import abs as np_abs, asarray
from numpy.linalg import eigvalsh

from parameters import rel_tolerance


class TestBase(object):

    def check_array_close(self, actual, expected, rtol=rel_tolerance,
                          atol=0.0):
        assert isinstance(self, TestCase)
        actual = asarray(actual, dtype=float)
        expected = asarray(expected, dtype=float)
        self.assertEqual(actual.shape, expected.shape)
        bound = atol + rtol * np_abs(expected)
        worst = (np_abs(actual - expected) - bound).max() if \
            actual.size else 0.0
        self.assertLessEqual(
            worst, 0.0, 'arrays differ:\n' + str(actual) + '\n' +
            str(expected))

    def check_spd(self, matrix):
        assert isinstance(self, TestCase)
        matrix = asarray(matrix, dtype=float)
        self.check_array_close(matrix, matrix.T, atol=1e-9)
        self.assertGreater(eigvalsh(matrix).min(), 0)

    def check_matrix_close(self, actual, expected, rtol):
        # Elementwise, relative to the largest entry of expected.
        assert isinstance(self, TestCase)
        actual = asarray(actual, dtype=float)
        expected = asarray(expected, dtype=float)
        self.assertEqual(actual.shape, expected.shape)
        self.assertLessEqual(np_abs(actual - expected).max(),
                             rtol * np_abs(expected).max())

    def check_association(self, beliefs, tolerance=1e-6):
        # Rows over (miss, measurements) and measurement columns sum to one.
        assert isinstance(self, TestCase)
        row, column = beliefs.normalization_errors()
        self.assertLess(row, tolerance)
        self.assertLess(column, tolerance)
        self.assertTrue((beliefs.get_target() >= 0).all())
        self.assertTrue((beliefs.get_clutter() >= 0).all())
