#
# Copyright (C) 2020 The mptrack authors. All rights reserved.
#
# Licensed under the Universal Permissive License v 1.0 as shown at https://oss.oracle.com/licenses/upl
#
# Please see LICENSE.txt file included in the top-level directory of the
# appropriate download for a copy of the license and additional information.
#

import unittest
from itertools import product
from math import exp, inf, log, sqrt

from numpy import (
    array, concatenate, cumsum, diag, eye, linspace, minimum, zeros)
from numpy.linalg import inv, slogdet
from scipy.integrate import quad
from scipy.interpolate import PchipInterpolator
from scipy.special import digamma
from scipy.stats import kstest, wishart

from mptrack import (
    DirichletBelief, GaussianBelief, GaussianWishartBelief,
    IllegalArgumentException, InverseGammaBelief, SamplerException,
    SwerlingModel)
from mptrack.distributions import (
    detection_probability, dirichlet_log_expectation,
    dirichlet_log_expectations, exact_detection_probability, gw_expectations,
    ig_moments, nearest_spd, rayleigh_thresholded_logpdf,
    rayleigh_thresholded_pdf, sample_strength)
from parameters import detection_samples, ks_samples, ks_tolerance
from test_base import TestBase
from testutils import get_logger, get_rng


def strength_cdf(sigma, model, segments=400):
    """
    The distribution function of the thresholded strength density, integrated
    by quadrature over segments up to where the tail is negligible and
    interpolated monotonically in between.
    """
    low = model.get_threshold()
    high = sqrt(low * low + 20.0 * (sigma + 1.0))
    edges = linspace(low, high, segments + 1)
    masses = [quad(rayleigh_thresholded_pdf, a, b, args=(sigma, model))[0]
              for a, b in zip(edges[:-1], edges[1:])]
    interpolator = PchipInterpolator(edges, concatenate([[0.0],
                                                        cumsum(masses)]))
    return lambda m: interpolator(minimum(m, high))


class TestSwerlingModel(unittest.TestCase):
    def testSwerlingModelIllegalInit(self):
        self.assertRaises(IllegalArgumentException, SwerlingModel, 3)
        self.assertRaises(IllegalArgumentException, SwerlingModel, 0)
        self.assertRaises(IllegalArgumentException, SwerlingModel, 2, -0.1)
        self.assertRaises(IllegalArgumentException, SwerlingModel, 2, 'd')

    def testSwerlingModelDefaults(self):
        model = SwerlingModel()
        self.assertEqual(model.get_order(), SwerlingModel.SWERLING_III)
        self.assertEqual(model.get_threshold(), 0.715)


class TestBeliefs(unittest.TestCase, TestBase):
    def testGaussianBeliefIllegalInit(self):
        self.assertRaises(IllegalArgumentException, GaussianBelief,
                          [0, 0], [[1, 2], [2, 1]])
        self.assertRaises(IllegalArgumentException, GaussianBelief,
                          [0, 0], [[1, 0.5], [0, 1]])
        self.assertRaises(IllegalArgumentException, GaussianBelief,
                          [0, 0, 0], eye(2))
        self.assertRaises(IllegalArgumentException, GaussianBelief,
                          [0, float('nan')], eye(2))

    def testGaussianBeliefImmutable(self):
        belief = GaussianBelief([1.0, 2.0], eye(2))
        with self.assertRaises(ValueError):
            belief.get_mean()[0] = 5.0
        with self.assertRaises(ValueError):
            belief.get_covariance()[0, 0] = 5.0

    def testInverseGammaBeliefIllegalInit(self):
        self.assertRaises(IllegalArgumentException, InverseGammaBelief, 0, 1)
        self.assertRaises(IllegalArgumentException, InverseGammaBelief, 3, 0)
        self.assertRaises(IllegalArgumentException, InverseGammaBelief,
                          -1, 1)

    def testInverseGammaBeliefMeans(self):
        belief = InverseGammaBelief(5.0, 8.0)
        self.assertAlmostEqual(belief.power_mean(), 2.0)
        self.assertAlmostEqual(belief.snr_mean(), 1.0)
        # The SNR estimate never reaches zero.
        self.assertAlmostEqual(InverseGammaBelief(5.0, 2.0).snr_mean(), 1e-6)
        self.assertRaises(IllegalArgumentException,
                          InverseGammaBelief(1.0, 2.0).power_mean)

    def testInverseGammaBeliefFloored(self):
        belief = InverseGammaBelief(1.5, 3.0)
        floored = belief.floored()
        self.assertAlmostEqual(floored.get_shape(),
                               InverseGammaBelief.MIN_SHAPE)
        self.assertAlmostEqual(floored.power_mean(), 6.0)
        above = InverseGammaBelief(4.0, 3.0)
        self.assertIs(above.floored(), above)

    def testIgMoments(self):
        inv_mean, mean, second = ig_moments(InverseGammaBelief(5.0, 8.0))
        self.assertAlmostEqual(inv_mean, 5.0 / 8.0)
        self.assertAlmostEqual(mean, 2.0)
        self.assertAlmostEqual(second, 64.0 / 12.0)
        self.assertRaises(IllegalArgumentException, ig_moments,
                          InverseGammaBelief(2.0, 8.0))

    def testGaussianWishartBeliefIllegalInit(self):
        self.assertRaises(IllegalArgumentException, GaussianWishartBelief,
                          [20, 30], 0, eye(2), 5)
        self.assertRaises(IllegalArgumentException, GaussianWishartBelief,
                          [20, 30], 1, eye(2), 1.0)
        self.assertRaises(IllegalArgumentException, GaussianWishartBelief,
                          [20, 30], 1, eye(3), 5)
        self.assertRaises(IllegalArgumentException, GaussianWishartBelief,
                          [20, 30], 1, -eye(2), 5)

    def testGaussianWishartExpectedCovariance(self):
        covariance = diag([1.0, 9.0])
        belief = GaussianWishartBelief([20, 30], 4.0, inv(covariance) / 10.0,
                                       10.0)
        self.check_array_close(belief.expected_covariance(), covariance)

    def testGwExpectationsMonteCarlo(self):
        scale = array([[0.2, 0.05], [0.05, 0.1]])
        dof = 8.0
        beta = 3.0
        location = array([25.0, 10.0])
        belief = GaussianWishartBelief(location, beta, scale, dof)
        y = array([26.0, 11.5])
        log_det, quad_form = gw_expectations(belief, y)
        expected = (digamma(dof / 2.0) + digamma((dof - 1) / 2.0) +
                    2 * log(2.0) + slogdet(scale)[1])
        self.assertAlmostEqual(log_det, expected)
        rng = get_rng()
        draws = wishart.rvs(dof, scale, size=20000, random_state=rng)
        sampled_log_det = slogdet(draws)[1].mean()
        self.assertAlmostEqual(log_det, sampled_log_det, delta=0.02)
        total = 0.0
        for precision in draws[:5000]:
            x = rng.multivariate_normal(location, inv(beta * precision))
            diff = y - x
            total += diff.dot(precision).dot(diff)
        self.assertAlmostEqual(quad_form / (total / 5000.0), 1.0, delta=0.03)

    def testDirichletBeliefIllegalInit(self):
        self.assertRaises(IllegalArgumentException, DirichletBelief, [])
        self.assertRaises(IllegalArgumentException, DirichletBelief,
                          [1.0, -0.5])
        self.assertRaises(IllegalArgumentException, DirichletBelief,
                          [0.0, 0.0])
        self.assertRaises(IllegalArgumentException, DirichletBelief.uniform, 0)

    def testDirichletLogExpectations(self):
        belief = DirichletBelief([3.0, 1.0, 0.0])
        self.assertAlmostEqual(dirichlet_log_expectation(belief, 0),
                               digamma(3.0) - digamma(4.0))
        self.assertAlmostEqual(dirichlet_log_expectation(belief, 1),
                               digamma(1.0) - digamma(4.0))
        self.assertEqual(dirichlet_log_expectation(belief, 2), -inf)
        self.assertRaises(IllegalArgumentException,
                          dirichlet_log_expectation, belief, 3)
        expectations = dirichlet_log_expectations(belief)
        self.assertAlmostEqual(expectations[0], digamma(3.0) - digamma(4.0))
        self.assertEqual(expectations[2], -inf)
        self.check_array_close(belief.mean_weights(), [0.75, 0.25, 0.0])
        self.check_array_close(DirichletBelief.uniform(3).get_concentration(),
                               [1.0, 1.0, 1.0])

    def testNearestSpd(self):
        self.check_spd(nearest_spd(array([[1.0, 2.0], [2.0, 1.0]])))
        matrix = array([[2.0, 0.5], [0.5, 1.0]])
        self.check_array_close(nearest_spd(matrix), matrix)
        self.check_spd(nearest_spd(zeros((2, 2)) + 1.0))


class TestStrength(unittest.TestCase, TestBase):
    def setUp(self):
        self.swerling1 = SwerlingModel(SwerlingModel.SWERLING_I)
        self.swerling3 = SwerlingModel(SwerlingModel.SWERLING_III)

    def testDensityIntegratesToOne(self):
        for model in (self.swerling1, self.swerling3):
            for sigma in (1.0, 10.0 / 3, 50.0 / 3):
                total, _ = quad(rayleigh_thresholded_pdf, 0.715, inf,
                                args=(sigma, model))
                self.assertAlmostEqual(total, 1.0, delta=1e-5)

    def testSwerlingOneClosedForm(self):
        sigma = 4.0
        d = self.swerling1.get_threshold()
        for m in (0.8, 1.5, 4.0):
            expected = 2 * m / (sigma + 1) * exp(-(m * m - d * d) /
                                                 (sigma + 1))
            self.assertAlmostEqual(
                rayleigh_thresholded_pdf(m, sigma, self.swerling1), expected)
        values = rayleigh_thresholded_logpdf(array([0.8, 1.5]), sigma,
                                             self.swerling1)
        self.assertEqual(values.shape, (2,))

    def testDensityIllegalArguments(self):
        self.assertRaises(IllegalArgumentException, rayleigh_thresholded_pdf,
                          0.5, 1.0, self.swerling3)
        self.assertRaises(IllegalArgumentException, rayleigh_thresholded_pdf,
                          0.715, 1.0, self.swerling3)
        self.assertRaises(IllegalArgumentException, rayleigh_thresholded_pdf,
                          1.0, 0.0, self.swerling3)
        self.assertRaises(IllegalArgumentException, rayleigh_thresholded_pdf,
                          1.0, array([1.0, 2.0]), self.swerling3)

    def testDetectionProbability(self):
        d2 = 0.715 ** 2
        for sigma in (1.0, 10.0 / 3, 50.0 / 3):
            self.assertAlmostEqual(
                detection_probability(sigma, self.swerling1),
                exact_detection_probability(sigma, self.swerling1))
            x = 2 * d2 / (sigma + 1)
            self.assertAlmostEqual(
                detection_probability(sigma, self.swerling3), exp(-x))
            self.assertAlmostEqual(
                exact_detection_probability(sigma, self.swerling3),
                exp(-x) * (1 + x))
        # Higher SNR detects more often.
        self.assertGreater(detection_probability(50.0 / 3, self.swerling3),
                           detection_probability(10.0 / 3, self.swerling3))
        self.assertRaises(IllegalArgumentException, detection_probability,
                          -1.0, self.swerling3)

    def testSampleStrengthKolmogorovSmirnov(self):
        for offset, (order, d, sigma) in enumerate(product(
                (SwerlingModel.SWERLING_I, SwerlingModel.SWERLING_III),
                (0.715, 1.5), (1.0, 10.0 / 3, 50.0 / 3))):
            model = SwerlingModel(order, d)
            draws = sample_strength(sigma, model, get_rng(offset),
                                    ks_samples)
            self.assertEqual(draws.shape, (ks_samples,))
            self.assertTrue((draws > d).all())
            statistic = kstest(draws, strength_cdf(sigma, model)).statistic
            self.assertLess(statistic, ks_tolerance,
                            'n=' + str(order) + ' d=' + str(d) +
                            ' sigma=' + str(sigma))

    def testDetectionRate(self):
        for offset, sigma in enumerate((1.0, 10.0 / 3, 50.0 / 3, 20.0,
                                        50.0)):
            for model in (self.swerling1, self.swerling3):
                order = model.get_order()
                # The received power before thresholding.
                power = get_rng(offset).gamma(order, (sigma + 1.0) / order,
                                              detection_samples)
                rate = float((power > model.get_threshold() ** 2).mean())
                self.assertAlmostEqual(
                    rate, exact_detection_probability(sigma, model),
                    delta=3e-3)
                deviation = rate - detection_probability(sigma, model)
                if order == SwerlingModel.SWERLING_I:
                    self.assertAlmostEqual(deviation, 0.0, delta=3e-3)
                    continue
                get_logger().info(
                    'Swerling-III detection rate ' + str(rate) +
                    ' deviates from the closed form by ' + str(deviation) +
                    ' at sigma ' + str(sigma))
                # The closed form underestimates the tail for Swerling-III,
                # by x·exp(-x) with x = 2d²/(σ + 1).
                self.assertGreater(deviation, 0.0)
                if sigma >= 20.0:
                    self.assertLess(deviation, 5e-2)

    def testSampleStrengthSeeded(self):
        first = sample_strength(2.0, self.swerling3, get_rng(), 10)
        second = sample_strength(2.0, self.swerling3, get_rng(), 10)
        self.check_array_close(first, second, rtol=0.0)
        single = sample_strength(2.0, self.swerling3, get_rng())
        self.assertIsInstance(single, float)
        self.assertEqual(sample_strength(2.0, self.swerling1, get_rng(),
                                         0).shape, (0,))

    def testSampleStrengthExhausted(self):
        model = SwerlingModel(SwerlingModel.SWERLING_III, 10.0)
        self.assertRaises(SamplerException, sample_strength, 0.01, model,
                          get_rng(), 5, 3)
        self.assertRaises(IllegalArgumentException, sample_strength, 0.0,
                          self.swerling3, get_rng())


if __name__ == '__main__':
    unittest.main()
