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

from numpy import array, diag, eye, outer, zeros
from numpy.linalg import inv

from mptrack import (
    CvModel, DirichletBelief, GaussianBelief, GaussianWishartBelief,
    IllegalArgumentException, InverseGammaBelief, SwerlingModel,
    VisibilityChain, WindowBeliefs)
from mptrack.dynamics import cv_predict, ig_predict
from mptrack.measurement import observe
from mptrack.smoothers import (
    IgMessage, SyntheticMeasurement, dirichlet_backward, dirichlet_smooth,
    dirichlet_update, estimated_counts, gw_backward, gw_smooth, gw_statistics,
    gw_update, hmm_forward_backward, ig_backward, ig_smooth, ig_update,
    ig_update_counts, synthetic_measurement, ukf_update, urtss_smooth,
    visibility_evidence)
from parameters import conjugate_cases, conjugate_tolerance, linear_scans
from test_base import TestBase
from testutils import get_kinematics, get_rng, get_spatial_belief


class TestWindowBeliefs(unittest.TestCase):
    def testFamilies(self):
        beliefs = WindowBeliefs()
        beliefs.set_filtered('snr', 3, 'a')
        beliefs.set_smoothed('snr', 5, 'b')
        beliefs.set_smoothed('snr', 2, 'c')
        self.assertEqual(beliefs.get_filtered('snr', 3), 'a')
        self.assertIsNone(beliefs.get_filtered('snr', 4))
        self.assertEqual(beliefs.get_smoothed('cnr', 4, 'd'), 'd')
        self.assertEqual(beliefs.scans('snr'), [2, 5])
        self.assertRaises(IllegalArgumentException, beliefs.set_filtered,
                          'power', 1, 'a')
        self.assertRaises(IllegalArgumentException, beliefs.scans, None)

    def testDropBefore(self):
        beliefs = WindowBeliefs()
        for scan in range(1, 6):
            beliefs.set_filtered('visibility', scan, 0.5)
            beliefs.set_smoothed('visibility', scan, 0.5)
        beliefs.drop_before(4)
        self.assertEqual(beliefs.scans('visibility'), [4, 5])
        self.assertIsNone(beliefs.get_filtered('visibility', 3))
        self.assertEqual(beliefs.get_filtered('visibility', 4), 0.5)


class TestKinematics(unittest.TestCase, TestBase):
    def testSyntheticMeasurement(self):
        noise = diag([0.0004, 0.36])
        positions = array([[20.0, 179.0], [22.0, -179.0]])
        self.assertIsNone(synthetic_measurement([1.0, 0.0, 0.0], positions,
                                                noise))
        self.assertIsNone(synthetic_measurement([1.0 - 1e-7, 1e-7, 0.0],
                                                positions, noise))
        synthetic = synthetic_measurement([0.5, 0.25, 0.25], positions, noise)
        self.assertAlmostEqual(synthetic.get_weight(), 0.5)
        self.check_array_close(synthetic.get_value(), [21.0, 180.0])
        self.check_array_close(synthetic.get_noise(), 2 * noise)
        single = synthetic_measurement([0.0, 1.0, 0.0], positions, noise)
        self.check_array_close(single.get_value(), positions[0])
        self.check_array_close(single.get_noise(), noise)

    def testUkfUpdateMiss(self):
        predicted = get_kinematics()
        self.assertIs(ukf_update(predicted, None), predicted)
        self.assertIs(ukf_update(predicted, SyntheticMeasurement(
            [25.0, 36.9], eye(2), 0.0)), predicted)

    def testUkfUpdateLinear(self):
        predicted = get_kinematics()
        noise = diag([400.0, 900.0])
        z = array([20100.0, 14950.0])
        synthetic = SyntheticMeasurement(z, noise, 1.0)
        updated = ukf_update(predicted, synthetic, hx=lambda x: x[[0, 2]])
        h = array([[1.0, 0.0, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0]])
        p = predicted.get_covariance()
        gain = p.dot(h.T).dot(inv(h.dot(p).dot(h.T) + noise))
        mean = predicted.get_mean() + gain.dot(z - h.dot(predicted.get_mean()))
        covariance = (eye(4) - gain.dot(h)).dot(p)
        self.check_array_close(updated.get_mean(), mean, rtol=1e-6,
                               atol=1e-6)
        self.check_array_close(updated.get_covariance(), covariance,
                               rtol=1e-4, atol=1e-6)

    def testUkfUpdateShrinksCovariance(self):
        predicted = get_kinematics(sigma=200.0)
        z = observe(predicted.get_mean())
        updated = ukf_update(predicted, SyntheticMeasurement(
            z, diag([0.0004, 0.36]), 1.0))
        self.check_array_close(updated.get_mean(), predicted.get_mean(),
                               rtol=2e-4, atol=1e-6)
        self.assertLess(updated.get_covariance().trace(),
                        predicted.get_covariance().trace())
        self.check_spd(updated.get_covariance())

    def testUrtssSmooth(self):
        model = CvModel()
        self.assertRaises(IllegalArgumentException, urtss_smooth, [], model)
        self.assertRaises(IllegalArgumentException, urtss_smooth,
                          [get_kinematics()], 'model')
        first = get_kinematics()
        self.assertEqual(urtss_smooth([first], model), [first])
        f = model.transition_matrix()
        q = model.process_noise()
        second = GaussianBelief(f.dot(first.get_mean()) + [30.0, 2.0, -20.0,
                                                           1.0],
                                diag([900.0, 16.0, 900.0, 16.0]))
        smoothed = urtss_smooth([first, second], model)
        self.check_array_close(smoothed[1].get_mean(), second.get_mean())
        self.check_array_close(smoothed[1].get_covariance(),
                               second.get_covariance(), rtol=1e-6,
                               atol=1e-6)
        p = first.get_covariance()
        predicted = f.dot(p).dot(f.T) + q
        gain = p.dot(f.T).dot(inv(predicted))
        mean = first.get_mean() + gain.dot(
            second.get_mean() - f.dot(first.get_mean()))
        covariance = p + gain.dot(second.get_covariance() -
                                  predicted).dot(gain.T)
        self.check_array_close(smoothed[0].get_mean(), mean, rtol=1e-6,
                               atol=1e-6)
        self.check_array_close(smoothed[0].get_covariance(), covariance,
                               rtol=1e-4, atol=1e-6)

    def testLinearMeasurementMatchesKalman(self):
        model = CvModel()
        f = model.transition_matrix()
        q = model.process_noise()
        h = array([[1.0, 0.0, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0]])
        r = diag([100.0, 100.0])

        def linear(state):
            return h.dot(state)

        rng = get_rng(5)
        truth = array([100.0, 10.0, -50.0, 5.0])
        measurements = []
        for _ in range(linear_scans):
            measurements.append(h.dot(truth) + rng.normal(0.0, 10.0, 2))
            truth = f.dot(truth)
        prior = GaussianBelief([0.0, 0.0, 0.0, 0.0],
                               diag([400.0, 25.0, 400.0, 25.0]))
        filtered = []
        means = []
        covariances = []
        x = prior.get_mean()
        p = prior.get_covariance()
        for k, z in enumerate(measurements):
            if k > 0:
                x = f.dot(x)
                p = f.dot(p).dot(f.T) + q
            gain = p.dot(h.T).dot(inv(h.dot(p).dot(h.T) + r))
            x = x + gain.dot(z - h.dot(x))
            p = (eye(4) - gain.dot(h)).dot(p)
            means.append(x)
            covariances.append(p)
            belief = prior if k == 0 else cv_predict(filtered[-1], model)
            filtered.append(ukf_update(
                belief, SyntheticMeasurement(z, r, 1.0), hx=linear))
        for belief, x, p in zip(filtered, means, covariances):
            self.check_matrix_close(belief.get_mean(), x, 1e-8)
            self.check_matrix_close(belief.get_covariance(), p, 1e-8)
        smoothed_means = list(means)
        smoothed_covariances = list(covariances)
        for k in range(linear_scans - 2, -1, -1):
            predicted = f.dot(covariances[k]).dot(f.T) + q
            gain = covariances[k].dot(f.T).dot(inv(predicted))
            smoothed_means[k] = means[k] + gain.dot(
                smoothed_means[k + 1] - f.dot(means[k]))
            smoothed_covariances[k] = covariances[k] + gain.dot(
                smoothed_covariances[k + 1] - predicted).dot(gain.T)
        smoothed = urtss_smooth(filtered, model, hx=linear)
        self.assertEqual(len(smoothed), linear_scans)
        for belief, x, p in zip(smoothed, smoothed_means,
                                smoothed_covariances):
            self.check_matrix_close(belief.get_mean(), x, 1e-8)
            self.check_matrix_close(belief.get_covariance(), p, 1e-8)


class TestPowerBeliefs(unittest.TestCase, TestBase):
    def setUp(self):
        self.model = SwerlingModel()
        self.d2 = self.model.get_threshold() ** 2

    def testIgUpdate(self):
        predicted = InverseGammaBelief(5.0, 10.0)
        updated = ig_update(predicted, [2.0, 3.0], [0.2, 0.6, 0.2],
                            self.model)
        self.assertAlmostEqual(updated.get_shape(), 7.0)
        self.assertAlmostEqual(
            updated.get_scale(),
            10.0 + 2 * (0.75 * 4.0 + 0.25 * 9.0) - 2 * self.d2)
        self.assertIs(ig_update(predicted, [2.0], [1.0, 0.0], self.model),
                      predicted)
        self.assertIs(ig_update(predicted, [], [1.0], self.model), predicted)
        self.assertRaises(IllegalArgumentException, ig_update, predicted,
                          [2.0, 3.0], [0.5, 0.5], self.model)

    def testIgUpdateCounts(self):
        predicted = InverseGammaBelief(5.0, 10.0)
        updated = ig_update_counts(predicted, [2.0, 3.0], [0.5, 1.0],
                                   self.model)
        self.assertAlmostEqual(updated.get_shape(), 5.0 + 2 * 1.5)
        self.assertAlmostEqual(
            updated.get_scale(),
            10.0 + 2 * (0.5 * (4.0 - self.d2) + 1.0 * (9.0 - self.d2)))
        self.assertIs(ig_update_counts(predicted, [2.0], [0.0], self.model),
                      predicted)

    def testIgBackwardAndSmooth(self):
        predicted = [InverseGammaBelief(5.0, 10.0),
                     InverseGammaBelief(5.0, 10.0)]
        filtered = [InverseGammaBelief(7.0, 20.0),
                    InverseGammaBelief(7.0, 25.0)]
        messages = ig_backward(predicted, filtered, 1.0)
        self.assertTrue(messages[1].is_flat())
        self.assertAlmostEqual(messages[0].shape, 1.0)
        self.assertAlmostEqual(messages[0].scale, 15.0)
        smoothed = ig_smooth(filtered, messages)
        # The later scan contributes its likelihood to the earlier one.
        self.assertAlmostEqual(smoothed[0].get_shape(), 9.0)
        self.assertAlmostEqual(smoothed[0].get_scale(), 35.0)
        self.assertIs(smoothed[1], filtered[1])
        self.assertRaises(IllegalArgumentException, ig_backward, predicted,
                          filtered, 0.9)
        self.assertRaises(IllegalArgumentException, ig_backward,
                          predicted[:1], filtered, 1.0)
        self.assertRaises(IllegalArgumentException, ig_smooth, filtered,
                          [IgMessage()])
        self.assertEqual(ig_smooth(filtered, [None, None]), filtered)

    def testIgBackwardForgetting(self):
        u = 1.25

        def carry(shape, scale):
            return (shape + u - 1.0) / u, scale / u

        predicted = [InverseGammaBelief(5.0, 10.0)] * 3
        filtered = [InverseGammaBelief(7.0, 20.0),
                    InverseGammaBelief(7.0, 25.0),
                    InverseGammaBelief(6.0, 13.0)]
        messages = ig_backward(predicted, filtered, u)
        self.assertTrue(messages[2].is_flat())
        shape, scale = carry(-1.0 + 1.0, 0.0 + 3.0)
        self.assertAlmostEqual(messages[1].shape, shape)
        self.assertAlmostEqual(messages[1].scale, scale)
        shape, scale = carry(shape + 2.0, scale + 15.0)
        self.assertAlmostEqual(messages[0].shape, shape)
        self.assertAlmostEqual(messages[0].scale, scale)
        self.assertAlmostEqual(messages[0].shape, 1.96)
        self.assertAlmostEqual(messages[0].scale, 13.92)
        # The message rule is the forward forgetting rule.
        reverse = ig_predict(IgMessage(1.0, 4.0), 1.05, reverse=True)
        forward = ig_predict(InverseGammaBelief(1.0, 4.0), 1.05)
        self.assertAlmostEqual(reverse.get_shape(), 1.0)
        self.assertAlmostEqual(reverse.get_scale(), 4.0 / 1.05)
        self.assertAlmostEqual(reverse.get_shape(), forward.get_shape())
        self.assertAlmostEqual(reverse.get_scale(), forward.get_scale())
        # A scan without a likelihood leaves the earlier message flat.
        missed = ig_backward(predicted[:2], [filtered[0], predicted[1]], u)
        self.assertTrue(missed[0].is_flat())


class TestSpatialBeliefs(unittest.TestCase, TestBase):
    def testGwStatistics(self):
        positions = array([[30.0, 179.0], [32.0, -179.0], [40.0, 10.0]])
        self.assertIsNone(gw_statistics(positions, [0.0, 0.0, 0.0],
                                        [30.0, 179.0]))
        stats = gw_statistics(positions, [1.0, 1.0, 0.0], [30.0, 179.0])
        self.assertAlmostEqual(stats.count, 2.0)
        self.check_array_close(stats.mean, [31.0, 180.0])
        self.check_array_close(stats.scatter, [[1.0, 1.0], [1.0, 1.0]])

    def testGwUpdate(self):
        predicted = get_spatial_belief((30.0, 20.0), beta=2.0, dof=10.0)
        self.assertIs(gw_update(predicted, [[30.0, 20.0]], [0.0]), predicted)
        positions = array([[33.0, 26.0], [33.0, 26.0]])
        updated = gw_update(predicted, positions, [0.5, 0.5])
        self.assertAlmostEqual(updated.get_beta(), 3.0)
        self.assertAlmostEqual(updated.get_dof(), 11.0)
        self.check_array_close(updated.get_location(), [31.0, 22.0])
        diff = array([3.0, 6.0])
        expected = inv(inv(predicted.get_wishart()) +
                       (2.0 / 3.0) * outer(diff, diff))
        self.check_array_close(updated.get_wishart(), expected, rtol=1e-6)

    def testGwBackwardAndSmooth(self):
        filtered = [get_spatial_belief((30.0, 20.0), beta=4.0, dof=12.0),
                    get_spatial_belief((30.0, 20.0), beta=5.0, dof=13.0)]
        positions = array([[29.0, 18.0], [31.0, 22.0]])
        stats = gw_statistics(positions, [1.0, 1.0], [30.0, 20.0])
        messages = gw_backward([None, stats], 1.0)
        self.assertTrue(messages[1].is_flat())
        self.assertFalse(messages[0].is_flat())
        smoothed = gw_smooth(filtered, messages)
        self.assertIs(smoothed[1], filtered[1])
        # Symmetric points leave the location and add their scatter.
        expected = gw_update(filtered[0], positions, [1.0, 1.0])
        self.assertAlmostEqual(smoothed[0].get_beta(), expected.get_beta())
        self.assertAlmostEqual(smoothed[0].get_dof(), expected.get_dof())
        self.check_array_close(smoothed[0].get_location(),
                               expected.get_location())
        self.check_array_close(smoothed[0].get_wishart(),
                               expected.get_wishart(), rtol=1e-6)
        spread = gw_backward([None, stats], 0.5)
        self.assertAlmostEqual(spread[0].dof, 0.5 * 2.0 + 3.0)
        self.check_array_close(spread[0].wishart_inv,
                               2.0 * messages[0].wishart_inv)
        empty = gw_backward([None, None, None], 0.5)
        self.assertTrue(all(message.is_flat() for message in empty))
        self.assertRaises(IllegalArgumentException, gw_backward, [None], 0.0)
        self.assertRaises(IllegalArgumentException, gw_backward, [None], 1.5)


class TestConjugateUpdates(unittest.TestCase, TestBase):
    """
    Randomized updates under concentrated associations against the
    textbook posteriors.
    """

    def setUp(self):
        self.rng = get_rng(7)

    def testIgUpdateConcentrated(self):
        for _ in range(conjugate_cases):
            model = SwerlingModel(int(self.rng.integers(1, 3)))
            n = model.get_order()
            d2 = model.get_threshold() ** 2
            alpha = self.rng.uniform(3.0, 20.0)
            beta = self.rng.uniform(5.0, 50.0)
            strengths = self.rng.uniform(
                model.get_threshold(), 10.0, int(self.rng.integers(1, 6)))
            chosen = int(self.rng.integers(len(strengths)))
            row = zeros(len(strengths) + 1)
            row[0] = self.rng.uniform(0.0, 0.9)
            row[chosen + 1] = 1.0 - row[0]
            updated = ig_update(InverseGammaBelief(alpha, beta), strengths,
                                row, model)
            self.check_array_close(
                [updated.get_shape(), updated.get_scale()],
                [alpha + n, beta + n * (strengths[chosen] ** 2 - d2)],
                rtol=conjugate_tolerance)
            weights = (self.rng.random(len(strengths)) < 0.5).astype(float)
            weights[chosen] = 1.0
            counted = ig_update_counts(InverseGammaBelief(alpha, beta),
                                       strengths, weights, model)
            scale = beta
            for weight, strength in zip(weights, strengths):
                scale += weight * n * (strength ** 2 - d2)
            self.check_array_close(
                [counted.get_shape(), counted.get_scale()],
                [alpha + n * weights.sum(), scale],
                rtol=conjugate_tolerance)

    def testGwUpdateConcentrated(self):
        for _ in range(conjugate_cases):
            location = array([self.rng.uniform(20.0, 40.0),
                              self.rng.uniform(-30.0, 30.0)])
            beta = self.rng.uniform(0.5, 20.0)
            dof = self.rng.uniform(3.0, 50.0)
            spread = self.rng.uniform(0.5, 3.0, 2)
            wishart = inv(diag(spread ** 2)) / dof
            size = int(self.rng.integers(1, 8))
            positions = location + self.rng.normal(0.0, 3.0, (size, 2))
            weights = (self.rng.random(size) < 0.6).astype(float)
            weights[0] = 1.0
            updated = gw_update(
                GaussianWishartBelief(location, beta, wishart, dof),
                positions, weights)
            count = weights.sum()
            mean = zeros(2)
            for weight, position in zip(weights, positions):
                mean += weight * position
            mean /= count
            scatter = zeros((2, 2))
            for weight, position in zip(weights, positions):
                scatter += weight * outer(position - mean, position - mean)
            shift = mean - location
            expected_inv = (inv(wishart) + scatter +
                            beta * count / (beta + count) *
                            outer(shift, shift))
            self.check_array_close(
                [updated.get_beta(), updated.get_dof()],
                [beta + count, dof + count], rtol=conjugate_tolerance)
            self.check_matrix_close(
                updated.get_location(),
                (beta * location + count * mean) / (beta + count),
                conjugate_tolerance)
            self.check_matrix_close(updated.get_wishart(), inv(expected_inv),
                                    conjugate_tolerance)

    def testDirichletUpdateConcentrated(self):
        for _ in range(conjugate_cases):
            components = int(self.rng.integers(1, 5))
            size = int(self.rng.integers(1, 8))
            alpha = self.rng.uniform(0.5, 30.0, components)
            block = zeros((components, size + 1))
            counts = zeros(components)
            for j in range(size):
                owner = int(self.rng.integers(components + 1))
                if owner < components:
                    block[owner, j + 1] = 1.0
                    counts[owner] += 1.0
            block[:, 0] = self.rng.random(components)
            updated = dirichlet_update(DirichletBelief(alpha), block)
            self.check_array_close(updated.get_concentration(),
                                   alpha + counts, rtol=conjugate_tolerance)


class TestVisibility(unittest.TestCase, TestBase):
    def setUp(self):
        self.chain = VisibilityChain(0.8, 0.15)

    def testVisibilityEvidence(self):
        invisible, visible = visibility_evidence(0.3, 0.9, 0.01)
        self.assertAlmostEqual(invisible, 0.99 * 0.3 + 0.01 * 0.7)
        self.assertAlmostEqual(visible, 0.1 * 0.3 + 0.9 * 0.7)

    def testUninformativeEvidence(self):
        stationary = self.chain.stationary()
        smoothed = hmm_forward_backward([(1.0, 1.0)] * 4, self.chain,
                                        stationary)
        self.check_array_close(smoothed, [stationary] * 4)
        self.assertAlmostEqual(
            hmm_forward_backward([(0.0, 0.0)], self.chain, 0.3)[0], 0.3)

    def testMatchesEnumeration(self):
        evidence = [(0.2, 0.9), (0.7, 0.3), (0.1, 0.8)]
        initial = 0.4
        transition = self.chain.transition_matrix()
        totals = [0.0, 0.0, 0.0]
        normalizer = 0.0
        for states in product((0, 1), repeat=3):
            weight = (initial if states[0] else 1 - initial)
            weight *= evidence[0][states[0]]
            for k in range(1, 3):
                weight *= (transition[states[k], states[k - 1]] *
                           evidence[k][states[k]])
            normalizer += weight
            for k in range(3):
                if states[k]:
                    totals[k] += weight
        expected = [total / normalizer for total in totals]
        self.check_array_close(
            hmm_forward_backward(evidence, self.chain, initial), expected,
            rtol=1e-9)

    def testIllegalEvidence(self):
        self.assertRaises(IllegalArgumentException, hmm_forward_backward,
                          [(-0.1, 0.5)], self.chain, 0.5)
        self.assertRaises(IllegalArgumentException, hmm_forward_backward,
                          [(0.1, 0.5)], self.chain, 1.5)


class TestWeights(unittest.TestCase, TestBase):
    def testDirichletUpdate(self):
        predicted = DirichletBelief([4.0, 1.0])
        block = array([[0.0, 0.5, 1.0, 0.2], [0.3, 0.1, 0.0, 0.6]])
        updated = dirichlet_update(predicted, block)
        self.check_array_close(updated.get_concentration(), [5.7, 1.7])
        self.assertRaises(IllegalArgumentException, dirichlet_update,
                          predicted, block[:1])

    def testDirichletBackwardAndSmooth(self):
        counts = [array([1.0, 2.0]), array([3.0, 1.0]), array([2.0, 2.0])]
        messages = dirichlet_backward(counts, [3.0, 4.0, 4.0], 0.5)
        self.check_array_close(messages[2], [0.0, 0.0])
        self.check_array_close(messages[1], [1.0, 1.0])
        self.check_array_close(messages[0], [4.0 / 3, 2.0 / 3])
        filtered = [DirichletBelief([2.0, 1.0])] * 3
        smoothed = dirichlet_smooth(filtered, messages)
        self.check_array_close(smoothed[0].get_concentration(),
                               [10.0 / 3, 5.0 / 3])
        self.check_array_close(smoothed[2].get_concentration(), [2.0, 1.0])
        self.assertRaises(IllegalArgumentException, dirichlet_backward,
                          counts, [3.0, 4.0, 4.0], 0.0)
        self.assertRaises(IllegalArgumentException, dirichlet_smooth,
                          filtered, messages[:2])

    def testEstimatedCounts(self):
        self.check_array_close(
            estimated_counts(DirichletBelief([3.0, 1.0]), 8.0), [6.0, 2.0])


if __name__ == '__main__':
    unittest.main()
