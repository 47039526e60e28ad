#
# Copyright (C) 2020 The mptrack authors. All rights reserved.
#
# Licensed under the Universal Permissive License v 1.0 as shown at https://oss.oracle.com/licenses/upl
#
# Please see LICENSE.txt file included in the top-level directory of the
# appropriate download for a copy of the license and additional information.
#

import unittest
from concurrent.futures import ThreadPoolExecutor
from csv import reader
from logging import getLogger
from math import radians
from os import chdir, getcwd, listdir, path
from shutil import rmtree
from tempfile import mkdtemp

from numpy import array, concatenate, diag, zeros

from mptrack import (
    ClutterMode, ClutterSpec, ClutterType, DataFormatException,
    IllegalArgumentException, IllegalStateException, InitConfig, Scenario,
    SensorModel, TargetSpec, Tracker, TrackerConfig, TrackStatus, evaluate_run,
    simulate)
from mptrack.evaluation import centroid_errors
from mptrack.tracker import (
    default_logger, fit_clutter_clusters, initial_power_belief,
    polar_to_cartesian, two_point_belief)
from parameters import short_scans
from test_base import TestBase
from testutils import (
    get_crossing_scenario, get_frame, get_rng, get_target_frame,
    get_tracker_config)

CLUTTER_MEAN = [30.0, 30.0]
CLUTTER_SPREAD = [0.3, 1.0]


def get_clutter_scenario(num_scans=short_scans):
    """
    One target next to a dense nonuniform clutter component.
    """
    lifetime = (1, num_scans)
    return Scenario(
        'dense-clutter',
        [TargetSpec(1, [20000, 40, 15000, 0], lifetime, 50.0 / 3)],
        [ClutterSpec(0, ClutterType.UNIFORM, 10, lifetime, 1.0),
         ClutterSpec(1, ClutterType.GAUSSIAN, 20, lifetime, 5.0,
                     CLUTTER_MEAN, diag(CLUTTER_SPREAD) ** 2)],
        num_scans)


def get_clutter_points(rng, scans, dense=20, background=30):
    """
    Per-scan positions of a dense Gaussian cluster over uniform clutter in
    the default surveillance region.
    """
    points = []
    for _ in range(scans):
        cluster = rng.normal(CLUTTER_MEAN, CLUTTER_SPREAD, (dense, 2))
        uniform = concatenate([rng.uniform(10.0, 50.0, (background, 1)),
                               rng.uniform(0.0, 60.0, (background, 1))], 1)
        points.append(concatenate([cluster, uniform]))
    return points


class TestInitialization(unittest.TestCase, TestBase):
    def testPolarToCartesian(self):
        position, covariance = polar_to_cartesian([5.0, 53.13010235415598],
                                                  zeros((2, 2)))
        self.check_array_close(position, [3000.0, 4000.0])
        self.check_array_close(covariance, zeros((2, 2)))
        position, covariance = polar_to_cartesian(
            [30.0, 0.0], diag([0.02, 0.6]) ** 2)
        self.check_array_close(position, [30000.0, 0.0], atol=1e-9)
        cross = 30000.0 * radians(0.6)
        self.check_array_close(covariance, diag([400.0, cross ** 2]),
                               atol=1e-6)

    def testTwoPointBelief(self):
        noise = diag([0.02, 0.6]) ** 2
        belief = two_point_belief([1.0, 0.0], [1.05, 0.0], 1, 1.25, noise)
        self.check_array_close(belief.get_mean(), [1050.0, 40.0, 0.0, 0.0],
                               atol=1e-9)
        covariance = belief.get_covariance()
        self.assertAlmostEqual(covariance[0, 0], 400.0)
        self.assertAlmostEqual(covariance[0, 1], 320.0)
        self.assertAlmostEqual(covariance[1, 1], 512.0)
        self.check_spd(covariance)
        slower = two_point_belief([1.0, 0.0], [1.05, 0.0], 2, 1.25, noise)
        self.assertAlmostEqual(slower.get_mean()[1], 20.0)
        self.assertRaises(IllegalArgumentException, two_point_belief,
                          [1.0, 0.0], [1.05, 0.0], 0, 1.25, noise)

    def testInitialPowerBelief(self):
        belief = initial_power_belief([3.0, 4.0], 3.0)
        self.assertEqual(belief.get_shape(), 3.0)
        self.assertAlmostEqual(belief.get_scale(), 25.0)
        self.assertAlmostEqual(belief.power_mean(), 12.5)
        self.assertRaises(IllegalArgumentException, initial_power_belief,
                          [], 3.0)

    def testFitClutterClusters(self):
        points = concatenate(get_clutter_points(get_rng(), 10))
        strengths = get_rng(1).rayleigh(2.0, points.shape[0])
        sensor = SensorModel()
        clusters = fit_clutter_clusters(points, strengths, 10,
                                        sensor.get_volume(), 50.0,
                                        InitConfig(), 8)
        self.assertGreaterEqual(len(clusters), 1)
        largest = clusters[0]
        self.check_array_close(largest.mean, CLUTTER_MEAN, rtol=0.01)
        self.assertAlmostEqual(largest.count, 20.0, delta=2.0)
        self.assertEqual(len(largest.strengths), int(round(largest.count *
                                                           10)))
        self.assertEqual(fit_clutter_clusters(points, strengths, 10,
                                              sensor.get_volume(), 50.0,
                                              InitConfig(), 0), [])
        self.assertEqual(fit_clutter_clusters(points[:1], strengths[:1], 1,
                                              sensor.get_volume(), 50.0,
                                              InitConfig(), 8), [])

    def testInitTracks(self):
        tracker = Tracker(get_tracker_config())
        first = [20000.0, 40.0, 15000.0, 0.0]
        second = [20050.0, 40.0, 15000.0, 0.0]
        frames = [get_target_frame(1, first, extra=[[10.5, 50.0]]),
                  get_target_frame(2, second, extra=[[45.0, 5.0]])]
        tracks = tracker.init_tracks(frames)
        self.assertEqual(len(tracks), 1)
        track = tracks[0]
        self.assertEqual(track.track_id, 1)
        self.assertEqual(track.prior_scan, 2)
        self.assertEqual(track.get_status(), TrackStatus.TENTATIVE)
        self.check_array_close(track.prior_kinematics.get_mean(), second,
                               atol=1e-6)
        self.assertEqual(track.prior_snr.get_shape(), 3.0)
        self.assertAlmostEqual(track.prior_snr.get_scale(), 18.0)
        self.assertEqual(track.prior_visibility, 0.5)
        self.assertEqual(tracker.init_tracks(frames, min_scan=3), [])
        # A missed scan in between gives a lag of two.
        third = [20100.0, 40.0, 15000.0, 0.0]
        tracks = tracker.init_tracks([frames[0], get_target_frame(3, third)])
        self.assertEqual(len(tracks), 1)
        self.assertEqual(tracks[0].track_id, 2)
        self.check_array_close(tracks[0].prior_kinematics.get_mean(), third,
                               atol=1e-6)

    def testInitTracksSpeedBound(self):
        tracker = Tracker(get_tracker_config())
        # 1 km in one scan is faster than the largest speed.
        frames = [get_target_frame(1, [20000.0, 0.0, 15000.0, 0.0]),
                  get_target_frame(2, [21000.0, 0.0, 15000.0, 0.0])]
        self.assertEqual(tracker.init_tracks(frames), [])

    def testInitClutterComponents(self):
        points = get_clutter_points(get_rng(2), 7)
        frames = [get_frame(k + 1, p.tolist()) for k, p in enumerate(points)]
        tracker = Tracker(get_tracker_config())
        components = tracker.init_clutter_components(frames)
        self.assertGreaterEqual(len(components), 1)
        component = components[0]
        self.assertEqual(component.comp_id, 1)
        self.assertEqual(component.prior_scan, 1)
        self.assertFalse(component.is_uniform())
        self.assertAlmostEqual(component.initial_count, 20.0, delta=2.0)
        self.check_array_close(component.prior_spatial.get_location(),
                               CLUTTER_MEAN, rtol=0.01)
        self.assertAlmostEqual(component.prior_spatial.get_beta(),
                               component.initial_count)
        self.assertAlmostEqual(component.prior_spatial.get_dof(),
                               component.initial_count + 3.0)
        config = get_tracker_config().set_init_config(
            InitConfig(max_components=0))
        self.assertEqual(Tracker(config).init_clutter_components(frames), [])


class TestTrackerWindows(unittest.TestCase, TestBase):
    def setUp(self):
        scenario = get_crossing_scenario(12)
        self.frames, self.truths = simulate(scenario, SensorModel(),
                                            get_rng())
        self.tracker = Tracker(get_tracker_config())

    def testTrackerIllegalInit(self):
        self.assertRaises(IllegalArgumentException, Tracker, 'config')
        self.assertEqual(self.tracker.run([]), ([], []))
        self.assertRaises(IllegalArgumentException, self.tracker.run,
                          ['frame'])
        self.assertRaises(DataFormatException, self.tracker.run,
                          [self.frames[0], self.frames[2]])

    def testWindowLifecycle(self):
        tracker = self.tracker
        self.assertRaises(IllegalStateException, tracker.process_window)
        self.assertRaises(IllegalStateException, tracker.slide,
                          self.frames[7:8])
        self.assertEqual(tracker.flush(), ([], []))
        self.assertRaises(IllegalArgumentException, tracker.process_window,
                          self.frames[:8])
        iterations = tracker.process_window(self.frames[:7])
        state = tracker.get_window_state()
        self.assertEqual(state.iterations, iterations)
        self.assertGreaterEqual(iterations, 1)
        self.assertLessEqual(iterations, 3)
        self.assertEqual(state.get_scans(), list(range(1, 8)))
        self.assertTrue(state.first_window)
        self.assertEqual(sorted(state.associations), list(range(1, 8)))
        self.assertRaises(IllegalStateException, tracker.process_window,
                          self.frames[:7])
        self.assertRaises(IllegalArgumentException, tracker.slide,
                          self.frames[7:11])
        self.assertRaises(DataFormatException, tracker.slide,
                          self.frames[8:9])
        self.assertEqual(tracker.slide([]), ([], []))
        tracks, components = tracker.slide(self.frames[7:10])
        self.assertEqual(sorted(set(c.scan for c in components)), [1, 2, 3])
        self.assertTrue(all(t.scan in (1, 2, 3) for t in tracks))
        state = tracker.get_window_state()
        self.assertEqual(state.get_start(), 4)
        self.assertEqual(state.first_new_scan, 8)
        self.assertFalse(state.first_window)
        tracks, components = tracker.flush()
        self.assertEqual(sorted(set(c.scan for c in components)),
                         list(range(4, 11)))
        self.assertIsNone(tracker.get_window_state())

    def testRunCoversEveryScan(self):
        tracks, components = self.tracker.run(self.frames)
        uniform = [c.scan for c in components if c.comp_id == 0]
        self.assertEqual(uniform, list(range(1, 13)))
        keys = [(t.scan, t.track_id) for t in tracks]
        self.assertEqual(len(keys), len(set(keys)))
        for estimate in tracks:
            self.assertIn(estimate.status, (TrackStatus.TENTATIVE,
                                            TrackStatus.CONFIRMED,
                                            TrackStatus.DELETED))
            self.assertGreaterEqual(estimate.visibility, 0.0)
            self.assertLessEqual(estimate.visibility, 1.0)
        again = Tracker(get_tracker_config()).run(self.frames)
        self.assertEqual([t.to_dict() for t in again[0]],
                         [t.to_dict() for t in tracks])

    def testKinematicsOnly(self):
        config = get_tracker_config().set_use_strength(False)
        tracks, _ = Tracker(config).run(self.frames)
        self.assertGreater(len(tracks), 0)
        first = {}
        for estimate in tracks:
            # Forgetting keeps the mean power, so without strength updates
            # every track keeps its initial SNR mean.
            mean = first.setdefault(estimate.track_id, estimate.snr_mean)
            self.assertAlmostEqual(estimate.snr_mean, mean, delta=1e-6)
        full, _ = Tracker(get_tracker_config()).run(self.frames)
        self.assertNotEqual([t.snr_mean for t in full],
                            [t.snr_mean for t in tracks])

    def testDefaultLoggerShared(self):
        directory = mkdtemp()
        previous = getcwd()
        chdir(directory)
        shared = getLogger(Tracker.__name__)
        for handler in list(shared.handlers):
            shared.removeHandler(handler)
            handler.close()
        try:
            with ThreadPoolExecutor(max_workers=8) as executor:
                loggers = list(executor.map(lambda _: default_logger(),
                                            range(16)))
                trackers = list(executor.map(
                    lambda _: Tracker(TrackerConfig()), range(8)))
            self.assertTrue(all(logger is shared for logger in loggers))
            self.assertEqual(len(shared.handlers), 1)
            self.assertEqual(len(trackers), 8)
            self.assertTrue(path.isfile(path.join(directory, 'logs',
                                                  'tracker.log')))
        finally:
            for handler in list(shared.handlers):
                shared.removeHandler(handler)
                handler.close()
            chdir(previous)
            rmtree(directory)

    def testDumpDirectory(self):
        self.assertRaises(IllegalArgumentException,
                          self.tracker.set_dump_directory,
                          path.join(mkdtemp(), 'missing'))
        directory = mkdtemp()
        try:
            self.tracker.set_dump_directory(directory)
            self.tracker.run(self.frames[:8])
            names = listdir(directory)
            self.assertIn('association_1_1.csv', names)
            self.assertIn('association_2_1.csv', names)
            with open(path.join(directory, 'association_1_1.csv')) as f:
                rows = list(reader(f))
            self.assertEqual(sorted(set(int(r[0]) for r in rows)),
                             list(range(1, 8)))
            self.assertTrue(all(r[1] in ('target', 'clutter') for r in rows))
        finally:
            rmtree(directory)

    def testKnownClutterNeedsParameters(self):
        config = get_tracker_config().set_clutter_mode(ClutterMode.KNOWN)
        self.assertRaises(IllegalStateException, Tracker(config).run,
                          self.frames)
        self.assertRaises(IllegalArgumentException,
                          Tracker(config).set_known_clutter, [])


class TestTrackerScenarios(unittest.TestCase, TestBase):
    def testTracksTwoTargets(self):
        frames, truths = simulate(get_crossing_scenario(), SensorModel(),
                                  get_rng())
        tracks, components = Tracker(get_tracker_config()).run(frames)
        summary = evaluate_run(truths, tracks, components).get_summary()
        self.assertEqual(summary['true_targets'], 2.0)
        self.assertEqual(summary['tracked_targets'], 2.0)
        confirmed = [t for t in tracks if t.scan == short_scans and
                     t.status == TrackStatus.CONFIRMED]
        self.assertGreaterEqual(len(confirmed), 2)

    def testEstimatesClutterComponent(self):
        frames, truths = simulate(get_clutter_scenario(), SensorModel(),
                                  get_rng(3))
        tracks, components = Tracker(get_tracker_config()).run(frames)
        last = [c for c in components
                if c.scan == short_scans and not c.is_uniform()]
        self.assertGreaterEqual(len(last), 1)
        pairs = centroid_errors([CLUTTER_MEAN], [c.position for c in last])
        self.assertLess(pairs[0][2], 1.0)
        self.assertEqual(sorted(set(c.scan for c in components)),
                         list(range(1, short_scans + 1)))

    def testKnownClutter(self):
        frames, truths = simulate(get_clutter_scenario(), SensorModel(),
                                  get_rng(4))
        config = get_tracker_config().set_clutter_mode(ClutterMode.KNOWN)
        tracker = Tracker(config).set_known_clutter(
            dict((t.get_scan(), t.get_clutter()) for t in truths))
        tracks, components = tracker.run(frames)
        pinned = [c for c in components if c.comp_id == 1]
        self.assertEqual([c.scan for c in pinned],
                         list(range(1, short_scans + 1)))
        for estimate in pinned:
            self.check_array_close(estimate.position, CLUTTER_MEAN)
            self.check_array_close(
                estimate.to_belief().expected_covariance(),
                diag(CLUTTER_SPREAD) ** 2, rtol=1e-3)
            self.assertAlmostEqual(estimate.cnr_mean, 5.0, delta=0.01)
        self.assertEqual(sorted(set(c.comp_id for c in components)), [0, 1])
        weights = array([c.weight for c in pinned])
        self.assertTrue((abs(weights - 20.0 / 30.0) < 1e-3).all())


if __name__ == '__main__':
    unittest.main()
