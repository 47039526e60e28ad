#
# Copyright (C) 2020 The mptrack authors. All rights reserved.
#
# Licensed under the Universal Permissive License v 1.0 as shown at https://oss.oracle.com/licenses/upl
#
# Please see LICENSE.txt file included in the top-level directory of the
# appropriate download for a copy of the license and additional information.
#

import unittest
from json import dump
from logging import Logger
from os import path
from shutil import rmtree
from tempfile import mkdtemp

from mptrack import (
    ClutterMode, ConfigException, CvModel, ForgettingFactors,
    IllegalArgumentException, InitConfig, RunConfig, SensorModel,
    SwerlingModel, TrackerConfig, VisibilityChain, WindowConfig)


class TestWindowConfig(unittest.TestCase):
    def testWindowConfigIllegalInit(self):
        self.assertRaises(IllegalArgumentException, WindowConfig, 0)
        self.assertRaises(IllegalArgumentException, WindowConfig, 3, 4)
        self.assertRaises(IllegalArgumentException, WindowConfig, 7, 3, 0)
        self.assertRaises(IllegalArgumentException, WindowConfig, 7, 3, 1e-3,
                          0)
        self.assertRaises(IllegalArgumentException, WindowConfig, 7, 3, 1e-3,
                          3, 1e-6, 1000, 1.0)

    def testWindowConfigSetters(self):
        window = WindowConfig()
        self.assertEqual(window.get_length(), 7)
        self.assertEqual(window.get_step(), 3)
        self.assertEqual(window.get_mp_max_iterations(), 3)
        self.assertEqual(window.get_damping(), 0.9)
        self.assertIs(window.set_length(10).set_step(10), window)
        self.assertEqual(window.get_step(), 10)
        self.assertRaises(IllegalArgumentException, window.set_length, 5)
        self.assertRaises(IllegalArgumentException, window.set_step, 11)
        window.set_mp_tolerance(1e-4).set_mp_max_iterations(1)
        window.set_bp_tolerance(1e-8).set_bp_max_iterations(50)
        window.set_damping(0.0)
        self.assertEqual(window.get_mp_tolerance(), 1e-4)
        self.assertEqual(window.get_bp_tolerance(), 1e-8)
        self.assertEqual(window.get_bp_max_iterations(), 50)
        self.assertEqual(window.get_damping(), 0.0)
        self.assertRaises(IllegalArgumentException, window.set_damping, -0.1)
        self.assertRaises(IllegalArgumentException,
                          window.set_bp_max_iterations, 2.5)


class TestInitConfig(unittest.TestCase):
    def testInitConfigIllegalInit(self):
        self.assertRaises(IllegalArgumentException, InitConfig, 0)
        self.assertRaises(IllegalArgumentException, InitConfig, 120, 0)
        self.assertRaises(IllegalArgumentException, InitConfig, 120, 3, 1.5)
        self.assertRaises(IllegalArgumentException, InitConfig, 120, 3, 0.5,
                          2.0)
        self.assertRaises(IllegalArgumentException, InitConfig, 120, 3, 0.5,
                          3.0, -1)

    def testInitConfigSetters(self):
        init = InitConfig()
        self.assertEqual(init.get_max_speed(), 120.0)
        self.assertEqual(init.get_max_misses(), 3)
        self.assertEqual(init.get_initial_shape(), 3.0)
        self.assertIs(init.set_max_components(0), init)
        self.assertEqual(init.get_max_components(), 0)
        init.set_max_speed(80).set_max_misses(2).set_initial_visibility(0.6)
        init.set_min_points_per_scan(1.5).set_density_ratio(2.0)
        self.assertEqual(init.get_max_speed(), 80)
        self.assertEqual(init.get_initial_visibility(), 0.6)
        self.assertEqual(init.get_min_points_per_scan(), 1.5)
        self.assertEqual(init.get_density_ratio(), 2.0)
        self.assertRaises(IllegalArgumentException, init.set_initial_shape,
                          1.5)


class TestTrackerConfig(unittest.TestCase):
    def testDefaults(self):
        config = TrackerConfig()
        self.assertEqual(config.get_confirm_threshold(), 0.75)
        self.assertEqual(config.get_delete_threshold(), 0.5)
        self.assertEqual(config.get_invisible_detection(), 0.01)
        self.assertEqual(config.get_clutter_mode(), ClutterMode.ESTIMATE)
        self.assertIsNone(config.get_gate())
        self.assertTrue(config.get_use_strength())
        self.assertIsNone(config.get_logger())
        self.assertEqual(config.get_motion().get_period(), 1.25)
        self.assertEqual(config.get_window_config().get_length(), 7)
        self.assertEqual(config.get_overrides(), {})

    def testIllegalSetters(self):
        config = TrackerConfig()
        self.assertRaises(IllegalArgumentException, config.set_sensor,
                          'sensor')
        self.assertRaises(IllegalArgumentException, config.set_motion, None)
        self.assertRaises(IllegalArgumentException, config.set_forgetting,
                          1.05)
        self.assertRaises(IllegalArgumentException,
                          config.set_visibility_chain, 0.8)
        self.assertRaises(IllegalArgumentException, config.set_window_config,
                          {'length': 7})
        self.assertRaises(IllegalArgumentException, config.set_init_config,
                          None)
        self.assertRaises(IllegalArgumentException,
                          config.set_lifecycle_thresholds, 0.5, 0.75)
        self.assertRaises(IllegalArgumentException,
                          config.set_invisible_detection, -0.01)
        self.assertRaises(IllegalArgumentException, config.set_clutter_mode,
                          'ignore')
        self.assertRaises(IllegalArgumentException, config.set_gate, 0)
        self.assertRaises(IllegalArgumentException, config.set_use_strength,
                          'no')
        self.assertRaises(IllegalArgumentException, config.set_logger,
                          'logger')

    def testCloneSharesLogger(self):
        logger = Logger('config')
        config = TrackerConfig().set_logger(logger).set_gate(4.0)
        clone = config.clone()
        self.assertIs(clone.get_logger(), logger)
        self.assertIs(config.get_logger(), logger)
        self.assertIsNot(clone.get_window_config(),
                         config.get_window_config())
        clone.set_gate(None)
        self.assertEqual(config.get_gate(), 4.0)

    def testOverrides(self):
        config = TrackerConfig().set_clutter_mode(
            ClutterMode.UNIFORM_ONLY).set_window_config(
            WindowConfig(mp_max_iterations=1)).set_lifecycle_thresholds(
            0.8, 0.5).set_use_strength(False)
        self.assertEqual(config.get_overrides(),
                         {'lifecycle.confirm': 0.8,
                          'tracker.clutter_mode': 'uniform_only',
                          'tracker.use_strength': False,
                          'window.mp_max_iterations': 1})

    def testDictRoundTrip(self):
        config = TrackerConfig()
        config.set_sensor(SensorModel(
            25.0, 0.5, SwerlingModel(SwerlingModel.SWERLING_I, 0.8)))
        config.set_motion(CvModel(1.0, 0.02))
        config.set_forgetting(ForgettingFactors(1.1, 1.02, 0.95, 4.0))
        config.set_visibility_chain(VisibilityChain(0.9, 0.1))
        config.set_init_config(InitConfig(max_components=2))
        config.set_gate(5.0).set_invisible_detection(0.02)
        config.set_use_strength(False)
        record = config.to_dict()
        self.assertEqual(set(record), {
            'sensor', 'motion', 'window', 'forgetting', 'visibility',
            'lifecycle', 'init', 'tracker'})
        self.assertEqual(record['sensor']['swerling_order'], 1)
        restored = TrackerConfig.from_dict(record)
        self.assertEqual(restored.to_dict(), record)
        self.assertEqual(restored.get_overrides(), config.get_overrides())

    def testFromDictPartial(self):
        config = TrackerConfig.from_dict({'window': {'step': 2},
                                          'tracker': {'gate': 6.0}})
        self.assertEqual(config.get_window_config().get_step(), 2)
        self.assertEqual(config.get_window_config().get_length(), 7)
        self.assertEqual(config.get_gate(), 6.0)

    def testFromDictIllegal(self):
        self.assertRaises(ConfigException, TrackerConfig.from_dict,
                          {'radar': {}})
        self.assertRaises(ConfigException, TrackerConfig.from_dict,
                          {'window': {'size': 7}})
        self.assertRaises(ConfigException, TrackerConfig.from_dict,
                          {'window': {'step': 9}})
        self.assertRaises(ConfigException, TrackerConfig.from_dict,
                          {'lifecycle': {'confirm': 0.4}})
        self.assertRaises(ConfigException, TrackerConfig.from_dict,
                          {'tracker': {'clutter_mode': 'none'}})
        self.assertRaises(ConfigException, TrackerConfig.from_dict,
                          {'tracker': {'use_strength': 0}})
        self.assertRaises(ConfigException, TrackerConfig.from_dict,
                          {'motion': []})
        self.assertRaises(ConfigException, TrackerConfig.from_dict, [])


class TestRunConfig(unittest.TestCase):
    def setUp(self):
        self.directory = mkdtemp()

    def tearDown(self):
        rmtree(self.directory)

    def testSetters(self):
        config = RunConfig()
        self.assertEqual(config.get_scenario(), 1)
        self.assertEqual(config.get_runs(), 1)
        self.assertEqual(config.get_output(), 'out')
        self.assertIs(config.set_scenario(3).set_runs(20).set_seed(0)
                      .set_threads(4).set_output('results'), config)
        self.assertEqual(config.get_threads(), 4)
        self.assertRaises(IllegalArgumentException, config.set_scenario, 4)
        self.assertRaises(IllegalArgumentException, config.set_scenario,
                          'one')
        self.assertRaises(IllegalArgumentException, config.set_runs, 0)
        self.assertRaises(IllegalArgumentException, config.set_seed, -1)
        self.assertRaises(IllegalArgumentException, config.set_threads, 0)
        self.assertRaises(IllegalArgumentException, config.set_output, 7)
        self.assertRaises(IllegalArgumentException, RunConfig, 'config')
        inline = {'name': 'inline', 'num_scans': 10}
        config.set_scenario(inline)
        inline['num_scans'] = 20
        self.assertEqual(config.get_scenario()['num_scans'], 10)

    def testDictAndOverrides(self):
        config = RunConfig(TrackerConfig().set_gate(5.0)).set_runs(10)
        record = config.to_dict()
        self.assertEqual(record['schema_version'], 1)
        self.assertEqual(record['monte_carlo'],
                         {'runs': 10, 'seed': 0, 'threads': 1})
        self.assertIn('window', record)
        self.assertEqual(config.get_overrides(),
                         {'monte_carlo.runs': 10, 'tracker.gate': 5.0})
        restored = RunConfig.from_dict(record)
        self.assertEqual(restored.to_dict(), record)
        self.assertEqual(restored.get_tracker_config().get_gate(), 5.0)

    def testFromDictIllegal(self):
        self.assertRaises(ConfigException, RunConfig.from_dict,
                          {'scenario': 1})
        self.assertRaises(ConfigException, RunConfig.from_dict,
                          {'schema_version': 2})
        self.assertRaises(ConfigException, RunConfig.from_dict,
                          {'schema_version': 1, 'scenario': 5})
        self.assertRaises(ConfigException, RunConfig.from_dict,
                          {'schema_version': 1,
                           'monte_carlo': {'workers': 2}})
        self.assertRaises(ConfigException, RunConfig.from_dict,
                          {'schema_version': 1, 'monte_carlo': {'runs': 0}})
        self.assertRaises(ConfigException, RunConfig.from_dict, 'config')

    def testFromFile(self):
        good = path.join(self.directory, 'good.json')
        with open(good, 'w') as f:
            dump({'schema_version': 1, 'scenario': 2,
                  'window': {'length': 9, 'step': 3},
                  'monte_carlo': {'runs': 5, 'seed': 11}}, f)
        config = RunConfig.from_file(good)
        self.assertEqual(config.get_scenario(), 2)
        self.assertEqual(config.get_seed(), 11)
        self.assertEqual(config.get_threads(), 1)
        self.assertEqual(
            config.get_tracker_config().get_window_config().get_length(), 9)
        bad = path.join(self.directory, 'bad.json')
        with open(bad, 'w') as f:
            f.write('{"schema_version": 1,')
        self.assertRaises(ConfigException, RunConfig.from_file, bad)


if __name__ == '__main__':
    unittest.main()
