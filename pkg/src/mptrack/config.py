#
# Copyright (C) 2020 The mptrack authors. All rights reserved.
#
# Licensed under the Universal Permissive License v 1.0 as shown at https://oss.oracle.com/licenses/upl
#
# Please see LICENSE.txt file included in the top-level directory of the
# appropriate download for a copy of the license and additional information.
#

from copy import deepcopy
from json import load

from .common import CheckValue, ClutterMode
from .distributions import SwerlingModel
from .dynamics import CvModel, ForgettingFactors, VisibilityChain
from .exception import ConfigException, IllegalArgumentException
from .measurement import SensorModel

SCHEMA_VERSION = 1


class WindowConfig(object):
    """
    The sliding window and the iteration limits of the message passing.

    :param length: K, the number of scans in a window.
    :type length: int
    :param step: s, the number of scans the window slides by, 1 <= s <= K.
    :type step: int
    :param mp_tolerance: the RMS change of the smoothed target means under
        which the closed-loop iteration stops.
    :type mp_tolerance: float
    :param mp_max_iterations: the maximum number of closed-loop iterations.
    :type mp_max_iterations: int
    :param bp_tolerance: the convergence tolerance of belief propagation.
    :type bp_tolerance: float
    :param bp_max_iterations: the iteration cap of belief propagation.
    :type bp_max_iterations: int
    :param damping: the damping of belief propagation messages, in [0, 1).
    :type damping: float
    :raises IllegalArgumentException: raises the exception if parameters are
        not valid.
    """

    def __init__(self, length=7, step=3, mp_tolerance=1e-3,
                 mp_max_iterations=3, bp_tolerance=1e-6,
                 bp_max_iterations=1000, damping=0.9):
        CheckValue.check_int_gt_zero(length, 'length')
        CheckValue.check_int_gt_zero(step, 'step')
        if step > length:
            raise IllegalArgumentException(
                'step must not exceed length. Got step ' + str(step) +
                ' for length ' + str(length))
        CheckValue.check_float_gt_zero(mp_tolerance, 'mp_tolerance')
        CheckValue.check_int_gt_zero(mp_max_iterations, 'mp_max_iterations')
        CheckValue.check_float_gt_zero(bp_tolerance, 'bp_tolerance')
        CheckValue.check_int_gt_zero(bp_max_iterations, 'bp_max_iterations')
        CheckValue.check_range(damping, 'damping', 0, 1, high_open=True)
        self._length = length
        self._step = step
        self._mp_tolerance = float(mp_tolerance)
        self._mp_max_iterations = mp_max_iterations
        self._bp_tolerance = float(bp_tolerance)
        self._bp_max_iterations = bp_max_iterations
        self._damping = float(damping)

    def __str__(self):
        return ('[K=' + str(self._length) + ', s=' + str(self._step) +
                ', mp=' + str(self._mp_max_iterations) + '/' +
                str(self._mp_tolerance) + ', bp=' +
                str(self._bp_max_iterations) + '/' +
                str(self._bp_tolerance) + ', damping=' + str(self._damping) +
                ']')

    def set_length(self, length):
        """
        Sets the window length K.

        :param length: the number of scans, not below the slide step.
        :type length: int
        :returns: self.
        :raises IllegalArgumentException: raises the exception if length is
            not a positive integer or is below the slide step.
        """
        CheckValue.check_int_gt_zero(length, 'length')
        if length < self._step:
            raise IllegalArgumentException(
                'length must not be below step ' + str(self._step) +
                '. Got:' + str(length))
        self._length = length
        return self

    def get_length(self):
        """
        Returns the window length K.

        :returns: the number of scans in a window.
        :rtype: int
        """
        return self._length

    def set_step(self, step):
        """
        Sets the slide step s.

        :param step: the number of scans, at most the window length.
        :type step: int
        :returns: self.
        :raises IllegalArgumentException: raises the exception if step is not
            a positive integer or exceeds the window length.
        """
        CheckValue.check_int_gt_zero(step, 'step')
        if step > self._length:
            raise IllegalArgumentException(
                'step must not exceed length ' + str(self._length) +
                '. Got:' + str(step))
        self._step = step
        return self

    def get_step(self):
        """
        Returns the slide step s.

        :returns: the number of scans the window slides by.
        :rtype: int
        """
        return self._step

    def set_mp_tolerance(self, mp_tolerance):
        """
        Sets the convergence tolerance of the closed-loop iteration.

        :param mp_tolerance: the tolerance, positive.
        :type mp_tolerance: float
        :returns: self.
        :raises IllegalArgumentException: raises the exception if
            mp_tolerance is not positive.
        """
        CheckValue.check_float_gt_zero(mp_tolerance, 'mp_tolerance')
        self._mp_tolerance = float(mp_tolerance)
        return self

    def get_mp_tolerance(self):
        return self._mp_tolerance

    def set_mp_max_iterations(self, mp_max_iterations):
        """
        Sets the maximum number of closed-loop iterations. One iteration
        gives the open-loop output of the first pass.

        :param mp_max_iterations: the maximum, positive.
        :type mp_max_iterations: int
        :returns: self.
        :raises IllegalArgumentException: raises the exception if
            mp_max_iterations is not a positive integer.
        """
        CheckValue.check_int_gt_zero(mp_max_iterations, 'mp_max_iterations')
        self._mp_max_iterations = mp_max_iterations
        return self

    def get_mp_max_iterations(self):
        return self._mp_max_iterations

    def set_bp_tolerance(self, bp_tolerance):
        CheckValue.check_float_gt_zero(bp_tolerance, 'bp_tolerance')
        self._bp_tolerance = float(bp_tolerance)
        return self

    def get_bp_tolerance(self):
        return self._bp_tolerance

    def set_bp_max_iterations(self, bp_max_iterations):
        CheckValue.check_int_gt_zero(bp_max_iterations, 'bp_max_iterations')
        self._bp_max_iterations = bp_max_iterations
        return self

    def get_bp_max_iterations(self):
        return self._bp_max_iterations

    def set_damping(self, damping):
        """
        Sets the damping of belief propagation messages.

        :param damping: the damping, in [0, 1).
        :type damping: float
        :returns: self.
        :raises IllegalArgumentException: raises the exception if damping is
            out of range.
        """
        CheckValue.check_range(damping, 'damping', 0, 1, high_open=True)
        self._damping = float(damping)
        return self

    def get_damping(self):
        return self._damping


class InitConfig(object):
    """
    Track and clutter-component initialization parameters.

    :param max_speed: v_max, the per-axis speed bound of two-point
        initialization in m/s.
    :type max_speed: float
    :param max_misses: L_max, the largest scan gap of a two-point pair.
    :type max_misses: int
    :param initial_visibility: f_s, the visible probability of a new track.
    :type initial_visibility: float
    :param initial_shape: the shape of the Inverse-Gamma belief of a new
        track or component, above 2.
    :type initial_shape: float
    :param max_components: N_C_max, the budget of nonuniform clutter
        components.
    :type max_components: int
    :param min_points_per_scan: the expected number of points per scan a
        clutter cluster needs to survive.
    :type min_points_per_scan: float
    :param density_ratio: the ratio of a cluster's peak density to the
        background density a cluster needs to survive.
    :type density_ratio: float
    :raises IllegalArgumentException: raises the exception if parameters are
        not valid.
    """

    def __init__(self, max_speed=120.0, max_misses=3, initial_visibility=0.5,
                 initial_shape=3.0, max_components=8, min_points_per_scan=3.0,
                 density_ratio=5.0):
        CheckValue.check_float_gt_zero(max_speed, 'max_speed')
        CheckValue.check_int_gt_zero(max_misses, 'max_misses')
        CheckValue.check_probability(initial_visibility, 'initial_visibility')
        CheckValue.check_range(initial_shape, 'initial_shape', 2, None,
                               low_open=True)
        CheckValue.check_int_ge_zero(max_components, 'max_components')
        CheckValue.check_float_ge_zero(min_points_per_scan,
                                       'min_points_per_scan')
        CheckValue.check_float_gt_zero(density_ratio, 'density_ratio')
        self._max_speed = float(max_speed)
        self._max_misses = max_misses
        self._initial_visibility = float(initial_visibility)
        self._initial_shape = float(initial_shape)
        self._max_components = max_components
        self._min_points_per_scan = float(min_points_per_scan)
        self._density_ratio = float(density_ratio)

    def __str__(self):
        return ('[v_max=' + str(self._max_speed) + ', L_max=' +
                str(self._max_misses) + ', f_s=' +
                str(self._initial_visibility) + ', N_C_max=' +
                str(self._max_components) + ']')

    def set_max_speed(self, max_speed):
        """
        Sets the per-axis speed bound of two-point initialization.

        :param max_speed: the bound in m/s.
        :type max_speed: float
        :returns: self.
        :raises IllegalArgumentException: raises the exception if max_speed
            is not positive.
        """
        CheckValue.check_float_gt_zero(max_speed, 'max_speed')
        self._max_speed = float(max_speed)
        return self

    def get_max_speed(self):
        return self._max_speed

    def set_max_misses(self, max_misses):
        """
        Sets the largest scan gap between the two measurements of a new
        track.

        :param max_misses: the gap in scans, at least 1.
        :type max_misses: int
        :returns: self.
        :raises IllegalArgumentException: raises the exception if max_misses
            is not a positive integer.
        """
        CheckValue.check_int_gt_zero(max_misses, 'max_misses')
        self._max_misses = max_misses
        return self

    def get_max_misses(self):
        return self._max_misses

    def set_initial_visibility(self, initial_visibility):
        CheckValue.check_probability(initial_visibility, 'initial_visibility')
        self._initial_visibility = float(initial_visibility)
        return self

    def get_initial_visibility(self):
        return self._initial_visibility

    def set_initial_shape(self, initial_shape):
        CheckValue.check_range(initial_shape, 'initial_shape', 2, None,
                               low_open=True)
        self._initial_shape = float(initial_shape)
        return self

    def get_initial_shape(self):
        return self._initial_shape

    def set_max_components(self, max_components):
        """
        Sets the budget of nonuniform clutter components. Zero disables
        component initialization.

        :param max_components: the budget.
        :type max_components: int
        :returns: self.
        :raises IllegalArgumentException: raises the exception if
            max_components is negative.
        """
        CheckValue.check_int_ge_zero(max_components, 'max_components')
        self._max_components = max_components
        return self

    def get_max_components(self):
        return self._max_components

    def set_min_points_per_scan(self, min_points_per_scan):
        CheckValue.check_float_ge_zero(min_points_per_scan,
                                       'min_points_per_scan')
        self._min_points_per_scan = float(min_points_per_scan)
        return self

    def get_min_points_per_scan(self):
        return self._min_points_per_scan

    def set_density_ratio(self, density_ratio):
        CheckValue.check_float_gt_zero(density_ratio, 'density_ratio')
        self._density_ratio = float(density_ratio)
        return self

    def get_density_ratio(self):
        return self._density_ratio


def _check_section(record, name, keys):
    if not isinstance(record, dict):
        raise ConfigException(name + ' must be an object.')
    unknown = set(record) - set(keys)
    if unknown:
        raise ConfigException(
            'Unknown keys in ' + name + ': ' + ', '.join(sorted(unknown)))
    return record


def _flatten(record, prefix=''):
    flat = {}
    for key, value in record.items():
        if isinstance(value, dict):
            flat.update(_flatten(value, prefix + key + '.'))
        else:
            flat[prefix + key] = value
    return flat


class TrackerConfig(object):
    """
    The configuration of a :py:class:`Tracker`. Every parameter defaults to
    the published parameterization: R = diag(20 m, 0.6°)², d = 0.715 with
    Swerling III strengths, T = 1.25 s, K = 7, s = 3, three closed-loop
    iterations, forgetting factors u = 1.05, ξ = 0.99 and κ = 5, p_s = 0.8,
    p_b = 0.15, ε = 0.01, confirmation and deletion at 0.75 and 0.5,
    v_max = 120 m/s and L_max = 3.

    Setters validate their argument and return self, so a configuration can
    be built in one expression:

    .. code-block:: python

        config = TrackerConfig().set_clutter_mode(
            ClutterMode.UNIFORM_ONLY).set_window_config(
            WindowConfig(mp_max_iterations=1))
    """
    _DEFAULT_CONFIRM_THRESHOLD = 0.75
    _DEFAULT_DELETE_THRESHOLD = 0.5
    _DEFAULT_INVISIBLE_DETECTION = 0.01
    _DEFAULT_CLUTTER_MODE = ClutterMode.ESTIMATE
    _DEFAULT_USE_STRENGTH = True

    def __init__(self):
        self._sensor = SensorModel()
        self._motion = CvModel()
        self._forgetting = ForgettingFactors()
        self._visibility = VisibilityChain()
        self._window = WindowConfig()
        self._init = InitConfig()
        self._confirm_threshold = TrackerConfig._DEFAULT_CONFIRM_THRESHOLD
        self._delete_threshold = TrackerConfig._DEFAULT_DELETE_THRESHOLD
        self._invisible_detection = (
            TrackerConfig._DEFAULT_INVISIBLE_DETECTION)
        self._clutter_mode = TrackerConfig._DEFAULT_CLUTTER_MODE
        self._use_strength = TrackerConfig._DEFAULT_USE_STRENGTH
        self._gate = None
        self._logger = None

    def set_sensor(self, sensor):
        """
        Sets the sensor model.

        :param sensor: the sensor.
        :type sensor: SensorModel
        :returns: self.
        :raises IllegalArgumentException: raises the exception if sensor is
            not an instance of SensorModel.
        """
        if not isinstance(sensor, SensorModel):
            raise IllegalArgumentException(
                'sensor must be an instance of SensorModel.')
        self._sensor = sensor
        return self

    def get_sensor(self):
        return self._sensor

    def set_motion(self, motion):
        if not isinstance(motion, CvModel):
            raise IllegalArgumentException(
                'motion must be an instance of CvModel.')
        self._motion = motion
        return self

    def get_motion(self):
        return self._motion

    def set_forgetting(self, forgetting):
        if not isinstance(forgetting, ForgettingFactors):
            raise IllegalArgumentException(
                'forgetting must be an instance of ForgettingFactors.')
        self._forgetting = forgetting
        return self

    def get_forgetting(self):
        return self._forgetting

    def set_visibility_chain(self, chain):
        if not isinstance(chain, VisibilityChain):
            raise IllegalArgumentException(
                'chain must be an instance of VisibilityChain.')
        self._visibility = chain
        return self

    def get_visibility_chain(self):
        return self._visibility

    def set_window_config(self, window):
        if not isinstance(window, WindowConfig):
            raise IllegalArgumentException(
                'window must be an instance of WindowConfig.')
        self._window = window
        return self

    def get_window_config(self):
        return self._window

    def set_init_config(self, init):
        if not isinstance(init, InitConfig):
            raise IllegalArgumentException(
                'init must be an instance of InitConfig.')
        self._init = init
        return self

    def get_init_config(self):
        return self._init

    def set_lifecycle_thresholds(self, confirm, delete):
        """
        Sets the smoothed visibility thresholds of track confirmation and
        deletion.

        :param confirm: the confirmation threshold.
        :type confirm: float
        :param delete: the deletion threshold, not above confirm.
        :type delete: float
        :returns: self.
        :raises IllegalArgumentException: raises the exception if a threshold
            is not a probability or delete exceeds confirm.
        """
        CheckValue.check_probability(confirm, 'confirm')
        CheckValue.check_probability(delete, 'delete')
        if delete > confirm:
            raise IllegalArgumentException(
                'delete must not exceed confirm. Got ' + str(delete) +
                ' > ' + str(confirm))
        self._confirm_threshold = float(confirm)
        self._delete_threshold = float(delete)
        return self

    def get_confirm_threshold(self):
        return self._confirm_threshold

    def get_delete_threshold(self):
        return self._delete_threshold

    def set_invisible_detection(self, invisible_detection):
        """
        Sets ε, the detection probability of an invisible target.

        :param invisible_detection: the probability.
        :type invisible_detection: float
        :returns: self.
        :raises IllegalArgumentException: raises the exception if
            invisible_detection is not a probability.
        """
        CheckValue.check_probability(invisible_detection,
                                     'invisible_detection')
        self._invisible_detection = float(invisible_detection)
        return self

    def get_invisible_detection(self):
        return self._invisible_detection

    def set_clutter_mode(self, clutter_mode):
        """
        Sets how clutter is modelled, one of :py:class:`ClutterMode`.

        :param clutter_mode: the mode.
        :type clutter_mode: str
        :returns: self.
        :raises IllegalArgumentException: raises the exception if
            clutter_mode is not a ClutterMode value.
        """
        if clutter_mode not in ClutterMode.values():
            raise IllegalArgumentException(
                'clutter_mode must be one of ' + str(ClutterMode.values()) +
                '. Got:' + str(clutter_mode))
        self._clutter_mode = clutter_mode
        return self

    def get_clutter_mode(self):
        return self._clutter_mode

    def set_use_strength(self, use_strength):
        """
        Sets whether the detection strengths take part in association and
        in the SNR and CNR updates. With False the tracker runs on kinematic
        information only: the strength terms leave the evidence and the
        power beliefs keep their predictions.

        :param use_strength: False for kinematics only.
        :type use_strength: bool
        :returns: self.
        :raises IllegalArgumentException: raises the exception if
            use_strength is not a boolean.
        """
        CheckValue.check_boolean(use_strength, 'use_strength')
        self._use_strength = use_strength
        return self

    def get_use_strength(self):
        return self._use_strength

    def set_gate(self, gate):
        """
        Sets a Mahalanobis gate on target measurement pairs. None, the
        default, disables gating.

        :param gate: the gate in standard deviations or None.
        :type gate: float
        :returns: self.
        :raises IllegalArgumentException: raises the exception if gate is not
            positive.
        """
        if gate is not None:
            CheckValue.check_float_gt_zero(gate, 'gate')
            gate = float(gate)
        self._gate = gate
        return self

    def get_gate(self):
        return self._gate

    def set_logger(self, logger):
        """
        Sets the logger used by the tracker.

        :param logger: the logger.
        :type logger: Logger
        :returns: self.
        :raises IllegalArgumentException: raises the exception if logger is
            not an instance of Logger.
        """
        CheckValue.check_logger(logger, 'logger')
        self._logger = logger
        return self

    def get_logger(self):
        """
        Returns the logger, or None if not configured by user.

        :returns: the logger.
        :rtype: Logger
        """
        return self._logger

    def clone(self):
        """
        All the configurations will be copied, the logger is shared.

        :returns: the copy of the instance.
        :rtype: TrackerConfig
        """
        logger = self._logger
        self._logger = None
        clone_config = deepcopy(self)
        clone_config._logger = logger
        self._logger = logger
        return clone_config

    def to_dict(self):
        sensor = self._sensor
        swerling = sensor.get_swerling()
        window = self._window
        init = self._init
        forgetting = self._forgetting
        return {
            'sensor': {'range_sigma_m': sensor.get_range_sigma(),
                       'azimuth_sigma_deg': sensor.get_azimuth_sigma(),
                       'threshold': swerling.get_threshold(),
                       'swerling_order': swerling.get_order(),
                       'region': list(sensor.get_region())},
            'motion': {'period_s': self._motion.get_period(),
                       'noise_intensity': self._motion.get_noise_intensity()},
            'window': {'length': window.get_length(),
                       'step': window.get_step(),
                       'mp_tolerance': window.get_mp_tolerance(),
                       'mp_max_iterations': window.get_mp_max_iterations(),
                       'bp_tolerance': window.get_bp_tolerance(),
                       'bp_max_iterations': window.get_bp_max_iterations(),
                       'damping': window.get_damping()},
            'forgetting': {'snr': forgetting.get_snr(),
                           'cnr': forgetting.get_cnr(),
                           'spatial': forgetting.get_spatial(),
                           'balance': forgetting.get_balance()},
            'visibility': {'survival': self._visibility.get_survival(),
                           'birth': self._visibility.get_birth(),
                           'invisible_detection': self._invisible_detection},
            'lifecycle': {'confirm': self._confirm_threshold,
                          'delete': self._delete_threshold},
            'init': {'max_speed_mps': init.get_max_speed(),
                     'max_misses': init.get_max_misses(),
                     'initial_visibility': init.get_initial_visibility(),
                     'initial_shape': init.get_initial_shape(),
                     'max_components': init.get_max_components(),
                     'min_points_per_scan': init.get_min_points_per_scan(),
                     'density_ratio': init.get_density_ratio()},
            'tracker': {'clutter_mode': self._clutter_mode,
                        'gate': self._gate,
                        'use_strength': self._use_strength}}

    def get_overrides(self):
        """
        Returns every parameter that differs from its default as
        'section.key' mapped to the configured value.

        :returns: the overrides.
        :rtype: dict
        """
        defaults = _flatten(TrackerConfig().to_dict())
        current = _flatten(self.to_dict())
        return dict((key, value) for key, value in sorted(current.items())
                    if defaults.get(key) != value)

    @staticmethod
    def from_dict(record):
        """
        Builds a configuration from the tracker sections of a config file.
        Sections that are absent keep their defaults.

        :param record: the decoded sections.
        :type record: dict
        :returns: the configuration.
        :rtype: TrackerConfig
        :raises ConfigException: raises the exception if a key is unknown or
            a value is invalid.
        """
        defaults = TrackerConfig().to_dict()
        _check_section(record, 'tracker config', defaults)
        merged = {}
        for name, section in defaults.items():
            given = _check_section(record.get(name, {}), name, section)
            merged[name] = dict(section, **given)
        try:
            sensor = merged['sensor']
            window = merged['window']
            init = merged['init']
            forgetting = merged['forgetting']
            visibility = merged['visibility']
            config = TrackerConfig()
            config.set_sensor(SensorModel(
                sensor['range_sigma_m'], sensor['azimuth_sigma_deg'],
                SwerlingModel(sensor['swerling_order'], sensor['threshold']),
                tuple(sensor['region'])))
            config.set_motion(CvModel(merged['motion']['period_s'],
                                      merged['motion']['noise_intensity']))
            config.set_window_config(WindowConfig(
                window['length'], window['step'], window['mp_tolerance'],
                window['mp_max_iterations'], window['bp_tolerance'],
                window['bp_max_iterations'], window['damping']))
            config.set_forgetting(ForgettingFactors(
                forgetting['snr'], forgetting['cnr'], forgetting['spatial'],
                forgetting['balance']))
            config.set_visibility_chain(VisibilityChain(
                visibility['survival'], visibility['birth']))
            config.set_invisible_detection(visibility['invisible_detection'])
            config.set_lifecycle_thresholds(merged['lifecycle']['confirm'],
                                            merged['lifecycle']['delete'])
            config.set_init_config(InitConfig(
                init['max_speed_mps'], init['max_misses'],
                init['initial_visibility'], init['initial_shape'],
                init['max_components'], init['min_points_per_scan'],
                init['density_ratio']))
            config.set_clutter_mode(merged['tracker']['clutter_mode'])
            config.set_gate(merged['tracker']['gate'])
            config.set_use_strength(merged['tracker']['use_strength'])
        except (IllegalArgumentException, TypeError) as e:
            raise ConfigException('Invalid tracker config: ' + str(e), e)
        return config


class RunConfig(object):
    """
    The configuration of a run: the scenario, the tracker configuration, the
    Monte Carlo settings and the output directory. The JSON form is

    .. code-block:: json

        {"schema_version": 1, "scenario": 1, "window": {"step": 2},
         "monte_carlo": {"runs": 20, "seed": 7, "threads": 4},
         "output": "out"}

    where the tracker sections (sensor, motion, window, forgetting,
    visibility, lifecycle, init, tracker) sit at the top level next to the
    run settings. The scenario is 1, 2 or 3, or an inline scenario object.
    """
    _DEFAULT_SCENARIO = 1
    _DEFAULT_RUNS = 1
    _DEFAULT_SEED = 0
    _DEFAULT_THREADS = 1
    _DEFAULT_OUTPUT = 'out'
    _RUN_KEYS = ('schema_version', 'scenario', 'monte_carlo', 'output')

    def __init__(self, tracker_config=None):
        if tracker_config is None:
            tracker_config = TrackerConfig()
        if not isinstance(tracker_config, TrackerConfig):
            raise IllegalArgumentException(
                'tracker_config must be an instance of TrackerConfig.')
        self._tracker_config = tracker_config
        self._scenario = RunConfig._DEFAULT_SCENARIO
        self._runs = RunConfig._DEFAULT_RUNS
        self._seed = RunConfig._DEFAULT_SEED
        self._threads = RunConfig._DEFAULT_THREADS
        self._output = RunConfig._DEFAULT_OUTPUT

    def set_scenario(self, scenario):
        """
        Sets the scenario, 1, 2, 3 or an inline scenario object.

        :param scenario: the scenario reference or spec.
        :type scenario: int or dict
        :returns: self.
        :raises IllegalArgumentException: raises the exception if scenario is
            neither a known scenario number nor a dict.
        """
        if isinstance(scenario, dict):
            self._scenario = deepcopy(scenario)
            return self
        if not CheckValue.is_int(scenario) or scenario not in (1, 2, 3):
            raise IllegalArgumentException(
                'scenario must be 1, 2, 3 or an object. Got:' +
                str(scenario))
        self._scenario = scenario
        return self

    def get_scenario(self):
        return self._scenario

    def set_runs(self, runs):
        CheckValue.check_int_gt_zero(runs, 'runs')
        self._runs = runs
        return self

    def get_runs(self):
        return self._runs

    def set_seed(self, seed):
        CheckValue.check_int_ge_zero(seed, 'seed')
        self._seed = seed
        return self

    def get_seed(self):
        return self._seed

    def set_threads(self, threads):
        """
        Sets the number of worker threads of a Monte Carlo sweep.

        :param threads: the worker count, positive.
        :type threads: int
        :returns: self.
        :raises IllegalArgumentException: raises the exception if threads is
            not a positive integer.
        """
        CheckValue.check_int_gt_zero(threads, 'threads')
        self._threads = threads
        return self

    def get_threads(self):
        return self._threads

    def set_output(self, output):
        CheckValue.check_str(output, 'output')
        self._output = output
        return self

    def get_output(self):
        return self._output

    def get_tracker_config(self):
        return self._tracker_config

    def to_dict(self):
        record = {'schema_version': SCHEMA_VERSION,
                  'scenario': deepcopy(self._scenario),
                  'monte_carlo': {'runs': self._runs, 'seed': self._seed,
                                  'threads': self._threads},
                  'output': self._output}
        record.update(self._tracker_config.to_dict())
        return record

    def get_overrides(self):
        """
        Returns every setting, run and tracker alike, that differs from its
        default.

        :returns: 'section.key' mapped to the configured value.
        :rtype: dict
        """
        defaults = _flatten(RunConfig().to_dict())
        current = _flatten(self.to_dict())
        return dict((key, value) for key, value in sorted(current.items())
                    if defaults.get(key) != value)

    @staticmethod
    def from_dict(record):
        """
        Builds a run configuration from a decoded config file.

        :param record: the decoded file.
        :type record: dict
        :returns: the configuration.
        :rtype: RunConfig
        :raises ConfigException: raises the exception if the schema version
            is missing or unsupported, a key is unknown or a value is
            invalid.
        """
        if not isinstance(record, dict):
            raise ConfigException('Config must be an object.')
        version = record.get('schema_version')
        if version != SCHEMA_VERSION:
            raise ConfigException(
                'Unsupported schema_version ' + str(version) + ', expected ' +
                str(SCHEMA_VERSION))
        tracker_record = dict((key, value) for key, value in record.items()
                              if key not in RunConfig._RUN_KEYS)
        config = RunConfig(TrackerConfig.from_dict(tracker_record))
        monte_carlo = _check_section(record.get('monte_carlo', {}),
                                     'monte_carlo',
                                     ('runs', 'seed', 'threads'))
        try:
            if 'scenario' in record:
                config.set_scenario(record['scenario'])
            config.set_runs(monte_carlo.get('runs', RunConfig._DEFAULT_RUNS))
            config.set_seed(monte_carlo.get('seed', RunConfig._DEFAULT_SEED))
            config.set_threads(
                monte_carlo.get('threads', RunConfig._DEFAULT_THREADS))
            config.set_output(record.get('output', RunConfig._DEFAULT_OUTPUT))
        except IllegalArgumentException as e:
            raise ConfigException('Invalid run config: ' + str(e), e)
        return config

    @staticmethod
    def from_file(path):
        """
        Reads a run configuration from a JSON file.

        :param path: the file.
        :type path: str
        :returns: the configuration.
        :rtype: RunConfig
        :raises ConfigException: raises the exception if the file is not
            valid JSON or not a valid configuration.
        """
        try:
            with open(path) as f:
                record = load(f)
        except ValueError as e:
            raise ConfigException(
                'Config file ' + path + ' is not valid JSON: ' + str(e), e)
        return RunConfig.from_dict(record)
