#
# Copyright (C) 2020 The mptrack authors. All rights reserved.
#
# Licensed under the Universal Permissive License v 1.0 as shown at https://oss.oracle.com/licenses/upl
#
# Please see LICENSE.txt file included in the top-level directory of the
# appropriate download for a copy of the license and additional information.
#

from math import pi, sin

from numpy import array, diag, zeros

from .common import CheckValue, ClutterType, TimeVariation
from .exception import ConfigException, IllegalArgumentException
from .measurement import ClutterTruth, ScanTruth, TargetTruth, generate_frame

# Scans and sampling period of the published experiments.
NUM_SCANS = 340
PERIOD = 1.25
# Targets 1 and 2 close in y at 80 m/s from 6895 m apart; once 20 m apart
# both fly level at 40 m/s.
PARALLEL_TIME = 85.9375
PARALLEL_VELOCITY = (40.0, 0.0)


class TargetSpec(object):
    """
    A simulated target.

    The target flies at constant velocity from its initial state, taken at
    its first scan. With a maneuver it switches, maneuver_time seconds after
    its first scan, to maneuver_velocity and flies on from the position
    reached at that time.

    :param target_id: the target id, positive.
    :type target_id: int
    :param state: the initial state (x m, ẋ m/s, y m, ẏ m/s).
    :type state: array_like
    :param lifetime: the first and last scans of the target.
    :type lifetime: tuple(int, int)
    :param snr: the mean SNR, a ratio.
    :type snr: float
    :param maneuver_time: the time of the velocity switch in seconds.
    :type maneuver_time: float
    :param maneuver_velocity: the velocity (ẋ, ẏ) after the switch.
    :type maneuver_velocity: tuple(float, float)
    :raises IllegalArgumentException: raises the exception if parameters are
        not valid.
    """

    def __init__(self, target_id, state, lifetime, snr, maneuver_time=None,
                 maneuver_velocity=None):
        CheckValue.check_int_gt_zero(target_id, 'target_id')
        _check_lifetime(lifetime)
        CheckValue.check_float_gt_zero(snr, 'snr')
        if (maneuver_time is None) != (maneuver_velocity is None):
            raise IllegalArgumentException(
                'maneuver_time and maneuver_velocity must be given together.')
        if maneuver_time is not None:
            CheckValue.check_float_ge_zero(maneuver_time, 'maneuver_time')
            maneuver_velocity = CheckValue.check_vector(
                maneuver_velocity, 'maneuver_velocity', 2)
        self._target_id = target_id
        self._state = CheckValue.check_vector(state, 'state', 4)
        self._lifetime = (int(lifetime[0]), int(lifetime[1]))
        self._snr = float(snr)
        self._maneuver_time = (None if maneuver_time is None else
                               float(maneuver_time))
        self._maneuver_velocity = maneuver_velocity

    def __repr__(self):
        return ('TargetSpec(id=' + str(self._target_id) + ', state=' +
                str(self._state.tolist()) + ', lifetime=' +
                str(self._lifetime) + ', snr=' + str(self._snr) + ')')

    def get_lifetime(self):
        return self._lifetime

    def get_snr(self):
        return self._snr

    def get_state(self):
        return self._state

    def get_target_id(self):
        return self._target_id

    def is_alive(self, scan):
        return self._lifetime[0] <= scan <= self._lifetime[1]

    def state_at(self, scan, period):
        """
        Returns the state at a scan of the lifetime.

        :param scan: the scan.
        :type scan: int
        :param period: the sampling period in seconds.
        :type period: float
        :returns: the state (x, ẋ, y, ẏ).
        :rtype: ndarray
        :raises IllegalArgumentException: raises the exception if the target
            is not alive at the scan.
        """
        if not self.is_alive(scan):
            raise IllegalArgumentException(
                'Target ' + str(self._target_id) + ' is not alive at scan ' +
                str(scan))
        elapsed = (scan - self._lifetime[0]) * period
        x, vx, y, vy = self._state
        if self._maneuver_time is None or elapsed <= self._maneuver_time:
            return array([x + vx * elapsed, vx, y + vy * elapsed, vy])
        x += vx * self._maneuver_time
        y += vy * self._maneuver_time
        vx, vy = self._maneuver_velocity
        rest = elapsed - self._maneuver_time
        return array([x + vx * rest, vx, y + vy * rest, vy])

    def to_dict(self):
        record = {'id': self._target_id, 'state': self._state.tolist(),
                  'lifetime': list(self._lifetime), 'snr': self._snr}
        if self._maneuver_time is not None:
            record['maneuver'] = {
                'time': self._maneuver_time,
                'velocity': self._maneuver_velocity.tolist()}
        return record

    @staticmethod
    def from_dict(record):
        _check_record(record, 'target', ('id', 'state', 'lifetime', 'snr'),
                      ('maneuver',))
        maneuver = record.get('maneuver')
        time = velocity = None
        if maneuver is not None:
            _check_record(maneuver, 'maneuver', ('time', 'velocity'))
            time, velocity = maneuver['time'], maneuver['velocity']
        return TargetSpec(record['id'], record['state'], record['lifetime'],
                          record['snr'], time, velocity)


class ClutterSpec(object):
    """
    A simulated clutter component: the uniform background over the
    surveillance region or a Gaussian in measurement space.

    Under :py:attr:`TimeVariation.SINUSOIDAL`, with f the fraction of the
    lifetime elapsed, the rate at a scan is (1 + ½·sin(π·f))·λ₀ and the
    covariance (1/3 + f)·D₀.

    :param comp_id: the component id; the uniform component is 0.
    :type comp_id: int
    :param clutter_type: :py:class:`ClutterType`.
    :type clutter_type: str
    :param rate: λ₀, the mean number of points per scan.
    :type rate: float
    :param lifetime: the first and last scans of the component.
    :type lifetime: tuple(int, int)
    :param cnr: the mean CNR, a ratio.
    :type cnr: float
    :param mean: the centroid (range km, azimuth deg), Gaussian only.
    :type mean: array_like
    :param covariance: D₀ in (km², deg²), Gaussian only.
    :type covariance: array_like
    :param variation: :py:class:`TimeVariation`.
    :type variation: str
    :raises IllegalArgumentException: raises the exception if parameters are
        not valid.
    """

    def __init__(self, comp_id, clutter_type, rate, lifetime, cnr, mean=None,
                 covariance=None, variation=TimeVariation.CONSTANT):
        CheckValue.check_int_ge_zero(comp_id, 'comp_id')
        if clutter_type not in ClutterType.values():
            raise IllegalArgumentException(
                'clutter_type must be one of ' +
                str(ClutterType.values()) + '. Got:' + str(clutter_type))
        CheckValue.check_float_ge_zero(rate, 'rate')
        _check_lifetime(lifetime)
        CheckValue.check_float_gt_zero(cnr, 'cnr')
        if variation not in TimeVariation.values():
            raise IllegalArgumentException(
                'variation must be one of ' + str(TimeVariation.values()) +
                '. Got:' + str(variation))
        if clutter_type == ClutterType.GAUSSIAN:
            mean = CheckValue.check_vector(mean, 'mean', 2)
            covariance = CheckValue.check_spd(covariance, 'covariance')
            if covariance.shape != (2, 2):
                raise IllegalArgumentException(
                    'covariance must be 2x2. Got shape:' +
                    str(covariance.shape))
        elif mean is not None or covariance is not None:
            raise IllegalArgumentException(
                'The uniform component takes no mean or covariance.')
        self._comp_id = comp_id
        self._type = clutter_type
        self._rate = float(rate)
        self._lifetime = (int(lifetime[0]), int(lifetime[1]))
        self._cnr = float(cnr)
        self._mean = mean
        self._covariance = covariance
        self._variation = variation

    def __repr__(self):
        return ('ClutterSpec(id=' + str(self._comp_id) + ', type=' +
                self._type + ', rate=' + str(self._rate) + ', lifetime=' +
                str(self._lifetime) + ', variation=' + self._variation + ')')

    def _fraction(self, scan):
        start, end = self._lifetime
        return float(scan - start) / (end - start)

    def covariance_at(self, scan):
        """
        Returns D at a scan, None for the uniform component.
        """
        if self._covariance is None:
            return None
        if self._variation == TimeVariation.CONSTANT:
            return self._covariance.copy()
        return (1.0 / 3.0 + self._fraction(scan)) * self._covariance

    def get_cnr(self):
        return self._cnr

    def get_comp_id(self):
        return self._comp_id

    def get_covariance(self):
        return self._covariance

    def get_lifetime(self):
        return self._lifetime

    def get_mean(self):
        return self._mean

    def get_rate(self):
        return self._rate

    def get_type(self):
        return self._type

    def get_variation(self):
        return self._variation

    def is_alive(self, scan):
        return self._lifetime[0] <= scan <= self._lifetime[1]

    def is_uniform(self):
        return self._type == ClutterType.UNIFORM

    def rate_at(self, scan):
        """
        Returns λ at a scan.
        """
        if self._variation == TimeVariation.CONSTANT:
            return self._rate
        return (1.0 + 0.5 * sin(pi * self._fraction(scan))) * self._rate

    def truth_at(self, scan):
        return ClutterTruth(self._comp_id, self.rate_at(scan), self._cnr,
                            self._mean, self.covariance_at(scan))

    def to_dict(self):
        return {'id': self._comp_id, 'type': self._type, 'rate': self._rate,
                'lifetime': list(self._lifetime), 'cnr': self._cnr,
                'mean': None if self._mean is None else self._mean.tolist(),
                'covariance': (None if self._covariance is None else
                               self._covariance.tolist()),
                'variation': self._variation}

    @staticmethod
    def from_dict(record):
        _check_record(record, 'clutter', ('id', 'type', 'rate', 'lifetime',
                                          'cnr'),
                      ('mean', 'covariance', 'variation'))
        return ClutterSpec(record['id'], record['type'], record['rate'],
                           record['lifetime'], record['cnr'],
                           record.get('mean'), record.get('covariance'),
                           record.get('variation', TimeVariation.CONSTANT))


class Scenario(object):
    """
    A simulation scenario: the targets, the clutter components, the number of
    scans and the sampling period. Scan k is taken at time (k - 1)·T.

    :param name: the scenario name.
    :type name: str
    :param targets: the targets, with distinct ids.
    :type targets: list(TargetSpec)
    :param clutter: the clutter components, with distinct ids.
    :type clutter: list(ClutterSpec)
    :param num_scans: the number of scans.
    :type num_scans: int
    :param period: the sampling period T in seconds.
    :type period: float
    :raises IllegalArgumentException: raises the exception if parameters are
        not valid.
    """

    def __init__(self, name, targets, clutter, num_scans=NUM_SCANS,
                 period=PERIOD):
        CheckValue.check_str(name, 'name')
        CheckValue.check_list(targets, 'targets')
        CheckValue.check_list(clutter, 'clutter')
        CheckValue.check_int_gt_zero(num_scans, 'num_scans')
        CheckValue.check_float_gt_zero(period, 'period')
        for target in targets:
            if not isinstance(target, TargetSpec):
                raise IllegalArgumentException(
                    'targets must contain TargetSpec instances.')
        for component in clutter:
            if not isinstance(component, ClutterSpec):
                raise IllegalArgumentException(
                    'clutter must contain ClutterSpec instances.')
        target_ids = [target.get_target_id() for target in targets]
        comp_ids = [component.get_comp_id() for component in clutter]
        if (len(set(target_ids)) != len(target_ids) or
                len(set(comp_ids)) != len(comp_ids)):
            raise IllegalArgumentException(
                'Target and clutter ids must be distinct.')
        self._name = name
        self._targets = list(targets)
        self._clutter = list(clutter)
        self._num_scans = num_scans
        self._period = float(period)

    def __repr__(self):
        return ('Scenario(' + self._name + ', targets=' +
                str(len(self._targets)) + ', clutter=' +
                str(len(self._clutter)) + ', scans=' +
                str(self._num_scans) + ')')

    def get_clutter(self):
        return self._clutter

    def get_name(self):
        return self._name

    def get_num_scans(self):
        return self._num_scans

    def get_period(self):
        return self._period

    def get_targets(self):
        return self._targets

    def time_of(self, scan):
        return (scan - 1) * self._period

    def to_dict(self):
        return {'name': self._name,
                'scans': self._num_scans,
                'period': self._period,
                'targets': [target.to_dict() for target in self._targets],
                'clutter': [c.to_dict() for c in self._clutter]}

    @staticmethod
    def from_dict(record):
        """
        Builds a scenario from its JSON form, the form :py:meth:`to_dict`
        writes.

        :param record: the decoded scenario object.
        :type record: dict
        :returns: the scenario.
        :rtype: Scenario
        :raises ConfigException: raises the exception if the object is
            malformed.
        """
        _check_record(record, 'scenario', ('targets', 'clutter'),
                      ('name', 'scans', 'period'))
        try:
            if not isinstance(record['targets'], list) or not isinstance(
                    record['clutter'], list):
                raise ConfigException(
                    'scenario targets and clutter must be lists.')
            return Scenario(
                record.get('name', 'custom'),
                [TargetSpec.from_dict(item) for item in record['targets']],
                [ClutterSpec.from_dict(item) for item in record['clutter']],
                record.get('scans', NUM_SCANS),
                record.get('period', PERIOD))
        except IllegalArgumentException as e:
            raise ConfigException('Invalid scenario: ' + str(e), e)


def _check_lifetime(lifetime):
    CheckValue.check_list(lifetime, 'lifetime')
    if len(lifetime) != 2:
        raise IllegalArgumentException(
            'lifetime must be [start, end]. Got:' + str(lifetime))
    CheckValue.check_int_gt_zero(lifetime[0], 'lifetime start')
    CheckValue.check_int(lifetime[1], 'lifetime end')
    if lifetime[0] >= lifetime[1]:
        raise IllegalArgumentException(
            'lifetime start must precede its end. Got:' + str(lifetime))


def _check_record(record, name, required, optional=()):
    if not isinstance(record, dict):
        raise ConfigException(name + ' must be an object.')
    missing = [key for key in required if key not in record]
    if missing:
        raise ConfigException(name + ' is missing ' + ', '.join(missing))
    unknown = set(record) - set(required) - set(optional)
    if unknown:
        raise ConfigException(
            'Unknown keys in ' + name + ': ' + ', '.join(sorted(unknown)))


def published_targets():
    """
    The five targets of the published experiments. Targets 1 and 2 close on
    each other and fly in parallel 20 m apart from 85.9375 s on; Targets 3,
    4 and 5 converge on y = 18000 m.
    """
    parallel = dict(maneuver_time=PARALLEL_TIME,
                    maneuver_velocity=PARALLEL_VELOCITY)
    lifetime = (1, NUM_SCANS)
    return [
        TargetSpec(1, [10000, 40, 13465, -40], lifetime, 10.0 / 3,
                   **parallel),
        TargetSpec(2, [10000, 40, 6570, 40], lifetime, 50.0 / 3, **parallel),
        TargetSpec(3, [28000, 40, 20543, -12], lifetime, 10.0 / 3),
        TargetSpec(4, [28000, 40, 18000, 0], lifetime, 50.0 / 3),
        TargetSpec(5, [28000, 40, 15458, 12], lifetime, 10.0 / 3)]


def published_clutter(variation=TimeVariation.CONSTANT):
    """
    The uniform background and the three Gaussian clutter components of the
    published experiments.

    :param variation: the time variation of the Gaussian components.
    :type variation: str
    :returns: the components, uniform first.
    :rtype: list(ClutterSpec)
    """
    shape = diag([1.0, 3.0]) ** 2
    return [
        ClutterSpec(0, ClutterType.UNIFORM, 30, (1, NUM_SCANS), 1.0),
        ClutterSpec(1, ClutterType.GAUSSIAN, 20, (130, 170), 20.0 / 3,
                    [20.0, 30.0], shape, variation),
        ClutterSpec(2, ClutterType.GAUSSIAN, 20, (227, 280), 10.0,
                    [27.0, 23.0], shape, variation),
        ClutterSpec(3, ClutterType.GAUSSIAN, 30, (172, 225), 20.0 / 3,
                    [41.0, 27.0], shape, variation)]


def build_scenario(scenario):
    """
    Builds a published scenario or a custom one.

    Scenario 1 holds Targets 1 and 2 in uniform clutter. Scenario 2 holds all
    five targets and the Gaussian components with constant rates and shapes.
    Scenario 3 is Scenario 2 with the rates and shapes of the Gaussian
    components varying sinusoidally over their lifetimes.

    :param scenario: 1, 2, 3 or a scenario object.
    :type scenario: int or dict
    :returns: the scenario.
    :rtype: Scenario
    :raises ConfigException: raises the exception if the reference is unknown
        or the object is malformed.
    """
    if isinstance(scenario, dict):
        return Scenario.from_dict(scenario)
    if scenario == 1 and CheckValue.is_int(scenario):
        return Scenario('scenario-1', published_targets()[:2],
                        published_clutter()[:1])
    if scenario == 2 and CheckValue.is_int(scenario):
        return Scenario('scenario-2', published_targets(),
                        published_clutter())
    if scenario == 3 and CheckValue.is_int(scenario):
        return Scenario('scenario-3', published_targets(),
                        published_clutter(TimeVariation.SINUSOIDAL))
    raise ConfigException(
        'scenario must be 1, 2, 3 or an object. Got:' + str(scenario))


def truth_trajectories(scenario):
    """
    Returns the state of every target at every scan of its lifetime that lies
    within the scenario.

    :param scenario: the scenario.
    :type scenario: Scenario
    :returns: target id mapped to (scans, states), an (N,) int array and an
        (N, 4) array.
    :rtype: dict
    """
    trajectories = {}
    for target in scenario.get_targets():
        start, end = target.get_lifetime()
        scans = list(range(start, min(end, scenario.get_num_scans()) + 1))
        states = zeros((len(scans), 4))
        for row, scan in enumerate(scans):
            states[row] = target.state_at(scan, scenario.get_period())
        trajectories[target.get_target_id()] = (array(scans, dtype=int),
                                                states)
    return trajectories


def scan_truths(scenario):
    """
    Returns the truth of every scan 1..N: the targets alive and the clutter
    components active with their rates and shapes at the scan.

    :param scenario: the scenario.
    :type scenario: Scenario
    :returns: the truths in scan order.
    :rtype: list(ScanTruth)
    """
    period = scenario.get_period()
    truths = []
    for scan in range(1, scenario.get_num_scans() + 1):
        targets = [TargetTruth(t.get_target_id(), t.state_at(scan, period),
                               t.get_snr())
                   for t in scenario.get_targets() if t.is_alive(scan)]
        clutter = [c.truth_at(scan) for c in scenario.get_clutter()
                   if c.is_alive(scan)]
        truths.append(ScanTruth(scan, scenario.time_of(scan), targets,
                                clutter))
    return truths


def simulate(scenario, sensor, rng):
    """
    Simulates the frames of a scenario. The truths come back with their
    frames attached so that they know the origin of every measurement.

    :param scenario: the scenario.
    :type scenario: Scenario
    :param sensor: the sensor.
    :type sensor: SensorModel
    :param rng: the random stream; the only source of randomness.
    :type rng: numpy.random.Generator
    :returns: the frames and the truths, in scan order.
    :rtype: tuple(list(MeasurementFrame), list(ScanTruth))
    """
    truths = scan_truths(scenario)
    frames = []
    for truth in truths:
        frame = generate_frame(truth, sensor, rng)
        truth.attach(frame)
        frames.append(frame)
    return frames, truths
