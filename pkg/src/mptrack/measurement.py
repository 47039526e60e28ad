#
# Copyright (C) 2020 The mptrack authors. All rights reserved.
#
# Licensed under the Universal Permissive License v 1.0 as shown at https://oss.oracle.com/licenses/upl
#
# Please see LICENSE.txt file included in the top-level directory of the
# appropriate download for a copy of the license and additional information.
#

from math import atan2, degrees, factorial, hypot, log, pi

from filterpy.kalman import MerweScaledSigmaPoints, unscented_transform
from numpy import (
    array, asarray, atleast_2d, diag, einsum, full, isfinite, log as np_log,
    where, zeros)
from numpy.linalg import slogdet, solve
from scipy.special import gammaln

from .common import CheckValue
from .distributions import (
    SwerlingModel, detection_probability, gw_expectations, ig_moments,
    sample_strength)
from .exception import DataFormatException, IllegalArgumentException

# Unscented transform parameters used for every linearization of the
# measurement function and by the UKF.
UKF_ALPHA = 1e-3
UKF_BETA = 2.0
UKF_KAPPA = 0.0


def wrap_degrees(angle):
    """
    Wraps angles in degrees to (-180, 180].

    :param angle: the angle, scalar or array.
    :type angle: float or ndarray
    :returns: the wrapped angle.
    :rtype: float or ndarray
    """
    wrapped = (asarray(angle, dtype=float) + 180.0) % 360.0 - 180.0
    wrapped = where(wrapped == -180.0, 180.0, wrapped)
    return float(wrapped) if wrapped.ndim == 0 else wrapped


def measurement_residual(a, b):
    """
    Returns a - b for measurement vectors with the azimuth difference wrapped.
    """
    diff = asarray(a, dtype=float) - asarray(b, dtype=float)
    diff[..., 1] = wrap_degrees(diff[..., 1])
    return diff


def measurement_mean(sigmas, weights):
    """
    Weighted mean of measurement vectors, averaging azimuths as wrapped
    offsets from the first vector so that sets straddling ±180° average
    correctly.
    """
    sigmas = atleast_2d(asarray(sigmas, dtype=float))
    reference = sigmas[0, 1]
    mean = zeros(2)
    mean[0] = weights.dot(sigmas[:, 0])
    mean[1] = wrap_degrees(
        reference + weights.dot(wrap_degrees(sigmas[:, 1] - reference)))
    return mean


def observe(state):
    """
    The measurement function: range in km and azimuth in degrees of the
    position of a kinematic state (x, ẋ, y, ẏ) given in m.

    :param state: the kinematic state.
    :type state: array_like
    :returns: the measurement (range km, azimuth deg).
    :rtype: ndarray
    :raises IllegalArgumentException: raises the exception if the position is
        at the sensor origin.
    """
    x, y = float(state[0]), float(state[2])
    rho = hypot(x, y)
    if rho == 0:
        raise IllegalArgumentException(
            'observe is undefined at the sensor origin.')
    return array([rho / 1000.0, wrap_degrees(degrees(atan2(y, x)))])


def observe_jacobian(state):
    """
    Returns the 2x4 Jacobian of :py:func:`observe`.

    :param state: the kinematic state.
    :type state: array_like
    :returns: the Jacobian.
    :rtype: ndarray
    :raises IllegalArgumentException: raises the exception if the position is
        at the sensor origin.
    """
    x, y = float(state[0]), float(state[2])
    rho2 = x * x + y * y
    if rho2 == 0:
        raise IllegalArgumentException(
            'observe is undefined at the sensor origin.')
    rho = rho2 ** 0.5
    scale = 180.0 / pi
    return array([[x / (1000.0 * rho), 0.0, y / (1000.0 * rho), 0.0],
                  [-y / rho2 * scale, 0.0, x / rho2 * scale, 0.0]])


def sigma_points(dim):
    return MerweScaledSigmaPoints(
        dim, alpha=UKF_ALPHA, beta=UKF_BETA, kappa=UKF_KAPPA)


class SensorModel(object):
    """
    The sensor: polar measurement noise, the surveillance region and the
    strength model.

    The range noise is given in meters while measurements carry ranges in km;
    :py:meth:`get_noise_covariance` returns R in measurement units (km², deg²).

    :param range_sigma: the range noise standard deviation in m.
    :type range_sigma: float
    :param azimuth_sigma: the azimuth noise standard deviation in degrees.
    :type azimuth_sigma: float
    :param swerling: the strength model.
    :type swerling: SwerlingModel
    :param region: (range_min km, range_max km, azimuth_min deg,
        azimuth_max deg), the surveillance region the uniform clutter covers.
    :type region: tuple
    :raises IllegalArgumentException: raises the exception if a noise level is
        not positive or the region is empty.
    """

    def __init__(self, range_sigma=20.0, azimuth_sigma=0.6, swerling=None,
                 region=(10.0, 50.0, 0.0, 60.0)):
        CheckValue.check_float_gt_zero(range_sigma, 'range_sigma')
        CheckValue.check_float_gt_zero(azimuth_sigma, 'azimuth_sigma')
        if swerling is None:
            swerling = SwerlingModel()
        if not isinstance(swerling, SwerlingModel):
            raise IllegalArgumentException(
                'swerling must be an instance of SwerlingModel.')
        CheckValue.check_list(region, 'region')
        if len(region) != 4:
            raise IllegalArgumentException(
                'region must be (range_min, range_max, azimuth_min, ' +
                'azimuth_max). Got:' + str(region))
        for value in region:
            CheckValue.check_float(value, 'region')
        if not (0 <= region[0] < region[1] and region[2] < region[3] and
                region[3] - region[2] <= 360):
            raise IllegalArgumentException(
                'region must be a non-empty range-azimuth box. Got:' +
                str(region))
        self._range_sigma = float(range_sigma)
        self._azimuth_sigma = float(azimuth_sigma)
        self._swerling = swerling
        self._region = tuple(float(value) for value in region)

    def __repr__(self):
        return ('SensorModel(range_sigma=' + str(self._range_sigma) +
                ', azimuth_sigma=' + str(self._azimuth_sigma) +
                ', swerling=' + repr(self._swerling) + ', region=' +
                str(self._region) + ')')

    def get_azimuth_sigma(self):
        return self._azimuth_sigma

    def get_noise_covariance(self):
        """
        Returns R = diag(σ_r², σ_ξ²) in (km², deg²).

        :returns: the 2x2 measurement noise covariance.
        :rtype: ndarray
        """
        return diag([(self._range_sigma / 1000.0) ** 2,
                     self._azimuth_sigma ** 2])

    def get_range_sigma(self):
        return self._range_sigma

    def get_region(self):
        return self._region

    def get_swerling(self):
        return self._swerling

    def get_volume(self):
        """
        Returns V_G, the area of the surveillance region in km·deg.
        """
        return ((self._region[1] - self._region[0]) *
                (self._region[3] - self._region[2]))


class Measurement(object):
    """
    A single detection.

    :param range_km: the range r in km, not negative.
    :type range_km: float
    :param azimuth_deg: the azimuth in degrees.
    :type azimuth_deg: float
    :param strength: the strength ratio m, positive.
    :type strength: float
    :param scan: the scan index k.
    :type scan: int
    :raises IllegalArgumentException: raises the exception if a field is out
        of range.
    """

    def __init__(self, range_km, azimuth_deg, strength, scan):
        CheckValue.check_float_ge_zero(range_km, 'range_km')
        CheckValue.check_float(azimuth_deg, 'azimuth_deg')
        CheckValue.check_float_gt_zero(strength, 'strength')
        CheckValue.check_int(scan, 'scan')
        self._range = float(range_km)
        self._azimuth = float(azimuth_deg)
        self._strength = float(strength)
        self._scan = int(scan)

    def __repr__(self):
        return ('Measurement(r=' + str(self._range) + ', az=' +
                str(self._azimuth) + ', m=' + str(self._strength) +
                ', scan=' + str(self._scan) + ')')

    def get_azimuth(self):
        return self._azimuth

    def get_position(self):
        return array([self._range, self._azimuth])

    def get_range(self):
        return self._range

    def get_scan(self):
        return self._scan

    def get_strength(self):
        return self._strength


class MeasurementFrame(object):
    """
    The detections of one scan. Frames produced by the simulator also carry
    the origin of each measurement: ('target', target_id) or
    ('clutter', comp_id).

    :param scan: the scan index k.
    :type scan: int
    :param time: the scan time in seconds.
    :type time: float
    :param measurements: the detections, all of this scan.
    :type measurements: list(Measurement)
    :param origins: the origin of each measurement or None.
    :type origins: list(tuple)
    :raises IllegalArgumentException: raises the exception if a measurement
        belongs to another scan or the origins do not match.
    """

    def __init__(self, scan, time, measurements, origins=None):
        CheckValue.check_int(scan, 'scan')
        CheckValue.check_float_ge_zero(time, 'time')
        CheckValue.check_list(measurements, 'measurements')
        for measurement in measurements:
            if not isinstance(measurement, Measurement):
                raise IllegalArgumentException(
                    'measurements must contain Measurement instances.')
            if measurement.get_scan() != scan:
                raise IllegalArgumentException(
                    'Measurement of scan ' + str(measurement.get_scan()) +
                    ' in frame of scan ' + str(scan))
        if origins is not None and len(origins) != len(measurements):
            raise IllegalArgumentException(
                'origins must have one entry per measurement.')
        self._scan = int(scan)
        self._time = float(time)
        self._measurements = list(measurements)
        self._origins = None if origins is None else list(origins)
        self._positions = array(
            [m.get_position() for m in self._measurements]).reshape(-1, 2)
        self._strengths = array(
            [m.get_strength() for m in self._measurements])

    def __len__(self):
        return len(self._measurements)

    def get_measurements(self):
        return self._measurements

    def get_origins(self):
        return self._origins

    def get_positions(self):
        """
        Returns the measurement positions as an (M, 2) array of
        (range km, azimuth deg).
        """
        return self._positions

    def get_scan(self):
        return self._scan

    def get_strengths(self):
        return self._strengths

    def get_time(self):
        return self._time

    def to_dict(self):
        return {'scan': self._scan,
                'time': self._time,
                'r_km': self._positions[:, 0].tolist(),
                'az_deg': self._positions[:, 1].tolist(),
                'strength': self._strengths.tolist()}

    @staticmethod
    def from_dict(record):
        """
        Builds a frame from a JSON-lines record.

        :param record: the decoded record.
        :type record: dict
        :returns: the frame.
        :rtype: MeasurementFrame
        :raises DataFormatException: raises the exception if the record does
            not match the frame schema.
        """
        if not isinstance(record, dict):
            raise DataFormatException('Frame record must be an object.')
        missing = [key for key in ('scan', 'r_km', 'az_deg', 'strength')
                   if key not in record]
        if missing:
            raise DataFormatException(
                'Frame record is missing ' + ', '.join(missing))
        unknown = set(record) - {'scan', 'time', 'r_km', 'az_deg', 'strength'}
        if unknown:
            raise DataFormatException(
                'Frame record has unknown keys ' + ', '.join(sorted(unknown)))
        ranges, azimuths, strengths = (
            record['r_km'], record['az_deg'], record['strength'])
        if not (isinstance(ranges, list) and isinstance(azimuths, list) and
                isinstance(strengths, list) and
                len(ranges) == len(azimuths) == len(strengths)):
            raise DataFormatException(
                'Frame record r_km, az_deg and strength must be lists of ' +
                'equal length.')
        try:
            scan = record['scan']
            measurements = [Measurement(r, az, m, scan) for r, az, m in
                            zip(ranges, azimuths, strengths)]
            return MeasurementFrame(
                scan, record.get('time', 0.0), measurements)
        except IllegalArgumentException as e:
            raise DataFormatException('Invalid frame record: ' + str(e), e)


class TargetTruth(object):
    """
    A target present at a scan: its id, kinematic state and mean SNR.
    """

    def __init__(self, target_id, state, snr):
        CheckValue.check_int(target_id, 'target_id')
        self._target_id = int(target_id)
        self._state = CheckValue.check_vector(state, 'state', 4)
        CheckValue.check_float_gt_zero(snr, 'snr')
        self._snr = float(snr)

    def get_snr(self):
        return self._snr

    def get_state(self):
        return self._state

    def get_target_id(self):
        return self._target_id


class ClutterTruth(object):
    """
    A clutter component active at a scan: the mean number of points, the
    spatial parameters in measurement space (None for the uniform
    component) and the mean CNR.
    """

    def __init__(self, comp_id, rate, cnr, mean=None, covariance=None):
        CheckValue.check_int_ge_zero(comp_id, 'comp_id')
        CheckValue.check_float_ge_zero(rate, 'rate')
        CheckValue.check_float_gt_zero(cnr, 'cnr')
        if (mean is None) != (covariance is None):
            raise IllegalArgumentException(
                'mean and covariance must be given together.')
        self._comp_id = int(comp_id)
        self._rate = float(rate)
        self._cnr = float(cnr)
        self._mean = (None if mean is None else
                      CheckValue.check_vector(mean, 'mean', 2))
        self._covariance = (None if covariance is None else
                            CheckValue.check_spd(covariance, 'covariance'))

    def get_cnr(self):
        return self._cnr

    def get_comp_id(self):
        return self._comp_id

    def get_covariance(self):
        return self._covariance

    def get_mean(self):
        return self._mean

    def get_rate(self):
        return self._rate

    def is_uniform(self):
        return self._mean is None


class ScanTruth(object):
    """
    The ground truth of one scan: present targets and active clutter
    components. Once the frame of the scan is attached the truth also knows
    which measurement each target generated and how many points each clutter
    component produced.
    """

    def __init__(self, scan, time, targets, clutter):
        CheckValue.check_int(scan, 'scan')
        self._scan = int(scan)
        self._time = float(time)
        self._targets = list(targets)
        self._clutter = list(clutter)
        self._detections = {}
        self._counts = {}

    def attach(self, frame):
        """
        Records the measurement origins of the frame of this scan.

        :param frame: the simulated frame, with origins.
        :type frame: MeasurementFrame
        :returns: self.
        :raises IllegalArgumentException: raises the exception if the frame
            belongs to another scan or carries no origins.
        """
        if frame.get_scan() != self._scan:
            raise IllegalArgumentException(
                'Frame of scan ' + str(frame.get_scan()) +
                ' attached to truth of scan ' + str(self._scan))
        origins = frame.get_origins()
        if origins is None:
            raise IllegalArgumentException('frame must carry origins.')
        self._detections = {}
        self._counts = dict((c.get_comp_id(), 0) for c in self._clutter)
        for index, (kind, source) in enumerate(origins):
            if kind == 'target':
                self._detections[source] = index
            else:
                self._counts[source] = self._counts.get(source, 0) + 1
        return self

    def get_clutter(self):
        return self._clutter

    def get_count(self, comp_id):
        return self._counts.get(comp_id, 0)

    def get_detection(self, target_id):
        """
        Returns the index of the measurement the target generated at this
        scan, None if it was not detected.
        """
        return self._detections.get(target_id)

    def get_scan(self):
        return self._scan

    def get_targets(self):
        return self._targets

    def get_time(self):
        return self._time

    def to_dict(self):
        targets = []
        for target in self._targets:
            state = target.get_state()
            targets.append({
                'target_id': target.get_target_id(),
                'x_m': float(state[0]), 'vx_mps': float(state[1]),
                'y_m': float(state[2]), 'vy_mps': float(state[3]),
                'snr': target.get_snr(),
                'measurement': self._detections.get(target.get_target_id())})
        clutter = []
        for component in self._clutter:
            uniform = component.is_uniform()
            clutter.append({
                'comp_id': component.get_comp_id(),
                'rate': component.get_rate(),
                'cnr': component.get_cnr(),
                'mean': None if uniform else component.get_mean().tolist(),
                'covariance': (None if uniform else
                               component.get_covariance().tolist()),
                'count': self._counts.get(component.get_comp_id(), 0)})
        return {'scan': self._scan, 'time': self._time, 'targets': targets,
                'clutter': clutter}

    @staticmethod
    def from_dict(record):
        """
        Builds a scan truth from a JSON-lines record.

        :param record: the decoded record.
        :type record: dict
        :returns: the truth.
        :rtype: ScanTruth
        :raises DataFormatException: raises the exception if the record does
            not match the truth schema.
        """
        if not isinstance(record, dict) or set(record) != {
                'scan', 'time', 'targets', 'clutter'}:
            raise DataFormatException(
                'Truth record must hold exactly scan, time, targets and ' +
                'clutter.')
        try:
            targets = []
            detections = {}
            for item in record['targets']:
                target = TargetTruth(
                    item['target_id'],
                    [item['x_m'], item['vx_mps'], item['y_m'],
                     item['vy_mps']], item['snr'])
                targets.append(target)
                if item['measurement'] is not None:
                    detections[target.get_target_id()] = int(
                        item['measurement'])
            clutter = []
            counts = {}
            for item in record['clutter']:
                component = ClutterTruth(
                    item['comp_id'], item['rate'], item['cnr'],
                    item['mean'], item['covariance'])
                clutter.append(component)
                counts[component.get_comp_id()] = int(item['count'])
            truth = ScanTruth(record['scan'], record['time'], targets,
                              clutter)
        except (IllegalArgumentException, KeyError, TypeError,
                ValueError) as e:
            raise DataFormatException('Invalid truth record: ' + str(e), e)
        truth._detections = detections
        truth._counts = counts
        return truth


def generate_frame(truth, sensor, rng):
    """
    Simulates the detections of one scan. Each present target is detected
    with the closed-form detection probability at its SNR; its position is
    observed with Gaussian noise R and its strength drawn from the
    thresholded density. Each clutter component contributes a Poisson number
    of points, uniform over the surveillance region or Gaussian in
    measurement space, with strengths drawn at its CNR. The frame order is
    randomized.

    :param truth: the scan truth.
    :type truth: ScanTruth
    :param sensor: the sensor.
    :type sensor: SensorModel
    :param rng: the random stream.
    :type rng: numpy.random.Generator
    :returns: the frame, with origins.
    :rtype: MeasurementFrame
    """
    swerling = sensor.get_swerling()
    noise = sensor.get_noise_covariance()
    r_min, r_max, az_min, az_max = sensor.get_region()
    positions = []
    strengths = []
    origins = []
    for target in truth.get_targets():
        if rng.random() >= detection_probability(target.get_snr(), swerling):
            continue
        position = observe(target.get_state()) + rng.multivariate_normal(
            zeros(2), noise)
        positions.append(position)
        strengths.append(sample_strength(target.get_snr(), swerling, rng))
        origins.append(('target', target.get_target_id()))
    for component in truth.get_clutter():
        count = int(rng.poisson(component.get_rate()))
        if count == 0:
            continue
        if component.is_uniform():
            points = zeros((count, 2))
            points[:, 0] = rng.uniform(r_min, r_max, count)
            points[:, 1] = rng.uniform(az_min, az_max, count)
        else:
            points = rng.multivariate_normal(
                component.get_mean(), component.get_covariance(), count)
        positions.extend(points)
        strengths.extend(
            sample_strength(component.get_cnr(), swerling, rng, count))
        origins.extend([('clutter', component.get_comp_id())] * count)
    order = rng.permutation(len(positions))
    scan = truth.get_scan()
    measurements = []
    for index in order:
        position = positions[index]
        measurements.append(Measurement(
            abs(float(position[0])), wrap_degrees(position[1]),
            float(strengths[index]), scan))
    return MeasurementFrame(scan, truth.get_time(), measurements,
                            [origins[index] for index in order])


class LinearizedObservation(object):
    """
    The unscented statistical linearization of the measurement function
    about a Gaussian belief: the predicted measurement ẑ, the pseudo
    measurement matrix H = Pxzᵀ P⁻¹ and the projected covariance H P Hᵀ.
    """

    def __init__(self, predicted, matrix, projected, cross):
        self._predicted = predicted
        self._matrix = matrix
        self._projected = projected
        self._cross = cross

    def get_cross_covariance(self):
        return self._cross

    def get_matrix(self):
        return self._matrix

    def get_predicted(self):
        return self._predicted

    def get_projected_covariance(self):
        return self._projected


def linearize(belief, hx=None, residual_fn=None, mean_fn=None):
    """
    Linearizes the measurement function about a belief with the unscented
    transform.

    :param belief: the kinematic belief.
    :type belief: GaussianBelief
    :param hx: the measurement function, :py:func:`observe` by default.
    :type hx: callable
    :param residual_fn: the measurement residual, wrapped by default.
    :type residual_fn: callable
    :param mean_fn: the measurement mean, circular by default.
    :type mean_fn: callable
    :returns: the linearization.
    :rtype: LinearizedObservation
    """
    hx = observe if hx is None else hx
    residual_fn = measurement_residual if residual_fn is None else residual_fn
    mean_fn = measurement_mean if mean_fn is None else mean_fn
    mean = belief.get_mean()
    covariance = belief.get_covariance()
    points = sigma_points(belief.get_dimension())
    sigmas = points.sigma_points(mean, covariance)
    sigmas_h = array([hx(s) for s in sigmas])
    predicted, _ = unscented_transform(
        sigmas_h, points.Wm, points.Wc, mean_fn=mean_fn,
        residual_fn=residual_fn)
    dz = array([residual_fn(s, predicted) for s in sigmas_h])
    dx = sigmas - mean
    cross = einsum('i,ij,ik->jk', points.Wc, dx, dz)
    matrix = solve(covariance, cross).T
    projected = matrix.dot(covariance).dot(matrix.T)
    projected = 0.5 * (projected + projected.T)
    return LinearizedObservation(predicted, matrix, projected, cross)


def expected_log_target_spatial(belief, y, sensor, linearization=None,
                                normalized=False):
    """
    Returns E[ln p(y | x)] under a kinematic belief, using the statistical
    linearization of the measurement function:
    -½·Tr(R⁻¹(H P Hᵀ + (ẑ - y)(ẑ - y)ᵀ)). With normalized set the Gaussian
    normalizer -ln 2π - ½·ln|R| is included.

    :param belief: the kinematic belief.
    :type belief: GaussianBelief
    :param y: one measurement position or an (M, 2) array of them.
    :type y: array_like
    :param sensor: the sensor.
    :type sensor: SensorModel
    :param linearization: a precomputed linearization of belief.
    :type linearization: LinearizedObservation
    :param normalized: include the normalizer.
    :type normalized: bool
    :returns: the expectation, one per measurement for an array input.
    :rtype: float or ndarray
    """
    if linearization is None:
        linearization = linearize(belief)
    y = asarray(y, dtype=float)
    single = y.ndim == 1
    ys = atleast_2d(y)
    noise = sensor.get_noise_covariance()
    precision = diag(1.0 / diag(noise))
    diff = measurement_residual(linearization.get_predicted(), ys)
    quad = einsum('ij,jk,ik->i', diff, precision, diff)
    result = -0.5 * ((precision * linearization.get_projected_covariance())
                     .sum() + quad)
    if normalized:
        result = result - log(2 * pi) - 0.5 * slogdet(noise)[1]
    return float(result[0]) if single else result


def expected_log_strength(belief, m, model, normalized=False):
    """
    Returns E[ln p(m; σ)] under an Inverse-Gamma belief over the mean power,
    in the closed form (2n - 1)·ln m - n·m²·α/β + n/(2(α - 2)) obtained from a
    second-order expansion of the log power.

    The closed form drops every term that does not depend on m. With
    normalized set those terms are restored: the constant of the density,
    the log mean power and the log of the truncation mass evaluated at the
    mean inverse power. Comparisons between sources with different beliefs
    need the normalized form.

    :param belief: the belief, shape above 2.
    :type belief: InverseGammaBelief
    :param m: the strength, scalar or array, above the threshold.
    :type m: float or ndarray
    :param model: the strength model.
    :type model: SwerlingModel
    :param normalized: include the terms that depend on the belief only.
    :type normalized: bool
    :returns: the expectation.
    :rtype: float or ndarray
    :raises IllegalArgumentException: raises the exception if the shape is
        not above 2 or m is not above the threshold.
    """
    inv_mean, mean, _ = ig_moments(belief)
    m = asarray(m, dtype=float)
    if not isfinite(m).all() or (m <= model.get_threshold()).any():
        raise IllegalArgumentException(
            'strength must exceed the threshold ' +
            str(model.get_threshold()) + '. Got:' + str(m.tolist()))
    n = model.get_order()
    alpha = belief.get_shape()
    result = ((2 * n - 1) * np_log(m) - n * m * m * inv_mean +
              n / (2.0 * (alpha - 2.0)))
    if normalized:
        x = n * model.get_threshold() ** 2 * inv_mean
        tail = sum(x ** k / factorial(k) for k in range(n))
        result = result + (log(2.0) + n * log(n) - gammaln(n) -
                           n * log(mean) + x - log(tail))
    return float(result) if result.ndim == 0 else result


def expected_log_clutter_spatial(belief, y, sensor):
    """
    Returns E[ln f_τ(y)] for a clutter component. The uniform component
    (belief None) gives ln(1/V_G). A nonuniform component with a
    Gaussian-Wishart belief gives -ln 2π + ½·E[ln|D|] - ½·E[(y - x)ᵀD(y - x)],
    with the azimuth displacement wrapped.

    :param belief: the spatial belief, None for the uniform component.
    :type belief: GaussianWishartBelief
    :param y: one measurement position or an (M, 2) array of them.
    :type y: array_like
    :param sensor: the sensor.
    :type sensor: SensorModel
    :returns: the expectation, one per measurement for an array input.
    :rtype: float or ndarray
    """
    y = asarray(y, dtype=float)
    single = y.ndim == 1
    ys = atleast_2d(y)
    if belief is None:
        result = full(ys.shape[0], -log(sensor.get_volume()))
    else:
        location = belief.get_location()
        terms = array([gw_expectations(belief, location + diff) for diff in
                       measurement_residual(ys, location)])
        result = (-0.5 * belief.get_dimension() * log(2 * pi) +
                  0.5 * terms[:, 0] - 0.5 * terms[:, 1])
    return float(result[0]) if single else result
