#
# Copyright (C) 2020 The mptrack authors. All rights reserved.
#
# Licensed under the Universal Permissive License v 1.0 as shown at https://oss.oracle.com/licenses/upl
#
# Please see LICENSE.txt file included in the top-level directory of the
# appropriate download for a copy of the license and additional information.
#

from .common import CheckValue, TrackStatus
from .distributions import GaussianWishartBelief
from .exception import DataFormatException, IllegalStateException
from .smoothers import WindowBeliefs


class TrackLifecycle(object):
    """
    The lifecycle of a track. A track starts tentative, is confirmed the
    first time its smoothed visibility reaches the confirmation threshold at
    a finalized scan and is deleted the first time it falls below the
    deletion threshold. Deletion is terminal.

    :param birth_scan: the scan the track was initialized at.
    :type birth_scan: int
    :param confirm_threshold: the confirmation threshold.
    :type confirm_threshold: float
    :param delete_threshold: the deletion threshold, not above the
        confirmation threshold.
    :type delete_threshold: float
    :raises IllegalArgumentException: raises the exception if a threshold is
        not a probability.
    """

    def __init__(self, birth_scan, confirm_threshold=0.75,
                 delete_threshold=0.5):
        CheckValue.check_int(birth_scan, 'birth_scan')
        CheckValue.check_probability(confirm_threshold, 'confirm_threshold')
        CheckValue.check_probability(delete_threshold, 'delete_threshold')
        self._birth_scan = birth_scan
        self._confirm = float(confirm_threshold)
        self._delete = float(delete_threshold)
        self._status = TrackStatus.TENTATIVE
        self._last_visibility = None
        self._last_scan = None
        self._confirmed_scan = None

    def get_birth_scan(self):
        return self._birth_scan

    def get_confirm_threshold(self):
        return self._confirm

    def get_delete_threshold(self):
        return self._delete

    def get_confirmed_scan(self):
        """
        Returns the scan the track was first confirmed at, None if it never
        was.
        """
        return self._confirmed_scan

    def get_last_visibility(self):
        return self._last_visibility

    def get_status(self):
        return self._status

    def is_deleted(self):
        return self._status == TrackStatus.DELETED

    def update(self, scan, visibility):
        """
        Applies the transition for the smoothed visibility of a finalized
        scan.

        :param scan: the finalized scan.
        :type scan: int
        :param visibility: the smoothed visible probability.
        :type visibility: float
        :returns: the status after the transition.
        :rtype: str
        """
        CheckValue.check_probability(visibility, 'visibility')
        if self._status == TrackStatus.DELETED:
            return self._status
        self._last_visibility = float(visibility)
        self._last_scan = scan
        if visibility < self._delete:
            self._status = TrackStatus.DELETED
        elif visibility >= self._confirm:
            if self._confirmed_scan is None:
                self._confirmed_scan = scan
            self._status = TrackStatus.CONFIRMED
        return self._status


class TargetTrack(object):
    """
    A target track: its lifecycle, the priors at the first scan of the
    current window and the per-scan beliefs over the window.

    :param track_id: the track identifier.
    :type track_id: int
    :param birth_scan: the scan the track starts at.
    :type birth_scan: int
    :param kinematics: the kinematic belief at the birth scan.
    :type kinematics: GaussianBelief
    :param snr: the mean-power belief.
    :type snr: InverseGammaBelief
    :param visibility: the visible probability.
    :type visibility: float
    :param lifecycle: the lifecycle.
    :type lifecycle: TrackLifecycle
    """

    def __init__(self, track_id, birth_scan, kinematics, snr, visibility,
                 lifecycle):
        CheckValue.check_int_gt_zero(track_id, 'track_id')
        self.track_id = track_id
        self.lifecycle = lifecycle
        self.beliefs = WindowBeliefs()
        self.birth_scan = birth_scan
        # The prior at the birth scan already holds that scan's detection.
        self.birth_pending = True
        self.estimated = False
        self.set_prior(birth_scan, kinematics, snr, visibility)

    def __repr__(self):
        return ('TargetTrack(id=' + str(self.track_id) + ', status=' +
                self.lifecycle.get_status() + ')')

    def first_scan(self, window_start):
        return max(window_start, self.prior_scan)

    def is_associated_at(self, scan, window_start):
        """
        Returns whether the track takes part in the association of a scan.
        """
        if scan < self.first_scan(window_start):
            return False
        return not (self.birth_pending and scan == self.prior_scan)

    def get_status(self):
        return self.lifecycle.get_status()

    def set_prior(self, scan, kinematics, snr, visibility):
        """
        Sets the beliefs the forward pass starts from at the given scan.
        """
        if self.lifecycle.is_deleted():
            raise IllegalStateException(
                'Track ' + str(self.track_id) + ' is deleted.')
        self.prior_scan = scan
        self.prior_kinematics = kinematics
        self.prior_snr = snr
        self.prior_visibility = float(visibility)


class ClutterComponent(object):
    """
    A clutter component: the uniform background (no spatial belief) or a
    nonuniform component with a Gaussian-Wishart spatial belief. Priors apply
    at the first scan of the current window.
    """

    def __init__(self, comp_id, birth_scan, spatial, cnr):
        CheckValue.check_int_ge_zero(comp_id, 'comp_id')
        self.comp_id = comp_id
        self.birth_scan = birth_scan
        self.beliefs = WindowBeliefs()
        self.estimated = False
        # Expected points per scan found by clustering.
        self.initial_count = 0.0
        self.set_prior(birth_scan, spatial, cnr)

    def __repr__(self):
        return ('ClutterComponent(id=' + str(self.comp_id) + ', uniform=' +
                str(self.is_uniform()) + ')')

    def is_uniform(self):
        return self.prior_spatial is None

    def set_prior(self, scan, spatial, cnr):
        self.prior_scan = scan
        self.prior_spatial = spatial
        self.prior_cnr = cnr


def _check_keys(record, keys, name):
    if not isinstance(record, dict):
        raise DataFormatException(name + ' record must be an object.')
    missing = [key for key in keys if key not in record]
    if missing:
        raise DataFormatException(
            name + ' record is missing ' + ', '.join(missing))
    unknown = set(record) - set(keys)
    if unknown:
        raise DataFormatException(
            name + ' record has unknown keys ' + ', '.join(sorted(unknown)))


class TrackEstimate(object):
    """
    The final estimate of one track at one scan.
    """
    KEYS = ('scan', 'track_id', 'x_m', 'vx_mps', 'y_m', 'vy_mps', 'snr_mean',
            'visibility', 'status', 'assoc')

    def __init__(self, scan, track_id, state, snr_mean, visibility, status,
                 assoc=None):
        self.scan = int(scan)
        self.track_id = int(track_id)
        self.state = [float(v) for v in state]
        self.snr_mean = float(snr_mean)
        self.visibility = float(visibility)
        self.status = status
        self.assoc = None if assoc is None else int(assoc)

    def get_position(self):
        return self.state[0], self.state[2]

    def to_dict(self):
        return {'scan': self.scan, 'track_id': self.track_id,
                'x_m': self.state[0], 'vx_mps': self.state[1],
                'y_m': self.state[2], 'vy_mps': self.state[3],
                'snr_mean': self.snr_mean, 'visibility': self.visibility,
                'status': self.status, 'assoc': self.assoc}

    @staticmethod
    def from_dict(record):
        _check_keys(record, TrackEstimate.KEYS, 'Track')
        try:
            return TrackEstimate(
                record['scan'], record['track_id'],
                [record['x_m'], record['vx_mps'], record['y_m'],
                 record['vy_mps']], record['snr_mean'],
                record['visibility'], record['status'], record['assoc'])
        except (TypeError, ValueError) as e:
            raise DataFormatException('Invalid track record: ' + str(e), e)


class ComponentEstimate(object):
    """
    The final estimate of one clutter component at one scan. The uniform
    component has no position, Wishart matrix or degrees of freedom.
    """
    KEYS = ('scan', 'comp_id', 'r_km', 'az_deg', 'W', 'dof', 'cnr_mean',
            'weight', 'count')

    def __init__(self, scan, comp_id, position, wishart, dof, cnr_mean,
                 weight, count):
        self.scan = int(scan)
        self.comp_id = int(comp_id)
        self.position = (None if position is None else
                         [float(v) for v in position])
        self.wishart = (None if wishart is None else
                        [[float(v) for v in row] for row in wishart])
        self.dof = None if dof is None else float(dof)
        self.cnr_mean = float(cnr_mean)
        self.weight = float(weight)
        self.count = float(count)

    def is_uniform(self):
        return self.position is None

    def to_belief(self):
        """
        Returns the spatial belief this estimate describes, None for the
        uniform component.
        """
        if self.position is None:
            return None
        return GaussianWishartBelief(self.position, 1.0, self.wishart,
                                     self.dof)

    def to_dict(self):
        return {'scan': self.scan, 'comp_id': self.comp_id,
                'r_km': None if self.position is None else self.position[0],
                'az_deg': None if self.position is None else self.position[1],
                'W': self.wishart, 'dof': self.dof,
                'cnr_mean': self.cnr_mean, 'weight': self.weight,
                'count': self.count}

    @staticmethod
    def from_dict(record):
        _check_keys(record, ComponentEstimate.KEYS, 'Component')
        position = None
        if record['r_km'] is not None:
            position = [record['r_km'], record['az_deg']]
        try:
            return ComponentEstimate(
                record['scan'], record['comp_id'], position, record['W'],
                record['dof'], record['cnr_mean'], record['weight'],
                record['count'])
        except (TypeError, ValueError) as e:
            raise DataFormatException(
                'Invalid component record: ' + str(e), e)
