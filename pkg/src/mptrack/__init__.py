#
# Copyright (C) 2020 The mptrack authors. All rights reserved.
#
# Licensed under the Universal Permissive License v 1.0 as shown at https://oss.oracle.com/licenses/upl
#
# Please see LICENSE.txt file included in the top-level directory of the
# appropriate download for a copy of the license and additional information.
#


from .association import (
    AssociationBeliefs, BpState, ClutterSource, EvidenceMatrix, TargetSource,
    build_evidence, enumerate_exact, run_bp)
from .common import ClutterMode, ClutterType, TimeVariation, TrackStatus
from .config import InitConfig, RunConfig, TrackerConfig, WindowConfig
from .distributions import (
    DirichletBelief, GaussianBelief, GaussianWishartBelief,
    InverseGammaBelief, SwerlingModel)
from .dynamics import CvModel, ForgettingFactors, VisibilityChain
from .evaluation import (
    MetricsReport, car, evaluate_run, nft, ospa, rmse, rse, run_monte_carlo,
    run_single, tnnc, wasserstein_gaussian)
from .exception import (
    ConfigException, DataFormatException, IllegalArgumentException,
    IllegalStateException, MpTrackException, SamplerException,
    SizeLimitException)
from .measurement import (
    ClutterTruth, Measurement, MeasurementFrame, ScanTruth, SensorModel,
    TargetTruth)
from .scenarios import (
    ClutterSpec, Scenario, TargetSpec, build_scenario, simulate,
    truth_trajectories)
from .smoothers import WindowBeliefs
from .track import (
    ClutterComponent, ComponentEstimate, TargetTrack, TrackEstimate,
    TrackLifecycle)
from .tracker import Tracker, WindowState
from .version import __version__

__all__ = ['AssociationBeliefs',
           'BpState',
           'ClutterComponent',
           'ClutterMode',
           'ClutterSource',
           'ClutterSpec',
           'ClutterTruth',
           'ClutterType',
           'ComponentEstimate',
           'ConfigException',
           'CvModel',
           'DataFormatException',
           'DirichletBelief',
           'EvidenceMatrix',
           'ForgettingFactors',
           'GaussianBelief',
           'GaussianWishartBelief',
           'IllegalArgumentException',
           'IllegalStateException',
           'InitConfig',
           'InverseGammaBelief',
           'Measurement',
           'MeasurementFrame',
           'MetricsReport',
           'MpTrackException',
           'RunConfig',
           'SamplerException',
           'Scenario',
           'ScanTruth',
           'SensorModel',
           'SizeLimitException',
           'SwerlingModel',
           'TargetSource',
           'TargetSpec',
           'TargetTrack',
           'TargetTruth',
           'TimeVariation',
           'TrackEstimate',
           'TrackLifecycle',
           'TrackStatus',
           'Tracker',
           'TrackerConfig',
           'VisibilityChain',
           'WindowBeliefs',
           'WindowConfig',
           'WindowState',
           'build_evidence',
           'build_scenario',
           'car',
           'enumerate_exact',
           'evaluate_run',
           'nft',
           'ospa',
           'rmse',
           'rse',
           'run_bp',
           'run_monte_carlo',
           'run_single',
           'simulate',
           'tnnc',
           'truth_trajectories',
           'wasserstein_gaussian']
