from __future__ import absolute_import, division, print_function, unicode_literals

import env_tests.env as env_tests

import os
import copy

import numpy as np

from cmps_tomo.config import cfg as g_cfg
from cmps_tomo.modeling.correlators import nyquist_delta_tau, sample, spectral_data
from cmps_tomo.simulation.ensemble import random_cmps
from cmps_tomo.structures.cmps import CMPS
from cmps_tomo.structures.specs import EnsembleSpec


def get_config_root_path():
    return env_tests.get_config_root_path()


def load_config(rel_path):
    ''' Load config from file path specified as path relative to config_root '''
    cfg_path = os.path.join(env_tests.get_config_root_path(), rel_path)
    return load_config_from_file(cfg_path)


def load_config_from_file(file_path):
    ''' Load config from file path specified as absolute path '''
    ret = copy.deepcopy(g_cfg)
    ret.merge_from_file(file_path)
    return ret


def trials(reduced, full):
    return full if env_tests.full_tests() else reduced


def random_state(d, seed, sigma=0.5, eta=1.0, mode="refined"):
    return random_cmps(EnsembleSpec(d, mode, 0.0, sigma, eta, seed=seed))


def fixed_state():
    ''' A d=2 state with a well separated, generic transfer spectrum '''
    K = np.array([[0.0, 0.5 - 0.2j], [0.5 + 0.2j, 1.0]])
    R = np.array([[1.0, 0.4], [0.3j, -0.6 + 0.1j]])
    return CMPS.from_kr(K, R)


def sampled(state, n, N, fraction=0.5):
    ''' (SpectralData, CorrelationTensor) on a Nyquist respecting grid '''
    sd = spectral_data(state)
    dt = nyquist_delta_tau(sd.poles, fraction)
    return sd, sample(sd, n, N, dt)


def mirror_distance(a, b):
    ''' max |a - b| allowing for the complex-conjugate mirror of b '''
    a = np.asarray(a)
    b = np.asarray(b)
    return min(float(np.max(np.abs(a - b))), float(np.max(np.abs(a - b.conj()))))
