"""Trotter error analysis and QPE costing for PPP nanographenes."""

import json
import os

# Tilings and reference values ship inside the wheel; an explicit
# TROTTERLAB_DATA still wins.
_data = os.path.join(os.path.dirname(__file__), "data")
if "TROTTERLAB_DATA" not in os.environ and os.path.isdir(_data):
    os.environ["TROTTERLAB_DATA"] = _data

from . import _trotterlab as _core
from ._trotterlab import (
    PauliSum,
    PppParams,
    build_system,
    commutator,
    effective_spectrum,
    extract_energy,
    frobenius_sampled,
    kinetic_constants,
    low_lying,
    multiply,
    nested_commutators,
    pearson,
    spectral_norm_bound,
    steps_fixed_error,
    steps_fixed_timestep,
    unwrap_energy,
)

__version__ = _core.__version__


def lattice(family, n, bond_length=1.4):
    return json.loads(_core.lattice_json(family, n, bond_length))


def cost(n_rotations, n_t, n_sites, **kw):
    return json.loads(_core.cost(n_rotations, n_t, n_sites, **kw))


def hamiltonian_json(system, include_terms=False):
    return json.loads(system.to_json(include_terms))
