"""Covariance-matrix entanglement criteria (Python bindings)."""

import json as _json

from ._covsep import *  # noqa: F401,F403
from ._covsep import analyze as _analyze

__version__ = "0.1.0"


def analyze(rho, criteria="all"):
    """Run criteria on a DensityMatrix and return the report as a dict."""
    return _json.loads(_analyze(rho, criteria))
