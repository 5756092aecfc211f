"""Python bindings for the latent ARX toolkit."""

import json

import numpy as np

from . import _pylarx
from ._pylarx import Error, load_csv, oos_r2, run_property_suite

__all__ = ["Error", "cli", "fit", "fit_lvmr", "load_csv", "oos_r2", "run_property_suite"]


def fit(values, names, config, dates=None):
    """Fit the model described by a config dict to the columns of ``values``.

    ``dates`` defaults to consecutive quarter ends from 1990-03-31.
    """
    values = np.asarray(values, dtype=float)
    return _pylarx.fit(values, list(names), json.dumps(config), list(dates or []))


def fit_lvmr(y, x, sigma_y2=1.0, weights=None):
    y = np.asarray(y, dtype=float)
    x = np.asarray(x, dtype=float)
    if weights is None:
        weights = np.full(y.shape[0], 1.0 / y.shape[0])
    return _pylarx.fit_lvmr(y, x, np.asarray(weights, dtype=float), float(sigma_y2))


def cli(*args):
    """Run the command-line front end; returns (status, stdout, stderr)."""
    return _pylarx.run_cli([str(a) for a in args])
