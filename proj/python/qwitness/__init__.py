"""Quadrature-moment nonclassicality witnesses."""

import json

from ._qwitness import (
    QwitnessError,
    __version__,
    estimate_moments,
    marginal_pdf,
    onset_order,
    optimize_witness,
    oracle_moments,
    sample,
    significance,
    sweep,
    symmetric_moments,
    wigner_radial,
)
from ._qwitness import analyze_json as _analyze_json


def analyze(x, config=None, phases=None, convention_variance=0.5):
    """Analyze a quadrature record and return the report as a dict."""
    text = _analyze_json(list(x), json.dumps(config or {}), None if phases is None else list(phases),
                         convention_variance)
    return json.loads(text)


__all__ = [
    "QwitnessError",
    "__version__",
    "analyze",
    "estimate_moments",
    "marginal_pdf",
    "onset_order",
    "optimize_witness",
    "oracle_moments",
    "sample",
    "significance",
    "sweep",
    "symmetric_moments",
    "wigner_radial",
]
