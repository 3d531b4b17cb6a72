"""Map an average probability of failure on demand to a safety integrity band.

Bands are decade-wide with lower-inclusive edges:

    SIL 4:  1e-5 <= pfd < 1e-4
    SIL 3:  1e-4 <= pfd < 1e-3
    SIL 2:  1e-3 <= pfd < 1e-2
    SIL 1:  1e-2 <= pfd < 1e-1
    none:   pfd >= 1e-1

Values below the SIL 4 floor are flagged below-scale: a positive pfd keeps
the SIL 4 label (the requirement is met with margin), an exactly zero pfd
gets "none" because no finite band contains it.

Thresholds can be overridden with a JSON file named by the
SIS_PFD_THRESHOLDS environment variable, holding the band lower edges plus
the "none" cutoff, e.g. {"SIL4": 1e-5, "SIL3": 1e-4, "SIL2": 1e-3,
"SIL1": 1e-2, "none": 1e-1}.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass
from typing import Mapping

THRESHOLDS_ENV_VAR = "SIS_PFD_THRESHOLDS"

BAND_NAMES = ("SIL4", "SIL3", "SIL2", "SIL1")

DEFAULT_THRESHOLDS: Mapping[str, float] = {
    "SIL4": 1e-5,
    "SIL3": 1e-4,
    "SIL2": 1e-3,
    "SIL1": 1e-2,
    "none": 1e-1,
}


@dataclass(frozen=True)
class SilBand:
    """Classification outcome: band label plus a below-scale flag."""

    band: str
    below_scale: bool


def _validated(thresholds: Mapping[str, float]) -> dict[str, float]:
    missing = [k for k in (*BAND_NAMES, "none") if k not in thresholds]
    if missing:
        raise ValueError(f"thresholds missing keys: {missing}")
    edges = [float(thresholds[k]) for k in (*BAND_NAMES, "none")]
    if any(not math.isfinite(e) or e <= 0.0 for e in edges):
        raise ValueError("thresholds must be finite and positive")
    if any(a >= b for a, b in zip(edges, edges[1:])):
        raise ValueError("thresholds must increase from SIL4 to the 'none' cutoff")
    return dict(zip((*BAND_NAMES, "none"), edges))


def load_thresholds() -> dict[str, float]:
    """Active thresholds: the environment override if set, else defaults."""
    path = os.environ.get(THRESHOLDS_ENV_VAR)
    if not path:
        return dict(DEFAULT_THRESHOLDS)
    with open(path, encoding="utf-8") as fh:
        return _validated(json.load(fh))


def classify_sil(pfd_avg: float, thresholds: Mapping[str, float] | None = None) -> SilBand:
    """Classify an average PFD into a SIL band."""
    if not math.isfinite(pfd_avg) or not 0.0 <= pfd_avg <= 1.0:
        raise ValueError(f"pfd_avg must be a probability, got {pfd_avg}")
    edges = _validated(thresholds) if thresholds is not None else load_thresholds()
    if pfd_avg == 0.0:
        return SilBand("none", below_scale=True)
    if pfd_avg < edges["SIL4"]:
        return SilBand("SIL4", below_scale=True)
    if pfd_avg >= edges["none"]:
        return SilBand("none", below_scale=False)
    band = "SIL1"
    for name, upper_name in zip(BAND_NAMES[:-1], BAND_NAMES[1:]):
        if pfd_avg < edges[upper_name]:
            band = name
            break
    return SilBand(band, below_scale=False)
