"""Pulse-train sequence design from difference sets and sidelobe scoring.

The assignment rule puts (p_n, q_n) = (1, 1) on set members and
alternates (n mod 2, (n+1) mod 2) elsewhere, so p_n q_n is exactly the
set indicator. The cross-AF magnitude of the resulting trains is bounded
by a triangle inequality evaluated in :func:`design_bound`; sidelobe
levels quantify the surfaces a plotter would show.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .ambiguity import AmbiguitySurface
from .diffset import DifferenceSet

PSL_FLOOR_DB = -300.0


class DesignError(ValueError):
    """Invalid design inputs."""


@dataclass(frozen=True)
class DesignedSequences:
    """Binary selector p and nonnegative weights q_w of length N."""

    N: int
    p: np.ndarray
    q_w: np.ndarray
    source_set: DifferenceSet | None = None

    def __post_init__(self):
        p = np.ascontiguousarray(self.p, dtype=np.int64)
        q = np.ascontiguousarray(self.q_w, dtype=np.float64)
        if p.shape != (self.N,) or q.shape != (self.N,):
            raise DesignError("p and q_w must have length N")
        if not np.all((p == 0) | (p == 1)):
            raise DesignError("p must be binary")
        if np.any(q < 0):
            raise DesignError("q_w must be nonnegative")
        p.flags.writeable = False
        q.flags.writeable = False
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q_w", q)

    def to_json(self) -> str:
        payload = {
            "N": self.N,
            "p": [int(v) for v in self.p],
            "q": [int(v) if float(v).is_integer() else float(v) for v in self.q_w],
            "set": None
            if self.source_set is None
            else json.loads(self.source_set.to_json()),
        }
        return json.dumps(payload, sort_keys=True)

    @staticmethod
    def from_json(text: str) -> "DesignedSequences":
        data = json.loads(text)
        try:
            src = data["set"]
            return DesignedSequences(
                N=int(data["N"]),
                p=np.array(data["p"], dtype=np.int64),
                q_w=np.array(data["q"], dtype=np.float64),
                source_set=None if src is None else DifferenceSet.from_json(json.dumps(src)),
            )
        except KeyError as exc:
            raise DesignError(f"missing field {exc} in sequence JSON") from exc


def assign(ds: DifferenceSet) -> DesignedSequences:
    """(p_n, q_n) = (1, 1) on set members, (n mod 2, (n+1) mod 2) elsewhere."""
    members = set(ds.elements)
    p = np.empty(ds.N, dtype=np.int64)
    q = np.empty(ds.N, dtype=np.float64)
    for n in range(ds.N):
        if n in members:
            p[n], q[n] = 1, 1.0
        else:
            p[n], q[n] = n % 2, (n + 1) % 2
    return DesignedSequences(N=ds.N, p=p, q_w=q, source_set=ds)


def all_ones_sequences(N: int) -> DesignedSequences:
    """Baseline comparator: every pulse transmitted and correlated."""
    return DesignedSequences(N=N, p=np.ones(N, dtype=np.int64), q_w=np.ones(N))


def design_bound(seqs: DesignedSequences, chi_x_mag, chi_xt_mag, gamma: float = 1.0):
    """Triangle-inequality bound on |<x_P, x_Q replica>|.

    (1/sqrt(gamma)) * (sum_n q_n p_n) |chi_x| + (sum_n q_n (1 - p_n)) |chi_x~|;
    the magnitudes may be scalars or arrays (e.g. full surfaces).
    """
    cx = float(np.sum(seqs.q_w * seqs.p))
    cxt = float(np.sum(seqs.q_w * (1 - seqs.p)))
    return (cx * np.asarray(chi_x_mag) + cxt * np.asarray(chi_xt_mag)) / math.sqrt(gamma)


@dataclass(frozen=True)
class MainlobeExtent:
    """Half-widths of the mainlobe mask: |tau| and Doppler distance.

    Doppler distance is |gamma - 1| for dilation and velocity axes and
    |nu| for frequency axes.
    """

    tau_halfwidth: float
    doppler_halfwidth: float


def default_mainlobe(Tc: float, N: int, T: float, f0: float) -> MainlobeExtent:
    """One resolution cell in each axis: |tau| <= Tc, |gamma-1| <= 1/(N T f0)."""
    return MainlobeExtent(tau_halfwidth=Tc, doppler_halfwidth=1.0 / (N * T * f0))


@dataclass(frozen=True)
class SidelobeReport:
    peak: float
    psl_db: float
    isl_db: float
    mainlobe: MainlobeExtent

    def to_dict(self) -> dict:
        return {
            "peak": self.peak,
            "psl_db": self.psl_db,
            "isl_db": self.isl_db,
            "mainlobe_tau": self.mainlobe.tau_halfwidth,
            "mainlobe_doppler": self.mainlobe.doppler_halfwidth,
        }


def _doppler_distance(surface: AmbiguitySurface) -> np.ndarray:
    if surface.doppler.kind == "frequency":
        return np.abs(surface.doppler.values)
    return np.abs(surface.doppler.gammas() - 1.0)


def score(surface: AmbiguitySurface, mainlobe: MainlobeExtent) -> SidelobeReport:
    """Peak, PSL, and ISL of a surface with the given mainlobe mask.

    PSL = 20 log10(max outside / peak); ISL = 10 log10(power outside /
    power inside). An all-zero surface is degenerate; a zero sidelobe
    region reports the -300 dB sentinel.
    """
    mag = surface.magnitude()
    peak = float(np.max(mag))
    if peak == 0.0:
        raise DesignError("degenerate all-zero surface")
    in_tau = np.abs(surface.delays) <= mainlobe.tau_halfwidth
    in_dop = _doppler_distance(surface) <= mainlobe.doppler_halfwidth
    inside = in_dop[:, None] & in_tau[None, :]
    if not np.any(inside):
        raise DesignError("mainlobe mask excludes every grid cell")
    outside = ~inside
    if not np.any(outside):
        raise DesignError("mainlobe mask covers the whole grid; no sidelobe region")
    max_out = float(np.max(mag[outside]))
    psl = PSL_FLOOR_DB if max_out == 0.0 else 20.0 * math.log10(max_out / peak)
    pow_out = float(np.sum(mag[outside] ** 2))
    pow_in = float(np.sum(mag[inside] ** 2))
    isl = PSL_FLOOR_DB if pow_out == 0.0 else 10.0 * math.log10(pow_out / pow_in)
    return SidelobeReport(peak=peak, psl_db=max(psl, PSL_FLOOR_DB), isl_db=max(isl, PSL_FLOOR_DB), mainlobe=mainlobe)
