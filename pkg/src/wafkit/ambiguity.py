"""Ambiguity surfaces on delay x Doppler grids by direct quadrature.

The correlation integrals are evaluated with the trapezoid rule on the
base signal's grid; the replica is resampled once per grid cell through
the affine machinery. Signals synthesized by :mod:`wafkit.signals`
vanish at their end samples, so the trapezoid rule loses nothing at the
support edges.

Doppler conventions: the phase kernel is exp(-j nu t) with nu in rad/s;
carrier frequencies are in Hz. When an axis carries a carrier f0, the
dilation factor gamma and the Doppler shift are coupled through
nu = 2 pi f0 (gamma - 1) (one physical velocity parameter); a raw
frequency axis sweeps nu freely at gamma = 1. :func:`waf_point` performs
free (tau, gamma, nu) evaluation.
"""

from __future__ import annotations

import json
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .affine import DEFAULT_INTERPOLATOR, Interpolator, evaluate_at
from .signals import PulseTrainSpec, SampledSignal, synth_coded, synth_train

SPEED_OF_LIGHT = 299792458.0

AXIS_KINDS = ("dilation", "frequency", "velocity")
WAF_DEFINITIONS = ("kelly_wishner", "daubechies_form", "speiser_form", "exponential_form")
SLOW_TIME_NU_T_LIMIT = 0.1
SLOW_TIME_NU_T_WARN = 0.01


class AmbiguityError(ValueError):
    """Invalid grid, axis, or definition parameters."""


@dataclass(frozen=True)
class DopplerAxis:
    """Doppler axis: dilation factors, shift frequencies, or velocities.

    * ``dilation``: values are gamma > 0. With a carrier ``f0`` (Hz) each
      point also carries the coupled shift nu = 2 pi f0 (gamma - 1);
      without a carrier nu = 0 (pure dilation sweep).
    * ``frequency``: values are nu in rad/s at gamma = 1.
    * ``velocity``: values are radial velocities v (m/s); requires f0.
      Round trip: gamma = 1 + 2 v / c, delta = 2 v / (c + v).
    """

    kind: str
    values: np.ndarray
    f0: float | None = None

    def __post_init__(self):
        if self.kind not in AXIS_KINDS:
            raise AmbiguityError(f"unknown doppler axis kind {self.kind!r}")
        vals = np.ascontiguousarray(self.values, dtype=np.float64)
        if vals.ndim != 1 or vals.size == 0:
            raise AmbiguityError("doppler axis needs a non-empty value vector")
        if self.kind == "dilation" and np.any(vals <= 0):
            raise AmbiguityError("dilation factors must be positive")
        if self.kind == "velocity" and self.f0 is None:
            raise AmbiguityError("velocity axis requires a carrier f0")
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    def __len__(self) -> int:
        return self.values.size

    def gammas(self) -> np.ndarray:
        if self.kind == "dilation":
            return self.values
        if self.kind == "velocity":
            return 1.0 + 2.0 * self.values / SPEED_OF_LIGHT
        return np.ones_like(self.values)

    def nus(self) -> np.ndarray:
        """Doppler phase frequencies in rad/s, carrier-coupled when f0 is set."""
        if self.kind == "frequency":
            return self.values
        if self.f0 is None:
            return np.zeros_like(self.values)
        return 2.0 * np.pi * self.f0 * (self.gammas() - 1.0)

    def deltas(self) -> np.ndarray:
        """Relative velocity 2v/(c+v); zero for non-velocity axes."""
        if self.kind != "velocity":
            return np.zeros_like(self.values)
        return 2.0 * self.values / (SPEED_OF_LIGHT + self.values)


@dataclass(frozen=True)
class AmbiguitySurface:
    """Complex surface tabulated on a delay x Doppler grid.

    ``values[i, j]`` corresponds to doppler index i and delay index j.
    Values are stored raw (not peak normalized); ``meta`` records the
    leading normalization of the evaluated formula.
    """

    delays: np.ndarray
    doppler: DopplerAxis
    values: np.ndarray
    definition: str
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        d = np.ascontiguousarray(self.delays, dtype=np.float64)
        v = np.ascontiguousarray(self.values, dtype=np.complex128)
        if d.ndim != 1 or d.size == 0:
            raise AmbiguityError("delay grid must be a non-empty vector")
        if v.shape != (len(self.doppler), d.size):
            raise AmbiguityError("surface dimensions inconsistent with the grids")
        d.flags.writeable = False
        v.flags.writeable = False
        object.__setattr__(self, "delays", d)
        object.__setattr__(self, "values", v)

    def magnitude(self) -> np.ndarray:
        return np.abs(self.values)

    def peak(self) -> float:
        return float(np.max(np.abs(self.values)))

    def doppler_column(self) -> np.ndarray:
        """Values written to the CSV doppler column: gamma or nu by axis kind."""
        if self.doppler.kind == "frequency":
            return self.doppler.values
        return self.doppler.gammas()

    def to_csv(self, path, sidecar_path=None) -> None:
        """Row-major, delay fastest: tau,doppler,re,im,mag."""
        col = self.doppler_column()
        with open(path, "w", newline="") as fh:
            fh.write("tau,doppler,re,im,mag\n")
            for i in range(len(self.doppler)):
                for j, tau in enumerate(self.delays):
                    v = self.values[i, j]
                    fh.write(
                        f"{tau:.17g},{col[i]:.17g},{v.real:.17g},{v.imag:.17g},{abs(v):.17g}\n"
                    )
        if sidecar_path is not None:
            sidecar = {
                "version": 1,
                "axis_kind": self.doppler.kind,
                "f0": self.doppler.f0,
                "definition": self.definition,
                "normalized": False,
                "delay_count": int(self.delays.size),
                "doppler_count": len(self.doppler),
            }
            sidecar.update(self.meta)
            with open(sidecar_path, "w") as fh:
                json.dump(sidecar, fh, sort_keys=True, indent=2)
                fh.write("\n")


def _trapezoid_weights(n: int, fs: float) -> np.ndarray:
    w = np.full(n, 1.0 / fs)
    w[0] *= 0.5
    w[-1] *= 0.5
    return w


def _rows_parallel(worker, n_rows: int, threads: int) -> list:
    if threads <= 1:
        return [worker(i) for i in range(n_rows)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(worker, range(n_rows)))


def _replica_params(definition: str, tau: float, gamma: float, nu: float):
    """Map (tau, gamma, nu) to replica w(alpha t + beta) and leading scalar."""
    if definition == "kelly_wishner":
        return gamma, -gamma * tau, math.sqrt(gamma)
    if definition == "daubechies_form":
        return 1.0 / gamma, -tau / gamma, 1.0 / math.sqrt(gamma)
    if definition == "speiser_form":
        return gamma, -tau, math.sqrt(gamma)
    if definition == "exponential_form":
        return math.exp(-nu), -tau, math.exp(nu / 2.0)
    raise AmbiguityError(f"unknown WAF definition {definition!r}")


def _row_correlate(
    w: SampledSignal, base: np.ndarray, points: np.ndarray, interp: Interpolator
) -> np.ndarray:
    """Inner products of `base` with replicas of w at a (n_delay, n_t) point grid.

    One interpolation pass per Doppler row; the per-cell reduction uses a
    fixed einsum order, so results do not depend on thread count.
    """
    rep = evaluate_at(w, points.reshape(-1), interp).reshape(points.shape)
    return np.einsum("jk,k->j", np.conj(rep), base, optimize=False)


def _surface_grid(w: SampledSignal, delays) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    delays = np.ascontiguousarray(delays, dtype=np.float64)
    if delays.ndim != 1 or delays.size == 0:
        raise AmbiguityError("delay grid must be a non-empty vector")
    t = w.times()
    quad = _trapezoid_weights(t.size, w.fs)
    return delays, t, quad


def naf(
    w: SampledSignal,
    delays,
    nus,
    interp: Interpolator = DEFAULT_INTERPOLATOR,
    threads: int = 1,
) -> AmbiguitySurface:
    """Narrowband AF: psi(tau, nu) = integral w(t) w*(t - tau) e^(-j nu t) dt."""
    delays, t, quad = _surface_grid(w, delays)
    axis = DopplerAxis(kind="frequency", values=np.ascontiguousarray(nus, dtype=np.float64))

    def row(i: int) -> np.ndarray:
        base = w.samples * np.exp(-1j * axis.values[i] * t) * quad
        points = t[None, :] - delays[:, None]
        return _row_correlate(w, base, points, interp)

    values = np.vstack(_rows_parallel(row, len(axis), threads))
    return AmbiguitySurface(delays, axis, values, "naf", {"fs": w.fs, "normalization": "unit"})


def waf(
    w: SampledSignal,
    delays,
    doppler: DopplerAxis,
    definition: str = "kelly_wishner",
    interp: Interpolator = DEFAULT_INTERPOLATOR,
    threads: int = 1,
) -> AmbiguitySurface:
    """Wideband AF surface under the selected definition.

    For ``exponential_form`` the Doppler variable also sets the dilation
    e^(-nu); use a frequency axis for it. The other definitions require
    gamma > 0 and take nu from the axis coupling.
    """
    if definition not in WAF_DEFINITIONS:
        raise AmbiguityError(f"unknown WAF definition {definition!r}")
    delays, t, quad = _surface_grid(w, delays)
    gammas = doppler.gammas()
    nus = doppler.nus()
    if definition != "exponential_form" and np.any(gammas <= 0):
        raise AmbiguityError("gamma must be positive for this definition")

    def row(i: int) -> np.ndarray:
        nu = float(nus[i])
        gamma = float(gammas[i])
        base = w.samples * np.exp(-1j * nu * t) * quad
        if definition == "kelly_wishner":
            points = gamma * t[None, :] - gamma * delays[:, None]
            lead = math.sqrt(gamma)
        elif definition == "daubechies_form":
            points = (t[None, :] - delays[:, None]) / gamma
            lead = 1.0 / math.sqrt(gamma)
        elif definition == "speiser_form":
            points = gamma * t[None, :] - delays[:, None]
            lead = math.sqrt(gamma)
        else:
            points = math.exp(-nu) * t[None, :] - delays[:, None]
            lead = math.exp(nu / 2.0)
        return lead * _row_correlate(w, base, points, interp)

    values = np.vstack(_rows_parallel(row, len(doppler), threads))
    meta = {"fs": w.fs, "normalization": _LEAD_TAGS[definition]}
    return AmbiguitySurface(delays, doppler, values, definition, meta)


_LEAD_TAGS = {
    "kelly_wishner": "sqrt_gamma",
    "daubechies_form": "inv_sqrt_gamma",
    "speiser_form": "sqrt_gamma",
    "exponential_form": "exp_half_nu",
}


def waf_point(
    w: SampledSignal,
    tau: float,
    gamma: float,
    nu: float,
    definition: str = "kelly_wishner",
    interp: Interpolator = DEFAULT_INTERPOLATOR,
) -> complex:
    """Free (tau, gamma, nu) evaluation of one WAF cell."""
    if definition not in WAF_DEFINITIONS:
        raise AmbiguityError(f"unknown WAF definition {definition!r}")
    if definition != "exponential_form" and gamma <= 0:
        raise AmbiguityError("gamma must be positive for this definition")
    t = w.times()
    quad = _trapezoid_weights(t.size, w.fs)
    alpha, beta, lead = _replica_params(definition, tau, gamma, nu)
    rep = evaluate_at(w, alpha * t + beta, interp)
    base = w.samples * np.exp(-1j * nu * t) * quad
    return complex(lead * np.dot(base, np.conj(rep)))


def narrowband_phase_form(
    w: SampledSignal,
    delays,
    doppler: DopplerAxis,
    f0: float,
    interp: Interpolator = DEFAULT_INTERPOLATOR,
    threads: int = 1,
) -> AmbiguitySurface:
    """WAF with the dilated replica replaced by its narrowband phase model.

    The replica w(gamma (t - tau)) is approximated by
    exp(-2 pi j f0 (gamma - 1)(t - tau)) w(t - tau), valid when the
    spectrum of w is centered near -f0 and the velocity is small. Close
    agreement with the kelly_wishner surface is the narrowband regime.
    """
    delays, t, quad = _surface_grid(w, delays)
    gammas = doppler.gammas()
    nus = doppler.nus()

    def row(i: int) -> np.ndarray:
        nu = float(nus[i])
        gamma = float(gammas[i])
        base = w.samples * np.exp(-1j * nu * t) * quad
        shifted = t[None, :] - delays[:, None]
        rep = evaluate_at(w, shifted.reshape(-1), interp).reshape(shifted.shape)
        rep = rep * np.exp(-2j * np.pi * f0 * (gamma - 1.0) * shifted)
        return math.sqrt(gamma) * np.einsum("jk,k->j", np.conj(rep), base, optimize=False)

    values = np.vstack(_rows_parallel(row, len(doppler), threads))
    meta = {"fs": w.fs, "normalization": "sqrt_gamma", "replica": "narrowband_phase"}
    return AmbiguitySurface(delays, doppler, values, "kelly_wishner", meta)


def narrowband_approx_error(
    w: SampledSignal,
    tau: float,
    gamma: float,
    f0: float,
    interp: Interpolator = DEFAULT_INTERPOLATOR,
) -> float:
    """L2 distance between the dilated replica and its narrowband model, over ||w||."""
    if gamma <= 0:
        raise AmbiguityError("gamma must be positive")
    lo = tau + min(w.t0 / gamma, w.t0)
    hi = tau + max(w.t_end / gamma, w.t_end)
    count = int(round((hi - lo) * w.fs)) + 1
    t = lo + np.arange(count) / w.fs
    exact = evaluate_at(w, gamma * (t - tau), interp)
    approx = np.exp(-2j * np.pi * f0 * (gamma - 1.0) * (t - tau)) * evaluate_at(
        w, t - tau, interp
    )
    err = math.sqrt(float(np.sum(np.abs(exact - approx) ** 2)) / w.fs)
    return err / w.norm()


def waf_coded_decomposition(
    code,
    pulse,
    fs: float,
    delays,
    doppler: DopplerAxis,
    interp: Interpolator = DEFAULT_INTERPOLATOR,
    threads: int = 1,
) -> AmbiguitySurface:
    """Phase-coded WAF assembled from shifted chip-level WAF terms.

    Sums x[l] x*[l - k] e^(-j nu l Tc) chi_w(tau - Tc (k + l (gamma - 1)) / gamma, nu)
    over all chip index pairs (out-of-range indices contribute zero) and
    accounts for the half-chip origin offset of :func:`synth_coded`, so
    the result is directly comparable with the integral of the
    synthesized signal. The direct integral remains the ground truth;
    this is a structural cross-check, best at small |gamma - 1|.
    """
    from .signals import synth_chip

    w = synth_chip(pulse, fs)
    delays = np.ascontiguousarray(delays, dtype=np.float64)
    if delays.ndim != 1 or delays.size == 0:
        raise AmbiguityError("delay grid must be a non-empty vector")
    gammas = doppler.gammas()
    nus = doppler.nus()
    if np.any(gammas <= 0):
        raise AmbiguityError("gamma must be positive")
    x = code.code
    L = x.size
    Tc = pulse.Tc
    t = w.times()
    quad = _trapezoid_weights(t.size, w.fs)
    l_idx, lp_idx = np.meshgrid(np.arange(L), np.arange(L), indexing="ij")
    l_flat, lp_flat = l_idx.reshape(-1), lp_idx.reshape(-1)

    def row(i: int) -> np.ndarray:
        nu = float(nus[i])
        gamma = float(gammas[i])
        base = w.samples * np.exp(-1j * nu * t) * quad
        # chip-level delay of each (l, l') term, including the half-chip
        # offset that moves the coded pulse's origin to t = 0
        term_shift = Tc * ((l_flat - lp_flat) + l_flat * (gamma - 1.0)) / gamma
        term_shift = term_shift + (Tc / 2.0) * (gamma - 1.0) / gamma
        weights = x[l_flat] * np.conj(x[lp_flat]) * np.exp(-1j * nu * l_flat * Tc)
        taus = delays[:, None] - term_shift[None, :]  # (n_delay, L^2)
        points = gamma * t[None, :] - gamma * taus.reshape(-1)[:, None]
        chi = math.sqrt(gamma) * _row_correlate(w, base, points, interp)
        chi = chi.reshape(delays.size, L * L)
        return np.exp(-1j * nu * Tc / 2.0) * (chi @ weights)

    values = np.vstack(_rows_parallel(row, len(doppler), threads))
    meta = {"fs": fs, "normalization": "sqrt_gamma", "assembled": "chip_decomposition"}
    return AmbiguitySurface(delays, doppler, values, "kelly_wishner", meta)


def cross_af(
    spec: PulseTrainSpec,
    fs: float,
    delays,
    doppler: DopplerAxis,
    mode: str = "slow_time",
    interp: Interpolator = DEFAULT_INTERPOLATOR,
    threads: int = 1,
) -> AmbiguitySurface:
    """Cross-AF of the P and Q pulse trains.

    ``exact`` integrates x_P(t) x_Q*(gamma (t - tau)) e^(-j nu t) dt
    directly (unit leading factor). ``slow_time`` freezes the Doppler
    phase per pulse:

        (1/sqrt(gamma)) sum_n q_n e^(-j nu n T)
            [p_n chi_x(tau, nu) + (1 - p_n) chi_x~(tau, nu)]

    which drops range aliases at offsets +-nT. Requires
    max |nu| T <= 0.1; warns above 0.01.
    """
    if mode not in ("exact", "slow_time"):
        raise AmbiguityError(f"unknown cross-AF mode {mode!r}")
    delays = np.ascontiguousarray(delays, dtype=np.float64)
    gammas = doppler.gammas()
    nus = doppler.nus()

    if mode == "exact":
        xp = synth_train(spec, fs, use_q=False)
        xq = synth_train(spec, fs, use_q=True)
        t = xp.times()
        quad = _trapezoid_weights(t.size, fs)

        def row(i: int) -> np.ndarray:
            nu = float(nus[i])
            gamma = float(gammas[i])
            base = xp.samples * np.exp(-1j * nu * t) * quad
            points = gamma * (t[None, :] - delays[:, None])
            return _row_correlate(xq, base, points, interp)

        values = np.vstack(_rows_parallel(row, len(doppler), threads))
        meta = {"fs": fs, "normalization": "unit", "mode": "exact"}
        return AmbiguitySurface(delays, doppler, values, "cross_pq", meta)

    nu_t = float(np.max(np.abs(nus))) * spec.T
    if nu_t > SLOW_TIME_NU_T_LIMIT:
        raise AmbiguityError(
            f"slow_time requires max |nu| T <= {SLOW_TIME_NU_T_LIMIT}, got {nu_t:.4g}"
        )
    if nu_t > SLOW_TIME_NU_T_WARN:
        warnings.warn(
            f"slow_time phase rotation |nu| T = {nu_t:.4g} exceeds {SLOW_TIME_NU_T_WARN}; "
            "the constant-phase approximation degrades",
            RuntimeWarning,
            stacklevel=2,
        )
    x = synth_coded(spec.code, spec.chip, fs)
    xt = synth_coded(spec.code_complement, spec.chip, fs)
    chi_x = waf(x, delays, doppler, "kelly_wishner", interp, threads)
    chi_xt = waf(xt, delays, doppler, "kelly_wishner", interp, threads)
    n_idx = np.arange(spec.N)
    # per-row slow-time weights: sum_n q_n p_n e^(-j nu n T) and complement
    phases = np.exp(-1j * np.outer(nus, n_idx) * spec.T)
    sx = phases @ (spec.q_w * spec.p)
    sxt = phases @ (spec.q_w * (1 - spec.p))
    lead = 1.0 / np.sqrt(gammas)
    values = lead[:, None] * (sx[:, None] * chi_x.values + sxt[:, None] * chi_xt.values)
    meta = {"fs": fs, "normalization": "inv_sqrt_gamma", "mode": "slow_time"}
    return AmbiguitySurface(delays, doppler, values, "cross_pq", meta)
