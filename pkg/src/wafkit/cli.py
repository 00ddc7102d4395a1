"""Command-line front end with versioned JSON configs and bit-stable outputs.

Subcommands: diffset, design, waf, xaf, frame. Exit codes are a stable
scripting contract: 0 success, 1 verification failure, 2 input error,
3 numerical failure. Configs carry a ``version`` field and unknown keys
are rejected so a run is reproducible from its config alone. The
WAFKIT_THREADS environment variable overrides any configured thread
count; outputs are bitwise identical for any thread count.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import ambiguity, design, diffset, frame
from .affine import Interpolator
from .ambiguity import AmbiguityError, DopplerAxis
from .design import DesignError, MainlobeExtent
from .diffset import DifferenceSet, DiffSetError, SingerParams
from .frame import (
    FrameConvergenceError,
    FrameDivergenceError,
    FrameError,
    FrameGrid,
    WaveletFrame,
)
from .signals import (
    ChipPulse,
    PhaseCode,
    PulseTrainSpec,
    SignalError,
    gaussian_pulse,
    morlet_pulse,
    synth_chip,
    synth_coded,
)

EXIT_OK = 0
EXIT_VERIFY_FAIL = 1
EXIT_INPUT_ERROR = 2
EXIT_NUMERIC_ERROR = 3

CONFIG_VERSION = 1
THREADS_ENV = "WAFKIT_THREADS"


class ConfigError(ValueError):
    """Malformed or unknown configuration content."""


def _check_keys(obj: dict, required: set[str], optional: set[str], where: str) -> None:
    if not isinstance(obj, dict):
        raise ConfigError(f"{where}: expected a JSON object")
    keys = set(obj)
    missing = required - keys
    unknown = keys - required - optional
    if missing:
        raise ConfigError(f"{where}: missing keys {sorted(missing)}")
    if unknown:
        raise ConfigError(f"{where}: unknown keys {sorted(unknown)}")


def _load_config(path: str) -> dict:
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict) or cfg.get("version") != CONFIG_VERSION:
        raise ConfigError(f"config must carry \"version\": {CONFIG_VERSION}")
    return cfg


def _parse_code(values) -> PhaseCode:
    if not isinstance(values, list) or not values:
        raise ConfigError("code must be a non-empty list")
    out = []
    for v in values:
        if isinstance(v, (int, float)):
            out.append(complex(v))
        elif isinstance(v, list) and len(v) == 2:
            out.append(complex(v[0], v[1]))
        else:
            raise ConfigError("code entries must be numbers or [re, im] pairs")
    try:
        return PhaseCode(np.array(out))
    except SignalError as exc:
        raise ConfigError(str(exc)) from exc


def _parse_chip(obj) -> ChipPulse:
    _check_keys(obj, {"shape", "Tc"}, set(), "chip")
    try:
        return ChipPulse(shape=obj["shape"], Tc=float(obj["Tc"]))
    except SignalError as exc:
        raise ConfigError(str(exc)) from exc


def _parse_interpolator(obj) -> Interpolator:
    if obj is None:
        return Interpolator()
    _check_keys(obj, {"method"}, {"taps"}, "interpolator")
    return Interpolator(method=obj["method"], taps=int(obj.get("taps", 32)))


def _parse_grid_spec(obj, where: str) -> np.ndarray:
    _check_keys(obj, {"start", "stop", "count"}, set(), where)
    count = int(obj["count"])
    if count < 1:
        raise ConfigError(f"{where}: count must be >= 1")
    return np.linspace(float(obj["start"]), float(obj["stop"]), count)


def _parse_doppler(obj) -> DopplerAxis:
    _check_keys(obj, {"kind", "start", "stop", "count"}, {"f0"}, "doppler")
    values = np.linspace(float(obj["start"]), float(obj["stop"]), int(obj["count"]))
    f0 = obj.get("f0")
    try:
        return DopplerAxis(kind=obj["kind"], values=values, f0=None if f0 is None else float(f0))
    except AmbiguityError as exc:
        raise ConfigError(str(exc)) from exc


def _resolve_threads(cfg_threads) -> int:
    env = os.environ.get(THREADS_ENV)
    if env is not None:
        try:
            return max(1, int(env))
        except ValueError as exc:
            raise ConfigError(f"{THREADS_ENV} must be an integer") from exc
    if cfg_threads is None:
        return 1
    return max(1, int(cfg_threads))


def _write_json(path: str, payload: dict) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, sort_keys=True, indent=2)
        fh.write("\n")


def _sidecar_path(out: str) -> str:
    root, _ = os.path.splitext(out)
    return root + ".json"


def _report_path(out: str) -> str:
    root, _ = os.path.splitext(out)
    return root + ".report.json"


# -- subcommands ---------------------------------------------------------


def cmd_diffset(args) -> int:
    try:
        params = SingerParams(q=args.q, d=args.d)
    except DiffSetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    ds = diffset.singer_construct(params)
    ok, _ = diffset.verify(ds)
    mu = diffset.welch_bound(params)
    status = "VERIFIED" if ok else "FAILED"
    print(f"N={params.N} C1={params.C1} C2={params.C2} mu={mu:.6f} {status}")
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(ds.to_json() + "\n")
    return EXIT_OK if ok else EXIT_VERIFY_FAIL


def cmd_design(args) -> int:
    try:
        with open(args.set) as fh:
            ds = DifferenceSet.from_json(fh.read())
    except (OSError, json.JSONDecodeError, DiffSetError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    seqs = design.assign(ds)
    with open(args.out, "w") as fh:
        fh.write(seqs.to_json() + "\n")
    print(f"N={seqs.N} ones={int(np.sum(seqs.p * seqs.q_w))}")
    return EXIT_OK


_WAF_KEYS_REQ = {"version", "fs", "chip", "delay", "doppler"}
_WAF_KEYS_OPT = {"code", "definition", "interpolator", "threads"}


def _waf_surface_from_config(cfg: dict):
    _check_keys(cfg, _WAF_KEYS_REQ, _WAF_KEYS_OPT, "config")
    fs = float(cfg["fs"])
    chip = _parse_chip(cfg["chip"])
    delays = _parse_grid_spec(cfg["delay"], "delay")
    doppler = _parse_doppler(cfg["doppler"])
    interp = _parse_interpolator(cfg.get("interpolator"))
    threads = _resolve_threads(cfg.get("threads"))
    definition = cfg.get("definition", "kelly_wishner")
    code_values = cfg.get("code", [1])
    code = _parse_code(code_values)
    try:
        w = synth_chip(chip, fs) if len(code) == 1 and code.code[0] == 1 else synth_coded(code, chip, fs)
        surface = ambiguity.waf(w, delays, doppler, definition, interp, threads)
    except (SignalError, AmbiguityError) as exc:
        raise ConfigError(str(exc)) from exc
    return surface


def cmd_waf(args) -> int:
    try:
        cfg = _load_config(args.config)
        surface = _waf_surface_from_config(cfg)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except FloatingPointError as exc:  # pragma: no cover
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC_ERROR
    surface.to_csv(args.out, _sidecar_path(args.out))
    print(f"wrote {args.out} peak={surface.peak():.6g}")
    return EXIT_OK


_XAF_KEYS_REQ = {"version", "fs", "chip", "code", "train", "delay", "doppler"}
_XAF_KEYS_OPT = {
    "mode",
    "code_complement",
    "interpolator",
    "threads",
    "mainlobe",
    "baseline",
}


def cmd_xaf(args) -> int:
    try:
        cfg = _load_config(args.config)
        _check_keys(cfg, _XAF_KEYS_REQ, _XAF_KEYS_OPT, "config")
        with open(args.seq) as fh:
            seqs = design.DesignedSequences.from_json(fh.read())
        fs = float(cfg["fs"])
        chip = _parse_chip(cfg["chip"])
        code = _parse_code(cfg["code"])
        comp = cfg.get("code_complement")
        comp_code = None if comp is None else _parse_code(comp)
        _check_keys(cfg["train"], {"T"}, set(), "train")
        T = float(cfg["train"]["T"])
        delays = _parse_grid_spec(cfg["delay"], "delay")
        doppler = _parse_doppler(cfg["doppler"])
        interp = _parse_interpolator(cfg.get("interpolator"))
        threads = _resolve_threads(cfg.get("threads"))
        mode = cfg.get("mode", "slow_time")
        spec = PulseTrainSpec(
            N=seqs.N, T=T, p=seqs.p, q_w=seqs.q_w, code=code, chip=chip, code_complement=comp_code
        )
        mainlobe_cfg = cfg.get("mainlobe")
        if mainlobe_cfg is not None:
            _check_keys(mainlobe_cfg, {"tau", "doppler"}, set(), "mainlobe")
            mainlobe = MainlobeExtent(float(mainlobe_cfg["tau"]), float(mainlobe_cfg["doppler"]))
        elif doppler.f0 is not None:
            mainlobe = design.default_mainlobe(chip.Tc, seqs.N, T, doppler.f0)
        else:
            raise ConfigError("mainlobe extents required when the doppler axis has no f0")
    except (ConfigError, DesignError, SignalError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except AmbiguityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR

    try:
        surface = ambiguity.cross_af(spec, fs, delays, doppler, mode, interp, threads)
        x = synth_coded(code, chip, fs)
        xt = synth_coded(spec.code_complement, chip, fs)
        chi_x = ambiguity.waf(x, delays, doppler, "kelly_wishner", interp, threads)
        chi_xt = ambiguity.waf(xt, delays, doppler, "kelly_wishner", interp, threads)
        gammas = doppler.gammas()
        bound = design.design_bound(
            seqs, chi_x.magnitude(), chi_xt.magnitude(), 1.0
        ) / np.sqrt(gammas)[:, None]
        excess = float(np.max(surface.magnitude() - bound))
        report = design.score(surface, mainlobe)
        payload = report.to_dict()
        payload["mode"] = mode
        payload["bound_max_excess"] = excess
        payload["bound_satisfied"] = bool(excess <= 1e-9 * report.peak)
        if cfg.get("baseline", False):
            base = design.all_ones_sequences(seqs.N)
            base_spec = PulseTrainSpec(
                N=seqs.N, T=T, p=base.p, q_w=base.q_w, code=code, chip=chip,
                code_complement=comp_code,
            )
            base_surface = ambiguity.cross_af(base_spec, fs, delays, doppler, mode, interp, threads)
            payload["baseline_psl_db"] = design.score(base_surface, mainlobe).psl_db
    except AmbiguityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except DesignError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC_ERROR

    surface.to_csv(args.out, _sidecar_path(args.out))
    _write_json(_report_path(args.out), payload)
    print(f"wrote {args.out} psl_db={report.psl_db:.3f}")
    return EXIT_OK


_FRAME_KEYS_REQ = {"version", "mother", "fs", "gamma0", "tau0", "m_range", "n_range"}
_FRAME_KEYS_OPT = {
    "dim",
    "K",
    "iters",
    "certify",
    "reconstruction",
    "seed",
    "interpolator",
    "threads",
    "duals_out",
}

_MOTHER_KEYS = {
    "gaussian": ({"kind", "sigma", "span"}, set()),
    "morlet": ({"kind", "sigma", "f_center", "span"}, set()),
    "gaussian_chip": ({"kind", "Tc"}, set()),
    "rectangular_chip": ({"kind", "Tc"}, set()),
}


def _parse_mother(obj, fs: float):
    if not isinstance(obj, dict) or "kind" not in obj:
        raise ConfigError("mother must be an object with a kind")
    kind = obj["kind"]
    if kind not in _MOTHER_KEYS:
        raise ConfigError(f"unknown mother kind {kind!r}")
    req, opt = _MOTHER_KEYS[kind]
    _check_keys(obj, req, opt, "mother")
    try:
        if kind == "gaussian":
            return gaussian_pulse(float(obj["sigma"]), float(obj["span"]), fs)
        if kind == "morlet":
            return morlet_pulse(
                float(obj["sigma"]), float(obj["f_center"]), float(obj["span"]), fs
            )
        shape = "gaussian" if kind == "gaussian_chip" else "rectangular"
        return synth_chip(ChipPulse(shape=shape, Tc=float(obj["Tc"])), fs)
    except SignalError as exc:
        raise ConfigError(str(exc)) from exc


def cmd_frame(args) -> int:
    try:
        cfg = _load_config(args.config)
        _check_keys(cfg, _FRAME_KEYS_REQ, _FRAME_KEYS_OPT, "config")
        fs = float(cfg["fs"])
        mother = _parse_mother(cfg["mother"], fs)
        grid = FrameGrid(
            gamma0=float(cfg["gamma0"]),
            tau0=float(cfg["tau0"]),
            m_range=tuple(int(v) for v in cfg["m_range"]),
            n_range=tuple(int(v) for v in cfg["n_range"]),
        )
        interp = _parse_interpolator(cfg.get("interpolator"))
        wf = WaveletFrame(mother, grid, interp, dim=int(cfg.get("dim", frame.DEFAULT_DIM)))
    except (ConfigError, FrameError, SignalError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR

    try:
        bounds = frame.frame_bounds(wf)
        K_cfg = cfg.get("K")
        K = bounds.A + bounds.B if K_cfg is None else float(K_cfg)
        iters = int(cfg.get("iters", 20))
        duals = frame.dual_frame(wf, K, iters)
        payload = {
            "gamma0": grid.gamma0,
            "tau0": grid.tau0,
            "m_range": list(grid.m_range),
            "n_range": list(grid.n_range),
            "A": bounds.A,
            "B": bounds.B,
            "ratio": bounds.ratio,
            "K": K,
            "convergence_factor": frame.convergence_factor(bounds, K),
            "iterations": bounds.iterations,
        }
        cert_cfg = cfg.get("certify")
        if cert_cfg is not None:
            _check_keys(cert_cfg, set(), {"vectors", "slack"}, "certify")
            ok, lo, hi = frame.certify_frame_inequality(
                wf,
                bounds,
                n_vectors=int(cert_cfg.get("vectors", 100)),
                seed=int(cfg.get("seed", 42)),
                slack=float(cert_cfg.get("slack", 1e-9)),
            )
            payload["certified"] = bool(ok)
        if cfg.get("reconstruction", False):
            rng = np.random.Generator(np.random.PCG64(int(cfg.get("seed", 42))))
            u = frame.random_span_signal(wf, rng)
            payload["reconstruction_error"] = frame.reconstruction_error(wf, u)
        duals_out = cfg.get("duals_out")
        if duals_out:
            with open(duals_out, "w", newline="") as fh:
                fh.write("m,n,t,re,im\n")
                for (m, n), vals in sorted(duals.items()):
                    for t, v in zip(wf.times, vals):
                        fh.write(f"{m},{n},{t:.17g},{v.real:.17g},{v.imag:.17g}\n")
    except (FrameConvergenceError, FrameDivergenceError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC_ERROR
    except FrameError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR

    _write_json(args.out, payload)
    print(f"wrote {args.out} A={bounds.A:.6g} B={bounds.B:.6g} ratio={bounds.ratio:.6g}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wafkit",
        description="Wideband ambiguity surfaces, wavelet frame bounds, and "
        "difference-set pulse-train design.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("diffset", help="construct and verify a Singer difference set")
    p.add_argument("--q", type=int, required=True, help="prime base")
    p.add_argument("--d", type=int, required=True, help="power constant")
    p.add_argument("--out", help="output JSON path")
    p.set_defaults(func=cmd_diffset)

    p = sub.add_parser("design", help="map a difference set to (p, q) sequences")
    p.add_argument("--set", required=True, help="difference-set JSON path")
    p.add_argument("--out", required=True, help="output sequence JSON path")
    p.set_defaults(func=cmd_design)

    p = sub.add_parser("waf", help="compute a wideband ambiguity surface")
    p.add_argument("--config", required=True, help="run config JSON")
    p.add_argument("--out", required=True, help="output CSV path")
    p.set_defaults(func=cmd_waf)

    p = sub.add_parser("xaf", help="cross-AF of designed P/Q pulse trains")
    p.add_argument("--seq", required=True, help="sequence JSON path")
    p.add_argument("--config", required=True, help="run config JSON")
    p.add_argument("--out", required=True, help="output CSV path")
    p.set_defaults(func=cmd_xaf)

    p = sub.add_parser("frame", help="frame bounds, duals, and reconstruction report")
    p.add_argument("--config", required=True, help="frame config JSON")
    p.add_argument("--out", required=True, help="output report JSON path")
    p.set_defaults(func=cmd_frame)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
