"""Command-line front end: configured runs, sweeps, spectra, validation.

Subcommands
-----------
run       one record per (protocol, N, tau) cell of the config grid
sweep     the run records plus per-(protocol, N) minimal time-to-solution
          tables for the short-time (tau <= 1) and long-time (tau >= 10)
          windows
spectrum  instantaneous eigenvalues and occupations for a single cell
validate  oracle-backed self-checks (exit 3 on any failure)

The config is a single JSON document::

    {
      "model": {"pspin": {"N": 20}},        # or {"lz": {"h": 0.1}}; N may be a list
      "protocol": ["qa", "cd1", "cd2"],     # or a single name
      "frame": "lab",                       # or "rotated"; qa always runs in lab
      "tau": {"min": 0.1, "max": 1e5, "points": 25},   # or a number, or a list
      "gamma_init": 0.1,
      "p_r": 0.99,                                     # optional
      "integrator": {"method": "auto", "steps": "auto",
                     "norm_tolerance": 1e-6, "convergence_check": false},
      "outputs": {"fidelity": true, "residual": true, "tts": true,
                  "spectrum": {"samples": 51}}
    }

Unknown keys are rejected.  The gamma schedule follows the protocol: "qa"
and "cd1" run with constant gamma = gamma_init, while "cd2" runs with the
linked schedule of its model (gamma_init + lam for the spin model, 1 - lam
for the two-level model).  Output is CSV with the fixed header
``protocol,frame,N,tau,gamma_init,fidelity,residual_energy,tts,norm_drift,steps``
or JSON lines (``--format json``); floats carry 17 significant digits.
Everything is deterministic; parallel cells (``--jobs``) are re-sorted into
canonical (protocol, N, tau) order before writing.

Exit codes: 0 success, 2 config error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from . import dynamics, gauge, metrics, model, oracle, schedules
from .errors import CdAnnealError, ConfigError, IntegrationError
from .gauge import LandauZenerModel, PSpinModel
from .model import ProtocolSpec

CSV_HEADER = "protocol,frame,N,tau,gamma_init,fidelity,residual_energy,tts,norm_drift,steps"
SPECTRUM_HEADER = "t_over_tau,index,eigenvalue,occupation"
MINIMA_HEADER = "protocol,N,window,tau,tts,is_boundary,is_local_min,precision_warning"

_PROTOCOL_ORDER = {name: i for i, name in enumerate(model.PROTOCOLS)}

# Below this fidelity the time-to-solution is dominated by floating-point
# noise in 1 - F; such cells are emitted but flagged.
_PRECISION_FLOOR = 1e-12

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


@dataclass(frozen=True)
class RunConfig:
    """Validated run configuration (one model, grids over protocol/N/tau)."""

    model_kind: str  # "pspin" | "lz"
    sizes: tuple[int, ...]  # (1,) for the two-level model
    lz_field: float | None
    protocols: tuple[str, ...]
    frame: str
    taus: tuple[float, ...]
    gamma_init: float
    p_r: float
    integrator: dynamics.IntegratorConfig
    output_fidelity: bool
    output_residual: bool
    output_tts: bool
    spectrum_samples: Optional[int]


def _require_keys(mapping: dict, allowed: set[str], path: str):
    unknown = set(mapping) - allowed
    if unknown:
        raise ConfigError(f"{path}: unknown key(s) {sorted(unknown)}; allowed: {sorted(allowed)}")


def _as_number(value, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{path}: expected a number, got {value!r}")
    return float(value)


def _parse_taus(value) -> tuple[float, ...]:
    if isinstance(value, dict):
        _require_keys(value, {"min", "max", "points"}, "tau")
        for key in ("min", "max", "points"):
            if key not in value:
                raise ConfigError(f"tau: log grid needs 'min', 'max' and 'points'")
        lo = _as_number(value["min"], "tau.min")
        hi = _as_number(value["max"], "tau.max")
        points = value["points"]
        if not isinstance(points, int) or points < 2:
            raise ConfigError("tau.points: expected an integer >= 2")
        if not 0 < lo < hi:
            raise ConfigError("tau: need 0 < min < max")
        return tuple(float(t) for t in np.geomspace(lo, hi, points))
    if isinstance(value, list):
        taus = tuple(_as_number(v, "tau[]") for v in value)
    else:
        taus = (_as_number(value, "tau"),)
    if not taus or any(t <= 0 for t in taus):
        raise ConfigError("tau: values must be positive")
    return taus


def parse_config(raw: dict) -> RunConfig:
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a JSON object")
    _require_keys(
        raw,
        {"model", "protocol", "frame", "tau", "gamma_init", "p_r", "integrator", "outputs"},
        "config",
    )
    for key in ("model", "protocol", "tau", "gamma_init"):
        if key not in raw:
            raise ConfigError(f"config: missing required key '{key}'")

    mraw = raw["model"]
    if not isinstance(mraw, dict) or len(mraw) != 1:
        raise ConfigError("model: expected exactly one of {'pspin': {...}} or {'lz': {...}}")
    kind = next(iter(mraw))
    if kind == "pspin":
        _require_keys(mraw[kind], {"N"}, "model.pspin")
        nval = mraw[kind].get("N")
        sizes = nval if isinstance(nval, list) else [nval]
        for n in sizes:
            if not isinstance(n, int) or n < 2:
                raise ConfigError(f"model.pspin.N: expected integer(s) >= 2, got {n!r}")
        sizes = tuple(sizes)
        lz_field = None
    elif kind == "lz":
        _require_keys(mraw[kind], {"h"}, "model.lz")
        lz_field = _as_number(mraw[kind].get("h"), "model.lz.h")
        if lz_field == 0.0:
            raise ConfigError("model.lz.h: must be nonzero")
        sizes = (1,)
    else:
        raise ConfigError(f"model: unknown model '{kind}' (expected 'pspin' or 'lz')")

    praw = raw["protocol"]
    protocols = tuple(praw) if isinstance(praw, list) else (praw,)
    for p in protocols:
        if p not in model.PROTOCOLS:
            raise ConfigError(f"protocol: expected one of {model.PROTOCOLS}, got {p!r}")
    if len(set(protocols)) != len(protocols):
        raise ConfigError("protocol: duplicate entries")

    frame = raw.get("frame", model.FRAME_LAB)
    if frame not in model.FRAMES:
        raise ConfigError(f"frame: expected one of {model.FRAMES}, got {frame!r}")

    taus = _parse_taus(raw["tau"])
    gamma_init = _as_number(raw["gamma_init"], "gamma_init")
    if gamma_init == 0.0:
        raise ConfigError("gamma_init: must be nonzero")
    p_r = _as_number(raw.get("p_r", metrics.DEFAULT_SUCCESS_PROBABILITY), "p_r")
    if not 0.0 < p_r < 1.0:
        raise ConfigError("p_r: must lie in (0, 1)")

    iraw = raw.get("integrator", {})
    if not isinstance(iraw, dict):
        raise ConfigError("integrator: expected an object")
    _require_keys(iraw, {"method", "steps", "norm_tolerance", "convergence_check"}, "integrator")
    method = iraw.get("method", dynamics.METHOD_AUTO)
    steps = iraw.get("steps", "auto")
    steps = None if steps == "auto" else steps
    if steps is not None and (not isinstance(steps, int) or steps < 100):
        raise ConfigError("integrator.steps: expected 'auto' or an integer >= 100")
    tol = _as_number(iraw.get("norm_tolerance", 1e-6), "integrator.norm_tolerance")
    check = iraw.get("convergence_check", False)
    if not isinstance(check, bool):
        raise ConfigError("integrator.convergence_check: expected a boolean")
    try:
        integrator = dynamics.IntegratorConfig(
            method=method, steps=steps, norm_tolerance=tol, convergence_check=check
        )
    except ValueError as exc:
        raise ConfigError(f"integrator: {exc}") from exc

    oraw = raw.get("outputs", {})
    if not isinstance(oraw, dict):
        raise ConfigError("outputs: expected an object")
    _require_keys(oraw, {"fidelity", "residual", "tts", "spectrum"}, "outputs")
    flags = {}
    for key in ("fidelity", "residual", "tts"):
        val = oraw.get(key, True)
        if not isinstance(val, bool):
            raise ConfigError(f"outputs.{key}: expected a boolean")
        flags[key] = val
    spectrum_samples = None
    if "spectrum" in oraw:
        _require_keys(oraw["spectrum"], {"samples"}, "outputs.spectrum")
        spectrum_samples = oraw["spectrum"].get("samples")
        if not isinstance(spectrum_samples, int) or spectrum_samples < 2:
            raise ConfigError("outputs.spectrum.samples: expected an integer >= 2")

    return RunConfig(
        model_kind=kind,
        sizes=sizes,
        lz_field=lz_field,
        protocols=protocols,
        frame=frame,
        taus=taus,
        gamma_init=gamma_init,
        p_r=p_r,
        integrator=integrator,
        output_fidelity=flags["fidelity"],
        output_residual=flags["residual"],
        output_tts=flags["tts"],
        spectrum_samples=spectrum_samples,
    )


def load_config(path: str) -> RunConfig:
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    return parse_config(raw)


def _schedule_for(cfg: RunConfig, protocol: str, tau: float) -> schedules.ScheduleSpec:
    # Traditional annealing and the single-parameter drive share the
    # constant-field Hamiltonian (that is what the latter converges to at
    # long anneal times); only the two-parameter drive links gamma to the
    # ramp.
    if protocol in (model.PROTOCOL_QA, model.PROTOCOL_CD1):
        return schedules.ScheduleSpec.constant(tau, cfg.gamma_init)
    if cfg.model_kind == "pspin":
        return schedules.ScheduleSpec.linked_pspin(tau, cfg.gamma_init)
    return schedules.ScheduleSpec.linked_lz(tau)


def _protocol_for(cfg: RunConfig, protocol: str, n: int) -> ProtocolSpec:
    if cfg.model_kind == "pspin":
        m = PSpinModel(n)
    else:
        m = LandauZenerModel(cfg.lz_field)
    return ProtocolSpec(protocol=protocol, model=m, frame=cfg.frame)


def _run_cell(cfg: RunConfig, protocol: str, n: int, tau: float, spectrum=None):
    spec = _schedule_for(cfg, protocol, tau)
    pspec = _protocol_for(cfg, protocol, n)
    record = {
        "protocol": protocol,
        "frame": pspec.effective_frame,
        "N": n,
        "tau": tau,
        "gamma_init": spec.gamma_init,
        "fidelity": math.nan,
        "residual_energy": math.nan,
        "tts": math.nan,
        "norm_drift": math.nan,
        "steps": 0,
        "status": "ok",
        "error": None,
        "result": None,
    }
    try:
        result = dynamics.run_protocol(
            spec, pspec, cfg.integrator, p_r=cfg.p_r, spectrum_samples=spectrum
        )
    except IntegrationError as exc:
        record["status"] = "failed"
        record["error"] = str(exc)
        if exc.diagnostics is not None:
            record["norm_drift"] = exc.diagnostics.norm_drift
            record["steps"] = exc.diagnostics.steps
        return record
    record["fidelity"] = result.fidelity
    record["residual_energy"] = result.residual_energy
    record["tts"] = result.tts
    record["norm_drift"] = result.diagnostics.norm_drift
    record["steps"] = result.diagnostics.steps
    record["result"] = result
    return record


def _execute_cells(cfg: RunConfig, jobs: int):
    cells = [
        (protocol, n, tau)
        for protocol in cfg.protocols
        for n in cfg.sizes
        for tau in cfg.taus
    ]
    if jobs <= 1:
        records = [_run_cell(cfg, *cell) for cell in cells]
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(lambda cell: _run_cell(cfg, *cell), cells))
    records.sort(key=lambda r: (_PROTOCOL_ORDER[r["protocol"]], r["N"], r["tau"]))
    return records


def _fmt(value) -> str:
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return f"{value:.17g}"
    return str(value)


def _record_csv_row(record: dict, cfg: RunConfig) -> str:
    cells = [
        record["protocol"],
        record["frame"],
        str(record["N"]),
        _fmt(float(record["tau"])),
        _fmt(float(record["gamma_init"])),
        _fmt(float(record["fidelity"])) if cfg.output_fidelity else "",
        _fmt(float(record["residual_energy"])) if cfg.output_residual else "",
        _fmt(float(record["tts"])) if cfg.output_tts else "",
        _fmt(float(record["norm_drift"])),
        str(record["steps"]),
    ]
    return ",".join(cells)


def _record_json_line(record: dict, cfg: RunConfig) -> str:
    def clean(value):
        if isinstance(value, float) and (math.isnan(value) or math.isinf(value)):
            return _fmt(value)
        return value

    payload = {
        "type": "cell",
        "protocol": record["protocol"],
        "frame": record["frame"],
        "N": record["N"],
        "tau": record["tau"],
        "gamma_init": record["gamma_init"],
        "fidelity": clean(record["fidelity"]) if cfg.output_fidelity else None,
        "residual_energy": clean(record["residual_energy"]) if cfg.output_residual else None,
        "tts": clean(record["tts"]) if cfg.output_tts else None,
        "norm_drift": clean(record["norm_drift"]),
        "steps": record["steps"],
        "status": record["status"],
    }
    if record["error"]:
        payload["error"] = record["error"]
    return json.dumps(payload, sort_keys=True)


def _emit(text: str, out: Optional[str]):
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _records_text(records, cfg: RunConfig, fmt: str) -> str:
    if fmt == "csv":
        lines = [CSV_HEADER] + [_record_csv_row(r, cfg) for r in records]
    else:
        lines = [_record_json_line(r, cfg) for r in records]
    return "\n".join(lines) + "\n"


def cmd_run(cfg: RunConfig, out: Optional[str], fmt: str, jobs: int) -> int:
    records = _execute_cells(cfg, jobs)
    _emit(_records_text(records, cfg, fmt), out)
    failed = [r for r in records if r["status"] != "ok"]
    for r in failed:
        print(
            f"cell failed: {r['protocol']} N={r['N']} tau={r['tau']}: {r['error']}",
            file=sys.stderr,
        )
    return EXIT_NUMERICAL if failed else EXIT_OK


def _sweep_minima(records) -> list[dict]:
    """Short-window global minima and long-window local minima of TTS."""
    groups: dict[tuple[str, int], list[dict]] = {}
    for r in records:
        groups.setdefault((r["protocol"], r["N"]), []).append(r)
    rows = []
    for (protocol, n), cells in groups.items():
        cells.sort(key=lambda r: r["tau"])
        taus = [r["tau"] for r in cells]
        tts_vals = [r["tts"] for r in cells]
        grid_lo, grid_hi = taus[0], taus[-1]

        def flagged(indices):
            return any(
                not math.isnan(cells[i]["fidelity"]) and cells[i]["fidelity"] < _PRECISION_FLOOR
                for i in indices
            )

        short = [i for i, t in enumerate(taus) if t <= 1.0]
        if short:
            best = min(short, key=lambda i: tts_vals[i])
            rows.append(
                {
                    "protocol": protocol,
                    "N": n,
                    "window": "short",
                    "tau": taus[best],
                    "tts": tts_vals[best],
                    "is_boundary": taus[best] in (grid_lo, grid_hi),
                    "is_local_min": _is_local_min(tts_vals, best),
                    "precision_warning": flagged(short),
                }
            )
        long_idx = [i for i, t in enumerate(taus) if t >= 10.0]
        if long_idx:
            local = [i for i in long_idx if _is_local_min(tts_vals, i)]
            pick_from = local if local else long_idx
            best = min(pick_from, key=lambda i: tts_vals[i])
            rows.append(
                {
                    "protocol": protocol,
                    "N": n,
                    "window": "long",
                    "tau": taus[best],
                    "tts": tts_vals[best],
                    "is_boundary": taus[best] in (grid_lo, grid_hi),
                    "is_local_min": bool(local),
                    "precision_warning": flagged(long_idx),
                }
            )
    window_order = {"short": 0, "long": 1}
    rows.sort(key=lambda r: (_PROTOCOL_ORDER[r["protocol"]], r["N"], window_order[r["window"]]))
    return rows


def _is_local_min(values, i) -> bool:
    left_ok = i == 0 or values[i] <= values[i - 1]
    right_ok = i == len(values) - 1 or values[i] <= values[i + 1]
    interior = 0 < i < len(values) - 1
    return interior and left_ok and right_ok


def _minima_text(rows, fmt: str) -> str:
    if fmt == "csv":
        lines = [MINIMA_HEADER]
        for r in rows:
            lines.append(
                ",".join(
                    [
                        r["protocol"],
                        str(r["N"]),
                        r["window"],
                        _fmt(float(r["tau"])),
                        _fmt(float(r["tts"])),
                        str(r["is_boundary"]).lower(),
                        str(r["is_local_min"]).lower(),
                        str(r["precision_warning"]).lower(),
                    ]
                )
            )
        return "\n".join(lines) + "\n"
    lines = [json.dumps({"type": "minimum", **r}, sort_keys=True) for r in rows]
    return "\n".join(lines) + "\n"


def _minima_out_path(out: str) -> str:
    p = Path(out)
    return str(p.with_name(p.stem + ".minima" + p.suffix))


def cmd_sweep(cfg: RunConfig, out: Optional[str], fmt: str, jobs: int) -> int:
    if len(cfg.taus) < 2:
        raise ConfigError("sweep requires a tau list or log grid with at least 2 points")
    records = _execute_cells(cfg, jobs)
    minima = _sweep_minima(records)
    if out is None:
        _emit(_records_text(records, cfg, fmt), None)
        if fmt == "csv":
            sys.stdout.write("\n")
        _emit(_minima_text(minima, fmt), None)
    else:
        _emit(_records_text(records, cfg, fmt), out)
        _emit(_minima_text(minima, fmt), _minima_out_path(out))
    failed = [r for r in records if r["status"] != "ok"]
    return EXIT_NUMERICAL if failed else EXIT_OK


def cmd_spectrum(cfg: RunConfig, out: Optional[str], fmt: str) -> int:
    if len(cfg.protocols) != 1 or len(cfg.sizes) != 1 or len(cfg.taus) != 1:
        raise ConfigError("spectrum requires a single (protocol, N, tau) cell")
    if cfg.spectrum_samples is None:
        raise ConfigError("spectrum requires outputs.spectrum.samples (>= 2)")
    protocol, n, tau = cfg.protocols[0], cfg.sizes[0], cfg.taus[0]
    record = _run_cell(cfg, protocol, n, tau, spectrum=cfg.spectrum_samples)
    if record["status"] != "ok":
        print(f"cell failed: {record['error']}", file=sys.stderr)
        return EXIT_NUMERICAL
    trace = record["result"].occupations
    lines = []
    if fmt == "csv":
        lines.append(SPECTRUM_HEADER)
        for i, t in enumerate(trace.times):
            for j in range(trace.energies.shape[1]):
                lines.append(
                    ",".join(
                        [
                            _fmt(float(t / tau)),
                            str(j),
                            _fmt(float(trace.energies[i, j])),
                            _fmt(float(trace.occupations[i, j])),
                        ]
                    )
                )
    else:
        for i, t in enumerate(trace.times):
            for j in range(trace.energies.shape[1]):
                lines.append(
                    json.dumps(
                        {
                            "type": "spectrum",
                            "t_over_tau": t / tau,
                            "index": j,
                            "eigenvalue": float(trace.energies[i, j]),
                            "occupation": float(trace.occupations[i, j]),
                        },
                        sort_keys=True,
                    )
                )
    _emit("\n".join(lines) + "\n", out)
    return EXIT_OK


def _check_operator_identity():
    worst = 0.0
    sizes = (2, 3, 4)
    for n in sizes:
        full = oracle.build_full_operators(n)
        coll = model.build_collective_operators(n)
        ident = (np.linalg.matrix_power(full.sz, 3) - (3 * n - 2) * full.sz) / 6.0
        worst = max(worst, float(np.max(np.abs(ident - full.zzz))))
        p = oracle.dicke_embedding(n)
        for full_op, coll_op in ((full.sx, coll.mx), (full.sy, coll.my), (full.sz, coll.mz)):
            worst = max(worst, float(np.max(np.abs(p.T @ full_op @ p - coll_op))))
    return worst < 1e-12, f"N={sizes}, max deviation {worst:.2e}"


def _check_deviation_dual_path():
    rng = np.random.default_rng(7)
    worst = 0.0
    sizes = (2, 3, 4)
    for n in sizes:
        for _ in range(3):
            lv, gv, coeff = rng.uniform(0.05, 0.95), rng.uniform(0.05, 2.0), rng.uniform(-2, 2)
            for which in ("lambda", "gamma"):
                d = oracle.hermitian_g(lv, gv, coeff, which, n, via="definition")
                e = oracle.hermitian_g(lv, gv, coeff, which, n, via="expanded")
                worst = max(worst, float(np.max(np.abs(d - e))))
    return worst < 1e-12, f"N={sizes}, max deviation {worst:.2e}"


def _check_action_dual_path():
    rng = np.random.default_rng(8)
    worst = 0.0
    sizes = (2, 3, 4)
    for n in sizes:
        for _ in range(3):
            lv, gv = rng.uniform(0.05, 0.95), rng.uniform(0.05, 2.0)
            ab = rng.uniform(-2, 2, size=2)
            s1 = oracle.action_trace(lv, gv, ab[0], ab[1], n, via="matrices")
            s2 = oracle.action_trace(lv, gv, ab[0], ab[1], n, via="closed_form")
            worst = max(worst, abs(s1 - s2) / abs(s1))
    return worst < 1e-9, f"N={sizes}, max relative deviation {worst:.2e}"


def _check_action_stationarity():
    rng = np.random.default_rng(9)
    worst = 0.0
    sizes = (2, 3, 4)
    for n in sizes:
        for _ in range(3):
            lv, gv = rng.uniform(0.05, 0.95), rng.uniform(0.05, 2.0)
            co = gauge.pspin_coefficients(lv, gv, n)
            s = oracle.action_trace(lv, gv, co.alpha, co.beta, n)
            da, db = oracle.action_gradient_fd(lv, gv, co.alpha, co.beta, n)
            worst = max(worst, max(abs(da), abs(db)) / abs(s))
    return worst < 1e-6, f"N={sizes}, max |grad|/|S| {worst:.2e}"


def _check_action_minimization():
    worst = 0.0
    sizes = (2, 3, 4)
    for n in sizes:
        co = gauge.pspin_coefficients(0.4, 0.7, n)
        a, b = oracle.minimize_action(0.4, 0.7, n)
        worst = max(worst, abs(a - co.alpha), abs(b - co.beta))
    return worst < 1e-6, f"N={sizes}, max coefficient deviation {worst:.2e}"


def _check_subspace_equivalence():
    worst = 0.0
    sizes = (2, 3, 4)
    for n in sizes:
        for protocol, spec in (
            (model.PROTOCOL_QA, schedules.ScheduleSpec.constant(1.0, 0.1)),
            (model.PROTOCOL_CD2, schedules.ScheduleSpec.linked_pspin(1.0, 0.1)),
        ):
            pspec = ProtocolSpec(protocol, PSpinModel(n))
            sub = dynamics.run_protocol(spec, pspec)
            fullr = oracle.full_run_protocol(spec, pspec)
            worst = max(worst, abs(sub.fidelity - fullr.fidelity))
    return worst < 1e-8, f"N={sizes}, max |dF| {worst:.2e}"


def _check_frame_equivalence():
    worst = 0.0
    for tau in (1.0, 10.0):
        spec = schedules.ScheduleSpec.linked_pspin(tau, 0.1)
        lab = dynamics.run_protocol(spec, ProtocolSpec("cd2", PSpinModel(4), frame="lab"))
        rot = dynamics.run_protocol(spec, ProtocolSpec("cd2", PSpinModel(4), frame="rotated"))
        worst = max(
            worst,
            abs(lab.fidelity - rot.fidelity),
            abs(lab.residual_energy - rot.residual_energy),
        )
    return worst < 1e-6, f"N=4, tau in (1, 10), max deviation {worst:.2e}"


def _check_two_level_exact_drive():
    spec = schedules.ScheduleSpec.constant(1.0, 1.0)
    res = dynamics.run_protocol(spec, ProtocolSpec("cd1", LandauZenerModel(0.1)))
    return res.fidelity >= 1.0 - 1e-6, f"F = {res.fidelity:.12f}"


_VALIDATION_CHECKS = {
    "operator-identity": _check_operator_identity,
    "deviation-dual-path": _check_deviation_dual_path,
    "action-dual-path": _check_action_dual_path,
    "action-stationarity": _check_action_stationarity,
    "action-minimization": _check_action_minimization,
    "subspace-equivalence": _check_subspace_equivalence,
    "frame-equivalence": _check_frame_equivalence,
    "two-level-exact-drive": _check_two_level_exact_drive,
}


def validate_report(names=None) -> tuple[bool, list[str]]:
    """Oracle-backed consistency checks; returns (all_passed, report lines)."""
    if names is None:
        names = list(_VALIDATION_CHECKS)
    lines = []
    passed = True
    for name in names:
        ok, detail = _VALIDATION_CHECKS[name]()
        passed = passed and ok
        lines.append(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
    return passed, lines


def cmd_validate() -> int:
    passed, lines = validate_report()
    for line in lines:
        print(line)
    print("all checks passed" if passed else "validation FAILED")
    return EXIT_OK if passed else EXIT_NUMERICAL


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cdanneal",
        description="Annealing-protocol simulator with variational counter-diabatic driving",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, helptext in (
        ("run", "run every (protocol, N, tau) cell of the config"),
        ("sweep", "run the grid and emit minimal time-to-solution tables"),
        ("spectrum", "instantaneous spectrum/occupations for a single cell"),
    ):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--config", required=True, help="path to the JSON config")
        p.add_argument("--out", default=None, help="output file (default: stdout)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        if name != "spectrum":
            p.add_argument("--jobs", type=int, default=1, help="parallel cells")
    sub.add_parser("validate", help="run the oracle-backed self checks")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "validate":
            return cmd_validate()
        cfg = load_config(args.config)
        if args.command == "run":
            return cmd_run(cfg, args.out, args.format, args.jobs)
        if args.command == "sweep":
            return cmd_sweep(cfg, args.out, args.format, args.jobs)
        return cmd_spectrum(cfg, args.out, args.format)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except CdAnnealError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
