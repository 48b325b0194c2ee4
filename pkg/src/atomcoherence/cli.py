"""Command-line front end.

``atomcoherence run CONFIG`` executes the task named in the config and
writes a CSV of the result plus a JSON sidecar; ``atomcoherence <task>
CONFIG`` does the same with the task forced; ``atomcoherence plot CSV``
writes a gnuplot script for a result file.

Exit codes: 0 success, 2 invalid input, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import dataclasses
import datetime
import io
import json
import math
import os
import sys
from pathlib import Path
from typing import Dict, Tuple

import numpy as np

from . import __version__
from . import doppler, fwm, lics, local_field, optimizer, relaxation, sodium, spectra
from .errors import ConfigError, MissingColumns, NumericalError, ValidationError
from .scheme import FieldSet, LevelScheme
from .steady_state import saturated_populations
from .units import parse_quantity, to_angular

TASKS = ("spectrum", "sumrule", "sodium", "fwm", "localfield", "doppler", "lics",
         "doublet", "optimize")

_SCHEME_KEYS = {f.name for f in dataclasses.fields(LevelScheme)} | {"n_l", "n_g", "n_n", "n_m"}
_FIELD_KEYS = {f"g{i}" for i in range(1, 5)} | {f"omega{i}" for i in range(1, 5)} | {"flipped"}
_SODIUM_KEYS = {f.name for f in dataclasses.fields(sodium.CollisionModel)} | {
    "kappa", "power_w", "area_cm2"}

#: Allowed keys per section. Keys listed in ``_RATES`` accept unit tags.
SECTIONS: Dict[str, set] = {
    "task": {"name", "seed"},
    "scheme": _SCHEME_KEYS,
    "fields": _FIELD_KEYS,
    "grid": {"start", "stop", "points", "factor"},
    "output": {"csv", "json"},
    "spectrum": {"kind"},
    "sumrule": {"transition", "g3_values"},
    "sodium": _SODIUM_KEYS,
    "fwm": {"g2", "g3", "scan", "x1", "x02", "xs", "density", "length"},
    "localfield": {"density", "dipole_debye", "ground_shift"},
    "doppler": {"u", "k1", "k2", "k3", "n_g", "n_n", "n_l", "n_m", "scheme", "method",
                "points", "span", "tol"},
    "lics": {"model", "amp_g", "amp_n", "amp_l", "lo", "hi", "center", "width", "span",
             "omega_mu", "width_gm", "width_gn", "width_gl", "rabi_mn", "x_term", "q_mn",
             "scan", "delta1", "delta2", "delta_l", "eta", "k"},
    "doublet": {"decay_n", "decay_n2", "decay_g", "collisional"},
    "optimize": {"target", "objective", "variables", "tolerance", "grid_points", "restarts"},
}

_RATES = {
    "scheme": (_SCHEME_KEYS - {"n_l", "n_g", "n_n", "n_m"}),
    "fields": _FIELD_KEYS - {"flipped"},
    "grid": {"start", "stop"},
    "sodium": {"decay_g", "decay_m", "width", "width_gm", "width_gn", "nu_mg", "nu_gm"},
    "localfield": {"ground_shift"},
    "doppler": set(),
    "lics": {"lo", "hi", "center", "width", "omega_mu", "width_gm", "width_gn", "width_gl",
             "rabi_mn", "delta1", "delta2", "delta_l", "eta"},
    "doublet": {"decay_n", "decay_n2", "decay_g", "collisional"},
}

_TEXT = {("spectrum", "kind"), ("fwm", "scan"), ("doppler", "scheme"), ("doppler", "method"),
         ("lics", "model"), ("lics", "x_term"), ("lics", "scan"), ("lics", "k"),
         ("optimize", "target"), ("optimize", "objective"), ("optimize", "variables"),
         ("sumrule", "g3_values"), ("fields", "flipped"), ("output", "csv"),
         ("output", "json"), ("task", "name")}

_INTS = {("task", "seed"), ("grid", "points"), ("sumrule", "transition"),
         ("doppler", "points"), ("optimize", "grid_points"), ("optimize", "restarts")}


# -- config -----------------------------------------------------------------

@dataclasses.dataclass(frozen=True)
class RunConfig:
    """Validated configuration: raw strings plus parsed values."""

    raw: Dict[str, Dict[str, str]]
    values: Dict[str, Dict[str, object]]
    task: str
    seed: int
    source: str

    def section(self, name: str) -> Dict[str, object]:
        return self.values.get(name, {})

    def require(self, name: str) -> Dict[str, object]:
        if name not in self.values:
            raise ConfigError(f"missing {name}: section [{name}] is required by task {self.task!r}")
        return self.values[name]


def _parse_value(section: str, key: str, text: str):
    where = f"[{section}] {key}"
    text = text.strip()
    if (section, key) in _TEXT:
        return text
    try:
        if (section, key) in _INTS:
            return int(text)
        parts = text.split()
        if len(parts) > 2 or not parts:
            raise ValueError(text)
        number = complex(parts[0].replace("i", "j")) if "j" in parts[0] or "i" in parts[0] else float(parts[0])
    except ValueError:
        raise ConfigError(f"{where}: cannot parse {text!r}") from None
    if len(parts) == 2:
        if key not in _RATES.get(section, set()):
            raise ConfigError(f"{where}: unit tag not allowed for a dimensionless value")
        try:
            number = number * to_angular(1.0, parts[1])
        except ConfigError as exc:
            raise ConfigError(f"{where}: {exc}") from None
    if isinstance(number, complex) and number.imag == 0:
        number = number.real
    if not np.isfinite(number):
        raise ConfigError(f"{where}: non-finite value")
    return number


def parse_config_text(text: str, source: str = "<string>", *, task: str = None,
                      seed: int = None) -> RunConfig:
    """Parse INI text or a JSON sidecar into a :class:`RunConfig`."""
    stripped = text.lstrip()
    raw: Dict[str, Dict[str, str]] = {}
    if stripped.startswith("{"):
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{source}: invalid JSON ({exc})") from None
        doc = doc.get("config", doc)
        if not isinstance(doc, dict):
            raise ConfigError(f"{source}: JSON config must be an object of sections")
        for sec, body in doc.items():
            if not isinstance(body, dict):
                raise ConfigError(f"[{sec}]: section must be a key-value object")
            raw[sec] = {str(k): str(v) for k, v in body.items()}
    else:
        parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
        parser.optionxform = str
        try:
            parser.read_string(text, source=source)
        except configparser.Error as exc:
            raise ConfigError(f"{source}: {exc}") from None
        raw = {sec: dict(parser.items(sec)) for sec in parser.sections()}

    values: Dict[str, Dict[str, object]] = {}
    for sec, body in raw.items():
        if sec not in SECTIONS:
            raise ConfigError(f"[{sec}]: unknown section")
        for key in body:
            if key not in SECTIONS[sec]:
                raise ConfigError(f"[{sec}] {key}: unknown key")
        values[sec] = {k: _parse_value(sec, k, v) for k, v in body.items()}

    if "scheme" not in raw and "sodium" not in raw and "doublet" not in raw and "fwm" not in raw \
            and "lics" not in raw:
        raise ConfigError("missing scheme: no [scheme] (or task model) section in config")
    name = task or values.get("task", {}).get("name")
    if name is None:
        raise ConfigError("[task] name: missing task selector")
    if name not in TASKS:
        raise ConfigError(f"[task] name: unknown task {name!r}; expected one of {TASKS}")
    if seed is None:
        seed = values.get("task", {}).get("seed", 0)
    raw.setdefault("task", {})
    raw["task"] = {**raw["task"], "name": name, "seed": str(seed)}
    return RunConfig(raw, values, name, int(seed), source)


def load_config(path, **kw) -> RunConfig:
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config ({exc.strerror})") from None
    return parse_config_text(text, str(p), **kw)


def thread_count() -> int:
    """Worker threads from ``ATOMCOHERENCE_THREADS`` (default: logical cores)."""
    text = os.environ.get("ATOMCOHERENCE_THREADS", "").strip()
    if not text:
        return os.cpu_count() or 1
    try:
        n = int(text)
    except ValueError:
        raise ConfigError(f"ATOMCOHERENCE_THREADS: not an integer ({text!r})") from None
    if n < 1:
        raise ConfigError("ATOMCOHERENCE_THREADS: must be >= 1")
    return n


# -- builders -----------------------------------------------------------------

def build_scheme(cfg: RunConfig) -> LevelScheme:
    sec = dict(cfg.require("scheme"))
    pops = {k: sec.pop(k) for k in ("n_l", "n_g", "n_n", "n_m") if k in sec}
    if pops:
        if len(pops) != 4:
            raise ConfigError("[scheme] n_*: give all four populations or none")
        if any(k.startswith("pump_") for k in sec):
            raise ConfigError("[scheme] pump_*: populations and pumps are exclusive")
        return LevelScheme.from_populations(**pops, **_real(sec, "scheme"))
    return LevelScheme(**_real(sec, "scheme"))


def _real(sec, name):
    out = {}
    for k, v in sec.items():
        if isinstance(v, complex):
            raise ConfigError(f"[{name}] {k}: must be real")
        out[k] = v
    return out


def build_fields(cfg: RunConfig) -> FieldSet:
    sec = dict(cfg.section("fields"))
    flipped = sec.pop("flipped", None)
    kw = {}
    if flipped is not None:
        flags = [s.strip().lower() in ("1", "true", "yes") for s in flipped.split(",")]
        if len(flags) != 4:
            raise ConfigError("[fields] flipped: four comma-separated flags expected")
        kw["flipped"] = tuple(flags)
    return FieldSet(**sec, **kw)


def build_grid(cfg: RunConfig, scale: float, *, default_factor: float = 20.0) -> np.ndarray:
    sec = cfg.section("grid")
    points = sec.get("points", 4001)
    if points < 2:
        raise ConfigError("[grid] points: need at least 2")
    if "start" in sec or "stop" in sec:
        if not ("start" in sec and "stop" in sec) or not sec["stop"] > sec["start"]:
            raise ConfigError("[grid] start/stop: both required with stop > start")
        return np.linspace(sec["start"], sec["stop"], points)
    return spectra.default_grid(scale, points, sec.get("factor", default_factor))


def build_sodium(cfg: RunConfig) -> sodium.CollisionModel:
    sec = {k: v for k, v in cfg.require("sodium").items()
           if k not in ("kappa", "power_w", "area_cm2")}
    return sodium.CollisionModel(**sec)


# -- tasks ----------------------------------------------------------------------

Result = Tuple[Dict[str, np.ndarray], Dict[str, object]]


def _task_spectrum(cfg: RunConfig, threads: int) -> Result:
    scheme, fields = build_scheme(cfg), build_fields(cfg)
    kind = cfg.section("spectrum").get("kind", "vscheme")
    if kind == "vscheme":
        grid = build_grid(cfg, max(scheme.width_ng, abs(fields.g3)))
        s = spectra.vscheme_form_factor(scheme, fields.g3, fields.omega3, grid)
        pops = s.meta["populations"]
        summary = {"populations": dataclasses.asdict(pops),
                   "threshold": spectra.gain_threshold(scheme, fields)._asdict()}
    elif kind == "absorption4":
        grid = build_grid(cfg, max(scheme.width_lm, abs(fields.g1), abs(fields.g2)))
        s = spectra.absorption_spectrum_4(scheme, fields, grid)
        summary = {"amplification": spectra.amplification_condition_4(scheme, fields)._asdict()}
    else:
        raise ConfigError(f"[spectrum] kind: unknown {kind!r}; expected vscheme or absorption4")
    return {"detuning": s.detuning, "re": s.real, "im": s.imag}, summary


def _task_sumrule(cfg: RunConfig, threads: int) -> Result:
    scheme, fields = build_scheme(cfg), build_fields(cfg)
    sec = cfg.section("sumrule")
    transition = sec.get("transition", 2)
    text = sec.get("g3_values")
    g3s = [parse_quantity(t) for t in text.split(",")] if text else [abs(fields.g3)]
    pops = saturated_populations(scheme, fields)
    rows = [spectra.sum_rule_check(scheme, fields.replace(g3=g), transition=transition,
                                   populations=pops) for g in g3s]
    ints = np.array([r.integral for r in rows])
    summary = {"delta_r": rows[0].delta_r,
               "spread": float((ints.max() - ints.min()) / abs(ints).max()) if ints.any() else 0.0}
    return {"g3": np.array(g3s), "integral": ints,
            "delta_r": np.array([r.delta_r for r in rows])}, summary


def _task_sodium(cfg: RunConfig, threads: int) -> Result:
    model = build_sodium(cfg)
    sec = cfg.section("sodium")
    est = sodium.estimate_rates(model, sec.get("power_w", 0.1), sec.get("area_cm2", 1e-5))
    kappa = sec.get("kappa", sodium.kappa_root(model))
    g3 = sodium.g3_for_kappa(model, kappa)
    scheme = sodium.vscheme(model)
    pops = sodium.level_populations(model, g3)
    grid = build_grid(cfg, max(scheme.width_ng, g3))
    s = spectra.vscheme_form_factor(scheme, g3, 0.0, grid, pops)
    summary = {
        "estimates": est._asdict(),
        "kappa_root_full": sodium.kappa_root(model),
        "kappa_root_simplified": sodium.kappa_root(model, simplified=True),
        "operating_kappa": kappa,
        "line_centre_absorption": float(spectra.vscheme_form_factor(
            scheme, g3, 0.0, [0.0], pops).imag[0]),
    }
    return {"detuning": s.detuning, "re": s.real, "im": s.imag}, summary


def _task_fwm(cfg: RunConfig, threads: int) -> Result:
    sec = dict(cfg.require("fwm"))
    scan = sec.pop("scan", "x1")
    if scan not in ("x1", "x02", "xs"):
        raise ConfigError("[fwm] scan: expected x1, x02 or xs")
    density = sec.pop("density", 1.0)
    length = sec.pop("length", 0.0)
    grid = build_grid(cfg, 1.0 + abs(sec.get("g2", 0.0)) ** 0.5 + abs(sec.get("g3", 0.0)) ** 0.5)
    sec[scan] = grid
    mc = fwm.MixingConfig(**sec)
    chi1, _chis, chinl = fwm.susceptibilities(mc)
    power = fwm.absorbed_power_scaling(mc, density, length)
    f1, fs, f = fwm.eit_factors(mc.replace(**{scan: 0.0}))
    summary = {"scan": scan, "f1_resonant": complex(f1), "fs_resonant": complex(fs),
               "f_resonant": complex(f)}
    return {"detuning": grid, "im_chi1": np.imag(chi1), "chinl_sq": np.abs(chinl) ** 2,
            "power": power}, summary


def _task_localfield(cfg: RunConfig, threads: int) -> Result:
    scheme, fields = build_scheme(cfg), build_fields(cfg)
    sec = cfg.require("localfield")
    if "density" not in sec or "dipole_debye" not in sec:
        raise ConfigError("[localfield] density, dipole_debye: both required")
    lf = local_field.LocalFieldConfig(sec["density"], sec["dipole_debye"] * local_field.DEBYE,
                                      sec.get("ground_shift", 0.0))
    grid = build_grid(cfg, max(scheme.width_lm, abs(fields.g3), lf.shift))
    s = local_field.dressed_probe_susceptibility(scheme, fields.g3, grid, lf, fields.omega3)
    c4 = lf.c4(scheme.width_lm)
    lfac = local_field.local_field_factor(s.meta["f"], c4)
    return ({"detuning": s.detuning, "re": s.real, "im": s.imag,
             "l4_re": lfac.real, "l4_im": lfac.imag},
            {"shift": lf.shift, "c4": c4, "self_broadening": lf.self_broadening})


def _task_doppler(cfg: RunConfig, threads: int) -> Result:
    scheme, fields = build_scheme(cfg), build_fields(cfg)
    sec = cfg.require("doppler")
    dc = doppler.DopplerConfig(**sec)
    grid = build_grid(cfg, max(dc.k1, dc.k2, dc.k3) * dc.u, default_factor=1.0)
    res = doppler.chi3_averaged(scheme, (grid, fields.omega2, fields.omega3), dc, threads=threads)
    cols = {"detuning": grid, "re": res.numeric.real, "im": res.numeric.imag}
    if res.closed_form is not None:
        cols["closed_re"] = res.closed_form.real
        cols["closed_im"] = res.closed_form.imag
    return cols, {"nodes": res.nodes, "method": res.method}


def _lics_couplings(sec) -> lics.CouplingMatrices:
    model = sec.get("model", "flat")
    amps = [sec.get(f"amp_{x}", 0.0) for x in lics.BOUND]
    if model == "flat":
        try:
            models = tuple(lics.FlatContinuum(a, sec["lo"], sec["hi"]) if a else None for a in amps)
        except KeyError as exc:
            raise ConfigError(f"[lics] {exc.args[0]}: required by the flat model") from None
    elif model == "lorentzian":
        try:
            models = tuple(lics.LorentzianContinuum(a, sec["center"], sec["width"],
                                                    sec.get("span", 10.0)) if a else None
                           for a in amps)
        except KeyError as exc:
            raise ConfigError(f"[lics] {exc.args[0]}: required by the Lorentzian model") from None
    else:
        raise ConfigError(f"[lics] model: unknown {model!r}; expected flat or lorentzian")
    k = sec.get("k")
    k = tuple(float(x) for x in k.split(",")) if k else None
    cc = lics.ContinuumCoupling(models, k_override=k)
    if "omega_mu" not in sec:
        raise ConfigError("[lics] omega_mu: required")
    return lics.derive_couplings(cc, sec["omega_mu"])


def _task_lics(cfg: RunConfig, threads: int) -> Result:
    sec = cfg.require("lics")
    couplings = _lics_couplings(sec)
    try:
        params = lics.LicsParams(sec["width_gm"], sec["width_gn"], sec["width_gl"],
                                 sec.get("rabi_mn", 0.0), sec.get("x_term", "saturation"),
                                 sec.get("q_mn"))
    except KeyError as exc:
        raise ConfigError(f"[lics] {exc.args[0]}: required") from None
    grid = build_grid(cfg, max(params.width_gm, params.width_gn, params.width_gl))
    sp = lics.lics_spectra(couplings, params, grid, scan=sec.get("scan", "omega1"),
                           **{k: sec[k] for k in ("delta1", "delta2", "delta_l", "eta") if k in sec})
    return ({"detuning": grid, "chi3_re": sp.chi3.real, "chi3_im": sp.chi3.imag,
             "alpha1": sp.alpha1, "alpha_mu": sp.alpha_mu},
            {"gamma": couplings.gamma.tolist(), "delta": couplings.delta.tolist(),
             "k": list(couplings.k)})


def _task_doublet(cfg: RunConfig, threads: int) -> Result:
    sec = cfg.require("doublet")
    fields = cfg.section("fields")
    try:
        base = relaxation.DoubletConfig.spontaneous(
            decay_n=sec["decay_n"], decay_n2=sec["decay_n2"], decay_g=sec.get("decay_g", 0.0),
            collisional=sec.get("collisional", 0.0), omega1=fields.get("omega1", 0.0),
            omega2=fields.get("omega2", 0.0))
    except KeyError as exc:
        raise ConfigError(f"[doublet] {exc.args[0]}: required") from None
    grid = build_grid(cfg, base.width_nn2)
    br = relaxation.interference_bracket(dataclasses.replace(base, omega=grid))
    return ({"detuning": grid, "re": br.real, "im": br.imag, "abs": np.abs(br)},
            {"contrast": relaxation.resonance_contrast(base), "mismatch": base.mismatch})


def parse_variables(text: str):
    """``"name:lo:hi[:log]; ..."`` into :class:`~atomcoherence.optimizer.Variable` s."""
    out = []
    for item in filter(None, (s.strip() for s in text.split(";"))):
        parts = [p.strip() for p in item.split(":")]
        if len(parts) not in (3, 4) or (len(parts) == 4 and parts[3] != "log"):
            raise ConfigError(f"[optimize] variables: cannot parse {item!r}")
        try:
            lo, hi = parse_quantity(parts[1]), parse_quantity(parts[2])
        except ConfigError as exc:
            raise ConfigError(f"[optimize] variables: {exc}") from None
        out.append(optimizer.Variable(parts[0], lo, hi, log=len(parts) == 4))
    return tuple(out)


def _task_optimize(cfg: RunConfig, threads: int) -> Result:
    sec = cfg.require("optimize")
    target_kind = sec.get("target", "sodium")
    if target_kind == "sodium":
        target = build_sodium(cfg)
    elif target_kind == "scheme":
        target = build_scheme(cfg)
    else:
        raise ConfigError("[optimize] target: expected sodium or scheme")
    if "variables" not in sec:
        raise ConfigError("[optimize] variables: required")
    problem = optimizer.OptimizationProblem(
        objective=sec.get("objective", "gain_center"), variables=parse_variables(sec["variables"]),
        tolerance=sec.get("tolerance", 0.0), grid_points=sec.get("grid_points", 32),
        restarts=sec.get("restarts", 4), seed=cfg.seed)
    rep = optimizer.optimize(problem, target, threads=threads)
    names = sorted(rep.point)
    summary = {"point": rep.point, "value": rep.value, "feasible": rep.feasible,
               "residual": rep.residual, "populations": dataclasses.asdict(rep.populations),
               "evaluations": rep.evaluations}
    return ({"variable": np.array(names), "value": np.array([rep.point[n] for n in names])},
            summary)


TASK_FUNCS = {"spectrum": _task_spectrum, "sumrule": _task_sumrule, "sodium": _task_sodium,
              "fwm": _task_fwm, "localfield": _task_localfield, "doppler": _task_doppler,
              "lics": _task_lics, "doublet": _task_doublet, "optimize": _task_optimize}


# -- output ---------------------------------------------------------------------

def format_csv(columns: Dict[str, np.ndarray]) -> str:
    """Header row plus ``%.17g`` values; independent of locale."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    names = list(columns)
    w.writerow(names)
    cols = [np.asarray(columns[n]) for n in names]
    for row in zip(*cols):
        w.writerow([v if isinstance(v, str) else "%.17g" % float(v) for v in row])
    return buf.getvalue()


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": float(obj.real), "im": float(obj.imag)}
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def execute(cfg: RunConfig, threads: int = 1) -> Result:
    """Run the configured task and return ``(columns, summary)``."""
    return TASK_FUNCS[cfg.task](cfg, threads)


def run(config_path, *, task: str = None, seed: int = None, csv_path=None, json_path=None,
        stderr=None) -> int:
    """Execute a config file and write its outputs; returns the exit code."""
    stderr = stderr or sys.stderr
    try:
        cfg = load_config(config_path, task=task, seed=seed)
        out = cfg.section("output")
        stem = Path(config_path).stem
        csv_path = Path(csv_path or out.get("csv") or f"{stem}.csv")
        json_path = Path(json_path or out.get("json") or csv_path.with_suffix(".json"))
        columns, summary = execute(cfg, thread_count())
    except ValidationError as exc:
        print(f"error: {exc}", file=stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=stderr)
        return 3
    csv_path.write_text(format_csv(columns), encoding="utf-8")
    sidecar = {
        "config": cfg.raw,
        "result": summary,
        "provenance": {
            "version": __version__,
            "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
            "seed": cfg.seed,
            "task": cfg.task,
            "csv": csv_path.name,
        },
    }
    json_path.write_text(json.dumps(_jsonable(sidecar), indent=2, sort_keys=True) + "\n",
                         encoding="utf-8")
    return 0


# -- plot script ------------------------------------------------------------------

_PANELS = (("chi3_re", "chi3_im"), ("alpha1",), ("alpha_mu",))


def read_header(csv_path) -> list:
    with open(csv_path, newline="", encoding="utf-8") as fh:
        row = next(csv.reader(fh), None)
    if not row:
        raise MissingColumns(f"{csv_path}: no header row")
    return [c.strip() for c in row]


def emit_plot_script(csv_path, script_path=None) -> Path:
    """Write a gnuplot script plotting every result column against ``detuning``.

    Spectrum files (``re``/``im``) give one panel with two traces; LICS
    files give three panels.

    Raises
    ------
    MissingColumns
        If the file lacks ``detuning`` or any column to plot against it.
    """
    csv_path = Path(csv_path)
    cols = read_header(csv_path)
    if "detuning" not in cols:
        raise MissingColumns(f"{csv_path}: missing column 'detuning'")
    if all(c in cols for c in ("chi3_re", "chi3_im", "alpha1", "alpha_mu")):
        panels = _PANELS
    elif "re" in cols or "im" in cols:
        if not ("re" in cols and "im" in cols):
            raise MissingColumns(f"{csv_path}: spectrum needs both 're' and 'im'")
        panels = (("re", "im"),)
    else:
        rest = tuple(c for c in cols if c != "detuning")
        if not rest:
            raise MissingColumns(f"{csv_path}: nothing to plot against 'detuning'")
        panels = tuple((c,) for c in rest)
    script_path = Path(script_path or csv_path.with_suffix(".gp"))
    lines = ["set datafile separator ','", "set key autotitle columnhead",
             "set xlabel 'detuning'"]
    if len(panels) > 1:
        lines.append(f"set multiplot layout {len(panels)},1")
    for panel in panels:
        traces = ", ".join(f"'{csv_path.name}' using \"detuning\":\"{c}\" with lines title '{c}'"
                           for c in panel)
        lines.append(f"plot {traces}")
    if len(panels) > 1:
        lines.append("unset multiplot")
    script_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return script_path


# -- entry point ---------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="atomcoherence",
                                 description="Coherence-controlled spectra of four-level atoms.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("config", help="INI config or JSON sidecar")
        p.add_argument("--seed", type=int, default=None, help="override [task] seed")
        p.add_argument("--csv", default=None, help="CSV output path")
        p.add_argument("--json", default=None, help="JSON sidecar path")

    common(sub.add_parser("run", help="run the task named in the config"))
    for t in TASKS:
        common(sub.add_parser(t, help=f"run the {t} task"))
    pp = sub.add_parser("plot", help="write a gnuplot script for a result CSV")
    pp.add_argument("csv")
    pp.add_argument("-o", "--output", default=None)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "plot":
        try:
            path = emit_plot_script(args.csv, args.output)
        except (OSError, ValidationError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
        print(path)
        return 0
    task = None if args.command == "run" else args.command
    return run(args.config, task=task, seed=args.seed, csv_path=args.csv, json_path=args.json)


if __name__ == "__main__":
    sys.exit(main())
