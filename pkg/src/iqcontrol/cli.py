"""Command-line front end: JSON config in, JSON report out.

Config and report use plain JSON; complex numbers are two-element
[re, im] arrays and matrices are row-major nested lists.  The report is
written to --out (summary then goes to stdout) or to stdout (summary
then goes to stderr), and carries a provenance block with the config
hash, the seed, and the library version, so identical configs produce
byte-identical reports apart from the timestamp field.

Exit status: 0 on success, 2 on configuration errors, 1 on runtime
errors; any nonzero exit writes a report containing an error record.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional, Union

import numpy as np

from . import __version__
from .algorithms import RunReport, run_algorithm1, run_algorithm2
from .amplification import (
    DEFAULT_L_MAX,
    GoodSubspace,
    amplified_state,
    make_plan,
)
from .controllability import ControllabilityConfig, assess
from .core import StateVector, SystemSpec
from .errors import ConfigError
from .hydrogen import case1_preset, case2_preset, hydrogen_spec
from .measurement import (
    MeasurementPartition,
    born_probabilities,
    measurement_histogram,
    sample_collapse,
)

MODES = (
    "analyze",
    "amplify",
    "algo1",
    "algo2",
    "hydrogen-case1",
    "hydrogen-case2",
    "measure-stats",
)
SAMPLING_MODES = ("algo1", "algo2", "hydrogen-case1", "hydrogen-case2", "measure-stats")
INITIAL_NORM_TOL = 1e-8

__all__ = ["RunConfig", "parse_config", "execute", "summarize", "main"]


# ---------------------------------------------------------------------------
# config parsing


@dataclass(frozen=True)
class RunConfig:
    """Validated run description, kept JSON-shaped for hashing and echo."""

    mode: str
    system: Optional[dict] = None
    initial: Optional[list] = None
    good: Optional[int] = None
    subspace: Optional[list[int]] = None
    phases: tuple[float, float] = (math.pi, math.pi)
    iterations: Union[int, str] = "auto"
    seed: Optional[int] = None
    shots: int = 1
    pre_rotation: bool = False
    l_max: int = DEFAULT_L_MAX
    tolerances: dict = field(default_factory=dict)
    repeat_until_success: bool = False
    out: Optional[str] = None

    def echo(self) -> dict:
        """JSON-serializable echo of everything that defines the run."""
        return {
            "mode": self.mode,
            "system": self.system,
            "initial": self.initial,
            "good": self.good,
            "subspace": self.subspace,
            "phases": list(self.phases),
            "iterations": self.iterations,
            "seed": self.seed,
            "shots": self.shots,
            "pre_rotation": self.pre_rotation,
            "l_max": self.l_max,
            "tolerances": self.tolerances,
            "repeat_until_success": self.repeat_until_success,
        }


def _fail(path: str, message: str):
    raise ConfigError(f"{path}: {message}")


def _require_int(value, path: str, minimum: Optional[int] = None) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        _fail(path, f"expected an integer, got {value!r}")
    if minimum is not None and value < minimum:
        _fail(path, f"must be >= {minimum}, got {value}")
    return value


def _require_number(value, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        _fail(path, f"expected a number, got {value!r}")
    return float(value)


def _parse_complex(value, path: str) -> complex:
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return complex(value)
    if isinstance(value, list) and len(value) == 2:
        return complex(_require_number(value[0], path + "[0]"),
                       _require_number(value[1], path + "[1]"))
    _fail(path, f"expected a number or an [re, im] pair, got {value!r}")


def _parse_vector(value, path: str) -> list[complex]:
    if not isinstance(value, list) or len(value) < 2:
        _fail(path, "expected a list of at least 2 amplitudes")
    return [_parse_complex(v, f"{path}[{k}]") for k, v in enumerate(value)]


def _validate_system(value, path: str) -> dict:
    if isinstance(value, str):
        value = {"preset": value}
    if not isinstance(value, dict):
        _fail(path, f"expected a system object or preset name, got {value!r}")
    if "preset" in value:
        if value["preset"] != "hydrogen":
            _fail(path + ".preset", f"unknown preset {value['preset']!r}")
        if "energy_gap" in value:
            gap = _require_number(value["energy_gap"], path + ".energy_gap")
            if gap <= 0:
                _fail(path + ".energy_gap", f"must be positive, got {gap}")
        return value
    for key in ("dim", "drift", "coupling"):
        if key not in value:
            _fail(path, f"missing required field {key!r}")
    dim = _require_int(value["dim"], path + ".dim", minimum=2)
    drift = value["drift"]
    if not isinstance(drift, list) or len(drift) != dim:
        _fail(path + ".drift", f"expected {dim} eigenvalues")
    for k, x in enumerate(drift):
        _require_number(x, f"{path}.drift[{k}]")
    coupling = value["coupling"]
    if not isinstance(coupling, list) or len(coupling) != dim:
        _fail(path + ".coupling", f"expected a {dim}x{dim} matrix")
    parsed = []
    for i, row in enumerate(coupling):
        if not isinstance(row, list) or len(row) != dim:
            _fail(f"{path}.coupling[{i}]", f"expected {dim} entries")
        parsed.append([_parse_complex(x, f"{path}.coupling[{i}][{j}]") for j, x in enumerate(row)])
    for i in range(dim):
        for j in range(dim):
            if abs(parsed[i][j] - parsed[j][i].conjugate()) > 1e-12:
                _fail(
                    f"{path}.coupling[{i}][{j}]",
                    f"not Hermitian: value {parsed[i][j]} does not match the "
                    f"conjugate of coupling[{j}][{i}] = {parsed[j][i]}",
                )
    return value


def _build_system(config: RunConfig) -> SystemSpec:
    sys_obj = config.system
    if sys_obj.get("preset") == "hydrogen":
        return hydrogen_spec(float(sys_obj.get("energy_gap", 1.0)))
    dim = sys_obj["dim"]
    drift = [float(x) for x in sys_obj["drift"]]
    coupling = np.array(
        [[_parse_complex(x, "system.coupling") for x in row] for row in sys_obj["coupling"]]
    )
    return SystemSpec(dim=dim, drift=drift, coupling=coupling)


def _build_initial(config: RunConfig) -> StateVector:
    amps = np.array(_parse_vector(config.initial, "initial"))
    norm = float(np.linalg.norm(amps))
    if abs(norm - 1.0) > INITIAL_NORM_TOL:
        _fail("initial", f"state is not normalized: norm is {norm!r}")
    return StateVector(amps / norm)


def validate_config(raw: dict) -> RunConfig:
    """Validate a raw config dict, apply defaults, return a RunConfig."""
    if not isinstance(raw, dict):
        raise ConfigError("config: expected a JSON object at the top level")
    known = {
        "mode", "system", "initial", "good", "subspace", "phases", "iterations",
        "seed", "shots", "pre_rotation", "l_max", "tolerances",
        "repeat_until_success", "out",
    }
    for key in raw:
        if key not in known:
            _fail(key, "unknown field")
    mode = raw.get("mode")
    if mode not in MODES:
        _fail("mode", f"expected one of {', '.join(MODES)}; got {mode!r}")

    system = raw.get("system")
    if system is not None:
        system = _validate_system(system, "system")
    initial = raw.get("initial")
    if initial is not None:
        _parse_vector(initial, "initial")

    good = raw.get("good")
    if good is not None:
        good = _require_int(good, "good", minimum=1)
    subspace = raw.get("subspace")
    if subspace is not None:
        if not isinstance(subspace, list) or not subspace:
            _fail("subspace", "expected a nonempty list of basis labels")
        subspace = [_require_int(v, f"subspace[{k}]", minimum=1) for k, v in enumerate(subspace)]
        if len(set(subspace)) != len(subspace):
            _fail("subspace", "labels must be distinct")

    phases = raw.get("phases", [math.pi, math.pi])
    if not isinstance(phases, list) or len(phases) != 2:
        _fail("phases", "expected [phi1, phi2]")
    phi = []
    for k, p in enumerate(phases):
        v = _require_number(p, f"phases[{k}]")
        if not 0.0 <= v <= math.pi:
            _fail(f"phases[{k}]", f"must lie in [0, pi], got {v}")
        phi.append(v)

    iterations = raw.get("iterations", "auto")
    if iterations != "auto":
        iterations = _require_int(iterations, "iterations", minimum=0)

    seed = raw.get("seed")
    if seed is not None:
        seed = _require_int(seed, "seed", minimum=0)
    shots = _require_int(raw.get("shots", 1), "shots", minimum=1)
    l_max = _require_int(raw.get("l_max", DEFAULT_L_MAX), "l_max", minimum=0)

    pre_rotation = raw.get("pre_rotation", False)
    if not isinstance(pre_rotation, bool):
        _fail("pre_rotation", f"expected a boolean, got {pre_rotation!r}")
    repeat = raw.get("repeat_until_success", False)
    if not isinstance(repeat, bool):
        _fail("repeat_until_success", f"expected a boolean, got {repeat!r}")

    tolerances = raw.get("tolerances", {})
    if not isinstance(tolerances, dict):
        _fail("tolerances", "expected an object")
    allowed_tols = {"edge_threshold", "degeneracy_tol", "ratio_tol", "max_denominator"}
    for key, value in tolerances.items():
        if key not in allowed_tols:
            _fail(f"tolerances.{key}", f"unknown tolerance (allowed: {sorted(allowed_tols)})")
        if key == "max_denominator":
            _require_int(value, f"tolerances.{key}", minimum=1)
        else:
            _require_number(value, f"tolerances.{key}")

    out = raw.get("out")
    if out is not None and not isinstance(out, str):
        _fail("out", f"expected a path string, got {out!r}")

    # mode-specific requirements
    needs = {
        "analyze": ("system",),
        "amplify": ("system", "initial"),
        "algo1": ("system", "initial", "good"),
        "algo2": ("system", "initial", "subspace"),
        "hydrogen-case1": (),
        "hydrogen-case2": (),
        "measure-stats": ("system", "initial"),
    }[mode]
    present = {"system": system, "initial": initial, "good": good, "subspace": subspace}
    for name in needs:
        if present[name] is None:
            _fail(name, f"required for mode {mode!r}")
    if mode == "amplify" and good is None and subspace is None:
        _fail("good", "mode 'amplify' needs either 'good' or 'subspace'")
    if mode in SAMPLING_MODES and seed is None:
        _fail("seed", f"required for sampling mode {mode!r}")

    return RunConfig(
        mode=mode,
        system=system,
        initial=initial,
        good=good,
        subspace=subspace,
        phases=(phi[0], phi[1]),
        iterations=iterations,
        seed=seed,
        shots=shots,
        pre_rotation=pre_rotation,
        l_max=l_max,
        tolerances=dict(tolerances),
        repeat_until_success=repeat,
        out=out,
    )


def parse_config(text: str) -> RunConfig:
    """Parse and validate a JSON config document."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config: invalid JSON ({exc})") from None
    return validate_config(raw)


# ---------------------------------------------------------------------------
# execution


def _controllability_config(config: RunConfig) -> ControllabilityConfig:
    return ControllabilityConfig(**config.tolerances)


def _good_subspace(config: RunConfig, dim: int) -> GoodSubspace:
    if config.good is not None:
        return GoodSubspace.of(config.good, dim)
    return GoodSubspace.of(config.subspace, dim)


def _run_with_repeat(runner, config: RunConfig) -> dict:
    """Single run, or CLI-level repeat-until-success up to ``shots`` attempts."""
    if not config.repeat_until_success:
        return runner(shots=config.shots, measurement_shot=0).to_dict()
    attempts = 0
    report = None
    for attempt in range(config.shots):
        attempts += 1
        report = runner(shots=1, measurement_shot=attempt)
        if report.success:
            break
    result = report.to_dict()
    result["attempts"] = attempts
    return result


def _execute_algorithm(config: RunConfig) -> dict:
    if config.mode == "hydrogen-case1":
        preset, system = case1_preset(), hydrogen_spec()
        initial, algorithm = preset.initial, 1
        good, subspace = min(preset.good.indices), None
    elif config.mode == "hydrogen-case2":
        preset, system = case2_preset(), hydrogen_spec()
        initial, algorithm = preset.initial, 2
        good, subspace = None, preset.good
    else:
        preset = None
        system = _build_system(config)
        initial = _build_initial(config)
        algorithm = 1 if config.mode == "algo1" else 2
        good = config.good
        subspace = (
            GoodSubspace.of(config.subspace, system.dim)
            if config.subspace is not None
            else None
        )

    phi1, phi2 = config.phases
    common = dict(
        phi1=phi1,
        phi2=phi2,
        iterations=config.iterations,
        seed=config.seed,
        pre_rotation=config.pre_rotation,
        l_max=config.l_max,
    )
    if algorithm == 1:
        def runner(shots, measurement_shot):
            return run_algorithm1(
                system, initial, good,
                shots=shots, measurement_shot=measurement_shot, **common,
            )
    else:
        def runner(shots, measurement_shot):
            return run_algorithm2(
                system, initial, subspace,
                shots=shots, measurement_shot=measurement_shot,
                controllability_config=_controllability_config(config), **common,
            )
    result = _run_with_repeat(runner, config)
    if preset is not None:
        result["preset_expectation"] = {
            "iterations": preset.expected_iterations,
            "success": preset.expected_success,
        }
    return result


def _execute_amplify(config: RunConfig) -> dict:
    system = _build_system(config)
    initial = _build_initial(config)
    good = _good_subspace(config, system.dim)
    phi1, phi2 = config.phases
    plan = make_plan(
        initial, good,
        phi1=phi1, phi2=phi2,
        iterations=config.iterations,
        l_max=config.l_max,
        pre_rotation=config.pre_rotation,
    )
    amplified = amplified_state(plan)
    report = RunReport(
        plan=plan,
        pre_amplification=np.abs(plan.prepared_state().amplitudes),
        post_amplification=np.abs(amplified.amplitudes),
        predicted_success=plan.predicted_success,
    )
    return report.to_dict()


def _execute_measure_stats(config: RunConfig) -> dict:
    system = _build_system(config)
    state = _build_initial(config)
    if config.good is not None or config.subspace is not None:
        partition = MeasurementPartition.binary(_good_subspace(config, system.dim))
    else:
        partition = MeasurementPartition.per_index(system.dim)
    probs = born_probabilities(state, partition)
    result = {
        "blocks": [list(b) for b in partition.blocks],
        "born_probabilities": [float(p) for p in probs],
    }
    if config.shots > 1:
        counts = measurement_histogram(state, partition, config.seed, config.shots)
        result["histogram"] = counts
        result["frequencies"] = [c / config.shots for c in counts]
    else:
        outcome = sample_collapse(state, partition, config.seed)
        result["outcome"] = {
            "block_index": outcome.block_index,
            "block": list(outcome.block),
            "probability": outcome.probability,
            "collapsed": [[z.real, z.imag] for z in outcome.collapsed.amplitudes],
        }
    return result


def execute(config: RunConfig) -> tuple[int, dict]:
    """Run the configured mode; return (exit_code, report dict)."""
    report = {
        "provenance": _provenance(config),
        "config": config.echo(),
        "mode": config.mode,
    }
    try:
        if config.mode == "analyze":
            system = _build_system(config)
            result = assess(system, _controllability_config(config)).to_dict()
        elif config.mode == "amplify":
            result = _execute_amplify(config)
        elif config.mode == "measure-stats":
            result = _execute_measure_stats(config)
        else:
            result = _execute_algorithm(config)
    except ConfigError as exc:
        report["error"] = {"type": type(exc).__name__, "message": str(exc)}
        return 2, report
    except Exception as exc:  # propagate module errors into the report
        report["error"] = {"type": type(exc).__name__, "message": str(exc)}
        return 1, report
    report["result"] = result
    return 0, report


def _provenance(config: RunConfig) -> dict:
    canonical = json.dumps(config.echo(), sort_keys=True, separators=(",", ":"))
    return {
        "config_sha256": hashlib.sha256(canonical.encode()).hexdigest(),
        "seed": config.seed,
        "version": __version__,
        "generated_at": datetime.now(timezone.utc).isoformat(),
    }


# ---------------------------------------------------------------------------
# summary


def _fmt(x) -> str:
    return f"{x:.12g}"


def summarize(report: dict) -> str:
    """Human-readable summary, derived from the report dict alone."""
    lines = [f"mode: {report['mode']}"]
    error = report.get("error")
    if error is not None:
        lines.append(f"error ({error['type']}): {error['message']}")
        return "\n".join(lines)
    result = report["result"]
    if report["mode"] == "analyze":
        lines.append("components: " + " | ".join("{" + ",".join(map(str, c)) + "}" for c in result["components"]))
        lines.append(f"global verdict: {result['global_verdict']}")
        for v in result["subspace_verdicts"]:
            lines.append("component {" + ",".join(map(str, v["component"])) + "}: " + v["verdict"])
        lines.append(f"degenerate transition pairs: {len(result['degenerate_pairs'])}")
        lines.append(f"irrational ratio witnesses: {len(result['irrational_witnesses'])}")
    elif report["mode"] == "measure-stats":
        for block, p in zip(result["blocks"], result["born_probabilities"]):
            lines.append("block {" + ",".join(map(str, block)) + "}: p = " + _fmt(p))
        if "frequencies" in result:
            lines.append("frequencies: " + " ".join(_fmt(f) for f in result["frequencies"]))
        else:
            lines.append(f"outcome block: {result['outcome']['block_index']}")
    else:
        plan = result["plan"]
        lines.append(f"good indices: {plan['good_indices']}")
        lines.append("initial good weight g = " + _fmt(plan["initial_good_weight"]))
        lines.append(f"iterations L = {plan['iterations']}")
        lines.append("predicted success = " + _fmt(result["predicted_success"]))
        lines.append("index  |c| before      |c| after")
        for i, (before, after) in enumerate(
            zip(result["pre_amplification"], result["post_amplification"]), start=1
        ):
            lines.append(f"{i:>5}  {_fmt(before):<14}  {_fmt(after)}")
        if "histogram" in result:
            lines.append(f"histogram: {result['histogram']}")
            lines.append("empirical success = " + _fmt(result["empirical_success"]))
        elif "measurement" in result:
            m = result["measurement"]
            hit = "success" if result.get("success") else "failure"
            lines.append(
                "measured block {" + ",".join(map(str, m["block"])) + "} "
                f"(p = {_fmt(m['probability'])}): {hit}"
            )
        if "attempts" in result:
            lines.append(f"attempts: {result['attempts']}")
        if "fidelity" in result and result["fidelity"] is not None:
            lines.append("final-state fidelity = " + _fmt(result["fidelity"]))
        note = result.get("controllability_note")
        if note is not None:
            lines.append(f"subspace verdict: {note['verdict']}")
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# entry point


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="iqcontrol",
        description="Amplitude-amplified, measurement-assisted control runs "
        "on finite-level quantum systems.",
    )
    parser.add_argument("--config", help="path to a JSON config document")
    parser.add_argument("--mode", choices=MODES)
    parser.add_argument("--system", help="'hydrogen' or a path to a system JSON object")
    parser.add_argument("--initial", help="JSON amplitude array or a path to one")
    parser.add_argument("--good", type=int, help="1-based target basis label")
    parser.add_argument("--subspace", help="JSON array of 1-based labels, e.g. [1,2,3]")
    parser.add_argument("--phases", nargs=2, type=float, metavar=("PHI1", "PHI2"))
    parser.add_argument("--iterations", help="'auto' or a nonnegative integer")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--shots", type=int)
    parser.add_argument("--out", help="write the report here instead of stdout")
    parser.add_argument("--pre-rotation", action="store_true", default=None)
    parser.add_argument("--l-max", type=int)
    parser.add_argument("--repeat-until-success", action="store_true", default=None)
    return parser


def _load_json_or_path(value: str, path_hint: str):
    text = value
    if not value.lstrip().startswith(("[", "{")):
        file = Path(value)
        if not file.is_file():
            _fail(path_hint, f"{value!r} is neither inline JSON nor an existing file")
        text = file.read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path_hint}: invalid JSON ({exc})") from None


def _assemble_raw_config(args) -> dict:
    raw: dict = {}
    if args.config:
        file = Path(args.config)
        if not file.is_file():
            _fail("config", f"no such file: {args.config}")
        try:
            raw = json.loads(file.read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config: invalid JSON ({exc})") from None
        if not isinstance(raw, dict):
            _fail("config", "expected a JSON object at the top level")
    if args.mode is not None:
        raw["mode"] = args.mode
    if args.system is not None:
        raw["system"] = args.system if args.system == "hydrogen" else _load_json_or_path(args.system, "system")
    if args.initial is not None:
        raw["initial"] = _load_json_or_path(args.initial, "initial")
    if args.good is not None:
        raw["good"] = args.good
    if args.subspace is not None:
        raw["subspace"] = _load_json_or_path(args.subspace, "subspace")
    if args.phases is not None:
        raw["phases"] = list(args.phases)
    if args.iterations is not None:
        if args.iterations == "auto":
            raw["iterations"] = "auto"
        else:
            try:
                raw["iterations"] = int(args.iterations)
            except ValueError:
                _fail("iterations", f"expected 'auto' or an integer, got {args.iterations!r}")
    if args.seed is not None:
        raw["seed"] = args.seed
    if args.shots is not None:
        raw["shots"] = args.shots
    if args.out is not None:
        raw["out"] = args.out
    if args.pre_rotation is not None:
        raw["pre_rotation"] = args.pre_rotation
    if args.l_max is not None:
        raw["l_max"] = args.l_max
    if args.repeat_until_success is not None:
        raw["repeat_until_success"] = args.repeat_until_success
    return raw


def render_report(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


def _emit(report: dict, out: Optional[str]) -> None:
    text = render_report(report)
    if out:
        Path(out).write_text(text)
        print(summarize(report))
    else:
        sys.stdout.write(text)
        print(summarize(report), file=sys.stderr)


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        config = validate_config(_assemble_raw_config(args))
    except ConfigError as exc:
        report = {
            "provenance": {"version": __version__},
            "mode": None,
            "error": {"type": type(exc).__name__, "message": str(exc)},
        }
        _emit(report, args.out)
        return 2
    code, report = execute(config)
    _emit(report, config.out)
    return code
