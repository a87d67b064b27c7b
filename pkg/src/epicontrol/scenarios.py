"""Scenario configuration, execution, and CSV/plot-script artifact emission.

Scenario files are flat ``key = value`` text with dotted section prefixes
(``params.nu``, ``init.s``, ``weights.B``, ``fbs.tf``, ``output.dir``).
Built-in presets bundle the reference parameter sets; ``run`` writes CSV
time series, a summary record, a scenario echo file, and optionally a
standalone plotting script.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from . import models
from .fbs import FbsSettings, evaluate_objective, solve, solve_uncontrolled
from .integrator import ControlTrajectory, TimeGrid, Trajectory
from .models import SeirParams, SirParams, Strategy, StrategyTag

#: environment variable naming the default output root directory
OUT_DIR_ENV = "EPICONTROL_OUT"


class ScenarioValidationError(ValueError):
    """A scenario field is missing, malformed, or out of range."""


class ComparisonIncompatibleError(ValueError):
    """Scenarios in one comparison do not share family, start, and grid."""


@dataclass(frozen=True)
class Scenario:
    """One solve: a strategy, its model inputs, sweep settings, and outputs.

    ``weights`` may carry a whole preset bundle; only the entries the
    strategy's objective needs are used.
    """

    label: str
    strategy: StrategyTag
    nu: float
    delta: float
    init: tuple[float, ...]
    rho: Optional[float] = None
    weights: dict[str, float] = field(default_factory=dict)
    tf: float = 100.0
    n_steps: int = 1000
    tolerance: float = 1e-3
    max_iterations: int = 200
    relaxation: float = 0.3
    out_dir: Optional[str] = None
    emit_plots: bool = True


@dataclass(frozen=True)
class RunArtifacts:
    """Paths written by one run plus the scenario as executed."""

    scenario: Scenario
    out_dir: Path
    state_csv: Path
    scenario_echo: Path
    summary_path: Path
    summary: dict
    controls_csv: Optional[Path] = None
    adjoint_csv: Optional[Path] = None
    baseline_csv: Optional[Path] = None
    plot_script: Optional[Path] = None


_SIR_WEIGHTS = {"B": 1.0, "C1": 1.0, "C2": 5.0, "C3": 5.0}
_SEIR_WEIGHTS = {
    "D": 5.0,
    "K1": 1.0,
    "K2": 5.0,
    "K3": 5.0,
    "D1": 1.0,
    "D2": 5.0,
    "D3": 5.0,
}


def presets() -> dict[str, Scenario]:
    """Built-in scenarios: the reference SIR and SEIR parameter sets.

    The bare names default to the single-control vaccination strategy;
    ``<name>-<variant>`` entries select the other strategies on the same
    parameters.
    """
    out: dict[str, Scenario] = {}

    def add(name: str, tag: StrategyTag, **kwargs) -> None:
        out[name] = Scenario(label=name, strategy=tag, **kwargs)

    sir = dict(nu=0.2, delta=0.1, init=(0.95, 0.05, 0.0), weights=dict(_SIR_WEIGHTS))
    add("sir-fig2", StrategyTag.SIR_VACCINATION, **sir)
    add("sir-fig2-uncontrolled", StrategyTag.SIR_UNCONTROLLED, **sir)
    add("sir-fig2-vaccination", StrategyTag.SIR_VACCINATION, **sir)
    add("sir-fig2-treatment-education", StrategyTag.SIR_TREATMENT_EDUCATION, **sir)

    seir = dict(
        nu=0.2,
        delta=0.1,
        rho=0.1887,
        init=(0.88, 0.07, 0.05, 0.0),
        weights=dict(_SEIR_WEIGHTS),
    )
    add("seir-fig5", StrategyTag.SEIR_VACCINATION, **seir)
    add("seir-fig5-uncontrolled", StrategyTag.SEIR_UNCONTROLLED, **seir)
    add("seir-fig5-vaccination", StrategyTag.SEIR_VACCINATION, **seir)
    add(
        "seir-fig5-vaccination-exposed-weighted",
        StrategyTag.SEIR_VACCINATION_EXPOSED_WEIGHTED,
        **seir,
    )
    add("seir-fig5-treatment-education", StrategyTag.SEIR_TREATMENT_EDUCATION, **seir)
    return out


def _parse_kv(text: str, source: str) -> dict[str, str]:
    entries: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ScenarioValidationError(
                f"{source}:{lineno}: expected 'key = value', got {raw.strip()!r}"
            )
        key, value = line.split("=", 1)
        key = key.strip()
        if key in entries:
            raise ScenarioValidationError(f"{source}:{lineno}: duplicate key {key!r}")
        entries[key] = value.strip()
    return entries


def _parse_float(entries: dict[str, str], key: str, default=None) -> Optional[float]:
    if key not in entries:
        return default
    raw = entries.pop(key)
    try:
        return float(raw)
    except ValueError:
        raise ScenarioValidationError(f"{key}: not a number: {raw!r}") from None


def _parse_int(entries: dict[str, str], key: str, default=None) -> Optional[int]:
    if key not in entries:
        return default
    raw = entries.pop(key)
    try:
        return int(raw)
    except ValueError:
        raise ScenarioValidationError(f"{key}: not an integer: {raw!r}") from None


def _parse_bool(entries: dict[str, str], key: str, default: bool) -> bool:
    if key not in entries:
        return default
    raw = entries.pop(key).lower()
    if raw not in ("true", "false"):
        raise ScenarioValidationError(f"{key}: expected true or false, got {raw!r}")
    return raw == "true"


def load_scenario(path_or_preset: Union[str, Path]) -> Scenario:
    """Load a scenario from a preset name or a key-value file."""
    name = str(path_or_preset)
    builtin = presets()
    if name in builtin:
        return builtin[name]
    path = Path(path_or_preset)
    if not path.is_file():
        raise ScenarioValidationError(
            f"{name!r} is neither a built-in preset ({', '.join(builtin)}) nor a file"
        )
    entries = _parse_kv(path.read_text(), str(path))

    tag_raw = entries.pop("strategy", None)
    if tag_raw is None:
        raise ScenarioValidationError("strategy: missing")
    try:
        tag = StrategyTag(tag_raw)
    except ValueError:
        known = ", ".join(t.value for t in StrategyTag)
        raise ScenarioValidationError(
            f"strategy: unknown tag {tag_raw!r} (known: {known})"
        ) from None

    label = entries.pop("label", path.stem)
    names = models.compartment_names(tag)
    init = []
    for comp in names:
        value = _parse_float(entries, f"init.{comp}")
        if value is None:
            raise ScenarioValidationError(f"init.{comp}: missing")
        init.append(value)

    weights = {}
    for key in [k for k in entries if k.startswith("weights.")]:
        weights[key.split(".", 1)[1]] = _parse_float(entries, key)

    defaults = Scenario.__dataclass_fields__
    scenario = Scenario(
        label=label,
        strategy=tag,
        nu=_parse_float(entries, "params.nu"),
        delta=_parse_float(entries, "params.delta"),
        rho=_parse_float(entries, "params.rho"),
        init=tuple(init),
        weights=weights,
        tf=_parse_float(entries, "fbs.tf", defaults["tf"].default),
        n_steps=_parse_int(entries, "fbs.n_steps", defaults["n_steps"].default),
        tolerance=_parse_float(entries, "fbs.tolerance", defaults["tolerance"].default),
        max_iterations=_parse_int(
            entries, "fbs.max_iterations", defaults["max_iterations"].default
        ),
        relaxation=_parse_float(entries, "fbs.relaxation", defaults["relaxation"].default),
        out_dir=entries.pop("output.dir", None),
        emit_plots=_parse_bool(entries, "output.emit_plots", True),
    )
    if entries:
        raise ScenarioValidationError(f"unknown key {sorted(entries)[0]!r}")
    validate_scenario(scenario)
    return scenario


def validate_scenario(scenario: Scenario) -> None:
    """Raise ScenarioValidationError naming the first offending field."""
    try:
        tag = StrategyTag(scenario.strategy)
    except ValueError:
        raise ScenarioValidationError(
            f"strategy: unknown tag {scenario.strategy!r}"
        ) from None
    if not scenario.label:
        raise ScenarioValidationError("label: must be nonempty")

    for key in ("nu", "delta"):
        value = getattr(scenario, key)
        if value is None or not (np.isfinite(value) and value >= 0.0):
            raise ScenarioValidationError(
                f"params.{key}: must be finite and nonnegative, got {value}"
            )
    if models.is_sir(tag):
        if scenario.rho is not None:
            raise ScenarioValidationError("params.rho: not used by SIR strategies")
    else:
        if scenario.rho is None or not (np.isfinite(scenario.rho) and scenario.rho >= 0.0):
            raise ScenarioValidationError(
                f"params.rho: required (finite, nonnegative) for SEIR strategies, got {scenario.rho}"
            )

    names = models.compartment_names(tag)
    if len(scenario.init) != len(names):
        raise ScenarioValidationError(
            f"init: expected {len(names)} components ({', '.join(names)}), got {len(scenario.init)}"
        )
    try:
        models.validate_simplex(scenario.init, context="init")
    except ValueError as exc:
        raise ScenarioValidationError(str(exc)) from None

    for name, value in scenario.weights.items():
        if not (np.isfinite(value) and value > 0.0):
            raise ScenarioValidationError(
                f"weights.{name}: must be strictly positive, got {value}"
            )
    for name in models.REQUIRED_WEIGHTS[tag]:
        if name not in scenario.weights:
            raise ScenarioValidationError(f"weights.{name}: required by {tag.value}")

    if not (np.isfinite(scenario.tf) and scenario.tf > 0.0):
        raise ScenarioValidationError(f"fbs.tf: must be positive, got {scenario.tf}")
    if scenario.n_steps < 1:
        raise ScenarioValidationError(f"fbs.n_steps: must be positive, got {scenario.n_steps}")
    if not (np.isfinite(scenario.tolerance) and scenario.tolerance > 0.0):
        raise ScenarioValidationError(
            f"fbs.tolerance: must be positive, got {scenario.tolerance}"
        )
    if scenario.max_iterations < 1:
        raise ScenarioValidationError(
            f"fbs.max_iterations: must be positive, got {scenario.max_iterations}"
        )
    if not 0.0 < scenario.relaxation <= 1.0:
        raise ScenarioValidationError(
            f"fbs.relaxation: must lie in (0, 1], got {scenario.relaxation}"
        )


def build_strategy(scenario: Scenario) -> Strategy:
    tag = scenario.strategy
    if models.is_sir(tag):
        params: Union[SirParams, SeirParams] = SirParams(scenario.nu, scenario.delta)
    else:
        params = SeirParams(scenario.nu, scenario.rho, scenario.delta)
    weights = {k: scenario.weights[k] for k in models.REQUIRED_WEIGHTS[tag]}
    return Strategy(tag, params, weights)


def default_out_root() -> Path:
    return Path(os.environ.get(OUT_DIR_ENV, "runs"))


def scenario_text(scenario: Scenario) -> str:
    """Serialize a scenario in the key-value format ``load_scenario`` reads."""
    lines = [
        f"label = {scenario.label}",
        f"strategy = {scenario.strategy.value}",
        f"params.nu = {scenario.nu!r}",
        f"params.delta = {scenario.delta!r}",
    ]
    if scenario.rho is not None:
        lines.append(f"params.rho = {scenario.rho!r}")
    for comp, value in zip(models.compartment_names(scenario.strategy), scenario.init):
        lines.append(f"init.{comp} = {value!r}")
    for name in sorted(scenario.weights):
        lines.append(f"weights.{name} = {scenario.weights[name]!r}")
    lines += [
        f"fbs.tf = {scenario.tf!r}",
        f"fbs.n_steps = {scenario.n_steps}",
        f"fbs.tolerance = {scenario.tolerance!r}",
        f"fbs.max_iterations = {scenario.max_iterations}",
        f"fbs.relaxation = {scenario.relaxation!r}",
    ]
    if scenario.out_dir is not None:
        lines.append(f"output.dir = {scenario.out_dir}")
    lines.append(f"output.emit_plots = {'true' if scenario.emit_plots else 'false'}")
    return "\n".join(lines) + "\n"


def _write_csv(path: Path, header: Sequence[str], columns: Sequence[np.ndarray]) -> None:
    # full-precision shortest-round-trip decimals, LF endings, for bit-exact diffing
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in zip(*columns):
            fh.write(",".join(repr(float(v)) for v in row) + "\n")


def _peak(times: np.ndarray, series: np.ndarray) -> tuple[float, float]:
    k = int(np.argmax(series))
    return float(series[k]), float(times[k])


def run(scenario: Scenario) -> RunArtifacts:
    """Execute one scenario and write its artifacts.

    Controlled scenarios also integrate the matching uncontrolled baseline
    so the emitted plot script can overlay the two.  An unconverged sweep
    still writes artifacts; the summary records converged=false.
    """
    validate_scenario(scenario)
    out_dir = Path(scenario.out_dir) if scenario.out_dir else default_out_root() / scenario.label
    scenario = replace(scenario, out_dir=str(out_dir))
    out_dir.mkdir(parents=True, exist_ok=True)

    strategy = build_strategy(scenario)
    grid = TimeGrid(tf=scenario.tf, n_steps=scenario.n_steps)
    x0 = np.asarray(scenario.init, dtype=float)
    times = grid.nodes()
    comp_names = models.compartment_names(scenario.strategy)
    infected = models.infected_index(scenario.strategy)

    baseline = solve_uncontrolled(strategy, x0, grid)
    base_peak, base_peak_time = _peak(times, baseline.values[:, infected])

    summary: dict = {
        "label": scenario.label,
        "strategy": scenario.strategy.value,
    }
    controls_csv = adjoint_csv = baseline_csv = plot_script = None

    if strategy.is_controlled:
        settings = FbsSettings(
            grid=grid,
            tolerance=scenario.tolerance,
            max_iterations=scenario.max_iterations,
            relaxation=scenario.relaxation,
        )
        report = solve(strategy, x0, settings)
        state = report.state

        controls_csv = out_dir / "controls.csv"
        _write_csv(
            controls_csv,
            ("t",) + models.control_names(scenario.strategy),
            [times] + [report.controls.values[:, j] for j in range(strategy.n_controls)],
        )
        adjoint_csv = out_dir / "adjoint.csv"
        _write_csv(
            adjoint_csv,
            ("t",) + tuple(f"phi_{c}" for c in comp_names),
            [times] + [report.adjoint.values[:, j] for j in range(strategy.state_dim)],
        )
        baseline_csv = out_dir / "baseline.csv"
        _write_csv(
            baseline_csv,
            ("t",) + comp_names,
            [times] + [baseline.values[:, j] for j in range(strategy.state_dim)],
        )

        peak, peak_time = _peak(times, state.values[:, infected])
        summary.update(
            converged=report.converged,
            iterations=report.iterations,
            objective=report.objective,
            peak_infected=peak,
            peak_time=peak_time,
            final_recovered=float(state.values[-1, -1]),
            baseline_objective=evaluate_objective(
                strategy, baseline, ControlTrajectory.zeros(grid, strategy.n_controls)
            ),
            baseline_peak_infected=base_peak,
            baseline_peak_time=base_peak_time,
            baseline_final_recovered=float(baseline.values[-1, -1]),
        )
    else:
        state = baseline
        summary.update(
            converged=True,
            iterations=0,
            objective=None,
            peak_infected=base_peak,
            peak_time=base_peak_time,
            final_recovered=float(state.values[-1, -1]),
        )

    state_csv = out_dir / "state.csv"
    _write_csv(
        state_csv,
        ("t",) + comp_names,
        [times] + [state.values[:, j] for j in range(strategy.state_dim)],
    )

    scenario_echo = out_dir / "scenario.txt"
    scenario_echo.write_text(scenario_text(scenario))

    summary_path = out_dir / "summary.json"
    with open(summary_path, "w", newline="\n") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")

    if scenario.emit_plots:
        plot_script = out_dir / "plot.py"
        plot_script.write_text(
            _plot_script_text(comp_names, models.control_names(scenario.strategy), strategy.is_controlled)
        )

    return RunArtifacts(
        scenario=scenario,
        out_dir=out_dir,
        state_csv=state_csv,
        scenario_echo=scenario_echo,
        summary_path=summary_path,
        summary=summary,
        controls_csv=controls_csv,
        adjoint_csv=adjoint_csv,
        baseline_csv=baseline_csv,
        plot_script=plot_script,
    )


def compare(scenarios: Sequence[Scenario], out_root: Union[str, Path, None] = None) -> list[dict]:
    """Run related scenarios and tabulate one summary row per scenario.

    All scenarios must share the model family, initial state, and grid.
    Artifacts land in numbered subdirectories of ``out_root`` (default:
    ``<output root>/compare``).
    """
    if not scenarios:
        raise ComparisonIncompatibleError("compare needs at least one scenario")
    for scenario in scenarios:
        validate_scenario(scenario)
    first = scenarios[0]
    for scenario in scenarios[1:]:
        if models.is_sir(scenario.strategy) != models.is_sir(first.strategy):
            raise ComparisonIncompatibleError("scenarios mix SIR and SEIR model families")
        if tuple(scenario.init) != tuple(first.init):
            raise ComparisonIncompatibleError("scenarios start from different initial states")
        if (scenario.tf, scenario.n_steps) != (first.tf, first.n_steps):
            raise ComparisonIncompatibleError("scenarios use different time grids")

    root = Path(out_root) if out_root is not None else default_out_root() / "compare"
    rows = []
    for k, scenario in enumerate(scenarios):
        art = run(replace(scenario, out_dir=str(root / f"{k:02d}-{scenario.label}")))
        rows.append(
            {
                key: art.summary.get(key)
                for key in (
                    "label",
                    "strategy",
                    "objective",
                    "peak_infected",
                    "peak_time",
                    "final_recovered",
                    "iterations",
                    "converged",
                )
            }
        )
    return rows


def _plot_script_text(
    comp_names: Sequence[str], control_names: Sequence[str], controlled: bool
) -> str:
    """Generate a standalone matplotlib script over the emitted CSVs."""
    header = '''"""Render figures from the CSV artifacts next to this script."""
import csv
from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

HERE = Path(__file__).resolve().parent


def read_columns(name):
    with open(HERE / name, newline="") as fh:
        rows = list(csv.reader(fh))
    return {key: [float(r[k]) for r in rows[1:]] for k, key in enumerate(rows[0])}


state = read_columns("state.csv")
'''
    body = []
    if controlled:
        body.append('baseline = read_columns("baseline.csv")')
    body.append(f"for name in {list(comp_names)!r}:")
    body.append("    fig, ax = plt.subplots()")
    if controlled:
        body.append('    ax.plot(state["t"], state[name], label="with control")')
        body.append('    ax.plot(baseline["t"], baseline[name], "--", label="without control")')
        body.append("    ax.legend()")
    else:
        body.append('    ax.plot(state["t"], state[name])')
    body.append('    ax.set_xlabel("t (days)")')
    body.append("    ax.set_ylabel(name)")
    body.append('    fig.savefig(HERE / f"compartment_{name}.png", dpi=150)')
    body.append("    plt.close(fig)")
    if controlled:
        body += [
            "",
            'controls = read_columns("controls.csv")',
            "fig, ax = plt.subplots()",
            f"for name in {list(control_names)!r}:",
            '    ax.plot(controls["t"], controls[name], label=name)',
            'ax.set_xlabel("t (days)")',
            'ax.set_ylabel("control intensity")',
            "ax.set_ylim(-0.05, 1.05)",
            "ax.legend()",
            'fig.savefig(HERE / "controls.png", dpi=150)',
            "plt.close(fig)",
        ]
    return header + "\n".join(body) + "\n"
