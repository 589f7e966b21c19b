"""Built-in scenario registry, config loading, and the report runner.

Five named scenarios cover the worked examples shipped with the library:
two-group epidemics where switching cures (ainscosta) or infects
(astacoins), a three-dimensional linear family whose members are all
Hurwitz yet switching grows (fmg3d), its epidemic embedding (ly3d), and a
two-group system with a common interior equilibrium (nobra).  Constants
are stored as exact rationals and converted to floats once.
"""

import json
import os
import time
from dataclasses import dataclass, field
from fractions import Fraction as Fr

import numpy as np

from . import engine, lyapunov, matrixcore, persistence, vectorfields


def _mat(rows):
    return np.array([[float(Fr(v)) for v in row] for row in rows])


def _vec(vals):
    return np.array([float(Fr(v)) for v in vals])


@dataclass
class Scenario:
    """A named system plus run defaults and expected-outcome bands.

    kind is "epidemic" (fields list of SISField) or "linear" (matrices
    only).  base_rates is scaled by beta at run time.  Each band is a dict
    with a "kind" dispatched by the runner, a "provenance" tag, and
    whatever targets the check needs.
    """

    name: str
    kind: str
    base_rates: np.ndarray
    beta: float
    x0: np.ndarray
    horizon: float
    replicates: int
    seed: int
    fields: list = None
    As: np.ndarray = None
    lyap_T: float = 200.0
    bands: list = field(default_factory=list)
    notes: str = ""

    def matrices(self):
        if self.As is not None:
            return np.ascontiguousarray(self.As)
        fam = vectorfields.SwitchedFieldFamily(self.fields)
        return np.ascontiguousarray(
            np.stack(vectorfields.jacobian_at_zero(fam)))

    def family(self):
        if self.fields is None:
            raise ValueError(f"scenario {self.name} has no nonlinear fields")
        return vectorfields.SwitchedFieldFamily(self.fields)

    def system(self, beta=None):
        b = self.beta if beta is None else float(beta)
        return engine.SwitchedSystem(self.family(), b * self.base_rates)

    def linear_system(self, beta=None):
        b = self.beta if beta is None else float(beta)
        return lyapunov.LinearSwitchedSystem(
            self.matrices(), b * self.base_rates, cone="orthant")


_SYM2 = np.array([[0.0, 1.0], [1.0, 0.0]])


def _ainscosta():
    # switching between two curable epidemics can cure: each linearization
    # has positive growth, the average is Hurwitz
    f0 = vectorfields.SISField(_mat([[2, 1], [1, 1]]), _vec([6, 1]))
    f1 = vectorfields.SISField(_mat([[1, 1], [1, 3]]), _vec([1, 7]))
    return Scenario(
        name="ainscosta", kind="epidemic", base_rates=_SYM2, beta=20.0,
        x0=np.array([0.5, 0.5]), horizon=1000.0, replicates=100, seed=20,
        fields=[f0, f1],
        bands=[
            {"name": "each_mode_unstable", "kind": "per_mode_lambda",
             "target": float(np.sqrt(5.0) - 2.0), "tol": 1e-9,
             "provenance": "PAPER"},
            {"name": "average_stable", "kind": "average_lambda",
             "target": -1.0, "tol": 1e-9, "provenance": "PAPER"},
            {"name": "switched_lambda_negative", "kind": "lambda_negative",
             "provenance": "PAPER"},
            {"name": "no_endemic_equilibrium_of_average", "kind": "endemic_none",
             "provenance": "PAPER"},
        ],
        notes="fast switching drives the infection extinct")


def _astacoins():
    # the mirror image: each epidemic dies out alone, switching sustains it
    f0 = vectorfields.SISField(_mat([[1, 4], ["1/16", 1]]), _vec([2, 2]))
    f1 = vectorfields.SISField(_mat([[2, "1/16"], [4, 2]]), _vec([3, 3]))
    return Scenario(
        name="astacoins", kind="epidemic", base_rates=_SYM2, beta=20.0,
        x0=np.array([0.5, 0.5]), horizon=1000.0, replicates=100, seed=21,
        fields=[f0, f1],
        bands=[
            {"name": "each_mode_stable", "kind": "per_mode_lambda",
             "target": -0.5, "tol": 1e-9, "provenance": "PAPER"},
            {"name": "average_unstable", "kind": "average_lambda",
             "target": float(Fr(33, 32)), "tol": 1e-9, "provenance": "PAPER"},
            {"name": "switched_lambda_positive", "kind": "lambda_positive",
             "provenance": "PAPER"},
            {"name": "endemic_of_average", "kind": "endemic_at",
             "target": [float(Fr(33, 113))] * 2, "tol": 1e-8,
             "provenance": "PAPER"},
        ],
        notes="fast switching sustains the infection")


_FMG_A0 = _mat([[-1, 0, 0], [10, -1, 0], [0, 0, -10]])
_FMG_A1 = _mat([[-10, 0, 10], [0, -10, 0], [0, 10, -1]])


def _fmg3d():
    # every convex combination is Hurwitz, yet switching at moderate rates
    # produces growth; growth holds for multipliers roughly in [3, 30]
    # with the half-rate base below
    return Scenario(
        name="fmg3d", kind="linear", base_rates=0.5 * _SYM2, beta=10.0,
        x0=np.array([1.0, 1.0, 1.0]) / np.sqrt(3.0),
        horizon=1000.0, replicates=100, seed=22,
        As=np.stack([_FMG_A0, _FMG_A1]),
        bands=[
            {"name": "hull_all_hurwitz", "kind": "hull_hurwitz",
             "expect": True, "provenance": "PAPER"},
            {"name": "switched_lambda_positive", "kind": "lambda_positive",
             "provenance": "PAPER"},
            {"name": "period_1_explodes", "kind": "monodromy_above_one",
             "period": 1.0, "provenance": "PAPER"},
        ],
        notes="growth from switching between stable linear systems")


def _ly3d():
    # epidemic embedding of the fmg3d matrices: C^i = A^i + diag(D^i)
    D0 = _vec([11, 11, 20])
    D1 = _vec([20, 20, 11])
    f0 = vectorfields.SISField(_FMG_A0 + np.diag(D0), D0)
    f1 = vectorfields.SISField(_FMG_A1 + np.diag(D1), D1)
    # same half-rate base as fmg3d so the two share exponents per beta
    return Scenario(
        name="ly3d", kind="epidemic", base_rates=0.5 * _SYM2, beta=10.0,
        x0=np.array([0.3, 0.3, 0.3]), horizon=1000.0, replicates=100,
        seed=23, fields=[f0, f1],
        bands=[
            {"name": "each_mode_stable", "kind": "per_mode_hurwitz",
             "provenance": "PAPER"},
            {"name": "switched_lambda_positive", "kind": "lambda_positive",
             "provenance": "PAPER"},
        ],
        notes="three-group epidemic persistent only through switching")


def _nobra():
    # both fields share the interior equilibrium (1/2, 1/2)
    f0 = vectorfields.SISField(_mat([[1, 3], [2, 4]]), _vec([2, 3]))
    f1 = vectorfields.SISField(_mat([[6, 2], [7, 3]]), _vec([4, 5]))
    return Scenario(
        name="nobra", kind="epidemic", base_rates=_SYM2, beta=1.0,
        x0=np.array([0.9, 0.2]), horizon=200.0, replicates=50, seed=24,
        fields=[f0, f1],
        bands=[
            {"name": "common_equilibrium", "kind": "common_zero",
             "target": [0.5, 0.5], "tol": 1e-12, "provenance": "PAPER"},
            {"name": "converges_to_equilibrium", "kind": "slope_to_point",
             "target": [0.5, 0.5], "provenance": "PAPER"},
        ],
        notes="almost-sure exponential convergence to a shared equilibrium")


def registry():
    """The built-in scenarios, keyed by name."""
    scen = [_ainscosta(), _astacoins(), _fmg3d(), _ly3d(), _nobra()]
    return {s.name: s for s in scen}


def get(name):
    reg = registry()
    if name not in reg:
        raise KeyError(f"unknown scenario {name!r}; choose from "
                       f"{sorted(reg)}")
    return reg[name]


def field_to_json(fld):
    return {"C": fld.C.tolist(), "D": fld.D.tolist()}


def field_from_json(doc):
    return vectorfields.SISField(doc["C"], doc["D"])


def scenario_to_json(s):
    doc = {
        "name": s.name, "kind": s.kind,
        "base_rates": s.base_rates.tolist(), "beta": s.beta,
        "x0": s.x0.tolist(), "horizon": s.horizon,
        "replicates": s.replicates, "seed": s.seed, "lyap_T": s.lyap_T,
        "bands": s.bands, "notes": s.notes,
    }
    if s.kind == "epidemic":
        doc["fields"] = [field_to_json(f) for f in s.fields]
    else:
        doc["matrices"] = s.As.tolist()
    return doc


def scenario_from_json(doc):
    kind = doc["kind"]
    kwargs = dict(
        name=doc["name"], kind=kind,
        base_rates=np.asarray(doc["base_rates"], dtype=float),
        beta=float(doc.get("beta", 1.0)),
        x0=np.asarray(doc["x0"], dtype=float),
        horizon=float(doc.get("horizon", 200.0)),
        replicates=int(doc.get("replicates", 50)),
        seed=int(doc.get("seed", 0)),
        lyap_T=float(doc.get("lyap_T", 200.0)),
        bands=list(doc.get("bands", [])),
        notes=doc.get("notes", ""))
    if kind == "epidemic":
        kwargs["fields"] = [field_from_json(f) for f in doc["fields"]]
    elif kind == "linear":
        kwargs["As"] = np.asarray(doc["matrices"], dtype=float)
    else:
        raise ValueError(f"unknown scenario kind {kind!r}")
    s = Scenario(**kwargs)
    if s.replicates < 1:
        raise ValueError("replicates must be >= 1")
    return s


def load_scenario(path):
    with open(path) as fh:
        return scenario_from_json(json.load(fh))


@dataclass
class Report:
    scenario: dict
    beta: float
    results: dict
    bands: list               # evaluated band dicts with "passed"
    artifacts: list
    wall_seconds: float

    def all_passed(self):
        return all(b["passed"] for b in self.bands)

    def to_json(self):
        return {
            "scenario": self.scenario, "beta": self.beta,
            "results": self.results, "bands": self.bands,
            "artifacts": self.artifacts,
            "wall_seconds": self.wall_seconds,
        }


def _band_check(band, ctx):
    kind = band["kind"]
    As = ctx["As"]
    if kind == "per_mode_lambda":
        vals = [matrixcore.spectral_abscissa(A) for A in As]
        ok = all(abs(v - band["target"]) <= band["tol"] for v in vals)
        return ok, {"values": vals}
    if kind == "per_mode_hurwitz":
        vals = [matrixcore.spectral_abscissa(A) for A in As]
        return all(v < 0.0 for v in vals), {"values": vals}
    if kind == "average_lambda":
        p = ctx["stationary"]
        lam = matrixcore.spectral_abscissa(np.tensordot(p, As, axes=1))
        return abs(lam - band["target"]) <= band["tol"], {"value": lam}
    if kind == "lambda_negative":
        est = ctx["lambda_angular"]
        ok = est.value < 0.0 and est.value + 3.0 * est.stderr < 0.0
        return ok, {"value": est.value, "stderr": est.stderr}
    if kind == "lambda_positive":
        est = ctx["lambda_angular"]
        ok = est.value > 0.0 and est.value - 3.0 * est.stderr > 0.0
        return ok, {"value": est.value, "stderr": est.stderr}
    if kind == "endemic_none":
        return ctx["endemic"] is None, {"value": ctx["endemic"]}
    if kind == "endemic_at":
        x = ctx["endemic"]
        if x is None:
            return False, {"value": None}
        err = float(np.max(np.abs(x - np.asarray(band["target"]))))
        return err <= band["tol"], {"value": list(x), "error": err}
    if kind == "common_zero":
        x = np.asarray(band["target"], dtype=float)
        worst = max(float(np.linalg.norm(f(x))) for f in ctx["scenario"].fields)
        return worst <= band["tol"], {"residual": worst}
    if kind == "hull_hurwitz":
        res = lyapunov.hurwitz_hull_check(As)
        return res["all_hurwitz"] == band["expect"], res
    if kind == "monodromy_above_one":
        rho = lyapunov.period_switch_growth(As, band["period"])
        return rho > 1.0, {"spectral_radius": rho}
    if kind == "slope_to_point":
        fit = ctx["equilibrium_fit"]
        return fit.slope < 0.0, {"slope": fit.slope, "r_squared": fit.r_squared}
    raise ValueError(f"unknown band kind {kind!r}")


def run(scenario, output_dir, beta=None):
    """Run a scenario's simulation and diagnostics, write artifacts, and
    evaluate its expected-outcome bands.

    Writes a trajectory CSV (epidemic scenarios), the JSON report, and
    returns the Report.  Band failures are recorded, not raised.
    """
    t_start = time.perf_counter()
    os.makedirs(output_dir, exist_ok=True)
    b = scenario.beta if beta is None else float(beta)
    As = scenario.matrices()
    lin = scenario.linear_system(b)
    ctx = {
        "scenario": scenario, "As": As,
        "stationary": lin.stationary_modes(),
        "endemic": None, "equilibrium_fit": None,
    }
    results = {}
    artifacts = []

    est = lyapunov.estimate_lambda_angular(
        lin, scenario.lyap_T, scenario.replicates, seed=scenario.seed)
    ctx["lambda_angular"] = est
    results["lambda_angular"] = {
        "value": est.value, "stderr": est.stderr, "T": est.T,
        "replicates": est.replicates}
    results["analytic_bounds"] = lyapunov.analytic_bounds(lin)

    if scenario.kind == "epidemic":
        fam = scenario.family()
        avg = vectorfields.average_field(fam, ctx["stationary"])
        ctx["endemic"] = vectorfields.endemic_equilibrium(avg)
        results["endemic_equilibrium"] = (
            None if ctx["endemic"] is None else list(ctx["endemic"]))

        system = scenario.system(b)
        traj = engine.simulate(system, scenario.x0, 0, scenario.horizon,
                               scenario.seed)
        path = os.path.join(output_dir,
                            f"fig_trajectories_{scenario.name}.csv")
        with open(path, "w") as fh:
            engine.trajectory_to_csv(traj, fh)
        artifacts.append(path)
        results["trajectory"] = {
            "samples": int(len(traj.times)), "jumps": int(traj.n_jumps),
            "final_state": list(traj.states[-1])}

        fit = decay_fit(traj)
        results["extinction_fit"] = {
            "slope": fit.slope, "r_squared": fit.r_squared,
            "window": list(fit.window)}
        if any(band["kind"] == "slope_to_point" for band in scenario.bands):
            target = next(band["target"] for band in scenario.bands
                          if band["kind"] == "slope_to_point")
            ctx["equilibrium_fit"] = equilibrium_slope(
                traj, np.asarray(target, dtype=float))

    bands = []
    for band in scenario.bands:
        entry = dict(band)
        try:
            ok, detail = _band_check(band, ctx)
        except Exception as exc:  # report the failure, keep going
            ok, detail = False, {"error": repr(exc)}
        entry["passed"] = bool(ok)
        entry["detail"] = detail
        bands.append(entry)

    report = Report(scenario_to_json(scenario), b, results, bands,
                    artifacts, time.perf_counter() - t_start)
    path = os.path.join(output_dir, f"report_{scenario.name}.json")
    with open(path, "w") as fh:
        json.dump(report.to_json(), fh, indent=2, default=_json_default)
        fh.write("\n")
    report.artifacts.append(path)
    return report


def decay_fit(traj, window_fraction=0.5):
    """Trailing-window extinction fit, truncated before any exact zero.

    Deep in the extinction regime the state underflows to zero; the fit
    then uses the portion of the path that is still resolvable.
    """
    norms = np.linalg.norm(traj.states, axis=1)
    zeros = np.nonzero(norms == 0.0)[0]
    if len(zeros):
        sub = _Window(traj.times[:zeros[0]], traj.states[:zeros[0]])
    else:
        sub = traj
    return persistence.extinction_rate(sub, window_fraction)


def equilibrium_slope(traj, target, horizon=12.0):
    """Decay slope of log ||X_t - target|| over an early window.

    Exponential convergence to an interior point reaches the double
    precision floor quickly, so the fit stops once the distance is within
    a few ulps of the target or at the horizon, whichever comes first.
    """
    dist = np.linalg.norm(traj.states - target, axis=1)
    floor = 1e-14
    cut = len(dist)
    below = np.nonzero(dist < floor)[0]
    if len(below):
        cut = int(below[0])
    mask = traj.times < horizon
    mask[cut:] = False
    if mask.sum() < 3:
        raise ValueError("too few samples above the precision floor")
    sub = _Window(traj.times[mask], traj.states[mask])
    return persistence.extinction_rate(sub, window_fraction=1.0,
                                       center=target)


class _Window:
    def __init__(self, times, states):
        self.times = times
        self.states = states


def _json_default(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    raise TypeError(f"not JSON serializable: {type(obj)}")
