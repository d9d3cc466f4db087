"""Experiment registry, config parsing, and CSV emission for the CLI.

Experiments are identified by id and carry registry defaults (method,
resolutions, step-size ladder or rule, final time, evaluation-grid size);
a TOML config selects an experiment and may override the recorded knobs.
Error-table experiments emit one CSV row per run with convergence rates
down each ladder group; eigen_bn emits the six smallest Shen-basis
eigenvalues per N; Riemann and custom experiments emit solution profiles.

Step counts are integers by construction: the nominal step size is rounded
to steps = round(T / dt) and the actual dt = T / steps is what the CSV
records. Floats are written as shortest round-trip decimals with LF line
endings so outputs are byte-stable on a given platform.
"""

from __future__ import annotations

import os

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields
from typing import Optional

import numpy as np

from .grids import chebyshev_gl_grid, legendre_gl_grid
from .norms import error_norms, weighted_error_norms
from .operators import (assemble_collocation, assemble_gni_bbm, bn_eigenvalues,
                        shen_matrices, shen_from_nodal, shen_reconstruct)
from .problems import (PDEProblem, builtin_initial_data, flux_burgers,
                       flux_porous, lift_boundary, map_to_reference)
from .series import builtin_series, manufactured_problem1, manufactured_problem2
from .stepping import (EulerStepper, SdirkStepper, StepperConfig, integrate,
                       tableau_gamma_half, tableau_third_order)

THREADS_ENV = "SOBSPEC_THREADS"

METHODS = ("legendre_gni", "legendre_shen", "chebyshev_colloc")
INTEGRATORS = ("gamma_half", "gamma_third_order", "euler")
DT_RULES = ("half_h", "quarter_h_squared")
FLUXES = {"none": None, "burgers": flux_burgers, "porous": flux_porous}
INITIAL_DATA = ("square_pulse", "tent", "piecewise_quadratic", "riemann",
                "sin_pi", "sech", "zero")

CSV_HEADER = "experiment,method,integrator,N,dt,T,l2,h1,linf,rate_l2,rate_h1"
EIGEN_HEADER = "N,index,eigenvalue"
PROFILE_HEADER = "t,x,v"


class ConfigError(ValueError):
    """Invalid configuration text or field values."""


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    method: Optional[str] = None
    integrator: Optional[str] = None
    N: Optional[list] = None
    dt: Optional[list] = None
    dt_rule: Optional[str] = None
    T: Optional[float] = None
    P: Optional[int] = None
    snapshot_times: Optional[list] = None
    output: Optional[str] = None
    domain: Optional[tuple] = None
    a: Optional[float] = None
    alpha: Optional[float] = None
    beta: Optional[float] = None
    gamma: Optional[float] = None
    flux: Optional[str] = None
    initial: Optional[str] = None
    S_L: Optional[float] = None
    S_R: Optional[float] = None


@dataclass
class RunResult:
    kind: str  # "errors" | "eigen" | "profiles"
    experiment: str
    error_groups: list = field(default_factory=list)  # list of ErrorReport lists
    eigen_rows: list = field(default_factory=list)    # (N, index, value)
    profile_rows: list = field(default_factory=list)  # (t, x, v)


@dataclass(frozen=True)
class RegistryEntry:
    kind: str
    description: str
    defaults: dict


REGISTRY = {
    "problem1": RegistryEntry(
        "errors",
        "manufactured smooth solution, Legendre Galerkin, step-size ladder",
        dict(method="legendre_gni", N=[128], dt=[0.1, 0.05, 0.025, 0.0125],
             T=1.0, P=512)),
    "problem2": RegistryEntry(
        "errors",
        "traveling sech profile on (-20, 30), Chebyshev collocation, weighted norms",
        dict(method="chebyshev_colloc", N=[512], dt=[0.1, 0.05, 0.025, 0.0125],
             T=10.0)),
    "nonsmooth_pulse": RegistryEntry(
        "errors",
        "square-pulse data, series reference, resolution ladder with dt = h/2",
        dict(method="chebyshev_colloc", N=[32, 64, 128, 256], dt_rule="half_h",
             T=1.0)),
    "nonsmooth_tent": RegistryEntry(
        "errors",
        "tent data, series reference, resolution ladder with dt = h/2",
        dict(method="chebyshev_colloc", N=[32, 64, 128, 256], dt_rule="half_h",
             T=1.0)),
    "nonsmooth_pq": RegistryEntry(
        "errors",
        "piecewise-quadratic data, series reference, dt = h/2",
        dict(method="chebyshev_colloc", N=[32, 64, 128, 256], dt_rule="half_h",
             T=1.0)),
    "nonsmooth_pq_dt2": RegistryEntry(
        "errors",
        "piecewise-quadratic data, Legendre Galerkin, dt = h^2/4",
        dict(method="legendre_gni", N=[32, 64, 128, 256],
             dt_rule="quarter_h_squared", T=1.0, P=32,
             integrator="gamma_third_order")),
    "riemann_a": RegistryEntry(
        "profiles",
        "Riemann data S_L=0.9 on (-60, 210), porous flux, profile snapshots",
        dict(method="legendre_gni", integrator="gamma_third_order", N=[512],
             dt=[0.05], T=150.0, S_L=0.9, S_R=0.0,
             snapshot_times=[0.0, 30.0, 60.0, 90.0, 120.0, 150.0])),
    "riemann_b": RegistryEntry(
        "profiles",
        "Riemann data S_L=0.55 on (-60, 210), porous flux, profile snapshots",
        dict(method="legendre_gni", integrator="gamma_third_order", N=[512],
             dt=[0.05], T=150.0, S_L=0.55, S_R=0.0,
             snapshot_times=[0.0, 30.0, 60.0, 90.0, 120.0, 150.0])),
    "eigen_bn": RegistryEntry(
        "eigen",
        "six smallest eigenvalues of the Shen-basis stiffness matrix",
        dict(N=[16, 32, 64])),
    "custom": RegistryEntry(
        "profiles",
        "user-defined run from config fields, emits profile snapshots",
        dict()),
}


def registry_ids():
    return list(REGISTRY)


# -- configuration ----------------------------------------------------------

_LIST_FIELDS = {"N", "dt", "snapshot_times"}


def _as_float_list(name, value):
    items = value if isinstance(value, list) else [value]
    out = []
    for v in items:
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ConfigError(f"{name} entries must be numbers, got {v!r}")
        out.append(float(v))
    if not out:
        raise ConfigError(f"{name} must not be empty")
    return out


def parse_config(text):
    """Parse and validate TOML configuration text into an ExperimentConfig."""
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"config parse error: {exc}") from None
    known = {f.name for f in fields(ExperimentConfig)}
    unknown = sorted(set(raw) - known)
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    if "experiment" not in raw:
        raise ConfigError("config must name an experiment")
    cfg = {"experiment": raw["experiment"]}
    if cfg["experiment"] not in REGISTRY:
        raise ConfigError(f"unknown experiment {cfg['experiment']!r}; "
                          f"choose from {', '.join(REGISTRY)}")
    for key, value in raw.items():
        if key == "experiment":
            continue
        if key in ("method", "integrator", "dt_rule", "output", "flux", "initial"):
            if not isinstance(value, str):
                raise ConfigError(f"{key} must be a string")
            cfg[key] = value
        elif key == "N":
            items = value if isinstance(value, list) else [value]
            if not items or not all(isinstance(v, int) and not isinstance(v, bool)
                                    and v >= 2 for v in items):
                raise ConfigError("N must be an integer >= 2 or a list of them")
            cfg[key] = items
        elif key in ("dt", "snapshot_times"):
            cfg[key] = _as_float_list(key, value)
        elif key == "domain":
            pair = _as_float_list(key, value)
            if len(pair) != 2 or pair[0] >= pair[1]:
                raise ConfigError("domain must be [A, B] with A < B")
            cfg[key] = (pair[0], pair[1])
        elif key == "P":
            if not isinstance(value, int) or isinstance(value, bool) or value < 2:
                raise ConfigError("P must be an integer >= 2")
            cfg[key] = value
        elif key in ("T", "a", "alpha", "beta", "gamma", "S_L", "S_R"):
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ConfigError(f"{key} must be a number")
            cfg[key] = float(value)
        else:  # pragma: no cover - known set is exhaustive
            raise ConfigError(f"unhandled config key {key}")
    config = ExperimentConfig(**cfg)
    _validate_choices(config)
    return config


def _validate_choices(config):
    if config.method is not None and config.method not in METHODS:
        raise ConfigError(f"method must be one of {', '.join(METHODS)}")
    if config.integrator is not None and config.integrator not in INTEGRATORS:
        raise ConfigError(f"integrator must be one of {', '.join(INTEGRATORS)}")
    if config.dt_rule is not None and config.dt_rule not in DT_RULES:
        raise ConfigError(f"dt_rule must be one of {', '.join(DT_RULES)}")
    if config.flux is not None and config.flux not in FLUXES:
        raise ConfigError(f"flux must be one of {', '.join(FLUXES)}")
    if config.initial is not None and config.initial not in INITIAL_DATA:
        raise ConfigError(f"initial must be one of {', '.join(INITIAL_DATA)}")
    if config.dt is not None and config.dt_rule is not None:
        raise ConfigError("give either dt or dt_rule, not both")
    if config.T is not None and config.T <= 0:
        raise ConfigError("T must be positive")


def _with_defaults(config):
    entry = REGISTRY[config.experiment]
    merged = dict(entry.defaults)
    for f in fields(ExperimentConfig):
        value = getattr(config, f.name)
        if value is not None:
            merged[f.name] = value
    merged["experiment"] = config.experiment
    if merged.get("dt") is not None and merged.get("dt_rule") is not None:
        # a config-supplied rule replaces a registry dt ladder and vice versa
        if config.dt is not None:
            merged["dt_rule"] = None
        elif config.dt_rule is not None:
            merged["dt"] = None
    return ExperimentConfig(**{f.name: merged.get(f.name) for f in fields(ExperimentConfig)})


def nominal_dt(rule, N):
    """Step-size rules in terms of h = 2/N."""
    h = 2.0 / N
    if rule == "half_h":
        return 0.5 * h
    if rule == "quarter_h_squared":
        return 0.25 * h * h
    raise ConfigError(f"unknown dt rule {rule!r}")


def _steps_and_dt(dt_nominal, T):
    steps = max(1, int(round(T / dt_nominal)))
    return steps, T / steps


def _thread_count():
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None
    return max(1, n)


def _map_over_runs(fn, args_list):
    """Apply fn over the run list, optionally threaded; order-preserving."""
    n_threads = _thread_count()
    if n_threads == 1 or len(args_list) <= 1:
        return [fn(*args) for args in args_list]
    with ThreadPoolExecutor(max_workers=n_threads) as pool:
        futures = [pool.submit(fn, *args) for args in args_list]
        return [f.result() for f in futures]


# -- solving ----------------------------------------------------------------

def _make_stepper(system, integrator, dt):
    cfg = StepperConfig(dt=dt)
    if integrator == "gamma_half":
        return SdirkStepper(system, tableau_gamma_half(), cfg), cfg
    if integrator == "gamma_third_order":
        return SdirkStepper(system, tableau_third_order(), cfg), cfg
    if integrator == "euler":
        return EulerStepper(system, cfg), cfg
    raise ConfigError(f"unknown integrator {integrator!r}")


@dataclass
class SolveOutput:
    grid: object
    dmap: object
    final: np.ndarray            # full nodal values, boundary reattached
    snapshots: dict              # t -> full nodal values
    coefficients: Optional[np.ndarray] = None  # Shen runs only


def _run_solution(method, integrator, N, dt, T, problem, snapshot_times=()):
    ref, dmap = map_to_reference(problem)
    if method == "chebyshev_colloc":
        grid = chebyshev_gl_grid(N)
        system = assemble_collocation(grid, ref.a, ref.alpha, ref.beta, ref.gamma,
                                      ref.flux, source=ref.source,
                                      boundary=ref.boundary)
        V0 = ref.v0(grid.nodes)[1:-1]
        lift_nodes = np.zeros(N + 1)
    elif method == "legendre_gni":
        grid = legendre_gl_grid(N)
        homog, lift = lift_boundary(ref)
        system = assemble_gni_bbm(grid, homog.a, homog.alpha, homog.beta,
                                  homog.gamma, homog.flux, source=homog.source,
                                  boundary=homog.boundary,
                                  flux_shift=homog.flux_shift)
        V0 = homog.v0(grid.nodes)[1:-1]
        lift_nodes = lift(grid.nodes)
    elif method == "legendre_shen":
        if (ref.alpha != 0.0 or ref.gamma != 0.0 or ref.source is not None
                or ref.boundary != (0.0, 0.0) or ref.beta >= 0.0):
            raise ConfigError("legendre_shen handles the plain linear problem "
                              "(alpha = gamma = 0, beta < 0, homogeneous data)")
        grid = legendre_gl_grid(N)
        system = shen_matrices(N, ref.a, -ref.beta)
        V0 = shen_from_nodal(grid, ref.v0(grid.nodes)[1:-1])
        lift_nodes = np.zeros(N + 1)
    else:
        raise ConfigError(f"unknown method {method!r}")

    stepper, cfg = _make_stepper(system, integrator, dt)
    result = integrate(system, stepper, cfg, V0, T, snapshot_times=snapshot_times)

    def to_full(vec):
        if method == "legendre_shen":
            full = np.zeros(N + 1)
            full[1:-1] = shen_reconstruct(vec, grid.nodes[1:-1])
            return full
        return system.pad(vec) + lift_nodes

    snaps = {t: to_full(v) for t, v in result.snapshots.items()}
    coeffs = result.final if method == "legendre_shen" else None
    return SolveOutput(grid=grid, dmap=dmap, final=to_full(result.final),
                       snapshots=snaps, coefficients=coeffs)


def _experiment_problem(experiment, cfg):
    """Problem definition and exact solution for the registry experiments."""
    if experiment == "problem1":
        ms = manufactured_problem1()
        problem = PDEProblem(domain=(-1.0, 1.0), a=1.0, alpha=1.0, beta=-1.0,
                             gamma=0.5, flux=flux_burgers, source=ms.source,
                             v0=lambda x: ms.value(x, 0.0))
        return problem, ms, False
    if experiment == "problem2":
        ms = manufactured_problem2()
        problem = PDEProblem(domain=(-20.0, 30.0), a=1.0, alpha=1.0, beta=-1.0,
                             gamma=-0.5, flux=flux_burgers, source=ms.source,
                             v0=lambda x: ms.value(x, 0.0))
        return problem, ms, True
    data_name = {"nonsmooth_pulse": "square_pulse",
                 "nonsmooth_tent": "tent",
                 "nonsmooth_pq": "piecewise_quadratic",
                 "nonsmooth_pq_dt2": "piecewise_quadratic"}[experiment]
    problem = PDEProblem(domain=(-1.0, 1.0), a=1.0, beta=-1.0,
                         v0=builtin_initial_data(data_name))
    return problem, builtin_series(data_name), False


def _error_run(experiment, method, integrator, N, dt_nominal, T, P, problem,
               exact, weighted):
    steps, dt = _steps_and_dt(dt_nominal, T)
    out = _run_solution(method, integrator, N, dt, T, problem)
    values = out.coefficients if out.coefficients is not None else out.final
    if weighted:
        return weighted_error_norms(out.grid, values, exact, T, domain_map=out.dmap,
                                    method=method, experiment=experiment,
                                    integrator=integrator, dt=dt)
    return error_norms(out.grid, values, exact, T, N=N, P=(P if P else N),
                       domain_map=out.dmap, method=method, experiment=experiment,
                       integrator=integrator, dt=dt)


def _run_error_experiment(cfg):
    problem, exact, weighted = _experiment_problem(cfg.experiment, cfg)
    integrators = ([cfg.integrator] if cfg.integrator
                   else ["gamma_half", "gamma_third_order"])
    runs = []
    for integrator in integrators:
        if cfg.dt is not None:
            ladder = [(cfg.N[0], dt) for dt in cfg.dt] if len(cfg.N) == 1 else None
            if ladder is None:
                raise ConfigError("explicit dt ladders need a single N")
        else:
            ladder = [(N, nominal_dt(cfg.dt_rule, N)) for N in cfg.N]
        runs.append([(cfg.experiment, cfg.method, integrator, N, dtn, cfg.T,
                      cfg.P, problem, exact, weighted) for N, dtn in ladder])
    flat = [args for group in runs for args in group]
    reports = _map_over_runs(_error_run, flat)
    result = RunResult(kind="errors", experiment=cfg.experiment)
    pos = 0
    for group in runs:
        result.error_groups.append(reports[pos:pos + len(group)])
        pos += len(group)
    return result


def _run_eigen_experiment(cfg):
    result = RunResult(kind="eigen", experiment=cfg.experiment)
    for N in cfg.N:
        vals = bn_eigenvalues(N)[:6]
        result.eigen_rows.extend((N, i + 1, float(v)) for i, v in enumerate(vals))
    return result


def _custom_problem(cfg):
    required = dict(method=cfg.method, N=cfg.N, T=cfg.T, domain=cfg.domain)
    missing = [k for k, v in required.items() if v is None]
    if cfg.dt is None and cfg.dt_rule is None:
        missing.append("dt")
    if missing:
        raise ConfigError(f"custom experiment needs: {', '.join(sorted(missing))}")
    boundary = (0.0, 0.0)
    if cfg.initial == "riemann":
        if cfg.S_L is None or cfg.S_R is None:
            raise ConfigError("riemann initial data needs S_L and S_R")
        boundary = (cfg.S_L, cfg.S_R)
    v0 = (builtin_initial_data(cfg.initial, S_L=cfg.S_L, S_R=cfg.S_R)
          if cfg.initial and cfg.initial != "zero" else None)
    kwargs = dict(domain=cfg.domain, flux=FLUXES[cfg.flux or "none"],
                  boundary=boundary)
    for name in ("a", "alpha", "beta", "gamma"):
        if getattr(cfg, name) is not None:
            kwargs[name] = getattr(cfg, name)
    if v0 is not None:
        kwargs["v0"] = v0
    return PDEProblem(**kwargs)


def _run_profile_experiment(cfg):
    if cfg.experiment in ("riemann_a", "riemann_b"):
        problem = PDEProblem(domain=(-60.0, 210.0), a=5.0, alpha=0.0, beta=-1.0,
                             gamma=1.0, flux=flux_porous,
                             boundary=(cfg.S_L, cfg.S_R),
                             v0=builtin_initial_data("riemann", S_L=cfg.S_L,
                                                     S_R=cfg.S_R))
    else:
        problem = _custom_problem(cfg)
    N = cfg.N[0]
    dt_nominal = cfg.dt[0] if cfg.dt else nominal_dt(cfg.dt_rule, N)
    steps, dt = _steps_and_dt(dt_nominal, cfg.T)
    times = cfg.snapshot_times if cfg.snapshot_times else [cfg.T]
    times = [float(t) for t in times if 0.0 <= t <= cfg.T]
    out = _run_solution(cfg.method, cfg.integrator or "gamma_third_order",
                        N, dt, cfg.T, problem, snapshot_times=times)
    x_phys = out.dmap.from_reference(out.grid.nodes)
    result = RunResult(kind="profiles", experiment=cfg.experiment)
    for t in sorted(out.snapshots):
        v = out.snapshots[t]
        result.profile_rows.extend((t, float(xj), float(vj))
                                   for xj, vj in zip(x_phys, v))
    return result


def run_experiment(config):
    """Run a parsed (or programmatically built) config; returns a RunResult."""
    _validate_choices(config)
    if config.experiment not in REGISTRY:
        raise ConfigError(f"unknown experiment {config.experiment!r}")
    cfg = _with_defaults(config)
    kind = REGISTRY[cfg.experiment].kind
    if kind == "eigen":
        return _run_eigen_experiment(cfg)
    if kind == "profiles":
        return _run_profile_experiment(cfg)
    return _run_error_experiment(cfg)


# -- emission ---------------------------------------------------------------

def _fmt(value):
    if value is None or value == "":
        return ""
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def format_csv(result):
    """Render a RunResult to CSV text (LF endings, round-trip floats)."""
    if result.kind == "eigen":
        lines = [EIGEN_HEADER]
        lines += [f"{N},{i},{_fmt(v)}" for N, i, v in result.eigen_rows]
        return "\n".join(lines) + "\n"
    if result.kind == "profiles":
        lines = [PROFILE_HEADER]
        lines += [f"{_fmt(t)},{_fmt(x)},{_fmt(v)}" for t, x, v in result.profile_rows]
        return "\n".join(lines) + "\n"
    lines = [CSV_HEADER]
    for group in result.error_groups:
        prev = None
        for rep in group:
            rate_l2 = rate_h1 = ""
            if prev is not None:
                rate_l2 = _fmt(np.log2(prev.l2 / rep.l2)) if prev.l2 > 0 and rep.l2 > 0 else ""
                rate_h1 = _fmt(np.log2(prev.h1 / rep.h1)) if prev.h1 > 0 and rep.h1 > 0 else ""
            lines.append(",".join([
                rep.experiment, rep.method, rep.integrator, str(rep.N),
                _fmt(rep.dt), _fmt(rep.T), _fmt(rep.l2), _fmt(rep.h1),
                _fmt(rep.linf), rate_l2, rate_h1]))
            prev = rep
    return "\n".join(lines) + "\n"


def emit_csv(result, path):
    """Write an error or eigenvalue table as CSV; returns the row count."""
    text = format_csv(result)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    return text.count("\n") - 1


def emit_plotdata(result, path):
    """Write profile rows (t, x, v) as CSV; returns the row count."""
    if result.kind != "profiles":
        raise ValueError("emit_plotdata expects a profiles result")
    return emit_csv(result, path)


# -- goldens ----------------------------------------------------------------

def golden_manifest():
    """Small deterministic runs pinned as byte-exact reference outputs."""
    return {
        "eigen_bn.csv": ExperimentConfig(experiment="eigen_bn"),
        "pulse_small.csv": ExperimentConfig(experiment="nonsmooth_pulse",
                                            N=[16, 32], T=0.125,
                                            integrator="gamma_third_order"),
    }


def write_goldens(directory):
    os.makedirs(directory, exist_ok=True)
    for name, cfg in golden_manifest().items():
        emit_csv(run_experiment(cfg), os.path.join(directory, name))


def check_goldens(directory):
    """Re-run the golden configs and byte-compare; returns mismatch names."""
    mismatches = []
    for name, cfg in golden_manifest().items():
        path = os.path.join(directory, name)
        fresh = format_csv(run_experiment(cfg)).encode("utf-8")
        try:
            with open(path, "rb") as fh:
                stored = fh.read()
        except FileNotFoundError:
            mismatches.append(f"{name}: missing")
            continue
        if stored != fresh:
            mismatches.append(f"{name}: differs")
    return mismatches
