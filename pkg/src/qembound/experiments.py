"""End-to-end experiment drivers and the nearest-fidelity classifier.

Each driver returns an ExperimentResult holding curve columns, matrix
tables, and JSON-ready objects, all derived deterministically from the
master seed.  Independent random streams for parallelizable units
(repetitions, dataset draws) come from `np.random.default_rng([seed, k])`,
so results do not depend on scheduling; a thread count of 1 is the
reproducibility default and anything higher only maps the same tasks onto
a pool.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .bottleneck import IBConfig, SimplexConfig, ib_iterate_mixed, ib_iterate_pure, vqib_train
from .bounds import KernelMatrix, gen_bound_B, kernel_bound_B, risk_report
from .datasets import gaussian_ensemble, two_moons
from .embeddings import AngleEmbedding, LabeledEnsemble, class_average
from .ising import IsingSpec, overlap_matrix
from .linalg import ValidationError, helstrom_risk, swap_test_estimate


@dataclass
class ExperimentResult:
    """Uniform container the report writer understands."""

    name: str
    params: dict
    seed: int
    columns: dict = field(default_factory=dict)   # curve name -> column dict
    tables: dict = field(default_factory=dict)    # name -> {"data": 2D, "header": [..]|None}
    objects: dict = field(default_factory=dict)   # blob name -> JSON-able dict
    warnings: list = field(default_factory=list)
    runtime: float = 0.0

    def finite_check(self):
        for cols in self.columns.values():
            for key, vals in cols.items():
                a = np.asarray(vals, dtype=float)
                if not np.all(np.isfinite(a)):
                    raise ValidationError(f"non-finite values in column {key!r}")


def task_rng(seed: int, index: int) -> np.random.Generator:
    """Independent stream for task `index` of a run with master `seed`."""
    return np.random.default_rng([seed, index])


# ---------------------------------------------------------------------------
# Nearest-fidelity classification
# ---------------------------------------------------------------------------

def fidelity_classifier(train: Sequence[tuple[int, object]], query: object,
                        fid: Callable[[object, object], float],
                        shots: int | None = None,
                        rng: np.random.Generator | None = None) -> int:
    """Class of the training state with the highest (estimated) fidelity.

    `fid` maps a pair of state ids to their fidelity; with `shots` set the
    fidelity is replaced by a SWAP-test estimate.  Ties go to the earliest
    training entry.
    """
    if not train:
        raise ValidationError("training set is empty")
    best_val, best_class = -1.0, -1
    for label, sid in train:
        f = fid(query, sid)
        if shots is not None:
            f = swap_test_estimate(f, shots, rng)
        if f > best_val:
            best_val, best_class = f, label
    return best_class


# ---------------------------------------------------------------------------
# Angle-encoding sweep over copy counts (risk vs generalization bound)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Fig4Config:
    nq_max: int = 10
    mean0: float = -10.0
    mean1: float = 10.0
    std: float = 7.0
    grid: int = 400
    window: tuple[float, float] = (-31.0, 31.0)
    seed: int = 7


def run_fig4(config: Fig4Config) -> ExperimentResult:
    """Risk and bound of the repeated angle encoding for 1..nq_max qubits."""
    if not 1 <= config.nq_max <= 10:
        raise ValidationError("the copy sweep covers 1..10 qubits")
    t0 = time.perf_counter()
    data = gaussian_ensemble(config.mean0, config.mean1, config.std,
                             config.grid, config.window)
    ens = data.angle_ensemble()
    rows = {"n_qubits": [], "risk": [], "gen_bound_B": []}
    for nq in range(1, config.nq_max + 1):
        e = AngleEmbedding(n_qubits=nq)
        rho0 = class_average(e, ens, 0)
        rho1 = class_average(e, ens, 1)
        rows["n_qubits"].append(nq)
        rows["risk"].append(helstrom_risk(rho0, rho1))
        rows["gen_bound_B"].append(gen_bound_B(e, ens))
    result = ExperimentResult(
        name="fig4", params=_params_dict(config), seed=config.seed,
        columns={"fig4_curve": rows},
        objects={"fig4_meta": {"bayes_risk": _bayes(data.ensemble),
                               "mass_warning": data.mass_warning}},
    )
    if data.mass_warning:
        result.warnings.append("window truncates more than 1% of a class conditional")
    result.runtime = time.perf_counter() - t0
    result.finite_check()
    return result


def _bayes(ens: LabeledEnsemble) -> float:
    return float(1.0 - np.sum(np.max(ens.joint, axis=0)))


def _params_dict(config) -> dict:
    out = {}
    for k, v in vars(config).items():
        out[k] = list(v) if isinstance(v, tuple) else v
    return out


# ---------------------------------------------------------------------------
# Quantum phase recognition on the Ising chain
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IsingRunConfig:
    length: int = 100
    grid: int = 100                  # kernel discretization of the field axis
    h_range: tuple[float, float] = (0.0, 2.0)
    train_per_phase: int = 10
    shots: tuple[int, ...] = (1, 10, 100)
    repetitions: int = 1000
    test_grid: int = 200
    seed: int = 7
    threads: int = 1
    # keep training fields this far away from the critical point, where the
    # phase label is undefined
    critical_margin: float = 1e-3


def ising_kernel_bound(config: IsingRunConfig) -> float:
    """Generalization bound of the uniform-field ground-state ensemble."""
    spec = IsingSpec(config.length, config.h_range, config.grid)
    hs = spec.fields()
    f = overlap_matrix(hs, hs, config.length)
    p = np.full(config.grid, 1.0 / config.grid)
    return kernel_bound_B(KernelMatrix(p[:, None] * f, p))


def _one_phase_run(config: IsingRunConfig, rep: int, test_h: np.ndarray,
                   test_theta: np.ndarray) -> dict:
    from .ising import bogoliubov_angles, overlap_from_angles

    rng = task_rng(config.seed, rep)
    lo, hi = config.h_range
    m = config.critical_margin
    t = config.train_per_phase
    train_h = np.concatenate([rng.uniform(lo, 1.0 - m, t),
                              rng.uniform(1.0 + m, hi, t)])
    train_labels = np.repeat([0, 1], t)
    train_theta = bogoliubov_angles(train_h, config.length)

    # exact-mode training error: each training state queries the full set,
    # itself included, so the unit self-fidelity wins outright
    f_train = overlap_from_angles(train_theta[:, None, :], train_theta[None, :, :])
    train_err = int(np.sum(train_labels[np.argmax(f_train, axis=1)] != train_labels))

    f_test = overlap_from_angles(test_theta[:, None, :], train_theta[None, :, :])
    true = (test_h > 1.0).astype(int)
    errors = {}
    for s in config.shots:
        est = rng.binomial(s, f_test) / s
        pred = train_labels[np.argmax(est, axis=1)]
        errors[s] = (pred != true).astype(np.uint8)
    return {"train_err": train_err, "errors": errors}


def run_ising(config: IsingRunConfig) -> ExperimentResult:
    """Kernel bound plus the shot-noisy phase-recognition error sweep."""
    if min(config.shots) < 1 or config.repetitions < 1 or config.train_per_phase < 1:
        raise ValidationError("shots, repetitions and training size must be >= 1")
    t0 = time.perf_counter()
    from .ising import bogoliubov_angles

    bound = ising_kernel_bound(config)
    test_h = np.linspace(config.h_range[0], config.h_range[1], config.test_grid)
    test_theta = bogoliubov_angles(test_h, config.length)

    reps = range(config.repetitions)
    if config.threads > 1:
        with ThreadPoolExecutor(max_workers=config.threads) as pool:
            outs = list(pool.map(
                lambda r: _one_phase_run(config, r, test_h, test_theta), reps))
    else:
        outs = [_one_phase_run(config, r, test_h, test_theta) for r in reps]

    train_errors = np.array([o["train_err"] for o in outs])
    columns = {}
    for s in config.shots:
        errs = np.stack([o["errors"][s] for o in outs]).astype(float)
        columns[f"ising_error_s{s}"] = {
            "h": test_h.tolist(),
            "err_mean": errs.mean(axis=0).tolist(),
            "err_std": errs.std(axis=0, ddof=1).tolist(),
        }
    result = ExperimentResult(
        name="ising", params=_params_dict(config), seed=config.seed,
        columns=columns,
        objects={"ising_B": {
            "gen_bound_B": bound,
            "length": config.length,
            "grid": config.grid,
            "train_error_total": int(train_errors.sum()),
            "train_error_max": int(train_errors.max()),
            "repetitions": config.repetitions,
        }},
    )
    result.runtime = time.perf_counter() - t0
    result.finite_check()
    return result


# ---------------------------------------------------------------------------
# Information-bottleneck sweep over beta (risk/bound tradeoff curve)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IBSweepConfig:
    beta_min: float = 1.0
    beta_max: float = 3.0
    beta_points: int = 21
    iterations: int = 1000
    mode: str = "mixed"
    mean0: float = -10.0
    mean1: float = 10.0
    std: float = 7.0
    grid: int = 400
    window: tuple[float, float] = (-31.0, 31.0)
    seed: int = 7


def run_ib_sweep(config: IBSweepConfig) -> ExperimentResult:
    """Tabulated-embedding IB solutions across a beta grid."""
    if config.beta_points < 1 or config.beta_min < 0 or config.beta_max < config.beta_min:
        raise ValidationError("invalid beta grid")
    t0 = time.perf_counter()
    data = gaussian_ensemble(config.mean0, config.mean1, config.std,
                             config.grid, config.window)
    ens = data.ensemble
    betas = np.linspace(config.beta_min, config.beta_max, config.beta_points)
    solver = ib_iterate_mixed if config.mode == "mixed" else ib_iterate_pure
    rows = {"beta": [], "risk": [], "gen_bound_B": [], "lagrangian": [], "residual": []}
    solutions = []
    for beta in betas:
        sol = solver(ens, IBConfig(beta=float(beta), iterations=config.iterations,
                                   mode=config.mode, seed=config.seed))
        it, lag, r, b = sol.checkpoints[-1]
        rows["beta"].append(float(beta))
        rows["risk"].append(r)
        rows["gen_bound_B"].append(b)
        rows["lagrangian"].append(lag)
        rows["residual"].append(sol.residual)
        solutions.append(sol.to_json_dict())
    result = ExperimentResult(
        name="ib", params=_params_dict(config), seed=config.seed,
        columns={"ib_curve": rows},
        objects={"ib_solutions": {"bayes_risk": _bayes(ens), "sweep": solutions}},
    )
    result.runtime = time.perf_counter() - t0
    result.finite_check()
    return result


# ---------------------------------------------------------------------------
# Variational IB training on the 2-moons sample
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MoonsConfig:
    beta: float = 30.0
    layers: int = 3
    train_per_class: int = 100
    test_per_class: int = 100
    big_test_total: int = 10000
    noise: float = 0.3
    seed: int = 1
    max_evals: int = 5000
    restarts: int = 5


def _exact_errors(states_train: np.ndarray, labels_train: np.ndarray,
                  states_query: np.ndarray, labels_query: np.ndarray) -> np.ndarray:
    f = np.abs(states_query @ states_train.conj().T)
    pred = labels_train[np.argmax(f, axis=1)]
    return pred != labels_query


def run_moons_vqib(config: MoonsConfig) -> ExperimentResult:
    """Train the reuploading embedding on 2-moons and score it exactly."""
    if config.beta <= 0 or config.layers < 1:
        raise ValidationError("beta must be > 0 and layers >= 1")
    t0 = time.perf_counter()
    xs_train, y_train = two_moons(config.train_per_class, config.noise,
                                  task_rng(config.seed, 0))
    xs_test, y_test = two_moons(config.test_per_class, config.noise,
                                task_rng(config.seed, 1))
    n_big = config.big_test_total // 2
    xs_big, y_big = two_moons(n_big, config.noise, task_rng(config.seed, 2))

    fit = vqib_train(xs_train, y_train, config.beta, config.layers,
                     SimplexConfig(max_evals=config.max_evals,
                                   restarts=config.restarts),
                     seed=config.seed)
    e = fit.embedding
    st_train = e.amplitudes_batch(xs_train)
    st_test = e.amplitudes_batch(xs_test)
    st_big = e.amplitudes_batch(xs_big)

    train_err = _exact_errors(st_train, y_train, st_train, y_train)
    test_err = _exact_errors(st_train, y_train, st_test, y_test)
    big_err = _exact_errors(st_train, y_train, st_big, y_big)

    fid = np.abs(st_train @ st_train.conj().T)
    max_infidelity = float(np.max(1.0 - np.clip(fid, 0.0, 1.0)))
    miss = np.flatnonzero(test_err)
    pred_test = y_train[np.argmax(np.abs(st_test @ st_train.conj().T), axis=1)]
    miss_rows = np.column_stack([xs_test[miss], y_test[miss], pred_test[miss]]) \
        if miss.size else np.zeros((0, 4))
    points = np.column_stack([
        np.concatenate([np.zeros(len(y_train)), np.ones(len(y_test))]),
        np.vstack([xs_train, xs_test]),
        np.concatenate([y_train, y_test]),
    ])

    result = ExperimentResult(
        name="vqib", params=_params_dict(config), seed=config.seed,
        columns={},
        tables={
            "fidelity_matrix": {"data": fid, "header": None},
            "misclassified": {"data": miss_rows,
                              "header": ["x1", "x2", "true_class", "predicted_class"]},
            "moons_points": {"data": points,
                             "header": ["test_set", "x1", "x2", "class"]},
        },
        objects={
            "errors": {
                "training_error": float(train_err.mean()),
                "testing_error": float(test_err.mean()),
                "testing_error_big": float(big_err.mean()),
                "loss": fit.loss,
                "stage_losses": fit.stage_losses,
                "n_evals": fit.n_evals,
                "converged": fit.converged,
                "max_infidelity": max_infidelity,
                "beta": config.beta,
            },
            "embedding": e.to_json_dict(),
        },
    )
    result.runtime = time.perf_counter() - t0
    return result


# ---------------------------------------------------------------------------
# Scalar risk/bound report for a configured angle encoding
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BoundsConfig:
    nq: int = 1
    mean0: float = -10.0
    mean1: float = 10.0
    std: float = 7.0
    grid: int = 400
    window: tuple[float, float] = (-31.0, 31.0)
    train_size: int = 100
    delta_confidence: float = 0.05
    seed: int = 7


def run_bounds(config: BoundsConfig) -> ExperimentResult:
    """Full RiskReport of the angle encoding on the Gaussian ensemble."""
    if config.nq < 1 or config.train_size < 1:
        raise ValidationError("nq and train_size must be >= 1")
    t0 = time.perf_counter()
    data = gaussian_ensemble(config.mean0, config.mean1, config.std,
                             config.grid, config.window)
    report = risk_report(AngleEmbedding(config.nq), data.angle_ensemble(),
                         config.train_size, config.delta_confidence)
    result = ExperimentResult(
        name="bounds", params=_params_dict(config), seed=config.seed,
        objects={"report": report.to_json_dict()},
    )
    if data.mass_warning:
        result.warnings.append("window truncates more than 1% of a class conditional")
    result.runtime = time.perf_counter() - t0
    return result
