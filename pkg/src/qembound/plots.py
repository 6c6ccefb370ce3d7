"""Figure rendering for experiment reports.

Each experiment gets one or two PNG files next to its delimited output.
Rendering is deterministic: fixed figure sizes, no timestamps, and the
Agg backend throughout.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

_DPI = 150


def _save(fig, path: Path) -> Path:
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return path


def _render_fig4(result, out: Path) -> list[Path]:
    cols = result.columns["fig4_curve"]
    nq = cols["n_qubits"]
    risk = cols["risk"]
    bound = cols["gen_bound_B"]
    bayes = result.objects["fig4_meta"]["bayes_risk"]
    fig, ax = plt.subplots(figsize=(5.2, 4.0))
    ax.plot(bound, risk, "-", color="0.6", zorder=1)
    ax.scatter(bound, risk, s=220, c=nq, cmap="viridis", zorder=2)
    for b, r, n in zip(bound, risk, nq):
        ax.annotate(str(n), (b, r), ha="center", va="center", fontsize=8, color="w")
    ax.axhline(bayes, ls="--", color="tab:red", lw=1, label="Bayes risk")
    ax.set_xlabel("generalization bound B")
    ax.set_ylabel("classification risk R")
    ax.legend()
    fig.tight_layout()
    return [_save(fig, out / "fig4_curve.png")]


def _render_ising(result, out: Path) -> list[Path]:
    fig, ax = plt.subplots(figsize=(5.6, 4.0))
    for name, cols in sorted(result.columns.items()):
        s = name.rsplit("s", 1)[-1]
        h = np.asarray(cols["h"])
        mean = np.asarray(cols["err_mean"])
        std = np.asarray(cols["err_std"])
        line, = ax.plot(h, mean, label=f"S = {s}")
        ax.fill_between(h, np.clip(mean - std, 0, 1), np.clip(mean + std, 0, 1),
                        alpha=0.2, color=line.get_color())
    ax.axvline(1.0, ls=":", color="k", lw=1)
    ax.set_xlabel("magnetic field h")
    ax.set_ylabel("testing error")
    b = result.objects["ising_B"]["gen_bound_B"]
    ax.set_title(f"phase recognition, B = {b:.2f}")
    ax.legend()
    fig.tight_layout()
    return [_save(fig, out / "ising_error.png")]


def _render_ib(result, out: Path) -> list[Path]:
    cols = result.columns["ib_curve"]
    betas = np.asarray(cols["beta"])
    risk = np.asarray(cols["risk"])
    bound = np.asarray(cols["gen_bound_B"])
    bayes = result.objects["ib_solutions"]["bayes_risk"]
    fig, ax = plt.subplots(figsize=(5.2, 4.0))
    sc = ax.scatter(bound, risk, c=betas, cmap="plasma")
    fig.colorbar(sc, ax=ax, label="beta")
    ax.axhline(bayes, ls="--", color="tab:red", lw=1, label="Bayes risk")
    ax.set_xlabel("generalization bound B")
    ax.set_ylabel("classification risk R")
    ax.legend()
    fig.tight_layout()
    files = [_save(fig, out / "ib_tradeoff.png")]

    sweep = result.objects["ib_solutions"]["sweep"]
    with_bloch = [s for s in sweep if "bloch" in s]
    if with_bloch:
        picks = [with_bloch[0], with_bloch[-1]]
        fig, axes = plt.subplots(1, len(picks), figsize=(8.0, 4.0))
        axes = np.atleast_1d(axes)
        for ax2, sol in zip(axes, picks):
            b = np.asarray(sol["bloch"])
            ax2.scatter(b[:, 0], b[:, 2], s=8)
            circle = plt.Circle((0, 0), 1.0, fill=False, color="0.7")
            ax2.add_patch(circle)
            ax2.set_xlim(-1.1, 1.1)
            ax2.set_ylim(-1.1, 1.1)
            ax2.set_aspect("equal")
            ax2.set_xlabel("<X>")
            ax2.set_ylabel("<Z>")
            ax2.set_title(f"beta = {sol['beta']:.2f}")
        fig.tight_layout()
        files.append(_save(fig, out / "ib_bloch.png"))
    return files


def _render_vqib(result, out: Path) -> list[Path]:
    fid = np.asarray(result.tables["fidelity_matrix"]["data"])
    fig, ax = plt.subplots(figsize=(4.6, 4.0))
    im = ax.imshow(fid, vmin=0.0, vmax=1.0, cmap="inferno", origin="lower")
    fig.colorbar(im, ax=ax, label="fidelity")
    ax.set_xlabel("training index (class 0 first)")
    ax.set_ylabel("training index (class 0 first)")
    fig.tight_layout()
    files = [_save(fig, out / "vqib_fidelity.png")]

    pts = np.asarray(result.tables["moons_points"]["data"])
    miss = np.asarray(result.tables["misclassified"]["data"])
    fig, ax = plt.subplots(figsize=(5.2, 4.0))
    for c, color in ((0, "tab:blue"), (1, "tab:orange")):
        sel = pts[:, 3] == c
        ax.scatter(pts[sel, 1], pts[sel, 2], s=10, color=color, label=f"class {c}")
    if len(miss):
        ax.scatter(miss[:, 0], miss[:, 1], marker="x", s=60, color="red",
                   label="misclassified")
    ax.set_xlabel("x1")
    ax.set_ylabel("x2")
    ax.legend()
    fig.tight_layout()
    files.append(_save(fig, out / "vqib_moons.png"))
    return files


_RENDERERS = {
    "fig4": _render_fig4,
    "ising": _render_ising,
    "ib": _render_ib,
    "vqib": _render_vqib,
}


def render(result, out_dir) -> list[Path]:
    """Render the figures belonging to one experiment result, if any."""
    fn = _RENDERERS.get(result.name)
    if fn is None:
        return []
    return fn(result, Path(out_dir))
