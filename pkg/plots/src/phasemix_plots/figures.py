"""Render sweep CSVs into the three standard figures.

The input contract is the sweep CSV schema (columns circuit, L, epsilon, p,
realization, baseline_2q, mean_2q, stderr_2q, n_accepted, spent_budget,
d_upper, d_lower_est, frobenius_mc, frobenius_mc_err, seed); this package
never touches the optimizer internals.  Rendering is deterministic: fixed
style, fixed SVG hash salt, no timestamps in image metadata.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "phasemix-plots"

import matplotlib.pyplot as plt
import pandas as pd

FIGURE_KINDS = ("gatecount", "budget", "frobenius")

_REQUIRED = {
    "gatecount": ["epsilon", "p", "mean_2q", "stderr_2q", "baseline_2q"],
    "budget": ["epsilon", "realization", "d_upper"],
    "frobenius": ["epsilon", "p", "frobenius_mc", "frobenius_mc_err"],
}


class FigureError(ValueError):
    """Bad figure request: unknown kind, missing columns, or empty data."""


@dataclass(frozen=True)
class FigureSpec:
    csv: str | Path
    kind: str
    out: str | Path
    grouping: tuple[str, ...] = ("epsilon",)

    def __post_init__(self):
        if self.kind not in FIGURE_KINDS:
            raise FigureError(f"unknown figure kind {self.kind!r}; pick from {FIGURE_KINDS}")


@dataclass
class RenderResult:
    """What was drawn, for assertions and logs."""

    out: Path
    n_rows: int
    series: dict = field(default_factory=dict)


def load_sweep(csv_path: str | Path, kind: str) -> pd.DataFrame:
    try:
        df = pd.read_csv(csv_path)
    except pd.errors.EmptyDataError as exc:
        raise FigureError(f"{csv_path}: empty CSV") from exc
    missing = [col for col in _REQUIRED[kind] if col not in df.columns]
    if missing:
        raise FigureError(f"{csv_path}: missing columns {missing}")
    df = df.dropna(subset=[c for c in _REQUIRED[kind] if c != "stderr_2q"])
    if df.empty:
        raise FigureError(f"{csv_path}: no usable rows for {kind}")
    return df


def _new_axes(width=6.0, height=4.2):
    fig, ax = plt.subplots(figsize=(width, height), dpi=120)
    return fig, ax


def _save(fig, out: str | Path) -> Path:
    out = Path(out)
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out, metadata=_empty_metadata(out))
    plt.close(fig)
    return out


def _empty_metadata(out: Path) -> dict:
    # Strip software/date tags so identical inputs give identical bytes.
    suffix = out.suffix.lower()
    if suffix == ".png":
        return {"Software": None}
    if suffix == ".svg":
        return {"Date": None}
    return {}


def render_gatecount(spec: FigureSpec) -> RenderResult:
    """Mean CNOT count against p, one error-barred curve per budget."""
    df = load_sweep(spec.csv, "gatecount")
    fig, ax = _new_axes()
    series = {}
    for eps, group in sorted(df.groupby("epsilon"), key=lambda kv: kv[0]):
        agg = group.groupby("p").agg(
            mean=("mean_2q", "mean"), err=("stderr_2q", "mean")
        ).reset_index()
        ax.errorbar(
            agg["p"], agg["mean"], yerr=agg["err"],
            marker="o", markersize=3.5, capsize=2, linewidth=1.2,
            label=f"budget {eps:g}",
        )
        series[float(eps)] = list(zip(agg["p"], agg["mean"]))
    baseline = float(df["baseline_2q"].iloc[0])
    ax.axhline(baseline, color="0.4", linestyle=":", linewidth=1.0)
    endpoints = df[df["p"].isin((0.0, 1.0))]
    for _, row in endpoints.iterrows():
        label = "baseline" if row["p"] == 0.0 else "squash"
        ax.annotate(
            label, (row["p"], row["mean_2q"]),
            textcoords="offset points", xytext=(4, 6), fontsize=7, color="0.25",
        )
    ax.set_xlabel("identity replacement probability p")
    ax.set_ylabel("mean two-qubit gate count")
    ax.legend(fontsize=8)
    out = _save(fig, spec.out)
    return RenderResult(out=out, n_rows=len(df), series=series)


def render_budget(spec: FigureSpec) -> RenderResult:
    """Achieved diamond-distance bounds against the budget, per realization."""
    df = load_sweep(spec.csv, "budget")
    fig, ax = _new_axes()
    has_lower = "d_lower_est" in df.columns and df["d_lower_est"].notna().any()
    for _, group in df.groupby("realization"):
        group = group.sort_values("epsilon")
        ax.plot(group["epsilon"], group["d_upper"], color="0.7", linewidth=0.9)
        if has_lower:
            ax.plot(
                group["epsilon"], group["d_lower_est"],
                color="tab:green", linewidth=0.7, alpha=0.6,
            )
    mean_curve = df.groupby("epsilon")["d_upper"].mean()
    ax.plot(mean_curve.index, mean_curve.values, color="tab:blue", linewidth=1.8,
            label="mean upper bound")
    grid = sorted(df["epsilon"].unique())
    ax.plot(grid, grid, color="black", linestyle="--", linewidth=1.2, label="error budget")
    ax.set_xlabel("error budget")
    ax.set_ylabel("diamond distance bound")
    ax.legend(fontsize=8)
    out = _save(fig, spec.out)
    series = {"max_over_budget": float((df["d_upper"] - df["epsilon"]).max())}
    return RenderResult(out=out, n_rows=len(df), series=series)


def render_frobenius(spec: FigureSpec) -> RenderResult:
    """Frobenius-distance estimates against the budget and against p."""
    df = load_sweep(spec.csv, "frobenius")
    fig, (left, right) = plt.subplots(1, 2, figsize=(8.6, 3.9), dpi=120)
    for p_value, group in sorted(df.groupby("p"), key=lambda kv: kv[0]):
        group = group.groupby("epsilon").agg(
            mean=("frobenius_mc", "mean"), err=("frobenius_mc_err", "mean")
        ).reset_index()
        left.errorbar(
            group["epsilon"], group["mean"], yerr=group["err"],
            marker="o", markersize=3, capsize=2, linewidth=1.0, label=f"p = {p_value:g}",
        )
    for eps, group in sorted(df.groupby("epsilon"), key=lambda kv: kv[0]):
        group = group.groupby("p").agg(
            mean=("frobenius_mc", "mean"), err=("frobenius_mc_err", "mean")
        ).reset_index()
        right.errorbar(
            group["p"], group["mean"], yerr=group["err"],
            marker="s", markersize=3, capsize=2, linewidth=1.0, label=f"budget {eps:g}",
        )
    left.set_xlabel("error budget")
    left.set_ylabel("mean Frobenius distance")
    left.legend(fontsize=7)
    right.set_xlabel("identity replacement probability p")
    right.legend(fontsize=7)
    fig.tight_layout()
    out = _save(fig, spec.out)
    return RenderResult(out=out, n_rows=len(df))


_RENDERERS = {
    "gatecount": render_gatecount,
    "budget": render_budget,
    "frobenius": render_frobenius,
}


def render(spec: FigureSpec) -> RenderResult:
    """Dispatch on the figure kind; see the per-kind renderers."""
    return _RENDERERS[spec.kind](spec)
