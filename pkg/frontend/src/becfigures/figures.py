"""Figure layouts: transmission/reflection panels, permittivity inset,
Bragg scan. Values are plotted exactly as read from the tables (no
resampling or smoothing); rendering is headless (Agg backend).
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .tables import Table, check_compatible, read_table  # noqa: E402

LAYOUTS = ("fig2", "fig3", "fig4", "fig5", "epsilon-inset")

# reflection spans many orders of magnitude for the smooth and split
# profiles, so those layouts default to a log axis
LOG_REFLECTION_DEFAULT = {"fig2": False, "fig3": True, "fig4": True}


@dataclass(frozen=True)
class FigureSpec:
    inputs: tuple[str, ...]
    layout: str
    out: str
    image_format: str | None = None     # inferred from `out` when None
    log_reflection: bool | None = None  # layout default when None
    dpi: int = 150

    def __post_init__(self):
        if self.layout not in LAYOUTS:
            raise ValueError(f"unknown layout {self.layout!r}; "
                             f"expected one of {LAYOUTS}")
        if not self.inputs:
            raise ValueError("at least one input table is required")
        fmt = self.format
        if fmt not in ("png", "svg"):
            raise ValueError(f"unsupported image format {fmt!r}")

    @property
    def format(self) -> str:
        if self.image_format:
            return self.image_format
        return Path(self.out).suffix.lstrip(".").lower() or "png"


def _label(table: Table) -> str:
    parts = []
    if "length" in table.metadata:
        parts.append(f"L = {float(table.metadata['length']):g} wavelengths")
    if "method" in table.metadata:
        parts.append(table.metadata["method"])
    return ", ".join(parts) or Path(table.path).stem


def _style(table: Table) -> dict:
    # reference (Maxwell) curves are dotted, the scattering solution solid
    method = table.metadata.get("method", "")
    if method.startswith("maxwell"):
        return {"linestyle": ":", "linewidth": 1.8}
    return {"linestyle": "-", "linewidth": 1.2}


def build_figure(spec: FigureSpec):
    """Assemble the matplotlib figure for `spec` (no file output)."""
    tables = [read_table(p) for p in spec.inputs]
    check_compatible(tables)
    if spec.layout in ("fig2", "fig3", "fig4"):
        return _spectrum_panels(spec, tables)
    if spec.layout == "fig5":
        return _bragg_panel(spec, tables)
    return _epsilon_panel(spec, tables)


def render(spec: FigureSpec) -> str:
    """Write the figure described by `spec`; returns the output path."""
    fig = build_figure(spec)
    fig.savefig(spec.out, format=spec.format, dpi=spec.dpi)
    plt.close(fig)
    return spec.out


def _spectrum_panels(spec: FigureSpec, tables: list[Table]):
    for t in tables:
        t.require(["delta", "T", "R"])
    log_r = spec.log_reflection
    if log_r is None:
        log_r = LOG_REFLECTION_DEFAULT[spec.layout]
    fig, (ax_t, ax_r) = plt.subplots(
        2, 1, sharex=True, figsize=(6.0, 6.4),
        gridspec_kw={"hspace": 0.08},
    )
    for t in tables:
        ax_t.plot(t.columns["delta"], t.columns["T"],
                  label=_label(t), **_style(t))
        ax_r.plot(t.columns["delta"], t.columns["R"], **_style(t))
    ax_t.set_ylabel("transmission")
    ax_r.set_ylabel("reflection")
    ax_r.set_xlabel("detuning from the displaced resonance (linewidths)")
    if log_r:
        ax_r.set_yscale("log")
    ax_t.legend(loc="best", fontsize=8)
    return fig


def _bragg_panel(spec: FigureSpec, tables: list[Table]):
    for t in tables:
        t.require(["delta_q", "R"])
    fig, ax = plt.subplots(figsize=(6.0, 4.2))
    for t in tables:
        # modulation period 2*pi/delta_q in resonant wavelengths is 1/delta_q
        ax.plot(1.0 / t.columns["delta_q"], t.columns["R"],
                marker="o", markersize=3, label=_label(t), **_style(t))
    for period in (1.0, 2.0):
        ax.axvline(period, color="0.6", linestyle="--", linewidth=0.8)
    ax.set_xlabel("modulation period (resonant wavelengths)")
    ax.set_ylabel("reflection at resonance")
    ax.set_yscale("log")
    ax.legend(loc="best", fontsize=8)
    return fig


def _epsilon_panel(spec: FigureSpec, tables: list[Table]):
    for t in tables:
        t.require(["delta", "eps_re", "eps_im"])
    fig, ax = plt.subplots(figsize=(5.2, 3.8))
    for t in tables:
        ax.plot(t.columns["delta"], t.columns["eps_re"],
                label="real part", linewidth=1.2)
        ax.plot(t.columns["delta"], t.columns["eps_im"],
                label="imaginary part", linewidth=1.2, linestyle="--")
    ax.set_xlabel("detuning (linewidths)")
    ax.set_ylabel("permittivity")
    ax.legend(loc="best", fontsize=8)
    return fig
