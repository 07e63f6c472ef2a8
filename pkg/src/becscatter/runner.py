"""Sweep orchestration and machine-readable output.

Detuning spectra (polariton solver, Maxwell slab reference, forward-only
Maxwell variant), Bragg modulation scans, and deterministic CSV/JSON
writers. The sweep axis is the detuning from the displaced resonance
(the chemical potential red-shift stays visible in the spectra, while the
permittivity argument displacement cancels against the same reference:
eps(omega) at sweep point d equals the disordered-gas cubic at d).

CSV contract: a `# key=value` metadata block, then a header line and
comma-separated data columns, every float printed with 17 significant
digits in scientific notation. Two runs with identical inputs produce
byte-identical files.
"""

from __future__ import annotations

import dataclasses
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import kernels
from .core import (
    OrderParameterProfile,
    ProfileKind,
    SimulationParams,
    default_cutoff,
    make_profile,
)
from .maxwell import maxwell_slab
from .permittivity import local_sqrt_epsilon, solve_epsilon
from .polariton import ConvergenceError, converge, scatter

SCHEMA_SPECTRUM = "becscatter-spectrum-v1"
SCHEMA_BRAGG = "becscatter-bragg-v1"
SCHEMA_EPSILON = "becscatter-epsilon-v1"
SCHEMA_DISPERSION = "becscatter-dispersion-v1"

METHODS = ("polariton", "maxwell", "maxwell-forward-only")


def fmt(value: float) -> str:
    """Pinned float formatting: 17 significant digits, scientific."""
    return f"{value:.16e}"


@dataclass(frozen=True)
class SpectrumTable:
    detunings: np.ndarray
    T: np.ndarray
    R: np.ndarray
    L_loss: np.ndarray
    cutoffs: tuple[int, ...]
    failed_rows: tuple[int, ...]
    metadata: dict


@dataclass(frozen=True)
class BraggScanTable:
    delta_q: np.ndarray
    R: np.ndarray
    cutoffs: tuple[int, ...]
    failed_rows: tuple[int, ...]
    metadata: dict


def _params_metadata(params: SimulationParams) -> dict:
    return {
        "density": repr(params.density),
        "length": repr(params.slab_depth),
        "mu_c": repr(params.mu_c),
        "recoil": repr(params.recoil),
        "resonance_ratio": repr(params.resonance_ratio),
        "delta_q": repr(params.delta_q),
    }


def _params_from_metadata(md: dict) -> SimulationParams:
    return SimulationParams(
        density=float(md["density"]),
        slab_depth=float(md["length"]),
        mu_c=float(md["mu_c"]),
        recoil=float(md["recoil"]),
        resonance_ratio=float(md["resonance_ratio"]),
        delta_q=float(md["delta_q"]),
    )


def forward_only_coefficients(detuning: float, params: SimulationParams,
                              profile: OrderParameterProfile,
                              taylor_order: int | None = 1):
    """Forward-wave-only Maxwell transmission for a smooth profile.

    Accumulates the propagation phase q * integral of (sqrt(eps(z)) - 1) dz
    with sqrt(eps) expanded about the vacuum point: order 1 keeps
    (eps-1)/2, order 2 adds -(eps-1)^2/8, None uses the exact square root.
    No backward wave: R = 0 and losses come from Im(phase).
    """
    q = params.optical_wavenumber(detuning)
    L = params.length
    nodes, weights = np.polynomial.legendre.leggauss(512)
    z = 0.5 * L * nodes
    dens = profile.density_at(z)
    x = local_sqrt_epsilon(dens, detuning)
    eps = x * x
    if taylor_order is None:
        integrand = x - 1.0
    elif taylor_order == 1:
        integrand = (eps - 1.0) / 2.0
    elif taylor_order == 2:
        integrand = (eps - 1.0) / 2.0 - (eps - 1.0) ** 2 / 8.0
    else:
        raise ValueError(f"unsupported taylor_order {taylor_order}")
    phase = q * 0.5 * L * np.sum(weights * integrand)
    T = float(abs(np.exp(1j * phase)) ** 2)
    return T, 0.0, float(1.0 - T)


def _spectrum_point(args):
    (kind, params, detuning, method, tol, cutoff, margin, taylor_order) = args
    profile = make_profile(kind, params)
    failed = False
    used = 0
    if method == "polariton":
        try:
            if cutoff is None:
                coeffs, used = converge(profile, detuning, params, tol=tol,
                                        margin=margin)
            else:
                coeffs = scatter(profile, detuning, params, cutoff)
                used = cutoff
            coeffs.validate()
            T, R, Ll = coeffs.T, coeffs.R, coeffs.L_loss
        except ConvergenceError:
            failed = True
            used = default_cutoff(params, kind, detuning, margin) * 2**6
            coeffs = scatter(profile, detuning, params, used)
            T, R, Ll = coeffs.T, coeffs.R, coeffs.L_loss
    elif method == "maxwell":
        eps = solve_epsilon(detuning - params.mu_c, params.density, params.mu_c)
        resp = maxwell_slab(detuning, params, eps)
        T, R, Ll = resp.T, resp.R, 1.0 - resp.T - resp.R
    elif method == "maxwell-forward-only":
        T, R, Ll = forward_only_coefficients(detuning, params, profile,
                                             taylor_order)
    else:
        raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")
    return T, R, Ll, used, failed


def run_spectrum(profile_kind: ProfileKind | str, params: SimulationParams,
                 dmin: float, dmax: float, n_points: int,
                 method: str = "polariton", tol: float = 1e-6,
                 cutoff: int | None = None, margin: float = 4.0,
                 taylor_order: int | None = 1, workers: int = 1) -> SpectrumTable:
    """One converged (T, R, L) row per detuning in [dmin, dmax]."""
    if n_points < 2:
        raise ValueError("n_points must be >= 2")
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")
    kind = ProfileKind(profile_kind)
    if method == "maxwell" and kind is not ProfileKind.UNIFORM:
        raise ValueError(
            "method=maxwell is the homogeneous-slab closed form; "
            "use maxwell-forward-only for non-uniform profiles"
        )
    detunings = np.linspace(dmin, dmax, n_points)
    jobs = [(kind, params, float(d), method, tol, cutoff, margin, taylor_order)
            for d in detunings]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_spectrum_point, jobs))
    else:
        results = [_spectrum_point(j) for j in jobs]
    T = np.array([r[0] for r in results])
    R = np.array([r[1] for r in results])
    Ll = np.array([r[2] for r in results])
    cutoffs = tuple(int(r[3]) for r in results)
    failed = tuple(i for i, r in enumerate(results) if r[4])
    metadata = {
        "schema": SCHEMA_SPECTRUM,
        "profile": kind.value,
        **_params_metadata(params),
        "dmin": repr(float(dmin)),
        "dmax": repr(float(dmax)),
        "points": str(n_points),
        "method": method,
        "tol": repr(float(tol)),
        "cutoff": "auto" if cutoff is None else str(cutoff),
        "margin": repr(float(margin)),
        "taylor_order": "exact" if taylor_order is None else str(taylor_order),
        "kernel": kernels.backend_name(),
        "cutoffs": ",".join(str(c) for c in cutoffs),
        "failed_rows": ",".join(str(i) for i in failed),
    }
    return SpectrumTable(detunings=detunings, T=T, R=R, L_loss=Ll,
                         cutoffs=cutoffs, failed_rows=failed, metadata=metadata)


def replay_spectrum(metadata: dict) -> SpectrumTable:
    """Re-run a spectrum from its own metadata block."""
    params = _params_from_metadata(metadata)
    cutoff = None if metadata["cutoff"] == "auto" else int(metadata["cutoff"])
    taylor = None if metadata["taylor_order"] == "exact" else int(metadata["taylor_order"])
    return run_spectrum(
        metadata["profile"], params,
        float(metadata["dmin"]), float(metadata["dmax"]), int(metadata["points"]),
        method=metadata["method"], tol=float(metadata["tol"]), cutoff=cutoff,
        margin=float(metadata["margin"]), taylor_order=taylor,
    )


def _bragg_point(args):
    (params, dq, detuning, tol, cutoff, margin) = args
    p_i = dataclasses.replace(params, delta_q=float(dq))
    profile = make_profile(ProfileKind.SPLIT, p_i)
    try:
        if cutoff is None:
            coeffs, used = converge(profile, detuning, p_i, tol=tol, margin=margin)
        else:
            coeffs, used = scatter(profile, detuning, p_i, cutoff), cutoff
        coeffs.validate()
        return coeffs.R, used, False
    except ConvergenceError:
        used = default_cutoff(p_i, ProfileKind.SPLIT, detuning, margin) * 2**6
        coeffs = scatter(profile, detuning, p_i, used)
        return coeffs.R, used, True


def run_bragg_scan(params: SimulationParams, dq_min: float, dq_max: float,
                   n_points: int, tol: float = 1e-6, cutoff: int | None = None,
                   margin: float = 4.0, resonance: str = "displaced",
                   workers: int = 1) -> BraggScanTable:
    """Reflection at the resonance point versus the split-profile modulation
    wavenumber. `resonance` picks the displaced (default) or bare resonance
    as the evaluation frequency."""
    if n_points < 1:
        raise ValueError("n_points must be >= 1")
    if resonance not in ("displaced", "bare"):
        raise ValueError("resonance must be 'displaced' or 'bare'")
    detuning = 0.0 if resonance == "displaced" else params.mu_c
    dqs = np.linspace(dq_min, dq_max, n_points)
    jobs = [(params, float(dq), detuning, tol, cutoff, margin) for dq in dqs]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_bragg_point, jobs))
    else:
        results = [_bragg_point(j) for j in jobs]
    R = np.array([r[0] for r in results])
    cutoffs = tuple(int(r[1]) for r in results)
    failed = tuple(i for i, r in enumerate(results) if r[2])
    metadata = {
        "schema": SCHEMA_BRAGG,
        "profile": ProfileKind.SPLIT.value,
        **_params_metadata(params),
        "dq_min": repr(float(dq_min)),
        "dq_max": repr(float(dq_max)),
        "points": str(n_points),
        "resonance": resonance,
        "tol": repr(float(tol)),
        "cutoff": "auto" if cutoff is None else str(cutoff),
        "margin": repr(float(margin)),
        "kernel": kernels.backend_name(),
        "cutoffs": ",".join(str(c) for c in cutoffs),
        "failed_rows": ",".join(str(i) for i in failed),
    }
    return BraggScanTable(delta_q=dqs, R=R, cutoffs=cutoffs,
                          failed_rows=failed, metadata=metadata)


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------


def _write_metadata(lines: list[str], metadata: dict):
    for key, value in metadata.items():
        lines.append(f"# {key}={value}")


def spectrum_csv(table: SpectrumTable) -> str:
    lines: list[str] = []
    _write_metadata(lines, table.metadata)
    lines.append("delta,T,R,L")
    for d, t, r, ll in zip(table.detunings, table.T, table.R, table.L_loss):
        lines.append(f"{fmt(d)},{fmt(t)},{fmt(r)},{fmt(ll)}")
    return "\n".join(lines) + "\n"


def bragg_csv(table: BraggScanTable) -> str:
    lines: list[str] = []
    _write_metadata(lines, table.metadata)
    lines.append("delta_q,R")
    for dq, r in zip(table.delta_q, table.R):
        lines.append(f"{fmt(dq)},{fmt(r)}")
    return "\n".join(lines) + "\n"


def epsilon_csv(detunings, eps_values, metadata: dict) -> str:
    lines: list[str] = []
    _write_metadata(lines, metadata)
    lines.append("delta,eps_re,eps_im")
    for d, e in zip(detunings, eps_values):
        lines.append(f"{fmt(d)},{fmt(e.real)},{fmt(e.imag)}")
    return "\n".join(lines) + "\n"


def dispersion_csv(e_dets, g_par, g_perp, metadata: dict) -> str:
    lines: list[str] = []
    _write_metadata(lines, metadata)
    lines.append("e_det,g_par_re,g_par_im,g_perp_re,g_perp_im")
    for d, gp, gt in zip(e_dets, g_par, g_perp):
        lines.append(
            f"{fmt(d)},{fmt(gp.real)},{fmt(gp.imag)},{fmt(gt.real)},{fmt(gt.imag)}"
        )
    return "\n".join(lines) + "\n"


def spectrum_json(table: SpectrumTable) -> str:
    rows = [
        {"delta": float(d), "T": float(t), "R": float(r), "L": float(ll),
         "cutoff": int(c)}
        for d, t, r, ll, c in zip(table.detunings, table.T, table.R,
                                  table.L_loss, table.cutoffs)
    ]
    return json.dumps({"metadata": table.metadata, "rows": rows}, indent=2) + "\n"


def bragg_json(table: BraggScanTable) -> str:
    rows = [
        {"delta_q": float(dq), "R": float(r), "cutoff": int(c)}
        for dq, r, c in zip(table.delta_q, table.R, table.cutoffs)
    ]
    return json.dumps({"metadata": table.metadata, "rows": rows}, indent=2) + "\n"


def parse_table_csv(text: str) -> tuple[dict, dict[str, np.ndarray]]:
    """Parse the CSV contract back into (metadata, named columns)."""
    metadata: dict = {}
    header: list[str] | None = None
    columns: list[list[float]] = []
    for line in text.splitlines():
        if not line.strip():
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            key, _, value = body.partition("=")
            metadata[key.strip()] = value
            continue
        if header is None:
            header = [h.strip() for h in line.split(",")]
            columns = [[] for _ in header]
            continue
        for slot, cell in zip(columns, line.split(",")):
            slot.append(float(cell))
    if header is None:
        raise ValueError("no header line found")
    return metadata, {name: np.array(col) for name, col in zip(header, columns)}
