"""Report figures rendered with the Agg backend.

Each function draws one figure and saves it atomically; none of them touch
global matplotlib state beyond the backend selection. Figures are a viewing
aid only, the CSV/JSON outputs beside them are authoritative.
"""

import os
import tempfile

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .constants import Hz_to_uK


def _save(fig, path):
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, suffix=".png")
    os.close(fd)
    try:
        fig.savefig(tmp, dpi=150, bbox_inches="tight")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    finally:
        plt.close(fig)


def potential_linecuts(path, z, curves):
    """Axial linecuts; curves is an ordered dict of label -> U in Hz."""
    fig, ax = plt.subplots(figsize=(6.0, 4.2))
    for label, u in curves.items():
        style = "-" if "total" in label else "--"
        ax.plot(z * 1e9, Hz_to_uK(np.asarray(u)), style, label=label, lw=1.4)
    ax.set_xlabel("height z (nm)")
    ax.set_ylabel("U / k_B (uK)")
    ax.set_ylim(-400, 400)
    ax.axhline(0.0, color="0.7", lw=0.6)
    ax.legend(fontsize=8, loc="upper right")
    _save(fig, path)


def field_map(path, x, z, b_field, total, levels_uk):
    """Fictitious-field magnitude map with total-potential contours."""
    fig, ax = plt.subplots(figsize=(6.0, 4.2))
    pc = ax.pcolormesh(
        x * 1e9, z * 1e9, 1e7 * b_field.T, shading="auto", cmap="magma"
    )
    fig.colorbar(pc, ax=ax, label="|B_fict| (mG)")
    cs = ax.contour(
        x * 1e9,
        z * 1e9,
        Hz_to_uK(total.T),
        levels=levels_uk,
        colors="w",
        linewidths=0.7,
    )
    ax.clabel(cs, fontsize=7, fmt="%.0f uK")
    ax.set_xlabel("x (nm)")
    ax.set_ylabel("z (nm)")
    _save(fig, path)


def raman_ladder(path, spacings, rates):
    """Level spacings and adjacent sideband rates per axis.

    spacings/rates: dicts axis -> 1D arrays (Hz); rates may hold zeros.
    """
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(8.0, 3.6))
    for axis, sp in spacings.items():
        ax1.plot(np.arange(1, sp.size + 1), sp / 1e3, "o-", ms=3, label=axis)
    ax1.set_xlabel("level index")
    ax1.set_ylabel("spacing (kHz)")
    ax1.legend(fontsize=8)
    for axis, r in rates.items():
        ax2.plot(np.arange(1, r.size + 1), np.abs(r) / 1e3, "s-", ms=3, label=axis)
    ax2.set_xlabel("upper level")
    ax2.set_ylabel("adjacent rate (kHz)")
    ax2.legend(fontsize=8)
    fig.tight_layout()
    _save(fig, path)


def spectrum_overlay(path, data, model_d, model_t):
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.errorbar(
        data.detunings / 1e9,
        data.transmissions,
        yerr=data.uncertainties,
        fmt=".",
        ms=3,
        lw=0.8,
        color="0.4",
        label="data",
    )
    ax.plot(np.asarray(model_d) / 1e9, model_t, "-", color="C3", label="fit")
    ax.set_xlabel("detuning (GHz)")
    ax.set_ylabel("transmission")
    ax.legend(fontsize=8)
    _save(fig, path)


def decay_trace(path, data, model_t, model_counts):
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.semilogy(data.times * 1e9, np.maximum(data.counts, 0.5), ".", ms=4, color="0.4")
    ax.semilogy(np.asarray(model_t) * 1e9, model_counts, "-", color="C3")
    ax.set_xlabel("time (ns)")
    ax.set_ylabel("counts per bin")
    _save(fig, path)


def decay_line(path, cn, ratio, eta):
    fig, ax = plt.subplots(figsize=(5.2, 4.0))
    ax.plot(cn, ratio, "-", color="C0", label=f"slope eta = {eta:.2f}")
    ax.plot(cn, 1.0 + cn, "--", color="0.6", label="slope 1")
    ax.set_xlabel("collective cooperativity")
    ax.set_ylabel("decay rate ratio")
    ax.legend(fontsize=8)
    _save(fig, path)


def spill_overlay(path, du_uk, values, sigmas, model_du_uk, model_values, onset_uk=250.0):
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.errorbar(du_uk, values, yerr=sigmas, fmt="o", ms=4, color="0.3", label="data")
    ax.plot(model_du_uk, model_values, "-", color="C3", label="fit")
    ax.axvline(onset_uk, color="0.5", ls=":", lw=1.0)
    ax.set_xlabel("barrier minimum (uK)")
    ax.set_ylabel("signal")
    ax.legend(fontsize=8)
    _save(fig, path)


def density_panels(path, maps):
    """Column-density panels n(x,0,z) and n(0,y,z) from a DensityMaps."""
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9.0, 3.8))
    p1 = ax1.pcolormesh(
        maps.x * 1e9, maps.z * 1e9, maps.xz.T, shading="auto", cmap="viridis"
    )
    fig.colorbar(p1, ax=ax1, label="n (1/m^2)")
    ax1.set_xlabel("x (nm)")
    ax1.set_ylabel("z (nm)")
    p2 = ax2.pcolormesh(
        maps.y * 1e6, maps.z * 1e9, maps.yz.T, shading="auto", cmap="viridis"
    )
    fig.colorbar(p2, ax=ax2, label="n (1/m^2)")
    ax2.set_xlabel("y (um)")
    ax2.set_ylabel("z (nm)")
    fig.tight_layout()
    _save(fig, path)


def lifetime_overlay(path, t, values, sigmas, model_t, model_values):
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.errorbar(t, values, yerr=sigmas, fmt="o", ms=4, color="0.3", label="data")
    ax.plot(model_t, model_values, "-", color="C3", label="fit")
    ax.set_xlabel("hold time (s)")
    ax.set_ylabel("relative atom number")
    ax.legend(fontsize=8)
    _save(fig, path)
