"""Matplotlib figures written next to the CSV outputs."""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

golden_mean = (np.sqrt(5) - 1.0) / 2.0
fig_width = 5.0

params = {
    "font.family": "serif",
    "mathtext.fontset": "stix",
    "font.size": 9,
    "axes.labelsize": 10,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "lines.linewidth": 1.2,
    "figure.figsize": [fig_width, fig_width * golden_mean],
    "savefig.dpi": 200,
}

# solid for the unprotected run, then dotted, dot-dashed, dashed
LINESTYLES = ["-", ":", "-.", "--", (0, (5, 1, 1, 1, 1, 1))]

# fixed metadata keeps repeated renders byte-identical
PNG_METADATA = {"Software": None}


def plot_fidelity(columns, table, path):
    """Fidelity versus t/tau with an inset of gate fidelity versus n.

    ``columns`` maps a label to ``(times, fidelity)``; ``table`` holds
    ``(n, gate_fidelity)`` rows where ``n = 0`` is the unprotected run.
    """
    with plt.rc_context(params):
        fig, ax = plt.subplots()
        for style, (label, (t, f)) in zip(LINESTYLES * 4, columns.items()):
            ax.plot(t, f, linestyle=style, color="k", label=label)
        ax.set_xlabel(r"$t/\tau$")
        ax.set_ylabel("Fidelity")
        ax.set_xlim(0, 1)
        ax.legend(loc="lower left", frameon=False)
        protected = [(n, f) for n, f in table if n > 0]
        if len(protected) > 1:
            inset = ax.inset_axes([0.6, 0.12, 0.36, 0.3])
            ns, fs = zip(*protected)
            inset.plot(ns, fs, "ko-", markersize=3, linewidth=0.8)
            inset.set_xlabel(r"$n=\omega_0\tau_c/2\pi$", fontsize=7)
            inset.set_ylabel("gate fidelity", fontsize=7)
            inset.tick_params(labelsize=6)
        fig.tight_layout()
        fig.savefig(path, metadata=PNG_METADATA)
        plt.close(fig)


def plot_schedule(schedule, path):
    """Magnitude of the nine Rabi channels over the schedule."""
    from .rb87 import POLARIZATIONS

    with plt.rc_context(params):
        fig, axes = plt.subplots(3, 1, sharex=True,
                                 figsize=(fig_width, fig_width * 1.1))
        for s, ax in enumerate(axes, start=1):
            for q, style in zip(POLARIZATIONS, ["-", "--", ":"]):
                ax.plot(schedule.times, np.abs(schedule.channel(s, q)),
                        linestyle=style, color="k", label=f"q={q:+d}")
            ax.set_ylabel(rf"$|\Omega_{{{s},q}}|$")
        axes[0].legend(loc="upper right", frameon=False, ncol=3)
        axes[-1].set_xlabel(r"$t/\tau$")
        fig.tight_layout()
        fig.savefig(path, metadata=PNG_METADATA)
        plt.close(fig)
