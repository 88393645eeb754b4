"""Figure rendering for sweep reports.

Uses the Agg backend unconditionally: figures go to files, never to a
display, so headless runs behave the same as interactive ones.
"""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)


def render_sweep_figure(reports, path, title=None):
    """Accuracy-versus-dimension curves, one line per report."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for report in reports:
        if not report.per_dim:
            continue
        dims = [int(r) for r, _ in report.per_dim]
        accs = [float(a) for _, a in report.per_dim]
        ax.plot(dims, accs, marker="o", label=report.method)
    ax.set_xlabel("reduced dimension")
    ax.set_ylabel("classification accuracy")
    ax.set_ylim(0.0, 1.05)
    ax.grid(True, alpha=0.3)
    ax.legend(loc="lower right")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
