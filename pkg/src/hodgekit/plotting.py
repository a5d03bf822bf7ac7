"""Optional figure rendering for decay scans (file output only)."""

from __future__ import annotations

import math

from .orbits import ScanResult


def render_scan(result: ScanResult, path: str, title: str = "decay scan") -> str:
    """Write a log-distance vs y figure with the fitted model to ``path``."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    rows = [r for r in result.rows if not r.skipped and math.isfinite(r.log_dist)]
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    ax.plot([r.y for r in rows], [r.log_dist for r in rows], "o", label="samples")
    if rows and math.isfinite(result.slope):
        ys = [r.y for r in rows]
        fitted = [
            result.slope * y + result.log_coeff * math.log(y) + result.intercept for y in ys
        ]
        ax.plot(ys, fitted, "-", label=f"fit: a={result.slope:.6g}, b={result.log_coeff:.3g}")
    ax.set_xlabel("y")
    ax.set_ylabel("log dist")
    ax.set_title(title)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
