"""Run manifests and machine-readable report rendering.

Every emitted report embeds the manifest. Numerical payloads are a pure
function of the deterministic manifest fields (command, config, simulation
grid, seed, version); wall-clock metadata is carried only in JSON reports
and excluded from CSV so byte-identical reruns stay byte-identical.
"""

from __future__ import annotations

import datetime
from dataclasses import dataclass

__version__ = "0.1.0"

__all__ = ["__version__", "RunManifest", "terminal_stats_csv", "full_paths_csv"]


@dataclass(frozen=True)
class RunManifest:
    command: str
    config_path: str
    seed: int
    sim: dict | None = None
    version: str = __version__
    created_at: str = ""

    @staticmethod
    def now(command: str, config_path: str, seed: int,
            sim: dict | None = None) -> "RunManifest":
        stamp = datetime.datetime.now(datetime.timezone.utc).isoformat()
        return RunManifest(command=command, config_path=config_path, seed=seed,
                           sim=sim, version=__version__, created_at=stamp)

    def deterministic_items(self) -> list[tuple[str, str]]:
        items = [("command", self.command), ("config", self.config_path),
                 ("seed", str(self.seed)), ("version", self.version)]
        if self.sim:
            for key in sorted(self.sim):
                items.append((f"sim.{key}", _fmt(self.sim[key])))
        return items

    def to_dict(self) -> dict:
        return {"command": self.command, "config_path": self.config_path,
                "seed": self.seed, "sim": self.sim, "version": self.version,
                "created_at": self.created_at}


def _fmt(x) -> str:
    if isinstance(x, float):
        return format(x, ".17g")
    return str(x)


def _manifest_header(manifest: RunManifest) -> list[str]:
    return [f"# {key}: {value}" for key, value in manifest.deterministic_items()]


def terminal_stats_csv(manifest: RunManifest, labels, log_s, log_k,
                       residual) -> str:
    """Per-path terminal statistics as CSV with a commented manifest header."""
    lines = _manifest_header(manifest)
    lines.append("path_id," + ",".join(f"log_S_{lab}" for lab in labels)
                 + ",log_K,identity_residual")
    for pid in range(len(log_k)):
        cells = [str(pid)]
        cells += [_fmt(float(v)) for v in log_s[pid]]
        cells.append(_fmt(float(log_k[pid])))
        cells.append(_fmt(float(residual[pid])))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def full_paths_csv(manifest: RunManifest, labels, times, log_s, log_k) -> str:
    """Grid-resolved paths (one row per path and time point)."""
    lines = _manifest_header(manifest)
    lines.append("path_id,time," + ",".join(f"log_S_{lab}" for lab in labels)
                 + ",log_K")
    n_paths, n_times = log_k.shape[0], len(times)
    for pid in range(n_paths):
        for i in range(n_times):
            cells = [str(pid), _fmt(float(times[i]))]
            cells += [_fmt(float(v)) for v in log_s[pid, i]]
            cells.append(_fmt(float(log_k[pid, i])))
            lines.append(",".join(cells))
    return "\n".join(lines) + "\n"
