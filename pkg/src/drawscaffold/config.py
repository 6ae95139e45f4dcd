"""Service and session configuration.

A session's config is embedded in every response it produces, so any
result can be replayed from the payload alone. App-level settings come
from an optional JSON file with environment overrides on top
(DRAWSCAFFOLD_* variables), flags last.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, replace
from pathlib import Path

from .composition import RansacConfig
from .imagecore import BlurSpec
from .matching import Tolerances

DEFAULT_EPSILON = 0.01  # RDP tolerance, normalized units
DEFAULT_TOP_K = 4  # composition lines shown by default
DEFAULT_PALETTE_K = 5

ENV_PREFIX = "DRAWSCAFFOLD_"


@dataclass(frozen=True)
class SessionConfig:
    epsilon: float = DEFAULT_EPSILON
    ransac: RansacConfig = field(default_factory=RansacConfig)
    k_lines: int = DEFAULT_TOP_K
    palette_k: int = DEFAULT_PALETTE_K
    blur: BlurSpec = field(default_factory=lambda: BlurSpec("gaussian", 2.5))
    tolerances: Tolerances = field(default_factory=Tolerances)

    def to_json(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "ransac": self.ransac.to_json(),
            "k_lines": self.k_lines,
            "palette_k": self.palette_k,
            "blur": {"filter": self.blur.filter, "kernel_size": self.blur.kernel_size},
            "tolerances": {
                "value": self.tolerances.value,
                "hue": self.tolerances.hue,
                "saturation": self.tolerances.saturation,
            },
        }

    @classmethod
    def from_json(cls, data: dict) -> "SessionConfig":
        base = cls()
        return base.patched(data)

    def patched(self, data: dict) -> "SessionConfig":
        """New config with the given partial overrides applied."""
        out = self
        if "epsilon" in data:
            out = replace(out, epsilon=float(data["epsilon"]))
        if "k_lines" in data:
            out = replace(out, k_lines=int(data["k_lines"]))
        if "palette_k" in data:
            out = replace(out, palette_k=int(data["palette_k"]))
        if "ransac" in data:
            r = data["ransac"]
            out = replace(
                out,
                ransac=RansacConfig(
                    theta_dis=float(r.get("theta_dis", out.ransac.theta_dis)),
                    theta_inl=float(r.get("theta_inl", out.ransac.theta_inl)),
                    iterations=int(r.get("iterations", out.ransac.iterations)),
                    seed=int(r.get("seed", out.ransac.seed)),
                    max_lines=int(r.get("max_lines", out.ransac.max_lines)),
                ),
            )
        if "blur" in data:
            b = data["blur"]
            out = replace(
                out,
                blur=BlurSpec(
                    filter=str(b.get("filter", out.blur.filter)),
                    kernel_size=float(b.get("kernel_size", out.blur.kernel_size)),
                ),
            )
        if "tolerances" in data:
            t = data["tolerances"]
            out = replace(
                out,
                tolerances=Tolerances(
                    value=float(t.get("value", out.tolerances.value)),
                    hue=float(t.get("hue", out.tolerances.hue)),
                    saturation=float(t.get("saturation", out.tolerances.saturation)),
                ),
            )
        return out


@dataclass(frozen=True)
class AppConfig:
    provider_kind: str = "box"
    provider_path: str | None = None
    provider_url: str | None = None
    provider_timeout: float = 30.0
    host: str = "127.0.0.1"
    port: int = 8765
    persist_dir: str | None = None
    defaults: SessionConfig = field(default_factory=SessionConfig)

    @classmethod
    def load(cls, path: str | Path | None = None, env: dict | None = None) -> "AppConfig":
        env = os.environ if env is None else env
        data: dict = {}
        if path:
            data = json.loads(Path(path).read_text())
        cfg = cls(
            provider_kind=data.get("provider", {}).get("kind", "box"),
            provider_path=data.get("provider", {}).get("path"),
            provider_url=data.get("provider", {}).get("url"),
            provider_timeout=float(data.get("provider", {}).get("timeout", 30.0)),
            host=data.get("host", "127.0.0.1"),
            port=int(data.get("port", 8765)),
            persist_dir=data.get("persist_dir"),
            defaults=SessionConfig.from_json(data.get("defaults", {})),
        )
        def pick(name: str, fallback):
            return env.get(ENV_PREFIX + name, fallback)

        return replace(
            cfg,
            provider_kind=pick("PROVIDER", cfg.provider_kind),
            provider_path=pick("PROVIDER_PATH", cfg.provider_path),
            provider_url=pick("PROVIDER_URL", cfg.provider_url),
            provider_timeout=float(pick("PROVIDER_TIMEOUT", cfg.provider_timeout)),
            host=pick("HOST", cfg.host),
            port=int(pick("PORT", cfg.port)),
            persist_dir=pick("PERSIST_DIR", cfg.persist_dir),
        )
