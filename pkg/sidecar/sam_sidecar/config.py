"""Sidecar configuration.

Defaults run the stub against the fixtures shipped with the package.
Model mode needs explicit checkpoint paths; thresholds default to the
upstream Grounded-SAM pipeline values and are echoed in every response
so results stay attributable to the settings that produced them.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path

ENV_PREFIX = "SAM_SIDECAR_"

# Upstream pipeline defaults for the text detector.
DEFAULT_BOX_THRESHOLD = 0.3
DEFAULT_TEXT_THRESHOLD = 0.25

PACKAGED_FIXTURES = Path(__file__).parent / "fixtures"


@dataclass(frozen=True)
class SidecarConfig:
    mode: str = "stub"
    detector_config_path: str | None = None
    detector_checkpoint_path: str | None = None
    mask_checkpoint_path: str | None = None
    mask_variant: str = "vit_h"
    box_threshold: float = DEFAULT_BOX_THRESHOLD
    text_threshold: float = DEFAULT_TEXT_THRESHOLD
    host: str = "127.0.0.1"
    port: int = 8766
    fixture_dir: Path = field(default_factory=lambda: PACKAGED_FIXTURES)

    def __post_init__(self) -> None:
        if self.mode not in ("model", "stub"):
            raise ValueError(f"mode must be 'model' or 'stub', got {self.mode!r}")
        if self.mode == "model":
            missing = [
                name
                for name, value in (
                    ("detector_config_path", self.detector_config_path),
                    ("detector_checkpoint_path", self.detector_checkpoint_path),
                    ("mask_checkpoint_path", self.mask_checkpoint_path),
                )
                if not value
            ]
            if missing:
                raise ValueError(f"model mode needs {', '.join(missing)}")
        else:
            object.__setattr__(self, "fixture_dir", Path(self.fixture_dir))
            if not self.fixture_dir.is_dir():
                raise ValueError(f"stub mode needs a fixture directory, {self.fixture_dir} is not one")

    def thresholds_json(self) -> dict:
        return {"box_threshold": self.box_threshold, "text_threshold": self.text_threshold}

    @classmethod
    def from_env(cls, env: dict | None = None, **overrides) -> "SidecarConfig":
        env = os.environ if env is None else env

        def pick(name: str, fallback):
            return env.get(ENV_PREFIX + name, fallback)

        values = {
            "mode": pick("MODE", "stub"),
            "detector_config_path": pick("DETECTOR_CONFIG", None),
            "detector_checkpoint_path": pick("DETECTOR_CHECKPOINT", None),
            "mask_checkpoint_path": pick("MASK_CHECKPOINT", None),
            "mask_variant": pick("MASK_VARIANT", "vit_h"),
            "box_threshold": float(pick("BOX_THRESHOLD", DEFAULT_BOX_THRESHOLD)),
            "text_threshold": float(pick("TEXT_THRESHOLD", DEFAULT_TEXT_THRESHOLD)),
            "host": pick("HOST", "127.0.0.1"),
            "port": int(pick("PORT", 8766)),
            "fixture_dir": Path(pick("FIXTURES", PACKAGED_FIXTURES)),
        }
        values.update(overrides)
        return cls(**values)
