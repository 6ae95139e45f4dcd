"""Model backend: text-prompted detector feeding a promptable mask model.

Heavy imports happen on first use so the package stays importable (and
the stub fully functional) on machines without torch or the model
repos. Any load failure is remembered and surfaced as 503 by the
service layer instead of being retried per request.
"""

from __future__ import annotations

import numpy as np
from PIL import Image

from .config import SidecarConfig
from .masks import encode_mask_b64


class ModelNotLoaded(RuntimeError):
    pass


class ModelBackend:
    def __init__(self, config: SidecarConfig):
        self.config = config
        self._detector = None
        self._predictor = None
        self._load_error: str | None = None

    def _ensure_loaded(self) -> None:
        if self._predictor is not None:
            return
        if self._load_error is not None:
            raise ModelNotLoaded(self._load_error)
        try:
            from groundingdino.util.inference import Model as DetectorModel
            from segment_anything import SamPredictor, sam_model_registry

            self._detector = DetectorModel(
                model_config_path=self.config.detector_config_path,
                model_checkpoint_path=self.config.detector_checkpoint_path,
            )
            sam = sam_model_registry[self.config.mask_variant](
                checkpoint=self.config.mask_checkpoint_path
            )
            self._predictor = SamPredictor(sam)
        except Exception as exc:
            self._load_error = f"{type(exc).__name__}: {exc}"
            self._detector = None
            self._predictor = None
            raise ModelNotLoaded(self._load_error) from exc

    def segment(self, image: Image.Image, text_prompt: str | None, boxes: list) -> list[dict]:
        self._ensure_loaded()
        rgb = np.asarray(image.convert("RGB"))
        height, width = rgb.shape[:2]

        labeled: list[tuple[np.ndarray, str, str, float]] = []  # xyxy, label, source, confidence
        if text_prompt:
            classes = [c.strip() for c in text_prompt.split(",") if c.strip()]
            detections = self._detector.predict_with_classes(
                image=rgb[:, :, ::-1],  # detector wants BGR
                classes=classes,
                box_threshold=self.config.box_threshold,
                text_threshold=self.config.text_threshold,
            )
            for xyxy, confidence, class_id in zip(
                detections.xyxy, detections.confidence, detections.class_id
            ):
                label = classes[class_id] if class_id is not None else "object"
                labeled.append((np.asarray(xyxy), label, "text", float(confidence)))
        for i, box in enumerate(boxes):
            xyxy = np.array(
                [box[0] * width, box[1] * height, box[2] * width, box[3] * height]
            )
            labeled.append((xyxy, f"box_{i}", "box", 1.0))

        out = []
        if labeled:
            self._predictor.set_image(rgb)
            for xyxy, label, source, confidence in labeled:
                masks, scores, _ = self._predictor.predict(
                    box=xyxy[None, :], multimask_output=False
                )
                mask = masks[0].astype(bool)
                if mask.shape != (height, width):
                    resized = Image.fromarray(mask.astype(np.uint8) * 255, mode="L").resize(
                        (width, height), Image.NEAREST
                    )
                    mask = np.asarray(resized) >= 128
                out.append(
                    {
                        "png_b64": encode_mask_b64(mask),
                        "label": label,
                        "source": source,
                        "confidence": confidence,
                    }
                )
        return out
