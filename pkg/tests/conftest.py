import numpy as np
import pytest

from drawscaffold.imagecore import ImageBuffer, encode_png


def flat(w, h, rgb):
    arr = np.zeros((h, w, 3), dtype=np.uint8)
    arr[:] = rgb
    return ImageBuffer(arr)


@pytest.fixture
def two_band_png():
    """PNG with a light top half and dark bottom half."""
    arr = np.zeros((64, 64, 3), dtype=np.uint8)
    arr[:32] = 230
    arr[32:] = 60
    return encode_png(ImageBuffer(arr))


@pytest.fixture
def client():
    import warnings

    from drawscaffold.config import AppConfig
    from drawscaffold.service import create_app

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DeprecationWarning)
        from fastapi.testclient import TestClient

    return TestClient(create_app(AppConfig()))
