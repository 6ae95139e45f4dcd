import threading
import time

import pytest
import uvicorn

from sam_sidecar.config import SidecarConfig
from sam_sidecar.service import create_app


@pytest.fixture(scope="session")
def stub_url():
    """Stub sidecar on a real socket; the wire matters here, not TestClient."""
    server = uvicorn.Server(
        uvicorn.Config(create_app(SidecarConfig()), host="127.0.0.1", port=0, log_level="error")
    )
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    deadline = time.time() + 15.0
    while not server.started:
        if time.time() > deadline:
            raise RuntimeError("stub sidecar did not start")
        time.sleep(0.02)
    port = server.servers[0].sockets[0].getsockname()[1]
    yield f"http://127.0.0.1:{port}"
    server.should_exit = True
    thread.join(timeout=5.0)
