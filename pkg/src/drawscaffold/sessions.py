"""Session registry for the HTTP service.

Sessions live in memory; give the store a directory and every mutation
is also mirrored to disk as PNG + JSON so a restarted service can pick
the sessions back up. Each session carries its own reader-writer lock:
mutations (canvas upload, recolor, config change) take the write side,
everything else shares the read side.
"""

from __future__ import annotations

import json
import threading
import uuid
from dataclasses import dataclass, field
from pathlib import Path

from .config import SessionConfig
from .errors import UnknownSession
from .imagecore import ImageBuffer, load_png, save_png


class ReadWriteLock:
    """Writer-preferring shared/exclusive lock."""

    def __init__(self) -> None:
        self._cond = threading.Condition()
        self._readers = 0
        self._writer = False
        self._writers_waiting = 0

    def acquire_read(self) -> None:
        with self._cond:
            while self._writer or self._writers_waiting:
                self._cond.wait()
            self._readers += 1

    def release_read(self) -> None:
        with self._cond:
            self._readers -= 1
            if self._readers == 0:
                self._cond.notify_all()

    def acquire_write(self) -> None:
        with self._cond:
            self._writers_waiting += 1
            while self._writer or self._readers:
                self._cond.wait()
            self._writers_waiting -= 1
            self._writer = True

    def release_write(self) -> None:
        with self._cond:
            self._writer = False
            self._cond.notify_all()

    class _Guard:
        def __init__(self, lock: "ReadWriteLock", write: bool):
            self._lock = lock
            self._write = write

        def __enter__(self):
            (self._lock.acquire_write if self._write else self._lock.acquire_read)()

        def __exit__(self, *exc):
            (self._lock.release_write if self._write else self._lock.release_read)()

    def reading(self) -> "ReadWriteLock._Guard":
        return self._Guard(self, write=False)

    def writing(self) -> "ReadWriteLock._Guard":
        return self._Guard(self, write=True)


@dataclass
class Session:
    id: str
    reference: ImageBuffer
    config: SessionConfig
    canvas: ImageBuffer | None = None
    canvas_version: int = 0
    caches: dict = field(default_factory=dict)
    lock: ReadWriteLock = field(default_factory=ReadWriteLock)


class SessionStore:
    def __init__(self, persist_dir: str | Path | None = None):
        self._sessions: dict[str, Session] = {}
        self._map_lock = threading.Lock()
        self._persist_dir = Path(persist_dir) if persist_dir else None
        if self._persist_dir:
            self._persist_dir.mkdir(parents=True, exist_ok=True)
            self._load_existing()

    def create(self, reference: ImageBuffer, config: SessionConfig) -> Session:
        session = Session(id=uuid.uuid4().hex, reference=reference, config=config)
        with self._map_lock:
            self._sessions[session.id] = session
        self.persist(session)
        return session

    def get(self, session_id: str) -> Session:
        with self._map_lock:
            session = self._sessions.get(session_id)
        if session is None:
            raise UnknownSession(f"no session {session_id!r}")
        return session

    def ids(self) -> list[str]:
        with self._map_lock:
            return list(self._sessions)

    def persist(self, session: Session) -> None:
        """Mirror a session to disk, if persistence is on. Caller holds the lock."""
        if not self._persist_dir:
            return
        root = self._persist_dir / session.id
        root.mkdir(parents=True, exist_ok=True)
        save_png(session.reference, root / "reference.png")
        if session.canvas is not None:
            save_png(session.canvas, root / "canvas.png")
        state = {
            "id": session.id,
            "canvas_version": session.canvas_version,
            "config": session.config.to_json(),
        }
        (root / "session.json").write_text(json.dumps(state, indent=2))

    def _load_existing(self) -> None:
        for meta in sorted(self._persist_dir.glob("*/session.json")):
            try:
                state = json.loads(meta.read_text())
                reference = load_png(meta.parent / "reference.png")
            except Exception:
                continue  # skip unreadable entries rather than fail startup
            session = Session(
                id=state["id"],
                reference=reference,
                config=SessionConfig.from_json(state.get("config", {})),
                canvas_version=int(state.get("canvas_version", 0)),
            )
            canvas_path = meta.parent / "canvas.png"
            if canvas_path.exists():
                session.canvas = load_png(canvas_path)
            self._sessions[session.id] = session
