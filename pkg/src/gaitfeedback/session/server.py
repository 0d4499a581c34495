"""Local control/telemetry channel over WebSocket.

The server owns no session state: inbound control messages are queued for
the pipeline thread (which applies them at frame boundaries and sends the
ack back through the originating connection), and outbound telemetry is
fanned out to every connected client. Messages are single-line JSON
objects in both directions.
"""

from __future__ import annotations

import json
import queue
import threading
from typing import Dict, Optional, Set, Tuple

from websockets.sync.server import Server, ServerConnection, serve


class ControlServer:
    """Threaded WebSocket endpoint bridging operators and the pipeline."""

    def __init__(self, host: str = "127.0.0.1", port: int = 0):
        self.control_queue: "queue.Queue" = queue.Queue()
        self._clients: Set[ServerConnection] = set()
        self._lock = threading.Lock()
        self._server: Server = serve(self._handle_client, host, port)
        self._thread = threading.Thread(
            target=self._server.serve_forever, name="control-server", daemon=True
        )
        self._thread.start()

    @property
    def address(self) -> Tuple[str, int]:
        sock = self._server.socket
        host, port = sock.getsockname()[:2]
        return host, port

    # -- inbound ---------------------------------------------------------------

    def _handle_client(self, connection: ServerConnection) -> None:
        send_lock = threading.Lock()

        def reply(ack: Dict) -> None:
            payload = json.dumps(ack, sort_keys=True)
            try:
                with send_lock:
                    connection.send(payload)
            except Exception:
                pass  # client went away; the pipeline must not care

        with self._lock:
            self._clients.add(connection)
        try:
            for raw in connection:
                if isinstance(raw, bytes):
                    reply({"ok": False, "error": "SchemaViolation",
                           "detail": "binary frames are not accepted"})
                    continue
                try:
                    message = json.loads(raw)
                except json.JSONDecodeError as exc:
                    reply({"ok": False, "error": "SchemaViolation",
                           "detail": f"invalid JSON: {exc}"})
                    continue
                self.control_queue.put((message, reply))
        finally:
            with self._lock:
                self._clients.discard(connection)

    # -- outbound ---------------------------------------------------------------

    def broadcast(self, message: Dict) -> None:
        """Telemetry fanout; silently drops clients that have gone away."""
        payload = json.dumps(message, sort_keys=True)
        with self._lock:
            clients = list(self._clients)
        for connection in clients:
            try:
                connection.send(payload)
            except Exception:
                with self._lock:
                    self._clients.discard(connection)

    # -- lifecycle -----------------------------------------------------------------

    def close(self) -> None:
        self._server.shutdown()
        self._thread.join(timeout=5.0)

    def __enter__(self) -> "ControlServer":
        return self

    def __exit__(self, *exc) -> Optional[bool]:
        self.close()
        return None
