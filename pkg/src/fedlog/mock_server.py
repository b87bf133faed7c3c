"""Desk-scale mock REST server standing in for online sources.

Serves fixture CSVs over ``GET /api/<relation>/<key>`` (and
``GET /api/<relation>`` for full scans) as JSON record lists.  Failures
can be injected for retry testing via ``POST /admin/fail/<n>``.
"""

from __future__ import annotations

import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from typing import Iterable
from urllib.parse import unquote

from .adapters import RelationSchema, load_relation_csv


class MockRestServer:
    def __init__(
        self,
        fixture_dir,
        relations: Iterable[RelationSchema],
        host: str = "127.0.0.1",
        port: int = 0,
    ):
        self.fixture_dir = Path(fixture_dir)
        self.relations = {r.short_name: r for r in relations}
        self.tables = {
            r.short_name: load_relation_csv(self.fixture_dir, r)
            for r in self.relations.values()
        }
        self._fail_remaining = 0
        self._lock = threading.Lock()
        server = self

        class Handler(BaseHTTPRequestHandler):
            def log_message(self, fmt, *args):  # keep test output quiet
                pass

            def _send(self, code: int, payload) -> None:
                body = json.dumps(payload).encode("utf-8")
                self.send_response(code)
                self.send_header("Content-Type", "application/json")
                self.send_header("Content-Length", str(len(body)))
                self.end_headers()
                self.wfile.write(body)

            def do_GET(self):
                parts = [unquote(p) for p in self.path.strip("/").split("/") if p]
                if parts == ["health"]:
                    self._send(200, {"status": "ok"})
                    return
                if not parts or parts[0] != "api" or len(parts) not in (2, 3):
                    self._send(404, {"error": "not found"})
                    return
                if server._take_failure():
                    self._send(500, {"error": "injected failure"})
                    return
                relation = parts[1]
                schema = server.relations.get(relation)
                if schema is None:
                    self._send(404, {"error": f"unknown relation {relation}"})
                    return
                rows = server.tables[relation]
                if len(parts) == 3:
                    key_idx = schema.key_index
                    rows = [r for r in rows if r[key_idx] == parts[2]]
                records = [dict(zip(schema.columns, r)) for r in rows]
                self._send(200, records)

            def do_POST(self):
                parts = self.path.strip("/").split("/")
                if len(parts) == 3 and parts[:2] == ["admin", "fail"]:
                    try:
                        n = int(parts[2])
                    except ValueError:
                        self._send(400, {"error": "count must be an integer"})
                        return
                    with server._lock:
                        server._fail_remaining = n
                    self._send(200, {"failing_next": n})
                    return
                self._send(404, {"error": "not found"})

        self._httpd = ThreadingHTTPServer((host, port), Handler)
        self._thread: threading.Thread | None = None

    def _take_failure(self) -> bool:
        with self._lock:
            if self._fail_remaining > 0:
                self._fail_remaining -= 1
                return True
            return False

    @property
    def port(self) -> int:
        return self._httpd.server_address[1]

    @property
    def url(self) -> str:
        host = self._httpd.server_address[0]
        return f"http://{host}:{self.port}"

    @property
    def api_url(self) -> str:
        return f"{self.url}/api"

    def start(self) -> "MockRestServer":
        self._thread = threading.Thread(target=self._httpd.serve_forever, daemon=True)
        self._thread.start()
        return self

    def stop(self) -> None:
        self._httpd.shutdown()
        if self._thread:
            self._thread.join(timeout=5)
        self._httpd.server_close()

    def __enter__(self):
        return self.start()

    def __exit__(self, *exc):
        self.stop()


def serve_mock(fixture_dir, relations, host="127.0.0.1", port=0) -> MockRestServer:
    return MockRestServer(fixture_dir, relations, host, port).start()
