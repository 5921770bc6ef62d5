"""Configurable stub translation server for remote-backend tests."""

import json
import threading
import time
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer


class StubTranslateServer:
    """Serves POST /api/v2/translate with scriptable behavior.

    mode: "echo_upper" (default), "malformed", or "fail_then_echo" with
    ``failures`` initial 503 responses. ``delay`` sleeps before answering.
    """

    def __init__(self, mode="echo_upper", failures=0, delay=0.0):
        self.mode = mode
        self.failures_left = failures
        self.delay = delay
        self.requests_seen = 0
        outer = self

        class Handler(BaseHTTPRequestHandler):
            def log_message(self, *args):
                pass

            def do_POST(self):
                outer.requests_seen += 1
                if outer.delay:
                    time.sleep(outer.delay)
                length = int(self.headers.get("Content-Length", 0))
                payload = json.loads(self.rfile.read(length).decode("utf-8"))
                if outer.mode == "fail_then_echo" and outer.failures_left > 0:
                    outer.failures_left -= 1
                    self.send_response(503)
                    self.end_headers()
                    return
                if outer.mode == "malformed":
                    body = json.dumps({"unexpected": True}).encode("utf-8")
                else:
                    body = json.dumps(
                        {"translations": [t.upper() for t in payload["texts"]]}
                    ).encode("utf-8")
                self.send_response(200)
                self.send_header("Content-Type", "application/json")
                self.send_header("Content-Length", str(len(body)))
                self.end_headers()
                self.wfile.write(body)

        self._server = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
        self._thread = threading.Thread(
            target=self._server.serve_forever, daemon=True
        )

    @property
    def url(self):
        host, port = self._server.server_address
        return f"http://{host}:{port}"

    def __enter__(self):
        self._thread.start()
        return self

    def __exit__(self, *exc):
        self._server.shutdown()
        self._server.server_close()
