"""HTTP/1.1 JSON layer over the translation service.

Endpoints: POST /api/v2/translate, GET /api/v2/languages,
GET /api/v2/stats, GET /healthz. Bodies are UTF-8 JSON; errors carry a
machine-readable code. CORS is open so the web client can run anywhere.
"""

from __future__ import annotations

import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from urllib.parse import parse_qs, urlparse

from .config import ServiceConfig
from .service import ApiError, TranslationRequest, TranslationService


class _Handler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"
    service: TranslationService  # injected by make_server

    def log_message(self, *args):
        pass

    def _send_json(self, status: int, payload: dict, retry_after: float | None = None):
        body = json.dumps(payload, ensure_ascii=False).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json; charset=utf-8")
        self.send_header("Content-Length", str(len(body)))
        self.send_header("Access-Control-Allow-Origin", "*")
        if retry_after is not None:
            self.send_header("Retry-After", f"{max(retry_after, 0.001):.3f}")
        self.end_headers()
        self.wfile.write(body)

    def _send_error(self, status: int, code: str, message: str, retry_after=None):
        self._send_json(
            status, {"error": {"code": code, "message": message}}, retry_after
        )

    def do_OPTIONS(self):
        self.send_response(204)
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
        self.send_header("Access-Control-Allow-Headers", "Content-Type")
        self.send_header("Content-Length", "0")
        self.end_headers()

    def do_GET(self):
        parsed = urlparse(self.path)
        if parsed.path == "/healthz":
            self._send_json(200, self.service.health())
        elif parsed.path == "/api/v2/languages":
            self._send_json(200, {"pairs": self.service.list_languages()})
        elif parsed.path == "/api/v2/stats":
            query = parse_qs(parsed.query)
            report = self.service.stats(
                date_from=query.get("from", [None])[0],
                date_to=query.get("to", [None])[0],
            )
            self._send_json(200, report.to_json())
        else:
            self._send_error(404, "not_found", f"no such endpoint: {parsed.path}")

    def do_POST(self):
        parsed = urlparse(self.path)
        if parsed.path != "/api/v2/translate":
            self._send_error(404, "not_found", f"no such endpoint: {parsed.path}")
            return
        try:
            length = int(self.headers.get("Content-Length", 0))
            payload = json.loads(self.rfile.read(length).decode("utf-8"))
            request = TranslationRequest(
                src=str(payload["src"]),
                tgt=str(payload["tgt"]),
                texts=[str(t) for t in payload.get("texts", [])],
                include_translit=bool(payload.get("include_translit", False)),
                logging_consent=payload.get("logging_consent"),
                client_id=payload.get("client_id"),
            )
        except (ValueError, KeyError, TypeError) as exc:
            self._send_error(400, "bad_request", f"malformed request: {exc}")
            return
        try:
            response = self.service.handle_translate(request)
        except ApiError as exc:
            self._send_error(exc.status, exc.code, exc.message, exc.retry_after)
            return
        self._send_json(200, response.to_json())


class _Server(ThreadingHTTPServer):
    daemon_threads = True
    # the default backlog of 5 drops connections under concurrent load
    request_queue_size = 128


def make_server(service: TranslationService, host: str, port: int) -> ThreadingHTTPServer:
    handler = type("BoundHandler", (_Handler,), {"service": service})
    return _Server((host, port), handler)


class GatewayServer:
    """Service plus HTTP server, runnable in-process (tests) or foreground."""

    def __init__(self, config: ServiceConfig | None = None, service: TranslationService | None = None):
        self.config = config or ServiceConfig()
        self.service = service or TranslationService(self.config)
        self._httpd = make_server(self.service, self.config.host, self.config.port)
        self._thread = threading.Thread(
            target=self._httpd.serve_forever, name="mostmt-http", daemon=True
        )

    @property
    def url(self) -> str:
        host, port = self._httpd.server_address[:2]
        return f"http://{host}:{port}"

    def start(self) -> "GatewayServer":
        self._thread.start()
        return self

    def __enter__(self) -> "GatewayServer":
        return self.start()

    def __exit__(self, *exc):
        self.close()

    def close(self):
        self._httpd.shutdown()
        self._httpd.server_close()
        self.service.close()


def serve(config: ServiceConfig) -> None:
    """Run the gateway in the foreground until interrupted."""
    server = GatewayServer(config)
    print(f"listening on {server.url}")
    try:
        server._httpd.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.close()
