"""In-process archive API stub for crawler tests.

Serves pushshift-style pages: records strictly before the ``before`` cursor,
newest first, at most ``size`` per page. Records request arrival times and
parameters; can inject transient or permanent failures per request ordinal.
"""

from __future__ import annotations

import json
import threading
import time
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from urllib.parse import parse_qs, urlparse


class StubArchive:
    def __init__(self, records, fail_on=(), fail_from=None, page_override=None):
        # newest first; id descending breaks timestamp ties deterministically
        self.records = sorted(records, key=lambda r: (-r["created_utc"], str(r.get("id"))))
        self.fail_on = set(fail_on)  # 1-based request ordinals answered with 500 once
        self.fail_from = fail_from  # every request from this ordinal on fails
        self.page_override = page_override
        self.request_log: list[tuple[float, dict]] = []
        self._lock = threading.Lock()
        self._server: ThreadingHTTPServer | None = None
        self._thread: threading.Thread | None = None

    # -- server plumbing -------------------------------------------------
    def __enter__(self) -> "StubArchive":
        stub = self

        class Handler(BaseHTTPRequestHandler):
            def log_message(self, *args):  # silence default stderr chatter
                pass

            def do_GET(self):
                parsed = urlparse(self.path)
                params = {k: v[0] for k, v in parse_qs(parsed.query).items()}
                with stub._lock:
                    stub.request_log.append((time.monotonic(), params))
                    ordinal = len(stub.request_log)
                if (stub.fail_from is not None and ordinal >= stub.fail_from) or ordinal in stub.fail_on:
                    self.send_response(500)
                    self.end_headers()
                    self.wfile.write(b"boom")
                    return
                before = int(params.get("before", 2**62))
                size = int(params.get("size", 100))
                if stub.page_override is not None:
                    page = stub.page_override(before, size)
                else:
                    page = [r for r in stub.records if r["created_utc"] < before][:size]
                payload = json.dumps({"data": page}).encode()
                self.send_response(200)
                self.send_header("Content-Type", "application/json")
                self.send_header("Content-Length", str(len(payload)))
                self.end_headers()
                self.wfile.write(payload)

        self._server = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)
        self._thread.start()
        return self

    def __exit__(self, *exc):
        self._server.shutdown()
        self._server.server_close()
        self._thread.join()

    @property
    def endpoint(self) -> str:
        host, port = self._server.server_address
        return f"http://{host}:{port}/submissions"

    @property
    def request_count(self) -> int:
        return len(self.request_log)


def make_records(timestamps, subreddit="wallstreetbets"):
    return [
        {"id": f"r{i:05d}", "created_utc": ts, "title": f"post {i}", "score": 1, "subreddit": subreddit}
        for i, ts in enumerate(sorted(timestamps, reverse=True))
    ]
