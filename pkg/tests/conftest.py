import csv
import io
import sys
import threading
from datetime import datetime, timezone
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from bibliocheck.idrules import RegistryVerdict, VerdictStatus
from bibliocheck.table import CITS_HEADER, META_HEADER


def build_csv(header: list[str], rows: list[dict]) -> bytes:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([row.get(name, "") for name in header])
    return buffer.getvalue().encode("utf-8")


def meta_csv(rows: list[dict]) -> bytes:
    return build_csv(META_HEADER, rows)


def cits_csv(rows: list[dict]) -> bytes:
    return build_csv(CITS_HEADER, rows)


class FakeResolver:
    """Registry stand-in: NotFound for a designated set, Exists otherwise."""

    def __init__(self, missing=(), fail=()):
        self.missing = {tuple(m) for m in missing}
        self.fail = {tuple(f) for f in fail}
        self.calls = []

    def lookup(self, scheme, value):
        self.calls.append((scheme, value))
        now = datetime.now(timezone.utc).isoformat()
        if (scheme, value) in self.fail:
            return RegistryVerdict(VerdictStatus.UNKNOWN, now, "fake", "simulated outage")
        if (scheme, value) in self.missing:
            return RegistryVerdict(VerdictStatus.NOT_FOUND, now, "fake")
        return RegistryVerdict(VerdictStatus.EXISTS, now, "fake")


@pytest.fixture
def resolver_all_exist():
    return FakeResolver()


class RegistryHandler(BaseHTTPRequestHandler):
    """Registry endpoint double: paths with 'missing' 404, 'flaky' 503."""

    def _respond(self):
        if "missing" in self.path:
            self.send_response(404)
        elif "flaky" in self.path:
            self.send_response(503)
        else:
            self.send_response(200)
        self.end_headers()

    do_GET = _respond
    do_HEAD = _respond

    def log_message(self, *args):
        pass


@pytest.fixture
def registry_server():
    server = ThreadingHTTPServer(("127.0.0.1", 0), RegistryHandler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    yield f"http://127.0.0.1:{server.server_address[1]}"
    server.shutdown()
