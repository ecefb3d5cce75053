import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import pytest

from diagramkit.icons import (
    IconCache,
    IconProvider,
    RemoteIconProvider,
    bundled_pack,
    make_placeholder,
    normalize_query,
)


class TestNormalize:
    def test_lowercase_trim_collapse(self):
        assert normalize_query("  New   Moon ") == "new moon"


class TestBundledPack:
    def test_exact_match(self):
        asset = bundled_pack().search("sun")
        assert asset is not None
        assert asset.path.name == "sun.svg"
        assert asset.path.exists()
        assert asset.attribution

    def test_token_overlap_new_moon_falls_back_to_moon(self):
        # only a generic moon icon exists, so every moon phase gets the
        # same glyph
        asset = bundled_pack().search("new moon")
        assert asset is not None and asset.path.name == "moon.svg"
        full = bundled_pack().search("full moon")
        assert full is not None and full.path.name == "moon.svg"

    def test_no_match_returns_none(self):
        assert bundled_pack().search("zxqv") is None


class TestProviderFallbacks:
    def test_total_miss_yields_placeholder(self, tmp_path):
        provider = IconProvider(pack=bundled_pack(), placeholder_dir=tmp_path)
        asset = provider.search("zxqv")
        assert asset.is_placeholder
        assert asset.path.exists()
        assert "zxqv" in asset.path.read_text("utf-8")

    def test_empty_query_rejected(self):
        with pytest.raises(ValueError):
            IconProvider().search("  ")

    def test_remote_failure_falls_through_to_pack(self, tmp_path):
        remote = RemoteIconProvider("http://127.0.0.1:1/does-not-exist", timeout=0.2)
        provider = IconProvider(pack=bundled_pack(), remote=remote, placeholder_dir=tmp_path)
        asset = provider.search("sun")
        assert asset.provider == "local-pack"


class TestCache:
    def test_put_then_get_normalizes(self, tmp_path):
        cache = IconCache(tmp_path)
        cache.put("Sun", b"<svg/>", "remote", "credit")
        hit = cache.get("sun  ")
        assert hit is not None
        assert hit.path.read_bytes() == b"<svg/>"
        assert hit.attribution == "credit"

    def test_cold_cache_misses(self, tmp_path):
        assert IconCache(tmp_path).get("anything") is None

    def test_concurrent_puts_single_payload(self, tmp_path):
        cache = IconCache(tmp_path)

        def put(value: bytes):
            cache.put("shared", value, "remote")

        threads = [threading.Thread(target=put, args=(f"v{i}".encode(),)) for i in range(8)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        payloads = [p for p in tmp_path.iterdir() if p.suffix == ".svg"]
        assert len(payloads) == 1
        assert payloads[0].read_bytes() in {f"v{i}".encode() for i in range(8)}

    def test_unwritable_dir_disables_cache(self, tmp_path):
        # a file where a directory should be makes the path unwritable,
        # which works even when the suite runs as root
        blocker = tmp_path / "blocker"
        blocker.write_text("")
        cache = IconCache(blocker / "cache")
        assert not cache.enabled
        assert cache.get("sun") is None
        asset = cache.put("sun", b"<svg/>", "remote")
        assert asset.path.exists()  # falls back to a temp file

    def test_provider_consults_cache_before_network(self, tmp_path):
        class ExplodingRemote:
            def fetch(self, query):
                raise AssertionError("network must not be touched on a cache hit")

        cache = IconCache(tmp_path)
        cache.put("sun", b"<svg/>", "remote")
        provider = IconProvider(cache=cache, remote=ExplodingRemote())
        asset = provider.search("sun")
        assert asset.path.read_bytes() == b"<svg/>"


class _FakeIconApi(BaseHTTPRequestHandler):
    def do_GET(self):
        if self.path.startswith("/search"):
            host = self.headers["Host"]
            body = json.dumps(
                {
                    "icons": [
                        {"url": f"http://{host}/icon.svg", "attribution": "by tester"}
                    ]
                }
            ).encode()
            content_type = "application/json"
        else:
            body = b"<svg xmlns='http://www.w3.org/2000/svg'/>"
            content_type = "image/svg+xml"
        self.send_response(200)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def log_message(self, *args):
        pass


class TestRemoteProvider:
    def test_fetch_first_hit_and_cache(self, tmp_path):
        server = ThreadingHTTPServer(("127.0.0.1", 0), _FakeIconApi)
        thread = threading.Thread(target=server.serve_forever, daemon=True)
        thread.start()
        try:
            port = server.server_address[1]
            remote = RemoteIconProvider(f"http://127.0.0.1:{port}/search", api_key="k")
            cache = IconCache(tmp_path)
            provider = IconProvider(cache=cache, remote=remote)
            asset = provider.search("sun")
            assert asset.provider == "remote"
            assert asset.attribution == "by tester"
            assert asset.path.read_bytes().startswith(b"<svg")
            # second lookup is served by the cache
            again = provider.search("sun")
            assert again.provider.endswith("(cached)")
        finally:
            server.shutdown()


class TestPlaceholder:
    def test_same_query_reuses_file(self, tmp_path):
        first = make_placeholder("water cycle", tmp_path)
        second = make_placeholder("Water  Cycle", tmp_path)
        assert first.path == second.path
