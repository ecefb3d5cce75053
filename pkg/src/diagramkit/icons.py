"""Icon lookup for object descriptions.

Resolution order: on-disk cache, remote search API (when configured),
bundled local pack, generated placeholder glyph. search() is total: it
always hands back a usable asset and never raises into the renderer.
"""
from __future__ import annotations

import hashlib
import json
import logging
import os
import tempfile
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import requests

logger = logging.getLogger(__name__)

ENDPOINT_ENV = "DIAGRAM_ICON_ENDPOINT"
KEY_ENV = "DIAGRAM_ICON_KEY"

PLACEHOLDER_PROVIDER = "placeholder"
LOCAL_PROVIDER = "local-pack"
REMOTE_PROVIDER = "remote"
CACHE_PROVIDER_SUFFIX = " (cached)"


@dataclass(frozen=True)
class IconAsset:
    provider: str
    query: str
    path: Path
    attribution: str = ""

    @property
    def is_placeholder(self) -> bool:
        return self.provider == PLACEHOLDER_PROVIDER


def normalize_query(query: str) -> str:
    return " ".join(query.lower().split())


def _placeholder_svg(label: str) -> str:
    safe = label.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
    return (
        '<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 100 100">\n'
        '<rect x="4" y="4" width="92" height="92" rx="14" fill="#e2e8f0" stroke="#64748b" stroke-width="3"/>\n'
        f'<text x="50" y="54" font-family="sans-serif" font-size="16" text-anchor="middle" fill="#334155">{safe}</text>\n'
        "</svg>\n"
    )


def make_placeholder(query: str, directory: Path | None = None) -> IconAsset:
    """Write a rounded-rect glyph carrying the query text and return it."""
    normalized = normalize_query(query) or "icon"
    if directory is None:
        directory = Path(tempfile.gettempdir()) / "diagramkit-placeholders"
    directory.mkdir(parents=True, exist_ok=True)
    digest = hashlib.sha256(normalized.encode("utf-8")).hexdigest()[:16]
    path = directory / f"placeholder-{digest}.svg"
    if not path.exists():
        path.write_text(_placeholder_svg(normalized), "utf-8")
    return IconAsset(PLACEHOLDER_PROVIDER, normalized, path)


class IconCache:
    """Content-addressed directory cache keyed by the normalized query.

    Writes go through a temp file plus os.replace, so concurrent puts of the
    same key settle on one payload (last writer wins). An unwritable
    directory disables the cache with a warning instead of failing lookups.
    """

    def __init__(self, directory: str | Path) -> None:
        self.directory = Path(directory)
        self.enabled = True
        try:
            self.directory.mkdir(parents=True, exist_ok=True)
            probe = self.directory / ".write-probe"
            probe.write_text("", "utf-8")
            probe.unlink()
        except OSError as exc:
            logger.warning("icon cache disabled (%s not writable: %s)", directory, exc)
            self.enabled = False

    def _key(self, query: str) -> str:
        return hashlib.sha256(normalize_query(query).encode("utf-8")).hexdigest()[:24]

    def get(self, query: str) -> IconAsset | None:
        if not self.enabled:
            return None
        meta_path = self.directory / f"{self._key(query)}.json"
        if not meta_path.exists():
            return None
        try:
            meta = json.loads(meta_path.read_text("utf-8"))
            payload = self.directory / meta["file"]
            if not payload.exists():
                return None
            return IconAsset(
                meta["provider"] + CACHE_PROVIDER_SUFFIX,
                meta["query"],
                payload,
                meta.get("attribution", ""),
            )
        except (OSError, ValueError, KeyError):
            return None

    def put(
        self,
        query: str,
        payload: bytes,
        provider: str,
        attribution: str = "",
        suffix: str = ".svg",
    ) -> IconAsset:
        normalized = normalize_query(query)
        if not self.enabled:
            handle, temp_name = tempfile.mkstemp(suffix=suffix)
            with os.fdopen(handle, "wb") as out:
                out.write(payload)
            return IconAsset(provider, normalized, Path(temp_name), attribution)
        key = self._key(query)
        payload_name = f"{key}{suffix}"
        for name, data in (
            (payload_name, payload),
            (
                f"{key}.json",
                json.dumps(
                    {
                        "query": normalized,
                        "provider": provider,
                        "attribution": attribution,
                        "file": payload_name,
                    }
                ).encode("utf-8"),
            ),
        ):
            handle, temp_name = tempfile.mkstemp(dir=self.directory)
            with os.fdopen(handle, "wb") as out:
                out.write(data)
            os.replace(temp_name, self.directory / name)
        return IconAsset(provider, normalized, self.directory / payload_name, attribution)


class LocalIconPack:
    """Name-keyed SVG files with an index.json; matches queries by
    normalized token overlap, ties broken alphabetically."""

    def __init__(self, directory: str | Path) -> None:
        self.directory = Path(directory)
        index = json.loads((self.directory / "index.json").read_text("utf-8"))
        self.entries = [
            (entry["name"], entry["file"], entry.get("attribution", ""))
            for entry in index["icons"]
        ]

    def search(self, query: str) -> IconAsset | None:
        tokens = set(normalize_query(query).split())
        if not tokens:
            return None
        best: tuple[int, str, str, str] | None = None
        for name, filename, attribution in self.entries:
            score = len(tokens & set(normalize_query(name).split()))
            if score == 0:
                continue
            candidate = (-score, name, filename, attribution)
            if best is None or candidate < best:
                best = candidate
        if best is None:
            return None
        _, name, filename, attribution = best
        return IconAsset(LOCAL_PROVIDER, normalize_query(query), self.directory / filename, attribution)


class RemoteIconProvider:
    """HTTP icon search with key auth.

    The vendor wire shape lives entirely here: GET {endpoint}?query=...
    answering {"icons": [{"url": ..., "attribution": ...}, ...]}; the first
    hit is downloaded. Endpoint and key come from DIAGRAM_ICON_ENDPOINT and
    DIAGRAM_ICON_KEY.
    """

    def __init__(self, endpoint: str, api_key: str = "", timeout: float = 20.0) -> None:
        self.endpoint = endpoint
        self.api_key = api_key
        self.timeout = timeout

    @classmethod
    def from_env(cls) -> "RemoteIconProvider | None":
        endpoint = os.environ.get(ENDPOINT_ENV)
        if not endpoint:
            return None
        return cls(endpoint, os.environ.get(KEY_ENV, ""))

    def fetch(self, query: str) -> tuple[bytes, str, str]:
        """Return (payload, attribution, suffix) for the first hit."""
        headers = {}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        response = requests.get(
            self.endpoint,
            params={"query": normalize_query(query), "limit": 1},
            headers=headers,
            timeout=self.timeout,
        )
        response.raise_for_status()
        hits = response.json().get("icons", [])
        if not hits:
            raise LookupError(f"no remote icon for {query!r}")
        url = hits[0]["url"]
        attribution = hits[0].get("attribution", "")
        payload = requests.get(url, headers=headers, timeout=self.timeout)
        payload.raise_for_status()
        suffix = Path(url.split("?", 1)[0]).suffix or ".svg"
        return payload.content, attribution, suffix


def bundled_pack() -> LocalIconPack:
    return LocalIconPack(Path(str(resources.files(__package__) / "icon_pack")))


class IconProvider:
    """Facade combining cache, remote search, local pack, and placeholder."""

    def __init__(
        self,
        pack: LocalIconPack | None = None,
        cache: IconCache | None = None,
        remote: RemoteIconProvider | None = None,
        placeholder_dir: Path | None = None,
    ) -> None:
        self.pack = pack
        self.cache = cache
        self.remote = remote
        self.placeholder_dir = placeholder_dir

    @classmethod
    def default(cls, cache_dir: str | Path | None = None) -> "IconProvider":
        if cache_dir is None:
            cache_dir = Path.home() / ".cache" / "diagramkit" / "icons"
        return cls(
            pack=bundled_pack(),
            cache=IconCache(cache_dir),
            remote=RemoteIconProvider.from_env(),
        )

    def search(self, query: str) -> IconAsset:
        """Map a description to an icon asset; total, never raises."""
        if not query or not query.strip():
            raise ValueError("icon query must be non-empty")
        if self.cache is not None:
            hit = self.cache.get(query)
            if hit is not None:
                return hit
        if self.remote is not None:
            try:
                payload, attribution, suffix = self.remote.fetch(query)
                if self.cache is not None:
                    return self.cache.put(query, payload, REMOTE_PROVIDER, attribution, suffix)
                handle, temp_name = tempfile.mkstemp(suffix=suffix)
                with os.fdopen(handle, "wb") as out:
                    out.write(payload)
                return IconAsset(REMOTE_PROVIDER, normalize_query(query), Path(temp_name), attribution)
            except Exception as exc:
                logger.warning("remote icon lookup failed for %r: %s", query, exc)
        if self.pack is not None:
            hit = self.pack.search(query)
            if hit is not None:
                return hit
        return make_placeholder(query, self.placeholder_dir)
