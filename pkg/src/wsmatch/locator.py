"""Reading and resolving file/HTTP locations for WSDL and registry sources."""

from __future__ import annotations

import urllib.error
import urllib.parse
import urllib.request
from pathlib import Path

from wsmatch.errors import WsMatchError


def is_url(location: str) -> bool:
    return location.startswith(("http://", "https://", "file://"))


def resolve_location(base: str | None, ref: str) -> str:
    """Resolve ``ref`` against ``base`` (file path or URL)."""
    if is_url(ref) or Path(ref).is_absolute():
        return ref
    if base is None:
        return ref
    if is_url(base):
        return urllib.parse.urljoin(base, ref)
    return str((Path(base).parent / ref).resolve())


def read_location(location: str) -> bytes:
    try:
        if is_url(location):
            with urllib.request.urlopen(location) as response:
                return response.read()
        return Path(location).read_bytes()
    except (OSError, urllib.error.URLError, ValueError) as exc:
        raise WsMatchError(f"unreachable location: {location}: {exc}") from exc
