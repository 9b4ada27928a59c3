"""Service registry abstraction: a directory of WSDLs or a JSON manifest."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from wsmatch.errors import RegistryError
from wsmatch.locator import is_url, read_location, resolve_location


@dataclass(frozen=True)
class RegistryEntry:
    name: str
    wsdl_uri: str
    metadata: dict = field(default_factory=dict)


@dataclass(frozen=True)
class RegistryManifest:
    entries: tuple[RegistryEntry, ...]

    def __len__(self) -> int:
        return len(self.entries)


def load_registry(uri: str) -> RegistryManifest:
    """Load candidate services from a directory, JSON manifest file, or URL.

    A directory contributes one entry per ``*.wsdl`` file. Entries come back
    sorted by name; duplicate WSDL URIs are an error.
    """
    if not is_url(uri):
        path = Path(uri)
        if path.is_dir():
            entries = [
                RegistryEntry(name=p.stem, wsdl_uri=str(p.resolve()))
                for p in sorted(path.glob("*.wsdl"))
            ]
            return _finish(entries, uri)
    payload = read_location(uri)
    try:
        data = json.loads(payload.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise RegistryError(f"malformed registry manifest {uri}: {exc}") from exc
    if not isinstance(data, dict) or not isinstance(data.get("entries"), list):
        raise RegistryError(
            f"malformed registry manifest {uri}: expected an object with 'entries'"
        )
    entries = []
    for i, item in enumerate(data["entries"]):
        if not isinstance(item, dict) or "wsdlUri" not in item:
            raise RegistryError(
                f"malformed registry manifest {uri}: entry {i} needs wsdlUri"
            )
        wsdl_uri = resolve_location(uri, str(item["wsdlUri"]))
        entries.append(
            RegistryEntry(
                name=str(item.get("name") or Path(str(item["wsdlUri"])).stem),
                wsdl_uri=wsdl_uri,
                metadata=dict(item.get("metadata") or {}),
            )
        )
    return _finish(entries, uri)


def _finish(entries: list[RegistryEntry], uri: str) -> RegistryManifest:
    seen = set()
    for entry in entries:
        if entry.wsdl_uri in seen:
            raise RegistryError(f"registry {uri}: duplicate wsdl uri {entry.wsdl_uri}")
        seen.add(entry.wsdl_uri)
    return RegistryManifest(tuple(sorted(entries, key=lambda e: e.name)))
