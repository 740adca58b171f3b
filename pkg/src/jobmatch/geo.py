"""Great-circle distances and a persistent, rate-limited geocoding cache.

Distances use the haversine formula on a sphere of radius 6371.0 km.
The cache is a CSV file (``address,lat,lon,retrieved_at``) keyed by a
normalized address string so trivially different spellings of the same
address do not trigger duplicate external lookups.
"""

from __future__ import annotations

import csv
import math
import os
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Callable, Protocol

import requests

from .errors import CacheParseError, GeocodeError

EARTH_RADIUS_KM = 6371.0

CACHE_HEADER = ["address", "lat", "lon", "retrieved_at"]


@dataclass(frozen=True, slots=True)
class GeoPoint:
    """A WGS84 coordinate pair in decimal degrees."""

    lat: float
    lon: float

    def __post_init__(self):
        if not (math.isfinite(self.lat) and math.isfinite(self.lon)):
            raise ValueError(f"coordinates must be finite, got ({self.lat}, {self.lon})")
        if not -90.0 <= self.lat <= 90.0:
            raise ValueError(f"latitude {self.lat} outside [-90, 90]")
        if not -180.0 <= self.lon <= 180.0:
            raise ValueError(f"longitude {self.lon} outside [-180, 180]")


def haversine_km(a: GeoPoint, b: GeoPoint) -> float:
    """Great-circle distance between two points, in kilometers."""
    lat1 = math.radians(a.lat)
    lat2 = math.radians(b.lat)
    dlat = math.radians(b.lat - a.lat)
    dlon = math.radians(b.lon - a.lon)
    h = math.sin(dlat / 2.0) ** 2 + math.cos(lat1) * math.cos(lat2) * math.sin(dlon / 2.0) ** 2
    return 2.0 * EARTH_RADIUS_KM * math.asin(min(1.0, math.sqrt(h)))


def normalize_address(address: str) -> str:
    """Cache key: lowercase, collapse whitespace, strip trailing commas."""
    collapsed = " ".join(address.split())
    return collapsed.lower().rstrip(",").strip()


class GeocodingClient(Protocol):
    def lookup(self, address: str) -> GeoPoint: ...


class RateLimiter:
    """Enforces a minimum interval between successive external calls.

    Clock and sleep are injectable so tests can observe the spacing
    without real waiting.
    """

    def __init__(
        self,
        min_interval: float = 1.0,
        *,
        time_fn: Callable[[], float] = time.monotonic,
        sleep_fn: Callable[[float], None] = time.sleep,
    ):
        if min_interval < 0:
            raise ValueError("min_interval must be >= 0")
        self.min_interval = min_interval
        self.last_call: float | None = None
        self._time = time_fn
        self._sleep = sleep_fn

    def wait(self) -> None:
        """Block until at least min_interval since the previous call."""
        now = self._time()
        if self.last_call is not None:
            remaining = self.min_interval - (now - self.last_call)
            if remaining > 0:
                self._sleep(remaining)
                now = self._time()
        self.last_call = now


@dataclass
class GeoCache:
    """In-memory mirror of the persisted geocoding cache."""

    entries: dict[str, tuple[GeoPoint, datetime]] = field(default_factory=dict)
    path: str | None = None

    def get(self, address: str) -> GeoPoint | None:
        hit = self.entries.get(normalize_address(address))
        return hit[0] if hit else None

    def put(self, address: str, point: GeoPoint, retrieved_at: datetime | None = None) -> None:
        when = retrieved_at or datetime.now(timezone.utc)
        self.entries[normalize_address(address)] = (point, when)

    def __len__(self) -> int:
        return len(self.entries)


def load_cache(path: str) -> GeoCache:
    """Read a cache CSV; a missing file yields an empty cache."""
    cache = GeoCache(path=path)
    if not os.path.exists(path):
        return cache
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        for lineno, row in enumerate(reader, start=1):
            if lineno == 1:
                if row and row != CACHE_HEADER:
                    raise CacheParseError(lineno, f"unexpected header {row!r}")
                continue
            if not row:
                continue
            if len(row) != 4:
                raise CacheParseError(lineno, f"expected 4 fields, got {len(row)}")
            address, lat_s, lon_s, ts_s = row
            try:
                point = GeoPoint(float(lat_s), float(lon_s))
            except ValueError as exc:
                raise CacheParseError(lineno, str(exc)) from exc
            try:
                retrieved_at = datetime.fromisoformat(ts_s)
            except ValueError as exc:
                raise CacheParseError(lineno, f"bad timestamp {ts_s!r}") from exc
            cache.entries[address] = (point, retrieved_at)
    return cache


def save_cache(cache: GeoCache, path: str) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(CACHE_HEADER)
        for address in sorted(cache.entries):
            point, retrieved_at = cache.entries[address]
            writer.writerow([address, repr(point.lat), repr(point.lon), retrieved_at.isoformat()])


def geocode(
    address: str,
    cache: GeoCache,
    client: GeocodingClient,
    limiter: RateLimiter | None = None,
) -> GeoPoint:
    """Resolve an address, consulting the cache before the external client.

    On a miss the client is invoked exactly once (after the rate limiter,
    when present) and the result is stored. A failed lookup leaves the
    cache untouched.
    """
    if not address or not address.strip():
        raise GeocodeError(address, "empty address")
    cached = cache.get(address)
    if cached is not None:
        return cached
    if limiter is not None:
        limiter.wait()
    point = client.lookup(address)
    cache.put(address, point)
    return point


class NominatimClient:
    """Minimal client for a Nominatim-compatible ``/search`` endpoint.

    The base URL comes from the GEOCODER_URL environment variable unless
    given explicitly. Tests substitute a stub object with the same
    ``lookup`` signature.
    """

    def __init__(self, base_url: str | None = None, timeout: float = 10.0):
        self.base_url = (base_url or os.environ.get("GEOCODER_URL", "https://nominatim.openstreetmap.org")).rstrip("/")
        self.timeout = timeout

    def lookup(self, address: str) -> GeoPoint:
        try:
            resp = requests.get(
                f"{self.base_url}/search",
                params={"q": address, "format": "json", "limit": 1},
                headers={"User-Agent": "jobmatch/0.1"},
                timeout=self.timeout,
            )
            resp.raise_for_status()
            results = resp.json()
        except requests.RequestException as exc:
            raise GeocodeError(address, str(exc)) from exc
        if not results:
            raise GeocodeError(address, "zero results")
        first = results[0]
        return GeoPoint(float(first["lat"]), float(first["lon"]))
