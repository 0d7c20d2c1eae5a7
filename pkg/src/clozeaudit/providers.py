"""Wire contracts for external model services plus deterministic mocks.

Two service roles: text generation and text embedding, both addressed through
small JSON-over-HTTP contracts, plus a person-name tagger contract used by the
name audit. Every live response can be cached on disk keyed by a content hash
of the request, so replication runs replay from cache. The mock providers are
pure functions of their inputs and exist so the whole pipeline runs hermetic.
"""

from __future__ import annotations

import hashlib
import json
import os
import re
import time
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Protocol, Sequence

import numpy as np

from .errors import ProviderError

# Embedding-task prefix expected by the narrative embedding service.
NARRATIVE_TASK_PREFIX = "Retrieve stories with a similar narrative to the given story:"

ENV_GENERATION_ENDPOINT = "CLOZEAUDIT_GENERATION_ENDPOINT"
ENV_EMBEDDING_ENDPOINT = "CLOZEAUDIT_EMBEDDING_ENDPOINT"
ENV_API_KEY = "CLOZEAUDIT_API_KEY"


@dataclass(frozen=True)
class GenerationRequest:
    user: str
    system: str | None = None
    max_new_tokens: int = 256
    deterministic: bool = True  # greedy decoding; keep True for replication runs


@dataclass(frozen=True)
class GenerationResponse:
    text: str
    model_id: str
    finish_reason: str = "stop"  # stop | length | error


@dataclass(frozen=True)
class EmbeddingRequest:
    texts: tuple[str, ...]
    task_prefix: str | None = None


def request_digest(request) -> str:
    payload = json.dumps(asdict(request), sort_keys=True, ensure_ascii=False)
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def request_to_json(request) -> dict:
    return asdict(request)


def generation_request_from_json(obj: dict) -> GenerationRequest:
    return GenerationRequest(
        user=obj["user"],
        system=obj.get("system"),
        max_new_tokens=int(obj.get("max_new_tokens", 256)),
        deterministic=bool(obj.get("deterministic", True)),
    )


def generation_response_from_json(obj: dict) -> GenerationResponse:
    return GenerationResponse(
        text=obj["text"],
        model_id=obj.get("model_id", ""),
        finish_reason=obj.get("finish_reason", "stop"),
    )


def embedding_request_from_json(obj: dict) -> EmbeddingRequest:
    return EmbeddingRequest(texts=tuple(obj["texts"]), task_prefix=obj.get("task_prefix"))


class GenerationProvider(Protocol):
    def generate(self, request: GenerationRequest) -> GenerationResponse: ...


class EmbeddingProvider(Protocol):
    dim: int

    def embed(self, request: EmbeddingRequest) -> np.ndarray: ...


class NERProvider(Protocol):
    def person_spans(self, texts: Sequence[str]) -> list[list[tuple[int, int]]]: ...


class TransportError(RuntimeError):
    """Transient transport failure; eligible for retry."""


def generate(provider: GenerationProvider, request: GenerationRequest, *,
             max_attempts: int = 3, backoff_s: float = 0.5) -> GenerationResponse:
    """Call a generation provider with exponential backoff on transient errors."""
    digest = request_digest(request)
    last: Exception | None = None
    for attempt in range(1, max_attempts + 1):
        try:
            return provider.generate(request)
        except TransportError as exc:
            last = exc
            if attempt < max_attempts:
                time.sleep(backoff_s * (2 ** (attempt - 1)))
    raise ProviderError(f"generation failed after {max_attempts} attempts: {last}",
                        attempts=max_attempts, request_digest=digest, kind="timeout")


def embed(provider: EmbeddingProvider, request: EmbeddingRequest) -> np.ndarray:
    """Embed a batch; one fixed-dimension vector per text, batch order preserved."""
    if not request.texts:
        raise ValueError("empty embedding batch")
    vectors = np.asarray(provider.embed(request), dtype=np.float64)
    if vectors.ndim != 2 or vectors.shape[0] != len(request.texts):
        raise ProviderError(
            f"embedding batch shape {vectors.shape} does not match {len(request.texts)} texts",
            request_digest=request_digest(request), kind="contract")
    if vectors.shape[1] != provider.dim:
        raise ProviderError(
            f"embedding dimension {vectors.shape[1]} != provider dim {provider.dim}",
            request_digest=request_digest(request), kind="contract")
    return vectors


# ---------------------------------------------------------------------------
# Mocks
# ---------------------------------------------------------------------------

class EchoGenerationProvider:
    """Returns the user prompt verbatim."""

    model_id = "mock-echo"

    def generate(self, request: GenerationRequest) -> GenerationResponse:
        return GenerationResponse(text=request.user, model_id=self.model_id)


class StaticGenerationProvider:
    """Always returns one fixed text."""

    def __init__(self, text: str, model_id: str = "mock-static"):
        self.text = text
        self.model_id = model_id

    def generate(self, request: GenerationRequest) -> GenerationResponse:
        return GenerationResponse(text=self.text, model_id=self.model_id)


class FixtureGenerationProvider:
    """Replays responses keyed by request digest; unknown requests error."""

    def __init__(self, responses: dict[str, str], model_id: str = "mock-fixture"):
        self.responses = dict(responses)
        self.model_id = model_id

    def generate(self, request: GenerationRequest) -> GenerationResponse:
        digest = request_digest(request)
        if digest not in self.responses:
            raise ProviderError(f"no fixture for request {digest}",
                                request_digest=digest, kind="fixture-miss")
        return GenerationResponse(text=self.responses[digest], model_id=self.model_id)


_TOKEN = re.compile(r"[a-z0-9]+")


class HashedBagOfWordsEmbedder:
    """Deterministic bag-of-words embedding into hashed buckets.

    Identical texts map to identical vectors; texts with disjoint vocabularies
    are orthogonal unless their tokens collide under the bucket hash (the
    dimension is large to make that unlikely at desk scale).
    """

    def __init__(self, dim: int = 4096):
        self.dim = dim

    def _bucket(self, token: str) -> int:
        h = hashlib.sha256(token.encode("utf-8")).digest()
        return int.from_bytes(h[:8], "big") % self.dim

    def embed(self, request: EmbeddingRequest) -> np.ndarray:
        out = np.zeros((len(request.texts), self.dim), dtype=np.float64)
        for i, text in enumerate(request.texts):
            for token in _TOKEN.findall(text.lower()):
                out[i, self._bucket(token)] += 1.0
        return out


# ---------------------------------------------------------------------------
# HTTP providers
# ---------------------------------------------------------------------------

def _endpoint(env_var: str, explicit: str | None) -> str:
    endpoint = explicit or os.environ.get(env_var, "")
    if not endpoint:
        raise ProviderError(f"no endpoint configured (set {env_var})", kind="config")
    return endpoint


class HttpGenerationProvider:
    """POSTs the request envelope as JSON; expects {text, model_id, finish_reason}."""

    def __init__(self, endpoint: str | None = None, api_key: str | None = None,
                 timeout_s: float = 60.0):
        self.endpoint = _endpoint(ENV_GENERATION_ENDPOINT, endpoint)
        self.api_key = api_key or os.environ.get(ENV_API_KEY, "")
        self.timeout_s = timeout_s

    def generate(self, request: GenerationRequest) -> GenerationResponse:
        import requests

        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        try:
            resp = requests.post(self.endpoint, json=request_to_json(request),
                                 headers=headers, timeout=self.timeout_s)
        except requests.RequestException as exc:
            raise TransportError(str(exc)) from exc
        if resp.status_code in (401, 403):
            raise ProviderError(f"authentication failed ({resp.status_code})",
                                request_digest=request_digest(request), kind="auth")
        if resp.status_code >= 500:
            raise TransportError(f"server error {resp.status_code}")
        if resp.status_code != 200:
            raise ProviderError(f"unexpected status {resp.status_code}",
                                request_digest=request_digest(request), kind="http")
        try:
            return generation_response_from_json(resp.json())
        except (ValueError, KeyError) as exc:
            raise ProviderError(f"malformed response: {exc}",
                                request_digest=request_digest(request),
                                kind="malformed") from exc


class HttpEmbeddingProvider:
    """POSTs {texts, task_prefix}; expects {vectors: [[...], ...]}."""

    def __init__(self, endpoint: str | None = None, api_key: str | None = None,
                 dim: int | None = None, timeout_s: float = 60.0):
        self.endpoint = _endpoint(ENV_EMBEDDING_ENDPOINT, endpoint)
        self.api_key = api_key or os.environ.get(ENV_API_KEY, "")
        self.timeout_s = timeout_s
        self.dim = dim or 0

    def embed(self, request: EmbeddingRequest) -> np.ndarray:
        import requests

        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        try:
            resp = requests.post(self.endpoint, json=request_to_json(request),
                                 headers=headers, timeout=self.timeout_s)
        except requests.RequestException as exc:
            raise TransportError(str(exc)) from exc
        if resp.status_code != 200:
            raise ProviderError(f"unexpected status {resp.status_code}",
                                request_digest=request_digest(request), kind="http")
        vectors = np.asarray(resp.json()["vectors"], dtype=np.float64)
        if not self.dim:
            self.dim = vectors.shape[1]
        return vectors


# ---------------------------------------------------------------------------
# Response cache
# ---------------------------------------------------------------------------

class ResponseCache:
    """Content-addressed JSON blobs: one file per request digest."""

    def __init__(self, directory: str | Path):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)

    def _path(self, digest: str) -> Path:
        return self.directory / f"{digest}.json"

    def get(self, digest: str) -> dict | None:
        path = self._path(digest)
        if not path.exists():
            return None
        return json.loads(path.read_text(encoding="utf-8"))

    def put(self, digest: str, payload: dict) -> None:
        path = self._path(digest)
        tmp = path.with_suffix(".tmp")
        tmp.write_text(json.dumps(payload, sort_keys=True, ensure_ascii=False),
                       encoding="utf-8")
        tmp.replace(path)


class CachedGenerationProvider:
    """Wraps a generation provider with a read-through disk cache."""

    def __init__(self, inner: GenerationProvider, cache: ResponseCache):
        self.inner = inner
        self.cache = cache

    def generate(self, request: GenerationRequest) -> GenerationResponse:
        digest = request_digest(request)
        hit = self.cache.get(digest)
        if hit is not None:
            return generation_response_from_json(hit["response"])
        response = self.inner.generate(request)
        self.cache.put(digest, {"request": request_to_json(request),
                                "response": request_to_json(response)})
        return response


# ---------------------------------------------------------------------------
# Fallback NER
# ---------------------------------------------------------------------------

_CAP_TOKEN = re.compile(r"[A-Z][A-Za-z'’\-]*")

_NER_STOPWORDS = frozenset(
    """
    The A An And But Or Nor For Yet So If When While Then There Here This That
    These Those It Its He She They We You I His Her Their Our Your My
    In On At By To From Of With As Is Was Are Were Be Been Not No Yes
    What Which Who Whom Whose Why How Where All Some Any Each Every
    January February March April May June July August September October
    November December Monday Tuesday Wednesday Thursday Friday Saturday Sunday
    North South East West New Old Great Little
    """.split()
)

_NER_TITLES = frozenset("Mr Mrs Ms Miss Dr Prof Rev Sir Lady Lord Capt Col Gen Sgt".split())


class HeuristicNER:
    """Deterministic capitalized-run person tagger for hermetic, desk-scale runs.

    Multi-token capitalized runs are candidates after stripping leading title
    tokens; single capitalized tokens count only when they are not stopwords
    and not sentence-initial.
    """

    def person_spans(self, texts: Sequence[str]) -> list[list[tuple[int, int]]]:
        return [self._spans(text) for text in texts]

    def _spans(self, text: str) -> list[tuple[int, int]]:
        spans: list[tuple[int, int]] = []
        matches = list(_CAP_TOKEN.finditer(text))
        runs: list[list[re.Match]] = []
        current: list[re.Match] = []
        for m in matches:
            if current and self._adjacent(text, current[-1], m):
                current.append(m)
            else:
                if current:
                    runs.append(current)
                current = [m]
        if current:
            runs.append(current)
        for run in runs:
            while run and (run[0].group(0).rstrip(".") in _NER_TITLES):
                run = run[1:]
            if not run:
                continue
            if len(run) == 1:
                token = run[0].group(0)
                if token in _NER_STOPWORDS or token in _NER_TITLES:
                    continue
                if self._sentence_initial(text, run[0].start()):
                    continue
            elif all(m.group(0) in _NER_STOPWORDS for m in run):
                continue
            spans.append((run[0].start(), run[-1].end()))
        return spans

    @staticmethod
    def _adjacent(text: str, prev: re.Match, nxt: re.Match) -> bool:
        gap = text[prev.end(): nxt.start()]
        if gap == " ":
            return True
        # ". " keeps single-letter middle initials attached without bridging
        # sentence boundaries.
        return gap == ". " and len(prev.group(0)) == 1

    @staticmethod
    def _sentence_initial(text: str, start: int) -> bool:
        i = start - 1
        while i >= 0 and text[i].isspace():
            i -= 1
        return i < 0 or text[i] in ".!?\"'“‘"
