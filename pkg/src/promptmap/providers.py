"""Clients for the three external capabilities: chat completion, text
embedding, and image generation.

Every capability has a deterministic mock for offline tests and an
OpenAI-compatible HTTP client for real use. Embeddings are normalized
client-side so the engine can treat Euclidean-on-unit-sphere as cosine.
"""

from __future__ import annotations

import hashlib
import json
import logging
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .config import ProviderConfig
from .errors import PartialResultError, ProviderError, ValidationError

logger = logging.getLogger(__name__)

# 1x1 transparent PNG; content of mock image files.
_PLACEHOLDER_PNG = bytes.fromhex(
    "89504e470d0a1a0a0000000d49484452000000010000000108060000001f15c489"
    "0000000d4944415478da63fcffff3f0300050201e94e2b110000000049454e44ae426082"
)


@dataclass
class ChatRequest:
    instruction: str
    model: str = ""
    temperature: float = 1.0


@dataclass
class ChatResponse:
    text: str
    model: str = ""
    prompt_tokens: int = 0
    completion_tokens: int = 0


@dataclass
class EmbeddingRequest:
    texts: list[str]


@dataclass
class EmbeddingResponse:
    vectors: np.ndarray  # (len(texts), dim), unit-norm rows


@dataclass
class ImageRequest:
    prompt: str
    count: int = 4
    size: str = "1024x1024"


@dataclass
class ImageResponse:
    uris: list[str]
    provider_meta: dict = field(default_factory=dict)


def _digest(*parts: object) -> bytes:
    h = hashlib.sha256()
    for part in parts:
        h.update(str(part).encode("utf-8"))
        h.update(b"\x00")
    return h.digest()


def normalize_rows(vectors: np.ndarray) -> np.ndarray:
    """Scale each row to unit L2 norm. Zero rows are a provider defect."""
    vectors = np.asarray(vectors, dtype=np.float64)
    norms = np.linalg.norm(vectors, axis=1, keepdims=True)
    if np.any(norms == 0.0):
        raise ProviderError("embedding provider returned a zero vector")
    return vectors / norms


# --- Mocks -----------------------------------------------------------------


class MockChatProvider:
    """Deterministic chat stand-in.

    Responses come from, in order: instruction texts registered via
    ``register``, fixture files named by the instruction hash, or a
    synthesized list of pseudo-candidates seeded by (instruction, seed).
    """

    def __init__(self, fixtures_dir: str | Path | None = None, seed: int = 0,
                 candidate_count: int = 200):
        self.fixtures_dir = Path(fixtures_dir) if fixtures_dir else None
        self.seed = seed
        self.candidate_count = candidate_count
        self.call_count = 0
        self.calls: list[ChatRequest] = []
        self._registry: dict[str, str] = {}

    @staticmethod
    def fixture_key(instruction: str) -> str:
        return _digest(instruction).hex()[:16]

    def register(self, instruction: str, response_text: str):
        self._registry[self.fixture_key(instruction)] = response_text

    def chat(self, request: ChatRequest) -> ChatResponse:
        self.call_count += 1
        self.calls.append(request)
        key = self.fixture_key(request.instruction)
        text = self._registry.get(key)
        if text is None and self.fixtures_dir is not None:
            fixture = self.fixtures_dir / f"{key}.txt"
            if fixture.exists():
                text = fixture.read_text(encoding="utf-8")
        if text is None:
            text = self._synthesize(request.instruction)
        return ChatResponse(text=text, model="mock-chat")

    def _synthesize(self, instruction: str) -> str:
        rng = np.random.default_rng(
            int.from_bytes(_digest("chat", self.seed, instruction)[:8], "big")
        )
        alphabet = "abcdefghijklmnopqrstuvwxyz"
        lines = []
        for _ in range(self.candidate_count):
            words = []
            for _ in range(int(rng.integers(1, 4))):
                length = int(rng.integers(4, 9))
                words.append("".join(alphabet[i] for i in rng.integers(0, 26, size=length)))
            lines.append(" ".join(words))
        return "\n".join(lines)


class MockEmbeddingProvider:
    """Hash-to-vector embedder: identical texts map to identical vectors.

    Each vector blends a text-specific random direction with a shared
    anchor by a text-derived weight, so cosine similarities spread over
    [0, 1] instead of collapsing to near-orthogonality.
    """

    def __init__(self, dim: int = 32, seed: int = 0):
        if dim < 2:
            raise ValidationError("embedding dim must be >= 2")
        self.dim = dim
        self.seed = seed
        self.call_count = 0

    def _vector(self, text: str) -> np.ndarray:
        digest = _digest("embed", self.seed, text)
        weight = int.from_bytes(digest[:8], "big") / 2**64
        rng = np.random.default_rng(int.from_bytes(digest[8:16], "big"))
        direction = rng.standard_normal(self.dim)
        direction /= np.linalg.norm(direction)
        anchor = np.zeros(self.dim)
        anchor[0] = 1.0
        blended = weight * anchor + (1.0 - weight) * direction
        return blended / np.linalg.norm(blended)

    def embed(self, request: EmbeddingRequest) -> EmbeddingResponse:
        self.call_count += 1
        vectors = np.stack([self._vector(text) for text in request.texts]) if request.texts \
            else np.zeros((0, self.dim))
        return EmbeddingResponse(vectors=vectors)


class MockImageProvider:
    """Writes placeholder image files and returns their paths.

    ``fail_after`` simulates a partial provider failure: only that many
    images are produced before a PartialResultError.
    """

    def __init__(self, output_dir: str | Path, seed: int = 0,
                 uri_base: str | Path | None = None, fail_after: int | None = None):
        self.output_dir = Path(output_dir)
        self.uri_base = Path(uri_base) if uri_base is not None else None
        self.seed = seed
        self.fail_after = fail_after
        self.call_count = 0

    def generate_images(self, request: ImageRequest) -> ImageResponse:
        if request.count <= 0:
            raise ValidationError("image count must be positive")
        self.call_count += 1
        self.output_dir.mkdir(parents=True, exist_ok=True)
        stem = _digest("image", self.seed, request.prompt, request.size).hex()[:16]
        uris = []
        for i in range(request.count):
            if self.fail_after is not None and i >= self.fail_after:
                raise PartialResultError(
                    f"generated {len(uris)} of {request.count} images",
                    successes=uris,
                )
            path = self.output_dir / f"{stem}_{i}.png"
            path.write_bytes(_PLACEHOLDER_PNG)
            uri = path if self.uri_base is None else self.uri_base / path.name
            uris.append(str(uri))
        meta = {"provider": "mock", "prompt": request.prompt, "size": request.size}
        return ImageResponse(uris=uris, provider_meta=meta)


# --- Embedding cache and batching client -----------------------------------


class EmbeddingCache:
    """text-hash -> vector store; concurrent reads, serialized writes.

    With a directory, entries also persist as one JSON file per key.
    """

    def __init__(self, cache_dir: str | Path | None = None):
        self.cache_dir = Path(cache_dir) if cache_dir else None
        if self.cache_dir:
            self.cache_dir.mkdir(parents=True, exist_ok=True)
        self._memory: dict[str, np.ndarray] = {}
        self._lock = threading.Lock()

    @staticmethod
    def key(text: str) -> str:
        return _digest("cache", text).hex()

    def get(self, text: str) -> np.ndarray | None:
        key = self.key(text)
        vector = self._memory.get(key)
        if vector is None and self.cache_dir is not None:
            path = self.cache_dir / f"{key}.json"
            if path.exists():
                vector = np.asarray(json.loads(path.read_text(encoding="utf-8")))
                with self._lock:
                    self._memory[key] = vector
        return vector

    def put(self, text: str, vector: np.ndarray):
        key = self.key(text)
        with self._lock:
            self._memory[key] = vector
            if self.cache_dir is not None:
                path = self.cache_dir / f"{key}.json"
                path.write_text(json.dumps([float(x) for x in vector]), encoding="utf-8")


class EmbeddingClient:
    """Batches, normalizes, and caches embeddings from an inner provider."""

    def __init__(self, provider, batch_size: int = 256, cache: EmbeddingCache | None = None):
        if batch_size < 1:
            raise ValidationError("batch_size must be >= 1")
        self.provider = provider
        self.batch_size = batch_size
        self.cache = cache if cache is not None else EmbeddingCache()

    def embed_texts(self, texts: list[str]) -> np.ndarray:
        """Embed ``texts`` in order; every returned row is unit-norm."""
        if not texts:
            return np.zeros((0, 0))
        resolved: dict[int, np.ndarray] = {}
        missing: list[str] = []
        missing_positions: dict[str, list[int]] = {}
        for i, text in enumerate(texts):
            cached = self.cache.get(text)
            if cached is not None:
                resolved[i] = cached
            else:
                if text not in missing_positions:
                    missing.append(text)
                    missing_positions[text] = []
                missing_positions[text].append(i)

        for start in range(0, len(missing), self.batch_size):
            chunk = missing[start:start + self.batch_size]
            response = self.provider.embed(EmbeddingRequest(texts=chunk))
            vectors = np.asarray(response.vectors)
            if len(vectors) != len(chunk):
                raise ProviderError(
                    f"embedding count mismatch: sent {len(chunk)}, got {len(vectors)}"
                )
            vectors = normalize_rows(vectors)
            for text, vector in zip(chunk, vectors):
                self.cache.put(text, vector)
                for pos in missing_positions[text]:
                    resolved[pos] = vector

        return np.stack([resolved[i] for i in range(len(texts))])


# --- OpenAI-compatible HTTP providers ---------------------------------------


def _requests_post(url: str, headers: dict, payload: dict, timeout: float):
    import requests

    response = requests.post(url, headers=headers, json=payload, timeout=timeout)
    return response.status_code, dict(response.headers), response.json() if response.content else {}


class _HttpProvider:
    """Shared retry/backoff plumbing for the real providers."""

    def __init__(self, base_url: str, api_key: str, *, max_attempts: int = 3,
                 backoff: float = 1.0, timeout: float = 60.0, max_in_flight: int = 4,
                 post=None, sleep=time.sleep):
        self.base_url = base_url.rstrip("/")
        self.api_key = api_key
        self.max_attempts = max_attempts
        self.backoff = backoff
        self.timeout = timeout
        self._post = post or _requests_post
        self._sleep = sleep
        self._slots = threading.BoundedSemaphore(max_in_flight)

    def _headers(self) -> dict:
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        return headers

    def _call(self, endpoint: str, payload: dict) -> dict:
        url = f"{self.base_url}/{endpoint.lstrip('/')}"
        last_error = None
        retry_after = None
        for attempt in range(1, self.max_attempts + 1):
            try:
                with self._slots:
                    status, headers, body = self._post(url, self._headers(), payload, self.timeout)
            except Exception as exc:  # connection errors, timeouts
                last_error = f"{type(exc).__name__}: {exc}"
                status = None
            else:
                if status < 400:
                    return body
                last_error = f"HTTP {status}: {body.get('error', body)}"
                retry_after = _parse_retry_after(headers)
                if status not in (429, 500, 502, 503, 504):
                    error = ProviderError(last_error, attempts=attempt)
                    error.retryable = False
                    raise error
            if attempt < self.max_attempts:
                self._sleep(retry_after or self.backoff * 2 ** (attempt - 1))
        raise ProviderError(
            f"provider failed after {self.max_attempts} attempts: {last_error}",
            attempts=self.max_attempts,
            retry_after=retry_after,
        )


def _parse_retry_after(headers: dict) -> float | None:
    for name, value in headers.items():
        if name.lower() == "retry-after":
            try:
                return float(value)
            except (TypeError, ValueError):
                return None
    return None


class OpenAiChatProvider(_HttpProvider):
    def __init__(self, base_url: str, api_key: str, model: str = "gpt-4o",
                 temperature: float = 1.0, **kwargs):
        super().__init__(base_url, api_key, **kwargs)
        self.model = model
        self.temperature = temperature

    def chat(self, request: ChatRequest) -> ChatResponse:
        body = self._call("chat/completions", {
            "model": request.model or self.model,
            "temperature": request.temperature if request.temperature is not None else self.temperature,
            "messages": [{"role": "user", "content": request.instruction}],
        })
        try:
            text = body["choices"][0]["message"]["content"]
        except (KeyError, IndexError) as exc:
            raise ProviderError(f"malformed chat response: {exc}") from exc
        if not text:
            raise ProviderError("chat provider returned empty text")
        usage = body.get("usage", {})
        return ChatResponse(
            text=text,
            model=body.get("model", self.model),
            prompt_tokens=usage.get("prompt_tokens", 0),
            completion_tokens=usage.get("completion_tokens", 0),
        )


class OpenAiEmbeddingProvider(_HttpProvider):
    def __init__(self, base_url: str, api_key: str, model: str = "text-embedding-3-small", **kwargs):
        super().__init__(base_url, api_key, **kwargs)
        self.model = model

    def embed(self, request: EmbeddingRequest) -> EmbeddingResponse:
        body = self._call("embeddings", {"model": self.model, "input": request.texts})
        try:
            rows = sorted(body["data"], key=lambda item: item["index"])
            vectors = np.asarray([row["embedding"] for row in rows], dtype=np.float64)
        except (KeyError, TypeError) as exc:
            raise ProviderError(f"malformed embedding response: {exc}") from exc
        return EmbeddingResponse(vectors=vectors)


class OpenAiImageProvider(_HttpProvider):
    def __init__(self, base_url: str, api_key: str, model: str = "dall-e-2", **kwargs):
        super().__init__(base_url, api_key, **kwargs)
        self.model = model

    def generate_images(self, request: ImageRequest) -> ImageResponse:
        if request.count <= 0:
            raise ValidationError("image count must be positive")
        body = self._call("images/generations", {
            "model": self.model,
            "prompt": request.prompt,
            "n": request.count,
            "size": request.size,
        })
        uris = [item.get("url") or item.get("b64_json", "") for item in body.get("data", [])]
        uris = [uri for uri in uris if uri]
        if len(uris) < request.count:
            raise PartialResultError(
                f"provider returned {len(uris)} of {request.count} images",
                successes=uris,
            )
        meta = {"provider": "openai", "model": self.model, "prompt": request.prompt,
                "size": request.size}
        return ImageResponse(uris=uris, provider_meta=meta)


# --- Bundle -----------------------------------------------------------------


@dataclass
class Providers:
    """Everything the pipeline needs from the outside world."""

    chat: object
    embedder: EmbeddingClient
    images: object


def build_providers(config: ProviderConfig, *, seed: int = 0,
                    images_dir: str | Path = "images",
                    image_uri_base: str | Path | None = None) -> Providers:
    """Construct the provider bundle for ``config.mode`` (mock or openai)."""
    cache = EmbeddingCache(config.cache_dir)
    if config.mode == "mock":
        chat = MockChatProvider(fixtures_dir=config.fixtures_dir, seed=seed)
        embed_provider = MockEmbeddingProvider(dim=config.embedding_dim, seed=seed)
        images = MockImageProvider(images_dir, seed=seed, uri_base=image_uri_base)
    elif config.mode == "openai":
        common = {"max_in_flight": config.max_in_flight}
        chat = OpenAiChatProvider(config.base_url, config.api_key, config.chat_model,
                                  config.temperature, **common)
        embed_provider = OpenAiEmbeddingProvider(config.base_url, config.api_key,
                                                 config.embedding_model, **common)
        images = OpenAiImageProvider(config.base_url, config.api_key, config.image_model,
                                     **common)
    else:
        raise ValidationError(f"unknown provider mode: {config.mode}")
    embedder = EmbeddingClient(embed_provider, batch_size=config.batch_size, cache=cache)
    return Providers(chat=chat, embedder=embedder, images=images)
