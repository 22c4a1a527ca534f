"""Binary model container.

Layout (all integers little-endian)::

    b"AGRM"                      magic
    u16                          format version
    u32 n, n bytes               config block, UTF-8 "key=value" lines
    u32 count                    vocabulary size
      u32 n, n bytes             one UTF-8 token per entry, in index order
    u32 count                    number of tensors
      u16 n, n bytes             tensor name (UTF-8)
      u8 ndim, ndim x u32        dimensions
      prod(dims) x f64           row-major data
    u32                          CRC32 of every preceding byte
"""

from __future__ import annotations

import dataclasses
import struct
import zlib
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .corpus import Vocabulary
from .model import ModelConfig, ModelParams

MAGIC = b"AGRM"
FORMAT_VERSION = 1

_INT_FIELDS = {"embed_dim", "hidden_dim", "num_classes", "max_len", "epochs", "patience", "seed", "min_freq"}


class ModelFileError(Exception):
    pass


class CorruptModelError(ModelFileError):
    pass


class ModelVersionError(ModelFileError):
    pass


class MalformedModelError(ModelFileError):
    pass


@dataclass
class SavedModel:
    params: ModelParams
    vocab: Vocabulary
    config: ModelConfig
    meta: dict[str, str] = field(default_factory=dict)

    def __iter__(self):
        # unpacks as (params, vocab, config)
        return iter((self.params, self.vocab, self.config))


def config_block(cfg: ModelConfig, meta: dict[str, str] | None = None) -> str:
    """``key=value`` lines for every set config field, then ``meta`` in sorted order."""
    lines = []
    for f in dataclasses.fields(cfg):
        value = getattr(cfg, f.name)
        if value is None:
            continue
        lines.append(f"{f.name}={value!r}" if isinstance(value, float) else f"{f.name}={value}")
    for key in sorted(meta or {}):
        value = str(meta[key])
        if "\n" in value or "=" in key:
            raise ValueError(f"meta entry {key!r} cannot be stored in a config block")
        lines.append(f"{key}={value}")
    return "".join(line + "\n" for line in lines)


def parse_config_block(text: str) -> tuple[ModelConfig, dict[str, str]]:
    names = {f.name for f in dataclasses.fields(ModelConfig)}
    kwargs, meta = {}, {}
    for line in text.splitlines():
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise MalformedModelError(f"bad config line {line!r}")
        if key in names:
            try:
                kwargs[key] = int(value) if key in _INT_FIELDS else float(value)
            except ValueError as exc:
                raise MalformedModelError(f"bad value for {key}: {value!r}") from exc
        else:
            meta[key] = value
    try:
        return ModelConfig(**kwargs), meta
    except (TypeError, ValueError) as exc:
        raise MalformedModelError(f"invalid config block: {exc}") from exc


def _blob(b: bytes) -> bytes:
    return struct.pack("<I", len(b)) + b


def encode_model(params: ModelParams, vocab: Vocabulary, cfg: ModelConfig, meta: dict[str, str] | None = None) -> bytes:
    parts = [MAGIC, struct.pack("<H", FORMAT_VERSION), _blob(config_block(cfg, meta).encode("utf-8"))]
    parts.append(struct.pack("<I", len(vocab)))
    parts.extend(_blob(tok.encode("utf-8")) for tok in vocab.itos)
    tensors = params.tensors()
    parts.append(struct.pack("<I", len(tensors)))
    for name, arr in tensors.items():
        raw_name = name.encode("utf-8")
        parts.append(struct.pack("<H", len(raw_name)) + raw_name)
        parts.append(struct.pack("<B", arr.ndim) + struct.pack(f"<{arr.ndim}I", *arr.shape))
        parts.append(np.ascontiguousarray(arr, dtype="<f8").tobytes())
    body = b"".join(parts)
    return body + struct.pack("<I", zlib.crc32(body))


def save_model(path: str | Path, params: ModelParams, vocab: Vocabulary, cfg: ModelConfig, meta: dict[str, str] | None = None) -> Path:
    path = Path(path)
    path.write_bytes(encode_model(params, vocab, cfg, meta))
    return path


class _Reader:
    def __init__(self, buf: bytes, pos: int):
        self.buf = buf
        self.pos = pos

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.buf):
            raise MalformedModelError("section runs past end of file")
        out = self.buf[self.pos : self.pos + n]
        self.pos += n
        return out

    def unpack(self, fmt: str):
        return struct.unpack(fmt, self.take(struct.calcsize(fmt)))


def decode_model(buf: bytes) -> SavedModel:
    if len(buf) < 10 or buf[:4] != MAGIC:
        raise CorruptModelError("not a model file (bad magic or too short)")
    body, (crc,) = buf[:-4], struct.unpack("<I", buf[-4:])
    if zlib.crc32(body) != crc:
        raise CorruptModelError("CRC mismatch")
    (version,) = struct.unpack("<H", body[4:6])
    if version != FORMAT_VERSION:
        raise ModelVersionError(f"unsupported model format version {version} (expected {FORMAT_VERSION})")
    r = _Reader(body, 6)
    try:
        (n,) = r.unpack("<I")
        cfg, meta = parse_config_block(r.take(n).decode("utf-8"))
        (n_vocab,) = r.unpack("<I")
        itos = []
        for _ in range(n_vocab):
            (n,) = r.unpack("<I")
            itos.append(r.take(n).decode("utf-8"))
        vocab = Vocabulary(itos)
        (n_tensors,) = r.unpack("<I")
        tensors = {}
        for _ in range(n_tensors):
            (n,) = r.unpack("<H")
            name = r.take(n).decode("utf-8")
            (ndim,) = r.unpack("<B")
            dims = r.unpack(f"<{ndim}I")
            count = int(np.prod(dims)) if dims else 1
            tensors[name] = np.frombuffer(r.take(8 * count), dtype="<f8").astype(np.float64).reshape(dims)
    except (UnicodeDecodeError, ValueError) as exc:
        raise MalformedModelError(str(exc)) from exc
    if r.pos != len(body):
        raise MalformedModelError("trailing bytes after tensor section")
    try:
        params = ModelParams.from_tensors(tensors)
    except KeyError as exc:
        raise MalformedModelError(f"missing tensor {exc}") from exc
    _check_shapes(params, vocab, cfg)
    return SavedModel(params, vocab, cfg, meta)


def _check_shapes(params: ModelParams, vocab: Vocabulary, cfg: ModelConfig) -> None:
    E, H, C, V = cfg.embed_dim, cfg.hidden_dim, cfg.num_classes, len(vocab)
    expected = {"embedding": (V, E), "attn.w_a": (H,), "dense.W_d": (C, H), "dense.b_d": (C,)}
    for g in ("f", "i", "o", "c"):
        expected[f"lstm.W_{g}"] = (H, E)
        expected[f"lstm.U_{g}"] = (H, H)
        expected[f"lstm.b_{g}"] = (H,)
    for name, arr in params.tensors().items():
        if arr.shape != expected[name]:
            raise MalformedModelError(f"tensor {name} has shape {arr.shape}, config/vocabulary imply {expected[name]}")
    for name, arr in params.tensors().items():
        if not np.all(np.isfinite(arr)):
            raise MalformedModelError(f"tensor {name} holds non-finite values")


def load_model(path: str | Path) -> SavedModel:
    try:
        buf = Path(path).read_bytes()
    except OSError as exc:
        raise ModelFileError(f"cannot read model {path}: {exc}") from exc
    return decode_model(buf)
