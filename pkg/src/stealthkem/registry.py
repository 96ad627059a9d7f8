"""File-backed registries standing in for ENS and the announcement chain.

Two stores:

* MetaRegistry -- name -> stealth meta-address, a versioned line-delimited
  text file (the ENS stand-in);
* AnnouncementLog -- the ephemeral public key registry, an append-only
  binary log with per-record CRC framing so a torn final record from a
  crashed writer is detected and dropped instead of being replayed corrupt.

The log has two layouts. Inline mode stores full ciphertexts. Split mode
keeps only a 32-byte commitment and the view tag in the log (the "chain")
and moves ciphertext payloads to a side directory keyed by commitment hash;
streaming verifies every payload against its commitment before yielding.
The commitment binds the sequence number, so replayed or reordered payloads
cannot satisfy it. The view tag stays in the log because it is tiny and
scanning filters on it before touching any payload.

Record frame: u32 LE body length, u32 LE CRC-32 of the body, body.
Inline body: u32 LE meta word (tag length in the low byte), ciphertext, tag.
Split body: u32 LE meta word, 32-byte commitment, tag.

Concurrency: one writer at a time (advisory file lock), any number of
readers; readers see a consistent prefix because frames are appended whole.
"""

from __future__ import annotations

import fcntl
import logging
import os
import struct
import zlib
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator

from .errors import BadInputError, ConflictError, IntegrityError, NotFoundError
from .hashes import keccak256
from .protocol import Announcement, StealthMetaAddress, decode_meta, encode_meta

log = logging.getLogger(__name__)

_META_HEADER = "# stealthkem meta-registry v1"

_LOG_MAGIC = b"SKAL"
_LOG_VERSION = 1
_MODE_INLINE = 0
_MODE_SPLIT = 1
_HEADER = struct.Struct("<4sHBB")
_FRAME = struct.Struct("<II")
_META_WORD = struct.Struct("<I")


class MetaRegistry:
    """Name -> meta-address mapping persisted as versioned text lines."""

    def __init__(self, path: str | Path):
        self.path = Path(path)

    def _read(self) -> dict[str, str]:
        if not self.path.exists():
            return {}
        entries: dict[str, str] = {}
        with open(self.path, "r", encoding="utf-8") as f:
            header = f.readline().rstrip("\n")
            if header != _META_HEADER:
                raise BadInputError(f"{self.path} is not a v1 meta-registry")
            for lineno, line in enumerate(f, start=2):
                line = line.rstrip("\n")
                if not line:
                    continue
                try:
                    name, encoded = line.split("\t", 1)
                except ValueError:
                    raise BadInputError(
                        f"{self.path}:{lineno}: malformed registry line"
                    ) from None
                entries[name] = encoded
        return entries

    def register(self, name: str, meta: StealthMetaAddress) -> None:
        """Persist a name binding; duplicate names are a conflict."""
        if not name or any(c in name for c in "\t\n\r"):
            raise BadInputError("name must be non-empty without tabs or newlines")
        encoded = encode_meta(meta)
        with open(self.path, "a+", encoding="utf-8") as f:
            fcntl.flock(f.fileno(), fcntl.LOCK_EX)
            f.seek(0)
            first = f.readline().rstrip("\n")
            if first and first != _META_HEADER:
                raise BadInputError(f"{self.path} is not a v1 meta-registry")
            f.seek(0)
            existing = {
                line.split("\t", 1)[0]
                for line in f.read().splitlines()[1:]
                if line
            }
            if name in existing:
                raise ConflictError(f"name {name!r} is already registered")
            f.seek(0, os.SEEK_END)
            if f.tell() == 0:
                f.write(_META_HEADER + "\n")
            f.write(f"{name}\t{encoded}\n")
            f.flush()
            os.fsync(f.fileno())

    def resolve(self, name: str) -> StealthMetaAddress:
        encoded = self._read().get(name)
        if encoded is None:
            raise NotFoundError(f"no meta-address registered under {name!r}")
        return decode_meta(encoded)

    def names(self) -> list[str]:
        return sorted(self._read())


@dataclass(frozen=True)
class SplitCommitment:
    """What split mode keeps on the simulated chain for one announcement."""

    sequence_no: int
    commitment: bytes
    view_tag: bytes


def compute_commitment(sequence_no: int, ephemeral_ct: bytes, view_tag: bytes) -> bytes:
    """keccak256(seq as u64 LE || ciphertext || tag); binds position."""
    return keccak256(sequence_no.to_bytes(8, "little") + ephemeral_ct + view_tag)


class AnnouncementLog:
    """Append-only announcement registry with CRC-framed records."""

    def __init__(self, path: str | Path, mode: str = "inline"):
        if mode not in ("inline", "split"):
            raise BadInputError(f"mode must be 'inline' or 'split', got {mode!r}")
        self.path = Path(path)
        if self.path.exists() and self.path.stat().st_size > 0:
            with open(self.path, "rb") as f:
                header = f.read(_HEADER.size)
            if len(header) != _HEADER.size:
                raise BadInputError(f"{self.path} is too short to be a registry log")
            magic, version, mode_byte, _ = _HEADER.unpack(header)
            if magic != _LOG_MAGIC or version != _LOG_VERSION:
                raise BadInputError(f"{self.path} is not a v{_LOG_VERSION} registry log")
            self.mode = "split" if mode_byte == _MODE_SPLIT else "inline"
        else:
            self.mode = mode
            with open(self.path, "wb") as f:
                f.write(
                    _HEADER.pack(
                        _LOG_MAGIC,
                        _LOG_VERSION,
                        _MODE_SPLIT if mode == "split" else _MODE_INLINE,
                        0,
                    )
                )
                f.flush()
                os.fsync(f.fileno())
        if self.mode == "split":
            self.payload_dir = self.path.with_name(self.path.name + ".payloads")
            self.payload_dir.mkdir(exist_ok=True)

    # -- scanning the file structure -----------------------------------

    def _scan_frames(self, data: bytes) -> tuple[list[tuple[int, int]], int]:
        """Offsets and lengths of valid record bodies, plus the clean end
        offset. Stops at the first torn or corrupt frame."""
        frames: list[tuple[int, int]] = []
        pos = _HEADER.size
        total = len(data)
        while pos < total:
            if pos + _FRAME.size > total:
                log.warning("%s: torn frame header at offset %d dropped", self.path, pos)
                break
            body_len, crc = _FRAME.unpack_from(data, pos)
            body_start = pos + _FRAME.size
            if body_start + body_len > total:
                log.warning(
                    "%s: torn record %d at offset %d dropped",
                    self.path,
                    len(frames),
                    pos,
                )
                break
            body = data[body_start : body_start + body_len]
            if zlib.crc32(body) != crc:
                log.warning(
                    "%s: CRC mismatch at record %d (offset %d); ignoring the tail",
                    self.path,
                    len(frames),
                    pos,
                )
                break
            frames.append((body_start, body_len))
            pos = body_start + body_len
        return frames, pos if not frames else frames[-1][0] + frames[-1][1]

    def _read_all(self) -> tuple[bytes, list[tuple[int, int]]]:
        with open(self.path, "rb") as f:
            data = f.read()
        frames, _ = self._scan_frames(data)
        return data, frames

    def __len__(self) -> int:
        return len(self._read_all()[1])

    # -- writing --------------------------------------------------------

    def append(self, ann: Announcement, durable: bool = True) -> int:
        """Append one announcement; returns its assigned sequence number."""
        with open(self.path, "r+b") as f:
            fcntl.flock(f.fileno(), fcntl.LOCK_EX)
            data = f.read()
            frames, clean_end = self._scan_frames(data)
            seq = len(frames)
            meta_word = _META_WORD.pack(len(ann.view_tag) & 0xFF)
            if self.mode == "split":
                commitment = compute_commitment(seq, ann.ephemeral_ct, ann.view_tag)
                payload_path = self.payload_dir / commitment.hex()
                with open(payload_path, "wb") as pf:
                    pf.write(ann.ephemeral_ct)
                    pf.flush()
                    if durable:
                        os.fsync(pf.fileno())
                body = meta_word + commitment + ann.view_tag
            else:
                body = meta_word + ann.ephemeral_ct + ann.view_tag
            clean_end = max(clean_end, _HEADER.size)
            f.seek(clean_end)
            f.truncate()
            f.write(_FRAME.pack(len(body), zlib.crc32(body)) + body)
            f.flush()
            if durable:
                os.fsync(f.fileno())
            return seq

    def append_many(self, anns: list[Announcement], durable: bool = False) -> list[int]:
        """Bulk append with one lock acquisition; fsync only at the end."""
        seqs = []
        with open(self.path, "r+b") as f:
            fcntl.flock(f.fileno(), fcntl.LOCK_EX)
            data = f.read()
            frames, clean_end = self._scan_frames(data)
            seq = len(frames)
            clean_end = max(clean_end, _HEADER.size)
            f.seek(clean_end)
            f.truncate()
            for ann in anns:
                meta_word = _META_WORD.pack(len(ann.view_tag) & 0xFF)
                if self.mode == "split":
                    commitment = compute_commitment(seq, ann.ephemeral_ct, ann.view_tag)
                    (self.payload_dir / commitment.hex()).write_bytes(ann.ephemeral_ct)
                    body = meta_word + commitment + ann.view_tag
                else:
                    body = meta_word + ann.ephemeral_ct + ann.view_tag
                f.write(_FRAME.pack(len(body), zlib.crc32(body)) + body)
                seqs.append(seq)
                seq += 1
            f.flush()
            if durable:
                os.fsync(f.fileno())
        return seqs

    # -- reading ---------------------------------------------------------

    def _decode_body(self, seq: int, body: bytes) -> Announcement:
        (meta_word,) = _META_WORD.unpack_from(body)
        tag_len = meta_word & 0xFF
        if self.mode == "split":
            commitment = body[4:36]
            tag = body[36 : 36 + tag_len]
            payload_path = self.payload_dir / commitment.hex()
            try:
                ct = payload_path.read_bytes()
            except FileNotFoundError:
                raise IntegrityError(
                    f"record {seq}: off-chain payload {commitment.hex()} missing",
                    sequence_no=seq,
                ) from None
            if compute_commitment(seq, ct, tag) != commitment:
                raise IntegrityError(
                    f"record {seq}: payload does not match its commitment",
                    sequence_no=seq,
                )
            return Announcement(ct, tag, sequence_no=seq)
        ct = body[4 : len(body) - tag_len]
        tag = body[len(body) - tag_len :]
        return Announcement(ct, tag, sequence_no=seq)

    def stream_since(self, cursor: int = 0) -> Iterator[Announcement]:
        """Yield announcements with sequence_no >= cursor, in order.

        Split mode fetches payloads by commitment and verifies each one
        before yielding; a mismatch raises IntegrityError naming the
        offending sequence number.
        """
        if cursor < 0:
            raise BadInputError(f"cursor must be >= 0, got {cursor}")
        data, frames = self._read_all()
        for seq, (start, length) in enumerate(frames):
            if seq < cursor:
                continue
            yield self._decode_body(seq, data[start : start + length])

    def commitments(self) -> list[SplitCommitment]:
        """On-chain view of a split-mode log (commitment + tag per record)."""
        if self.mode != "split":
            raise BadInputError("commitments() is only meaningful in split mode")
        data, frames = self._read_all()
        out = []
        for seq, (start, length) in enumerate(frames):
            body = data[start : start + length]
            (meta_word,) = _META_WORD.unpack_from(body)
            tag_len = meta_word & 0xFF
            out.append(SplitCommitment(seq, body[4:36], body[36 : 36 + tag_len]))
        return out
