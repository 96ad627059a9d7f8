"""Command-line front end: key management, registration, sending, scanning,
and the scan-time benchmark.

Every command emits JSON lines on stdout so output is scriptable; the bench
command emits its CSV/table report instead. Exit codes are stable:

    0  success
    1  internal error (bug, corrupted store, I/O failure)
    2  lookup target not found
    3  write refused because the target exists
    4  malformed input (bad flag value, bad meta-address, bad config)

Private key material never reaches stdout unless --reveal-keys is given,
key bundles are written owner-readable only, and group/world-readable key
files are refused unless --insecure.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import random
import stat
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from . import bench as bench_mod
from . import protocol
from .curve import checksum_address
from .errors import (
    BadInputError,
    ConflictError,
    NotFoundError,
    StealthKemError,
)
from .registry import AnnouncementLog, MetaRegistry

log = logging.getLogger(__name__)

KEM_CHOICES = ("ml_kem_768", "ml_kem_1024", "kyber768", "kyber1024")


@dataclass(frozen=True)
class CliConfig:
    data_dir: Path
    kem: str = "ml_kem_768"
    curve: str = "bls12_381"
    tag_len: int = 1
    output_format: str = "csv"

    @property
    def meta_registry(self) -> Path:
        return self.data_dir / "meta.registry"

    @property
    def announcement_log(self) -> Path:
        return self.data_dir / "announcements.log"

    @property
    def key_bundle(self) -> Path:
        return self.data_dir / "keys.json"


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad flags, which collides with the
    # not-found exit code; route parse failures through the bad-input path
    def error(self, message: str):
        raise BadInputError(message)


def _emit(obj: dict) -> None:
    print(json.dumps(obj, sort_keys=True))


def _address_str(address: bytes) -> str:
    return checksum_address(address)


def _check_private_file(path: Path, insecure: bool) -> None:
    mode = stat.S_IMODE(os.stat(path).st_mode)
    if mode & 0o077 and not insecure:
        raise BadInputError(
            f"{path} is readable by group/others (mode {mode:03o}); "
            "chmod 600 it or pass --insecure"
        )


def _cursor_path(keys_path: Path) -> Path:
    return keys_path.with_name(keys_path.name + ".cursor")


# ---------------------------------------------------------------- commands


def cmd_keygen(args, cfg: CliConfig) -> int:
    out_path = Path(args.out) if args.out else cfg.key_bundle
    out_path.parent.mkdir(parents=True, exist_ok=True)
    if out_path.exists() and not args.force:
        raise ConflictError(f"{out_path} exists; pass --force to overwrite")
    rng = None
    if args.seed is not None:
        log.warning("seeded keygen is deterministic; use for testing only")
        rng = random.Random(args.seed)
    keys, meta = protocol.recipient_setup(rng, kem=args.kem or cfg.kem)
    bundle = protocol.keys_to_json(keys)
    flags = os.O_WRONLY | os.O_CREAT | (os.O_TRUNC if args.force else os.O_EXCL)
    fd = os.open(out_path, flags, 0o600)
    try:
        os.fchmod(fd, 0o600)
        os.write(fd, bundle.encode())
    finally:
        os.close(fd)
    _emit(
        {
            "event": "keygen",
            "path": str(out_path),
            "kem": keys.view_priv.kem,
            "meta": protocol.encode_meta(meta),
        }
    )
    return 0


def cmd_register(args, cfg: CliConfig) -> int:
    meta = protocol.decode_meta(args.meta)
    registry = MetaRegistry(args.registry or cfg.meta_registry)
    registry.path.parent.mkdir(parents=True, exist_ok=True)
    registry.register(args.name, meta)
    _emit({"event": "registered", "name": args.name, "registry": str(registry.path)})
    return 0


def cmd_resolve(args, cfg: CliConfig) -> int:
    registry = MetaRegistry(args.registry or cfg.meta_registry)
    meta = registry.resolve(args.name)
    _emit(
        {
            "event": "resolved",
            "name": args.name,
            "meta": protocol.encode_meta(meta),
            "kem": meta.kem,
        }
    )
    return 0


def cmd_send(args, cfg: CliConfig) -> int:
    if (args.name is None) == (args.meta is None):
        raise BadInputError("give exactly one of NAME or --meta")
    if args.meta is not None:
        meta = protocol.decode_meta(args.meta)
    else:
        meta = MetaRegistry(args.registry or cfg.meta_registry).resolve(args.name)
    outcome = protocol.send(meta, tag_len=args.tag_len)
    log_path = Path(args.log) if args.log else cfg.announcement_log
    log_path.parent.mkdir(parents=True, exist_ok=True)
    ann_log = AnnouncementLog(log_path, mode=args.mode)
    seq = ann_log.append(outcome.announcement)
    _emit(
        {
            "event": "sent",
            "address": _address_str(outcome.stealth_address),
            "seq": seq,
            "log": str(log_path),
        }
    )
    return 0


def cmd_scan(args, cfg: CliConfig) -> int:
    keys_path = Path(args.keys) if args.keys else cfg.key_bundle
    if not keys_path.exists():
        raise NotFoundError(f"key bundle {keys_path} does not exist")
    _check_private_file(keys_path, args.insecure)
    keys = protocol.keys_from_json(keys_path.read_text())

    cursor_file = _cursor_path(keys_path)
    if args.since is not None:
        cursor = args.since
    elif cursor_file.exists():
        try:
            cursor = int(cursor_file.read_text().strip())
        except ValueError:
            raise BadInputError(f"cursor sidecar {cursor_file} is corrupt") from None
    else:
        cursor = 0

    log_path = Path(args.log) if args.log else cfg.announcement_log
    if log_path.exists():
        ann_log = AnnouncementLog(log_path)
        announcements = list(ann_log.stream_since(cursor))
    else:
        announcements = []  # nothing announced yet

    report = protocol.scan(
        keys, announcements, tag_len=args.tag_len, workers=args.workers
    )
    new_cursor = cursor
    if announcements:
        new_cursor = max(a.sequence_no for a in announcements) + 1

    for match in report.matches:
        entry = {
            "event": "match",
            "seq": match.sequence_no,
            "address": _address_str(match.stealth_address),
        }
        if args.reveal_keys:
            entry["stealth_priv"] = f"0x{match.stealth_priv:064x}"
        _emit(entry)
    _emit(
        {
            "event": "scan",
            "scanned": report.announcements_scanned,
            "tag_passes": report.view_tag_passes,
            "malformed": report.malformed,
            "matches": len(report.matches),
            "cursor": new_cursor,
        }
    )
    cursor_file.write_text(f"{new_cursor}\n")
    return 0


def cmd_bench(args, cfg: CliConfig) -> int:
    if args.config:
        bench_cfg = bench_mod.load_config(args.config)
    else:
        bench_cfg = bench_mod.BenchConfig()
    overrides: dict = {}
    if args.counts:
        overrides["announcement_counts"] = tuple(args.counts)
    if args.seeds:
        overrides["seeds"] = tuple(args.seeds)
    if args.kernels:
        unknown = [k for k in args.kernels if k not in bench_mod.KERNELS]
        if unknown:
            raise BadInputError(f"unknown kernels: {', '.join(unknown)}")
        overrides["kernels"] = tuple(bench_mod.KERNELS[k] for k in args.kernels)
    if args.tag_len is not None:
        overrides["tag_len"] = args.tag_len
    if args.curve:
        overrides["curve"] = args.curve
    if args.planted is not None:
        overrides["planted"] = args.planted
    if args.parallel_workers is not None:
        overrides["parallel_workers"] = args.parallel_workers
    if overrides:
        from dataclasses import replace

        bench_cfg = replace(bench_cfg, **overrides)
    result = bench_mod.run_bench(bench_cfg)
    text = bench_mod.emit_report(result, fmt=args.format, path=args.out)
    if args.out:
        _emit({"event": "bench", "report": str(args.out), "format": args.format})
    else:
        sys.stdout.write(text)
    return 0


# ---------------------------------------------------------------- wiring


def _build_parser() -> _Parser:
    parser = _Parser(prog="stealthkem", description=__doc__.splitlines()[0])
    parser.add_argument(
        "--data-dir",
        default=os.environ.get("STEALTHKEM_DATA", "stealthkem-data"),
        help="default location for key bundle, registry, and log",
    )
    parser.add_argument(
        "--insecure",
        action="store_true",
        help="allow reading key files with loose permissions",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("keygen", help="generate a key bundle and meta-address")
    p.add_argument("--out", help="bundle path (default: DATA/keys.json)")
    p.add_argument("--kem", choices=KEM_CHOICES, help="KEM parameter set")
    p.add_argument("--seed", type=int, help="deterministic keys (testing only)")
    p.add_argument("--force", action="store_true", help="overwrite an existing bundle")
    p.set_defaults(func=cmd_keygen)

    p = sub.add_parser("register", help="bind a name to a meta-address")
    p.add_argument("name")
    p.add_argument("meta", help="encoded st:eth:0x... meta-address")
    p.add_argument("--registry", help="meta-registry path")
    p.set_defaults(func=cmd_register)

    p = sub.add_parser("resolve", help="look up a registered meta-address")
    p.add_argument("name")
    p.add_argument("--registry", help="meta-registry path")
    p.set_defaults(func=cmd_resolve)

    p = sub.add_parser("send", help="derive a stealth address and announce it")
    p.add_argument("name", nargs="?", help="registered recipient name")
    p.add_argument("--meta", help="explicit meta-address instead of a name")
    p.add_argument("--registry", help="meta-registry path")
    p.add_argument("--log", help="announcement log path")
    p.add_argument("--tag-len", type=int, default=1)
    p.add_argument(
        "--mode",
        choices=("inline", "split"),
        default="inline",
        help="storage layout if the log is being created",
    )
    p.set_defaults(func=cmd_send)

    p = sub.add_parser("scan", help="scan announcements for stealth payments")
    p.add_argument("--keys", help="key bundle path (default: DATA/keys.json)")
    p.add_argument("--log", help="announcement log path")
    p.add_argument("--since", type=int, help="explicit cursor (overrides sidecar)")
    p.add_argument("--tag-len", type=int, default=1)
    p.add_argument("--workers", type=int, help="parallel scan threads")
    p.add_argument(
        "--reveal-keys",
        action="store_true",
        help="print derived stealth private keys",
    )
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("bench", help="run the scan-time benchmark")
    p.add_argument("--config", help="key = value config file")
    p.add_argument("--counts", type=int, nargs="+", help="announcement counts")
    p.add_argument("--seeds", type=int, nargs="+")
    p.add_argument("--kernels", nargs="+", help="subset of kernels to run")
    p.add_argument("--tag-len", type=int)
    p.add_argument("--curve", help="comparator pairing curve")
    p.add_argument("--planted", type=int, help="planted matches per run")
    p.add_argument("--parallel-workers", type=int)
    p.add_argument("--format", choices=("csv", "table"), default="csv")
    p.add_argument("--out", help="write the report here instead of stdout")
    p.set_defaults(func=cmd_bench)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    try:
        args = _build_parser().parse_args(argv)
        logging.basicConfig(
            level=logging.DEBUG if args.verbose else logging.WARNING,
            format="%(levelname)s %(name)s: %(message)s",
            stream=sys.stderr,
        )
        cfg = CliConfig(data_dir=Path(args.data_dir))
        return args.func(args, cfg)
    except NotFoundError as exc:
        _emit({"event": "error", "kind": "not-found", "detail": str(exc)})
        return 2
    except ConflictError as exc:
        _emit({"event": "error", "kind": "conflict", "detail": str(exc)})
        return 3
    except BadInputError as exc:
        _emit({"event": "error", "kind": "bad-input", "detail": str(exc)})
        return 4
    except StealthKemError as exc:
        _emit({"event": "error", "kind": "internal", "detail": str(exc)})
        return 1
    except OSError as exc:
        _emit({"event": "error", "kind": "internal", "detail": str(exc)})
        return 1


if __name__ == "__main__":
    sys.exit(main())
