"""Persistence layer: name registry and the append-only announcement log."""

import logging
import random
import threading

import pytest

from stealthkem.errors import (
    BadInputError,
    ConflictError,
    IntegrityError,
    NotFoundError,
)
from stealthkem.protocol import Announcement, encode_meta, recipient_setup
from stealthkem.registry import (
    AnnouncementLog,
    MetaRegistry,
    SplitCommitment,
    compute_commitment,
)


@pytest.fixture
def meta():
    return recipient_setup(random.Random(61))[1]


def make_anns(n, seed=0, ct_len=64, tag_len=1):
    rng = random.Random(seed)
    return [
        Announcement(rng.randbytes(ct_len), rng.randbytes(tag_len)) for _ in range(n)
    ]


class TestMetaRegistry:
    def test_register_resolve_round_trip(self, tmp_path, meta):
        reg = MetaRegistry(tmp_path / "meta.reg")
        reg.register("alice", meta)
        assert encode_meta(reg.resolve("alice")) == encode_meta(meta)

    def test_duplicate_is_conflict(self, tmp_path, meta):
        reg = MetaRegistry(tmp_path / "meta.reg")
        reg.register("alice", meta)
        with pytest.raises(ConflictError):
            reg.register("alice", meta)

    def test_unknown_not_found(self, tmp_path):
        reg = MetaRegistry(tmp_path / "meta.reg")
        with pytest.raises(NotFoundError):
            reg.resolve("nobody")

    def test_persists_across_reopen(self, tmp_path, meta):
        path = tmp_path / "meta.reg"
        MetaRegistry(path).register("alice", meta)
        # fresh instance simulates a process restart
        assert encode_meta(MetaRegistry(path).resolve("alice")) == encode_meta(meta)

    def test_names_sorted(self, tmp_path, meta):
        reg = MetaRegistry(tmp_path / "meta.reg")
        for name in ("zoe", "alice", "mallory"):
            reg.register(name, meta)
        assert reg.names() == ["alice", "mallory", "zoe"]

    def test_invalid_names(self, tmp_path, meta):
        reg = MetaRegistry(tmp_path / "meta.reg")
        for bad in ("", "a\tb", "a\nb"):
            with pytest.raises(BadInputError):
                reg.register(bad, meta)

    def test_foreign_file_rejected(self, tmp_path):
        path = tmp_path / "meta.reg"
        path.write_text("something else entirely\n")
        with pytest.raises(BadInputError):
            MetaRegistry(path).resolve("alice")


class TestAnnouncementLogInline:
    def test_sequence_numbers(self, tmp_path):
        log = AnnouncementLog(tmp_path / "a.log")
        assert [log.append(a) for a in make_anns(3)] == [0, 1, 2]
        assert len(log) == 3

    def test_append_then_stream_lossless(self, tmp_path):
        log = AnnouncementLog(tmp_path / "a.log")
        anns = make_anns(10, seed=1)
        for a in anns:
            log.append(a, durable=False)
        got = list(log.stream_since(0))
        assert [g.ephemeral_ct for g in got] == [a.ephemeral_ct for a in anns]
        assert [g.view_tag for g in got] == [a.view_tag for a in anns]
        assert [g.sequence_no for g in got] == list(range(10))

    def test_persists_across_reopen(self, tmp_path):
        path = tmp_path / "a.log"
        anns = make_anns(5, seed=2)
        log = AnnouncementLog(path)
        for a in anns:
            log.append(a, durable=False)
        reopened = AnnouncementLog(path)
        got = list(reopened.stream_since(0))
        assert [(g.ephemeral_ct, g.view_tag) for g in got] == [
            (a.ephemeral_ct, a.view_tag) for a in anns
        ]

    def test_cursor_semantics(self, tmp_path):
        log = AnnouncementLog(tmp_path / "a.log")
        for a in make_anns(5, seed=3):
            log.append(a, durable=False)
        assert [a.sequence_no for a in log.stream_since(2)] == [2, 3, 4]
        assert list(log.stream_since(5)) == []
        assert list(log.stream_since(99)) == []
        with pytest.raises(BadInputError):
            list(log.stream_since(-1))

    def test_interleaved_appends_and_streams(self, tmp_path):
        log = AnnouncementLog(tmp_path / "a.log")
        anns = make_anns(6, seed=4)
        seen = []
        for i, a in enumerate(anns):
            log.append(a, durable=False)
            seen.extend(x.sequence_no for x in log.stream_since(i))
        assert seen == list(range(6))

    def test_append_many(self, tmp_path):
        log = AnnouncementLog(tmp_path / "a.log")
        anns = make_anns(7, seed=5)
        assert log.append_many(anns) == list(range(7))
        assert log.append_many(make_anns(2, seed=6)) == [7, 8]
        assert len(log) == 9

    def test_varied_tag_lengths(self, tmp_path):
        log = AnnouncementLog(tmp_path / "a.log")
        anns = [
            Announcement(b"\x01" * 32, b"\xaa"),
            Announcement(b"\x02" * 32, b"\xbb" * 4),
            Announcement(b"\x03" * 32, b"\xcc" * 32),
        ]
        for a in anns:
            log.append(a, durable=False)
        got = list(AnnouncementLog(log.path).stream_since(0))
        assert [(g.ephemeral_ct, g.view_tag) for g in got] == [
            (a.ephemeral_ct, a.view_tag) for a in anns
        ]


class TestCrashConsistency:
    def _write_log(self, path, n=4, seed=7):
        log = AnnouncementLog(path)
        anns = make_anns(n, seed=seed)
        for a in anns:
            log.append(a, durable=False)
        return anns

    def test_torn_final_record_dropped(self, tmp_path, caplog):
        path = tmp_path / "a.log"
        anns = self._write_log(path)
        size = path.stat().st_size
        with open(path, "r+b") as f:
            f.truncate(size - 3)  # tear the last record's tail
        with caplog.at_level(logging.WARNING):
            got = list(AnnouncementLog(path).stream_since(0))
        assert len(got) == 3
        assert [(g.ephemeral_ct, g.view_tag) for g in got] == [
            (a.ephemeral_ct, a.view_tag) for a in anns[:3]
        ]
        assert any("torn" in r.message for r in caplog.records)

    def test_torn_frame_header_dropped(self, tmp_path):
        path = tmp_path / "a.log"
        anns = self._write_log(path)
        size = path.stat().st_size
        body_len = 4 + 64 + 1  # meta word + ct + tag
        with open(path, "r+b") as f:
            f.truncate(size - body_len - 4)  # cut into the frame header itself
        got = list(AnnouncementLog(path).stream_since(0))
        assert len(got) == 3
        assert got[-1].ephemeral_ct == anns[2].ephemeral_ct

    def test_crc_corruption_excluded(self, tmp_path):
        path = tmp_path / "a.log"
        self._write_log(path)
        with open(path, "r+b") as f:
            f.seek(-1, 2)
            last = f.read(1)
            f.seek(-1, 2)
            f.write(bytes([last[0] ^ 0xFF]))
        got = list(AnnouncementLog(path).stream_since(0))
        assert len(got) == 3

    def test_append_after_torn_record_overwrites_garbage(self, tmp_path):
        path = tmp_path / "a.log"
        self._write_log(path, n=2)
        with open(path, "r+b") as f:
            f.truncate(path.stat().st_size - 1)
        log = AnnouncementLog(path)
        new = Announcement(b"\x42" * 64, b"\x42")
        assert log.append(new) == 1  # torn record's slot is reused
        got = list(log.stream_since(0))
        assert len(got) == 2
        assert got[1].ephemeral_ct == new.ephemeral_ct

    def test_not_a_log_rejected(self, tmp_path):
        path = tmp_path / "bogus.log"
        path.write_bytes(b"PK\x03\x04 definitely not ours")
        with pytest.raises(BadInputError):
            AnnouncementLog(path)
        tiny = tmp_path / "tiny.log"
        tiny.write_bytes(b"SK")
        with pytest.raises(BadInputError):
            AnnouncementLog(tiny)


class TestSplitMode:
    def test_commitments_verify(self, tmp_path):
        log = AnnouncementLog(tmp_path / "s.log", mode="split")
        anns = make_anns(4, seed=8)
        for a in anns:
            log.append(a, durable=False)
        for c, a in zip(log.commitments(), anns):
            assert isinstance(c, SplitCommitment)
            assert c.commitment == compute_commitment(
                c.sequence_no, a.ephemeral_ct, a.view_tag
            )
            assert c.view_tag == a.view_tag

    def test_stream_round_trip(self, tmp_path):
        log = AnnouncementLog(tmp_path / "s.log", mode="split")
        anns = make_anns(5, seed=9)
        for a in anns:
            log.append(a, durable=False)
        got = list(AnnouncementLog(log.path).stream_since(0))
        assert [(g.ephemeral_ct, g.view_tag) for g in got] == [
            (a.ephemeral_ct, a.view_tag) for a in anns
        ]

    def test_mode_sticky_across_reopen(self, tmp_path):
        path = tmp_path / "s.log"
        AnnouncementLog(path, mode="split")
        assert AnnouncementLog(path, mode="inline").mode == "split"

    def test_corrupt_payload_names_record(self, tmp_path):
        log = AnnouncementLog(tmp_path / "s.log", mode="split")
        for a in make_anns(3, seed=10):
            log.append(a, durable=False)
        victim = log.commitments()[1]
        payload = log.payload_dir / victim.commitment.hex()
        raw = bytearray(payload.read_bytes())
        raw[0] ^= 0x01
        payload.write_bytes(bytes(raw))
        with pytest.raises(IntegrityError) as exc_info:
            list(log.stream_since(0))
        assert exc_info.value.sequence_no == 1

    def test_missing_payload_names_record(self, tmp_path):
        log = AnnouncementLog(tmp_path / "s.log", mode="split")
        for a in make_anns(3, seed=11):
            log.append(a, durable=False)
        (log.payload_dir / log.commitments()[2].commitment.hex()).unlink()
        with pytest.raises(IntegrityError) as exc_info:
            list(log.stream_since(0))
        assert exc_info.value.sequence_no == 2

    def test_reordered_payloads_cannot_satisfy_commitments(self, tmp_path):
        # position binding: swapping two payload files must be detected even
        # though each file individually matches *a* commitment
        log = AnnouncementLog(tmp_path / "s.log", mode="split")
        for a in make_anns(2, seed=12):
            log.append(a, durable=False)
        c0, c1 = log.commitments()
        p0 = log.payload_dir / c0.commitment.hex()
        p1 = log.payload_dir / c1.commitment.hex()
        b0, b1 = p0.read_bytes(), p1.read_bytes()
        p0.write_bytes(b1)
        p1.write_bytes(b0)
        with pytest.raises(IntegrityError):
            list(log.stream_since(0))

    def test_commitments_inline_rejected(self, tmp_path):
        log = AnnouncementLog(tmp_path / "a.log")
        with pytest.raises(BadInputError):
            log.commitments()

    def test_bad_mode_rejected(self, tmp_path):
        with pytest.raises(BadInputError):
            AnnouncementLog(tmp_path / "x.log", mode="sideways")


class TestConcurrency:
    def test_concurrent_appenders_all_land(self, tmp_path):
        path = tmp_path / "a.log"
        AnnouncementLog(path)
        per_thread = 12
        errors = []

        def worker(tid):
            try:
                log = AnnouncementLog(path)
                for i in range(per_thread):
                    log.append(
                        Announcement(bytes([tid]) * 64, bytes([tid])), durable=False
                    )
            except Exception as exc:  # pragma: no cover
                errors.append(exc)

        threads = [threading.Thread(target=worker, args=(t,)) for t in range(4)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert not errors
        got = list(AnnouncementLog(path).stream_since(0))
        assert len(got) == 4 * per_thread
        assert [g.sequence_no for g in got] == list(range(4 * per_thread))
        # every thread's records intact
        from collections import Counter

        counts = Counter(g.ephemeral_ct[0] for g in got)
        assert counts == {0: per_thread, 1: per_thread, 2: per_thread, 3: per_thread}
