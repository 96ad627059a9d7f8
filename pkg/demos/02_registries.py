"""The two persistence surfaces: name registry and announcement log.

The registry maps human names to meta-addresses. The log is the public
append-only feed of (ciphertext, view tag) records that recipients scan;
it survives torn writes by dropping only the damaged tail. Split mode
additionally stores a per-record commitment so large payloads can live
out-of-line and still be position-bound.

Run: python3 demos/02_registries.py
"""

import random
import tempfile
from pathlib import Path

from stealthkem import protocol
from stealthkem.registry import AnnouncementLog, MetaRegistry, compute_commitment

root = Path(tempfile.mkdtemp(prefix="stealthkem-demo-"))
print("working under", root)

# --- name registry --------------------------------------------------------

registry = MetaRegistry(root / "meta.registry")
alice_keys, alice_meta = protocol.recipient_setup(random.Random(1))
bob_keys, bob_meta = protocol.recipient_setup(random.Random(2))
registry.register("alice", alice_meta)
registry.register("bob", bob_meta)
print("registered:", registry.names())
assert registry.resolve("alice") == alice_meta

# --- announcement log: append, then stream from a cursor ------------------

log = AnnouncementLog(root / "announcements.log")
for _ in range(5):
    log.append(protocol.send(alice_meta).announcement)
print("log holds", len(log), "records")

# a scanner remembers its cursor and only reads what's new
first_pass = list(log.stream_since(0))
cursor = first_pass[-1].sequence_no + 1
log.append(protocol.send(alice_meta).announcement)
fresh = list(log.stream_since(cursor))
print(f"resumed from cursor {cursor}: {len(fresh)} new record(s)")

# --- crash consistency -----------------------------------------------------

# simulate a torn final write: chop 3 bytes off the file
raw = (root / "announcements.log").read_bytes()
(root / "announcements.log").write_bytes(raw[:-3])
recovered = AnnouncementLog(root / "announcements.log")
print(f"after torn write: {len(recovered)} of 6 records survive (tail dropped)")
# the sequence number of the torn record is reused by the next append
seq = recovered.append(protocol.send(bob_meta).announcement)
print("next append reuses sequence", seq)

# --- split mode: out-of-line payloads bound by commitment ------------------

split = AnnouncementLog(root / "split.log", mode="split")
ann = protocol.send(bob_meta).announcement
seq = split.append(ann)
record = split.commitments()[0]
assert record.commitment == compute_commitment(seq, ann.ephemeral_ct, ann.view_tag)
print("split-mode commitment verifies for sequence", seq)
