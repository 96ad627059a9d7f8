"""One stealth payment, end to end.

A recipient publishes a reusable meta-address; a sender derives a fresh
one-time Ethereum address from it plus fresh KEM randomness; the recipient
finds the payment by scanning the public announcement feed and recovers
the private key that controls it. Nobody else learns the link.

Run: python3 demos/01_stealth_payment.py
"""

import random

from stealthkem import curve, protocol

# --- recipient: one-time setup, publish the meta-address ----------------

keys, meta = protocol.recipient_setup(random.Random(42))
encoded = protocol.encode_meta(meta)
print("published meta-address (truncated):")
print(" ", encoded[:64] + "...")
print("  spend pub:  secp256k1 point (33 bytes compressed)")
print(f"  view pub:   ML-KEM-768 encapsulation key ({len(meta.view_pub)} bytes)")

# --- sender: derive a one-time address from public data only ------------

outcome = protocol.send(meta, tag_len=1)
ann = outcome.announcement
print("\nsender derived:", curve.checksum_address(outcome.stealth_address))
print(f"announcement:   {len(ann.ephemeral_ct)}-byte ciphertext + view tag {ann.view_tag.hex()}")

# --- recipient: scan the feed --------------------------------------------

report = protocol.scan(keys, [ann], tag_len=1)
print(
    f"\nrecipient scan: {report.announcements_scanned} scanned, "
    f"{report.view_tag_passes} tag pass(es), {len(report.matches)} match(es)"
)

match = report.matches[0]
assert match.stealth_address == outcome.stealth_address

# the recovered scalar really controls the announced address:
# both sides computed the same point, sender as K + XOF(S)*g,
# recipient as (k + XOF(S))*g
derived = curve.eth_address(curve.scalar_base_mult(match.stealth_priv))
assert derived == match.stealth_address
print("recovered key controls", curve.checksum_address(match.stealth_address))

# --- everyone else: silence ----------------------------------------------

# a different wallet decapsulates the same ciphertext to unrelated bytes
# (implicit rejection), so its view tag almost never lines up -- and the
# on-chain balance check rejects the ~1/256 of tags that collide anyway
other_keys, _ = protocol.recipient_setup(random.Random(7))
other = protocol.scan(
    other_keys, [ann], tag_len=1, address_filter=lambda addr: False
)
print(
    f"\nunrelated wallet: {other.view_tag_passes} tag pass(es), "
    f"{len(other.matches)} match(es)"
)
