#!/usr/bin/env python3
# Copyright 2026 The RVChain Simulator Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Independent reference computations for frozen test constants.

Uses the Python standard library plus the `cryptography` package (OpenSSL
backed) for the AEAD vector, so the values do not depend on the C++ code
paths they check.
"""
import hashlib
import hmac
import math
import struct


def be64(x):
    return struct.pack(">Q", x)


def be32(x):
    return struct.pack(">I", x)


def header_bytes(chain_id, height, parent, rank, next_rank, tx_root, term):
    return (be32(chain_id) + be64(height) + parent + be64(rank) +
            be64(next_rank) + tx_root + be64(term))


class Stream:
    """SHA-256 counter-mode stream: block k = H(domain || 0x00 || seed || subkey || k)."""

    def __init__(self, domain, seed, subkey=0):
        self.prefix = domain.encode() + b"\x00" + be64(seed) + be64(subkey)
        self.counter = 0
        self.words = []

    def next_u64(self):
        if not self.words:
            block = hashlib.sha256(self.prefix + be64(self.counter)).digest()
            self.counter += 1
            self.words = [struct.unpack(">Q", block[i:i + 8])[0] for i in range(0, 32, 8)]
        return self.words.pop(0)

    def below(self, bound):
        r = (1 << 64) % bound
        while True:
            w = self.next_u64()
            if r == 0 or w < (1 << 64) - r:
                return w % bound


def tx_bytes(payload, sensitive, fee, nonce):
    return be64(len(payload)) + payload + bytes([1 if sensitive else 0]) + be64(fee) + be64(nonce)


def seal_vector():
    from cryptography.hazmat.primitives.ciphers.aead import ChaCha20Poly1305
    key = bytes(range(32))
    key_id = 7
    nonce = bytes(4) + be64(0)
    ad = be32(key_id) + b"header"
    out = ChaCha20Poly1305(key).encrypt(nonce, b"attack at dawn", ad)
    ct, tag = out[:-16], out[-16:]
    wire = be32(key_id) + nonce + be64(len(ct)) + ct + tag
    return ct.hex(), tag.hex(), wire.hex()


def assign(rnd, n, c):
    s = Stream("rvchain/shuffle", rnd)
    perm = list(range(n))
    for i in range(n - 1, 0, -1):
        j = s.below(i + 1)
        perm[i], perm[j] = perm[j], perm[i]
    big, small = -(-n // c), n // c
    chunks, pos = [], 0
    for k in range(c):
        size = big if k < n % c else small
        chunks.append(perm[pos:pos + size])
        pos += size
    return perm, chunks


if __name__ == "__main__":
    zero = header_bytes(0, 0, bytes(32), 0, 0, bytes(32), 0)
    print("zero header len", len(zero))
    print("sha256(zero header)", hashlib.sha256(zero).hexdigest())
    empty_root = hashlib.sha256(be64(0)).digest()
    genesis = header_bytes(0, 0, bytes(32), 0, 1, empty_root, 0)
    print("empty tx_root", empty_root.hex())
    print("genesis(chain 0) hash", hashlib.sha256(genesis).hexdigest())
    print("assign(12345, 5, 2)", assign(12345, 5, 2))
    s = Stream("rvchain/shuffle", 12345)
    print("first words", [hex(s.next_u64()) for _ in range(5)])
    key = bytes(range(32))
    print("hmac(key 0..31, 'rvchain')", hmac.new(key, b"rvchain", hashlib.sha256).hexdigest())
    msg = be64(3) + be64(7) + be32(2)
    print("certificate tag (epoch 3, rnd 7, node 2)", hmac.new(key, msg, hashlib.sha256).hexdigest())
    tx = tx_bytes(b"abc", False, 5, 9)
    print("tx id (abc, plain, fee 5, nonce 9)", hashlib.sha256(tx).hexdigest())
    print("tx_root([that tx])", hashlib.sha256(be64(1) + tx).hexdigest())
    print("seal vector (ct, tag, wire)", seal_vector())
    d = Stream("rvchain/beacon-keys", 1)
    print("stream(beacon-keys, 1) first words", [hex(d.next_u64()) for _ in range(2)])
    print("(1-2^-6)^64", (1 - 2 ** -6) ** 64)
    print("(1-2^-7)^128", (1 - 2 ** -7) ** 128, "e^-1", math.exp(-1))
