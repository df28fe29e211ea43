"""Public-key and symmetric primitives for the key-exchange and
identification protocols.

RSA key generation, encryption and decryption operate on arbitrary-
precision integers; the private exponent is the modular inverse of the
public exponent modulo (S-1)(R-1). Session keys travel as two 64-bit
halves, each wrapped with AES-128 in counter mode with an integrity tag
(AES-GCM), so a single transcript half never decrypts anything.

Node identification proves knowledge of a secret P whose square
F = P^2 mod G is registered with the base station: the prover commits
t = s^2 mod G, the verifier challenges with a bit b, the prover answers
z = s * P^b mod G, and the verifier accepts the round when
z^2 = t * F^b (mod G).
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from cryptography.hazmat.primitives.ciphers import Cipher, algorithms, modes
from cryptography.hazmat.primitives.ciphers.aead import AESGCM
from cryptography.exceptions import InvalidTag


class CryptoError(ValueError):
    """Invalid key-generation or message-range input."""


class AuthenticationError(Exception):
    """Ciphertext integrity check failed (wrong or incomplete key)."""


# Primality ----------------------------------------------------------------

_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47)


def is_probable_prime(n: int, rounds: int = 40, rng: random.Random | None = None) -> bool:
    """Miller-Rabin test; error probability at most 4**-rounds."""
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n == p:
            return True
        if n % p == 0:
            return False
    rng = rng or random.Random(0x5EED ^ n)
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for _ in range(rounds):
        a = rng.randrange(2, n - 1)
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = pow(x, 2, n)
            if x == n - 1:
                break
        else:
            return False
    return True


def random_prime(bits: int, rng: random.Random) -> int:
    """Draw an odd prime of exactly ``bits`` bits from ``rng``."""
    if bits < 2:
        raise CryptoError("need at least 2 bits")
    while True:
        candidate = rng.getrandbits(bits) | (1 << (bits - 1)) | 1
        if is_probable_prime(candidate, rng=rng):
            return candidate


# RSA ----------------------------------------------------------------------

def egcd(a: int, b: int) -> tuple[int, int, int]:
    """Extended Euclid: returns (g, x, y) with a*x + b*y = g = gcd(a, b)."""
    old_r, r = a, b
    old_x, x = 1, 0
    old_y, y = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_x, x = x, old_x - q * x
        old_y, y = y, old_y - q * y
    return old_r, old_x, old_y


def modinv(a: int, m: int) -> int:
    g, x, _ = egcd(a % m, m)
    if g != 1:
        raise CryptoError(f"{a} has no inverse modulo {m}")
    return x % m


@dataclass(frozen=True)
class RsaKeyPair:
    modulus: int
    public_exponent: int
    private_exponent: int
    prime_s: int
    prime_r: int
    totient: int

    @property
    def public(self) -> tuple[int, int]:
        return (self.public_exponent, self.modulus)

    @property
    def private(self) -> tuple[int, int]:
        return (self.private_exponent, self.modulus)


def rsa_keygen(prime_s: int, prime_r: int, public_exponent: int) -> RsaKeyPair:
    """Build a key pair from two distinct primes and a public exponent
    coprime to (S-1)(R-1)."""
    if prime_s == prime_r:
        raise CryptoError("the two primes must differ")
    for p in (prime_s, prime_r):
        if not is_probable_prime(p):
            raise CryptoError(f"{p} is not prime")
    modulus = prime_s * prime_r
    totient = (prime_s - 1) * (prime_r - 1)
    if not 1 < public_exponent < totient:
        raise CryptoError("public exponent out of range")
    g, _, _ = egcd(public_exponent, totient)
    if g != 1:
        raise CryptoError("public exponent shares a factor with the totient")
    d = modinv(public_exponent, totient)
    return RsaKeyPair(modulus, public_exponent, d, prime_s, prime_r, totient)


def generate_rsa_keypair(bits: int, rng: random.Random, public_exponent: int = 65537) -> RsaKeyPair:
    """Random key pair with two ``bits``-bit primes."""
    while True:
        s = random_prime(bits, rng)
        r = random_prime(bits, rng)
        if s == r:
            continue
        try:
            return rsa_keygen(s, r, public_exponent)
        except CryptoError:
            continue


def rsa_encrypt(message: int, public: tuple[int, int]) -> int:
    e, m = public
    if not 0 <= message < m:
        raise CryptoError("message out of range; block-split before encrypting")
    return pow(message, e, m)


def rsa_decrypt(ciphertext: int, private: tuple[int, int]) -> int:
    d, m = private
    if not 0 <= ciphertext < m:
        raise CryptoError("ciphertext out of range")
    return pow(ciphertext, d, m)


# Split-key transport --------------------------------------------------------

SESSION_KEY_BYTES = 16
HALF_BYTES = SESSION_KEY_BYTES // 2


def split_key(key: bytes) -> tuple[bytes, bytes]:
    """Split a 128-bit key into two 64-bit halves."""
    if len(key) != SESSION_KEY_BYTES:
        raise CryptoError(f"expected a {SESSION_KEY_BYTES}-byte key")
    return key[:HALF_BYTES], key[HALF_BYTES:]


def join_key(half_a: bytes, half_b: bytes) -> bytes:
    if len(half_a) != len(half_b) or len(half_a) != HALF_BYTES:
        raise CryptoError("mismatched half lengths")
    return half_a + half_b


# Symmetric wrapping ---------------------------------------------------------

NONCE_BYTES = 12


def symmetric_encrypt(key: bytes, plaintext: bytes, rng: random.Random) -> bytes:
    """AES-128 counter mode with a fresh nonce and an integrity tag.

    The returned blob is nonce || ciphertext+tag; decrypt with
    :func:`symmetric_decrypt`.
    """
    if len(key) != SESSION_KEY_BYTES:
        raise CryptoError(f"expected a {SESSION_KEY_BYTES}-byte key")
    nonce = rng.getrandbits(8 * NONCE_BYTES).to_bytes(NONCE_BYTES, "big")
    return nonce + AESGCM(key).encrypt(nonce, plaintext, None)


def symmetric_decrypt(key: bytes, blob: bytes) -> bytes:
    if len(key) != SESSION_KEY_BYTES:
        raise CryptoError(f"expected a {SESSION_KEY_BYTES}-byte key")
    if len(blob) < NONCE_BYTES + 16:
        raise CryptoError("ciphertext too short")
    nonce, ct = blob[:NONCE_BYTES], blob[NONCE_BYTES:]
    try:
        return AESGCM(key).decrypt(nonce, ct, None)
    except InvalidTag as exc:
        raise AuthenticationError("integrity tag mismatch") from exc


def aes_block_encrypt(key: bytes, block: bytes) -> bytes:
    """Encrypt a single 16-byte block with the raw AES-128 primitive."""
    if len(key) != 16 or len(block) != 16:
        raise CryptoError("AES-128 block primitive needs 16-byte key and block")
    enc = Cipher(algorithms.AES(key), modes.ECB()).encryptor()
    return enc.update(block) + enc.finalize()


# Square-residue identification ----------------------------------------------

@dataclass(frozen=True)
class IdentificationMaterial:
    secret_p: int
    modulus_g: int
    square_f: int


def make_identification(modulus_g: int, rng: random.Random) -> IdentificationMaterial:
    """Register a node: pick a secret P in (1, G) and publish F = P^2 mod G."""
    if modulus_g <= 3:
        raise CryptoError("modulus too small")
    p = rng.randrange(2, modulus_g)
    return IdentificationMaterial(p, modulus_g, pow(p, 2, modulus_g))


def fs_round_commit(modulus_g: int, rng: random.Random) -> tuple[int, int]:
    """Prover side: fresh s and commitment t = s^2 mod G."""
    s = rng.randrange(1, modulus_g)
    return s, pow(s, 2, modulus_g)


def fs_round_respond(s: int, secret_p: int, challenge: int, modulus_g: int) -> int:
    return (s * pow(secret_p, challenge, modulus_g)) % modulus_g


def fs_round_check(t: int, square_f: int, challenge: int, z: int, modulus_g: int) -> bool:
    return pow(z, 2, modulus_g) == (t * pow(square_f, challenge, modulus_g)) % modulus_g


def fs_identify(
    prover: IdentificationMaterial | None,
    verifier_knows: tuple[int, int],
    rounds: int,
    rng: random.Random,
) -> bool:
    """Run ``rounds`` challenge-response rounds; accept only if all pass.

    ``prover=None`` simulates an impersonator without the secret: it commits
    for an anticipated challenge bit and survives a round only when the
    guess matches, so acceptance probability is 2**-rounds.
    """
    if rounds < 1:
        raise CryptoError("at least one round required")
    modulus_g, square_f = verifier_knows
    for _ in range(rounds):
        if prover is not None:
            if prover.modulus_g != modulus_g:
                return False
            s, t = fs_round_commit(modulus_g, rng)
            challenge = rng.randrange(2)
            z = fs_round_respond(s, prover.secret_p, challenge, modulus_g)
        else:
            guess = rng.randrange(2)
            s = rng.randrange(1, modulus_g)
            # commitment rigged so the response verifies iff challenge == guess
            t = (pow(s, 2, modulus_g) * modinv(pow(square_f, guess, modulus_g), modulus_g)) % modulus_g
            challenge = rng.randrange(2)
            z = s
        if not fs_round_check(t, square_f, challenge, z, modulus_g):
            return False
    return True


# Interlock session ----------------------------------------------------------

class InterlockState:
    IDLE = "idle"
    SENT_FIRST_HALF = "sent_first_half"
    AWAITING_RESPONSE = "awaiting_response"
    COMPLETE = "complete"
    FAILED = "failed"


@dataclass
class InterlockSession:
    """Split-key transfer: the wrapped first half goes out immediately, the
    second only after the peer acknowledges, and the joined key is confirmed
    by decrypting a probe message."""

    initiator: int
    responder: int
    session_key: bytes
    wrap_key: bytes
    state: str = InterlockState.IDLE
    half_a: bytes = b""
    half_b: bytes = b""

    def first_message(self, rng: random.Random) -> bytes:
        self.half_a, self.half_b = split_key(self.session_key)
        self.state = InterlockState.SENT_FIRST_HALF
        return symmetric_encrypt(self.wrap_key, self.half_a, rng)

    def second_message(self, rng: random.Random) -> bytes:
        if self.state != InterlockState.SENT_FIRST_HALF:
            raise CryptoError("second half requested before the first was sent")
        self.state = InterlockState.AWAITING_RESPONSE
        return symmetric_encrypt(self.wrap_key, self.half_b, rng)

    @staticmethod
    def reassemble(wrap_key: bytes, msg_a: bytes, msg_b: bytes) -> bytes:
        """Responder side: decrypt both halves and join them."""
        half_a = symmetric_decrypt(wrap_key, msg_a)
        half_b = symmetric_decrypt(wrap_key, msg_b)
        return join_key(half_a, half_b)
